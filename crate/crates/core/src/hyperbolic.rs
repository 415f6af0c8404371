//! Poincaré-disk geometry and the genus-2 deck group.
//!
//! The disk carries the metric `|dz|² / (1 − |z|²)²`, which has curvature −4.
//! Distances are therefore half of the usual curvature −1 values; in particular
//! the distance from the origin to a point of modulus `r` is `artanh(r)`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Points closer than this to the unit circle are rejected.
pub const DISK_MARGIN: f64 = 1e-12;

/// Tolerance used when deduplicating group elements by their action.
pub const PROBE_TOLERANCE: f64 = 1e-9;

const PROBES: [Complex64; 3] = [
    Complex64::new(0.0, 0.0),
    Complex64::new(0.31, -0.12),
    Complex64::new(-0.07, 0.42),
];

/// A point of the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        let r = z.norm();
        if !r.is_finite() || r >= 1.0 - DISK_MARGIN {
            return Err(Error::OutsideDisk(r));
        }
        Ok(Self(z))
    }

    pub fn from_xy(x: f64, y: f64) -> Result<Self> {
        Self::new(Complex64::new(x, y))
    }

    pub fn from_polar(r: f64, phi: f64) -> Result<Self> {
        Self::new(Complex64::from_polar(r, phi))
    }

    pub fn origin() -> Self {
        Self(Complex64::new(0.0, 0.0))
    }

    #[inline]
    pub fn z(self) -> Complex64 {
        self.0
    }

    #[inline]
    pub fn x(self) -> f64 {
        self.0.re
    }

    #[inline]
    pub fn y(self) -> f64 {
        self.0.im
    }

    #[inline]
    pub fn radius(self) -> f64 {
        self.0.norm()
    }

    #[inline]
    pub fn angle(self) -> f64 {
        self.0.arg()
    }
}

/// Hyperbolic distance for the curvature −4 metric `|dz|²/(1−|z|²)²`.
pub fn hyperbolic_distance(p: DiskPoint, q: DiskPoint) -> f64 {
    raw_distance(p.z(), q.z())
}

pub(crate) fn raw_distance(p: Complex64, q: Complex64) -> f64 {
    let num = (p - q).norm();
    if num == 0.0 {
        return 0.0;
    }
    let den = (Complex64::new(1.0, 0.0) - p.conj() * q).norm();
    (num / den).min(1.0 - f64::EPSILON).atanh()
}

/// Orientation-preserving disk isometry `z ↦ e^{iθ}(z − a)/(1 − ā z)`.
///
/// On the cover `S¹ × 𝔻` it acts as the identity on the circle coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    a: Complex64,
    theta: f64,
}

impl Isometry {
    pub fn new(a: Complex64, theta: f64) -> Result<Self> {
        let m = a.norm();
        if !m.is_finite() || m >= 1.0 {
            return Err(Error::InvalidIsometry(m));
        }
        Ok(Self { a, theta })
    }

    pub fn identity() -> Self {
        Self {
            a: Complex64::new(0.0, 0.0),
            theta: 0.0,
        }
    }

    pub fn rotation(theta: f64) -> Self {
        Self {
            a: Complex64::new(0.0, 0.0),
            theta,
        }
    }

    /// The isometry sending `p` to 0 and `q` onto the positive real axis.
    pub fn normalizing(p: Complex64, q: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let w = (q - p) / (one - p.conj() * q);
        Self {
            a: p,
            theta: -w.arg(),
        }
    }

    #[inline]
    pub fn a(&self) -> Complex64 {
        self.a
    }

    #[inline]
    pub fn theta(&self) -> f64 {
        self.theta
    }

    #[inline]
    pub fn apply(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        Complex64::from_polar(1.0, self.theta) * (z - self.a) / (one - self.a.conj() * z)
    }

    pub fn apply_point(&self, p: DiskPoint) -> DiskPoint {
        let w = self.apply(p.z());
        // isometries preserve the open disk; clamp only against round-off
        let r = w.norm();
        if r >= 1.0 - DISK_MARGIN {
            DiskPoint(w * ((1.0 - 2.0 * DISK_MARGIN) / r))
        } else {
            DiskPoint(w)
        }
    }

    /// Complex derivative `g'(z)`; the differential acts on `(∂x, ∂y)` as
    /// multiplication by this number.
    #[inline]
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let den = one - self.a.conj() * z;
        Complex64::from_polar(1.0, self.theta) * (1.0 - self.a.norm_sqr()) / (den * den)
    }

    /// SU(1,1) representative `[[p, q], [q̄, p̄]]`.
    fn matrix(&self) -> (Complex64, Complex64) {
        let p = Complex64::from_polar(1.0, 0.5 * self.theta);
        (p, -self.a * p)
    }

    fn from_matrix(p: Complex64, q: Complex64) -> Self {
        let a = -q / p;
        Self {
            a,
            theta: 2.0 * p.arg(),
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let (p1, q1) = self.matrix();
        let (p2, q2) = other.matrix();
        let p = p1 * p2 + q1 * q2.conj();
        let q = p1 * q2 + q1 * p2.conj();
        Self::from_matrix(p, q)
    }

    pub fn inverse(&self) -> Isometry {
        let (p, q) = self.matrix();
        Self::from_matrix(p.conj(), -q)
    }

    /// Maximum displacement of the probe points relative to `other`.
    pub fn action_distance(&self, other: &Isometry) -> f64 {
        PROBES
            .iter()
            .map(|&z| (self.apply(z) - other.apply(z)).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.action_distance(&Isometry::identity()) < tol
    }
}

/// The regular hyperbolic octagon with vertex angle π/4 centred at 0.
#[derive(Debug, Clone)]
pub struct Octagon {
    pub vertex_radius: f64,
    pub midpoint_radius: f64,
    pub vertices: [Complex64; 8],
}

impl Octagon {
    fn midpoint_from_vertices(v0: Complex64, v1: Complex64) -> f64 {
        let t = Isometry::normalizing(v0, v1);
        let s = t.apply(v1).norm();
        let mid = t.inverse().apply(Complex64::new((0.5 * s.atanh()).tanh(), 0.0));
        mid.norm()
    }
}

/// Interior angle at a vertex of the regular octagon whose vertices sit at
/// Euclidean radius `rho`.
fn octagon_vertex_angle(rho: f64) -> f64 {
    let vertex = |k: i32| Complex64::from_polar(rho, PI / 8.0 + k as f64 * PI / 4.0);
    let v = vertex(0);
    let t = Isometry::normalizing(v, vertex(1));
    let w = t.apply(vertex(-1));
    // geodesics through 0 are diameters, so the angle is read off directly
    w.arg().abs()
}

/// Bisection on the vertex radius making the angle sum equal to 2π.
pub fn regular_octagon() -> Result<Octagon> {
    let target = PI / 4.0;
    let (mut lo, mut hi) = (1e-6, 1.0 - 1e-9);
    if !(octagon_vertex_angle(lo) > target && octagon_vertex_angle(hi) < target) {
        return Err(Error::Construction("vertex-angle bracket failed".into()));
    }
    let mut iterations = 0;
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if octagon_vertex_angle(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
        if iterations > 200 {
            return Err(Error::Construction("vertex radius bisection stalled".into()));
        }
    }
    let rho = 0.5 * (lo + hi);
    let vertices: [Complex64; 8] =
        std::array::from_fn(|k| Complex64::from_polar(rho, PI / 8.0 + k as f64 * PI / 4.0));
    let midpoint_radius = Octagon::midpoint_from_vertices(vertices[7], vertices[0]);
    Ok(Octagon {
        vertex_radius: rho,
        midpoint_radius,
        vertices,
    })
}

/// Generators of a cocompact genus-2 surface group together with the
/// fundamental octagon they pair.
#[derive(Debug, Clone)]
pub struct FuchsianGroup {
    /// `[a1, b1, a2, b2, a1⁻¹, b1⁻¹, a2⁻¹, b2⁻¹]`; generator `i` has inverse
    /// `(i + n/2) mod n`.
    generators: Vec<Isometry>,
    relation_residual: f64,
    octagon: Option<Octagon>,
}

impl FuchsianGroup {
    /// The group with no generators. Only useful as a test fixture.
    pub fn trivial() -> Self {
        Self {
            generators: Vec::new(),
            relation_residual: 0.0,
            octagon: None,
        }
    }

    /// Finite cyclic group of rotations of order `n`; a compact test fixture.
    pub fn cyclic_rotations(n: usize) -> Self {
        let r = Isometry::rotation(2.0 * PI / n as f64);
        Self {
            generators: vec![r, r.inverse()],
            relation_residual: 0.0,
            octagon: None,
        }
    }

    pub fn generators(&self) -> &[Isometry] {
        &self.generators
    }

    pub fn relation_residual(&self) -> f64 {
        self.relation_residual
    }

    pub fn octagon(&self) -> Option<&Octagon> {
        self.octagon.as_ref()
    }

    #[inline]
    pub fn inverse_index(&self, i: usize) -> usize {
        let half = self.generators.len() / 2;
        (i + half) % self.generators.len()
    }

    /// `[a1,b1][a2,b2]` as a single isometry.
    pub fn relator(&self) -> Isometry {
        let g = &self.generators;
        let word = [g[0], g[1], g[4], g[5], g[2], g[3], g[6], g[7]];
        word.iter()
            .fold(Isometry::identity(), |acc, h| acc.compose(h))
    }

    /// True iff `z` is in the closed Dirichlet domain centred at 0, i.e. not
    /// hyperbolically closer to any generator image of the origin.
    pub fn in_fundamental_domain(&self, z: Complex64) -> bool {
        let d0 = z.norm();
        self.generators.iter().all(|g| {
            let c = g.inverse().apply(Complex64::new(0.0, 0.0));
            raw_distance(z, Complex64::new(0.0, 0.0)) <= raw_distance(z, c) + 1e-14 || d0 == 0.0
        })
    }

    /// Greedy reduction into the Dirichlet domain. Returns `h` with `h(z)` in
    /// the domain, or `None` if more than `max_steps` generators are needed.
    pub fn reduce(&self, z: Complex64, max_steps: usize) -> Option<(Isometry, Complex64)> {
        let mut h = Isometry::identity();
        let mut w = z;
        for _ in 0..=max_steps {
            let current = w.norm();
            let best = self
                .generators
                .iter()
                .map(|g| (g, g.apply(w)))
                .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()));
            match best {
                Some((g, next)) if next.norm() < current - 1e-14 => {
                    h = g.compose(&h);
                    w = next;
                }
                _ => return Some((h, w)),
            }
        }
        None
    }
}

fn sample_points(n: usize) -> impl Iterator<Item = Complex64> {
    // golden-angle spiral filling the disk of radius 0.95
    (0..n).map(move |k| {
        let r = 0.95 * ((k as f64 + 0.5) / n as f64).sqrt();
        let phi = k as f64 * PI * (3.0 - 5.0_f64.sqrt());
        Complex64::from_polar(r, phi)
    })
}

/// Side pairings of the regular octagon with the gluing pattern
/// `a1 b1 a1⁻¹ b1⁻¹ a2 b2 a2⁻¹ b2⁻¹`.
pub fn genus2_generators() -> Result<FuchsianGroup> {
    let octagon = regular_octagon()?;
    let v = octagon.vertices;
    // side j runs from v[j-1] to v[j]; its midpoint is at angle jπ/4
    let side = |j: usize| (v[(j + 7) % 8], v[j % 8]);
    let pairing = |j: usize| {
        let (p, q) = side(j);
        let (pp, qq) = side(j + 2);
        let t = Isometry::normalizing(p, q);
        let s = Isometry::normalizing(qq, pp);
        s.inverse().compose(&t)
    };
    let a1 = pairing(0).inverse();
    let b1 = pairing(1);
    let a2 = pairing(4).inverse();
    let b2 = pairing(5);
    let generators = vec![
        a1,
        b1,
        a2,
        b2,
        a1.inverse(),
        b1.inverse(),
        a2.inverse(),
        b2.inverse(),
    ];
    let mut group = FuchsianGroup {
        generators,
        relation_residual: 0.0,
        octagon: Some(octagon),
    };
    let relator = group.relator();
    group.relation_residual = sample_points(100)
        .map(|z| (relator.apply(z) - z).norm())
        .fold(0.0, f64::max);
    if group.relation_residual >= 1e-9 {
        return Err(Error::Construction(format!(
            "surface relation residual {:e}",
            group.relation_residual
        )));
    }
    Ok(group)
}

/// A reduced word in the generators with its evaluated isometry.
#[derive(Debug, Clone)]
pub struct Word {
    pub letters: Vec<u8>,
    pub isometry: Isometry,
}

impl Word {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 8] = ["a1", "b1", "a2", "b2", "A1", "B1", "A2", "B2"];
        if self.letters.is_empty() {
            return write!(f, "id");
        }
        for (i, &l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            match NAMES.get(l as usize) {
                Some(n) => write!(f, "{n}")?,
                None => write!(f, "g{l}")?,
            }
        }
        Ok(())
    }
}

/// All distinct group elements represented by reduced words of length at most
/// `max_len`, identity first, ordered by length.
pub fn enumerate_words(group: &FuchsianGroup, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word {
        letters: Vec::new(),
        isometry: Isometry::identity(),
    }];
    let mut frontier = vec![0usize];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for &wi in &frontier {
            for (gi, g) in group.generators.iter().enumerate() {
                let word = &out[wi];
                if let Some(&last) = word.letters.last() {
                    if group.inverse_index(last as usize) == gi {
                        continue;
                    }
                }
                let isometry = word.isometry.compose(g);
                if out
                    .iter()
                    .any(|w| w.isometry.action_distance(&isometry) < PROBE_TOLERANCE)
                {
                    continue;
                }
                let mut letters = word.letters.clone();
                letters.push(gi as u8);
                out.push(Word { letters, isometry });
                next.push(out.len() - 1);
            }
        }
        frontier = next;
    }
    out
}

/// Outcome of [`validate_separation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separation {
    pub separated: bool,
    /// Minimum Euclidean gap between `B_δ(0)` and its translates; negative
    /// when some translate overlaps.
    pub margin: f64,
}

/// Euclidean gap between `B_δ(0)` and `g(B_δ(0))`.
///
/// The image is the hyperbolic ball of radius `artanh δ` about `g(0)`, whose
/// nearest point to the origin lies on the ray through `g(0)`.
pub fn ball_gap(g: &Isometry, delta: f64) -> f64 {
    let centre = g.apply(Complex64::new(0.0, 0.0)).norm();
    let near = (centre.atanh() - delta.atanh()).tanh();
    near - delta
}

pub fn validate_separation(group: &FuchsianGroup, delta: f64, depth: usize) -> Separation {
    let margin = enumerate_words(group, depth.max(1))
        .iter()
        .skip(1)
        .map(|w| ball_gap(&w.isometry, delta))
        .fold(f64::INFINITY, f64::min);
    Separation {
        separated: margin > 0.0,
        margin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn distance_examples() {
        let o = DiskPoint::origin();
        assert_eq!(hyperbolic_distance(o, o), 0.0);
        let h = DiskPoint::from_xy(0.5, 0.0).unwrap();
        assert_abs_diff_eq!(hyperbolic_distance(o, h), 0.5493061443340549, epsilon = 1e-12);
        let p = DiskPoint::from_xy(0.3, 0.3).unwrap();
        assert_eq!(hyperbolic_distance(p, p), 0.0);
    }

    #[test]
    fn distance_from_origin_matches_quadrature_of_metric() {
        // ∫₀^r dr / (1 − r²) by composite Simpson
        let r = 0.5;
        let n = 2000;
        let h = r / n as f64;
        let f = |s: f64| 1.0 / (1.0 - s * s);
        let mut acc = f(0.0) + f(r);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(k as f64 * h);
        }
        let quad = acc * h / 3.0;
        let d = hyperbolic_distance(DiskPoint::origin(), DiskPoint::from_xy(r, 0.0).unwrap());
        assert_abs_diff_eq!(d, quad, epsilon = 1e-12);
    }

    #[test]
    fn disk_point_rejects_boundary() {
        assert!(DiskPoint::from_xy(1.0, 0.0).is_err());
        assert!(DiskPoint::from_xy(0.0, 1.0 - 1e-13).is_err());
        assert!(DiskPoint::from_xy(0.0, 0.999).is_ok());
        assert!(Isometry::new(Complex64::new(1.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn octagon_radii_match_closed_forms() {
        let oct = regular_octagon().unwrap();
        // vertex: cosh R = cot²(π/8) at curvature −1, r = tanh(R/2)
        let cot = 1.0 / (PI / 8.0).tan();
        let vertex = ((cot * cot).acosh() / 2.0).tanh();
        assert_abs_diff_eq!(oct.vertex_radius, vertex, epsilon = 1e-11);
        assert_abs_diff_eq!(oct.vertex_radius, 2f64.powf(-0.25), epsilon = 1e-11);
        // side midpoint: cosh d = cot(π/8), r = tanh(d/2)
        let mid = (cot.acosh() / 2.0).tanh();
        assert_abs_diff_eq!(oct.midpoint_radius, mid, epsilon = 1e-10);
        assert_abs_diff_eq!(oct.midpoint_radius, 0.643594, epsilon = 1e-6);
    }

    #[test]
    fn generators_satisfy_surface_relation() {
        let g = genus2_generators().unwrap();
        assert_eq!(g.generators().len(), 8);
        assert!(g.relation_residual() < 1e-9);
        let w = g.relator().apply(Complex64::new(0.0, 0.0));
        assert!(w.norm() < 1e-9);
        for gen in g.generators() {
            assert!(gen.apply(Complex64::new(0.0, 0.0)).norm() > 0.6);
        }
    }

    #[test]
    fn generator_images_of_octagon_are_disjoint() {
        let g = genus2_generators().unwrap();
        // sample the open octagon, push through each generator, and check the
        // images fall outside the closed octagon
        for k in 0..400 {
            let z = sample_points(400).nth(k).unwrap() * 0.9;
            if !g.in_fundamental_domain(z) {
                continue;
            }
            for gen in g.generators() {
                let w = gen.apply(z);
                let dist0 = raw_distance(w, Complex64::new(0.0, 0.0));
                let own = raw_distance(w, gen.apply(Complex64::new(0.0, 0.0)));
                assert!(own < dist0, "image not in adjacent copy");
            }
        }
    }

    #[test]
    fn word_counts() {
        let g = genus2_generators().unwrap();
        assert_eq!(enumerate_words(&g, 0).len(), 1);
        assert_eq!(enumerate_words(&g, 1).len(), 9);
        assert_eq!(enumerate_words(&g, 2).len(), 65);
    }

    #[test]
    fn word_count_matches_brute_force_dedup() {
        // oracle: all (not necessarily reduced) words of length ≤ 2, dedup by
        // probe action with a plain pairwise scan
        let g = genus2_generators().unwrap();
        let mut all = vec![Isometry::identity()];
        for a in g.generators() {
            all.push(*a);
            for b in g.generators() {
                all.push(a.compose(b));
            }
        }
        let mut distinct: Vec<Isometry> = Vec::new();
        for h in all {
            if !distinct.iter().any(|d| d.action_distance(&h) < PROBE_TOLERANCE) {
                distinct.push(h);
            }
        }
        assert_eq!(distinct.len(), 65);
    }

    #[test]
    fn separation_examples() {
        let g = genus2_generators().unwrap();
        assert!(validate_separation(&g, 0.01, 2).separated);
        assert!(!validate_separation(&g, 0.99, 1).separated);
        let s = validate_separation(&g, 0.3, 3);
        assert!(s.separated);
        assert!(s.margin > 0.5);
    }

    #[test]
    fn ball_gap_matches_sampled_image_circle() {
        let g = genus2_generators().unwrap();
        let delta = 0.3;
        for w in enumerate_words(&g, 2).iter().skip(1) {
            let sampled = (0..4096)
                .map(|k| {
                    let z = Complex64::from_polar(delta, 2.0 * PI * k as f64 / 4096.0);
                    w.isometry.apply(z).norm()
                })
                .fold(f64::INFINITY, f64::min)
                - delta;
            assert_abs_diff_eq!(ball_gap(&w.isometry, delta), sampled, epsilon = 1e-5);
        }
    }

    #[test]
    fn reduce_returns_words_that_land_in_domain() {
        let g = genus2_generators().unwrap();
        for w in enumerate_words(&g, 3) {
            let z = w.isometry.apply(Complex64::new(0.05, -0.02));
            let (h, back) = g.reduce(z, 10).unwrap();
            assert!(g.in_fundamental_domain(back));
            assert_abs_diff_eq!(back.re, 0.05, epsilon = 1e-9);
            assert_abs_diff_eq!(back.im, -0.02, epsilon = 1e-9);
            assert!((h.apply(z) - back).norm() < 1e-12);
        }
    }
}
