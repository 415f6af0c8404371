//! Sampling certificates for virtual contact structures.
//!
//! A structure is a deck group acting on `S¹ × 𝔻`, an invariant two-form `ω`
//! of rank two, a primitive `λ` and an invariant metric. Certification samples
//! the fundamental octagon and its word translates and reports the sup of
//! `‖λ‖` and the inf of `λ(X̂)` for the unit kernel field `X̂` of `ω`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forms::{
    kernel_field, push_forward, CoverPoint, KernelOrientation, MetricField, OneForm, TwoFormField,
};
use crate::hyperbolic::{enumerate_words, DiskPoint, FuchsianGroup, Word};
use crate::lutz::{global_analytic_bound, BaseAlpha, LutzStructure, Region, Twist};

mod foliation;

pub use foliation::{
    characteristic_foliation, classify_singularity, closed_form_direction, DiskSurface,
    FoliationGrid, FoliationReport, Height, SingularKind, SingularPoint,
};

/// Tolerance for `dλ = ω` and `g*ω = ω` in [`VirtualContactStructure::new`].
pub const STRUCTURE_TOL: f64 = 1e-8;

/// Assigns a sample point to a named region for the per-region report.
pub type RegionFn = Arc<dyn Fn(&CoverPoint) -> &'static str + Send + Sync>;

pub struct VirtualContactStructure {
    pub group: Arc<FuchsianGroup>,
    pub omega: Box<dyn TwoFormField>,
    pub lam: Box<dyn OneForm>,
    pub metric: Box<dyn MetricField>,
    pub kernel_orientation: KernelOrientation,
    pub region_of: Option<RegionFn>,
}

impl VirtualContactStructure {
    /// Checks `dλ = ω` and `g*ω = ω` for the generators at sample points of
    /// the fundamental domain.
    pub fn new(
        group: Arc<FuchsianGroup>,
        omega: Box<dyn TwoFormField>,
        lam: Box<dyn OneForm>,
        metric: Box<dyn MetricField>,
        kernel_orientation: KernelOrientation,
    ) -> Result<Self> {
        let s = Self::new_unchecked(group, omega, lam, metric, kernel_orientation);
        for p in check_points() {
            let w = s.omega.eval(&p);
            let dl = s.lam.d(&p);
            let scale = w.max_abs().max(1.0);
            if (dl - w).max_abs() > STRUCTURE_TOL * scale {
                return Err(Error::InvalidParameter(format!(
                    "d lambda differs from omega by {:e} at ({}, {})",
                    (dl - w).max_abs(),
                    p.x(),
                    p.y()
                )));
            }
            for g in s.group.generators() {
                let pulled = s.omega.eval(&p.mapped(g)).pulled_back(g, p.z().z());
                if (pulled - w).max_abs() > STRUCTURE_TOL * scale {
                    return Err(Error::InvalidParameter(
                        "omega is not invariant under the deck group".into(),
                    ));
                }
            }
        }
        Ok(s)
    }

    /// No consistency checks; for fixtures whose `ω` is not `dλ`.
    pub fn new_unchecked(
        group: Arc<FuchsianGroup>,
        omega: Box<dyn TwoFormField>,
        lam: Box<dyn OneForm>,
        metric: Box<dyn MetricField>,
        kernel_orientation: KernelOrientation,
    ) -> Self {
        Self {
            group,
            omega,
            lam,
            metric,
            kernel_orientation,
            region_of: None,
        }
    }

    pub fn with_regions(mut self, f: RegionFn) -> Self {
        self.region_of = Some(f);
        self
    }
}

fn check_points() -> Vec<CoverPoint> {
    let mut out = Vec::new();
    for i in 0..6 {
        for j in 0..7 {
            let r = 0.05 + 0.12 * i as f64;
            let phi = 0.3 + j as f64 * 2.0 * PI / 7.0;
            out.push(CoverPoint::new(0.13 * j as f64, DiskPoint::from_polar(r, phi).unwrap()));
        }
    }
    out
}

/// A polar sampling grid `r_i = R i/n_r`, `φ_j = 2πj/n_φ`, `t_k = k/n_t`.
///
/// Doubling any count keeps every old node, so estimates are monotone under
/// refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingGrid {
    pub radial: usize,
    pub angular: usize,
    pub t_slices: usize,
}

impl SamplingGrid {
    pub fn new(radial: usize, angular: usize, t_slices: usize) -> Self {
        Self {
            radial: radial.max(1),
            angular: angular.max(1),
            t_slices: t_slices.max(1),
        }
    }

    pub fn refined(self) -> Self {
        Self::new(2 * self.radial, 2 * self.angular, 2 * self.t_slices)
    }

    pub fn len(&self) -> usize {
        (self.radial + 1) * self.angular * self.t_slices
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Disk nodes of radius at most `r_max`, centre included once.
    pub fn disk_nodes(&self, r_max: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0)];
        for i in 1..=self.radial {
            let r = r_max * i as f64 / self.radial as f64;
            for j in 0..self.angular {
                out.push(Complex64::from_polar(r, 2.0 * PI * j as f64 / self.angular as f64));
            }
        }
        out
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.t_slices).map(move |k| k as f64 / self.t_slices as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub sup_norm_estimate: f64,
    pub inf_pairing_estimate: f64,
    pub sample_count: usize,
    pub word_depth: usize,
    pub word_count: usize,
    pub per_region_minima: BTreeMap<String, f64>,
    pub pass: bool,
}

/// Sample the closed fundamental domain (or a disk of radius 0.9 when the
/// group has no octagon) and all translates by words up to `depth`.
pub fn verify_virtual_contact(
    s: &VirtualContactStructure,
    grid: SamplingGrid,
    depth: usize,
) -> VerificationReport {
    let r_max = s.group.octagon().map_or(0.9, |o| o.vertex_radius);
    let base: Vec<Complex64> = grid
        .disk_nodes(r_max)
        .into_iter()
        .filter(|z| s.group.generators().is_empty() || s.group.in_fundamental_domain(*z))
        .collect();
    let words = enumerate_words(&s.group, depth);
    let times: Vec<f64> = grid.times().collect();

    struct Acc {
        sup: f64,
        inf: f64,
        count: usize,
        regions: BTreeMap<String, f64>,
    }
    let empty = || Acc {
        sup: 0.0,
        inf: f64::INFINITY,
        count: 0,
        regions: BTreeMap::new(),
    };
    let merge = |mut a: Acc, b: Acc| {
        a.sup = a.sup.max(b.sup);
        a.inf = a.inf.min(b.inf);
        a.count += b.count;
        for (k, v) in b.regions {
            let e = a.regions.entry(k).or_insert(f64::INFINITY);
            *e = e.min(v);
        }
        a
    };

    let acc = words
        .par_iter()
        .map(|w| {
            let mut acc = empty();
            for z in &base {
                let image = w.isometry.apply(*z);
                let Ok(dp) = DiskPoint::new(image) else {
                    continue;
                };
                for &t in &times {
                    let p = CoverPoint::new(t, dp);
                    let m = s.metric.eval(&p);
                    let lam = s.lam.eval(&p);
                    acc.sup = acc.sup.max(lam.dual_norm(&m));
                    let pairing = match kernel_field(&s.omega.eval(&p), &m, s.kernel_orientation) {
                        Ok(x) => lam.pair(&x),
                        Err(_) => f64::NEG_INFINITY,
                    };
                    acc.inf = acc.inf.min(pairing);
                    acc.count += 1;
                    let key = s.region_of.as_ref().map_or("all", |f| f(&p));
                    let e = acc.regions.entry(key.to_string()).or_insert(f64::INFINITY);
                    *e = e.min(pairing);
                }
            }
            acc
        })
        .reduce(empty, merge);

    VerificationReport {
        sup_norm_estimate: acc.sup,
        inf_pairing_estimate: acc.inf,
        sample_count: acc.count,
        word_depth: depth,
        word_count: words.len(),
        per_region_minima: acc.regions,
        pass: acc.inf > 0.0 && acc.sup.is_finite(),
    }
}

/// The twisted structure `(G, dα^L, α^L, product metric)` with regions
/// labelled by the tube-local radius.
pub fn twisted_structure<T: Twist + 'static>(s: &LutzStructure<T>) -> VirtualContactStructure {
    let form = s.clone();
    let locator = s.clone();
    let (delta, eps) = (s.twist().delta(), s.twist().eps());
    VirtualContactStructure::new_unchecked(
        s.group_arc(),
        Box::new(crate::forms::Exterior(s.clone())),
        Box::new(form),
        Box::new(crate::forms::ProductMetric),
        KernelOrientation::Volume,
    )
    .with_regions(Arc::new(move |p: &CoverPoint| {
        let loc = locator.locate(p.z().z());
        Region::classify(loc.local.norm(), delta, eps).name()
    }))
}

/// The untwisted structure `(G, dα, α, product metric)`.
pub fn untwisted_structure(group: Arc<FuchsianGroup>) -> Result<VirtualContactStructure> {
    VirtualContactStructure::new(
        group,
        Box::new(crate::forms::Exterior(BaseAlpha)),
        Box::new(BaseAlpha),
        Box::new(crate::forms::ProductMetric),
        KernelOrientation::Volume,
    )
}

/// Sampled minimum of `g*α^L(R^L)` on one region of the central tube.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMinimum {
    pub region: Region,
    pub r_min: f64,
    pub r_max: f64,
    pub sampled_min: f64,
    pub bound: f64,
}

impl RegionMinimum {
    pub fn margin(&self) -> f64 {
        self.sampled_min - self.bound
    }
}

#[derive(Debug, Clone)]
pub struct OrbitInfimum {
    pub value: f64,
    pub argmin_point: CoverPoint,
    pub argmin_word: String,
    pub analytic_bound: f64,
    pub regions: Vec<RegionMinimum>,
    /// Largest `|g*α^L(R^L) − 1|` over the sampled points outside the tubes.
    pub outside_deviation: f64,
    /// Largest difference between the fast formula and a direct evaluation
    /// of the full form at translated points, on a subsample.
    pub cross_check: f64,
    pub evaluations: usize,
    pub words: usize,
}

impl OrbitInfimum {
    /// Every region meets its analytic bound up to `1e−6`.
    pub fn pass(&self) -> bool {
        self.value > 0.0
            && self.value >= self.analytic_bound - 1e-6
            && self.regions.iter().all(|r| r.margin() >= -1e-6)
    }
}

#[derive(Clone, Copy)]
struct Best {
    value: f64,
    node: usize,
    word: usize,
    t: f64,
}

impl Best {
    fn none() -> Self {
        Self {
            value: f64::INFINITY,
            node: usize::MAX,
            word: usize::MAX,
            t: 0.0,
        }
    }

    fn better(self, other: Self) -> Self {
        // deterministic tie-break on indices
        match self.value.total_cmp(&other.value) {
            std::cmp::Ordering::Less => self,
            std::cmp::Ordering::Greater => other,
            std::cmp::Ordering::Equal => {
                if (self.node, self.word) <= (other.node, other.word) {
                    self
                } else {
                    other
                }
            }
        }
    }
}

/// Minimum of `g*α^L(R^L) = α^L(R^L) + (g*α − α)(R^L)` over a tube grid and
/// all words up to `depth`.
///
/// The tube grid uses `grid.radial + 1` radii from 0 to `δ` inclusive. A
/// subsample is re-evaluated through the full form at `g(x)` paired with
/// `dg R^L`, and points of the octagon outside the tube are checked against
/// the exact value 1.
pub fn orbit_infimum<T: Twist + 'static>(
    s: &LutzStructure<T>,
    grid: SamplingGrid,
) -> Result<OrbitInfimum> {
    if s.depth() == 0 {
        return Err(Error::InvalidParameter("orbit_infimum needs depth ≥ 1".into()));
    }
    let twist = s.twist();
    let (delta, eps) = (twist.delta(), twist.eps());
    let words: Vec<Word> = enumerate_words(s.group(), s.depth());
    let nodes = grid.disk_nodes(delta);
    let times: Vec<f64> = grid.times().collect();

    // per-node data independent of the word
    struct Node {
        z: Complex64,
        field: crate::forms::VectorValue,
        local: f64,
        alpha: crate::forms::Covector,
        region: usize,
    }
    let node_data: Vec<Node> = nodes
        .iter()
        .map(|&z| {
            let field = twist.local_field(z).expect("node inside the tube");
            let region = Region::classify(z.norm().min(delta), delta, eps);
            Node {
                z,
                field,
                local: twist.local_form(z).pair(&field),
                alpha: BaseAlpha::at(z),
                region: Region::ALL.iter().position(|r| *r == region).unwrap(),
            }
        })
        .collect();

    let nreg = Region::ALL.len();
    let per_node = |(ni, n): (usize, &Node)| -> (Best, Vec<f64>) {
        let mut best = Best::none();
        let mut reg = vec![f64::INFINITY; nreg];
        for &t in &times {
            let p = CoverPoint::new(t, DiskPoint::new(n.z).expect("tube node"));
            for (wi, w) in words.iter().enumerate() {
                let g = &w.isometry;
                let moved = p.mapped(g);
                let diff = BaseAlpha::at(moved.z().z()).pulled_back(g, n.z) - n.alpha;
                let v = n.local + diff.pair(&n.field);
                reg[n.region] = reg[n.region].min(v);
                best = best.better(Best {
                    value: v,
                    node: ni,
                    word: wi,
                    t,
                });
            }
        }
        (best, reg)
    };
    let (best, reg) = node_data
        .par_iter()
        .enumerate()
        .map(per_node)
        .reduce(
            || (Best::none(), vec![f64::INFINITY; nreg]),
            |(b1, r1), (b2, r2)| {
                (
                    b1.better(b2),
                    r1.iter().zip(&r2).map(|(a, b)| a.min(*b)).collect(),
                )
            },
        );

    // direct evaluation of the full form on a subsample
    let cross_check = node_data
        .par_iter()
        .enumerate()
        .filter(|(i, _)| i % 37 == 0)
        .map(|(_, n)| {
            let mut worst: f64 = 0.0;
            for w in words.iter().filter(|w| w.len() <= 2) {
                let g = &w.isometry;
                let image = g.apply(n.z);
                let Ok(dp) = DiskPoint::new(image) else {
                    continue;
                };
                let q = CoverPoint::new(0.25, dp);
                let direct = s.eval(&q).pair(&push_forward(g, n.z, &n.field));
                let moved = BaseAlpha::at(image).pulled_back(g, n.z) - n.alpha;
                let fast = n.local + moved.pair(&n.field);
                worst = worst.max((direct - fast).abs());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);

    // points of the octagon outside every tube: the value is exactly 1
    let r_out = s.group().octagon().map_or(0.9, |o| o.vertex_radius);
    let outside: Vec<Complex64> = grid
        .disk_nodes(r_out)
        .into_iter()
        .filter(|z| z.norm() > delta && (s.group().generators().is_empty() || s.group().in_fundamental_domain(*z)))
        .collect();
    let outside_deviation = outside
        .par_iter()
        .map(|&z| {
            let p = CoverPoint::new(0.0, DiskPoint::new(z).expect("octagon node"));
            let field = s.field_at(&s.locate(z));
            let base = s.eval(&p);
            let mut worst: f64 = 0.0;
            for w in &words {
                let g = &w.isometry;
                let diff = BaseAlpha::at(g.apply(z)).pulled_back(g, z) - BaseAlpha::at(z);
                worst = worst.max((base.pair(&field) + diff.pair(&field) - 1.0).abs());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    let outside_min = if outside.is_empty() { f64::INFINITY } else { 1.0 - outside_deviation };

    let mut regions: Vec<RegionMinimum> = Region::ALL
        .iter()
        .enumerate()
        .filter(|(i, _)| reg[*i].is_finite())
        .map(|(i, r)| {
            let (r_min, r_max) = r.range(delta, eps);
            RegionMinimum {
                region: *r,
                r_min,
                r_max,
                sampled_min: reg[i],
                bound: r.analytic_bound(twist),
            }
        })
        .collect();
    if outside_min.is_finite() {
        regions.push(RegionMinimum {
            region: Region::Outside,
            r_min: delta,
            r_max: r_out,
            sampled_min: outside_min,
            bound: 1.0,
        });
    }

    let argmin = &node_data[best.node];
    Ok(OrbitInfimum {
        value: best.value.min(outside_min),
        argmin_point: CoverPoint::new(best.t, DiskPoint::new(argmin.z)?),
        argmin_word: words[best.word].to_string(),
        analytic_bound: global_analytic_bound(twist),
        regions,
        outside_deviation,
        cross_check,
        evaluations: node_data.len() * times.len() * words.len(),
        words: words.len(),
    })
}
