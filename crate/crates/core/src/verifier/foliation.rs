//! Characteristic foliation of a disk graph `t = g(r)` inside one tube.
//!
//! The disk is parametrized by Cartesian coordinates `(u, v)` with
//! `F(u, v) = (g(r), u, v)`. The line field is the kernel of `λ` restricted
//! to `TF`; singular points are the zeros of that restriction.

use std::sync::Arc;

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forms::{contact_volume, CoverPoint, OneForm, VectorValue};
use crate::lutz::{LutzData, Twist};

/// Thresholds for [`classify_matrix`].
pub const IMAG_TOL: f64 = 1e-8;
pub const DET_TOL: f64 = 1e-8;

/// Height function of the graph with its derivative.
#[derive(Clone)]
pub enum Height {
    /// `g(r) = a r²`.
    Quadratic(f64),
    /// `g ≡ t0`.
    Flat(f64),
    /// Any `r ↦ (g(r), g'(r))` with `g'(0) = 0`.
    Custom(Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>),
}

impl std::fmt::Debug for Height {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Height::Quadratic(a) => write!(f, "Quadratic({a})"),
            Height::Flat(t) => write!(f, "Flat({t})"),
            Height::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl Height {
    pub fn eval(&self, r: f64) -> (f64, f64) {
        match self {
            Height::Quadratic(a) => (a * r * r, 2.0 * a * r),
            Height::Flat(t) => (*t, 0.0),
            Height::Custom(f) => f(r),
        }
    }

    /// `g'(r)/r`, with its limit at the centre.
    fn slope_over_r(&self, r: f64) -> f64 {
        match self {
            Height::Quadratic(a) => 2.0 * a,
            Height::Flat(_) => 0.0,
            Height::Custom(f) => {
                let r = r.max(1e-9);
                f(r).1 / r
            }
        }
    }
}

/// A disk graph over `{|z| ≤ radius}` in tube coordinates.
#[derive(Debug, Clone)]
pub struct DiskSurface {
    pub radius: f64,
    pub height: Height,
}

impl DiskSurface {
    /// `t = ε r²` with boundary at the zero `r*` of `f₂`.
    pub fn overtwisted(data: &LutzData) -> Self {
        Self {
            radius: data.r_star,
            height: Height::Quadratic(data.eps),
        }
    }

    /// `t = 0` with the given boundary radius.
    pub fn flat(radius: f64) -> Self {
        Self {
            radius,
            height: Height::Flat(0.0),
        }
    }

    fn point(&self, u: f64, v: f64) -> Result<CoverPoint> {
        let r = u.hypot(v);
        CoverPoint::from_txy(self.height.eval(r).0, u, v)
    }

    /// `∂u F` and `∂v F`.
    fn tangents(&self, u: f64, v: f64) -> (VectorValue, VectorValue) {
        let k = self.height.slope_over_r(u.hypot(v));
        (VectorValue::new(k * u, 1.0, 0.0), VectorValue::new(k * v, 0.0, 1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularKind {
    Elliptic,
    Hyperbolic,
    Degenerate,
}

impl SingularKind {
    pub fn name(self) -> &'static str {
        match self {
            SingularKind::Elliptic => "elliptic",
            SingularKind::Hyperbolic => "hyperbolic",
            SingularKind::Degenerate => "degenerate",
        }
    }
}

/// Classify a linearization by its determinant and eigenvalues.
pub fn classify_matrix(m: &Matrix2<f64>) -> SingularKind {
    let det = m.determinant();
    if det.abs() < DET_TOL {
        return SingularKind::Degenerate;
    }
    let [l1, _] = eigenvalues(m);
    if l1.im.abs() > IMAG_TOL || det > 0.0 {
        SingularKind::Elliptic
    } else {
        SingularKind::Hyperbolic
    }
}

fn eigenvalues(m: &Matrix2<f64>) -> [Complex64; 2] {
    let tr = m.trace();
    let det = m.determinant();
    let disc = Complex64::new(0.25 * tr * tr - det, 0.0).sqrt();
    let half = Complex64::new(0.5 * tr, 0.0);
    [half + disc, half - disc]
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularPoint {
    pub u: f64,
    pub v: f64,
    pub jacobian: Matrix2<f64>,
    pub eigenvalues: [Complex64; 2],
    pub kind: SingularKind,
}

/// One node of the direction-field grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoliationGrid {
    pub u: f64,
    pub v: f64,
    /// Unit direction in `(u, v)`, zero at a singular node.
    pub du: f64,
    pub dv: f64,
    /// `|λ|` on the lifted direction.
    pub lambda_residual: f64,
}

#[derive(Debug, Clone)]
pub struct FoliationReport {
    pub boundary_radius: f64,
    pub singular_points: Vec<SingularPoint>,
    /// `max |λ(∂φ)|` along the boundary circle.
    pub boundary_legendrian_residual: f64,
    pub leaves: Vec<Vec<(f64, f64)>>,
    pub grid: Vec<FoliationGrid>,
    pub max_lambda_residual: f64,
}

impl FoliationReport {
    pub fn elliptic_count(&self) -> usize {
        self.singular_points
            .iter()
            .filter(|s| s.kind == SingularKind::Elliptic)
            .count()
    }

    pub fn boundary_is_legendrian(&self) -> bool {
        self.boundary_legendrian_residual < 1e-9
    }

    /// Exactly one singular point, elliptic, with Legendrian boundary.
    pub fn is_overtwisted_disk(&self) -> bool {
        self.singular_points.len() == 1
            && self.singular_points[0].kind == SingularKind::Elliptic
            && self.boundary_is_legendrian()
    }
}

pub fn classify_singularity(report: &FoliationReport, index: usize) -> SingularKind {
    report.singular_points[index].kind
}

struct Restriction<'a, F: ?Sized> {
    surface: &'a DiskSurface,
    lam: &'a F,
}

impl<F: OneForm + ?Sized> Restriction<'_, F> {
    /// `(λ(∂u F), λ(∂v F))`.
    fn ab(&self, u: f64, v: f64) -> (f64, f64) {
        let Ok(p) = self.surface.point(u, v) else {
            return (f64::NAN, f64::NAN);
        };
        let c = self.lam.eval(&p);
        let (eu, ev) = self.surface.tangents(u, v);
        (c.pair(&eu), c.pair(&ev))
    }

    /// Kernel of the 1×2 matrix `[A B]`, i.e. `(B, −A)`.
    fn field(&self, u: f64, v: f64) -> (f64, f64) {
        let (a, b) = self.ab(u, v);
        (b, -a)
    }

    fn jacobian(&self, u: f64, v: f64, h: f64) -> Matrix2<f64> {
        let (pu, mu) = (self.field(u + h, v), self.field(u - h, v));
        let (pv, mv) = (self.field(u, v + h), self.field(u, v - h));
        Matrix2::new(
            (pu.0 - mu.0) / (2.0 * h),
            (pv.0 - mv.0) / (2.0 * h),
            (pu.1 - mu.1) / (2.0 * h),
            (pv.1 - mv.1) / (2.0 * h),
        )
    }

    fn newton(&self, mut u: f64, mut v: f64, h: f64) -> Option<(f64, f64)> {
        for _ in 0..60 {
            let f = self.field(u, v);
            if f.0.hypot(f.1) < 1e-14 {
                return Some((u, v));
            }
            let j = self.jacobian(u, v, h);
            let step = j.try_inverse()? * nalgebra::Vector2::new(f.0, f.1);
            u -= step[0];
            v -= step[1];
            if !u.is_finite() || !v.is_finite() {
                return None;
            }
        }
        let f = self.field(u, v);
        (f.0.hypot(f.1) < 1e-11).then_some((u, v))
    }
}

/// Characteristic foliation on a disk graph.
///
/// Singular points are located in grid cells where both components of the
/// restricted covector change sign, refined by Newton's method; their
/// linearizations come from central differences.
pub fn characteristic_foliation<F: OneForm + ?Sized>(
    surface: &DiskSurface,
    lam: &F,
    grid: usize,
) -> Result<FoliationReport> {
    let radius = surface.radius;
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::BadSurface(format!("boundary radius {radius}")));
    }
    if surface.height.eval(0.0).1.abs() > 1e-12 {
        return Err(Error::BadSurface("height has a cone point at the centre".into()));
    }
    let n = grid.max(4) & !1; // even, so the centre is a node
    for k in 0..=8 {
        let r = radius * k as f64 / 8.0;
        for j in 0..8 {
            let phi = j as f64 * std::f64::consts::FRAC_PI_4;
            let p = surface.point(r * phi.cos(), r * phi.sin())?;
            let vol = contact_volume(lam, &p);
            if !(vol > 0.0) {
                return Err(Error::BadSurface(format!("form is not contact at r = {r}")));
            }
        }
    }
    let res = Restriction { surface, lam };
    let step = 2.0 * radius / n as f64;
    let coord = |i: usize| -radius + step * i as f64;

    // direction grid
    let mut nodes = Vec::new();
    let mut max_res: f64 = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            let (u, v) = (coord(i), coord(j));
            if u.hypot(v) > radius {
                continue;
            }
            let (du, dv) = res.field(u, v);
            let norm = du.hypot(dv);
            let (du, dv) = if norm > 1e-14 { (du / norm, dv / norm) } else { (0.0, 0.0) };
            let (eu, ev) = surface.tangents(u, v);
            let lifted = eu * du + ev * dv;
            let r = lam.eval(&surface.point(u, v)?).pair(&lifted).abs();
            max_res = max_res.max(r);
            nodes.push(FoliationGrid {
                u,
                v,
                du,
                dv,
                lambda_residual: r,
            });
        }
    }

    // singular points
    let mut singular: Vec<SingularPoint> = Vec::new();
    let h = 1e-7 * radius.max(1e-3);
    for i in 0..n {
        for j in 0..n {
            let corners = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)].map(|(a, b)| (coord(a), coord(b)));
            if corners.iter().all(|(u, v)| u.hypot(*v) > radius) {
                continue;
            }
            let vals = corners.map(|(u, v)| res.ab(u, v));
            let changes = |f: fn(&(f64, f64)) -> f64| {
                let lo = vals.iter().map(f).fold(f64::INFINITY, f64::min);
                let hi = vals.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
                lo <= 0.0 && hi >= 0.0
            };
            if !(changes(|x| x.0) && changes(|x| x.1)) {
                continue;
            }
            let (cu, cv) = (coord(i) + 0.5 * step, coord(j) + 0.5 * step);
            let Some((u, v)) = res.newton(cu, cv, h) else {
                continue;
            };
            if u.hypot(v) >= radius * (1.0 - 1e-9) {
                continue;
            }
            if singular.iter().any(|s| (s.u - u).hypot(s.v - v) < 1e-8) {
                continue;
            }
            let jac = res.jacobian(u, v, 1e-6 * radius.max(1e-3));
            singular.push(SingularPoint {
                u,
                v,
                jacobian: jac,
                eigenvalues: eigenvalues(&jac),
                kind: classify_matrix(&jac),
            });
        }
    }
    singular.sort_by(|a, b| a.u.hypot(a.v).total_cmp(&b.u.hypot(b.v)));

    // boundary residual
    let mut boundary: f64 = 0.0;
    for k in 0..720 {
        let phi = k as f64 * std::f64::consts::PI / 360.0;
        let (u, v) = (radius * phi.cos(), radius * phi.sin());
        let c = lam.eval(&surface.point(u, v)?);
        boundary = boundary.max(c.pair(&VectorValue::new(0.0, -v, u)).abs());
    }

    let leaves = trace_leaves(&res, radius, &singular);
    Ok(FoliationReport {
        boundary_radius: radius,
        singular_points: singular,
        boundary_legendrian_residual: boundary,
        leaves,
        grid: nodes,
        max_lambda_residual: max_res,
    })
}

fn trace_leaves<F: OneForm + ?Sized>(
    res: &Restriction<'_, F>,
    radius: f64,
    singular: &[SingularPoint],
) -> Vec<Vec<(f64, f64)>> {
    let unit = |u: f64, v: f64, prev: (f64, f64)| -> Option<(f64, f64)> {
        let (a, b) = res.field(u, v);
        let n = a.hypot(b);
        if !(n > 1e-14) {
            return None;
        }
        let (a, b) = (a / n, b / n);
        // keep the orientation continuous along the leaf
        if a * prev.0 + b * prev.1 < 0.0 {
            Some((-a, -b))
        } else {
            Some((a, b))
        }
    };
    let h = radius / 150.0;
    let near_singular =
        |u: f64, v: f64| singular.iter().any(|s| (s.u - u).hypot(s.v - v) < 0.5 * h);
    let mut leaves = Vec::new();
    for ring in [0.35, 0.7] {
        for k in 0..12 {
            let phi = (k as f64 + 0.5 * ring) * std::f64::consts::PI / 6.0;
            let start = (ring * radius * phi.cos(), ring * radius * phi.sin());
            let Some(d0) = unit(start.0, start.1, (1.0, 0.0)) else {
                continue;
            };
            let mut halves = Vec::new();
            for sign in [1.0, -1.0] {
                let mut pts = vec![start];
                let (mut u, mut v) = start;
                let mut prev = (sign * d0.0, sign * d0.1);
                for _ in 0..900 {
                    let step = (|| {
                        let k1 = unit(u, v, prev)?;
                        let k2 = unit(u + 0.5 * h * k1.0, v + 0.5 * h * k1.1, k1)?;
                        let k3 = unit(u + 0.5 * h * k2.0, v + 0.5 * h * k2.1, k1)?;
                        let k4 = unit(u + h * k3.0, v + h * k3.1, k1)?;
                        Some((
                            (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0) / 6.0,
                            (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1) / 6.0,
                            k1,
                        ))
                    })();
                    let Some((du, dv, k1)) = step else { break };
                    let (nu, nv) = (u + h * du, v + h * dv);
                    if nu.hypot(nv) > radius {
                        break;
                    }
                    u = nu;
                    v = nv;
                    prev = k1;
                    pts.push((u, v));
                    if near_singular(u, v) {
                        break;
                    }
                }
                halves.push(pts);
            }
            let mut back = halves.pop().unwrap_or_default();
            back.reverse();
            back.pop();
            back.extend(halves.pop().unwrap_or_default());
            leaves.push(back);
        }
    }
    leaves
}

/// Direction `f₂(∂r + g'∂t) − g'f₁∂φ` projected to `(u, v)`.
pub fn closed_form_direction<T: Twist + ?Sized>(
    twist: &T,
    height: &Height,
    u: f64,
    v: f64,
) -> (f64, f64) {
    let r = u.hypot(v);
    let (_, gp) = height.eval(r);
    let (f1, f2) = (twist.f1(r), twist.f2(r));
    (f2 * u / r + gp * f1 * v, f2 * v / r - gp * f1 * u)
}
