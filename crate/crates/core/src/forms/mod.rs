//! Pointwise differential forms on the cover `S¹ × 𝔻`.
//!
//! Coordinates are `(t, x, y)` with `t ∈ ℝ/ℤ`. Vectors and covectors are
//! stored as component triples in that order; two-forms are stored by their
//! three independent components in the basis `dt∧dx, dt∧dy, dx∧dy`.

use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::hyperbolic::{DiskPoint, Isometry};

mod acs;
mod energy;
mod reeb;

pub use acs::{compatible_acs, cylinder_acs, cylinder_metric, ComplexStructure};
pub use energy::{cr_residual, energy_density, hofer_select, EnergyDensity, HoferSelection, Jet};
pub use reeb::{
    contact_volume, contact_volume_polar, kernel_field, project_xi, reeb_vector, ContactFrame,
    KernelOrientation,
};

/// Tangent vector `(v_t, v_x, v_y)`.
pub type VectorValue = Vector3<f64>;

/// Step used by the central-difference exterior derivative.
pub const FD_STEP: f64 = 1e-4;

/// A point of `S¹ × 𝔻` with `t` reduced to `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverPoint {
    t: f64,
    z: DiskPoint,
}

impl CoverPoint {
    pub fn new(t: f64, z: DiskPoint) -> Self {
        let mut t = t.rem_euclid(1.0);
        if t >= 1.0 {
            t = 0.0;
        }
        Self { t, z }
    }

    pub fn from_txy(t: f64, x: f64, y: f64) -> crate::Result<Self> {
        Ok(Self::new(t, DiskPoint::from_xy(x, y)?))
    }

    #[inline]
    pub fn t(&self) -> f64 {
        self.t
    }

    #[inline]
    pub fn z(&self) -> DiskPoint {
        self.z
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.z.x()
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.z.y()
    }

    /// Deck action: the isometry acts on the disk factor only.
    pub fn mapped(&self, g: &Isometry) -> Self {
        Self {
            t: self.t,
            z: g.apply_point(self.z),
        }
    }

    fn shifted(&self, axis: usize, h: f64) -> Self {
        match axis {
            0 => Self::new(self.t + h, self.z),
            1 => Self {
                t: self.t,
                z: DiskPoint::from_xy(self.x() + h, self.y()).unwrap_or(self.z),
            },
            _ => Self {
                t: self.t,
                z: DiskPoint::from_xy(self.x(), self.y() + h).unwrap_or(self.z),
            },
        }
    }
}

/// Covector `(c_t, c_x, c_y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Covector(pub Vector3<f64>);

impl Covector {
    pub fn new(ct: f64, cx: f64, cy: f64) -> Self {
        Self(Vector3::new(ct, cx, cy))
    }

    pub fn zero() -> Self {
        Self(Vector3::zeros())
    }

    #[inline]
    pub fn pair(&self, v: &VectorValue) -> f64 {
        self.0.dot(v)
    }

    /// Dual norm with respect to the metric matrix `g`.
    pub fn dual_norm(&self, g: &Matrix3<f64>) -> f64 {
        let inv = g.try_inverse().unwrap_or_else(Matrix3::identity);
        (self.0.transpose() * inv * self.0)[(0, 0)].max(0.0).sqrt()
    }

    /// Pullback by the deck isometry `g` based at disk coordinate `z`:
    /// `(g*c)(v) = c(dg v)` where `c` lives at `g(z)`.
    pub fn pulled_back(&self, g: &Isometry, z: Complex64) -> Self {
        let d = g.derivative(z);
        let (cx, cy) = (self.0[1], self.0[2]);
        Self::new(self.0[0], cx * d.re + cy * d.im, -cx * d.im + cy * d.re)
    }
}

impl std::ops::Add for Covector {
    type Output = Covector;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Covector {
    type Output = Covector;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl std::ops::Mul<f64> for Covector {
    type Output = Covector;
    fn mul(self, rhs: f64) -> Self {
        Self(self.0 * rhs)
    }
}

/// Push a tangent vector at `z` forward by `g`.
pub fn push_forward(g: &Isometry, z: Complex64, v: &VectorValue) -> VectorValue {
    let d = g.derivative(z);
    let w = d * Complex64::new(v[1], v[2]);
    Vector3::new(v[0], w.re, w.im)
}

/// Two-form `tx dt∧dx + ty dt∧dy + xy dx∧dy`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TwoFormValue {
    pub tx: f64,
    pub ty: f64,
    pub xy: f64,
}

impl TwoFormValue {
    pub fn new(tx: f64, ty: f64, xy: f64) -> Self {
        Self { tx, ty, xy }
    }

    /// Antisymmetric component matrix `M` with `ω(u, v) = uᵀ M v`.
    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::new(
            0.0, self.tx, self.ty, //
            -self.tx, 0.0, self.xy, //
            -self.ty, -self.xy, 0.0,
        )
    }

    #[inline]
    pub fn apply(&self, u: &VectorValue, v: &VectorValue) -> f64 {
        self.tx * (u[0] * v[1] - u[1] * v[0])
            + self.ty * (u[0] * v[2] - u[2] * v[0])
            + self.xy * (u[1] * v[2] - u[2] * v[1])
    }

    /// `ι_X ω`.
    pub fn contract(&self, x: &VectorValue) -> Covector {
        Covector(self.matrix().transpose() * x)
    }

    /// The vector `w` with `ι_w (dt∧dx∧dy) = ω`; it spans `ker ω` and carries
    /// the orientation induced by the volume form.
    #[inline]
    pub fn kernel_vector(&self) -> VectorValue {
        Vector3::new(self.xy, -self.ty, self.tx)
    }

    pub fn max_abs(&self) -> f64 {
        self.tx.abs().max(self.ty.abs()).max(self.xy.abs())
    }

    /// Pullback by `g` based at disk coordinate `z`.
    pub fn pulled_back(&self, g: &Isometry, z: Complex64) -> Self {
        let d = g.derivative(z);
        // Jacobian [[re, -im], [im, re]] of the disk factor
        Self {
            tx: self.tx * d.re + self.ty * d.im,
            ty: -self.tx * d.im + self.ty * d.re,
            xy: self.xy * d.norm_sqr(),
        }
    }
}

impl std::ops::Sub for TwoFormValue {
    type Output = TwoFormValue;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.tx - rhs.tx, self.ty - rhs.ty, self.xy - rhs.xy)
    }
}

/// A one-form field on the cover.
pub trait OneForm: Send + Sync {
    fn eval(&self, p: &CoverPoint) -> Covector;

    /// Exterior derivative. Built-in forms override this with a closed form;
    /// the default is a central difference with step [`FD_STEP`].
    fn d(&self, p: &CoverPoint) -> TwoFormValue {
        fd_exterior_derivative(self, p, FD_STEP)
    }
}

/// `dλ` by central differences of the components.
pub fn fd_exterior_derivative<F: OneForm + ?Sized>(
    form: &F,
    p: &CoverPoint,
    h: f64,
) -> TwoFormValue {
    let mut jac = Matrix3::zeros(); // jac[(i, j)] = ∂_i c_j
    for axis in 0..3 {
        let plus = form.eval(&p.shifted(axis, h)).0;
        let minus = form.eval(&p.shifted(axis, -h)).0;
        for j in 0..3 {
            jac[(axis, j)] = (plus[j] - minus[j]) / (2.0 * h);
        }
    }
    TwoFormValue {
        tx: jac[(0, 1)] - jac[(1, 0)],
        ty: jac[(0, 2)] - jac[(2, 0)],
        xy: jac[(1, 2)] - jac[(2, 1)],
    }
}

impl<F: OneForm + ?Sized> OneForm for Arc<F> {
    fn eval(&self, p: &CoverPoint) -> Covector {
        (**self).eval(p)
    }
    fn d(&self, p: &CoverPoint) -> TwoFormValue {
        (**self).d(p)
    }
}

impl<F: OneForm + ?Sized> OneForm for &F {
    fn eval(&self, p: &CoverPoint) -> Covector {
        (**self).eval(p)
    }
    fn d(&self, p: &CoverPoint) -> TwoFormValue {
        (**self).d(p)
    }
}

/// A two-form field on the cover.
pub trait TwoFormField: Send + Sync {
    fn eval(&self, p: &CoverPoint) -> TwoFormValue;
}

/// The two-form field `dλ`.
pub struct Exterior<F>(pub F);

impl<F: OneForm> TwoFormField for Exterior<F> {
    fn eval(&self, p: &CoverPoint) -> TwoFormValue {
        self.0.d(p)
    }
}

/// A constant-coefficient two-form, used for fixtures.
#[derive(Debug, Clone, Copy)]
pub struct ConstantTwoForm(pub TwoFormValue);

impl TwoFormField for ConstantTwoForm {
    fn eval(&self, _p: &CoverPoint) -> TwoFormValue {
        self.0
    }
}

/// Constant-coefficient one-form.
#[derive(Debug, Clone, Copy)]
pub struct ConstantForm(pub Covector);

impl OneForm for ConstantForm {
    fn eval(&self, _p: &CoverPoint) -> Covector {
        self.0
    }
    fn d(&self, _p: &CoverPoint) -> TwoFormValue {
        TwoFormValue::default()
    }
}

/// A one-form given by a closure, with finite-difference derivative.
pub struct FnForm<F>(pub F);

impl<F> OneForm for FnForm<F>
where
    F: Fn(&CoverPoint) -> Covector + Send + Sync,
{
    fn eval(&self, p: &CoverPoint) -> Covector {
        (self.0)(p)
    }
}

/// `g*λ` for a deck isometry `g`.
pub struct Pullback<F> {
    pub inner: F,
    pub g: Isometry,
}

impl<F: OneForm> OneForm for Pullback<F> {
    fn eval(&self, p: &CoverPoint) -> Covector {
        let q = p.mapped(&self.g);
        self.inner.eval(&q).pulled_back(&self.g, p.z().z())
    }

    fn d(&self, p: &CoverPoint) -> TwoFormValue {
        let q = p.mapped(&self.g);
        self.inner.d(&q).pulled_back(&self.g, p.z().z())
    }
}

/// `(1/N) Σ g*λ` over a finite list of isometries.
pub struct Averaged<F> {
    inner: F,
    elements: Vec<Isometry>,
}

/// Average a form over a non-empty list of isometries.
pub fn average_form<F: OneForm>(lam: F, elements: Vec<Isometry>) -> crate::Result<Averaged<F>> {
    if elements.is_empty() {
        return Err(crate::Error::InvalidParameter(
            "averaging needs at least one element".into(),
        ));
    }
    Ok(Averaged {
        inner: lam,
        elements,
    })
}

impl<F: OneForm> OneForm for Averaged<F> {
    fn eval(&self, p: &CoverPoint) -> Covector {
        let n = self.elements.len() as f64;
        self.elements
            .iter()
            .map(|g| self.inner.eval(&p.mapped(g)).pulled_back(g, p.z().z()))
            .fold(Covector::zero(), |a, b| a + b)
            * (1.0 / n)
    }

    fn d(&self, p: &CoverPoint) -> TwoFormValue {
        let n = self.elements.len() as f64;
        let sum = self.elements.iter().fold(TwoFormValue::default(), |acc, g| {
            let w = self.inner.d(&p.mapped(g)).pulled_back(g, p.z().z());
            TwoFormValue::new(acc.tx + w.tx, acc.ty + w.ty, acc.xy + w.xy)
        });
        TwoFormValue::new(sum.tx / n, sum.ty / n, sum.xy / n)
    }
}

/// A Riemannian metric on the cover.
pub trait MetricField: Send + Sync {
    fn eval(&self, p: &CoverPoint) -> Matrix3<f64>;
}

/// `dt² + (dx² + dy²)/(1 − r²)²`, invariant under the deck group.
#[derive(Debug, Clone, Copy, Default)]
pub struct ProductMetric;

impl MetricField for ProductMetric {
    fn eval(&self, p: &CoverPoint) -> Matrix3<f64> {
        let s = 1.0 - p.z().z().norm_sqr();
        let f = 1.0 / (s * s);
        Matrix3::from_diagonal(&Vector3::new(1.0, f, f))
    }
}

/// Flat metric `dt² + dx² + dy²`; used for fixtures.
#[derive(Debug, Clone, Copy, Default)]
pub struct EuclideanMetric;

impl MetricField for EuclideanMetric {
    fn eval(&self, _p: &CoverPoint) -> Matrix3<f64> {
        Matrix3::identity()
    }
}

#[inline]
pub fn metric_norm(g: &Matrix3<f64>, v: &VectorValue) -> f64 {
    (v.transpose() * g * v)[(0, 0)].max(0.0).sqrt()
}

#[inline]
pub fn metric_inner(g: &Matrix3<f64>, u: &VectorValue, v: &VectorValue) -> f64 {
    (u.transpose() * g * v)[(0, 0)]
}

/// `∂_φ = −y ∂x + x ∂y` at `z`.
#[inline]
pub fn angular_field(z: Complex64) -> VectorValue {
    Vector3::new(0.0, -z.im, z.re)
}
