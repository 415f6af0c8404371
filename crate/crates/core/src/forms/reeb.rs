use nalgebra::{Matrix3, Vector3};

use super::{
    metric_inner, metric_norm, Covector, CoverPoint, MetricField, OneForm, TwoFormValue,
    VectorValue,
};
use crate::error::{Error, Result};

/// Threshold below which `λ ∧ dλ` is treated as vanishing.
const SINGULAR_TOL: f64 = 1e-14;

/// Coefficient of `λ ∧ dλ` against `dt∧dx∧dy`.
pub fn contact_volume<F: OneForm + ?Sized>(lam: &F, p: &CoverPoint) -> f64 {
    lam.eval(p).pair(&lam.d(p).kernel_vector())
}

/// Coefficient of `λ ∧ dλ` against `dt∧dr∧dφ` (`= r ·` [`contact_volume`]).
pub fn contact_volume_polar<F: OneForm + ?Sized>(lam: &F, p: &CoverPoint) -> f64 {
    p.z().radius() * contact_volume(lam, p)
}

/// Reeb vector from pointwise values of `λ` and `dλ`.
///
/// `dλ(X, ·) = 0` forces `X ∥ w` for the kernel vector `w`, and `λ(X) = 1`
/// fixes the scale, so the 3×3 system has the closed-form solution
/// `X = w / λ(w)`.
pub fn reeb_from_values(lam: &Covector, dlam: &TwoFormValue) -> Result<VectorValue> {
    let w = dlam.kernel_vector();
    let s = lam.pair(&w);
    let scale = lam.0.norm() * w.norm();
    if s.abs() <= SINGULAR_TOL * scale.max(1.0) || !s.is_finite() {
        return Err(Error::NonContact(s));
    }
    Ok(w / s)
}

pub fn reeb_vector<F: OneForm + ?Sized>(lam: &F, p: &CoverPoint) -> Result<VectorValue> {
    reeb_from_values(&lam.eval(p), &lam.d(p))
}

/// How to orient `ker ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelOrientation {
    /// `ι_X (dt∧dx∧dy)` is a positive multiple of `ω`.
    Volume,
    /// Positive pairing (Euclidean dot product) with a reference vector.
    Reference(VectorValue),
}

/// Unit (for `metric`) spanning vector of `ker ω`.
pub fn kernel_field(
    omega: &TwoFormValue,
    metric: &Matrix3<f64>,
    orientation: KernelOrientation,
) -> Result<VectorValue> {
    let w = omega.kernel_vector();
    if w.norm() <= 1e-300 {
        return Err(Error::RankDeficient);
    }
    let mut v = w / metric_norm(metric, &w);
    if let KernelOrientation::Reference(r) = orientation {
        if v.dot(&r) < 0.0 {
            v = -v;
        }
    }
    Ok(v)
}

/// `λ`, `dλ`, the Reeb vector and the metric at one point.
#[derive(Debug, Clone, Copy)]
pub struct ContactFrame {
    pub lam: Covector,
    pub dlam: TwoFormValue,
    pub reeb: VectorValue,
    pub metric: Matrix3<f64>,
}

impl ContactFrame {
    pub fn at<F: OneForm + ?Sized, M: MetricField + ?Sized>(
        lam: &F,
        metric: &M,
        p: &CoverPoint,
    ) -> Result<Self> {
        Self::from_values(lam.eval(p), lam.d(p), metric.eval(p))
    }

    /// Build from pointwise values. `dlam` need not be the derivative of any
    /// field, which lets fixtures swap in a different two-form.
    pub fn from_values(lam: Covector, dlam: TwoFormValue, metric: Matrix3<f64>) -> Result<Self> {
        let reeb = reeb_from_values(&lam, &dlam)?;
        Ok(Self {
            lam,
            dlam,
            reeb,
            metric,
        })
    }

    /// `π_λ v = v − λ(v) X^λ`.
    #[inline]
    pub fn project(&self, v: &VectorValue) -> VectorValue {
        v - self.reeb * self.lam.pair(v)
    }

    /// `m`-orthonormal basis of `ξ = ker λ` by Gram–Schmidt on `π∂x, π∂y`,
    /// falling back to `π∂t, π∂x` when those degenerate.
    pub fn xi_basis(&self) -> Result<[VectorValue; 2]> {
        let candidates = [
            (Vector3::y(), Vector3::z()),
            (Vector3::x(), Vector3::y()),
            (Vector3::x(), Vector3::z()),
        ];
        for (a, b) in candidates {
            let u1 = self.project(&a);
            let n1 = metric_norm(&self.metric, &u1);
            if n1 < 1e-8 {
                continue;
            }
            let e1 = u1 / n1;
            let u2 = self.project(&b);
            let u2 = u2 - e1 * metric_inner(&self.metric, &e1, &u2);
            let n2 = metric_norm(&self.metric, &u2);
            if n2 < 1e-8 {
                continue;
            }
            return Ok([e1, u2 / n2]);
        }
        Err(Error::DegenerateContactPlane)
    }
}

/// `π_λ v` along the Reeb direction.
pub fn project_xi<F: OneForm + ?Sized>(
    lam: &F,
    p: &CoverPoint,
    v: &VectorValue,
) -> Result<VectorValue> {
    let c = lam.eval(p);
    let reeb = reeb_from_values(&c, &lam.d(p))?;
    Ok(v - reeb * c.pair(v))
}
