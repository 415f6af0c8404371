use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};

use super::{metric_inner, ContactFrame, VectorValue};
use crate::error::{Error, Result};

/// Almost complex structure on `ξ`, stored in an `m`-orthonormal basis.
///
/// The defining relation `m(πu, πv) = dλ(πu, J_raw πv)` only determines
/// `J_raw` up to `J_raw² = −c²`; `matrix` holds `J = J_raw / c` and `scale`
/// holds `c`.
#[derive(Debug, Clone, Copy)]
pub struct ComplexStructure {
    pub basis: [VectorValue; 2],
    pub matrix: Matrix2<f64>,
    pub scale: f64,
}

impl ComplexStructure {
    /// Coordinates of `π v` in the orthonormal basis.
    fn coords(&self, frame: &ContactFrame, v: &VectorValue) -> Vector2<f64> {
        let pv = frame.project(v);
        Vector2::new(
            metric_inner(&frame.metric, &self.basis[0], &pv),
            metric_inner(&frame.metric, &self.basis[1], &pv),
        )
    }

    /// `J π v` as a tangent vector.
    pub fn apply(&self, frame: &ContactFrame, v: &VectorValue) -> VectorValue {
        let c = self.matrix * self.coords(frame, v);
        self.basis[0] * c[0] + self.basis[1] * c[1]
    }

    /// `‖J² + I‖` in the basis.
    pub fn square_defect(&self) -> f64 {
        (self.matrix * self.matrix + Matrix2::identity()).abs().max()
    }
}

/// The `m`-compatible complex structure on `ξ`, normalized to square to `−1`.
pub fn compatible_acs(frame: &ContactFrame) -> Result<ComplexStructure> {
    let basis = frame.xi_basis()?;
    let w = frame.dlam.apply(&basis[0], &basis[1]);
    let dl = Matrix2::new(0.0, w, -w, 0.0);
    let gram = Matrix2::new(
        metric_inner(&frame.metric, &basis[0], &basis[0]),
        metric_inner(&frame.metric, &basis[0], &basis[1]),
        metric_inner(&frame.metric, &basis[1], &basis[0]),
        metric_inner(&frame.metric, &basis[1], &basis[1]),
    );
    let inv = dl.try_inverse().ok_or(Error::DegenerateContactPlane)?;
    let raw = inv * gram;
    let det = raw.determinant();
    if !(det > 0.0) || !det.is_finite() {
        return Err(Error::DegenerateContactPlane);
    }
    let scale = det.sqrt();
    Ok(ComplexStructure {
        basis,
        matrix: raw / scale,
        scale,
    })
}

/// `J̃(h, k) = (−λ(k), J π k + h X^λ)` on `ℝ ⊕ T(S¹×𝔻)`, in the ordered
/// basis `(∂a, ∂t, ∂x, ∂y)`.
pub fn cylinder_acs(frame: &ContactFrame, j: &ComplexStructure) -> Matrix4<f64> {
    let mut out = Matrix4::zeros();
    for col in 0..4 {
        let mut e = Vector4::zeros();
        e[col] = 1.0;
        let h = e[0];
        let k = VectorValue::new(e[1], e[2], e[3]);
        let top = -frame.lam.pair(&k);
        let rest = j.apply(frame, &k) + frame.reeb * h;
        out.set_column(col, &Vector4::new(top, rest[0], rest[1], rest[2]));
    }
    out
}

/// `h₁h₂ + λ(k₁)λ(k₂) + m(πk₁, πk₂)` as a symmetric 4×4 matrix.
pub fn cylinder_metric(frame: &ContactFrame) -> Matrix4<f64> {
    let mut out = Matrix4::zeros();
    out[(0, 0)] = 1.0;
    let basis = [VectorValue::x(), VectorValue::y(), VectorValue::z()];
    for i in 0..3 {
        for k in 0..3 {
            let (u, v) = (basis[i], basis[k]);
            let val = frame.lam.pair(&u) * frame.lam.pair(&v)
                + metric_inner(&frame.metric, &frame.project(&u), &frame.project(&v));
            out[(i + 1, k + 1)] = val;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{Covector, CoverPoint, MetricField, ProductMetric, TwoFormValue};
    use crate::lutz::base_alpha;
    use approx::assert_abs_diff_eq;
    use nalgebra::{Matrix3, Vector3};

    #[test]
    fn rotation_fixture() {
        let frame = ContactFrame::from_values(
            Covector::new(1.0, 0.0, 0.0),
            TwoFormValue::new(0.0, 0.0, 1.0),
            Matrix3::identity(),
        )
        .unwrap();
        let j = compatible_acs(&frame).unwrap();
        assert!((j.apply(&frame, &Vector3::y()) - Vector3::z()).norm() < 1e-14);
        assert!((j.apply(&frame, &Vector3::z()) + Vector3::y()).norm() < 1e-14);
        assert_abs_diff_eq!(j.scale, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn alpha_at_origin_is_quarter_turn() {
        let p = CoverPoint::from_txy(0.0, 0.0, 0.0).unwrap();
        let frame = ContactFrame::at(&base_alpha(), &ProductMetric, &p).unwrap();
        let j = compatible_acs(&frame).unwrap();
        assert!((j.apply(&frame, &Vector3::y()) - Vector3::z()).norm() < 1e-14);
        // dα = 2 dx∧dy at the origin with a unit metric, so c = 1/2
        assert_abs_diff_eq!(j.scale, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn cylinder_structure_identities() {
        let p = CoverPoint::from_txy(0.3, 0.2, -0.35).unwrap();
        let frame = ContactFrame::at(&base_alpha(), &ProductMetric, &p).unwrap();
        let j = compatible_acs(&frame).unwrap();
        let jt = cylinder_acs(&frame, &j);
        let x = frame.reeb;
        let img = jt * Vector4::new(1.0, 0.0, 0.0, 0.0);
        assert!((img - Vector4::new(0.0, x[0], x[1], x[2])).norm() < 1e-14);
        let img = jt * Vector4::new(0.0, x[0], x[1], x[2]);
        assert!((img - Vector4::new(-1.0, 0.0, 0.0, 0.0)).norm() < 1e-12);
        assert!((jt * jt + Matrix4::identity()).abs().max() < 1e-10);

        let g = cylinder_metric(&frame);
        assert_eq!(g, g.transpose());
        assert!(g.cholesky().is_some());
        assert_abs_diff_eq!(g[(0, 0)], 1.0);
        let xv = Vector4::new(0.0, x[0], x[1], x[2]);
        assert_abs_diff_eq!((xv.transpose() * g * xv)[(0, 0)], 1.0, epsilon = 1e-12);
        let v = frame.project(&Vector3::new(0.2, 0.5, -0.1));
        let vv = Vector4::new(0.0, v[0], v[1], v[2]);
        let m = ProductMetric.eval(&p);
        assert_abs_diff_eq!(
            (vv.transpose() * g * vv)[(0, 0)],
            (v.transpose() * m * v)[(0, 0)],
            epsilon = 1e-12
        );
    }
}
