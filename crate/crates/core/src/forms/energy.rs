//! Energy density and pointwise Cauchy–Riemann residual for maps into the
//! symplectization, plus the halving selection used in bubbling arguments.

use super::{metric_inner, ComplexStructure, ContactFrame, VectorValue};
use crate::error::{Error, Result};

/// First derivatives of `ũ = (a, u)` at one point of the domain.
#[derive(Debug, Clone, Copy)]
pub struct Jet {
    pub a_s: f64,
    pub a_t: f64,
    pub u_s: VectorValue,
    pub u_t: VectorValue,
}

impl Jet {
    pub fn zero() -> Self {
        Self {
            a_s: 0.0,
            a_t: 0.0,
            u_s: VectorValue::zeros(),
            u_t: VectorValue::zeros(),
        }
    }

    /// `(s, t) ↦ (T s, x(T t))` along a Reeb orbit.
    pub fn trivial_cylinder(frame: &ContactFrame, speed: f64) -> Self {
        Self {
            a_s: speed,
            a_t: 0.0,
            u_s: VectorValue::zeros(),
            u_t: frame.reeb * speed,
        }
    }
}

/// The Reeb part `◊` and contact-plane part `⋆` of the energy density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyDensity {
    pub diamond: f64,
    pub star: f64,
    pub integrand: f64,
}

pub fn energy_density(
    frame: &ContactFrame,
    phi_prime: f64,
    phi_val: f64,
    jet: &Jet,
) -> Result<EnergyDensity> {
    if !(phi_prime >= 0.0) || !(0.0..=1.0).contains(&phi_val) {
        return Err(Error::InvalidParameter(format!(
            "need φ' ≥ 0 and φ ∈ [0, 1], got φ' = {phi_prime}, φ = {phi_val}"
        )));
    }
    let ls = frame.lam.pair(&jet.u_s);
    let lt = frame.lam.pair(&jet.u_t);
    let diamond = jet.a_s * jet.a_s + jet.a_t * jet.a_t + ls * ls + lt * lt;
    let ps = frame.project(&jet.u_s);
    let pt = frame.project(&jet.u_t);
    let star = metric_inner(&frame.metric, &ps, &ps) + metric_inner(&frame.metric, &pt, &pt);
    Ok(EnergyDensity {
        diamond,
        star,
        integrand: 0.5 * phi_prime * diamond + 0.5 * phi_val * star,
    })
}

/// Norm of `(π u_s + J π u_t, λ(u_s) + a_t, λ(u_t) − a_s)`.
pub fn cr_residual(frame: &ContactFrame, j: &ComplexStructure, jet: &Jet) -> f64 {
    let xi = frame.project(&jet.u_s) + j.apply(frame, &jet.u_t);
    let e1 = frame.lam.pair(&jet.u_s) + jet.a_t;
    let e2 = frame.lam.pair(&jet.u_t) - jet.a_s;
    (metric_inner(&frame.metric, &xi, &xi).max(0.0) + e1 * e1 + e2 * e2).sqrt()
}

/// Result of [`hofer_select`]: an index into the sample and a radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoferSelection {
    pub index: usize,
    pub eps: f64,
    pub iterations: usize,
}

pub const HOFER_MAX_ITER: usize = 200;

/// Find `x` within `2ε₀` of `x₀` and `ε ∈ (0, ε₀]` with `R(x₀)ε₀ ≤ R(x)ε`
/// and `R ≤ 2R(x)` on the sampled `ε`-ball about `x`.
///
/// Whenever a sample `y` in the current ball has `R(y) > 2R(x)`, move to the
/// worst such `y` and halve `ε`.
pub fn hofer_select<P, D, R>(
    points: &[P],
    dist: D,
    r: R,
    x0: usize,
    eps0: f64,
) -> Result<HoferSelection>
where
    D: Fn(&P, &P) -> f64,
    R: Fn(&P) -> f64,
{
    if !(eps0 > 0.0) || x0 >= points.len() {
        return Err(Error::InvalidParameter(
            "hofer_select needs eps0 > 0 and a valid start index".into(),
        ));
    }
    let values: Vec<f64> = points.iter().map(&r).collect();
    let mut x = x0;
    let mut eps = eps0;
    for iterations in 0..HOFER_MAX_ITER {
        let bound = 2.0 * values[x];
        let violator = points
            .iter()
            .enumerate()
            .filter(|(i, y)| values[*i] > bound && dist(&points[x], y) <= eps)
            .max_by(|a, b| values[a.0].total_cmp(&values[b.0]).then(b.0.cmp(&a.0)));
        match violator {
            None => {
                return Ok(HoferSelection {
                    index: x,
                    eps,
                    iterations,
                })
            }
            Some((i, _)) => {
                x = i;
                eps *= 0.5;
            }
        }
    }
    Err(Error::HoferNonTermination(HOFER_MAX_ITER))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{compatible_acs, Covector, CoverPoint, ProductMetric, TwoFormValue};
    use crate::lutz::base_alpha;
    use approx::assert_abs_diff_eq;
    use nalgebra::{Matrix3, Vector3};

    fn frame() -> ContactFrame {
        let p = CoverPoint::from_txy(0.4, 0.25, -0.1).unwrap();
        ContactFrame::at(&base_alpha(), &ProductMetric, &p).unwrap()
    }

    #[test]
    fn density_examples() {
        let f = frame();
        let z = energy_density(&f, 0.7, 0.3, &Jet::zero()).unwrap();
        assert_eq!((z.diamond, z.star), (0.0, 0.0));

        let t = 1.7;
        let jet = Jet::trivial_cylinder(&f, t);
        let e = energy_density(&f, 1.0, 1.0, &jet).unwrap();
        assert_abs_diff_eq!(e.diamond, 2.0 * t * t, epsilon = 1e-12);
        assert_abs_diff_eq!(e.star, 0.0, epsilon = 1e-12);

        let j = compatible_acs(&f).unwrap();
        let (u, v) = (j.basis[0] * 0.3, j.basis[1] * -1.1);
        let jet = Jet {
            a_s: 0.0,
            a_t: 0.0,
            u_s: u,
            u_t: v,
        };
        let e = energy_density(&f, 0.2, 0.5, &jet).unwrap();
        assert_abs_diff_eq!(e.diamond, 0.0, epsilon = 1e-24);
        assert_abs_diff_eq!(e.star, 0.09 + 1.21, epsilon = 1e-12);
        assert_abs_diff_eq!(e.integrand, 0.5 * 0.5 * 1.30, epsilon = 1e-12);
    }

    #[test]
    fn density_rejects_inadmissible_cutoff() {
        let f = frame();
        assert!(energy_density(&f, -0.1, 0.5, &Jet::zero()).is_err());
        assert!(energy_density(&f, 0.1, 1.5, &Jet::zero()).is_err());
    }

    #[test]
    fn cr_residual_examples() {
        let f = frame();
        let j = compatible_acs(&f).unwrap();
        assert!(cr_residual(&f, &j, &Jet::trivial_cylinder(&f, 1.0)) < 1e-12);
        assert_eq!(cr_residual(&f, &j, &Jet::zero()), 0.0);
        let v = j.basis[0] * 0.8 + j.basis[1] * 0.3;
        let jet = Jet {
            a_s: 0.0,
            a_t: 0.0,
            u_s: v,
            u_t: j.apply(&f, &v),
        };
        assert!(cr_residual(&f, &j, &jet) < 1e-12);
        // a non-holomorphic jet has positive residual
        let jet = Jet {
            a_s: 0.0,
            a_t: 0.0,
            u_s: v,
            u_t: v,
        };
        assert!(cr_residual(&f, &j, &jet) > 0.1);
    }

    #[test]
    fn flat_fixture_residual() {
        let f = ContactFrame::from_values(
            Covector::new(1.0, 0.0, 0.0),
            TwoFormValue::new(0.0, 0.0, 1.0),
            Matrix3::identity(),
        )
        .unwrap();
        let j = compatible_acs(&f).unwrap();
        let jet = Jet {
            a_s: 0.0,
            a_t: 0.0,
            u_s: Vector3::y(),
            u_t: Vector3::z(),
        };
        assert!(cr_residual(&f, &j, &jet) < 1e-14);
    }

    #[test]
    fn hofer_constant_function() {
        let pts: Vec<f64> = (0..=200).map(|k| -10.0 + 0.1 * k as f64).collect();
        let x0 = 100;
        let sel = hofer_select(&pts, |a, b| (a - b).abs(), |_| 1.0, x0, 1.0).unwrap();
        assert_eq!(sel.index, x0);
        assert_eq!(sel.eps, 1.0);
    }

    #[test]
    fn hofer_abs_function_post_conditions() {
        let pts: Vec<f64> = (0..=2000).map(|k| -10.0 + 0.01 * k as f64).collect();
        let x0 = pts.iter().position(|&x| (x - 1.0).abs() < 1e-9).unwrap();
        let r = |x: &f64| x.abs();
        let sel = hofer_select(&pts, |a, b| (a - b).abs(), r, x0, 1.0).unwrap();
        let x = pts[sel.index];
        assert!((x - 1.0).abs() <= 2.0);
        assert!(sel.eps > 0.0 && sel.eps <= 1.0);
        assert!(r(&1.0) * 1.0 <= r(&x) * sel.eps);
        for y in &pts {
            if (y - x).abs() <= sel.eps {
                assert!(r(y) <= 2.0 * r(&x));
            }
        }
    }

    #[test]
    fn hofer_moves_toward_a_spike() {
        let pts: Vec<f64> = (0..=400).map(|k| -2.0 + 0.01 * k as f64).collect();
        let r = |x: &f64| 1.0 / (0.001 + (x - 0.37).abs());
        let x0 = pts.iter().position(|&x| x.abs() < 1e-9).unwrap();
        let sel = hofer_select(&pts, |a, b| (a - b).abs(), r, x0, 0.5).unwrap();
        assert!(sel.iterations > 0);
        assert!((pts[sel.index] - pts[x0]).abs() <= 1.0);
        assert!(r(&pts[x0]) * 0.5 <= r(&pts[sel.index]) * sel.eps);
    }
}
