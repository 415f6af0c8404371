//! Twisted cotangent dynamics over the hyperbolic disk and upper bounds for
//! the Mañé critical value.
//!
//! The disk carries the metric `|dz|²/(1−|z|²)²`. With this normalisation the
//! primitive `θ₀ = r²dφ/(1−r²)` has dual norm `r` and `dθ₀ = 2/(1−r²)² dx∧dy`.
//! Phase-space states are `(x, y, p_x, p_y)`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::dynamics::{integrate, StepControl, Stop, System};
use crate::error::{Error, Result};

/// Trajectories are stopped once `|q|` exceeds this.
pub const ESCAPE_RADIUS: f64 = 1.0 - 1e-6;

/// Tolerance of the `dθ = σ` check at construction.
pub const PRIMITIVE_TOL: f64 = 1e-8;

/// Planar one-form `(θ_x, θ_y)` as a function of `(x, y)`.
pub type PlanarForm = Arc<dyn Fn(f64, f64) -> [f64; 2] + Send + Sync>;

/// Potential returning `(U, ∂U/∂x, ∂U/∂y)`.
pub type PotentialFn = Arc<dyn Fn(f64, f64) -> (f64, f64, f64) + Send + Sync>;

/// `θ₀ = r²dφ/(1−r²) = (−y dx + x dy)/(1−r²)`.
pub fn standard_primitive(x: f64, y: f64) -> [f64; 2] {
    let w = 1.0 - x * x - y * y;
    [-y / w, x / w]
}

/// Density of the hyperbolic area form used as magnetic field, `2/(1−r²)²`.
pub fn area_density(x: f64, y: f64) -> f64 {
    let w = 1.0 - x * x - y * y;
    2.0 / (w * w)
}

#[derive(Clone)]
pub struct MagneticSystem {
    /// The magnetic form is `charge · 2/(1−r²)² dx∧dy`.
    pub charge: f64,
    potential: PotentialFn,
    theta: PlanarForm,
}

impl std::fmt::Debug for MagneticSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MagneticSystem")
            .field("charge", &self.charge)
            .finish_non_exhaustive()
    }
}

impl MagneticSystem {
    /// Builds the system after checking `dθ = σ` on a sample of points with
    /// `r ≤ 0.9`.
    pub fn new(charge: f64, potential: PotentialFn, theta: PlanarForm) -> Result<Self> {
        let sys = Self { charge, potential, theta };
        let defect = sys.primitive_defect(0.9, 12);
        if !(defect <= PRIMITIVE_TOL) {
            return Err(Error::InvalidParameter(format!(
                "primitive does not integrate the magnetic form (defect {defect:e})"
            )));
        }
        Ok(sys)
    }

    /// Hyperbolic area field, `U = 0`, primitive `θ₀`.
    pub fn hyperbolic() -> Self {
        Self {
            charge: 1.0,
            potential: Arc::new(|_, _| (0.0, 0.0, 0.0)),
            theta: Arc::new(standard_primitive),
        }
    }

    /// No magnetic field: the geodesic flow.
    pub fn geodesic() -> Self {
        Self {
            charge: 0.0,
            potential: Arc::new(|_, _| (0.0, 0.0, 0.0)),
            theta: Arc::new(|_, _| [0.0, 0.0]),
        }
    }

    /// Adds a constant to the potential.
    pub fn with_constant_potential(mut self, u: f64) -> Self {
        let base = self.potential.clone();
        self.potential = Arc::new(move |x, y| {
            let (v, gx, gy) = base(x, y);
            (v + u, gx, gy)
        });
        self
    }

    pub fn theta(&self, x: f64, y: f64) -> [f64; 2] {
        (self.theta)(x, y)
    }

    pub fn potential(&self, x: f64, y: f64) -> f64 {
        (self.potential)(x, y).0
    }

    pub fn sigma(&self, x: f64, y: f64) -> f64 {
        self.charge * area_density(x, y)
    }

    /// Largest relative mismatch between the curl of `θ` (central
    /// differences) and `σ` over a polar sample of radius `r_max`.
    pub fn primitive_defect(&self, r_max: f64, n: usize) -> f64 {
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for i in 0..=n {
            let r = r_max * i as f64 / n as f64;
            for j in 0..n {
                let phi = std::f64::consts::TAU * j as f64 / n as f64;
                let (x, y) = (r * phi.cos(), r * phi.sin());
                let dy_dx = ((self.theta)(x + h, y)[1] - (self.theta)(x - h, y)[1]) / (2.0 * h);
                let dx_dy = ((self.theta)(x, y + h)[0] - (self.theta)(x, y - h)[0]) / (2.0 * h);
                let s = self.sigma(x, y);
                worst = worst.max((dy_dx - dx_dy - s).abs() / s.abs().max(1.0));
            }
        }
        worst
    }

    /// `H = ½(1−r²)²|p|² + U`.
    pub fn hamiltonian(&self, s: &[f64; 4]) -> f64 {
        let w = 1.0 - s[0] * s[0] - s[1] * s[1];
        0.5 * w * w * (s[2] * s[2] + s[3] * s[3]) + self.potential(s[0], s[1])
    }

    /// Momentum at `q` with speed set by energy `k` (requires `k ≥ U(q)`),
    /// pointing along `dir`.
    pub fn momentum_for_energy(&self, q: [f64; 2], dir: [f64; 2], k: f64) -> Result<[f64; 2]> {
        let w = 1.0 - q[0] * q[0] - q[1] * q[1];
        if !(w > 0.0) {
            return Err(Error::OutsideDisk(q[0].hypot(q[1])));
        }
        let kinetic = k - self.potential(q[0], q[1]);
        let n = dir[0].hypot(dir[1]);
        if !(kinetic >= 0.0) || !(n > 0.0) {
            return Err(Error::InvalidParameter(format!("no momentum with energy {k} at this point")));
        }
        let p = (2.0 * kinetic).sqrt() / w;
        Ok([p * dir[0] / n, p * dir[1] / n])
    }
}

impl System<4> for MagneticSystem {
    fn rhs(&self, s: &[f64; 4]) -> Result<[f64; 4]> {
        let (x, y, px, py) = (s[0], s[1], s[2], s[3]);
        let w = 1.0 - x * x - y * y;
        if !(w > 0.0) {
            return Err(Error::BoundaryEscape(x.hypot(y)));
        }
        let p2 = px * px + py * py;
        let (_, ux, uy) = (self.potential)(x, y);
        let xd = w * w * px;
        let yd = w * w * py;
        // ∂/∂x of ½(1−r²)²|p|² is −2x(1−r²)|p|²
        let hx = -2.0 * x * w * p2 + ux;
        let hy = -2.0 * y * w * p2 + uy;
        let s_q = self.sigma(x, y);
        Ok([xd, yd, -hx + s_q * yd, -hy - s_q * xd])
    }

    fn check(&self, s: &[f64; 4]) -> Result<()> {
        let r = s[0].hypot(s[1]);
        if !(r <= ESCAPE_RADIUS) {
            return Err(Error::BoundaryEscape(r));
        }
        Ok(())
    }
}

/// Metric dual norm of the covector `θ` at `q`, `(1−|q|²)|θ|`.
pub fn dual_norm(theta: [f64; 2], q: Complex64) -> f64 {
    (1.0 - q.norm_sqr()) * theta[0].hypot(theta[1])
}

/// Hyperbolic distance for the metric `|dz|²/(1−|z|²)²`.
pub fn hyperbolic_distance(a: Complex64, b: Complex64) -> f64 {
    let rho = ((a - b) / (Complex64::new(1.0, 0.0) - a.conj() * b)).norm();
    rho.min(1.0).atanh()
}

/// Supremum of `½|θ|² + U` over a polar sample of the disk of radius
/// `r_max` with `n` radii (the last one equal to `r_max`) and `n` angles.
pub fn mane_upper_bound(sys: &MagneticSystem, r_max: f64, n: usize) -> Result<f64> {
    if !(r_max > 0.0 && r_max < 1.0) {
        return Err(Error::InvalidParameter(format!("r_max = {r_max} must lie in (0, 1)")));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("grid needs at least two radii".into()));
    }
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        let r = r_max * i as f64 / (n - 1) as f64;
        let r = if i == n - 1 { r_max } else { r };
        for j in 0..n {
            let phi = std::f64::consts::TAU * j as f64 / n as f64;
            let q = Complex64::from_polar(r, phi);
            let th = sys.theta(q.re, q.im);
            let v = 0.5 * dual_norm(th, q).powi(2) + sys.potential(q.re, q.im);
            best = best.max(v);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone)]
pub struct MagneticTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<[f64; 4]>,
    /// `H` at every stored state.
    pub energy: Vec<f64>,
}

impl MagneticTrajectory {
    /// Largest deviation of `H` from its initial value.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.energy[0];
        self.energy.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max)
    }

    pub fn position(&self, i: usize) -> Complex64 {
        Complex64::new(self.states[i][0], self.states[i][1])
    }

    /// Largest hyperbolic distance from the starting point.
    pub fn max_displacement(&self) -> f64 {
        let q0 = self.position(0);
        (0..self.states.len())
            .map(|i| hyperbolic_distance(q0, self.position(i)))
            .fold(0.0, f64::max)
    }
}

fn control(tol: f64) -> StepControl {
    StepControl {
        h_max: 0.02,
        ..StepControl::with_tol(tol)
    }
}

/// Integrates Hamilton's equations of `H` for the twisted symplectic form.
pub fn magnetic_flow(sys: &MagneticSystem, x0: [f64; 4], t_end: f64, tol: f64) -> Result<MagneticTrajectory> {
    let h0 = sys.hamiltonian(&x0);
    if !h0.is_finite() {
        return Err(Error::InvalidParameter("initial energy is not finite".into()));
    }
    let sol = integrate(sys, x0, t_end, &control(tol), None)?;
    let energy = sol.states.iter().map(|s| sys.hamiltonian(s)).collect();
    Ok(MagneticTrajectory {
        times: sol.times,
        states: sol.states,
        energy,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Closure {
    pub period: f64,
    /// Phase-space distance between the start and the first return.
    pub residual: f64,
}

/// First return of the orbit to the line through `q₀` orthogonal to its
/// initial velocity, crossed in the initial direction. `None` if there is no
/// return before `t_max`.
pub fn first_return(sys: &MagneticSystem, x0: [f64; 4], t_max: f64, tol: f64) -> Result<Option<Closure>> {
    let v = sys.rhs(&x0)?;
    let (vx, vy) = (v[0], v[1]);
    let g = move |s: &[f64; 4]| (s[0] - x0[0]) * vx + (s[1] - x0[1]) * vy;
    let stop = Stop {
        g: &g,
        direction: 1.0,
        min_time: 1e-3,
    };
    let sol = integrate(sys, x0, t_max, &control(tol), Some(&stop))?;
    if !sol.stopped {
        return Ok(None);
    }
    let end = sol.last();
    let residual = (0..4).map(|i| (end[i] - x0[i]).powi(2)).sum::<f64>().sqrt();
    Ok(Some(Closure {
        period: sol.end_time(),
        residual,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn dual_norm_matches_fan() {
        let q = Complex64::new(0.3, 0.4);
        let th = standard_primitive(q.re, q.im);
        // θ(v)/|v|_g over unit vectors, |v|_g = |v|/(1−r²)
        let w = 1.0 - q.norm_sqr();
        let fan = (0..3600)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / 3600.0;
                (th[0] * a.cos() + th[1] * a.sin()) * w
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert_abs_diff_eq!(dual_norm(th, q), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(fan, 0.5, epsilon = 1e-6);
        assert_eq!(dual_norm([0.0, 0.0], q), 0.0);
        assert_eq!(dual_norm(standard_primitive(0.0, 0.0), Complex64::new(0.0, 0.0)), 0.0);
    }

    #[test]
    fn standard_primitive_integrates_sigma() {
        assert!(MagneticSystem::hyperbolic().primitive_defect(0.9, 24) < 1e-8);
        let bad = MagneticSystem::new(2.0, Arc::new(|_, _| (0.0, 0.0, 0.0)), Arc::new(standard_primitive));
        assert!(bad.is_err());
    }

    #[test]
    fn mane_ladder() {
        let sys = MagneticSystem::hyperbolic();
        for (r, v) in [(0.5, 0.125), (0.9, 0.405), (0.999, 0.4990005)] {
            assert_abs_diff_eq!(mane_upper_bound(&sys, r, 64).unwrap(), v, epsilon = 1e-6);
        }
        let shifted = sys.clone().with_constant_potential(0.1);
        assert_abs_diff_eq!(mane_upper_bound(&shifted, 0.5, 64).unwrap(), 0.225, epsilon = 1e-12);
        assert!(mane_upper_bound(&sys, 1.0, 64).is_err());
    }

    #[test]
    fn geodesic_through_origin_stays_on_diameter() {
        let sys = MagneticSystem::geodesic();
        let p = sys.momentum_for_energy([0.0, 0.0], [0.6, 0.8], 0.5).unwrap();
        let tr = magnetic_flow(&sys, [0.0, 0.0, p[0], p[1]], 2.0, 1e-10).unwrap();
        for s in &tr.states {
            assert!((0.8 * s[0] - 0.6 * s[1]).abs() < 1e-10);
        }
        // unit speed: distance from the origin equals elapsed time
        let last = tr.states.len() - 1;
        assert_abs_diff_eq!(
            hyperbolic_distance(Complex64::new(0.0, 0.0), tr.position(last)),
            2.0,
            epsilon = 1e-8
        );
    }

    #[test]
    fn energy_is_conserved() {
        let sys = MagneticSystem::hyperbolic();
        let p = sys.momentum_for_energy([0.1, -0.2], [1.0, 0.3], 0.3).unwrap();
        let tr = magnetic_flow(&sys, [0.1, -0.2, p[0], p[1]], 20.0, 1e-10).unwrap();
        assert!(tr.energy_drift() < 1e-8, "{}", tr.energy_drift());
    }

    #[test]
    fn low_energy_closes_high_energy_escapes() {
        let sys = MagneticSystem::hyperbolic();
        let p = sys.momentum_for_energy([0.0, 0.0], [1.0, 0.0], 0.1).unwrap();
        let c = first_return(&sys, [0.0, 0.0, p[0], p[1]], 50.0, 1e-10).unwrap().unwrap();
        assert!(c.residual < 1e-6, "{}", c.residual);
        assert_abs_diff_eq!(c.period, std::f64::consts::PI / 0.8f64.sqrt(), epsilon = 1e-6);

        let p = sys.momentum_for_energy([0.0, 0.0], [1.0, 0.0], 1.0).unwrap();
        let a = magnetic_flow(&sys, [0.0, 0.0, p[0], p[1]], 2.5, 1e-10).unwrap();
        let b = magnetic_flow(&sys, [0.0, 0.0, p[0], p[1]], 5.0, 1e-10).unwrap();
        assert!(b.max_displacement() > 1.0);
        assert!(b.max_displacement() > a.max_displacement());
    }
}
