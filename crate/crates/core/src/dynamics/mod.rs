//! Flows of Reeb-like fields on the cover, Poincaré return maps and periodic
//! orbit search.
//!
//! States are `(t, x, y)` with `t` unwrapped, so the net advance of `t` along
//! a closed orbit is its winding around the circle factor.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forms::{CoverPoint, VectorValue};
use crate::lutz::{LutzStructure, Region, Twist};

pub mod integrator;

pub use integrator::{dp_step, integrate, Solution, StepControl, Stop, System};

/// Trajectories are stopped once `|z|` exceeds this.
pub const ESCAPE_RADIUS: f64 = 1.0 - 1e-6;

/// A vector field on `S¹ × 𝔻`.
pub trait VectorField: Send + Sync {
    fn eval(&self, p: &CoverPoint) -> Result<VectorValue>;

    /// Label of the smooth piece of the field containing `p`.
    fn region(&self, _p: &CoverPoint) -> u64 {
        0
    }

    /// Centre of the embedded tube containing `z`, if any.
    fn tube(&self, _z: Complex64) -> Option<Complex64> {
        None
    }
}

/// A constant field; `∂t + 0.1∂x` is the standard non-recurrent fixture.
#[derive(Debug, Clone, Copy)]
pub struct ConstantField(pub VectorValue);

impl VectorField for ConstantField {
    fn eval(&self, _p: &CoverPoint) -> Result<VectorValue> {
        Ok(self.0)
    }
}

impl<T: Twist> VectorField for LutzStructure<T> {
    fn eval(&self, p: &CoverPoint) -> Result<VectorValue> {
        self.reeb_like(p)
    }

    fn region(&self, p: &CoverPoint) -> u64 {
        let r = self.locate(p.z().z()).region;
        Region::ALL.iter().position(|x| *x == r).unwrap_or(0) as u64
    }

    fn tube(&self, z: Complex64) -> Option<Complex64> {
        let loc = self.locate(z);
        loc.in_tube()
            .then(|| loc.word.inverse().apply(Complex64::new(0.0, 0.0)))
    }
}

struct Flow<'a, F: ?Sized>(&'a F);

impl<F: VectorField + ?Sized> Flow<'_, F> {
    fn point(x: &[f64; 3]) -> Result<CoverPoint> {
        CoverPoint::from_txy(x[0], x[1], x[2]).map_err(|_| Error::BoundaryEscape(x[1].hypot(x[2])))
    }
}

impl<F: VectorField + ?Sized> System<3> for Flow<'_, F> {
    fn rhs(&self, x: &[f64; 3]) -> Result<[f64; 3]> {
        let v = self.0.eval(&Self::point(x)?)?;
        Ok([v[0], v[1], v[2]])
    }

    fn region(&self, x: &[f64; 3]) -> u64 {
        Self::point(x).map_or(u64::MAX, |p| self.0.region(&p))
    }

    fn check(&self, x: &[f64; 3]) -> Result<()> {
        let r = x[1].hypot(x[2]);
        if !(r <= ESCAPE_RADIUS) {
            return Err(Error::BoundaryEscape(r));
        }
        Ok(())
    }
}

/// Sampled solution with unwrapped `t`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `(t, x, y)` with `t` unwrapped.
    pub states: Vec<[f64; 3]>,
    pub accepted: usize,
    pub rejected: usize,
    pub events: usize,
    pub max_step: f64,
}

impl Trajectory {
    fn from_solution(sol: Solution<3>) -> Self {
        Self {
            times: sol.times,
            states: sol.states,
            accepted: sol.accepted,
            rejected: sol.rejected,
            events: sol.events,
            max_step: sol.max_step,
        }
    }

    pub fn points(&self) -> impl Iterator<Item = CoverPoint> + '_ {
        self.states
            .iter()
            .filter_map(|s| CoverPoint::from_txy(s[0], s[1], s[2]).ok())
    }

    pub fn duration(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    /// Net advance of the unwrapped `t`.
    pub fn t_advance(&self) -> f64 {
        match (self.states.first(), self.states.last()) {
            (Some(a), Some(b)) => b[0] - a[0],
            _ => 0.0,
        }
    }

    pub fn winding(&self) -> i64 {
        self.t_advance().round() as i64
    }

    /// Distance from start to end after removing the integer winding.
    pub fn closure_residual(&self) -> f64 {
        let (Some(a), Some(b)) = (self.states.first(), self.states.last()) else {
            return f64::INFINITY;
        };
        let dt = b[0] - a[0] - self.winding() as f64;
        (dt * dt + (b[1] - a[1]).powi(2) + (b[2] - a[2]).powi(2)).sqrt()
    }
}

/// Integrate `field` from `x0` for time `t_end` with local tolerance `tol`.
pub fn integrate_flow<F: VectorField + ?Sized>(
    field: &F,
    x0: &CoverPoint,
    t_end: f64,
    tol: f64,
) -> Result<Trajectory> {
    let sol = integrate(
        &Flow(field),
        [x0.t(), x0.x(), x0.y()],
        t_end,
        &StepControl::with_tol(tol),
        None,
    )?;
    Ok(Trajectory::from_solution(sol))
}

/// A Poincaré section with two coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Section {
    /// `{y = 0, x > 0}` in tube coordinates, with coordinates `(t, r)`.
    /// Returns are required to advance `t` by `winding`.
    TubeAngle { winding: i64 },
    /// `{t = t0 mod 1}` with coordinates `(x, y)`.
    TimeSlice { t0: f64 },
}

impl Section {
    fn coords(&self, p: &CoverPoint) -> [f64; 2] {
        match self {
            Section::TubeAngle { .. } => [p.t(), p.z().radius()],
            Section::TimeSlice { .. } => [p.x(), p.y()],
        }
    }

    fn embed(&self, s: [f64; 2]) -> [f64; 3] {
        match *self {
            Section::TubeAngle { .. } => [s[0], s[1], 0.0],
            Section::TimeSlice { t0 } => [t0, s[0], s[1]],
        }
    }

    fn flux(&self, v: &VectorValue) -> f64 {
        match self {
            Section::TubeAngle { .. } => v[2],
            Section::TimeSlice { .. } => v[0],
        }
    }

    fn residual(&self, s: [f64; 2], end: &[f64; 3]) -> [f64; 2] {
        match *self {
            Section::TubeAngle { winding } => [end[0] - s[0] - winding as f64, end[1] - s[1]],
            Section::TimeSlice { .. } => [end[1] - s[0], end[2] - s[1]],
        }
    }
}

/// Options for [`find_periodic_orbit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitSearch {
    pub max_iter: usize,
    /// Local integration tolerance.
    pub tol: f64,
    /// Give up on a return after this much time.
    pub t_max: f64,
    /// Newton stops once the return residual is below this.
    pub residual_tol: f64,
}

impl Default for OrbitSearch {
    fn default() -> Self {
        Self {
            max_iter: 30,
            tol: 1e-12,
            t_max: 50.0,
            residual_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRecord {
    /// `(t, x, y)` of the converged seed.
    pub seed: [f64; 3],
    pub period: f64,
    pub closure_residual: f64,
    pub t_winding: i64,
    pub contractible: bool,
    /// Centre of the tube containing the orbit.
    pub tube_id: Option<Complex64>,
}

struct ReturnMap<'a, F: ?Sized> {
    field: &'a F,
    section: Section,
    direction: f64,
    opts: OrbitSearch,
}

impl<F: VectorField + ?Sized> ReturnMap<'_, F> {
    fn run(&self, s: [f64; 2]) -> Result<Solution<3>> {
        let start = self.section.embed(s);
        let g: Box<dyn Fn(&[f64; 3]) -> f64 + Sync> = match self.section {
            Section::TubeAngle { .. } => Box::new(|x: &[f64; 3]| x[2]),
            Section::TimeSlice { t0 } => {
                Box::new(move |x: &[f64; 3]| (2.0 * std::f64::consts::PI * (x[0] - t0)).sin())
            }
        };
        let stop = Stop {
            g: g.as_ref(),
            direction: self.direction,
            min_time: 1e-6,
        };
        let sol = integrate(
            &Flow(self.field),
            start,
            self.opts.t_max,
            &StepControl::with_tol(self.opts.tol),
            Some(&stop),
        )?;
        if !sol.stopped {
            return Err(Error::NoReturn(self.opts.t_max));
        }
        Ok(sol)
    }

    fn residual(&self, s: [f64; 2]) -> Result<[f64; 2]> {
        let sol = self.run(s)?;
        Ok(self.section.residual(s, sol.last()))
    }
}

/// Pseudo-inverse solve, discarding singular values below `1e−8 σ_max`.
fn pinv_solve(j: &Matrix2<f64>, f: &Vector2<f64>) -> Vector2<f64> {
    let svd = j.svd(true, true);
    let smax = svd.singular_values.max();
    if !(smax > 0.0) {
        return Vector2::zeros();
    }
    svd.solve(f, 1e-8 * smax).unwrap_or_else(|_| Vector2::zeros())
}

/// Newton's method on the return map to `section`, starting from `seed`.
pub fn find_periodic_orbit<F: VectorField + ?Sized>(
    field: &F,
    section: Section,
    seed: &CoverPoint,
    opts: OrbitSearch,
) -> Result<(OrbitRecord, Trajectory)> {
    let mut s = section.coords(seed);
    let p0 = CoverPoint::from_txy(section.embed(s)[0], section.embed(s)[1], section.embed(s)[2])?;
    let flux = section.flux(&field.eval(&p0)?);
    if flux.abs() < 1e-10 {
        return Err(Error::NonTransverse(flux));
    }
    let map = ReturnMap {
        field,
        section,
        direction: flux.signum(),
        opts,
    };
    let mut residual = f64::INFINITY;
    let mut converged = false;
    for _ in 0..opts.max_iter {
        let f = match map.residual(s) {
            Ok(f) => f,
            Err(_) => break,
        };
        residual = f[0].hypot(f[1]);
        if residual < opts.residual_tol {
            converged = true;
            break;
        }
        let h = 1e-7;
        let mut jac = Matrix2::zeros();
        let mut ok = true;
        for k in 0..2 {
            let mut sp = s;
            sp[k] += h;
            match map.residual(sp) {
                Ok(fp) => {
                    jac[(0, k)] = (fp[0] - f[0]) / h;
                    jac[(1, k)] = (fp[1] - f[1]) / h;
                }
                Err(_) => ok = false,
            }
        }
        if !ok {
            break;
        }
        let step = pinv_solve(&jac, &Vector2::new(f[0], f[1]));
        if step.norm() < 1e-15 {
            break;
        }
        s[0] -= step[0];
        s[1] -= step[1];
    }
    if !converged {
        return Err(Error::NonConvergence {
            iterations: opts.max_iter,
            residual,
        });
    }
    let sol = map.run(s)?;
    let traj = Trajectory::from_solution(sol);
    let (t_winding, contractible) = homotopy_data(&traj, field);
    let tube_id = traj
        .states
        .first()
        .and_then(|x| field.tube(Complex64::new(x[1], x[2])));
    let record = OrbitRecord {
        seed: section.embed(s),
        period: traj.duration(),
        closure_residual: traj.closure_residual(),
        t_winding,
        contractible,
        tube_id: if contractible { tube_id } else { None },
    };
    Ok((record, traj))
}

/// Winding of the closed trajectory around the circle factor, and whether
/// it is certified contractible: zero winding and the whole loop inside one
/// embedded tube.
pub fn homotopy_data<F: VectorField + ?Sized>(traj: &Trajectory, field: &F) -> (i64, bool) {
    let winding = traj.winding();
    if winding != 0 {
        return (winding, false);
    }
    let mut centre: Option<Complex64> = None;
    for x in &traj.states {
        match field.tube(Complex64::new(x[1], x[2])) {
            None => return (winding, false),
            Some(c) => match centre {
                None => centre = Some(c),
                Some(c0) if (c0 - c).norm() > 1e-9 => return (winding, false),
                _ => {}
            },
        }
    }
    (winding, centre.is_some())
}

/// `π(2δ − 3ε)/2`, the period of the circle `r = δ/2`.
pub fn expected_period(delta: f64, eps: f64) -> f64 {
    std::f64::consts::PI * (2.0 * delta - 3.0 * eps) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::{genus2_generators, FuchsianGroup};
    use crate::lutz::{lutz_form, smooth_profiles, LutzData, RadialProfile};
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    fn twisted() -> (LutzData, LutzStructure) {
        let d = LutzData::defaults();
        let s = lutz_form(&d, &genus2_generators().unwrap(), 3).unwrap();
        (d, s)
    }

    #[test]
    fn dt_flow_closes() {
        let f = ConstantField(VectorValue::x());
        let x0 = CoverPoint::from_txy(0.0, 0.0, 0.0).unwrap();
        let tr = integrate_flow(&f, &x0, 1.0, 1e-12).unwrap();
        assert!(tr.closure_residual() < 1e-10);
        assert_eq!(tr.winding(), 1);
    }

    #[test]
    fn circle_at_half_delta() {
        let (d, s) = twisted();
        let x0 = CoverPoint::from_txy(0.0, d.delta / 2.0, 0.0).unwrap();
        let period = expected_period(d.delta, d.eps);
        assert_abs_diff_eq!(period, 0.8011061, epsilon = 1e-7);
        let tr = integrate_flow(&s, &x0, period, 1e-12).unwrap();
        assert!(tr.closure_residual() < 1e-8, "{}", tr.closure_residual());
        for st in &tr.states {
            assert_abs_diff_eq!(st[1].hypot(st[2]), d.delta / 2.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn helix_at_quarter_delta() {
        let (d, s) = twisted();
        let r = d.delta / 4.0;
        let x0 = CoverPoint::from_txy(0.0, r, 0.0).unwrap();
        let tr = integrate_flow(&s, &x0, 0.3, 1e-12).unwrap();
        assert_abs_diff_eq!(tr.t_advance(), 0.3 * d.f2.derivative(r), epsilon = 1e-9);
        let last = tr.states.last().unwrap();
        assert_abs_diff_eq!(last[1].hypot(last[2]), r, epsilon = 1e-8);
        assert!(last[2].abs() > 1e-3);
    }

    #[test]
    fn finds_contractible_orbit() {
        let (d, s) = twisted();
        let seed = CoverPoint::from_txy(0.0, d.delta / 2.0 + 0.01 * d.delta, 0.0).unwrap();
        let (rec, tr) = find_periodic_orbit(&s, Section::TubeAngle { winding: 0 }, &seed, OrbitSearch::default()).unwrap();
        assert!(rec.closure_residual < 1e-8);
        assert_eq!(rec.t_winding, 0);
        assert!(rec.contractible);
        assert_abs_diff_eq!(rec.period, expected_period(d.delta, d.eps), epsilon = 1e-6);
        assert_abs_diff_eq!(rec.seed[1], d.delta / 2.0, epsilon = 1e-8);
        assert!(rec.tube_id.unwrap().norm() < 1e-12);
        assert!(tr.events == 0);
    }

    #[test]
    fn tighter_tolerance_keeps_period() {
        let (_, s) = twisted();
        let seed = CoverPoint::from_txy(0.0, 0.153, 0.0).unwrap();
        let a = OrbitSearch { tol: 1e-11, ..Default::default() };
        let b = OrbitSearch { tol: 1e-12, ..Default::default() };
        let (ra, _) = find_periodic_orbit(&s, Section::TubeAngle { winding: 0 }, &seed, a).unwrap();
        let (rb, _) = find_periodic_orbit(&s, Section::TubeAngle { winding: 0 }, &seed, b).unwrap();
        assert!((ra.period - rb.period).abs() < 1e-8);
    }

    #[test]
    fn t_circle_is_not_contractible() {
        let f = ConstantField(VectorValue::x());
        let seed = CoverPoint::from_txy(0.0, 0.2, 0.1).unwrap();
        let (rec, _) = find_periodic_orbit(&f, Section::TimeSlice { t0: 0.0 }, &seed, OrbitSearch::default()).unwrap();
        assert_abs_diff_eq!(rec.period, 1.0, epsilon = 1e-10);
        assert_eq!(rec.t_winding, 1);
        assert!(!rec.contractible);

        let (_, s) = twisted();
        let outside = CoverPoint::from_txy(0.0, 0.5, 0.1).unwrap();
        let (rec, _) = find_periodic_orbit(&s, Section::TimeSlice { t0: 0.0 }, &outside, OrbitSearch::default()).unwrap();
        assert_eq!(rec.t_winding, 1);
        assert!(!rec.contractible);
    }

    #[test]
    fn drift_does_not_converge() {
        let f = ConstantField(VectorValue::new(1.0, 0.1, 0.0));
        let seed = CoverPoint::from_txy(0.0, 0.0, 0.0).unwrap();
        let r = find_periodic_orbit(&f, Section::TimeSlice { t0: 0.0 }, &seed, OrbitSearch::default());
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn non_transverse_section() {
        let f = ConstantField(VectorValue::new(0.0, 1.0, 0.0));
        let seed = CoverPoint::from_txy(0.0, 0.1, 0.0).unwrap();
        let r = find_periodic_orbit(&f, Section::TimeSlice { t0: 0.0 }, &seed, OrbitSearch::default());
        assert!(matches!(r, Err(Error::NonTransverse(_))));
    }

    #[test]
    fn escape_is_guarded() {
        let f = ConstantField(VectorValue::new(0.0, 1.0, 0.0));
        let x0 = CoverPoint::from_txy(0.0, 0.9, 0.0).unwrap();
        assert!(matches!(integrate_flow(&f, &x0, 1.0, 1e-10), Err(Error::BoundaryEscape(_))));
    }

    #[test]
    fn smoothed_orbit_period_is_close() {
        let d = LutzData::defaults();
        let sm = smooth_profiles(&d, 16).unwrap();
        let s = LutzStructure::new(Arc::new(sm), Arc::new(FuchsianGroup::trivial()), 0).unwrap();
        let seed = CoverPoint::from_txy(0.0, 0.153, 0.0).unwrap();
        let (rec, _) = find_periodic_orbit(&s, Section::TubeAngle { winding: 0 }, &seed, OrbitSearch::default()).unwrap();
        let p0 = expected_period(d.delta, d.eps);
        assert!((rec.period - p0).abs() < 0.05 * p0);
        assert!(rec.contractible);
    }
}
