//! Adaptive Dormand–Prince 5(4) integration with region-change and section
//! events.

use crate::error::{Error, Result};

/// An autonomous system `ẋ = f(x)` on `ℝᴺ`.
pub trait System<const N: usize>: Sync {
    fn rhs(&self, x: &[f64; N]) -> Result<[f64; N]>;

    /// Label of the smooth piece containing `x`. A change of label inside a
    /// step is located and the step is split there.
    fn region(&self, _x: &[f64; N]) -> u64 {
        0
    }

    /// Rejects states that have left the admissible domain.
    fn check(&self, _x: &[f64; N]) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    /// Local error tolerance, mixed absolute/relative.
    pub tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Time resolution of event location.
    pub event_tol: f64,
}

impl StepControl {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            h_init: 1e-3,
            h_min: 1e-14,
            h_max: 0.05,
            event_tol: 1e-12,
        }
    }
}

/// A scalar section `g(x) = 0` crossed in a prescribed direction.
pub struct Stop<'a, const N: usize> {
    pub g: &'a (dyn Fn(&[f64; N]) -> f64 + Sync),
    /// `+1` for crossings from negative to positive, `−1` for the reverse.
    pub direction: f64,
    /// Crossings before this time are ignored.
    pub min_time: f64,
}

#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    pub accepted: usize,
    pub rejected: usize,
    /// Number of region changes located.
    pub events: usize,
    /// Whether integration ended at a section crossing.
    pub stopped: bool,
    pub max_step: f64,
}

impl<const N: usize> Solution<N> {
    pub fn last(&self) -> &[f64; N] {
        self.states.last().expect("solution has at least the initial state")
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("solution has at least the initial time")
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand–Prince step; returns the fifth-order state and the scaled
/// error norm.
pub fn dp_step<const N: usize, S: System<N> + ?Sized>(
    sys: &S,
    x: &[f64; N],
    h: f64,
    tol: f64,
) -> Result<([f64; N], f64)> {
    dp_step_visit(sys, x, h, tol, |_| {})
}

fn dp_step_visit<const N: usize, S: System<N> + ?Sized>(
    sys: &S,
    x: &[f64; N],
    h: f64,
    tol: f64,
    mut visit: impl FnMut(&[f64; N]),
) -> Result<([f64; N], f64)> {
    let mut k = [[0.0; N]; 7];
    for s in 0..7 {
        let mut y = *x;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..N {
                    y[i] += h * a * kj[i];
                }
            }
        }
        visit(&y);
        k[s] = sys.rhs(&y)?;
    }
    let mut y5 = *x;
    let mut err: f64 = 0.0;
    for i in 0..N {
        let mut d5 = 0.0;
        let mut d4 = 0.0;
        for s in 0..7 {
            d5 += B5[s] * k[s][i];
            d4 += B4[s] * k[s][i];
        }
        y5[i] += h * d5;
        let scale = tol * (1.0 + x[i].abs().max(y5[i].abs()));
        err = err.max((h * (d5 - d4)).abs() / scale);
    }
    visit(&y5);
    Ok((y5, err))
}

/// A step of length `h` together with whether every stage point and the
/// endpoint stay in region `r0`.
fn dp_step_within<const N: usize, S: System<N> + ?Sized>(
    sys: &S,
    x: &[f64; N],
    h: f64,
    tol: f64,
    r0: u64,
) -> Result<([f64; N], bool)> {
    let mut inside = true;
    let (y, _) = dp_step_visit(sys, x, h, tol, |p| inside &= sys.region(p) == r0)?;
    Ok((y, inside))
}

/// Integrate from `x0` for time `t_end`, splitting steps at region changes
/// and stopping early at the first qualifying section crossing.
pub fn integrate<const N: usize, S: System<N> + ?Sized>(
    sys: &S,
    x0: [f64; N],
    t_end: f64,
    ctl: &StepControl,
    stop: Option<&Stop<'_, N>>,
) -> Result<Solution<N>> {
    sys.check(&x0)?;
    let mut sol = Solution {
        times: vec![0.0],
        states: vec![x0],
        accepted: 0,
        rejected: 0,
        events: 0,
        stopped: false,
        max_step: 0.0,
    };
    let mut t = 0.0;
    let mut x = x0;
    let mut h = ctl.h_init.min(ctl.h_max).min(t_end);
    while t < t_end {
        h = h.min(t_end - t);
        let (y, err) = dp_step(sys, &x, h, ctl.tol)?;
        if !(err <= 1.0) {
            sol.rejected += 1;
            let shrink = if err.is_finite() { (0.9 * err.powf(-0.2)).max(0.1) } else { 0.1 };
            h *= shrink;
            if h < ctl.h_min {
                return Err(Error::StepUnderflow(t));
            }
            continue;
        }
        sys.check(&y)?;

        // region change inside this step
        let r0 = sys.region(&x);
        let (step, next) = if !dp_step_within(sys, &x, h, ctl.tol, r0)?.1 {
            let changed = |s: f64| -> Result<bool> { Ok(!dp_step_within(sys, &x, s, ctl.tol, r0)?.1) };
            let (lo, hi) = bisect(changed, h, ctl.event_tol)?;
            // finish the step inside the old piece, then cross with an Euler
            // step no longer than the event resolution
            let (z, _) = dp_step(sys, &x, lo, ctl.tol)?;
            let f = sys.rhs(&z)?;
            let mut dt = (hi - lo).max(f64::EPSILON);
            let mut crossed = None;
            while lo + dt <= h {
                let mut w = z;
                for i in 0..N {
                    w[i] += dt * f[i];
                }
                if sys.region(&w) != r0 {
                    sol.events += 1;
                    crossed = Some((lo + dt, w));
                    break;
                }
                dt *= 2.0;
            }
            // a stage grazed another piece but the path did not cross
            crossed.unwrap_or((h, y))
        } else {
            (h, y)
        };

        // section crossing inside this step
        if let Some(st) = stop {
            let g0 = (st.g)(&x) * st.direction;
            let g1 = (st.g)(&next) * st.direction;
            if t + step >= st.min_time && g0 < 0.0 && g1 >= 0.0 {
                let crossed = |s: f64| -> Result<bool> {
                    let (z, _) = dp_step(sys, &x, s, ctl.tol)?;
                    Ok(t + s >= st.min_time && (st.g)(&z) * st.direction >= 0.0)
                };
                let (_, s) = bisect(crossed, step, ctl.event_tol)?;
                let (z, _) = dp_step(sys, &x, s, ctl.tol)?;
                sol.accepted += 1;
                sol.max_step = sol.max_step.max(s);
                sol.times.push(t + s);
                sol.states.push(z);
                sol.stopped = true;
                return Ok(sol);
            }
        }

        t += step;
        x = next;
        sol.accepted += 1;
        sol.max_step = sol.max_step.max(step);
        sol.times.push(t);
        sol.states.push(x);
        let grow = if err > 0.0 { (0.9 * err.powf(-0.2)).min(5.0) } else { 5.0 };
        h = (h * grow).min(ctl.h_max).max(ctl.h_min);
    }
    Ok(sol)
}

/// Bracket `(lo, hi)` of width at most `tol` with `pred(hi)` and not
/// `pred(lo)`, assuming `pred(h)` holds.
fn bisect<F: FnMut(f64) -> Result<bool>>(mut pred: F, h: f64, tol: f64) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (0.0, h);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}
