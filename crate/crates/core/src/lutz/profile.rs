//! Radial twist profiles: piecewise C¹ functions on `[0, δ]` whose
//! derivative is piecewise polynomial, and their C^∞ smoothings.

use crate::error::{Error, Result};

/// A radial function with its derivative.
pub trait RadialProfile: Send + Sync {
    fn value(&self, r: f64) -> f64;
    fn derivative(&self, r: f64) -> f64;
}

/// One interval of a [`Profile`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    /// Derivative `c0 + c1 u + c2 u²` with `u = r − start`; value anchored at
    /// `start`.
    Poly {
        start: f64,
        value_at_start: f64,
        deriv: [f64; 3],
    },
    /// `sign · r²/(1 − r²)`.
    Hyperbolic { sign: f64 },
}

impl Piece {
    #[inline]
    fn value(&self, r: f64) -> f64 {
        match *self {
            Piece::Poly {
                start,
                value_at_start,
                deriv: [c0, c1, c2],
            } => {
                let u = r - start;
                value_at_start + u * (c0 + u * (c1 / 2.0 + u * c2 / 3.0))
            }
            Piece::Hyperbolic { sign } => sign * r * r / (1.0 - r * r),
        }
    }

    #[inline]
    fn derivative(&self, r: f64) -> f64 {
        match *self {
            Piece::Poly {
                start,
                deriv: [c0, c1, c2],
                ..
            } => {
                let u = r - start;
                c0 + u * (c1 + u * c2)
            }
            Piece::Hyperbolic { sign } => {
                let s = 1.0 - r * r;
                sign * 2.0 * r / (s * s)
            }
        }
    }

    /// `value / r²`, finite at the origin for the hyperbolic pieces.
    #[inline]
    fn value_over_r2(&self, r: f64) -> f64 {
        match *self {
            Piece::Hyperbolic { sign } => sign / (1.0 - r * r),
            _ => self.value(r) / (r * r),
        }
    }
}

/// Piecewise C¹ profile on `[0, breakpoints.last()]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    /// `breakpoints[i]..breakpoints[i + 1]` is the domain of `pieces[i]`.
    breakpoints: Vec<f64>,
    pieces: Vec<Piece>,
}

impl Profile {
    pub(crate) fn new(breakpoints: Vec<f64>, pieces: Vec<Piece>) -> Self {
        debug_assert_eq!(breakpoints.len(), pieces.len() + 1);
        debug_assert!(breakpoints.windows(2).all(|w| w[0] < w[1]));
        Self {
            breakpoints,
            pieces,
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    #[inline]
    pub(crate) fn piece_index(&self, r: f64) -> usize {
        let n = self.pieces.len();
        // few pieces: linear scan beats binary search
        let mut i = 0;
        while i + 1 < n && r >= self.breakpoints[i + 1] {
            i += 1;
        }
        i
    }

    fn check(&self, r: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&r) {
            return Err(Error::OutsideDomain { r, lo, hi });
        }
        Ok(())
    }

    pub fn try_value(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(self.value(r))
    }

    pub fn try_derivative(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(self.derivative(r))
    }

    /// `f(r)/r²`, used for the `dφ = (x dy − y dx)/r²` coefficient.
    #[inline]
    pub fn value_over_r2(&self, r: f64) -> f64 {
        self.pieces[self.piece_index(r)].value_over_r2(r)
    }

    /// Largest jump in value and in derivative across interior breakpoints.
    pub fn continuity_defect(&self) -> (f64, f64) {
        let mut dv: f64 = 0.0;
        let mut dd: f64 = 0.0;
        for i in 1..self.pieces.len() {
            let b = self.breakpoints[i];
            let (l, r) = (&self.pieces[i - 1], &self.pieces[i]);
            dv = dv.max((l.value(b) - r.value(b)).abs());
            dd = dd.max((l.derivative(b) - r.derivative(b)).abs());
        }
        (dv, dd)
    }

    /// Interior breakpoints where the derivative has a corner.
    pub fn kinks(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 1..self.pieces.len() {
            let b = self.breakpoints[i];
            let h = 1e-7 * b.max(1e-3);
            let l = &self.pieces[i - 1];
            let r = &self.pieces[i];
            let second_l = (l.derivative(b) - l.derivative(b - h)) / h;
            let second_r = (r.derivative(b + h) - r.derivative(b)) / h;
            if (second_l - second_r).abs() > 1e-6 * (1.0 + second_l.abs().max(second_r.abs())) {
                out.push(b);
            }
        }
        out
    }
}

impl RadialProfile for Profile {
    #[inline]
    fn value(&self, r: f64) -> f64 {
        self.pieces[self.piece_index(r)].value(r)
    }

    #[inline]
    fn derivative(&self, r: f64) -> f64 {
        self.pieces[self.piece_index(r)].derivative(r)
    }
}

/// Affine function on `[r0, r1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearRamp {
    pub r0: f64,
    pub r1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl LinearRamp {
    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        self.v0 + (self.v1 - self.v0) * (r - self.r0) / (self.r1 - self.r0)
    }

    pub fn min(&self) -> f64 {
        self.v0.min(self.v1)
    }
}

/// C^∞ step: 0 for `u ≤ 0`, 1 for `u ≥ 1`, with `S(u) + S(1 − u) = 1`.
#[inline]
pub fn smooth_step(u: f64) -> f64 {
    fn bump(u: f64) -> f64 {
        if u <= 0.0 {
            0.0
        } else {
            (-1.0 / u).exp()
        }
    }
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = bump(u);
        a / (a + bump(1.0 - u))
    }
}

// 8-point Gauss-Legendre on [-1, 1]
#[allow(clippy::excessive_precision)]
const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
#[allow(clippy::excessive_precision)]
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let mid = lo + 0.5 * h;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
            acc += w * f(mid + 0.5 * h * x);
        }
    }
    acc * 0.5 * h
}

#[derive(Debug, Clone)]
struct Window {
    centre: f64,
    half_width: f64,
    left: Piece,
    right: Piece,
    /// `∫ (h' − f')` over the whole window.
    total: f64,
}

impl Window {
    fn start(&self) -> f64 {
        self.centre - self.half_width
    }

    fn end(&self) -> f64 {
        self.centre + self.half_width
    }

    #[inline]
    fn weight(&self, r: f64) -> f64 {
        smooth_step((r - self.start()) / (2.0 * self.half_width))
    }

    /// `h' − f'` inside the window.
    fn excess(&self, r: f64) -> f64 {
        let jump = self.right.derivative(r) - self.left.derivative(r);
        let s = self.weight(r);
        if r < self.centre {
            s * jump
        } else {
            (s - 1.0) * jump
        }
    }

    fn partial(&self, r: f64) -> f64 {
        let a = self.start();
        if r <= a {
            return 0.0;
        }
        if r >= self.end() {
            return self.total;
        }
        let f = |s: f64| self.excess(s);
        if r <= self.centre {
            integrate(f, a, r, 4)
        } else {
            integrate(f, a, self.centre, 4) + integrate(f, self.centre, r, 4)
        }
    }
}

/// C^∞ approximation of a [`Profile`]: each derivative corner is replaced by
/// a smooth-step blend of the neighbouring pieces over a window of width
/// `(ε/4)/n`, and the value is recovered by integrating the blended
/// derivative.
#[derive(Debug, Clone)]
pub struct SmoothProfile {
    base: Profile,
    windows: Vec<Window>,
    prefix: Vec<f64>,
}

impl SmoothProfile {
    pub fn new(base: &Profile, window_width: f64) -> Self {
        let half = 0.5 * window_width;
        let mut windows = Vec::new();
        for b in base.kinks() {
            let i = base
                .breakpoints
                .iter()
                .position(|&x| x == b)
                .expect("kink is a breakpoint");
            let mut w = Window {
                centre: b,
                half_width: half,
                left: base.pieces[i - 1],
                right: base.pieces[i],
                total: 0.0,
            };
            w.total = integrate(|s| w.excess(s), w.start(), w.centre, 4)
                + integrate(|s| w.excess(s), w.centre, w.end(), 4);
            windows.push(w);
        }
        let mut prefix = Vec::with_capacity(windows.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for w in &windows {
            acc += w.total;
            prefix.push(acc);
        }
        Self {
            base: base.clone(),
            windows,
            prefix,
        }
    }

    pub fn base(&self) -> &Profile {
        &self.base
    }

    fn locate(&self, r: f64) -> (usize, Option<&Window>) {
        // number of windows entirely to the left, and the one containing r
        let mut k = 0;
        while k < self.windows.len() && self.windows[k].end() <= r {
            k += 1;
        }
        let inside = self.windows.get(k).filter(|w| r > w.start());
        (k, inside)
    }
}

impl RadialProfile for SmoothProfile {
    fn value(&self, r: f64) -> f64 {
        let (k, inside) = self.locate(r);
        let corr = self.prefix[k] + inside.map_or(0.0, |w| w.partial(r));
        self.base.value(r) + corr
    }

    fn derivative(&self, r: f64) -> f64 {
        let (_, inside) = self.locate(r);
        match inside {
            Some(w) => {
                let s = w.weight(r);
                (1.0 - s) * w.left.derivative(r) + s * w.right.derivative(r)
            }
            None => self.base.derivative(r),
        }
    }
}

/// `sup |h − f| + sup |h' − f'|` on a uniform grid of `samples` points.
pub fn c1_distance<A: RadialProfile, B: RadialProfile>(
    a: &A,
    b: &B,
    lo: f64,
    hi: f64,
    samples: usize,
) -> f64 {
    let mut dv: f64 = 0.0;
    let mut dd: f64 = 0.0;
    for k in 0..=samples {
        let r = lo + (hi - lo) * k as f64 / samples as f64;
        dv = dv.max((a.value(r) - b.value(r)).abs());
        dd = dd.max((a.derivative(r) - b.derivative(r)).abs());
    }
    dv + dd
}
