//! The Lutz twist of `α = dt + r²dφ/(1−r²)` along the tubes `S¹ × g(B_δ)`.
//!
//! Inside the central tube the twisted form is `f₁(r) dt + f₂(r) dφ`. The
//! twist is spread over the deck orbit by pulling the local difference
//! `η = α^L − α` back along the word that carries a point into the central
//! tube, so `α^L = α + Σ_g g*η`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forms::{angular_field, push_forward, Covector, CoverPoint, OneForm, TwoFormValue, VectorValue};
use crate::hyperbolic::{enumerate_words, validate_separation, FuchsianGroup, Isometry};

mod profile;

pub use profile::{c1_distance, smooth_step, LinearRamp, Piece, Profile, RadialProfile, SmoothProfile};

/// Points this close to a tube boundary are checked against neighbouring
/// tubes before a region is assigned.
pub const AMBIGUITY_TOL: f64 = 1e-10;

/// `α = dt + r²/(1−r²) dφ` with its closed-form derivative
/// `2/(1−r²)² dx∧dy`.
#[derive(Debug, Clone, Copy, Default)]
pub struct BaseAlpha;

pub fn base_alpha() -> BaseAlpha {
    BaseAlpha
}

impl BaseAlpha {
    #[inline]
    pub fn at(z: Complex64) -> Covector {
        let k = 1.0 / (1.0 - z.norm_sqr());
        Covector::new(1.0, -z.im * k, z.re * k)
    }

    #[inline]
    pub fn d_at(z: Complex64) -> TwoFormValue {
        let s = 1.0 - z.norm_sqr();
        TwoFormValue::new(0.0, 0.0, 2.0 / (s * s))
    }
}

impl OneForm for BaseAlpha {
    fn eval(&self, p: &CoverPoint) -> Covector {
        Self::at(p.z().z())
    }
    fn d(&self, p: &CoverPoint) -> TwoFormValue {
        Self::d_at(p.z().z())
    }
}

/// Supremum of `‖α‖` for the product metric, `sqrt(1 + r²)` as `r → 1`.
pub fn alpha_sup_norm() -> f64 {
    2.0_f64.sqrt()
}

/// Radial data of a twist: the profile pair, the outer ramp and the
/// parameters they were built from.
pub trait Twist: Send + Sync {
    fn delta(&self) -> f64;
    fn eps(&self) -> f64;
    fn c(&self) -> f64;
    fn f1(&self, r: f64) -> f64;
    fn df1(&self, r: f64) -> f64;
    fn f2(&self, r: f64) -> f64;
    fn df2(&self, r: f64) -> f64;
    /// `f₂(r)/r²`, finite at `r = 0`.
    fn f2_over_r2(&self, r: f64) -> f64;
    /// The outer ramp on `[δ − ε/2, δ]`.
    fn h(&self, r: f64) -> f64;
    /// `∂t`-rate of the field on the core `r ≤ ε/2`.
    fn core_rate(&self) -> f64 {
        self.df2(0.5 * self.eps())
    }

    /// `α^L` in tube coordinates at `w` with `|w| ≤ δ`.
    #[inline]
    fn local_form(&self, w: Complex64) -> Covector {
        let r = w.norm();
        let k = self.f2_over_r2(r);
        Covector::new(self.f1(r), -w.im * k, w.re * k)
    }

    /// `dα^L` in tube coordinates.
    #[inline]
    fn local_d(&self, w: Complex64) -> TwoFormValue {
        let r = w.norm();
        let eps = self.eps();
        if r < 0.25 * eps {
            // f₁ is constant and f₂ = −r²/(1−r²) near the axis
            let s = 1.0 - r * r;
            return TwoFormValue::new(0.0, 0.0, -2.0 / (s * s));
        }
        let d1 = self.df1(r) / r;
        TwoFormValue::new(-d1 * w.re, -d1 * w.im, self.df2(r) / r)
    }

    /// The Reeb-like field in tube coordinates, or `None` outside `B_δ`.
    #[inline]
    fn local_field(&self, w: Complex64) -> Option<VectorValue> {
        let r = w.norm();
        let (delta, eps) = (self.delta(), self.eps());
        if r > delta * (1.0 + 1e-12) {
            None
        } else if r <= 0.5 * eps {
            Some(VectorValue::new(self.core_rate(), 0.0, 0.0))
        } else if r <= delta - 0.5 * eps {
            Some(VectorValue::new(self.df2(r), 0.0, 0.0) - angular_field(w) * self.df1(r))
        } else {
            Some(VectorValue::new(self.h(r), 0.0, 0.0))
        }
    }

    /// `L(r) = f₁f₂' − f₂f₁' − 2Cf₁'` on the middle annulus.
    fn bound_l(&self, r: f64) -> Result<f64> {
        let (lo, hi) = (0.5 * self.eps(), self.delta() - 0.5 * self.eps());
        if !(lo..=hi).contains(&r) {
            return Err(Error::OutsideDomain { r, lo, hi });
        }
        Ok(self.f1(r) * self.df2(r) - self.f2(r) * self.df1(r) - 2.0 * self.c() * self.df1(r))
    }
}

/// The twist profiles built from the piecewise templates.
#[derive(Debug, Clone)]
pub struct LutzData {
    pub delta: f64,
    pub eps: f64,
    pub c: f64,
    pub f1: Profile,
    pub f2: Profile,
    pub h: LinearRamp,
    /// Zero of `f₂` in `(δ/2, δ − ε/2)`.
    pub r_star: f64,
    /// Constant slope of `f₂` on `[ε, δ/2 − ε]`.
    pub slope_left: f64,
    /// Constant slope of `f₂` on `[δ/2 + ε, δ − ε]`.
    pub slope_right: f64,
}

pub const DEFAULT_DELTA: f64 = 0.3;
pub const DEFAULT_EPS: f64 = 0.03;

impl LutzData {
    pub fn new(delta: f64, eps: f64, c: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0 / 3.0) {
            return Err(Error::InvalidParameter(format!("delta = {delta} not in (0, 1/3]")));
        }
        if !(eps > 0.0 && eps <= delta / 10.0 * (1.0 + 1e-12)) {
            return Err(Error::InvalidParameter(format!("eps = {eps} not in (0, delta/10]")));
        }
        if !(c >= 1.0) || !c.is_finite() {
            return Err(Error::InvalidParameter(format!("C = {c} must be at least 1")));
        }
        let (f1, f2, h, slope_left, slope_right) = build_profiles(delta, eps, c)?;
        let r_star = find_root(&f2, 0.5 * delta, delta - 0.5 * eps)?;
        Ok(Self {
            delta,
            eps,
            c,
            f1,
            f2,
            h,
            r_star,
            slope_left,
            slope_right,
        })
    }

    /// `δ = 0.3`, `ε = 0.03`, `C = √2`.
    pub fn defaults() -> Self {
        Self::new(DEFAULT_DELTA, DEFAULT_EPS, alpha_sup_norm()).expect("default parameters are admissible")
    }

    /// Whether the solved slopes satisfy `s_L ≤ −8C/δ` and `s_R ≥ 8C/δ`.
    pub fn slopes_meet_template(&self) -> bool {
        let b = 8.0 * self.c / self.delta;
        self.slope_left <= -b && self.slope_right >= b
    }
}

impl Twist for LutzData {
    fn delta(&self) -> f64 {
        self.delta
    }
    fn eps(&self) -> f64 {
        self.eps
    }
    fn c(&self) -> f64 {
        self.c
    }
    #[inline]
    fn f1(&self, r: f64) -> f64 {
        self.f1.value(r.min(self.delta))
    }
    #[inline]
    fn df1(&self, r: f64) -> f64 {
        self.f1.derivative(r.min(self.delta))
    }
    #[inline]
    fn f2(&self, r: f64) -> f64 {
        self.f2.value(r.min(self.delta))
    }
    #[inline]
    fn df2(&self, r: f64) -> f64 {
        self.f2.derivative(r.min(self.delta))
    }
    #[inline]
    fn f2_over_r2(&self, r: f64) -> f64 {
        self.f2.value_over_r2(r.min(self.delta))
    }
    #[inline]
    fn h(&self, r: f64) -> f64 {
        self.h.value(r)
    }
}

fn hyperbolic_derivative(sign: f64, r: f64) -> f64 {
    let s = 1.0 - r * r;
    sign * 2.0 * r / (s * s)
}

/// Build `f₁`, `f₂`, `h` and the two free slopes of `f₂`.
///
/// `f₂'` is piecewise linear between the analytic end pieces: it ramps from
/// the end-piece derivative at `ε/2` to `s_L` over `[ε/2, ε]`, stays at `s_L`
/// until `δ/2 − ε`, ramps to 0 at `δ/2`, and mirrors that on the right. Each
/// slope is fixed by requiring the integral of `f₂'` to connect the pinned
/// values at `ε/2`, `δ/2` and `δ − ε/2`.
pub fn build_profiles(
    delta: f64,
    eps: f64,
    c: f64,
) -> Result<(Profile, Profile, LinearRamp, f64, f64)> {
    let half = 0.5 * eps;
    let mid = 0.5 * delta;
    let right = delta - half;

    // f1: quadratic ramps around a linear middle
    let k = 8.0 / (2.0 * eps * delta - 3.0 * eps * eps);
    let m = 4.0 / (2.0 * delta - 3.0 * eps);
    let f1_eps = (4.0 * eps - 2.0 * delta) / (2.0 * delta - 3.0 * eps);
    let f1_right = m * (delta - eps - mid);
    let f1 = Profile::new(
        vec![0.0, half, eps, delta - eps, right, delta],
        vec![
            poly(0.0, -1.0, [0.0, 0.0, 0.0]),
            poly(half, -1.0, [0.0, k, 0.0]),
            poly(eps, f1_eps, [m, 0.0, 0.0]),
            poly(delta - eps, f1_right, [m, -k, 0.0]),
            poly(right, 1.0, [0.0, 0.0, 0.0]),
        ],
    );

    // f2
    let v0 = -half * half / (1.0 - half * half);
    let d0 = hyperbolic_derivative(-1.0, half);
    let v6 = right * right / (1.0 - right * right);
    let d6 = hyperbolic_derivative(1.0, right);
    let pinned = -4.0 * c;
    // ∫ f2' over [ε/2, δ/2] = d0 ε/4 + s_L (δ/2 − 5ε/4)
    let span = mid - 1.25 * eps;
    let s_l = (pinned - v0 - d0 * eps / 4.0) / span;
    let s_r = (v6 - pinned - d6 * eps / 4.0) / span;
    if !(s_l < 0.0 && s_r > 0.0) {
        return Err(Error::InfeasibleSlopes {
            s_left: s_l,
            s_right: s_r,
        });
    }
    let ramp_l = (s_l - d0) / half;
    let ramp_r = (d6 - s_r) / half;
    let a1 = v0 + d0 * half + ramp_l * half * half * 0.5;
    let a2 = a1 + s_l * (mid - 2.0 * eps);
    let a4 = pinned + s_r * eps * 0.5;
    let a5 = a4 + s_r * (mid - 2.0 * eps);
    let f2 = Profile::new(
        vec![
            0.0,
            half,
            eps,
            mid - eps,
            mid,
            mid + eps,
            delta - eps,
            right,
            delta,
        ],
        vec![
            Piece::Hyperbolic { sign: -1.0 },
            poly(half, v0, [d0, ramp_l, 0.0]),
            poly(eps, a1, [s_l, 0.0, 0.0]),
            poly(mid - eps, a2, [s_l, -s_l / eps, 0.0]),
            poly(mid, pinned, [0.0, s_r / eps, 0.0]),
            poly(mid + eps, a4, [s_r, 0.0, 0.0]),
            poly(delta - eps, a5, [s_r, ramp_r, 0.0]),
            Piece::Hyperbolic { sign: 1.0 },
        ],
    );
    let h = LinearRamp {
        r0: right,
        r1: delta,
        v0: d6,
        v1: 1.0,
    };
    Ok((f1, f2, h, s_l, s_r))
}

fn poly(start: f64, value_at_start: f64, deriv: [f64; 3]) -> Piece {
    Piece::Poly {
        start,
        value_at_start,
        deriv,
    }
}

fn find_root<P: RadialProfile>(p: &P, lo: f64, hi: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (p.value(a), p.value(b));
    if !(fa < 0.0 && fb > 0.0) {
        return Err(Error::Construction(format!(
            "f2 does not change sign on [{lo}, {hi}]"
        )));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if p.value(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    // one Newton polish
    let mut r = 0.5 * (a + b);
    let d = p.derivative(r);
    if d != 0.0 {
        let next = r - p.value(r) / d;
        if (lo..=hi).contains(&next) && p.value(next).abs() <= p.value(r).abs() {
            r = next;
        }
    }
    Ok(r)
}

/// Minimum of `f` on `[a, b]`: dense grid, then golden-section refinement
/// around the best node. Returns `(argmin, min)`.
pub fn minimize_on<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, samples: usize) -> (f64, f64) {
    let n = samples.max(2);
    let step = (b - a) / (n - 1) as f64;
    let mut best = (a, f(a));
    let mut best_i = 0;
    for i in 1..n {
        let x = if i == n - 1 { b } else { a + step * i as f64 };
        let v = f(x);
        if v < best.1 {
            best = (x, v);
            best_i = i;
        }
    }
    let lo = a + step * best_i.saturating_sub(1) as f64;
    let hi = (a + step * (best_i + 1) as f64).min(b);
    let (mut x0, mut x1) = (lo, hi);
    let g = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = x1 - g * (x1 - x0);
    let mut d = x0 + g * (x1 - x0);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if (x1 - x0).abs() < 1e-14 {
            break;
        }
        if fc < fd {
            x1 = d;
            d = c;
            fd = fc;
            c = x1 - g * (x1 - x0);
            fc = f(c);
        } else {
            x0 = c;
            c = d;
            fc = fd;
            d = x0 + g * (x1 - x0);
            fd = f(d);
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v < best.1 {
            best = (x, v);
        }
    }
    best
}

/// The radial regions on which the Reeb-like field has one formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Core,
    CaseI,
    CaseII,
    CaseIII,
    CaseIIMirror,
    CaseIMirror,
    Outer,
    Outside,
}

impl Region {
    pub const ALL: [Region; 8] = [
        Region::Core,
        Region::CaseI,
        Region::CaseII,
        Region::CaseIII,
        Region::CaseIIMirror,
        Region::CaseIMirror,
        Region::Outer,
        Region::Outside,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Region::Core => "core",
            Region::CaseI => "case_i",
            Region::CaseII => "case_ii",
            Region::CaseIII => "case_iii",
            Region::CaseIIMirror => "case_ii_mirror",
            Region::CaseIMirror => "case_i_mirror",
            Region::Outer => "outer",
            Region::Outside => "outside",
        }
    }

    /// Radial extent in tube coordinates; `Outside` reports `[δ, 1)`.
    pub fn range(self, delta: f64, eps: f64) -> (f64, f64) {
        let (h, m) = (0.5 * eps, 0.5 * delta);
        match self {
            Region::Core => (0.0, h),
            Region::CaseI => (h, eps),
            Region::CaseII => (eps, m - eps),
            Region::CaseIII => (m - eps, m + eps),
            Region::CaseIIMirror => (m + eps, delta - eps),
            Region::CaseIMirror => (delta - eps, delta - h),
            Region::Outer => (delta - h, delta),
            Region::Outside => (delta, 1.0),
        }
    }

    pub fn classify(r: f64, delta: f64, eps: f64) -> Region {
        Region::ALL
            .into_iter()
            .find(|reg| r <= reg.range(delta, eps).1)
            .unwrap_or(Region::Outside)
    }

    /// Lower bound for `g*α^L(R^L)` on the region.
    pub fn analytic_bound<T: Twist + ?Sized>(self, twist: &T) -> f64 {
        let (delta, eps, c) = (twist.delta(), twist.eps(), twist.c());
        match self {
            Region::Core => -twist.core_rate(),
            Region::CaseI | Region::CaseIMirror => 7.0 * eps / 8.0,
            Region::CaseII | Region::CaseIIMirror => 12.0 * c / (5.0 * delta),
            Region::CaseIII => 2.0 * c / delta,
            Region::Outer => {
                let (lo, hi) = Region::Outer.range(delta, eps);
                twist.h(lo).min(twist.h(hi))
            }
            Region::Outside => 1.0,
        }
    }
}

/// `min(7ε/8, 12C/(5δ), 2C/δ, −f₂'(ε/2), min h, 1)`.
pub fn global_analytic_bound<T: Twist + ?Sized>(twist: &T) -> f64 {
    Region::ALL
        .iter()
        .map(|r| r.analytic_bound(twist))
        .fold(f64::INFINITY, f64::min)
}

/// Grid-plus-refinement minima of `L` over the five middle sub-intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseMinimum {
    pub region: Region,
    pub argmin: f64,
    pub value: f64,
    pub bound: f64,
}

pub fn case_minima<T: Twist + ?Sized>(twist: &T, samples: usize) -> Vec<CaseMinimum> {
    [
        Region::CaseI,
        Region::CaseII,
        Region::CaseIII,
        Region::CaseIIMirror,
        Region::CaseIMirror,
    ]
    .into_iter()
    .map(|region| {
        let (a, b) = region.range(twist.delta(), twist.eps());
        let (argmin, value) = minimize_on(
            |r| twist.bound_l(r).unwrap_or(f64::INFINITY),
            a,
            b,
            samples,
        );
        CaseMinimum {
            region,
            argmin,
            value,
            bound: region.analytic_bound(twist),
        }
    })
    .collect()
}

/// `L(r)` for the built profiles; errors outside `[ε/2, δ − ε/2]`.
pub fn bound_l(data: &LutzData, c: f64, r: f64) -> Result<f64> {
    let base = data.bound_l(r)?;
    // allow a caller-supplied C without rebuilding the profiles
    Ok(base + 2.0 * (data.c - c) * data.df1(r))
}

/// Smoothed twist: each derivative corner of `f₁`, `f₂` is blended over a
/// window of width `(ε/4)/n`, and `h` is rebuilt to meet the smoothed `f₂'`.
#[derive(Debug, Clone)]
pub struct SmoothedTwist {
    pub n: usize,
    pub delta: f64,
    pub eps: f64,
    pub c: f64,
    pub h1: SmoothProfile,
    pub h2: SmoothProfile,
    pub h: LinearRamp,
}

pub fn smooth_profiles(data: &LutzData, n: usize) -> Result<SmoothedTwist> {
    if n == 0 {
        return Err(Error::InvalidParameter("smoothing index n must be at least 1".into()));
    }
    let width = 0.25 * data.eps / n as f64;
    let h1 = SmoothProfile::new(&data.f1, width);
    let h2 = SmoothProfile::new(&data.f2, width);
    let right = data.delta - 0.5 * data.eps;
    let h = LinearRamp {
        r0: right,
        r1: data.delta,
        v0: h2.derivative(right),
        v1: 1.0,
    };
    Ok(SmoothedTwist {
        n,
        delta: data.delta,
        eps: data.eps,
        c: data.c,
        h1,
        h2,
        h,
    })
}

impl SmoothedTwist {
    /// `sup|h₁ₙ − f₁| + sup|h₁ₙ' − f₁'|` and the same for `f₂`, on a grid.
    pub fn c1_errors(&self, samples: usize) -> (f64, f64) {
        (
            c1_distance(&self.h1, self.h1.base(), 0.0, self.delta, samples),
            c1_distance(&self.h2, self.h2.base(), 0.0, self.delta, samples),
        )
    }
}

impl Twist for SmoothedTwist {
    fn delta(&self) -> f64 {
        self.delta
    }
    fn eps(&self) -> f64 {
        self.eps
    }
    fn c(&self) -> f64 {
        self.c
    }
    fn f1(&self, r: f64) -> f64 {
        self.h1.value(r.min(self.delta))
    }
    fn df1(&self, r: f64) -> f64 {
        self.h1.derivative(r.min(self.delta))
    }
    fn f2(&self, r: f64) -> f64 {
        self.h2.value(r.min(self.delta))
    }
    fn df2(&self, r: f64) -> f64 {
        self.h2.derivative(r.min(self.delta))
    }
    fn f2_over_r2(&self, r: f64) -> f64 {
        let r = r.min(self.delta);
        if r < 0.25 * self.eps {
            -1.0 / (1.0 - r * r)
        } else {
            self.h2.value(r) / (r * r)
        }
    }
    fn h(&self, r: f64) -> f64 {
        self.h.value(r)
    }
}

/// Where a point of the disk sits relative to the tubes.
#[derive(Debug, Clone, Copy)]
pub struct Locus {
    /// Deck element carrying the point into the closed fundamental domain.
    pub word: Isometry,
    /// The reduced point `word(z)`.
    pub local: Complex64,
    pub region: Region,
}

impl Locus {
    pub fn in_tube(&self) -> bool {
        self.region != Region::Outside
    }
}

/// `α^L` and `R^L` spread over the deck orbit of the central tube.
pub struct LutzStructure<T: Twist = LutzData> {
    twist: Arc<T>,
    group: Arc<FuchsianGroup>,
    depth: usize,
}

impl<T: Twist> Clone for LutzStructure<T> {
    fn clone(&self) -> Self {
        Self {
            twist: Arc::clone(&self.twist),
            group: Arc::clone(&self.group),
            depth: self.depth,
        }
    }
}

impl<T: Twist> LutzStructure<T> {
    /// Fails unless the `δ`-balls about the orbit of 0 are disjoint up to
    /// `depth`.
    pub fn new(twist: Arc<T>, group: Arc<FuchsianGroup>, depth: usize) -> Result<Self> {
        if !group.generators().is_empty() {
            let sep = validate_separation(&group, twist.delta(), depth);
            if !sep.separated {
                return Err(Error::SeparationViolated(sep.margin));
            }
        }
        Ok(Self {
            twist,
            group,
            depth,
        })
    }

    pub fn twist(&self) -> &T {
        &self.twist
    }

    pub fn twist_arc(&self) -> Arc<T> {
        Arc::clone(&self.twist)
    }

    pub fn group(&self) -> &FuchsianGroup {
        &self.group
    }

    pub fn group_arc(&self) -> Arc<FuchsianGroup> {
        Arc::clone(&self.group)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Centres `g(0)` of the covered tubes.
    pub fn tube_centers(&self) -> Vec<Complex64> {
        enumerate_words(&self.group, self.depth)
            .iter()
            .map(|w| w.isometry.apply(Complex64::new(0.0, 0.0)))
            .collect()
    }

    /// Reduce `z` and classify the reduced point. Points needing more than
    /// `depth` generators are reported as outside.
    #[inline]
    pub fn locate(&self, z: Complex64) -> Locus {
        let (delta, eps) = (self.twist.delta(), self.twist.eps());
        match self.group.reduce(z, self.depth) {
            Some((word, local)) => Locus {
                word,
                local,
                region: Region::classify(local.norm(), delta, eps),
            },
            None => Locus {
                word: Isometry::identity(),
                local: z,
                region: Region::Outside,
            },
        }
    }

    /// `η = α^L − α` at `z`, pulled back from the tube containing `z`.
    #[inline]
    fn eta(&self, z: Complex64) -> Option<(Covector, TwoFormValue)> {
        let loc = self.locate(z);
        if !loc.in_tube() {
            return None;
        }
        let w = loc.local;
        let form = self.twist.local_form(w) - BaseAlpha::at(w);
        let d = self.twist.local_d(w) - BaseAlpha::d_at(w);
        Some((form.pulled_back(&loc.word, z), d.pulled_back(&loc.word, z)))
    }

    /// The Reeb-like field at `p`.
    pub fn reeb_like(&self, p: &CoverPoint) -> Result<VectorValue> {
        let z = p.z().z();
        let loc = self.locate(z);
        let delta = self.twist.delta();
        let w = loc.local;
        if (w.norm() - delta).abs() <= AMBIGUITY_TOL {
            let others = self
                .group
                .generators()
                .iter()
                .filter(|g| (g.apply(w).norm() - delta) <= AMBIGUITY_TOL)
                .count();
            if others > 0 {
                return Err(Error::AmbiguousRegion);
            }
        }
        Ok(self.field_at(&loc))
    }

    /// The Reeb-like field given an already computed locus.
    #[inline]
    pub fn field_at(&self, loc: &Locus) -> VectorValue {
        match self.twist.local_field(loc.local) {
            Some(v) if loc.in_tube() => push_forward(&loc.word.inverse(), loc.local, &v),
            _ => VectorValue::new(1.0, 0.0, 0.0),
        }
    }
}

impl<T: Twist> OneForm for LutzStructure<T> {
    fn eval(&self, p: &CoverPoint) -> Covector {
        let z = p.z().z();
        let base = BaseAlpha::at(z);
        match self.eta(z) {
            Some((eta, _)) => base + eta,
            None => base,
        }
    }

    fn d(&self, p: &CoverPoint) -> TwoFormValue {
        let z = p.z().z();
        let base = BaseAlpha::d_at(z);
        match self.eta(z) {
            Some((_, d)) => TwoFormValue::new(base.tx + d.tx, base.ty + d.ty, base.xy + d.xy),
            None => base,
        }
    }
}

/// `α^L` over the deck orbit; fails if the tubes overlap up to `depth`.
pub fn lutz_form(data: &LutzData, group: &FuchsianGroup, depth: usize) -> Result<LutzStructure> {
    LutzStructure::new(Arc::new(data.clone()), Arc::new(group.clone()), depth)
}

/// `R^L` at `p` for the twist on a single tube.
pub fn lutz_reeb_like(data: &LutzData, p: &CoverPoint) -> Result<VectorValue> {
    let s = LutzStructure::new(Arc::new(data.clone()), Arc::new(FuchsianGroup::trivial()), 0)?;
    s.reeb_like(p)
}

/// Largest `δ ≤ start` (by halving) for which the tubes are separated.
pub fn separated_delta(group: &FuchsianGroup, start: f64, depth: usize) -> f64 {
    let mut delta = start;
    while !validate_separation(group, delta, depth).separated && delta > 1e-6 {
        delta *= 0.5;
    }
    delta
}
