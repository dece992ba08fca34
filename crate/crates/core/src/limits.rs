//! Large-genus limit laws of the bottom length spectrum.
//!
//! The limit intensity of the length spectrum point process is
//! `(e^t + e^-t - 2)/t` on the length axis; `lambda(a, b)` is its mass on
//! `[a, b]`, computed by two independent routes (the term-wise integrated
//! Taylor series and adaptive quadrature of the integrand) which must agree
//! to the caller's tolerance. Counts in disjoint windows are independent
//! Poisson with these means; from that follow the thin-part probability,
//! the limiting expected systole, and the thick-part comparison constant.

use alloc::vec::Vec;
use core::fmt;

use crate::hp::HpReal;
use crate::quad;

/// Working precision for the limit-law computations (decimal digits).
pub const WORK_DIGITS: u32 = 50;

#[derive(Debug, Clone, PartialEq)]
pub enum LimitsError {
    BadInterval { a: f64, b: f64 },
    BadTolerance(f64),
    MethodsDisagree { series: f64, quadrature: f64, delta: f64, tol: f64 },
    OverlappingIntervals,
    CountMismatch,
}

impl fmt::Display for LimitsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use LimitsError::*;
        match self {
            BadInterval { a, b } => write!(f, "need 0 <= a < b, got [{a}, {b}]"),
            BadTolerance(t) => write!(f, "bad tolerance {t}"),
            MethodsDisagree { series, quadrature, delta, tol } => write!(
                f,
                "series {series} and quadrature {quadrature} differ by {delta} > {tol}"
            ),
            OverlappingIntervals => write!(f, "intervals must be pairwise disjoint"),
            CountMismatch => write!(f, "one count per interval required"),
        }
    }
}

impl core::error::Error for LimitsError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaMethod {
    Series,
    Quadrature,
    Both,
}

#[derive(Debug, Clone)]
pub struct LambdaValue {
    pub a: f64,
    pub b: f64,
    pub value: HpReal,
    pub method: LambdaMethod,
    /// |series - quadrature| when both ran
    pub agreement: f64,
}

impl LambdaValue {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

/// Series tail of `lambda_[0,x] = sum_{k>=1} 2 x^{2k} / ((2k) (2k)!)`,
/// in high precision with a certified truncation bound.
pub fn lambda_series_hp(x: &HpReal, scale: u32) -> HpReal {
    if !x.is_negative() && x.to_f64() == 0.0 {
        return HpReal::zero(scale);
    }
    let xsq = x.mul(x);
    // u_k = x^{2k} / (2k)!; term_k = 2 u_k / (2k)
    let mut u = xsq.div_u32(2); // k = 1: x^2/2!
    let mut acc = u.clone(); // 2 u_1 / 2
    let mut k = 1u32;
    loop {
        // u_{k+1} = u_k x^2 / ((2k+1)(2k+2))
        u = u.mul(&xsq).div_u32((2 * k + 1) * (2 * k + 2));
        k += 1;
        let term = u.div_u32(k);
        let before = acc.clone();
        acc = acc.add(&term);
        // ratio of successive terms below 1/2 once (2k+1)(2k+2) > 2 x^2,
        // so the tail is at most twice the last added term
        let ratio_small = (2 * k + 1) as f64 * (2 * k + 2) as f64 > 2.0 * xsq.to_f64();
        if ratio_small && term.definitely_lt(&ulp_threshold(scale)) {
            let tail = term.mul_i64(2);
            let mut out = acc;
            out = out.add(&HpReal::zero(scale)); // keep scale
            // fold tail into the error bound via a widened interval
            out = widen(out, &tail);
            return out;
        }
        let _ = before;
        assert!(k < 100_000, "lambda series failed to converge");
    }
}

fn ulp_threshold(scale: u32) -> HpReal {
    let q = crate::exact::Rat::new(
        num_bigint::BigInt::from(1),
        num_bigint::BigInt::from(10u32).pow(scale.saturating_sub(2)),
    );
    HpReal::from_rat(&q, scale)
}

fn widen(v: HpReal, pad: &HpReal) -> HpReal {
    // add and subtract: the interval grows by |pad| on both sides
    v.add(pad).sub(pad)
}

/// The intensity `(e^t + e^-t - 2)/t = 4 sinh(t/2)^2 / t`, stable near 0.
pub fn intensity_hp(t: &HpReal, scale: u32) -> HpReal {
    if t.to_f64() == 0.0 {
        return HpReal::zero(scale);
    }
    let half = t.div_u32(2);
    let s = half.sinh();
    s.mul(&s).mul_i64(4).div(t)
}

/// `lambda_[a,b]` by the series (primary) cross-checked against adaptive
/// quadrature; errors out if the two disagree beyond `tol`.
pub fn lambda(a: f64, b: f64, tol: f64) -> Result<LambdaValue, LimitsError> {
    if !(a >= 0.0 && b >= a) {
        return Err(LimitsError::BadInterval { a, b });
    }
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must be rejected too
    if !(tol > 0.0) {
        return Err(LimitsError::BadTolerance(tol));
    }
    if a == b {
        // degenerate window: mass is exactly zero
        let scale = WORK_DIGITS + crate::hp::GUARD_DIGITS;
        return Ok(LambdaValue {
            a,
            b,
            value: HpReal::zero(scale),
            method: LambdaMethod::Both,
            agreement: 0.0,
        });
    }
    let scale = WORK_DIGITS + crate::hp::GUARD_DIGITS;
    let a_hp = HpReal::from_f64(a, scale).unwrap();
    let b_hp = HpReal::from_f64(b, scale).unwrap();
    let series = lambda_series_hp(&b_hp, scale).sub(&lambda_series_hp(&a_hp, scale));
    let f = |t: &HpReal| intensity_hp(t, scale);
    let quadrature = quad::integrate(&f, &a_hp, &b_hp, (tol * 1e-3).max(1e-38), 16, scale);
    let delta = libm::fabs(series.sub(&quadrature).to_f64());
    if delta > tol {
        return Err(LimitsError::MethodsDisagree {
            series: series.to_f64(),
            quadrature: quadrature.to_f64(),
            delta,
            tol,
        });
    }
    Ok(LambdaValue { a, b, value: series, method: LambdaMethod::Both, agreement: delta })
}

/// Fast f64 evaluation of `lambda_[a,b]` by the series alone (used for
/// predictions and the sampler grid).
pub fn lambda_f64(a: f64, b: f64) -> f64 {
    lambda0_f64(b) - lambda0_f64(a)
}

fn lambda0_f64(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let xsq = x * x;
    let mut u = xsq / 2.0;
    let mut acc = u;
    let mut k = 1u32;
    loop {
        u *= xsq / ((2 * k + 1) as f64 * (2 * k + 2) as f64);
        k += 1;
        let term = u / k as f64;
        acc += term;
        if term < acc * 1e-17 {
            return acc;
        }
        assert!(k < 10_000);
    }
}

/// Poisson point mass `mean^k e^{-mean} / k!`.
pub fn poisson_pmf(mean: f64, k: u32) -> f64 {
    let mut p = libm::exp(-mean);
    for i in 1..=k {
        p *= mean / i as f64;
    }
    p
}

/// A Poisson law; counts of the limiting process in one window.
#[derive(Debug, Clone, Copy)]
pub struct PoissonLaw {
    pub mean: f64,
}

impl PoissonLaw {
    pub fn pmf(&self, k: u32) -> f64 {
        poisson_pmf(self.mean, k)
    }
}

/// Joint limit probability of observing `counts[j]` curves with lengths in
/// `intervals[j]`: independent Poisson factors with means `lambda_[a_j,b_j]`.
pub fn limit_joint_probability(
    intervals: &[(f64, f64)],
    counts: &[u32],
) -> Result<f64, LimitsError> {
    if intervals.len() != counts.len() {
        return Err(LimitsError::CountMismatch);
    }
    for (a, b) in intervals {
        if !(*a >= 0.0 && b > a) {
            return Err(LimitsError::BadInterval { a: *a, b: *b });
        }
    }
    let mut sorted: Vec<(f64, f64)> = intervals.to_vec();
    sorted.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    for w in sorted.windows(2) {
        if w[1].0 < w[0].1 {
            return Err(LimitsError::OverlappingIntervals);
        }
    }
    let mut p = 1.0;
    for ((a, b), &m) in intervals.iter().zip(counts) {
        p *= poisson_pmf(lambda_f64(*a, *b), m);
    }
    Ok(p)
}

/// Limiting probability that the systole is at most `eps`:
/// `1 - e^{-lambda_[0,eps]}`.
pub fn thin_part_probability(eps: f64) -> f64 {
    if eps <= 0.0 {
        return 0.0;
    }
    -libm::expm1(-lambda_f64(0.0, eps))
}

#[derive(Debug, Clone)]
pub struct SystoleLimit {
    pub value: HpReal,
    pub truncation: f64,
    pub tail_bound: f64,
}

impl SystoleLimit {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

/// The limiting expected systole `int_0^inf e^{-lambda_[0,R]} dR`.
///
/// Truncation at `T = max(5, lambda^{-1}(ln(2/tol)))`; the discarded tail is
/// at most `e^{-lambda(T)} / lambda'(T)` since `lambda` is convex increasing.
pub fn expected_systole_limit(tol: f64) -> Result<SystoleLimit, LimitsError> {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must be rejected too
    if !(tol >= 1e-8) {
        return Err(LimitsError::BadTolerance(tol));
    }
    let target = libm::log(2.0 / tol);
    let mut t = 5.0f64;
    while lambda0_f64(t) < target {
        t += 0.5;
    }
    let scale = WORK_DIGITS + crate::hp::GUARD_DIGITS;
    let f = |r: &HpReal| lambda_series_hp(r, scale).neg().exp();
    let a = HpReal::zero(scale);
    let b = HpReal::from_f64(t, scale).unwrap();
    let value = quad::integrate(&f, &a, &b, (tol * 1e-4).max(1e-30), 16, scale);
    let lam_t = lambda0_f64(t);
    let slope = (libm::exp(t) + libm::exp(-t) - 2.0) / t;
    let tail_bound = libm::exp(-lam_t) / slope;
    Ok(SystoleLimit { value, truncation: t, tail_bound })
}

/// The thick-part comparison constant: `b = 2 acosh(3/2)` and the limiting
/// probability `e^{-lambda_[0,b]}` that a surface has systole at least `b`.
pub fn bm_thick_probability() -> (f64, f64) {
    let scale = WORK_DIGITS + crate::hp::GUARD_DIGITS;
    let three_half = HpReal::from_rat(&crate::exact::rat_u64(3, 2), scale);
    let b = three_half.acosh().mul_i64(2);
    let lam = lambda_series_hp(&b, scale);
    (b.to_f64(), lam.neg().exp().to_f64())
}
