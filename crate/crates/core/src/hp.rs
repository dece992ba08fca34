//! High-precision reals with tracked absolute error bounds.
//!
//! A value is a decimal fixed-point number `mantissa * 10^-scale` together
//! with `err` such that `|true - value| <= err * 10^-scale`. All arithmetic
//! propagates the bound conservatively (interval-style, midpoint/radius), so
//! a result's reported `guaranteed_abs_error` is a true upper bound as long
//! as the inputs' bounds were. Transcendental functions use series with
//! explicit truncation-tail bounds.
//!
//! Operations require both operands at the same scale; computations pick one
//! working scale (requested digits plus guard digits) up front.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exact::{PiSquarePoly, Rat};

/// Guard digits added on top of the digits a caller asks for.
pub const GUARD_DIGITS: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HpReal {
    mantissa: BigInt,
    /// Decimal digits after the point; `value = mantissa * 10^-scale`.
    scale: u32,
    /// Absolute error in units of `10^-scale`.
    err: BigInt,
}

fn ten_pow(k: u32) -> BigInt {
    BigInt::from(10u32).pow(k)
}

impl HpReal {
    pub fn zero(scale: u32) -> Self {
        Self { mantissa: BigInt::zero(), scale, err: BigInt::zero() }
    }

    pub fn one(scale: u32) -> Self {
        Self { mantissa: ten_pow(scale), scale, err: BigInt::zero() }
    }

    pub fn from_int(n: i64, scale: u32) -> Self {
        Self { mantissa: BigInt::from(n) * ten_pow(scale), scale, err: BigInt::zero() }
    }

    /// Exactly rounded; error at most one ulp (zero when the value is exact).
    pub fn from_rat(q: &Rat, scale: u32) -> Self {
        let scaled = q * Rat::from_integer(ten_pow(scale));
        let (quot, rem) = scaled.numer().div_rem(scaled.denom());
        let err = if rem.is_zero() { BigInt::zero() } else { BigInt::one() };
        Self { mantissa: quot, scale, err }
    }

    /// Assemble from a raw scaled mantissa and error count (both in ulps of
    /// `10^-scale`); used by bulk evaluators that accumulate scaled integers.
    pub fn from_parts(mantissa: BigInt, scale: u32, err: BigInt) -> Self {
        assert!(!err.is_negative());
        Self { mantissa, scale, err }
    }

    /// Exact conversion of an `f64` (every finite f64 is rational).
    pub fn from_f64(x: f64, scale: u32) -> Option<Self> {
        let q = BigRational::from_float(x)?;
        Some(Self::from_rat(&q, scale))
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    /// The guaranteed absolute error bound, as an f64 (rounded up).
    pub fn guaranteed_abs_error(&self) -> f64 {
        if self.err.is_zero() {
            return 0.0;
        }
        let lead = self.err.to_f64().unwrap_or(f64::MAX);
        lead * libm::pow(10.0, -(self.scale as f64)) * (1.0 + 1e-9)
    }

    pub fn to_f64(&self) -> f64 {
        let q = Rat::new(self.mantissa.clone(), ten_pow(self.scale));
        q.to_f64().unwrap_or(f64::NAN)
    }

    pub fn to_rat(&self) -> Rat {
        Rat::new(self.mantissa.clone(), ten_pow(self.scale))
    }

    /// Decimal string with `digits` fractional digits (truncated from the
    /// working precision, which must be at least as fine).
    pub fn to_decimal_string(&self, digits: u32) -> String {
        use alloc::format;
        let digits = digits.min(self.scale);
        let drop = self.scale - digits;
        let m = &self.mantissa / ten_pow(drop);
        let neg = m.is_negative();
        let abs = m.magnitude().clone();
        let base = num_bigint::BigUint::from(10u32).pow(digits);
        let (int, frac) = (abs.clone() / &base, abs % &base);
        let mut s = String::new();
        if neg {
            s.push('-');
        }
        if digits == 0 {
            s.push_str(&format!("{int}"));
        } else {
            s.push_str(&format!("{int}.{frac:0width$}", width = digits as usize));
        }
        s
    }

    fn assert_scale(&self, rhs: &Self) {
        assert_eq!(self.scale, rhs.scale, "mixed HpReal scales");
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.assert_scale(rhs);
        Self {
            mantissa: &self.mantissa + &rhs.mantissa,
            scale: self.scale,
            err: &self.err + &rhs.err,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.assert_scale(rhs);
        Self {
            mantissa: &self.mantissa - &rhs.mantissa,
            scale: self.scale,
            err: &self.err + &rhs.err,
        }
    }

    pub fn neg(&self) -> Self {
        Self { mantissa: -&self.mantissa, scale: self.scale, err: self.err.clone() }
    }

    pub fn abs(&self) -> Self {
        Self { mantissa: self.mantissa.abs(), scale: self.scale, err: self.err.clone() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.assert_scale(rhs);
        let unit = ten_pow(self.scale);
        let prod = &self.mantissa * &rhs.mantissa;
        let mantissa = div_round(&prod, &unit);
        let rounding = if (&prod % &unit).is_zero() { 0u32 } else { 1u32 };
        // |xy - round(m1 m2 / u)| <= (|m1| e2 + |m2| e1 + e1 e2)/u + rounding
        let raw = self.mantissa.magnitude().clone() * rhs.err.magnitude()
            + rhs.mantissa.magnitude().clone() * self.err.magnitude()
            + self.err.magnitude() * rhs.err.magnitude();
        let carried = if raw.is_zero() { 0u32 } else { 1u32 };
        let err = BigInt::from(raw / unit.magnitude()) + rounding + carried;
        Self { mantissa, scale: self.scale, err }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        let kk = BigInt::from(k);
        Self {
            mantissa: &self.mantissa * &kk,
            scale: self.scale,
            err: &self.err * BigInt::from(k.unsigned_abs()),
        }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        self.assert_scale(rhs);
        assert!(!rhs.mantissa.is_zero(), "division by zero");
        assert!(
            rhs.err.magnitude() * 4u32 < rhs.mantissa.magnitude().clone() * 3u32,
            "divisor interval too wide"
        );
        let unit = ten_pow(self.scale);
        let mantissa = div_round(&(&self.mantissa * &unit), &rhs.mantissa);
        // error: (e1 + |q| e2) / (|m2| - e2) scaled, plus rounding
        let q_abs = mantissa.magnitude().clone();
        let denom = rhs.mantissa.magnitude() - rhs.err.magnitude();
        let raw = (self.err.magnitude().clone() * unit.magnitude() + q_abs * rhs.err.magnitude())
            / denom;
        let err = BigInt::from(raw) + 2u32;
        Self { mantissa, scale: self.scale, err }
    }

    pub fn div_u32(&self, k: u32) -> Self {
        assert!(k > 0);
        let kk = BigInt::from(k);
        let rounding = if (&self.mantissa % &kk).is_zero() { 0u32 } else { 1u32 };
        let carried = if self.err.is_zero() { 0u32 } else { 1u32 };
        Self {
            mantissa: div_round(&self.mantissa, &kk),
            scale: self.scale,
            err: &self.err / kk + rounding + carried,
        }
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    /// Midpoint comparison (ignores error intervals).
    pub fn cmp_mid(&self, rhs: &Self) -> Ordering {
        self.assert_scale(rhs);
        self.mantissa.cmp(&rhs.mantissa)
    }

    /// True when the two error intervals are disjoint with `self < rhs`.
    pub fn definitely_lt(&self, rhs: &Self) -> bool {
        self.assert_scale(rhs);
        &self.mantissa + &self.err < &rhs.mantissa - &rhs.err
    }

    /// True when `|self - rhs| <= tol` holds for every pair of values in the
    /// respective error intervals.
    pub fn within(&self, rhs: &Self, tol: &Self) -> bool {
        let d = self.sub(rhs);
        d.mantissa.magnitude().clone() + d.err.magnitude() <= *tol.mantissa.magnitude()
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.mantissa.is_negative(), "sqrt of negative value");
        let unit = ten_pow(self.scale);
        let target = &self.mantissa * &unit;
        let root = bigint_isqrt(&target);
        // |sqrt(x) - r| <= 1 ulp from rounding; input error adds e/(2 sqrt(x))
        let prop = if root.is_zero() {
            // near zero: sqrt is 1/2-Hoelder; bound err by sqrt(err)
            bigint_isqrt(&(&self.err * &unit)) + 1u32
        } else {
            div_round(&(&self.err * &unit), &(BigInt::from(2u32) * &root)) + 1u32
        };
        Self { mantissa: root, scale: self.scale, err: prop + 1u32 }
    }

    /// exp(x) by argument halving plus Taylor series.
    pub fn exp(&self) -> Self {
        let scale = self.scale;
        // halve until |x| < 1/2
        let half_limit = ten_pow(scale) / BigInt::from(2u32);
        let mut halvings = 0u32;
        let mut work = self.clone();
        while work.mantissa.magnitude() >= half_limit.magnitude() {
            work = work.div_u32(2);
            halvings += 1;
            assert!(halvings < 64, "exp argument out of range");
        }
        let mut acc = Self::one(scale);
        let mut term = Self::one(scale);
        let mut k = 1u32;
        loop {
            term = term.mul(&work);
            term = term.div_u32(k);
            acc = acc.add(&term);
            // once |x|/k < 1/2, the tail is below twice the next term
            if term.mantissa.magnitude() <= term.err.magnitude() || term.mantissa.is_zero() {
                // truncation tail bounded by 2 * |term|
                acc.err += BigInt::from(term.mantissa.magnitude().clone() * 2u32) + 2u32;
                break;
            }
            k += 1;
            assert!(k < 10_000, "exp series failed to converge");
        }
        for _ in 0..halvings {
            acc = acc.mul(&acc);
        }
        acc
    }

    /// Natural log by Newton iteration on `exp`, seeded from f64.
    pub fn ln(&self) -> Self {
        assert!(self.mantissa.is_positive(), "ln of non-positive value");
        let scale = self.scale;
        let x = self.clone();
        let seed = libm::log(self.to_f64());
        let mut y = Self::from_f64(seed, scale).unwrap();
        // y_{n+1} = y_n + x*exp(-y_n) - 1; quadratic convergence from the
        // f64 seed reaches hundreds of digits within a handful of steps
        let iters = 3 + (64 - (scale as u64).leading_zeros());
        for _ in 0..iters {
            let e = y.neg().exp();
            let delta = x.mul(&e).sub(&Self::one(scale));
            y = y.add(&delta);
        }
        // fold the final residual r = x e^{-y} - 1 into the error bound
        let resid = x.mul(&y.neg().exp()).sub(&Self::one(scale));
        y.err += BigInt::from(resid.mantissa.magnitude() + resid.err.magnitude()) + 2u32;
        y
    }

    pub fn sinh(&self) -> Self {
        let e = self.exp();
        let einv = Self::one(self.scale).div(&e);
        e.sub(&einv).div_u32(2)
    }

    pub fn cosh(&self) -> Self {
        let e = self.exp();
        let einv = Self::one(self.scale).div(&e);
        e.add(&einv).div_u32(2)
    }

    /// acosh(x) = ln(x + sqrt(x^2 - 1)) for x >= 1.
    pub fn acosh(&self) -> Self {
        let one = Self::one(self.scale);
        let inner = self.mul(self).sub(&one).sqrt();
        self.add(&inner).ln()
    }

    /// pi at this scale (Machin's formula), error a few ulps.
    pub fn pi(scale: u32) -> Self {
        let a = atan_inv_u32(5, scale);
        let b = atan_inv_u32(239, scale);
        let mut p = a.mul_small(16).sub(&b.mul_small(4));
        p.err += 4u32;
        p
    }

    fn mul_small(&self, k: u32) -> Self {
        Self {
            mantissa: &self.mantissa * BigInt::from(k),
            scale: self.scale,
            err: &self.err * BigInt::from(k),
        }
    }
}

/// Round-to-nearest integer division.
fn div_round(num: &BigInt, den: &BigInt) -> BigInt {
    let (mut q, r) = num.div_rem(den);
    if r.magnitude().clone() * 2u32 >= *den.magnitude() {
        if num.is_negative() ^ den.is_negative() {
            q -= BigInt::one();
        } else {
            q += BigInt::one();
        }
    }
    q
}

fn bigint_isqrt(n: &BigInt) -> BigInt {
    n.sqrt()
}

/// atan(1/x) * 10^scale by the alternating series; truncation below 1 ulp.
fn atan_inv_u32(x: u32, scale: u32) -> HpReal {
    let unit = ten_pow(scale + 5);
    let xsq = BigInt::from(x) * BigInt::from(x);
    let mut term = &unit / BigInt::from(x);
    let mut acc = term.clone();
    let mut k = 1u64;
    while !term.is_zero() {
        term /= &xsq;
        if term.is_zero() {
            break;
        }
        let piece = &term / BigInt::from(2 * k + 1);
        if k % 2 == 1 {
            acc -= piece;
        } else {
            acc += piece;
        }
        k += 1;
    }
    HpReal {
        mantissa: div_round(&acc, &ten_pow(5)),
        scale,
        err: BigInt::from(2u32),
    }
}

/// Evaluate an exact ring element at pi, to `digits` significant fractional
/// digits plus guard digits; the result carries a guaranteed error bound.
/// Requests below 15 digits are raised to 15.
pub fn eval_pipoly(p: &PiSquarePoly, digits: u32) -> HpReal {
    let scale = digits.max(15) + GUARD_DIGITS;
    let pi = HpReal::pi(scale);
    let pi2 = pi.mul(&pi);
    let mut powers: Vec<HpReal> = Vec::new();
    let max_k = p.terms().map(|(k, _)| k).max().unwrap_or(0);
    let mut cur = HpReal::one(scale);
    for _ in 0..=max_k {
        powers.push(cur.clone());
        cur = cur.mul(&pi2);
    }
    let mut acc = HpReal::zero(scale);
    for (k, q) in p.terms() {
        let c = HpReal::from_rat(q, scale);
        acc = acc.add(&c.mul(&powers[k as usize]));
    }
    acc
}

impl fmt::Display for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string(self.scale.saturating_sub(GUARD_DIGITS)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_u64;

    // reference strings from an independent high-precision source
    const PI_55: &str = "3.1415926535897932384626433832795028841971693993751058209";
    const E_55: &str = "2.718281828459045235360287471352662497757247093699959575";
    const LN2_55: &str = "0.6931471805599453094172321214581765680755001343602552541";
    const SQRT2_55: &str = "1.414213562373095048801688724209698078569671875376948073";
    const SINH1_55: &str = "1.17520119364380145688238185059560081515571798133409587";
    const FOUR_PI2_55: &str = "39.47841760435743447533796399950460454125479762896316251";
    const ACOSH_55: &str = "1.924847300238413789991035653697473692540737337542642079";

    fn agrees(v: &HpReal, reference: &str, digits: u32) {
        let got = v.to_decimal_string(digits);
        let want_len = reference.find('.').unwrap() + 1 + digits as usize;
        let want = &reference[..want_len.min(reference.len())];
        // allow one ulp in the last printed digit
        let gv: f64 = got.parse().unwrap();
        let wv: f64 = want.parse().unwrap();
        assert!(
            (gv - wv).abs() <= 2.0 * libm::pow(10.0, -(digits as f64) + 1.0),
            "mismatch: got {got} want {want}"
        );
        // and string prefix agreement except possibly the last two digits
        assert_eq!(&got[..got.len() - 2], &want[..want.len() - 2], "prefix mismatch");
    }

    #[test]
    fn pi_to_fifty_digits() {
        agrees(&HpReal::pi(55), PI_55, 50);
    }

    #[test]
    fn exp_ln_sqrt_references() {
        let one = HpReal::one(55);
        agrees(&one.exp(), E_55, 50);
        agrees(&HpReal::from_int(2, 55).ln(), LN2_55, 50);
        agrees(&HpReal::from_int(2, 55).sqrt(), SQRT2_55, 50);
        agrees(&one.sinh(), SINH1_55, 50);
    }

    #[test]
    fn acosh_reference() {
        let x = HpReal::from_rat(&rat_u64(3, 2), 55);
        agrees(&x.acosh().mul(&HpReal::from_int(2, 55)), ACOSH_55, 50);
    }

    #[test]
    fn eval_exact_constant_has_zero_error() {
        let v = eval_pipoly(&PiSquarePoly::one(), 20);
        assert_eq!(v.to_f64(), 1.0);
        assert_eq!(v.guaranteed_abs_error(), 0.0);
    }

    #[test]
    fn eval_four_pi_squared() {
        let p = PiSquarePoly::monomial(1, rat_u64(4, 1));
        let v = eval_pipoly(&p, 50);
        agrees(&v, FOUR_PI2_55, 45);
        assert!(v.guaranteed_abs_error() < 1e-50);
    }

    #[test]
    fn eval_candidate_genus_two_volume() {
        // 43 pi^6 / 2160 = 19.13876635358244944...
        let p = PiSquarePoly::monomial(3, rat_u64(43, 2160));
        let v = eval_pipoly(&p, 30);
        assert!((v.to_f64() - 19.138766353582449).abs() < 1e-12);
    }

    #[test]
    fn error_bound_is_honest_across_precisions() {
        // |v20 - v60| must be within the sum of the reported bounds
        let p = PiSquarePoly::monomial(2, rat_u64(7, 3));
        let lo = eval_pipoly(&p, 20);
        let hi = eval_pipoly(&p, 60);
        let diff = (lo.to_f64() - hi.to_f64()).abs();
        assert!(diff <= lo.guaranteed_abs_error() + hi.guaranteed_abs_error() + 1e-30);
    }

    #[test]
    fn exp_of_larger_argument() {
        // e^{-1/2} = 0.60653065971263342360...
        let x = HpReal::from_rat(&Rat::new((-1).into(), 2.into()), 55);
        let v = x.exp();
        assert!((v.to_f64() - 0.6065306597126334).abs() < 1e-15);
        // e^10 via halving
        let v10 = HpReal::from_int(10, 55).exp();
        assert!((v10.to_f64() - 22026.465794806718).abs() < 1e-9);
    }

    #[test]
    fn division_and_interval_comparison() {
        let a = HpReal::from_int(1, 40);
        let b = HpReal::from_int(3, 40);
        let q = a.div(&b);
        let r = q.mul(&b);
        assert!(r.within(&HpReal::one(40), &HpReal::from_rat(&rat_u64(1, 1_000_000), 40)));
        assert!(q.definitely_lt(&HpReal::one(40)));
    }
}
