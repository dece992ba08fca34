//! Exact arithmetic in Q[pi^2] and multivariate even polynomials over it.
//!
//! [`PiSquarePoly`] is the coefficient ring of every volume quantity: a
//! finite sum of rational multiples of non-negative powers of pi^2.
//! [`BoundaryPoly`] is a polynomial in boundary lengths `L_1..L_n` in which
//! every variable occurs through even powers only; the exponent map stores
//! half-degrees, so the monomial key `(d_1,..,d_n)` stands for
//! `L_1^{2 d_1} ... L_n^{2 d_n}`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, kept in canonical form by `num-rational`.
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactError {
    /// Box dimension does not match the polynomial's variable count.
    DimensionMismatch { expected: usize, got: usize },
    /// Interval with `a < 0` or `b <= a`.
    BadInterval(usize),
    /// Parse failure for the canonical `num/den*pi^2k` text form.
    Parse(String),
}

impl fmt::Display for ExactError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected} variables, got {got}")
            }
            ExactError::BadInterval(i) => write!(f, "interval {i} must satisfy 0 <= a < b"),
            ExactError::Parse(s) => write!(f, "parse error: {s}"),
        }
    }
}

impl core::error::Error for ExactError {}

pub fn rat_u64(n: u64, d: u64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// An exact element of Q[pi^2]: map from the power of pi^2 to its rational
/// coefficient. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PiSquarePoly {
    terms: BTreeMap<u32, Rat>,
}

impl PiSquarePoly {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(Rat::one())
    }

    pub fn from_rational(q: Rat) -> Self {
        Self::monomial(0, q)
    }

    /// `q * (pi^2)^k`
    pub fn monomial(k: u32, q: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(k, q);
        }
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rat)> {
        self.terms.iter().map(|(k, q)| (*k, q))
    }

    pub fn coeff(&self, k: u32) -> Rat {
        self.terms.get(&k).cloned().unwrap_or_else(Rat::zero)
    }

    /// Is this a single term `q * pi^{2k}` with `q > 0`?
    pub fn as_positive_monomial(&self) -> Option<(u32, &Rat)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (k, q) = self.terms.iter().next().unwrap();
        if q.is_positive() {
            Some((*k, q))
        } else {
            None
        }
    }

    /// True if every stored coefficient is strictly positive.
    pub fn all_coeffs_positive(&self) -> bool {
        !self.is_zero() && self.terms.values().all(|q| q.is_positive())
    }

    fn insert_add(&mut self, k: u32, q: Rat) {
        if q.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(c) => {
                *c += q;
                if c.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, q);
            }
        }
    }

    pub fn scale(&self, q: &Rat) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, c)| (*k, c * q)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Parse the canonical text form, e.g. `1/96 + 1/12*pi^2`. Negative
    /// powers of pi are rejected: all in-scope quantities live in Q[pi^2].
    pub fn parse(s: &str) -> Result<Self, ExactError> {
        let mut out = Self::zero();
        let body = s.trim();
        if body.is_empty() {
            return Err(ExactError::Parse(String::from("empty input")));
        }
        for piece in body.split('+') {
            let piece = piece.trim();
            if piece.is_empty() {
                return Err(ExactError::Parse(String::from("empty term")));
            }
            let (coef_str, k) = match piece.find("pi^") {
                Some(pos) => {
                    let exp_str = &piece[pos + 3..];
                    if exp_str.starts_with('-') {
                        return Err(ExactError::Parse(String::from(
                            "negative powers of pi are not representable",
                        )));
                    }
                    let e: u32 = exp_str
                        .parse()
                        .map_err(|_| ExactError::Parse(String::from("bad pi exponent")))?;
                    if !e.is_multiple_of(2) {
                        return Err(ExactError::Parse(String::from("odd power of pi")));
                    }
                    let coef = piece[..pos].trim().trim_end_matches('*').trim();
                    (if coef.is_empty() { "1" } else { coef }, e / 2)
                }
                None => (piece, 0),
            };
            let q = parse_rat(coef_str)?;
            out.insert_add(k, q);
        }
        Ok(out)
    }
}

fn parse_rat(s: &str) -> Result<Rat, ExactError> {
    let bad = || ExactError::Parse(String::from("bad rational"));
    let mut it = s.splitn(2, '/');
    let num: BigInt = it.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let den: BigInt = match it.next() {
        Some(d) => d.trim().parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if den.is_zero() || den.is_negative() {
        return Err(ExactError::Parse(String::from("denominator must be positive")));
    }
    Ok(Rat::new(num, den))
}

impl fmt::Display for PiSquarePoly {
    /// Canonical form: `num/den*pi^2k` terms joined by ` + `, k ascending,
    /// e.g. `1/96 + 1/12*pi^2`. The zero polynomial prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, q) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *k == 0 {
                write_rat(f, q)?;
            } else {
                write_rat(f, q)?;
                write!(f, "*pi^{}", 2 * k)?;
            }
        }
        Ok(())
    }
}

fn write_rat(f: &mut fmt::Formatter<'_>, q: &Rat) -> fmt::Result {
    if q.denom().is_one() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

impl Add for &PiSquarePoly {
    type Output = PiSquarePoly;
    fn add(self, rhs: &PiSquarePoly) -> PiSquarePoly {
        let mut out = self.clone();
        for (k, q) in &rhs.terms {
            out.insert_add(*k, q.clone());
        }
        out
    }
}

impl Sub for &PiSquarePoly {
    type Output = PiSquarePoly;
    fn sub(self, rhs: &PiSquarePoly) -> PiSquarePoly {
        let mut out = self.clone();
        for (k, q) in &rhs.terms {
            out.insert_add(*k, -q.clone());
        }
        out
    }
}

impl Mul for &PiSquarePoly {
    type Output = PiSquarePoly;
    fn mul(self, rhs: &PiSquarePoly) -> PiSquarePoly {
        let mut out = PiSquarePoly::zero();
        for (ka, qa) in &self.terms {
            for (kb, qb) in &rhs.terms {
                out.insert_add(ka + kb, qa * qb);
            }
        }
        out
    }
}

impl Neg for &PiSquarePoly {
    type Output = PiSquarePoly;
    fn neg(self) -> PiSquarePoly {
        PiSquarePoly {
            terms: self.terms.iter().map(|(k, q)| (*k, -q.clone())).collect(),
        }
    }
}

/// Multivariate even polynomial over Q[pi^2]; key `(d_1..d_n)` encodes the
/// monomial `prod_i L_i^{2 d_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryPoly {
    num_vars: usize,
    monomials: BTreeMap<Vec<u32>, PiSquarePoly>,
}

impl BoundaryPoly {
    pub fn zero(num_vars: usize) -> Self {
        Self { num_vars, monomials: BTreeMap::new() }
    }

    pub fn constant(num_vars: usize, c: PiSquarePoly) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(alloc::vec![0; num_vars], c);
        p
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn monomials(&self) -> impl Iterator<Item = (&Vec<u32>, &PiSquarePoly)> {
        self.monomials.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn add_term(&mut self, d: Vec<u32>, c: PiSquarePoly) {
        assert_eq!(d.len(), self.num_vars, "exponent vector length");
        if c.is_zero() {
            return;
        }
        match self.monomials.get_mut(&d) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.monomials.remove(&d);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.monomials.insert(d, c);
            }
        }
    }

    /// Total degree in the half-exponents, i.e. the degree in the `L_i^2`.
    pub fn total_degree(&self) -> u32 {
        self.monomials.keys().map(|d| d.iter().sum()).max().unwrap_or(0)
    }

    pub fn scale(&self, q: &Rat) -> Self {
        Self {
            num_vars: self.num_vars,
            monomials: self
                .monomials
                .iter()
                .map(|(d, c)| (d.clone(), c.scale(q)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.num_vars, rhs.num_vars, "variable count");
        let mut out = Self::zero(self.num_vars);
        for (da, ca) in &self.monomials {
            for (db, cb) in &rhs.monomials {
                let d: Vec<u32> = da.iter().zip(db).map(|(a, b)| a + b).collect();
                out.add_term(d, ca * cb);
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.num_vars, rhs.num_vars, "variable count");
        let mut out = self.clone();
        for (d, c) in &rhs.monomials {
            out.add_term(d.clone(), c.clone());
        }
        out
    }

    /// Re-express this polynomial in a space of `new_num_vars` variables,
    /// sending variable `i` to variable `map[i]`. Several old variables may
    /// land on the same new one (exponents add), which is how a complement
    /// piece with two boundary circles on the same curve picks up
    /// `V(.., x_t, .., x_t, ..)`.
    pub fn map_vars(&self, new_num_vars: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.num_vars);
        assert!(map.iter().all(|&j| j < new_num_vars));
        let mut out = Self::zero(new_num_vars);
        for (d, c) in &self.monomials {
            let mut nd = alloc::vec![0u32; new_num_vars];
            for (i, &e) in d.iter().enumerate() {
                nd[map[i]] += e;
            }
            out.add_term(nd, c.clone());
        }
        out
    }

    /// Apply a permutation of the variables (useful for symmetry checks).
    pub fn permute_vars(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.num_vars);
        let mut out = Self::zero(self.num_vars);
        for (d, c) in &self.monomials {
            let mut nd = alloc::vec![0u32; self.num_vars];
            for (i, &e) in d.iter().enumerate() {
                nd[perm[i]] = e;
            }
            out.add_term(nd, c.clone());
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        if self.num_vars < 2 {
            return true;
        }
        // adjacent transpositions generate the symmetric group
        for i in 0..self.num_vars - 1 {
            let mut perm: Vec<usize> = (0..self.num_vars).collect();
            perm.swap(i, i + 1);
            if self.permute_vars(&perm) != *self {
                return false;
            }
        }
        true
    }

    /// Exact evaluation at rational squared-lengths: substitutes
    /// `L_i^2 = sq[i]` and collapses to a ring element.
    pub fn eval_squares(&self, sq: &[Rat]) -> PiSquarePoly {
        assert_eq!(sq.len(), self.num_vars);
        let mut acc = PiSquarePoly::zero();
        for (d, c) in &self.monomials {
            let mut w = Rat::one();
            for (i, &e) in d.iter().enumerate() {
                for _ in 0..e {
                    w *= &sq[i];
                }
            }
            acc = &acc + &c.scale(&w);
        }
        acc
    }
}

/// Integration domain: a product of intervals `[a_i, b_i]` with rational
/// endpoints, `0 <= a_i < b_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxDomain {
    intervals: Vec<(Rat, Rat)>,
}

impl BoxDomain {
    pub fn new(intervals: Vec<(Rat, Rat)>) -> Result<Self, ExactError> {
        for (i, (a, b)) in intervals.iter().enumerate() {
            if a.is_negative() || b <= a {
                return Err(ExactError::BadInterval(i));
            }
        }
        Ok(Self { intervals })
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[(Rat, Rat)] {
        &self.intervals
    }
}

/// Exact moment integral `int_box P(x) x_1..x_n dx`: monomial-wise,
/// `int_a^b x^{2d} * x dx = (b^{2d+2} - a^{2d+2}) / (2d+2)`.
pub fn box_moment_integral(p: &BoundaryPoly, domain: &BoxDomain) -> Result<PiSquarePoly, ExactError> {
    if domain.dim() != p.num_vars() {
        return Err(ExactError::DimensionMismatch { expected: p.num_vars(), got: domain.dim() });
    }
    let mut acc = PiSquarePoly::zero();
    for (d, c) in p.monomials() {
        let mut w = Rat::one();
        for (i, &e) in d.iter().enumerate() {
            let (a, b) = &domain.intervals()[i];
            let pow = e + 1;
            let bp = pow_rat(b, 2 * pow);
            let ap = pow_rat(a, 2 * pow);
            w *= (bp - ap) / Rat::from_integer(BigInt::from(2 * pow));
        }
        acc = &acc + &c.scale(&w);
    }
    Ok(acc)
}

fn pow_rat(q: &Rat, e: u32) -> Rat {
    let mut acc = Rat::one();
    let mut base = q.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base.clone() * &base;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn pi2(k: u32, num: i64, den: i64) -> PiSquarePoly {
        PiSquarePoly::monomial(k, Rat::new(BigInt::from(num), BigInt::from(den)))
    }

    #[test]
    fn additive_identity() {
        let one = PiSquarePoly::one();
        assert_eq!(&one + &PiSquarePoly::zero(), one);
    }

    #[test]
    fn monomial_product() {
        // (4 pi^2) * (4 pi^2) = 16 pi^4
        let p = pi2(1, 4, 1);
        assert_eq!(&p * &p, pi2(2, 16, 1));
    }

    #[test]
    fn binomial_cube_matches_repeated_multiplication() {
        // (1 + pi^2)^3 = 1 + 3 pi^2 + 3 pi^4 + pi^6
        let base = &PiSquarePoly::one() + &pi2(1, 1, 1);
        let cube = base.pow(3);
        let by_mul = &(&base * &base) * &base;
        assert_eq!(cube, by_mul);
        let expected = &(&(&PiSquarePoly::one() + &pi2(1, 3, 1)) + &pi2(2, 3, 1)) + &pi2(3, 1, 1);
        assert_eq!(cube, expected);
    }

    #[test]
    fn display_canonical_form() {
        let p = &pi2(0, 1, 96) + &pi2(1, 1, 12);
        assert_eq!(p.to_string(), "1/96 + 1/12*pi^2");
        assert_eq!(PiSquarePoly::zero().to_string(), "0");
        assert_eq!(pi2(2, 16, 1).to_string(), "16*pi^4");
    }

    #[test]
    fn parse_round_trip_and_rejects_negative_powers() {
        let p = &pi2(0, 1, 96) + &pi2(1, 1, 12);
        assert_eq!(PiSquarePoly::parse(&p.to_string()).unwrap(), p);
        assert_eq!(PiSquarePoly::parse("16*pi^4").unwrap(), pi2(2, 16, 1));
        assert!(PiSquarePoly::parse("1/2*pi^-2").is_err());
        assert!(PiSquarePoly::parse("pi^3").is_err());
    }

    fn interval(a: (i64, i64), b: (i64, i64)) -> (Rat, Rat) {
        (
            Rat::new(BigInt::from(a.0), BigInt::from(a.1)),
            Rat::new(BigInt::from(b.0), BigInt::from(b.1)),
        )
    }

    #[test]
    fn box_moment_constant() {
        // int_0^2 1 * x dx = 2
        let p = BoundaryPoly::constant(1, PiSquarePoly::one());
        let bx = BoxDomain::new(vec![interval((0, 1), (2, 1))]).unwrap();
        assert_eq!(box_moment_integral(&p, &bx).unwrap(), pi2(0, 2, 1));
    }

    #[test]
    fn box_moment_x_squared() {
        // int_0^1 x^2 * x dx = 1/4
        let mut p = BoundaryPoly::zero(1);
        p.add_term(vec![1], PiSquarePoly::one());
        let bx = BoxDomain::new(vec![interval((0, 1), (1, 1))]).unwrap();
        assert_eq!(box_moment_integral(&p, &bx).unwrap(), pi2(0, 1, 4));
    }

    #[test]
    fn box_moment_one_holed_torus_shape() {
        // int_0^1 (x^2 + 4 pi^2)/24 * x dx = 1/96 + pi^2/12
        let mut p = BoundaryPoly::zero(1);
        p.add_term(vec![1], pi2(0, 1, 24));
        p.add_term(vec![0], pi2(1, 4, 24));
        let bx = BoxDomain::new(vec![interval((0, 1), (1, 1))]).unwrap();
        let got = box_moment_integral(&p, &bx).unwrap();
        assert_eq!(got, &pi2(0, 1, 96) + &pi2(1, 1, 12));
    }

    #[test]
    fn box_dimension_mismatch() {
        let p = BoundaryPoly::constant(2, PiSquarePoly::one());
        let bx = BoxDomain::new(vec![interval((0, 1), (1, 1))]).unwrap();
        assert!(matches!(
            box_moment_integral(&p, &bx),
            Err(ExactError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bad_interval_rejected() {
        assert!(BoxDomain::new(vec![interval((1, 1), (1, 1))]).is_err());
        assert!(BoxDomain::new(vec![interval((-1, 1), (1, 1))]).is_err());
    }

    #[test]
    fn map_vars_merges_slots() {
        // V(x, x) style substitution: x0^2 * x1^4 with both mapped to slot 0
        let mut p = BoundaryPoly::zero(2);
        p.add_term(vec![1, 2], PiSquarePoly::one());
        let q = p.map_vars(1, &[0, 0]);
        let mut want = BoundaryPoly::zero(1);
        want.add_term(vec![3], PiSquarePoly::one());
        assert_eq!(q, want);
    }
}
