//! Ingested psi-class intersection data and Weil-Petersson volume polynomials.
//!
//! A record stores the normalized bracket `[tau_{d_1},..,tau_{d_n}]_{g,n}` as
//! a positive rational times `pi^{2 d_0}` with `d_0 = 3g-3+n-|d|`. The volume
//! polynomial of a signature is assembled from its records by
//!
//! ```text
//!   V_{g,n}(L) = sum_d  [tau_d]_{g,n} / (4^{|d|} prod (2 d_i + 1)!) * prod L_i^{2 d_i}
//! ```
//!
//! (the `x_i = L_i / 2` substitution is baked in, so evaluation happens at
//! boundary lengths `L`, not `2x`). Pure volumes `V_g` are ingested as `n = 0`
//! records. A signature may be ingested either completely (every `d` with
//! `|d| <= 3g-3+n`, enabling the full polynomial) or as its `d = 0` record
//! alone (constant only, enough for ratio/partition sweeps).
//!
//! The module also hosts the numerical validators for the volume estimates
//! used downstream: the bracket/volume inequality, the `e^x` bound, the
//! sinh-ratio comparison, two-boundary trading ratios, the leading-order
//! factorial-growth fit, and bounded partition sums.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exact::{BoundaryPoly, PiSquarePoly, Rat};
use crate::hp::{eval_pipoly, HpReal};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VolumeError {
    Unstable { g: u32, n: u32 },
    DegreeBound { g: u32, n: u32, d: Vec<u32> },
    DimensionMismatch { n: u32, d_len: usize },
    WrongPiExponent { expected: u32, got: u32 },
    NonPositiveValue,
    MissingProvenance,
    Duplicate { g: u32, n: u32, d: Vec<u32> },
    IncompleteSignature { g: u32, n: u32, present: usize, expected: usize },
    MissingData { g: u32, n: u32 },
    NotFullyIngested { g: u32, n: u32 },
    LengthCount { expected: usize, got: usize },
    InsufficientSweep { needed: usize, got: usize },
    CoverageGap { missing: Vec<(u32, u32)> },
    BadPartition,
}

impl fmt::Display for VolumeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use VolumeError::*;
        match self {
            Unstable { g, n } => write!(f, "unstable signature ({g},{n})"),
            DegreeBound { g, n, d } => write!(f, "degree bound violated for ({g},{n}), d={d:?}"),
            DimensionMismatch { n, d_len } => {
                write!(f, "exponent vector has {d_len} entries for n={n}")
            }
            WrongPiExponent { expected, got } => {
                write!(f, "wrong pi exponent: expected {expected}, got {got}")
            }
            NonPositiveValue => write!(f, "record value must be strictly positive"),
            MissingProvenance => write!(f, "record has no provenance sources"),
            Duplicate { g, n, d } => write!(f, "duplicate record ({g},{n}), d={d:?}"),
            IncompleteSignature { g, n, present, expected } => write!(
                f,
                "incomplete signature ({g},{n}): {present} of {expected} records (full) and not constant-only"
            ),
            MissingData { g, n } => write!(f, "no data for signature ({g},{n})"),
            NotFullyIngested { g, n } => {
                write!(f, "signature ({g},{n}) is ingested as a constant only")
            }
            LengthCount { expected, got } => {
                write!(f, "expected {expected} boundary lengths, got {got}")
            }
            InsufficientSweep { needed, got } => {
                write!(f, "sweep needs at least {needed} genera, table has {got}")
            }
            CoverageGap { missing } => write!(f, "missing signatures: {missing:?}"),
            BadPartition => write!(f, "partition parts must be >= 1 with even total"),
        }
    }
}

impl core::error::Error for VolumeError {}

/// Stable signature of a bordered moduli space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct VolumeSignature {
    pub g: u32,
    pub n: u32,
}

impl VolumeSignature {
    pub fn new(g: u32, n: u32) -> Result<Self, VolumeError> {
        if 2 * (g as i64) - 2 + (n as i64) <= 0 {
            return Err(VolumeError::Unstable { g, n });
        }
        Ok(Self { g, n })
    }

    pub fn complex_dimension(&self) -> u32 {
        3 * self.g - 3 + self.n
    }
}

/// One parsed dataset line before table validation.
#[derive(Debug, Clone)]
pub struct RawRecord {
    pub g: u32,
    pub n: u32,
    pub d: Vec<u32>,
    pub num: BigInt,
    pub den: BigInt,
    pub pi_exp: u32,
    pub src: Vec<String>,
}

#[derive(Debug, Clone)]
struct SignatureData {
    /// sorted-descending exponent vector -> rational part of the bracket
    records: BTreeMap<Vec<u32>, Rat>,
    sources: BTreeSet<String>,
    full: bool,
}

/// Validated, immutable intersection dataset.
#[derive(Debug, Clone)]
pub struct IntersectionTable {
    data: BTreeMap<(u32, u32), SignatureData>,
}

#[derive(Debug, Default)]
pub struct TableBuilder {
    data: BTreeMap<(u32, u32), SignatureData>,
}

impl TableBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, rec: RawRecord) -> Result<(), VolumeError> {
        let RawRecord { g, n, mut d, num, den, pi_exp, src } = rec;
        if n == 0 {
            if g < 2 {
                return Err(VolumeError::Unstable { g, n });
            }
        } else {
            VolumeSignature::new(g, n)?;
        }
        if d.len() != n as usize {
            return Err(VolumeError::DimensionMismatch { n, d_len: d.len() });
        }
        let dim = 3 * g as i64 - 3 + n as i64;
        let total: i64 = d.iter().map(|&x| x as i64).sum();
        if total > dim {
            return Err(VolumeError::DegreeBound { g, n, d });
        }
        let expected_exp = (dim - total) as u32;
        if pi_exp != expected_exp {
            return Err(VolumeError::WrongPiExponent { expected: expected_exp, got: pi_exp });
        }
        if num.is_zero() || num.is_negative() || den.is_zero() || den.is_negative() {
            return Err(VolumeError::NonPositiveValue);
        }
        if src.is_empty() {
            return Err(VolumeError::MissingProvenance);
        }
        d.sort_unstable_by(|a, b| b.cmp(a));
        let entry = self.data.entry((g, n)).or_insert_with(|| SignatureData {
            records: BTreeMap::new(),
            sources: BTreeSet::new(),
            full: false,
        });
        if entry.records.contains_key(&d) {
            return Err(VolumeError::Duplicate { g, n, d });
        }
        entry.records.insert(d, Rat::new(num, den));
        entry.sources.extend(src);
        Ok(())
    }

    /// Per-signature completeness: every sorted exponent vector up to the
    /// dimension bound (full), or exactly the `d = 0` record (constant-only).
    pub fn finish(self) -> Result<IntersectionTable, VolumeError> {
        let mut data = self.data;
        for (&(g, n), sig) in data.iter_mut() {
            let expected = count_sorted_vectors(n as usize, 3 * g as usize + n as usize - 3);
            if sig.records.len() == expected {
                sig.full = true;
            } else if sig.records.len() == 1
                && sig.records.contains_key(&alloc::vec![0u32; n as usize])
            {
                sig.full = n == 0;
            } else {
                return Err(VolumeError::IncompleteSignature {
                    g,
                    n,
                    present: sig.records.len(),
                    expected,
                });
            }
        }
        Ok(IntersectionTable { data })
    }
}

/// Number of sorted-descending vectors of length `n` with sum <= `dmax`:
/// partitions of every `m <= dmax` into at most `n` parts (counted via the
/// conjugate form, largest part <= n).
fn count_sorted_vectors(n: usize, dmax: usize) -> usize {
    fn parts(m: usize, maxpart: usize, memo: &mut BTreeMap<(usize, usize), usize>) -> usize {
        if m == 0 {
            return 1;
        }
        if maxpart == 0 {
            return 0;
        }
        if let Some(&v) = memo.get(&(m, maxpart)) {
            return v;
        }
        let mut tot = 0;
        for first in 1..=m.min(maxpart) {
            tot += parts(m - first, first, memo);
        }
        memo.insert((m, maxpart), tot);
        tot
    }
    let mut memo = BTreeMap::new();
    (0..=dmax).map(|m| parts(m, n, &mut memo)).sum()
}

impl IntersectionTable {
    pub fn signatures(&self) -> impl Iterator<Item = (u32, u32, bool)> + '_ {
        self.data.iter().map(|(&(g, n), s)| (g, n, s.full))
    }

    pub fn sources(&self, g: u32, n: u32) -> Option<&BTreeSet<String>> {
        self.data.get(&(g, n)).map(|s| &s.sources)
    }

    pub fn has_full(&self, g: u32, n: u32) -> bool {
        self.data.get(&(g, n)).map(|s| s.full).unwrap_or(false)
    }

    pub fn has_constant(&self, g: u32, n: u32) -> bool {
        self.data.contains_key(&(g, n))
    }

    fn sig(&self, g: u32, n: u32) -> Result<&SignatureData, VolumeError> {
        self.data.get(&(g, n)).ok_or(VolumeError::MissingData { g, n })
    }

    /// Bracket value for an arbitrary exponent order (lookups permute).
    pub fn bracket(&self, g: u32, n: u32, d: &[u32]) -> Result<PiSquarePoly, VolumeError> {
        let sig = self.sig(g, n)?;
        let mut key = d.to_vec();
        key.sort_unstable_by(|a, b| b.cmp(a));
        let q = sig.records.get(&key).ok_or(VolumeError::MissingData { g, n })?;
        let total: u32 = d.iter().sum();
        Ok(PiSquarePoly::monomial(3 * g + n - 3 - total, q.clone()))
    }

    /// The constant `V_{g,n} = V_{g,n}(0,..,0)`, i.e. the `d = 0` record.
    pub fn volume_constant(&self, g: u32, n: u32) -> Result<PiSquarePoly, VolumeError> {
        let sig = self.sig(g, n)?;
        let key = alloc::vec![0u32; n as usize];
        let q = sig.records.get(&key).ok_or(VolumeError::MissingData { g, n })?;
        Ok(PiSquarePoly::monomial(3 * g + n - 3, q.clone()))
    }

    /// Assemble the volume polynomial in the boundary lengths `L_i`.
    pub fn volume_polynomial(&self, sig: VolumeSignature) -> Result<BoundaryPoly, VolumeError> {
        let (g, n) = (sig.g, sig.n);
        if n == 0 {
            return Err(VolumeError::LengthCount { expected: 1, got: 0 });
        }
        let data = self.sig(g, n)?;
        if !data.full {
            return Err(VolumeError::NotFullyIngested { g, n });
        }
        let dim = (3 * g + n - 3) as usize;
        let mut poly = BoundaryPoly::zero(n as usize);
        fn emit(
            table: &BTreeMap<Vec<u32>, Rat>,
            poly: &mut BoundaryPoly,
            d: &mut Vec<u32>,
            slots: usize,
            budget: usize,
            g: u32,
            n: u32,
        ) {
            if d.len() == slots {
                let mut key = d.clone();
                key.sort_unstable_by(|a, b| b.cmp(a));
                let q = table.get(&key).expect("full signature");
                let total: u32 = d.iter().sum();
                let mut coeff = q.clone();
                for &e in d.iter() {
                    coeff /= Rat::from_integer(factorial(2 * e as u64 + 1));
                }
                coeff /= Rat::from_integer(BigInt::from(4u32).pow(total));
                poly.add_term(d.clone(), PiSquarePoly::monomial(3 * g + n - 3 - total, coeff));
                return;
            }
            for v in 0..=budget {
                d.push(v as u32);
                emit(table, poly, d, slots, budget - v, g, n);
                d.pop();
            }
        }
        let mut d = Vec::new();
        emit(&data.records, &mut poly, &mut d, n as usize, dim, g, n);
        debug_assert_eq!(poly.total_degree(), 3 * g + n - 3);
        Ok(poly)
    }

    /// Evaluate `V_{g,n}(L)` at non-negative real lengths.
    pub fn volume_value(
        &self,
        g: u32,
        n: u32,
        lengths: &[f64],
        digits: u32,
    ) -> Result<HpReal, VolumeError> {
        if lengths.len() != n as usize {
            return Err(VolumeError::LengthCount { expected: n as usize, got: lengths.len() });
        }
        if n == 0 {
            return Ok(eval_pipoly(&self.volume_constant(g, 0)?, digits));
        }
        let poly = self.volume_polynomial(VolumeSignature::new(g, n)?)?;
        let squares: Vec<Rat> = lengths
            .iter()
            .map(|&l| {
                let q = Rat::from_float(l).unwrap_or_else(Rat::zero);
                &q * &q
            })
            .collect();
        Ok(eval_poly_hp(&poly, &squares, digits))
    }
}

/// Evaluate a boundary polynomial at exact squared lengths directly into a
/// high-precision value. Monomials are visited in lexicographic order with a
/// running prefix-product stack, and contributions accumulate per pi-power
/// as scaled integers, so the whole evaluation needs one high-precision
/// multiplication per pi-power rather than per monomial.
pub fn eval_poly_hp(poly: &BoundaryPoly, squares: &[Rat], digits: u32) -> HpReal {
    let scale = digits + crate::hp::GUARD_DIGITS;
    let unit = BigInt::from(10u32).pow(scale);
    let nv = poly.num_vars();
    // per pi-power: (scaled integer sum, rounded-term count)
    let mut acc: alloc::collections::BTreeMap<u32, (BigInt, u64)> = alloc::collections::BTreeMap::new();
    // prefix products: stack[i] = product of squares[j]^{d_j} for j < i
    let mut stack: alloc::vec::Vec<Rat> = alloc::vec![Rat::one(); nv + 1];
    let mut prev: alloc::vec::Vec<u32> = alloc::vec![0; nv];
    let mut first = true;
    for (d, c) in poly.monomials() {
        let common = if first {
            first = false;
            0
        } else {
            prev.iter().zip(d.iter()).take_while(|(a, b)| a == b).count()
        };
        for i in common..nv {
            let mut w = stack[i].clone();
            for _ in 0..d[i] {
                w *= &squares[i];
            }
            stack[i + 1] = w;
        }
        prev.clone_from(d);
        let w = &stack[nv];
        for (k, q) in c.terms() {
            let t = q * w;
            let scaled = (t.numer() * &unit) / t.denom();
            let entry = acc.entry(k).or_insert_with(|| (BigInt::from(0u32), 0));
            entry.0 += scaled;
            entry.1 += 1;
        }
    }
    let pi = HpReal::pi(scale);
    let pi2 = pi.mul(&pi);
    let max_k = acc.keys().max().copied().unwrap_or(0);
    let mut powers = alloc::vec::Vec::with_capacity(max_k as usize + 1);
    let mut cur = HpReal::one(scale);
    for _ in 0..=max_k {
        powers.push(cur.clone());
        cur = cur.mul(&pi2);
    }
    let mut out = HpReal::zero(scale);
    for (k, (sum, count)) in acc {
        let term = HpReal::from_parts(sum, scale, BigInt::from(count));
        out = out.add(&term.mul(&powers[k as usize]));
    }
    out
}

fn factorial(k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=k {
        acc *= BigInt::from(i);
    }
    acc
}

// ---------------------------------------------------------------------------
// validators

/// Result of the exact bracket/volume inequality check on one signature.
#[derive(Debug, Clone)]
pub struct TauBoundReport {
    pub g: u32,
    pub n: u32,
    pub records_checked: usize,
    pub all_hold: bool,
    /// empirical max of g * (1 - [tau_d]/V) / |d|^2 over d != 0
    pub c0_estimate: f64,
}

/// `[tau_d]_{g,n} <= V_{g,n}` exactly for every ingested record, plus the
/// empirical constant for the deficit bound.
pub fn check_tau_bound(table: &IntersectionTable, g: u32, n: u32) -> Result<TauBoundReport, VolumeError> {
    let sig = table.sig(g, n)?;
    let v0 = table.volume_constant(g, n)?;
    let (_, v0q) = v0.as_positive_monomial().ok_or(VolumeError::NonPositiveValue)?;
    let mut c0 = 0.0f64;
    let mut all_hold = true;
    let mut checked = 0usize;
    for (d, q) in &sig.records {
        checked += 1;
        let total: u32 = d.iter().sum();
        if total == 0 {
            continue; // deficit is exactly zero
        }
        // [tau_d] <= V  <=>  q_d <= q_0 * pi^{2|d|}; decided with certified
        // interval bounds (pi transcendental, so separation is guaranteed)
        let mut scale = 40u32;
        let holds = loop {
            let pi = HpReal::pi(scale);
            let pi2 = pi.mul(&pi);
            let mut p = HpReal::one(scale);
            for _ in 0..total {
                p = p.mul(&pi2);
            }
            let rhs = HpReal::from_rat(v0q, scale).mul(&p);
            let lhs = HpReal::from_rat(q, scale);
            if lhs.definitely_lt(&rhs) {
                break true;
            }
            if rhs.definitely_lt(&lhs) {
                break false;
            }
            scale += 40;
            assert!(scale < 400, "tau bound comparison failed to separate");
        };
        if !holds {
            all_hold = false;
        }
        // numeric deficit for the c0 estimate
        let pi2 = core::f64::consts::PI * core::f64::consts::PI;
        let ratio = rat_to_f64(q) / (rat_to_f64(v0q) * libm::pow(pi2, total as f64));
        let deficit = g as f64 * (1.0 - ratio) / ((total as f64) * (total as f64));
        if deficit > c0 {
            c0 = deficit;
        }
    }
    Ok(TauBoundReport { g, n, records_checked: checked, all_hold, c0_estimate: c0 })
}

fn rat_to_f64(q: &Rat) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone)]
pub struct ExpBoundReport {
    pub g: u32,
    pub n: u32,
    pub samples: usize,
    pub holds: bool,
    pub max_ratio: f64,
}

/// `V_{g,n}(2x) <= e^{sum x_i} V_{g,n}` on the given sample points, with the
/// evaluation error bounds folded into the comparison.
pub fn exp_bound_check(
    table: &IntersectionTable,
    g: u32,
    n: u32,
    samples: &[Vec<f64>],
) -> Result<ExpBoundReport, VolumeError> {
    let sig = VolumeSignature::new(g, n)?;
    let poly = table.volume_polynomial(sig)?;
    let v0 = eval_pipoly(&table.volume_constant(g, n)?, 40);
    let scale_digits = 40u32;
    let mut holds = true;
    let mut max_ratio = 0.0f64;
    for x in samples {
        if x.len() != n as usize {
            return Err(VolumeError::LengthCount { expected: n as usize, got: x.len() });
        }
        // V(2x): squared lengths (2 x_i)^2 = 4 x_i^2, exact from f64
        let squares: Vec<Rat> = x
            .iter()
            .map(|&xi| {
                let q = Rat::from_float(xi).unwrap_or_else(Rat::zero);
                &(&q * &q) * &Rat::from_integer(BigInt::from(4u32))
            })
            .collect();
        let val = eval_poly_hp(&poly, &squares, scale_digits);
        let sum: f64 = x.iter().sum();
        let s = HpReal::from_f64(sum, scale_digits + crate::hp::GUARD_DIGITS).unwrap();
        let bound = s.exp().mul(&v0);
        let ratio = val.to_f64() / bound.to_f64();
        if ratio > max_ratio {
            max_ratio = ratio;
        }
        if !(val.definitely_lt(&bound) || val.within(&bound, &tol_hp(scale_digits))) {
            holds = false;
        }
    }
    Ok(ExpBoundReport { g, n, samples: samples.len(), holds, max_ratio })
}

fn tol_hp(digits: u32) -> HpReal {
    let scale = digits + crate::hp::GUARD_DIGITS;
    let q = Rat::new(BigInt::one(), BigInt::from(10u32).pow(digits.saturating_sub(5)));
    HpReal::from_rat(&q, scale)
}

#[derive(Debug, Clone)]
pub struct SinhRatioReport {
    pub g: u32,
    pub n: u32,
    pub ratio: f64,
    pub predicted: f64,
    pub residual_times_g: f64,
}

/// Compare `V_{g,n}(2x)/V_{g,n}` against `prod sinh(x_i)/x_i`; the residual
/// scaled by `g / prod x_i` stays bounded along a genus sweep.
pub fn sinh_ratio_report(
    table: &IntersectionTable,
    g: u32,
    n: u32,
    x: &[f64],
) -> Result<SinhRatioReport, VolumeError> {
    let digits = 40u32;
    let scale = digits + crate::hp::GUARD_DIGITS;
    let sig = VolumeSignature::new(g, n)?;
    let poly = table.volume_polynomial(sig)?;
    if x.len() != n as usize {
        return Err(VolumeError::LengthCount { expected: n as usize, got: x.len() });
    }
    let squares: Vec<Rat> = x
        .iter()
        .map(|&xi| {
            let q = Rat::from_float(xi).unwrap_or_else(Rat::zero);
            &(&q * &q) * &Rat::from_integer(BigInt::from(4u32))
        })
        .collect();
    let num = eval_poly_hp(&poly, &squares, digits);
    let den = eval_pipoly(&table.volume_constant(g, n)?, digits);
    let ratio = num.div(&den).to_f64();
    let mut predicted = 1.0f64;
    let mut prod_x = 1.0f64;
    for &xi in x {
        let xi_hp = HpReal::from_f64(xi, scale).unwrap();
        predicted *= xi_hp.sinh().to_f64() / xi;
        prod_x *= xi;
    }
    let residual_times_g = g as f64 * libm::fabs(ratio / predicted - 1.0) / prod_x;
    Ok(SinhRatioReport { g, n, ratio, predicted, residual_times_g })
}

#[derive(Debug, Clone)]
pub struct RatioPoint {
    pub g: u32,
    pub ratio: f64,
    pub predicted: f64,
    pub residual_times_g2: f64,
}

/// `V_{g-1,n+2} / V_{g,n}` against `1 + (3-2n)/(pi^2 g)`; the deviation
/// times `g^2` stays bounded over the ingested range.
pub fn ratio_sequence(table: &IntersectionTable, n: u32) -> Result<Vec<RatioPoint>, VolumeError> {
    let digits = 40u32;
    let mut out = Vec::new();
    for g in 1..=64u32 {
        if !(table.has_constant(g, n) && g >= 1 && table.has_constant(g - 1, n + 2)) {
            continue;
        }
        if n == 0 && g < 2 {
            continue;
        }
        let va = eval_pipoly(&table.volume_constant(g - 1, n + 2)?, digits);
        let vb = eval_pipoly(&table.volume_constant(g, n)?, digits);
        let ratio = va.div(&vb).to_f64();
        let pi2 = core::f64::consts::PI * core::f64::consts::PI;
        let predicted = 1.0 + (3.0 - 2.0 * n as f64) / (pi2 * g as f64);
        let residual_times_g2 = (ratio - predicted) * (g as f64) * (g as f64);
        out.push(RatioPoint { g, ratio, predicted, residual_times_g2 });
    }
    if out.len() < 3 {
        return Err(VolumeError::InsufficientSweep { needed: 3, got: out.len() });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct AlphaFitReport {
    /// `(g, a_g)` with `a_g = V_g sqrt(g) / ((2g-3)! (4 pi^2)^{2g-3})`
    pub estimates: Vec<(u32, f64)>,
    /// successive differences `|a_{g+1} - a_g|`
    pub diffs: Vec<f64>,
    pub diffs_decreasing: bool,
    /// `V_{g+1}/V_g / ((2g-1)(2g-2)(4 pi^2)^2 sqrt(g/(g+1))) - 1`, one per step
    pub consecutive_ratio_residuals: Vec<f64>,
}

/// Fit of the leading factorial growth of the closed-surface volumes.
pub fn alpha_fit(table: &IntersectionTable) -> Result<AlphaFitReport, VolumeError> {
    let digits = 60u32;
    let scale = digits + crate::hp::GUARD_DIGITS;
    let mut estimates: Vec<(u32, f64)> = Vec::new();
    for g in 2..=64u32 {
        if !table.has_constant(g, 0) {
            continue;
        }
        let v = eval_pipoly(&table.volume_constant(g, 0)?, digits);
        // a_g = V_g sqrt(g) / ((2g-3)! (4 pi^2)^{2g-3})
        let pi = HpReal::pi(scale);
        let four_pi2 = pi.mul(&pi).mul_i64(4);
        let mut denom = HpReal::from_rat(&Rat::from_integer(factorial(2 * g as u64 - 3)), scale);
        for _ in 0..(2 * g - 3) {
            denom = denom.mul(&four_pi2);
        }
        let a = v
            .mul(&HpReal::from_int(g as i64, scale).sqrt())
            .div(&denom)
            .to_f64();
        estimates.push((g, a));
    }
    if estimates.len() < 3 {
        return Err(VolumeError::InsufficientSweep { needed: 3, got: estimates.len() });
    }
    let diffs: Vec<f64> = estimates.windows(2).map(|w| libm::fabs(w[1].1 - w[0].1)).collect();
    let diffs_decreasing = diffs.windows(2).all(|w| w[1] < w[0]);
    // consecutive-ratio residuals against the factorial-growth prediction
    let mut resid = Vec::new();
    for w in estimates.windows(2) {
        let (g, _) = w[0];
        let vg = eval_pipoly(&table.volume_constant(g, 0)?, digits).to_f64();
        let vg1 = eval_pipoly(&table.volume_constant(g + 1, 0)?, digits).to_f64();
        let pi2 = core::f64::consts::PI * core::f64::consts::PI;
        let pred = (2.0 * g as f64 - 1.0)
            * (2.0 * g as f64 - 2.0)
            * (4.0 * pi2)
            * (4.0 * pi2)
            * libm::sqrt(g as f64 / (g as f64 + 1.0));
        resid.push(vg1 / vg / pred - 1.0);
    }
    Ok(AlphaFitReport {
        estimates,
        diffs,
        diffs_decreasing,
        consecutive_ratio_residuals: resid,
    })
}

#[derive(Debug, Clone)]
pub struct PartitionSumReport {
    pub g: u32,
    pub parts: Vec<u32>,
    /// exact sum over admissible genus assignments of the volume products
    pub exact_sum: PiSquarePoly,
    pub terms: usize,
    /// evaluated `sum * g^{q-1} / V_g`
    pub normalized: f64,
}

/// Exact sum over genus multisets `{g_i}` with `sum g_i = g + q - K - 1` and
/// stability `2 g_i - 3 + n_i >= 0`, of `prod V_{g_i, n_i}`.
pub fn partition_sum(
    table: &IntersectionTable,
    g: u32,
    parts: &[u32],
) -> Result<PartitionSumReport, VolumeError> {
    let q = parts.len();
    let total_n: u32 = parts.iter().sum();
    if q == 0 || parts.contains(&0) || !total_n.is_multiple_of(2) {
        return Err(VolumeError::BadPartition);
    }
    let k = total_n / 2;
    let target = g as i64 + q as i64 - k as i64 - 1;
    if target < 0 {
        return Err(VolumeError::BadPartition);
    }
    // canonical assignments: genus non-decreasing within groups of equal n
    let mut sorted_parts: Vec<u32> = parts.to_vec();
    sorted_parts.sort_unstable();
    let mut missing: BTreeSet<(u32, u32)> = BTreeSet::new();
    let mut sum = PiSquarePoly::zero();
    let mut terms = 0usize;
    let mut assignment = alloc::vec![0u32; q];
    enumerate_assignments(
        table,
        &sorted_parts,
        0,
        target,
        &mut assignment,
        &mut sum,
        &mut terms,
        &mut missing,
    );
    if !missing.is_empty() {
        return Err(VolumeError::CoverageGap { missing: missing.into_iter().collect() });
    }
    let digits = 40u32;
    let v_sum = eval_pipoly(&sum, digits);
    let v_g = eval_pipoly(&table.volume_constant(g, 0)?, digits);
    let mut normalized = v_sum.div(&v_g).to_f64();
    for _ in 1..q {
        normalized *= g as f64;
    }
    Ok(PartitionSumReport { g, parts: parts.to_vec(), exact_sum: sum, terms, normalized })
}

#[allow(clippy::too_many_arguments)]
fn enumerate_assignments(
    table: &IntersectionTable,
    parts: &[u32],
    idx: usize,
    remaining: i64,
    assignment: &mut Vec<u32>,
    sum: &mut PiSquarePoly,
    terms: &mut usize,
    missing: &mut BTreeSet<(u32, u32)>,
) {
    if idx == parts.len() {
        if remaining != 0 {
            return;
        }
        let mut product = PiSquarePoly::one();
        let mut ok = true;
        for (i, &n_i) in parts.iter().enumerate() {
            match table.volume_constant(assignment[i], n_i) {
                Ok(v) => product = &product * &v,
                Err(_) => {
                    missing.insert((assignment[i], n_i));
                    ok = false;
                }
            }
        }
        if ok {
            *sum = &*sum + &product;
            *terms += 1;
        }
        return;
    }
    let n_i = parts[idx];
    // stability 2 g_i - 3 + n_i >= 0
    let gmin_stab = if n_i >= 3 { 0 } else { (4 - n_i) / 2 } as i64;
    // canonical ordering within equal-n groups
    let gmin_order = if idx > 0 && parts[idx - 1] == n_i { assignment[idx - 1] as i64 } else { 0 };
    let gmin = gmin_stab.max(gmin_order);
    for gi in gmin..=remaining {
        assignment[idx] = gi as u32;
        enumerate_assignments(table, parts, idx + 1, remaining - gi, assignment, sum, terms, missing);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn rec(g: u32, n: u32, d: &[u32], num: i64, den: i64, pi_exp: u32) -> RawRecord {
        RawRecord {
            g,
            n,
            d: d.to_vec(),
            num: BigInt::from(num),
            den: BigInt::from(den),
            pi_exp,
            src: vec!["test".to_string(), "test2".to_string()],
        }
    }

    fn mini_table() -> IntersectionTable {
        let mut b = TableBuilder::new();
        b.insert(rec(0, 3, &[0, 0, 0], 1, 1, 0)).unwrap();
        b.insert(rec(1, 1, &[0], 1, 6, 1)).unwrap();
        b.insert(rec(1, 1, &[1], 1, 1, 0)).unwrap();
        // constants for partition sweeps
        b.insert(rec(2, 1, &[0], 29, 192, 4)).unwrap();
        b.insert(rec(3, 0, &[], 176557, 1209600, 6)).unwrap();
        b.finish().unwrap()
    }

    #[test]
    fn three_holed_sphere_is_constant_one() {
        let t = mini_table();
        let p = t.volume_polynomial(VolumeSignature::new(0, 3).unwrap()).unwrap();
        assert_eq!(p.total_degree(), 0);
        let v = t.volume_value(0, 3, &[1.0, 2.5, 7.0], 20).unwrap();
        assert_eq!(v.to_f64(), 1.0);
    }

    #[test]
    fn one_holed_torus_polynomial() {
        // V_{1,1}(L) = (L^2 + 4 pi^2)/24
        let t = mini_table();
        let p = t.volume_polynomial(VolumeSignature::new(1, 1).unwrap()).unwrap();
        assert_eq!(p.total_degree(), 1);
        let c0 = t.volume_constant(1, 1).unwrap();
        assert_eq!(c0.to_string(), "1/6*pi^2");
        // L^2 coefficient: [tau_1]/(4 * 3!) = 1/24
        let want = PiSquarePoly::monomial(0, Rat::new(BigInt::from(1), BigInt::from(24)));
        let got = p
            .monomials()
            .find(|(d, _)| d.as_slice() == [1])
            .map(|(_, c)| c.clone())
            .unwrap();
        assert_eq!(got, want);
        // V_{1,1}(0) = pi^2/6 = 1.6449...
        let v = t.volume_value(1, 1, &[0.0], 30).unwrap();
        assert!((v.to_f64() - 1.6449340668482264).abs() < 1e-14);
    }

    #[test]
    fn degree_bound_violation_rejected() {
        let mut b = TableBuilder::new();
        let e = b.insert(rec(1, 1, &[4], 1, 1, 0)).unwrap_err();
        assert!(matches!(e, VolumeError::DegreeBound { .. }));
    }

    #[test]
    fn duplicate_rejected_even_when_permuted() {
        let mut b = TableBuilder::new();
        b.insert(rec(0, 4, &[1, 0, 0, 0], 12, 1, 0)).unwrap();
        let e = b.insert(rec(0, 4, &[0, 0, 1, 0], 12, 1, 0)).unwrap_err();
        assert!(matches!(e, VolumeError::Duplicate { .. }));
    }

    #[test]
    fn wrong_pi_exponent_rejected() {
        let mut b = TableBuilder::new();
        let e = b.insert(rec(1, 1, &[0], 1, 6, 2)).unwrap_err();
        assert!(matches!(e, VolumeError::WrongPiExponent { expected: 1, got: 2 }));
    }

    #[test]
    fn non_positive_and_unsourced_rejected() {
        let mut b = TableBuilder::new();
        assert!(matches!(
            b.insert(rec(1, 1, &[0], -1, 6, 1)).unwrap_err(),
            VolumeError::NonPositiveValue
        ));
        let mut r = rec(1, 1, &[0], 1, 6, 1);
        r.src.clear();
        assert!(matches!(b.insert(r).unwrap_err(), VolumeError::MissingProvenance));
    }

    #[test]
    fn incomplete_signature_rejected() {
        let mut b = TableBuilder::new();
        b.insert(rec(1, 1, &[1], 1, 1, 0)).unwrap(); // d=(1) without d=(0)
        assert!(matches!(
            b.finish().unwrap_err(),
            VolumeError::IncompleteSignature { g: 1, n: 1, .. }
        ));
    }

    #[test]
    fn constant_only_signature_accepted_but_not_full() {
        let t = mini_table();
        assert!(t.has_constant(2, 1));
        assert!(!t.has_full(2, 1));
        let e = t.volume_polynomial(VolumeSignature::new(2, 1).unwrap()).unwrap_err();
        assert!(matches!(e, VolumeError::NotFullyIngested { g: 2, n: 1 }));
    }

    #[test]
    fn tau_bound_on_one_holed_torus() {
        let t = mini_table();
        let r = check_tau_bound(&t, 1, 1).unwrap();
        assert!(r.all_hold);
        assert_eq!(r.records_checked, 2);
        // deficit at d=(1): 1*(1 - 1/(pi^2/6))/1 = 0.39207...
        assert!((r.c0_estimate - 0.392_073).abs() < 1e-4);
    }

    #[test]
    fn exp_bound_on_one_holed_torus() {
        let t = mini_table();
        // x = 1: V(2)/V = (4+4pi^2)/(4pi^2) = 1.1013 <= e
        let r = exp_bound_check(&t, 1, 1, &[vec![0.0], vec![1.0], vec![3.0]]).unwrap();
        assert!(r.holds);
        assert!(r.max_ratio <= 1.0 + 1e-12);
    }

    #[test]
    fn sinh_ratio_on_one_holed_torus() {
        let t = mini_table();
        let r = sinh_ratio_report(&t, 1, 1, &[1.0]).unwrap();
        assert!((r.ratio - 1.101_321_183_642_337_9).abs() < 1e-12);
        assert!((r.predicted - 1.175_201_193_643_801_4).abs() < 1e-12);
    }

    #[test]
    fn partition_sum_multiset_dedup() {
        // g=3, parts (1,1): assignments {1,2} counted once -> V_{1,1} V_{2,1}
        let t = mini_table();
        let r = partition_sum(&t, 3, &[1, 1]).unwrap();
        assert_eq!(r.terms, 1);
        let want = &PiSquarePoly::monomial(1, Rat::new(BigInt::from(1), BigInt::from(6)))
            * &PiSquarePoly::monomial(4, Rat::new(BigInt::from(29), BigInt::from(192)));
        assert_eq!(r.exact_sum, want);
    }

    #[test]
    fn partition_sum_reports_missing_signatures() {
        let t = mini_table();
        let e = partition_sum(&t, 5, &[1, 1]).unwrap_err();
        match e {
            VolumeError::CoverageGap { missing } => {
                assert!(missing.contains(&(4, 1)) || missing.contains(&(3, 1)));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
