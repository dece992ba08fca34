//! Exact finite-genus expected counts and joint factorial moments of simple
//! closed geodesics.
//!
//! The joint factorial moment of counts in disjoint length windows equals,
//! for the simple-and-disjoint part, a sum over multicurve orbits:
//!
//! ```text
//!   E[Y_{g,r_1..r_k}] = (1/V_g) sum_orbits 2^{-M} int_A V_g(orbit, x) x_1..x_K dx
//! ```
//!
//! with `A` the product box assigning interval `j` to its `r_j` curve slots
//! and `V_g(orbit, x)` the product of complement volume polynomials with the
//! slot length substituted into each incident boundary. Everything up to the
//! final division by `V_g` stays in Q[pi^2]; `exact` fields carry that
//! numerator. Tuples whose curves intersect are not counted here; the guard
//! flag records whether the computed part provably dominates in `1/g`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::exact::{box_moment_integral, BoundaryPoly, BoxDomain, ExactError, PiSquarePoly, Rat};
use crate::hp::{eval_pipoly, HpReal};
use crate::limits;
use crate::topology::{self, StableSplitting, TopologyError};
use crate::volumes::{IntersectionTable, VolumeError, VolumeSignature};

#[derive(Debug, Clone, PartialEq)]
pub enum MomentError {
    Volume(VolumeError),
    Topology(TopologyError),
    Exact(ExactError),
    BadSpec(String),
    NonseparatingAbsent { g: u32, k: u32 },
    Precondition(String),
}

impl fmt::Display for MomentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MomentError::Volume(e) => write!(f, "volume data: {e}"),
            MomentError::Topology(e) => write!(f, "orbit enumeration: {e}"),
            MomentError::Exact(e) => write!(f, "exact arithmetic: {e}"),
            MomentError::BadSpec(s) => write!(f, "bad interval spec: {s}"),
            MomentError::NonseparatingAbsent { g, k } => {
                write!(f, "no non-separating orbit for g={g}, K={k}")
            }
            MomentError::Precondition(s) => write!(f, "precondition failed: {s}"),
        }
    }
}

impl core::error::Error for MomentError {}

impl From<VolumeError> for MomentError {
    fn from(e: VolumeError) -> Self {
        MomentError::Volume(e)
    }
}
impl From<TopologyError> for MomentError {
    fn from(e: TopologyError) -> Self {
        MomentError::Topology(e)
    }
}
impl From<ExactError> for MomentError {
    fn from(e: ExactError) -> Self {
        MomentError::Exact(e)
    }
}

/// Disjoint rational intervals with tuple orders; `K = sum r_i` curve slots.
#[derive(Debug, Clone)]
pub struct IntervalSpec {
    intervals: Vec<(Rat, Rat)>,
    orders: Vec<u32>,
}

impl IntervalSpec {
    pub fn new(intervals: Vec<(Rat, Rat)>, orders: Vec<u32>) -> Result<Self, MomentError> {
        if intervals.is_empty() || intervals.len() != orders.len() {
            return Err(MomentError::BadSpec(String::from(
                "need one order per interval, at least one interval",
            )));
        }
        if orders.contains(&0) {
            return Err(MomentError::BadSpec(String::from("orders must be >= 1")));
        }
        for (a, b) in &intervals {
            if a.is_negative() || b <= a {
                return Err(MomentError::BadSpec(String::from("need 0 <= a < b")));
            }
        }
        let mut sorted = intervals.clone();
        sorted.sort_by(|x, y| x.0.cmp(&y.0));
        for w in sorted.windows(2) {
            if w[1].0 < w[0].1 {
                return Err(MomentError::BadSpec(String::from("intervals overlap")));
            }
        }
        let k: u32 = orders.iter().sum();
        if k > topology::MAX_K {
            return Err(MomentError::BadSpec(format!(
                "total order {k} exceeds supported cap {}",
                topology::MAX_K
            )));
        }
        Ok(Self { intervals, orders })
    }

    pub fn single(a: Rat, b: Rat) -> Result<Self, MomentError> {
        Self::new(alloc::vec![(a, b)], alloc::vec![1])
    }

    pub fn total_order(&self) -> u32 {
        self.orders.iter().sum()
    }

    pub fn intervals(&self) -> &[(Rat, Rat)] {
        &self.intervals
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    /// Interval (by group index) assigned to each of the K ordered slots.
    fn slot_intervals(&self) -> Vec<(Rat, Rat)> {
        let mut out = Vec::new();
        for (iv, &r) in self.intervals.iter().zip(&self.orders) {
            for _ in 0..r {
                out.push(iv.clone());
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct OrbitContribution {
    pub orbit: StableSplitting,
    pub orbit_id: String,
    pub m_gamma: u32,
    pub is_nonseparating: bool,
    /// `2^{-M} int_A V(orbit, x) x dx`, before division by `V_g`
    pub exact: PiSquarePoly,
}

#[derive(Debug, Clone)]
pub struct MomentResult {
    pub g: u32,
    /// numerator `V_g * E[Y]` in Q[pi^2]
    pub exact: PiSquarePoly,
    /// the closed-surface volume `V_g` used as denominator
    pub volume: PiSquarePoly,
    /// `exact / V_g` evaluated
    pub value: HpReal,
    pub per_orbit: Vec<OrbitContribution>,
    /// product of window masses `prod lambda_j^{r_j}` (the large-genus limit)
    pub limit_prediction: f64,
    /// true when the simple-tuple moment provably dominates up to O(1/g)
    pub within_simple_regime: bool,
}

impl MomentResult {
    pub fn value_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

/// `E[N_{g,[a,b]}]` for simple closed geodesics, exact orbit sum.
pub fn expected_simple_count(
    table: &IntersectionTable,
    g: u32,
    a: Rat,
    b: Rat,
    digits: u32,
) -> Result<MomentResult, MomentError> {
    joint_factorial_moment(table, g, &IntervalSpec::single(a, b)?, digits)
}

/// Joint factorial moment of the window counts (simple, disjoint tuples).
pub fn joint_factorial_moment(
    table: &IntersectionTable,
    g: u32,
    spec: &IntervalSpec,
    digits: u32,
) -> Result<MomentResult, MomentError> {
    if g < 2 {
        return Err(MomentError::Precondition(String::from("need a closed surface, g >= 2")));
    }
    let k = spec.total_order();
    let orbits = topology::enumerate_orbits(g, k)?;
    let slot_intervals = spec.slot_intervals();
    let domain = BoxDomain::new(slot_intervals).map_err(MomentError::Exact)?;

    // check coverage first so the error lists every missing signature at once
    let mut missing: Vec<(u32, u32)> = Vec::new();
    for (s, _) in &orbits {
        for &(gi, ni) in &s.vertices {
            if !table.has_full(gi, ni) && !missing.contains(&(gi, ni)) {
                missing.push((gi, ni));
            }
        }
    }
    if !missing.is_empty() {
        missing.sort_unstable();
        return Err(MomentError::Volume(VolumeError::CoverageGap { missing }));
    }

    let mut per_orbit = Vec::new();
    let mut total = PiSquarePoly::zero();
    for (s, inv) in &orbits {
        let product = orbit_volume_product(table, s, k as usize)?;
        let integral = box_moment_integral(&product, &domain)?;
        let weight = Rat::new(BigInt::one(), BigInt::from(2u32).pow(inv.m_gamma));
        let exact = integral.scale(&weight);
        total = &total + &exact;
        per_orbit.push(OrbitContribution {
            orbit: s.clone(),
            orbit_id: orbit_id(s),
            m_gamma: inv.m_gamma,
            is_nonseparating: inv.is_nonseparating_type,
            exact,
        });
    }

    let volume = table.volume_constant(g, 0)?;
    let value = eval_pipoly(&total, digits).div(&eval_pipoly(&volume, digits));
    let mut limit_prediction = 1.0;
    for ((a, b), &r) in spec.intervals().iter().zip(spec.orders()) {
        let lam = limits::lambda_f64(rat_f64(a), rat_f64(b));
        for _ in 0..r {
            limit_prediction *= lam;
        }
    }
    let within_simple_regime = simple_regime_guard(g, spec);
    Ok(MomentResult {
        g,
        exact: total,
        volume,
        value,
        per_orbit,
        limit_prediction,
        within_simple_regime,
    })
}

/// Product of complement volume polynomials in the K slot variables.
fn orbit_volume_product(
    table: &IntersectionTable,
    s: &StableSplitting,
    k: usize,
) -> Result<BoundaryPoly, MomentError> {
    let mut product = BoundaryPoly::constant(k, PiSquarePoly::one());
    for (vi, &(gi, ni)) in s.vertices.iter().enumerate() {
        let poly = table.volume_polynomial(VolumeSignature::new(gi, ni)?)?;
        // boundary slots of this piece, in edge order (loops appear twice)
        let mut slots: Vec<usize> = Vec::with_capacity(ni as usize);
        for (t, &(a, b)) in s.edges.iter().enumerate() {
            if a == vi {
                slots.push(t);
            }
            if b == vi {
                slots.push(t);
            }
        }
        debug_assert_eq!(slots.len(), ni as usize);
        product = product.mul(&poly.map_vars(k, &slots));
    }
    Ok(product)
}

fn orbit_id(s: &StableSplitting) -> String {
    use core::fmt::Write;
    let mut out = String::from("v");
    for (gi, ni) in &s.vertices {
        let _ = write!(out, "({gi},{ni})");
    }
    out.push_str(";e");
    for (a, b) in &s.edges {
        let _ = write!(out, "({a},{b})");
    }
    out
}

fn rat_f64(q: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone)]
pub struct DominantSplit {
    pub dominant_exact: PiSquarePoly,
    pub separating_exact: PiSquarePoly,
    /// `dominant / V_g`
    pub dominant_value: f64,
    /// `(sum of separating contributions) / V_g`
    pub separating_value: f64,
    /// `g * separating_value`, the normalized remainder
    pub separating_times_g: f64,
}

/// Split a moment into the non-separating orbit's term and the rest.
pub fn dominant_split(result: &MomentResult) -> Result<DominantSplit, MomentError> {
    let k: u32 = result
        .per_orbit
        .first()
        .map(|c| c.orbit.num_curves() as u32)
        .unwrap_or(0);
    let dominant: Vec<&OrbitContribution> =
        result.per_orbit.iter().filter(|c| c.is_nonseparating).collect();
    if dominant.is_empty() {
        return Err(MomentError::NonseparatingAbsent { g: result.g, k });
    }
    let dominant_exact = dominant[0].exact.clone();
    let mut separating_exact = PiSquarePoly::zero();
    for c in &result.per_orbit {
        if !c.is_nonseparating {
            separating_exact = &separating_exact + &c.exact;
        }
    }
    let digits = 40;
    let vg = eval_pipoly(&result.volume, digits);
    let dominant_value = eval_pipoly(&dominant_exact, digits).div(&vg).to_f64();
    let separating_value = if separating_exact.is_zero() {
        0.0
    } else {
        eval_pipoly(&separating_exact, digits).div(&vg).to_f64()
    };
    Ok(DominantSplit {
        dominant_exact,
        separating_exact,
        dominant_value,
        separating_value,
        separating_times_g: result.g as f64 * separating_value,
    })
}

/// True when `sum_i r_i b_i < pi sqrt(g(g-1))`: below the filling threshold
/// the non-simple remainder is `O(1/g)` and the simple-tuple moment is the
/// dominant part of the full factorial moment.
pub fn simple_regime_guard(g: u32, spec: &IntervalSpec) -> bool {
    let mut total = 0.0;
    for ((_, b), &r) in spec.intervals().iter().zip(spec.orders()) {
        total += r as f64 * rat_f64(b);
    }
    total < 0.5 * topology::filling_length_bound(g)
}

#[derive(Debug, Clone)]
pub struct SystoleTailBound {
    pub g: u32,
    pub c: f64,
    /// rigorous second-moment upper bound for `P[no simple curve below c]`
    pub bound: f64,
    pub mean: f64,
    pub second_factorial: f64,
}

/// The second-moment upper bound
/// `P[N = 0] <= (E[(N)_2] + E[N] - E[N]^2) / (E[(N)_2] + E[N])`
/// evaluated with the exact simple-tuple moments on `[0, c]`.
pub fn systole_tail_bound(
    table: &IntersectionTable,
    g: u32,
    c: Rat,
    digits: u32,
) -> Result<SystoleTailBound, MomentError> {
    let c_f64 = rat_f64(&c);
    if c_f64 >= topology::buser_systole_bound(g) {
        return Err(MomentError::Precondition(format!(
            "c = {c_f64} is not below the systole bound {}",
            topology::buser_systole_bound(g)
        )));
    }
    let pair_spec = IntervalSpec::new(alloc::vec![(Rat::zero(), c.clone())], alloc::vec![2])?;
    if !simple_regime_guard(g, &pair_spec) {
        return Err(MomentError::Precondition(format!(
            "2c = {} reaches the filling threshold {}",
            2.0 * c_f64,
            0.5 * topology::filling_length_bound(g)
        )));
    }
    let e1 = expected_simple_count(table, g, Rat::zero(), c.clone(), digits)?;
    let e2 = joint_factorial_moment(table, g, &pair_spec, digits)?;
    let scale = digits + crate::hp::GUARD_DIGITS;
    let m1 = e1.value.clone();
    let m2 = e2.value.clone();
    let sq = m1.mul(&m1);
    let denom = m2.add(&m1);
    let bound = denom.sub(&sq).div(&denom);
    // same bound through the variance form 1 - E^2/(E[(N)_2] + E[N])
    let alt = HpReal::one(scale).sub(&sq.div(&denom));
    debug_assert!(libm::fabs(bound.to_f64() - alt.to_f64()) < 1e-12);
    Ok(SystoleTailBound {
        g,
        c: c_f64,
        bound: bound.to_f64(),
        mean: m1.to_f64(),
        second_factorial: m2.to_f64(),
    })
}

/// `lambda_[0,c] e^{-c/2}`: positive and eventually increasing, witnessing
/// the exponential growth of the window mass.
pub fn lambda_tail_growth(c: f64) -> f64 {
    limits::lambda_f64(0.0, c) * libm::exp(-c / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn rec(g: u32, n: u32, d: &[u32], num: i64, den: i64, pi_exp: u32) -> crate::volumes::RawRecord {
        crate::volumes::RawRecord {
            g,
            n,
            d: d.to_vec(),
            num: BigInt::from(num),
            den: BigInt::from(den),
            pi_exp,
            src: vec!["test".to_string()],
        }
    }

    /// Everything needed for K <= 2 moments at g = 2.
    fn g2_table() -> IntersectionTable {
        let mut b = crate::volumes::TableBuilder::new();
        for r in [
            rec(0, 3, &[0, 0, 0], 1, 1, 0),
            rec(0, 4, &[0, 0, 0, 0], 2, 1, 1),
            rec(0, 4, &[1, 0, 0, 0], 12, 1, 0),
            rec(1, 1, &[0], 1, 6, 1),
            rec(1, 1, &[1], 1, 1, 0),
            rec(1, 2, &[0, 0], 1, 4, 2),
            rec(1, 2, &[1, 0], 2, 1, 1),
            rec(1, 2, &[1, 1], 6, 1, 0),
            rec(1, 2, &[2, 0], 10, 1, 0),
            rec(2, 0, &[], 43, 2160, 3),
        ] {
            b.insert(r).unwrap();
        }
        b.finish().unwrap()
    }

    fn q(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn genus_two_expected_count_closed_form() {
        // hand-derived: V_2 E[N_{2,[0,1]}] = 25/6912 + 25/576 pi^2 + 19/144 pi^4
        let t = g2_table();
        let r = expected_simple_count(&t, 2, Rat::zero(), q(1, 1), 30).unwrap();
        let want = &(&PiSquarePoly::monomial(0, q(25, 6912))
            + &PiSquarePoly::monomial(1, q(25, 576)))
            + &PiSquarePoly::monomial(2, q(19, 144));
        assert_eq!(r.exact, want);
        assert_eq!(r.per_orbit.len(), 2);
        // value = exact / V_2 ~ 0.694118; limit lambda_[0,1] ~ 0.521303
        assert!((r.value_f64() - 0.694_118_59).abs() < 1e-6);
        assert!((r.limit_prediction - 0.521_302_552_157_35).abs() < 1e-12);
        assert!(r.within_simple_regime);
    }

    #[test]
    fn genus_two_pair_moment_closed_form() {
        // hand-derived: V_2 E[(N)_2 on [0,1]] = 13/24 pi^2 + 49/192
        let t = g2_table();
        let spec = IntervalSpec::new(vec![(Rat::zero(), q(1, 1))], vec![2]).unwrap();
        let r = joint_factorial_moment(&t, 2, &spec, 30).unwrap();
        let want = &PiSquarePoly::monomial(0, q(49, 192)) + &PiSquarePoly::monomial(1, q(13, 24));
        assert_eq!(r.exact, want);
        // three ordered orbits: (0,4) plus two labelings of (0,3)+(1,1)
        assert_eq!(r.per_orbit.len(), 3);
    }

    #[test]
    fn joint_with_k1_matches_expected_count_exactly() {
        let t = g2_table();
        let a = q(1, 2);
        let b = q(7, 4);
        let via_expected = expected_simple_count(&t, 2, a.clone(), b.clone(), 25).unwrap();
        let via_joint = joint_factorial_moment(
            &t,
            2,
            &IntervalSpec::new(vec![(a, b)], vec![1]).unwrap(),
            25,
        )
        .unwrap();
        assert_eq!(via_expected.exact, via_joint.exact);
    }

    #[test]
    fn interval_additivity_is_exact() {
        let t = g2_table();
        let whole = expected_simple_count(&t, 2, Rat::zero(), q(2, 1), 25).unwrap();
        let left = expected_simple_count(&t, 2, Rat::zero(), q(3, 4), 25).unwrap();
        let right = expected_simple_count(&t, 2, q(3, 4), q(2, 1), 25).unwrap();
        assert_eq!(whole.exact, &left.exact + &right.exact);
    }

    #[test]
    fn per_orbit_contributions_positive() {
        let t = g2_table();
        let r = expected_simple_count(&t, 2, q(1, 10), q(3, 2), 25).unwrap();
        for c in &r.per_orbit {
            assert!(c.exact.all_coeffs_positive(), "orbit {}", c.orbit_id);
        }
    }

    #[test]
    fn dominant_split_g2() {
        let t = g2_table();
        let r = expected_simple_count(&t, 2, Rat::zero(), q(1, 1), 25).unwrap();
        let split = dominant_split(&r).unwrap();
        // dominant = int_0^1 V_{1,2}(t,t) t dt = 1/288 + pi^2/24 + pi^4/8
        let want = &(&PiSquarePoly::monomial(0, q(1, 288)) + &PiSquarePoly::monomial(1, q(1, 24)))
            + &PiSquarePoly::monomial(2, q(1, 8));
        assert_eq!(split.dominant_exact, want);
        assert!(split.separating_value > 0.0);
        assert!((split.dominant_value + split.separating_value - r.value_f64()).abs() < 1e-10);
    }

    #[test]
    fn regime_guard_thresholds() {
        let spec1 = IntervalSpec::single(Rat::zero(), q(1, 1)).unwrap();
        assert!(simple_regime_guard(2, &spec1)); // 1 < pi sqrt(2) ~ 4.44
        let spec5 = IntervalSpec::single(Rat::zero(), q(5, 1)).unwrap();
        assert!(!simple_regime_guard(2, &spec5)); // 5 > 4.44
        assert!(simple_regime_guard(12, &spec5));
    }

    #[test]
    fn systole_tail_bound_g2() {
        let t = g2_table();
        let r = systole_tail_bound(&t, 2, q(1, 1), 30).unwrap();
        assert!(r.bound > 0.0 && r.bound < 1.0);
        // must upper-bound the limiting zero-probability up to O(1/g) slack
        let limit = libm::exp(-limits::lambda_f64(0.0, 1.0));
        assert!(r.bound > limit - 0.25, "bound {} vs limit {}", r.bound, limit);
        // shrinking window: bound goes vacuous (to 1)
        let r_small = systole_tail_bound(&t, 2, q(1, 100), 30).unwrap();
        assert!(r_small.bound > 0.99);
        assert!(r_small.bound > r.bound);
    }

    #[test]
    fn systole_tail_bound_preconditions() {
        let t = g2_table();
        // c above the Buser bound for g=2 (2 log 6 ~ 3.58)
        assert!(matches!(
            systole_tail_bound(&t, 2, q(4, 1), 25),
            Err(MomentError::Precondition(_))
        ));
    }

    #[test]
    fn coverage_gap_reports_missing() {
        let mut b = crate::volumes::TableBuilder::new();
        b.insert(rec(2, 0, &[], 43, 2160, 3)).unwrap();
        b.insert(rec(1, 1, &[0], 1, 6, 1)).unwrap();
        b.insert(rec(1, 1, &[1], 1, 1, 0)).unwrap();
        let t = b.finish().unwrap();
        let e = expected_simple_count(&t, 2, Rat::zero(), q(1, 1), 25).unwrap_err();
        match e {
            MomentError::Volume(VolumeError::CoverageGap { missing }) => {
                assert_eq!(missing, vec![(1, 2)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn lambda_tail_growth_behaviour() {
        assert!(lambda_tail_growth(0.0) == 0.0);
        assert!(lambda_tail_growth(2.0) > 0.5);
        for c in [30, 35, 40, 45] {
            let c = c as f64 / 10.0;
            assert!(lambda_tail_growth(c + 0.5) > lambda_tail_growth(c));
        }
    }
}
