//! Property tests: ring axioms, serialization round-trips, split additivity
//! of the exact moment integral, and the cross-oracle agreement between the
//! exact integral and adaptive numerical quadrature.

use num_bigint::BigInt;
use proptest::prelude::*;
use wpspectrum_core::exact::{box_moment_integral, BoundaryPoly, BoxDomain, PiSquarePoly, Rat};
use wpspectrum_core::hp::{eval_pipoly, HpReal};
use wpspectrum_core::quad;

fn arb_rat() -> impl Strategy<Value = Rat> {
    (-200i64..200, 1i64..50).prop_map(|(n, d)| Rat::new(BigInt::from(n), BigInt::from(d)))
}

fn arb_pipoly() -> impl Strategy<Value = PiSquarePoly> {
    proptest::collection::vec((0u32..5, arb_rat()), 0..5).prop_map(|terms| {
        let mut p = PiSquarePoly::zero();
        for (k, q) in terms {
            p = &p + &PiSquarePoly::monomial(k, q);
        }
        p
    })
}

fn arb_poly1(num_terms: usize) -> impl Strategy<Value = BoundaryPoly> {
    proptest::collection::vec((0u32..4, arb_rat()), 1..=num_terms).prop_map(|terms| {
        let mut p = BoundaryPoly::zero(1);
        for (e, q) in terms {
            p.add_term(vec![e], PiSquarePoly::monomial(0, q));
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_associativity_and_distributivity(a in arb_pipoly(), b in arb_pipoly(), c in arb_pipoly()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn no_zero_divisors(a in arb_pipoly(), b in arb_pipoly()) {
        if !a.is_zero() && !b.is_zero() {
            prop_assert!(!(&a * &b).is_zero());
        }
    }

    #[test]
    fn serialization_round_trip(a in arb_pipoly()) {
        let text = a.to_string();
        let back = PiSquarePoly::parse(&text).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn box_split_additivity(p in arb_poly1(4), splits in (1i64..40, 1i64..40, 1i64..40)) {
        // integral over [a, c] = integral over [a, b] + integral over [b, c]
        let (x, y, z) = splits;
        let mut pts = [x, x + y, x + y + z];
        pts.sort_unstable();
        let r = |v: i64| Rat::new(BigInt::from(v), BigInt::from(8));
        let (a, b, c) = (r(pts[0] - 1), r(pts[1]), r(pts[2] + 1));
        let whole = box_moment_integral(&p, &BoxDomain::new(vec![(a.clone(), c.clone())]).unwrap()).unwrap();
        let left = box_moment_integral(&p, &BoxDomain::new(vec![(a, b.clone())]).unwrap()).unwrap();
        let right = box_moment_integral(&p, &BoxDomain::new(vec![(b, c)]).unwrap()).unwrap();
        prop_assert_eq!(whole, &left + &right);
    }

    #[test]
    fn exact_integral_agrees_with_quadrature(p in arb_poly1(3)) {
        // cross-oracle: evaluate the exact box integral against adaptive
        // numerical quadrature of t -> P(t) t, at relative 1e-10
        let dom = BoxDomain::new(vec![(
            Rat::new(BigInt::from(0), BigInt::from(1)),
            Rat::new(BigInt::from(3), BigInt::from(2)),
        )]).unwrap();
        let exact = eval_pipoly(&box_moment_integral(&p, &dom).unwrap(), 30).to_f64();
        let scale = 40;
        let f = |t: &HpReal| {
            let sq = t.mul(t);
            let mut acc = HpReal::zero(scale);
            for (d, c) in p.monomials() {
                let mut term = eval_pipoly_at(c, scale);
                for _ in 0..d[0] {
                    term = term.mul(&sq);
                }
                acc = acc.add(&term);
            }
            acc.mul(t)
        };
        let quad_val = quad::integrate(
            &f,
            &HpReal::zero(scale),
            &HpReal::from_rat(&Rat::new(BigInt::from(3), BigInt::from(2)), scale),
            1e-14,
            12,
            scale,
        ).to_f64();
        let denom = exact.abs().max(1.0);
        prop_assert!((exact - quad_val).abs() / denom < 1e-10,
            "exact {exact} vs quadrature {quad_val}");
    }
}

fn eval_pipoly_at(p: &PiSquarePoly, scale: u32) -> HpReal {
    eval_pipoly(p, scale.saturating_sub(10))
}

#[test]
fn hp_error_bounds_honest_on_random_inputs() {
    // compare 20-digit against 60-digit evaluations of assorted expressions
    for k in 1..6u32 {
        let p = PiSquarePoly::monomial(k, Rat::new(BigInt::from(17 * k as i64), BigInt::from(13)));
        let lo = eval_pipoly(&p, 20);
        let hi = eval_pipoly(&p, 60);
        let diff = (lo.to_f64() - hi.to_f64()).abs();
        assert!(diff <= lo.guaranteed_abs_error() + hi.guaranteed_abs_error() + 1e-25);
    }
}
