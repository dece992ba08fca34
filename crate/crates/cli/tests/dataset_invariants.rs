//! Structural invariants of the bundled dataset: every fully ingested
//! signature yields a symmetric volume polynomial of exactly the right
//! degree with strictly positive coefficients, the constant term agrees
//! with the d = 0 record, and evaluation matches the exact constant.

use wpspectrum_core::hp::eval_pipoly;
use wpspectrum_core::volumes::VolumeSignature;

#[test]
fn full_signatures_yield_valid_polynomials() {
    let table = wpspectrum::resolve_table(None).unwrap();
    let mut checked = 0;
    for (g, n, full) in table.signatures().collect::<Vec<_>>() {
        if !full || n == 0 {
            continue;
        }
        let poly = table.volume_polynomial(VolumeSignature::new(g, n).unwrap()).unwrap();
        assert_eq!(poly.total_degree(), 3 * g + n - 3, "degree at ({g},{n})");
        assert!(poly.is_symmetric(), "symmetry at ({g},{n})");
        for (d, c) in poly.monomials() {
            assert!(c.all_coeffs_positive(), "coefficient sign at ({g},{n}), d={d:?}");
        }
        // constant term = the d = 0 record = V_{g,n}(0)
        let c0 = table.volume_constant(g, n).unwrap();
        let zero_key = vec![0u32; n as usize];
        let const_term = poly
            .monomials()
            .find(|(d, _)| **d == zero_key)
            .map(|(_, c)| c.clone())
            .unwrap();
        assert_eq!(const_term, c0, "constant term at ({g},{n})");
        checked += 1;
    }
    assert!(checked >= 25, "expected at least 25 full signatures, saw {checked}");
}

#[test]
fn volume_value_matches_constant_at_zero() {
    let table = wpspectrum::resolve_table(None).unwrap();
    for (g, n) in [(1u32, 1u32), (2, 2), (3, 1), (5, 2)] {
        let via_poly = table.volume_value(g, n, &vec![0.0; n as usize], 30).unwrap();
        let via_const = eval_pipoly(&table.volume_constant(g, n).unwrap(), 30);
        assert!((via_poly.to_f64() - via_const.to_f64()).abs() < 1e-20 * via_const.to_f64().abs().max(1.0));
    }
    // n = 0 path returns the ingested pure volume
    let v2 = table.volume_value(2, 0, &[], 30).unwrap();
    assert!((v2.to_f64() - 19.138766353582449).abs() < 1e-12);
}

#[test]
fn single_part_partition_is_one_volume() {
    // parts = (2K) forces g_1 = g - K: the sum collapses to V_{g-K, 2K}
    let table = wpspectrum::resolve_table(None).unwrap();
    let rep = wpspectrum_core::volumes::partition_sum(&table, 3, &[2]).unwrap();
    assert_eq!(rep.terms, 1);
    assert_eq!(rep.exact_sum, table.volume_constant(2, 2).unwrap());
}

#[test]
fn pure_volumes_cover_the_sweep_range() {
    let table = wpspectrum::resolve_table(None).unwrap();
    for g in 2..=10u32 {
        assert!(table.has_constant(g, 0), "missing pure volume at g={g}");
        assert!(table.has_constant(g, 1), "missing one-boundary constant at g={g}");
        assert!(table.has_constant(g, 2), "missing two-boundary constant at g={g}");
    }
}
