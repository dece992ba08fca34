//! High-precision composite Gauss-Legendre quadrature.
//!
//! Nodes and weights are produced at the working scale by Newton iteration
//! on the Legendre polynomial from f64 seeds. Integration doubles the panel
//! count until two successive refinements agree to the requested tolerance;
//! the final gap is folded into the result's error bound.

use alloc::vec::Vec;

use crate::hp::HpReal;

/// Legendre P_n and its derivative at `x`, by the three-term recurrence.
fn legendre(n: u32, x: &HpReal, scale: u32) -> (HpReal, HpReal) {
    let mut p0 = HpReal::one(scale);
    let mut p1 = x.clone();
    if n == 0 {
        let d = HpReal::zero(scale);
        return (p0, d);
    }
    for k in 1..n {
        // (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}
        let a = x.mul(&p1).mul_i64(2 * k as i64 + 1);
        let b = p0.mul_i64(k as i64);
        let next = a.sub(&b).div_u32(k + 1);
        p0 = p1;
        p1 = next;
    }
    // P'_n = n (x P_n - P_{n-1}) / (x^2 - 1)
    let num = x.mul(&p1).sub(&p0).mul_i64(n as i64);
    let den = x.mul(x).sub(&HpReal::one(scale));
    (p1.clone(), num.div(&den))
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(order: u32, scale: u32) -> Vec<(HpReal, HpReal)> {
    let mut out = Vec::with_capacity(order as usize);
    for i in 1..=order {
        // Tricomi-style seed, then Newton at full precision
        let seed = libm::cos(
            core::f64::consts::PI * (i as f64 - 0.25) / (order as f64 + 0.5),
        );
        let mut x = HpReal::from_f64(seed, scale).unwrap();
        for _ in 0..(3 + 64 - (scale as u64).leading_zeros()) {
            let (p, dp) = legendre(order, &x, scale);
            x = x.sub(&p.div(&dp));
        }
        let (_, dp) = legendre(order, &x, scale);
        let one = HpReal::one(scale);
        let w = HpReal::from_int(2, scale)
            .div(&one.sub(&x.mul(&x)).mul(&dp).mul(&dp));
        out.push((x, w));
    }
    out
}

/// Integrate `f` over `[a, b]`, doubling panels until two refinements agree
/// within `tol` (absolute, as f64); panics if 2^14 panels do not suffice.
pub fn integrate<F: Fn(&HpReal) -> HpReal>(
    f: &F,
    a: &HpReal,
    b: &HpReal,
    tol: f64,
    order: u32,
    scale: u32,
) -> HpReal {
    let rule = gauss_legendre(order, scale);
    let mut panels = 4usize;
    let mut prev = composite(f, a, b, panels, &rule, scale);
    loop {
        panels *= 2;
        let next = composite(f, a, b, panels, &rule, scale);
        let gap = libm::fabs(next.sub(&prev).to_f64());
        if gap < tol {
            return next;
        }
        assert!(panels < (1 << 14), "quadrature failed to reach tolerance");
        prev = next;
    }
}

fn composite<F: Fn(&HpReal) -> HpReal>(
    f: &F,
    a: &HpReal,
    b: &HpReal,
    panels: usize,
    rule: &[(HpReal, HpReal)],
    scale: u32,
) -> HpReal {
    let width = b.sub(a).div_u32(panels as u32);
    let half = width.div_u32(2);
    let mut acc = HpReal::zero(scale);
    for p in 0..panels {
        let lo = a.add(&width.mul_i64(p as i64));
        let mid = lo.add(&half);
        for (node, weight) in rule {
            let x = mid.add(&half.mul(node));
            acc = acc.add(&weight.mul(&f(&x)));
        }
    }
    acc.mul(&half)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomial_exactly() {
        // int_0^1 x^2 dx = 1/3
        let scale = 40;
        let f = |x: &HpReal| x.mul(x);
        let a = HpReal::zero(scale);
        let b = HpReal::one(scale);
        let v = integrate(&f, &a, &b, 1e-30, 8, scale);
        assert!((v.to_f64() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn integrates_exp() {
        // int_0^1 e^x dx = e - 1
        let scale = 45;
        let f = |x: &HpReal| x.exp();
        let v = integrate(&f, &HpReal::zero(scale), &HpReal::one(scale), 1e-35, 16, scale);
        assert!((v.to_f64() - (core::f64::consts::E - 1.0)).abs() < 1e-14);
    }
}
