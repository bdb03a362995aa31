//! Pochhammer symbols, log-Gamma, and pole-aware Gamma-product ratios.
//!
//! `gamma_ratio` implements the bracket convention
//! `Γ[a1,a2,…/b1,b2,…] = Γ(a1)Γ(a2)… / (Γ(b1)Γ(b2)…)` with nonpositive
//! integer arguments resolved by pairing numerator poles against denominator
//! poles: `lim Γ(-n+ε)/Γ(-k+ε) = (-1)^(n-k) k!/n!`. An unpaired numerator
//! pole yields an `Infinite` signed-log, an unpaired denominator pole a
//! `Zero` one.

use crate::scalar::{nonpos_int_order, Scalar};
use crate::signed_log::SignedLog;

/// Rising factorial (a)_m = a (a+1) … (a+m-1).
///
/// Returns exactly 0 when `a` is a nonpositive integer `-n` with `n < m`.
pub fn pochhammer(a: Scalar, m: u64) -> Scalar {
    if let Some(n) = nonpos_int_order(a) {
        if n < m {
            return Scalar::new(0.0, 0.0);
        }
    }
    let mut out = Scalar::new(1.0, 0.0);
    for j in 0..m {
        out *= a + Scalar::new(j as f64, 0.0);
    }
    out
}

/// Product of rising factorials (a1, a2, …)_m = (a1)_m (a2)_m …
pub fn pochhammer_multi(params: &[Scalar], m: u64) -> Scalar {
    params
        .iter()
        .map(|&a| pochhammer(a, m))
        .product()
}

// Lanczos approximation, g = 7, 9 coefficients. Relative accuracy is a few
// ulps on the positive real axis, comfortably inside the 1e-13 target.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn lanczos_series(z: Scalar) -> Scalar {
    // expects Re(z) >= 0.5; series argument is z - 1
    let zm1 = z - 1.0;
    let mut acc = Scalar::new(LANCZOS_COEFFS[0], 0.0);
    for (k, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += Scalar::new(c, 0.0) / (zm1 + k as f64);
    }
    acc
}

/// ln Γ(z) for Re(z) >= 0.5, principal determination.
fn ln_gamma_right(z: Scalar) -> Scalar {
    let zm1 = z - 1.0;
    let t = zm1 + LANCZOS_G + 0.5;
    (zm1 + 0.5) * t.ln() - t + LN_SQRT_2PI + lanczos_series(z).ln()
}

/// sin(pi x) for real x with argument reduction, so accuracy is retained
/// near the zeros.
fn sin_pi_real(x: f64) -> f64 {
    let k = x.round();
    let r = x - k;
    let s = (std::f64::consts::PI * r).sin();
    if (k as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

fn sin_pi_complex(z: Scalar) -> Scalar {
    if z.im == 0.0 {
        return Scalar::new(sin_pi_real(z.re), 0.0);
    }
    let k = z.re.round();
    let r = Scalar::new(z.re - k, z.im);
    let s = (r * std::f64::consts::PI).sin();
    if (k as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

/// Γ(z) as a signed-log value.
///
/// `Infinite` iff `z` is a nonpositive integer; negative non-integer
/// arguments go through the reflection formula. For real `z` the phase is an
/// exact ±1.
pub fn log_gamma(z: Scalar) -> SignedLog {
    if nonpos_int_order(z).is_some() {
        return SignedLog::infinite();
    }
    if z.im == 0.0 {
        let x = z.re;
        if x >= 0.5 {
            return SignedLog::from_log_sign(ln_gamma_right(Scalar::new(x, 0.0)).re, 1.0);
        }
        // Γ(x) = pi / (sin(pi x) Γ(1-x))
        let s = sin_pi_real(x);
        let log_abs =
            std::f64::consts::PI.ln() - s.abs().ln() - ln_gamma_right(Scalar::new(1.0 - x, 0.0)).re;
        return SignedLog::from_log_sign(log_abs, s.signum());
    }
    if z.re >= 0.5 {
        let w = ln_gamma_right(z);
        return SignedLog::from_log(w.re, Scalar::new(w.im.cos(), w.im.sin()));
    }
    let pi = SignedLog::from_scalar(Scalar::new(std::f64::consts::PI, 0.0));
    let s = SignedLog::from_scalar(sin_pi_complex(z));
    let g = log_gamma(Scalar::new(1.0, 0.0) - z);
    pi / (s * g)
}

/// ln n! via ln Γ(n+1).
fn ln_factorial(n: u64) -> f64 {
    ln_gamma_right(Scalar::new(n as f64 + 1.0, 0.0)).re
}

/// Γ(a1)Γ(a2)… / (Γ(b1)Γ(b2)…) with pole pairing.
///
/// Numerator and denominator arguments sitting at nonpositive integers are
/// paired greedily by ascending pole order and each pair contributes the
/// limit ratio `(-1)^(n-k) k!/n!`. The value depends only on the multiset of
/// pole orders, not on the pairing order.
pub fn gamma_ratio(numerators: &[Scalar], denominators: &[Scalar]) -> SignedLog {
    let mut num_poles: Vec<u64> = Vec::new();
    let mut den_poles: Vec<u64> = Vec::new();
    let mut acc = SignedLog::one();

    for &a in numerators {
        match nonpos_int_order(a) {
            Some(n) => num_poles.push(n),
            None => acc *= log_gamma(a),
        }
    }
    for &b in denominators {
        match nonpos_int_order(b) {
            Some(k) => den_poles.push(k),
            None => acc *= log_gamma(b).recip(),
        }
    }

    num_poles.sort_unstable();
    den_poles.sort_unstable();
    if num_poles.len() > den_poles.len() {
        return SignedLog::infinite();
    }
    let zero_out = den_poles.len() > num_poles.len();
    for (&n, &k) in num_poles.iter().zip(den_poles.iter()) {
        let sign = if (n + k) % 2 == 0 { 1.0 } else { -1.0 };
        acc *= SignedLog::from_log_sign(ln_factorial(k) - ln_factorial(n), sign);
    }
    if zero_out {
        return SignedLog::zero();
    }
    acc
}

/// Beta function B(x, y) = Γ[x, y / x+y].
pub fn beta(x: Scalar, y: Scalar) -> SignedLog {
    gamma_ratio(&[x, y], &[x + y])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::re;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(re(7.25), 0), re(1.0));
        assert_eq!(pochhammer(re(2.0), 3), re(24.0));
        assert_eq!(pochhammer(re(-3.0), 5), re(0.0));
        assert_eq!(pochhammer(re(-3.0), 2), re(6.0));
    }

    #[test]
    fn pochhammer_multi_values() {
        assert_eq!(pochhammer_multi(&[re(1.5), re(2.0), re(-4.0)], 0), re(1.0));
        // brute force: (1)_2 = 2 for each factor, product 2^3
        let direct: Scalar = (0..3).map(|_| re(1.0) * re(2.0)).product();
        assert_eq!(pochhammer_multi(&[re(1.0), re(1.0), re(1.0)], 2), direct);
        assert_eq!(pochhammer_multi(&[re(1.0), re(1.0), re(1.0)], 2), re(8.0));
        assert_eq!(pochhammer_multi(&[re(2.0), re(-1.0)], 3), re(0.0));
    }

    #[test]
    fn log_gamma_at_small_integers_and_poles() {
        let g1 = log_gamma(re(1.0));
        assert_eq!(g1.phase(), re(1.0));
        assert!(g1.log_abs().abs() < 1e-14);
        assert_relative_eq!(
            log_gamma(re(5.0)).to_scalar().unwrap().re,
            24.0,
            max_relative = 1e-13
        );
        assert!(log_gamma(re(-2.0)).is_infinite());
        assert!(log_gamma(re(0.0)).is_infinite());
    }

    #[test]
    fn log_gamma_positive_axis_accuracy() {
        // Γ(0.5) = sqrt(pi), Γ(1.5) = sqrt(pi)/2, Γ(170) finite near the top
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert_relative_eq!(
            log_gamma(re(0.5)).to_scalar().unwrap().re,
            sqrt_pi,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            log_gamma(re(1.5)).to_scalar().unwrap().re,
            sqrt_pi / 2.0,
            max_relative = 1e-13
        );
        let mut ln_fact = 0.0;
        for n in 1..=169u64 {
            ln_fact += (n as f64).ln();
        }
        assert_relative_eq!(log_gamma(re(170.0)).log_abs(), ln_fact, max_relative = 1e-13);
    }

    #[test]
    fn log_gamma_half_integer_sweep() {
        // Γ(n + 1/2) = (2n)! sqrt(pi) / (4^n n!) and Γ(n) = (n-1)! give an
        // exact oracle across [0.5, 170]
        use num::bigint::BigInt;
        use num::rational::BigRational;
        use num::ToPrimitive;
        let factorial = |n: u64| -> BigInt { (1..=n).map(BigInt::from).product() };
        for n in 0..170u64 {
            // integer points
            if n >= 1 {
                let expected = BigRational::from_integer(factorial(n - 1));
                let got = log_gamma(re(n as f64)).log_abs();
                let want = expected.to_f64().unwrap().ln();
                assert!(
                    (got - want).abs() <= 1e-13 * (1.0 + want.abs()),
                    "Gamma({n}) log mismatch: {got} vs {want}"
                );
            }
            // half-integer points
            let ratio = BigRational::new(
                factorial(2 * n),
                factorial(n) * BigInt::from(4u64).pow(n as u32),
            );
            let want = ratio.to_f64().unwrap().ln() + 0.5 * std::f64::consts::PI.ln();
            let got = log_gamma(re(n as f64 + 0.5)).log_abs();
            assert!(
                (got - want).abs() <= 1e-13 * (1.0 + want.abs()),
                "Gamma({n}.5) log mismatch: {got} vs {want}"
            );
        }
    }

    #[test]
    fn log_gamma_reflection() {
        // Γ(-0.5) = -2 sqrt(pi)
        let v = log_gamma(re(-0.5)).to_scalar().unwrap();
        assert_relative_eq!(v.re, -2.0 * std::f64::consts::PI.sqrt(), max_relative = 1e-12);
        // Γ(-1.5) = 4 sqrt(pi) / 3
        let v = log_gamma(re(-1.5)).to_scalar().unwrap();
        assert_relative_eq!(
            v.re,
            4.0 * std::f64::consts::PI.sqrt() / 3.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn log_gamma_complex_conjugate_symmetry() {
        let z = Scalar::new(2.5, 1.25);
        let g = log_gamma(z);
        let gc = log_gamma(z.conj());
        assert_relative_eq!(g.log_abs(), gc.log_abs(), max_relative = 1e-13);
        assert_relative_eq!(g.phase().re, gc.phase().re, epsilon = 1e-13);
        assert_relative_eq!(g.phase().im, -gc.phase().im, epsilon = 1e-13);
    }

    #[test]
    fn gamma_ratio_plain_values() {
        let one = gamma_ratio(&[re(3.75)], &[re(3.75)]);
        assert_relative_eq!(one.to_scalar().unwrap().re, 1.0, max_relative = 1e-13);
        // Γ(3)Γ(2)/Γ(4) = 2/6
        let v = gamma_ratio(&[re(3.0), re(2.0)], &[re(4.0)]);
        assert_relative_eq!(v.to_scalar().unwrap().re, 1.0 / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn gamma_ratio_pole_handling() {
        assert!(gamma_ratio(&[re(1.0)], &[re(-2.0)]).is_zero());
        assert!(gamma_ratio(&[re(-2.0)], &[re(1.0)]).is_infinite());
        // paired poles: lim Γ(-2+e)/Γ(-3+e) = (-1)^(2-3) 3!/2! = -3
        let v = gamma_ratio(&[re(-2.0)], &[re(-3.0)]).to_scalar().unwrap();
        assert_relative_eq!(v.re, -3.0, max_relative = 1e-12);
    }

    #[test]
    fn gamma_ratio_pole_limit_matches_perturbed_evaluation() {
        let eps = 1e-7;
        for (n, k) in [(2u64, 3u64), (0, 1), (1, 4), (3, 3), (4, 2)] {
            let exact = gamma_ratio(&[re(-(n as f64))], &[re(-(k as f64))])
                .to_scalar()
                .unwrap();
            let perturbed =
                (log_gamma(re(-(n as f64) + eps)) / log_gamma(re(-(k as f64) + eps)))
                    .to_scalar()
                    .unwrap();
            assert_relative_eq!(exact.re, perturbed.re, max_relative = 1e-4);
        }
    }

    #[test]
    fn gamma_ratio_pairing_depends_only_on_pole_multiset() {
        // two poles on each side in both orders
        let a = gamma_ratio(&[re(-1.0), re(-4.0)], &[re(-2.0), re(-3.0)]);
        let b = gamma_ratio(&[re(-4.0), re(-1.0)], &[re(-3.0), re(-2.0)]);
        assert_relative_eq!(
            a.to_scalar().unwrap().re,
            b.to_scalar().unwrap().re,
            max_relative = 1e-13
        );
        // (-1)^((1-2)+(4-3)) * 2!/1! * 3!/4! = 1/2
        assert_relative_eq!(a.to_scalar().unwrap().re, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn beta_values() {
        assert_relative_eq!(
            beta(re(1.0), re(1.0)).to_scalar().unwrap().re,
            1.0,
            max_relative = 1e-13
        );
        // B(2,3) = Γ2Γ3/Γ5 = 2/24
        assert_relative_eq!(
            beta(re(2.0), re(3.0)).to_scalar().unwrap().re,
            1.0 / 12.0,
            max_relative = 1e-12
        );
        // B(x,1) = 1/x
        assert_relative_eq!(
            beta(re(4.0), re(1.0)).to_scalar().unwrap().re,
            0.25,
            max_relative = 1e-12
        );
    }

    proptest! {
        // (a)_(m+1) = (a)_m (a+m)
        #[test]
        fn pochhammer_recurrence(
            a_re in -6.0f64..6.0, a_im in -2.0f64..2.0, m in 0u64..30,
        ) {
            let a = Scalar::new(a_re, a_im);
            let lhs = pochhammer(a, m + 1);
            let rhs = pochhammer(a, m) * (a + m as f64);
            prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
        }

        // exp(log Γ(a+m)) = (a)_m exp(log Γ(a))
        #[test]
        fn gamma_shift(
            a_re in 0.5f64..20.0, a_im in -3.0f64..3.0, m in 0u64..20,
        ) {
            let a = Scalar::new(a_re, a_im);
            let lhs = log_gamma(a + m as f64);
            let rhs = SignedLog::from_scalar(pochhammer(a, m)) * log_gamma(a);
            prop_assert!((lhs.log_abs() - rhs.log_abs()).abs() <= 1e-11 * (1.0 + rhs.log_abs().abs()));
            prop_assert!((lhs.phase() - rhs.phase()).norm() <= 1e-11);
        }

        // (x)_m (y)_n / (x+y)_(m+n) = B(x+m, y+n) / B(x, y)
        #[test]
        fn beta_pochhammer_identity(
            x_re in 0.3f64..8.0, x_im in -2.0f64..2.0,
            y_re in 0.3f64..8.0, y_im in -2.0f64..2.0,
            m in 0u64..15, n in 0u64..15,
        ) {
            let x = Scalar::new(x_re, x_im);
            let y = Scalar::new(y_re, y_im);
            let lhs = pochhammer(x, m) * pochhammer(y, n) / pochhammer(x + y, m + n);
            let rhs = (beta(x + m as f64, y + n as f64) / beta(x, y)).to_scalar().unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-11 * (1.0 + rhs.norm()));
        }
    }
}
