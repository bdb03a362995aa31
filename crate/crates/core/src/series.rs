//! Generalized hypergeometric pFq series at unit (and sub-unit) argument,
//! plus the classical closed forms and transformations built on them:
//! Gauss, Vandermonde, Dixon, Pfaff-Saalschütz, Euler, terminating-series
//! reversal, and Slater's 3F2 transformation.

use crate::error::EvalError;
use crate::gamma::{gamma_ratio, pochhammer, pochhammer_multi};
use crate::scalar::{nonpos_int_order, CompensatedSum, Scalar, UNIT_ARG_TOL};
use crate::signed_log::SignedLog;

/// Internal stop tolerance used when callers have no stronger preference.
pub const DEFAULT_TOL: f64 = 1e-14;
/// Stagnation guard for single-index series.
pub const DEFAULT_MAX_TERMS: usize = 100_000;

/// Parameters of a pFq(numerators; denominators; argument) series.
///
/// A nonpositive-integer denominator is legal only when the series
/// terminates (some numerator is a nonpositive integer `-N`) at an index no
/// later than the denominator Pochhammer's last nonzero value — the
/// pole-before-termination rule.
#[derive(Debug, Clone, PartialEq)]
pub struct PfqParams {
    pub numerators: Vec<Scalar>,
    pub denominators: Vec<Scalar>,
    pub argument: Scalar,
}

impl PfqParams {
    pub fn new(numerators: Vec<Scalar>, denominators: Vec<Scalar>, argument: Scalar) -> Self {
        PfqParams {
            numerators,
            denominators,
            argument,
        }
    }

    /// Index of the last term when the series terminates.
    pub fn termination(&self) -> Option<u64> {
        self.numerators.iter().copied().filter_map(nonpos_int_order).min()
    }

    /// Checks the pole-before-termination rule for every denominator.
    pub fn check_denominators(&self) -> Result<(), EvalError> {
        let termination = self.termination();
        for &b in &self.denominators {
            if let Some(k) = nonpos_int_order(b) {
                match termination {
                    Some(n) if n <= k => {}
                    _ => {
                        return Err(EvalError::DenominatorPole {
                            param: format!("{b}"),
                            order: k,
                            termination,
                        })
                    }
                }
            }
        }
        Ok(())
    }

    /// Unit-argument convergence margin Re(Σ denominators - Σ numerators),
    /// meaningful for p = q + 1.
    pub fn unit_margin(&self) -> f64 {
        let num: Scalar = self.numerators.iter().sum();
        let den: Scalar = self.denominators.iter().sum();
        (den - num).re
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesStatus {
    /// A numerator parameter is a nonpositive integer; the finite sum was
    /// taken in full and `abs_err` reflects only rounding, not truncation.
    TerminatedExactly,
    /// The stop rule (three consecutive terms below tol·|partial sum|)
    /// triggered.
    Converged,
    /// The sum could not be completed.
    NoConvergence,
}

impl SeriesStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SeriesStatus::TerminatedExactly => "terminated-exactly",
            SeriesStatus::Converged => "converged",
            SeriesStatus::NoConvergence => "no-convergence",
        }
    }
}

/// Result of a series evaluation.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub value: Scalar,
    /// For `Converged` this is the heuristic |last term| · terms², an
    /// estimate rather than a bound; for `TerminatedExactly` it is a
    /// rounding-level estimate.
    pub abs_err: f64,
    pub terms: usize,
    pub status: SeriesStatus,
}

impl SeriesValue {
    pub fn exact(value: Scalar, terms: usize, max_term: f64) -> Self {
        SeriesValue {
            value,
            abs_err: f64::EPSILON * terms as f64 * max_term,
            terms,
            status: SeriesStatus::TerminatedExactly,
        }
    }
}

fn sorted(params: &[Scalar]) -> Vec<Scalar> {
    let mut v = params.to_vec();
    v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    v
}

/// Evaluates pFq by the term-ratio recurrence.
///
/// Terminating series are summed in full. Non-terminating series with
/// p = q + 1 are summed directly for |z| < 1 and, at |z| = 1, only when
/// Re(Σden - Σnum) > 0; summation stops once three consecutive terms fall
/// below `tol·|partial sum|` or errors out at `max_terms`.
pub fn eval_pfq(p: &PfqParams, tol: f64, max_terms: usize) -> Result<SeriesValue, EvalError> {
    p.check_denominators()?;
    // canonical factor order makes the sum invariant under parameter
    // permutations bit-for-bit
    let nums = sorted(&p.numerators);
    let dens = sorted(&p.denominators);
    let z = p.argument;
    let termination = p.termination();

    if termination.is_none() {
        let az = z.norm();
        if nums.len() > dens.len() + 1 {
            return Err(EvalError::no_convergence(
                "series with p > q + 1 diverges unless it terminates",
            ));
        }
        if nums.len() == dens.len() + 1 {
            if az > 1.0 + UNIT_ARG_TOL {
                return Err(EvalError::no_convergence(format!(
                    "argument modulus {az} exceeds the radius of convergence"
                )));
            }
            if (az - 1.0).abs() <= UNIT_ARG_TOL {
                let margin = p.unit_margin();
                if margin <= 0.0 {
                    return Err(EvalError::no_convergence(format!(
                        "unit-argument condition Re(sum(den) - sum(num)) > 0 fails (margin {margin})"
                    )));
                }
            }
        }
    }

    let mut acc = CompensatedSum::new();
    let mut term = Scalar::new(1.0, 0.0);
    let mut max_term = 1.0f64;
    let mut below = 0u32;
    let mut m = 0u64;
    loop {
        acc.add(term);
        if let Some(n) = termination {
            if m == n {
                let value = acc.value();
                return Ok(SeriesValue::exact(value, (n + 1) as usize, max_term));
            }
        }
        let mf = m as f64;
        let mut ratio = z / (mf + 1.0);
        for &a in &nums {
            ratio *= a + mf;
        }
        for &b in &dens {
            ratio /= b + mf;
        }
        term *= ratio;
        m += 1;
        let t = term.norm();
        max_term = max_term.max(t);
        if termination.is_none() {
            let scale = acc.value().norm().max(f64::MIN_POSITIVE);
            if t <= tol * scale {
                below += 1;
                if below >= 3 {
                    acc.add(term);
                    let terms = (m + 1) as usize;
                    return Ok(SeriesValue {
                        value: acc.value(),
                        abs_err: t * (terms as f64).powi(2),
                        terms,
                        status: SeriesStatus::Converged,
                    });
                }
            } else {
                below = 0;
            }
            if m as usize >= max_terms {
                return Err(EvalError::no_convergence(format!(
                    "stop rule not reached after {max_terms} terms"
                )));
            }
        }
    }
}

/// Gauss's theorem: 2F1(a, b; c; 1) = Γ[c, c-a-b / c-a, c-b].
///
/// Valid for Re(c-a-b) > 0 or terminating series; poles surface through the
/// signed-log kind.
pub fn gauss_2f1_unit(a: Scalar, b: Scalar, c: Scalar) -> SignedLog {
    gamma_ratio(&[c, c - a - b], &[c - a, c - b])
}

/// Vandermonde's theorem: 2F1(-N, b; c; 1) = (c-b)_N / (c)_N.
pub fn vandermonde(n: u64, b: Scalar, c: Scalar) -> Result<Scalar, EvalError> {
    let den = pochhammer(c, n);
    if den.norm() == 0.0 {
        return Err(EvalError::DenominatorPole {
            param: format!("{c}"),
            order: nonpos_int_order(c).unwrap_or(0),
            termination: Some(n),
        });
    }
    Ok(pochhammer(c - b, n) / den)
}

/// Dixon's theorem for the well-poised 3F2(a, b, c; 1+a-b, 1+a-c; 1):
/// Γ[1+a/2, 1+a-b, 1+a-c, 1+a/2-b-c / 1+a, 1+a/2-b, 1+a/2-c, 1+a-b-c].
pub fn dixon_3f2(a: Scalar, b: Scalar, c: Scalar) -> SignedLog {
    let one = Scalar::new(1.0, 0.0);
    let ha = a / 2.0;
    gamma_ratio(
        &[one + ha, one + a - b, one + a - c, one + ha - b - c],
        &[one + a, one + ha - b, one + ha - c, one + a - b - c],
    )
}

/// Pfaff-Saalschütz: the Saalschützian terminating
/// 3F2(a, b, -N; c, 1+a+b-c-N; 1) = (c-a)_N (c-b)_N / ((c)_N (c-a-b)_N).
pub fn pfaff_saalschutz(a: Scalar, b: Scalar, n: u64, c: Scalar) -> Result<Scalar, EvalError> {
    let den = pochhammer(c, n) * pochhammer(c - a - b, n);
    if den.norm() == 0.0 {
        return Err(EvalError::DenominatorPole {
            param: format!("(({c})_N (({})_N)", c - a - b),
            order: 0,
            termination: Some(n),
        });
    }
    Ok(pochhammer(c - a, n) * pochhammer(c - b, n) / den)
}

/// Reversal of a terminating series:
/// 4F3(A, B, C, -N; D, E, F; 1) =
///   (-1)^N (A,B,C)_N / (D,E,F)_N ·
///   4F3(1-D-N, 1-E-N, 1-F-N, -N; 1-A-N, 1-B-N, 1-C-N; 1).
///
/// Returns the prefactor together with the reversed parameter set.
pub fn reverse_terminating_4f3(
    a: Scalar,
    b: Scalar,
    c: Scalar,
    n: u64,
    d: Scalar,
    e: Scalar,
    f: Scalar,
) -> Result<(Scalar, PfqParams), EvalError> {
    let den = pochhammer_multi(&[d, e, f], n);
    if den.norm() == 0.0 {
        return Err(EvalError::DenominatorPole {
            param: format!("(({d}), ({e}), ({f}))_N"),
            order: 0,
            termination: Some(n),
        });
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let prefactor = pochhammer_multi(&[a, b, c], n) / den * sign;
    let one = Scalar::new(1.0, 0.0);
    let nn = Scalar::new(n as f64, 0.0);
    let reversed = PfqParams::new(
        vec![one - d - nn, one - e - nn, one - f - nn, -nn],
        vec![one - a - nn, one - b - nn, one - c - nn],
        one,
    );
    Ok((prefactor, reversed))
}

/// Slater's transformation of a terminating 3F2:
/// 3F2(A, B, -N; C, D; 1) = (C-A)_N/(C)_N · 3F2(A, D-B, -N; 1+A-C-N, D; 1).
///
/// The transformed denominator 1+A-C-N may be a nonpositive integer and is
/// still legal under pole-before-termination.
pub fn slater_3f2_transform(
    a: Scalar,
    b: Scalar,
    n: u64,
    c: Scalar,
    d: Scalar,
) -> Result<(Scalar, PfqParams), EvalError> {
    let den = pochhammer(c, n);
    if den.norm() == 0.0 {
        return Err(EvalError::DenominatorPole {
            param: format!("{c}"),
            order: nonpos_int_order(c).unwrap_or(0),
            termination: Some(n),
        });
    }
    let prefactor = pochhammer(c - a, n) / den;
    let one = Scalar::new(1.0, 0.0);
    let nn = Scalar::new(n as f64, 0.0);
    let transformed = PfqParams::new(vec![a, d - b, -nn], vec![one + a - c - nn, d], one);
    Ok((prefactor, transformed))
}

/// Euler's identity for |t| < 1:
/// 2F1(b, c; e; t) = (1-t)^(e-b-c) 2F1(e-b, e-c; e; t).
pub fn euler_2f1_transform(b: Scalar, c: Scalar, e: Scalar, t: Scalar) -> (Scalar, PfqParams) {
    let one = Scalar::new(1.0, 0.0);
    let factor = (one - t).powc(e - b - c);
    (factor, PfqParams::new(vec![e - b, e - c], vec![e], t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;
    use crate::scalar::re;
    use approx::assert_relative_eq;
    use num::BigRational;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn pfq(nums: &[f64], dens: &[f64], z: f64) -> Result<SeriesValue, EvalError> {
        eval_pfq(
            &PfqParams::new(
                nums.iter().map(|&x| re(x)).collect(),
                dens.iter().map(|&x| re(x)).collect(),
                re(z),
            ),
            DEFAULT_TOL,
            DEFAULT_MAX_TERMS,
        )
    }

    #[test]
    fn terminating_sums() {
        // 1 - 2/3 + 1/6
        let v = pfq(&[-2.0, 1.0], &[3.0], 1.0).unwrap();
        assert_eq!(v.status, SeriesStatus::TerminatedExactly);
        assert_eq!(v.terms, 3);
        assert_relative_eq!(v.value.re, 0.5, max_relative = 1e-14);
        // a zero numerator leaves only the m = 0 term
        let v = pfq(&[0.0, 4.5, 2.0], &[3.0, 1.25], 1.0).unwrap();
        assert_eq!(v.value, re(1.0));
    }

    #[test]
    fn unit_argument_telescoping_sum() {
        // sum of 2/((m+1)(m+2)) = 2; the margin here is 1, so the direct
        // sum converges slowly and the truncation shows at the 1e-5 level
        let v = eval_pfq(
            &PfqParams::new(vec![re(1.0), re(1.0)], vec![re(3.0)], re(1.0)),
            1e-10,
            1_000_000,
        )
        .unwrap();
        assert_eq!(v.status, SeriesStatus::Converged);
        assert_relative_eq!(v.value.re, 2.0, max_relative = 1e-4);
        assert!((v.value.re - 2.0).abs() <= v.abs_err);
    }

    #[test]
    fn pole_before_termination() {
        // denominator -2 has pole order 2, termination at N = 1: legal
        let v = pfq(&[1.0, 2.0, -1.0], &[-2.0, 4.0], 1.0).unwrap();
        assert_relative_eq!(v.value.re, 1.25, max_relative = 1e-14);
        // termination at N = 3 is past the pole: rejected
        let err = pfq(&[1.0, 2.0, -3.0], &[-2.0, 4.0], 1.0).unwrap_err();
        assert!(matches!(err, EvalError::DenominatorPole { order: 2, .. }));
        // no termination at all: rejected
        let err = pfq(&[1.0, 2.0], &[-2.0], 0.5).unwrap_err();
        assert!(matches!(err, EvalError::DenominatorPole { .. }));
    }

    #[test]
    fn divergent_unit_argument_is_an_error() {
        let err = pfq(&[3.0, 2.0], &[4.0], 1.0).unwrap_err();
        assert!(matches!(err, EvalError::NoConvergence { .. }));
        let err = pfq(&[1.0, 1.0], &[3.0], 1.5).unwrap_err();
        assert!(matches!(err, EvalError::NoConvergence { .. }));
    }

    #[test]
    fn gauss_matches_series() {
        let v = gauss_2f1_unit(re(-2.0), re(1.0), re(3.0)).to_scalar().unwrap();
        assert_relative_eq!(v.re, 0.5, max_relative = 1e-13);
        let v = gauss_2f1_unit(re(0.0), re(7.5), re(0.25)).to_scalar().unwrap();
        assert_relative_eq!(v.re, 1.0, max_relative = 1e-13);
        let v = gauss_2f1_unit(re(1.0), re(1.0), re(3.0)).to_scalar().unwrap();
        assert_relative_eq!(v.re, 2.0, max_relative = 1e-13);
    }

    #[test]
    fn vandermonde_values() {
        assert_relative_eq!(
            vandermonde(2, re(1.0), re(3.0)).unwrap().re,
            0.5,
            max_relative = 1e-14
        );
        // b = c degenerates to (0)_N / (b)_N = 0
        assert_eq!(vandermonde(3, re(2.5), re(2.5)).unwrap(), re(0.0));
        // N = 1 is the two-term identity 1 - b/c
        assert_relative_eq!(
            vandermonde(1, re(2.0), re(5.0)).unwrap().re,
            0.6,
            max_relative = 1e-14
        );
        assert!(vandermonde(3, re(1.0), re(-2.0)).is_err());
    }

    #[test]
    fn dixon_values() {
        let v = dixon_3f2(re(2.0), re(1.0), re(-1.0)).to_scalar().unwrap();
        assert_relative_eq!(v.re, 0.75, max_relative = 1e-13);
        // c = 0 makes the series 1 and the Gamma arguments cancel pairwise
        let v = dixon_3f2(re(3.25), re(0.75), re(0.0)).to_scalar().unwrap();
        assert_relative_eq!(v.re, 1.0, max_relative = 1e-13);
        // terminating instance, checked against the three-term sum
        let series = pfq(&[2.0, 0.5, -2.0], &[2.5, 5.0], 1.0).unwrap();
        let v = dixon_3f2(re(2.0), re(0.5), re(-2.0)).to_scalar().unwrap();
        assert_relative_eq!(v.re, series.value.re, max_relative = 1e-13);
        assert_relative_eq!(v.re, 6.0 / 7.0, max_relative = 1e-13);
    }

    #[test]
    fn pfaff_saalschutz_values() {
        assert_relative_eq!(
            pfaff_saalschutz(re(1.0), re(1.0), 1, re(3.0)).unwrap().re,
            4.0 / 3.0,
            max_relative = 1e-14
        );
        assert_eq!(
            pfaff_saalschutz(re(0.0), re(2.5), 4, re(3.0)).unwrap(),
            re(1.0)
        );
        // checked against the three-term sum
        let series = pfq(&[2.0, 1.0, -2.0], &[4.0, -2.0], 1.0).unwrap();
        let v = pfaff_saalschutz(re(2.0), re(1.0), 2, re(4.0)).unwrap();
        assert_relative_eq!(v.re, series.value.re, max_relative = 1e-13);
        assert_relative_eq!(v.re, 1.8, max_relative = 1e-13);
    }

    #[test]
    fn reversal_preserves_value() {
        let (pref, rev) = reverse_terminating_4f3(
            re(1.0),
            re(2.0),
            re(3.0),
            1,
            re(4.0),
            re(5.0),
            re(6.0),
        )
        .unwrap();
        let original = pfq(&[1.0, 2.0, 3.0, -1.0], &[4.0, 5.0, 6.0], 1.0).unwrap();
        assert_relative_eq!(original.value.re, 0.95, max_relative = 1e-14);
        let reversed = eval_pfq(&rev, DEFAULT_TOL, DEFAULT_MAX_TERMS).unwrap();
        assert_relative_eq!(
            (pref * reversed.value).re,
            original.value.re,
            max_relative = 1e-13
        );
    }

    #[test]
    fn reversal_is_an_involution() {
        // reversing the reversed series returns the original parameter list
        // exactly, and the two prefactors multiply to 1
        let (a, b, c, n, d, e, f) = (1.25, 2.5, 0.625, 4u64, 3.75, 1.5, 4.125);
        let (pref1, rev) =
            reverse_terminating_4f3(re(a), re(b), re(c), n, re(d), re(e), re(f)).unwrap();
        let (pref2, back) = reverse_terminating_4f3(
            rev.numerators[0],
            rev.numerators[1],
            rev.numerators[2],
            n,
            rev.denominators[0],
            rev.denominators[1],
            rev.denominators[2],
        )
        .unwrap();
        assert_eq!(
            back.numerators,
            vec![re(a), re(b), re(c), re(-(n as f64))]
        );
        assert_eq!(back.denominators, vec![re(d), re(e), re(f)]);
        assert_relative_eq!((pref1 * pref2).re, 1.0, max_relative = 1e-13);
    }

    #[test]
    fn slater_transform_preserves_value() {
        let (pref, transformed) =
            slater_3f2_transform(re(1.0), re(2.0), 1, re(3.0), re(4.0)).unwrap();
        assert_relative_eq!(pref.re, 2.0 / 3.0, max_relative = 1e-14);
        let original = pfq(&[1.0, 2.0, -1.0], &[3.0, 4.0], 1.0).unwrap();
        assert_relative_eq!(original.value.re, 5.0 / 6.0, max_relative = 1e-14);
        let rhs = eval_pfq(&transformed, DEFAULT_TOL, DEFAULT_MAX_TERMS).unwrap();
        assert_relative_eq!(rhs.value.re, 1.25, max_relative = 1e-14);
        assert_relative_eq!((pref * rhs.value).re, original.value.re, max_relative = 1e-13);

        // A = 0: both sides are 1
        let (pref, transformed) =
            slater_3f2_transform(re(0.0), re(2.0), 3, re(3.5), re(4.25)).unwrap();
        let rhs = eval_pfq(&transformed, DEFAULT_TOL, DEFAULT_MAX_TERMS).unwrap();
        assert_relative_eq!((pref * rhs.value).re, 1.0, max_relative = 1e-13);

        // generic rational instance, both sides as finite sums
        let (pref, transformed) =
            slater_3f2_transform(re(0.5), re(1.5), 2, re(3.5), re(2.5)).unwrap();
        let original = pfq(&[0.5, 1.5, -2.0], &[3.5, 2.5], 1.0).unwrap();
        let rhs = eval_pfq(&transformed, DEFAULT_TOL, DEFAULT_MAX_TERMS).unwrap();
        assert_relative_eq!((pref * rhs.value).re, original.value.re, max_relative = 1e-13);
    }

    #[test]
    fn euler_transform_matches_direct_series() {
        // t = 0: both sides 1
        let (factor, t) = euler_2f1_transform(re(1.5), re(0.5), re(2.5), re(0.0));
        let rhs = eval_pfq(&t, DEFAULT_TOL, DEFAULT_MAX_TERMS).unwrap();
        assert_relative_eq!((factor * rhs.value).re, 1.0, max_relative = 1e-14);

        let lhs = pfq(&[1.0, 1.0], &[3.0], 0.5).unwrap();
        let (factor, t) = euler_2f1_transform(re(1.0), re(1.0), re(3.0), re(0.5));
        let rhs = eval_pfq(&t, DEFAULT_TOL, DEFAULT_MAX_TERMS).unwrap();
        assert_relative_eq!((factor * rhs.value).re, lhs.value.re, max_relative = 1e-12);

        // b = e: the left side is the binomial (1-t)^(-c)
        let (factor, t) = euler_2f1_transform(re(3.0), re(1.25), re(3.0), re(0.25));
        let rhs = eval_pfq(&t, DEFAULT_TOL, DEFAULT_MAX_TERMS).unwrap();
        assert_relative_eq!(
            (factor * rhs.value).re,
            0.75f64.powf(-1.25),
            max_relative = 1e-13
        );
    }

    #[test]
    fn reversal_involution_in_exact_arithmetic() {
        // N = 3 with random eighths parameters: reversing twice returns the
        // original value, and the float path matches the rational path
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let draw = |rng: &mut StdRng| rng.gen_range(5..=44) as f64 / 8.0;
            let (a, b, c) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
            let (d, e, f) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
            let n = 3;
            let original =
                pfq(&[a, b, c, -(n as f64)], &[d, e, f], 1.0).unwrap();
            let (pref, rev) = reverse_terminating_4f3(
                re(a),
                re(b),
                re(c),
                n,
                re(d),
                re(e),
                re(f),
            )
            .unwrap();
            // alternating terminating sums can cancel deeply, so the float
            // comparison is absolute at the rounding scale of the terms
            let rev_value = eval_pfq(&rev, DEFAULT_TOL, DEFAULT_MAX_TERMS).unwrap();
            assert!(((pref * rev_value.value).re - original.value.re).abs() <= 1e-12);

            // exact backend agrees term for term
            let q = |x: f64| BigRational::from_float(x).unwrap();
            let lhs = exact::pfq_terminating(
                &[q(a), q(b), q(c), q(-(n as f64))],
                &[q(d), q(e), q(f)],
                &q(1.0),
            )
            .unwrap();
            let rhs_nums: Vec<BigRational> =
                rev.numerators.iter().map(|s| q(s.re)).collect();
            let rhs_dens: Vec<BigRational> =
                rev.denominators.iter().map(|s| q(s.re)).collect();
            let rhs = exact::pfq_terminating(&rhs_nums, &rhs_dens, &q(1.0)).unwrap();
            let pref_exact = exact::reversal_prefactor(
                &[q(a), q(b), q(c)],
                n,
                &[q(d), q(e), q(f)],
            );
            assert_eq!(lhs, pref_exact * rhs);
        }
    }

    #[test]
    fn contiguity_sanity_binomial_case() {
        // 2F1(a, b; b; t) = (1-t)^(-a)
        for &(a, b, t) in &[(0.5, 2.0, 0.5), (1.25, 0.75, -0.5), (3.0, 1.0, 0.25)] {
            let v = pfq(&[a, b], &[b], t).unwrap();
            assert_relative_eq!(v.value.re, (1.0 - t).powf(-a), max_relative = 1e-12);
        }
    }

    proptest! {
        // terminating series: float evaluation equals the exact rational
        // backend to 1e-12 on random eighths parameters
        #[test]
        fn terminating_float_matches_exact(
            ka in -40i64..=40, kb in -40i64..=40, kd in 4i64..=40, ke in 4i64..=40,
            n in 1u64..=8,
        ) {
            let (a, b) = (ka as f64 / 8.0, kb as f64 / 8.0);
            let (d, e) = (kd as f64 / 8.0, ke as f64 / 8.0);
            // skip draws that land on an illegal denominator pole
            let params = PfqParams::new(
                vec![re(a), re(b), re(-(n as f64))],
                vec![re(d), re(e)],
                re(1.0),
            );
            prop_assume!(params.check_denominators().is_ok());
            let float = eval_pfq(&params, DEFAULT_TOL, DEFAULT_MAX_TERMS).unwrap();
            let q = |x: f64| BigRational::from_float(x).unwrap();
            let exact_value = exact::pfq_terminating(
                &[q(a), q(b), q(-(n as f64))],
                &[q(d), q(e)],
                &q(1.0),
            ).unwrap();
            let exact_f = exact::to_f64(&exact_value);
            // abs_err carries the rounding scale of the largest term, which
            // is what cancellation leaves behind
            prop_assert!(
                (float.value.re - exact_f).abs()
                    <= 1e-12 * (1.0 + exact_f.abs()) + 10.0 * float.abs_err
            );
        }

        // gauss closed form equals direct summation on tractable margins
        #[test]
        fn gauss_matches_series_on_samples(
            ka in 4i64..=24, kb in 4i64..=24, margin in 22i64..=48,
        ) {
            let a = ka as f64 / 8.0;
            let b = kb as f64 / 8.0;
            let c = a + b + margin as f64 / 8.0;
            let series = pfq(&[a, b], &[c], 1.0).unwrap();
            let closed = gauss_2f1_unit(re(a), re(b), re(c)).to_scalar().unwrap();
            prop_assert!((series.value.re - closed.re).abs() <= 1e-10 * (1.0 + closed.re.abs()));
        }
    }
}
