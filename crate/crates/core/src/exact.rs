//! Exact rational backend for terminating series.
//!
//! Everything here works on `BigRational` values on the real axis: rising
//! factorials, terminating pFq sums, the doubly terminating double series,
//! and the Pochhammer-ratio closed forms. Results are exact, so they double
//! as independent oracles for the float path.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::EvalError;
use crate::kdf::KdfParams;
use crate::scalar::Scalar;

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn from_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// If `q` is a nonpositive integer `-n`, returns `n >= 0`.
pub fn nonpos_int_order(q: &BigRational) -> Option<u64> {
    if !q.is_integer() || q.is_positive() {
        return None;
    }
    (-q).to_integer().to_u64()
}

/// Rising factorial (a)_m in exact arithmetic.
pub fn poch(a: &BigRational, m: u64) -> BigRational {
    let mut out = BigRational::one();
    let mut factor = a.clone();
    for _ in 0..m {
        out *= &factor;
        factor += BigRational::one();
    }
    out
}

pub fn poch_multi(params: &[BigRational], m: u64) -> BigRational {
    params.iter().map(|a| poch(a, m)).product()
}

/// Prefactor (-1)^N (A,B,C)_N / (D,E,F)_N of the terminating 4F3 reversal.
pub fn reversal_prefactor(
    nums: &[BigRational],
    n: u64,
    dens: &[BigRational],
) -> BigRational {
    let sign = if n.is_multiple_of(2) {
        BigRational::one()
    } else {
        -BigRational::one()
    };
    sign * poch_multi(nums, n) / poch_multi(dens, n)
}

fn check_denominators(
    dens: &[BigRational],
    termination: Option<u64>,
) -> Result<(), EvalError> {
    for b in dens {
        if let Some(k) = nonpos_int_order(b) {
            match termination {
                Some(n) if n <= k => {}
                _ => {
                    return Err(EvalError::DenominatorPole {
                        param: b.to_string(),
                        order: k,
                        termination,
                    })
                }
            }
        }
    }
    Ok(())
}

/// Exact sum of a terminating pFq series.
pub fn pfq_terminating(
    nums: &[BigRational],
    dens: &[BigRational],
    z: &BigRational,
) -> Result<BigRational, EvalError> {
    let termination = nums.iter().filter_map(nonpos_int_order).min();
    let n = termination.ok_or_else(|| EvalError::ExactUnsupported {
        reason: "exact pFq evaluation requires a terminating series".into(),
    })?;
    check_denominators(dens, Some(n))?;

    let mut sum = BigRational::zero();
    let mut term = BigRational::one();
    for m in 0..=n {
        sum += &term;
        if m == n {
            break;
        }
        let mf = from_int(m as i64);
        let mut ratio = z / (mf.clone() + BigRational::one());
        for a in nums {
            ratio *= a + &mf;
        }
        for b in dens {
            ratio /= b + &mf;
        }
        term *= ratio;
    }
    Ok(sum)
}

/// Vandermonde closed form (c-b)_N / (c)_N.
pub fn vandermonde(n: u64, b: &BigRational, c: &BigRational) -> Result<BigRational, EvalError> {
    let den = poch(c, n);
    if den.is_zero() {
        return Err(EvalError::DenominatorPole {
            param: c.to_string(),
            order: nonpos_int_order(c).unwrap_or(0),
            termination: Some(n),
        });
    }
    Ok(poch(&(c - b), n) / den)
}

/// Pfaff-Saalschütz closed form (c-a)_N (c-b)_N / ((c)_N (c-a-b)_N).
pub fn pfaff_saalschutz(
    a: &BigRational,
    b: &BigRational,
    n: u64,
    c: &BigRational,
) -> Result<BigRational, EvalError> {
    let den = poch(c, n) * poch(&(c - a - b), n);
    if den.is_zero() {
        return Err(EvalError::DenominatorPole {
            param: format!("({c})_N ({})_N", c - a - b),
            order: 0,
            termination: Some(n),
        });
    }
    Ok(poch(&(c - a), n) * poch(&(c - b), n) / den)
}

/// Dixon's theorem for the terminating well-poised
/// 3F2(a, b, -N; 1+a-b, 1+a+N; 1); the Gamma-ratio closed form collapses to
/// the Pochhammer ratio (1+a)_N (1+a/2-b)_N / ((1+a/2)_N (1+a-b)_N).
pub fn dixon_terminating(
    a: &BigRational,
    b: &BigRational,
    n: u64,
) -> Result<BigRational, EvalError> {
    let one = BigRational::one();
    let half_a = a / from_int(2);
    let den = poch(&(&one + &half_a), n) * poch(&(&one + a - b), n);
    if den.is_zero() {
        return Err(EvalError::DenominatorPole {
            param: "well-poised denominator Pochhammer".into(),
            order: 0,
            termination: Some(n),
        });
    }
    Ok(poch(&(&one + a), n) * poch(&(&one + &half_a - b), n) / den)
}

/// The nine parameters plus arguments of the double series, restricted to
/// rationals on the real axis.
#[derive(Debug, Clone)]
pub struct ExactKdfParams {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub e: BigRational,
    pub ap: BigRational,
    pub bp: BigRational,
    pub cp: BigRational,
    pub ep: BigRational,
    pub d: BigRational,
    pub x: BigRational,
    pub y: BigRational,
}

fn real_rational(s: Scalar) -> Option<BigRational> {
    if s.im != 0.0 {
        return None;
    }
    BigRational::from_float(s.re)
}

impl ExactKdfParams {
    /// The float projection of the parameters.
    pub fn to_float(&self) -> KdfParams {
        let s = |x: &BigRational| Scalar::new(to_f64(x), 0.0);
        KdfParams {
            a: s(&self.a),
            b: s(&self.b),
            c: s(&self.c),
            e: s(&self.e),
            ap: s(&self.ap),
            bp: s(&self.bp),
            cp: s(&self.cp),
            ep: s(&self.ep),
            d: s(&self.d),
            x: s(&self.x),
            y: s(&self.y),
        }
    }

    /// Converts float parameters, which are exact binary rationals, into
    /// exact form. Fails when any imaginary part is nonzero.
    pub fn from_float(p: &KdfParams) -> Option<Self> {
        Some(ExactKdfParams {
            a: real_rational(p.a)?,
            b: real_rational(p.b)?,
            c: real_rational(p.c)?,
            e: real_rational(p.e)?,
            ap: real_rational(p.ap)?,
            bp: real_rational(p.bp)?,
            cp: real_rational(p.cp)?,
            ep: real_rational(p.ep)?,
            d: real_rational(p.d)?,
            x: real_rational(p.x)?,
            y: real_rational(p.y)?,
        })
    }

    fn row1(&self) -> [&BigRational; 3] {
        [&self.a, &self.b, &self.c]
    }

    fn row2(&self) -> [&BigRational; 3] {
        [&self.ap, &self.bp, &self.cp]
    }
}

/// Exact evaluation of the doubly terminating double series.
pub fn kdf_doubly_terminating(p: &ExactKdfParams) -> Result<BigRational, EvalError> {
    let m_bound = p.row1().iter().filter_map(|q| nonpos_int_order(q)).min();
    let n_bound = p.row2().iter().filter_map(|q| nonpos_int_order(q)).min();
    let (m_max, n_max) = match (m_bound, n_bound) {
        (Some(m), Some(n)) => (m, n),
        _ => {
            return Err(EvalError::ExactUnsupported {
                reason: "exact double-series evaluation requires both indices to terminate".into(),
            })
        }
    };
    if let Some(k) = nonpos_int_order(&p.d) {
        if m_max + n_max > k {
            return Err(EvalError::DenominatorPole {
                param: p.d.to_string(),
                order: k,
                termination: Some(m_max + n_max),
            });
        }
    }
    check_denominators(std::slice::from_ref(&p.e), Some(m_max))?;
    check_denominators(std::slice::from_ref(&p.ep), Some(n_max))?;

    let mut sum = BigRational::zero();
    for m in 0..=m_max {
        for n in 0..=n_max {
            let mut term = poch(&p.a, m) * poch(&p.b, m) * poch(&p.c, m);
            term *= poch(&p.ap, n) * poch(&p.bp, n) * poch(&p.cp, n);
            term /= poch(&p.d, m + n) * poch(&p.e, m) * poch(&p.ep, n);
            term /= poch(&BigRational::one(), m) * poch(&BigRational::one(), n);
            term *= num::pow::pow(p.x.clone(), m as usize);
            term *= num::pow::pow(p.y.clone(), n as usize);
            sum += term;
        }
    }
    Ok(sum)
}
