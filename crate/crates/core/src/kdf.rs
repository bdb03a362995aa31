//! Direct evaluation of the double hypergeometric series
//!
//! ```text
//! F(x,y) = sum_{m,n>=0} (a,b,c)_m (a',b',c')_n / ((d)_{m+n} (e)_m (e')_n) x^m y^n / (m! n!)
//! ```
//!
//! in three strategies, most exact first: a doubly terminating finite double
//! sum, a singly terminating sum with the inner index evaluated as a pFq
//! series through `(d)_{m+n} = (d)_m (d+m)_n`, and anti-diagonal summation
//! with compensated accumulation for the fully non-terminating case. This
//! evaluator is deliberately brute force: it is the oracle every identity is
//! verified against.

use crate::error::EvalError;
use crate::scalar::{nonpos_int_order, CompensatedSum, Scalar, UNIT_ARG_TOL};
use crate::series::{SeriesStatus, SeriesValue, DEFAULT_MAX_TERMS};

/// Default anti-diagonal budget for non-terminating unit-argument sums.
pub const DEFAULT_MAX_DIAGONALS: usize = 20_000;

/// The nine parameters of the double series plus the argument pair.
/// Unprimed parameters belong to the first (m) index, primed (`*_p`) to the
/// second (n) index, `d` is the shared denominator indexed by m+n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KdfParams {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    pub e: Scalar,
    pub ap: Scalar,
    pub bp: Scalar,
    pub cp: Scalar,
    pub ep: Scalar,
    pub d: Scalar,
    pub x: Scalar,
    pub y: Scalar,
}

/// Termination depths read off the numerator parameter rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TerminationProfile {
    pub m_bound: Option<u64>,
    pub n_bound: Option<u64>,
}

/// One of the two absolute-convergence inequalities at |x| = |y| = 1.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceCheck {
    /// Re(d + e - a - b - c) for the first index, primed for the second.
    pub margin: f64,
    /// Strict inequality margin > 0.
    pub satisfied: bool,
    /// A terminating index waives its inequality.
    pub waived: bool,
}

impl ConvergenceCheck {
    pub fn passes(&self) -> bool {
        self.satisfied || self.waived
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConvergenceReport {
    pub first: ConvergenceCheck,
    pub second: ConvergenceCheck,
}

impl ConvergenceReport {
    pub fn passes(&self) -> bool {
        self.first.passes() && self.second.passes()
    }
}

impl KdfParams {
    #[allow(clippy::too_many_arguments)]
    pub fn at_unit(row1: [Scalar; 4], row2: [Scalar; 4], d: Scalar) -> Self {
        let one = Scalar::new(1.0, 0.0);
        KdfParams {
            a: row1[0],
            b: row1[1],
            c: row1[2],
            e: row1[3],
            ap: row2[0],
            bp: row2[1],
            cp: row2[2],
            ep: row2[3],
            d,
            x: one,
            y: one,
        }
    }

    pub fn real_at_unit(row1: [f64; 4], row2: [f64; 4], d: f64) -> Self {
        let s = |x: f64| Scalar::new(x, 0.0);
        Self::at_unit(
            [s(row1[0]), s(row1[1]), s(row1[2]), s(row1[3])],
            [s(row2[0]), s(row2[1]), s(row2[2]), s(row2[3])],
            s(d),
        )
    }

    pub fn row1(&self) -> [Scalar; 3] {
        [self.a, self.b, self.c]
    }

    pub fn row2(&self) -> [Scalar; 3] {
        [self.ap, self.bp, self.cp]
    }

    /// The series is symmetric under swapping the two rows together with
    /// their arguments.
    pub fn swap_rows(&self) -> KdfParams {
        KdfParams {
            a: self.ap,
            b: self.bp,
            c: self.cp,
            e: self.ep,
            ap: self.a,
            bp: self.b,
            cp: self.c,
            ep: self.e,
            d: self.d,
            x: self.y,
            y: self.x,
        }
    }

    /// Termination depths: the tightest nonpositive-integer numerator in
    /// each row.
    pub fn termination_profile(&self) -> TerminationProfile {
        TerminationProfile {
            m_bound: self.row1().iter().copied().filter_map(nonpos_int_order).min(),
            n_bound: self.row2().iter().copied().filter_map(nonpos_int_order).min(),
        }
    }

    /// The two absolute-convergence inequalities at |x| = |y| = 1, each
    /// reported with its margin; a terminating index waives its inequality.
    pub fn check_convergence(&self) -> ConvergenceReport {
        let profile = self.termination_profile();
        let margin1 = (self.d + self.e - self.a - self.b - self.c).re;
        let margin2 = (self.d + self.ep - self.ap - self.bp - self.cp).re;
        ConvergenceReport {
            first: ConvergenceCheck {
                margin: margin1,
                satisfied: margin1 > 0.0,
                waived: profile.m_bound.is_some(),
            },
            second: ConvergenceCheck {
                margin: margin2,
                satisfied: margin2 > 0.0,
                waived: profile.n_bound.is_some(),
            },
        }
    }

    /// Checks the pole-before-termination rule for the denominator
    /// parameters d, e, e' against the termination profile.
    pub fn validate(&self) -> Result<(), EvalError> {
        let profile = effective_bounds(self);
        validate(self, &profile)
    }

    fn sorted_rows(&self) -> KdfParams {
        // canonical order within each numerator triple keeps evaluation
        // bitwise invariant under row permutations
        let sort3 = |mut t: [Scalar; 3]| {
            t.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
            t
        };
        let r1 = sort3(self.row1());
        let r2 = sort3(self.row2());
        KdfParams {
            a: r1[0],
            b: r1[1],
            c: r1[2],
            ap: r2[0],
            bp: r2[1],
            cp: r2[2],
            ..*self
        }
    }
}

fn effective_bounds(p: &KdfParams) -> TerminationProfile {
    let mut profile = p.termination_profile();
    // a vanishing argument cuts its index to the m = 0 (n = 0) term
    if p.x.norm() == 0.0 {
        profile.m_bound = Some(profile.m_bound.map_or(0, |_b| 0));
    }
    if p.y.norm() == 0.0 {
        profile.n_bound = Some(profile.n_bound.map_or(0, |_b| 0));
    }
    profile
}

fn validate(p: &KdfParams, profile: &TerminationProfile) -> Result<(), EvalError> {
    if let Some(k) = nonpos_int_order(p.d) {
        let total = match (profile.m_bound, profile.n_bound) {
            (Some(m), Some(n)) => Some(m + n),
            _ => None,
        };
        match total {
            Some(t) if t <= k => {}
            _ => {
                return Err(EvalError::DenominatorPole {
                    param: format!("d = {}", p.d),
                    order: k,
                    termination: total,
                })
            }
        }
    }
    if let Some(k) = nonpos_int_order(p.e) {
        match profile.m_bound {
            Some(m) if m <= k => {}
            _ => {
                return Err(EvalError::DenominatorPole {
                    param: format!("e = {}", p.e),
                    order: k,
                    termination: profile.m_bound,
                })
            }
        }
    }
    if let Some(k) = nonpos_int_order(p.ep) {
        match profile.n_bound {
            Some(n) if n <= k => {}
            _ => {
                return Err(EvalError::DenominatorPole {
                    param: format!("e' = {}", p.ep),
                    order: k,
                    termination: profile.n_bound,
                })
            }
        }
    }
    Ok(())
}

/// Sum with the first index finite (m <= m_max). Each fixed m carries a
/// 3F2-shaped column in the second-row parameters with denominator d+m via
/// `(d)_{m+n} = (d)_m (d+m)_n`; the columns advance together in n and every
/// row sum `D_n = sum_m t_{m,n}` is one term of the combined series. Summing
/// row-wise keeps the stop rule honest when the finite index cancels:
/// per-column truncation would be judged against the column's own magnitude
/// and get amplified in the cancelled total.
fn sum_outer_finite(
    p: &KdfParams,
    m_max: u64,
    n_bound: Option<u64>,
    tol: f64,
) -> Result<(SeriesValue, f64), EvalError> {
    // column heads t_{m,0} = (a,b,c)_m x^m / ((d)_m (e)_m m!)
    let mut cols: Vec<Scalar> = Vec::with_capacity(m_max as usize + 1);
    let mut coeff = Scalar::new(1.0, 0.0);
    for m in 0..=m_max {
        cols.push(coeff);
        if m < m_max {
            let mf = m as f64;
            coeff *= (p.a + mf) * (p.b + mf) * (p.c + mf) * p.x
                / ((p.d + mf) * (p.e + mf) * (mf + 1.0));
        }
    }

    let mut total = CompensatedSum::new();
    let mut total_abs = 0.0f64;
    let mut terms = 0usize;
    let mut below = 0u32;
    let mut n = 0u64;
    loop {
        let mut row = Scalar::new(0.0, 0.0);
        for t in &cols {
            row += t;
            total_abs += t.norm();
        }
        total.add(row);
        terms += cols.len();

        if let Some(nb) = n_bound {
            if n == nb {
                let value = SeriesValue {
                    value: total.value(),
                    abs_err: f64::EPSILON * total_abs,
                    terms,
                    status: SeriesStatus::TerminatedExactly,
                };
                return Ok((value, total_abs));
            }
        } else {
            let scale = total.value().norm().max(f64::MIN_POSITIVE);
            if row.norm() <= tol * scale {
                below += 1;
                if below >= 3 {
                    let rows = (n + 1) as f64;
                    let value = SeriesValue {
                        value: total.value(),
                        abs_err: row.norm() * rows * rows + f64::EPSILON * total_abs,
                        terms,
                        status: SeriesStatus::Converged,
                    };
                    return Ok((value, total_abs));
                }
            } else {
                below = 0;
            }
            if terms >= DEFAULT_MAX_TERMS {
                return Err(EvalError::no_convergence(format!(
                    "row stop rule not reached within {DEFAULT_MAX_TERMS} terms"
                )));
            }
        }

        let nf = n as f64;
        for (m, t) in cols.iter_mut().enumerate() {
            *t *= (p.ap + nf) * (p.bp + nf) * (p.cp + nf) * p.y
                / ((p.d + m as f64 + nf) * (p.ep + nf) * (nf + 1.0));
        }
        n += 1;
    }
}

/// Terms this far below both edge terms of an anti-diagonal are dropped.
/// The interior of a diagonal is binomially suppressed, so walking all the
/// way through it would run into subnormal underflow and destroy the term
/// recurrence; everything below the cut contributes less than
/// `s · 1e-25 · |edge|` per diagonal.
const DIAGONAL_INTERIOR_CUT: f64 = 1e-25;

/// Anti-diagonal summation for the fully non-terminating case. Each
/// diagonal is accumulated from its two edge terms towards the middle and
/// added to the running total with compensated summation; the sum stops
/// when three consecutive diagonal increments fall below
/// `tol·|partial sum|`.
fn sum_diagonals(
    p: &KdfParams,
    tol: f64,
    max_diagonals: usize,
) -> Result<(SeriesValue, f64), EvalError> {
    // unit-argument indices need their convergence inequality; sub-unit
    // ones converge on their own
    let report = p.check_convergence();
    for (arg, check, label) in [
        (p.x, report.first, "first"),
        (p.y, report.second, "second"),
    ] {
        let az = arg.norm();
        if az > 1.0 + UNIT_ARG_TOL {
            return Err(EvalError::no_convergence(format!(
                "|{label} argument| = {az} lies outside the supported region |arg| <= 1"
            )));
        }
        if (az - 1.0).abs() <= UNIT_ARG_TOL && !check.satisfied {
            return Err(EvalError::no_convergence(format!(
                "{label} convergence inequality fails (margin {})",
                check.margin
            )));
        }
    }

    // the step from t_{m,n} to t_{m+1,n-1} along a diagonal
    let step_up = |t: Scalar, mf: f64, nf: f64| -> Scalar {
        t * (p.a + mf) * (p.b + mf) * (p.c + mf) * p.x * nf * (p.ep + nf - 1.0)
            / ((p.e + mf)
                * (mf + 1.0)
                * (p.ap + nf - 1.0)
                * (p.bp + nf - 1.0)
                * (p.cp + nf - 1.0)
                * p.y)
    };
    // the step from t_{m,n} to t_{m-1,n+1}
    let step_down = |t: Scalar, mf: f64, nf: f64| -> Scalar {
        t * (p.e + mf - 1.0) * mf * (p.ap + nf) * (p.bp + nf) * (p.cp + nf) * p.y
            / ((p.a + mf - 1.0)
                * (p.b + mf - 1.0)
                * (p.c + mf - 1.0)
                * p.x
                * (nf + 1.0)
                * (p.ep + nf))
    };

    let mut total = CompensatedSum::new();
    let mut total_abs = 0.0f64;
    let mut y_edge = Scalar::new(1.0, 0.0); // t_{0,s}
    let mut x_edge = Scalar::new(1.0, 0.0); // t_{s,0}
    let mut below = 0u32;
    let mut terms = 0usize;
    for s in 0..max_diagonals {
        let sf = s as f64;
        let cut = DIAGONAL_INTERIOR_CUT * y_edge.norm().max(x_edge.norm());
        let mut diag = y_edge;
        let mut diag_abs = y_edge.norm();
        terms += 1;
        if s > 0 {
            // climb from the y-edge until the interior becomes negligible
            let mut t = y_edge;
            let mut small = 0u32;
            let mut top = s; // largest m the climb has covered
            for m in 0..s {
                t = step_up(t, m as f64, sf - m as f64);
                diag += t;
                diag_abs += t.norm();
                terms += 1;
                if t.norm() <= cut {
                    small += 1;
                    if small >= 2 {
                        top = m + 1;
                        break;
                    }
                } else {
                    small = 0;
                }
            }
            if top < s {
                // descend from the x-edge over the part the climb skipped
                let mut t = x_edge;
                diag += t;
                diag_abs += t.norm();
                terms += 1;
                let mut small = 0u32;
                let mut m = s;
                while m - 1 > top {
                    t = step_down(t, m as f64, sf - m as f64);
                    m -= 1;
                    diag += t;
                    diag_abs += t.norm();
                    terms += 1;
                    if t.norm() <= cut {
                        small += 1;
                        if small >= 2 {
                            break;
                        }
                    } else {
                        small = 0;
                    }
                }
            }
        }
        total.add(diag);
        total_abs += diag_abs;

        let scale = total.value().norm().max(f64::MIN_POSITIVE);
        if diag.norm() <= tol * scale {
            below += 1;
            if below >= 3 {
                let diagonals = s + 1;
                let value = SeriesValue {
                    value: total.value(),
                    abs_err: diag.norm() * (diagonals as f64).powi(2)
                        + f64::EPSILON * total_abs,
                    terms,
                    status: SeriesStatus::Converged,
                };
                return Ok((value, total_abs));
            }
        } else {
            below = 0;
        }

        y_edge *= (p.ap + sf) * (p.bp + sf) * (p.cp + sf) * p.y
            / ((p.d + sf) * (p.ep + sf) * (sf + 1.0));
        x_edge *= (p.a + sf) * (p.b + sf) * (p.c + sf) * p.x
            / ((p.d + sf) * (p.e + sf) * (sf + 1.0));
    }
    Err(EvalError::no_convergence(format!(
        "diagonal stop rule not reached after {max_diagonals} anti-diagonals"
    )))
}

/// Evaluates the double series and also reports the accumulated sum of
/// term magnitudes, the scale against which rounding cancellation is
/// measured.
pub(crate) fn eval_kdf_scaled(
    p: &KdfParams,
    tol: f64,
    max_diagonals: usize,
) -> Result<(SeriesValue, f64), EvalError> {
    let p = p.sorted_rows();
    let profile = effective_bounds(&p);
    validate(&p, &profile)?;
    match (profile.m_bound, profile.n_bound) {
        (Some(m), Some(n)) => {
            // the smaller bound goes outside: fewer columns to advance
            if m <= n {
                sum_outer_finite(&p, m, Some(n), tol)
            } else {
                sum_outer_finite(&p.swap_rows(), n, Some(m), tol)
            }
        }
        (Some(m), None) => sum_outer_finite(&p, m, None, tol),
        (None, Some(n)) => sum_outer_finite(&p.swap_rows(), n, None, tol),
        (None, None) => sum_diagonals(&p, tol, max_diagonals),
    }
}

/// Evaluates the double series. Strategy order: doubly terminating finite
/// double sum, then singly terminating outer-finite with the second index
/// advanced column-wise, then anti-diagonal summation.
pub fn eval_kdf(p: &KdfParams, tol: f64, max_diagonals: usize) -> Result<SeriesValue, EvalError> {
    eval_kdf_scaled(p, tol, max_diagonals).map(|(value, _)| value)
}
