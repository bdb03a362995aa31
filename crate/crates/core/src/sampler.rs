//! Deterministic parameter sampling for the identity registry.
//!
//! Free parameters are drawn as rational eighths k/8 with real parts in
//! [0.5, 6] and integer slots -N with small N, then the identity's relations
//! fix the remaining slots exactly (eighths are exact in binary, so the
//! relation residuals are zero). Candidates are rejected until they pass the
//! applicability check, carry validity margins of at least
//! [`VALIDITY_MARGIN`], and are evaluable within the configured budgets.
//!
//! The evaluability floors are where the margins earn their keep: a
//! unit-argument series with margin mu has tails that shrink like S^(-mu)
//! in the number of terms S, so hitting 1e-9 relative accuracy inside the
//! default budgets needs mu well above the bare validity floor. Samplers
//! therefore construct non-terminating instances with margins of at least
//! [`DIAGONAL_MARGIN`] (double sums) or [`SERIES_MARGIN`] (single series).

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::identities::{applicable, rhs_form, IdentityId, RhsForm};
use crate::kdf::{eval_kdf, KdfParams};
use crate::scalar::re;
use crate::series::PfqParams;

/// Floor for strict Re(·) validity margins.
pub const VALIDITY_MARGIN: f64 = 0.25;
/// Convergence-rate floor for a non-terminating single series.
pub const SERIES_MARGIN: f64 = 2.75;
/// Convergence-rate floor for each index of a non-terminating double sum.
pub const DIAGONAL_MARGIN: f64 = 3.5;
/// Consecutive rejected candidates before the sampler gives up.
const MAX_CONSECUTIVE_REJECTS: u32 = 1000;

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error(
        "sampler for {id} exhausted after {MAX_CONSECUTIVE_REJECTS} consecutive rejections \
         ({accepted} sets accepted)"
    )]
    Exhausted { id: IdentityId, accepted: usize },
}

struct Draw<'r> {
    rng: &'r mut ChaCha8Rng,
}

impl Draw<'_> {
    /// A rational eighth in [lo, hi]; `None` when the range holds none.
    fn q(&mut self, lo: f64, hi: f64) -> Option<f64> {
        let k_lo = (lo * 8.0).ceil() as i64;
        let k_hi = (hi * 8.0).floor() as i64;
        if k_lo > k_hi {
            return None;
        }
        Some(self.rng.gen_range(k_lo..=k_hi) as f64 / 8.0)
    }

    fn int(&mut self, lo: u64, hi: u64) -> u64 {
        self.rng.gen_range(lo..=hi)
    }
}

fn at_unit(row1: [f64; 4], row2: [f64; 4], d: f64) -> KdfParams {
    KdfParams::real_at_unit(row1, row2, d)
}

fn draw_kdf1(d: &mut Draw) -> Option<KdfParams> {
    let a = d.q(0.5, 4.0)?;
    let ap = d.q(SERIES_MARGIN, 6.0)?;
    let dd = a + ap;
    let b = d.q(0.5, 4.0)?;
    let c = d.q(0.5, 4.0)?;
    let ep = d.q(DIAGONAL_MARGIN, 6.0)?;
    let e = ep - ap + b + c;
    if e < 0.5 {
        return None;
    }
    let budget = a + ep - DIAGONAL_MARGIN;
    let bp = d.q(0.5, budget - 0.5)?;
    let cp = d.q(0.5, budget - bp)?;
    Some(at_unit([a, b, c, e], [ap, bp, cp, ep], dd))
}

fn draw_kdf2_i(d: &mut Draw) -> Option<KdfParams> {
    let n = d.int(1, 2);
    let nf = n as f64;
    let bp = d.q(0.5, 3.25 - nf)?;
    let cp = d.q(0.5, 3.75 - nf - bp)?;
    let ep = d.q(SERIES_MARGIN + nf + bp + cp, 6.0)?;
    let dd = d.q(0.5, 6.0)?;
    let b = d.q(0.5, 6.0)?;
    let c = d.q(0.5, 6.0)?;
    let e = 1.0 - dd - nf + b + c;
    Some(at_unit([-nf, b, c, e], [dd + nf, bp, cp, ep], dd))
}

fn draw_kdf2_ii(d: &mut Draw) -> Option<KdfParams> {
    let n = d.int(1, 6) as f64;
    let np = d.int(1, 6) as f64;
    let a = d.q(0.5, 6.0)?;
    let b = d.q(0.5, 6.0)?;
    let dd = d.q(0.5, 6.0)?;
    let e = 1.0 - dd + a + b - n;
    let bp = d.q(0.5, 6.0)?;
    let ep = d.q(0.5, 6.0)?;
    Some(at_unit([a, b, -n, e], [dd - a, bp, -np, ep], dd))
}

fn draw_kdf3(d: &mut Draw, index: usize) -> Option<KdfParams> {
    let m = d.int(1, 2);
    let mf = m as f64;
    // alternate which primed slot carries the negative integer
    if index.is_multiple_of(2) {
        let a = d.q(mf + 0.5, 6.0)?;
        let dd = a - mf;
        let b = d.q(0.5, 3.25 - mf)?;
        let c = d.q(0.5, 3.75 - mf - b)?;
        let e = d.q(SERIES_MARGIN + mf + b + c, 6.0)?;
        let cp = d.q(0.5, 6.0)?;
        let ep = d.q(0.5, 6.0)?;
        Some(at_unit([a, b, c, e], [-mf, dd - b, cp, ep], dd))
    } else {
        let b = d.q(mf + 0.5, 6.0)?;
        let dd = b - mf;
        let a = d.q(0.5, 3.25 - mf)?;
        let c = d.q(0.5, 3.75 - mf - a)?;
        let e = d.q(SERIES_MARGIN + mf + a + c, 6.0)?;
        let cp = d.q(0.5, 6.0)?;
        let ep = d.q(0.5, 6.0)?;
        Some(at_unit([a, b, c, e], [dd - a, -mf, cp, ep], dd))
    }
}

fn draw_kdf4(d: &mut Draw) -> Option<KdfParams> {
    let dd = d.q(0.5, 2.0)?;
    let a = d.q(0.5, 1.0)?;
    let b = d.q(0.5, 1.0)?;
    let c = d.q(0.5, 2.5 + dd - a - b)?;
    let e = d.q((DIAGONAL_MARGIN - dd + a + b + c).max(0.5), 6.0)?;
    let cp = d.q(
        (SERIES_MARGIN - 1.0 + dd - c).max(0.5),
        2.5 - dd + a + b,
    )?;
    let ep = d.q((DIAGONAL_MARGIN + dd + cp - a - b).max(0.5), 6.0)?;
    Some(at_unit([a, b, c, e], [dd - a, dd - b, cp, ep], dd))
}

fn draw_red3f2(d: &mut Draw) -> Option<KdfParams> {
    let c = d.q(0.5, 1.0)?;
    let e = d.q(c + DIAGONAL_MARGIN + 0.5, 6.0)?;
    let cp = d.q(0.5, e - c - DIAGONAL_MARGIN)?;
    let a = d.q(0.5, 3.0)?;
    let b = d.q(0.5, 3.0)?;
    let dd = d.q((DIAGONAL_MARGIN - e + a + b + c).max(0.5), 6.0)?;
    let ep = dd + e - a - b - c;
    Some(at_unit([a, b, c, e], [dd - a, dd - b, cp, ep], dd))
}

fn draw_res1(d: &mut Draw) -> Option<KdfParams> {
    let e = d.q(DIAGONAL_MARGIN, 6.0)?;
    let a = d.q(0.5, 2.0)?;
    let b = d.q(0.5, 2.0)?;
    let c = d.q(0.5, 2.0)?;
    let dd = d.q((DIAGONAL_MARGIN - e + a + b + c).max(0.5), 6.0)?;
    let ep = dd + e - a - b - c;
    Some(at_unit([a, b, c, e], [dd - a, dd - b, -c, ep], dd))
}

fn draw_res2(d: &mut Draw) -> Option<KdfParams> {
    let e = d.q(DIAGONAL_MARGIN + 0.5, 6.0)?;
    let dd = d.q(0.5, e - DIAGONAL_MARGIN)?;
    let a = d.q(0.5, 1.5)?;
    let b = d.q(0.5, 1.5)?;
    let c = d.q(0.5, (dd + e - DIAGONAL_MARGIN - a - b).min(6.0))?;
    let ep = dd + e - a - b - c;
    Some(at_unit([a, b, c, e], [dd - a, dd - b, dd - c, ep], dd))
}

fn draw_red3f22(d: &mut Draw) -> Option<KdfParams> {
    let e = d.q(DIAGONAL_MARGIN, 6.0)?;
    let a = d.q(0.5, 2.0)?;
    let b = d.q(0.5, 3.0)?;
    let c = d.q(0.5, 3.0)?;
    let lo_sum = (DIAGONAL_MARGIN + a - e)
        .max(SERIES_MARGIN + a - b - c)
        .max(1.0);
    let bp = d.q((lo_sum - 6.0).max(0.5), 6.0)?;
    let cp = d.q((lo_sum - bp).max(0.5), 6.0)?;
    let dd = b + c + bp + cp;
    let ep = bp + cp + e - a;
    Some(at_unit([a, b, c, e], [dd - a, bp, cp, ep], dd))
}

fn draw_res3(d: &mut Draw, index: usize) -> Option<KdfParams> {
    let m = d.int(1, 2);
    let mf = m as f64;
    let dd = d.q(0.5, 6.0)?;
    // alternate which of d-a, d-b is the negative integer
    let (a, b) = if index.is_multiple_of(2) {
        let b = d.q(0.5, 3.25 - mf)?;
        (dd + mf, b)
    } else {
        let a = d.q(0.5, 3.25 - mf)?;
        (a, dd + mf)
    };
    let small = if index.is_multiple_of(2) { b } else { a };
    let c = d.q(0.5, 3.75 - mf - small)?;
    let e = d.q(SERIES_MARGIN + mf + small + c, 6.0)?;
    let ep = dd + e - a - b - c;
    Some(at_unit([a, b, c, e], [dd - a, dd - b, e - c - 1.0, ep], dd))
}

fn draw_g1(d: &mut Draw) -> Option<KdfParams> {
    let n = d.int(1, 3);
    let nf = n as f64;
    let dd = d.q(0.5, 1.0)?;
    let b = d.q(0.5, 4.0)?;
    let c = d.q(0.5, 4.0)?;
    let ep = d.q((SERIES_MARGIN + nf + 2.0 * dd - b - c).max(0.5), 6.0)?;
    let e = 1.0 - nf + b + c - dd;
    Some(at_unit([-nf, b, c, e], [dd + nf, dd - b, dd - c, ep], dd))
}

fn draw_g2(d: &mut Draw) -> Option<KdfParams> {
    let n = d.int(1, 3);
    let nf = n as f64;
    let dd = d.q(0.5, 1.0)?;
    let b = d.q(0.5, 6.0)?;
    let c = d.q((SERIES_MARGIN - 1.0 + nf + dd - b).max(0.5), 6.0)?;
    let cp = d.q(0.5, 6.0)?;
    let e = 1.0 - nf + b + c - dd;
    Some(at_unit([-nf, b, c, e], [dd + nf, dd - b, cp, 1.0 + c + cp], dd))
}

fn draw_fi(d: &mut Draw, shared_ep: bool) -> Option<KdfParams> {
    let n = d.int(1, 6) as f64;
    let np = d.int(1, 6) as f64;
    let a = d.q(0.5, 6.0)?;
    let b = d.q(0.5, 6.0)?;
    let dd = d.q(0.5, 6.0)?;
    let e = 1.0 + a + b - n - dd;
    let ep = if shared_ep {
        1.0 - n - np
    } else {
        1.0 - a - b - np + dd
    };
    Some(at_unit([a, b, -n, e], [dd - a, dd - b, -np, ep], dd))
}

fn draw(id: IdentityId, rng: &mut ChaCha8Rng, index: usize) -> Option<KdfParams> {
    let mut d = Draw { rng };
    match id {
        IdentityId::Kdf1 => draw_kdf1(&mut d),
        IdentityId::Kdf2I => draw_kdf2_i(&mut d),
        IdentityId::Kdf2Ii => draw_kdf2_ii(&mut d),
        IdentityId::Kdf3 => draw_kdf3(&mut d, index),
        IdentityId::Kdf4 => draw_kdf4(&mut d),
        IdentityId::Red3F2 => draw_red3f2(&mut d),
        IdentityId::Res1 => draw_res1(&mut d),
        IdentityId::Res2 => draw_res2(&mut d),
        IdentityId::Red3F22 => draw_red3f22(&mut d),
        IdentityId::Res3 => draw_res3(&mut d, index),
        IdentityId::G1 => draw_g1(&mut d),
        IdentityId::G2 => draw_g2(&mut d),
        IdentityId::Fi1 => draw_fi(&mut d, false),
        IdentityId::Fi2 => draw_fi(&mut d, true),
    }
}

fn series_evaluable(series: &PfqParams) -> bool {
    series.check_denominators().is_ok()
        && (series.termination().is_some() || series.unit_margin() >= SERIES_MARGIN)
}

/// The prefactor must be finite with no Gamma argument on a pole: an
/// unpaired pole makes the value Zero (ill-conditioned relative error) or
/// Infinite, and a paired pole evaluates a pairing limit that need not be
/// the limit of the identity at that degenerate point.
fn prefactor_evaluable(pref: &crate::identities::GammaPrefactor) -> bool {
    !pref.has_pole_arguments() && pref.value().is_finite()
}

/// Cheap structural checks: legal denominators and tractable margins on
/// both sides.
fn evaluable(id: IdentityId, p: &KdfParams) -> bool {
    if p.validate().is_err() {
        return false;
    }
    let profile = p.termination_profile();
    let conv = p.check_convergence();
    let lhs_ok = match (profile.m_bound, profile.n_bound) {
        (Some(_), Some(_)) => true,
        (Some(_), None) => conv.second.margin >= SERIES_MARGIN,
        (None, Some(_)) => conv.first.margin >= SERIES_MARGIN,
        (None, None) => {
            conv.first.margin >= DIAGONAL_MARGIN && conv.second.margin >= DIAGONAL_MARGIN
        }
    };
    if !lhs_ok {
        return false;
    }
    match rhs_form(id, p) {
        Err(_) => false,
        Ok(RhsForm::Closed(pref)) => prefactor_evaluable(&pref),
        Ok(RhsForm::Scaled { prefactor, series }) => {
            prefactor_evaluable(&prefactor) && series_evaluable(&series)
        }
        Ok(RhsForm::Sum2 { first, second }) => {
            prefactor_evaluable(&first.0)
                && prefactor_evaluable(&second.0)
                && series_evaluable(&first.1)
                && series_evaluable(&second.1)
        }
    }
}

/// Numerical conditioning probe on the left-hand side. The rounding floor
/// (machine epsilon times the sum of term magnitudes) must sit far below
/// the value, so cancellation-dominated sums are rejected. Non-terminating
/// sums are additionally evaluated at two stop tolerances and must agree,
/// which screens out slow tails near the budget cap.
fn lhs_well_conditioned(p: &KdfParams) -> bool {
    let Ok((tight, scale)) = crate::kdf::eval_kdf_scaled(p, 1e-14, crate::kdf::DEFAULT_MAX_DIAGONALS)
    else {
        return false;
    };
    if f64::EPSILON * scale > 1e-11 * tight.value.norm() {
        return false;
    }
    if tight.status == crate::series::SeriesStatus::TerminatedExactly {
        return true;
    }
    let Ok(loose) = eval_kdf(p, 1e-12, crate::kdf::DEFAULT_MAX_DIAGONALS) else {
        return false;
    };
    (tight.value - loose.value).norm() <= 4e-10 * tight.value.norm()
}

fn accept(id: IdentityId, p: &KdfParams) -> bool {
    let report = applicable(id, p);
    if !report.applicable {
        return false;
    }
    let margins_ok = report
        .conditions
        .iter()
        .all(|c| c.waived || c.margin.is_none_or(|m| m >= VALIDITY_MARGIN));
    // the conditioning probe runs last: everything before it is cheap
    margins_ok && evaluable(id, p) && lhs_well_conditioned(p)
}

/// Draws `count` parameter sets for the identity, deterministically in
/// `(id, seed)`. Every returned set satisfies the identity's relations
/// exactly, passes `applicable`, carries validity margins of at least
/// [`VALIDITY_MARGIN`], and is evaluable on both sides within the default
/// budgets.
pub fn sample_params(
    id: IdentityId,
    seed: u64,
    count: usize,
) -> Result<Vec<KdfParams>, SamplerError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut consecutive = 0u32;
    while out.len() < count {
        match draw(id, &mut rng, out.len()) {
            Some(p) if accept(id, &p) => {
                debug_assert_eq!(p.x, re(1.0));
                out.push(p);
                consecutive = 0;
            }
            _ => {
                consecutive += 1;
                if consecutive >= MAX_CONSECUTIVE_REJECTS {
                    return Err(SamplerError::Exhausted {
                        id,
                        accepted: out.len(),
                    });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::nonpos_int_order;

    #[test]
    fn sampled_sets_are_applicable() {
        for id in IdentityId::ALL {
            let params = sample_params(id, 42, 5).unwrap_or_else(|e| panic!("{e}"));
            assert_eq!(params.len(), 5);
            for p in &params {
                assert!(applicable(id, p).applicable, "{id}: {p:?}");
            }
        }
    }

    #[test]
    fn fi2_sets_have_positive_depths_and_shared_denominator() {
        for p in sample_params(IdentityId::Fi2, 7, 20).unwrap() {
            let n = nonpos_int_order(p.c).unwrap();
            let np = nonpos_int_order(p.cp).unwrap();
            assert!(n >= 1 && np >= 1);
            assert_eq!(p.ep.re, 1.0 - (n + np) as f64);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        for id in [IdentityId::Kdf2Ii, IdentityId::Res1, IdentityId::G1] {
            let a = sample_params(id, 1234, 8).unwrap();
            let b = sample_params(id, 1234, 8).unwrap();
            assert_eq!(a, b);
            let c = sample_params(id, 1235, 8).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn res3_alternates_the_integral_slot() {
        let params = sample_params(IdentityId::Res3, 5, 6).unwrap();
        for (i, p) in params.iter().enumerate() {
            let da = nonpos_int_order(p.d - p.a).is_some();
            let db = nonpos_int_order(p.d - p.b).is_some();
            if i % 2 == 0 {
                assert!(da, "even samples put the integer in d - a");
            } else {
                assert!(db, "odd samples put the integer in d - b");
            }
        }
    }
}
