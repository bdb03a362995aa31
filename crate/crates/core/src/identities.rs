//! Registry of transformation and summation identities for the double
//! series at unit arguments: parameter relations, validity conditions,
//! right-hand sides, and verification against the brute-force evaluator.
//!
//! Naming follows the registry ids: `kdf1`..`kdf4` are the F(1,1) → 4F3
//! transformations, `red3f2`/`red3f22` the 3F2 reductions, `res1`..`res3`
//! and `g1`, `g2`, `fi1`, `fi2` the closed-form summations.

use num::rational::BigRational;
use thiserror::Error;

use crate::error::EvalError;
use crate::exact::{self, ExactKdfParams};
use crate::gamma::{gamma_ratio, pochhammer, pochhammer_multi};
use crate::kdf::{eval_kdf, KdfParams, DEFAULT_MAX_DIAGONALS};
use crate::scalar::{neg_int_order, nonpos_int_order, re, CompensatedSum, Scalar};
use crate::series::{
    eval_pfq, gauss_2f1_unit, PfqParams, SeriesStatus, SeriesValue, DEFAULT_MAX_TERMS,
};
use crate::signed_log::SignedLog;

/// Tolerance for the parameter equality relations. Parameters are exact
/// rationals by construction in the sampler, so this only guards user input.
pub const RELATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdentityId {
    Kdf1,
    Kdf2I,
    Kdf2Ii,
    Kdf3,
    Kdf4,
    Red3F2,
    Res1,
    Res2,
    Red3F22,
    Res3,
    G1,
    G2,
    Fi1,
    Fi2,
}

impl IdentityId {
    pub const ALL: [IdentityId; 14] = [
        IdentityId::Kdf1,
        IdentityId::Kdf2I,
        IdentityId::Kdf2Ii,
        IdentityId::Kdf3,
        IdentityId::Kdf4,
        IdentityId::Red3F2,
        IdentityId::Res1,
        IdentityId::Res2,
        IdentityId::Red3F22,
        IdentityId::Res3,
        IdentityId::G1,
        IdentityId::G2,
        IdentityId::Fi1,
        IdentityId::Fi2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            IdentityId::Kdf1 => "kdf1",
            IdentityId::Kdf2I => "kdf2-i",
            IdentityId::Kdf2Ii => "kdf2-ii",
            IdentityId::Kdf3 => "kdf3",
            IdentityId::Kdf4 => "kdf4",
            IdentityId::Red3F2 => "red3f2",
            IdentityId::Res1 => "res1",
            IdentityId::Res2 => "res2",
            IdentityId::Red3F22 => "red3f22",
            IdentityId::Res3 => "res3",
            IdentityId::G1 => "g1",
            IdentityId::G2 => "g2",
            IdentityId::Fi1 => "fi1",
            IdentityId::Fi2 => "fi2",
        }
    }

    pub fn from_name(name: &str) -> Option<IdentityId> {
        let wanted = name.to_ascii_lowercase().replace('_', "-");
        Self::ALL.iter().copied().find(|id| id.name() == wanted)
    }

    /// Human-readable parameter relations, for the catalog listing.
    pub fn relations_text(&self) -> &'static [&'static str] {
        match self {
            IdentityId::Kdf1 => &["a' = d - a", "e' = d + e - a - b - c"],
            IdentityId::Kdf2I | IdentityId::Kdf2Ii => &["a' = d - a", "d + e - a - b - c = 1"],
            IdentityId::Kdf3 | IdentityId::Kdf4 => &["a' = d - a", "b' = d - b"],
            IdentityId::Red3F2 => &["e' = d + e - a - b - c", "a' = d - a", "b' = d - b"],
            IdentityId::Res1 => &[
                "a' = d - a",
                "b' = d - b",
                "c' = -c",
                "e' = d + e - a - b - c",
            ],
            IdentityId::Res2 => &[
                "a' = d - a",
                "b' = d - b",
                "c' = d - c",
                "e' = d + e - a - b - c",
            ],
            IdentityId::Red3F22 => &[
                "e' = d + e - a - b - c",
                "a' = d - a",
                "d = b + c + b' + c'",
            ],
            IdentityId::Res3 => &[
                "a' = d - a",
                "b' = d - b",
                "c' = e - c - 1",
                "e' = d + e - a - b - c",
            ],
            IdentityId::G1 => &[
                "a = -N",
                "e = 1 - N + b + c - d",
                "a' = d + N",
                "b' = d - b",
                "c' = d - c",
            ],
            IdentityId::G2 => &[
                "a = -N",
                "e = 1 - N + b + c - d",
                "a' = d + N",
                "b' = d - b",
                "e' = 1 + c + c'",
            ],
            IdentityId::Fi1 => &[
                "c = -N",
                "c' = -N'",
                "e = 1 + a + b - N - d",
                "a' = d - a",
                "b' = d - b",
                "e' = 1 - a - b - N' + d",
            ],
            IdentityId::Fi2 => &[
                "c = -N",
                "c' = -N'",
                "e = 1 + a + b - N - d",
                "a' = d - a",
                "b' = d - b",
                "e' = 1 - N - N'",
            ],
        }
    }

    /// Human-readable validity conditions, for the catalog listing.
    pub fn conditions_text(&self) -> &'static [&'static str] {
        match self {
            IdentityId::Kdf1 => &[
                "Re(d + e - a - b - c) > 0 (waived if the first index terminates)",
                "Re(d + e' - a' - b' - c') > 0 (waived if the second index terminates)",
                "Re(a') > 0",
            ],
            IdentityId::Kdf2I => &[
                "a is a negative integer",
                "Re(d + e' - a' - b' - c') > 0 (waived if the second index terminates)",
            ],
            IdentityId::Kdf2Ii => &["c is a negative integer", "c' is a negative integer"],
            IdentityId::Kdf3 => &[
                "a' or b' is a negative integer",
                "Re(d + e - a - b - c) > 0 (waived if the first index terminates)",
                "Re(d + e' - a' - b' - c') > 0 (waived if the second index terminates)",
            ],
            IdentityId::Kdf4 => &[
                "Re(1 - d + c + c') > 0",
                "Re(d + e - a - b - c) > 0 (waived if the first index terminates)",
                "Re(d + e' - a' - b' - c') > 0 (waived if the second index terminates)",
            ],
            IdentityId::Red3F2 => &["Re(e') > 0", "Re(e - c - c') > 0"],
            IdentityId::Res1 => &["Re(e) > 0", "Re(d + e - a - b - c) > 0"],
            IdentityId::Res2 => &["Re(e - d) > 0", "Re(d + e - a - b - c) > 0"],
            IdentityId::Red3F22 => &["Re(e') > 0", "Re(e) > 0"],
            IdentityId::Res3 => &[
                "Re(d + e - a - b - c) > 0",
                "d - a or d - b is a negative integer",
            ],
            IdentityId::G1 => &[
                "N is a positive integer (N = -a)",
                "Re(e' - N + b + c - 2d) > 0",
            ],
            IdentityId::G2 => &[
                "N is a positive integer (N = -a)",
                "Re(1 - N + b + c - d) > 0",
            ],
            IdentityId::Fi1 => &[
                "N is a positive integer (N = -c)",
                "N' is a nonnegative integer (N' = -c')",
            ],
            IdentityId::Fi2 => &[
                "N is a positive integer, N != 0 (N = -c)",
                "N' is a positive integer (N' = -c')",
            ],
        }
    }
}

impl std::fmt::Display for IdentityId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct RelationCheck {
    pub label: &'static str,
    pub residual: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone)]
pub struct ConditionCheck {
    pub label: &'static str,
    /// Numeric margin for strict Re(·) inequalities; `None` for
    /// integrality conditions.
    pub margin: Option<f64>,
    pub satisfied: bool,
    /// True when a terminating index waives a convergence inequality.
    pub waived: bool,
}

#[derive(Debug, Clone)]
pub struct ConstraintReport {
    pub relations: Vec<RelationCheck>,
    pub conditions: Vec<ConditionCheck>,
    pub applicable: bool,
}

impl std::fmt::Display for ConstraintReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let failed_relations: Vec<_> = self
            .relations
            .iter()
            .filter(|r| !r.satisfied)
            .map(|r| format!("{} (residual {:.3e})", r.label, r.residual))
            .collect();
        let failed_conditions: Vec<_> = self
            .conditions
            .iter()
            .filter(|c| !c.satisfied)
            .map(|c| match c.margin {
                Some(m) => format!("{} (margin {:.6})", c.label, m),
                None => c.label.to_string(),
            })
            .collect();
        if failed_relations.is_empty() && failed_conditions.is_empty() {
            return f.write_str("all relations and conditions hold");
        }
        if !failed_relations.is_empty() {
            write!(f, "failed relations: {}", failed_relations.join("; "))?;
            if !failed_conditions.is_empty() {
                f.write_str("; ")?;
            }
        }
        if !failed_conditions.is_empty() {
            write!(f, "failed conditions: {}", failed_conditions.join("; "))?;
        }
        Ok(())
    }
}

fn rel(label: &'static str, lhs: Scalar, rhs: Scalar) -> RelationCheck {
    let residual = (lhs - rhs).norm();
    RelationCheck {
        label,
        residual,
        satisfied: residual <= RELATION_TOL,
    }
}

fn margin_cond(label: &'static str, margin: f64) -> ConditionCheck {
    ConditionCheck {
        label,
        margin: Some(margin),
        satisfied: margin > 0.0,
        waived: false,
    }
}

fn bool_cond(label: &'static str, ok: bool) -> ConditionCheck {
    ConditionCheck {
        label,
        margin: None,
        satisfied: ok,
        waived: false,
    }
}

fn waivable(label: &'static str, check: crate::kdf::ConvergenceCheck) -> ConditionCheck {
    ConditionCheck {
        label,
        margin: Some(check.margin),
        satisfied: check.passes(),
        waived: check.waived,
    }
}

fn unit_arg_relations(p: &KdfParams) -> Vec<RelationCheck> {
    let one = re(1.0);
    vec![rel("x = 1", p.x, one), rel("y = 1", p.y, one)]
}

/// Checks the identity's parameter relations (to tolerance 1e-9) and its
/// validity conditions (strict). Never fails on inapplicable input; the
/// report carries one flag per relation and condition.
pub fn applicable(id: IdentityId, p: &KdfParams) -> ConstraintReport {
    let one = re(1.0);
    let conv = p.check_convergence();
    let conv1 = waivable(
        "Re(d + e - a - b - c) > 0 (waived if the first index terminates)",
        conv.first,
    );
    let conv2 = waivable(
        "Re(d + e' - a' - b' - c') > 0 (waived if the second index terminates)",
        conv.second,
    );
    let mut relations = unit_arg_relations(p);
    let conditions;
    match id {
        IdentityId::Kdf1 => {
            relations.push(rel("a' = d - a", p.ap, p.d - p.a));
            relations.push(rel(
                "e' = d + e - a - b - c",
                p.ep,
                p.d + p.e - p.a - p.b - p.c,
            ));
            conditions = vec![conv1, conv2, margin_cond("Re(a') > 0", p.ap.re)];
        }
        IdentityId::Kdf2I => {
            relations.push(rel("a' = d - a", p.ap, p.d - p.a));
            relations.push(rel(
                "d + e - a - b - c = 1",
                p.d + p.e - p.a - p.b - p.c,
                one,
            ));
            conditions = vec![
                bool_cond("a is a negative integer", neg_int_order(p.a).is_some()),
                conv2,
            ];
        }
        IdentityId::Kdf2Ii => {
            relations.push(rel("a' = d - a", p.ap, p.d - p.a));
            relations.push(rel(
                "d + e - a - b - c = 1",
                p.d + p.e - p.a - p.b - p.c,
                one,
            ));
            conditions = vec![
                bool_cond("c is a negative integer", neg_int_order(p.c).is_some()),
                bool_cond("c' is a negative integer", neg_int_order(p.cp).is_some()),
            ];
        }
        IdentityId::Kdf3 => {
            relations.push(rel("a' = d - a", p.ap, p.d - p.a));
            relations.push(rel("b' = d - b", p.bp, p.d - p.b));
            conditions = vec![
                bool_cond(
                    "a' or b' is a negative integer",
                    neg_int_order(p.ap).is_some() || neg_int_order(p.bp).is_some(),
                ),
                conv1,
                conv2,
            ];
        }
        IdentityId::Kdf4 => {
            relations.push(rel("a' = d - a", p.ap, p.d - p.a));
            relations.push(rel("b' = d - b", p.bp, p.d - p.b));
            conditions = vec![
                margin_cond("Re(1 - d + c + c') > 0", (one - p.d + p.c + p.cp).re),
                conv1,
                conv2,
            ];
        }
        IdentityId::Red3F2 => {
            relations.push(rel(
                "e' = d + e - a - b - c",
                p.ep,
                p.d + p.e - p.a - p.b - p.c,
            ));
            relations.push(rel("a' = d - a", p.ap, p.d - p.a));
            relations.push(rel("b' = d - b", p.bp, p.d - p.b));
            conditions = vec![
                margin_cond("Re(e') > 0", p.ep.re),
                margin_cond("Re(e - c - c') > 0", (p.e - p.c - p.cp).re),
            ];
        }
        IdentityId::Res1 => {
            relations.push(rel("a' = d - a", p.ap, p.d - p.a));
            relations.push(rel("b' = d - b", p.bp, p.d - p.b));
            relations.push(rel("c' = -c", p.cp, -p.c));
            relations.push(rel(
                "e' = d + e - a - b - c",
                p.ep,
                p.d + p.e - p.a - p.b - p.c,
            ));
            conditions = vec![
                margin_cond("Re(e) > 0", p.e.re),
                margin_cond(
                    "Re(d + e - a - b - c) > 0",
                    (p.d + p.e - p.a - p.b - p.c).re,
                ),
            ];
        }
        IdentityId::Res2 => {
            relations.push(rel("a' = d - a", p.ap, p.d - p.a));
            relations.push(rel("b' = d - b", p.bp, p.d - p.b));
            relations.push(rel("c' = d - c", p.cp, p.d - p.c));
            relations.push(rel(
                "e' = d + e - a - b - c",
                p.ep,
                p.d + p.e - p.a - p.b - p.c,
            ));
            conditions = vec![
                margin_cond("Re(e - d) > 0", (p.e - p.d).re),
                margin_cond(
                    "Re(d + e - a - b - c) > 0",
                    (p.d + p.e - p.a - p.b - p.c).re,
                ),
            ];
        }
        IdentityId::Red3F22 => {
            relations.push(rel(
                "e' = d + e - a - b - c",
                p.ep,
                p.d + p.e - p.a - p.b - p.c,
            ));
            relations.push(rel("a' = d - a", p.ap, p.d - p.a));
            relations.push(rel("d = b + c + b' + c'", p.d, p.b + p.c + p.bp + p.cp));
            conditions = vec![
                margin_cond("Re(e') > 0", p.ep.re),
                margin_cond("Re(e) > 0", p.e.re),
            ];
        }
        IdentityId::Res3 => {
            relations.push(rel("a' = d - a", p.ap, p.d - p.a));
            relations.push(rel("b' = d - b", p.bp, p.d - p.b));
            relations.push(rel("c' = e - c - 1", p.cp, p.e - p.c - one));
            relations.push(rel(
                "e' = d + e - a - b - c",
                p.ep,
                p.d + p.e - p.a - p.b - p.c,
            ));
            conditions = vec![
                margin_cond(
                    "Re(d + e - a - b - c) > 0",
                    (p.d + p.e - p.a - p.b - p.c).re,
                ),
                bool_cond(
                    "d - a or d - b is a negative integer",
                    neg_int_order(p.d - p.a).is_some() || neg_int_order(p.d - p.b).is_some(),
                ),
            ];
        }
        IdentityId::G1 => {
            relations.push(rel(
                "e = 1 - N + b + c - d",
                p.e,
                one + p.a + p.b + p.c - p.d,
            ));
            relations.push(rel("a' = d + N", p.ap, p.d - p.a));
            relations.push(rel("b' = d - b", p.bp, p.d - p.b));
            relations.push(rel("c' = d - c", p.cp, p.d - p.c));
            conditions = vec![
                bool_cond(
                    "N is a positive integer (N = -a)",
                    neg_int_order(p.a).is_some(),
                ),
                margin_cond(
                    "Re(e' - N + b + c - 2d) > 0",
                    (p.ep + p.a + p.b + p.c - p.d * 2.0).re,
                ),
            ];
        }
        IdentityId::G2 => {
            relations.push(rel(
                "e = 1 - N + b + c - d",
                p.e,
                one + p.a + p.b + p.c - p.d,
            ));
            relations.push(rel("a' = d + N", p.ap, p.d - p.a));
            relations.push(rel("b' = d - b", p.bp, p.d - p.b));
            relations.push(rel("e' = 1 + c + c'", p.ep, one + p.c + p.cp));
            conditions = vec![
                bool_cond(
                    "N is a positive integer (N = -a)",
                    neg_int_order(p.a).is_some(),
                ),
                margin_cond(
                    "Re(1 - N + b + c - d) > 0",
                    (one + p.a + p.b + p.c - p.d).re,
                ),
            ];
        }
        IdentityId::Fi1 => {
            relations.push(rel(
                "e = 1 + a + b - N - d",
                p.e,
                one + p.a + p.b + p.c - p.d,
            ));
            relations.push(rel("a' = d - a", p.ap, p.d - p.a));
            relations.push(rel("b' = d - b", p.bp, p.d - p.b));
            relations.push(rel(
                "e' = 1 - a - b - N' + d",
                p.ep,
                one - p.a - p.b + p.cp + p.d,
            ));
            conditions = vec![
                bool_cond(
                    "N is a positive integer (N = -c)",
                    neg_int_order(p.c).is_some(),
                ),
                // N' = 0 is the degenerate Saalschütz case and is accepted
                bool_cond(
                    "N' is a nonnegative integer (N' = -c')",
                    nonpos_int_order(p.cp).is_some(),
                ),
            ];
        }
        IdentityId::Fi2 => {
            relations.push(rel(
                "e = 1 + a + b - N - d",
                p.e,
                one + p.a + p.b + p.c - p.d,
            ));
            relations.push(rel("a' = d - a", p.ap, p.d - p.a));
            relations.push(rel("b' = d - b", p.bp, p.d - p.b));
            relations.push(rel("e' = 1 - N - N'", p.ep, one + p.c + p.cp));
            conditions = vec![
                bool_cond(
                    "N is a positive integer, N != 0 (N = -c)",
                    neg_int_order(p.c).is_some(),
                ),
                bool_cond(
                    "N' is a positive integer (N' = -c')",
                    neg_int_order(p.cp).is_some(),
                ),
            ];
        }
    }
    let applicable = relations.iter().all(|r| r.satisfied)
        && conditions.iter().all(|c| c.satisfied);
    ConstraintReport {
        relations,
        conditions,
        applicable,
    }
}

/// A Gamma-ratio prefactor Γ[numerators / denominators], optionally scaled
/// by a plain scalar factor (the Pochhammer ratios of the `g1`/`g2`/`fi1`/
/// `fi2` closed forms). Carrying the argument lists rather than the value
/// lets the sampler reject parameter sets whose prefactor sits on Gamma
/// poles, where the formula only holds as a directional limit.
#[derive(Debug, Clone)]
pub struct GammaPrefactor {
    pub numerators: Vec<Scalar>,
    pub denominators: Vec<Scalar>,
    pub factor: Scalar,
}

impl GammaPrefactor {
    fn gammas(numerators: Vec<Scalar>, denominators: Vec<Scalar>) -> Self {
        GammaPrefactor {
            numerators,
            denominators,
            factor: re(1.0),
        }
    }

    fn scalar(factor: Scalar) -> Self {
        GammaPrefactor {
            numerators: Vec::new(),
            denominators: Vec::new(),
            factor,
        }
    }

    pub fn value(&self) -> SignedLog {
        SignedLog::from_scalar(self.factor) * gamma_ratio(&self.numerators, &self.denominators)
    }

    /// True when any Gamma argument is a nonpositive integer (an unpaired
    /// pole makes the value Zero or Infinite; a paired one evaluates the
    /// pairing limit, which need not be the limit of the identity).
    pub fn has_pole_arguments(&self) -> bool {
        self.numerators
            .iter()
            .chain(self.denominators.iter())
            .any(|&z| nonpos_int_order(z).is_some())
    }
}

/// Structural form of an identity's right-hand side: a closed prefactor
/// value, a Gamma prefactor times a pFq series, or a sum of two such terms.
#[derive(Debug, Clone)]
pub enum RhsForm {
    Closed(GammaPrefactor),
    Scaled {
        prefactor: GammaPrefactor,
        series: PfqParams,
    },
    Sum2 {
        first: (GammaPrefactor, PfqParams),
        second: (GammaPrefactor, PfqParams),
    },
}

fn poch_ratio(nums: &[Scalar], dens: &[Scalar], n: u64) -> Result<Scalar, EvalError> {
    let den = pochhammer_multi(dens, n);
    if den.norm() == 0.0 {
        return Err(EvalError::infinite(
            "prefactor denominator Pochhammer vanishes",
        ));
    }
    Ok(pochhammer_multi(nums, n) / den)
}

fn kdf2_rhs(p: &KdfParams) -> RhsForm {
    let one = re(1.0);
    let prefactor = GammaPrefactor::gammas(
        vec![
            p.e,
            p.e - p.a - p.b,
            p.e - p.a - p.c,
            p.e - p.b - p.c,
            p.ep,
            p.ep - p.bp - p.cp,
        ],
        vec![
            p.e - p.a,
            p.e - p.b,
            p.e - p.c,
            p.e - p.a - p.b - p.c,
            p.ep - p.bp,
            p.ep - p.cp,
        ],
    );
    let series = PfqParams::new(
        vec![p.a, p.bp, p.cp, p.d - p.b - p.c],
        vec![p.d - p.b, p.d - p.c, one + p.bp + p.cp - p.ep],
        one,
    );
    RhsForm::Scaled { prefactor, series }
}

/// Builds the structural right-hand side of the identity without
/// evaluating any series, so prefactor arguments and series parameters can
/// be inspected.
pub fn rhs_form(id: IdentityId, p: &KdfParams) -> Result<RhsForm, EvalError> {
    let one = re(1.0);
    match id {
        IdentityId::Kdf1 => {
            let u = p.d + p.ep - p.ap - p.bp - p.cp;
            let v = p.d + p.ep - p.ap - p.bp;
            let w = p.d + p.ep - p.ap - p.cp;
            Ok(RhsForm::Scaled {
                prefactor: GammaPrefactor::gammas(vec![p.d, p.ep, u], vec![p.ap, v, w]),
                series: PfqParams::new(
                    vec![p.a, p.e - p.b, p.e - p.c, u],
                    vec![p.e, v, w],
                    one,
                ),
            })
        }
        IdentityId::Kdf2I | IdentityId::Kdf2Ii => Ok(kdf2_rhs(p)),
        IdentityId::Kdf3 => {
            let s = p.d + p.e - p.a - p.b - p.c;
            Ok(RhsForm::Scaled {
                prefactor: GammaPrefactor::gammas(
                    vec![p.d, p.e, p.a + p.b - p.d, s],
                    vec![p.a, p.b, p.e - p.c, p.d + p.e - p.a - p.b],
                ),
                series: PfqParams::new(
                    vec![p.ap, p.bp, p.ep - p.cp, s],
                    vec![p.ep, one + p.d - p.a - p.b, p.d + p.e - p.a - p.b],
                    one,
                ),
            })
        }
        IdentityId::Kdf4 => {
            let s1 = p.d + p.ep - p.ap - p.bp - p.cp;
            let s2 = p.d + p.e - p.a - p.b - p.c;
            let first = (
                GammaPrefactor::gammas(
                    vec![p.d, p.ep, p.ap + p.bp - p.d, s1],
                    vec![p.ap, p.bp, p.ep - p.cp, p.d + p.ep - p.ap - p.bp],
                ),
                PfqParams::new(
                    vec![p.a, p.b, p.e - p.c, s1],
                    vec![p.e, one + p.d - p.ap - p.bp, p.d + p.ep - p.ap - p.bp],
                    one,
                ),
            );
            let second = (
                GammaPrefactor::gammas(
                    vec![p.d, p.e, p.a + p.b - p.d, s2],
                    vec![p.a, p.b, p.e - p.c, p.d + p.e - p.a - p.b],
                ),
                PfqParams::new(
                    vec![p.ap, p.bp, p.ep - p.cp, s2],
                    vec![p.ep, one + p.d - p.a - p.b, p.d + p.e - p.a - p.b],
                    one,
                ),
            );
            Ok(RhsForm::Sum2 { first, second })
        }
        IdentityId::Red3F2 => Ok(RhsForm::Scaled {
            prefactor: GammaPrefactor::gammas(vec![p.e, p.ep], vec![p.e - p.c, p.ep + p.c]),
            series: PfqParams::new(
                vec![p.d - p.a, p.d - p.b, p.c + p.cp],
                vec![p.d, p.ep + p.c],
                one,
            ),
        }),
        IdentityId::Res1 => Ok(RhsForm::Closed(GammaPrefactor::gammas(
            vec![p.e, p.e + p.d - p.a - p.b - p.c],
            vec![p.e - p.c, p.e + p.d - p.a - p.b],
        ))),
        IdentityId::Res2 => Ok(RhsForm::Closed(GammaPrefactor::gammas(
            vec![p.e, p.e + p.d - p.a - p.b - p.c, p.e - p.d],
            vec![p.e - p.a, p.e - p.b, p.e - p.c],
        ))),
        IdentityId::Red3F22 => Ok(RhsForm::Scaled {
            prefactor: GammaPrefactor::gammas(
                vec![p.d, p.e, p.ep],
                vec![p.ap, p.e + p.bp, p.e + p.cp],
            ),
            series: PfqParams::new(
                vec![p.a, p.e - p.b, p.e - p.c],
                vec![p.e + p.bp, p.e + p.cp],
                one,
            ),
        }),
        IdentityId::Res3 => Ok(RhsForm::Closed(GammaPrefactor::gammas(
            vec![
                one - p.a,
                one - p.b,
                p.e,
                p.e - p.d,
                p.d + p.e - p.a - p.b - p.c,
            ],
            vec![
                one - p.d,
                p.e - p.a,
                p.e - p.b,
                p.e - p.c,
                one + p.d - p.a - p.b,
            ],
        ))),
        IdentityId::G1 => {
            let n = neg_int_order(p.a).ok_or_else(|| {
                EvalError::infinite("g1 requires a = -N with N a positive integer")
            })?;
            let ratio = poch_ratio(
                &[p.d - p.b, p.d - p.c, one + p.d - p.ep],
                &[
                    p.d,
                    p.d - p.b - p.c,
                    one + p.d * 2.0 - p.b - p.c - p.ep,
                ],
                n,
            )?;
            Ok(RhsForm::Closed(GammaPrefactor {
                numerators: vec![p.ep, p.ep + p.b + p.c - p.d * 2.0],
                denominators: vec![p.ep + p.b - p.d, p.ep + p.c - p.d],
                factor: ratio,
            }))
        }
        IdentityId::G2 => {
            let n = neg_int_order(p.a).ok_or_else(|| {
                EvalError::infinite("g2 requires a = -N with N a positive integer")
            })?;
            let ratio = poch_ratio(
                &[p.d - p.b, p.d - p.c - p.cp],
                &[p.d, p.d - p.b - p.c],
                n,
            )?;
            Ok(RhsForm::Closed(GammaPrefactor {
                numerators: vec![one + p.c + p.cp, one + p.b + p.c - p.d],
                denominators: vec![one + p.c, one + p.b + p.c + p.cp - p.d],
                factor: ratio,
            }))
        }
        IdentityId::Fi1 => {
            let n = neg_int_order(p.c)
                .ok_or_else(|| EvalError::infinite("fi1 requires c = -N, N >= 1"))?;
            let np = nonpos_int_order(p.cp)
                .ok_or_else(|| EvalError::infinite("fi1 requires c' = -N', N' >= 0"))?;
            let num = pochhammer_multi(&[p.d - p.a, p.d - p.b], n)
                * pochhammer_multi(&[p.a, p.b], np);
            let den = pochhammer(p.d, n + np)
                * pochhammer(p.d - p.a - p.b, n)
                * pochhammer(p.a + p.b - p.d, np);
            if den.norm() == 0.0 {
                return Err(EvalError::infinite(
                    "prefactor denominator Pochhammer vanishes",
                ));
            }
            Ok(RhsForm::Closed(GammaPrefactor::scalar(num / den)))
        }
        IdentityId::Fi2 => {
            let n = neg_int_order(p.c)
                .ok_or_else(|| EvalError::infinite("fi2 requires c = -N, N >= 1"))?;
            let np = neg_int_order(p.cp)
                .ok_or_else(|| EvalError::infinite("fi2 requires c' = -N', N' >= 1"))?;
            let num = pochhammer_multi(&[p.d - p.a, p.d - p.b], n + np);
            let den = pochhammer(p.d, n + np)
                * pochhammer(p.d - p.a - p.b, n)
                * pochhammer(re(n as f64), np);
            if den.norm() == 0.0 {
                return Err(EvalError::infinite(
                    "prefactor denominator Pochhammer vanishes",
                ));
            }
            Ok(RhsForm::Closed(GammaPrefactor::scalar(num / den)))
        }
    }
}

fn closed_value(sl: SignedLog) -> Result<SeriesValue, EvalError> {
    let value = sl.to_scalar()?;
    Ok(SeriesValue {
        value,
        abs_err: value.norm() * 1e-13,
        terms: 0,
        status: SeriesStatus::TerminatedExactly,
    })
}

fn scaled_value(
    prefactor: SignedLog,
    series: &PfqParams,
    tol: f64,
) -> Result<SeriesValue, EvalError> {
    if prefactor.is_infinite() {
        return Err(EvalError::infinite("Gamma prefactor has kind Infinite"));
    }
    if prefactor.is_zero() {
        // a vanishing prefactor annihilates the term; the series need not
        // converge in the limit the formula is read in
        return Ok(SeriesValue {
            value: re(0.0),
            abs_err: 0.0,
            terms: 0,
            status: SeriesStatus::TerminatedExactly,
        });
    }
    let pref = prefactor.to_scalar()?;
    let sv = eval_pfq(series, tol, DEFAULT_MAX_TERMS)?;
    Ok(SeriesValue {
        value: pref * sv.value,
        abs_err: pref.norm() * sv.abs_err + sv.value.norm() * pref.norm() * 1e-13,
        terms: sv.terms,
        status: sv.status,
    })
}

/// Evaluates the identity's right-hand side: the closed form, or the Gamma
/// prefactor times its 4F3/3F2 series (for `kdf4`, the sum of both displayed
/// terms).
pub fn rhs_value(id: IdentityId, p: &KdfParams, tol: f64) -> Result<SeriesValue, EvalError> {
    match rhs_form(id, p)? {
        RhsForm::Closed(pref) => closed_value(pref.value()),
        RhsForm::Scaled { prefactor, series } => scaled_value(prefactor.value(), &series, tol),
        RhsForm::Sum2 { first, second } => {
            let a = scaled_value(first.0.value(), &first.1, tol)?;
            let b = scaled_value(second.0.value(), &second.1, tol)?;
            Ok(SeriesValue {
                value: a.value + b.value,
                abs_err: a.abs_err + b.abs_err,
                terms: a.terms + b.terms,
                status: if a.status == SeriesStatus::TerminatedExactly
                    && b.status == SeriesStatus::TerminatedExactly
                {
                    SeriesStatus::TerminatedExactly
                } else {
                    SeriesStatus::Converged
                },
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Float,
    Exact,
}

impl Backend {
    pub fn as_str(&self) -> &'static str {
        match self {
            Backend::Float => "float",
            Backend::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone)]
pub struct IdentityEvaluation {
    pub id: IdentityId,
    pub lhs: SeriesValue,
    pub rhs: SeriesValue,
    /// |lhs - rhs| / max(|lhs|, |rhs|, tiny); exactly 0.0 when the exact
    /// backend proves equality.
    pub rel_err: f64,
    pub backend: Backend,
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("parameters are not applicable to {id}: {report}")]
    NotApplicable {
        id: IdentityId,
        report: Box<ConstraintReport>,
    },
    #[error("left-hand side evaluation failed: {0}")]
    Lhs(EvalError),
    #[error("right-hand side evaluation failed: {0}")]
    Rhs(EvalError),
    #[error("exact verification unavailable: {0}")]
    ExactUnavailable(String),
}

pub fn relative_error(lhs: Scalar, rhs: Scalar) -> f64 {
    (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1e-300)
}

/// The ids whose right-hand side is a pure Pochhammer ratio, hence exactly
/// computable alongside a doubly terminating left-hand side.
fn exact_capable(id: IdentityId, p: &KdfParams) -> bool {
    matches!(id, IdentityId::Fi1 | IdentityId::Fi2)
        && [p.a, p.b, p.c, p.e, p.ap, p.bp, p.cp, p.ep, p.d, p.x, p.y]
            .iter()
            .all(|s| s.im == 0.0)
}

fn exact_rhs(id: IdentityId, q: &ExactKdfParams) -> Result<BigRational, EvalError> {
    let n = exact::nonpos_int_order(&q.c)
        .filter(|&n| n >= 1)
        .ok_or_else(|| EvalError::ExactUnsupported {
            reason: format!("{id} requires c = -N with N >= 1"),
        })?;
    let np = exact::nonpos_int_order(&q.cp).ok_or_else(|| EvalError::ExactUnsupported {
        reason: format!("{id} requires c' = -N' with integer N'"),
    })?;
    let dab = &q.d - &q.a - &q.b;
    match id {
        IdentityId::Fi1 => {
            let num = exact::poch(&(&q.d - &q.a), n)
                * exact::poch(&(&q.d - &q.b), n)
                * exact::poch(&q.a, np)
                * exact::poch(&q.b, np);
            let den = exact::poch(&q.d, n + np)
                * exact::poch(&dab, n)
                * exact::poch(&(-&dab), np);
            Ok(num / den)
        }
        IdentityId::Fi2 => {
            let num = exact::poch(&(&q.d - &q.a), n + np) * exact::poch(&(&q.d - &q.b), n + np);
            let den = exact::poch(&q.d, n + np)
                * exact::poch(&dab, n)
                * exact::poch(&exact::from_int(n as i64), np);
            Ok(num / den)
        }
        _ => Err(EvalError::ExactUnsupported {
            reason: format!("{id} has no Pochhammer-only right-hand side"),
        }),
    }
}

/// Exact verification on rational parameters; both sides are computed in
/// exact arithmetic and `rel_err` is 0.0 iff they are equal as rationals.
/// Available only for the Pochhammer-ratio summation ids on a doubly
/// terminating left side.
pub fn verify_exact(
    id: IdentityId,
    q: &ExactKdfParams,
) -> Result<IdentityEvaluation, VerifyError> {
    let lhs = exact::kdf_doubly_terminating(q).map_err(VerifyError::Lhs)?;
    let rhs = exact_rhs(id, q).map_err(VerifyError::Rhs)?;
    let lhs_f = re(exact::to_f64(&lhs));
    let rhs_f = re(exact::to_f64(&rhs));
    let rel_err = if lhs == rhs {
        0.0
    } else {
        relative_error(lhs_f, rhs_f)
    };
    let sv = |v: Scalar| SeriesValue {
        value: v,
        abs_err: 0.0,
        terms: 0,
        status: SeriesStatus::TerminatedExactly,
    };
    Ok(IdentityEvaluation {
        id,
        lhs: sv(lhs_f),
        rhs: sv(rhs_f),
        rel_err,
        backend: Backend::Exact,
    })
}

fn verify_float(
    id: IdentityId,
    p: &KdfParams,
    tol: f64,
) -> Result<IdentityEvaluation, VerifyError> {
    let lhs = eval_kdf(p, tol, DEFAULT_MAX_DIAGONALS).map_err(VerifyError::Lhs)?;
    let rhs = rhs_value(id, p, tol).map_err(VerifyError::Rhs)?;
    Ok(IdentityEvaluation {
        id,
        lhs,
        rhs,
        rel_err: relative_error(lhs.value, rhs.value),
        backend: Backend::Float,
    })
}

/// Verifies the identity on the given parameters: the left-hand side is the
/// brute-force double sum, the right-hand side the registered closed form or
/// prefactor-times-series. The exact backend is selected automatically when
/// both sides are exactly computable (doubly terminating left side and a
/// Pochhammer-only right side).
pub fn verify(
    id: IdentityId,
    p: &KdfParams,
    tol: f64,
) -> Result<IdentityEvaluation, VerifyError> {
    let report = applicable(id, p);
    if !report.applicable {
        return Err(VerifyError::NotApplicable {
            id,
            report: Box::new(report),
        });
    }
    if exact_capable(id, p) {
        let q = ExactKdfParams::from_float(p).ok_or_else(|| {
            VerifyError::ExactUnavailable("parameters must be real rationals".into())
        })?;
        verify_exact(id, &q)
    } else {
        verify_float(id, p, tol)
    }
}

/// Verifies on the requested backend; `Exact` fails when either side is not
/// exactly computable.
pub fn verify_with_backend(
    id: IdentityId,
    p: &KdfParams,
    tol: f64,
    backend: Backend,
) -> Result<IdentityEvaluation, VerifyError> {
    let report = applicable(id, p);
    if !report.applicable {
        return Err(VerifyError::NotApplicable {
            id,
            report: Box::new(report),
        });
    }
    match backend {
        Backend::Float => verify_float(id, p, tol),
        Backend::Exact => {
            if !exact_capable(id, p) {
                return Err(VerifyError::ExactUnavailable(format!(
                    "{id} is not exactly computable on these parameters"
                )));
            }
            let q = ExactKdfParams::from_float(p).ok_or_else(|| {
                VerifyError::ExactUnavailable("parameters must be real rationals".into())
            })?;
            verify_exact(id, &q)
        }
    }
}

/// The single-sum intermediate of the `kdf1` derivation: after the Beta and
/// Euler steps the double series collapses to
///
/// ```text
/// Γ[d, e' / a', a+e'] · sum_m (a, e-b, e-c)_m / ((e, a+e')_m m!) · 2F1(b', c'; a+e'+m; 1)
/// ```
///
/// with the inner 2F1 summed by Gauss's theorem. Under the `kdf1` relations
/// this equals both sides of the identity.
pub fn kdf1_intermediate(p: &KdfParams, tol: f64) -> Result<SeriesValue, EvalError> {
    let pref = gamma_ratio(&[p.d, p.ep], &[p.ap, p.a + p.ep]);
    let pref = pref.to_scalar()?;
    let mut acc = CompensatedSum::new();
    let mut coeff = re(1.0);
    let mut below = 0u32;
    let mut m = 0u64;
    loop {
        let gauss = gauss_2f1_unit(p.bp, p.cp, p.a + p.ep + m as f64).to_scalar()?;
        let term = coeff * gauss;
        acc.add(term);
        let scale = acc.value().norm().max(f64::MIN_POSITIVE);
        if term.norm() <= tol * scale {
            below += 1;
            if below >= 3 {
                return Ok(SeriesValue {
                    value: pref * acc.value(),
                    abs_err: pref.norm() * term.norm() * ((m + 1) as f64).powi(2),
                    terms: (m + 1) as usize,
                    status: SeriesStatus::Converged,
                });
            }
        } else {
            below = 0;
        }
        if m as usize >= DEFAULT_MAX_TERMS {
            return Err(EvalError::no_convergence(
                "intermediate single sum did not reach its stop rule",
            ));
        }
        let mf = m as f64;
        coeff *= (p.a + mf) * (p.e - p.b + mf) * (p.e - p.c + mf)
            / ((p.e + mf) * (p.a + p.ep + mf) * (mf + 1.0));
        m += 1;
    }
}
