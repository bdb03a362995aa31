//! Numerical and exact evaluation of the Kampé de Fériet double
//! hypergeometric series F(0:3;1:1)(x,y) and of generalized pFq series at
//! unit argument, together with a registry of transformation and summation
//! identities for F(1,1) and a verification harness for them.
//!
//! Layout:
//! - [`scalar`], [`signed_log`], [`gamma`]: the numeric kernel — complex
//!   scalars, signed-log arithmetic, Pochhammer symbols, log-Gamma, and
//!   pole-aware Gamma-product ratios.
//! - [`series`]: pFq evaluation plus the classical closed forms (Gauss,
//!   Vandermonde, Dixon, Pfaff-Saalschütz) and transformations (Euler,
//!   series reversal, Slater).
//! - [`kdf`]: brute-force evaluation of the double series in float
//!   arithmetic.
//! - [`exact`]: the exact rational backend for terminating series.
//! - [`identities`] and [`sampler`]: the identity registry — applicability
//!   checks, right-hand sides, verification, and deterministic parameter
//!   sampling.

pub mod error;
pub mod exact;
pub mod gamma;
pub mod identities;
pub mod kdf;
pub mod sampler;
pub mod scalar;
pub mod series;
pub mod signed_log;

pub use error::EvalError;
pub use gamma::{beta, gamma_ratio, log_gamma, pochhammer, pochhammer_multi};
pub use identities::{
    applicable, rhs_form, rhs_value, verify, verify_exact, verify_with_backend, Backend,
    ConditionCheck, ConstraintReport, GammaPrefactor, IdentityEvaluation, IdentityId,
    RelationCheck, RhsForm, VerifyError,
};
pub use kdf::{
    eval_kdf, ConvergenceCheck, ConvergenceReport, KdfParams, TerminationProfile,
    DEFAULT_MAX_DIAGONALS,
};
pub use sampler::{sample_params, SamplerError};
pub use scalar::Scalar;
pub use series::{
    dixon_3f2, eval_pfq, euler_2f1_transform, gauss_2f1_unit, pfaff_saalschutz, PfqParams,
    reverse_terminating_4f3, slater_3f2_transform, vandermonde, SeriesStatus, SeriesValue,
    DEFAULT_MAX_TERMS, DEFAULT_TOL,
};
pub use signed_log::{Kind, SignedLog};
