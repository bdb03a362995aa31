use thiserror::Error;

/// Errors produced while evaluating series, Gamma ratios, or identity sides.
#[derive(Debug, Clone, Error)]
pub enum EvalError {
    /// A denominator parameter is a nonpositive integer and the series does
    /// not terminate strictly before the corresponding Pochhammer factor
    /// vanishes (the pole-before-termination rule).
    #[error(
        "denominator parameter {param} is a nonpositive integer of order {order} and the series \
         {} -- violates the pole-before-termination rule",
        match .termination {
            Some(n) => format!("terminates only at index {n} > {order}"),
            None => "does not terminate".to_string(),
        }
    )]
    DenominatorPole {
        param: String,
        order: u64,
        termination: Option<u64>,
    },

    /// The series cannot be summed: the unit-argument convergence condition
    /// fails, the argument lies outside the supported region, or the term
    /// budget was exhausted before the stop rule triggered.
    #[error("series did not converge: {reason}")]
    NoConvergence { reason: String },

    /// The value is infinite (an unpaired Gamma pole in a numerator, or a
    /// vanishing Pochhammer factor in a prefactor denominator).
    #[error("result is infinite: {context}")]
    InfiniteValue { context: String },

    /// A magnitude left the double-precision range while converting a
    /// signed-log value back to a scalar.
    #[error("magnitude overflows the double range (log|x| = {log_abs})")]
    Overflow { log_abs: f64 },

    /// The exact rational backend cannot handle this input.
    #[error("exact evaluation unavailable: {reason}")]
    ExactUnsupported { reason: String },
}

impl EvalError {
    pub fn no_convergence(reason: impl Into<String>) -> Self {
        EvalError::NoConvergence {
            reason: reason.into(),
        }
    }

    pub fn infinite(context: impl Into<String>) -> Self {
        EvalError::InfiniteValue {
            context: context.into(),
        }
    }
}
