//! Signed-logarithm values: a magnitude stored as the log of the absolute
//! value plus a unit-modulus phase (a plain sign for real inputs), with
//! explicit `Zero` and `Infinite` states. This is the result type of
//! Gamma-product ratios, where intermediate magnitudes routinely leave the
//! double range.

use crate::error::EvalError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Finite,
    Zero,
    Infinite,
}

#[derive(Debug, Clone, Copy)]
pub struct SignedLog {
    log_abs: f64,
    phase: Scalar,
    kind: Kind,
}

impl SignedLog {
    pub fn zero() -> Self {
        SignedLog {
            log_abs: f64::NEG_INFINITY,
            phase: Scalar::new(1.0, 0.0),
            kind: Kind::Zero,
        }
    }

    pub fn infinite() -> Self {
        SignedLog {
            log_abs: f64::INFINITY,
            phase: Scalar::new(1.0, 0.0),
            kind: Kind::Infinite,
        }
    }

    pub fn one() -> Self {
        Self::from_log(0.0, Scalar::new(1.0, 0.0))
    }

    /// Build a finite value from its log-magnitude and (not necessarily
    /// normalized) phase.
    pub fn from_log(log_abs: f64, phase: Scalar) -> Self {
        let norm = phase.norm();
        let phase = if norm == 0.0 {
            Scalar::new(1.0, 0.0)
        } else {
            phase / norm
        };
        SignedLog {
            log_abs,
            phase,
            kind: Kind::Finite,
        }
    }

    /// Finite real value from log-magnitude and sign (+1 or -1).
    pub fn from_log_sign(log_abs: f64, sign: f64) -> Self {
        SignedLog {
            log_abs,
            phase: Scalar::new(sign.signum(), 0.0),
            kind: Kind::Finite,
        }
    }

    pub fn from_scalar(s: Scalar) -> Self {
        if s.re == 0.0 && s.im == 0.0 {
            return Self::zero();
        }
        if s.im == 0.0 {
            // keep the sign exact for real inputs
            return Self::from_log_sign(s.re.abs().ln(), s.re.signum());
        }
        let n = s.norm();
        Self::from_log(n.ln(), s / n)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn is_zero(&self) -> bool {
        self.kind == Kind::Zero
    }

    pub fn is_infinite(&self) -> bool {
        self.kind == Kind::Infinite
    }

    pub fn is_finite(&self) -> bool {
        self.kind == Kind::Finite
    }

    pub fn log_abs(&self) -> f64 {
        self.log_abs
    }

    pub fn phase(&self) -> Scalar {
        self.phase
    }

    /// Convert back to a scalar. `Infinite` values and magnitudes outside
    /// the double range are reported as errors rather than encoded as ±inf.
    pub fn to_scalar(&self) -> Result<Scalar, EvalError> {
        match self.kind {
            Kind::Zero => Ok(Scalar::new(0.0, 0.0)),
            Kind::Infinite => Err(EvalError::infinite("signed-log value has kind Infinite")),
            Kind::Finite => {
                if self.log_abs > 709.0 {
                    return Err(EvalError::Overflow {
                        log_abs: self.log_abs,
                    });
                }
                Ok(self.phase * self.log_abs.exp())
            }
        }
    }

    pub fn recip(&self) -> Self {
        match self.kind {
            Kind::Zero => Self::infinite(),
            Kind::Infinite => Self::zero(),
            Kind::Finite => Self::from_log(-self.log_abs, self.phase.conj()),
        }
    }
}

impl std::ops::Mul for SignedLog {
    type Output = SignedLog;

    fn mul(self, rhs: SignedLog) -> SignedLog {
        use Kind::*;
        match (self.kind, rhs.kind) {
            // Zero * Infinite is indeterminate; poison it as Infinite so it
            // surfaces as an explicit error downstream.
            (Zero, Infinite) | (Infinite, Zero) | (Infinite, _) | (_, Infinite) => {
                Self::infinite()
            }
            (Zero, _) | (_, Zero) => Self::zero(),
            (Finite, Finite) => Self::from_log(self.log_abs + rhs.log_abs, self.phase * rhs.phase),
        }
    }
}

impl std::ops::Div for SignedLog {
    type Output = SignedLog;

    fn div(self, rhs: SignedLog) -> SignedLog {
        self * rhs.recip()
    }
}

impl std::ops::MulAssign for SignedLog {
    fn mul_assign(&mut self, rhs: SignedLog) {
        *self = *self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::re;
    use proptest::prelude::*;

    #[test]
    fn scalar_round_trip_preserves_sign() {
        let v = SignedLog::from_scalar(re(-24.0));
        assert_eq!(v.phase(), re(-1.0));
        let back = v.to_scalar().unwrap();
        assert!((back.re + 24.0).abs() <= 24.0 * 1e-15);
        assert_eq!(back.im, 0.0);
    }

    #[test]
    fn zero_and_infinite_states() {
        assert!(SignedLog::from_scalar(re(0.0)).is_zero());
        assert_eq!(SignedLog::zero().to_scalar().unwrap(), re(0.0));
        assert!(SignedLog::infinite().to_scalar().is_err());
        assert!(SignedLog::zero().recip().is_infinite());
    }

    #[test]
    fn overflow_is_an_error_not_an_inf() {
        let huge = SignedLog::from_log_sign(800.0, 1.0);
        assert!(matches!(
            huge.to_scalar(),
            Err(EvalError::Overflow { .. })
        ));
    }

    proptest! {
        // round-trip: to_scalar(from_scalar(s)) = s within ulp-scale error
        #[test]
        fn round_trip(x in -1e6f64..1e6, y in -1e6f64..1e6) {
            prop_assume!(x != 0.0 || y != 0.0);
            let s = Scalar::new(x, y);
            let back = SignedLog::from_scalar(s).to_scalar().unwrap();
            prop_assert!((back - s).norm() <= 1e-13 * s.norm());
        }

        // multiplication is associative and commutative on finite values
        #[test]
        fn mul_assoc_comm(
            a in -50f64..50.0, b in -50f64..50.0, c in -50f64..50.0,
            pa in -3.0f64..3.0, pb in -3.0f64..3.0, pc in -3.0f64..3.0,
        ) {
            let u = SignedLog::from_log(a, Scalar::new(pa.cos(), pa.sin()));
            let v = SignedLog::from_log(b, Scalar::new(pb.cos(), pb.sin()));
            let w = SignedLog::from_log(c, Scalar::new(pc.cos(), pc.sin()));
            let lhs = (u * v) * w;
            let rhs = u * (v * w);
            prop_assert!((lhs.log_abs() - rhs.log_abs()).abs() <= 1e-13 * (1.0 + lhs.log_abs().abs()));
            prop_assert!((lhs.phase() - rhs.phase()).norm() <= 1e-13);
            let uv = u * v;
            let vu = v * u;
            prop_assert!((uv.log_abs() - vu.log_abs()).abs() <= 1e-13 * (1.0 + uv.log_abs().abs()));
            prop_assert!((uv.phase() - vu.phase()).norm() <= 1e-13);
        }
    }
}
