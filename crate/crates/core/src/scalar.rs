//! Complex double-precision scalars and small numeric helpers shared by the
//! series evaluators.

use num_complex::Complex64;

/// All series parameters and values are complex double-precision scalars.
/// The exact backend (see [`crate::exact`]) restricts to rationals on the
/// real axis.
pub type Scalar = Complex64;

/// Tolerance for deciding that a parameter is meant to be an integer.
/// Parameters arrive from exact user input or rational samplers, so this
/// separates intent from rounding.
pub const INT_DETECTION_TOL: f64 = 1e-9;

/// Tolerance for treating |z| as exactly 1 when classifying arguments.
pub const UNIT_ARG_TOL: f64 = 1e-12;

pub fn re(x: f64) -> Scalar {
    Scalar::new(x, 0.0)
}

/// If `z` is (within [`INT_DETECTION_TOL`]) a nonpositive integer `-n`,
/// returns `n >= 0`.
pub fn nonpos_int_order(z: Scalar) -> Option<u64> {
    if z.im.abs() > INT_DETECTION_TOL {
        return None;
    }
    let r = z.re.round();
    if r > 0.5 || (z.re - r).abs() > INT_DETECTION_TOL {
        return None;
    }
    Some((-r) as u64)
}

/// If `z` is a negative integer `-n`, returns `n >= 1`.
pub fn neg_int_order(z: Scalar) -> Option<u64> {
    match nonpos_int_order(z) {
        Some(0) => None,
        other => other,
    }
}

/// Kahan–Neumaier compensated accumulator, applied component-wise to
/// complex values. Keeps million-term unit-argument sums near one ulp.
#[derive(Debug, Clone, Default)]
pub struct CompensatedSum {
    sum: Scalar,
    comp: Scalar,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: Scalar) {
        let (sr, cr) = neumaier(self.sum.re, term.re);
        let (si, ci) = neumaier(self.sum.im, term.im);
        self.sum = Scalar::new(sr, si);
        self.comp += Scalar::new(cr, ci);
    }

    pub fn value(&self) -> Scalar {
        self.sum + self.comp
    }
}

fn neumaier(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let c = if a.abs() >= b.abs() {
        (a - s) + b
    } else {
        (b - s) + a
    };
    (s, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_nonpositive_integers() {
        assert_eq!(nonpos_int_order(re(0.0)), Some(0));
        assert_eq!(nonpos_int_order(re(-3.0)), Some(3));
        assert_eq!(nonpos_int_order(re(-3.0 + 5e-10)), Some(3));
        assert_eq!(nonpos_int_order(re(1.0)), None);
        assert_eq!(nonpos_int_order(re(-2.5)), None);
        assert_eq!(nonpos_int_order(Scalar::new(-2.0, 0.1)), None);
        assert_eq!(neg_int_order(re(0.0)), None);
        assert_eq!(neg_int_order(re(-1.0)), Some(1));
    }

    #[test]
    fn compensated_sum_recovers_cancelled_tail() {
        let mut acc = CompensatedSum::new();
        acc.add(re(1e16));
        acc.add(re(0.25));
        acc.add(re(0.25));
        acc.add(re(-1e16));
        assert_eq!(acc.value().re, 0.5);
    }
}
