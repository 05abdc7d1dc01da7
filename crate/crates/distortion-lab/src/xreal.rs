//! Extended-real conventions shared across the crate.
//!
//! Values in `[0, ∞]` are carried as `f64` with `f64::INFINITY` as the
//! top element. Two conventions are fixed here once and used everywhere:
//!
//! * `∞ · 0 = 0` for measure-weighted sums (`mul_measure`): an infinite
//!   integrand on a null set contributes nothing;
//! * comparisons treat `∞ ≤ ∞` as true, so an inequality between two
//!   divergent integrals holds.

/// Measure-weighted product with the integration convention `∞ · 0 = 0`.
///
/// `weight` is a measure-like factor (volume, weight times volume); a zero
/// weight annihilates an infinite value.
pub fn mul_measure(value: f64, weight: f64) -> f64 {
    if weight == 0.0 {
        0.0
    } else {
        value * weight
    }
}

/// `a ≤ b + tol` on the extended reals.
///
/// Infinite `b` absorbs everything; infinite `a` only fits under infinite `b`.
pub fn le_with_tol(a: f64, b: f64, tol: f64) -> bool {
    if b.is_infinite() && b > 0.0 {
        return true;
    }
    if a.is_infinite() && a > 0.0 {
        return false;
    }
    a <= b + tol
}

/// Format a float with 17 significant digits, round-trip safe.
///
/// Infinities map to the strings `"inf"` / `"-inf"` so reports remain
/// valid JSON; NaN (never produced by the library on valid inputs)
/// maps to `"nan"`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "\"nan\"".to_string()
    } else if x == f64::INFINITY {
        "\"inf\"".to_string()
    } else if x == f64::NEG_INFINITY {
        "\"-inf\"".to_string()
    } else {
        format!("{:.16e}", x)
    }
}

/// Neumaier compensated summation.
///
/// Reduction order is fixed by the caller; the compensation keeps the
/// result stable to ~1 ulp regardless of the magnitude spread.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        if x.is_infinite() {
            self.sum += x;
            return;
        }
        if self.sum.is_infinite() {
            return;
        }
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        if self.sum.is_infinite() {
            self.sum
        } else {
            self.sum + self.compensation
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_value_on_null_set_contributes_nothing() {
        assert_eq!(mul_measure(f64::INFINITY, 0.0), 0.0);
        assert_eq!(mul_measure(f64::INFINITY, 2.0), f64::INFINITY);
        assert_eq!(mul_measure(3.0, 0.5), 1.5);
    }

    #[test]
    fn extended_comparisons() {
        assert!(le_with_tol(f64::INFINITY, f64::INFINITY, 0.0));
        assert!(!le_with_tol(f64::INFINITY, 5.0, 1.0));
        assert!(le_with_tol(1.0, f64::INFINITY, 0.0));
    }

    #[test]
    fn compensated_sum_handles_magnitude_spread() {
        let mut s = CompensatedSum::new();
        s.add(1e16);
        for _ in 0..10 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.total(), 10.0);
    }

    #[test]
    fn float_formatting_is_17_digits() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(f64::INFINITY), "\"inf\"");
    }
}
