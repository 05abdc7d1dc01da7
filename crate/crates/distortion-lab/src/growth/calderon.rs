//! Calderón-type improper integrals of growth functions.
//!
//! Two equivalent forms are implemented: the ratio form
//! `∫ (t/g(t))^α dt` and the derivative form `∫ dt/[g′₊(t)]^α`.
//! Symbolic tail pieces get certified convergence verdicts; values of
//! convergent integrals combine adaptive quadrature on the head with a
//! closed-form or substitution-based tail.

use super::{GrowthError, GrowthFunction, PieceKind};
use crate::quad;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailVerdict {
    Converges,
    Diverges,
    /// Tabulated tails extrapolate; no certificate is issued.
    Inconclusive,
}

/// Certified convergence classification of `∫^∞ (t/g(t))^α dt`
/// (equivalently of the derivative form, by the two-sided slope bound).
pub fn classify_calderon_tail(g: &GrowthFunction, alpha: f64) -> TailVerdict {
    assert!(alpha > 0.0);
    if g.domain_end().is_finite() {
        // The integrand vanishes where g = ∞; only a finite head remains.
        return TailVerdict::Converges;
    }
    let last = &g.pieces().last().expect("validated pieces").kind;
    // Effective growth order: g ~ c·t^p·log^q asymptotically.
    let (p, q) = match *last {
        PieceKind::Constant(_) => (0.0, 0.0),
        PieceKind::Linear { slope, .. } => {
            if slope == 0.0 {
                (0.0, 0.0)
            } else {
                (1.0, 0.0)
            }
        }
        PieceKind::Power { coeff, exponent, .. } => {
            if coeff == 0.0 {
                (0.0, 0.0)
            } else {
                (exponent, 0.0)
            }
        }
        PieceKind::ShiftedPower {
            coeff,
            inner,
            outer,
            ..
        } => {
            if coeff == 0.0 {
                (0.0, 0.0)
            } else {
                (inner * outer, 0.0)
            }
        }
        PieceKind::LogPower {
            coeff,
            power,
            log_exp,
            ..
        } => {
            if coeff == 0.0 {
                (0.0, 0.0)
            } else {
                (power, log_exp)
            }
        }
        PieceKind::ExpPower {
            coeff,
            rate,
            exponent,
            ..
        } => {
            if coeff > 0.0 && rate > 0.0 && exponent > 0.0 {
                return TailVerdict::Converges;
            }
            (0.0, 0.0)
        }
        PieceKind::Tabulated { .. } => return TailVerdict::Inconclusive,
    };
    // ∫ t^{α(1−p)} log^{−αq} dt converges iff α(p−1) > 1, or
    // α(p−1) = 1 with αq > 1.
    let s = alpha * (p - 1.0);
    if s > 1.0 || (s == 1.0 && alpha * q > 1.0) {
        TailVerdict::Converges
    } else {
        TailVerdict::Diverges
    }
}

/// `∫_{t_star}^∞ (t/g(t))^α dt` as an extended real.
///
/// Certified-divergent tails return `+∞`; tabulated tails return
/// `Err(InconclusiveTail)` rather than a guessed verdict.
pub fn calderon_integral(
    g: &GrowthFunction,
    alpha: f64,
    t_star: f64,
) -> Result<f64, GrowthError> {
    if !(alpha > 0.0) {
        return Err(GrowthError::Precondition("alpha must be positive".into()));
    }
    let g_star = g.evaluate(t_star);
    if !(g_star > 0.0) {
        return Err(GrowthError::Precondition(format!(
            "g(t_star) must be positive, got g({t_star}) = {g_star}"
        )));
    }
    let integrand = move |t: f64| {
        let v = g.evaluate(t);
        if v.is_infinite() {
            0.0
        } else {
            (t / v).powf(alpha)
        }
    };
    if g.domain_end().is_finite() {
        let hi = g.domain_end();
        if t_star >= hi {
            return Ok(0.0);
        }
        return Ok(quad::integrate(&integrand, t_star, hi, 1e-10));
    }
    match classify_calderon_tail(g, alpha) {
        TailVerdict::Diverges => Ok(f64::INFINITY),
        TailVerdict::Inconclusive => Err(GrowthError::InconclusiveTail),
        TailVerdict::Converges => {
            let last = g.pieces().last().unwrap();
            let from = t_star.max(last.lo).max(1e-12);
            let head = if t_star < from {
                quad::integrate(&integrand, t_star, from, 1e-10)
            } else {
                0.0
            };
            // Pure power tails have a closed form; everything else goes
            // through the 1/t substitution.
            let tail = match last.kind {
                PieceKind::Power {
                    coeff,
                    exponent,
                    offset,
                } if offset == 0.0 && coeff > 0.0 => {
                    let s = alpha * (exponent - 1.0);
                    coeff.powf(-alpha) * from.powf(1.0 - s) / (s - 1.0)
                }
                _ => quad::integrate_to_infinity(&integrand, from, 1e-10),
            };
            Ok(head + tail)
        }
    }
}

/// `∫_{t_star}^∞ dt/[g′₊(t)]^α`, the derivative form of the same
/// condition.
pub fn calderon_derivative_integral(
    g: &GrowthFunction,
    alpha: f64,
    t_star: f64,
) -> Result<f64, GrowthError> {
    if !(alpha > 0.0) {
        return Err(GrowthError::Precondition("alpha must be positive".into()));
    }
    let integrand = move |t: f64| {
        let d = g.right_derivative_raw(t);
        if d.is_infinite() {
            0.0
        } else if d <= 0.0 {
            f64::INFINITY
        } else {
            d.powf(-alpha)
        }
    };
    if g.domain_end().is_finite() {
        let hi = g.domain_end();
        if t_star >= hi {
            return Ok(0.0);
        }
        return Ok(quad::integrate(&integrand, t_star, hi, 1e-10));
    }
    match classify_calderon_tail(g, alpha) {
        TailVerdict::Diverges => Ok(f64::INFINITY),
        TailVerdict::Inconclusive => Err(GrowthError::InconclusiveTail),
        TailVerdict::Converges => {
            let last = g.pieces().last().unwrap();
            let from = t_star.max(last.lo).max(1e-12);
            let head = if t_star < from {
                quad::integrate(&integrand, t_star, from, 1e-10)
            } else {
                0.0
            };
            let tail = match last.kind {
                PieceKind::Power { coeff, exponent, .. } if coeff > 0.0 && exponent > 1.0 => {
                    let c = coeff * exponent;
                    let s = alpha * (exponent - 1.0);
                    c.powf(-alpha) * from.powf(1.0 - s) / (s - 1.0)
                }
                _ => quad::integrate_to_infinity(&integrand, from, 1e-10),
            };
            Ok(head + tail)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartic_closed_form() {
        // ∫_1^∞ (t/t⁴)^0.4 dt = ∫ t^{-1.2} = 5
        let g = GrowthFunction::monomial(4.0);
        let v = calderon_integral(&g, 0.4, 1.0).unwrap();
        assert!((v - 5.0).abs() < 1e-6, "got {v}");
    }

    #[test]
    fn linear_always_diverges() {
        let g = GrowthFunction::identity();
        assert_eq!(calderon_integral(&g, 0.7, 1.0).unwrap(), f64::INFINITY);
        assert_eq!(calderon_integral(&g, 3.0, 1.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn boundary_exponent_diverges() {
        // g = t², α = 1/2: ∫ t^{-1/2} dt = ∞
        let g = GrowthFunction::monomial(2.0);
        assert_eq!(calderon_integral(&g, 0.5, 4.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn derivative_form_agrees_on_finiteness() {
        // finiteness of both forms must match on the symbolic family
        let cases: Vec<(GrowthFunction, f64)> = vec![
            (GrowthFunction::monomial(4.0), 0.4),
            (GrowthFunction::monomial(2.0), 0.5),
            (GrowthFunction::monomial(3.0), 0.6),
            (GrowthFunction::identity(), 1.0),
            (GrowthFunction::monomial(5.0), 0.3),
            (super::super::stock::t_log(), 0.9),
        ];
        for (g, alpha) in cases {
            let a = calderon_integral(&g, alpha, 2.0).unwrap();
            let b = calderon_derivative_integral(&g, alpha, 2.0).unwrap();
            assert_eq!(
                a.is_finite(),
                b.is_finite(),
                "{} at α = {alpha}: ratio form {a}, derivative form {b}",
                g.label()
            );
        }
    }

    #[test]
    fn tabulated_tail_is_inconclusive() {
        use super::super::Piece;
        let g = GrowthFunction::new(
            "tab",
            vec![Piece::new(
                0.0,
                f64::INFINITY,
                PieceKind::Tabulated {
                    ts: vec![0.0, 1.0, 2.0],
                    values: vec![0.0, 1.0, 4.0],
                },
            )],
            f64::INFINITY,
        )
        .unwrap();
        assert!(matches!(
            calderon_integral(&g, 0.4, 1.0),
            Err(GrowthError::InconclusiveTail)
        ));
    }

    #[test]
    fn bounded_function_has_finite_head() {
        // domain_end = 2 forces g = ∞ beyond, so the integrand vanishes
        let g = GrowthFunction::new(
            "bounded",
            vec![super::super::Piece::new(
                0.0,
                f64::INFINITY,
                PieceKind::Linear {
                    intercept: 1.0,
                    slope: 1.0,
                },
            )],
            2.0,
        )
        .unwrap();
        let v = calderon_integral(&g, 1.0, 0.5).unwrap();
        assert!(v.is_finite());
        // ∫_0.5^2 t/(1+t) dt = [t − ln(1+t)] = 1.5 − ln(3/1.5)
        let expected = 1.5 - (3.0_f64 / 1.5).ln();
        assert!((v - expected).abs() < 1e-8, "got {v}, want {expected}");
    }
}
