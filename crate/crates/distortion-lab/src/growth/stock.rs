//! A small library of named growth functions used by experiments and
//! the sharpness dispatcher: well-behaved ones (convex, nondecreasing,
//! continuous from the left) and deliberately broken ones sorted by
//! which hypothesis they violate.

use super::{GrowthFunction, Piece, PieceKind};

/// `t²`.
pub fn t_squared() -> GrowthFunction {
    GrowthFunction::monomial(2.0)
}

/// `t³`.
pub fn t_cubed() -> GrowthFunction {
    GrowthFunction::monomial(3.0)
}

/// `max(0, eᵗ − e)`: zero up to 1, then exponential growth.
pub fn exp_t_minus_e() -> GrowthFunction {
    GrowthFunction::new(
        "exp(t)-e",
        vec![
            Piece::new(0.0, 1.0, PieceKind::Constant(0.0)),
            Piece::new(
                1.0,
                f64::INFINITY,
                PieceKind::ExpPower {
                    coeff: 1.0,
                    rate: 1.0,
                    exponent: 1.0,
                    offset: -std::f64::consts::E,
                },
            ),
        ],
        f64::INFINITY,
    )
    .expect("valid stock function")
}

/// `t·log(e + t)`: strictly convex with slowly growing slope.
pub fn t_log() -> GrowthFunction {
    GrowthFunction::new(
        "t*log(e+t)",
        vec![Piece::new(
            0.0,
            f64::INFINITY,
            PieceKind::LogPower {
                coeff: 1.0,
                power: 1.0,
                base: std::f64::consts::E,
                log_exp: 1.0,
                inner: 1.0,
                offset: 0.0,
            },
        )],
        f64::INFINITY,
    )
    .expect("valid stock function")
}

/// `exp(√t)`, the borderline integrand of the divergence criteria.
pub fn exp_sqrt() -> GrowthFunction {
    GrowthFunction::new(
        "exp(t^{1/2})",
        vec![Piece::new(
            0.0,
            f64::INFINITY,
            PieceKind::ExpPower {
                coeff: 1.0,
                rate: 1.0,
                exponent: 0.5,
                offset: 0.0,
            },
        )],
        f64::INFINITY,
    )
    .expect("valid stock function")
}

/// `eᵗ`.
pub fn exp_t() -> GrowthFunction {
    GrowthFunction::new(
        "exp(t)",
        vec![Piece::new(
            0.0,
            f64::INFINITY,
            PieceKind::ExpPower {
                coeff: 1.0,
                rate: 1.0,
                exponent: 1.0,
                offset: 0.0,
            },
        )],
        f64::INFINITY,
    )
    .expect("valid stock function")
}

/// `√t`: concave, the canonical convexity violation.
pub fn sqrt_t() -> GrowthFunction {
    GrowthFunction::monomial(0.5)
}

/// Continuous piecewise-linear with slopes 3 then 1: nondecreasing but
/// not convex.
pub fn concave_kink() -> GrowthFunction {
    GrowthFunction::new(
        "kink(3,1)",
        vec![
            Piece::new(
                0.0,
                1.0,
                PieceKind::Linear {
                    intercept: 0.0,
                    slope: 3.0,
                },
            ),
            Piece::new(
                1.0,
                f64::INFINITY,
                PieceKind::Linear {
                    intercept: 2.0,
                    slope: 1.0,
                },
            ),
        ],
        f64::INFINITY,
    )
    .expect("valid stock function")
}

/// `max(0, 1.6(t−3)² − 0.6)`: convex on `[1, ∞)` but decreasing there
/// until the valley floor. Hits `Φ(1.5) = 3` and `Φ(2) = 1`.
pub fn valley_quadratic() -> GrowthFunction {
    let half_width = 0.375_f64.sqrt();
    let quad = |offset: f64| PieceKind::ShiftedPower {
        coeff: 1.6,
        inner: 1.0,
        shift: 3.0,
        outer: 2.0,
        offset,
    };
    GrowthFunction::new(
        "valley",
        vec![
            Piece::new(0.0, 3.0 - half_width, quad(-0.6)),
            Piece::new(3.0 - half_width, 3.0 + half_width, PieceKind::Constant(0.0)),
            Piece::new(3.0 + half_width, f64::INFINITY, quad(-0.6)),
        ],
        f64::INFINITY,
    )
    .expect("valid stock function")
}

/// Plateau at 5, a linear descent to 1, then linear growth. Convex on
/// `[1, ∞)`, not monotone.
pub fn descent_vee() -> GrowthFunction {
    GrowthFunction::new(
        "vee",
        vec![
            Piece::new(0.0, 1.0, PieceKind::Constant(5.0)),
            Piece::new(
                1.0,
                3.0,
                PieceKind::Linear {
                    intercept: 7.0,
                    slope: -2.0,
                },
            ),
            Piece::new(
                3.0,
                f64::INFINITY,
                PieceKind::Linear {
                    intercept: -2.0,
                    slope: 1.0,
                },
            ),
        ],
        f64::INFINITY,
    )
    .expect("valid stock function")
}

/// Identity below 2, `+∞` from 2 on: the finite-part limit at 2 is 2,
/// so the function is not continuous from the left at `T = 2`.
pub fn jump_to_infinity_at_two() -> GrowthFunction {
    GrowthFunction::new(
        "t|∞@2",
        vec![Piece::new(
            0.0,
            f64::INFINITY,
            PieceKind::Linear {
                intercept: 0.0,
                slope: 1.0,
            },
        )],
        2.0,
    )
    .expect("valid stock function")
}

/// Identity below 2, the value 10 at exactly 2, `+∞` beyond: a finite
/// left jump at `T = 2`.
pub fn finite_jump_at_two() -> GrowthFunction {
    jump_to_infinity_at_two()
        .with_end_value(10.0)
        .with_label("t|10@2")
}

/// Constant 5 on the finite axis with the value `+∞` at `t = ∞`.
pub fn constant_with_infinite_limit() -> GrowthFunction {
    GrowthFunction::constant(5.0)
        .with_infinity_value(f64::INFINITY)
        .with_label("const5|∞")
}

/// Functions satisfying every semicontinuity hypothesis.
pub fn good_library() -> Vec<GrowthFunction> {
    vec![t_squared(), t_cubed(), exp_t_minus_e(), t_log()]
}

/// Functions violating exactly one hypothesis each.
pub fn bad_library() -> Vec<GrowthFunction> {
    vec![
        sqrt_t(),
        concave_kink(),
        valley_quadratic(),
        descent_vee(),
        finite_jump_at_two(),
        jump_to_infinity_at_two(),
        constant_with_infinite_limit(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valley_hits_documented_values() {
        let v = valley_quadratic();
        assert!((v.evaluate(1.5) - 3.0).abs() < 1e-12);
        assert!((v.evaluate(2.0) - 1.0).abs() < 1e-12);
        assert!(!v.is_nondecreasing());
        // convex on [1, ∞)
        assert!(v.convexity_violation_from(1.0).is_none());
    }

    #[test]
    fn vee_is_convex_on_tail_but_not_monotone() {
        let v = descent_vee();
        assert!(!v.is_nondecreasing());
        assert!(v.convexity_violation_from(1.0).is_none());
    }

    #[test]
    fn jump_functions_have_finite_left_limits() {
        let j = finite_jump_at_two();
        assert_eq!(j.evaluate(2.0), 10.0);
        assert!((j.evaluate(2.0 - 1e-9) - 2.0).abs() < 1e-8);
        let k = jump_to_infinity_at_two();
        assert_eq!(k.evaluate(2.0), f64::INFINITY);
    }

    #[test]
    fn constant_has_infinite_value_at_infinity() {
        let c = constant_with_infinite_limit();
        assert_eq!(c.evaluate(1e12), 5.0);
        assert_eq!(c.evaluate(f64::INFINITY), f64::INFINITY);
        assert!(c.is_constant_on_finite_part());
    }

    #[test]
    fn good_library_is_strictly_convex() {
        for g in good_library() {
            let report = g.is_strictly_convex();
            assert!(
                report.strictly_convex,
                "{} should be strictly convex: {:?}",
                g.label(),
                report.slope_trend
            );
        }
    }
}
