//! Pointwise transforms of growth functions: strict-monotonicity
//! repair, truncation near zero, the convex minorant taken from a
//! tangent line, inner power substitution, and the generalized inverse.

use super::{GrowthError, GrowthFunction, Piece, PieceKind};

/// Strictly increasing majorant within `ε`.
///
/// Each interval of constancy `(aᵢ, bᵢ)` (enumerated left to right)
/// receives the ramp `ε·2⁻ⁱ·(t − aᵢ)/(bᵢ − aᵢ)`; everything to the
/// right of the interval is lifted by the completed ramp. The result
/// satisfies `g ≤ out ≤ g + ε` and is strictly increasing on the
/// finite part. An unbounded trailing plateau gets the saturating ramp
/// `ε·2⁻ⁱ·(1 − 1/(1 + t − aᵢ))` instead.
pub fn regularize(g: &GrowthFunction, epsilon: f64) -> Result<GrowthFunction, GrowthError> {
    if !(epsilon > 0.0) {
        return Err(GrowthError::Precondition("epsilon must be positive".into()));
    }
    if !g.is_nondecreasing() {
        return Err(GrowthError::Precondition(
            "nondecreasing function required".into(),
        ));
    }

    let runs = constancy_runs(g);
    if runs.is_empty() {
        return Ok(g.clone().with_label(format!("{}+0", g.label())));
    }

    let mut out: Vec<Piece> = Vec::new();
    let mut lift = 0.0;
    let mut run_iter = runs.iter().enumerate().peekable();
    for p in g.pieces() {
        let mut cursor = p.lo;
        while cursor < p.hi {
            let inside_run = run_iter
                .peek()
                .filter(|(_, r)| r.0 <= cursor && cursor < r.1)
                .cloned();
            if let Some((i, &(a, b, value))) = inside_run {
                let amount = epsilon * 0.5_f64.powi(i as i32 + 1);
                let hi = b.min(p.hi);
                if b.is_finite() {
                    let slope = amount / (b - a);
                    out.push(Piece::new(
                        cursor,
                        hi,
                        PieceKind::Linear {
                            intercept: value + lift - slope * a,
                            slope,
                        },
                    ));
                } else {
                    // value + lift + amount·(1 − 1/(1 + t − a))
                    out.push(Piece::new(
                        cursor,
                        hi,
                        PieceKind::ShiftedPower {
                            coeff: -amount,
                            inner: 1.0,
                            shift: a - 1.0,
                            outer: -1.0,
                            offset: value + lift + amount,
                        },
                    ));
                }
                cursor = hi;
                if hi == b {
                    lift += amount;
                    run_iter.next();
                }
            } else {
                let hi = run_iter
                    .peek()
                    .map(|(_, r)| r.0)
                    .filter(|&a| a > cursor && a < p.hi)
                    .unwrap_or(p.hi);
                out.push(Piece::new(cursor, hi, p.kind.add_constant(lift)));
                cursor = hi;
            }
        }
    }

    let mut result = GrowthFunction::new(format!("{}+eps", g.label()), out, g.domain_end())?;
    if let Some(v) = g.origin_value() {
        result = result.with_origin_value(v);
    }
    if let Some(v) = g.end_value() {
        result = result.with_end_value(v + lift.min(epsilon));
    }
    if let Some(v) = g.infinity_value() {
        result = result.with_infinity_value(v);
    }
    Ok(result)
}

/// Maximal intervals `(a, b, value)` on which `g` is constant.
fn constancy_runs(g: &GrowthFunction) -> Vec<(f64, f64, f64)> {
    let mut raw: Vec<(f64, f64, f64)> = Vec::new();
    let cap = g.domain_end();
    for p in g.pieces() {
        let hi = p.hi.min(cap);
        if p.lo >= hi {
            continue;
        }
        if let Some(v) = p.kind.flat_value() {
            raw.push((p.lo, hi, v));
        } else if let PieceKind::Tabulated { ts, values } = &p.kind {
            for w in ts.windows(2).zip(values.windows(2)) {
                let ((t0, t1), (v0, v1)) = ((w.0[0], w.0[1]), (w.1[0], w.1[1]));
                if v0 == v1 && t0 < hi && t1 > p.lo {
                    raw.push((t0.max(p.lo), t1.min(hi), v0));
                }
            }
        }
    }
    raw.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, f64, f64)> = Vec::new();
    for r in raw {
        if let Some(last) = merged.last_mut() {
            if last.1 == r.0 && last.2 == r.2 {
                last.1 = r.1;
                continue;
            }
        }
        merged.push(r);
    }
    merged
}

/// Flat truncation below `t_star`: zero at the origin, the constant
/// `g(t_star)` on `(0, t_star)`, and `g` itself from `t_star` on.
pub fn truncate_below(g: &GrowthFunction, t_star: f64) -> Result<GrowthFunction, GrowthError> {
    let v = g.evaluate(t_star);
    if !(v > 0.0) || !v.is_finite() {
        return Err(GrowthError::Precondition(format!(
            "g(t_star) must be positive and finite, got {v}"
        )));
    }
    let mut pieces = vec![Piece::new(0.0, t_star, PieceKind::Constant(v))];
    for p in g.pieces() {
        let lo = p.lo.max(t_star);
        if lo >= p.hi {
            continue;
        }
        pieces.push(Piece::new(lo, p.hi, p.kind.clone()));
    }
    let mut out = GrowthFunction::new(format!("{}*", g.label()), pieces, g.domain_end())?
        .with_origin_value(0.0);
    if let Some(e) = g.end_value() {
        out = out.with_end_value(e);
    }
    if let Some(i) = g.infinity_value() {
        out = out.with_infinity_value(i);
    }
    Ok(out)
}

/// Convex minorant built from a tangent line.
///
/// Zero up to `t_star`, then the line through `(t_star, 0)` that
/// touches the graph of `g` at some `T⋆ > t_star`, then `g` itself.
/// Fails with `NoTangent` when no touching point exists on the search
/// range (linear growth, for instance).
pub fn convex_minorant(g: &GrowthFunction, t_star: f64) -> Result<GrowthFunction, GrowthError> {
    if !g.is_nondecreasing() {
        return Err(GrowthError::Precondition(
            "nondecreasing function required".into(),
        ));
    }
    if let Some((a, b, _, _)) = g.convexity_violation_from(t_star) {
        return Err(GrowthError::Precondition(format!(
            "convexity on [t_star, ∞) required; violated between {a} and {b}"
        )));
    }

    let touch = find_tangent_touch(g, t_star)?;
    let slope = g.right_derivative_raw(touch);

    let mut pieces = vec![Piece::new(0.0, t_star, PieceKind::Constant(0.0))];
    if touch > t_star {
        pieces.push(Piece::new(
            t_star,
            touch,
            PieceKind::Linear {
                intercept: -slope * t_star,
                slope,
            },
        ));
    }
    for p in g.pieces() {
        let lo = p.lo.max(touch);
        if lo >= p.hi {
            continue;
        }
        pieces.push(Piece::new(lo, p.hi, p.kind.clone()));
    }
    let mut out = GrowthFunction::new(format!("{}_*", g.label()), pieces, g.domain_end())?;
    if let Some(e) = g.end_value() {
        out = out.with_end_value(e);
    }
    if let Some(i) = g.infinity_value() {
        out = out.with_infinity_value(i);
    }
    Ok(out)
}

/// Solve `g′(T)(T − t_star) = g(T)` for the touching point of the
/// tangent from `(t_star, 0)`.
fn find_tangent_touch(g: &GrowthFunction, t_star: f64) -> Result<f64, GrowthError> {
    let gap = |t: f64| {
        let d = g.right_derivative_raw(t);
        if d.is_infinite() {
            return f64::INFINITY;
        }
        d * (t - t_star) - g.evaluate(t)
    };
    if g.evaluate(t_star) == 0.0 {
        return Ok(t_star);
    }
    // gap(t_star) = −g(t_star) < 0; bracket a sign change.
    let cap = if g.domain_end().is_finite() {
        g.domain_end() * (1.0 - 1e-12)
    } else {
        1e9
    };
    let mut hi = (t_star * 2.0).max(t_star + 1.0);
    while gap(hi) <= 0.0 {
        hi *= 2.0;
        if hi > cap {
            if gap(cap) <= 0.0 {
                return Err(GrowthError::NoTangent { lo: t_star, hi: cap });
            }
            hi = cap;
            break;
        }
    }
    let (mut a, mut b) = (t_star, hi);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if gap(mid) > 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    let approx = 0.5 * (a + b);
    // Pure power pieces admit the closed form T = p·t_star/(p−1).
    if let PieceKind::Power {
        coeff,
        exponent,
        offset,
    } = g.piece_at(approx).kind
    {
        if offset == 0.0 && coeff > 0.0 && exponent > 1.0 {
            let exact = exponent * t_star / (exponent - 1.0);
            let piece = g.piece_at(approx);
            if exact >= piece.lo && exact < piece.hi {
                return Ok(exact);
            }
        }
    }
    Ok(approx)
}

/// Direction of the inner power substitution linking the two
/// dilatation scales.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PowerDirection {
    /// `Φ ↦ φ` with `φ(t) = Φ(t^{n−1})`.
    BigToSmall,
    /// `φ ↦ Φ` with `Φ(t) = φ(t^{1/(n−1)})`.
    SmallToBig,
}

/// Substitute `t ↦ t^k` inside `g`, where `k` is `n−1` or its
/// reciprocal depending on `direction`. Exact on every symbolic kind;
/// tabulated knots are remapped.
pub fn power_transform(
    g: &GrowthFunction,
    n: usize,
    direction: PowerDirection,
) -> Result<GrowthFunction, GrowthError> {
    if n < 2 {
        return Err(GrowthError::Precondition("n must be at least 2".into()));
    }
    let k = match direction {
        PowerDirection::BigToSmall => (n - 1) as f64,
        PowerDirection::SmallToBig => 1.0 / (n - 1) as f64,
    };
    let root = 1.0 / k;
    let pieces = g
        .pieces()
        .iter()
        .map(|p| {
            let lo = if p.lo == 0.0 { 0.0 } else { p.lo.powf(root) };
            let hi = if p.hi.is_infinite() {
                f64::INFINITY
            } else {
                p.hi.powf(root)
            };
            Piece::new(lo, hi, p.kind.compose_inner_power(k))
        })
        .collect();
    let domain_end = if g.domain_end().is_finite() {
        g.domain_end().powf(root)
    } else {
        f64::INFINITY
    };
    let suffix = match direction {
        PowerDirection::BigToSmall => "∘pow",
        PowerDirection::SmallToBig => "∘root",
    };
    let mut out = GrowthFunction::new(format!("{}{}", g.label(), suffix), pieces, domain_end)?;
    if let Some(v) = g.origin_value() {
        out = out.with_origin_value(v);
    }
    if let Some(v) = g.end_value() {
        out = out.with_end_value(v);
    }
    if let Some(v) = g.infinity_value() {
        out = out.with_infinity_value(v);
    }
    Ok(out)
}

/// `inf {t : g(t) ≥ tau}`, with `inf ∅ = ∞`.
///
/// Total for nondecreasing `g`; the result is nondecreasing in `tau`.
pub fn generalized_inverse(g: &GrowthFunction, tau: f64) -> f64 {
    debug_assert!(
        g.is_nondecreasing(),
        "generalized inverse requires a nondecreasing function"
    );
    if tau.is_infinite() {
        // Only the forced-infinite region (or the point at ∞) qualifies.
        if g.domain_end().is_finite() {
            return g.domain_end();
        }
        return f64::INFINITY;
    }
    if g.evaluate(0.0) >= tau {
        return 0.0;
    }
    let mut hi = if g.domain_end().is_finite() {
        g.domain_end()
    } else {
        let mut h = 1.0;
        while g.evaluate(h) < tau {
            h *= 2.0;
            if h > 1e300 {
                return f64::INFINITY;
            }
        }
        h
    };
    if g.domain_end().is_finite() && g.evaluate(hi) < tau {
        // Everything above domain_end is ∞ ≥ tau; the infimum is the
        // domain end itself even though it is not attained.
        return hi;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g.evaluate(mid) >= tau {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jump_function() -> GrowthFunction {
        GrowthFunction::new(
            "jump",
            vec![
                Piece::new(0.0, 3.0, PieceKind::Constant(2.0)),
                Piece::new(3.0, f64::INFINITY, PieceKind::Constant(5.0)),
            ],
            f64::INFINITY,
        )
        .unwrap()
    }

    #[test]
    fn inverse_of_square_round_trips() {
        let g = GrowthFunction::monomial(2.0);
        let t = generalized_inverse(&g, 4.0);
        assert!((t - 2.0).abs() < 1e-9);
    }

    #[test]
    fn inverse_of_bounded_is_infinite() {
        let g = GrowthFunction::constant(10.0);
        assert_eq!(generalized_inverse(&g, 11.0), f64::INFINITY);
    }

    #[test]
    fn inverse_lands_on_jump() {
        let g = jump_function();
        // brute-force oracle on a dense grid
        let mut oracle = f64::INFINITY;
        let mut t = 10.0;
        while t >= 0.0 {
            if g.evaluate(t) >= 4.0 {
                oracle = t;
            }
            t -= 1e-5;
        }
        let got = generalized_inverse(&g, 4.0);
        assert!((got - 3.0).abs() < 1e-9);
        assert!((got - oracle).abs() < 1e-4);
    }

    #[test]
    fn truncation_freezes_low_values() {
        let g = GrowthFunction::monomial(2.0);
        let t = truncate_below(&g, 2.0).unwrap();
        assert_eq!(t.evaluate(1.0), 4.0);
        assert_eq!(t.evaluate(3.0), 9.0);
        assert_eq!(t.evaluate(0.0), 0.0);
        assert_eq!(t.evaluate(2.0), 4.0);
        assert_eq!(t.evaluate(5.0), g.evaluate(5.0));
    }

    #[test]
    fn truncation_rejects_zero() {
        let g = GrowthFunction::monomial(2.0);
        assert!(matches!(
            truncate_below(&g, 0.0),
            Err(GrowthError::Precondition(_))
        ));
    }

    #[test]
    fn regularize_is_identity_without_plateaus() {
        let g = GrowthFunction::monomial(2.0);
        let r = regularize(&g, 0.1).unwrap();
        for k in 0..50 {
            let t = k as f64 * 0.3;
            assert_eq!(r.evaluate(t), g.evaluate(t));
        }
    }

    #[test]
    fn regularize_single_plateau() {
        let g = GrowthFunction::new(
            "plateau",
            vec![
                Piece::new(
                    0.0,
                    1.0,
                    PieceKind::Linear {
                        intercept: 0.0,
                        slope: 1.0,
                    },
                ),
                Piece::new(1.0, 2.0, PieceKind::Constant(1.0)),
                Piece::new(
                    2.0,
                    f64::INFINITY,
                    PieceKind::Linear {
                        intercept: -1.0,
                        slope: 1.0,
                    },
                ),
            ],
            f64::INFINITY,
        )
        .unwrap();
        let r = regularize(&g, 0.1).unwrap();
        // inside the plateau the ramp is ε·2⁻¹·(t−1)/(2−1)
        assert!((r.evaluate(1.5) - (1.0 + 0.05 * 0.5)).abs() < 1e-14);
        assert!(r.evaluate(2.0) - g.evaluate(2.0) <= 0.05 + 1e-14);
        // envelope and strict growth
        let mut prev = r.evaluate(0.0);
        for k in 1..400 {
            let t = k as f64 * 0.01;
            let v = r.evaluate(t);
            assert!(v >= g.evaluate(t) - 1e-14);
            assert!(v <= g.evaluate(t) + 0.1 + 1e-14);
            assert!(v > prev, "not strictly increasing at t = {t}");
            prev = v;
        }
    }

    #[test]
    fn minorant_of_square_touches_at_two() {
        let g = GrowthFunction::monomial(2.0);
        let m = convex_minorant(&g, 1.0).unwrap();
        // tangent τ = 4(t−1) touches at T⋆ = 2
        assert_eq!(m.evaluate(0.5), 0.0);
        assert!((m.evaluate(1.5) - 2.0).abs() < 1e-9);
        assert!((m.evaluate(2.0) - 4.0).abs() < 1e-9);
        assert_eq!(m.evaluate(3.0), 9.0);
        for k in 0..200 {
            let t = k as f64 * 0.05;
            assert!(m.evaluate(t) <= g.evaluate(t) + 1e-12);
        }
    }

    #[test]
    fn minorant_of_linear_has_no_tangent() {
        let g = GrowthFunction::identity();
        assert!(matches!(
            convex_minorant(&g, 1.0),
            Err(GrowthError::NoTangent { .. })
        ));
    }

    #[test]
    fn power_transform_round_trip() {
        let g = GrowthFunction::monomial(2.0);
        let small = power_transform(&g, 3, PowerDirection::BigToSmall).unwrap();
        // Φ = t² with n = 3 gives φ(t) = t⁴
        assert!((small.evaluate(2.0) - 16.0).abs() < 1e-12);
        let back = power_transform(&small, 3, PowerDirection::SmallToBig).unwrap();
        for k in 0..100 {
            let t = k as f64 * 0.37;
            let a = back.evaluate(t);
            let b = g.evaluate(t);
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "t = {t}: {a} vs {b}");
        }
    }

    #[test]
    fn inverse_commutes_with_power_substitution() {
        // (φ∘h)⁻¹ = h⁻¹ ∘ φ⁻¹ with h(t) = t^{n−1}
        let phi = GrowthFunction::monomial(4.0);
        let composite = power_transform(&phi, 3, PowerDirection::BigToSmall).unwrap();
        // composite(t) = t⁸; composite⁻¹(256) = 2 = (φ⁻¹(256))^{1/2}
        let direct = generalized_inverse(&composite, 256.0);
        let chained = generalized_inverse(&phi, 256.0).powf(0.5);
        assert!((direct - 2.0).abs() < 1e-9);
        assert!((direct - chained).abs() < 1e-9);
    }
}
