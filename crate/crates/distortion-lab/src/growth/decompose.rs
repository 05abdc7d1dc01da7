//! Factorization of a convex growth function through a slower one.
//!
//! Given convex nondecreasing `g` whose Calderón integral at exponent
//! `α` converges, and a larger exponent `α̃`, the function factors as
//! `g = ψ ∘ g̃` where both factors are strictly convex, `g̃ ≤ g`, and
//! the Calderón integral of `g̃` at `α̃` equals the derivative-form
//! integral of `g` at `α`.
//!
//! The construction integrates a damped right derivative: with
//! `λ = α/α̃` and `T⋆ = sup{t : g′₊(t) < 1}`,
//!
//! ```text
//! g̃(t) = ∫₀ᵗ h,   h = g′₊ below T⋆,  h = (g′₊)^λ above,
//! ψ(s) = g(0) + ∫₀ˢ H,  H = 1 below S⋆ = g̃(T⋆),
//!                        H = (g′₊ ∘ g̃⁻¹)^{1−λ} on [S⋆, S₀).
//! ```
//!
//! Piece kinds closed under this construction (powers, linear ramps,
//! single-rate exponentials, shifted powers) produce symbolic factors;
//! anything else falls back to tabulated pieces built by quadrature.

use super::analysis::{convexity_violation, geometric_grid};
use super::calderon::{classify_calderon_tail, TailVerdict};
use super::{GrowthError, GrowthFunction, Piece, PieceKind};
use crate::quad;

#[derive(Clone, Debug)]
pub struct DecompositionResult {
    pub psi: GrowthFunction,
    pub phi_tilde: GrowthFunction,
    pub lambda: f64,
    /// Threshold where the damped branch of the derivative starts.
    pub t_star: f64,
    /// `phi_tilde(t_star)`, where `psi` stops being the identity.
    pub s_star: f64,
}

/// Factor `g = ψ ∘ g̃` with the damping ratio `λ = alpha/alpha_tilde`.
pub fn decompose(
    g: &GrowthFunction,
    alpha: f64,
    alpha_tilde: f64,
) -> Result<DecompositionResult, GrowthError> {
    if !(alpha > 0.0 && alpha_tilde > alpha) {
        return Err(GrowthError::Precondition(
            "need 0 < alpha < alpha_tilde".into(),
        ));
    }
    g.require_regular()?;
    let grid = geometric_grid(g, 1e-4, 1e4);
    if let Some((t1, t2, _, _)) = convexity_violation(g, &grid) {
        return Err(GrowthError::NotConvex { t: 0.5 * (t1 + t2) });
    }
    match classify_calderon_tail(g, alpha) {
        TailVerdict::Diverges => {
            return Err(GrowthError::Precondition(
                "Calderón integral of g at alpha diverges".into(),
            ))
        }
        TailVerdict::Inconclusive => return Err(GrowthError::InconclusiveTail),
        TailVerdict::Converges => {}
    }

    let lambda = alpha / alpha_tilde;
    let t_star = unit_slope_threshold(g)?;
    let g0 = g.evaluate(0.0);

    let cap = g.domain_end();
    let mut tilde_pieces: Vec<Piece> = Vec::new();
    let mut psi_upper: Vec<Piece> = Vec::new();

    // Below T⋆ the damped derivative is the derivative itself, so the
    // slow factor is just g normalized to vanish at the origin.
    for p in g.pieces() {
        let lo = p.lo;
        let hi = p.hi.min(t_star);
        if lo >= hi {
            break;
        }
        tilde_pieces.push(Piece::new(lo, hi, p.kind.add_constant(-g0)));
    }
    let s_star = if t_star > 0.0 { g.evaluate(t_star) - g0 } else { 0.0 };

    let mut acc = s_star;
    let mut s_cursor = s_star;
    for p in g.pieces() {
        let lo = p.lo.max(t_star);
        let hi = p.hi.min(cap);
        if lo >= hi {
            continue;
        }
        let (tilde_kind, psi_kind_maybe) = damped_piece(g, &p.kind, lo, hi, lambda, acc);
        let s_lo = s_cursor;
        let s_hi = if hi.is_finite() {
            tilde_kind.eval(hi)
        } else {
            f64::INFINITY
        };
        if let Some(psi_kind) = psi_kind_maybe {
            if s_lo < s_hi {
                psi_upper.push(Piece::new(s_lo, s_hi, psi_kind));
            }
        }
        if hi.is_finite() {
            acc = tilde_kind.eval(hi);
            s_cursor = s_hi;
        }
        tilde_pieces.push(Piece::new(lo, hi, tilde_kind));
    }

    // Keep the tiling contract when a finite domain end truncated the
    // upper region; values past it are forced to ∞ anyway.
    if let Some(last) = tilde_pieces.last_mut() {
        if last.hi.is_finite() {
            let filler_from = last.hi;
            let filler_val = last.kind.eval(filler_from);
            tilde_pieces.push(Piece::new(
                filler_from,
                f64::INFINITY,
                PieceKind::Constant(filler_val.min(1e300)),
            ));
        }
    }

    let s0 = if cap.is_finite() {
        s_cursor
    } else {
        f64::INFINITY
    };

    let phi_tilde = GrowthFunction::new(
        format!("{}~", g.label()),
        tilde_pieces,
        g.domain_end(),
    )?;

    let mut psi_pieces: Vec<Piece> = Vec::new();
    if s_star > 0.0 {
        psi_pieces.push(Piece::new(
            0.0,
            s_star,
            PieceKind::Linear {
                intercept: g0,
                slope: 1.0,
            },
        ));
    }
    psi_pieces.extend(psi_upper);
    if let Some(last) = psi_pieces.last_mut() {
        if last.hi.is_finite() {
            let from = last.hi;
            let val = last.kind.eval(from);
            psi_pieces.push(Piece::new(
                from,
                f64::INFINITY,
                PieceKind::Constant(val.min(1e300)),
            ));
        }
    } else {
        psi_pieces.push(Piece::new(
            0.0,
            f64::INFINITY,
            PieceKind::Linear {
                intercept: g0,
                slope: 1.0,
            },
        ));
    }
    let psi = GrowthFunction::new(format!("psi[{}]", g.label()), psi_pieces, s0)?;

    let result = DecompositionResult {
        psi,
        phi_tilde,
        lambda,
        t_star,
        s_star,
    };
    verify(g, &result)?;
    Ok(result)
}

/// The damped antiderivative over one piece region `[lo, hi)` plus the
/// matching piece of `ψ` when a closed form exists.
///
/// `acc` is the slow factor's value at `lo`. Returns the slow factor's
/// kind on `[lo, hi)` and `Some(psi kind)` on `[g̃(lo), g̃(hi))`.
fn damped_piece(
    g: &GrowthFunction,
    kind: &PieceKind,
    lo: f64,
    hi: f64,
    lambda: f64,
    acc: f64,
) -> (PieceKind, Option<PieceKind>) {
    match *kind {
        PieceKind::Linear { intercept, slope } if slope > 0.0 => {
            linear_damped(intercept, slope, lo, lambda, acc)
        }
        PieceKind::Power {
            coeff,
            exponent,
            offset,
        } if coeff > 0.0 && exponent == 1.0 => linear_damped(offset, coeff, lo, lambda, acc),
        PieceKind::Power {
            coeff,
            exponent,
            offset,
        } if coeff > 0.0 && exponent > 1.0 => {
            // g′ = cp·t^{p−1}, damped: (cp)^λ t^{λ(p−1)}
            let cp = coeff * exponent;
            let m = lambda * (exponent - 1.0);
            let c_tilde = cp.powf(lambda) / (m + 1.0);
            let a_lo = c_tilde * lo.powf(m + 1.0);
            let tilde = PieceKind::Power {
                coeff: c_tilde,
                exponent: m + 1.0,
                offset: acc - a_lo,
            };
            // ψ(s) = offset + coeff·((s − O)/C)^{p/(m+1)}
            let outer = exponent / (m + 1.0);
            let psi = PieceKind::ShiftedPower {
                coeff: coeff / c_tilde.powf(outer),
                inner: 1.0,
                shift: acc - a_lo,
                outer,
                offset,
            };
            (tilde, Some(psi))
        }
        PieceKind::ShiftedPower {
            coeff,
            inner,
            shift,
            outer,
            offset,
        } if coeff > 0.0 && inner == 1.0 && outer > 1.0 => {
            // g′ = ce·(t−s)^{e−1}
            let ce = coeff * outer;
            let m = lambda * (outer - 1.0);
            let c_tilde = ce.powf(lambda) / (m + 1.0);
            let a_lo = c_tilde * (lo - shift).powf(m + 1.0);
            let tilde = PieceKind::ShiftedPower {
                coeff: c_tilde,
                inner: 1.0,
                shift,
                outer: m + 1.0,
                offset: acc - a_lo,
            };
            let pow = outer / (m + 1.0);
            let psi = PieceKind::ShiftedPower {
                coeff: coeff / c_tilde.powf(pow),
                inner: 1.0,
                shift: acc - a_lo,
                outer: pow,
                offset,
            };
            (tilde, Some(psi))
        }
        PieceKind::ExpPower {
            coeff,
            rate,
            exponent,
            offset,
        } if coeff > 0.0 && rate > 0.0 && exponent == 1.0 => {
            // g′ = cr·e^{rt}, damped: (cr)^λ e^{λrt}
            let cr = coeff * rate;
            let c_tilde = cr.powf(lambda) / (lambda * rate);
            let a_lo = c_tilde * (lambda * rate * lo).exp();
            let tilde = PieceKind::ExpPower {
                coeff: c_tilde,
                rate: lambda * rate,
                exponent: 1.0,
                offset: acc - a_lo,
            };
            let pow = 1.0 / lambda;
            let psi = PieceKind::ShiftedPower {
                coeff: coeff / c_tilde.powf(pow),
                inner: 1.0,
                shift: acc - a_lo,
                outer: pow,
                offset,
            };
            (tilde, Some(psi))
        }
        _ => tabulated_damped(g, lo, hi, lambda, acc),
    }
}

fn linear_damped(
    _intercept: f64,
    slope: f64,
    lo: f64,
    lambda: f64,
    acc: f64,
) -> (PieceKind, Option<PieceKind>) {
    let s_l = slope.powf(lambda);
    let tilde = PieceKind::Linear {
        intercept: acc - s_l * lo,
        slope: s_l,
    };
    // t(s) = (s − I)/s_l; ψ(s) = g(lo) + slope·(t − lo)
    // which is linear in s with slope slope^{1−λ}.
    let psi_slope = slope / s_l;
    let g_lo = _intercept + slope * lo;
    let psi = PieceKind::Linear {
        intercept: g_lo - psi_slope * acc,
        slope: psi_slope,
    };
    (tilde, Some(psi))
}

fn tabulated_damped(
    g: &GrowthFunction,
    lo: f64,
    hi: f64,
    lambda: f64,
    acc: f64,
) -> (PieceKind, Option<PieceKind>) {
    let hi_eff = if hi.is_finite() {
        hi
    } else {
        (lo.max(1.0) * 10.0).max(1e6)
    };
    let knots = 256;
    let lo_eff = lo.max(1e-12);
    let mut ts = Vec::with_capacity(knots + 1);
    for k in 0..=knots {
        ts.push(lo_eff * (hi_eff / lo_eff).powf(k as f64 / knots as f64));
    }
    ts[0] = lo;
    let h = |t: f64| {
        let d = g.right_derivative_raw(t);
        if d.is_finite() {
            d.powf(lambda)
        } else {
            f64::INFINITY
        }
    };
    let mut values = Vec::with_capacity(ts.len());
    let mut running = acc;
    values.push(running);
    for w in ts.windows(2) {
        running += quad::integrate(&h, w[0], w[1], 1e-11);
        values.push(running);
    }
    let psi_values: Vec<f64> = ts.iter().map(|&t| g.evaluate(t)).collect();
    let tilde = PieceKind::Tabulated {
        ts: ts.clone(),
        values: values.clone(),
    };
    let psi = PieceKind::Tabulated {
        ts: values,
        values: psi_values,
    };
    (tilde, Some(psi))
}

/// `T⋆ = sup{t : g′₊(t) < 1}` for a convex nondecreasing `g` with a
/// convergent Calderón tail (so `g′₊ → ∞` and the threshold is finite).
fn unit_slope_threshold(g: &GrowthFunction) -> Result<f64, GrowthError> {
    let cap = g.domain_end();
    if g.right_derivative_raw(0.0) >= 1.0 {
        return Ok(0.0);
    }
    for p in g.pieces() {
        let lo = p.lo;
        let hi = p.hi.min(cap);
        if lo >= hi {
            continue;
        }
        if g.right_derivative_raw(lo) >= 1.0 {
            return Ok(lo);
        }
        // derivative below 1 at the left end; look for a crossing inside
        if let Some(t) = crossing_inside(g, &p.kind, lo, hi) {
            return Ok(t);
        }
    }
    // No crossing below a finite domain end: the derivative jumps to ∞
    // exactly there.
    if cap.is_finite() {
        return Ok(cap);
    }
    Err(GrowthError::Precondition(
        "right derivative never reaches 1; Calderón tail cannot converge".into(),
    ))
}

fn crossing_inside(g: &GrowthFunction, kind: &PieceKind, lo: f64, hi: f64) -> Option<f64> {
    match *kind {
        PieceKind::Power {
            coeff, exponent, ..
        } if coeff > 0.0 && exponent > 1.0 => {
            let t = (1.0 / (coeff * exponent)).powf(1.0 / (exponent - 1.0));
            if t > lo && t < hi {
                return Some(t);
            }
        }
        PieceKind::ShiftedPower {
            coeff,
            inner,
            shift,
            outer,
            ..
        } if coeff > 0.0 && inner == 1.0 && outer > 1.0 => {
            let t = shift + (1.0 / (coeff * outer)).powf(1.0 / (outer - 1.0));
            if t > lo && t < hi {
                return Some(t);
            }
        }
        PieceKind::ExpPower {
            coeff,
            rate,
            exponent,
            ..
        } if coeff > 0.0 && rate > 0.0 && exponent == 1.0 => {
            let t = (1.0 / (coeff * rate)).ln() / rate;
            if t > lo && t < hi {
                return Some(t);
            }
        }
        PieceKind::Constant(_) | PieceKind::Linear { .. } => return None,
        _ => {}
    }
    // Bisection fallback within the piece.
    let mut hi_eff = if hi.is_finite() { hi } else { lo.max(1.0) };
    if !hi.is_finite() {
        while g.right_derivative_raw(hi_eff) < 1.0 {
            hi_eff *= 2.0;
            if hi_eff > 1e15 {
                return None;
            }
        }
    } else if g.right_derivative_raw(hi - (hi - lo) * 1e-12) < 1.0 {
        return None;
    }
    let (mut a, mut b) = (lo, hi_eff);
    if g.right_derivative_raw(b) < 1.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if g.right_derivative_raw(mid) >= 1.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    Some(0.5 * (a + b))
}

fn verify(g: &GrowthFunction, r: &DecompositionResult) -> Result<(), GrowthError> {
    let hi = if g.domain_end().is_finite() {
        g.domain_end() * (1.0 - 1e-9)
    } else {
        100.0
    };
    let steps = 200;
    for k in 0..=steps {
        let t = hi * k as f64 / steps as f64;
        let gv = g.evaluate(t);
        let tv = r.phi_tilde.evaluate(t);
        if !gv.is_finite() {
            continue;
        }
        if tv > gv + 1e-10 * gv.abs().max(1.0) {
            return Err(GrowthError::Spec(format!(
                "decomposition inconsistency: phi_tilde({t}) = {tv} exceeds g({t}) = {gv}"
            )));
        }
        let comp = r.psi.evaluate(tv.max(0.0));
        if (comp - gv).abs() > 2e-7 * gv.abs().max(1.0) {
            return Err(GrowthError::Spec(format!(
                "decomposition inconsistency: psi(phi_tilde({t})) = {comp}, g({t}) = {gv}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::calderon::{calderon_derivative_integral, calderon_integral};
    use super::*;

    #[test]
    fn quartic_factors_exactly() {
        let g = GrowthFunction::monomial(4.0);
        let r = decompose(&g, 0.4, 0.8).unwrap();
        assert!((r.lambda - 0.5).abs() < 1e-15);
        // T⋆ solves 4t³ = 1
        assert!((r.t_star - 0.25_f64.powf(1.0 / 3.0)).abs() < 1e-12);
        for k in 0..=1000 {
            let t = 100.0 * k as f64 / 1000.0;
            let composed = r.psi.evaluate(r.phi_tilde.evaluate(t));
            let want = g.evaluate(t);
            assert!(
                (composed - want).abs() <= 1e-8 * want.max(1.0),
                "composition off at t = {t}: {composed} vs {want}"
            );
            assert!(r.phi_tilde.evaluate(t) <= want + 1e-12 * want.max(1.0));
        }
    }

    #[test]
    fn damped_calderon_integral_is_preserved() {
        let g = GrowthFunction::monomial(4.0);
        let r = decompose(&g, 0.4, 0.8).unwrap();
        let original = calderon_derivative_integral(&g, 0.4, 1.0).unwrap();
        let damped = calderon_derivative_integral(&r.phi_tilde, 0.8, 1.0).unwrap();
        assert!(
            (original - damped).abs() < 1e-6 * original,
            "derivative-form integrals differ: {original} vs {damped}"
        );
        assert!(calderon_integral(&r.phi_tilde, 0.8, 1.0).unwrap().is_finite());
    }

    #[test]
    fn factors_are_strictly_convex() {
        let g = GrowthFunction::monomial(4.0);
        let r = decompose(&g, 0.4, 0.8).unwrap();
        assert!(r.phi_tilde.is_strictly_convex().strictly_convex);
        assert!(r.psi.is_strictly_convex().strictly_convex);
    }

    #[test]
    fn divergent_calderon_is_rejected() {
        let g = GrowthFunction::identity();
        assert!(matches!(
            decompose(&g, 0.5, 1.0),
            Err(GrowthError::Precondition(_))
        ));
    }

    #[test]
    fn exponential_piece_closed_form() {
        let g = super::super::stock::exp_t_minus_e();
        let r = decompose(&g, 1.0, 2.0).unwrap();
        for k in 0..=400 {
            let t = 20.0 * k as f64 / 400.0;
            let want = g.evaluate(t);
            let got = r.psi.evaluate(r.phi_tilde.evaluate(t));
            assert!(
                (got - want).abs() <= 1e-7 * want.max(1.0),
                "t = {t}: {got} vs {want}"
            );
        }
    }
}
