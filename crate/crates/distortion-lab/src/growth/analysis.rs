//! Convexity certification by sampling.
//!
//! Convexity is checked by midpoint tests on a geometric grid (512
//! points per decade over 8 decades by default). Strict convexity
//! additionally needs the slope `g(t)/t` to grow without bound, which
//! is certified from monotone growth over the tail decade of the
//! sample; a flag records when the tail is too short to decide.

use super::{GrowthError, GrowthFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlopeTrend {
    /// The averaged slope keeps growing with no visible ceiling.
    Unbounded,
    /// The averaged slope is flat (linear-like tail).
    Bounded,
    /// The tail sample cannot certify either way.
    Inconclusive,
}

/// Evidence produced by [`GrowthFunction::is_strictly_convex`].
#[derive(Clone, Debug)]
pub struct ConvexityReport {
    pub convex: bool,
    pub strictly_convex: bool,
    pub slope_trend: SlopeTrend,
    pub inconclusive: bool,
    /// A witness `(t1, t2, λ, gap)` with
    /// `g(λ t1 + (1−λ) t2) − [λ g(t1) + (1−λ) g(t2)] = gap > 0`.
    pub violation: Option<(f64, f64, f64, f64)>,
    /// Decimated `(t, g(t)/t)` slope samples over the grid.
    pub slope_samples: Vec<(f64, f64)>,
}

pub(crate) const GRID_POINTS_PER_DECADE: usize = 512;

/// Geometric sample grid on `[lo_hint, hi]` clipped below a finite
/// domain end.
pub(crate) fn geometric_grid(g: &GrowthFunction, lo: f64, hi: f64) -> Vec<f64> {
    let hi = if g.domain_end().is_finite() {
        hi.min(g.domain_end() * (1.0 - 1e-9))
    } else {
        hi
    };
    if !(lo > 0.0) || hi <= lo {
        return vec![];
    }
    let decades = (hi / lo).log10();
    let count = ((decades * GRID_POINTS_PER_DECADE as f64).ceil() as usize).clamp(8, 8192);
    (0..=count)
        .map(|k| lo * (hi / lo).powf(k as f64 / count as f64))
        .collect()
}

/// Search the grid for a midpoint-convexity violation. Returns the
/// worst witness `(t1, t2, λ, gap)` found, if any.
pub(crate) fn convexity_violation(
    g: &GrowthFunction,
    grid: &[f64],
) -> Option<(f64, f64, f64, f64)> {
    let values: Vec<f64> = grid.iter().map(|&t| g.evaluate(t)).collect();
    let mut worst: Option<(f64, f64, f64, f64)> = None;
    // Successive chord slopes of a convex function are nondecreasing;
    // a decrease pins an exact three-point witness.
    for i in 1..grid.len().saturating_sub(1) {
        let (ta, tb, tc) = (grid[i - 1], grid[i], grid[i + 1]);
        let (va, vb, vc) = (values[i - 1], values[i], values[i + 1]);
        if !va.is_finite() || !vb.is_finite() || !vc.is_finite() {
            continue;
        }
        let lambda = (tc - tb) / (tc - ta);
        let chord = lambda * va + (1.0 - lambda) * vc;
        let gap = vb - chord;
        let tol = 1e-10 * vb.abs().max(1.0);
        if gap > tol && worst.map_or(true, |w| gap > w.3) {
            worst = Some((ta, tc, lambda, gap));
        }
    }
    // Wider triples on a coarse subgrid give far better margins when a
    // violation exists over a broad region.
    let stride = (grid.len() / 48).max(1);
    let coarse: Vec<usize> = (0..grid.len()).step_by(stride).collect();
    for (ai, &ia) in coarse.iter().enumerate() {
        for &ic in coarse.iter().skip(ai + 2) {
            let (ta, tc) = (grid[ia], grid[ic]);
            let (va, vc) = (values[ia], values[ic]);
            if !va.is_finite() || !vc.is_finite() {
                continue;
            }
            for k in 1..16 {
                let lambda = k as f64 / 16.0;
                let tb = lambda * ta + (1.0 - lambda) * tc;
                let vb = g.evaluate(tb);
                if !vb.is_finite() {
                    continue;
                }
                let chord = lambda * va + (1.0 - lambda) * vc;
                let gap = vb - chord;
                let tol = 1e-10 * vb.abs().max(1.0);
                if gap > tol && worst.map_or(true, |w| gap > w.3) {
                    worst = Some((ta, tc, lambda, gap));
                }
            }
        }
    }
    worst
}

impl GrowthFunction {
    /// Convexity and strict-convexity certification with evidence.
    ///
    /// Strict convexity here means: convex, nondecreasing in the large,
    /// and `g(t)/t → ∞`. A finite domain end certifies the slope limit
    /// outright (the function jumps to `+∞`).
    pub fn is_strictly_convex(&self) -> ConvexityReport {
        let grid = geometric_grid(self, 1e-4, 1e4);
        let violation = convexity_violation(self, &grid);
        let convex = violation.is_none();

        let g0 = self.evaluate(0.0);
        let slopes: Vec<(f64, f64)> = grid
            .iter()
            .filter(|&&t| t > 0.0)
            .map(|&t| (t, (self.evaluate(t) - g0) / t))
            .filter(|(_, s)| s.is_finite())
            .collect();

        let slope_trend = if self.domain_end().is_finite() {
            SlopeTrend::Unbounded
        } else {
            classify_slope_tail(&slopes)
        };

        let strictly_convex = convex && slope_trend == SlopeTrend::Unbounded;
        let inconclusive = convex && slope_trend == SlopeTrend::Inconclusive;

        let keep = (slopes.len() / 32).max(1);
        let slope_samples = slopes
            .iter()
            .step_by(keep)
            .copied()
            .collect::<Vec<_>>();

        ConvexityReport {
            convex,
            strictly_convex,
            slope_trend,
            inconclusive,
            violation,
            slope_samples,
        }
    }

    /// Midpoint-convexity check restricted to `[lo, ∞)`; used by
    /// operations whose contracts only need convexity beyond a point.
    pub fn convexity_violation_from(&self, lo: f64) -> Option<(f64, f64, f64, f64)> {
        let grid = geometric_grid(self, lo.max(1e-4), lo.max(1.0) * 1e4);
        convexity_violation(self, &grid)
    }

    /// Validate the preconditions shared by the decomposition and
    /// minorant constructions: nonconstant, continuous, nondecreasing.
    pub(crate) fn require_regular(&self) -> Result<(), GrowthError> {
        if self.is_constant_on_finite_part() && !self.domain_end().is_finite() {
            return Err(GrowthError::Precondition("nonconstant required".into()));
        }
        if !self.is_nondecreasing() {
            return Err(GrowthError::Precondition(
                "nondecreasing function required".into(),
            ));
        }
        let jump = self.max_boundary_jump();
        if jump > 1e-9 {
            return Err(GrowthError::Precondition(format!(
                "continuous function required; piece boundary jump of {jump}"
            )));
        }
        if self.domain_end().is_finite() {
            // Continuity on the extended axis: the finite part must blow
            // up as it approaches the point where the value becomes ∞.
            let t = self.domain_end();
            let left = self.piece_at(t * (1.0 - 1e-12)).kind.eval(t);
            if left.is_finite() {
                return Err(GrowthError::Precondition(format!(
                    "continuous function required; finite left limit {left} at domain_end {t}"
                )));
            }
        }
        Ok(())
    }
}

fn classify_slope_tail(slopes: &[(f64, f64)]) -> SlopeTrend {
    if slopes.len() < 16 {
        return SlopeTrend::Inconclusive;
    }
    let t_end = slopes.last().unwrap().0;
    let tail_start = t_end / 10.0;
    let tail: Vec<&(f64, f64)> = slopes.iter().filter(|(t, _)| *t >= tail_start).collect();
    if tail.len() < 8 {
        return SlopeTrend::Inconclusive;
    }
    let first = tail.first().unwrap().1;
    let last = tail.last().unwrap().1;
    let monotone = tail
        .windows(2)
        .all(|w| w[1].1 >= w[0].1 - 1e-11 * w[0].1.abs().max(1e-300));
    if !monotone {
        return SlopeTrend::Inconclusive;
    }
    if first <= 0.0 {
        return if last > 0.0 {
            SlopeTrend::Unbounded
        } else {
            SlopeTrend::Inconclusive
        };
    }
    let ratio = last / first;
    if ratio >= 1.0 + 1e-6 {
        SlopeTrend::Unbounded
    } else if ratio <= 1.0 + 1e-9 {
        SlopeTrend::Bounded
    } else {
        SlopeTrend::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::super::stock;
    use super::*;

    #[test]
    fn quadratic_is_strictly_convex() {
        let report = GrowthFunction::monomial(2.0).is_strictly_convex();
        assert!(report.convex);
        assert!(report.strictly_convex);
        assert_eq!(report.slope_trend, SlopeTrend::Unbounded);
    }

    #[test]
    fn linear_is_convex_but_not_strictly() {
        let report = GrowthFunction::identity().is_strictly_convex();
        assert!(report.convex);
        assert!(!report.strictly_convex);
        assert_eq!(report.slope_trend, SlopeTrend::Bounded);
    }

    #[test]
    fn t_log_is_strictly_convex() {
        // slope log(e+t) + t/(e+t)·(…) grows without bound
        let report = stock::t_log().is_strictly_convex();
        assert!(report.convex, "violation: {:?}", report.violation);
        assert!(report.strictly_convex);
    }

    #[test]
    fn sqrt_is_not_convex() {
        let report = GrowthFunction::monomial(0.5).is_strictly_convex();
        assert!(!report.convex);
        let (t1, t2, lambda, gap) = report.violation.unwrap();
        let g = GrowthFunction::monomial(0.5);
        let mid = lambda * t1 + (1.0 - lambda) * t2;
        assert!(
            g.evaluate(mid) > lambda * g.evaluate(t1) + (1.0 - lambda) * g.evaluate(t2),
            "witness must reproduce the violation, gap = {gap}"
        );
    }

    #[test]
    fn slope_evidence_is_recorded() {
        let report = GrowthFunction::monomial(2.0).is_strictly_convex();
        assert!(report.slope_samples.len() >= 16);
        assert!(report
            .slope_samples
            .windows(2)
            .all(|w| w[1].1 >= w[0].1 - 1e-12));
    }
}
