//! One-dimensional monotone profiles driving the axis-stretch mappings:
//! explicit piecewise-linear functions, periodic ones, and the Cantor
//! limit profile whose derivative vanishes on a fat Cantor set.

/// Central-removal Cantor construction on `[0, 1]`.
///
/// Step `j` removes, from each of the `2^{j−1}` surviving segments, a
/// central interval; the removals at step `j` have total length `qʲ`.
/// The surviving set `E = ∩ Eⱼ` has measure `1 − Σ qʲ = λ` when
/// `q = (1−λ)/(2−λ)`.
#[derive(Clone, Copy, Debug)]
pub struct CantorSet {
    pub q: f64,
    pub lambda: f64,
}

const DESCENT_CAP: u32 = 220;

impl CantorSet {
    /// Choose the removal ratio so the surviving measure is `lambda`.
    pub fn with_measure(lambda: f64) -> CantorSet {
        assert!(lambda > 0.0 && lambda < 1.0);
        CantorSet {
            q: (1.0 - lambda) / (2.0 - lambda),
            lambda,
        }
    }

    /// Measure of the level-`j` surviving set `Eⱼ`.
    pub fn level_measure(&self, j: u32) -> f64 {
        let mut removed = 0.0;
        let mut qi = 1.0;
        for _ in 0..j {
            qi *= self.q;
            removed += qi;
        }
        1.0 - removed
    }

    /// `|E ∩ [0, x]|` for `x ∈ [0, 1]`, by descending the removal tree.
    pub fn measure_up_to(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return self.lambda;
        }
        let mut acc = 0.0;
        let mut seg_lo = 0.0;
        let mut seg_len = 1.0;
        let mut seg_measure = self.lambda;
        let mut removal = 1.0;
        for level in 1..=DESCENT_CAP {
            removal *= self.q;
            // every level-(j−1) segment loses a central interval of
            // length qʲ/2^{j−1}
            let r = removal / 2.0_f64.powi(level as i32 - 1);
            let child_len = 0.5 * (seg_len - r);
            let cut_lo = seg_lo + child_len;
            let cut_hi = cut_lo + r;
            if x < cut_lo {
                seg_len = child_len;
            } else if x > cut_hi {
                acc += 0.5 * seg_measure;
                seg_lo = cut_hi;
                seg_len = child_len;
            } else {
                return acc + 0.5 * seg_measure;
            }
            seg_measure *= 0.5;
            if seg_len <= 0.0 || seg_measure < 1e-18 {
                break;
            }
        }
        acc + seg_measure * ((x - seg_lo) / seg_len).clamp(0.0, 1.0)
    }

    /// Whether `x` survives every removal the descent can resolve.
    pub fn contains(&self, x: f64) -> bool {
        if !(0.0..=1.0).contains(&x) {
            return false;
        }
        let mut seg_lo = 0.0;
        let mut seg_len = 1.0;
        let mut removal = 1.0;
        for level in 1..=DESCENT_CAP {
            removal *= self.q;
            let r = removal / 2.0_f64.powi(level as i32 - 1);
            let child_len = 0.5 * (seg_len - r);
            let cut_lo = seg_lo + child_len;
            let cut_hi = cut_lo + r;
            // removals are open intervals: their endpoints stay in E
            if x <= cut_lo {
                seg_len = child_len;
            } else if x >= cut_hi {
                seg_lo = cut_hi;
                seg_len = child_len;
            } else {
                return false;
            }
            if seg_len <= f64::EPSILON * 4.0 {
                break;
            }
        }
        true
    }

    /// The `2ʲ` closed segments of `Eⱼ`, in order.
    pub fn level_segments(&self, j: u32) -> Vec<(f64, f64)> {
        assert!(j <= 22, "segment enumeration is exponential in the level");
        let mut segs = vec![(0.0_f64, 1.0_f64)];
        let mut removal = 1.0;
        for level in 1..=j {
            removal *= self.q;
            let r = removal / 2.0_f64.powi(level as i32 - 1);
            let mut next = Vec::with_capacity(segs.len() * 2);
            for &(lo, hi) in &segs {
                let child = 0.5 * (hi - lo - r);
                next.push((lo, lo + child));
                next.push((hi - child, hi));
            }
            segs = next;
        }
        segs
    }
}

/// Monotone piecewise-linear profile of one coordinate.
#[derive(Clone, Debug)]
pub enum Profile1D {
    /// Linear pieces on `[breaks[i], breaks[i+1])`; extended by the edge
    /// slopes outside the break range.
    Explicit {
        breaks: Vec<f64>,
        values: Vec<f64>,
        slopes: Vec<f64>,
    },
    /// A profile on `[0, period]` repeated with a per-period shift:
    /// `ψ(x + period) = ψ(x) + shift`.
    Periodic {
        period: f64,
        shift: f64,
        breaks: Vec<f64>,
        values: Vec<f64>,
        slopes: Vec<f64>,
    },
    /// The Cantor limit: slope 0 on the surviving set, `tau0` off it,
    /// 1-periodic with shift `(1 − λ)·tau0`.
    CantorLimit { set: CantorSet, tau0: f64 },
}

impl Profile1D {
    /// Explicit profile through `value_at_first` at `breaks[0]`.
    pub fn explicit(breaks: Vec<f64>, slopes: Vec<f64>, value_at_first: f64) -> Profile1D {
        assert_eq!(breaks.len(), slopes.len() + 1);
        let mut values = Vec::with_capacity(breaks.len());
        values.push(value_at_first);
        for i in 0..slopes.len() {
            let v = values[i] + slopes[i] * (breaks[i + 1] - breaks[i]);
            values.push(v);
        }
        Profile1D::Explicit {
            breaks,
            values,
            slopes,
        }
    }

    /// Periodic profile on `[0, period]` starting at 0; the shift is the
    /// accumulated value over one period (gluing condition).
    pub fn periodic(period: f64, breaks: Vec<f64>, slopes: Vec<f64>) -> Profile1D {
        assert_eq!(breaks.len(), slopes.len() + 1);
        assert!((breaks[0] - 0.0).abs() < 1e-15 && (breaks[breaks.len() - 1] - period).abs() < 1e-12);
        let mut values = Vec::with_capacity(breaks.len());
        values.push(0.0);
        for i in 0..slopes.len() {
            let v = values[i] + slopes[i] * (breaks[i + 1] - breaks[i]);
            values.push(v);
        }
        let shift = values[values.len() - 1];
        Profile1D::Periodic {
            period,
            shift,
            breaks,
            values,
            slopes,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Profile1D::Explicit {
                breaks,
                values,
                slopes,
            } => eval_pl(breaks, values, slopes, x),
            Profile1D::Periodic {
                period,
                shift,
                breaks,
                values,
                slopes,
            } => {
                let k = (x / period).floor();
                let pos = x - k * period;
                k * shift + eval_pl(breaks, values, slopes, pos)
            }
            Profile1D::CantorLimit { set, tau0 } => {
                let k = x.floor();
                let pos = x - k;
                let shift = (1.0 - set.lambda) * tau0;
                k * shift + tau0 * (pos - set.measure_up_to(pos))
            }
        }
    }

    /// Slope at `x`. On an exact break the tie goes to the lower slab
    /// when `tie_lower` is set.
    pub fn slope_at(&self, x: f64, tie_lower: bool) -> f64 {
        match self {
            Profile1D::Explicit { breaks, slopes, .. } => slope_pl(breaks, slopes, x, tie_lower),
            Profile1D::Periodic {
                period,
                breaks,
                slopes,
                ..
            } => {
                let k = (x / period).floor();
                let pos = x - k * period;
                if tie_lower && pos == 0.0 {
                    return slopes[slopes.len() - 1];
                }
                slope_pl(breaks, slopes, pos, tie_lower)
            }
            Profile1D::CantorLimit { set, tau0 } => {
                let pos = x - x.floor();
                if set.contains(pos) {
                    0.0
                } else {
                    *tau0
                }
            }
        }
    }

    /// Largest slope, a Lipschitz constant for the profile.
    pub fn max_slope(&self) -> f64 {
        match self {
            Profile1D::Explicit { slopes, .. } | Profile1D::Periodic { slopes, .. } => {
                slopes.iter().cloned().fold(0.0, f64::max)
            }
            Profile1D::CantorLimit { tau0, .. } => *tau0,
        }
    }

    /// Interface positions inside `[lo, hi]`, capped; used by gluing
    /// checks. Returns `None` when the count would exceed the cap.
    pub fn breaks_in(&self, lo: f64, hi: f64, cap: usize) -> Option<Vec<f64>> {
        match self {
            Profile1D::Explicit { breaks, .. } => Some(
                breaks
                    .iter()
                    .copied()
                    .filter(|b| *b > lo && *b < hi)
                    .take(cap)
                    .collect(),
            ),
            Profile1D::Periodic { period, breaks, .. } => {
                let k_lo = (lo / period).floor() as i64;
                let k_hi = (hi / period).ceil() as i64;
                let per_period = breaks.len() as i64;
                if (k_hi - k_lo + 1) * per_period > cap as i64 {
                    return None;
                }
                let mut out = Vec::new();
                for k in k_lo..=k_hi {
                    for b in breaks {
                        let x = k as f64 * period + b;
                        if x > lo && x < hi {
                            out.push(x);
                        }
                    }
                }
                out.sort_by(|a, b| a.total_cmp(b));
                out.dedup();
                Some(out)
            }
            Profile1D::CantorLimit { .. } => None,
        }
    }
}

fn eval_pl(breaks: &[f64], values: &[f64], slopes: &[f64], x: f64) -> f64 {
    let m = slopes.len();
    if x <= breaks[0] {
        return values[0] + slopes[0] * (x - breaks[0]);
    }
    if x >= breaks[m] {
        return values[m] + slopes[m - 1] * (x - breaks[m]);
    }
    let i = match breaks.binary_search_by(|b| b.total_cmp(&x)) {
        Ok(i) => return values[i],
        Err(i) => i - 1,
    };
    values[i] + slopes[i] * (x - breaks[i])
}

fn slope_pl(breaks: &[f64], slopes: &[f64], x: f64, tie_lower: bool) -> f64 {
    let m = slopes.len();
    if x <= breaks[0] {
        return slopes[0];
    }
    if x >= breaks[m] {
        return slopes[m - 1];
    }
    match breaks.binary_search_by(|b| b.total_cmp(&x)) {
        Ok(i) => {
            if tie_lower {
                slopes[i.saturating_sub(1).min(m - 1)]
            } else {
                slopes[i.min(m - 1)]
            }
        }
        Err(i) => slopes[i - 1],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn middle_removal_ratio_for_half_measure() {
        let c = CantorSet::with_measure(0.5);
        assert!((c.q - 1.0 / 3.0).abs() < 1e-15);
        // after 10 levels: 1 − Σ_{i=1..10} 3⁻ⁱ
        let mut expected = 1.0;
        for i in 1..=10 {
            expected -= 3.0_f64.powi(-i);
        }
        assert!((c.level_measure(10) - expected).abs() < 1e-15);
        // exact bookkeeping agrees: 2^10 segments of equal length
        let segs = c.level_segments(10);
        assert_eq!(segs.len(), 1024);
        let total: f64 = segs.iter().map(|(a, b)| b - a).sum();
        assert!((total - expected).abs() < 1e-12);
    }

    #[test]
    fn cantor_measure_function() {
        let c = CantorSet::with_measure(0.5);
        assert_eq!(c.measure_up_to(0.0), 0.0);
        assert!((c.measure_up_to(1.0) - 0.5).abs() < 1e-15);
        // symmetric construction: half the measure sits left of 1/2
        assert!((c.measure_up_to(0.5) - 0.25).abs() < 1e-12);
        // monotone
        let mut prev = 0.0;
        for k in 0..=1000 {
            let v = c.measure_up_to(k as f64 / 1000.0);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn cantor_membership_matches_segments() {
        let c = CantorSet::with_measure(0.5);
        let segs = c.level_segments(6);
        // the center of the first removal is definitely outside E
        assert!(!c.contains(0.5));
        assert!(c.contains(0.0));
        assert!(c.contains(1.0));
        // endpoints of the leftmost segment share the descent arithmetic
        assert!(c.contains(segs[0].0), "left endpoint survives");
        assert!(c.contains(segs[0].1), "right endpoint survives: {}", segs[0].1);
    }

    #[test]
    fn periodic_profile_glues() {
        // slopes 1 then 3 on half-periods of length 1/2
        let p = Profile1D::periodic(1.0, vec![0.0, 0.5, 1.0], vec![1.0, 3.0]);
        assert_eq!(p.eval(0.0), 0.0);
        assert!((p.eval(1.0) - 2.0).abs() < 1e-15);
        assert!((p.eval(2.5) - (2.0 * 2.0 + 0.5)).abs() < 1e-15);
        assert!((p.eval(-0.5) - (-2.0 + 0.5)).abs() < 1e-15);
        assert_eq!(p.slope_at(0.25, false), 1.0);
        assert_eq!(p.slope_at(0.75, false), 3.0);
        // tie at the sub-break goes to the lower slab
        assert_eq!(p.slope_at(0.5, true), 1.0);
        assert_eq!(p.slope_at(0.5, false), 3.0);
    }

    #[test]
    fn cantor_limit_profile_values() {
        let tau0 = 2.0;
        let set = CantorSet::with_measure(0.5);
        let p = Profile1D::CantorLimit { set, tau0 };
        assert_eq!(p.eval(0.0), 0.0);
        // ψ(1) = (1 − λ)·τ0 = 1
        assert!((p.eval(1.0) - 1.0).abs() < 1e-12);
        // Lipschitz with constant τ0
        let nodes: Vec<f64> = (0..=500).map(|k| k as f64 / 500.0).collect();
        let vals: Vec<f64> = nodes.iter().map(|&x| p.eval(x)).collect();
        for i in 0..nodes.len() {
            for j in (i + 1)..nodes.len() {
                let lhs = (vals[j] - vals[i]).abs();
                let rhs = tau0 * (nodes[j] - nodes[i]).abs();
                assert!(lhs <= rhs + 1e-12);
            }
        }
    }
}
