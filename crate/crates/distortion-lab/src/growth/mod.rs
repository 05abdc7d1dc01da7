//! Piecewise-symbolic growth functions on `[0, ∞]`.
//!
//! A [`GrowthFunction`] is a list of symbolic pieces tiling `[0, ∞)`
//! together with an optional finite `domain_end` `T₀` past which the
//! value is `+∞`, and point overrides at `t = 0`, `t = T₀` and `t = ∞`.
//! The symbolic kinds are closed under the operations the toolkit
//! needs (inner power substitution, restriction, constant shifts), and
//! a tabulated kind serves as the fallback for everything else.
//!
//! Evaluation is total on `[0, ∞]` with values in `[0, ∞]`. Whether a
//! function is nondecreasing is detected at construction time by dense
//! sampling and kept as a flag; operations that require monotonicity
//! check the flag. Non-monotone functions are deliberately allowed so
//! the sharpness dispatcher can consume them.

mod analysis;
mod calderon;
mod decompose;
mod json;
pub mod stock;
mod transform;

pub use analysis::{ConvexityReport, SlopeTrend};

/// Worst midpoint-convexity violation of `g` on an explicit grid, as
/// `(t1, t2, λ, gap)`; `None` when the grid shows no violation.
pub fn convexity_witness(g: &GrowthFunction, grid: &[f64]) -> Option<(f64, f64, f64, f64)> {
    analysis::convexity_violation(g, grid)
}
pub use calderon::{calderon_derivative_integral, calderon_integral, classify_calderon_tail, TailVerdict};
pub use decompose::{decompose, DecompositionResult};
pub use json::MonotonePolicy;
pub use transform::{
    convex_minorant, generalized_inverse, power_transform, regularize, truncate_below,
    PowerDirection,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GrowthError {
    #[error("invalid growth function spec: {0}")]
    Spec(String),
    #[error("function is not convex near t = {t}: right difference quotients decrease")]
    NotConvex { t: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("tail behavior cannot be certified for tabulated pieces")]
    InconclusiveTail,
    #[error("no tangent point found on the search range [{lo}, {hi}]")]
    NoTangent { lo: f64, hi: f64 },
}

/// Symbolic forms a piece can take. All formulas are in the raw
/// variable `t` of the piece's interval.
#[derive(Clone, Debug, PartialEq)]
pub enum PieceKind {
    /// `c`
    Constant(f64),
    /// `intercept + slope·t`
    Linear { intercept: f64, slope: f64 },
    /// `offset + coeff·t^exponent`
    Power { coeff: f64, exponent: f64, offset: f64 },
    /// `offset + coeff·(t^inner − shift)^outer`
    ShiftedPower {
        coeff: f64,
        inner: f64,
        shift: f64,
        outer: f64,
        offset: f64,
    },
    /// `offset + coeff·t^power·ln(base + t^inner)^log_exp`
    LogPower {
        coeff: f64,
        power: f64,
        base: f64,
        log_exp: f64,
        inner: f64,
        offset: f64,
    },
    /// `offset + coeff·exp(rate·t^exponent)`
    ExpPower {
        coeff: f64,
        rate: f64,
        exponent: f64,
        offset: f64,
    },
    /// Piecewise-linear interpolation through `(ts, values)`, extended
    /// with the edge slopes outside the knot range.
    Tabulated { ts: Vec<f64>, values: Vec<f64> },
}

impl PieceKind {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            PieceKind::Constant(c) => c,
            PieceKind::Linear { intercept, slope } => intercept + slope * t,
            PieceKind::Power {
                coeff,
                exponent,
                offset,
            } => offset + coeff * t.powf(exponent),
            PieceKind::ShiftedPower {
                coeff,
                inner,
                shift,
                outer,
                offset,
            } => offset + coeff * (t.powf(inner) - shift).powf(outer),
            PieceKind::LogPower {
                coeff,
                power,
                base,
                log_exp,
                inner,
                offset,
            } => {
                let ln = (base + t.powf(inner)).ln();
                offset + coeff * t.powf(power) * ln.powf(log_exp)
            }
            PieceKind::ExpPower {
                coeff,
                rate,
                exponent,
                offset,
            } => offset + coeff * (rate * t.powf(exponent)).exp(),
            PieceKind::Tabulated { ref ts, ref values } => eval_tabulated(ts, values, t),
        }
    }

    /// Analytic derivative at `t`; for tabulated pieces, the slope of
    /// the segment to the right of `t`.
    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            PieceKind::Constant(_) => 0.0,
            PieceKind::Linear { slope, .. } => slope,
            PieceKind::Power {
                coeff, exponent, ..
            } => {
                if exponent == 0.0 {
                    0.0
                } else {
                    coeff * exponent * t.powf(exponent - 1.0)
                }
            }
            PieceKind::ShiftedPower {
                coeff,
                inner,
                shift,
                outer,
                ..
            } => {
                let base = t.powf(inner) - shift;
                coeff * outer * base.powf(outer - 1.0) * inner * t.powf(inner - 1.0)
            }
            PieceKind::LogPower {
                coeff,
                power,
                base,
                log_exp,
                inner,
                ..
            } => {
                let arg = base + t.powf(inner);
                let ln = arg.ln();
                let term1 = if power == 0.0 {
                    0.0
                } else {
                    power * t.powf(power - 1.0) * ln.powf(log_exp)
                };
                let term2 = if log_exp == 0.0 {
                    0.0
                } else {
                    t.powf(power) * log_exp * ln.powf(log_exp - 1.0) * inner * t.powf(inner - 1.0)
                        / arg
                };
                coeff * (term1 + term2)
            }
            PieceKind::ExpPower {
                coeff,
                rate,
                exponent,
                ..
            } => {
                if exponent == 0.0 {
                    0.0
                } else {
                    coeff * rate * exponent * t.powf(exponent - 1.0) * (rate * t.powf(exponent)).exp()
                }
            }
            PieceKind::Tabulated { ref ts, ref values } => tabulated_slope(ts, values, t),
        }
    }

    /// Shift the piece by a constant.
    pub fn add_constant(&self, delta: f64) -> PieceKind {
        let mut k = self.clone();
        match k {
            PieceKind::Constant(ref mut c) => *c += delta,
            PieceKind::Linear { ref mut intercept, .. } => *intercept += delta,
            PieceKind::Power { ref mut offset, .. }
            | PieceKind::ShiftedPower { ref mut offset, .. }
            | PieceKind::LogPower { ref mut offset, .. }
            | PieceKind::ExpPower { ref mut offset, .. } => *offset += delta,
            PieceKind::Tabulated { ref mut values, .. } => {
                for v in values.iter_mut() {
                    *v += delta;
                }
            }
        }
        k
    }

    /// The kind for `t ↦ self(t^k)`. Knot abscissae of tabulated pieces
    /// are remapped; symbolic kinds absorb the substitution exactly.
    pub fn compose_inner_power(&self, k: f64) -> PieceKind {
        match *self {
            PieceKind::Constant(c) => PieceKind::Constant(c),
            PieceKind::Linear { intercept, slope } => {
                if slope == 0.0 {
                    PieceKind::Constant(intercept)
                } else {
                    PieceKind::Power {
                        coeff: slope,
                        exponent: k,
                        offset: intercept,
                    }
                }
            }
            PieceKind::Power {
                coeff,
                exponent,
                offset,
            } => PieceKind::Power {
                coeff,
                exponent: exponent * k,
                offset,
            },
            PieceKind::ShiftedPower {
                coeff,
                inner,
                shift,
                outer,
                offset,
            } => PieceKind::ShiftedPower {
                coeff,
                inner: inner * k,
                shift,
                outer,
                offset,
            },
            PieceKind::LogPower {
                coeff,
                power,
                base,
                log_exp,
                inner,
                offset,
            } => PieceKind::LogPower {
                coeff,
                power: power * k,
                base,
                log_exp,
                inner: inner * k,
                offset,
            },
            PieceKind::ExpPower {
                coeff,
                rate,
                exponent,
                offset,
            } => PieceKind::ExpPower {
                coeff,
                rate,
                exponent: exponent * k,
                offset,
            },
            PieceKind::Tabulated { ref ts, ref values } => PieceKind::Tabulated {
                ts: ts.iter().map(|u| u.powf(1.0 / k)).collect(),
                values: values.clone(),
            },
        }
    }

    /// `Some(value)` when the piece is constant.
    pub fn flat_value(&self) -> Option<f64> {
        match *self {
            PieceKind::Constant(c) => Some(c),
            PieceKind::Linear { intercept, slope } if slope == 0.0 => Some(intercept),
            PieceKind::Power { coeff, offset, .. } if coeff == 0.0 => Some(offset),
            _ => None,
        }
    }

    /// Limit of the piece value as `t → ∞` (only meaningful for a last
    /// piece on an unbounded interval).
    pub fn limit_at_infinity(&self) -> f64 {
        match *self {
            PieceKind::Constant(c) => c,
            PieceKind::Linear { intercept, slope } => {
                if slope > 0.0 {
                    f64::INFINITY
                } else if slope < 0.0 {
                    f64::NEG_INFINITY
                } else {
                    intercept
                }
            }
            PieceKind::Power {
                coeff,
                exponent,
                offset,
            } => {
                if coeff == 0.0 || exponent == 0.0 {
                    offset + coeff
                } else if exponent < 0.0 {
                    offset
                } else if coeff > 0.0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            }
            PieceKind::ShiftedPower {
                coeff,
                inner,
                outer,
                offset,
                ..
            } => {
                let growth = inner * outer;
                if coeff == 0.0 || growth == 0.0 {
                    offset + coeff
                } else if growth < 0.0 {
                    offset
                } else if coeff > 0.0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            }
            PieceKind::LogPower {
                coeff,
                power,
                log_exp,
                inner,
                offset,
                ..
            } => {
                if coeff == 0.0 {
                    return offset;
                }
                let grows = power > 0.0 || (power == 0.0 && inner > 0.0 && log_exp > 0.0);
                if grows {
                    if coeff > 0.0 {
                        f64::INFINITY
                    } else {
                        f64::NEG_INFINITY
                    }
                } else if power < 0.0 || (power == 0.0 && log_exp < 0.0) {
                    offset
                } else {
                    // power == 0, log_exp == 0
                    offset + coeff
                }
            }
            PieceKind::ExpPower {
                coeff,
                rate,
                exponent,
                offset,
            } => {
                if coeff == 0.0 || rate == 0.0 || exponent == 0.0 {
                    offset + coeff * (rate * if exponent == 0.0 { 1.0 } else { 0.0 }).exp()
                } else if rate > 0.0 && exponent > 0.0 {
                    if coeff > 0.0 {
                        f64::INFINITY
                    } else {
                        f64::NEG_INFINITY
                    }
                } else {
                    offset
                }
            }
            PieceKind::Tabulated { ref ts, ref values } => {
                let m = ts.len();
                if m < 2 {
                    return values.first().copied().unwrap_or(0.0);
                }
                let slope = (values[m - 1] - values[m - 2]) / (ts[m - 1] - ts[m - 2]);
                if slope > 0.0 {
                    f64::INFINITY
                } else {
                    values[m - 1]
                }
            }
        }
    }
}

fn eval_tabulated(ts: &[f64], values: &[f64], t: f64) -> f64 {
    let m = ts.len();
    if m == 1 {
        return values[0];
    }
    if t <= ts[0] {
        let slope = (values[1] - values[0]) / (ts[1] - ts[0]);
        return values[0] + slope * (t - ts[0]);
    }
    if t >= ts[m - 1] {
        let slope = (values[m - 1] - values[m - 2]) / (ts[m - 1] - ts[m - 2]);
        return values[m - 1] + slope * (t - ts[m - 1]);
    }
    let i = match ts.binary_search_by(|x| x.total_cmp(&t)) {
        Ok(i) => return values[i],
        Err(i) => i - 1,
    };
    let w = (t - ts[i]) / (ts[i + 1] - ts[i]);
    values[i] + w * (values[i + 1] - values[i])
}

fn tabulated_slope(ts: &[f64], values: &[f64], t: f64) -> f64 {
    let m = ts.len();
    if m < 2 {
        return 0.0;
    }
    let i = if t <= ts[0] {
        0
    } else if t >= ts[m - 2] {
        m - 2
    } else {
        match ts.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => i.min(m - 2),
            Err(i) => i - 1,
        }
    };
    (values[i + 1] - values[i]) / (ts[i + 1] - ts[i])
}

/// One piece: the kind applies on `[lo, hi)`.
#[derive(Clone, Debug)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub kind: PieceKind,
}

impl Piece {
    pub fn new(lo: f64, hi: f64, kind: PieceKind) -> Self {
        Piece { lo, hi, kind }
    }
}

/// A growth function: symbolic pieces on `[0, domain_end)`, `+∞`
/// beyond, with optional point overrides.
#[derive(Clone, Debug)]
pub struct GrowthFunction {
    label: String,
    pieces: Vec<Piece>,
    domain_end: f64,
    end_value: Option<f64>,
    origin_value: Option<f64>,
    infinity_value: Option<f64>,
    nondecreasing: bool,
}

impl GrowthFunction {
    /// Build and validate. Pieces must tile `[0, ∞)` without gaps or
    /// overlaps, and sampled values must stay in `[0, ∞)` on the finite
    /// part `[0, domain_end)`. Monotonicity is detected, not enforced.
    pub fn new(
        label: impl Into<String>,
        pieces: Vec<Piece>,
        domain_end: f64,
    ) -> Result<Self, GrowthError> {
        let mut g = GrowthFunction {
            label: label.into(),
            pieces,
            domain_end,
            end_value: None,
            origin_value: None,
            infinity_value: None,
            nondecreasing: true,
        };
        g.validate()?;
        g.nondecreasing = g.detect_nondecreasing();
        Ok(g)
    }

    /// Value override at exactly `t = domain_end` (must be finite).
    pub fn with_end_value(mut self, v: f64) -> Self {
        self.end_value = Some(v);
        self.nondecreasing = self.detect_nondecreasing();
        self
    }

    /// Value override at exactly `t = 0`.
    pub fn with_origin_value(mut self, v: f64) -> Self {
        self.origin_value = Some(v);
        self.nondecreasing = self.detect_nondecreasing();
        self
    }

    /// Value override at `t = +∞` (may be `f64::INFINITY`).
    pub fn with_infinity_value(mut self, v: f64) -> Self {
        self.infinity_value = Some(v);
        self.nondecreasing = self.detect_nondecreasing();
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// `T₀`: the value is `+∞` for `t > T₀`; `+∞` when never infinite.
    pub fn domain_end(&self) -> f64 {
        self.domain_end
    }

    pub fn end_value(&self) -> Option<f64> {
        self.end_value
    }

    pub fn origin_value(&self) -> Option<f64> {
        self.origin_value
    }

    pub fn infinity_value(&self) -> Option<f64> {
        self.infinity_value
    }

    /// Whether dense sampling found the function nondecreasing.
    pub fn is_nondecreasing(&self) -> bool {
        self.nondecreasing
    }

    /// Total evaluation on `[0, ∞]`.
    pub fn evaluate(&self, t: f64) -> f64 {
        assert!(t >= 0.0, "growth functions live on [0, ∞]");
        if t == 0.0 {
            if let Some(v) = self.origin_value {
                return v;
            }
        }
        if t.is_infinite() {
            if let Some(v) = self.infinity_value {
                return v;
            }
            if self.domain_end.is_finite() {
                return f64::INFINITY;
            }
            return self.pieces.last().map_or(0.0, |p| p.kind.limit_at_infinity());
        }
        if self.domain_end.is_finite() {
            if t == self.domain_end {
                return self.end_value.unwrap_or(f64::INFINITY);
            }
            if t > self.domain_end {
                return f64::INFINITY;
            }
        }
        self.piece_at(t).kind.eval(t)
    }

    /// The piece whose half-open interval `[lo, hi)` contains `t`.
    pub fn piece_at(&self, t: f64) -> &Piece {
        debug_assert!(t.is_finite() && t >= 0.0);
        let idx = match self
            .pieces
            .binary_search_by(|p| p.lo.total_cmp(&t))
        {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        };
        &self.pieces[idx]
    }

    /// Right derivative ignoring convexity diagnostics. `+∞` at and
    /// beyond a finite `domain_end`.
    pub fn right_derivative_raw(&self, t: f64) -> f64 {
        assert!(t >= 0.0 && t.is_finite());
        if self.domain_end.is_finite() && t >= self.domain_end {
            return f64::INFINITY;
        }
        self.piece_at(t).kind.derivative(t)
    }

    /// Right derivative `φ′₊(t)` with a local convexity check: the right
    /// difference quotients over shrinking steps must not decrease.
    pub fn right_derivative(&self, t: f64) -> Result<f64, GrowthError> {
        let d = self.right_derivative_raw(t);
        if d.is_infinite() {
            return Ok(d);
        }
        let scale = t.abs().max(1.0);
        let value_scale = self.evaluate(t).abs().max(1.0);
        let mut prev: Option<f64> = None;
        let mut h = 1e-3 * scale;
        for _ in 0..3 {
            let q = (self.evaluate(t + h) - self.evaluate(t)) / h;
            if q.is_finite() {
                if let Some(p) = prev {
                    if p.is_finite() && q > p * (1.0 + 1e-6) + 1e-9 * value_scale {
                        return Err(GrowthError::NotConvex { t });
                    }
                }
                prev = Some(q);
            }
            h *= 0.25;
        }
        Ok(d)
    }

    /// Supremum of `{t : g(t) = 0}` (`t₀` in the truncation bound), 0
    /// when the function is positive everywhere.
    pub fn zero_threshold(&self) -> f64 {
        let mut t0: f64 = 0.0;
        for (t, v) in self.sample_points() {
            if v == 0.0 && t.is_finite() {
                t0 = t0.max(t);
            }
        }
        t0
    }

    /// Dense sample of `(t, value)` pairs used for validation and the
    /// monotonicity flag. Covers every piece plus a geometric extension
    /// of the last unbounded piece.
    pub(crate) fn sample_points(&self) -> Vec<(f64, f64)> {
        let mut ts: Vec<f64> = Vec::new();
        if self.origin_value.is_some() {
            ts.push(0.0);
        }
        let cap = if self.domain_end.is_finite() {
            self.domain_end
        } else {
            f64::INFINITY
        };
        for p in &self.pieces {
            let lo = p.lo;
            let hi = p.hi.min(cap);
            if lo >= hi {
                continue;
            }
            if hi.is_finite() {
                for k in 0..=24 {
                    ts.push(lo + (hi - lo) * (k as f64) / 24.0 * (1.0 - 1e-12));
                }
            } else {
                let start = lo.max(1e-6);
                let stop = (start * 1e8).max(1e6);
                ts.push(lo);
                let steps = 64;
                for k in 0..=steps {
                    let x = start * (stop / start).powf(k as f64 / steps as f64);
                    ts.push(x);
                }
            }
        }
        ts.retain(|t| t.is_finite() && *t >= 0.0);
        ts.sort_by(|a, b| a.total_cmp(b));
        ts.dedup();
        ts.into_iter().map(|t| (t, self.evaluate(t))).collect()
    }

    fn detect_nondecreasing(&self) -> bool {
        let samples = self.sample_points();
        let mut prev: Option<f64> = None;
        for &(_, v) in &samples {
            if let Some(p) = prev {
                let tol = 1e-11 * p.abs().max(1.0);
                if v < p - tol {
                    return false;
                }
            }
            prev = Some(v);
        }
        // Point overrides must respect the order too.
        if let (Some(&(_, last)), Some(end)) = (samples.last(), self.end_value) {
            if self.domain_end.is_finite() && end < last - 1e-11 * last.abs().max(1.0) {
                return false;
            }
        }
        if let (Some(&(_, last)), Some(inf_v)) = (samples.last(), self.infinity_value) {
            if inf_v < last - 1e-11 * last.abs().max(1.0) {
                return false;
            }
        }
        true
    }

    fn validate(&self) -> Result<(), GrowthError> {
        if self.pieces.is_empty() {
            return Err(GrowthError::Spec("no pieces".into()));
        }
        if self.pieces[0].lo != 0.0 {
            return Err(GrowthError::Spec(format!(
                "pieces must start at 0, first piece starts at {}",
                self.pieces[0].lo
            )));
        }
        for w in self.pieces.windows(2) {
            if w[0].hi != w[1].lo {
                return Err(GrowthError::Spec(format!(
                    "gap or overlap between pieces at {} vs {}",
                    w[0].hi, w[1].lo
                )));
            }
        }
        for (i, p) in self.pieces.iter().enumerate() {
            if !(p.lo < p.hi) {
                return Err(GrowthError::Spec(format!(
                    "piece {i} has empty interval [{}, {})",
                    p.lo, p.hi
                )));
            }
            if let PieceKind::Tabulated { ts, values } = &p.kind {
                if ts.len() != values.len() || ts.len() < 2 {
                    return Err(GrowthError::Spec(format!(
                        "piece {i}: tabulated data needs matching ts/values with ≥ 2 knots"
                    )));
                }
                if ts.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(GrowthError::Spec(format!(
                        "piece {i}: tabulated knots must be strictly increasing"
                    )));
                }
            }
        }
        let last_hi = self.pieces.last().unwrap().hi;
        if last_hi.is_finite() {
            return Err(GrowthError::Spec(format!(
                "pieces must tile [0, ∞); last piece ends at {last_hi}"
            )));
        }
        if self.domain_end <= 0.0 {
            return Err(GrowthError::Spec("domain_end must be positive".into()));
        }
        // Sampled range check on the finite part.
        for (t, v) in self.sample_points() {
            if v.is_nan() {
                return Err(GrowthError::Spec(format!("value is NaN at t = {t}")));
            }
            if v < 0.0 {
                return Err(GrowthError::Spec(format!(
                    "value {v} at t = {t} is negative; range is [0, ∞]"
                )));
            }
            if t < self.domain_end && v.is_infinite() {
                // f64 overflow of a genuinely unbounded piece is fine;
                // a bounded-form piece blowing up means bad coefficients.
                let unbounded_form = self.piece_at(t).kind.limit_at_infinity() == f64::INFINITY;
                if !unbounded_form {
                    return Err(GrowthError::Spec(format!(
                        "value is infinite at t = {t} < domain_end = {}",
                        self.domain_end
                    )));
                }
            }
        }
        Ok(())
    }

    /// Maximum jump across piece boundaries on the finite part; 0 for a
    /// continuous function.
    pub fn max_boundary_jump(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for w in self.pieces.windows(2) {
            let b = w[0].hi;
            if !b.is_finite() || b >= self.domain_end {
                continue;
            }
            let left = w[0].kind.eval(b);
            let right = w[1].kind.eval(b);
            if left.is_finite() && right.is_finite() {
                worst = worst.max((right - left).abs());
            } else if left.is_finite() != right.is_finite() {
                return f64::INFINITY;
            }
        }
        worst
    }

    /// True when the function is constant on the whole of `[1, ∞)`
    /// (finite part); the value at `∞` is not considered.
    pub fn is_constant_on_finite_part(&self) -> bool {
        let mut reference: Option<f64> = None;
        for (t, v) in self.sample_points() {
            if t < 1.0 {
                continue;
            }
            if self.domain_end.is_finite() && t >= self.domain_end {
                continue;
            }
            match reference {
                None => reference = Some(v),
                Some(r) => {
                    if (v - r).abs() > 1e-12 * r.abs().max(1.0) {
                        return false;
                    }
                }
            }
        }
        if self.domain_end.is_finite() {
            // A finite domain end means the value jumps to ∞: not constant.
            return false;
        }
        true
    }

    /// Shorthand constructors for ubiquitous shapes.
    pub fn power(coeff: f64, exponent: f64) -> GrowthFunction {
        GrowthFunction::new(
            format!("{coeff}*t^{exponent}"),
            vec![Piece::new(
                0.0,
                f64::INFINITY,
                PieceKind::Power {
                    coeff,
                    exponent,
                    offset: 0.0,
                },
            )],
            f64::INFINITY,
        )
        .expect("power function is always a valid growth function")
    }

    pub fn monomial(exponent: f64) -> GrowthFunction {
        GrowthFunction::power(1.0, exponent).with_label(format!("t^{exponent}"))
    }

    pub fn identity() -> GrowthFunction {
        GrowthFunction::new(
            "t",
            vec![Piece::new(
                0.0,
                f64::INFINITY,
                PieceKind::Linear {
                    intercept: 0.0,
                    slope: 1.0,
                },
            )],
            f64::INFINITY,
        )
        .expect("identity is valid")
    }

    pub fn constant(c: f64) -> GrowthFunction {
        GrowthFunction::new(
            format!("const {c}"),
            vec![Piece::new(0.0, f64::INFINITY, PieceKind::Constant(c))],
            f64::INFINITY,
        )
        .expect("constant is valid")
    }

    /// Load from the JSON DSL, requiring monotonicity.
    pub fn from_json_str(s: &str) -> Result<GrowthFunction, GrowthError> {
        json::from_json_str(s, MonotonePolicy::Require)
    }

    /// Load from the JSON DSL with an explicit monotonicity policy.
    pub fn from_json_str_with(s: &str, policy: MonotonePolicy) -> Result<GrowthFunction, GrowthError> {
        json::from_json_str(s, policy)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        json::to_json_value(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_evaluation() {
        let g = GrowthFunction::monomial(2.0);
        assert_eq!(g.evaluate(3.0), 9.0);
        assert_eq!(g.evaluate(0.0), 0.0);
        assert_eq!(g.evaluate(f64::INFINITY), f64::INFINITY);
    }

    #[test]
    fn finite_domain_end_forces_infinity() {
        let g = GrowthFunction::new(
            "bounded",
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
        .unwrap();
        assert_eq!(g.evaluate(3.0), f64::INFINITY);
        assert_eq!(g.evaluate(2.0), f64::INFINITY);
        assert_eq!(g.evaluate(1.5), 1.5);
        let with_end = g.with_end_value(10.0);
        assert_eq!(with_end.evaluate(2.0), 10.0);
        assert_eq!(with_end.evaluate(2.5), f64::INFINITY);
    }

    #[test]
    fn right_derivative_of_power() {
        let g = GrowthFunction::monomial(3.0);
        let d = g.right_derivative(2.0).unwrap();
        assert!((d - 12.0).abs() < 1e-12);
    }

    #[test]
    fn right_derivative_takes_right_limit_at_kink() {
        let g = GrowthFunction::new(
            "kink",
            vec![
                Piece::new(
                    0.0,
                    1.0,
                    PieceKind::Linear {
                        intercept: 0.0,
                        slope: 1.0,
                    },
                ),
                Piece::new(
                    1.0,
                    f64::INFINITY,
                    PieceKind::Linear {
                        intercept: -2.0,
                        slope: 3.0,
                    },
                ),
            ],
            f64::INFINITY,
        )
        .unwrap();
        assert_eq!(g.right_derivative(1.0).unwrap(), 3.0);
        assert_eq!(g.right_derivative(0.5).unwrap(), 1.0);
    }

    #[test]
    fn right_derivative_rejects_concave() {
        let g = GrowthFunction::monomial(0.5);
        assert!(matches!(
            g.right_derivative(1.0),
            Err(GrowthError::NotConvex { .. })
        ));
    }

    #[test]
    fn right_derivative_matches_central_differences() {
        let g = GrowthFunction::monomial(2.0);
        let d = g.right_derivative(2.0).unwrap();
        let h = 1e-4;
        let fd = (g.evaluate(2.0 + h) - g.evaluate(2.0 - h)) / (2.0 * h);
        assert!((d - fd).abs() < 1e-6);
    }

    #[test]
    fn tiling_is_validated() {
        let err = GrowthFunction::new(
            "gap",
            vec![
                Piece::new(0.0, 1.0, PieceKind::Constant(0.0)),
                Piece::new(2.0, f64::INFINITY, PieceKind::Constant(1.0)),
            ],
            f64::INFINITY,
        );
        assert!(matches!(err, Err(GrowthError::Spec(_))));
    }

    #[test]
    fn negative_values_rejected() {
        let err = GrowthFunction::new(
            "neg",
            vec![Piece::new(
                0.0,
                f64::INFINITY,
                PieceKind::Linear {
                    intercept: -1.0,
                    slope: 1.0,
                },
            )],
            f64::INFINITY,
        );
        assert!(matches!(err, Err(GrowthError::Spec(_))));
    }

    #[test]
    fn monotone_flag_detects_valleys() {
        let valley = stock::valley_quadratic();
        assert!(!valley.is_nondecreasing());
        assert!(GrowthFunction::monomial(2.0).is_nondecreasing());
    }

    #[test]
    fn monotonicity_on_dense_grid() {
        for g in [
            GrowthFunction::monomial(2.0),
            stock::exp_t_minus_e(),
            stock::t_log(),
        ] {
            let samples = g.sample_points();
            for w in samples.windows(2) {
                if w[0].1.is_infinite() {
                    continue;
                }
                assert!(
                    w[1].1 >= w[0].1 - 1e-11 * w[0].1.abs().max(1.0),
                    "{} decreases between {:?} and {:?}",
                    g.label(),
                    w[0],
                    w[1]
                );
            }
        }
    }
}
