//! Mappings of box domains in `ℝⁿ` and their dilatation fields.
//!
//! A [`GridMapping`] is either analytic (a global affine map, or an
//! axis profile stretching one coordinate by a piecewise-linear
//! function) or sampled on the nodes of a uniform grid. The dilatation
//! engine computes per-cell Jacobians, operator norms, the outer
//! dilatation `K = ‖A‖ⁿ/|det A|` and its root `P = K^{1/(n−1)}`, with
//! the conventions `K = 1` for the zero matrix and `K = ∞` for
//! singular nonzero matrices.

pub mod io;
pub mod profile;

use rayon::prelude::*;
use thiserror::Error;

use crate::growth::{classify_calderon_tail, GrowthFunction, TailVerdict};
use crate::linalg;
use crate::xreal::CompensatedSum;

pub use profile::{CantorSet, Profile1D};

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("cell {0} touches the grid boundary; central differences unavailable")]
    BoundaryCell(usize),
    #[error("dilatation is infinite on {} cells (first: {:?})", cells.len(), cells.first())]
    InfiniteDilatation { cells: Vec<usize> },
    #[error("cube is not contained in the field domain")]
    CubeOutOfDomain,
    #[error("invalid mapping: {0}")]
    Invalid(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("format error: {0}")]
    Format(String),
}

/// Axis-aligned box `Π [lo_i, hi_i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxDomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, FieldError> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(FieldError::Invalid("box dimensions mismatch".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(FieldError::Invalid("box must be nondegenerate".into()));
        }
        Ok(BoxDomain { lo, hi })
    }

    pub fn unit(n: usize) -> Self {
        BoxDomain {
            lo: vec![0.0; n],
            hi: vec![1.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    pub fn contains_box(&self, other: &BoxDomain) -> bool {
        self.lo
            .iter()
            .zip(&other.lo)
            .all(|(a, b)| b >= &(a - 1e-12))
            && self.hi.iter().zip(&other.hi).all(|(a, b)| b <= &(a + 1e-12))
    }

    pub fn diameter(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt()
    }
}

/// `y = A·x + b`.
#[derive(Clone, Debug)]
pub struct AffineMap {
    pub matrix: Vec<f64>,
    pub offset: Vec<f64>,
}

impl AffineMap {
    pub fn stretch_last_axis(n: usize, c: f64) -> AffineMap {
        let mut matrix = vec![0.0; n * n];
        for i in 0..n {
            matrix[i * n + i] = if i == n - 1 { c } else { 1.0 };
        }
        AffineMap {
            matrix,
            offset: vec![0.0; n],
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let mut y = linalg::mat_vec(&self.matrix, n, x);
        for i in 0..n {
            y[i] += self.offset[i];
        }
        y
    }
}

/// Where a mapping's values come from.
#[derive(Clone, Debug)]
pub enum MapSource {
    /// One affine map on the whole box.
    Affine(AffineMap),
    /// Identity in every coordinate except `axis`, which maps through
    /// the profile: the slab structure of the explicit constructions.
    Profile { axis: usize, profile: Profile1D },
    /// Values at grid nodes, row-major with the last axis fastest and
    /// the component index innermost.
    Sampled(Vec<f64>),
}

/// A mapping of a box with an attached uniform grid.
#[derive(Clone, Debug)]
pub struct GridMapping {
    dim: usize,
    box_: BoxDomain,
    resolution: Vec<usize>,
    source: MapSource,
}

impl GridMapping {
    pub fn new(
        box_: BoxDomain,
        resolution: Vec<usize>,
        source: MapSource,
    ) -> Result<GridMapping, FieldError> {
        let dim = box_.dim();
        if resolution.len() != dim {
            return Err(FieldError::Invalid(
                "resolution must list one cell count per axis".into(),
            ));
        }
        if resolution.iter().any(|&r| r < 2) {
            return Err(FieldError::Invalid("resolution must be ≥ 2 per axis".into()));
        }
        match &source {
            MapSource::Affine(a) => {
                if a.matrix.len() != dim * dim || a.offset.len() != dim {
                    return Err(FieldError::Invalid("affine map has wrong dimensions".into()));
                }
            }
            MapSource::Profile { axis, .. } => {
                if *axis >= dim {
                    return Err(FieldError::Invalid("profile axis out of range".into()));
                }
            }
            MapSource::Sampled(values) => {
                let nodes: usize = resolution.iter().map(|r| r + 1).product();
                if values.len() != nodes * dim {
                    return Err(FieldError::Invalid(format!(
                        "sampled data has {} values, expected {}",
                        values.len(),
                        nodes * dim
                    )));
                }
            }
        }
        let m = GridMapping {
            dim,
            box_,
            resolution,
            source,
        };
        m.check_gluing()?;
        Ok(m)
    }

    /// Affine stretch of the last axis on the unit box: the elementary
    /// building block of the explicit sequences.
    pub fn affine_stretch(c: f64, n: usize) -> Result<GridMapping, FieldError> {
        if !(c > 0.0) {
            return Err(FieldError::Precondition("stretch factor must be positive".into()));
        }
        GridMapping::new(
            BoxDomain::unit(n),
            vec![8; n],
            MapSource::Affine(AffineMap::stretch_last_axis(n, c)),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn box_domain(&self) -> &BoxDomain {
        &self.box_
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn source(&self) -> &MapSource {
        &self.source
    }

    pub fn with_resolution(mut self, resolution: Vec<usize>) -> Result<GridMapping, FieldError> {
        if resolution.len() != self.dim || resolution.iter().any(|&r| r < 2) {
            return Err(FieldError::Invalid("bad resolution".into()));
        }
        if matches!(self.source, MapSource::Sampled(_)) {
            return Err(FieldError::Invalid(
                "cannot change the resolution of sampled data".into(),
            ));
        }
        self.resolution = resolution;
        Ok(self)
    }

    /// Adjacent affine pieces must agree on shared slab faces.
    fn check_gluing(&self) -> Result<(), FieldError> {
        if let MapSource::Profile { axis, profile } = &self.source {
            let lo = self.box_.lo[*axis];
            let hi = self.box_.hi[*axis];
            if let Some(breaks) = profile.breaks_in(lo, hi, 1 << 22) {
                for b in breaks {
                    let left = profile.eval(b - 1e-13 * (1.0 + b.abs()));
                    let right = profile.eval(b + 1e-13 * (1.0 + b.abs()));
                    let scale = left.abs().max(1.0);
                    if (right - left).abs() > 1e-10 * scale {
                        return Err(FieldError::Invalid(format!(
                            "profile is discontinuous at interface {b}: {left} vs {right}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        match &self.source {
            MapSource::Affine(a) => a.apply(x),
            MapSource::Profile { axis, profile } => {
                let mut y = x.to_vec();
                y[*axis] = profile.eval(x[*axis]);
                y
            }
            MapSource::Sampled(values) => self.interpolate(values, x),
        }
    }

    /// Multilinear interpolation of node data.
    fn interpolate(&self, values: &[f64], x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut base = vec![0usize; n];
        let mut frac = vec![0.0; n];
        for a in 0..n {
            let r = self.resolution[a];
            let t = (x[a] - self.box_.lo[a]) / (self.box_.hi[a] - self.box_.lo[a]) * r as f64;
            let i = (t.floor() as isize).clamp(0, r as isize - 1) as usize;
            base[a] = i;
            frac[a] = t - i as f64;
        }
        let mut out = vec![0.0; n];
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            let mut idx = vec![0usize; n];
            for a in 0..n {
                if corner >> a & 1 == 1 {
                    w *= frac[a];
                    idx[a] = base[a] + 1;
                } else {
                    w *= 1.0 - frac[a];
                    idx[a] = base[a];
                }
            }
            if w == 0.0 {
                continue;
            }
            let flat = self.node_flat_index(&idx);
            for c in 0..n {
                out[c] += w * values[flat * n + c];
            }
        }
        out
    }

    pub fn node_counts(&self) -> Vec<usize> {
        self.resolution.iter().map(|r| r + 1).collect()
    }

    pub fn node_flat_index(&self, idx: &[usize]) -> usize {
        let mut flat = 0usize;
        for a in 0..self.dim {
            flat = flat * (self.resolution[a] + 1) + idx[a];
        }
        flat
    }

    pub fn node_position(&self, idx: &[usize]) -> Vec<f64> {
        (0..self.dim)
            .map(|a| {
                self.box_.lo[a]
                    + (self.box_.hi[a] - self.box_.lo[a]) * idx[a] as f64
                        / self.resolution[a] as f64
            })
            .collect()
    }

    /// Evaluate on every node and return the sampled version.
    pub fn sample(&self) -> GridMapping {
        let n = self.dim;
        let counts = self.node_counts();
        let total: usize = counts.iter().product();
        let mut values = vec![0.0; total * n];
        let mut idx = vec![0usize; n];
        for flat in 0..total {
            let mut rem = flat;
            for a in (0..n).rev() {
                idx[a] = rem % counts[a];
                rem /= counts[a];
            }
            let y = self.evaluate(&self.node_position(&idx));
            values[flat * n..flat * n + n].copy_from_slice(&y);
        }
        GridMapping {
            dim: n,
            box_: self.box_.clone(),
            resolution: self.resolution.clone(),
            source: MapSource::Sampled(values),
        }
    }

    pub fn cell_count(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn cell_coords(&self, flat: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.dim];
        let mut rem = flat;
        for a in (0..self.dim).rev() {
            idx[a] = rem % self.resolution[a];
            rem /= self.resolution[a];
        }
        idx
    }

    pub fn cell_sizes(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|a| (self.box_.hi[a] - self.box_.lo[a]) / self.resolution[a] as f64)
            .collect()
    }

    pub fn cell_center(&self, coords: &[usize]) -> Vec<f64> {
        let h = self.cell_sizes();
        (0..self.dim)
            .map(|a| self.box_.lo[a] + (coords[a] as f64 + 0.5) * h[a])
            .collect()
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_sizes().iter().product()
    }

    fn is_boundary_cell(&self, coords: &[usize]) -> bool {
        coords
            .iter()
            .zip(&self.resolution)
            .any(|(&c, &r)| c == 0 || c + 1 == r)
    }

    /// Jacobian at a cell. Analytic sources are exact (the slab
    /// containing the cell center decides, ties toward the lower slab);
    /// sampled sources use central differences of cell-corner averages
    /// at the cell center with step one cell, and refuse boundary cells.
    pub fn jacobian(&self, cell: usize) -> Result<Vec<f64>, FieldError> {
        let coords = self.cell_coords(cell);
        match &self.source {
            MapSource::Affine(a) => Ok(a.matrix.clone()),
            MapSource::Profile { axis, profile } => {
                let center = self.cell_center(&coords);
                Ok(profile_jacobian(self.dim, *axis, profile, center[*axis]))
            }
            MapSource::Sampled(_) => {
                if self.is_boundary_cell(&coords) {
                    return Err(FieldError::BoundaryCell(cell));
                }
                Ok(self.fd_jacobian(&coords).0)
            }
        }
    }

    /// Finite-difference Jacobian that falls back to one-sided stencils
    /// at the boundary; the flag reports when that happened.
    fn fd_jacobian(&self, coords: &[usize]) -> (Vec<f64>, bool) {
        let values = match &self.source {
            MapSource::Sampled(v) => v,
            _ => unreachable!("fd_jacobian is only called for sampled sources"),
        };
        let n = self.dim;
        let h = self.cell_sizes();
        let mut jac = vec![0.0; n * n];
        let mut boundary = false;
        for axis in 0..n {
            let r = self.resolution[axis];
            let (plus, minus, step) = if coords[axis] + 1 < r && coords[axis] > 0 {
                (coords[axis] + 1, coords[axis] - 1, 2.0 * h[axis])
            } else if coords[axis] + 1 < r {
                boundary = true;
                (coords[axis] + 1, coords[axis], h[axis])
            } else if coords[axis] > 0 {
                boundary = true;
                (coords[axis], coords[axis] - 1, h[axis])
            } else {
                boundary = true;
                (coords[axis], coords[axis], h[axis])
            };
            let mut up = coords.to_vec();
            up[axis] = plus;
            let mut down = coords.to_vec();
            down[axis] = minus;
            let fu = self.cell_corner_average(values, &up);
            let fd = self.cell_corner_average(values, &down);
            if plus == minus {
                continue;
            }
            for comp in 0..n {
                jac[comp * n + axis] = (fu[comp] - fd[comp]) / step;
            }
        }
        (jac, boundary)
    }

    fn cell_corner_average(&self, values: &[f64], coords: &[usize]) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n];
        let corners = 1usize << n;
        let mut idx = vec![0usize; n];
        for corner in 0..corners {
            for a in 0..n {
                idx[a] = coords[a] + (corner >> a & 1);
            }
            let flat = self.node_flat_index(&idx);
            for c in 0..n {
                out[c] += values[flat * n + c];
            }
        }
        for c in &mut out {
            *c /= corners as f64;
        }
        out
    }
}

fn profile_jacobian(n: usize, axis: usize, profile: &Profile1D, x_axis: f64) -> Vec<f64> {
    let mut jac = vec![0.0; n * n];
    for i in 0..n {
        jac[i * n + i] = 1.0;
    }
    jac[axis * n + axis] = profile.slope_at(x_axis, true);
    jac
}

/// Operator norm, Jacobian determinant and the two dilatations of one
/// matrix.
#[derive(Clone, Copy, Debug)]
pub struct Dilatation {
    pub op_norm: f64,
    pub jac_det: f64,
    pub k: f64,
    pub p: f64,
}

/// Dilatations of an `n × n` Jacobian matrix.
///
/// Conventions: `K = ‖A‖ⁿ / |det A|` when the determinant is nonzero,
/// `K = 1` for the zero matrix, `K = ∞` for singular nonzero matrices;
/// `P = K^{1/(n−1)}`. Total on all matrices.
pub fn outer_dilatation(jac: &[f64], n: usize) -> Dilatation {
    let op_norm = linalg::spectral_norm(jac, n);
    let jac_det = linalg::determinant(jac, n);
    let k = if op_norm == 0.0 {
        1.0
    } else if jac_det == 0.0 {
        f64::INFINITY
    } else {
        (op_norm.powi(n as i32) / jac_det.abs()).max(1.0)
    };
    let p = if k.is_infinite() {
        f64::INFINITY
    } else if n == 2 {
        k
    } else if n == 3 {
        k.sqrt()
    } else {
        k.powf(1.0 / (n as f64 - 1.0))
    };
    Dilatation {
        op_norm,
        jac_det,
        k,
        p,
    }
}

/// Dilatation of the diagonal stretch `diag(1, …, 1, s)`, computed from
/// the matrix itself rather than from the stretch factor.
pub fn stretch_dilatation(s: f64, n: usize) -> Dilatation {
    let mut jac = vec![0.0; n * n];
    for i in 0..n {
        jac[i * n + i] = if i == n - 1 { s } else { 1.0 };
    }
    outer_dilatation(&jac, n)
}

/// Exact piecewise-constant description of `P` for analytic sources.
#[derive(Clone, Debug)]
pub enum AnalyticP {
    Constant(f64),
    AxisStep { axis: usize, step: StepProfile },
}

/// A piecewise-constant function of one coordinate.
#[derive(Clone, Debug)]
pub enum StepProfile {
    /// `values[i]` on `[breaks[i], breaks[i+1])`; clamped outside.
    Explicit { breaks: Vec<f64>, values: Vec<f64> },
    /// Repeating pattern with the given period.
    Periodic {
        period: f64,
        breaks: Vec<f64>,
        values: Vec<f64>,
    },
    /// `on_set` on the Cantor set (periodized), `off_set` elsewhere.
    Cantor {
        set: CantorSet,
        on_set: f64,
        off_set: f64,
    },
}

impl StepProfile {
    /// Exact integral of `f(P(x))` over `[a, b]`: each distinct value is
    /// weighted by the measure of its preimage. `f(∞)·0 = 0`.
    pub fn integrate_of(&self, a: f64, b: f64, f: &dyn Fn(f64) -> f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match self {
            StepProfile::Explicit { breaks, values } => {
                let mut sum = CompensatedSum::new();
                // clamped extension on both sides
                let first = breaks[0];
                let last = breaks[breaks.len() - 1];
                if a < first {
                    sum.add(crate::xreal::mul_measure(f(values[0]), first.min(b) - a));
                }
                if b > last {
                    sum.add(crate::xreal::mul_measure(
                        f(values[values.len() - 1]),
                        b - last.max(a),
                    ));
                }
                for i in 0..values.len() {
                    let lo = breaks[i].max(a);
                    let hi = breaks[i + 1].min(b);
                    if hi > lo {
                        sum.add(crate::xreal::mul_measure(f(values[i]), hi - lo));
                    }
                }
                sum.total()
            }
            StepProfile::Periodic {
                period,
                breaks,
                values,
            } => {
                let mut sum = CompensatedSum::new();
                for i in 0..values.len() {
                    let m = periodic_overlap(a, b, *period, breaks[i], breaks[i + 1]);
                    sum.add(crate::xreal::mul_measure(f(values[i]), m));
                }
                sum.total()
            }
            StepProfile::Cantor {
                set,
                on_set,
                off_set,
            } => {
                // measure of the periodized set inside [a, b]
                let m_set = periodized_cantor_measure(set, a, b);
                let mut sum = CompensatedSum::new();
                sum.add(crate::xreal::mul_measure(f(*on_set), m_set));
                sum.add(crate::xreal::mul_measure(f(*off_set), (b - a) - m_set));
                sum.total()
            }
        }
    }

    /// Constant-value subintervals of `[a, b]` as `(lo, hi, value)`, or
    /// `None` when enumeration would exceed `cap` intervals.
    pub fn intervals_in(&self, a: f64, b: f64, cap: usize) -> Option<Vec<(f64, f64, f64)>> {
        match self {
            StepProfile::Explicit { breaks, values } => {
                let mut out = Vec::new();
                let first = breaks[0];
                let last = breaks[breaks.len() - 1];
                if a < first {
                    out.push((a, first.min(b), values[0]));
                }
                for i in 0..values.len() {
                    let lo = breaks[i].max(a);
                    let hi = breaks[i + 1].min(b);
                    if hi > lo {
                        out.push((lo, hi, values[i]));
                    }
                }
                if b > last {
                    out.push((last.max(a), b, values[values.len() - 1]));
                }
                (out.len() <= cap).then_some(out)
            }
            StepProfile::Periodic {
                period,
                breaks,
                values,
            } => {
                let k_lo = (a / period).floor() as i64;
                let k_hi = (b / period).ceil() as i64;
                let total = ((k_hi - k_lo).max(0) as usize + 1) * values.len();
                if total > cap {
                    return None;
                }
                let mut out = Vec::with_capacity(total);
                for k in k_lo..=k_hi {
                    let base = k as f64 * period;
                    for i in 0..values.len() {
                        let lo = (base + breaks[i]).max(a);
                        let hi = (base + breaks[i + 1]).min(b);
                        if hi > lo {
                            out.push((lo, hi, values[i]));
                        }
                    }
                }
                Some(out)
            }
            StepProfile::Cantor { .. } => None,
        }
    }

    pub fn value_at(&self, x: f64) -> f64 {
        match self {
            StepProfile::Explicit { breaks, values } => {
                let m = values.len();
                if x < breaks[0] {
                    return values[0];
                }
                if x >= breaks[m] {
                    return values[m - 1];
                }
                match breaks.binary_search_by(|b| b.total_cmp(&x)) {
                    Ok(i) => values[i.min(m - 1)],
                    Err(i) => values[i - 1],
                }
            }
            StepProfile::Periodic {
                period,
                breaks,
                values,
            } => {
                let pos = x - (x / period).floor() * period;
                let m = values.len();
                match breaks.binary_search_by(|b| b.total_cmp(&pos)) {
                    Ok(i) => values[i.min(m - 1)],
                    Err(0) => values[0],
                    Err(i) => values[(i - 1).min(m - 1)],
                }
            }
            StepProfile::Cantor {
                set,
                on_set,
                off_set,
            } => {
                let pos = x - x.floor();
                if set.contains(pos) {
                    *on_set
                } else {
                    *off_set
                }
            }
        }
    }
}

/// Measure of `∪ₘ [m, m+1] ∩ (E + m)` inside `[a, b]` for the
/// periodized Cantor set.
fn periodized_cantor_measure(set: &CantorSet, a: f64, b: f64) -> f64 {
    let measure_to = |x: f64| -> f64 {
        let k = x.floor();
        k * set.lambda + set.measure_up_to(x - k)
    };
    measure_to(b) - measure_to(a)
}

/// Length of `[a, b] ∩ ∪ₖ [k·p + lo, k·p + hi]` in closed form.
fn periodic_overlap(a: f64, b: f64, period: f64, lo: f64, hi: f64) -> f64 {
    debug_assert!(lo >= 0.0 && hi <= period + 1e-12);
    let cumulative = |x: f64| -> f64 {
        let k = (x / period).floor();
        let pos = x - k * period;
        k * (hi - lo) + (pos.clamp(lo, hi) - lo)
    };
    cumulative(b) - cumulative(a)
}

/// Per-cell dilatation data over a grid, with the exact analytic
/// description attached when the source allows it.
#[derive(Clone, Debug)]
pub struct DilatationField {
    dim: usize,
    box_: BoxDomain,
    resolution: Vec<usize>,
    /// Flat per-cell jacobians (`cells × n²`); empty for analytic-only
    /// fields.
    pub jacobians: Vec<f64>,
    pub jac_dets: Vec<f64>,
    pub op_norms: Vec<f64>,
    pub ks: Vec<f64>,
    pub ps: Vec<f64>,
    pub boundary_cells: Vec<usize>,
    analytic: Option<AnalyticP>,
}

impl DilatationField {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn box_domain(&self) -> &BoxDomain {
        &self.box_
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn cell_count(&self) -> usize {
        self.ks.len()
    }

    pub fn analytic(&self) -> Option<&AnalyticP> {
        self.analytic.as_ref()
    }

    pub fn cell_volume(&self) -> f64 {
        self.box_
            .lo
            .iter()
            .zip(&self.box_.hi)
            .zip(&self.resolution)
            .map(|((a, b), r)| (b - a) / *r as f64)
            .product()
    }

    /// Exact `P` at a point, available for analytic sources.
    pub fn p_at(&self, x: &[f64]) -> Option<f64> {
        match self.analytic.as_ref()? {
            AnalyticP::Constant(p) => Some(*p),
            AnalyticP::AxisStep { axis, step } => Some(step.value_at(x[*axis])),
        }
    }
}

fn analytic_p(m: &GridMapping) -> Option<AnalyticP> {
    let n = m.dim();
    match m.source() {
        MapSource::Affine(a) => Some(AnalyticP::Constant(outer_dilatation(&a.matrix, n).p)),
        MapSource::Profile { axis, profile } => {
            let p_of = |s: f64| stretch_dilatation(s, n).p;
            let step = match profile {
                Profile1D::Explicit { breaks, slopes, .. } => StepProfile::Explicit {
                    breaks: breaks.clone(),
                    values: slopes.iter().map(|&s| p_of(s)).collect(),
                },
                Profile1D::Periodic {
                    period,
                    breaks,
                    slopes,
                    ..
                } => StepProfile::Periodic {
                    period: *period,
                    breaks: breaks.clone(),
                    values: slopes.iter().map(|&s| p_of(s)).collect(),
                },
                Profile1D::CantorLimit { set, tau0 } => StepProfile::Cantor {
                    set: *set,
                    on_set: f64::INFINITY,
                    off_set: p_of(*tau0),
                },
            };
            Some(AnalyticP::AxisStep { axis: *axis, step })
        }
        MapSource::Sampled(_) => None,
    }
}

/// Full per-cell dilatation field of a mapping.
///
/// Cells evaluate independently (in parallel); the result does not
/// depend on evaluation order. Boundary cells of sampled sources use
/// one-sided differences and are listed in `boundary_cells`.
pub fn dilatation_field(m: &GridMapping) -> DilatationField {
    let n = m.dim();
    let cells = m.cell_count();
    let per_cell: Vec<(Vec<f64>, bool)> = (0..cells)
        .into_par_iter()
        .map(|cell| {
            let coords = m.cell_coords(cell);
            match m.source() {
                MapSource::Sampled(_) => m.fd_jacobian(&coords),
                _ => (m.jacobian(cell).expect("analytic jacobian is total"), false),
            }
        })
        .collect();

    let mut field = DilatationField {
        dim: n,
        box_: m.box_domain().clone(),
        resolution: m.resolution().to_vec(),
        jacobians: Vec::with_capacity(cells * n * n),
        jac_dets: Vec::with_capacity(cells),
        op_norms: Vec::with_capacity(cells),
        ks: Vec::with_capacity(cells),
        ps: Vec::with_capacity(cells),
        boundary_cells: Vec::new(),
        analytic: analytic_p(m),
    };
    for (cell, (jac, boundary)) in per_cell.into_iter().enumerate() {
        let d = outer_dilatation(&jac, n);
        field.jacobians.extend_from_slice(&jac);
        field.jac_dets.push(d.jac_det);
        field.op_norms.push(d.op_norm);
        field.ks.push(d.k);
        field.ps.push(d.p);
        if boundary {
            field.boundary_cells.push(cell);
        }
    }
    field
}

/// Dilatation field without the per-cell grid pass: only the analytic
/// description is attached. Suitable for slab-exact integration at
/// resolutions where materializing cells would be wasteful.
pub fn analytic_dilatation_field(m: &GridMapping) -> Result<DilatationField, FieldError> {
    let analytic = analytic_p(m).ok_or_else(|| {
        FieldError::Precondition("analytic field requires an analytic source".into())
    })?;
    Ok(DilatationField {
        dim: m.dim(),
        box_: m.box_domain().clone(),
        resolution: m.resolution().to_vec(),
        jacobians: Vec::new(),
        jac_dets: Vec::new(),
        op_norms: Vec::new(),
        ks: Vec::new(),
        ps: Vec::new(),
        boundary_cells: Vec::new(),
        analytic: Some(analytic),
    })
}

/// Both sides of the interpolation estimate
/// `‖∂ᵢf‖_p ≤ ‖K_f‖_γ^{1/n} · |f(C)|^{1/n}` with `p = n/(1/γ + 1)`.
#[derive(Clone, Debug)]
pub struct HolderReport {
    pub gamma: f64,
    pub p: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluate the estimate over the whole grid box.
///
/// The image volume `|f(C)|` is computed as `∫ |J_f|`. Cells with an
/// infinite dilatation abort with their list.
pub fn holder_estimate(m: &GridMapping, gamma: f64) -> Result<HolderReport, FieldError> {
    if !(gamma > 0.0) {
        return Err(FieldError::Precondition("gamma must be positive".into()));
    }
    let n = m.dim() as f64;
    let p = n / (1.0 / gamma + 1.0);

    let field = dilatation_field(m);
    let infinite: Vec<usize> = field
        .ks
        .iter()
        .enumerate()
        .filter(|(_, k)| k.is_infinite())
        .map(|(i, _)| i)
        .collect();
    if !infinite.is_empty() {
        return Err(FieldError::InfiniteDilatation { cells: infinite });
    }

    let dim = m.dim();
    let vol = field.cell_volume();
    let mut col_norms = vec![CompensatedSum::new(); dim];
    let mut k_norm = CompensatedSum::new();
    let mut image = CompensatedSum::new();
    for cell in 0..field.cell_count() {
        let jac = &field.jacobians[cell * dim * dim..(cell + 1) * dim * dim];
        for (i, acc) in col_norms.iter_mut().enumerate() {
            let col: f64 = (0..dim).map(|r| jac[r * dim + i] * jac[r * dim + i]).sum();
            acc.add(col.sqrt().powf(p) * vol);
        }
        k_norm.add(field.ks[cell].powf(gamma) * vol);
        image.add(field.jac_dets[cell].abs() * vol);
    }
    let lhs = col_norms
        .iter()
        .map(|s| s.total().powf(1.0 / p))
        .fold(0.0, f64::max);
    let rhs = k_norm.total().powf(1.0 / gamma).powf(1.0 / n) * image.total().powf(1.0 / n);
    Ok(HolderReport {
        gamma,
        p,
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-6),
    })
}

/// Per-cube diameter-versus-energy ratios
/// `diam f(C) / [∫_C g(|∇f|)]^{1/n}`.
#[derive(Clone, Debug)]
pub struct DiameterReport {
    /// `(cube, diam f(C), ∫_C g(|∇f|), ratio)` per cube.
    pub entries: Vec<(BoxDomain, f64, f64, f64)>,
    pub max_ratio: f64,
    /// Whether the ratios stay bounded across the family (no absolute
    /// constant is asserted).
    pub bounded: bool,
}

/// Check the scale behavior of the diameter bound over a cube family.
pub fn calderon_diameter_check(
    m: &GridMapping,
    g: &GrowthFunction,
    cubes: &[BoxDomain],
) -> Result<DiameterReport, FieldError> {
    let n = m.dim();
    let alpha = 1.0 / (n as f64 - 1.0);
    if !g.domain_end().is_finite()
        && classify_calderon_tail(g, alpha) != TailVerdict::Converges
    {
        return Err(FieldError::Precondition(
            "the growth function must satisfy the Calderón condition at 1/(n−1)".into(),
        ));
    }
    let mut entries = Vec::with_capacity(cubes.len());
    let mut max_ratio: f64 = 0.0;
    for cube in cubes {
        if !m.box_domain().contains_box(cube) {
            return Err(FieldError::CubeOutOfDomain);
        }
        let diam = image_diameter(m, cube);
        let energy = gradient_energy(m, g, cube);
        let ratio = if energy > 0.0 {
            diam / energy.powf(1.0 / n as f64)
        } else {
            f64::INFINITY
        };
        max_ratio = max_ratio.max(ratio);
        entries.push((cube.clone(), diam, energy, ratio));
    }
    let finite: Vec<f64> = entries
        .iter()
        .map(|e| e.3)
        .filter(|r| r.is_finite())
        .collect();
    let bounded = if finite.len() < 2 {
        !finite.is_empty()
    } else {
        let mut sorted = finite.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let median = sorted[sorted.len() / 2];
        *sorted.last().unwrap() <= 2.0 * median.max(1e-300)
    };
    Ok(DiameterReport {
        entries,
        max_ratio,
        bounded,
    })
}

fn image_diameter(m: &GridMapping, cube: &BoxDomain) -> f64 {
    let n = m.dim();
    match m.source() {
        MapSource::Profile { .. } => {
            // coordinatewise monotone: extremes at the diagonal corners
            let a = m.evaluate(&cube.lo);
            let b = m.evaluate(&cube.hi);
            a.iter()
                .zip(&b)
                .map(|(x, y)| (y - x) * (y - x))
                .sum::<f64>()
                .sqrt()
        }
        MapSource::Affine(_) => {
            let corners = 1usize << n;
            let mut pts = Vec::with_capacity(corners);
            for c in 0..corners {
                let x: Vec<f64> = (0..n)
                    .map(|a| if c >> a & 1 == 1 { cube.hi[a] } else { cube.lo[a] })
                    .collect();
                pts.push(m.evaluate(&x));
            }
            let mut best: f64 = 0.0;
            for i in 0..pts.len() {
                for j in (i + 1)..pts.len() {
                    let d: f64 = pts[i]
                        .iter()
                        .zip(&pts[j])
                        .map(|(x, y)| (y - x) * (y - x))
                        .sum();
                    best = best.max(d);
                }
            }
            best.sqrt()
        }
        MapSource::Sampled(_) => {
            // bounding-box diagonal over nodes inside the cube
            let counts = m.node_counts();
            let total: usize = counts.iter().product();
            let mut lo = vec![f64::INFINITY; n];
            let mut hi = vec![f64::NEG_INFINITY; n];
            let mut idx = vec![0usize; n];
            for flat in 0..total {
                let mut rem = flat;
                for a in (0..n).rev() {
                    idx[a] = rem % counts[a];
                    rem /= counts[a];
                }
                let x = m.node_position(&idx);
                if x.iter()
                    .zip(&cube.lo)
                    .zip(&cube.hi)
                    .all(|((v, a), b)| *v >= a - 1e-12 && *v <= b + 1e-12)
                {
                    let y = m.evaluate(&x);
                    for a in 0..n {
                        lo[a] = lo[a].min(y[a]);
                        hi[a] = hi[a].max(y[a]);
                    }
                }
            }
            lo.iter()
                .zip(&hi)
                .map(|(a, b)| (b - a).max(0.0).powi(2))
                .sum::<f64>()
                .sqrt()
        }
    }
}

/// `∫_C g(|∇f|) dm`, slab-exact for analytic sources.
fn gradient_energy(m: &GridMapping, g: &GrowthFunction, cube: &BoxDomain) -> f64 {
    let n = m.dim();
    match m.source() {
        MapSource::Affine(a) => {
            let frob = linalg::frobenius_norm(&a.matrix);
            g.evaluate(frob) * cube.volume()
        }
        MapSource::Profile { axis, profile } => {
            let cross: f64 = (0..n)
                .filter(|a| a != axis)
                .map(|a| cube.hi[a] - cube.lo[a])
                .product();
            let frob_of_slope = |s: f64| ((n - 1) as f64 + s * s).sqrt();
            // exact measure-weighted sum over the slope intervals
            let step = match profile {
                Profile1D::Explicit { breaks, slopes, .. } => StepProfile::Explicit {
                    breaks: breaks.clone(),
                    values: slopes.clone(),
                },
                Profile1D::Periodic {
                    period,
                    breaks,
                    slopes,
                    ..
                } => StepProfile::Periodic {
                    period: *period,
                    breaks: breaks.clone(),
                    values: slopes.clone(),
                },
                Profile1D::CantorLimit { set, tau0 } => StepProfile::Cantor {
                    set: *set,
                    on_set: 0.0,
                    off_set: *tau0,
                },
            };
            cross
                * step.integrate_of(cube.lo[*axis], cube.hi[*axis], &|s| {
                    g.evaluate(frob_of_slope(s))
                })
        }
        MapSource::Sampled(_) => {
            let field = dilatation_field(m);
            let vol = field.cell_volume();
            let dim = n;
            let mut sum = CompensatedSum::new();
            for cell in 0..field.cell_count() {
                let coords = m.cell_coords(cell);
                let center = m.cell_center(&coords);
                let inside = center
                    .iter()
                    .zip(&cube.lo)
                    .zip(&cube.hi)
                    .all(|((v, a), b)| *v >= *a && *v <= *b);
                if !inside {
                    continue;
                }
                let jac = &field.jacobians[cell * dim * dim..(cell + 1) * dim * dim];
                sum.add(g.evaluate(linalg::frobenius_norm(jac)) * vol);
            }
            sum.total()
        }
    }
}

#[cfg(test)]
mod tests;
