//! Coordinate charts carrying a Riemannian metric and its first two
//! coordinate derivatives.
//!
//! Index layout used throughout the crate:
//!
//! * `dg[c][a][b]` is `∂_c g_ab`
//! * `d2g[c][d][a][b]` is `∂_c ∂_d g_ab`

use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GeometryError, Result};

pub const DIM: usize = 4;

pub type Tensor3 = [[[f64; DIM]; DIM]; DIM];
pub type Tensor4 = [[[[f64; DIM]; DIM]; DIM]; DIM];

pub(crate) const ZERO3: Tensor3 = [[[0.0; DIM]; DIM]; DIM];
pub(crate) const ZERO4: Tensor4 = [[[[0.0; DIM]; DIM]; DIM]; DIM];

/// A point given by its four chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint(pub [f64; DIM]);

impl ChartPoint {
    pub fn new(x: [f64; DIM]) -> Self {
        Self(x)
    }

    pub fn coords(&self) -> &[f64; DIM] {
        &self.0
    }
}

impl From<[f64; DIM]> for ChartPoint {
    fn from(x: [f64; DIM]) -> Self {
        Self(x)
    }
}

/// Metric components together with their first and second partials at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricJet {
    pub g: Matrix4<f64>,
    pub dg: Tensor3,
    pub d2g: Tensor4,
}

impl MetricJet {
    pub fn scaled(mut self, factor: f64) -> Self {
        self.g *= factor;
        for c in 0..DIM {
            for a in 0..DIM {
                for b in 0..DIM {
                    self.dg[c][a][b] *= factor;
                    for d in 0..DIM {
                        self.d2g[c][d][a][b] *= factor;
                    }
                }
            }
        }
        self
    }
}

/// Source of metric components in one coordinate system.
///
/// Implementors that know their derivatives in closed form override
/// [`MetricModel::jet`]; everything else falls back to finite differences
/// at the chart level.
pub trait MetricModel: Send + Sync {
    fn metric(&self, x: &[f64; DIM]) -> Matrix4<f64>;

    fn jet(&self, _x: &[f64; DIM]) -> Option<MetricJet> {
        None
    }
}

/// Metric given by a plain closure; derivatives always come from finite differences.
pub struct FnMetric<F>(pub F);

impl<F> MetricModel for FnMetric<F>
where
    F: Fn(&[f64; DIM]) -> Matrix4<f64> + Send + Sync,
{
    fn metric(&self, x: &[f64; DIM]) -> Matrix4<f64> {
        (self.0)(x)
    }
}

struct ScaledModel {
    inner: Arc<dyn MetricModel>,
    factor: f64,
}

impl MetricModel for ScaledModel {
    fn metric(&self, x: &[f64; DIM]) -> Matrix4<f64> {
        self.inner.metric(x) * self.factor
    }

    fn jet(&self, x: &[f64; DIM]) -> Option<MetricJet> {
        self.inner.jet(x).map(|j| j.scaled(self.factor))
    }
}

/// Which route supplies `dg` and `d2g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativePath {
    /// Closed form from the model, finite differences if the model has none.
    Analytic,
    /// Fourth-order central differences of `g` regardless of the model.
    FiniteDifference,
}

/// Relative step (fraction of the box width per axis) used by the
/// finite-difference derivative path.
pub const FD_RELATIVE_STEP: f64 = 1e-4;

/// A coordinate box with a metric on it.
#[derive(Clone)]
pub struct MetricChart {
    bounds: [(f64, f64); DIM],
    model: Arc<dyn MetricModel>,
    orientation: i8,
    measure_note: String,
    path: DerivativePath,
}

impl fmt::Debug for MetricChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricChart")
            .field("bounds", &self.bounds)
            .field("orientation", &self.orientation)
            .field("measure_note", &self.measure_note)
            .field("path", &self.path)
            .finish()
    }
}

impl MetricChart {
    pub fn new(bounds: [(f64, f64); DIM], model: Arc<dyn MetricModel>) -> Self {
        Self {
            bounds,
            model,
            orientation: 1,
            measure_note: String::new(),
            path: DerivativePath::Analytic,
        }
    }

    /// `sign` is the orientation of the coordinate frame relative to the
    /// manifold orientation; anything negative is taken as -1.
    pub fn with_orientation(mut self, sign: i8) -> Self {
        self.orientation = if sign < 0 { -1 } else { 1 };
        self
    }

    pub fn with_measure_note(mut self, note: impl Into<String>) -> Self {
        self.measure_note = note.into();
        self
    }

    pub fn with_derivative_path(mut self, path: DerivativePath) -> Self {
        self.path = path;
        self
    }

    /// The same chart carrying the metric `factor * g`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            model: Arc::new(ScaledModel {
                inner: self.model.clone(),
                factor,
            }),
            ..self.clone()
        }
    }

    /// The same chart with the orientation reversed.
    pub fn reversed(&self) -> Self {
        Self {
            orientation: -self.orientation,
            ..self.clone()
        }
    }

    pub fn bounds(&self) -> &[(f64, f64); DIM] {
        &self.bounds
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    pub fn measure_note(&self) -> &str {
        &self.measure_note
    }

    pub fn derivative_path(&self) -> DerivativePath {
        self.path
    }

    pub fn contains(&self, p: &ChartPoint) -> bool {
        p.0.iter()
            .zip(&self.bounds)
            .all(|(x, (lo, hi))| *x > *lo && *x < *hi)
    }

    pub(crate) fn check_domain(&self, chart: usize, p: &ChartPoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(GeometryError::OutsideChart { chart, point: p.0 })
        }
    }

    /// Metric components at `p` (no domain check).
    pub fn metric(&self, p: &ChartPoint) -> Matrix4<f64> {
        self.model.metric(&p.0)
    }

    /// Metric jet at `p` along the configured derivative path.
    pub fn jet(&self, p: &ChartPoint) -> Result<MetricJet> {
        self.check_domain(0, p)?;
        Ok(self.jet_unchecked(p))
    }

    pub(crate) fn jet_unchecked(&self, p: &ChartPoint) -> MetricJet {
        match self.path {
            DerivativePath::Analytic => self
                .model
                .jet(&p.0)
                .unwrap_or_else(|| self.finite_difference_jet(p)),
            DerivativePath::FiniteDifference => self.finite_difference_jet(p),
        }
    }

    pub(crate) fn steps(&self, relative: f64) -> [f64; DIM] {
        let mut h = [0.0; DIM];
        for (k, (lo, hi)) in self.bounds.iter().enumerate() {
            h[k] = relative * (hi - lo);
        }
        h
    }

    fn finite_difference_jet(&self, p: &ChartPoint) -> MetricJet {
        let steps = self.steps(FD_RELATIVE_STEP);
        let eval = |x: &[f64; DIM]| self.model.metric(x);
        let (g, dg, d2g) = central_jet(&eval, &p.0, &steps);
        MetricJet { g, dg, d2g }
    }
}

const FIRST: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];

fn shifted(x: &[f64; DIM], moves: &[(usize, f64)]) -> [f64; DIM] {
    let mut y = *x;
    for &(k, dx) in moves {
        y[k] += dx;
    }
    y
}

/// Fourth-order central differences of a matrix-valued function: value,
/// first partials, and second partials (pure and mixed).
pub(crate) fn central_jet<F>(
    f: &F,
    x: &[f64; DIM],
    h: &[f64; DIM],
) -> (Matrix4<f64>, Tensor3, Tensor4)
where
    F: Fn(&[f64; DIM]) -> Matrix4<f64>,
{
    let center = f(x);
    let mut d1 = ZERO3;
    let mut d2 = ZERO4;
    for c in 0..DIM {
        let mut acc = Matrix4::zeros();
        for &(s, w) in &FIRST {
            acc += f(&shifted(x, &[(c, s * h[c])])) * w;
        }
        acc /= 12.0 * h[c];
        write_matrix(&mut d1[c], &acc);

        // pure second derivative
        let mut acc = center * -30.0;
        for &(s, w) in &[(-2.0, -1.0), (-1.0, 16.0), (1.0, 16.0), (2.0, -1.0)] {
            acc += f(&shifted(x, &[(c, s * h[c])])) * w;
        }
        acc /= 12.0 * h[c] * h[c];
        write_matrix(&mut d2[c][c], &acc);

        for d in 0..c {
            let mut acc = Matrix4::zeros();
            for &(s, ws) in &FIRST {
                for &(t, wt) in &FIRST {
                    acc += f(&shifted(x, &[(c, s * h[c]), (d, t * h[d])])) * (ws * wt);
                }
            }
            acc /= 144.0 * h[c] * h[d];
            write_matrix(&mut d2[c][d], &acc);
            write_matrix(&mut d2[d][c], &acc);
        }
    }
    (center, d1, d2)
}

fn write_matrix(dst: &mut [[f64; DIM]; DIM], m: &Matrix4<f64>) {
    for a in 0..DIM {
        for b in 0..DIM {
            dst[a][b] = m[(a, b)];
        }
    }
}

/// A manifold presented by coordinate boxes that cover it up to a set of
/// measure zero.
#[derive(Debug, Clone)]
pub struct ChartAtlas {
    pub name: String,
    pub charts: Vec<MetricChart>,
    pub compact: bool,
}

impl ChartAtlas {
    pub fn new(name: impl Into<String>, charts: Vec<MetricChart>, compact: bool) -> Result<Self> {
        if charts.is_empty() {
            return Err(GeometryError::Inconsistent(
                "an atlas needs at least one chart".into(),
            ));
        }
        Ok(Self {
            name: name.into(),
            charts,
            compact,
        })
    }

    pub fn chart(&self, index: usize) -> Result<&MetricChart> {
        self.charts
            .get(index)
            .ok_or(GeometryError::NoSuchChart(index))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            name: self.name.clone(),
            charts: self.charts.iter().map(|c| c.scaled(factor)).collect(),
            compact: self.compact,
        }
    }

    pub fn reversed(&self) -> Self {
        Self {
            name: self.name.clone(),
            charts: self.charts.iter().map(MetricChart::reversed).collect(),
            compact: self.compact,
        }
    }

    /// `count` pseudo-random points, charts taken in turn, each uniform in
    /// its box shrunk by 1% of the width on every face.
    pub fn random_points(&self, count: usize, seed: u64) -> Vec<(usize, ChartPoint)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|i| {
                let ci = i % self.charts.len();
                let bounds = self.charts[ci].bounds();
                let x = std::array::from_fn(|k| {
                    let (lo, hi) = bounds[k];
                    let margin = 0.01 * (hi - lo);
                    rng.gen_range((lo + margin)..(hi - margin))
                });
                (ci, ChartPoint(x))
            })
            .collect()
    }

    pub fn with_derivative_path(&self, path: DerivativePath) -> Self {
        Self {
            name: self.name.clone(),
            charts: self
                .charts
                .iter()
                .map(|c| c.clone().with_derivative_path(path))
                .collect(),
            compact: self.compact,
        }
    }
}
