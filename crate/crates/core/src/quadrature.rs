//! Tensor-product Gauss–Legendre quadrature over chart boxes.
//!
//! Work is split by (chart, first-axis node); each slice is summed in a
//! fixed order with Neumaier compensation and slices are merged in index
//! order, so results are bitwise reproducible regardless of thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chart::{ChartAtlas, ChartPoint, MetricChart, DIM};
use crate::error::{GeometryError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Gauss–Legendre nodes per axis.
    pub nodes: usize,
    /// Error estimates compare against `nodes * refinement`; 1 disables them.
    pub refinement: usize,
    pub tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes: 24,
            refinement: 2,
            tolerance: 1e-6,
        }
    }
}

impl QuadratureSpec {
    pub fn with_nodes(nodes: usize) -> Self {
        Self {
            nodes,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(GeometryError::InvalidSpec(format!(
                "node count {} is below 2",
                self.nodes
            )));
        }
        if self.refinement == 0 {
            return Err(GeometryError::InvalidSpec("refinement factor is 0".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(GeometryError::InvalidSpec(format!(
                "tolerance {} is not positive",
                self.tolerance
            )));
        }
        Ok(())
    }

    pub fn refined_nodes(&self) -> Option<usize> {
        (self.refinement > 1).then(|| self.nodes * self.refinement)
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.carry);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Nodes of one chart box: mapped coordinates and weights per axis.
struct BoxRule {
    coords: [Vec<f64>; DIM],
    weights: [Vec<f64>; DIM],
}

impl BoxRule {
    fn new(chart: &MetricChart, n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        let map = |k: usize| {
            let (lo, hi) = chart.bounds()[k];
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            (
                x.iter().map(|t| mid + half * t).collect::<Vec<_>>(),
                w.iter().map(|v| v * half).collect::<Vec<_>>(),
            )
        };
        let parts: [(Vec<f64>, Vec<f64>); DIM] = std::array::from_fn(map);
        let coords = std::array::from_fn(|k| parts[k].0.clone());
        let weights = std::array::from_fn(|k| parts[k].1.clone());
        Self { coords, weights }
    }
}

/// Visits every quadrature node of every chart at `n` nodes per axis and
/// folds per-node results.
///
/// `visit(chart_index, chart, point, coordinate_weight, state)` is called once
/// per node; the coordinate weight excludes the volume density. Slices are
/// folded independently and merged in (chart, first-axis) order.
pub fn fold_nodes<S, V, M>(atlas: &ChartAtlas, n: usize, init: S, visit: V, merge: M) -> Result<S>
where
    S: Clone + Send + Sync,
    V: Fn(usize, &MetricChart, &ChartPoint, f64, &mut S) -> Result<()> + Sync,
    M: Fn(&mut S, S),
{
    let rules: Vec<BoxRule> = atlas.charts.iter().map(|c| BoxRule::new(c, n)).collect();
    let slices: Vec<(usize, usize)> = (0..atlas.charts.len())
        .flat_map(|c| (0..n).map(move |i| (c, i)))
        .collect();
    let partials: Vec<Result<S>> = slices
        .par_iter()
        .map(|&(ci, i)| {
            let chart = &atlas.charts[ci];
            let rule = &rules[ci];
            let mut state = init.clone();
            let x0 = rule.coords[0][i];
            let w0 = rule.weights[0][i];
            for j in 0..n {
                let w1 = w0 * rule.weights[1][j];
                for k in 0..n {
                    let w2 = w1 * rule.weights[2][k];
                    for l in 0..n {
                        let p = ChartPoint([
                            x0,
                            rule.coords[1][j],
                            rule.coords[2][k],
                            rule.coords[3][l],
                        ]);
                        visit(ci, chart, &p, w2 * rule.weights[3][l], &mut state)?;
                    }
                }
            }
            Ok(state)
        })
        .collect();
    let mut total = init;
    for part in partials {
        merge(&mut total, part?);
    }
    Ok(total)
}

/// A quadrature value with its refinement error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    /// `|value − value at refined node count|`; absent when refinement is off.
    pub error: Option<f64>,
}

impl Estimate {
    pub fn error_or_zero(&self) -> f64 {
        self.error.unwrap_or(0.0)
    }
}

/// Integrates `K` fields at once over the atlas with density `√det g`.
///
/// `field` receives the chart index, chart and point and returns the field
/// values there; the volume density is applied here. Non-finite values
/// abort with the offending point.
pub fn integrate_fields<const K: usize, F>(
    atlas: &ChartAtlas,
    n: usize,
    field: F,
) -> Result<[f64; K]>
where
    F: Fn(usize, &MetricChart, &ChartPoint) -> Result<[f64; K]> + Sync,
{
    if !atlas.compact {
        return Err(GeometryError::NonCompact(atlas.name.clone()));
    }
    let sums = fold_nodes(
        atlas,
        n,
        [CompensatedSum::default(); K],
        |ci, chart, p, w, acc| {
            let values = field(ci, chart, p)?;
            let density = chart.metric(p).determinant().abs().sqrt();
            for (slot, v) in acc.iter_mut().zip(values) {
                if !v.is_finite() {
                    return Err(GeometryError::Evaluation {
                        chart: ci,
                        point: p.0,
                        value: v,
                    });
                }
                slot.add(v * density * w);
            }
            Ok(())
        },
        |total, part| {
            for (t, p) in total.iter_mut().zip(part.iter()) {
                t.merge(p);
            }
        },
    )?;
    Ok(sums.map(|s| s.value()))
}

/// `∫ field dV_g` with a refinement error estimate.
pub fn integrate_scalar<F>(atlas: &ChartAtlas, field: F, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(usize, &MetricChart, &ChartPoint) -> Result<f64> + Sync,
{
    spec.validate()?;
    let one = |ci: usize, c: &MetricChart, p: &ChartPoint| field(ci, c, p).map(|v| [v]);
    let [value] = integrate_fields(atlas, spec.nodes, one)?;
    let error = match spec.refined_nodes() {
        Some(m) => {
            let [fine] = integrate_fields(atlas, m, one)?;
            Some((value - fine).abs())
        }
        None => None,
    };
    Ok(Estimate { value, error })
}
