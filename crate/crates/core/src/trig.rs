//! Metrics whose components are finite sums of products of `sin^m(x_k) cos^n(x_k)`.
//!
//! Every closed-form metric in the zoo has this shape in its chosen
//! coordinates, so the first and second partials are produced by exact
//! term-wise differentiation when the model is built.

use std::collections::BTreeMap;

use nalgebra::Matrix4;

use crate::chart::{MetricJet, MetricModel, Tensor3, Tensor4, DIM, ZERO3, ZERO4};

/// `coef * Π_k sin^{m_k}(x_k) cos^{n_k}(x_k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigTerm {
    pub coef: f64,
    pub powers: [(u8, u8); DIM],
}

impl TrigTerm {
    pub const fn constant(coef: f64) -> Self {
        Self {
            coef,
            powers: [(0, 0); DIM],
        }
    }

    pub fn new(coef: f64, powers: [(u8, u8); DIM]) -> Self {
        Self { coef, powers }
    }
}

/// A sum of [`TrigTerm`]s with like terms merged.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrigPoly {
    terms: Vec<TrigTerm>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = TrigTerm>) -> Self {
        let mut merged: BTreeMap<[(u8, u8); DIM], f64> = BTreeMap::new();
        for t in terms {
            *merged.entry(t.powers).or_insert(0.0) += t.coef;
        }
        Self {
            terms: merged
                .into_iter()
                .filter(|(_, c)| *c != 0.0)
                .map(|(powers, coef)| TrigTerm { coef, powers })
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_terms(self.terms.iter().map(|t| TrigTerm {
            coef: t.coef * factor,
            ..*t
        }))
    }

    /// d/dx_k, using d(s^m c^n) = m s^{m-1} c^{n+1} - n s^{m+1} c^{n-1}.
    pub fn derivative(&self, k: usize) -> Self {
        let mut out = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            let (m, n) = t.powers[k];
            if m > 0 {
                let mut p = t.powers;
                p[k] = (m - 1, n + 1);
                out.push(TrigTerm::new(t.coef * f64::from(m), p));
            }
            if n > 0 {
                let mut p = t.powers;
                p[k] = (m + 1, n - 1);
                out.push(TrigTerm::new(-t.coef * f64::from(n), p));
            }
        }
        Self::from_terms(out)
    }

    fn max_power(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|t| t.powers.iter().map(|&(m, n)| m.max(n) as usize))
            .max()
            .unwrap_or(0)
    }

    fn eval(&self, table: &PowerTable) -> f64 {
        let mut sum = 0.0;
        for t in &self.terms {
            let mut v = t.coef;
            for (k, &(m, n)) in t.powers.iter().enumerate() {
                v *= table.sin[k][m as usize] * table.cos[k][n as usize];
            }
            sum += v;
        }
        sum
    }
}

struct PowerTable {
    sin: [Vec<f64>; DIM],
    cos: [Vec<f64>; DIM],
}

impl PowerTable {
    fn new(x: &[f64; DIM], max: usize) -> Self {
        let build = |base: f64| {
            let mut v = Vec::with_capacity(max + 1);
            let mut acc = 1.0;
            for _ in 0..=max {
                v.push(acc);
                acc *= base;
            }
            v
        };
        Self {
            sin: std::array::from_fn(|k| build(x[k].sin())),
            cos: std::array::from_fn(|k| build(x[k].cos())),
        }
    }
}

/// Closed-form metric with trigonometric-polynomial components.
#[derive(Debug, Clone)]
pub struct TrigMetric {
    // upper triangle (a <= b) only
    g: Vec<((usize, usize), TrigPoly)>,
    dg: Vec<((usize, usize, usize), TrigPoly)>,
    d2g: Vec<((usize, usize, usize, usize), TrigPoly)>,
    max_power: usize,
}

impl TrigMetric {
    /// `components[a][b]` must be symmetric; only `a <= b` is read.
    pub fn new(components: [[TrigPoly; DIM]; DIM]) -> Self {
        let mut g = Vec::new();
        let mut dg = Vec::new();
        let mut d2g = Vec::new();
        let mut max_power = 0;
        for a in 0..DIM {
            for b in a..DIM {
                let p = &components[a][b];
                if p.is_zero() {
                    continue;
                }
                max_power = max_power.max(p.max_power() + 2);
                g.push(((a, b), p.clone()));
                for c in 0..DIM {
                    let dp = p.derivative(c);
                    if dp.is_zero() {
                        continue;
                    }
                    for d in c..DIM {
                        let ddp = dp.derivative(d);
                        if !ddp.is_zero() {
                            d2g.push(((c, d, a, b), ddp));
                        }
                    }
                    dg.push(((c, a, b), dp));
                }
            }
        }
        Self {
            g,
            dg,
            d2g,
            max_power,
        }
    }

    /// Diagonal metric `diag(entries)`.
    pub fn diagonal(entries: [TrigPoly; DIM]) -> Self {
        let mut components: [[TrigPoly; DIM]; DIM] = Default::default();
        for (a, e) in entries.into_iter().enumerate() {
            components[a][a] = e;
        }
        Self::new(components)
    }

    fn values(&self, table: &PowerTable) -> Matrix4<f64> {
        let mut g = Matrix4::zeros();
        for ((a, b), p) in &self.g {
            let v = p.eval(table);
            g[(*a, *b)] = v;
            g[(*b, *a)] = v;
        }
        g
    }
}

impl MetricModel for TrigMetric {
    fn metric(&self, x: &[f64; DIM]) -> Matrix4<f64> {
        self.values(&PowerTable::new(x, self.max_power))
    }

    fn jet(&self, x: &[f64; DIM]) -> Option<MetricJet> {
        let table = PowerTable::new(x, self.max_power);
        let g = self.values(&table);
        let mut dg: Tensor3 = ZERO3;
        for ((c, a, b), p) in &self.dg {
            let v = p.eval(&table);
            dg[*c][*a][*b] = v;
            dg[*c][*b][*a] = v;
        }
        let mut d2g: Tensor4 = ZERO4;
        for ((c, d, a, b), p) in &self.d2g {
            let v = p.eval(&table);
            d2g[*c][*d][*a][*b] = v;
            d2g[*c][*d][*b][*a] = v;
            d2g[*d][*c][*a][*b] = v;
            d2g[*d][*c][*b][*a] = v;
        }
        Some(MetricJet { g, dg, d2g })
    }
}
