//! Curvature integrals: Euler characteristic, signature, and the other
//! global quantities built from `R`, `|Rc|²`, `|R̊c|²` and `|W±|²`.
//!
//! Normalizations:
//!
//! * `χ = (1/8π²) ∫ |W+|² + |W−|² + R²/24 − |R̊c|²/2`
//! * `τ = (1/12π²) ∫ |W+|² − |W−|²`
//! * `2χ ± 3|τ| = (1/4π²) ∫ 2|W±|² + R²/24 − |R̊c|²/2`, the sign of `W`
//!   following the sign of `τ`
//! * `2χ ± 3τ = (1/48π²) ∫ 24|W±|² − R² + 6` on shrinkers normalized to `ρ = ½`

use std::f64::consts::PI;

use nalgebra::{Matrix4, SymmetricEigen};
use serde::Serialize;

use crate::chart::{ChartAtlas, ChartPoint, MetricChart};
use crate::error::{GeometryError, Result};
use crate::forms::{operator_from_riemann, orthonormal_frame, weyl_sd_norms};
use crate::quadrature::{fold_nodes, integrate_fields, Estimate, QuadratureSpec};
use crate::tensor::{ricci, trace, Connection};

/// Scalar curvature invariants at one point, all norms in the metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointInvariants {
    pub scalar: f64,
    pub ricci_norm2: f64,
    pub traceless_ricci_norm2: f64,
    pub weyl_plus2: f64,
    pub weyl_minus2: f64,
}

impl PointInvariants {
    /// `σ₂(A_g) = (R² − 3|Rc|²)/6`
    pub fn sigma2(&self) -> f64 {
        (self.scalar * self.scalar - 3.0 * self.ricci_norm2) / 6.0
    }
}

pub(crate) struct PointCurvature {
    pub invariants: PointInvariants,
    /// Ricci tensor in the orthonormal frame.
    pub frame_ricci: Matrix4<f64>,
}

pub(crate) fn point_curvature(chart: &MetricChart, p: &ChartPoint) -> Result<PointCurvature> {
    let jet = chart.jet_unchecked(p);
    let conn = Connection::from_jet(&jet, p)?;
    let rm = conn.riemann(&jet.d2g);
    let rc = ricci(&rm, &conn.ginv);
    let scalar = trace(&rc, &conn.ginv);
    let frame = orthonormal_frame(&conn.g).ok_or(GeometryError::DegenerateMetric { point: p.0 })?;
    let frame_ricci = frame.transpose() * rc * frame;
    let ricci_norm2 = frame_ricci.norm_squared();
    let traceless_ricci_norm2 = (frame_ricci - Matrix4::identity() * (scalar / 4.0)).norm_squared();
    let op = operator_from_riemann(&rm, &frame, chart.orientation());
    let (weyl_plus2, weyl_minus2) = weyl_sd_norms(&op);
    Ok(PointCurvature {
        invariants: PointInvariants {
            scalar,
            ricci_norm2,
            traceless_ricci_norm2,
            weyl_plus2,
            weyl_minus2,
        },
        frame_ricci,
    })
}

/// Pointwise invariants at a chart point of an atlas.
pub fn point_invariants(atlas: &ChartAtlas, chart: usize, p: &ChartPoint) -> Result<PointInvariants> {
    let c = atlas.chart(chart)?;
    c.check_domain(chart, p)?;
    Ok(point_curvature(c, p)?.invariants)
}

/// Smallest eigenvalue of `Rc` relative to `g` at a point.
pub(crate) fn min_ricci_eigenvalue(frame_ricci: &Matrix4<f64>) -> f64 {
    SymmetricEigen::new(*frame_ricci).eigenvalues.min()
}

const FIELDS: usize = 7;
const VOL: usize = 0;
const R2: usize = 1;
const RC2: usize = 2;
const E2: usize = 3;
const WP: usize = 4;
const WM: usize = 5;
const SIGMA2: usize = 6;

fn raw_integrals(atlas: &ChartAtlas, n: usize) -> Result<[f64; FIELDS]> {
    integrate_fields::<FIELDS, _>(atlas, n, |_, chart, p| {
        let c = point_curvature(chart, p)?.invariants;
        Ok([
            1.0,
            c.scalar * c.scalar,
            c.ricci_norm2,
            c.traceless_ricci_norm2,
            c.weyl_plus2,
            c.weyl_minus2,
            c.sigma2(),
        ])
    })
}

/// A near-integer quantity with its raw and snapped values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Snapped {
    pub value: f64,
    pub error: Option<f64>,
    pub nearest: i64,
    pub distance: f64,
    /// `distance <= 10 * error + tolerance`
    pub near_integer: bool,
}

impl Snapped {
    fn new(e: Estimate, tolerance: f64) -> Self {
        let nearest = e.value.round();
        let distance = (e.value - nearest).abs();
        Self {
            value: e.value,
            error: e.error,
            nearest: nearest as i64,
            distance,
            near_integer: distance <= 10.0 * e.error_or_zero() + tolerance,
        }
    }
}

/// Global invariants of a compact atlas.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantReport {
    pub atlas: String,
    pub nodes: usize,
    pub refined_nodes: Option<usize>,
    pub volume: Estimate,
    pub chi: Snapped,
    pub tau: Snapped,
    pub two_chi_plus_three_abs_tau: Estimate,
    pub two_chi_minus_three_abs_tau: Estimate,
    pub scalar_squared: Estimate,
    pub ricci_squared: Estimate,
    pub traceless_ricci_squared: Estimate,
    pub weyl_plus_squared: Estimate,
    pub weyl_minus_squared: Estimate,
    pub sigma2: Estimate,
    /// `∫(½R² − |Rc|²) − Vol`
    pub lemma45_residual: Estimate,
    /// `∫(24|W+|² − R² + 6)`
    pub ht_closing_plus: Estimate,
    /// `∫(24|W−|² − R² + 6)`
    pub ht_closing_minus: Estimate,
    /// Largest gap between the combined `2χ ± 3|τ|` integrals and the same
    /// quantities assembled from `χ` and `τ`.
    pub combined_consistency: f64,
}

struct Derived {
    volume: f64,
    chi: f64,
    tau: f64,
    plus_abs: f64,
    minus_abs: f64,
    r2: f64,
    rc2: f64,
    e2: f64,
    wp: f64,
    wm: f64,
    sigma2: f64,
    lemma45: f64,
    closing_plus: f64,
    closing_minus: f64,
}

fn derive(s: &[f64; FIELDS]) -> Derived {
    let pi2 = PI * PI;
    let chi = (s[WP] + s[WM] + s[R2] / 24.0 - s[E2] / 2.0) / (8.0 * pi2);
    let tau = (s[WP] - s[WM]) / (12.0 * pi2);
    let (w_big, w_small) = if tau >= 0.0 {
        (s[WP], s[WM])
    } else {
        (s[WM], s[WP])
    };
    let combined = |w: f64| (2.0 * w + s[R2] / 24.0 - s[E2] / 2.0) / (4.0 * pi2);
    Derived {
        volume: s[VOL],
        chi,
        tau,
        plus_abs: combined(w_big),
        minus_abs: combined(w_small),
        r2: s[R2],
        rc2: s[RC2],
        e2: s[E2],
        wp: s[WP],
        wm: s[WM],
        sigma2: s[SIGMA2],
        lemma45: 0.5 * s[R2] - s[RC2] - s[VOL],
        closing_plus: 24.0 * s[WP] - s[R2] + 6.0 * s[VOL],
        closing_minus: 24.0 * s[WM] - s[R2] + 6.0 * s[VOL],
    }
}

/// Evaluates every integral at `spec.nodes` and, unless refinement is off,
/// again at the refined node count for error estimates.
pub fn invariant_report(atlas: &ChartAtlas, spec: &QuadratureSpec) -> Result<InvariantReport> {
    spec.validate()?;
    if !atlas.compact {
        return Err(GeometryError::NonCompact(atlas.name.clone()));
    }
    let coarse = derive(&raw_integrals(atlas, spec.nodes)?);
    let fine = match spec.refined_nodes() {
        Some(m) => Some(derive(&raw_integrals(atlas, m)?)),
        None => None,
    };
    let est = |pick: fn(&Derived) -> f64| Estimate {
        value: pick(&coarse),
        error: fine.as_ref().map(|f| (pick(&coarse) - pick(f)).abs()),
    };
    let chi = est(|d| d.chi);
    let tau = est(|d| d.tau);
    let plus_abs = est(|d| d.plus_abs);
    let minus_abs = est(|d| d.minus_abs);
    let combined_consistency = (plus_abs.value - (2.0 * chi.value + 3.0 * tau.value.abs()))
        .abs()
        .max((minus_abs.value - (2.0 * chi.value - 3.0 * tau.value.abs())).abs());
    Ok(InvariantReport {
        atlas: atlas.name.clone(),
        nodes: spec.nodes,
        refined_nodes: spec.refined_nodes(),
        volume: est(|d| d.volume),
        chi: Snapped::new(chi, spec.tolerance),
        tau: Snapped::new(tau, spec.tolerance),
        two_chi_plus_three_abs_tau: plus_abs,
        two_chi_minus_three_abs_tau: minus_abs,
        scalar_squared: est(|d| d.r2),
        ricci_squared: est(|d| d.rc2),
        traceless_ricci_squared: est(|d| d.e2),
        weyl_plus_squared: est(|d| d.wp),
        weyl_minus_squared: est(|d| d.wm),
        sigma2: est(|d| d.sigma2),
        lemma45_residual: est(|d| d.lemma45),
        ht_closing_plus: est(|d| d.closing_plus),
        ht_closing_minus: est(|d| d.closing_minus),
        combined_consistency,
    })
}

/// `∫ σ₂(A_g) dV_g` by direct quadrature of `(R² − 3|Rc|²)/6`.
pub fn sigma2_integral(atlas: &ChartAtlas, spec: &QuadratureSpec) -> Result<Estimate> {
    let field = |_: usize, chart: &MetricChart, p: &ChartPoint| {
        Ok(point_curvature(chart, p)?.invariants.sigma2())
    };
    crate::quadrature::integrate_scalar(atlas, field, spec)
}

/// The same integral through the scalar-curvature route valid on shrinkers
/// normalized to `ρ = ½`: `∫σ₂ = ½(Vol − ⅙∫R²)`.
pub fn sigma2_from_scalar_route(report: &InvariantReport) -> Estimate {
    let v = report.volume;
    let r2 = report.scalar_squared;
    Estimate {
        value: 0.5 * (v.value - r2.value / 6.0),
        error: match (v.error, r2.error) {
            (Some(a), Some(b)) => Some(0.5 * (a + b / 6.0)),
            _ => None,
        },
    }
}

pub const DERDZINSKI_TOLERANCE: f64 = 1e-6;

/// Worst pointwise deviation of `24|W+|² = R²` over a sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerdzinskiReport {
    pub samples: usize,
    /// Relative deviation `|24|W+|² − R²| / R²`, absolute where `R = 0`.
    pub max_deviation: f64,
    pub worst_chart: usize,
    pub worst_point: [f64; 4],
    pub holds: bool,
}

pub fn derdzinski_check(atlas: &ChartAtlas, samples: &[(usize, ChartPoint)]) -> Result<DerdzinskiReport> {
    let mut worst = (0.0_f64, 0, [0.0; 4]);
    for (ci, p) in samples {
        let inv = point_invariants(atlas, *ci, p)?;
        let r2 = inv.scalar * inv.scalar;
        let gap = (24.0 * inv.weyl_plus2 - r2).abs();
        let dev = if r2 > 1e-300 { gap / r2 } else { gap };
        if dev > worst.0 || worst.0.is_nan() {
            worst = (dev, *ci, p.0);
        }
    }
    Ok(DerdzinskiReport {
        samples: samples.len(),
        max_deviation: worst.0,
        worst_chart: worst.1,
        worst_point: worst.2,
        holds: worst.0 < DERDZINSKI_TOLERANCE,
    })
}

/// Extremes of pointwise quantities over the quadrature nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeExtremes {
    pub min_scalar: f64,
    pub max_scalar: f64,
    pub min_ricci_eigenvalue: f64,
}

pub fn node_extremes(atlas: &ChartAtlas, n: usize) -> Result<NodeExtremes> {
    let init = NodeExtremes {
        min_scalar: f64::INFINITY,
        max_scalar: f64::NEG_INFINITY,
        min_ricci_eigenvalue: f64::INFINITY,
    };
    fold_nodes(
        atlas,
        n,
        init,
        |_, chart, p, _, acc| {
            let c = point_curvature(chart, p)?;
            let r = c.invariants.scalar;
            acc.min_scalar = acc.min_scalar.min(r);
            acc.max_scalar = acc.max_scalar.max(r);
            acc.min_ricci_eigenvalue = acc.min_ricci_eigenvalue.min(min_ricci_eigenvalue(&c.frame_ricci));
            Ok(())
        },
        |total, part| {
            total.min_scalar = total.min_scalar.min(part.min_scalar);
            total.max_scalar = total.max_scalar.max(part.max_scalar);
            total.min_ricci_eigenvalue = total.min_ricci_eigenvalue.min(part.min_ricci_eigenvalue);
        },
    )
}
