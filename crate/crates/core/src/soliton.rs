//! Gradient shrinking soliton checks: the equation `Rc + ∇²f = ρg`, the
//! identities it implies, normalization to `ρ = ½`, and the integral
//! sufficient conditions for the Hitchin–Thorpe inequality.

use std::f64::consts::PI;

use nalgebra::Matrix4;
use serde::Serialize;

use crate::chart::{ChartAtlas, ChartPoint, MetricChart, DIM};
use crate::error::{GeometryError, Result};
use crate::invariants::{invariant_report, node_extremes, InvariantReport};
use crate::quadrature::{fold_nodes, Estimate, QuadratureSpec};
use crate::tensor::{bundle_from, potential_derivatives, Connection, PotentialField};

/// Relative step for the finite-difference gradient of `R`.
pub const SCALAR_GRADIENT_STEP: f64 = 1e-2;
/// Half-width of the band around `log 5` that yields a boundary verdict.
pub const OSCILLATION_BAND: f64 = 1e-8;
/// Largest residual norm accepted as a soliton.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;
/// Largest identity deviation accepted as a soliton.
pub const IDENTITY_TOLERANCE: f64 = 1e-7;
/// Random samples added to the quadrature nodes when bracketing `f`.
pub const POTENTIAL_SAMPLES: usize = 10_000;
const NORMALIZED_RHO: f64 = 0.5;
const SAMPLE_SEED: u64 = 0x5eed_50_1170;

/// A metric, a potential per chart, and a soliton constant.
#[derive(Debug, Clone)]
pub struct SolitonCandidate {
    pub atlas: ChartAtlas,
    potentials: Vec<PotentialField>,
    pub rho: f64,
}

/// `Rc + ∇²f − ρg` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub tensor: Matrix4<f64>,
    /// `|Rc + ∇²f − ρg|` in the metric.
    pub norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityDeviations {
    pub samples: usize,
    /// `max |R + Δf − 4ρ|`
    pub trace: f64,
    /// `max |½∇R − Rc(∇f, ·)|`
    pub gradient: f64,
    /// `max − min` of `|∇f|² + R − 2ρf`
    pub conserved_spread: f64,
}

impl IdentityDeviations {
    pub fn passes(&self) -> bool {
        self.trace < IDENTITY_TOLERANCE
            && self.gradient < IDENTITY_TOLERANCE
            && self.conserved_spread < IDENTITY_TOLERANCE
    }
}

impl SolitonCandidate {
    /// The same potential is used in the coordinates of every chart.
    pub fn new(atlas: ChartAtlas, potential: PotentialField, rho: f64) -> Self {
        let potentials = vec![potential; atlas.charts.len()];
        Self {
            atlas,
            potentials,
            rho,
        }
    }

    pub fn with_chart_potentials(
        atlas: ChartAtlas,
        potentials: Vec<PotentialField>,
        rho: f64,
    ) -> Result<Self> {
        if potentials.len() != atlas.charts.len() {
            return Err(GeometryError::Inconsistent(format!(
                "{} potentials for {} charts",
                potentials.len(),
                atlas.charts.len()
            )));
        }
        Ok(Self {
            atlas,
            potentials,
            rho,
        })
    }

    pub fn is_shrinking(&self) -> bool {
        self.rho > 0.0
    }

    pub fn potential(&self, chart: usize) -> Result<&PotentialField> {
        self.potentials
            .get(chart)
            .ok_or(GeometryError::NoSuchChart(chart))
    }

    fn located(&self, chart: usize, p: &ChartPoint) -> Result<(&MetricChart, &PotentialField)> {
        let c = self.atlas.chart(chart)?;
        c.check_domain(chart, p)?;
        Ok((c, &self.potentials[chart]))
    }

    /// `Rc + ∇²f − ρg` and its norm at `p`.
    pub fn residual(&self, chart: usize, p: &ChartPoint) -> Result<Residual> {
        let (c, f) = self.located(chart, p)?;
        let jet = c.jet_unchecked(p);
        let conn = Connection::from_jet(&jet, p)?;
        let bundle = bundle_from(&jet, &conn);
        let d = potential_derivatives(&conn, f, p);
        let tensor = bundle.rc + d.hessian - conn.g * self.rho;
        let norm2 = (conn.ginv * tensor * conn.ginv).component_mul(&tensor).sum();
        Ok(Residual {
            tensor,
            norm: norm2.max(0.0).sqrt(),
        })
    }

    /// Largest residual norm over the given points.
    pub fn max_residual(&self, samples: &[(usize, ChartPoint)]) -> Result<f64> {
        samples
            .iter()
            .try_fold(0.0_f64, |m, (ci, p)| Ok(m.max(self.residual(*ci, p)?.norm)))
    }

    fn scalar_at(&self, chart: &MetricChart, x: &[f64; DIM]) -> Result<f64> {
        let p = ChartPoint(*x);
        let jet = chart.jet_unchecked(&p);
        let conn = Connection::from_jet(&jet, &p)?;
        Ok(bundle_from(&jet, &conn).scalar)
    }

    /// Fourth-order central differences of `R` in chart coordinates.
    fn scalar_gradient(&self, chart: &MetricChart, p: &ChartPoint) -> Result<[f64; DIM]> {
        let mut grad = [0.0; DIM];
        for (k, g) in grad.iter_mut().enumerate() {
            let (lo, hi) = chart.bounds()[k];
            let room = (p.0[k] - lo).min(hi - p.0[k]);
            let h = (SCALAR_GRADIENT_STEP * (hi - lo)).min(0.25 * room);
            let at = |s: f64| {
                let mut x = p.0;
                x[k] += s * h;
                self.scalar_at(chart, &x)
            };
            *g = (-at(2.0)? + 8.0 * at(1.0)? - 8.0 * at(-1.0)? + at(-2.0)?) / (12.0 * h);
        }
        Ok(grad)
    }

    /// Deviations of the trace identity, the gradient identity and the
    /// conserved quantity over `samples`.
    pub fn identity_suite(&self, samples: &[(usize, ChartPoint)]) -> Result<IdentityDeviations> {
        let mut trace: f64 = 0.0;
        let mut gradient: f64 = 0.0;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (ci, p) in samples {
            let (c, f) = self.located(*ci, p)?;
            let jet = c.jet_unchecked(p);
            let conn = Connection::from_jet(&jet, p)?;
            let bundle = bundle_from(&jet, &conn);
            let d = potential_derivatives(&conn, f, p);
            trace = trace.max((bundle.scalar + d.laplacian - 4.0 * self.rho).abs());

            let dr = self.scalar_gradient(c, p)?;
            let raised: [f64; DIM] = std::array::from_fn(|j| {
                (0..DIM).map(|k| conn.ginv[(j, k)] * d.gradient[k]).sum()
            });
            let v: [f64; DIM] = std::array::from_fn(|i| {
                0.5 * dr[i] - (0..DIM).map(|j| bundle.rc[(i, j)] * raised[j]).sum::<f64>()
            });
            let mut n2 = 0.0;
            for i in 0..DIM {
                for j in 0..DIM {
                    n2 += conn.ginv[(i, j)] * v[i] * v[j];
                }
            }
            gradient = gradient.max(n2.max(0.0).sqrt());

            let q = d.gradient_norm2 + bundle.scalar - 2.0 * self.rho * d.value;
            lo = lo.min(q);
            hi = hi.max(q);
        }
        Ok(IdentityDeviations {
            samples: samples.len(),
            trace,
            gradient,
            conserved_spread: if samples.is_empty() { 0.0 } else { hi - lo },
        })
    }

    /// Rescales to `ρ = ½`: `(λg, f, ρ/λ)` with `λ = 2ρ`.
    pub fn normalize(&self) -> Result<SolitonCandidate> {
        if !(self.rho > 0.0) {
            return Err(GeometryError::NotShrinking(self.rho));
        }
        let lambda = 2.0 * self.rho;
        if lambda == 1.0 {
            return Ok(self.clone());
        }
        Ok(SolitonCandidate {
            atlas: self.atlas.scaled(lambda),
            potentials: self.potentials.clone(),
            rho: self.rho / lambda,
        })
    }

    pub fn is_normalized(&self) -> bool {
        (self.rho - NORMALIZED_RHO).abs() <= 1e-12
    }

    /// Smallest and largest potential over the quadrature nodes and
    /// [`POTENTIAL_SAMPLES`] random interior points.
    pub fn potential_range(&self, nodes: usize) -> Result<(f64, f64)> {
        let (lo, hi) = fold_nodes(
            &self.atlas,
            nodes,
            (f64::INFINITY, f64::NEG_INFINITY),
            |ci, _, p, _, acc| {
                let v = self.potentials[ci].value(&p.0);
                acc.0 = acc.0.min(v);
                acc.1 = acc.1.max(v);
                Ok(())
            },
            |t, part| {
                t.0 = t.0.min(part.0);
                t.1 = t.1.max(part.1);
            },
        )?;
        let mut range = (lo, hi);
        for (ci, p) in self.atlas.random_points(POTENTIAL_SAMPLES, SAMPLE_SEED) {
            let v = self.potentials[ci].value(&p.0);
            range.0 = range.0.min(v);
            range.1 = range.1.max(v);
        }
        Ok(range)
    }

    /// Evaluates every integral sufficient condition on a normalized compact
    /// candidate.
    pub fn sufficient_report(&self, spec: &QuadratureSpec) -> Result<SufficientReport> {
        if !self.atlas.compact {
            return Err(GeometryError::NonCompact(self.atlas.name.clone()));
        }
        if !self.is_normalized() {
            return Err(GeometryError::NormalizationRequired(self.rho));
        }
        let inv = invariant_report(&self.atlas, spec)?;
        let extremes = node_extremes(&self.atlas, spec.nodes)?;
        let (f_min, f_max) = self.potential_range(spec.nodes)?;
        Ok(SufficientReport::assemble(
            inv,
            extremes.min_scalar,
            extremes.min_ricci_eigenvalue,
            f_min,
            f_max,
            spec,
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Boundary,
    Fail,
}

impl Verdict {
    /// Pass when `margin > tol`, boundary when `|margin| ≤ tol`.
    pub fn from_margin(margin: f64, tol: f64) -> Self {
        if margin > tol {
            Verdict::Pass
        } else if margin >= -tol {
            Verdict::Boundary
        } else {
            Verdict::Fail
        }
    }

    pub fn holds(self) -> bool {
        !matches!(self, Verdict::Fail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`
    pub margin: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl Comparison {
    fn new(lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = rhs - lhs;
        Self {
            lhs,
            rhs,
            margin,
            tolerance,
            verdict: Verdict::from_margin(margin, tolerance),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarPositivity {
    pub method: &'static str,
    pub min_scalar: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassA {
    /// Yamabe positivity is replaced by `min R > 0` over the nodes.
    pub yamabe_surrogate: &'static str,
    pub scalar_positive: bool,
    pub sigma2_integral: Estimate,
    pub sigma2_tolerance: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma49 {
    /// `8π²χ − ∫|W|² − (1/24)Vol(5 − e^{osc f})`
    pub slack: f64,
    pub tolerance: f64,
    /// Pass: strict inequality; boundary: equality (the Einstein case).
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HitchinThorpe {
    pub two_chi_plus_three_abs_tau: f64,
    pub two_chi_minus_three_abs_tau: f64,
    pub plus: Verdict,
    pub minus: Verdict,
    /// `sign ∫(24|W±|² − R² + 6)` agrees with `sign(2χ ± 3τ)` for both signs.
    pub closing_consistent: bool,
}

/// Every sufficient condition evaluated on one normalized candidate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SufficientReport {
    pub invariants: InvariantReport,
    pub scalar_positive: ScalarPositivity,
    /// `∫R² ≤ 6 Vol`
    pub thm44: Comparison,
    /// `f_max − f_min ≤ log 5`
    pub thm46: Comparison,
    pub f_min: f64,
    pub f_max: f64,
    pub class_a: ClassA,
    /// Minimum Ricci eigenvalue over the nodes, reported when class A holds.
    pub min_ricci_eigenvalue: Option<f64>,
    pub lemma49: Lemma49,
    /// Strict oscillation bound implies strict `∫R² < 6 Vol`, and the
    /// non-strict versions likewise.
    pub implication_ok: bool,
    /// Class A holds exactly when `∫R² < 6 Vol` strictly.
    pub class_a_matches_thm44: bool,
    /// `∫R² = 6 Vol` exactly when `∫σ₂ = 0`.
    pub equality_consistent: bool,
    pub ht_verdict: HitchinThorpe,
}

fn sign_with_tol(x: f64, tol: f64) -> i8 {
    if x > tol {
        1
    } else if x < -tol {
        -1
    } else {
        0
    }
}

impl SufficientReport {
    fn assemble(
        inv: InvariantReport,
        min_scalar: f64,
        min_ricci: f64,
        f_min: f64,
        f_max: f64,
        spec: &QuadratureSpec,
    ) -> Self {
        let vol = inv.volume;
        let r2 = inv.scalar_squared;
        let err = |e: &Estimate| 10.0 * e.error_or_zero();
        let rel = spec.tolerance * vol.value.abs().max(1.0);

        let scalar_positive = ScalarPositivity {
            method: "min R over quadrature nodes",
            min_scalar,
            verdict: if min_scalar > 0.0 {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
        };

        let thm44 = Comparison::new(r2.value, 6.0 * vol.value, err(&r2) + 6.0 * err(&vol) + rel);

        let osc = f_max - f_min;
        let thm46 = Comparison::new(osc, 5f64.ln(), OSCILLATION_BAND);

        let sigma2 = inv.sigma2;
        let sigma2_tolerance = err(&sigma2) + rel;
        let sigma_verdict = Verdict::from_margin(sigma2.value, sigma2_tolerance);
        let class_verdict = match (scalar_positive.verdict, sigma_verdict) {
            (Verdict::Pass, v) => v,
            _ => Verdict::Fail,
        };
        let class_a = ClassA {
            yamabe_surrogate: "min R > 0 over quadrature nodes",
            scalar_positive: scalar_positive.verdict == Verdict::Pass,
            sigma2_integral: sigma2,
            sigma2_tolerance,
            verdict: class_verdict,
        };

        let pi2 = PI * PI;
        let weyl = inv.weyl_plus_squared.value + inv.weyl_minus_squared.value;
        let slack = 8.0 * pi2 * inv.chi.value - weyl - vol.value * (5.0 - osc.exp()) / 24.0;
        let slack_tol = 8.0 * pi2 * err(&Estimate {
            value: inv.chi.value,
            error: inv.chi.error,
        }) + err(&inv.weyl_plus_squared)
            + err(&inv.weyl_minus_squared)
            + err(&vol)
            + rel;
        let lemma49 = Lemma49 {
            slack,
            tolerance: slack_tol,
            verdict: Verdict::from_margin(slack, slack_tol),
        };

        let implication_ok = (thm46.verdict != Verdict::Pass || thm44.verdict == Verdict::Pass)
            && (!thm46.verdict.holds() || thm44.verdict.holds());
        let class_a_matches_thm44 =
            (class_a.verdict == Verdict::Pass) == (thm44.verdict == Verdict::Pass);
        let equality_consistent =
            (thm44.verdict == Verdict::Boundary) == (sigma_verdict == Verdict::Boundary);

        let ht_tol = |e: &Estimate| err(e) + spec.tolerance;
        let plus = inv.two_chi_plus_three_abs_tau;
        let minus = inv.two_chi_minus_three_abs_tau;
        let tau_signed = inv.tau.value;
        let chi = inv.chi.value;
        let closing_tol = |e: &Estimate| err(e) + rel;
        let closing_consistent = [
            (inv.ht_closing_plus, 2.0 * chi + 3.0 * tau_signed),
            (inv.ht_closing_minus, 2.0 * chi - 3.0 * tau_signed),
        ]
        .iter()
        .all(|(closing, combo)| {
            sign_with_tol(closing.value, closing_tol(closing))
                == sign_with_tol(*combo, ht_tol(&plus).max(ht_tol(&minus)))
        });
        let ht_verdict = HitchinThorpe {
            two_chi_plus_three_abs_tau: plus.value,
            two_chi_minus_three_abs_tau: minus.value,
            plus: Verdict::from_margin(plus.value, ht_tol(&plus)),
            minus: Verdict::from_margin(minus.value, ht_tol(&minus)),
            closing_consistent,
        };

        Self {
            min_ricci_eigenvalue: (class_a.verdict == Verdict::Pass).then_some(min_ricci),
            invariants: inv,
            scalar_positive,
            thm44,
            thm46,
            f_min,
            f_max,
            class_a,
            lemma49,
            implication_ok,
            class_a_matches_thm44,
            equality_consistent,
            ht_verdict,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_bands() {
        assert_eq!(Verdict::from_margin(1.0, 0.1), Verdict::Pass);
        assert_eq!(Verdict::from_margin(0.05, 0.1), Verdict::Boundary);
        assert_eq!(Verdict::from_margin(-0.1, 0.1), Verdict::Boundary);
        assert_eq!(Verdict::from_margin(-0.2, 0.1), Verdict::Fail);
    }

    #[test]
    fn sign_tolerance() {
        assert_eq!(sign_with_tol(1e-9, 1e-6), 0);
        assert_eq!(sign_with_tol(-2.0, 1e-6), -1);
    }
}
