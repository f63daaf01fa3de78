//! Closed-form example metrics with reference invariants.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::Matrix4;
use serde::Serialize;

use crate::chart::{ChartAtlas, MetricChart, DIM};
use crate::error::{GeometryError, Result};
use crate::soliton::SolitonCandidate;
use crate::tensor::PotentialField;
use crate::trig::{TrigMetric, TrigPoly, TrigTerm};

pub const ROUND_S4: &str = "round_s4";
pub const FUBINI_STUDY_CP2: &str = "fubini_study_cp2";
pub const PRODUCT_S2XS2: &str = "product_s2xs2";
pub const FLAT_T4: &str = "flat_t4";
pub const GAUSSIAN_SHRINKER: &str = "gaussian_shrinker";
pub const KOISO_CAO: &str = "koiso_cao";
pub const WANG_ZHU: &str = "wang_zhu";

/// Names that [`build`] accepts.
pub const BUILDABLE: [&str; 5] = [
    ROUND_S4,
    FUBINI_STUDY_CP2,
    PRODUCT_S2XS2,
    FLAT_T4,
    GAUSSIAN_SHRINKER,
];

/// Named real parameters, e.g. `r = 2.449`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ZooParams(pub BTreeMap<String, f64>);

impl ZooParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.0.insert(name.to_string(), value);
        self
    }

    fn get_positive(&self, name: &str, default: f64) -> Result<f64> {
        let v = self.0.get(name).copied().unwrap_or(default);
        if !(v > 0.0 && v.is_finite()) {
            return Err(GeometryError::InvalidParameter {
                name: name.into(),
                value: v,
                reason: "must be positive and finite".into(),
            });
        }
        Ok(v)
    }

    fn reject_unknown(&self, metric: &str, allowed: &[&str]) -> Result<()> {
        match self.0.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            Some((k, v)) => Err(GeometryError::InvalidParameter {
                name: k.clone(),
                value: *v,
                reason: format!("not a parameter of {metric} (expected one of {allowed:?})"),
            }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamInfo {
    pub name: &'static str,
    pub default: f64,
    pub meaning: &'static str,
}

/// Known topology and geometry of a zoo entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceRecord {
    pub name: String,
    pub topology: &'static str,
    pub chi: Option<i64>,
    pub tau: Option<i64>,
    pub spin: Option<bool>,
    pub kahler: bool,
    pub einstein: bool,
    pub compact: bool,
    pub volume: Option<f64>,
    /// Soliton constant of the shipped potential, if any.
    pub rho: Option<f64>,
    pub has_atlas: bool,
    pub note: &'static str,
}

/// One line of `zoo list`.
#[derive(Debug, Clone, Serialize)]
pub struct ZooListing {
    pub name: &'static str,
    pub params: Vec<ParamInfo>,
    pub reference: ReferenceRecord,
}

/// A built zoo metric: its atlas and, when it is a soliton, the candidate.
#[derive(Debug, Clone)]
pub struct ZooBuild {
    pub atlas: ChartAtlas,
    pub candidate: Option<SolitonCandidate>,
}

fn params_of(name: &str) -> Result<Vec<ParamInfo>> {
    let p = |name, default, meaning| ParamInfo {
        name,
        default,
        meaning,
    };
    Ok(match name {
        ROUND_S4 => vec![p("r", 6f64.sqrt(), "radius")],
        FUBINI_STUDY_CP2 => vec![p("rho", 0.5, "Einstein constant (Rc = rho g)")],
        PRODUCT_S2XS2 => vec![
            p("a", 2f64.sqrt(), "radius of the first factor"),
            p("b", 2f64.sqrt(), "radius of the second factor"),
        ],
        FLAT_T4 => vec![p("period", 2.0 * PI, "side length of the cubical torus")],
        GAUSSIAN_SHRINKER => vec![p("half_width", 1.0, "half side of the coordinate box")],
        KOISO_CAO | WANG_ZHU => vec![],
        other => return Err(GeometryError::UnknownMetric(other.into())),
    })
}

fn resolved(name: &str, params: &ZooParams) -> Result<BTreeMap<&'static str, f64>> {
    let infos = params_of(name)?;
    let allowed: Vec<&str> = infos.iter().map(|i| i.name).collect();
    params.reject_unknown(name, &allowed)?;
    infos
        .iter()
        .map(|i| Ok((i.name, params.get_positive(i.name, i.default)?)))
        .collect()
}

fn axis_power(k: usize, sin: u8, cos: u8) -> [(u8, u8); DIM] {
    let mut p = [(0, 0); DIM];
    p[k] = (sin, cos);
    p
}

fn merge_powers(parts: &[[(u8, u8); DIM]]) -> [(u8, u8); DIM] {
    let mut out = [(0, 0); DIM];
    for part in parts {
        for k in 0..DIM {
            out[k].0 += part[k].0;
            out[k].1 += part[k].1;
        }
    }
    out
}

fn poly(terms: &[(f64, [(u8, u8); DIM])]) -> TrigPoly {
    TrigPoly::from_terms(terms.iter().map(|&(c, p)| TrigTerm::new(c, p)))
}

/// Round S⁴ in hyperspherical coordinates `(θ1, θ2, θ3, φ)`.
fn round_s4_chart(r: f64) -> MetricChart {
    let r2 = r * r;
    let s = |k| axis_power(k, 2, 0);
    let metric = TrigMetric::diagonal([
        poly(&[(r2, [(0, 0); DIM])]),
        poly(&[(r2, s(0))]),
        poly(&[(r2, merge_powers(&[s(0), s(1)]))]),
        poly(&[(r2, merge_powers(&[s(0), s(1), s(2)]))]),
    ]);
    MetricChart::new([(0.0, PI), (0.0, PI), (0.0, PI), (0.0, 2.0 * PI)], Arc::new(metric))
        .with_measure_note("sqrt(det g) vanishes on theta_i in {0, pi}; phi seam at 0 = 2pi")
}

/// S²(a) × S²(b) in coordinates `(θ1, φ1, θ2, φ2)`, product (complex) orientation.
fn product_s2xs2_chart(a: f64, b: f64) -> MetricChart {
    let metric = TrigMetric::diagonal([
        poly(&[(a * a, [(0, 0); DIM])]),
        poly(&[(a * a, axis_power(0, 2, 0))]),
        poly(&[(b * b, [(0, 0); DIM])]),
        poly(&[(b * b, axis_power(2, 2, 0))]),
    ]);
    MetricChart::new([(0.0, PI), (0.0, 2.0 * PI), (0.0, PI), (0.0, 2.0 * PI)], Arc::new(metric))
        .with_measure_note("sqrt(det g) vanishes at theta_1, theta_2 in {0, pi}; phi seams")
}

/// Fubini–Study metric scaled to Einstein constant `rho` on the affine chart
/// `z1 = tan χ cos η e^{iα}`, `z2 = tan χ sin η e^{iβ}`.
///
/// With holomorphic sectional curvature 4 the metric is
/// `dχ² + sin²χ (dη² + cos²η dα² + sin²η dβ²) − sin⁴χ (cos²η dα + sin²η dβ)²`
/// and `Rc = 6g`, so the scale is `6/rho`.
fn fubini_study_chart(rho: f64) -> MetricChart {
    let lambda = 6.0 / rho;
    let (chi, eta) = (0, 1);
    let sc = |m| axis_power(chi, m, 0);
    let ce = |m| axis_power(eta, 0, m);
    let se = |m| axis_power(eta, m, 0);
    let mut comps: [[TrigPoly; DIM]; DIM] = Default::default();
    comps[0][0] = poly(&[(lambda, [(0, 0); DIM])]);
    comps[1][1] = poly(&[(lambda, sc(2))]);
    comps[2][2] = poly(&[
        (lambda, merge_powers(&[sc(2), ce(2)])),
        (-lambda, merge_powers(&[sc(4), ce(4)])),
    ]);
    comps[3][3] = poly(&[
        (lambda, merge_powers(&[sc(2), se(2)])),
        (-lambda, merge_powers(&[sc(4), se(4)])),
    ]);
    let cross = poly(&[(-lambda, merge_powers(&[sc(4), ce(2), se(2)]))]);
    comps[2][3] = cross.clone();
    comps[3][2] = cross;
    let metric = TrigMetric::new(comps);
    // (χ, η, α, β) is negatively oriented against the complex orientation
    // (x1, y1, x2, y2): reordering to (ρ1, α, ρ2, β) takes one transposition.
    MetricChart::new(
        [(0.0, PI / 2.0), (0.0, PI / 2.0), (0.0, 2.0 * PI), (0.0, 2.0 * PI)],
        Arc::new(metric),
    )
    .with_orientation(-1)
    .with_measure_note(
        "affine chart of CP2 minus the line at infinity; sqrt(det g) vanishes at chi = 0, pi/2 and eta = 0, pi/2",
    )
}

fn flat_chart(lo: f64, hi: f64) -> MetricChart {
    let one = || poly(&[(1.0, [(0, 0); DIM])]);
    let metric = TrigMetric::diagonal([one(), one(), one(), one()]);
    MetricChart::new([(lo, hi); DIM], Arc::new(metric))
}

fn gaussian_potential() -> PotentialField {
    PotentialField::new(
        |x| x.iter().map(|v| v * v).sum::<f64>() / 4.0,
        |x| x.map(|v| v / 2.0),
        |_| Matrix4::identity() * 0.5,
    )
}

/// Builds the named metric. Reference-only entries are refused.
pub fn build(name: &str, params: &ZooParams) -> Result<ZooBuild> {
    let p = resolved(name, params)?;
    let zero = || PotentialField::constant(0.0);
    let (atlas, candidate) = match name {
        ROUND_S4 => {
            let r = p["r"];
            let atlas = ChartAtlas::new(ROUND_S4, vec![round_s4_chart(r)], true)?;
            let rho = 3.0 / (r * r);
            (atlas, Some((zero(), rho)))
        }
        FUBINI_STUDY_CP2 => {
            let rho = p["rho"];
            let atlas = ChartAtlas::new(FUBINI_STUDY_CP2, vec![fubini_study_chart(rho)], true)?;
            (atlas, Some((zero(), rho)))
        }
        PRODUCT_S2XS2 => {
            let (a, b) = (p["a"], p["b"]);
            let atlas = ChartAtlas::new(PRODUCT_S2XS2, vec![product_s2xs2_chart(a, b)], true)?;
            let soliton = (a == b).then(|| (zero(), 1.0 / (a * a)));
            (atlas, soliton)
        }
        FLAT_T4 => {
            let chart = flat_chart(0.0, p["period"])
                .with_measure_note("cube with opposite faces identified");
            (ChartAtlas::new(FLAT_T4, vec![chart], true)?, None)
        }
        GAUSSIAN_SHRINKER => {
            let w = p["half_width"];
            let chart = flat_chart(-w, w).with_measure_note("window of the complete flat R^4");
            let atlas = ChartAtlas::new(GAUSSIAN_SHRINKER, vec![chart], false)?;
            (atlas, Some((gaussian_potential(), 0.5)))
        }
        KOISO_CAO | WANG_ZHU => return Err(GeometryError::ReferenceOnly(name.into())),
        other => return Err(GeometryError::UnknownMetric(other.into())),
    };
    let candidate = candidate.map(|(f, rho)| SolitonCandidate::new(atlas.clone(), f, rho));
    Ok(ZooBuild { atlas, candidate })
}

/// Reference invariants of the named entry at the given parameters.
pub fn reference(name: &str, params: &ZooParams) -> Result<ReferenceRecord> {
    let p = resolved(name, params)?;
    let rec = |topology, chi, tau, spin, kahler, einstein, volume, rho, note| ReferenceRecord {
        name: name.to_string(),
        topology,
        chi: Some(chi),
        tau: Some(tau),
        spin: Some(spin),
        kahler,
        einstein,
        compact: true,
        volume,
        rho,
        has_atlas: true,
        note,
    };
    Ok(match name {
        ROUND_S4 => {
            let r = p["r"];
            rec(
                "S4",
                2,
                0,
                true,
                false,
                true,
                Some(8.0 * PI * PI / 3.0 * r.powi(4)),
                Some(3.0 / (r * r)),
                "constant sectional curvature 1/r^2",
            )
        }
        FUBINI_STUDY_CP2 => {
            let rho = p["rho"];
            rec(
                "CP2",
                3,
                1,
                false,
                true,
                true,
                Some(18.0 * PI * PI / (rho * rho)),
                Some(rho),
                "complex orientation; self-dual Kahler-Einstein",
            )
        }
        PRODUCT_S2XS2 => {
            let (a, b) = (p["a"], p["b"]);
            let einstein = a == b;
            rec(
                "S2xS2",
                4,
                0,
                true,
                true,
                einstein,
                Some(16.0 * PI * PI * a * a * b * b),
                einstein.then(|| 1.0 / (a * a)),
                "product orientation; Einstein only for equal radii",
            )
        }
        FLAT_T4 => rec(
            "T4",
            0,
            0,
            true,
            true,
            true,
            Some(p["period"].powi(4)),
            None,
            "Ricci-flat; steady, not shrinking",
        ),
        GAUSSIAN_SHRINKER => ReferenceRecord {
            name: name.into(),
            topology: "R4",
            chi: None,
            tau: None,
            spin: Some(true),
            kahler: true,
            einstein: false,
            compact: false,
            volume: None,
            rho: Some(0.5),
            has_atlas: true,
            note: "flat metric with f = |x|^2/4; pointwise checks only",
        },
        KOISO_CAO => ReferenceRecord {
            has_atlas: false,
            ..rec(
                "CP2 # CP2bar",
                4,
                0,
                false,
                true,
                false,
                None,
                None,
                "non-Einstein Kahler shrinker; existence only, no closed form",
            )
        },
        WANG_ZHU => ReferenceRecord {
            has_atlas: false,
            ..rec(
                "CP2 # 2 CP2bar",
                5,
                -1,
                false,
                true,
                false,
                None,
                None,
                "non-Einstein Kahler shrinker; existence only, no closed form",
            )
        },
        other => return Err(GeometryError::UnknownMetric(other.into())),
    })
}

/// Every entry with default parameters, in a fixed order.
pub fn catalog() -> Vec<ZooListing> {
    [
        ROUND_S4,
        FUBINI_STUDY_CP2,
        PRODUCT_S2XS2,
        FLAT_T4,
        GAUSSIAN_SHRINKER,
        KOISO_CAO,
        WANG_ZHU,
    ]
    .into_iter()
    .map(|name| ZooListing {
        name,
        params: params_of(name).expect("catalog names are known"),
        reference: reference(name, &ZooParams::new()).expect("defaults are valid"),
    })
    .collect()
}
