//! Integer bookkeeping for closed oriented 4-manifolds and the topological
//! obstructions to compact shrinking solitons.
//!
//! `tau` is always the signature; the intersection form itself only appears
//! through `(b⁺, b⁻)`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error("unknown building block `{0}` (expected one of S4, CP2, CP2bar, S2xS2, K3, T4)")]
    UnknownBlock(String),
    #[error("cannot parse connected sum `{0}`: {1}")]
    Parse(String, String),
    #[error("inconsistent class {label}: {reason}")]
    Inconsistent { label: String, reason: String },
    #[error("{0} is not simply connected")]
    NotSimplyConnected(String),
    #[error("unknown structure `{0}`")]
    UnknownStructure(String),
}

/// Homotopy-level record of a closed oriented 4-manifold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FourManifoldClass {
    pub chi: i64,
    pub tau: i64,
    pub b1: u32,
    pub spin: bool,
    pub simply_connected: bool,
    pub label: String,
}

pub const BLOCKS: [&str; 6] = ["S4", "CP2", "CP2bar", "S2xS2", "K3", "T4"];

/// Catalog value of a named building block.
pub fn block(name: &str) -> Result<FourManifoldClass, TopologyError> {
    let c = |chi, tau, b1, spin, simply_connected| FourManifoldClass {
        chi,
        tau,
        b1,
        spin,
        simply_connected,
        label: name.to_string(),
    };
    Ok(match name {
        "S4" => c(2, 0, 0, true, true),
        "CP2" => c(3, 1, 0, false, true),
        "CP2bar" => c(3, -1, 0, false, true),
        "S2xS2" => c(4, 0, 0, true, true),
        "K3" => c(24, -16, 0, true, true),
        "T4" => c(0, 0, 4, true, false),
        other => return Err(TopologyError::UnknownBlock(other.into())),
    })
}

/// `A # B`.
pub fn connected_sum(a: &FourManifoldClass, b: &FourManifoldClass) -> FourManifoldClass {
    FourManifoldClass {
        chi: a.chi + b.chi - 2,
        tau: a.tau + b.tau,
        b1: a.b1 + b.b1,
        spin: a.spin && b.spin,
        simply_connected: a.simply_connected && b.simply_connected,
        label: format!("{} # {}", a.label, b.label),
    }
}

/// `k` copies of `a` summed together; zero copies give `S4`.
pub fn multiple(a: &FourManifoldClass, k: u32) -> FourManifoldClass {
    if k == 0 {
        return block("S4").expect("S4 is a catalog block");
    }
    let mut acc = a.clone();
    for _ in 1..k {
        acc = connected_sum(&acc, a);
    }
    acc.label = if k == 1 {
        a.label.clone()
    } else {
        format!("{k}*{}", a.label)
    };
    acc
}

/// Parses sums like `"CP2 + 3*CP2bar"`.
pub fn parse_sum(text: &str) -> Result<FourManifoldClass, TopologyError> {
    let err = |why: &str| TopologyError::Parse(text.to_string(), why.to_string());
    let mut total: Option<FourManifoldClass> = None;
    for raw in text.split('+') {
        let part = raw.trim();
        if part.is_empty() {
            return Err(err("empty summand"));
        }
        let (k, name) = match part.split_once('*') {
            Some((k, name)) => (
                k.trim()
                    .parse::<u32>()
                    .map_err(|_| err(&format!("bad multiplier `{}`", k.trim())))?,
                name.trim(),
            ),
            None => (1, part),
        };
        let piece = multiple(&block(name)?, k);
        total = Some(match total {
            None => piece,
            Some(t) => connected_sum(&t, &piece),
        });
    }
    let mut class = total.ok_or_else(|| err("no summands"))?;
    class.label = text.split_whitespace().collect::<Vec<_>>().join(" ");
    Ok(class)
}

/// Second Betti number and its positive/negative split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BettiSplit {
    pub b2: i64,
    pub b_plus: i64,
    pub b_minus: i64,
}

/// `b₂ = χ − 2 + 2b₁`, `b± = (b₂ ± τ)/2`.
pub fn betti_split(c: &FourManifoldClass) -> Result<BettiSplit, TopologyError> {
    let b2 = c.chi - 2 + 2 * i64::from(c.b1);
    let bad = |reason: String| TopologyError::Inconsistent {
        label: c.label.clone(),
        reason,
    };
    if b2 < 0 {
        return Err(bad(format!("negative b2 = {b2}")));
    }
    if (b2 + c.tau).rem_euclid(2) != 0 {
        return Err(bad(format!("b2 = {b2} and tau = {} differ in parity", c.tau)));
    }
    let b_plus = (b2 + c.tau) / 2;
    let b_minus = (b2 - c.tau) / 2;
    if b_plus < 0 || b_minus < 0 {
        return Err(bad(format!("|tau| = {} exceeds b2 = {b2}", c.tau.abs())));
    }
    Ok(BettiSplit {
        b2,
        b_plus,
        b_minus,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntVerdict {
    Pass,
    Boundary,
    Fail,
}

impl IntVerdict {
    fn of(v: i64) -> Self {
        match v.signum() {
            1 => IntVerdict::Pass,
            0 => IntVerdict::Boundary,
            _ => IntVerdict::Fail,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HtPredicate {
    pub two_chi_plus_three_abs_tau: i64,
    pub two_chi_minus_three_abs_tau: i64,
    pub plus: IntVerdict,
    pub minus: IntVerdict,
}

impl HtPredicate {
    pub fn satisfied(&self) -> bool {
        self.plus != IntVerdict::Fail && self.minus != IntVerdict::Fail
    }
}

/// `2χ ± 3|τ|` with verdicts (boundary means exactly zero).
pub fn ht_predicate(c: &FourManifoldClass) -> HtPredicate {
    let p = 2 * c.chi + 3 * c.tau.abs();
    let m = 2 * c.chi - 3 * c.tau.abs();
    HtPredicate {
        two_chi_plus_three_abs_tau: p,
        two_chi_minus_three_abs_tau: m,
        plus: IntVerdict::of(p),
        minus: IntVerdict::of(m),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    Einstein,
    ShrinkingSoliton,
    KahlerShrinkingSoliton,
    SymplecticShrinkingSoliton,
}

impl FromStr for Structure {
    type Err = TopologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "einstein" => Structure::Einstein,
            "shrinking_soliton" => Structure::ShrinkingSoliton,
            "kahler_shrinking_soliton" => Structure::KahlerShrinkingSoliton,
            "symplectic_shrinking_soliton" => Structure::SymplecticShrinkingSoliton,
            other => return Err(TopologyError::UnknownStructure(other.into())),
        })
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Structure::Einstein => "einstein",
            Structure::ShrinkingSoliton => "shrinking_soliton",
            Structure::KahlerShrinkingSoliton => "kahler_shrinking_soliton",
            Structure::SymplecticShrinkingSoliton => "symplectic_shrinking_soliton",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleVerdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleOutcome {
    pub rule: &'static str,
    pub verdict: RuleVerdict,
    pub detail: String,
    pub citation: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    pub class: FourManifoldClass,
    pub structure: Structure,
    pub rules: Vec<RuleOutcome>,
    pub obstructed: bool,
    /// For Kähler shrinkers that pass every rule: which soliton the
    /// classification says it is.
    pub classification: Option<String>,
}

/// Index `k` such that `c` has the invariants of `CP2 # k·CP2bar`, or `None`.
fn blowup_index(c: &FourManifoldClass) -> Option<i64> {
    let k = c.chi - 3;
    (k >= 0 && c.tau == 1 - k && !c.spin && c.simply_connected && c.b1 == 0).then_some(k)
}

fn is_quadric(c: &FourManifoldClass) -> bool {
    c.chi == 4 && c.tau == 0 && c.spin && c.simply_connected && c.b1 == 0
}

fn outcome(rule: &'static str, ok: bool, detail: String, citation: &'static str) -> RuleOutcome {
    RuleOutcome {
        rule,
        verdict: if ok { RuleVerdict::Pass } else { RuleVerdict::Fail },
        detail,
        citation,
    }
}

/// Evaluates every rule that applies to `structure`.
pub fn obstruction_report(c: &FourManifoldClass, structure: Structure) -> ObstructionReport {
    let mut rules = Vec::new();
    let soliton = structure != Structure::Einstein;

    if structure == Structure::Einstein {
        let ht = ht_predicate(c);
        rules.push(outcome(
            "hitchin_thorpe",
            ht.satisfied(),
            format!(
                "2chi+3|tau| = {}, 2chi-3|tau| = {}",
                ht.two_chi_plus_three_abs_tau, ht.two_chi_minus_three_abs_tau
            ),
            "compact Einstein 4-manifolds satisfy 2chi >= 3|tau|",
        ));
    }

    if soliton {
        rules.push(outcome(
            "first_betti_zero",
            c.b1 == 0,
            format!("b1 = {}", c.b1),
            "compact shrinking solitons have finite fundamental group",
        ));
        rules.push(outcome(
            "spin_forces_zero_signature",
            !c.spin || c.tau == 0,
            format!("spin = {}, tau = {}", c.spin, c.tau),
            "positive scalar curvature on a spin 4-manifold forces tau = 0",
        ));
    }

    if matches!(
        structure,
        Structure::KahlerShrinkingSoliton | Structure::SymplecticShrinkingSoliton
    ) {
        let detail = match betti_split(c) {
            Ok(s) => (s.b_plus <= 1, format!("b+ = {}", s.b_plus)),
            Err(e) => (false, e.to_string()),
        };
        rules.push(outcome(
            "symplectic_b_plus_at_most_one",
            detail.0,
            detail.1,
            "symplectic manifolds with b+ > 1 carry no positive scalar curvature metric",
        ));
    }

    let mut classification = None;
    if structure == Structure::KahlerShrinkingSoliton {
        let strict = 2 * c.chi + 3 * c.tau;
        rules.push(outcome(
            "kahler_strict_inequality",
            strict > 0,
            format!("2chi+3tau = {strict}"),
            "24|W+|^2 = R^2 on Kahler surfaces makes 2chi+3tau > 0",
        ));
        let k = blowup_index(c);
        let del_pezzo = matches!(k, Some(0..=8)) || is_quadric(c);
        rules.push(outcome(
            "del_pezzo",
            del_pezzo,
            match k {
                Some(k) => format!("invariants of CP2 # {k} CP2bar"),
                None if is_quadric(c) => "invariants of S2xS2".to_string(),
                None => "not CP2 # k CP2bar or S2xS2".to_string(),
            },
            "del Pezzo surfaces are CP2 # k CP2bar (0 <= k <= 8) and S2xS2",
        ));
        if del_pezzo {
            classification = Some(match k {
                Some(1) => "Koiso-Cao soliton".to_string(),
                Some(2) => "Wang-Zhu soliton".to_string(),
                Some(k) => format!("Kahler-Einstein metric on CP2 # {k} CP2bar"),
                None => "Kahler-Einstein metric on S2xS2".to_string(),
            });
        }
    }

    let obstructed = rules.iter().any(|r| r.verdict == RuleVerdict::Fail);
    if obstructed {
        classification = None;
    }
    ObstructionReport {
        class: c.clone(),
        structure,
        rules,
        obstructed,
        classification,
    }
}

/// Same Euler characteristic, signature and spin type.
pub fn freedman_equivalent(
    a: &FourManifoldClass,
    b: &FourManifoldClass,
) -> Result<bool, TopologyError> {
    for c in [a, b] {
        if !c.simply_connected {
            return Err(TopologyError::NotSimplyConnected(c.label.clone()));
        }
    }
    Ok(a.chi == b.chi && a.tau == b.tau && a.spin == b.spin)
}
