//! `solkit`: batch front end over the zoo, the invariant integrals, the
//! soliton checks and the topology rules. Every command prints one JSON
//! document on stdout.
//!
//! Exit codes: 0 pass or allowed, 2 failed check or obstructed, 1 usage or
//! evaluation error.

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use solkit::invariants::{invariant_report, InvariantReport};
use solkit::quadrature::QuadratureSpec;
use solkit::soliton::{
    IdentityDeviations, SufficientReport, Verdict, IDENTITY_TOLERANCE, RESIDUAL_TOLERANCE,
};
use solkit::topology::{
    betti_split, freedman_equivalent, ht_predicate, obstruction_report, parse_sum, BettiSplit,
    FourManifoldClass, HtPredicate, Structure,
};
use solkit::zoo::{self, ReferenceRecord, ZooParams};
use solkit::{PotentialField, SolitonCandidate};

#[derive(Parser)]
#[command(name = "solkit", version, about = "Four-dimensional shrinking soliton checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Zoo catalog
    Zoo {
        #[command(subcommand)]
        action: ZooAction,
    },
    /// Euler characteristic, signature and curvature integrals of a zoo metric
    Invariants {
        #[command(flatten)]
        metric: MetricArgs,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Soliton residual, identity suite and integral sufficient conditions
    SolitonCheck {
        #[command(flatten)]
        metric: MetricArgs,
        /// Soliton constant; defaults to the zoo value
        #[arg(long, allow_negative_numbers = true)]
        rho: Option<f64>,
        /// Random sample points for the pointwise checks
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Hitchin–Thorpe values of a connected sum
    Ht {
        /// e.g. "CP2 + 3*CP2bar"
        #[arg(long)]
        sum: String,
        #[arg(long)]
        json: bool,
    },
    /// Obstruction rules for a structure on a connected sum
    Obstruct {
        #[arg(long)]
        sum: String,
        /// einstein | shrinking_soliton | kahler_shrinking_soliton | symplectic_shrinking_soliton
        #[arg(long)]
        structure: Structure,
        #[arg(long)]
        json: bool,
    },
    /// Homeomorphism test for simply connected sums
    Freedman {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum ZooAction {
    List {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct MetricArgs {
    #[arg(long)]
    metric: String,
    /// Metric parameter `name=value`, repeatable
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
}

impl MetricArgs {
    fn zoo_params(&self) -> ZooParams {
        ZooParams(self.params.iter().cloned().collect())
    }
}

#[derive(Args)]
struct QuadArgs {
    /// Gauss–Legendre nodes per axis
    #[arg(long, default_value_t = 24)]
    nodes: usize,
    /// Error estimates rerun at nodes × refinement; 1 disables them
    #[arg(long, default_value_t = 2)]
    refinement: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Pretty-print the JSON report
    #[arg(long)]
    json: bool,
}

impl QuadArgs {
    fn spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            nodes: self.nodes,
            refinement: self.refinement,
            tolerance: self.tol,
        }
    }
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.trim().to_string(), v))
}

struct Outcome {
    text: String,
    pass: bool,
}

fn outcome<T: Serialize>(doc: &T, pass: bool, pretty: bool) -> Result<Outcome, String> {
    let text = if pretty {
        serde_json::to_string_pretty(doc)
    } else {
        serde_json::to_string(doc)
    };
    Ok(Outcome {
        text: text.map_err(|e| e.to_string())?,
        pass,
    })
}

#[derive(Serialize)]
struct InvariantsDoc {
    command: &'static str,
    metric: String,
    params: BTreeMap<String, f64>,
    spec: QuadratureSpec,
    reference: Option<ReferenceRecord>,
    report: InvariantReport,
    matches_reference: Option<bool>,
    verdict: Verdict,
}

fn invariants(metric: &MetricArgs, quad: &QuadArgs) -> Result<Outcome, String> {
    let params = metric.zoo_params();
    let built = zoo::build(&metric.metric, &params).map_err(|e| e.to_string())?;
    let spec = quad.spec();
    let report = invariant_report(&built.atlas, &spec).map_err(|e| e.to_string())?;
    let reference = zoo::reference(&metric.metric, &params).ok();
    let near = report.chi.near_integer && report.tau.near_integer;
    let matches_reference = reference.as_ref().and_then(|r| {
        Some(r.chi? == report.chi.nearest && r.tau? == report.tau.nearest)
    });
    let pass = near && matches_reference.unwrap_or(true);
    let doc = InvariantsDoc {
        command: "invariants",
        metric: metric.metric.clone(),
        params: params.0,
        spec,
        reference,
        report,
        matches_reference,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
    };
    outcome(&doc, pass, quad.json)
}

#[derive(Serialize)]
struct ResidualDoc {
    max_norm: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct IdentityDoc {
    #[serde(flatten)]
    deviations: IdentityDeviations,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct SolitonDoc {
    command: &'static str,
    metric: String,
    params: BTreeMap<String, f64>,
    rho: f64,
    potential: &'static str,
    samples: usize,
    seed: u64,
    residual: ResidualDoc,
    identities: IdentityDoc,
    compact: bool,
    sufficient: Option<SufficientReport>,
    note: Option<String>,
    verdict: Verdict,
}

fn soliton_check(
    metric: &MetricArgs,
    rho: Option<f64>,
    samples: usize,
    seed: u64,
    quad: &QuadArgs,
) -> Result<Outcome, String> {
    let params = metric.zoo_params();
    let built = zoo::build(&metric.metric, &params).map_err(|e| e.to_string())?;
    let (candidate, potential) = match built.candidate {
        Some(c) => {
            let rho = rho.unwrap_or(c.rho);
            let f = c.potential(0).map_err(|e| e.to_string())?.clone();
            let kind = if metric.metric == zoo::GAUSSIAN_SHRINKER {
                "|x|^2/4"
            } else {
                "0"
            };
            (SolitonCandidate::new(c.atlas, f, rho), kind)
        }
        None => {
            let rho = rho.ok_or("this metric has no soliton data; pass --rho")?;
            (SolitonCandidate::new(built.atlas, PotentialField::constant(0.0), rho), "0")
        }
    };
    let points = candidate.atlas.random_points(samples, seed);
    let max_norm = candidate.max_residual(&points).map_err(|e| e.to_string())?;
    let deviations = candidate.identity_suite(&points).map_err(|e| e.to_string())?;
    let residual = ResidualDoc {
        max_norm,
        tolerance: RESIDUAL_TOLERANCE,
        pass: max_norm < RESIDUAL_TOLERANCE,
    };
    let identities = IdentityDoc {
        deviations,
        tolerance: IDENTITY_TOLERANCE,
        pass: deviations.passes(),
    };
    let pointwise = residual.pass && identities.pass;
    let compact = candidate.atlas.compact;
    let (sufficient, note) = if !compact {
        (None, Some("non-compact: integral conditions not evaluated".to_string()))
    } else if !pointwise {
        (None, Some("not a soliton: integral conditions not evaluated".to_string()))
    } else {
        let normalized = candidate.normalize().map_err(|e| e.to_string())?;
        let report = normalized.sufficient_report(&quad.spec()).map_err(|e| e.to_string())?;
        let note = (candidate.rho != normalized.rho)
            .then(|| format!("integrals evaluated after rescaling by {}", 2.0 * candidate.rho));
        (Some(report), note)
    };
    let integral_pass = sufficient.as_ref().map_or(true, |r| {
        r.ht_verdict.plus.holds() && r.ht_verdict.minus.holds() && r.implication_ok
    });
    let pass = pointwise && integral_pass;
    let doc = SolitonDoc {
        command: "soliton-check",
        metric: metric.metric.clone(),
        params: params.0,
        rho: candidate.rho,
        potential,
        samples,
        seed,
        residual,
        identities,
        compact,
        sufficient,
        note,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
    };
    outcome(&doc, pass, quad.json)
}

#[derive(Serialize)]
struct HtDoc {
    command: &'static str,
    class: FourManifoldClass,
    betti: Option<BettiSplit>,
    ht: HtPredicate,
    satisfied: bool,
}

fn class(sum: &str) -> Result<FourManifoldClass, String> {
    parse_sum(sum).map_err(|e| e.to_string())
}

fn ht(sum: &str, json: bool) -> Result<Outcome, String> {
    let c = class(sum)?;
    let ht = ht_predicate(&c);
    let doc = HtDoc {
        command: "ht",
        betti: betti_split(&c).ok(),
        satisfied: ht.satisfied(),
        class: c,
        ht,
    };
    outcome(&doc, doc.satisfied, json)
}

fn obstruct(sum: &str, structure: Structure, json: bool) -> Result<Outcome, String> {
    let report = obstruction_report(&class(sum)?, structure);
    outcome(&report, !report.obstructed, json)
}

#[derive(Serialize)]
struct FreedmanDoc {
    command: &'static str,
    left: FourManifoldClass,
    right: FourManifoldClass,
    equivalent: bool,
}

fn freedman(left: &str, right: &str, json: bool) -> Result<Outcome, String> {
    let (a, b) = (class(left)?, class(right)?);
    let equivalent = freedman_equivalent(&a, &b).map_err(|e| e.to_string())?;
    let doc = FreedmanDoc {
        command: "freedman",
        left: a,
        right: b,
        equivalent,
    };
    outcome(&doc, equivalent, json)
}

fn run(cli: Cli) -> Result<Outcome, String> {
    match cli.command {
        Command::Zoo {
            action: ZooAction::List { json },
        } => outcome(&zoo::catalog(), true, json),
        Command::Invariants { metric, quad } => invariants(&metric, &quad),
        Command::SolitonCheck {
            metric,
            rho,
            samples,
            seed,
            quad,
        } => soliton_check(&metric, rho, samples, seed, &quad),
        Command::Ht { sum, json } => ht(&sum, json),
        Command::Obstruct {
            sum,
            structure,
            json,
        } => obstruct(&sum, structure, json),
        Command::Freedman { left, right, json } => freedman(&left, &right, json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            println!("{}", out.text);
            ExitCode::from(if out.pass { 0 } else { 2 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
