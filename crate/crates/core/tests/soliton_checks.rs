use approx::assert_relative_eq;
use nalgebra::Matrix4;

use solkit::error::GeometryError;
use solkit::quadrature::QuadratureSpec;
use solkit::soliton::Verdict;
use solkit::zoo::{self, ZooParams};
use solkit::{PotentialField, SolitonCandidate};

fn candidate(name: &str, params: ZooParams) -> SolitonCandidate {
    zoo::build(name, &params).unwrap().candidate.unwrap()
}

#[test]
fn gaussian_shrinker_is_exact() {
    let c = candidate(zoo::GAUSSIAN_SHRINKER, ZooParams::new());
    assert!(c.is_shrinking() && c.is_normalized());
    let pts = c.atlas.random_points(100, 4);
    assert!(c.max_residual(&pts).unwrap() < 1e-12);
    let ids = c.identity_suite(&pts).unwrap();
    assert!(ids.trace < 1e-12 && ids.gradient < 1e-12 && ids.conserved_spread < 1e-12);
}

#[test]
fn perturbed_gaussian_has_residual() {
    let base = zoo::build(zoo::GAUSSIAN_SHRINKER, &ZooParams::new()).unwrap();
    let f = PotentialField::new(
        |x| x.iter().map(|v| v * v).sum::<f64>() / 4.0 + 0.1 * x[0] * x[0],
        |x| {
            let mut g = x.map(|v| v / 2.0);
            g[0] += 0.2 * x[0];
            g
        },
        |_| {
            let mut h = Matrix4::identity() * 0.5;
            h[(0, 0)] += 0.2;
            h
        },
    );
    let c = SolitonCandidate::new(base.atlas, f, 0.5);
    let pts = c.atlas.random_points(10, 4);
    assert_relative_eq!(c.max_residual(&pts).unwrap(), 0.2, epsilon = 1e-12);
}

#[test]
fn einstein_candidates_have_zero_residual() {
    for name in [zoo::ROUND_S4, zoo::FUBINI_STUDY_CP2, zoo::PRODUCT_S2XS2] {
        let c = candidate(name, ZooParams::new());
        let pts = c.atlas.random_points(100, 8);
        assert!(c.max_residual(&pts).unwrap() < 1e-9, "{name}");
        let ids = c.identity_suite(&pts).unwrap();
        assert!(ids.trace < 1e-9 && ids.conserved_spread < 1e-9, "{name} {ids:?}");
        assert!(ids.gradient < 1e-7, "{name} {ids:?}");
    }
}

#[test]
fn wrong_candidate_is_flagged() {
    let atlas = zoo::build(
        zoo::PRODUCT_S2XS2,
        &ZooParams::new().with("a", 2f64.sqrt()).with("b", 1.0),
    )
    .unwrap()
    .atlas;
    let c = SolitonCandidate::new(atlas, PotentialField::constant(0.0), 0.5);
    let pts = c.atlas.random_points(100, 8);
    let ids = c.identity_suite(&pts).unwrap();
    assert_relative_eq!(ids.trace, 1.0, epsilon = 1e-9);
    // Rc − ½g = diag(0, 0, ½, ½) in an orthonormal frame
    assert_relative_eq!(c.max_residual(&pts).unwrap(), 0.5f64.sqrt(), epsilon = 1e-9);
}

#[test]
fn unequal_product_has_no_soliton_data() {
    let b = zoo::build(zoo::PRODUCT_S2XS2, &ZooParams::new().with("a", 1.0).with("b", 2.0)).unwrap();
    assert!(b.candidate.is_none());
}

#[test]
fn normalization() {
    let unit = candidate(zoo::ROUND_S4, ZooParams::new().with("r", 1.0));
    assert_relative_eq!(unit.rho, 3.0);
    let n = unit.normalize().unwrap();
    assert!(n.is_normalized());
    let reference = zoo::build(zoo::ROUND_S4, &ZooParams::new().with("r", 6f64.sqrt())).unwrap();
    for (ci, p) in n.atlas.random_points(10, 1) {
        let a = n.atlas.chart(ci).unwrap().metric(&p);
        let b = reference.atlas.chart(ci).unwrap().metric(&p);
        assert!((a - b).amax() < 1e-12);
    }

    // the residual tensor is scale invariant, its norm scales by 1/λ
    let cp2 = candidate(zoo::FUBINI_STUDY_CP2, ZooParams::new().with("rho", 2.0));
    let perturbed = SolitonCandidate::new(cp2.atlas.clone(), PotentialField::constant(0.0), 1.5);
    let scaled = perturbed.normalize().unwrap();
    let (ci, p) = cp2.atlas.random_points(1, 5)[0];
    let before = perturbed.residual(ci, &p).unwrap();
    let after = scaled.residual(ci, &p).unwrap();
    assert!((before.tensor - after.tensor).amax() < 1e-9);
    assert_relative_eq!(after.norm, before.norm / 3.0, max_relative = 1e-9);

    let gaussian = candidate(zoo::GAUSSIAN_SHRINKER, ZooParams::new());
    let same = gaussian.normalize().unwrap();
    assert_eq!(same.rho, gaussian.rho);

    let expanding = SolitonCandidate::new(gaussian.atlas.clone(), PotentialField::constant(0.0), -1.0);
    assert!(matches!(expanding.normalize(), Err(GeometryError::NotShrinking(_))));
}

#[test]
fn sufficient_report_preconditions() {
    let spec = QuadratureSpec { nodes: 8, refinement: 1, tolerance: 1e-6 };
    let gaussian = candidate(zoo::GAUSSIAN_SHRINKER, ZooParams::new());
    assert!(matches!(gaussian.sufficient_report(&spec), Err(GeometryError::NonCompact(_))));
    let unit = candidate(zoo::ROUND_S4, ZooParams::new().with("r", 1.0));
    assert!(matches!(
        unit.sufficient_report(&spec),
        Err(GeometryError::NormalizationRequired(_))
    ));
}

#[test]
fn einstein_sufficient_chain() {
    let spec = QuadratureSpec { nodes: 16, refinement: 1, tolerance: 1e-6 };
    for name in [zoo::ROUND_S4, zoo::FUBINI_STUDY_CP2] {
        let r = candidate(name, ZooParams::new()).sufficient_report(&spec).unwrap();
        let vol = r.invariants.volume.value;
        assert_eq!(r.thm44.verdict, Verdict::Pass);
        assert_relative_eq!(r.thm44.margin, 2.0 * vol, max_relative = 1e-6);
        assert_eq!(r.thm46.verdict, Verdict::Pass);
        assert_eq!((r.f_min, r.f_max), (0.0, 0.0));
        assert_eq!(r.class_a.verdict, Verdict::Pass);
        assert_relative_eq!(r.class_a.sigma2_integral.value, vol / 6.0, max_relative = 1e-6);
        assert_eq!(r.lemma49.verdict, Verdict::Boundary);
        assert!(r.implication_ok && r.class_a_matches_thm44 && r.equality_consistent);
        assert_relative_eq!(r.min_ricci_eigenvalue.unwrap(), 0.5, epsilon = 1e-3);
        assert!(r.ht_verdict.closing_consistent);
    }
}
