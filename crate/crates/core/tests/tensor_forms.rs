use approx::assert_relative_eq;
use nalgebra::{Matrix4, Matrix6};
use proptest::prelude::*;

use solkit::chart::{ChartAtlas, ChartPoint, DerivativePath, Tensor4};
use solkit::error::GeometryError;
use solkit::forms::{
    curvature_operator, hodge_star, numeric_rank, sd_projectors, weyl_sd_norms, TwoForm, PAIRS,
};
use solkit::invariants::point_invariants;
use solkit::tensor::{curvature_bundle, hessian_laplacian, inner_norm, levi_civita, Covariant};
use solkit::zoo::{self, ZooParams};
use solkit::PotentialField;

const ZOO: [&str; 4] = [zoo::ROUND_S4, zoo::FUBINI_STUDY_CP2, zoo::PRODUCT_S2XS2, zoo::FLAT_T4];

fn atlas(name: &str) -> ChartAtlas {
    zoo::build(name, &ZooParams::new()).unwrap().atlas
}

fn max_abs(t: &Tensor4) -> f64 {
    t.iter().flatten().flatten().flatten().fold(0.0_f64, |m, v| m.max(v.abs()))
}

#[test]
fn riemann_symmetries_on_zoo_metrics() {
    for name in ZOO {
        let a = atlas(name);
        for (ci, p) in a.random_points(20, 5) {
            let b = curvature_bundle(a.chart(ci).unwrap(), &p).unwrap();
            let scale = max_abs(&b.rm).max(1.0);
            for i in 0..4 {
                for j in 0..4 {
                    for k in 0..4 {
                        for l in 0..4 {
                            let r = b.rm[i][j][k][l];
                            assert!((r + b.rm[j][i][k][l]).abs() <= 1e-12 * scale);
                            assert!((r + b.rm[i][j][l][k]).abs() <= 1e-12 * scale);
                            assert!((r - b.rm[k][l][i][j]).abs() <= 1e-12 * scale);
                            let bianchi = r + b.rm[i][k][l][j] + b.rm[i][l][j][k];
                            assert!(bianchi.abs() <= 1e-10 * scale, "{name} bianchi {bianchi}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn weyl_is_trace_free() {
    for name in ZOO {
        let a = atlas(name);
        for (ci, p) in a.random_points(10, 9) {
            let b = curvature_bundle(a.chart(ci).unwrap(), &p).unwrap();
            let scale = max_abs(&b.rm).max(1.0);
            for j in 0..4 {
                for l in 0..4 {
                    let mut tr = 0.0;
                    for i in 0..4 {
                        for k in 0..4 {
                            tr += b.inverse[(i, k)] * b.weyl[i][j][k][l];
                        }
                    }
                    assert!(tr.abs() <= 1e-9 * scale, "{name}: trace {tr}");
                }
            }
            let tr_rc0: f64 = (0..4)
                .flat_map(|i| (0..4).map(move |j| (i, j)))
                .map(|(i, j)| b.inverse[(i, j)] * b.rc0[(i, j)])
                .sum();
            assert!(tr_rc0.abs() <= 1e-9 * scale);
        }
    }
}

#[test]
fn normalized_einstein_metrics() {
    for name in [zoo::ROUND_S4, zoo::FUBINI_STUDY_CP2, zoo::PRODUCT_S2XS2] {
        let a = atlas(name);
        for (ci, p) in a.random_points(25, 1) {
            let b = curvature_bundle(a.chart(ci).unwrap(), &p).unwrap();
            let scale = b.metric.amax();
            assert!((b.rc - b.metric * 0.5).amax() <= 1e-9 * scale, "{name}");
            assert_relative_eq!(b.scalar, 2.0, epsilon = 1e-9);
            let rc2 = inner_norm(&b.inverse, Covariant::Two(&b.rc), Covariant::Two(&b.rc)).unwrap();
            assert_relative_eq!(rc2, 1.0, epsilon = 1e-9);
        }
    }
    let s4 = atlas(zoo::ROUND_S4);
    let (ci, p) = s4.random_points(1, 3)[0];
    let b = curvature_bundle(s4.chart(ci).unwrap(), &p).unwrap();
    let w2 = inner_norm(&b.inverse, Covariant::Four(&b.weyl), Covariant::Four(&b.weyl)).unwrap();
    assert!(w2 < 1e-18);
    let s2 = atlas(zoo::PRODUCT_S2XS2);
    let (ci, p) = s2.random_points(1, 3)[0];
    let b = curvature_bundle(s2.chart(ci).unwrap(), &p).unwrap();
    let w2 = inner_norm(&b.inverse, Covariant::Four(&b.weyl), Covariant::Four(&b.weyl)).unwrap();
    assert_relative_eq!(w2, 4.0 / 3.0, epsilon = 1e-12);
}

#[test]
fn flat_torus_is_flat() {
    let a = atlas(zoo::FLAT_T4);
    let p = ChartPoint([1.0, 2.0, 3.0, 4.0]);
    let gamma = levi_civita(a.chart(0).unwrap(), &p).unwrap();
    assert_eq!(gamma.0, [[[0.0; 4]; 4]; 4]);
    let b = curvature_bundle(a.chart(0).unwrap(), &p).unwrap();
    assert_eq!(max_abs(&b.rm), 0.0);
    assert_eq!(max_abs(&b.weyl), 0.0);
    assert_eq!(b.scalar, 0.0);
    let op = curvature_operator(&b, &b.metric, 1).unwrap();
    assert_eq!(op.matrix, Matrix6::zeros());
}

#[test]
fn analytic_and_finite_difference_christoffels_agree() {
    for name in ZOO {
        let a = atlas(name);
        let fd = a.with_derivative_path(DerivativePath::FiniteDifference);
        for (ci, p) in a.random_points(20, 17) {
            let exact = levi_civita(a.chart(ci).unwrap(), &p).unwrap();
            let approx = levi_civita(fd.chart(ci).unwrap(), &p).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    for k in 0..4 {
                        let (e, f) = (exact.get(i, j, k), approx.get(i, j, k));
                        assert!((e - f).abs() <= 1e-8 * e.abs().max(1.0), "{name} {e} {f}");
                    }
                }
            }
        }
    }
}

#[test]
fn zoo_metrics_are_positive_definite_and_jets_consistent() {
    for name in ZOO {
        let a = atlas(name);
        for (ci, p) in a.random_points(50, 23) {
            let g = a.chart(ci).unwrap().metric(&p);
            assert_eq!(g, g.transpose());
            assert!(g.symmetric_eigenvalues().min() > 0.0, "{name} at {p:?}");
        }
    }
}

#[test]
fn scale_laws() {
    let a = atlas(zoo::FUBINI_STUDY_CP2);
    let lambda = 3.7;
    let scaled = a.scaled(lambda);
    for (ci, p) in a.random_points(10, 2) {
        let b = curvature_bundle(a.chart(ci).unwrap(), &p).unwrap();
        let s = curvature_bundle(scaled.chart(ci).unwrap(), &p).unwrap();
        assert_relative_eq!(s.scalar, b.scalar / lambda, max_relative = 1e-12);
        assert!((s.rc - b.rc).amax() <= 1e-10 * b.rc.amax());
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    assert!((s.gamma.get(i, j, k) - b.gamma.get(i, j, k)).abs() <= 1e-12);
                }
            }
        }
        let pi = point_invariants(&a, ci, &p).unwrap();
        let si = point_invariants(&scaled, ci, &p).unwrap();
        let l2 = lambda * lambda;
        assert_relative_eq!(si.weyl_plus2, pi.weyl_plus2 / l2, max_relative = 1e-10);
        assert_relative_eq!(si.ricci_norm2, pi.ricci_norm2 / l2, max_relative = 1e-10);
    }
}

#[test]
fn domain_and_degeneracy_errors() {
    let a = atlas(zoo::ROUND_S4);
    let chart = a.chart(0).unwrap();
    let outside = ChartPoint([4.0, 1.0, 1.0, 1.0]);
    assert!(matches!(levi_civita(chart, &outside), Err(GeometryError::OutsideChart { .. })));
    assert!(matches!(curvature_bundle(chart, &outside), Err(GeometryError::OutsideChart { .. })));
    let on_face = ChartPoint([0.0, 1.0, 1.0, 1.0]);
    assert!(curvature_bundle(chart, &on_face).is_err());
    let f = PotentialField::constant(1.0);
    assert!(hessian_laplacian(chart, &f, &outside).is_err());
}

#[test]
fn quadratic_potential_on_flat_chart() {
    let a = atlas(zoo::GAUSSIAN_SHRINKER);
    let f = PotentialField::new(
        |x| x.iter().map(|v| v * v).sum::<f64>() / 4.0,
        |x| x.map(|v| v / 2.0),
        |_| Matrix4::identity() * 0.5,
    );
    let d = hessian_laplacian(a.chart(0).unwrap(), &f, &ChartPoint([0.3, -0.2, 0.1, 0.5])).unwrap();
    assert_eq!(d.hessian, Matrix4::identity() * 0.5);
    assert_eq!(d.laplacian, 2.0);
    assert!(f.finite_difference_deviation(&[0.3, -0.2, 0.1, 0.5], 1e-4) < 1e-8);
}

#[test]
fn flat_star_maps_pairs_to_complements() {
    let star = hodge_star(&Matrix4::identity(), 1).unwrap();
    let e01 = TwoForm([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    assert_eq!(star.apply(&e01).0, [0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    let pr = sd_projectors(&star).unwrap();
    let v = pr.plus * e01.as_vector();
    assert_relative_eq!(v[0], 0.5);
    assert_relative_eq!(v[3], 0.5);
    let flipped = hodge_star(&Matrix4::identity(), -1).unwrap();
    assert_eq!(flipped.matrix, -star.matrix);
    let fpr = sd_projectors(&flipped).unwrap();
    assert_eq!(fpr.plus, pr.minus);
    assert_eq!(PAIRS[3], (2, 3));
}

#[test]
fn degenerate_metric_has_no_star() {
    let mut g = Matrix4::identity();
    g[(3, 3)] = 0.0;
    assert!(hodge_star(&g, 1).is_err());
    g[(3, 3)] = -1.0;
    assert!(hodge_star(&g, 1).is_err());
}

#[test]
fn projector_ranks_on_zoo_metrics() {
    for name in ZOO {
        let a = atlas(name);
        for (ci, p) in a.random_points(20, 31) {
            let chart = a.chart(ci).unwrap();
            let star = hodge_star(&chart.metric(&p), chart.orientation()).unwrap();
            let pr = sd_projectors(&star).unwrap();
            assert_eq!(numeric_rank(&pr.plus, 1e-9), 3, "{name}");
            assert_eq!(numeric_rank(&pr.minus, 1e-9), 3, "{name}");
        }
    }
}

#[test]
fn curvature_operator_blocks() {
    for name in [zoo::ROUND_S4, zoo::FUBINI_STUDY_CP2, zoo::PRODUCT_S2XS2] {
        let a = atlas(name);
        for (ci, p) in a.random_points(20, 41) {
            let chart = a.chart(ci).unwrap();
            let b = curvature_bundle(chart, &p).unwrap();
            let op = curvature_operator(&b, &b.metric, chart.orientation()).unwrap();
            assert!(op.symmetry_defect() < 1e-10);
            assert!(op.off_diagonal_block().norm() < 1e-9, "{name}");
            assert_relative_eq!(op.plus_block().trace(), b.scalar / 4.0, epsilon = 1e-9);
            assert_relative_eq!(op.minus_block().trace(), b.scalar / 4.0, epsilon = 1e-9);
            let (wp, wm) = weyl_sd_norms(&op);
            match name {
                zoo::ROUND_S4 => {
                    assert!((op.matrix - Matrix6::identity() / 6.0).amax() < 1e-9);
                    assert!(wp < 1e-18 && wm < 1e-18);
                }
                zoo::FUBINI_STUDY_CP2 => {
                    assert_relative_eq!(24.0 * wp, b.scalar * b.scalar, epsilon = 1e-8);
                    assert!(wm < 1e-16);
                }
                _ => assert_relative_eq!(wp, wm, epsilon = 1e-12),
            }
        }
    }
}

#[test]
fn curvature_operator_rejects_foreign_metric() {
    let a = atlas(zoo::ROUND_S4);
    let (ci, p) = a.random_points(1, 0)[0];
    let b = curvature_bundle(a.chart(ci).unwrap(), &p).unwrap();
    let other = b.metric * 2.0;
    assert!(matches!(
        curvature_operator(&b, &other, 1),
        Err(GeometryError::Inconsistent(_))
    ));
}

#[test]
fn inner_norm_examples() {
    let g = Matrix4::identity() * 2.0;
    let gi = g.try_inverse().unwrap();
    assert_relative_eq!(inner_norm(&gi, Covariant::Two(&g), Covariant::Two(&g)).unwrap(), 4.0);
    let half = g * 0.5;
    assert_relative_eq!(inner_norm(&gi, Covariant::Two(&half), Covariant::Two(&half)).unwrap(), 1.0);
    assert!(matches!(
        inner_norm(&gi, Covariant::Two(&g), Covariant::Scalar(1.0)),
        Err(GeometryError::Shape { .. })
    ));
}

fn pd_matrix() -> impl Strategy<Value = Matrix4<f64>> {
    (prop::array::uniform16(-1.0f64..1.0), 0.05f64..2.0).prop_map(|(a, shift)| {
        let m = Matrix4::from_row_slice(&a);
        m * m.transpose() + Matrix4::identity() * shift
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn star_is_an_involution(g in pd_matrix(), positive in any::<bool>()) {
        let star = hodge_star(&g, if positive { 1 } else { -1 }).unwrap();
        prop_assert!(star.involution_defect() < 1e-12 * star.matrix.amax().powi(2).max(1.0));
    }

    #[test]
    fn star_is_self_adjoint(g in pd_matrix()) {
        let star = hodge_star(&g, 1).unwrap();
        let m = star.gram * star.matrix;
        prop_assert!((m - m.transpose()).amax() <= 1e-11 * m.amax().max(1.0));
    }

    #[test]
    fn projectors_are_complementary(g in pd_matrix()) {
        let pr = sd_projectors(&hodge_star(&g, 1).unwrap()).unwrap();
        let scale = pr.plus.amax().max(1.0).powi(2);
        prop_assert!((pr.plus * pr.minus).amax() < 1e-12 * scale);
        prop_assert!((pr.plus * pr.plus - pr.plus).amax() < 1e-12 * scale);
        prop_assert!((pr.plus + pr.minus - Matrix6::identity()).amax() < 1e-12);
    }

    #[test]
    fn two_form_round_trip(v in prop::array::uniform6(-10.0f64..10.0)) {
        let w = TwoForm(v);
        let m = w.to_antisymmetric();
        prop_assert_eq!(m, -m.transpose());
        prop_assert_eq!(TwoForm::from_antisymmetric(&m), w);
    }
}
