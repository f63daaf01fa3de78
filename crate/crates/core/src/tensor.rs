//! Pointwise curvature of a chart metric.
//!
//! Conventions: `Rm[a][b][c][d]` is fully covariant with
//! `Rm_abab = K(e_a, e_b)` for an orthonormal pair, `Rc_bd = g^ac Rm_abcd`,
//! so the round sphere has positive scalar curvature. The Weyl part is
//! `W = Rm - ½ R̊c ⊙ g - (R/24) g ⊙ g` with `⊙` the Kulkarni–Nomizu product.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Cholesky, Matrix4};

use crate::chart::{ChartPoint, MetricChart, MetricJet, Tensor3, Tensor4, DIM, ZERO3, ZERO4};
use crate::error::{GeometryError, Result};

/// `Γ^a_bc` stored as `[a][b][c]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Christoffel(pub Tensor3);

impl Christoffel {
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.0[a][b][c]
    }
}

/// All curvature quantities at one chart point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureBundle {
    pub metric: Matrix4<f64>,
    pub inverse: Matrix4<f64>,
    pub gamma: Christoffel,
    pub rm: Tensor4,
    pub rc: Matrix4<f64>,
    pub scalar: f64,
    pub rc0: Matrix4<f64>,
    pub weyl: Tensor4,
}

/// Metric data every curvature routine starts from.
pub(crate) struct Connection {
    pub g: Matrix4<f64>,
    pub ginv: Matrix4<f64>,
    /// `Γ_ebc = ½(∂_b g_ec + ∂_c g_eb − ∂_e g_bc)`
    pub lowered: Tensor3,
    pub gamma: Tensor3,
}

impl Connection {
    pub fn from_jet(jet: &MetricJet, point: &ChartPoint) -> Result<Self> {
        let g = jet.g;
        let chol = Cholesky::new(g).ok_or(GeometryError::DegenerateMetric { point: point.0 })?;
        let diag_min = (0..DIM).map(|i| chol.l()[(i, i)]).fold(f64::INFINITY, f64::min);
        let scale = g.diagonal().amax().max(f64::MIN_POSITIVE);
        if !(diag_min * diag_min > f64::EPSILON * f64::EPSILON * scale) {
            return Err(GeometryError::DegenerateMetric { point: point.0 });
        }
        let ginv = chol.inverse();
        let dg = &jet.dg;
        let mut lowered = ZERO3;
        for e in 0..DIM {
            for b in 0..DIM {
                for c in b..DIM {
                    let v = 0.5 * (dg[b][e][c] + dg[c][e][b] - dg[e][b][c]);
                    lowered[e][b][c] = v;
                    lowered[e][c][b] = v;
                }
            }
        }
        let mut gamma = ZERO3;
        for a in 0..DIM {
            for b in 0..DIM {
                for c in b..DIM {
                    let mut s = 0.0;
                    for e in 0..DIM {
                        s += ginv[(a, e)] * lowered[e][b][c];
                    }
                    gamma[a][b][c] = s;
                    gamma[a][c][b] = s;
                }
            }
        }
        Ok(Self {
            g,
            ginv,
            lowered,
            gamma,
        })
    }

    /// Fully covariant Riemann tensor from second metric derivatives and
    /// the connection.
    pub fn riemann(&self, d2g: &Tensor4) -> Tensor4 {
        let mut rm = ZERO4;
        // Only a < b, c < d with (a,b) <= (c,d) are computed; the rest follow
        // from the pair symmetries.
        for a in 0..DIM {
            for b in (a + 1)..DIM {
                for c in 0..DIM {
                    for d in (c + 1)..DIM {
                        if (c, d) < (a, b) {
                            continue;
                        }
                        let second = 0.5
                            * (d2g[b][c][a][d] + d2g[a][d][b][c]
                                - d2g[a][c][b][d]
                                - d2g[b][d][a][c]);
                        // g_ef Γ^e_bc Γ^f_ad = Γ_fbc Γ^f_ad
                        let mut quad = 0.0;
                        for f in 0..DIM {
                            quad += self.lowered[f][b][c] * self.gamma[f][a][d]
                                - self.lowered[f][b][d] * self.gamma[f][a][c];
                        }
                        let v = second + quad;
                        rm[a][b][c][d] = v;
                        rm[b][a][c][d] = -v;
                        rm[a][b][d][c] = -v;
                        rm[b][a][d][c] = v;
                        rm[c][d][a][b] = v;
                        rm[d][c][a][b] = -v;
                        rm[c][d][b][a] = -v;
                        rm[d][c][b][a] = v;
                    }
                }
            }
        }
        rm
    }
}

pub(crate) fn ricci(rm: &Tensor4, ginv: &Matrix4<f64>) -> Matrix4<f64> {
    let mut rc = Matrix4::zeros();
    for b in 0..DIM {
        for d in b..DIM {
            let mut s = 0.0;
            for a in 0..DIM {
                for c in 0..DIM {
                    s += ginv[(a, c)] * rm[a][b][c][d];
                }
            }
            rc[(b, d)] = s;
            rc[(d, b)] = s;
        }
    }
    rc
}

pub(crate) fn trace(m: &Matrix4<f64>, ginv: &Matrix4<f64>) -> f64 {
    ginv.component_mul(m).sum()
}

/// `(h ⊙ k)_abcd = h_ac k_bd + h_bd k_ac − h_ad k_bc − h_bc k_ad`
pub fn kulkarni_nomizu(h: &Matrix4<f64>, k: &Matrix4<f64>) -> Tensor4 {
    let mut out = ZERO4;
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                for d in 0..DIM {
                    out[a][b][c][d] = h[(a, c)] * k[(b, d)] + h[(b, d)] * k[(a, c)]
                        - h[(a, d)] * k[(b, c)]
                        - h[(b, c)] * k[(a, d)];
                }
            }
        }
    }
    out
}

fn connection_at(chart: &MetricChart, p: &ChartPoint) -> Result<(MetricJet, Connection)> {
    let jet = chart.jet(p)?;
    let conn = Connection::from_jet(&jet, p)?;
    Ok((jet, conn))
}

/// Christoffel symbols of the second kind at `p`.
pub fn levi_civita(chart: &MetricChart, p: &ChartPoint) -> Result<Christoffel> {
    let (_, conn) = connection_at(chart, p)?;
    Ok(Christoffel(conn.gamma))
}

/// Riemann, Ricci, scalar, traceless Ricci and Weyl tensors at `p`.
pub fn curvature_bundle(chart: &MetricChart, p: &ChartPoint) -> Result<CurvatureBundle> {
    let (jet, conn) = connection_at(chart, p)?;
    Ok(bundle_from(&jet, &conn))
}

pub(crate) fn bundle_from(jet: &MetricJet, conn: &Connection) -> CurvatureBundle {
    let rm = conn.riemann(&jet.d2g);
    let rc = ricci(&rm, &conn.ginv);
    let scalar = trace(&rc, &conn.ginv);
    let g = conn.g;
    let rc0 = rc - g * (scalar / 4.0);
    let e_g = kulkarni_nomizu(&rc0, &g);
    let g_g = kulkarni_nomizu(&g, &g);
    let mut weyl = ZERO4;
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                for d in 0..DIM {
                    weyl[a][b][c][d] =
                        rm[a][b][c][d] - 0.5 * e_g[a][b][c][d] - scalar / 24.0 * g_g[a][b][c][d];
                }
            }
        }
    }
    CurvatureBundle {
        metric: g,
        inverse: conn.ginv,
        gamma: Christoffel(conn.gamma),
        rm,
        rc,
        scalar,
        rc0,
        weyl,
    }
}

type ScalarFn = dyn Fn(&[f64; DIM]) -> f64 + Send + Sync;
type GradientFn = dyn Fn(&[f64; DIM]) -> [f64; DIM] + Send + Sync;
type HessianFn = dyn Fn(&[f64; DIM]) -> Matrix4<f64> + Send + Sync;

/// A smooth function on a chart with its coordinate gradient and Hessian.
#[derive(Clone)]
pub struct PotentialField {
    value: Arc<ScalarFn>,
    gradient: Arc<GradientFn>,
    hessian: Arc<HessianFn>,
}

impl fmt::Debug for PotentialField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PotentialField")
    }
}

impl PotentialField {
    pub fn new<F, D, H>(value: F, gradient: D, hessian: H) -> Self
    where
        F: Fn(&[f64; DIM]) -> f64 + Send + Sync + 'static,
        D: Fn(&[f64; DIM]) -> [f64; DIM] + Send + Sync + 'static,
        H: Fn(&[f64; DIM]) -> Matrix4<f64> + Send + Sync + 'static,
    {
        Self {
            value: Arc::new(value),
            gradient: Arc::new(gradient),
            hessian: Arc::new(hessian),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c, |_| [0.0; DIM], |_| Matrix4::zeros())
    }

    pub fn value(&self, x: &[f64; DIM]) -> f64 {
        (self.value)(x)
    }

    pub fn gradient(&self, x: &[f64; DIM]) -> [f64; DIM] {
        (self.gradient)(x)
    }

    pub fn hessian(&self, x: &[f64; DIM]) -> Matrix4<f64> {
        (self.hessian)(x)
    }

    /// Largest deviation between the supplied derivatives and fourth-order
    /// central differences of the value with step `h`.
    pub fn finite_difference_deviation(&self, x: &[f64; DIM], h: f64) -> f64 {
        let steps = [h; DIM];
        let as_matrix = |y: &[f64; DIM]| Matrix4::from_element(self.value(y));
        let (_, d1, d2) = crate::chart::central_jet(&as_matrix, x, &steps);
        let grad = self.gradient(x);
        let hess = self.hessian(x);
        let mut worst: f64 = 0.0;
        for a in 0..DIM {
            worst = worst.max((d1[a][0][0] - grad[a]).abs());
            for b in 0..DIM {
                worst = worst.max((d2[a][b][0][0] - hess[(a, b)]).abs());
            }
        }
        worst
    }
}

/// Covariant gradient, Hessian and Laplacian of a potential at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialDerivatives {
    pub value: f64,
    pub gradient: [f64; DIM],
    pub hessian: Matrix4<f64>,
    pub laplacian: f64,
    /// `|∇f|²`
    pub gradient_norm2: f64,
}

pub(crate) fn potential_derivatives(
    conn: &Connection,
    f: &PotentialField,
    p: &ChartPoint,
) -> PotentialDerivatives {
    let value = f.value(&p.0);
    let gradient = f.gradient(&p.0);
    let mut hessian = f.hessian(&p.0);
    for a in 0..DIM {
        for b in 0..DIM {
            let mut s = 0.0;
            for c in 0..DIM {
                s += conn.gamma[c][a][b] * gradient[c];
            }
            hessian[(a, b)] -= s;
        }
    }
    let laplacian = trace(&hessian, &conn.ginv);
    let mut gradient_norm2 = 0.0;
    for a in 0..DIM {
        for b in 0..DIM {
            gradient_norm2 += conn.ginv[(a, b)] * gradient[a] * gradient[b];
        }
    }
    PotentialDerivatives {
        value,
        gradient,
        hessian,
        laplacian,
        gradient_norm2,
    }
}

/// `∇f`, `∇²f_ab = ∂_a∂_b f − Γ^c_ab ∂_c f`, and `Δf = g^ab ∇²f_ab` at `p`.
pub fn hessian_laplacian(
    chart: &MetricChart,
    f: &PotentialField,
    p: &ChartPoint,
) -> Result<PotentialDerivatives> {
    let (_, conn) = connection_at(chart, p)?;
    Ok(potential_derivatives(&conn, f, p))
}

/// A covariant tensor of valence 0..=4 for [`inner_norm`].
#[derive(Debug, Clone, Copy)]
pub enum Covariant<'a> {
    Scalar(f64),
    Vector(&'a [f64; DIM]),
    Two(&'a Matrix4<f64>),
    Three(&'a Tensor3),
    Four(&'a Tensor4),
}

impl Covariant<'_> {
    pub fn valence(&self) -> usize {
        match self {
            Covariant::Scalar(_) => 0,
            Covariant::Vector(_) => 1,
            Covariant::Two(_) => 2,
            Covariant::Three(_) => 3,
            Covariant::Four(_) => 4,
        }
    }

    fn flatten(&self) -> Vec<f64> {
        match self {
            Covariant::Scalar(v) => vec![*v],
            Covariant::Vector(v) => v.to_vec(),
            Covariant::Two(m) => {
                let mut out = Vec::with_capacity(16);
                for a in 0..DIM {
                    for b in 0..DIM {
                        out.push(m[(a, b)]);
                    }
                }
                out
            }
            Covariant::Three(t) => t.iter().flatten().flatten().copied().collect(),
            Covariant::Four(t) => t.iter().flatten().flatten().flatten().copied().collect(),
        }
    }
}

/// Full metric contraction `T_{a..} S_{b..} g^{ab}...` of two tensors of the
/// same valence.
pub fn inner_norm(ginv: &Matrix4<f64>, t: Covariant<'_>, s: Covariant<'_>) -> Result<f64> {
    let k = t.valence();
    if k != s.valence() {
        return Err(GeometryError::Shape {
            left: k,
            right: s.valence(),
        });
    }
    let tv = t.flatten();
    let mut sv = s.flatten();
    // raise each slot of S in turn; slot `axis` has stride 4^(k-1-axis)
    for axis in 0..k {
        let stride = DIM.pow((k - 1 - axis) as u32);
        let mut raised = vec![0.0; sv.len()];
        for (idx, out) in raised.iter_mut().enumerate() {
            let digit = (idx / stride) % DIM;
            let base = idx - digit * stride;
            let mut acc = 0.0;
            for e in 0..DIM {
                acc += ginv[(digit, e)] * sv[base + e * stride];
            }
            *out = acc;
        }
        sv = raised;
    }
    Ok(tv.iter().zip(&sv).map(|(a, b)| a * b).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{FnMetric, MetricChart};

    fn flat_chart() -> MetricChart {
        MetricChart::new(
            [(-1.0, 1.0); 4],
            Arc::new(FnMetric(|_: &[f64; 4]| Matrix4::identity())),
        )
    }

    #[test]
    fn norm_of_metric_is_dimension() {
        let g = Matrix4::<f64>::identity() * 3.0;
        let ginv = g.try_inverse().unwrap();
        let v = inner_norm(&ginv, Covariant::Two(&g), Covariant::Two(&g)).unwrap();
        assert!((v - 4.0).abs() < 1e-14);
    }

    #[test]
    fn norm_of_half_metric_is_one() {
        let g = Matrix4::<f64>::new(
            2.0, 0.3, 0.0, 0.1, 0.3, 1.5, 0.2, 0.0, 0.0, 0.2, 1.0, 0.0, 0.1, 0.0, 0.0, 3.0,
        );
        let ginv = g.try_inverse().unwrap();
        let rc = g * 0.5;
        let v = inner_norm(&ginv, Covariant::Two(&rc), Covariant::Two(&rc)).unwrap();
        assert!((v - 1.0).abs() < 1e-13);
    }

    #[test]
    fn valence_mismatch_is_a_shape_error() {
        let g = Matrix4::<f64>::identity();
        let v = [1.0, 0.0, 0.0, 0.0];
        assert_eq!(
            inner_norm(&g, Covariant::Two(&g), Covariant::Vector(&v)),
            Err(GeometryError::Shape { left: 2, right: 1 })
        );
    }

    #[test]
    fn flat_chart_has_no_connection_or_curvature() {
        let chart = flat_chart();
        let p = ChartPoint([0.1, 0.2, -0.3, 0.4]);
        let gamma = levi_civita(&chart, &p).unwrap();
        assert!(gamma.0.iter().flatten().flatten().all(|v| v.abs() < 1e-9));
        let b = curvature_bundle(&chart, &p).unwrap();
        assert!(b.scalar.abs() < 1e-6);
    }

    #[test]
    fn constant_potential_has_no_derivatives() {
        let chart = flat_chart();
        let d = hessian_laplacian(&chart, &PotentialField::constant(3.0), &ChartPoint([0.0; 4]))
            .unwrap();
        assert_eq!(d.gradient, [0.0; 4]);
        assert_eq!(d.laplacian, 0.0);
        assert_eq!(d.value, 3.0);
    }

    #[test]
    fn degenerate_metric_is_reported() {
        let chart = MetricChart::new(
            [(-1.0, 1.0); 4],
            Arc::new(FnMetric(|_: &[f64; 4]| {
                Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, 0.0))
            })),
        );
        assert!(matches!(
            levi_civita(&chart, &ChartPoint([0.0; 4])),
            Err(GeometryError::DegenerateMetric { .. })
        ));
    }

    #[test]
    fn quadratic_potential_on_flat_space() {
        let chart = flat_chart();
        let f = PotentialField::new(
            |x| x.iter().map(|v| v * v).sum::<f64>() / 4.0,
            |x| x.map(|v| v / 2.0),
            |_| Matrix4::identity() * 0.5,
        );
        let d = hessian_laplacian(&chart, &f, &ChartPoint([0.5, -0.2, 0.1, 0.0])).unwrap();
        assert!((d.laplacian - 2.0).abs() < 1e-12);
        assert!((d.hessian - Matrix4::identity() * 0.5).amax() < 1e-9);
        assert!(f.finite_difference_deviation(&[0.5, -0.2, 0.1, 0.0], 1e-3) < 1e-8);
    }
}
