//! 2-forms in four dimensions, the Hodge star, and the curvature operator
//! split along self-dual and anti-self-dual forms.
//!
//! Basis ordering of index pairs is `(01, 02, 03, 23, 31, 12)`, so for the
//! flat metric with standard orientation the star is the block
//! anti-diagonal identity.

use nalgebra::{Matrix3, Matrix4, Matrix6, SMatrix};

use crate::chart::{Tensor4, DIM};
use crate::error::{GeometryError, Result};
use crate::tensor::CurvatureBundle;

pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2)];

/// Multiplies the Frobenius norm² of a trace-free diagonal block of the
/// curvature operator to give `|W±|²`.
///
/// The operator is assembled on orthonormal 2-forms `e_a ∧ e_b` with entries
/// `Rm(e_a, e_b, e_c, e_d)`, so the round sphere of sectional curvature `K`
/// acts as `K·I`. With that normalization the Hirzebruch integral
/// `(1/12π²)∫(|W+|² − |W−|²)` of the Fubini–Study metric is 1 exactly when
/// this constant is 1; equivalently `|W+|² + |W−|² = ¼ W_abcd W^abcd`.
pub const KAPPA_W: f64 = 1.0;

/// Components of a 2-form in the fixed pair basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoForm(pub [f64; 6]);

impl TwoForm {
    pub fn from_antisymmetric(m: &Matrix4<f64>) -> Self {
        Self(PAIRS.map(|(a, b)| m[(a, b)]))
    }

    pub fn to_antisymmetric(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        for (i, &(a, b)) in PAIRS.iter().enumerate() {
            m[(a, b)] = self.0[i];
            m[(b, a)] = -self.0[i];
        }
        m
    }

    pub fn as_vector(&self) -> nalgebra::Vector6<f64> {
        nalgebra::Vector6::from_column_slice(&self.0)
    }
}

fn levi_civita_symbol(idx: [usize; 4]) -> f64 {
    let mut sign = 1.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if idx[i] == idx[j] {
                return 0.0;
            }
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Hodge star on coordinate 2-forms (lower indices) at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HodgeStarMatrix {
    pub matrix: Matrix6<f64>,
    /// Induced inner product `⟨ω, η⟩ = ½ ω_ab η^ab` in the pair basis.
    pub gram: Matrix6<f64>,
}

/// `(*ω)_cd = ½ ε(orientation) √det g  g^ae g^bf ω_ef ε_abcd`.
pub fn hodge_star(g: &Matrix4<f64>, orientation: i8) -> Result<HodgeStarMatrix> {
    let det = g.determinant();
    let ginv = match g.try_inverse() {
        Some(inv) if det > 0.0 && det.is_finite() => inv,
        _ => {
            return Err(GeometryError::Inconsistent(
                "Hodge star needs a positive-definite metric".into(),
            ))
        }
    };
    if g.cholesky().is_none() {
        return Err(GeometryError::Inconsistent(
            "Hodge star needs a positive-definite metric".into(),
        ));
    }
    let vol = det.sqrt() * if orientation < 0 { -1.0 } else { 1.0 };
    let mut matrix = Matrix6::zeros();
    for (j, _) in PAIRS.iter().enumerate() {
        let mut basis = [0.0; 6];
        basis[j] = 1.0;
        let w = TwoForm(basis).to_antisymmetric();
        let raised = ginv * w * ginv;
        for (i, &(c, d)) in PAIRS.iter().enumerate() {
            let mut s = 0.0;
            for a in 0..DIM {
                for b in 0..DIM {
                    s += raised[(a, b)] * levi_civita_symbol([a, b, c, d]);
                }
            }
            matrix[(i, j)] = 0.5 * vol * s;
        }
    }
    let mut gram = Matrix6::zeros();
    for (i, &(a, b)) in PAIRS.iter().enumerate() {
        for (j, &(c, d)) in PAIRS.iter().enumerate() {
            gram[(i, j)] = ginv[(a, c)] * ginv[(b, d)] - ginv[(a, d)] * ginv[(b, c)];
        }
    }
    Ok(HodgeStarMatrix { matrix, gram })
}

impl HodgeStarMatrix {
    pub fn apply(&self, w: &TwoForm) -> TwoForm {
        let v = self.matrix * w.as_vector();
        TwoForm([v[0], v[1], v[2], v[3], v[4], v[5]])
    }

    /// Largest entry of `star² − I`.
    pub fn involution_defect(&self) -> f64 {
        (self.matrix * self.matrix - Matrix6::identity()).amax()
    }
}

/// Projectors `(I ± *)/2` onto self-dual and anti-self-dual forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfDualProjectors {
    pub plus: Matrix6<f64>,
    pub minus: Matrix6<f64>,
}

pub const STAR_TOLERANCE: f64 = 1e-9;

pub fn sd_projectors(star: &HodgeStarMatrix) -> Result<SelfDualProjectors> {
    let defect = star.involution_defect();
    if !(defect <= STAR_TOLERANCE) {
        return Err(GeometryError::Inconsistent(format!(
            "star squared differs from the identity by {defect:e}"
        )));
    }
    let id = Matrix6::identity();
    Ok(SelfDualProjectors {
        plus: (id + star.matrix) * 0.5,
        minus: (id - star.matrix) * 0.5,
    })
}

/// Number of singular values above `tol` (relative to the largest).
pub fn numeric_rank(m: &Matrix6<f64>, tol: f64) -> usize {
    let sv = m.singular_values();
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > tol * top).count()
}

/// Curvature operator on `Λ²` in an orthonormal frame, with the orientation
/// needed to split it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureOperatorMatrix {
    /// Entries `Rm(e_a, e_b, e_c, e_d)` on the orthonormal pair basis.
    pub matrix: Matrix6<f64>,
    pub orientation: i8,
}

type Basis3 = SMatrix<f64, 6, 3>;

impl CurvatureOperatorMatrix {
    /// Orthonormal bases of `Λ+` and `Λ−` in the frame pair basis.
    pub fn sd_bases(&self) -> (Basis3, Basis3) {
        let o = if self.orientation < 0 { -1.0 } else { 1.0 };
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut plus = Basis3::zeros();
        let mut minus = Basis3::zeros();
        for i in 0..3 {
            plus[(i, i)] = r;
            plus[(i + 3, i)] = o * r;
            minus[(i, i)] = r;
            minus[(i + 3, i)] = -o * r;
        }
        (plus, minus)
    }

    /// Frame Hodge star: `±` the block anti-diagonal identity.
    pub fn frame_star(&self) -> Matrix6<f64> {
        let o = if self.orientation < 0 { -1.0 } else { 1.0 };
        let mut s = Matrix6::zeros();
        for i in 0..3 {
            s[(i, i + 3)] = o;
            s[(i + 3, i)] = o;
        }
        s
    }

    /// `W+ + R/12` on `Λ+`.
    pub fn plus_block(&self) -> Matrix3<f64> {
        let (p, _) = self.sd_bases();
        p.transpose() * self.matrix * p
    }

    /// `W− + R/12` on `Λ−`.
    pub fn minus_block(&self) -> Matrix3<f64> {
        let (_, m) = self.sd_bases();
        m.transpose() * self.matrix * m
    }

    /// The traceless-Ricci block `Λ− → Λ+`.
    pub fn off_diagonal_block(&self) -> Matrix3<f64> {
        let (p, m) = self.sd_bases();
        p.transpose() * self.matrix * m
    }

    pub fn weyl_plus(&self) -> Matrix3<f64> {
        trace_free(&self.plus_block())
    }

    pub fn weyl_minus(&self) -> Matrix3<f64> {
        trace_free(&self.minus_block())
    }

    pub fn symmetry_defect(&self) -> f64 {
        (self.matrix - self.matrix.transpose()).amax()
    }
}

fn trace_free(m: &Matrix3<f64>) -> Matrix3<f64> {
    m - Matrix3::identity() * (m.trace() / 3.0)
}

/// Matrix of `e_a ∧ e_b ↦ coordinate components` for frame vectors stored as
/// the columns of `frame`.
fn bivector_transform(frame: &Matrix4<f64>) -> Matrix6<f64> {
    let mut t = Matrix6::zeros();
    for (j, &(i, k)) in PAIRS.iter().enumerate() {
        for (r, &(a, b)) in PAIRS.iter().enumerate() {
            t[(r, j)] = frame[(a, i)] * frame[(b, k)] - frame[(b, i)] * frame[(a, k)];
        }
    }
    t
}

/// Orthonormal frame `E = L^{-T}` from the Cholesky factor `g = L Lᵀ`.
/// Its orientation agrees with the coordinate orientation.
pub(crate) fn orthonormal_frame(g: &Matrix4<f64>) -> Option<Matrix4<f64>> {
    let chol = g.cholesky()?;
    chol.l().try_inverse().map(|l| l.transpose())
}

pub(crate) fn operator_from_riemann(
    rm: &Tensor4,
    frame: &Matrix4<f64>,
    orientation: i8,
) -> CurvatureOperatorMatrix {
    let mut coord = Matrix6::zeros();
    for (i, &(a, b)) in PAIRS.iter().enumerate() {
        for (j, &(c, d)) in PAIRS.iter().enumerate() {
            coord[(i, j)] = rm[a][b][c][d];
        }
    }
    let t = bivector_transform(frame);
    CurvatureOperatorMatrix {
        matrix: t.transpose() * coord * t,
        orientation,
    }
}

/// Curvature operator of `bundle` in an orthonormal frame of `g`.
pub fn curvature_operator(
    bundle: &CurvatureBundle,
    g: &Matrix4<f64>,
    orientation: i8,
) -> Result<CurvatureOperatorMatrix> {
    if (bundle.metric - g).amax() > 1e-12 * g.amax().max(1.0) {
        return Err(GeometryError::Inconsistent(
            "curvature bundle was computed for a different metric".into(),
        ));
    }
    let frame = orthonormal_frame(g).ok_or_else(|| {
        GeometryError::Inconsistent("curvature operator needs a positive-definite metric".into())
    })?;
    let op = operator_from_riemann(&bundle.rm, &frame, orientation);
    if op.symmetry_defect() > 1e-8 * op.matrix.amax().max(1.0) {
        return Err(GeometryError::Inconsistent(
            "curvature bundle lacks pair symmetry".into(),
        ));
    }
    Ok(op)
}

/// `(|W+|², |W−|²)` from the trace-free diagonal blocks.
pub fn weyl_sd_norms(op: &CurvatureOperatorMatrix) -> (f64, f64) {
    (
        KAPPA_W * op.weyl_plus().norm_squared(),
        KAPPA_W * op.weyl_minus().norm_squared(),
    )
}
