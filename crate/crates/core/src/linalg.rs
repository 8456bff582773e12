//! Small dense linear algebra for the 2×2 error system: Hurwitz test,
//! continuous-time Lyapunov solve and definiteness checks.

use thiserror::Error;

/// Relative pivot threshold below which the reduced Lyapunov system is
/// treated as singular.
const SINGULAR_PIVOT: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LyapunovError {
    #[error("matrix is not Hurwitz (trace = {trace}, det = {det})")]
    NotHurwitz { trace: f64, det: f64 },
    #[error("Q must be symmetric positive definite")]
    NotPositiveDefinite,
    #[error("reduced Lyapunov system is numerically singular")]
    SingularSystem,
    #[error("matrix has non-finite entries")]
    NonFinite,
}

/// Row-major 2×2 real matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2 {
    pub m: [[f64; 2]; 2],
}

impl Matrix2 {
    pub const fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Self { m: [[m11, m12], [m21, m22]] }
    }

    pub const fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0)
    }

    pub const fn zeros() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let m = self.m;
        Self::new(c * m[0][0], c * m[0][1], c * m[1][0], c * m[1][1])
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn transpose(&self) -> Self {
        let m = self.m;
        Self::new(m[0][0], m[1][0], m[0][1], m[1][1])
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_finite())
    }

    pub fn is_symmetric(&self) -> bool {
        self.m[0][1] == self.m[1][0]
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn mul(&self, rhs: &Matrix2) -> Matrix2 {
        let (a, b) = (self.m, rhs.m);
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Matrix2 { m: out }
    }

    pub fn add(&self, rhs: &Matrix2) -> Matrix2 {
        let (a, b) = (self.m, rhs.m);
        Matrix2::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

/// Symmetric 2×2 matrix stored as its upper triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PMatrix {
    pub p11: f64,
    pub p12: f64,
    pub p22: f64,
}

impl PMatrix {
    pub const fn new(p11: f64, p12: f64, p22: f64) -> Self {
        Self { p11, p12, p22 }
    }

    pub const fn identity() -> Self {
        Self::new(1.0, 0.0, 1.0)
    }

    /// Lower-left entry; equal to `p12` by construction.
    pub fn p21(&self) -> f64 {
        self.p12
    }

    pub fn to_matrix(&self) -> Matrix2 {
        Matrix2::new(self.p11, self.p12, self.p12, self.p22)
    }

    /// Quadratic form `eᵀ P e`.
    pub fn quadratic_form(&self, e: [f64; 2]) -> f64 {
        self.p11 * e[0] * e[0] + 2.0 * self.p12 * e[0] * e[1] + self.p22 * e[1] * e[1]
    }

    pub fn is_finite(&self) -> bool {
        self.p11.is_finite() && self.p12.is_finite() && self.p22.is_finite()
    }
}

/// 2×2 Hurwitz criterion: both eigenvalues in the open left half-plane.
pub fn is_hurwitz(a: &Matrix2) -> bool {
    a.trace() < 0.0 && a.det() > 0.0
}

/// Leading principal minors test (Sylvester).
pub fn is_positive_definite(p: &PMatrix) -> bool {
    p.p11 > 0.0 && p.p11 * p.p22 - p.p12 * p.p12 > 0.0
}

/// Residual `AᵀP + PA + Q`.
pub fn lyapunov_residual(a: &Matrix2, p: &PMatrix, q: &Matrix2) -> Matrix2 {
    let pm = p.to_matrix();
    a.transpose().mul(&pm).add(&pm.mul(a)).add(q)
}

/// Solves `AᵀP + PA = −Q` for symmetric `P`.
///
/// Writing `A = [[a, b], [c, d]]` and `P = [[x, y], [y, z]]`, the three
/// independent entries of the equation give
///
/// ```text
/// 2a·x + 2c·y          = −q11
///  b·x + (a+d)·y + c·z = −q12
///        2b·y  + 2d·z  = −q22
/// ```
///
/// which is solved by Gaussian elimination with partial pivoting.
pub fn solve_lyapunov(a: &Matrix2, q: &Matrix2) -> Result<PMatrix, LyapunovError> {
    if !a.is_finite() || !q.is_finite() {
        return Err(LyapunovError::NonFinite);
    }
    if !is_hurwitz(a) {
        return Err(LyapunovError::NotHurwitz { trace: a.trace(), det: a.det() });
    }
    let q_sym = PMatrix::new(q.m[0][0], q.m[0][1], q.m[1][1]);
    if !q.is_symmetric() || !is_positive_definite(&q_sym) {
        return Err(LyapunovError::NotPositiveDefinite);
    }

    let [[a11, a12], [a21, a22]] = a.m;
    let mut sys = [
        [2.0 * a11, 2.0 * a21, 0.0, -q.m[0][0]],
        [a12, a11 + a22, a21, -q.m[0][1]],
        [0.0, 2.0 * a12, 2.0 * a22, -q.m[1][1]],
    ];
    let [x, y, z] = gauss_solve3(&mut sys, a.max_abs())?;
    Ok(PMatrix::new(x, y, z))
}

fn gauss_solve3(sys: &mut [[f64; 4]; 3], scale: f64) -> Result<[f64; 3], LyapunovError> {
    let tol = SINGULAR_PIVOT * scale.max(f64::MIN_POSITIVE);
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| sys[i][col].abs().total_cmp(&sys[j][col].abs()))
            .unwrap_or(col);
        if sys[pivot][col].abs() <= tol {
            return Err(LyapunovError::SingularSystem);
        }
        sys.swap(col, pivot);
        for row in col + 1..3 {
            let f = sys[row][col] / sys[col][col];
            let pivot_row = sys[col];
            for (v, pv) in sys[row].iter_mut().zip(pivot_row).skip(col) {
                *v -= f * pv;
            }
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| sys[row][k] * x[k]).sum();
        x[row] = (sys[row][3] - tail) / sys[row][row];
    }
    if x.iter().all(|v| v.is_finite()) {
        Ok(x)
    } else {
        Err(LyapunovError::SingularSystem)
    }
}
