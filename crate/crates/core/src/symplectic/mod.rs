//! Linear symplectic algebra and metaplectic ground-state matrix elements.
//!
//! Matrices act on `ℝ^{2d}` with coordinates `(q, p)` and the symplectic form
//! `Ω = [[0, I], [-I, 0]]`; `S` is written in blocks `[[A, B], [C, D]]`.

mod classify;
mod matrix_element;
pub mod random;

pub use classify::{classify, eigen_structure, ClassificationTag, EigenStructure};
pub use matrix_element::{
    matrix_element_blockdet, matrix_element_gaussian_oracle, matrix_element_keyid, matrix_element_magnitude, power_sequence,
    MatrixElementValue, Method,
};

use crate::error::{GrauertError, Result};
use crate::linalg::{blocks, fmt_matrix, from_blocks, max_abs, omega, CMat, RMat};
use nalgebra::SymmetricEigen;
use num_complex::Complex64;

/// Default symplecticity tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A real `2d × 2d` symplectic matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMap {
    d: usize,
    matrix: RMat,
    tol: f64,
}

fn check_shape(m: &RMat) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(GrauertError::Dimension(format!("matrix is {}×{}, expected square", m.nrows(), m.ncols())));
    }
    if m.nrows() % 2 != 0 {
        return Err(GrauertError::Dimension(format!("matrix size {} is odd; symplectic matrices are 2d×2d", m.nrows())));
    }
    Ok(m.nrows() / 2)
}

/// Max-entry magnitude of `SᵀΩS − Ω`.
pub fn symplectic_defect(m: &RMat) -> Result<f64> {
    let d = check_shape(m)?;
    let o = omega(d);
    Ok(max_abs(&(m.transpose() * &o * m - &o)))
}

/// True iff `SᵀΩS − Ω` has max-entry magnitude `≤ tol`.
pub fn check_symplectic(m: &RMat, tol: f64) -> Result<bool> {
    Ok(symplectic_defect(m)? <= tol)
}

impl SymplecticMap {
    /// Validates `matrix` against `tol` (symplecticity and `det = 1`).
    pub fn new(matrix: RMat, tol: f64) -> Result<Self> {
        let d = check_shape(&matrix)?;
        let defect = symplectic_defect(&matrix)?;
        if defect > tol {
            return Err(GrauertError::NotSymplectic { defect, tol });
        }
        if d > 0 {
            let det = matrix.clone().lu().determinant();
            if (det - 1.0).abs() > tol.max(1e-12) * (1.0 + max_abs(&matrix)).powi(2 * d as i32) {
                return Err(GrauertError::NotSymplectic { defect: (det - 1.0).abs(), tol });
            }
        }
        Ok(Self { d, matrix, tol })
    }

    /// Scales the tolerance with the matrix norm; convenient for products.
    pub fn with_relative_tol(matrix: RMat, rel: f64) -> Result<Self> {
        let n = 1.0 + max_abs(&matrix);
        Self::new(matrix, rel * n * n)
    }

    pub(crate) fn from_trusted(matrix: RMat, tol: f64) -> Self {
        let d = matrix.nrows() / 2;
        Self { d, matrix, tol }
    }

    pub fn from_rows(rows: &[Vec<f64>], tol: f64) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(GrauertError::Dimension("rows have inconsistent length".into()));
        }
        let m = RMat::from_fn(n, n, |i, j| rows[i][j]);
        Self::new(m, tol)
    }

    pub fn identity(d: usize) -> Self {
        Self::from_trusted(RMat::identity(2 * d, 2 * d), DEFAULT_TOL)
    }

    /// Rotation by `alpha` in the `(q, p)` plane: `A = D = cos α`, `C = −B = sin α`.
    pub fn rotation(alpha: f64) -> Self {
        let (s, c) = alpha.sin_cos();
        Self::from_trusted(RMat::from_row_slice(2, 2, &[c, -s, s, c]), DEFAULT_TOL)
    }

    /// `diag(e^μ, e^{−μ})`.
    pub fn hyperbolic(mu: f64) -> Self {
        Self::from_trusted(RMat::from_row_slice(2, 2, &[mu.exp(), 0.0, 0.0, (-mu).exp()]), DEFAULT_TOL)
    }

    /// Free-flight shear `(q, p) ↦ (q + t p, p)` in `d` degrees of freedom.
    pub fn shear(d: usize, t: f64) -> Self {
        let i = RMat::identity(d, d);
        Self::from_trusted(from_blocks(&i, &(&i * t), &RMat::zeros(d, d), &i), DEFAULT_TOL)
    }

    /// The loxodromic normal form `exp(diag(A₄, D₄))` with
    /// `A₄ = [[a, b], [−b, a]]`, `D₄ = −A₄ᵀ`; eigenvalues `e^{±a ± ib}`.
    pub fn loxodromic(a: f64, b: f64) -> Self {
        let (s, c) = b.sin_cos();
        let ea = a.exp();
        let eb = (-a).exp();
        let top = RMat::from_row_slice(2, 2, &[ea * c, ea * s, -ea * s, ea * c]);
        let bot = RMat::from_row_slice(2, 2, &[eb * c, eb * s, -eb * s, eb * c]);
        let z = RMat::zeros(2, 2);
        Self::from_trusted(from_blocks(&top, &z, &z, &bot), DEFAULT_TOL)
    }

    /// Symplectic direct sum (interleaves the `q` and `p` blocks).
    pub fn direct_sum(parts: &[SymplecticMap]) -> Self {
        let d: usize = parts.iter().map(|p| p.d).sum();
        let mut m = RMat::zeros(2 * d, 2 * d);
        let mut off = 0;
        for part in parts {
            let k = part.d;
            for i in 0..2 {
                for j in 0..2 {
                    let src = part.matrix.view((i * k, j * k), (k, k));
                    m.view_mut((i * d + off, j * d + off), (k, k)).copy_from(&src);
                }
            }
            off += k;
        }
        let tol = parts.iter().map(|p| p.tol).fold(DEFAULT_TOL, f64::max);
        Self::from_trusted(m, tol)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &RMat {
        &self.matrix
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn norm(&self) -> f64 {
        max_abs(&self.matrix)
    }

    pub fn blocks(&self) -> (RMat, RMat, RMat, RMat) {
        blocks(&self.matrix)
    }

    pub fn compose(&self, other: &SymplecticMap) -> SymplecticMap {
        Self::from_trusted(&self.matrix * &other.matrix, self.tol.max(other.tol))
    }

    /// `S⁻¹ = −Ω Sᵀ Ω`.
    pub fn inverse(&self) -> SymplecticMap {
        let o = omega(self.d);
        Self::from_trusted(-(&o * self.matrix.transpose() * &o), self.tol)
    }

    pub fn power(&self, n: u32) -> SymplecticMap {
        let mut acc = RMat::identity(2 * self.d, 2 * self.d);
        let mut base = self.matrix.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Self::from_trusted(acc, self.tol)
    }

    pub fn defect(&self) -> f64 {
        symplectic_defect(&self.matrix).unwrap_or(f64::INFINITY)
    }

    pub fn is_symplectic(&self, tol: f64) -> bool {
        self.defect() <= tol
    }
}

impl std::fmt::Display for SymplecticMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", fmt_matrix(&self.matrix))
    }
}

/// The holomorphic block `P = ½(A + D + i(C − B))`.
pub fn holomorphic_block(s: &SymplecticMap) -> CMat {
    let (a, b, c, d) = s.blocks();
    let n = s.d();
    CMat::from_fn(n, n, |i, j| Complex64::new(0.5 * (a[(i, j)] + d[(i, j)]), 0.5 * (c[(i, j)] - b[(i, j)])))
}

/// Embeds a `d × d` unitary `Û = X + iY` as the orthogonal symplectic matrix
/// `[[X, −Y], [Y, X]]`; the inverse of [`holomorphic_block`] on `U(d)`.
pub fn unitary_to_symplectic(u: &CMat) -> RMat {
    let x = u.map(|z| z.re);
    let y = u.map(|z| z.im);
    from_blocks(&x, &(-&y), &y, &x)
}

/// Polar decomposition `S = U·P̂` with `P̂ = (SᵀS)^{1/2}` symmetric positive
/// definite symplectic and `U` orthogonal symplectic.
pub fn polar_decompose(s: &SymplecticMap) -> Result<(SymplecticMap, SymplecticMap)> {
    let defect = s.defect();
    let tol = s.tol() * (1.0 + s.norm()).powi(2);
    if defect > tol {
        return Err(GrauertError::NotSymplectic { defect, tol });
    }
    let (p, pinv) = sqrt_sym(&(s.matrix().transpose() * s.matrix()));
    let u = s.matrix() * pinv;
    Ok((SymplecticMap::from_trusted(u, s.tol()), SymplecticMap::from_trusted(p, s.tol())))
}

/// Square root and inverse square root of a symmetric positive definite matrix.
fn sqrt_sym(m: &RMat) -> (RMat, RMat) {
    let sym = 0.5 * (m + m.transpose());
    let eig = SymmetricEigen::new(sym);
    let q = &eig.eigenvectors;
    let sq = q * RMat::from_diagonal(&eig.eigenvalues.map(|e| e.max(0.0).sqrt())) * q.transpose();
    let isq = q * RMat::from_diagonal(&eig.eigenvalues.map(|e| 1.0 / e.max(f64::MIN_POSITIVE).sqrt())) * q.transpose();
    (sq, isq)
}

/// `P̂^t` for a symmetric positive definite `P̂`.
pub(crate) fn spd_power(p: &RMat, t: f64) -> RMat {
    let sym = 0.5 * (p + p.transpose());
    let eig = SymmetricEigen::new(sym);
    let q = &eig.eigenvectors;
    q * RMat::from_diagonal(&eig.eigenvalues.map(|e| e.max(f64::MIN_POSITIVE).powf(t))) * q.transpose()
}
