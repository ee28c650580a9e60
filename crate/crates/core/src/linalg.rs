//! Dense complex Hermitian linear algebra: spectral decomposition, determinants,
//! commutators and the Hilbert-Schmidt inner product.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. Tolerances scale with the largest
//! absolute entry of the input, with an absolute floor of `1e-14`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::DensityMatrix;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

/// Relative hermiticity tolerance.
pub const HERMITIAN_RTOL: f64 = 1e-12;
/// Absolute floor applied to every scaled tolerance.
pub const ABS_FLOOR: f64 = 1e-14;

const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn max_abs_entry(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

pub fn scaled_tol(rtol: f64, scale: f64) -> f64 {
    (rtol * scale).max(ABS_FLOOR)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

fn ensure_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

fn ensure_same_shape(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::DimMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    Ok(())
}

/// A validated Hermitian matrix.
///
/// Construction checks `|m_ij - conj(m_ji)| <= 1e-12 * max|m|` and then stores the
/// exact Hermitian part `(M + M*)/2`, so downstream kernels see a matrix that is
/// Hermitian to the last bit.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        let n = ensure_square(&m)?;
        let tolerance = scaled_tol(HERMITIAN_RTOL, max_abs_entry(&m));
        let mut deviation = 0.0f64;
        for i in 0..n {
            for j in i..n {
                deviation = deviation.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if deviation > tolerance {
            return Err(Error::NotHermitian {
                deviation,
                tolerance,
            });
        }
        let sym = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(Self(sym))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMatrix::zeros(n, n))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    /// Build from row-major real and imaginary parts.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        Self::new(complex_from_parts(re, im)?)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(&self.0 * Complex64::new(s, 0.0))
    }

    /// Spectral calculus: `U diag(func(λ)) U*`.
    pub fn map_spectrum(&self, func: impl Fn(f64) -> f64) -> Self {
        let spec = hermitian_eig(self);
        let mapped: Vec<f64> = spec.eigenvalues.iter().map(|&l| func(l)).collect();
        Self(spec.compose(&mapped))
    }
}

impl AsRef<CMatrix> for HermitianMatrix {
    fn as_ref(&self) -> &CMatrix {
        &self.0
    }
}

pub fn complex_from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<CMatrix> {
    let rows = re.len();
    if im.len() != rows {
        return Err(Error::Format(format!(
            "real part has {rows} rows, imaginary part has {}",
            im.len()
        )));
    }
    let cols = re.first().map_or(0, Vec::len);
    for (r, (rr, ri)) in re.iter().zip(im).enumerate() {
        if rr.len() != cols || ri.len() != cols {
            return Err(Error::Format(format!("row {r} has inconsistent length")));
        }
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        Complex64::new(re[i][j], im[i][j])
    }))
}

pub fn pauli_x() -> HermitianMatrix {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    HermitianMatrix(CMatrix::from_row_slice(2, 2, &[o, l, l, o]))
}

pub fn pauli_y() -> HermitianMatrix {
    let o = Complex64::new(0.0, 0.0);
    HermitianMatrix(CMatrix::from_row_slice(2, 2, &[o, -I, I, o]))
}

pub fn pauli_z() -> HermitianMatrix {
    HermitianMatrix::from_real_diagonal(&[1.0, -1.0])
}

/// Eigenvalues in ascending order with the matching unitary of eigenvectors
/// (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    /// `U diag(values) U*` for an arbitrary list of values on this eigenbasis.
    pub fn compose(&self, values: &[f64]) -> CMatrix {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (j, &v) in values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(v);
        }
        scaled * u.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.compose(&self.eigenvalues)
    }

    /// `U* X U`.
    pub fn to_eigenbasis(&self, x: &CMatrix) -> CMatrix {
        self.eigenvectors.adjoint() * x * &self.eigenvectors
    }

    /// `U Y U*`.
    pub fn from_eigenbasis(&self, y: &CMatrix) -> CMatrix {
        &self.eigenvectors * y * self.eigenvectors.adjoint()
    }
}

pub fn hermitian_eig(m: &HermitianMatrix) -> SpectralDecomposition {
    let n = m.dim();
    let eig = SymmetricEigen::new(m.0.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn symmetric_eigenvalues(m: &RMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Determinant via LU with partial pivoting.
pub fn determinant(m: &RMatrix) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Ok(1.0);
    }
    Ok(m.clone().lu().determinant())
}

pub fn determinant_complex(m: &CMatrix) -> Result<Complex64> {
    let n = ensure_square(m)?;
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok(m.clone().lu().determinant())
}

/// Real part of a matrix whose imaginary residue must stay below
/// `1e-12 * max|m|`.
pub fn real_projection(m: &CMatrix) -> Result<RMatrix> {
    let tol = scaled_tol(1e-12, max_abs_entry(m));
    let residue = m.iter().fold(0.0f64, |acc, z| acc.max(z.im.abs()));
    if residue > tol {
        return Err(Error::Format(format!(
            "expected a real matrix, imaginary residue {residue:.3e}"
        )));
    }
    Ok(m.map(|z| z.re))
}

/// Plain commutator `DA - AD`.
pub fn commutator(d: &CMatrix, a: &CMatrix) -> Result<CMatrix> {
    ensure_square(d)?;
    ensure_same_shape(d, a)?;
    Ok(d * a - a * d)
}

/// `i[D, A]`, Hermitian whenever `D` and `A` are.
pub fn commutator_i(d: &HermitianMatrix, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let c = commutator(&d.0, &a.0)? * I;
    // i(DA - AD) is exactly Hermitian in exact arithmetic; symmetrize away round-off.
    Ok(HermitianMatrix((&c + c.adjoint()) * Complex64::new(0.5, 0.0)))
}

/// Hilbert-Schmidt inner product `Tr A* B`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<Complex64> {
    ensure_same_shape(a, b)?;
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum())
}

/// `Tr(D A)` for a density matrix `D`.
pub fn expectation(d: &DensityMatrix, a: &CMatrix) -> Result<Complex64> {
    ensure_same_shape(d.matrix(), a)?;
    // Tr(DA) = sum_ij D_ij A_ji
    let dm = d.matrix();
    let n = dm.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += dm[(i, j)] * a[(j, i)];
        }
    }
    Ok(acc)
}

/// `A - Tr(DA) I`, the projection of `A` onto the tangent space at `D`.
pub fn center_observable(a: &HermitianMatrix, d: &DensityMatrix) -> Result<HermitianMatrix> {
    let mean = expectation(d, &a.0)?.re;
    let n = a.dim();
    let mut c = a.0.clone();
    for i in 0..n {
        c[(i, i)] -= Complex64::new(mean, 0.0);
    }
    Ok(HermitianMatrix(c))
}
