//! Monotone metrics and generalized covariances in spectral form.
//!
//! For `D = U diag(λ) U*` and a standard function `f`, the superoperator
//! `J_D = f(L_D R_D^-1) R_D` acts on `X̃ = U* X U` as the Hadamard product with
//! the kernel `K_ij = M_f(λ_i, λ_j)`. The left and right multiplications are
//! never formed. The first argument of every form is conjugated.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::functions::{mean_value, StandardFunction};
use crate::linalg::{commutator_i, expectation, CMatrix, RMatrix};
use crate::state::{DensityMatrix, Observable};

/// A state, a standard function and the precomputed mean kernel.
#[derive(Debug, Clone)]
pub struct MetricContext {
    state: DensityMatrix,
    function: StandardFunction,
    kernel: RMatrix,
}

impl MetricContext {
    pub fn new(state: &DensityMatrix, function: &StandardFunction) -> Self {
        let ev = state.eigenvalues();
        let n = ev.len();
        let kernel = RMatrix::from_fn(n, n, |i, j| mean_value(function, ev[i], ev[j]));
        Self {
            state: state.clone(),
            function: function.clone(),
            kernel,
        }
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn function(&self) -> &StandardFunction {
        &self.function
    }

    /// `K_ij = M_f(λ_i, λ_j)` in the eigenbasis of the state, eigenvalues ascending.
    pub fn kernel(&self) -> &RMatrix {
        &self.kernel
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    fn check(&self, x: &CMatrix) -> Result<()> {
        let n = self.dim();
        if x.nrows() != n || x.ncols() != n {
            return Err(Error::DimMismatch {
                expected: n,
                found: x.nrows(),
            });
        }
        Ok(())
    }

    fn rotate(&self, x: &CMatrix) -> Result<CMatrix> {
        self.check(x)?;
        Ok(self.state.spectrum().to_eigenbasis(x))
    }

    /// `J_D(X)`.
    pub fn j_apply(&self, x: &CMatrix) -> Result<CMatrix> {
        let mut y = self.rotate(x)?;
        y.zip_apply(&self.kernel, |z, k| *z *= k);
        Ok(self.state.spectrum().from_eigenbasis(&y))
    }

    /// `J_D^-1(X)`.
    pub fn j_inv_apply(&self, x: &CMatrix) -> Result<CMatrix> {
        let mut y = self.rotate(x)?;
        y.zip_apply(&self.kernel, |z, k| *z /= k);
        Ok(self.state.spectrum().from_eigenbasis(&y))
    }

    /// `γ_D(A, B) = Σ_ij conj(Ã_ij) B̃_ij / M_f(λ_i, λ_j)`.
    pub fn gamma(&self, a: &CMatrix, b: &CMatrix) -> Result<Complex64> {
        let (a, b) = (self.rotate(a)?, self.rotate(b)?);
        Ok(a.iter()
            .zip(b.iter())
            .zip(self.kernel.iter())
            .map(|((x, y), k)| x.conj() * y / k)
            .sum())
    }

    /// `qCov_D(A, B) = Σ_ij M_f(λ_i, λ_j) conj(Ã_ij) B̃_ij - (Σ λ_i conj(Ã_ii))(Σ λ_i B̃_ii)`.
    pub fn qcov(&self, a: &CMatrix, b: &CMatrix) -> Result<Complex64> {
        let (a, b) = (self.rotate(a)?, self.rotate(b)?);
        let quad: Complex64 = a
            .iter()
            .zip(b.iter())
            .zip(self.kernel.iter())
            .map(|((x, y), k)| x.conj() * y * k)
            .sum();
        let ev = self.state.eigenvalues();
        let mean_a: Complex64 = ev.iter().enumerate().map(|(i, l)| a[(i, i)].conj() * l).sum();
        let mean_b: Complex64 = ev.iter().enumerate().map(|(i, l)| b[(i, i)] * l).sum();
        Ok(quad - mean_a * mean_b)
    }

    /// Metric adjusted skew information `(f(0)/2) γ_D(i[D,A], i[D,B])`.
    pub fn skew_information(&self, a: &Observable, b: &Observable) -> Result<f64> {
        let f0 = self.function.at_zero();
        if f0 == 0.0 {
            self.check(a.matrix())?;
            self.check(b.matrix())?;
            return Ok(0.0);
        }
        let d = self.state.hermitian();
        let ca = commutator_i(d, a.hermitian())?;
        let cb = commutator_i(d, b.hermitian())?;
        Ok(0.5 * f0 * self.gamma(ca.matrix(), cb.matrix())?.re)
    }
}

/// `½ Tr(D(A*B + BA*)) - Tr(DA*) Tr(DB)`, evaluated directly from matrix products.
pub fn cov_symmetrized(d: &DensityMatrix, a: &Observable, b: &Observable) -> Result<f64> {
    let (am, bm) = (a.matrix(), b.matrix());
    let a_star = am.adjoint();
    let sym = (&a_star * bm + bm * &a_star) * Complex64::new(0.5, 0.0);
    let value = expectation(d, &sym)? - expectation(d, &a_star)? * expectation(d, bm)?;
    Ok(value.re)
}

/// Both sides of `(f(0)/2) γ_D(i[D,A], i[D,B]) = Cov_D(A,B) - qCov_D^{f~}(A,B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResidual {
    /// Skew information side.
    pub lhs: f64,
    /// Covariance difference side.
    pub rhs: f64,
    pub cov: f64,
    pub qcov_tilde: f64,
    pub residual: f64,
    /// `max(|Cov|, |qCov^{f~}|, 1e-30)`.
    pub scale: f64,
}

impl IdentityResidual {
    pub fn within(&self, rtol: f64) -> bool {
        self.residual <= rtol * self.scale
    }
}

/// Residual of the skew-information identity. Both observables are centered
/// against `D` first.
pub fn tilde_identity_residual(
    d: &DensityMatrix,
    f: &StandardFunction,
    a: &Observable,
    b: &Observable,
) -> Result<IdentityResidual> {
    let (a, b) = (a.centered(d)?, b.centered(d)?);
    let lhs = MetricContext::new(d, f).skew_information(&a, &b)?;
    let cov = cov_symmetrized(d, &a, &b)?;
    let qcov_tilde = MetricContext::new(d, &f.tilde()).qcov(a.matrix(), b.matrix())?.re;
    let rhs = cov - qcov_tilde;
    Ok(IdentityResidual {
        lhs,
        rhs,
        cov,
        qcov_tilde,
        residual: (lhs - rhs).abs(),
        scale: cov.abs().max(qcov_tilde.abs()).max(1e-30),
    })
}
