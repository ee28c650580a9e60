//! Coarse-grainings: completely positive trace-preserving maps in Kraus form.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::functions::StandardFunction;
use crate::inequalities::InequalityVerdict;
use crate::linalg::{
    hermitian_eig, hs_inner, max_abs_entry, scaled_tol, trace, CMatrix, HermitianMatrix,
};
use crate::metrics::MetricContext;
use crate::state::{DensityMatrix, Observable, RngStream, FAITHFUL_FLOOR};

/// Tolerance on `Σ K_s* K_s = I`.
pub const TRACE_PRESERVATION_TOL: f64 = 1e-10;

/// Which tensor factor a partial trace keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<CMatrix>,
}

/// `α(D)` together with the faithfulness repair record.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOutput {
    pub state: DensityMatrix,
    /// Smallest eigenvalue of `Σ K_s D K_s*` before any repair.
    pub raw_min_eigenvalue: f64,
    /// The output was mixed towards `I/k` to restore faithfulness.
    pub repaired: bool,
}

impl KrausChannel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::BadDims("a channel needs at least one Kraus operator".into()))?;
        let (out_dim, in_dim) = first.shape();
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::BadDims("empty Kraus operator".into()));
        }
        if let Some(k) = kraus.iter().find(|k| k.shape() != (out_dim, in_dim)) {
            return Err(Error::BadDims(format!(
                "Kraus operators must all be {out_dim}x{in_dim}, found {}x{}",
                k.nrows(),
                k.ncols()
            )));
        }
        let mut sum = CMatrix::zeros(in_dim, in_dim);
        for k in &kraus {
            sum += k.adjoint() * k;
        }
        let deviation = max_abs_entry(&(sum - CMatrix::identity(in_dim, in_dim)));
        if deviation > TRACE_PRESERVATION_TOL {
            return Err(Error::NotTracePreserving(deviation));
        }
        Ok(Self {
            in_dim,
            out_dim,
            kraus,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![CMatrix::identity(n, n)]).expect("identity is trace preserving")
    }

    /// Dephasing in the computational basis: `K_s = |s><s|`.
    pub fn pinching(n: usize) -> Self {
        let kraus = (0..n)
            .map(|s| {
                let mut k = CMatrix::zeros(n, n);
                k[(s, s)] = Complex64::new(1.0, 0.0);
                k
            })
            .collect();
        Self::new(kraus).expect("projectors sum to the identity")
    }

    /// Partial trace on `C^a ⊗ C^b`, keeping one factor.
    pub fn partial_trace(a: usize, b: usize, keep: Subsystem) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(Error::BadDims(format!("factor dimensions must be positive, got {a}x{b}")));
        }
        let n = a * b;
        let one = Complex64::new(1.0, 0.0);
        let kraus = match keep {
            // K_s = I_a ⊗ <s|
            Subsystem::First => (0..b)
                .map(|s| {
                    let mut k = CMatrix::zeros(a, n);
                    for i in 0..a {
                        k[(i, i * b + s)] = one;
                    }
                    k
                })
                .collect(),
            // K_s = <s| ⊗ I_b
            Subsystem::Second => (0..a)
                .map(|s| {
                    let mut k = CMatrix::zeros(b, n);
                    for j in 0..b {
                        k[(j, s * b + j)] = one;
                    }
                    k
                })
                .collect(),
        };
        Self::new(kraus)
    }

    /// Stinespring form of a random isometry `V: C^n -> C^k ⊗ C^e` obtained by
    /// orthonormalizing a Gaussian matrix; the Kraus operators are its `e`
    /// row blocks.
    pub fn random(n: usize, k: usize, e: usize, rng: &mut RngStream) -> Result<Self> {
        if n == 0 || k == 0 || e == 0 || k * e < n {
            return Err(Error::BadDims(format!(
                "need n, k, e >= 1 and k*e >= n (got n={n}, k={k}, e={e})"
            )));
        }
        let g = rng.complex_gaussian_matrix(k * e, n);
        let v = g.qr().q();
        let kraus = (0..e).map(|s| v.rows(s * k, k).into_owned()).collect();
        Self::new(kraus)
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// `Σ K_s X K_s*`.
    pub fn apply_matrix(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.shape() != (self.in_dim, self.in_dim) {
            return Err(Error::DimMismatch {
                expected: self.in_dim,
                found: x.nrows(),
            });
        }
        let mut out = CMatrix::zeros(self.out_dim, self.out_dim);
        for k in &self.kraus {
            out += k * x * k.adjoint();
        }
        Ok(out)
    }

    /// `Σ K_s* Y K_s`, the Hilbert-Schmidt adjoint.
    pub fn adjoint_matrix(&self, y: &CMatrix) -> Result<CMatrix> {
        if y.shape() != (self.out_dim, self.out_dim) {
            return Err(Error::DimMismatch {
                expected: self.out_dim,
                found: y.nrows(),
            });
        }
        let mut out = CMatrix::zeros(self.in_dim, self.in_dim);
        for k in &self.kraus {
            out += k.adjoint() * y * k;
        }
        Ok(out)
    }

    pub fn apply(&self, d: &DensityMatrix) -> Result<ChannelOutput> {
        let raw = HermitianMatrix::new(self.apply_matrix(d.matrix())?)?;
        let raw_min_eigenvalue = hermitian_eig(&raw).eigenvalues[0];
        if raw_min_eigenvalue >= FAITHFUL_FLOOR {
            return Ok(ChannelOutput {
                state: DensityMatrix::new(raw)?,
                raw_min_eigenvalue,
                repaired: false,
            });
        }
        let k = self.out_dim as f64;
        let delta = 10.0 * FAITHFUL_FLOOR * k;
        let mut mixed = raw.into_inner() * Complex64::new(1.0 - delta, 0.0);
        for i in 0..self.out_dim {
            mixed[(i, i)] += Complex64::new(delta / k, 0.0);
        }
        Ok(ChannelOutput {
            state: DensityMatrix::from_matrix(mixed)?,
            raw_min_eigenvalue,
            repaired: true,
        })
    }

    pub fn adjoint_apply(&self, a: &Observable) -> Result<Observable> {
        Observable::from_matrix(self.adjoint_matrix(a.matrix())?)
    }
}

fn require_traceless(a: &CMatrix) -> Result<()> {
    let tr = trace(a);
    if tr.norm() > scaled_tol(1e-12, max_abs_entry(a)) * a.nrows() as f64 {
        return Err(Error::NotTraceless(tr.norm()));
    }
    Ok(())
}

/// `F_D(A) >= F_{α(D)}(α(A))` for a traceless tangent direction `A`.
pub fn check_fisher_monotonicity(
    f: &StandardFunction,
    ch: &KrausChannel,
    d: &DensityMatrix,
    a: &Observable,
) -> Result<InequalityVerdict> {
    if a.dim() != ch.in_dim() || d.dim() != ch.in_dim() {
        return Err(Error::DimMismatch {
            expected: ch.in_dim(),
            found: a.dim().max(d.dim()),
        });
    }
    require_traceless(a.matrix())?;
    let out = ch.apply(d)?;
    let pushed = ch.apply_matrix(a.matrix())?;
    let lhs = MetricContext::new(d, f).gamma(a.matrix(), a.matrix())?.re;
    let rhs = MetricContext::new(&out.state, f).gamma(&pushed, &pushed)?.re;
    let mut v = InequalityVerdict::new("fisher-monotonicity", lhs, rhs, lhs - rhs);
    if out.repaired {
        v.notes = format!(
            "output state repaired (raw min eigenvalue {:.3e})",
            out.raw_min_eigenvalue
        );
    }
    Ok(v)
}

/// `qCov_D(α*(A), α*(A)) <= qCov_{α(D)}(A, A)`; `margin = rhs - lhs`.
pub fn check_cov_monotonicity(
    f: &StandardFunction,
    ch: &KrausChannel,
    d: &DensityMatrix,
    a: &Observable,
) -> Result<InequalityVerdict> {
    if d.dim() != ch.in_dim() {
        return Err(Error::DimMismatch {
            expected: ch.in_dim(),
            found: d.dim(),
        });
    }
    let out = ch.apply(d)?;
    let pulled = ch.adjoint_matrix(a.matrix())?;
    let lhs = MetricContext::new(d, f).qcov(&pulled, &pulled)?.re;
    let rhs = MetricContext::new(&out.state, f).qcov(a.matrix(), a.matrix())?.re;
    let mut v = InequalityVerdict::new("cov-monotonicity", lhs, rhs, rhs - lhs);
    if out.repaired {
        v.notes = format!(
            "output state repaired (raw min eigenvalue {:.3e})",
            out.raw_min_eigenvalue
        );
    }
    Ok(v)
}

/// Superoperator order `α J_D α* <= J_{α(D)}` tested on one vector `X` (an
/// output-space matrix): `<X, J_{α(D)} X> >= <α*X, J_D α*X>`.
pub fn check_superoperator_order(
    f: &StandardFunction,
    ch: &KrausChannel,
    d: &DensityMatrix,
    x: &CMatrix,
) -> Result<InequalityVerdict> {
    let out = ch.apply(d)?;
    let pulled = ch.adjoint_matrix(x)?;
    let inner = hs_inner(&pulled, &MetricContext::new(d, f).j_apply(&pulled)?)?.re;
    let outer = hs_inner(x, &MetricContext::new(&out.state, f).j_apply(x)?)?.re;
    Ok(InequalityVerdict::new("superoperator-order", outer, inner, outer - inner))
}
