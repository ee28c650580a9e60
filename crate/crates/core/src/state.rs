//! Faithful density matrices, observables and seeded random ensembles.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{
    center_observable, hermitian_eig, trace, CMatrix, HermitianMatrix, SpectralDecomposition,
};

/// Smallest eigenvalue a faithful state may have.
pub const FAITHFUL_FLOOR: f64 = 1e-8;
pub const TRACE_TOL: f64 = 1e-12;

/// Mixing constant used in [`random_density`]'s repair step, in units of the
/// faithfulness floor.
const REPAIR_FACTOR: f64 = 10.0;

/// Odd constant used to derive per-trial substreams from a base seed.
pub const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seed for trial `t` of a campaign seeded with `seed`.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    seed.wrapping_add(trial.wrapping_mul(SEED_STRIDE))
}

/// Deterministic ChaCha20 stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha20Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    /// Standard complex Gaussian: `E|z|^2 = 1`.
    pub fn complex_normal(&mut self) -> Complex64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Complex64::new(s * self.normal(), s * self.normal())
    }

    pub fn complex_gaussian_matrix(&mut self, rows: usize, cols: usize) -> CMatrix {
        // Row-major draw order so the stream layout does not depend on storage.
        let mut m = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = self.complex_normal();
            }
        }
        m
    }
}

/// Hermitian, unit trace, strictly positive matrix with its spectrum cached.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: HermitianMatrix,
    spectrum: SpectralDecomposition,
}

impl DensityMatrix {
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        let tr = trace(matrix.matrix());
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::TraceNotOne(tr.re));
        }
        let spectrum = hermitian_eig(&matrix);
        let min_eigenvalue = spectrum.eigenvalues[0];
        if min_eigenvalue < FAITHFUL_FLOOR {
            return Err(Error::NotFaithful {
                min_eigenvalue,
                floor: FAITHFUL_FLOOR,
            });
        }
        Ok(Self { matrix, spectrum })
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        Self::new(HermitianMatrix::new(m)?)
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let diag = vec![1.0 / n as f64; n];
        Self::new(HermitianMatrix::from_real_diagonal(&diag)).expect("I/n is a faithful state")
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_diagonal(probs))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn matrix(&self) -> &CMatrix {
        self.matrix.matrix()
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    pub fn lambda_min(&self) -> f64 {
        self.spectrum.eigenvalues[0]
    }

    /// All ratios `λ_i / λ_j`; the arguments at which the kernels sample `f`.
    pub fn eigenvalue_ratios(&self) -> Vec<f64> {
        let ev = self.eigenvalues();
        ev.iter()
            .flat_map(|a| ev.iter().map(move |b| a / b))
            .collect()
    }

    /// Stable identifier of the matrix entries.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for z in self.matrix().iter() {
            z.re.to_bits().hash(&mut h);
            z.im.to_bits().hash(&mut h);
        }
        h.finish()
    }
}

/// A Hermitian observable, optionally tagged with the state it was centered
/// against.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: HermitianMatrix,
    centered_for: Option<u64>,
}

impl Observable {
    pub fn new(matrix: HermitianMatrix) -> Self {
        Self {
            matrix,
            centered_for: None,
        }
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        Ok(Self::new(HermitianMatrix::new(m)?))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn matrix(&self) -> &CMatrix {
        self.matrix.matrix()
    }

    pub fn centered_for(&self) -> Option<u64> {
        self.centered_for
    }

    /// `A - Tr(DA) I`, tagged with the state's fingerprint.
    pub fn centered(&self, d: &DensityMatrix) -> Result<Self> {
        Ok(Self {
            matrix: center_observable(&self.matrix, d)?,
            centered_for: Some(d.fingerprint()),
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.scale(s),
            centered_for: self.centered_for,
        }
    }
}

impl From<HermitianMatrix> for Observable {
    fn from(m: HermitianMatrix) -> Self {
        Self::new(m)
    }
}

/// Ginibre state `G G* / Tr(G G*)`, mixed towards `I/n` when its smallest
/// eigenvalue falls below the faithfulness floor.
pub fn random_density(n: usize, rng: &mut RngStream) -> DensityMatrix {
    assert!(n >= 2, "random_density needs n >= 2");
    let g = rng.complex_gaussian_matrix(n, n);
    let w = &g * g.adjoint();
    let tr = trace(&w).re;
    let mut rho = w / Complex64::new(tr, 0.0);
    let h = HermitianMatrix::new(rho.clone()).expect("G G* is Hermitian");
    if hermitian_eig(&h).eigenvalues[0] < FAITHFUL_FLOOR {
        let delta = REPAIR_FACTOR * FAITHFUL_FLOOR * n as f64;
        rho *= Complex64::new(1.0 - delta, 0.0);
        for i in 0..n {
            rho[(i, i)] += Complex64::new(delta / n as f64, 0.0);
        }
    }
    DensityMatrix::from_matrix(rho).expect("normalized and repaired Ginibre state")
}

/// `(G + G*) / 2` with Gaussian `G`.
pub fn random_observable(n: usize, rng: &mut RngStream) -> Observable {
    assert!(n >= 2, "random_observable needs n >= 2");
    let g = rng.complex_gaussian_matrix(n, n);
    let h = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    Observable::from_matrix(h).expect("symmetrized matrix is Hermitian")
}

pub fn random_observable_tuple(
    n: usize,
    m: usize,
    rng: &mut RngStream,
    centered_against: Option<&DensityMatrix>,
) -> Result<Vec<Observable>> {
    if m == 0 {
        return Err(Error::InvalidParameter("observable count must be >= 1".into()));
    }
    (0..m)
        .map(|_| {
            let a = random_observable(n, rng);
            match centered_against {
                Some(d) => a.centered(d),
                None => Ok(a),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expectation, hs_inner, max_abs_entry, symmetric_eigenvalues, RMatrix};

    #[test]
    fn new_density_examples() {
        let d = DensityMatrix::maximally_mixed(3);
        for &l in d.eigenvalues() {
            assert!((l - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!(DensityMatrix::diagonal(&[0.7, 0.3]).is_ok());
        assert!(matches!(
            DensityMatrix::diagonal(&[1.0, 0.0]),
            Err(Error::NotFaithful { .. })
        ));
        assert!(matches!(
            DensityMatrix::diagonal(&[0.7, 0.7]),
            Err(Error::TraceNotOne(_))
        ));
    }

    #[test]
    fn random_density_is_normalized_and_reproducible() {
        for n in 2..=6 {
            let d = random_density(n, &mut RngStream::new(11 + n as u64));
            assert!((trace(d.matrix()).re - 1.0).abs() < 1e-12);
        }
        let a = random_density(4, &mut RngStream::new(5));
        let b = random_density(4, &mut RngStream::new(5));
        assert_eq!(a.matrix(), b.matrix());
    }

    #[test]
    fn random_density_is_faithful() {
        let mut rng = RngStream::new(2024);
        for _ in 0..1000 {
            assert!(random_density(4, &mut rng).lambda_min() >= FAITHFUL_FLOOR);
        }
    }

    #[test]
    fn random_observable_properties() {
        let a = random_observable(3, &mut RngStream::new(9));
        let m = a.matrix();
        assert!(max_abs_entry(&(m - m.adjoint())) <= 1e-15);
        assert_eq!(a, random_observable(3, &mut RngStream::new(9)));

        // Diagonal entries are N(0, 1): mean of 1e4 draws within 5 sigma of 0.
        let mut rng = RngStream::new(77);
        let draws = 10_000;
        let mean: f64 = (0..draws)
            .map(|_| random_observable(2, &mut rng).matrix()[(0, 0)].re)
            .sum::<f64>()
            / draws as f64;
        assert!(mean.abs() < 5.0 / (draws as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn observable_tuples() {
        let mut rng = RngStream::new(3);
        let d = random_density(3, &mut rng);
        let tuple = random_observable_tuple(3, 3, &mut rng, Some(&d)).unwrap();
        for a in &tuple {
            assert!(expectation(&d, a.matrix()).unwrap().norm() < 1e-12);
            assert_eq!(a.centered_for(), Some(d.fingerprint()));
        }
        assert_eq!(random_observable_tuple(3, 1, &mut rng, None).unwrap().len(), 1);
        assert!(random_observable_tuple(3, 0, &mut rng, None).is_err());
    }

    #[test]
    fn five_centered_qubit_observables_are_dependent() {
        let mut rng = RngStream::new(8);
        let d = random_density(2, &mut rng);
        let obs = random_observable_tuple(2, 5, &mut rng, Some(&d)).unwrap();
        let gram = RMatrix::from_fn(5, 5, |i, j| hs_inner(obs[i].matrix(), obs[j].matrix()).unwrap().re);
        let ev = symmetric_eigenvalues(&gram);
        let rank = ev.iter().filter(|&&l| l > 1e-10 * ev[4]).count();
        assert_eq!(rank, 3);
    }

    #[test]
    fn state_round_trip_through_matrix() {
        let d = random_density(3, &mut RngStream::new(1));
        let again = DensityMatrix::from_matrix(d.matrix().clone()).unwrap();
        assert_eq!(again, d);
    }

    #[test]
    fn spectrum_statistics_are_unitarily_invariant() {
        // Mean of the largest eigenvalue for plain draws vs draws conjugated by
        // a fixed random unitary; equal in distribution.
        let trials = 400;
        let mut rng = RngStream::new(31);
        let u = {
            let g = rng.complex_gaussian_matrix(3, 3);
            g.qr().q()
        };
        let (mut plain, mut rotated) = (Vec::new(), Vec::new());
        for _ in 0..trials {
            plain.push(*random_density(3, &mut rng).eigenvalues().last().unwrap());
            let d = random_density(3, &mut rng);
            let r = DensityMatrix::from_matrix(&u * d.matrix() * u.adjoint()).unwrap();
            rotated.push(*r.eigenvalues().last().unwrap());
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let var = |v: &[f64]| {
            let m = mean(v);
            v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
        };
        let se = ((var(&plain) + var(&rotated)) / trials as f64).sqrt();
        assert!((mean(&plain) - mean(&rotated)).abs() < 3.0 * se);
    }
}
