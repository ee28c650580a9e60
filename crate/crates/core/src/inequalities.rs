//! Gram matrices of generalized covariances and of commutator metrics, and the
//! checks built on them: the scalar inequality `qCov^g(A,A) >= c γ^f([D,A],[D,A])`,
//! its determinant form, the dynamical uncertainty principle, Robertson's
//! inequality and monotonicity of the commutator Gram in the function.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::functions::{FunctionGrid, PositiveFunction, StandardFunction};
use crate::linalg::{
    commutator, commutator_i, determinant, expectation, hs_inner, max_abs_entry, real_projection,
    symmetric_eigenvalues, CMatrix, RMatrix,
};
use crate::metrics::{cov_symmetrized, MetricContext};
use crate::state::{DensityMatrix, Observable};

/// Default relative slack for inequality verdicts.
pub const INEQUALITY_RTOL: f64 = 1e-9;
/// Eigenvalues below this fraction of the norm count as zero.
pub const RANK_RTOL: f64 = 1e-10;
/// Relative slack for pointwise function hypotheses.
pub const CONDITION_RTOL: f64 = 1e-12;
const PHASE_RTOL: f64 = 1e-12;

/// Covariance Gram `G` and commutator-metric Gram `H` with their determinants.
#[derive(Debug, Clone, PartialEq)]
pub struct GramPair {
    pub g: RMatrix,
    pub h: RMatrix,
    pub det_g: f64,
    pub det_h: f64,
}

/// Outcome of one numerical check.
///
/// `margin` is the slack in the asserted direction: larger side minus smaller
/// side. Which of `lhs`/`rhs` is asserted larger depends on the check.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityVerdict {
    pub theorem: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// `max(|lhs|, |rhs|, 1e-30)`.
    pub scale: f64,
    pub holds: bool,
    pub equality_case: bool,
    /// Side conditions that are part of the claim (equality-case determinants,
    /// phase invariance) came out as expected.
    pub consistent: bool,
    pub notes: String,
}

impl InequalityVerdict {
    pub fn new(theorem: &str, lhs: f64, rhs: f64, margin: f64) -> Self {
        let scale = lhs.abs().max(rhs.abs()).max(1e-30);
        Self {
            theorem: theorem.to_string(),
            lhs,
            rhs,
            margin,
            scale,
            holds: margin >= -INEQUALITY_RTOL * scale,
            equality_case: false,
            consistent: true,
            notes: String::new(),
        }
    }

    pub fn holds_within(&self, rtol: f64) -> bool {
        self.consistent && self.margin >= -rtol * self.scale
    }

    fn note(&mut self, msg: &str) {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(msg);
    }

    fn mark_inconsistent(&mut self, msg: &str) {
        self.consistent = false;
        self.holds = false;
        self.note(msg);
    }
}

fn check_constant(name: &str, c: f64) -> Result<()> {
    if c.is_finite() && c >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("constant {name} must be finite and >= 0, got {c}")))
    }
}

fn check_dims(d: &DensityMatrix, obs: &[Observable]) -> Result<()> {
    if obs.is_empty() {
        return Err(Error::InvalidParameter("need at least one observable".into()));
    }
    for a in obs {
        if a.dim() != d.dim() {
            return Err(Error::DimMismatch {
                expected: d.dim(),
                found: a.dim(),
            });
        }
    }
    Ok(())
}

/// Points where a hypothesis on functions is tested: the grid and the
/// eigenvalue ratios of the state.
fn condition_points(grid: &FunctionGrid, d: &DensityMatrix) -> Result<FunctionGrid> {
    grid.with_points(&d.eigenvalue_ratios())
}

/// Fails with `ConditionViolated` at the first point where `larger(x) < smaller(x)`
/// beyond relative round-off.
fn require_pointwise(
    what: &str,
    points: &FunctionGrid,
    larger: impl Fn(f64) -> f64,
    smaller: impl Fn(f64) -> f64,
) -> Result<()> {
    for &x in points.points() {
        let (l, s) = (larger(x), smaller(x));
        if l - s < -CONDITION_RTOL * l.abs().max(s.abs()) {
            return Err(Error::ConditionViolated(format!(
                "{what} fails at x = {x:.6e} ({l:.6e} < {s:.6e})"
            )));
        }
    }
    Ok(())
}

/// `min_x g(x) - c (x-1)^2 / f(x)` over the grid.
pub fn pointwise_condition_margin(
    f: &StandardFunction,
    g: &StandardFunction,
    c: f64,
    grid: &FunctionGrid,
) -> f64 {
    grid.points()
        .iter()
        .map(|&x| g.value(x) - c * (x - 1.0) * (x - 1.0) / f.value(x))
        .fold(f64::INFINITY, f64::min)
}

fn require_theorem1_condition(f: &StandardFunction, g: &StandardFunction, c: f64, d: &DensityMatrix) -> Result<()> {
    check_constant("c", c)?;
    let pts = condition_points(&FunctionGrid::default(), d)?;
    require_pointwise(
        "g(x) >= c (x-1)^2 / f(x)",
        &pts,
        |x| g.value(x),
        |x| c * (x - 1.0) * (x - 1.0) / f.value(x),
    )
}

/// `[qCov_D^g(A_i, A_j)]`.
pub fn gram_qcov(g: &StandardFunction, d: &DensityMatrix, obs: &[Observable]) -> Result<RMatrix> {
    check_dims(d, obs)?;
    let ctx = MetricContext::new(d, g);
    let m = obs.len();
    let mut out = CMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = ctx.qcov(obs[i].matrix(), obs[j].matrix())?;
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
    }
    real_projection(&out)
}

fn gram_metric(ctx: &MetricContext, c: f64, dirs: &[CMatrix]) -> Result<RMatrix> {
    let m = dirs.len();
    let mut out = CMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = ctx.gamma(&dirs[i], &dirs[j])? * c;
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
    }
    real_projection(&out)
}

fn plain_commutators(d: &DensityMatrix, obs: &[Observable]) -> Result<Vec<CMatrix>> {
    obs.iter().map(|a| commutator(d.matrix(), a.matrix())).collect()
}

/// `[c γ_D^f([D, A_i], [D, A_j])]`.
pub fn gram_metric_commutators(
    f: &StandardFunction,
    c: f64,
    d: &DensityMatrix,
    obs: &[Observable],
) -> Result<RMatrix> {
    check_dims(d, obs)?;
    check_constant("c", c)?;
    gram_metric(&MetricContext::new(d, f), c, &plain_commutators(d, obs)?)
}

/// Same Gram built from `i[D, A_i]`.
pub fn gram_metric_commutators_i(
    f: &StandardFunction,
    c: f64,
    d: &DensityMatrix,
    obs: &[Observable],
) -> Result<RMatrix> {
    check_dims(d, obs)?;
    check_constant("c", c)?;
    let dirs = obs
        .iter()
        .map(|a| commutator_i(d.hermitian(), a.hermitian()).map(|h| h.into_inner()))
        .collect::<Result<Vec<_>>>()?;
    gram_metric(&MetricContext::new(d, f), c, &dirs)
}

pub fn gram_pair(
    f: &StandardFunction,
    g: &StandardFunction,
    c: f64,
    d: &DensityMatrix,
    obs: &[Observable],
) -> Result<GramPair> {
    let gm = gram_qcov(g, d, obs)?;
    let hm = gram_metric_commutators(f, c, d, obs)?;
    Ok(GramPair {
        det_g: determinant(&gm)?,
        det_h: determinant(&hm)?,
        g: gm,
        h: hm,
    })
}

/// `[-(i/2) Tr D [A_i, A_j]]`, real antisymmetric.
pub fn robertson_matrix(d: &DensityMatrix, obs: &[Observable]) -> Result<RMatrix> {
    check_dims(d, obs)?;
    let m = obs.len();
    let half_i = Complex64::new(0.0, -0.5);
    let mut out = CMatrix::zeros(m, m);
    for i in 0..m {
        for j in (i + 1)..m {
            let comm = commutator(obs[i].matrix(), obs[j].matrix())?;
            let v = half_i * expectation(d, &comm)?;
            out[(i, j)] = v;
            out[(j, i)] = -v;
        }
    }
    real_projection(&out)
}

/// Determinants of two PSD matrices, with those of numerically rank deficient
/// members set to zero. The rank cutoff is shared: `1e-10 * max(|A|, |B|)`.
pub fn classified_determinants(a: &RMatrix, b: &RMatrix) -> Result<(f64, f64)> {
    let (ea, eb) = (symmetric_eigenvalues(a), symmetric_eigenvalues(b));
    let norm = ea.iter().chain(&eb).fold(0.0f64, |acc, l| acc.max(l.abs()));
    let cutoff = RANK_RTOL * norm;
    let classify = |m: &RMatrix, ev: &[f64]| -> Result<f64> {
        if norm == 0.0 || ev.iter().any(|l| l.abs() <= cutoff) {
            Ok(0.0)
        } else {
            determinant(m)
        }
    };
    Ok((classify(a, &ea)?, classify(b, &eb)?))
}

/// Numerical rank of the Hilbert-Schmidt Gram of `A_i - Tr(D A_i) I`.
pub fn centered_rank(d: &DensityMatrix, obs: &[Observable]) -> Result<usize> {
    check_dims(d, obs)?;
    let centered = obs.iter().map(|a| a.centered(d)).collect::<Result<Vec<_>>>()?;
    let m = centered.len();
    let mut gram = RMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            gram[(i, j)] = hs_inner(centered[i].matrix(), centered[j].matrix())?.re;
        }
    }
    let ev = symmetric_eigenvalues(&gram);
    let lead = ev.last().copied().unwrap_or(0.0);
    if lead <= 0.0 {
        return Ok(0);
    }
    Ok(ev.iter().filter(|&&l| l > RANK_RTOL * lead).count())
}

/// `qCov_D^g(A, A) >= c γ_D^f([D,A], [D,A])`, given `g(x) >= c (x-1)^2 / f(x)`.
pub fn check_theorem1(
    f: &StandardFunction,
    g: &StandardFunction,
    c: f64,
    d: &DensityMatrix,
    a: &Observable,
) -> Result<InequalityVerdict> {
    check_dims(d, std::slice::from_ref(a))?;
    require_theorem1_condition(f, g, c, d)?;
    let lhs = MetricContext::new(d, g).qcov(a.matrix(), a.matrix())?.re;
    let comm = commutator(d.matrix(), a.matrix())?;
    let rhs = c * MetricContext::new(d, f).gamma(&comm, &comm)?.re;
    let mut v = InequalityVerdict::new("theorem1", lhs, rhs, lhs - rhs);
    let centered = a.centered(d)?;
    v.equality_case = max_abs_entry(centered.matrix()) <= 1e-12 * max_abs_entry(a.matrix());
    if v.equality_case {
        v.note("A is a multiple of the identity");
    }
    Ok(v)
}

/// `Det[qCov_D^g(A_i, A_j)] >= Det[c γ_D^f([D,A_i], [D,A_j])]` with the
/// equality clause: the centered `A_i` are linearly dependent exactly when
/// both determinants vanish.
pub fn check_theorem3(
    f: &StandardFunction,
    g: &StandardFunction,
    c: f64,
    d: &DensityMatrix,
    obs: &[Observable],
) -> Result<InequalityVerdict> {
    check_dims(d, obs)?;
    require_theorem1_condition(f, g, c, d)?;
    determinant_verdict("theorem3", f, g, c, d, obs)
}

fn determinant_verdict(
    name: &str,
    f: &StandardFunction,
    g: &StandardFunction,
    c: f64,
    d: &DensityMatrix,
    obs: &[Observable],
) -> Result<InequalityVerdict> {
    let pair = gram_pair(f, g, c, d, obs)?;
    let (det_g, det_h) = classified_determinants(&pair.g, &pair.h)?;
    let mut v = InequalityVerdict::new(name, det_g, det_h, det_g - det_h);
    let dependent = centered_rank(d, obs)? < obs.len();
    v.equality_case = dependent;
    if dependent {
        let hadamard: f64 = pair.g.diagonal().iter().product();
        let bound = RANK_RTOL * hadamard.abs().max(1e-30);
        if pair.det_g.abs() > bound || pair.det_h.abs() > bound {
            v.mark_inconsistent(&format!(
                "dependent observables but determinants {:.3e}, {:.3e} exceed {bound:.3e}",
                pair.det_g, pair.det_h
            ));
        } else {
            v.note("centered observables linearly dependent; both determinants vanish");
        }
    } else if det_g <= det_h {
        v.note("independent observables but no strict gap");
    }
    Ok(v)
}

/// The dynamical uncertainty principle: the determinant inequality with
/// `g = (1+x)/2` and `c = f(0)/2`, for which the hypothesis always holds.
pub fn check_dynamical_ucp(f: &StandardFunction, d: &DensityMatrix, obs: &[Observable]) -> Result<InequalityVerdict> {
    check_dims(d, obs)?;
    let c = 0.5 * f.at_zero();
    let mut v = determinant_verdict("dyn-ucp", f, &StandardFunction::Sld, c, d, obs)?;
    let plain = gram_metric_commutators(f, c, d, obs)?;
    let phased = gram_metric_commutators_i(f, c, d, obs)?;
    let diff = (&plain - &phased).abs().max();
    if diff > PHASE_RTOL * plain.abs().max().max(1e-300) {
        v.mark_inconsistent(&format!("i[D,A] and [D,A] Grams differ by {diff:.3e}"));
    }
    if c == 0.0 {
        v.note("f(0) = 0: right side vanishes");
    }
    Ok(v)
}

/// `Det[c γ^f([D,A_i],[D,A_j])] <= Det[d γ^g([D,A_i],[D,A_j])]` given
/// `c/f(t) <= d/g(t)`. `lhs` is the `f` side; `margin = rhs - lhs`.
pub fn check_theorem4(
    f: &StandardFunction,
    g: &StandardFunction,
    c: f64,
    dc: f64,
    d: &DensityMatrix,
    obs: &[Observable],
) -> Result<InequalityVerdict> {
    check_dims(d, obs)?;
    check_constant("c", c)?;
    check_constant("d", dc)?;
    let pts = condition_points(&FunctionGrid::default(), d)?;
    require_pointwise("c/f(t) <= d/g(t)", &pts, |t| dc * f.value(t), |t| c * g.value(t))?;
    let hf = gram_metric_commutators(f, c, d, obs)?;
    let hg = gram_metric_commutators(g, dc, d, obs)?;
    let (det_f, det_g) = classified_determinants(&hf, &hg)?;
    Ok(InequalityVerdict::new("theorem4", det_f, det_g, det_g - det_f))
}

/// Robertson: `Det[Cov_D(A_i, A_j)] >= Det[-(i/2) Tr D [A_i, A_j]]`.
pub fn check_robertson(d: &DensityMatrix, obs: &[Observable]) -> Result<InequalityVerdict> {
    check_dims(d, obs)?;
    let m = obs.len();
    let mut cov = RMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            cov[(i, j)] = cov_symmetrized(d, &obs[i], &obs[j])?;
        }
    }
    let lhs = determinant(&cov)?;
    let rhs = determinant(&robertson_matrix(d, obs)?)?;
    Ok(InequalityVerdict::new("robertson", lhs, rhs, lhs - rhs))
}
