//! Operator monotone standard functions: `f(1) = 1`, `f(t) = t f(1/t)`.
//!
//! Each catalog member is a closed form. The transform
//! `f~(x) = ((x + 1) - (x - 1)^2 f(0) / f(x)) / 2` is represented symbolically
//! as [`StandardFunction::Tilde`], so the catalog is closed under it.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, CMatrix, HermitianMatrix};
use crate::state::RngStream;

/// Half-width of the interval around `x = 1` where removable singularities are
/// evaluated through their second order expansion.
pub const SERIES_GUARD: f64 = 1e-8;

/// A real function on `(0, inf)`. Implemented by the catalog and by probes.
pub trait PositiveFunction {
    /// Value at `x > 0`. Callers guarantee the domain.
    fn value(&self, x: f64) -> f64;
    fn label(&self) -> String;
}

#[derive(Debug, Clone, PartialEq)]
pub enum StandardFunction {
    /// `(1 + x) / 2`, the symmetric logarithmic derivative.
    Sld,
    /// `((1 + sqrt x) / 2)^2`.
    WignerYanase,
    /// `2x / (1 + x)`, the right logarithmic derivative.
    Rld,
    /// `(x - 1) / ln x`.
    KuboMori,
    /// `β(1-β)(x-1)^2 / ((x^β - 1)(x^(1-β) - 1))`, `0 < β < 1`.
    Kosaki(f64),
    Tilde(Box<StandardFunction>),
}

impl StandardFunction {
    pub fn kosaki(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "kosaki parameter must lie in (0, 1), got {beta}"
            )));
        }
        Ok(Self::Kosaki(beta))
    }

    pub fn tilde(&self) -> Self {
        Self::Tilde(Box::new(self.clone()))
    }

    /// Base functions plus a few transforms; used by the verification campaigns.
    pub fn catalog() -> Vec<Self> {
        let base = [
            Self::Sld,
            Self::WignerYanase,
            Self::Rld,
            Self::KuboMori,
            Self::Kosaki(0.3),
            Self::Kosaki(0.7),
        ];
        let mut all = base.to_vec();
        all.extend([
            Self::Sld.tilde(),
            Self::WignerYanase.tilde(),
            Self::KuboMori.tilde(),
            Self::Kosaki(0.3).tilde(),
        ]);
        all
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        check_domain(x)?;
        Ok(self.value(x))
    }

    /// `lim_{x -> 0+} f(x)`.
    pub fn at_zero(&self) -> f64 {
        match self {
            Self::Sld => 0.5,
            Self::WignerYanase => 0.25,
            Self::Rld | Self::KuboMori => 0.0,
            Self::Kosaki(b) => b * (1.0 - b),
            // f(0) > 0: the bracket tends to 1 - f(0)/f(0) = 0.
            // f(0) = 0: the second term vanishes identically and f~ is (x+1)/2.
            Self::Tilde(inner) => {
                if inner.at_zero() > 0.0 {
                    0.0
                } else {
                    0.5
                }
            }
        }
    }

    /// `f(y) - f(0)` for `0 < y <= 1`, computed without cancellation.
    fn excess(&self, y: f64) -> f64 {
        match self {
            Self::Sld => 0.5 * y,
            Self::WignerYanase => 0.25 * (2.0 * y.sqrt() + y),
            Self::Rld | Self::KuboMori => self.value(y),
            Self::Kosaki(b) => {
                if y < 0.5 {
                    let s = b * (1.0 - b);
                    let yb = y.powf(*b);
                    let yc = y.powf(1.0 - b);
                    let ly = y.ln();
                    let den = (-(b * ly).exp_m1()) * (-((1.0 - b) * ly).exp_m1());
                    s * (yb + yc - 3.0 * y + y * y) / den
                } else {
                    self.value(y) - self.at_zero()
                }
            }
            Self::Tilde(inner) => {
                if inner.at_zero() > 0.0 {
                    self.value(y)
                } else {
                    0.5 * y
                }
            }
        }
    }
}

fn check_domain(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(x))
    }
}

fn kubo_mori(x: f64) -> f64 {
    let u = x - 1.0;
    if u.abs() < SERIES_GUARD {
        1.0 + u / 2.0 - u * u / 12.0
    } else {
        u / u.ln_1p()
    }
}

fn kosaki(beta: f64, x: f64) -> f64 {
    let s = beta * (1.0 - beta);
    let u = x - 1.0;
    if u.abs() < SERIES_GUARD {
        1.0 + u / 2.0 - (1.0 - s) * u * u / 12.0
    } else {
        let t = u.ln_1p();
        s * u * u / ((beta * t).exp_m1() * ((1.0 - beta) * t).exp_m1())
    }
}

/// Evaluates the transform at `y = min(x, 1/x)` in a cancellation-free
/// rearrangement and reflects with `f~(x) = x f~(1/x)`:
/// `f~(y) = ((f(y) - f(0))/f(y) + y (1 + q (2 - y))) / 2`, `q = f(0)/f(y)`.
fn tilde(inner: &StandardFunction, x: f64) -> f64 {
    let f0 = inner.at_zero();
    if f0 == 0.0 {
        return 0.5 * (1.0 + x);
    }
    let y = if x <= 1.0 { x } else { 1.0 / x };
    let fy = inner.value(y);
    let q = f0 / fy;
    let t = 0.5 * (inner.excess(y) / fy + y * (1.0 + q * (2.0 - y)));
    if x <= 1.0 {
        t
    } else {
        x * t
    }
}

impl PositiveFunction for StandardFunction {
    fn value(&self, x: f64) -> f64 {
        match self {
            Self::Sld => 0.5 * (1.0 + x),
            Self::WignerYanase => {
                let r = 0.5 * (1.0 + x.sqrt());
                r * r
            }
            Self::Rld => 2.0 * x / (1.0 + x),
            Self::KuboMori => kubo_mori(x),
            Self::Kosaki(b) => kosaki(*b, x),
            Self::Tilde(inner) => tilde(inner, x),
        }
    }

    fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for StandardFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Sld => write!(f, "sld"),
            Self::WignerYanase => write!(f, "wy"),
            Self::Rld => write!(f, "rld"),
            Self::KuboMori => write!(f, "km"),
            Self::Kosaki(b) => write!(f, "kosaki:{b}"),
            Self::Tilde(inner) => write!(f, "tilde({inner})"),
        }
    }
}

impl FromStr for StandardFunction {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let s = spec.trim();
        let bad = |reason: &str| Error::FunctionSpec {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        match s {
            "sld" => return Ok(Self::Sld),
            "wy" => return Ok(Self::WignerYanase),
            "rld" => return Ok(Self::Rld),
            "km" => return Ok(Self::KuboMori),
            _ => {}
        }
        if let Some(beta) = s.strip_prefix("kosaki:") {
            let beta: f64 = beta
                .trim()
                .parse()
                .map_err(|_| bad("kosaki parameter is not a number"))?;
            return Self::kosaki(beta).map_err(|e| bad(&e.to_string()));
        }
        if let Some(rest) = s.strip_prefix("tilde(") {
            let inner = rest.strip_suffix(')').ok_or_else(|| bad("missing ')'"))?;
            return Ok(inner.parse::<Self>()?.tilde());
        }
        Err(bad("expected sld | wy | rld | km | kosaki:<beta> | tilde(<spec>)"))
    }
}

/// Split a comma separated list of specs, ignoring commas inside parentheses.
pub fn parse_function_list(list: &str) -> Result<Vec<StandardFunction>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in list.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(list[start..i].parse()?);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(list[start..].parse()?);
    Ok(out)
}

/// Functions that are *not* trusted members of the catalog. Reports on probes
/// are flagged as such.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Probe {
    /// `x^2`: monotone, normalized, but neither symmetric nor operator monotone.
    Square,
    /// `sqrt x`: the geometric mean; standard, but not part of the catalog.
    Sqrt,
}

impl FromStr for Probe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "xsq" => Ok(Self::Square),
            "sqrt" => Ok(Self::Sqrt),
            other => Err(Error::FunctionSpec {
                spec: other.to_string(),
                reason: "unknown probe (expected xsq | sqrt)".into(),
            }),
        }
    }
}

impl PositiveFunction for Probe {
    fn value(&self, x: f64) -> f64 {
        match self {
            Self::Square => x * x,
            Self::Sqrt => x.sqrt(),
        }
    }

    fn label(&self) -> String {
        match self {
            Self::Square => "probe:xsq".into(),
            Self::Sqrt => "probe:sqrt".into(),
        }
    }
}

/// `M_f(a, b) = b f(a/b)`.
pub fn mean(f: &StandardFunction, a: f64, b: f64) -> Result<f64> {
    check_domain(a)?;
    check_domain(b)?;
    Ok(mean_value(f, a, b))
}

/// Unchecked mean. Evaluated as `max(a,b) f(min/max)`, which equals
/// `b f(a/b)` for a symmetric `f` and is exactly symmetric in `(a, b)`.
pub(crate) fn mean_value(f: &StandardFunction, a: f64, b: f64) -> f64 {
    if a == b {
        return a;
    }
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    hi * f.value(lo / hi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionGrid {
    points: Vec<f64>,
}

impl FunctionGrid {
    pub fn new(mut points: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = points.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::Domain(bad));
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        Ok(Self { points })
    }

    /// `count` log-spaced points in `[lo, hi]`, plus `1`.
    pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) || count < 2 {
            return Err(Error::InvalidParameter(format!(
                "log grid needs 0 < lo < hi and count >= 2 (got {lo}, {hi}, {count})"
            )));
        }
        let (a, b) = (lo.log10(), hi.log10());
        let step = (b - a) / (count - 1) as f64;
        let mut pts: Vec<f64> = (0..count).map(|k| 10f64.powf(a + step * k as f64)).collect();
        pts.push(1.0);
        Self::new(pts)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// This grid with extra points merged in.
    pub fn with_points(&self, extra: &[f64]) -> Result<Self> {
        let mut pts = self.points.clone();
        pts.extend_from_slice(extra);
        Self::new(pts)
    }
}

impl Default for FunctionGrid {
    /// 200 log-spaced points in `[1e-6, 1e6]` together with `1`.
    fn default() -> Self {
        Self::log_spaced(1e-6, 1e6, 200).expect("static grid parameters are valid")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StandardReport {
    pub label: String,
    /// `max |f(x) - x f(1/x)| / f(x)` over the grid.
    pub max_symmetry_defect: f64,
    pub normalization_defect: f64,
    pub monotone: bool,
    pub normalized: bool,
    pub positive: bool,
}

impl StandardReport {
    pub fn passes(&self) -> bool {
        self.monotone && self.normalized && self.positive && self.max_symmetry_defect <= 1e-10
    }
}

pub fn check_standard_grid<F: PositiveFunction + ?Sized>(f: &F, grid: &FunctionGrid) -> StandardReport {
    let pts = grid.points();
    let vals: Vec<f64> = pts.iter().map(|&x| f.value(x)).collect();
    let max_symmetry_defect = pts
        .iter()
        .zip(&vals)
        .map(|(&x, &v)| ((v - x * f.value(1.0 / x)) / v).abs())
        .fold(0.0f64, f64::max);
    let monotone = vals
        .windows(2)
        .all(|w| w[1] - w[0] >= -1e-12 * w[0].abs().max(w[1].abs()));
    let normalization_defect = (f.value(1.0) - 1.0).abs();
    StandardReport {
        label: f.label(),
        max_symmetry_defect,
        normalization_defect,
        monotone,
        normalized: normalization_defect <= 1e-12,
        positive: vals.iter().all(|&v| v > 0.0),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneReport {
    pub trials: usize,
    pub seed: u64,
    /// Smallest eigenvalue of `f(A) - f(B)` seen over all sampled `A >= B > 0`.
    pub min_eigenvalue_of_gap: f64,
}

/// Random 2x2 spot check of operator monotonicity: `A = B + P` with `B > 0`
/// and `P >= 0`, then the smallest eigenvalue of `f(A) - f(B)`.
pub fn check_matrix_monotone_2x2<F: PositiveFunction + ?Sized>(
    f: &F,
    trials: usize,
    seed: u64,
) -> MonotoneReport {
    let mut rng = RngStream::new(seed);
    let mut min_gap = f64::INFINITY;
    for _ in 0..trials.max(1) {
        let g = rng.complex_gaussian_matrix(2, 2);
        let mut b = &g * g.adjoint();
        for i in 0..2 {
            b[(i, i)] += 1e-3;
        }
        // Rank-one increments are the hardest case for monotonicity.
        let p = if rng.uniform() < 0.5 {
            let v = rng.complex_gaussian_matrix(2, 1);
            &v * v.adjoint()
        } else {
            let h = rng.complex_gaussian_matrix(2, 2);
            &h * h.adjoint()
        };
        let a: CMatrix = &b + p;
        let fa = HermitianMatrix::new(a).expect("sum of PSD matrices").map_spectrum(|l| f.value(l));
        let fb = HermitianMatrix::new(b).expect("PSD by construction").map_spectrum(|l| f.value(l));
        let gap = HermitianMatrix::new(fa.into_inner() - fb.into_inner()).expect("difference of Hermitian");
        min_gap = min_gap.min(hermitian_eig(&gap).eigenvalues[0]);
    }
    MonotoneReport {
        trials: trials.max(1),
        seed,
        min_eigenvalue_of_gap: min_gap,
    }
}

/// `min_x f(x) - f(0)|x - 1|`.
pub fn lemma4_margin(f: &StandardFunction, grid: &FunctionGrid) -> f64 {
    let f0 = f.at_zero();
    grid.points()
        .iter()
        .map(|&x| f.value(x) - f0 * (x - 1.0).abs())
        .fold(f64::INFINITY, f64::min)
}

/// `min_x f(x) g(x) - f(0) g(0) (x - 1)^2`.
pub fn gibi_margin(f: &StandardFunction, g: &StandardFunction, grid: &FunctionGrid) -> f64 {
    let c = f.at_zero() * g.at_zero();
    grid.points()
        .iter()
        .map(|&x| f.value(x) * g.value(x) - c * (x - 1.0) * (x - 1.0))
        .fold(f64::INFINITY, f64::min)
}
