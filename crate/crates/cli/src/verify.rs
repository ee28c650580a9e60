//! Randomized verification campaigns.
//!
//! Trial `t` of dimension index `k` uses the function `functions[t % len]` and
//! the seed `trial_seed(seed, k * samples + t)`, so a trial can be replayed
//! from its verdict line alone. Trials run on the rayon pool and are emitted in
//! trial order.

use anyhow::{bail, Context};
use clap::ValueEnum;
use rayon::prelude::*;

use qig_core::channels::{check_cov_monotonicity, check_fisher_monotonicity, KrausChannel, Subsystem};
use qig_core::inequalities::{
    check_dynamical_ucp, check_robertson, check_theorem1, check_theorem3, check_theorem4, InequalityVerdict,
    INEQUALITY_RTOL,
};
use qig_core::json::parse_channel;
use qig_core::metrics::tilde_identity_residual;
use qig_core::state::{random_density, random_observable, random_observable_tuple, trial_seed, RngStream};
use qig_core::{DensityMatrix, Error, StandardFunction};

use crate::report::{Summary, VerdictRecord};
use crate::{read_file, require, VerifyArgs};

/// Default relative tolerance for the skew-information identity.
pub const IDENTITY_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    DynUcp,
    Theorem1,
    Theorem3,
    Theorem4,
    TildeIdentity,
    Robertson,
    Monotone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChannelKind {
    Random,
    Pinching,
    PartialTrace,
    Identity,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSource {
    Kind(ChannelKind),
    Fixed(KrausChannel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub check: Check,
    pub dims: Vec<usize>,
    pub m: usize,
    pub functions: Vec<StandardFunction>,
    pub g: Option<StandardFunction>,
    pub c: Option<f64>,
    pub d: Option<f64>,
    pub samples: usize,
    pub seed: u64,
    pub tol: Option<f64>,
    pub channel: ChannelSource,
}

impl CampaignConfig {
    pub fn new(check: Check) -> Self {
        Self {
            check,
            dims: vec![3],
            m: 2,
            functions: StandardFunction::catalog(),
            g: None,
            c: None,
            d: None,
            samples: 100,
            seed: 0,
            tol: None,
            channel: ChannelSource::Kind(ChannelKind::Random),
        }
    }

    pub fn from_args(args: &VerifyArgs) -> anyhow::Result<Self> {
        let functions = match &args.f {
            Some(list) => qig_core::functions::parse_function_list(list)?,
            None => StandardFunction::catalog(),
        };
        let g = args.g.as_deref().map(str::parse::<StandardFunction>).transpose()?;
        let (channel, dims) = match &args.channel {
            Some(path) => {
                let ch = parse_channel(&read_file(path)?)?
                    .to_channel()
                    .with_context(|| format!("channel in {}", path.display()))?;
                let n = ch.in_dim();
                (ChannelSource::Fixed(ch), vec![n])
            }
            None => (ChannelSource::Kind(args.channel_kind), args.dims.clone()),
        };
        let config = Self {
            check: args.check,
            dims,
            m: args.m,
            functions,
            g,
            c: args.c,
            d: args.d,
            samples: args.samples,
            seed: args.seed,
            tol: args.tol,
            channel,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        require(self.samples >= 1, "--samples must be at least 1")?;
        require(!self.dims.is_empty(), "at least one --dim is required")?;
        require(self.dims.iter().all(|&n| n >= 2), "--dim must be at least 2")?;
        require(self.m >= 1, "--m must be at least 1")?;
        require(!self.functions.is_empty(), "--f must name at least one function")?;
        for (name, v) in [("--c", self.c), ("--d", self.d), ("--tol", self.tol)] {
            if let Some(v) = v {
                require(v.is_finite() && v >= 0.0, &format!("{name} must be a finite non-negative number"))?;
            }
        }
        if self.check == Check::Monotone && self.channel == ChannelSource::Kind(ChannelKind::PartialTrace) {
            require(
                self.dims.iter().all(|n| n % 2 == 0),
                "--channel-kind partial-trace needs even --dim (traces out a qubit factor)",
            )?;
        }
        if let ChannelSource::Fixed(ch) = &self.channel {
            require(self.check == Check::Monotone, "--channel only applies to `verify monotone`")?;
            require(ch.in_dim() >= 2, "channel input dimension must be at least 2")?;
        }
        Ok(())
    }

    fn tolerance(&self) -> f64 {
        self.tol.unwrap_or(match self.check {
            Check::TildeIdentity => IDENTITY_RTOL,
            _ => INEQUALITY_RTOL,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignReport {
    pub check: Check,
    pub trials: usize,
    pub records: Vec<VerdictRecord>,
    pub violations: usize,
    /// Trials skipped because the function hypothesis failed for the sampled
    /// state. These are not violations.
    pub condition_violated: usize,
}

impl CampaignReport {
    pub fn summary(&self) -> Summary {
        let min = |it: &mut dyn Iterator<Item = f64>| it.fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.min(x))));
        Summary {
            summary: self.check.to_possible_value().expect("no skipped variants").get_name().to_string(),
            trials: self.trials,
            verdicts: self.records.len(),
            violations: self.violations,
            condition_violated: self.condition_violated,
            equality_cases: self.records.iter().filter(|r| r.equality_case).count(),
            min_margin: min(&mut self.records.iter().map(|r| r.margin)),
            min_scaled_margin: min(&mut self.records.iter().map(VerdictRecord::scaled_margin)),
        }
    }

    pub fn all_hold(&self) -> bool {
        self.violations == 0
    }
}

enum Outcome {
    Verdicts(Vec<VerdictRecord>),
    ConditionViolated,
}

struct Trial<'a> {
    f: &'a StandardFunction,
    dim: usize,
    seed: u64,
}

pub fn run_campaign(config: &CampaignConfig) -> anyhow::Result<CampaignReport> {
    config.validate()?;
    let trials: Vec<Trial> = config
        .dims
        .iter()
        .enumerate()
        .flat_map(|(k, &dim)| {
            (0..config.samples).map(move |t| Trial {
                f: &config.functions[t % config.functions.len()],
                dim,
                seed: trial_seed(config.seed, (k * config.samples + t) as u64),
            })
        })
        .collect();
    let outcomes = trials
        .par_iter()
        .map(|t| run_trial(config, t).with_context(|| format!("trial with seed {} (f = {}, dim {})", t.seed, t.f, t.dim)))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut report = CampaignReport {
        check: config.check,
        trials: trials.len(),
        records: Vec::new(),
        violations: 0,
        condition_violated: 0,
    };
    for o in outcomes {
        match o {
            Outcome::ConditionViolated => report.condition_violated += 1,
            Outcome::Verdicts(v) => report.records.extend(v),
        }
    }
    report.violations = report.records.iter().filter(|r| !r.holds).count();
    Ok(report)
}

fn record(
    config: &CampaignConfig,
    trial: &Trial,
    v: &InequalityVerdict,
    g: Option<&StandardFunction>,
    c: Option<f64>,
    d: Option<f64>,
    m: usize,
) -> VerdictRecord {
    VerdictRecord {
        theorem: v.theorem.clone(),
        f: Some(trial.f.to_string()),
        g: g.map(ToString::to_string),
        c,
        d,
        dim: trial.dim,
        m,
        seed: Some(trial.seed),
        lhs: v.lhs,
        rhs: v.rhs,
        margin: v.margin,
        holds: v.holds_within(config.tolerance()),
        equality_case: v.equality_case,
    }
}

fn run_trial(config: &CampaignConfig, trial: &Trial) -> anyhow::Result<Outcome> {
    let mut rng = RngStream::new(trial.seed);
    let (n, m, f) = (trial.dim, config.m, trial.f);
    let sld = StandardFunction::Sld;
    let one = |v: VerdictRecord| Ok(Outcome::Verdicts(vec![v]));
    match config.check {
        Check::DynUcp => {
            let d = random_density(n, &mut rng);
            let obs = random_observable_tuple(n, m, &mut rng, None)?;
            let v = check_dynamical_ucp(f, &d, &obs)?;
            one(record(config, trial, &v, Some(&sld), Some(0.5 * f.at_zero()), None, m))
        }
        Check::Theorem1 | Check::Theorem3 => {
            let g = config.g.as_ref().unwrap_or(&sld);
            let c = config.c.unwrap_or(0.5 * f.at_zero());
            let d = random_density(n, &mut rng);
            let m = if config.check == Check::Theorem1 { 1 } else { m };
            let obs = random_observable_tuple(n, m, &mut rng, None)?;
            let v = if config.check == Check::Theorem1 {
                check_theorem1(f, g, c, &d, &obs[0])
            } else {
                check_theorem3(f, g, c, &d, &obs)
            };
            match v {
                Ok(v) => one(record(config, trial, &v, Some(g), Some(c), None, m)),
                Err(Error::ConditionViolated(_)) => Ok(Outcome::ConditionViolated),
                Err(e) => Err(e.into()),
            }
        }
        Check::Theorem4 => {
            let wy = StandardFunction::WignerYanase;
            let g = config.g.as_ref().unwrap_or(&wy);
            let (c, dc) = (config.c.unwrap_or(1.0), config.d.unwrap_or(1.0));
            let d = random_density(n, &mut rng);
            let obs = random_observable_tuple(n, m, &mut rng, None)?;
            match check_theorem4(f, g, c, dc, &d, &obs) {
                Ok(v) => one(record(config, trial, &v, Some(g), Some(c), Some(dc), m)),
                Err(Error::ConditionViolated(_)) => Ok(Outcome::ConditionViolated),
                Err(e) => Err(e.into()),
            }
        }
        Check::TildeIdentity => {
            let d = random_density(n, &mut rng);
            let a = random_observable(n, &mut rng);
            let b = random_observable(n, &mut rng);
            let r = tilde_identity_residual(&d, f, &a, &b)?;
            // Reported as Cov = qCov^{f~} + skew so that the record's scale is the
            // covariance scale rather than that of the (possibly vanishing) skew side.
            let v = InequalityVerdict::new("tilde-identity", r.cov, r.lhs + r.qcov_tilde, -r.residual);
            let mut rec = record(config, trial, &v, Some(&f.tilde()), Some(0.5 * f.at_zero()), None, 2);
            rec.holds = r.within(config.tolerance());
            one(rec)
        }
        Check::Robertson => {
            let d = random_density(n, &mut rng);
            let obs = random_observable_tuple(n, m, &mut rng, None)?;
            let v = check_robertson(&d, &obs)?;
            let mut rec = record(config, trial, &v, None, None, None, m);
            rec.f = None;
            one(rec)
        }
        Check::Monotone => monotone_trial(config, trial, &mut rng),
    }
}

fn channel_for(source: &ChannelSource, n: usize, rng: &mut RngStream) -> anyhow::Result<KrausChannel> {
    Ok(match source {
        ChannelSource::Fixed(ch) => ch.clone(),
        ChannelSource::Kind(ChannelKind::Identity) => KrausChannel::identity(n),
        ChannelSource::Kind(ChannelKind::Pinching) => KrausChannel::pinching(n),
        ChannelSource::Kind(ChannelKind::PartialTrace) => {
            if !n.is_multiple_of(2) {
                bail!("partial trace needs an even dimension, got {n}");
            }
            KrausChannel::partial_trace(n / 2, 2, Subsystem::First)?
        }
        ChannelSource::Kind(ChannelKind::Random) => {
            let k = 2 + rng.below(n - 1);
            let e = n.div_ceil(k) + rng.below(2);
            KrausChannel::random(n, k, e, rng)?
        }
    })
}

fn monotone_trial(config: &CampaignConfig, trial: &Trial, rng: &mut RngStream) -> anyhow::Result<Outcome> {
    let n = trial.dim;
    let ch = channel_for(&config.channel, n, rng)?;
    let d = random_density(n, rng);
    let tangent = random_observable(n, rng).centered(&DensityMatrix::maximally_mixed(n))?;
    let fisher = check_fisher_monotonicity(trial.f, &ch, &d, &tangent)?;
    let mut out = vec![record(config, trial, &fisher, None, None, None, 1)];
    if ch.out_dim() >= 2 {
        let a = random_observable(ch.out_dim(), rng);
        let cov = check_cov_monotonicity(trial.f, &ch, &d, &a)?;
        out.push(record(config, trial, &cov, None, None, None, 1));
    }
    Ok(Outcome::Verdicts(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trials_are_laid_out_per_dimension() {
        let mut config = CampaignConfig::new(Check::DynUcp);
        config.dims = vec![2, 3];
        config.samples = 4;
        config.seed = 9;
        let report = run_campaign(&config).unwrap();
        assert_eq!(report.trials, 8);
        assert_eq!(report.records.len(), 8);
        assert_eq!(report.records[5].dim, 3);
        assert_eq!(report.records[5].seed, Some(trial_seed(9, 5)));
        assert_eq!(report.records[5].f.as_deref(), Some("wy"));
        assert!(report.all_hold());
    }

    #[test]
    fn parallel_runs_are_reproducible() {
        let mut config = CampaignConfig::new(Check::Monotone);
        config.samples = 20;
        let a = run_campaign(&config).unwrap();
        let b = run_campaign(&config).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.records.len(), 40);
    }

    #[test]
    fn failed_hypotheses_are_counted_separately() {
        let mut config = CampaignConfig::new(Check::Theorem1);
        config.functions = vec![StandardFunction::WignerYanase];
        config.c = Some(10.0);
        config.samples = 5;
        let report = run_campaign(&config).unwrap();
        assert_eq!(report.condition_violated, 5);
        assert!(report.records.is_empty());
        assert!(report.all_hold());
        assert_eq!(report.summary().min_margin, None);
    }

    #[test]
    fn validation() {
        let mut config = CampaignConfig::new(Check::Monotone);
        config.channel = ChannelSource::Kind(ChannelKind::PartialTrace);
        assert!(config.validate().is_err());
        config.dims = vec![4];
        assert!(config.validate().is_ok());
        config.samples = 0;
        assert!(config.validate().is_err());
        let mut config = CampaignConfig::new(Check::Robertson);
        config.dims = vec![1];
        assert!(config.validate().is_err());
    }
}
