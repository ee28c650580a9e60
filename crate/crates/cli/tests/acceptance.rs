//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any failed.

use std::process::Command;
use std::time::{Duration, Instant};

use anyhow::ensure;

use qig_cli::{run_campaign, CampaignConfig, CampaignReport, ChannelKind, ChannelSource, Check};
use qig_core::functions::{check_standard_grid, gibi_margin, lemma4_margin, FunctionGrid, PositiveFunction};
use qig_core::inequalities::{check_theorem3, gram_pair, pointwise_condition_margin};
use qig_core::linalg::{pauli_x, CMatrix};
use qig_core::metrics::MetricContext;
use qig_core::state::{random_density, random_observable_tuple, RngStream};
use qig_core::{DensityMatrix, Observable, StandardFunction};

type Criterion = fn() -> anyhow::Result<String>;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn campaign(check: Check, dims: &[usize], samples: usize) -> CampaignConfig {
    let mut c = CampaignConfig::new(check);
    c.dims = dims.to_vec();
    c.samples = samples;
    c.seed = 20240917;
    c
}

fn worst_scaled(report: &CampaignReport) -> f64 {
    report.summary().min_scaled_margin.unwrap_or(f64::NAN)
}

fn within(limit: Duration, start: Instant) -> anyhow::Result<()> {
    let t = start.elapsed();
    ensure!(t < limit, "took {:.2?}, limit {limit:?}", t);
    Ok(())
}

fn qubit_closed_forms() -> anyhow::Result<String> {
    let start = Instant::now();
    let (p, q) = (0.7f64, 0.3f64);
    let d = DensityMatrix::diagonal(&[p, q])?;
    let a = Observable::new(pauli_x());
    let sld = MetricContext::new(&d, &StandardFunction::Sld);
    let wy = MetricContext::new(&d, &StandardFunction::WignerYanase);

    let gamma_sld = sld.gamma(a.matrix(), a.matrix())?.re;
    let qcov_sld = sld.qcov(a.matrix(), a.matrix())?.re;
    let gamma_wy = wy.gamma(a.matrix(), a.matrix())?.re;
    let skew_wy = wy.skew_information(&a, &a)?;

    let m_wy = ((p.sqrt() + q.sqrt()) / 2.0).powi(2);
    // Tr D A^2 - Tr sqrt(D) A sqrt(D) A with sqrt(D) taken entrywise on the diagonal.
    let mut root = CMatrix::zeros(2, 2);
    root[(0, 0)] = p.sqrt().into();
    root[(1, 1)] = q.sqrt().into();
    let x = a.matrix();
    let oracle = (d.matrix() * x * x).trace().re - (&root * x * &root * x).trace().re;
    let closed = 1.0 - 2.0 * (p * q).sqrt();

    let checks = [
        ("gamma_sld", gamma_sld, 4.0),
        ("qcov_sld", qcov_sld, 1.0),
        ("gamma_wy", gamma_wy, 2.0 / m_wy),
        ("skew_wy", skew_wy, closed),
        ("skew oracle", oracle, closed),
    ];
    let worst = checks.iter().map(|(_, v, t)| rel(*v, *t)).fold(0.0, f64::max);
    for (name, v, t) in checks {
        ensure!(rel(v, t) <= 1e-10, "{name} = {v}, expected {t}");
    }
    within(Duration::from_secs(1), start)?;
    Ok(format!("skew_wy = {skew_wy:.7}, worst relative error {worst:.1e}"))
}

fn skew_identity() -> anyhow::Result<String> {
    let start = Instant::now();
    let report = run_campaign(&campaign(Check::TildeIdentity, &[2, 3, 4, 5, 6], 100))?;
    ensure!(report.trials == 500 && report.records.len() == 500);
    ensure!(report.all_hold(), "{} trials exceed 1e-8 * scale", report.violations);
    within(Duration::from_secs(30), start)?;
    Ok(format!("500 trials, worst residual/scale {:.1e}", -worst_scaled(&report)))
}

fn tilde_closed_forms() -> anyhow::Result<String> {
    let grid = FunctionGrid::default();
    let (sld, rld) = (StandardFunction::Sld, StandardFunction::Rld);
    let mut worst = 0.0f64;
    for &x in grid.points() {
        for (lhs, rhs) in [
            (sld.tilde().value(x), rld.value(x)),
            (rld.tilde().value(x), sld.value(x)),
            (sld.tilde().tilde().value(x), sld.value(x)),
        ] {
            let err = (lhs - rhs).abs() / rhs.abs().max(1.0);
            worst = worst.max(err);
            ensure!(err <= 1e-12, "x = {x}: {lhs} vs {rhs}");
        }
    }
    for f in StandardFunction::catalog() {
        let r = check_standard_grid(&f.tilde(), &grid);
        ensure!(r.passes(), "{} fails the axioms: {r:?}", r.label);
    }
    Ok(format!("{} grid points, worst deviation {worst:.1e}; all tildes standard", grid.points().len()))
}

fn theorem1_campaign() -> anyhow::Result<String> {
    let mut config = campaign(Check::Theorem1, &[2, 3, 4, 5, 6], 200);
    config.tol = Some(1e-10);
    let report = run_campaign(&config)?;
    ensure!(report.records.len() == 1000, "only {} verdicts", report.records.len());
    ensure!(report.condition_violated == 0);
    ensure!(report.all_hold(), "{} violations", report.violations);
    Ok(format!("1000 trials, min scaled margin {:.3e}", worst_scaled(&report)))
}

fn theorem3_campaign() -> anyhow::Result<String> {
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    for m in 1..=3 {
        for n in [3, 4] {
            let mut config = campaign(Check::Theorem3, &[n], 500);
            config.m = m;
            let report = run_campaign(&config)?;
            ensure!(report.records.len() == 500 && report.condition_violated == 0);
            ensure!(report.all_hold(), "m={m} n={n}: {} violations", report.violations);
            worst = worst.min(worst_scaled(&report));
        }
    }
    // Duplicated observables: the centered tuple is dependent.
    let mut rng = RngStream::new(99);
    let cat = StandardFunction::catalog();
    let mut dup_trials = 0;
    for t in 0..200 {
        let f = &cat[t % cat.len()];
        let (n, m) = ([3, 4][t % 2], [2, 3][(t / 2) % 2]);
        let d = random_density(n, &mut rng);
        let mut obs = random_observable_tuple(n, m - 1, &mut rng, None)?;
        obs.push(obs[0].scale(1.0 + rng.uniform()));
        let c = 0.5 * f.at_zero();
        let v = check_theorem3(f, &StandardFunction::Sld, c, &d, &obs)?;
        ensure!(v.equality_case && v.consistent, "{f}: {v:?}");
        let pair = gram_pair(f, &StandardFunction::Sld, c, &d, &obs)?;
        let scale: f64 = pair.g.diagonal().iter().product::<f64>().max(1e-30);
        ensure!(pair.det_g.abs() <= 1e-10 * scale && pair.det_h.abs() <= 1e-10 * scale, "{pair:?}");
        dup_trials += 1;
    }
    within(Duration::from_secs(120), start)?;
    Ok(format!("3000 trials, min scaled margin {worst:.3e}; {dup_trials} duplicated tuples flagged as equality"))
}

fn kosaki_route() -> anyhow::Result<String> {
    let grid = FunctionGrid::default();
    let fs = [
        StandardFunction::WignerYanase,
        StandardFunction::kosaki(0.3)?,
        StandardFunction::kosaki(0.7)?,
    ];
    let mut min_margin = f64::INFINITY;
    for f in &fs {
        for g in &fs {
            let c = f.at_zero() * g.at_zero();
            let margin = pointwise_condition_margin(f, g, c, &grid);
            ensure!(margin >= 0.0, "({f}, {g}): pointwise margin {margin}");
            min_margin = min_margin.min(margin);
            let mut config = campaign(Check::Theorem3, &[3], 200);
            config.functions = vec![f.clone()];
            config.g = Some(g.clone());
            config.c = Some(c);
            let report = run_campaign(&config)?;
            ensure!(report.condition_violated == 0 && report.records.len() == 200);
            ensure!(report.all_hold(), "({f}, {g}): {} violations", report.violations);
        }
    }
    Ok(format!("9 pairs x 200 trials, min pointwise margin {min_margin:.3e}"))
}

fn lemma4_and_pairs() -> anyhow::Result<String> {
    let grid = FunctionGrid::default();
    let cat = StandardFunction::catalog();
    let mut worst = f64::INFINITY;
    for f in &cat {
        let l = lemma4_margin(f, &grid);
        ensure!(l >= -1e-12, "{f}: lemma margin {l}");
        worst = worst.min(l);
        for g in &cat {
            let p = gibi_margin(f, g, &grid);
            ensure!(p >= -1e-12, "({f}, {g}): margin {p}");
            worst = worst.min(p);
        }
    }
    Ok(format!("{} functions, {} pairs, min margin {worst:.3e}", cat.len(), cat.len() * cat.len()))
}

fn robertson_campaign() -> anyhow::Result<String> {
    let mut odd_rhs = 0.0f64;
    let mut worst = f64::INFINITY;
    for n in [2, 3] {
        for m in [2, 3] {
            let mut config = campaign(Check::Robertson, &[n], 500);
            config.m = m;
            let report = run_campaign(&config)?;
            ensure!(report.all_hold(), "n={n} m={m}: {} violations", report.violations);
            worst = worst.min(worst_scaled(&report));
            if m % 2 == 1 {
                for r in &report.records {
                    ensure!(r.rhs.abs() <= 1e-12, "odd m right side {}", r.rhs);
                    odd_rhs = odd_rhs.max(r.rhs.abs());
                }
            }
        }
    }
    Ok(format!("4 x 500 trials, min scaled margin {worst:.3e}, max odd-m right side {odd_rhs:.1e}"))
}

fn monotonicity() -> anyhow::Result<String> {
    let mut verdicts = 0;
    let runs: [(ChannelKind, &[usize], usize); 3] = [
        (ChannelKind::Random, &[2, 3, 4], 100),
        (ChannelKind::Pinching, &[2, 3, 4], 50),
        (ChannelKind::PartialTrace, &[4, 6], 50),
    ];
    for (kind, dims, samples) in runs {
        let mut config = campaign(Check::Monotone, dims, samples);
        config.channel = ChannelSource::Kind(kind);
        let report = run_campaign(&config)?;
        ensure!(report.all_hold(), "{kind:?}: {} violations", report.violations);
        verdicts += report.records.len();
    }
    let mut config = campaign(Check::Monotone, &[2, 3, 4], 50);
    config.channel = ChannelSource::Kind(ChannelKind::Identity);
    let report = run_campaign(&config)?;
    let worst_identity = report
        .records
        .iter()
        .map(|r| r.margin.abs() / r.lhs.abs().max(r.rhs.abs()).max(1.0))
        .fold(0.0, f64::max);
    ensure!(worst_identity <= 1e-11, "identity margin {worst_identity}");
    Ok(format!(
        "300 random channels + builtins, {verdicts} verdicts; identity |margin| <= {worst_identity:.1e}"
    ))
}

fn theorem4_campaign() -> anyhow::Result<String> {
    let grid = FunctionGrid::default();
    let (sld, wy) = (StandardFunction::Sld, StandardFunction::WignerYanase);
    let pointwise = grid.points().iter().map(|&t| sld.value(t) - wy.value(t)).fold(f64::INFINITY, f64::min);
    ensure!(pointwise >= 0.0, "SLD - WY = {pointwise} somewhere on the grid");
    let mut config = campaign(Check::Theorem4, &[3], 300);
    config.functions = vec![sld];
    config.g = Some(wy);
    config.c = Some(1.0);
    config.d = Some(1.0);
    let report = run_campaign(&config)?;
    ensure!(report.condition_violated == 0 && report.records.len() == 300);
    ensure!(report.all_hold(), "{} violations", report.violations);
    Ok(format!("300 trials, min scaled margin {:.3e}", worst_scaled(&report)))
}

fn determinism() -> anyhow::Result<String> {
    let args = ["verify", "dyn-ucp", "--dim", "3", "--m", "2", "--f", "wy", "--samples", "50", "--seed", "7"];
    let run = || Command::new(env!("CARGO_BIN_EXE_qig")).args(args).output();
    let (a, b) = (run()?, run()?);
    ensure!(a.status.success() && b.status.success(), "exit codes {:?} {:?}", a.status, b.status);
    ensure!(a.stdout == b.stdout, "outputs differ");
    let lines = a.stdout.iter().filter(|&&c| c == b'\n').count();
    ensure!(lines == 51, "expected 50 verdicts and a summary, got {lines} lines");
    Ok(format!("{} bytes identical across runs", a.stdout.len()))
}

fn main() {
    let criteria: [(&str, Criterion); 11] = [
        ("qubit closed forms", qubit_closed_forms),
        ("skew-information identity", skew_identity),
        ("tilde closed forms", tilde_closed_forms),
        ("single-observable inequality", theorem1_campaign),
        ("determinant inequality", theorem3_campaign),
        ("Kosaki constant route", kosaki_route),
        ("pointwise function margins", lemma4_and_pairs),
        ("Robertson", robertson_campaign),
        ("channel monotonicity", monotonicity),
        ("metric determinant monotonicity", theorem4_campaign),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.2} s]", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {e:#} [{secs:.2} s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
