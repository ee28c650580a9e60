use std::io::Write;

use qig_core::json::parse_matrix;
use qig_core::metrics::{cov_symmetrized, tilde_identity_residual, MetricContext};
use qig_core::{Observable, StandardFunction};

use crate::report::sig15;
use crate::{read_file, EvalArgs, Quantity};

fn observable(path: &std::path::Path) -> anyhow::Result<Observable> {
    let text = read_file(path)?;
    let m = parse_matrix(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    m.to_observable().map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

pub fn evaluate(args: &EvalArgs) -> anyhow::Result<f64> {
    let f: StandardFunction = args.f.parse()?;
    let text = read_file(&args.state)?;
    let d = parse_matrix(&text)
        .and_then(|m| m.to_density())
        .map_err(|e| anyhow::anyhow!("{}: {e}", args.state.display()))?;
    let a = observable(&args.a)?;
    let b = match &args.b {
        Some(path) => observable(path)?,
        None => a.clone(),
    };
    let ctx = MetricContext::new(&d, &f);
    Ok(match args.quantity {
        Quantity::Gamma => ctx.gamma(a.matrix(), b.matrix())?.re,
        Quantity::Qcov => ctx.qcov(a.matrix(), b.matrix())?.re,
        Quantity::Cov => cov_symmetrized(&d, &a, &b)?,
        Quantity::Skew => ctx.skew_information(&a, &b)?,
        Quantity::TildeResidual => tilde_identity_residual(&d, &f, &a, &b)?.residual,
    })
}

pub fn run(args: &EvalArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    writeln!(out, "{}", sig15(evaluate(args)?))?;
    Ok(())
}
