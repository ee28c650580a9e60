use std::io::Write;

use serde::Serialize;

use qig_core::functions::{
    check_matrix_monotone_2x2, check_standard_grid, gibi_margin, lemma4_margin, parse_function_list, FunctionGrid,
    PositiveFunction, Probe, StandardFunction,
};

use crate::report::sig15;
use crate::{FunctionsArgs, TableFormat};

/// Smallest eigenvalue of `f(A) - f(B)` tolerated as round-off.
const OPERATOR_GAP_TOL: f64 = -1e-10;
const MARGIN_TOL: f64 = -1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionRow {
    pub function: String,
    pub probe: bool,
    pub f0: Option<f64>,
    pub normalization_defect: f64,
    pub symmetry_defect: f64,
    pub monotone: bool,
    pub operator_gap_2x2: f64,
    pub lemma4_margin: Option<f64>,
    /// Smallest `f g - f(0) g(0) (x-1)^2` margin over the other listed functions.
    pub pair_margin: Option<f64>,
    pub standard: bool,
}

fn base_row<F: PositiveFunction + ?Sized>(f: &F, grid: &FunctionGrid, samples: usize, seed: u64) -> FunctionRow {
    let report = check_standard_grid(f, grid);
    let gap = check_matrix_monotone_2x2(f, samples, seed).min_eigenvalue_of_gap;
    FunctionRow {
        function: report.label.clone(),
        probe: false,
        f0: None,
        normalization_defect: report.normalization_defect,
        symmetry_defect: report.max_symmetry_defect,
        monotone: report.monotone,
        operator_gap_2x2: gap,
        lemma4_margin: None,
        pair_margin: None,
        standard: report.passes() && gap >= OPERATOR_GAP_TOL,
    }
}

pub fn rows(list: &[StandardFunction], probes: &[Probe], samples: usize, seed: u64) -> Vec<FunctionRow> {
    let grid = FunctionGrid::default();
    let mut out: Vec<FunctionRow> = list
        .iter()
        .map(|f| {
            let mut row = base_row(f, &grid, samples, seed);
            let l4 = lemma4_margin(f, &grid);
            let pair = list.iter().map(|g| gibi_margin(f, g, &grid)).fold(f64::INFINITY, f64::min);
            row.f0 = Some(f.at_zero());
            row.lemma4_margin = Some(l4);
            row.pair_margin = Some(pair);
            row.standard &= l4 >= MARGIN_TOL && pair >= MARGIN_TOL;
            row
        })
        .collect();
    out.extend(probes.iter().map(|p| FunctionRow {
        probe: true,
        ..base_row(p, &grid, samples, seed)
    }));
    out
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.3e}"))
}

fn status(r: &FunctionRow) -> &'static str {
    match (r.probe, r.standard) {
        (false, true) => "pass",
        (false, false) => "FAIL",
        (true, true) => "probe: standard",
        (true, false) => "probe: non-standard",
    }
}

pub fn write_table(out: &mut dyn Write, rows: &[FunctionRow]) -> std::io::Result<()> {
    let header = [
        "function", "f(0)", "norm", "symmetry", "monotone", "2x2 gap", "lemma4", "pair", "status",
    ];
    let body: Vec<[String; 9]> = rows
        .iter()
        .map(|r| {
            [
                r.function.clone(),
                r.f0.map_or_else(|| "-".to_string(), sig15),
                format!("{:.1e}", r.normalization_defect),
                format!("{:.1e}", r.symmetry_defect),
                r.monotone.to_string(),
                format!("{:.3e}", r.operator_gap_2x2),
                opt(r.lemma4_margin),
                opt(r.pair_margin),
                status(r).to_string(),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|j| body.iter().map(|row| row[j].len()).chain([header[j].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    writeln!(out, "{}", line(header.to_vec()))?;
    for row in &body {
        writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
    }
    Ok(())
}

pub fn run(args: &FunctionsArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let list = match &args.list {
        Some(spec) => parse_function_list(spec)?,
        None if args.probe.is_empty() => StandardFunction::catalog(),
        None => Vec::new(),
    };
    let probes = args
        .probe
        .iter()
        .map(|p| p.parse::<Probe>())
        .collect::<qig_core::Result<Vec<_>>>()?;
    let rows = rows(&list, &probes, args.samples, args.seed);
    match args.format {
        TableFormat::Table => write_table(out, &rows)?,
        TableFormat::Json => {
            for r in &rows {
                serde_json::to_writer(&mut *out, r)?;
                out.write_all(b"\n")?;
            }
        }
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in &rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
