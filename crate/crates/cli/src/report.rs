use std::io::Write;

use serde::Serialize;

use crate::verify::CampaignReport;

/// One line of verify output. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictRecord {
    pub theorem: String,
    pub f: Option<String>,
    pub g: Option<String>,
    pub c: Option<f64>,
    pub d: Option<f64>,
    pub dim: usize,
    pub m: usize,
    pub seed: Option<u64>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub holds: bool,
    pub equality_case: bool,
}

impl VerdictRecord {
    /// `margin / max(|lhs|, |rhs|, 1e-30)`.
    pub fn scaled_margin(&self) -> f64 {
        self.margin / self.lhs.abs().max(self.rhs.abs()).max(1e-30)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub summary: String,
    pub trials: usize,
    pub verdicts: usize,
    pub violations: usize,
    pub condition_violated: usize,
    pub equality_cases: usize,
    pub min_margin: Option<f64>,
    pub min_scaled_margin: Option<f64>,
}

pub fn write_json_lines(out: &mut dyn Write, report: &CampaignReport) -> anyhow::Result<()> {
    for r in &report.records {
        serde_json::to_writer(&mut *out, r)?;
        out.write_all(b"\n")?;
    }
    serde_json::to_writer(&mut *out, &report.summary())?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn write_csv(out: &mut dyn Write, records: &[VerdictRecord]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record([
            "theorem", "f", "g", "c", "d", "dim", "m", "seed", "lhs", "rhs", "margin", "holds", "equality_case",
        ])?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// `x` rounded to 15 significant digits, printed in shortest form.
pub fn sig15(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.14e}").parse().expect("formatted float parses");
    format!("{rounded:?}")
}
