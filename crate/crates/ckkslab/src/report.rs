//! Model-versus-published comparisons and CSV/JSON emission.

use serde::Serialize;
use thiserror::Error;

use crate::cost::{cost_of, cost_of_bootstrap, external_comparison, CostError, CostReport, Flag, OptimizationSet};
use crate::fixtures::{CostPreset, Targets};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error("no operation for row {0:?}")]
    UnknownRow(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("csv output: {0}")]
    Output(String),
}

/// One modeled table row in published units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub table: String,
    pub name: String,
    pub gop: f64,
    pub gmults: f64,
    pub gb: f64,
    pub reads_gb: f64,
    pub writes_gb: f64,
    pub key_gb: f64,
    pub ai: f64,
}

impl TableRow {
    pub fn new(table: &str, r: &CostReport) -> Self {
        Self {
            table: table.to_string(),
            name: r.name.clone(),
            gop: r.gop(),
            gmults: r.total_mults / 1e9,
            gb: r.gb(),
            reads_gb: r.dram_limb_reads / 1e9,
            writes_gb: r.dram_limb_writes / 1e9,
            key_gb: r.dram_key_reads / 1e9,
            ai: r.arithmetic_intensity(),
        }
    }
}

/// Evaluates every published cost row under `preset`.
pub fn cost_tables(preset: &CostPreset, targets: &Targets) -> Result<Vec<TableRow>, ReportError> {
    let model = preset.model();
    let level = preset.workload.level;
    let (_, phases) = cost_of_bootstrap(&model, &preset.workload.bootstrap)?;
    let mut out = Vec::with_capacity(targets.cost_rows.len());
    for t in &targets.cost_rows {
        let report = if t.table == "bootstrapping" {
            let counts = match t.name.as_str() {
                "CoeffToSlot" => phases.coeff_to_slot,
                "PolyEval" => phases.sine,
                "SlotToCoeff" => phases.slot_to_coeff,
                other => return Err(ReportError::UnknownRow(other.to_string())),
            };
            CostReport::from_counts(&t.name, counts, preset.log_n)
        } else {
            let op = preset.op(&t.name).ok_or_else(|| ReportError::UnknownRow(t.name.clone()))?;
            let mut r = cost_of(&op, &model, level)?;
            r.name = t.name.clone();
            r
        };
        out.push(TableRow::new(&t.table, &report));
    }
    Ok(out)
}

/// Relative deviation of one gated cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation {
    pub table: String,
    pub name: String,
    pub column: String,
    pub model: f64,
    pub published: f64,
    pub relative: f64,
    pub within: bool,
}

fn deviation(table: &str, name: &str, column: &str, model: f64, published: f64, tol: f64) -> Deviation {
    let relative = if published == 0.0 { model.abs() } else { model / published - 1.0 };
    // Published intensities carry two decimals.
    let slack = if column == "ai" { 0.005 / published.abs().max(1e-12) } else { 0.0 };
    Deviation {
        table: table.to_string(),
        name: name.to_string(),
        column: column.to_string(),
        model,
        published,
        relative,
        within: relative.abs() <= tol + slack,
    }
}

/// Per-cell deviations on the GOP, GB and AI columns.
pub fn cost_deviations(rows: &[TableRow], targets: &Targets) -> Vec<Deviation> {
    let tol = targets.tolerance;
    rows.iter()
        .zip(&targets.cost_rows)
        .flat_map(|(r, t)| {
            [("gop", r.gop, t.gop), ("gb", r.gb, t.gb), ("ai", r.ai, t.ai)]
                .map(|(c, m, p)| deviation(&t.table, &t.name, c, m, p, tol))
        })
        .collect()
}

/// Optimized-preset rows; only the gated ones enter the deviation list.
pub fn optimized_rows(preset: &CostPreset, targets: &Targets) -> Result<(Vec<TableRow>, Vec<Deviation>), ReportError> {
    let model = preset.model();
    let mut rows = Vec::new();
    let mut devs = Vec::new();
    for t in &targets.optimized_rows {
        let op = preset.op(&t.name).ok_or_else(|| ReportError::UnknownRow(t.name.clone()))?;
        let mut r = cost_of(&op, &model, preset.workload.level)?;
        r.name = t.name.clone();
        let row = TableRow::new("optimized", &r);
        if t.gated {
            for (c, m, p) in [("gop", row.gop, t.gop), ("gb", row.gb, t.gb), ("ai", row.ai, t.ai)] {
                devs.push(deviation("optimized", &t.name, c, m, p, targets.tolerance));
            }
        }
        rows.push(row);
    }
    Ok((rows, devs))
}

/// Bootstrap cost as optimizations are enabled one by one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepStep {
    pub step: usize,
    pub flag: String,
    pub gop: f64,
    pub gb: f64,
    pub ai: f64,
}

pub fn sweep(preset: &CostPreset) -> Result<Vec<SweepStep>, ReportError> {
    (0..=Flag::ALL.len())
        .map(|k| {
            let flags = OptimizationSet::prefix(k);
            let (r, _) = cost_of_bootstrap(&preset.model_with(flags), &preset.workload.bootstrap)?;
            Ok(SweepStep {
                step: k,
                flag: if k == 0 { "none".into() } else { Flag::ALL[k - 1].name().into() },
                gop: r.gop(),
                gb: r.gb(),
                ai: r.arithmetic_intensity(),
            })
        })
        .collect()
}

/// Throughput of the published comparison rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThroughputRow {
    pub name: String,
    pub dram_gb: f64,
    pub brt_ms: f64,
    pub throughput: f64,
    pub published: f64,
    pub relative: f64,
}

pub fn throughput_table(targets: &Targets) -> Result<Vec<ThroughputRow>, ReportError> {
    let rows: Vec<_> = targets.comparison.rows.iter().map(|r| r.row.clone()).collect();
    let got = external_comparison(&rows, targets.comparison.bandwidth)?;
    Ok(got
        .into_iter()
        .zip(&targets.comparison.rows)
        .map(|(g, t)| ThroughputRow {
            name: g.name,
            dram_gb: g.dram_gb,
            brt_ms: g.brt_ms,
            throughput: g.throughput,
            published: t.expected,
            relative: g.throughput / t.expected - 1.0,
        })
        .collect())
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| ReportError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| ReportError::Output(e.to_string()))
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String, ReportError> {
    Ok(serde_json::to_string_pretty(value)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deviation_slack() {
        assert!(deviation("t", "n", "gop", 1.04, 1.0, 0.05).within);
        assert!(!deviation("t", "n", "gop", 1.06, 1.0, 0.05).within);
        // 0.04 vs 0.0434: rounding of the published value is tolerated.
        assert!(deviation("t", "n", "ai", 0.0434, 0.04, 0.05).within);
    }

    #[test]
    fn csv_has_header() {
        let s = to_csv(&[SweepStep { step: 0, flag: "none".into(), gop: 1.0, gb: 2.0, ai: 0.5 }]).unwrap();
        assert_eq!(s.lines().next(), Some("step,flag,gop,gb,ai"));
    }
}
