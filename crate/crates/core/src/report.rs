//! Output formats: JSON summaries and CSV series.
//!
//! Column orders are fixed:
//!
//! | file              | columns                                                      |
//! |-------------------|--------------------------------------------------------------|
//! | trace             | `day,demand,sold,lost,end_inventory,order_placed,arrival`    |
//! | optimize history  | `r,q,mean_profit,std_profit,mean_lost_fraction`              |
//! | surface           | `r,q,mean_profit,std_profit`                                 |
//! | running mean / SE | `index,value`                                                |
//! | batch means       | `batch,mean`                                                 |
//! | autocorrelation   | `lag,value`                                                  |
//!
//! Absent trace fields (no order, no arrival) are written as empty cells.

use std::io::Write;

use serde::Serialize;

use crate::diagnostics::ConvergenceReport;
use crate::domain::DemandStats;
use crate::engine::SimulationResult;
use crate::montecarlo::ReplicationSummary;
use crate::optimize::{OptimizationResult, Point};
use crate::{Error, Result};

fn csv_err(e: csv::Error) -> Error {
    Error::invalid(format!("csv write failed: {e}"))
}

fn write_rows<W: Write>(writer: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::invalid(e.to_string()))
}

fn opt(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_trace_csv<W: Write>(writer: W, result: &SimulationResult) -> Result<()> {
    write_rows(
        writer,
        &["day", "demand", "sold", "lost", "end_inventory", "order_placed", "arrival"],
        result.trace.iter().map(|d| {
            vec![
                d.day.to_string(),
                d.demand.to_string(),
                d.sold.to_string(),
                d.lost.to_string(),
                d.end_inventory.to_string(),
                opt(d.order_placed),
                opt(d.arrival),
            ]
        }),
    )
}

pub fn write_history_csv<W: Write>(writer: W, result: &OptimizationResult) -> Result<()> {
    write_rows(
        writer,
        &["r", "q", "mean_profit", "std_profit", "mean_lost_fraction"],
        result.history.iter().map(|e| {
            vec![
                e.point.r.to_string(),
                e.point.q.to_string(),
                e.summary.mean_profit.to_string(),
                e.summary.std_profit.to_string(),
                e.summary.mean_lost_fraction.to_string(),
            ]
        }),
    )
}

pub fn write_surface_csv<W: Write>(writer: W, result: &OptimizationResult) -> Result<()> {
    write_rows(
        writer,
        &["r", "q", "mean_profit", "std_profit"],
        result.history.iter().map(|e| {
            vec![
                e.point.r.to_string(),
                e.point.q.to_string(),
                e.summary.mean_profit.to_string(),
                e.summary.std_profit.to_string(),
            ]
        }),
    )
}

/// Two-column series; the first column counts from `start`.
pub fn write_series_csv<W: Write>(writer: W, header: [&str; 2], start: usize, values: &[f64]) -> Result<()> {
    write_rows(
        writer,
        &header,
        values
            .iter()
            .enumerate()
            .map(|(i, v)| vec![(i + start).to_string(), v.to_string()]),
    )
}

/// Writes the four diagnostic series for one product into `dir`, named
/// `<id>_running_mean.csv`, `<id>_batch_means.csv`,
/// `<id>_standard_error.csv` and `<id>_autocorrelation.csv`.
pub fn write_convergence_csvs(dir: &std::path::Path, id: &str, report: &ConvergenceReport) -> Result<()> {
    let create = |name: &str| {
        let path = dir.join(format!("{id}_{name}.csv"));
        std::fs::File::create(&path).map_err(|e| Error::io(path, e))
    };
    write_series_csv(create("running_mean")?, ["index", "value"], 1, &report.running_mean)?;
    write_series_csv(create("batch_means")?, ["batch", "mean"], 1, &report.batch_means)?;
    write_series_csv(create("standard_error")?, ["index", "value"], 1, &report.standard_error)?;
    write_series_csv(create("autocorrelation")?, ["lag", "value"], 1, &report.autocorrelation)?;
    Ok(())
}

/// Per-product statistics as printed by `estimate`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    pub id: String,
    pub demand_probability: f64,
    pub mean_daily: f64,
    pub std_daily: f64,
    pub n_observations: usize,
    pub annual_demand: f64,
}

impl StatsReport {
    pub fn new(id: &str, stats: &DemandStats) -> Self {
        StatsReport {
            id: id.to_string(),
            demand_probability: stats.demand_probability,
            mean_daily: stats.mean_daily,
            std_daily: stats.std_daily,
            n_observations: stats.n_observations,
            annual_demand: stats.expected_annual(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductSummary {
    pub id: String,
    pub policy: crate::domain::Policy,
    #[serde(flatten)]
    pub summary: ReplicationSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateReport {
    pub policy: String,
    pub sampling: String,
    pub seed: u64,
    pub replications: usize,
    pub products: Vec<ProductSummary>,
    pub total_expected_profit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductOptimum {
    pub id: String,
    pub best_point: Point,
    #[serde(flatten)]
    pub best_summary: ReplicationSummary,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeReport {
    pub method: crate::optimize::Method,
    pub seed: u64,
    pub replications: usize,
    pub products: Vec<ProductOptimum>,
    pub total_profit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceSummary {
    pub id: String,
    pub n: usize,
    pub final_mean: f64,
    pub final_standard_error: f64,
    pub batch_size: usize,
    pub autocorrelation_in_band: f64,
    pub converged: bool,
}

impl ConvergenceSummary {
    pub fn new(id: &str, report: &ConvergenceReport) -> Self {
        ConvergenceSummary {
            id: id.to_string(),
            n: report.running_mean.len(),
            final_mean: report.final_mean,
            final_standard_error: report.final_standard_error,
            batch_size: report.batch_size,
            autocorrelation_in_band: report.autocorrelation_in_band,
            converged: report.converged,
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::invalid(e.to_string()))?;
    s.push('\n');
    Ok(s)
}
