//! Oracle-versus-approximation benchmark over the growing bipartite family.
//!
//! Each row is timed with one discarded warm-up and the median of three samples
//! on a monotonic clock. A sample repeats the solver until at least
//! [`MIN_SAMPLE`] has elapsed and reports the mean per call, so microsecond
//! solvers are not drowned in timer noise. Everything runs on the calling
//! thread.

use std::path::Path;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::approx::{ratio_bound, solve_approx};
use crate::error::{Error, Result};
use crate::generate::{gen_bipartite_family, BipartiteSpec};
use crate::oracle::{brute_force_solve, OracleOptions};

/// Minimum wall time covered by one timing sample.
pub const MIN_SAMPLE: Duration = Duration::from_millis(20);

/// Tolerance when checking a ratio against its bound.
const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub k_s: usize,
    pub k_p: usize,
    pub oracle_seconds: f64,
    pub approx_seconds: f64,
    pub oracle_value: f64,
    pub approx_value: f64,
    pub ratio: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedRow {
    pub row: usize,
    pub n: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub skipped: Vec<SkippedRow>,
}

/// Mean seconds per call of `f` in one sample.
fn sample<T>(mut f: impl FnMut() -> Result<T>) -> Result<f64> {
    let start = Instant::now();
    let mut calls = 0u32;
    loop {
        std::hint::black_box(f()?);
        calls += 1;
        let elapsed = start.elapsed();
        if elapsed >= MIN_SAMPLE {
            return Ok(elapsed.as_secs_f64() / f64::from(calls));
        }
    }
}

fn median_seconds<T>(mut f: impl FnMut() -> Result<T>) -> Result<f64> {
    f()?;
    let mut samples = [sample(&mut f)?, sample(&mut f)?, sample(&mut f)?];
    samples.sort_by(f64::total_cmp);
    Ok(samples[1])
}

/// `oracle / approx`, with `0 / 0` read as 1.
pub fn ratio(oracle_value: f64, approx_value: f64) -> f64 {
    if oracle_value == 0.0 && approx_value == 0.0 {
        1.0
    } else {
        oracle_value / approx_value
    }
}

/// Runs every row of the family and optionally writes the CSV.
pub fn run_bench(spec: &BipartiteSpec, options: OracleOptions, out: Option<&Path>) -> Result<BenchReport> {
    let options = OracleOptions {
        parallel: false,
        ..options
    };
    let mut report = BenchReport::default();
    for (r, inst) in gen_bipartite_family(spec)?.iter().enumerate() {
        let oracle = match brute_force_solve(inst, options) {
            Ok(res) => res,
            Err(e @ Error::OracleRefused { .. }) => {
                report.skipped.push(SkippedRow {
                    row: r,
                    n: inst.n(),
                    reason: e.to_string(),
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let approx = solve_approx(inst)?;
        let oracle_seconds = median_seconds(|| brute_force_solve(inst, options))?;
        let approx_seconds = median_seconds(|| solve_approx(inst))?;

        let row = BenchRow {
            n: inst.n(),
            k_s: inst.budgets.k_s,
            k_p: inst.budgets.k_p,
            oracle_seconds,
            approx_seconds,
            oracle_value: oracle.best_value,
            approx_value: approx.value,
            ratio: ratio(oracle.best_value, approx.value),
            bound: ratio_bound(inst)?.best(),
        };
        if !(row.ratio >= 1.0 - BOUND_SLACK && row.ratio <= row.bound + BOUND_SLACK) {
            return Err(Error::contract(format!(
                "row {r}: ratio {} outside [1, {}]",
                row.ratio, row.bound
            )));
        }
        report.rows.push(row);
    }
    if let Some(path) = out {
        write_csv(path, &report.rows)?;
    }
    Ok(report)
}

pub fn write_csv(path: &Path, rows: &[BenchRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<BenchRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}
