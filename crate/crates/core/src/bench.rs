//! Generator-to-reducer benchmark runs and their line-record reports.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::time::Duration;

use rayon::prelude::*;

use crate::reducer::{reduce_with, ReduceOptions};
use crate::seqgen::{random_instance, random_sequence, GenSpec};
use crate::tri::Setting;

pub const MAX_BENCH_EDGES: usize = 200_000;
pub const MAX_BENCH_LENGTH: usize = 200_000;

/// One benchmark run: a generated instance and sequence, then a reduction.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchCell {
    pub setting: Setting,
    pub edges: usize,
    pub length: usize,
    pub redundancy: f64,
    pub seed: u64,
}

impl BenchCell {
    pub fn spec(&self) -> GenSpec {
        GenSpec::new(self.setting, self.edges, self.length, self.redundancy, self.seed)
    }
}

/// Edge count leaving roughly twice as many flippable edges as the distinct
/// labels a sequence of `length` flips at redundancy `r` needs.
pub fn auto_edge_count(setting: Setting, length: usize, r: f64) -> usize {
    let d = ((length as f64 / r).round() as usize).max(1);
    match setting {
        Setting::ConvexNGon => 4 * d + 9,
        Setting::GeometricPlanar | Setting::Combinatorial => 2 * d + 30,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub cell: BenchCell,
    pub vertices: u32,
    pub distinct: usize,
    pub final_length: usize,
    pub removed_by_cancellation: usize,
    pub removed_by_transposition: usize,
    pub elapsed: Duration,
}

impl BenchRecord {
    pub fn measured_redundancy(&self) -> f64 {
        self.cell.length as f64 / self.distinct.max(1) as f64
    }

    pub fn gain(&self) -> usize {
        self.cell.length - self.final_length
    }

    pub fn gain_percent(&self) -> f64 {
        100.0 * self.gain() as f64 / self.cell.length.max(1) as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BenchOutcome {
    Run(BenchRecord),
    Skipped { cell: BenchCell, reason: String },
}

/// Least-squares slope of log(time) against log(f) for one setting and redundancy.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentFit {
    pub setting: Setting,
    pub redundancy: f64,
    pub points: usize,
    pub exponent: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchReport {
    pub outcomes: Vec<BenchOutcome>,
    pub fits: Vec<ExponentFit>,
}

/// Cartesian product of the parameters; `edges` of `None` picks
/// [`auto_edge_count`] per cell.
pub fn grid(
    settings: &[Setting],
    edges: &[Option<usize>],
    lengths: &[usize],
    redundancies: &[f64],
    seeds: &[u64],
) -> Vec<BenchCell> {
    let mut out = Vec::new();
    for &setting in settings {
        for &e in edges {
            for &length in lengths {
                for &redundancy in redundancies {
                    for &seed in seeds {
                        let edges = e.unwrap_or_else(|| auto_edge_count(setting, length, redundancy));
                        out.push(BenchCell { setting, edges, length, redundancy, seed });
                    }
                }
            }
        }
    }
    out
}

pub fn run_cell(cell: &BenchCell) -> BenchOutcome {
    let skip = |reason: String| BenchOutcome::Skipped { cell: cell.clone(), reason };
    if cell.edges > MAX_BENCH_EDGES || cell.length > MAX_BENCH_LENGTH {
        return skip(format!("exceeds the desk-scale cap ({MAX_BENCH_EDGES} edges, {MAX_BENCH_LENGTH} flips)"));
    }
    let spec = cell.spec();
    let t = match random_instance(&spec) {
        Ok(t) => t,
        Err(e) => return skip(e.to_string()),
    };
    let seq = match random_sequence(&t, &spec) {
        Ok(s) => s,
        Err(e) => return skip(e.to_string()),
    };
    let opts = ReduceOptions { verify_cursor: false, seed: Some(cell.seed) };
    match reduce_with(&seq, &t, &opts) {
        Ok((_, report)) => BenchOutcome::Run(BenchRecord {
            cell: cell.clone(),
            vertices: t.vertex_count(),
            distinct: seq.distinct_count(),
            final_length: report.final_length,
            removed_by_cancellation: report.removed_by_cancellation,
            removed_by_transposition: report.removed_by_transposition,
            elapsed: report.elapsed,
        }),
        Err(e) => skip(format!("reduction failed: {e}")),
    }
}

/// Runs every cell in parallel and fits runtime exponents.
pub fn run_bench(cells: &[BenchCell]) -> BenchReport {
    let outcomes: Vec<BenchOutcome> = cells.par_iter().map(run_cell).collect();
    let fits = fit_exponents(&outcomes);
    BenchReport { outcomes, fits }
}

fn r_key(r: f64) -> u64 {
    (r * 1000.0).round() as u64
}

pub fn fit_exponents(outcomes: &[BenchOutcome]) -> Vec<ExponentFit> {
    let mut groups: BTreeMap<(Setting, u64), BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    for o in outcomes {
        if let BenchOutcome::Run(r) = o {
            groups
                .entry((r.cell.setting, r_key(r.cell.redundancy)))
                .or_default()
                .entry(r.cell.length)
                .or_default()
                .push(r.elapsed.as_secs_f64().max(1e-9));
        }
    }
    let mut fits = Vec::new();
    for ((setting, rk), by_len) in groups {
        if by_len.len() < 2 {
            continue;
        }
        let pts: Vec<(f64, f64)> =
            by_len.iter().map(|(&f, ts)| ((f as f64).ln(), (ts.iter().sum::<f64>() / ts.len() as f64).ln())).collect();
        fits.push(ExponentFit { setting, redundancy: rk as f64 / 1000.0, points: pts.len(), exponent: slope(&pts) });
    }
    fits
}

/// Least-squares slope through `(x, y)` points.
pub fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

impl fmt::Display for BenchReport {
    /// One machine-parseable line per run, skip and fit.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            match o {
                BenchOutcome::Run(r) => writeln!(
                    f,
                    "run setting={} edges={} vertices={} f={} r={:.3} r_measured={:.3} final={} gain={} \
                     gain_pct={:.2} cancellations={} transpositions={} elapsed_ms={:.3} seed={}",
                    r.cell.setting,
                    r.cell.edges,
                    r.vertices,
                    r.cell.length,
                    r.cell.redundancy,
                    r.measured_redundancy(),
                    r.final_length,
                    r.gain(),
                    r.gain_percent(),
                    r.removed_by_cancellation,
                    r.removed_by_transposition,
                    r.elapsed.as_secs_f64() * 1e3,
                    r.cell.seed
                )?,
                BenchOutcome::Skipped { cell, reason } => writeln!(
                    f,
                    "skip setting={} edges={} f={} r={:.3} seed={} reason=\"{}\"",
                    cell.setting,
                    cell.edges,
                    cell.length,
                    cell.redundancy,
                    cell.seed,
                    reason.replace('"', "'")
                )?,
            }
        }
        for fit in &self.fits {
            writeln!(
                f,
                "fit setting={} r={:.3} points={} exponent={:.3}",
                fit.setting, fit.redundancy, fit.points, fit.exponent
            )?;
        }
        Ok(())
    }
}

impl BenchReport {
    /// Human-readable grid averaging seeds per (setting, edges, f, r).
    pub fn render_table(&self) -> String {
        type Key = (Setting, usize, usize, u64);
        let mut rows: BTreeMap<Key, Vec<&BenchRecord>> = BTreeMap::new();
        let mut skipped = 0;
        for o in &self.outcomes {
            match o {
                BenchOutcome::Run(r) => rows
                    .entry((r.cell.setting, r.cell.edges, r.cell.length, r_key(r.cell.redundancy)))
                    .or_default()
                    .push(r),
                BenchOutcome::Skipped { .. } => skipped += 1,
            }
        }
        let mut out = String::new();
        writeln!(
            out,
            "{:<14} {:>8} {:>8} {:>6} {:>6} {:>10} {:>10} {:>8} {:>12}",
            "setting", "edges", "f", "r", "runs", "final", "gain", "gain%", "time(ms)"
        )
        .unwrap();
        for ((setting, edges, f, rk), recs) in rows {
            let k = recs.len() as f64;
            let mean = |g: &dyn Fn(&BenchRecord) -> f64| recs.iter().map(|r| g(r)).sum::<f64>() / k;
            writeln!(
                out,
                "{:<14} {:>8} {:>8} {:>6.2} {:>6} {:>10.1} {:>10.1} {:>8.2} {:>12.2}",
                setting.name(),
                edges,
                f,
                rk as f64 / 1000.0,
                recs.len(),
                mean(&|r| r.final_length as f64),
                mean(&|r| r.gain() as f64),
                mean(&|r| r.gain_percent()),
                mean(&|r| r.elapsed.as_secs_f64() * 1e3)
            )
            .unwrap();
        }
        for fit in &self.fits {
            writeln!(
                out,
                "runtime exponent {} r={:.2}: {:.3} ({} lengths)",
                fit.setting, fit.redundancy, fit.exponent, fit.points
            )
            .unwrap();
        }
        if skipped > 0 {
            writeln!(out, "{skipped} cells skipped").unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = [100.0f64, 200.0, 400.0].iter().map(|&x| (x.ln(), (3.0 * x * x).ln())).collect();
        assert!((slope(&pts) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn small_grid_runs() {
        let cells = grid(&[Setting::ConvexNGon, Setting::Combinatorial], &[None], &[50, 100], &[2.0], &[1, 2]);
        assert_eq!(cells.len(), 8);
        let report = run_bench(&cells);
        assert_eq!(report.fits.len(), 2);
        for o in &report.outcomes {
            let BenchOutcome::Run(r) = o else { panic!("{o:?}") };
            assert_eq!(r.gain() + r.final_length, r.cell.length);
            assert_eq!(r.gain(), 2 * r.removed_by_cancellation + r.removed_by_transposition);
        }
        let text = report.to_string();
        assert_eq!(text.lines().filter(|l| l.starts_with("run ")).count(), 8);
        assert!(report.render_table().contains("convex"));
    }

    #[test]
    fn oversized_cells_are_skipped() {
        let cell = BenchCell {
            setting: Setting::ConvexNGon,
            edges: MAX_BENCH_EDGES + 1,
            length: 10,
            redundancy: 1.0,
            seed: 0,
        };
        assert!(matches!(run_cell(&cell), BenchOutcome::Skipped { .. }));
        let cell = BenchCell { setting: Setting::ConvexNGon, edges: 9, length: 100, redundancy: 1.0, seed: 0 };
        let BenchOutcome::Skipped { reason, .. } = run_cell(&cell) else { panic!() };
        assert!(reason.contains("distinct labels"));
    }
}
