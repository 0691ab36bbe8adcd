//! CSV output, per-cell summaries and the two plots.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use crate::svg::{LinePlot, Series};
use crate::sweep::{SweepRecord, VariantName};

pub const RESULTS_FILE: &str = "results.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const PLOTS_DIR: &str = "plots";

/// Mean iterations of one `(N, beta, variant)` cell. The ratio is
/// `mean(Original) / mean(Alternative)` at the same `(N, beta)` and is
/// repeated on both rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub beta: f64,
    pub variant: VariantName,
    pub runs: usize,
    pub converged: usize,
    /// Over converged runs only; empty when none converged.
    pub mean_iterations: Option<f64>,
    pub ratio: Option<f64>,
}

// beta is in (0, 1), where the bit pattern orders like the value
type CellKey = (usize, u64, VariantName);

pub fn summarize(records: &[SweepRecord]) -> Result<Vec<SummaryRow>> {
    if records.is_empty() {
        bail!("no records");
    }
    let mut cells: BTreeMap<CellKey, (usize, usize, u64)> = BTreeMap::new();
    for r in records {
        let c = cells.entry((r.n, r.beta.to_bits(), r.variant)).or_default();
        c.0 += 1;
        if r.converged {
            c.1 += 1;
            c.2 += r.iterations as u64;
        }
    }
    let mean = |key: &CellKey| {
        cells
            .get(key)
            .filter(|c| c.1 > 0)
            .map(|&(_, conv, total)| total as f64 / conv as f64)
    };
    Ok(cells
        .iter()
        .map(|(key, &(runs, converged, _))| {
            let (n, bits, variant) = *key;
            let orig = mean(&(n, bits, VariantName::Original));
            let alt = mean(&(n, bits, VariantName::Alternative));
            SummaryRow {
                n,
                beta: f64::from_bits(bits),
                variant,
                runs,
                converged,
                mean_iterations: mean(key),
                ratio: match (orig, alt) {
                    (Some(o), Some(a)) if a > 0.0 => Some(o / a),
                    _ => None,
                },
            }
        })
        .collect())
}

pub fn records_to_csv(records: &[SweepRecord]) -> Result<Vec<u8>> {
    to_csv(records)
}

pub fn summary_to_csv(rows: &[SummaryRow]) -> Result<Vec<u8>> {
    to_csv(rows)
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(w.into_inner()?)
}

pub fn read_records(path: &Path) -> Result<Vec<SweepRecord>> {
    read_csv(path)
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    read_csv(path)
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    r.deserialize()
        .collect::<Result<Vec<T>, _>>()
        .with_context(|| format!("parsing {}", path.display()))
}

fn write(path: PathBuf, bytes: &[u8]) -> Result<()> {
    fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Writes `results.csv`, `summary.csv` and `plots/{iterations,ratio}.svg`
/// under `out_dir`, which is created if missing.
pub fn emit_report(records: &[SweepRecord], out_dir: &Path) -> Result<Vec<SummaryRow>> {
    let summary = summarize(records)?;
    let plots = out_dir.join(PLOTS_DIR);
    fs::create_dir_all(&plots).with_context(|| format!("creating {}", plots.display()))?;
    write(out_dir.join(RESULTS_FILE), &records_to_csv(records)?)?;
    write(out_dir.join(SUMMARY_FILE), &summary_to_csv(&summary)?)?;
    write(
        plots.join("iterations.svg"),
        iterations_plot(&summary).render().as_bytes(),
    )?;
    write(plots.join("ratio.svg"), ratio_plot(&summary).render().as_bytes())?;
    Ok(summary)
}

fn counts(summary: &[SummaryRow]) -> Vec<usize> {
    let mut ns: Vec<usize> = summary.iter().map(|r| r.n).collect();
    ns.dedup();
    ns
}

/// Mean iterations against beta: solid lines for the original scheme,
/// dashed for the alternative, one color per N.
pub fn iterations_plot(summary: &[SummaryRow]) -> LinePlot {
    let mut plot = LinePlot::new(
        "Mean iterations to reach the true-error tolerance",
        "beta",
        "mean iterations",
    );
    for (color, n) in counts(summary).into_iter().enumerate() {
        for variant in [VariantName::Original, VariantName::Alternative] {
            let points = summary
                .iter()
                .filter(|r| r.n == n && r.variant == variant)
                .map(|r| (r.beta, r.mean_iterations.unwrap_or(f64::NAN)))
                .collect();
            plot.series.push(Series {
                label: format!("N={n} {variant:?}"),
                points,
                dashed: variant == VariantName::Alternative,
                color,
            });
        }
    }
    plot
}

/// Original over alternative mean iterations against beta, one line per N.
pub fn ratio_plot(summary: &[SummaryRow]) -> LinePlot {
    let mut plot = LinePlot::new("Original / Alternative mean iterations", "beta", "ratio");
    plot.guides.push(1.0);
    for (color, n) in counts(summary).into_iter().enumerate() {
        plot.series.push(Series {
            label: format!("N={n}"),
            points: summary
                .iter()
                .filter(|r| r.n == n && r.variant == VariantName::Original)
                .map(|r| (r.beta, r.ratio.unwrap_or(f64::NAN)))
                .collect(),
            dashed: false,
            color,
        });
    }
    plot
}

/// The beta minimizing mean iterations for `(n, variant)`, and whether it is
/// strictly inside the swept grid.
pub fn best_beta(summary: &[SummaryRow], n: usize, variant: VariantName) -> Option<(f64, bool)> {
    let cells: Vec<_> = summary
        .iter()
        .filter(|r| r.n == n && r.variant == variant)
        .collect();
    let (idx, best) = cells
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.mean_iterations.map(|m| (i, r, m)))
        .min_by(|a, b| a.2.total_cmp(&b.2))
        .map(|(i, r, _)| (i, r.beta))?;
    Some((best, idx > 0 && idx + 1 < cells.len()))
}

/// Whether the ratio exceeds 1 somewhere below `low` and drops under 1
/// somewhere above `high`.
pub fn ratio_crosses(summary: &[SummaryRow], n: usize, low: f64, high: f64) -> (bool, bool) {
    let ratios = summary
        .iter()
        .filter(|r| r.n == n && r.variant == VariantName::Original)
        .filter_map(|r| r.ratio.map(|q| (r.beta, q)));
    let mut above = false;
    let mut below = false;
    for (b, q) in ratios {
        above |= b < low && q > 1.0;
        below |= b > high && q < 1.0;
    }
    (above, below)
}
