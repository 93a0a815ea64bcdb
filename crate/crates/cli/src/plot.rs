//! Charts for a run directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use padeclust::experiments::{
    read_records, read_roots, ProtocolName, RunSummary, Status, TrialRecord, ROOTS_FILE,
    SUMMARY_FILE, TRIALS_FILE,
};
use padeclust::stats::{median, quantile};

use crate::svg::{line_chart, root_scatter, Series};
use crate::CliError;

/// Write every chart the directory supports; returns the files written.
pub fn plot_dir(dir: &Path, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    if !dir.is_dir() {
        return Err(CliError::domain(format!(
            "{} is not a directory",
            dir.display()
        )));
    }
    fs::create_dir_all(out)?;
    let mut charts: Vec<(String, String)> = Vec::new();
    let roots_path = dir.join(ROOTS_FILE);
    if roots_path.exists() {
        let rows = read_roots(&roots_path)?;
        if !rows.is_empty() {
            let mut groups: Vec<(String, Vec<Complex64>)> = Vec::new();
            for r in rows {
                let label = format!("{} #{}", r.cell, r.trial_index);
                match groups.iter_mut().find(|g| g.0 == label) {
                    Some(g) => g.1.push(Complex64::new(r.re, r.im)),
                    None => groups.push((label, vec![Complex64::new(r.re, r.im)])),
                }
            }
            charts.push((
                "roots.svg".into(),
                root_scatter("Roots and the unit circle", &groups),
            ));
        }
    }
    let trials_path = dir.join(TRIALS_FILE);
    if trials_path.exists() {
        let records = read_records(&trials_path)?;
        let summary = fs::read_to_string(dir.join(SUMMARY_FILE))
            .ok()
            .and_then(|t| serde_json::from_str::<RunSummary>(&t).ok());
        if let Some(first) = records.first() {
            charts.extend(protocol_charts(first.protocol, &records, summary.as_ref()));
        }
    }
    if charts.is_empty() {
        return Err(CliError::domain(format!(
            "no plottable data in {} (expected {ROOTS_FILE} or {TRIALS_FILE})",
            dir.display()
        )));
    }
    let mut written = Vec::new();
    for (name, svg) in charts {
        let path = out.join(name);
        fs::write(&path, svg)?;
        written.push(path);
    }
    Ok(written)
}

fn ok(records: &[TrialRecord]) -> impl Iterator<Item = &TrialRecord> {
    records.iter().filter(|r| r.status == Status::Ok)
}

/// Median of `f` per `(series key, x)`.
fn median_series(
    records: &[TrialRecord],
    key: impl Fn(&TrialRecord) -> (String, f64),
    f: impl Fn(&TrialRecord) -> Option<f64>,
) -> Vec<Series> {
    let mut groups: BTreeMap<String, BTreeMap<u64, (f64, Vec<f64>)>> = BTreeMap::new();
    for r in ok(records) {
        if let Some(y) = f(r) {
            let (name, x) = key(r);
            groups
                .entry(name)
                .or_default()
                .entry(x.to_bits())
                .or_insert((x, Vec::new()))
                .1
                .push(y);
        }
    }
    groups
        .into_iter()
        .map(|(name, pts)| {
            let mut points: Vec<(f64, f64)> =
                pts.into_values().map(|(x, ys)| (x, median(&ys))).collect();
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            Series { name, points }
        })
        .collect()
}

fn protocol_charts(
    protocol: ProtocolName,
    records: &[TrialRecord],
    summary: Option<&RunSummary>,
) -> Vec<(String, String)> {
    let mut out = Vec::new();
    match protocol {
        ProtocolName::EtClustering | ProtocolName::DiscreteExample => {
            let by_n = |r: &TrialRecord| (format!("n={}", r.n), r.m as f64);
            let metrics: [(&str, &str, fn(&TrialRecord) -> Option<f64>); 4] = [
                ("et_log_over_m", "median log L / m", |r| r.et_log_over_m),
                ("sector_discrepancy", "median sector discrepancy", |r| {
                    r.sector_discrepancy
                }),
                ("radial_defect", "median radial defect (first ρ)", |r| {
                    r.radial_defect.first().copied()
                }),
                ("bl_lower", "median BL distance estimate", |r| r.bl_lower),
            ];
            for (file, label, f) in metrics {
                let series = median_series(records, by_n, f);
                out.push((
                    format!("{file}.svg"),
                    line_chart(&format!("{label} vs m"), "m", label, &series, true),
                ));
            }
        }
        ProtocolName::ToeplitzAnticoncentration => {
            let eps: Vec<f64> = (0..=24)
                .map(|k| 10f64.powf(-3.0 + k as f64 / 8.0))
                .collect();
            let mut by_n: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
            for r in ok(records) {
                if let Some(d) = r.det_root {
                    by_n.entry(r.n).or_default().push(d);
                }
            }
            let series: Vec<Series> = by_n
                .into_iter()
                .map(|(n, ds)| Series {
                    name: format!("n={n}"),
                    points: eps
                        .iter()
                        .map(|&e| {
                            (
                                e,
                                ds.iter().filter(|&&d| d < e).count() as f64 / ds.len() as f64,
                            )
                        })
                        .collect(),
                })
                .collect();
            out.push((
                "small_ball.svg".into(),
                line_chart(
                    "P(|det A|^(1/n) < ε)",
                    "ε",
                    "empirical probability",
                    &series,
                    true,
                ),
            ));
        }
        ProtocolName::DetGrowth => {
            let series = median_series(
                records,
                |r| (format!("n={}", r.n), r.m as f64),
                |r| r.det_root,
            );
            out.push((
                "det_root.svg".into(),
                line_chart(
                    "median |det A_m^(n)|^(1/m)",
                    "m",
                    "|det|^(1/m)",
                    &series,
                    true,
                ),
            ));
        }
        ProtocolName::ZeroRadius => {
            if let Some(s_values) = summary.map(rate_s_values).filter(|s| !s.is_empty()) {
                let rows: Vec<&TrialRecord> = ok(records)
                    .filter(|r| r.rate.len() == s_values.len())
                    .collect();
                let band = |q: f64, name: &str| Series {
                    name: name.into(),
                    points: s_values
                        .iter()
                        .enumerate()
                        .map(|(i, &s)| {
                            let col: Vec<f64> = rows.iter().map(|r| r.rate[i]).collect();
                            (s, quantile(&col, q))
                        })
                        .collect(),
                };
                let series = vec![band(0.5, "median"), band(0.1, "10%"), band(0.9, "90%")];
                out.push((
                    "rate_vs_s.svg".into(),
                    line_chart("(1 − R_s)·s / log s", "s", "rate", &series, true),
                ));
            }
        }
        ProtocolName::PoleClustering => {
            let series = median_series(
                records,
                |r| (format!("m={}", r.m), r.n as f64),
                |r| r.radius_gap,
            );
            out.push((
                "radius_gap.svg".into(),
                line_chart(
                    "median ||ζ| − R_m| over seeds",
                    "n",
                    "radius gap",
                    &series,
                    true,
                ),
            ));
        }
        ProtocolName::InequalitySuite => {}
    }
    out
}

/// The `s` schedule recorded in the summary metrics `median_rate@s`.
fn rate_s_values(summary: &RunSummary) -> Vec<f64> {
    let mut s: Vec<f64> = summary
        .cells
        .iter()
        .flat_map(|c| c.metrics.keys())
        .filter_map(|k| k.strip_prefix("median_rate@"))
        .filter_map(|v| v.parse().ok())
        .collect();
    s.sort_by(f64::total_cmp);
    s.dedup();
    s
}
