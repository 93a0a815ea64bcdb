//! Zeros of the truncated series inside the unit disc, and the clustering of
//! Padé denominator zeros around `R_m`.

use super::{column, empty_cell, fmt_list, Cell, CellSummary, ExperimentConfig, Outcome, Verdict};
use super::{Status, TrialRecord};
use crate::cluster::{annulus_mass, count_inside, zero_counting_integral_of, EmpiricalMeasure};
use crate::error::Error;
use crate::pade::pade_with;
use crate::poly::{find_roots_with, ComplexPolynomial, RootOptions, RootSet};
use crate::sampler::sample;
use crate::stats::{median, non_increasing};

pub(crate) fn zero_cells(config: &ExperimentConfig) -> Vec<Cell> {
    let d = config.degree.unwrap_or(2048);
    vec![Cell {
        label: format!("N={d}"),
        m: 0,
        n: 0,
        degree: d,
    }]
}

fn roots_of(config: &ExperimentConfig, p: &ComplexPolynomial) -> Result<RootSet, String> {
    let opts = RootOptions {
        precision: config.precision,
        ..Default::default()
    };
    match find_roots_with(p, &opts) {
        Ok(r) => Ok(r),
        Err(Error::NonConvergence { residual, .. }) => Err(format!("root residual {residual:e}")),
        Err(e) => Err(e.to_string()),
    }
}

/// `log ρ_N(r)` with `ρ_N(r) = Σ_{k≤N} r^{2k}`.
pub(crate) fn log_rho_n(r: f64, n: usize) -> f64 {
    let r2 = r * r;
    ((1.0 - r2.powi(n as i32 + 1)) / (1.0 - r2)).ln()
}

pub(crate) fn zero_trial(config: &ExperimentConfig, cell: &Cell, trial: u64) -> Outcome {
    let s = sample(&config.distribution, cell.degree, config.seed, trial);
    let mut rec = TrialRecord::new(config.name, &cell.label, trial, 0, 0, cell.degree);
    if s.coeffs[0] == 0.0 {
        return Outcome {
            record: rec.exclude(Status::EndCoefficientZero, "a_0 = 0"),
            roots: None,
        };
    }
    let roots = match roots_of(config, &ComplexPolynomial::from_real(&s.coeffs)) {
        Ok(r) => r,
        Err(detail) => {
            return Outcome {
                record: rec.exclude(Status::Nonconvergence, detail),
                roots: None,
            }
        }
    };
    rec.extended = roots.used_extended();
    let z = roots.roots();
    for &r in &config.r_values {
        let integral = zero_counting_integral_of(z, r);
        rec.jensen_ratio.push(-integral / (1.0 - r * r).ln());
        // Jensen: circle average − log|a_0| equals the counting integral
        rec.jensen_deviation
            .push(integral - 0.5 * log_rho_n(r, cell.degree));
    }
    rec.roots_in_disc = Some(count_inside(z, 1.0));
    let moduli = roots.moduli_sorted();
    for &s in &config.s_values {
        let r_s = moduli[s];
        rec.r_s.push(r_s);
        rec.rate.push((1.0 - r_s) * s as f64 / (s as f64).ln());
    }
    Outcome {
        record: rec,
        roots: Some(z.to_vec()),
    }
}

fn fraction(hits: usize, total: usize) -> f64 {
    if total == 0 {
        f64::NAN
    } else {
        hits as f64 / total as f64
    }
}

pub(crate) fn summarize_zero(
    config: &ExperimentConfig,
    cells: &[Cell],
    by_cell: &[Vec<&TrialRecord>],
) -> (Vec<CellSummary>, Vec<Verdict>, String) {
    let [lo, hi] = config.ratio_bracket;
    let [rlo, rhi] = config.rate_bracket;
    let mut verdicts = Vec::new();
    let mut summaries = Vec::new();
    for (c, recs) in cells.iter().zip(by_cell) {
        let mut s = empty_cell(&c.label);
        let ok: Vec<&&TrialRecord> = recs.iter().filter(|r| r.status == Status::Ok).collect();
        for (i, &r) in config.r_values.iter().enumerate() {
            let ratios: Vec<f64> = ok.iter().map(|t| t.jensen_ratio[i]).collect();
            let devs: Vec<f64> = ok.iter().map(|t| t.jensen_deviation[i]).collect();
            let inside = ratios.iter().filter(|&&x| lo <= x && x <= hi).count();
            let frac = fraction(inside, ratios.len());
            s.metrics
                .insert(format!("median_ratio@{r}"), median(&ratios));
            s.metrics.insert(format!("bracket_fraction@{r}"), frac);
            s.metrics
                .insert(format!("median_deviation@{r}"), median(&devs));
            verdicts.push(Verdict::new(
                format!("ratio_in_bracket r={r}"),
                frac >= 0.8,
                format!(
                    "{inside}/{} seeds with −∫N(t)/t dt / log(1−r²) in [{lo}, {hi}]; median {:.4}",
                    ratios.len(),
                    median(&ratios)
                ),
            ));
        }
        for (i, &sv) in config.s_values.iter().enumerate() {
            let rates: Vec<f64> = ok.iter().map(|t| t.rate[i]).collect();
            s.metrics
                .insert(format!("median_rate@{sv}"), median(&rates));
        }
        let rate_ok = ok
            .iter()
            .filter(|t| t.rate.iter().all(|&x| rlo <= x && x <= rhi))
            .count();
        let rate_frac = fraction(rate_ok, ok.len());
        s.metrics.insert("rate_fraction".into(), rate_frac);
        verdicts.push(Verdict::new(
            "rate_in_bracket",
            rate_frac >= 0.9,
            format!(
                "{rate_ok}/{} seeds with (1−R_s)·s/log s in [{rlo}, {rhi}] for all s in {:?}",
                ok.len(),
                config.s_values
            ),
        ));
        let in_disc = column(recs, |r| r.roots_in_disc.map(|k| k as f64))
            .iter()
            .filter(|&&k| k > 0.0)
            .count();
        let disc_frac = fraction(in_disc, ok.len());
        s.metrics.insert("root_in_disc_fraction".into(), disc_frac);
        verdicts.push(Verdict::new(
            "root_in_unit_disc",
            disc_frac >= 0.99,
            format!(
                "{in_disc}/{} seeds with a root in |z| < 1 at N = {}",
                ok.len(),
                c.degree
            ),
        ));
        summaries.push(s);
    }
    let note = "Desk-scale renderings of almost-sure limit laws at a finite truncation; \
                brackets are pragmatic, not the limit statements themselves."
        .to_string();
    (summaries, verdicts, note)
}

pub(crate) fn pole_cells(config: &ExperimentConfig) -> Vec<Cell> {
    let d = config.degree.unwrap_or(1024);
    let mut out = Vec::new();
    for &m in &config.m {
        for &n in &config.n {
            out.push(Cell {
                label: format!("m={m},n={n}"),
                m,
                n,
                degree: d,
            });
        }
    }
    out
}

pub(crate) fn pole_trial(config: &ExperimentConfig, cell: &Cell, trial: u64) -> Outcome {
    let s = sample(&config.distribution, cell.degree, config.seed, trial);
    let mut rec = TrialRecord::new(config.name, &cell.label, trial, cell.m, cell.n, cell.degree);
    let fail = |rec: TrialRecord, status, detail: String| Outcome {
        record: rec.exclude(status, detail),
        roots: None,
    };
    let series = match roots_of(config, &ComplexPolynomial::from_real(&s.coeffs)) {
        Ok(r) => r,
        Err(d) => return fail(rec, Status::Nonconvergence, d),
    };
    let target = series.moduli_sorted()[cell.m];
    rec.r_s = vec![target];
    let pair = match pade_with(&s.coeffs, cell.m, cell.n, config.precision) {
        Ok(p) => p,
        Err(e) => return fail(rec, Status::Degenerate, e.to_string()),
    };
    rec.extended = pair.diagnostics.extended;
    rec.order_residual = Some(pair.diagnostics.order_residual);
    rec.logdet_a = Some(pair.diagnostics.logdet_a);
    if pair.q.degree() == 0 {
        return fail(
            rec,
            Status::EndCoefficientZero,
            "denominator is constant".into(),
        );
    }
    let zeros = match roots_of(config, &pair.q) {
        Ok(r) => r,
        Err(d) => return fail(rec, Status::Nonconvergence, d),
    };
    let mu = EmpiricalMeasure::from_root_set(&zeros).expect("degree ≥ 1");
    rec.cluster_mass = Some(annulus_mass(&mu, target, config.annulus_rho));
    let gaps: Vec<f64> = zeros
        .roots()
        .iter()
        .map(|z| (z.norm() - target).abs())
        .collect();
    rec.radius_gap = Some(median(&gaps));
    Outcome {
        record: rec,
        roots: Some(zeros.roots().to_vec()),
    }
}

pub(crate) fn summarize_pole(
    config: &ExperimentConfig,
    cells: &[Cell],
    by_cell: &[Vec<&TrialRecord>],
) -> (Vec<CellSummary>, Vec<Verdict>, String) {
    let summaries: Vec<CellSummary> = cells
        .iter()
        .zip(by_cell)
        .map(|(c, recs)| {
            let mut s = empty_cell(&c.label);
            s.metrics.insert(
                "median_radius_gap".into(),
                median(&column(recs, |r| r.radius_gap)),
            );
            s.metrics.insert(
                "median_cluster_mass".into(),
                median(&column(recs, |r| r.cluster_mass)),
            );
            s.metrics.insert(
                "median_target_radius".into(),
                median(&column(recs, |r| r.r_s.first().copied())),
            );
            s
        })
        .collect();
    let mut verdicts = Vec::new();
    for &m in &config.m {
        let mut pts: Vec<(usize, f64)> = cells
            .iter()
            .zip(&summaries)
            .filter(|(c, _)| c.m == m)
            .map(|(c, s)| (c.n, s.metrics["median_radius_gap"]))
            .collect();
        pts.sort_by_key(|p| p.0);
        let gaps: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let ns: Vec<usize> = pts.iter().map(|p| p.0).collect();
        if m == 0 {
            verdicts.push(Verdict::new(
                "control_arm m=0",
                true,
                format!("n = {ns:?}: median gap {} (reported only)", fmt_list(&gaps)),
            ));
        } else if pts.len() >= 2 {
            verdicts.push(Verdict::new(
                format!("radius_gap_non_increasing m={m}"),
                non_increasing(&gaps),
                format!(
                    "n = {ns:?}: median over seeds of median ||ζ| − R_{m}| = {}",
                    fmt_list(&gaps)
                ),
            ));
        }
    }
    let note = "Denominator zeros of [m,n] approximants against R_m of the truncated series; \
                the limit holds along a subsequence, so only the trend in n is checked."
        .to_string();
    (summaries, verdicts, note)
}
