use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::Utc;
use padeclust::cluster::{cluster_report, ReportOptions};
use padeclust::experiments::{
    self, ExperimentConfig, ProtocolName, RootRow, ROOTS_FILE, SUMMARY_FILE, TRIALS_FILE,
};
use padeclust::pade::pade_with;
use padeclust::poly::find_roots_with;
use padeclust::{ComplexPolynomial, RootOptions};
use serde_json::{json, Value};

use crate::manifest::{digest_files, RunManifest};
use crate::plot::plot_dir;
use crate::{
    CliError, CoeffArgs, Command, ExperimentCommand, Format, PadeArgs, PlotArgs, ReportArgs,
    RootsArgs, RunArgs,
};

type CmdResult = Result<(), CliError>;

pub(crate) fn dispatch(cmd: Command, out: &mut dyn Write) -> CmdResult {
    match cmd {
        Command::Pade(a) => cmd_pade(a, out),
        Command::Roots(a) => cmd_roots(a, out),
        Command::ClusterReport(a) => cmd_cluster_report(a, out),
        Command::Experiment(ExperimentCommand::Run(a)) => cmd_experiment(a, out),
        Command::Experiment(ExperimentCommand::Config { name }) => {
            let name: ProtocolName = name.parse()?;
            writeln!(out, "{}", ExperimentConfig::preset(name).to_json())?;
            Ok(())
        }
        Command::Plot(a) => cmd_plot(a, out),
    }
}

fn read_coeffs(args: &CoeffArgs) -> Result<Vec<f64>, CliError> {
    let coeffs = match (&args.coeffs, &args.coeffs_file) {
        (Some(c), _) => c.clone(),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
            text.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<f64>().map_err(|_| {
                        CliError::usage(format!("not a number in {}: '{t}'", path.display()))
                    })
                })
                .collect::<Result<_, _>>()?
        }
        (None, None) => {
            return Err(CliError::usage(
                "one of --coeffs or --coeffs-file is required",
            ))
        }
    };
    if coeffs.is_empty() {
        return Err(CliError::usage("no coefficients given"));
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(CliError::usage("coefficients must be finite"));
    }
    Ok(coeffs)
}

/// Real coefficients as numbers, otherwise `[re, im]` pairs; trailing
/// negligible coefficients dropped.
fn coeff_json(p: &ComplexPolynomial) -> Value {
    let c = &p.coeffs()[..=p.degree()];
    if c.iter().all(|z| z.im == 0.0) {
        json!(c.iter().map(|z| z.re).collect::<Vec<_>>())
    } else {
        json!(c.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
    }
}

fn print_json(out: &mut dyn Write, v: &Value) -> CmdResult {
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(v).expect("json value serializes")
    )?;
    Ok(())
}

fn cmd_pade(a: PadeArgs, out: &mut dyn Write) -> CmdResult {
    let coeffs = read_coeffs(&a.input)?;
    let pair = pade_with(&coeffs, a.m, a.n, a.precision.into())?;
    match a.format {
        Format::Json => print_json(
            out,
            &json!({
                "m": pair.m,
                "n": pair.n,
                "p": coeff_json(&pair.p),
                "q": coeff_json(&pair.q),
                "diagnostics": pair.diagnostics,
            }),
        ),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["part", "index", "re", "im"])
                .map_err(csv_err)?;
            for (part, poly) in [("p", &pair.p), ("q", &pair.q)] {
                for (j, z) in poly.coeffs()[..=poly.degree()].iter().enumerate() {
                    w.write_record([
                        part.to_string(),
                        j.to_string(),
                        z.re.to_string(),
                        z.im.to_string(),
                    ])
                    .map_err(csv_err)?;
                }
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::domain(e.to_string())
}

fn root_options(p: crate::PrecisionArg) -> RootOptions {
    RootOptions {
        precision: p.into(),
        ..Default::default()
    }
}

fn cmd_roots(a: RootsArgs, out: &mut dyn Write) -> CmdResult {
    let coeffs = read_coeffs(&a.input)?;
    let p = ComplexPolynomial::from_real(&coeffs);
    let roots = find_roots_with(&p, &root_options(a.precision))?;
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join(ROOTS_FILE)).map_err(csv_err)?;
        for z in roots.roots() {
            w.serialize(RootRow {
                cell: format!("N={}", p.degree()),
                trial_index: 0,
                re: z.re,
                im: z.im,
            })
            .map_err(csv_err)?;
        }
        w.flush()?;
    }
    match a.format {
        Format::Json => print_json(
            out,
            &json!({
                "degree": p.degree(),
                "roots": roots.roots().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                "residual": roots.residual(),
                "converged": roots.converged(),
                "iterations": roots.iterations(),
                "extended": roots.used_extended(),
            }),
        ),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["re", "im", "modulus"]).map_err(csv_err)?;
            for z in roots.roots() {
                w.write_record([z.re.to_string(), z.im.to_string(), z.norm().to_string()])
                    .map_err(csv_err)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn cmd_cluster_report(a: ReportArgs, out: &mut dyn Write) -> CmdResult {
    let coeffs = read_coeffs(&a.input)?;
    if a.rho.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
        return Err(CliError::usage("every --rho must lie in (0, 1]"));
    }
    if a.grid < 4 || a.family < 8 {
        return Err(CliError::usage("--grid must be ≥ 4 and --family ≥ 8"));
    }
    let p = ComplexPolynomial::from_real(&coeffs);
    let roots = find_roots_with(&p, &root_options(a.precision))?;
    let opts = ReportOptions {
        rho: a.rho,
        sector_grid: a.grid,
        family_size: a.family,
    };
    let report = cluster_report(&p, &roots, &opts)?;
    print_json(
        out,
        &json!({
            "report": report,
            "root_residual": roots.residual(),
        }),
    )?;
    if !report.inequality_flags.all() {
        return Err(CliError::invariant(format!(
            "clustering inequality violated: {:?}",
            report.inequality_flags
        )));
    }
    Ok(())
}

/// Load the config for `name`, apply overrides and validate.
pub fn resolve_config(a: &RunArgs) -> Result<ExperimentConfig, CliError> {
    let name: ProtocolName = a.name.parse()?;
    let mut config = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            let c: ExperimentConfig = serde_json::from_str(&text)
                .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?;
            if c.name != name {
                return Err(CliError::usage(format!(
                    "config {} is for '{}', not '{name}'",
                    path.display(),
                    c.name
                )));
            }
            c
        }
        None => ExperimentConfig::preset(name),
    };
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    if let Some(trials) = a.trials {
        config.trials = trials;
    }
    if let Some(p) = a.precision {
        config.precision = p.into();
    }
    if let Some(out) = &a.out {
        config.output = Some(out.clone());
    }
    config.validate()?;
    Ok(config)
}

fn run_dir(config: &ExperimentConfig) -> PathBuf {
    config
        .output
        .clone()
        .unwrap_or_else(|| Path::new("runs").join(format!("{}-seed{}", config.name, config.seed)))
}

fn cmd_experiment(a: RunArgs, out: &mut dyn Write) -> CmdResult {
    let config = resolve_config(&a)?;
    let dir = run_dir(&config);
    let started = Utc::now();
    let result = experiments::run(&config)?;
    experiments::write_run(&result, &dir)?;
    let finished = Utc::now();
    let digests = digest_files(&dir, &[TRIALS_FILE, ROOTS_FILE, SUMMARY_FILE])?;
    RunManifest::new(&config, started, finished, digests).write(&dir)?;
    let summary = &result.summary;
    match a.format {
        Format::Json => {
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(summary).expect("summary serializes")
            )?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["verdict", "passed", "detail"])
                .map_err(csv_err)?;
            for v in &summary.verdicts {
                w.write_record([
                    v.name.as_str(),
                    if v.passed { "true" } else { "false" },
                    v.detail.as_str(),
                ])
                .map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    eprintln!(
        "{}: {} records ({} degenerate, {} excluded) in {:.2}s -> {}",
        config.name,
        summary.records,
        summary.degenerate,
        summary.excluded,
        summary.wall_time_seconds,
        dir.display()
    );
    if summary.invariant_violations > 0 {
        return Err(CliError::invariant(format!(
            "{} trials violated a deterministic inequality; see {}",
            summary.invariant_violations,
            dir.join(TRIALS_FILE).display()
        )));
    }
    Ok(())
}

fn cmd_plot(a: PlotArgs, out: &mut dyn Write) -> CmdResult {
    let target = a.out.clone().unwrap_or_else(|| a.dir.clone());
    for path in plot_dir(&a.dir, &target)? {
        writeln!(out, "{}", path.display())?;
    }
    Ok(())
}
