//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary
//! (`harness = false`) so every line is printed; exits non-zero if any
//! criterion fails.

use std::time::Instant;

use padeclust::experiments::{self, ExperimentConfig, ProtocolName, RunSummary, TRIALS_FILE};
use padeclust::pade::{pade, PadePair};
use padeclust::poly::{circle_log_average_adaptive, find_roots, jensen_rhs};
use padeclust::sampler::{sample, DistributionSpec};
use padeclust::{Complex64, ComplexPolynomial, Error};
use rayon::prelude::*;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn run_preset(name: ProtocolName, edit: impl FnOnce(&mut ExperimentConfig)) -> RunSummary {
    let mut c = ExperimentConfig::preset(name);
    edit(&mut c);
    experiments::run(&c).expect("protocol runs").summary
}

fn verdict(s: &RunSummary, name: &str) -> (bool, String) {
    match s.verdict(name) {
        Some(v) => (v.passed, format!("{}: {}", v.name, v.detail)),
        None => (false, format!("verdict '{name}' missing")),
    }
}

fn c1_order_condition() -> Outcome {
    const N: usize = 64;
    let pairs: Vec<(usize, usize)> = (0..=12)
        .flat_map(|n| (0..=40 - n).map(move |m| (m, n)))
        .collect();
    // (solved, degenerate pairs, degenerate pairs with m = 0, worst residual)
    let per_trial: Vec<(usize, usize, usize, f64)> = (0..1000u64)
        .into_par_iter()
        .map(|t| {
            let a = sample(&DistributionSpec::Gaussian, N, 101, t).coeffs;
            let (mut solved, mut degenerate, mut at_m0, mut worst) = (0, 0, 0, 0.0f64);
            for &(m, n) in &pairs {
                match pade(&a, m, n) {
                    Ok(p) => {
                        solved += 1;
                        worst = worst.max(p.diagnostics.order_residual);
                    }
                    Err(Error::DegenerateSystem { .. }) => {
                        degenerate += 1;
                        at_m0 += usize::from(m == 0);
                    }
                    Err(e) => panic!("unexpected error at ({m},{n}): {e}"),
                }
            }
            (solved, degenerate, at_m0, worst)
        })
        .collect();
    let solved: usize = per_trial.iter().map(|x| x.0).sum();
    let degenerate: usize = per_trial.iter().map(|x| x.1).sum();
    let at_m0: usize = per_trial.iter().map(|x| x.2).sum();
    let trials_hit = per_trial.iter().filter(|x| x.1 > 0).count();
    let worst = per_trial.iter().map(|x| x.3).fold(0.0, f64::max);
    outcome(
        worst <= 1e-8,
        format!(
            "{solved} non-degenerate pairs over 1000 trials, max residual {worst:.2e} (≤ 1e-8); \
             degenerate pairs {degenerate} (expected 0; {at_m0} at m = 0) in {trials_hit} trials"
        ),
    )
}

fn coeffs_close(p: &ComplexPolynomial, want: &[f64], tol: f64) -> bool {
    let c = p.coeffs();
    c.len() >= want.len()
        && c.iter().enumerate().all(|(j, z)| {
            let w = want.get(j).copied().unwrap_or(0.0);
            (z - Complex64::new(w, 0.0)).norm() <= tol
        })
}

fn c2_closed_form() -> Outcome {
    let mut fact = 1.0;
    let exp: Vec<f64> = (0..8)
        .map(|k| {
            if k > 0 {
                fact *= k as f64;
            }
            1.0 / fact
        })
        .collect();
    let e: PadePair = pade(&exp, 1, 1).expect("exp [1,1]");
    let exp_ok = coeffs_close(&e.p, &[1.0, 0.5], 1e-12) && coeffs_close(&e.q, &[1.0, -0.5], 1e-12);
    let g = pade(&[1.0; 8], 1, 1).expect("geometric [1,1]");
    let geo_ok = coeffs_close(&g.p, &[1.0], 4.0 * f64::EPSILON)
        && coeffs_close(&g.q, &[1.0, -1.0], 4.0 * f64::EPSILON);
    outcome(
        exp_ok && geo_ok,
        format!(
            "exp [1,1]: p={:?} q={:?}; geometric [1,1]: p={:?} q={:?}",
            re(&e.p),
            re(&e.q),
            re(&g.p),
            re(&g.q)
        ),
    )
}

fn re(p: &ComplexPolynomial) -> Vec<f64> {
    p.coeffs().iter().map(|z| z.re).collect()
}

fn c3_inequality_suite() -> Outcome {
    let laws = [
        DistributionSpec::Gaussian,
        DistributionSpec::UniformContinuous,
        DistributionSpec::Laplace,
        DistributionSpec::DiscretePmM { m: 10 },
        DistributionSpec::LogconcaveL1Ball,
    ];
    let (mut checked, mut bad, mut parts) = (0, 0, Vec::new());
    for law in laws {
        let s = run_preset(ProtocolName::InequalitySuite, |c| {
            c.distribution = law.clone();
            c.trials = 2000;
            c.sector_grid = 256;
        });
        checked += s.records - s.excluded;
        bad += s.invariant_violations;
        parts.push(format!(
            "{}: {} checked, {} excluded",
            s.distribution,
            s.records - s.excluded,
            s.excluded
        ));
    }
    outcome(
        bad == 0 && checked > 0,
        format!(
            "{bad} violations over {checked} polynomials ({})",
            parts.join("; ")
        ),
    )
}

fn c4_jensen() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for t in 0..500u64 {
        let degree = 1 + (t as usize * 37) % 64;
        let a = sample(&DistributionSpec::Gaussian, degree, 404, t).coeffs;
        let p = ComplexPolynomial::from_real(&a);
        let roots = find_roots(&p, 1e-12, 600).expect("roots converge");
        for r in [0.5, 0.9, 1.1] {
            let lhs = circle_log_average_adaptive(&p, r, 1e-10, 1 << 20).expect("circle average");
            let rhs = jensen_rhs(&roots, a[0].abs(), r).expect("a_0 != 0");
            worst = worst.max((lhs - rhs).abs());
            count += 1;
        }
    }
    outcome(
        worst <= 1e-6,
        format!("{count} evaluations, max |average − rhs| = {worst:.2e} (≤ 1e-6)"),
    )
}

fn c5_anticoncentration() -> Outcome {
    let s = run_preset(ProtocolName::ToeplitzAnticoncentration, |c| {
        c.n = vec![2, 5, 10, 20];
        c.trials = 10_000;
        c.epsilon = vec![0.01, 0.05, 0.1];
    });
    let cells: Vec<_> = s
        .verdicts
        .iter()
        .filter(|v| v.name.starts_with("small_ball"))
        .collect();
    let failed: Vec<&str> = cells
        .iter()
        .filter(|v| !v.passed)
        .map(|v| v.name.as_str())
        .collect();
    outcome(
        cells.len() == 12 && failed.is_empty(),
        format!(
            "{} cells checked against n·0.7979·ε + 3 s.e.; failing: {failed:?}",
            cells.len()
        ),
    )
}

fn c6_et_decay() -> Outcome {
    let s = run_preset(ProtocolName::EtClustering, |c| {
        c.m = vec![50, 100, 200, 400];
        c.n = vec![1, 2];
        c.trials = 200;
    });
    let (d1, t1) = verdict(&s, "median_decreasing n=1");
    let (d2, t2) = verdict(&s, "median_decreasing n=2");
    let med = s
        .cell("m=400,n=1")
        .map(|c| c.metrics["median_et_log_over_m"])
        .unwrap_or(f64::NAN);
    outcome(
        d1 && d2 && med <= 0.08 && s.invariant_violations == 0,
        format!("{t1}; {t2}; m=400,n=1 median {med:.4} (≤ 0.08)"),
    )
}

fn c7_discrete() -> Outcome {
    let s = run_preset(ProtocolName::DiscreteExample, |c| {
        c.distribution = DistributionSpec::DiscretePmM { m: 100 };
        c.m = vec![200, 400, 800];
        c.n = vec![10];
        c.trials = 100;
    });
    let (dec, text) = verdict(&s, "median_decreasing n=10");
    outcome(
        dec && s.invariant_violations == 0,
        format!("{text}; degenerate {} of {}", s.degenerate, s.records),
    )
}

fn zero_radius() -> RunSummary {
    run_preset(ProtocolName::ZeroRadius, |c| {
        c.degree = Some(2048);
        c.trials = 50;
        c.r_values = vec![0.99];
        c.s_values = vec![4, 8, 16, 32, 64];
    })
}

fn c8a(s: &RunSummary) -> Outcome {
    let (ok, text) = verdict(s, "ratio_in_bracket r=0.99");
    outcome(ok, format!("{text} (need ≥ 80%)"))
}

fn c8b(s: &RunSummary) -> Outcome {
    let (ok, text) = verdict(s, "rate_in_bracket");
    outcome(ok, format!("{text} (need ≥ 90%)"))
}

fn c8c() -> Outcome {
    let s = run_preset(ProtocolName::ZeroRadius, |c| {
        c.degree = Some(512);
        c.trials = 50;
    });
    let (ok, text) = verdict(&s, "root_in_unit_disc");
    outcome(ok, format!("{text} (need ≥ 99%)"))
}

fn c9_pole_clustering() -> Outcome {
    let s = run_preset(ProtocolName::PoleClustering, |c| {
        c.m = vec![1];
        c.n = vec![8, 16, 32];
        c.degree = Some(1024);
        c.trials = 30;
    });
    let (ok, text) = verdict(&s, "radius_gap_non_increasing m=1");
    outcome(ok, text)
}

fn trials_bytes(c: &ExperimentConfig, threads: usize) -> Vec<u8> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("pool");
    let out = pool.install(|| experiments::run(c)).expect("protocol runs");
    let dir = tempfile::tempdir().expect("tempdir");
    experiments::write_run(&out, dir.path()).expect("write run");
    std::fs::read(dir.path().join(TRIALS_FILE)).expect("trials.csv")
}

fn c10_determinism() -> Outcome {
    let mut mismatched = Vec::new();
    for name in ProtocolName::ALL {
        let mut c = ExperimentConfig::preset(name);
        c.trials = 8;
        c.seed = 2024;
        match name {
            ProtocolName::EtClustering => c.m = vec![20, 40],
            ProtocolName::DiscreteExample => c.m = vec![30, 60],
            ProtocolName::ZeroRadius => c.degree = Some(256),
            ProtocolName::PoleClustering => c.degree = Some(128),
            _ => {}
        }
        let one = trials_bytes(&c, 1);
        if one != trials_bytes(&c, 1) || one != trials_bytes(&c, 4) {
            mismatched.push(name.as_str());
        }
    }
    outcome(
        mismatched.is_empty(),
        format!("7 protocols re-run at 1, 1 and 4 threads; mismatched: {mismatched:?}"),
    )
}

fn main() {
    let mut failures = 0;
    let mut report = |id: &str, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let secs = start.elapsed().as_secs_f64();
        println!(
            "{} criterion {id:<3} [{secs:7.2}s] {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.passed {
            failures += 1;
        }
    };
    report("1", &c1_order_condition);
    report("2", &c2_closed_form);
    report("3", &c3_inequality_suite);
    report("4", &c4_jensen);
    report("5", &c5_anticoncentration);
    report("6", &c6_et_decay);
    report("7", &c7_discrete);
    let start = Instant::now();
    let zr = zero_radius();
    let zr_secs = start.elapsed().as_secs_f64();
    println!("     zero-radius run at N=2048 took {zr_secs:.2}s");
    report("8a", &|| c8a(&zr));
    report("8b", &|| c8b(&zr));
    report("8c", &c8c);
    report("9", &c9_pole_clustering);
    report("10", &c10_determinism);
    println!("{failures} criteria failed");
    if failures > 0 {
        std::process::exit(1);
    }
}
