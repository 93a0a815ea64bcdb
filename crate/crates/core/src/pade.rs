//! `[m,n]` Padé pairs, the order-condition residual, and the Erdős–Turán
//! ratio with its determinant bound chain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{truncated_product, ComplexPolynomial, Precision};
use crate::toeplitz::{
    self, build_triple, log_abs_det, solve_denominator_capped, Coefficient, DetResult, Scalar,
    ToeplitzTriple, DOUBLE_CONDITION_CAP, EXTENDED_CONDITION_CAP,
};
use crate::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PadeDiagnostics {
    /// `log|det A_m^(n)|` (0 when `n = 0`).
    pub logdet_a: f64,
    pub condition: f64,
    pub order_residual: f64,
    /// The denominator was solved in double-double arithmetic.
    pub extended: bool,
}

/// Numerator `p` (degree ≤ m) and denominator `q` (degree ≤ n, `q(0) = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct PadePair {
    pub p: ComplexPolynomial,
    pub q: ComplexPolynomial,
    pub m: usize,
    pub n: usize,
    pub diagnostics: PadeDiagnostics,
}

pub fn pade<S: Coefficient>(coeffs: &[S], m: usize, n: usize) -> Result<PadePair> {
    pade_with(coeffs, m, n, Precision::Auto)
}

/// `Auto` solves in double and retries in double-double when the system is
/// flagged degenerate.
pub fn pade_with<S: Coefficient>(
    coeffs: &[S],
    m: usize,
    n: usize,
    precision: Precision,
) -> Result<PadePair> {
    let (p, q, det, extended) = match precision {
        Precision::Double => {
            let (p, q, det) = solve_in(coeffs, m, n, DOUBLE_CONDITION_CAP)?;
            (p, q, det, false)
        }
        Precision::Extended => {
            let (p, q, det) = solve_wide(coeffs, m, n)?;
            (p, q, det, true)
        }
        Precision::Auto => match solve_in(coeffs, m, n, DOUBLE_CONDITION_CAP) {
            Ok((p, q, det)) => (p, q, det, false),
            Err(Error::DegenerateSystem { .. }) => {
                let (p, q, det) = solve_wide(coeffs, m, n)?;
                (p, q, det, true)
            }
            Err(e) => return Err(e),
        },
    };
    let mut pair = PadePair {
        p: ComplexPolynomial::new(p),
        q: ComplexPolynomial::new(q),
        m,
        n,
        diagnostics: PadeDiagnostics {
            logdet_a: det.log_abs,
            condition: det.condition_estimate,
            order_residual: 0.0,
            extended,
        },
    };
    pair.diagnostics.order_residual = validate_order(coeffs, &pair);
    Ok(pair)
}

type Solved = (Vec<Complex64>, Vec<Complex64>, DetResult);

fn solve_in<S: Scalar>(coeffs: &[S], m: usize, n: usize, cap: f64) -> Result<Solved> {
    let triple = build_triple(coeffs, m, n)?;
    let (q, det) = solve_denominator_capped(&triple, cap)?;
    let p = triple.c.mul_vec(&q);
    Ok((
        p.iter().map(Scalar::to_complex).collect(),
        q.iter().map(Scalar::to_complex).collect(),
        det,
    ))
}

fn solve_wide<S: Coefficient>(coeffs: &[S], m: usize, n: usize) -> Result<Solved> {
    let wide: Vec<S::Wide> = coeffs.iter().map(Coefficient::widen).collect();
    solve_in(&wide, m, n, EXTENDED_CONDITION_CAP)
}

/// `max_{j ≤ m+n} |(f q − p)_j|` over `(1 + ‖a‖_∞) ‖q‖_1`.
pub fn validate_order<S: Scalar>(coeffs: &[S], pair: &PadePair) -> f64 {
    let order = pair.m + pair.n;
    let f: Vec<Complex64> = coeffs
        .iter()
        .take(order + 1)
        .map(Scalar::to_complex)
        .collect();
    let inf = coeffs.iter().map(Scalar::modulus).fold(0.0, f64::max);
    let fq = truncated_product(&ComplexPolynomial::new(f), &pair.q, order);
    let worst = fq
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let pj = pair.p.coeffs().get(j).copied().unwrap_or_default();
            (c - pj).norm()
        })
        .fold(0.0, f64::max);
    worst / ((1.0 + inf) * pair.q.l1_norm())
}

/// `L(P) = Σ|α_j| / √(|α_0||α_N|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtRatio {
    pub value: f64,
    pub log_value: f64,
    pub n_coeffs: usize,
}

impl EtRatio {
    /// Nominal degree `N`.
    pub fn degree(&self) -> usize {
        self.n_coeffs - 1
    }
}

/// Uses the last stored coefficient as `α_N`, so a numerator of nominal
/// degree `m` is measured at degree `m` even when its top coefficient is tiny.
pub fn et_ratio(p: &ComplexPolynomial) -> Result<EtRatio> {
    let c = p.coeffs();
    if c.len() < 2 {
        return Err(Error::DegenerateInput(
            "the ratio needs at least two coefficients".into(),
        ));
    }
    let thr = p.zero_threshold();
    let first = c[0].norm();
    let last = c[c.len() - 1].norm();
    if first <= thr || last <= thr {
        return Err(Error::EndCoefficientZero);
    }
    let log_value = p.l1_norm().ln() - 0.5 * (first.ln() + last.ln());
    Ok(EtRatio {
        value: log_value.exp(),
        log_value,
        n_coeffs: c.len(),
    })
}

/// Logarithms of the upper bounds on `L(P_mn)`, each at least the previous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtBoundChain {
    pub log_l: f64,
    /// Via `‖p‖_1 ≤ ‖q‖_1 Σ_{j≤m} |a_j|`.
    pub log_q_norm_bound: f64,
    /// Cauchy–Schwarz over the `n+1` maximal minors of `T`, then Cauchy–Binet.
    pub log_cauchy_binet_bound: f64,
    /// AM–GM on the singular values of `T`.
    pub log_am_gm_bound: f64,
    /// `log|det A_m^(n+1)|`; `log|p_m| = logdet_a_next − logdet_a`.
    pub logdet_a: f64,
    pub logdet_a_next: f64,
}

impl EtBoundChain {
    /// `L ≤ B1 ≤ B2 ≤ B3` up to a relative slack on the logarithms.
    pub fn is_ordered(&self, slack: f64) -> bool {
        let tol = |x: f64| slack * (1.0 + x.abs());
        let seq = [
            self.log_l,
            self.log_q_norm_bound,
            self.log_cauchy_binet_bound,
            self.log_am_gm_bound,
        ];
        seq.windows(2).all(|w| w[0] <= w[1] + tol(w[1]))
    }
}

pub fn et_bound_chain<S: Scalar>(
    coeffs: &[S],
    triple: &ToeplitzTriple<S>,
    pair: &PadePair,
) -> Result<EtBoundChain> {
    let (m, n) = (triple.m, triple.n);
    let degenerate = |reason: &str| Error::DegenerateSystem {
        m,
        n,
        reason: reason.into(),
    };
    let et = et_ratio(&pair.p).map_err(|_| degenerate("numerator end coefficient vanishes"))?;
    let a0 = coeffs[0].modulus();
    if a0 == 0.0 {
        return Err(degenerate("a_0 = 0"));
    }
    let det_n = log_abs_det(&triple.a);
    let det_next = log_abs_det(&toeplitz::toeplitz_a(coeffs, m, n + 1)?);
    if det_n.singular || det_next.singular {
        return Err(degenerate("singular determinant in the chain"));
    }
    let head: f64 = coeffs.iter().take(m + 1).map(Scalar::modulus).sum();
    let pre = head.ln() - 0.5 * a0.ln();
    let (ld_n, ld_next) = (det_n.log_abs, det_next.log_abs);
    let b1 = pair.q.l1_norm().ln() + pre - 0.5 * (ld_next - ld_n);
    let (b2, b3) = if n == 0 {
        (b1, b1)
    } else {
        let d = 0.5 * (ld_n + ld_next);
        let cs = 0.5 * ((n + 1) as f64).ln();
        let gram = log_abs_det(&triple.t.gram());
        let b2 = pre + cs + 0.5 * gram.log_abs - d;
        let b3 = pre + cs + n as f64 * (triple.t.entrywise_l1().ln() - 0.5 * (n as f64).ln()) - d;
        (b2, b3)
    };
    Ok(EtBoundChain {
        log_l: et.log_value,
        log_q_norm_bound: b1,
        log_cauchy_binet_bound: b2,
        log_am_gm_bound: b3,
        logdet_a: ld_n,
        logdet_a_next: ld_next,
    })
}
