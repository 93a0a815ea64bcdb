//! Complex polynomials: evaluation, truncated products, root finding and the
//! circle averages that enter Jensen's formula.

mod aberth;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use aberth::{find_roots, find_roots_with, Precision, RootOptions, RootSet};

/// Relative threshold below which a coefficient counts as zero.
pub const ZERO_THRESHOLD: f64 = 1e-13;

/// A polynomial `Σ coeffs[j] z^j` with complex coefficients.
///
/// The stored coefficient vector is kept as given (it is the formal
/// polynomial, e.g. a Padé numerator of formal degree `m`); `degree` is the
/// highest index whose coefficient clears the zero threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
    degree: usize,
}

impl ComplexPolynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        let degree = classify_degree(&coeffs);
        Self { coeffs, degree }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Monic polynomial `Π (z - z_j)`, multiplied out in Leja order to keep
    /// the partial products small.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for r in leja_order(roots) {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (j, &c) in coeffs.iter().enumerate() {
                next[j + 1] += c;
                next[j] -= c * r;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Absolute threshold `ZERO_THRESHOLD * max|c_j|`.
    pub fn zero_threshold(&self) -> f64 {
        ZERO_THRESHOLD * self.max_abs_coeff()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    pub fn is_negligible(&self, j: usize) -> bool {
        self.coeffs
            .get(j)
            .is_none_or(|c| c.norm() <= self.zero_threshold())
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.degree]
    }

    /// `Σ |c_j|`.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        evaluate(self, z)
    }

    /// `log|p(z)|`, evaluated through the reversed polynomial when `|z| > 1`
    /// so that high degrees do not overflow.
    pub fn log_abs_at(&self, z: Complex64) -> f64 {
        let r = z.norm();
        if r <= 1.0 {
            return evaluate(self, z).norm().ln();
        }
        let w = z.inv();
        let rev = self
            .coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c);
        rev.norm().ln() + (self.coeffs.len() - 1) as f64 * r.ln()
    }

    /// `|p(z)| / Σ |c_j||z|^j`, the componentwise relative backward error of
    /// `z` as a root. Scale-free and overflow-safe.
    pub fn backward_error(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let (value, scale) = if r <= 1.0 {
            self.coeffs
                .iter()
                .rev()
                .fold((Complex64::new(0.0, 0.0), 0.0), |(v, s), &c| {
                    (v * z + c, s * r + c.norm())
                })
        } else {
            let w = z.inv();
            let rw = w.norm();
            self.coeffs
                .iter()
                .fold((Complex64::new(0.0, 0.0), 0.0), |(v, s), &c| {
                    (v * w + c, s * rw + c.norm())
                })
        };
        if scale == 0.0 {
            0.0
        } else {
            value.norm() / scale
        }
    }
}

fn classify_degree(coeffs: &[Complex64]) -> usize {
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let thr = ZERO_THRESHOLD * max;
    coeffs.iter().rposition(|c| c.norm() > thr).unwrap_or(0)
}

/// Greedy Leja ordering: start from the largest modulus, then repeatedly
/// take the point maximizing the product of distances to those already taken.
fn leja_order(points: &[Complex64]) -> Vec<Complex64> {
    let mut rest = points.to_vec();
    let mut out = Vec::with_capacity(rest.len());
    let mut score = vec![0.0f64; rest.len()];
    let first = rest
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(k, _)| k);
    let Some(mut pick) = first else {
        return out;
    };
    while !rest.is_empty() {
        let z = rest.swap_remove(pick);
        score.swap_remove(pick);
        out.push(z);
        let mut best = f64::NEG_INFINITY;
        for (k, w) in rest.iter().enumerate() {
            score[k] += (w - z).norm().max(1e-300).ln();
            if score[k] > best {
                best = score[k];
                pick = k;
            }
        }
    }
    out
}

/// Horner evaluation of `Σ coeffs[j] z^j`.
pub fn evaluate(p: &ComplexPolynomial, z: Complex64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        return p.coeffs[0];
    }
    p.coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Coefficients `0..=order` of the product `f * g`.
pub fn truncated_product(
    f: &ComplexPolynomial,
    g: &ComplexPolynomial,
    order: usize,
) -> ComplexPolynomial {
    let mut out = vec![Complex64::new(0.0, 0.0); order + 1];
    for (i, &a) in f.coeffs.iter().enumerate().take(order + 1) {
        for (j, &b) in g.coeffs.iter().enumerate().take(order + 1 - i) {
            out[i + j] += a * b;
        }
    }
    ComplexPolynomial::new(out)
}

/// Trapezoidal approximation of `(1/2π) ∫ log|p(r e^{iθ})| dθ` on a uniform
/// grid of `quad_points` nodes.
///
/// A node that lands on (numerically) a zero of `p` is shifted by half a grid
/// step so the sum stays finite.
pub fn circle_log_average(p: &ComplexPolynomial, r: f64, quad_points: usize) -> Result<f64> {
    check_circle_args(p, r)?;
    let min_points = 2 * p.degree() + 16;
    if quad_points < min_points {
        return Err(Error::InvalidArgument(format!(
            "quad_points = {quad_points} is below 2*degree+16 = {min_points}"
        )));
    }
    let sum: f64 = (0..quad_points)
        .map(|k| log_abs_node(p, r, k as f64, quad_points))
        .sum();
    Ok(sum / quad_points as f64)
}

/// Same quantity as [`circle_log_average`], doubling the grid (nested nodes)
/// until two successive averages agree to `tol`.
pub fn circle_log_average_adaptive(
    p: &ComplexPolynomial,
    r: f64,
    tol: f64,
    max_points: usize,
) -> Result<f64> {
    check_circle_args(p, r)?;
    let mut q = (2 * p.degree() + 16).next_power_of_two().max(64);
    let mut sum: f64 = (0..q).map(|k| log_abs_node(p, r, k as f64, q)).sum();
    let mut avg = sum / q as f64;
    while 2 * q <= max_points {
        let q2 = 2 * q;
        let extra: f64 = (0..q)
            .map(|k| log_abs_node(p, r, (2 * k + 1) as f64, q2))
            .sum();
        sum += extra;
        let next = sum / q2 as f64;
        let done = (next - avg).abs() <= tol;
        avg = next;
        q = q2;
        if done {
            return Ok(avg);
        }
    }
    Err(Error::InvalidArgument(format!(
        "circle average at r = {r} did not settle to {tol:e} within {max_points} nodes"
    )))
}

fn check_circle_args(p: &ComplexPolynomial, r: f64) -> Result<()> {
    if p.is_zero() {
        return Err(Error::DegenerateInput("zero polynomial".into()));
    }
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radius must be positive, got {r}"
        )));
    }
    Ok(())
}

fn log_abs_node(p: &ComplexPolynomial, r: f64, k: f64, q: usize) -> f64 {
    let step = 2.0 * PI / q as f64;
    let z = Complex64::from_polar(r, k * step);
    let v = p.log_abs_at(z);
    if v.is_finite() && p.backward_error(z) > 1e-12 {
        return v;
    }
    p.log_abs_at(Complex64::from_polar(r, (k + 0.5) * step))
}

/// Right side of Jensen's formula: `log|p(0)| + Σ_{|z_j|<r} log(r/|z_j|)`.
pub fn jensen_rhs(roots: &RootSet, p0_abs: f64, r: f64) -> Result<f64> {
    if !(p0_abs > 0.0) {
        return Err(Error::DegenerateInput(
            "p(0) = 0; Jensen's formula needs a nonzero value at the origin".into(),
        ));
    }
    let mut acc = p0_abs.ln();
    for z in roots.roots() {
        let m = z.norm();
        if m == 0.0 {
            return Err(Error::DegenerateInput(
                "root at the origin with p(0) != 0".into(),
            ));
        }
        if m < r {
            acc += (r / m).ln();
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn evaluate_examples() {
        let p = ComplexPolynomial::from_real(&[1.0, 0.0, 1.0]);
        assert!(evaluate(&p, c(0.0, 1.0)).norm() < 1e-15);
        let one = ComplexPolynomial::from_real(&[1.0]);
        assert_eq!(evaluate(&one, c(3.0, -2.0)), c(1.0, 0.0));
        let geo = ComplexPolynomial::from_real(&[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(evaluate(&geo, c(2.0, 0.0)), c(15.0, 0.0));
    }

    #[test]
    fn evaluate_at_origin_is_exact() {
        let p = ComplexPolynomial::new(vec![c(0.1, 0.3), c(1e300, 0.0), c(-7.0, 2.0)]);
        assert_eq!(evaluate(&p, c(0.0, 0.0)), c(0.1, 0.3));
    }

    #[test]
    fn degree_uses_zero_threshold() {
        let p = ComplexPolynomial::from_real(&[1.0, 2.0, 1e-14, 0.0]);
        assert_eq!(p.degree(), 1);
        assert_eq!(p.coeffs().len(), 4);
        assert_eq!(ComplexPolynomial::from_real(&[]).degree(), 0);
    }

    #[test]
    fn truncated_product_examples() {
        let f = ComplexPolynomial::from_real(&[1.0, 1.0]);
        let g = ComplexPolynomial::from_real(&[1.0, -1.0]);
        let h = truncated_product(&f, &g, 2);
        assert_eq!(h.coeffs(), &[c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);

        let f = ComplexPolynomial::from_real(&[1.0, 1.0, 1.0, 1.0]);
        let h = truncated_product(&f, &g, 3);
        assert_eq!(
            h.coeffs(),
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        );

        let h = truncated_product(
            &ComplexPolynomial::from_real(&[2.0]),
            &ComplexPolynomial::from_real(&[3.0]),
            5,
        );
        assert_eq!(h.coeffs().len(), 6);
        assert_eq!(h.coeffs()[0], c(6.0, 0.0));
        assert!(h.coeffs()[1..].iter().all(|z| *z == c(0.0, 0.0)));
    }

    #[test]
    fn circle_average_examples() {
        let p = ComplexPolynomial::from_real(&[1.0, -2.0]);
        let v = circle_log_average(&p, 1.0, 64).unwrap();
        assert_abs_diff_eq!(v, 2f64.ln(), epsilon = 1e-12);

        let k = ComplexPolynomial::from_real(&[-3.5]);
        assert_abs_diff_eq!(
            circle_log_average(&k, 0.7, 16).unwrap(),
            3.5f64.ln(),
            epsilon = 1e-14
        );

        let p = ComplexPolynomial::from_real(&[1.0, 1.0]);
        assert_abs_diff_eq!(
            circle_log_average(&p, 0.5, 64).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn circle_average_survives_root_on_grid() {
        // 1 - z has a root exactly on the node θ = 0.
        let p = ComplexPolynomial::from_real(&[1.0, -1.0]);
        let v = circle_log_average(&p, 1.0, 4096).unwrap();
        assert!(v.is_finite());
        assert!(v.abs() < 1e-2);
    }

    #[test]
    fn circle_average_errors() {
        let zero = ComplexPolynomial::from_real(&[0.0, 0.0]);
        assert!(matches!(
            circle_log_average(&zero, 1.0, 64),
            Err(Error::DegenerateInput(_))
        ));
        let p = ComplexPolynomial::from_real(&[1.0, 1.0, 1.0]);
        assert!(matches!(
            circle_log_average(&p, 1.0, 10),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn adaptive_average_handles_near_circle_roots() {
        // roots at 0.999 e^{iθ}: slowly convergent trapezoid at r = 1
        let roots: Vec<_> = (0..5)
            .map(|k| Complex64::from_polar(0.999, 1.0 + k as f64))
            .collect();
        let p = ComplexPolynomial::from_roots(&roots);
        let set = RootSet::from_parts(roots, 0.0, true);
        let exact = jensen_rhs(&set, p.coeffs()[0].norm(), 1.0).unwrap();
        let v = circle_log_average_adaptive(&p, 1.0, 1e-10, 1 << 20).unwrap();
        assert_abs_diff_eq!(v, exact, epsilon = 1e-8);
    }

    #[test]
    fn jensen_rhs_examples() {
        let set =
            |zs: &[f64]| RootSet::from_parts(zs.iter().map(|&x| c(x, 0.0)).collect(), 0.0, true);
        assert_abs_diff_eq!(jensen_rhs(&set(&[0.5]), 1.0, 1.0).unwrap(), 2f64.ln());
        assert_abs_diff_eq!(jensen_rhs(&set(&[2.0]), 3.0, 1.0).unwrap(), 3f64.ln());
        let expect = (1.0f64 / 0.3).ln() + 2f64.ln() + (1.0f64 / 0.9).ln();
        assert_abs_diff_eq!(
            jensen_rhs(&set(&[0.3, 0.5, 0.9]), 1.0, 1.0).unwrap(),
            expect,
            epsilon = 1e-15
        );
        assert!(matches!(
            jensen_rhs(&set(&[0.5]), 0.0, 1.0),
            Err(Error::DegenerateInput(_))
        ));
    }

    fn brute_convolution(f: &[Complex64], g: &[Complex64], j: usize) -> Complex64 {
        let mut acc = c(0.0, 0.0);
        for i in 0..=j {
            let a = f.get(i).copied().unwrap_or_default();
            let b = g.get(j - i).copied().unwrap_or_default();
            acc += a * b;
        }
        acc
    }

    proptest! {
        #[test]
        fn truncated_product_matches_brute_force(
            f in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..12),
            g in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..12),
            order in 0usize..25,
        ) {
            let f: Vec<_> = f.into_iter().map(|(a, b)| c(a, b)).collect();
            let g: Vec<_> = g.into_iter().map(|(a, b)| c(a, b)).collect();
            let h = truncated_product(
                &ComplexPolynomial::new(f.clone()),
                &ComplexPolynomial::new(g.clone()),
                order,
            );
            prop_assert_eq!(h.coeffs().len(), order + 1);
            for j in 0..=order {
                prop_assert!((h.coeffs()[j] - brute_convolution(&f, &g, j)).norm() < 1e-12);
            }
        }

        #[test]
        fn log_abs_matches_direct_evaluation(
            cs in prop::collection::vec(-3.0f64..3.0, 2..20),
            r in 0.1f64..3.0,
            t in 0.0f64..6.28,
        ) {
            let p = ComplexPolynomial::from_real(&cs);
            let z = Complex64::from_polar(r, t);
            let direct = evaluate(&p, z).norm();
            prop_assume!(direct > 1e-8);
            prop_assert!((p.log_abs_at(z) - direct.ln()).abs() < 1e-9);
        }
    }
}
