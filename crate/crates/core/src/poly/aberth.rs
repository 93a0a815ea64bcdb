//! Simultaneous root finding with the Aberth–Ehrlich iteration.
//!
//! Starting points come from the Newton polygon of `log|c_j|`: one circle per
//! hull edge, with golden-angle phase offsets between circles. For random
//! power series this is a single circle close to `|z| = 1`.

use std::f64::consts::PI;

use num_complex::{Complex, Complex64};
use num_traits::Float;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use super::ComplexPolynomial;
use crate::error::{Error, Result};

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

/// Arithmetic used by the root finder and the Toeplitz solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Double,
    /// Double-double (about 32 significant digits).
    Extended,
    /// Double first, extended on failure.
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub precision: Precision,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 600,
            precision: Precision::Auto,
        }
    }
}

/// Roots of a polynomial, repeated with multiplicity.
///
/// `residual` is the largest componentwise backward error
/// `|p(z)| / Σ|c_j||z|^j` over the roots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    roots: Vec<Complex64>,
    residual: f64,
    converged: bool,
    iterations: usize,
    extended: bool,
}

impl RootSet {
    pub fn from_parts(roots: Vec<Complex64>, residual: f64, converged: bool) -> Self {
        Self {
            roots,
            residual,
            converged,
            iterations: 0,
            extended: false,
        }
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn used_extended(&self) -> bool {
        self.extended
    }

    pub fn sorted_by_modulus(&self) -> Vec<Complex64> {
        let mut v = self.roots.clone();
        v.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        v
    }

    pub fn moduli_sorted(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.roots.iter().map(|z| z.norm()).collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Roots of `p` in automatic precision.
pub fn find_roots(p: &ComplexPolynomial, tol: f64, max_iter: usize) -> Result<RootSet> {
    find_roots_with(
        p,
        &RootOptions {
            tol,
            max_iter,
            precision: Precision::Auto,
        },
    )
}

pub fn find_roots_with(p: &ComplexPolynomial, opts: &RootOptions) -> Result<RootSet> {
    if p.is_zero() {
        return Err(Error::DegenerateInput(
            "zero polynomial has no finite root set".into(),
        ));
    }
    let degree = p.degree();
    if degree == 0 {
        return Err(Error::DegenerateInput(
            "constant polynomial has no roots".into(),
        ));
    }
    let thr = p.zero_threshold();
    let coeffs = &p.coeffs()[..=degree];
    let at_origin = coeffs.iter().take_while(|c| c.norm() <= thr).count();
    let core = &coeffs[at_origin..];
    let zero = Complex64::new(0.0, 0.0);

    let finish = |mut found: Vec<Complex64>, residual: f64, iterations: usize, extended: bool| {
        found.extend(std::iter::repeat_n(zero, at_origin));
        RootSet {
            roots: found,
            residual,
            converged: residual <= opts.tol,
            iterations,
            extended,
        }
    };

    match core.len() - 1 {
        0 => return Ok(finish(Vec::new(), 0.0, 0, false)),
        1 => {
            let z = -core[0] / core[1];
            let res = ComplexPolynomial::new(core.to_vec()).backward_error(z);
            return check(finish(vec![z], res, 0, false));
        }
        _ => {}
    }

    let double = Aberth::<f64>::new(core);
    let run = double.solve(double.initial_guesses(), opts.max_iter);
    let mut set = finish(run.roots.clone(), run.residual, run.iterations, false);
    let want_extended = match opts.precision {
        Precision::Double => false,
        Precision::Extended => true,
        Precision::Auto => !set.converged,
    };
    if want_extended {
        let ext = Aberth::<TwoFloat>::new(core);
        let start = run
            .roots
            .iter()
            .map(|z| Complex::new(TwoFloat::from(z.re), TwoFloat::from(z.im)))
            .collect();
        let polished = ext.solve(start, opts.max_iter);
        set = finish(
            polished.roots,
            polished.residual,
            run.iterations + polished.iterations,
            true,
        );
    }
    check(set)
}

fn check(set: RootSet) -> Result<RootSet> {
    if set.converged {
        Ok(set)
    } else {
        Err(Error::NonConvergence {
            iterations: set.iterations,
            residual: set.residual,
            best: Box::new(set),
        })
    }
}

/// Floating-point type the iteration runs in.
trait Working: Float + Send + Sync {
    /// Unit roundoff.
    const UNIT: f64;
    fn from_f64(x: f64) -> Self;
    fn recip_full(self) -> Self;
}

impl Working for f64 {
    const UNIT: f64 = f64::EPSILON / 2.0;
    fn from_f64(x: f64) -> Self {
        x
    }
    fn recip_full(self) -> Self {
        1.0 / self
    }
}

impl Working for TwoFloat {
    const UNIT: f64 = 4.93e-32;
    fn from_f64(x: f64) -> Self {
        TwoFloat::from(x)
    }
    fn recip_full(self) -> Self {
        crate::toeplitz::dd_recip(self)
    }
}

fn cinv<F: Working>(z: Complex<F>) -> Complex<F> {
    let k = z.norm_sqr().recip_full();
    Complex::new(z.re * k, -z.im * k)
}

fn cdiv<F: Working>(a: Complex<F>, b: Complex<F>) -> Complex<F> {
    a * cinv(b)
}

struct Run {
    roots: Vec<Complex64>,
    residual: f64,
    iterations: usize,
}

struct Aberth<F> {
    coeffs: Vec<Complex<F>>,
    abs: Vec<F>,
    source: Vec<Complex64>,
}

impl<F: Working> Aberth<F> {
    fn new(core: &[Complex64]) -> Self {
        let coeffs: Vec<Complex<F>> = core
            .iter()
            .map(|c| Complex::new(F::from_f64(c.re), F::from_f64(c.im)))
            .collect();
        let abs = coeffs.iter().map(|c| c.norm()).collect();
        Self {
            coeffs,
            abs,
            source: core.to_vec(),
        }
    }

    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Newton correction `p(z)/p'(z)` and the backward error at `z`.
    fn newton_ratio(&self, z: Complex<F>) -> (Complex<F>, F) {
        let d = self.degree();
        let r = z.norm();
        let zero = Complex::new(F::zero(), F::zero());
        if r <= F::one() {
            let mut p = self.coeffs[d];
            let mut dp = zero;
            let mut s = self.abs[d];
            for j in (0..d).rev() {
                dp = dp * z + p;
                p = p * z + self.coeffs[j];
                s = s * r + self.abs[j];
            }
            (cdiv(p, dp), p.norm() * s.recip_full())
        } else {
            // p(z) = z^d q(1/z) with q the reversed polynomial
            let w = cinv(z);
            let rw = w.norm();
            let mut q = self.coeffs[0];
            let mut dq = zero;
            let mut s = self.abs[0];
            for j in 1..=d {
                dq = dq * w + q;
                q = q * w + self.coeffs[j];
                s = s * rw + self.abs[j];
            }
            let dd = Complex::new(F::from_f64(d as f64), F::zero());
            (cdiv(z * q, dd * q - w * dq), q.norm() * s.recip_full())
        }
    }

    fn initial_guesses(&self) -> Vec<Complex<F>> {
        let d = self.degree();
        let logs: Vec<(usize, f64)> = self
            .source
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(j, c)| (j, c.norm().ln()))
            .collect();
        let hull = upper_hull(&logs);
        let mut out = Vec::with_capacity(d);
        for (seg, w) in hull.windows(2).enumerate() {
            let (i, li) = w[0];
            let (k, lk) = w[1];
            let count = k - i;
            let radius = ((li - lk) / count as f64).exp();
            let phase = 0.7 + GOLDEN_ANGLE * seg as f64;
            for l in 0..count {
                let t = 2.0 * PI * l as f64 / count as f64 + phase;
                let z = Complex64::from_polar(radius, t);
                out.push(Complex::new(F::from_f64(z.re), F::from_f64(z.im)));
            }
        }
        out
    }

    fn solve(&self, mut z: Vec<Complex<F>>, max_iter: usize) -> Run {
        let d = self.degree();
        let one = Complex::new(F::one(), F::zero());
        let noise = F::from_f64(8.0 * F::UNIT);
        let step_floor = F::from_f64(4.0 * F::UNIT);
        let mut done = vec![false; d];
        let mut iterations = 0;
        for it in 0..max_iter {
            let mut moved = 0;
            for i in 0..d {
                if done[i] {
                    continue;
                }
                let (ratio, be) = self.newton_ratio(z[i]);
                if be <= noise {
                    done[i] = true;
                    continue;
                }
                let zi = z[i];
                let mut s = Complex::new(F::zero(), F::zero());
                for (j, &zj) in z.iter().enumerate() {
                    if j != i {
                        s = s + cinv(zi - zj);
                    }
                }
                let delta = cdiv(ratio, one - ratio * s);
                if !(delta.re.is_finite() && delta.im.is_finite()) {
                    // coincident iterates or a critical point: nudge off it
                    let kick = Complex64::from_polar(1e-7, GOLDEN_ANGLE * (i + it) as f64);
                    let kick = Complex::new(F::from_f64(kick.re), F::from_f64(kick.im));
                    z[i] = zi + kick * (one + Complex::new(zi.norm(), F::zero()));
                    moved += 1;
                    continue;
                }
                z[i] = zi - delta;
                if delta.norm() <= step_floor * z[i].norm() {
                    done[i] = true;
                }
                moved += 1;
            }
            iterations = it + 1;
            if moved == 0 {
                break;
            }
        }
        let residual = z
            .iter()
            .map(|&zi| self.newton_ratio(zi).1.to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max);
        Run {
            roots: z
                .iter()
                .map(|c| {
                    Complex64::new(
                        c.re.to_f64().unwrap_or(f64::NAN),
                        c.im.to_f64().unwrap_or(f64::NAN),
                    )
                })
                .collect(),
            residual,
            iterations,
        }
    }
}

/// Upper convex hull of points sorted by abscissa (monotone chain).
fn upper_hull(points: &[(usize, f64)]) -> Vec<(usize, f64)> {
    let mut hull: Vec<(usize, f64)> = Vec::with_capacity(points.len());
    for &p in points {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            let cross = (x2 as f64 - x1 as f64) * (p.1 - y1) - (y2 - y1) * (p.0 as f64 - x1 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ComplexPolynomial;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn quadratic() {
        let p = ComplexPolynomial::from_real(&[-1.0, 0.0, 1.0]);
        let set = find_roots(&p, 1e-12, 200).unwrap();
        let mut re: Vec<f64> = set.roots().iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 1.0).abs() < 1e-14 && (re[1] - 1.0).abs() < 1e-14);
        assert!(set.roots().iter().all(|z| z.im.abs() < 1e-14));
    }

    #[test]
    fn eighth_roots_of_minus_one() {
        let mut cs = vec![0.0; 9];
        cs[0] = 1.0;
        cs[8] = 1.0;
        let set = find_roots(&ComplexPolynomial::from_real(&cs), 1e-12, 200).unwrap();
        assert_eq!(set.len(), 8);
        for z in set.roots() {
            assert!((z.norm() - 1.0).abs() < 1e-13);
            assert!((z.powi(8) + 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn zeros_at_origin_are_split_off() {
        // z^3 (z - 2)
        let p = ComplexPolynomial::from_real(&[0.0, 0.0, 0.0, -2.0, 1.0]);
        let set = find_roots(&p, 1e-12, 100).unwrap();
        assert_eq!(set.len(), 4);
        assert_eq!(set.roots().iter().filter(|z| **z == c(0.0, 0.0)).count(), 3);
        assert!(set.roots().iter().any(|z| (*z - 2.0).norm() < 1e-14));
    }

    #[test]
    fn constant_and_zero_are_rejected() {
        assert!(matches!(
            find_roots(&ComplexPolynomial::from_real(&[3.0]), 1e-12, 10),
            Err(Error::DegenerateInput(_))
        ));
        assert!(matches!(
            find_roots(&ComplexPolynomial::from_real(&[0.0, 0.0]), 1e-12, 10),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn non_convergence_is_reported_with_best_effort() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cs: Vec<f64> = (0..40).map(|_| rng.random_range(-1.0..1.0)).collect();
        let p = ComplexPolynomial::from_real(&cs);
        let opts = RootOptions {
            tol: 1e-12,
            max_iter: 1,
            precision: Precision::Double,
        };
        match find_roots_with(&p, &opts) {
            Err(Error::NonConvergence { best, residual, .. }) => {
                assert_eq!(best.len(), 39);
                assert!(residual > 1e-12);
            }
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn extended_precision_agrees_with_double() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cs: Vec<f64> = (0..25).map(|_| rng.random_range(-1.0..1.0)).collect();
        let p = ComplexPolynomial::from_real(&cs);
        let d = find_roots_with(
            &p,
            &RootOptions {
                precision: Precision::Double,
                ..Default::default()
            },
        )
        .unwrap();
        let e = find_roots_with(
            &p,
            &RootOptions {
                precision: Precision::Extended,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(e.used_extended());
        assert!(e.residual() < 1e-25, "{} {}", e.residual(), e.iterations());
        for z in d.roots() {
            let nearest = e
                .roots()
                .iter()
                .map(|w| (w - z).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-10);
        }
    }

    #[test]
    fn clustered_roots_of_high_degree() {
        let mut cs = vec![0.0; 1025];
        cs[0] = -1.0;
        cs[1024] = 1.0;
        let set = find_roots(&ComplexPolynomial::from_real(&cs), 1e-10, 600).unwrap();
        assert_eq!(set.len(), 1024);
        assert!(set.roots().iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn widely_spread_moduli() {
        let roots = [
            c(1e-3, 0.0),
            c(0.5, 0.5),
            c(-2.0, 1.0),
            c(40.0, -3.0),
            c(1e3, 0.0),
        ];
        let p = ComplexPolynomial::from_roots(&roots);
        let set = find_roots(&p, 1e-12, 300).unwrap();
        for r in roots {
            let nearest = set
                .roots()
                .iter()
                .map(|w| (w - r).norm() / r.norm())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-9, "root {r} missed: {nearest}");
        }
    }

    #[test]
    fn hull_of_collinear_points_keeps_ends() {
        let pts = vec![(0, 0.0), (1, 0.0), (2, 0.0), (5, 0.0)];
        let hull = upper_hull(&pts);
        assert_eq!(hull.first().unwrap().0, 0);
        assert_eq!(hull.last().unwrap().0, 5);
    }
}
