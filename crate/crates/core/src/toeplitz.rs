//! The Toeplitz matrices attached to an `[m,n]` Padé problem and the dense
//! LU machinery used to solve them.
//!
//! For a coefficient window `a_0, a_1, …` (with `a_l = 0` for `l < 0`):
//!
//! * `C` is `(m+1)×(n+1)` with `C[i][j] = a_{i-j}`; `C q = p`.
//! * `T` is `n×(n+1)` with `T[i][j] = a_{m+1+i-j}`; `T q = 0`.
//! * `A` is `n×n` with `A[i][j] = a_{m+i-j}`, i.e. columns `1..=n` of `T`.

use std::fmt::Debug;
use std::ops::Neg;

use num_complex::{Complex, Complex64};
use num_traits::{Num, ToPrimitive};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::poly::Precision;

/// Condition cap above which a double-precision solve is declared degenerate.
pub const DOUBLE_CONDITION_CAP: f64 = 1e12;
/// Condition cap for double-double solves.
pub const EXTENDED_CONDITION_CAP: f64 = 1e28;

/// Field element usable in the Toeplitz solves.
pub trait Scalar: Copy + Debug + Send + Sync + Num + Neg<Output = Self> + 'static {
    fn modulus(&self) -> f64;
    fn from_f64(x: f64) -> Self;
    fn to_complex(&self) -> Complex64;
    fn conj(&self) -> Self;
    /// `x / |x|` (or 1 for zero).
    fn unit(&self) -> Self;
    /// Division at the full working precision of the type.
    fn div_by(self, rhs: Self) -> Self {
        self / rhs
    }
}

/// Double-double reciprocal: the `twofloat` quotient keeps only the high
/// word, so refine the f64 reciprocal with one Newton step.
pub fn dd_recip(x: TwoFloat) -> TwoFloat {
    let r = TwoFloat::from(1.0 / x.hi());
    r + r * (TwoFloat::from(1.0) - x * r)
}

/// A coefficient type with a double-double counterpart.
pub trait Coefficient: Scalar {
    type Wide: Scalar;
    fn widen(&self) -> Self::Wide;
}

impl Scalar for f64 {
    fn modulus(&self) -> f64 {
        self.abs()
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
    fn conj(&self) -> Self {
        *self
    }
    fn unit(&self) -> Self {
        if *self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

impl Scalar for Complex64 {
    fn modulus(&self) -> f64 {
        self.norm()
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn unit(&self) -> Self {
        let r = self.norm();
        if r == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            self / r
        }
    }
}

impl Scalar for TwoFloat {
    fn modulus(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn from_f64(x: f64) -> Self {
        TwoFloat::from(x)
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn conj(&self) -> Self {
        *self
    }
    fn unit(&self) -> Self {
        if *self < TwoFloat::from(0.0) {
            TwoFloat::from(-1.0)
        } else {
            TwoFloat::from(1.0)
        }
    }
    fn div_by(self, rhs: Self) -> Self {
        self * dd_recip(rhs)
    }
}

impl Scalar for Complex<TwoFloat> {
    fn modulus(&self) -> f64 {
        let re = self.re.to_f64().unwrap_or(f64::NAN);
        let im = self.im.to_f64().unwrap_or(f64::NAN);
        re.hypot(im)
    }
    fn from_f64(x: f64) -> Self {
        Complex::new(TwoFloat::from(x), TwoFloat::from(0.0))
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
    fn conj(&self) -> Self {
        Complex::new(self.re, -self.im)
    }
    fn unit(&self) -> Self {
        let r = self.modulus();
        if r == 0.0 {
            Self::from_f64(1.0)
        } else {
            Complex::new(self.re / r, self.im / r)
        }
    }
    fn div_by(self, rhs: Self) -> Self {
        let k = dd_recip(rhs.norm_sqr());
        self * Complex::new(rhs.re * k, -rhs.im * k)
    }
}

impl Coefficient for f64 {
    type Wide = TwoFloat;
    fn widen(&self) -> TwoFloat {
        TwoFloat::from(*self)
    }
}

impl Coefficient for Complex64 {
    type Wide = Complex<TwoFloat>;
    fn widen(&self) -> Complex<TwoFloat> {
        Complex::new(TwoFloat::from(self.re), TwoFloat::from(self.im))
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul_vec(&self, x: &[S]) -> Vec<S> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter()
                    .zip(x)
                    .fold(S::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// `M M*`.
    pub fn gram(&self) -> Matrix<S> {
        Matrix::from_fn(self.rows, self.rows, |i, j| {
            (0..self.cols).fold(S::zero(), |acc, k| {
                acc + self.get(i, k) * self.get(j, k).conj()
            })
        })
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.cols)
            .map(|j| {
                (0..self.rows)
                    .map(|i| self.get(i, j).modulus())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Sum of all column 1-norms.
    pub fn entrywise_l1(&self) -> f64 {
        self.data.iter().map(|x| x.modulus()).sum()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

/// The matrices `C`, `T` and `A` of an `[m,n]` Padé problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzTriple<S> {
    pub m: usize,
    pub n: usize,
    pub c: Matrix<S>,
    pub t: Matrix<S>,
    pub a: Matrix<S>,
}

fn coeff_at<S: Scalar>(coeffs: &[S], l: isize) -> S {
    if l < 0 {
        S::zero()
    } else {
        coeffs.get(l as usize).copied().unwrap_or_else(S::zero)
    }
}

/// Square Toeplitz matrix `A_m^(n)[i][j] = a_{m+i-j}`.
pub fn toeplitz_a<S: Scalar>(coeffs: &[S], m: usize, n: usize) -> Result<Matrix<S>> {
    if n > 0 && coeffs.len() < m + n {
        return Err(Error::InsufficientCoefficients {
            needed: m + n,
            got: coeffs.len(),
        });
    }
    Ok(Matrix::from_fn(n, n, |i, j| {
        coeff_at(coeffs, m as isize + i as isize - j as isize)
    }))
}

pub fn build_triple<S: Scalar>(coeffs: &[S], m: usize, n: usize) -> Result<ToeplitzTriple<S>> {
    let needed = m + n + 1;
    if coeffs.len() < needed {
        return Err(Error::InsufficientCoefficients {
            needed,
            got: coeffs.len(),
        });
    }
    let c = Matrix::from_fn(m + 1, n + 1, |i, j| {
        coeff_at(coeffs, i as isize - j as isize)
    });
    let t = Matrix::from_fn(n, n + 1, |i, j| {
        coeff_at(coeffs, (m + 1 + i) as isize - j as isize)
    });
    let a = Matrix::from_fn(n, n, |i, j| t.get(i, j + 1));
    Ok(ToeplitzTriple { m, n, c, t, a })
}

/// `log|det|` with phase, singularity flag and a 1-norm condition estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetResult {
    /// Natural log of `|det|`; `-inf` when singular.
    pub log_abs: f64,
    pub sign_or_phase: Complex64,
    pub singular: bool,
    pub condition_estimate: f64,
}

/// LU factors with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu<S> {
    lu: Matrix<S>,
    perm: Vec<usize>,
    swaps: usize,
    singular: bool,
    norm_1: f64,
}

impl<S: Scalar> Lu<S> {
    pub fn new(a: &Matrix<S>) -> Self {
        assert_eq!(a.rows, a.cols, "LU needs a square matrix");
        let n = a.rows;
        let norm_1 = a.norm_1();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let mut singular = false;
        for k in 0..n {
            let (piv, best) = (k..n)
                .map(|i| (i, lu.get(i, k).modulus()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == 0.0 {
                singular = true;
                continue;
            }
            if piv != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
                swaps += 1;
            }
            let pivot = lu.get(k, k);
            for i in k + 1..n {
                let factor = lu.get(i, k).div_by(pivot);
                lu.set(i, k, factor);
                if factor == S::zero() {
                    continue;
                }
                for j in k + 1..n {
                    let v = lu.get(i, j) - factor * lu.get(k, j);
                    lu.set(i, j, v);
                }
            }
        }
        Self {
            lu,
            perm,
            swaps,
            singular,
            norm_1,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn det(&self) -> DetResult {
        let n = self.dim();
        if self.singular {
            return DetResult {
                log_abs: f64::NEG_INFINITY,
                sign_or_phase: Complex64::new(0.0, 0.0),
                singular: true,
                condition_estimate: f64::INFINITY,
            };
        }
        let mut log_abs = 0.0;
        let mut phase = if self.swaps % 2 == 1 {
            Complex64::new(-1.0, 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        };
        for k in 0..n {
            let u = self.lu.get(k, k);
            log_abs += u.modulus().ln();
            phase *= u.unit().to_complex();
        }
        DetResult {
            log_abs,
            sign_or_phase: phase,
            singular: false,
            condition_estimate: self.condition_estimate(),
        }
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &[S]) -> Vec<S> {
        let n = self.dim();
        let mut x: Vec<S> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc = acc - self.lu.get(i, j) * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc = acc - self.lu.get(i, j) * x[j];
            }
            x[i] = acc.div_by(self.lu.get(i, i));
        }
        x
    }

    /// Solve `A* x = b`.
    pub fn solve_adjoint(&self, b: &[S]) -> Vec<S> {
        let n = self.dim();
        let mut y = b.to_vec();
        // U* y1 = b
        for i in 0..n {
            let mut acc = y[i];
            for j in 0..i {
                acc = acc - self.lu.get(j, i).conj() * y[j];
            }
            y[i] = acc.div_by(self.lu.get(i, i).conj());
        }
        // L* y2 = y1
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in i + 1..n {
                acc = acc - self.lu.get(j, i).conj() * y[j];
            }
            y[i] = acc;
        }
        let mut x = vec![S::zero(); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }

    /// `‖A‖₁ · est(‖A⁻¹‖₁)` with Hager's estimator (Higham's variant).
    pub fn condition_estimate(&self) -> f64 {
        let n = self.dim();
        if n == 0 {
            return 1.0;
        }
        if self.singular {
            return f64::INFINITY;
        }
        let mut x = vec![S::from_f64(1.0 / n as f64); n];
        let mut est = 0.0;
        for _ in 0..5 {
            let y = self.solve(&x);
            est = y.iter().map(|v| v.modulus()).sum::<f64>();
            let xi: Vec<S> = y.iter().map(|v| v.unit()).collect();
            let z = self.solve_adjoint(&xi);
            let (jmax, zmax) = z
                .iter()
                .enumerate()
                .map(|(j, v)| (j, v.modulus()))
                .fold((0, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
            let ztx: f64 = z
                .iter()
                .zip(&x)
                .map(|(a, b)| (a.conj() * *b).to_complex().re)
                .sum();
            if zmax <= ztx {
                break;
            }
            x = vec![S::zero(); n];
            x[jmax] = S::one();
        }
        if !est.is_finite() {
            return f64::INFINITY;
        }
        est * self.norm_1
    }
}

/// Log-determinant of a square matrix via partial-pivot LU.
pub fn log_abs_det<S: Scalar>(m: &Matrix<S>) -> DetResult {
    Lu::new(m).det()
}

/// Condition cap for the given arithmetic.
pub fn condition_cap(precision: Precision) -> f64 {
    match precision {
        Precision::Extended => EXTENDED_CONDITION_CAP,
        _ => DOUBLE_CONDITION_CAP,
    }
}

/// Normalized denominator `q` (with `q_0 = 1`) such that `T q = 0`.
pub fn solve_denominator<S: Scalar>(triple: &ToeplitzTriple<S>) -> Result<Vec<S>> {
    solve_denominator_capped(triple, DOUBLE_CONDITION_CAP).map(|(q, _)| q)
}

/// As [`solve_denominator`], also returning the determinant diagnostics of `A`.
pub fn solve_denominator_capped<S: Scalar>(
    triple: &ToeplitzTriple<S>,
    cap: f64,
) -> Result<(Vec<S>, DetResult)> {
    let n = triple.n;
    if n == 0 {
        let det = log_abs_det(&triple.a);
        return Ok((vec![S::one()], det));
    }
    let lu = Lu::new(&triple.a);
    let det = lu.det();
    if det.singular {
        return Err(Error::DegenerateSystem {
            m: triple.m,
            n,
            reason: "singular (zero pivot)".into(),
        });
    }
    if !(det.condition_estimate <= cap) {
        return Err(Error::DegenerateSystem {
            m: triple.m,
            n,
            reason: format!(
                "condition estimate {:.3e} exceeds cap {:.0e}",
                det.condition_estimate, cap
            ),
        });
    }
    let rhs: Vec<S> = triple.t.column(0).into_iter().map(|v| -v).collect();
    let tail = lu.solve(&rhs);
    let mut q = Vec::with_capacity(n + 1);
    q.push(S::one());
    q.extend(tail);
    Ok((q, det))
}
