//! Empirical zero-counting measures and the clustering metrics built on them.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pade::{et_ratio, EtRatio};
use crate::poly::{ComplexPolynomial, RootSet};
use crate::Complex64;

/// Roots within this many grid steps of a sector boundary are snapped onto it.
const GRID_SNAP: f64 = 1e-9;

/// Uniform probability measure on a multiset of points.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    roots: Vec<Complex64>,
}

impl EmpiricalMeasure {
    pub fn new(roots: Vec<Complex64>) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::DegenerateInput("empty measure".into()));
        }
        Ok(Self { roots })
    }

    pub fn from_root_set(set: &RootSet) -> Result<Self> {
        Self::new(set.roots().to_vec())
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

    fn fraction(&self, pred: impl Fn(&Complex64) -> bool) -> f64 {
        self.roots.iter().filter(|z| pred(z)).count() as f64 / self.len() as f64
    }

    /// Mean of `f` over the atoms.
    pub fn integrate(&self, f: impl Fn(Complex64) -> f64) -> f64 {
        self.roots.iter().map(|&z| f(z)).sum::<f64>() / self.len() as f64
    }
}

/// Argument in `[0, 2π)`.
pub fn arg_2pi(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a < 0.0 {
        let b = a + TAU;
        if b >= TAU {
            0.0
        } else {
            b
        }
    } else {
        a
    }
}

/// Mass of the open annulus `(1−ρ)r < |z| < (1+ρ)r`.
pub fn annulus_mass(mu: &EmpiricalMeasure, r: f64, rho: f64) -> f64 {
    let (lo, hi) = ((1.0 - rho) * r, (1.0 + rho) * r);
    mu.fraction(|z| {
        let m = z.norm();
        lo < m && m < hi
    })
}

/// Mass of the sector `θ < Arg z ≤ φ`.
pub fn sector_mass(mu: &EmpiricalMeasure, theta: f64, phi: f64) -> f64 {
    mu.fraction(|&z| {
        let a = arg_2pi(z);
        theta < a && a <= phi
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialCheck {
    pub rho: f64,
    pub defect: f64,
    pub bound: f64,
    pub holds: bool,
}

/// `1 − ν(annulus around 𝕋)` against `log L / (ρN)`.
pub fn radial_bound_check(mu: &EmpiricalMeasure, et: &EtRatio, rho: f64) -> RadialCheck {
    let defect = 1.0 - annulus_mass(mu, 1.0, rho);
    let bound = et.log_value / (rho * et.degree() as f64);
    RadialCheck {
        rho,
        defect,
        bound,
        holds: defect <= bound + 1e-12,
    }
}

/// Largest `|(φ−θ)/2π − ν(θ, φ]|` over sectors with endpoints on the grid
/// `2πk/G`, `k = 0..G`.
pub fn sector_discrepancy(mu: &EmpiricalMeasure, grid_size: usize) -> f64 {
    assert!(grid_size >= 4, "grid_size must be at least 4");
    let g = grid_size as f64;
    // first grid index k with Arg z ≤ 2πk/G
    let mut first = vec![0usize; grid_size + 1];
    for &z in mu.roots() {
        let x = arg_2pi(z) * g / TAU;
        let near = x.round();
        let k = if (x - near).abs() <= GRID_SNAP {
            near
        } else {
            x.ceil()
        };
        first[(k as usize).min(grid_size)] += 1;
    }
    let n = mu.len() as f64;
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    let mut count = 0usize;
    for (k, &c) in first.iter().enumerate().take(grid_size).skip(1) {
        count += c;
        let e = k as f64 / g - count as f64 / n;
        lo = lo.min(e);
        hi = hi.max(e);
    }
    hi - lo
}

/// `16 √(log L / N)`.
pub fn et_sector_bound(et: &EtRatio) -> f64 {
    16.0 * (et.log_value / et.degree() as f64).sqrt()
}

/// `32 (log L / N)^{1/4}`.
pub fn bl_upper(et: &EtRatio, n: usize) -> f64 {
    bl_upper_from_log(et.log_value, n)
}

pub fn bl_upper_from_log(log_l: f64, n: usize) -> f64 {
    32.0 * (log_l / n as f64).powf(0.25)
}

/// Width of the radial tents; a tent centred at 0 then separates a point
/// mass at the origin from the circle.
const TENT_WIDTH: f64 = 1.0;

/// Lower estimate of `d_BL(ν, uniform on 𝕋)` over a fixed family of test
/// functions with `Lip + sup ≤ 1`.
pub fn bl_lower_estimate(mu: &EmpiricalMeasure, family_size: usize) -> f64 {
    assert!(family_size >= 8, "family_size must be at least 8");
    let half = family_size / 2;
    let polar: Vec<(f64, f64)> = mu.roots().iter().map(|z| (z.norm(), arg_2pi(*z))).collect();
    let n = polar.len() as f64;
    let mut best = 0.0f64;
    for k in 1..=half {
        let kf = k as f64;
        let scale = 1.0 / (kf + 1.0);
        let (mut c, mut s) = (0.0, 0.0);
        for &(r, a) in &polar {
            let g = r.min(1.0);
            c += g * (kf * a).cos();
            s += g * (kf * a).sin();
        }
        // both harmonics integrate to zero against the circle measure
        best = best.max(scale * (c / n).abs()).max(scale * (s / n).abs());
    }
    let scale = 1.0 / (1.0 + 1.0 / TENT_WIDTH);
    let tent = |x: f64, c: f64| (1.0 - (x - c).abs() / TENT_WIDTH).max(0.0);
    for i in 0..half {
        let c = 2.0 * i as f64 / (half - 1) as f64;
        let on_mu = polar.iter().map(|&(r, _)| tent(r, c)).sum::<f64>() / n;
        best = best.max(scale * (on_mu - tent(1.0, c)).abs());
    }
    best
}

/// Modulus of the `(s+1)`-th smallest root.
pub fn radius_r_s(roots: &RootSet, s: usize) -> Result<f64> {
    radius_r_s_sorted(&roots.moduli_sorted(), s)
}

pub fn radius_r_s_sorted(moduli: &[f64], s: usize) -> Result<f64> {
    moduli.get(s).copied().ok_or(Error::IndexOutOfRange {
        index: s,
        len: moduli.len(),
    })
}

/// `∫_0^r 𝔑(t)/t dt = Σ_{|z_j|<r} log(r/|z_j|)`.
pub fn zero_counting_integral(roots: &RootSet, r: f64) -> f64 {
    zero_counting_integral_of(roots.roots(), r)
}

pub fn zero_counting_integral_of(roots: &[Complex64], r: f64) -> f64 {
    roots
        .iter()
        .map(|z| z.norm())
        .filter(|&m| m < r)
        .map(|m| (r / m).ln())
        .sum()
}

/// Number of roots with modulus strictly below `r`.
pub fn count_inside(roots: &[Complex64], r: f64) -> usize {
    roots.iter().filter(|z| z.norm() < r).count()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityFlags {
    pub radial: bool,
    pub sector: bool,
    pub bl: bool,
}

impl InequalityFlags {
    pub fn all(&self) -> bool {
        self.radial && self.sector && self.bl
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringReport {
    pub degree: usize,
    pub et_log: f64,
    pub radial: Vec<RadialCheck>,
    pub max_sector_discrepancy: f64,
    pub sector_bound: f64,
    pub bl_upper: f64,
    pub bl_lower_estimate: f64,
    pub inequality_flags: InequalityFlags,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    pub rho: Vec<f64>,
    pub sector_grid: usize,
    pub family_size: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            rho: vec![0.05, 0.1, 0.2],
            sector_grid: 256,
            family_size: 16,
        }
    }
}

/// All clustering metrics of `p` given its roots.
pub fn cluster_report(
    p: &ComplexPolynomial,
    roots: &RootSet,
    opts: &ReportOptions,
) -> Result<ClusteringReport> {
    let et = et_ratio(p)?;
    let mu = EmpiricalMeasure::from_root_set(roots)?;
    Ok(report_from(&mu, &et, opts))
}

pub fn report_from(mu: &EmpiricalMeasure, et: &EtRatio, opts: &ReportOptions) -> ClusteringReport {
    let radial: Vec<RadialCheck> = opts
        .rho
        .iter()
        .map(|&rho| radial_bound_check(mu, et, rho))
        .collect();
    let disc = sector_discrepancy(mu, opts.sector_grid);
    let sector_bound = et_sector_bound(et);
    let upper = bl_upper(et, et.degree());
    let lower = bl_lower_estimate(mu, opts.family_size);
    ClusteringReport {
        degree: et.degree(),
        et_log: et.log_value,
        inequality_flags: InequalityFlags {
            radial: radial.iter().all(|c| c.holds),
            sector: disc <= sector_bound + 1e-12,
            bl: lower <= upper,
        },
        radial,
        max_sector_discrepancy: disc,
        sector_bound,
        bl_upper: upper,
        bl_lower_estimate: lower,
    }
}

/// `n` points `e^{i(2πk+offset)/n}`.
pub fn equispaced(n: usize, offset: f64) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::from_polar(1.0, (TAU * k as f64 + offset) / n as f64))
        .collect()
}

/// Roots of `1 + z^n`.
pub fn roots_of_unity_shifted(n: usize) -> Vec<Complex64> {
    equispaced(n, PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mu(z: Vec<Complex64>) -> EmpiricalMeasure {
        EmpiricalMeasure::new(z).unwrap()
    }

    fn et_of_one_plus_zn(n: usize) -> EtRatio {
        let mut cs = vec![0.0; n + 1];
        cs[0] = 1.0;
        cs[n] = 1.0;
        et_ratio(&ComplexPolynomial::from_real(&cs)).unwrap()
    }

    #[test]
    fn empty_measure_is_rejected() {
        assert!(EmpiricalMeasure::new(vec![]).is_err());
    }

    #[test]
    fn annulus_examples() {
        assert_eq!(annulus_mass(&mu(equispaced(7, 0.3)), 1.0, 0.1), 1.0);
        let m = mu(vec![c(0.5, 0.0), c(0.0, 1.0), c(-1.05, 0.0)]);
        assert_abs_diff_eq!(annulus_mass(&m, 1.0, 0.1), 2.0 / 3.0);
        assert_eq!(annulus_mass(&m, 3.0, 0.1), 0.0);
        // open at both ends
        assert_eq!(
            annulus_mass(&mu(vec![c(0.9, 0.0), c(0.0, 1.1)]), 1.0, 0.1),
            0.0
        );
    }

    #[test]
    fn sector_examples() {
        let m = mu(roots_of_unity_shifted(8));
        assert_abs_diff_eq!(sector_mass(&m, 0.0, FRAC_PI_2), 0.25);
        assert_eq!(sector_mass(&m, 0.0, TAU - 1e-9), 1.0);
        let left = mu(vec![c(-1.0, 0.0); 5]);
        assert_eq!(sector_mass(&left, 0.0, FRAC_PI_2), 0.0);
        // half-open: the ray θ is excluded, φ included
        let on_axis = mu(vec![c(1.0, 0.0), c(0.0, 2.0)]);
        assert_eq!(sector_mass(&on_axis, 0.0, FRAC_PI_2), 0.5);
    }

    #[test]
    fn arg_range() {
        assert_eq!(arg_2pi(c(1.0, 0.0)), 0.0);
        assert_eq!(arg_2pi(c(1.0, -0.0)), 0.0);
        // rounds up to 2π and wraps
        assert_eq!(arg_2pi(c(1.0, -1e-300)), 0.0);
        let a = arg_2pi(c(1.0, -1e-9));
        assert!(a < TAU && a > TAU - 2e-9);
        assert_abs_diff_eq!(arg_2pi(c(0.0, -1.0)), 1.5 * PI);
    }

    #[test]
    fn radial_check_examples() {
        let et = et_of_one_plus_zn(16);
        let m = mu(roots_of_unity_shifted(16));
        for rho in [0.05, 0.5, 1.0] {
            let r = radial_bound_check(&m, &et, rho);
            assert_eq!(r.defect, 0.0);
            assert!(r.holds);
        }
        // worst case log L = N gives a vacuous bound
        let worst = EtRatio {
            value: 16f64.exp(),
            log_value: 16.0,
            n_coeffs: 17,
        };
        let r = radial_bound_check(&mu(vec![c(5.0, 0.0); 16]), &worst, 0.5);
        assert!(r.bound >= 1.0 && r.holds);
    }

    #[test]
    fn radial_bound_with_unit_constant_fails_on_a_scaled_circle() {
        // z^N − 2^N: all roots on |z| = 2, log L = (N/2) log 2 + log 2
        let n = 32;
        let mut cs = vec![0.0; n + 1];
        cs[0] = -(2f64.powi(n as i32));
        cs[n] = 1.0;
        let et = et_ratio(&ComplexPolynomial::from_real(&cs)).unwrap();
        let m = mu(equispaced(n, 0.0).into_iter().map(|z| z * 2.0).collect());
        let r = radial_bound_check(&m, &et, 1.0);
        assert_eq!(r.defect, 1.0);
        assert!(!r.holds);
    }

    #[test]
    fn discrepancy_examples() {
        for n in [8, 16, 64] {
            let d = sector_discrepancy(&mu(roots_of_unity_shifted(n)), 4 * n);
            assert!(d <= 1.0 / n as f64 + 1e-12, "{n}: {d}");
        }
        let g = 64;
        let d = sector_discrepancy(&mu(vec![c(1.0, 0.0); 10]), g);
        assert_abs_diff_eq!(d, 1.0 - 1.0 / g as f64, epsilon = 1e-12);
        let d = sector_discrepancy(&mu(vec![c(0.0, 1.0); 10]), g);
        assert!(d > 0.98);
    }

    #[test]
    fn discrepancy_matches_brute_force_over_sectors() {
        let pts: Vec<Complex64> = (0..37)
            .map(|k| Complex64::from_polar(1.0 + 0.1 * k as f64, 0.77 * (k * k) as f64))
            .chain([c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)])
            .collect();
        let m = mu(pts);
        let g = 16;
        let mut brute = 0.0f64;
        for i in 0..g {
            for j in i + 1..g {
                let (t, p) = (TAU * i as f64 / g as f64, TAU * j as f64 / g as f64);
                brute = brute.max(((p - t) / TAU - sector_mass(&m, t, p)).abs());
            }
        }
        assert_abs_diff_eq!(sector_discrepancy(&m, g), brute, epsilon = 1e-12);
    }

    #[test]
    fn bl_upper_examples() {
        let e = |l: f64, n: usize| EtRatio {
            value: l.exp(),
            log_value: l,
            n_coeffs: n + 1,
        };
        assert_abs_diff_eq!(bl_upper(&e(1.0, 256), 256), 8.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bl_upper(&e(40.0, 40), 40), 32.0, epsilon = 1e-12);
        // (16/4096)^{1/4} = 1/4
        assert_abs_diff_eq!(bl_upper(&e(16.0, 4096), 4096), 8.0, epsilon = 1e-12);
    }

    #[test]
    fn bl_lower_examples() {
        assert!(bl_lower_estimate(&mu(equispaced(4096, 0.0)), 16) <= 0.01);
        assert!(bl_lower_estimate(&mu(vec![c(0.0, 0.0)]), 16) > 0.3);
        let et = et_of_one_plus_zn(32);
        let m = mu(roots_of_unity_shifted(32));
        assert!(bl_lower_estimate(&m, 16) <= bl_upper(&et, 32));
    }

    #[test]
    fn radius_examples() {
        let set = RootSet::from_parts(vec![c(0.0, 0.9), c(-0.5, 0.0), c(0.3, 0.0)], 0.0, true);
        assert_eq!(radius_r_s(&set, 0).unwrap(), 0.3);
        assert_eq!(radius_r_s(&set, 1).unwrap(), 0.5);
        assert_eq!(radius_r_s(&set, 2).unwrap(), 0.9);
        assert!(matches!(
            radius_r_s(&set, 3),
            Err(Error::IndexOutOfRange { index: 3, len: 3 })
        ));
    }

    #[test]
    fn zero_counting_examples() {
        let one = RootSet::from_parts(vec![c(0.5, 0.0)], 0.0, true);
        assert_abs_diff_eq!(zero_counting_integral(&one, 1.0), 2f64.ln());
        assert_eq!(zero_counting_integral(&one, 0.4), 0.0);
    }

    /// Adaptive Simpson on `𝔑(t)/t`.
    fn step_quadrature(moduli: &[f64], a: f64, b: f64) -> f64 {
        let f = |t: f64| moduli.iter().filter(|&&m| m < t).count() as f64 / t;
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
            (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
        }
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64) -> f64 {
            let mid = 0.5 * (a + b);
            let (l, r) = (simpson(f, a, mid), simpson(f, mid, b));
            if (l + r - whole).abs() <= 15.0 * tol || b - a < 1e-15 {
                l + r + (l + r - whole) / 15.0
            } else {
                rec(f, a, mid, l, tol / 2.0) + rec(f, mid, b, r, tol / 2.0)
            }
        }
        rec(&f, a, b, simpson(&f, a, b), 1e-12)
    }

    proptest! {
        #[test]
        fn zero_counting_matches_step_function_quadrature(
            moduli in prop::collection::vec(0.05f64..1.5, 1..12),
            r in 0.1f64..2.0,
        ) {
            let roots: Vec<Complex64> = moduli.iter().enumerate()
                .map(|(k, &m)| Complex64::from_polar(m, k as f64)).collect();
            let lo = moduli.iter().copied().fold(f64::INFINITY, f64::min).min(r);
            let oracle = step_quadrature(&moduli, lo * 0.5, r);
            prop_assert!((zero_counting_integral_of(&roots, r) - oracle).abs() <= 1e-9);
        }

        #[test]
        fn radius_is_monotone_and_counts(moduli in prop::collection::vec(0.01f64..3.0, 1..30)) {
            let roots: Vec<Complex64> = moduli.iter().map(|&m| c(0.0, m)).collect();
            let set = RootSet::from_parts(roots.clone(), 0.0, true);
            let mut prev = 0.0;
            for s in 0..roots.len() {
                let r = radius_r_s(&set, s).unwrap();
                prop_assert!(r >= prev);
                prev = r;
                prop_assert!(count_inside(&roots, r * (1.0 - 1e-12)) <= s);
            }
        }

        #[test]
        fn annulus_partition_sums_to_one(moduli in prop::collection::vec(0.0f64..3.0, 1..50)) {
            let m = mu(moduli.iter().map(|&r| c(r, 0.0)).collect());
            let inner = m.fraction(|z| z.norm() <= 0.9);
            let outer = m.fraction(|z| z.norm() >= 1.1);
            prop_assert!((inner + annulus_mass(&m, 1.0, 0.1) + outer - 1.0).abs() < 1e-12);
        }

        #[test]
        fn queries_stay_in_unit_interval(
            pts in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..40),
            theta in 0.0f64..3.0,
        ) {
            let m = mu(pts.iter().map(|&(x, y)| c(x, y)).collect());
            for v in [
                annulus_mass(&m, 1.0, 0.3),
                sector_mass(&m, theta, theta + 2.0),
                sector_discrepancy(&m, 32),
                bl_lower_estimate(&m, 16),
            ] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
    }
}
