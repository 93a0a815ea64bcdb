//! Seeded coefficient samplers.
//!
//! Every trial draws from its own ChaCha20 stream: the key is derived from
//! the master seed and the stream id is the trial index, so a trial's vector
//! depends only on `(seed, trial_index, spec, N)` and never on scheduling.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficient law. Serialized with a `kind` tag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionSpec {
    /// Standard normal coordinates.
    Gaussian,
    /// Uniform on `[−√3, √3]`.
    UniformContinuous,
    /// Laplace with unit variance.
    Laplace,
    /// Uniform on `{0, ±1, …, ±M}`.
    #[serde(rename = "discrete_pm_m", alias = "discrete_pm_M")]
    DiscretePmM {
        #[serde(alias = "M")]
        m: u32,
    },
    /// Uniform on the isotropic dilate of the ℓ1 ball; coordinates are dependent.
    #[serde(rename = "logconcave_l1ball")]
    LogconcaveL1Ball,
}

impl DistributionSpec {
    pub fn name(&self) -> String {
        match self {
            Self::Gaussian => "gaussian".into(),
            Self::UniformContinuous => "uniform_continuous".into(),
            Self::Laplace => "laplace".into(),
            Self::DiscretePmM { m } => format!("discrete_pm_{m}"),
            Self::LogconcaveL1Ball => "logconcave_l1ball".into(),
        }
    }

    pub fn isotropic(&self) -> bool {
        !matches!(self, Self::DiscretePmM { .. })
    }

    /// `K` with `𝓛(a, ε) ≤ Kε`, for the continuous laws: twice the maximal
    /// one-dimensional marginal density.
    pub fn levy_bound_k(&self) -> Option<f64> {
        match self {
            Self::Gaussian => Some(2.0 / (2.0 * PI).sqrt()),
            Self::UniformContinuous => Some(1.0 / 3f64.sqrt()),
            Self::Laplace => Some(SQRT_2),
            Self::DiscretePmM { .. } => None,
            // isotropic log-concave marginals have density at most 1
            Self::LogconcaveL1Ball => Some(2.0),
        }
    }

    /// `γ` with `𝔼|a_j| ≤ γ`.
    pub fn mean_abs_bound_gamma(&self) -> f64 {
        match self {
            Self::Gaussian => (2.0 / PI).sqrt(),
            Self::UniformContinuous => 3f64.sqrt() / 2.0,
            Self::Laplace => 1.0 / SQRT_2,
            Self::DiscretePmM { m } => {
                let m = *m as f64;
                m * (m + 1.0) / (2.0 * m + 1.0)
            }
            Self::LogconcaveL1Ball => 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::DiscretePmM { m } if *m == 0 => {
                Err(Error::InvalidConfig("discrete_pm_M needs M ≥ 1".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Radius making the uniform law on `r·B_1^d` isotropic.
pub fn l1_ball_radius(dim: usize) -> f64 {
    let d = dim as f64;
    ((d + 1.0) * (d + 2.0) / 2.0).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSample {
    pub coeffs: Vec<f64>,
    pub seed: u64,
    pub trial_index: u64,
    pub spec: DistributionSpec,
}

impl CoefficientSample {
    /// `N`, the last index.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// `a_0, …, a_N` for one trial.
pub fn sample(spec: &DistributionSpec, n: usize, seed: u64, trial_index: u64) -> CoefficientSample {
    let mut rng = trial_rng(seed, trial_index);
    CoefficientSample {
        coeffs: draw(spec, n + 1, &mut rng),
        seed,
        trial_index,
        spec: *spec,
    }
}

/// One vector of length `len` from `spec`.
pub fn draw<R: Rng + ?Sized>(spec: &DistributionSpec, len: usize, rng: &mut R) -> Vec<f64> {
    match *spec {
        DistributionSpec::Gaussian => (0..len).map(|_| StandardNormal.sample(rng)).collect(),
        DistributionSpec::UniformContinuous => {
            let h = 3f64.sqrt();
            (0..len).map(|_| rng.random_range(-h..h)).collect()
        }
        DistributionSpec::Laplace => (0..len)
            .map(|_| {
                let e: f64 = Exp1.sample(rng);
                let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
                s * e / SQRT_2
            })
            .collect(),
        DistributionSpec::DiscretePmM { m } => {
            let m = m as i64;
            (0..len).map(|_| rng.random_range(-m..=m) as f64).collect()
        }
        DistributionSpec::LogconcaveL1Ball => {
            // normalized exponential spacings are uniform on the simplex
            let e: Vec<f64> = (0..=len).map(|_| Exp1.sample(rng)).collect();
            let total: f64 = e.iter().sum();
            let r = l1_ball_radius(len);
            e[..len]
                .iter()
                .map(|x| {
                    let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    s * r * x / total
                })
                .collect()
        }
    }
}

/// Largest fraction of the sample inside an open window of width `2ε`.
pub fn levy_from_sample(values: &mut [f64], epsilon: f64) -> f64 {
    values.sort_by(f64::total_cmp);
    let mut best = 0;
    let mut j = 0;
    for i in 0..values.len() {
        if j < i {
            j = i;
        }
        while j < values.len() && values[j] - values[i] < 2.0 * epsilon {
            j += 1;
        }
        best = best.max(j - i);
    }
    best as f64 / values.len() as f64
}

/// Estimate `sup_t ℙ(|a − t| < ε)` for one coordinate from `draws` samples
/// (for the ℓ1 ball: the coordinates of one vector of that length).
pub fn empirical_levy(
    spec: &DistributionSpec,
    epsilon: f64,
    draws: usize,
    seed: u64,
) -> Result<f64> {
    if draws < 10_000 {
        return Err(Error::InvalidArgument(format!(
            "empirical_levy needs at least 10^4 draws, got {draws}"
        )));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let mut values = sample(spec, draws - 1, seed, 0).coeffs;
    Ok(levy_from_sample(&mut values, epsilon))
}
