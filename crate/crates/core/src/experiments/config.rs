use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Precision;
use crate::sampler::DistributionSpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolName {
    EtClustering,
    DiscreteExample,
    ToeplitzAnticoncentration,
    DetGrowth,
    ZeroRadius,
    PoleClustering,
    InequalitySuite,
}

impl ProtocolName {
    pub const ALL: [ProtocolName; 7] = [
        Self::EtClustering,
        Self::DiscreteExample,
        Self::ToeplitzAnticoncentration,
        Self::DetGrowth,
        Self::ZeroRadius,
        Self::PoleClustering,
        Self::InequalitySuite,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::EtClustering => "et-clustering",
            Self::DiscreteExample => "discrete-example",
            Self::ToeplitzAnticoncentration => "toeplitz-anticoncentration",
            Self::DetGrowth => "det-growth",
            Self::ZeroRadius => "zero-radius",
            Self::PoleClustering => "pole-clustering",
            Self::InequalitySuite => "inequality-suite",
        }
    }

    /// Protocols that follow one coefficient sequence per seed through
    /// every cell.
    pub fn shares_seeds_across_cells(&self) -> bool {
        matches!(
            self,
            Self::DetGrowth | Self::ZeroRadius | Self::PoleClustering
        )
    }

    /// Protocols whose trials carry the deterministic inequality checks.
    pub fn checks_inequalities(&self) -> bool {
        matches!(
            self,
            Self::EtClustering | Self::DiscreteExample | Self::InequalitySuite
        )
    }
}

impl fmt::Display for ProtocolName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProtocolName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Self::ALL.iter().map(|p| p.as_str()).collect();
                Error::InvalidConfig(format!(
                    "unknown experiment '{s}'; valid names: {}",
                    names.join(", ")
                ))
            })
    }
}

fn default_delta() -> f64 {
    0.5
}
fn default_epsilon() -> Vec<f64> {
    vec![0.01, 0.05, 0.1]
}
fn default_sector_grid() -> usize {
    256
}
fn default_family_size() -> usize {
    16
}
fn default_rho() -> Vec<f64> {
    vec![0.05, 0.1, 0.2]
}
fn default_s_values() -> Vec<usize> {
    vec![4, 8, 16, 32, 64]
}
fn default_r_values() -> Vec<f64> {
    vec![0.9, 0.95, 0.99, 0.995]
}
fn default_ratio_bracket() -> [f64; 2] {
    [0.35, 0.65]
}
fn default_rate_bracket() -> [f64; 2] {
    [0.05, 20.0]
}
fn default_annulus_rho() -> f64 {
    0.1
}
fn default_schema() -> u32 {
    SCHEMA_VERSION
}

/// Full parameterization of one run. Read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub name: ProtocolName,
    pub distribution: DistributionSpec,
    /// Numerator degrees (or the `m` schedule).
    #[serde(default)]
    pub m: Vec<usize>,
    /// Denominator degrees (or the `n` schedule).
    #[serde(default)]
    pub n: Vec<usize>,
    /// Truncation `N`: coefficients `a_0..a_N` are drawn.
    #[serde(default)]
    pub degree: Option<usize>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_sector_grid")]
    pub sector_grid: usize,
    #[serde(default = "default_family_size")]
    pub family_size: usize,
    #[serde(default = "default_rho")]
    pub rho: Vec<f64>,
    #[serde(default = "default_s_values")]
    pub s_values: Vec<usize>,
    #[serde(default = "default_r_values")]
    pub r_values: Vec<f64>,
    #[serde(default)]
    pub precision: Precision,
    #[serde(default = "default_ratio_bracket")]
    pub ratio_bracket: [f64; 2],
    #[serde(default = "default_rate_bracket")]
    pub rate_bracket: [f64; 2],
    /// Relative half-width of the annulus around `R_m` for pole clustering.
    #[serde(default = "default_annulus_rho")]
    pub annulus_rho: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    /// The default parameterization of each protocol.
    pub fn preset(name: ProtocolName) -> Self {
        let base = Self {
            schema_version: SCHEMA_VERSION,
            name,
            distribution: DistributionSpec::Gaussian,
            m: Vec::new(),
            n: Vec::new(),
            degree: None,
            delta: default_delta(),
            epsilon: default_epsilon(),
            trials: 100,
            seed: 1,
            sector_grid: default_sector_grid(),
            family_size: default_family_size(),
            rho: default_rho(),
            s_values: default_s_values(),
            r_values: default_r_values(),
            precision: Precision::Auto,
            ratio_bracket: default_ratio_bracket(),
            rate_bracket: default_rate_bracket(),
            annulus_rho: default_annulus_rho(),
            output: None,
        };
        match name {
            ProtocolName::EtClustering => Self {
                m: vec![50, 100, 200, 400],
                n: vec![1, 2],
                trials: 200,
                ..base
            },
            ProtocolName::DiscreteExample => Self {
                distribution: DistributionSpec::DiscretePmM { m: 100 },
                m: vec![200, 400, 800],
                n: vec![10],
                trials: 100,
                ..base
            },
            ProtocolName::ToeplitzAnticoncentration => Self {
                n: vec![2, 5, 10, 20],
                trials: 10_000,
                ..base
            },
            ProtocolName::DetGrowth => Self {
                m: vec![64, 128, 256, 512],
                n: vec![2],
                trials: 50,
                ..base
            },
            ProtocolName::ZeroRadius => Self {
                degree: Some(2048),
                trials: 50,
                ..base
            },
            ProtocolName::PoleClustering => Self {
                m: vec![1],
                n: vec![8, 16, 32],
                degree: Some(1024),
                trials: 30,
                ..base
            },
            ProtocolName::InequalitySuite => Self {
                n: vec![12],
                degree: Some(64),
                trials: 2000,
                ..base
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        self.distribution.validate()?;
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta must lie in (0, 1)".into());
        }
        if self.sector_grid < 4 {
            return bad("sector_grid must be at least 4".into());
        }
        if self.family_size < 8 {
            return bad("family_size must be at least 8".into());
        }
        if self.rho.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
            return bad("every rho must lie in (0, 1]".into());
        }
        if self.epsilon.iter().any(|&e| !(e > 0.0)) {
            return bad("every epsilon must be positive".into());
        }
        let need = |v: &Vec<usize>, what: &str| {
            if v.is_empty() {
                Err(Error::InvalidConfig(format!(
                    "{} needs a non-empty '{what}' list",
                    self.name
                )))
            } else {
                Ok(())
            }
        };
        match self.name {
            ProtocolName::EtClustering | ProtocolName::DiscreteExample => {
                need(&self.m, "m")?;
                need(&self.n, "n")?;
                if self.m.contains(&0) {
                    return bad("numerator degrees must be at least 1".into());
                }
                if let Some(d) = self.degree {
                    let widest = self.max_m() + self.max_n();
                    if d < widest {
                        return bad(format!("degree {d} is below m+n = {widest}"));
                    }
                }
                if self.name == ProtocolName::DiscreteExample
                    && !matches!(self.distribution, DistributionSpec::DiscretePmM { m } if m >= 2)
                {
                    return bad(
                        "discrete-example needs a discrete_pm_m distribution with M ≥ 2".into(),
                    );
                }
            }
            ProtocolName::ToeplitzAnticoncentration => {
                need(&self.n, "n")?;
                if self.n.contains(&0) {
                    return bad("toeplitz-anticoncentration needs n ≥ 1".into());
                }
            }
            ProtocolName::DetGrowth => {
                need(&self.m, "m")?;
                need(&self.n, "n")?;
                if self.m.contains(&0) {
                    return bad("the m schedule must be positive".into());
                }
            }
            ProtocolName::ZeroRadius => {
                let d = self.degree.unwrap_or(0);
                if d < 2 {
                    return bad("zero-radius needs degree ≥ 2".into());
                }
                if let Some(&s) = self.s_values.iter().max() {
                    if s >= d {
                        return bad(format!("s = {s} needs more than {d} roots"));
                    }
                }
                if self.s_values.iter().any(|&s| s < 2) {
                    return bad("s values must be at least 2 (log s appears in the rate)".into());
                }
                if self.r_values.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
                    return bad("r values must lie in (0, 1)".into());
                }
            }
            ProtocolName::PoleClustering => {
                need(&self.m, "m")?;
                need(&self.n, "n")?;
                let d = self.degree.unwrap_or(0);
                if d < self.max_m() + self.max_n() + 1 {
                    return bad(format!(
                        "pole-clustering needs degree ≥ max(m)+max(n)+1 = {}",
                        self.max_m() + self.max_n() + 1
                    ));
                }
                if self.n.contains(&0) {
                    return bad("denominator degrees must be at least 1".into());
                }
            }
            ProtocolName::InequalitySuite => {
                let d = self.degree.unwrap_or(0);
                if d < 2 {
                    return bad("inequality-suite needs degree ≥ 2".into());
                }
            }
        }
        Ok(())
    }

    pub fn max_m(&self) -> usize {
        self.m.iter().copied().max().unwrap_or(0)
    }

    pub fn max_n(&self) -> usize {
        self.n.iter().copied().max().unwrap_or(0)
    }
}
