use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ProtocolName;

/// Column order of `trials.csv`. Frozen: downstream scripts index by name.
pub const CSV_COLUMNS: [&str; 31] = [
    "protocol",
    "cell",
    "trial_index",
    "m",
    "n",
    "degree",
    "degenerate",
    "status",
    "extended",
    "order_residual",
    "et_log",
    "et_log_over_m",
    "chain_q_norm",
    "chain_cauchy_binet",
    "chain_am_gm",
    "sector_discrepancy",
    "radial_defect",
    "bl_upper",
    "bl_lower",
    "logdet_a",
    "logdet_a_next",
    "det_root",
    "jensen_ratio",
    "jensen_deviation",
    "roots_in_disc",
    "r_s",
    "rate",
    "cluster_mass",
    "radius_gap",
    "inequalities_ok",
    "detail",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// `A_m^(n)` singular or beyond the condition cap.
    Degenerate,
    /// An end coefficient of the numerator vanished.
    EndCoefficientZero,
    /// The root finder did not reach its tolerance.
    Nonconvergence,
}

/// One trial. Optional fields are blank in the CSV when a protocol does not
/// measure them; list fields are `;`-separated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub protocol: ProtocolName,
    pub cell: String,
    pub trial_index: u64,
    pub m: usize,
    pub n: usize,
    pub degree: usize,
    pub degenerate: bool,
    pub status: Status,
    pub extended: bool,
    pub order_residual: Option<f64>,
    pub et_log: Option<f64>,
    pub et_log_over_m: Option<f64>,
    pub chain_q_norm: Option<f64>,
    pub chain_cauchy_binet: Option<f64>,
    pub chain_am_gm: Option<f64>,
    pub sector_discrepancy: Option<f64>,
    #[serde(serialize_with = "ser_list", deserialize_with = "de_list")]
    pub radial_defect: Vec<f64>,
    pub bl_upper: Option<f64>,
    pub bl_lower: Option<f64>,
    pub logdet_a: Option<f64>,
    pub logdet_a_next: Option<f64>,
    pub det_root: Option<f64>,
    #[serde(serialize_with = "ser_list", deserialize_with = "de_list")]
    pub jensen_ratio: Vec<f64>,
    #[serde(serialize_with = "ser_list", deserialize_with = "de_list")]
    pub jensen_deviation: Vec<f64>,
    pub roots_in_disc: Option<usize>,
    #[serde(serialize_with = "ser_list", deserialize_with = "de_list")]
    pub r_s: Vec<f64>,
    #[serde(serialize_with = "ser_list", deserialize_with = "de_list")]
    pub rate: Vec<f64>,
    pub cluster_mass: Option<f64>,
    pub radius_gap: Option<f64>,
    pub inequalities_ok: Option<bool>,
    pub detail: String,
}

impl TrialRecord {
    pub fn new(
        protocol: ProtocolName,
        cell: &str,
        trial_index: u64,
        m: usize,
        n: usize,
        degree: usize,
    ) -> Self {
        Self {
            protocol,
            cell: cell.to_string(),
            trial_index,
            m,
            n,
            degree,
            degenerate: false,
            status: Status::Ok,
            extended: false,
            order_residual: None,
            et_log: None,
            et_log_over_m: None,
            chain_q_norm: None,
            chain_cauchy_binet: None,
            chain_am_gm: None,
            sector_discrepancy: None,
            radial_defect: Vec::new(),
            bl_upper: None,
            bl_lower: None,
            logdet_a: None,
            logdet_a_next: None,
            det_root: None,
            jensen_ratio: Vec::new(),
            jensen_deviation: Vec::new(),
            roots_in_disc: None,
            r_s: Vec::new(),
            rate: Vec::new(),
            cluster_mass: None,
            radius_gap: None,
            inequalities_ok: None,
            detail: String::new(),
        }
    }

    pub fn exclude(mut self, status: Status, detail: impl Into<String>) -> Self {
        self.degenerate = status == Status::Degenerate;
        self.status = status;
        self.detail = detail.into();
        self
    }
}

/// Root coordinates kept for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootRow {
    pub cell: String,
    pub trial_index: u64,
    pub re: f64,
    pub im: f64,
}

/// `;`-joined shortest round-trip decimal forms.
pub fn join_list(v: &[f64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, std::num::ParseFloatError> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';').map(str::parse).collect()
}

fn ser_list<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&join_list(v))
}

fn de_list<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
    let s = String::deserialize(d)?;
    parse_list(&s).map_err(serde::de::Error::custom)
}
