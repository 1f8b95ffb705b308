use std::path::{Path, PathBuf};

use muntz::{Decimal, DomainSpec, ExponentSpec, DEFAULT_PRECISION_BITS};
use serde::{Deserialize, Serialize};

use crate::Failure;

pub const PRECISION_ENV: &str = "MUNTZ_PRECISION_BITS";

/// A single value or a list; lists are what gets written back.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

fn one_or_many<'de, D, T>(de: D) -> Result<Option<Vec<T>>, D::Error>
where
    D: serde::Deserializer<'de>,
    T: Deserialize<'de>,
{
    Ok(Option::<OneOrMany<T>>::deserialize(de)?.map(OneOrMany::into_vec))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetConfig {
    PurePower { mu: Decimal },
    MuntzCombo { coeffs: Vec<Decimal> },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorConfig {
    Dilation,
    DiagonalList { u: Vec<Decimal> },
}

/// Index sets are 1-based.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "sampling", rename_all = "snake_case", deny_unknown_fields)]
pub enum PartitionConfig {
    Explicit {
        #[serde(rename = "N1")]
        n1: Vec<usize>,
        #[serde(rename = "N2")]
        n2: Vec<usize>,
    },
    All,
    Random { count: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainSpec,
    pub exponents: ExponentSpec,
    #[serde(default = "default_precision")]
    pub precision_bits: u32,
    #[serde(default = "default_max_precision")]
    pub max_precision_bits: u32,
    /// Target index, 1-based.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub section: Option<usize>,
    #[serde(default, rename = "N_list", skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Decimal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<Decimal>,
    #[serde(default, deserialize_with = "one_or_many", skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<Decimal>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<Decimal>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionConfig>,
    #[serde(default)]
    pub format: Format,
    /// Report destination; not echoed into reports.
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
}

fn default_precision() -> u32 {
    DEFAULT_PRECISION_BITS
}

fn default_max_precision() -> u32 {
    4096
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub section: Option<usize>,
    pub n_list: Option<Vec<usize>>,
    pub precision: Option<u32>,
    pub epsilon: Option<String>,
    pub rho: Option<Vec<String>>,
    pub grid_points: Option<usize>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Failure::config("MalformedConfig", format!("cannot read {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text).map_err(|e| Failure::config("MalformedConfig", e.to_string()))
    }

    /// Applies flags, then the precision environment variable unless the
    /// precision flag was given.
    pub fn resolve(mut self, o: Overrides, env_precision: Option<String>) -> Result<Self, Failure> {
        if let Some(raw) = env_precision {
            self.precision_bits = raw.trim().parse().map_err(|_| {
                Failure::config("MalformedConfig", format!("{PRECISION_ENV}={raw:?} is not an integer"))
            })?;
        }
        if let Some(p) = o.precision {
            self.precision_bits = p;
        }
        if self.precision_bits < 64 {
            return Err(Failure::config(
                "MalformedConfig",
                format!("precision_bits = {} is below 64", self.precision_bits),
            ));
        }
        self.max_precision_bits = self.max_precision_bits.max(self.precision_bits);
        if o.n.is_some() {
            self.n = o.n;
        }
        if o.section.is_some() {
            self.section = o.section;
        }
        if o.n_list.is_some() {
            self.n_list = o.n_list;
        }
        if let Some(e) = o.epsilon {
            self.epsilon = Some(Decimal::from(e));
        }
        if let Some(r) = o.rho {
            self.rho = Some(r.into_iter().map(Decimal::from).collect());
        }
        if o.grid_points.is_some() {
            self.grid_points = o.grid_points;
        }
        if let Some(f) = o.format {
            self.format = f;
        }
        Ok(self)
    }
}
