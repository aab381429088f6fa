//! File formats: economy and shock documents (JSON), observations (JSON or
//! CSV with a column map). Everything here is `f64`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimate::Observation;
use crate::model::{allocation_shares, factor_shares, Economy};
use crate::production::ProductionSpec;
use crate::statics::Shock;

/// Failure to read or decode an input file, as opposed to a model failure.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl LoadError {
    fn parse(path: &Path, message: impl ToString) -> Self {
        LoadError::Parse { path: path.to_path_buf(), message: message.to_string() }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|e| LoadError::parse(path, e))
}

/// Economy JSON. Factor order is (T, K, L), sector order (1, 2);
/// `lambda_share` and `theta_factor` are derived when absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconomyDocument {
    pub theta_share: [[f64; 2]; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_share: Option<[[f64; 2]; 3]>,
    pub theta_good: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_factor: Option<[f64; 3]>,
    pub sigma: [[[f64; 3]; 3]; 2],
}

impl EconomyDocument {
    pub fn into_economy(self) -> Economy<f64> {
        let theta_factor = self.theta_factor.unwrap_or_else(|| factor_shares(&self.theta_share, &self.theta_good));
        let lambda_share = self
            .lambda_share
            .unwrap_or_else(|| allocation_shares(&self.theta_share, &self.theta_good, &theta_factor));
        Economy { theta_share: self.theta_share, lambda_share, theta_factor, theta_good: self.theta_good, sigma: self.sigma }
    }

    pub fn from_economy(e: &Economy<f64>) -> Self {
        EconomyDocument {
            theta_share: e.theta_share,
            lambda_share: Some(e.lambda_share),
            theta_good: e.theta_good,
            theta_factor: Some(e.theta_factor),
            sigma: e.sigma,
        }
    }
}

pub fn load_economy(path: &Path) -> Result<Economy<f64>, LoadError> {
    read_json::<EconomyDocument>(path).map(EconomyDocument::into_economy)
}

pub fn load_shock(path: &Path) -> Result<Shock<f64>, LoadError> {
    read_json(path)
}

/// Technologies of both sectors plus the prices and endowments to solve at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TechnologyDocument {
    pub sectors: [ProductionSpec<f64>; 2],
    pub p: [f64; 2],
    pub v: [f64; 3],
    #[serde(default = "unit_wages")]
    pub w0: [f64; 3],
}

fn unit_wages() -> [f64; 3] {
    [1.0; 3]
}

/// Canonical CSV column names for observations.
pub const OBSERVATION_COLUMNS: [&str; 22] = [
    "theta_T1", "theta_T2", "theta_K1", "theta_K2", "theta_L1", "theta_L2", "theta_1", "theta_2", "p1_star",
    "p2_star", "wT_star", "wK_star", "wL_star", "aT1_star", "aT2_star", "aK1_star", "aK2_star", "aL1_star",
    "aL2_star", "aT0_prime", "aK0_prime", "aL0_prime",
];

/// Maps canonical column names to the headers used in a particular file.
pub type ColumnMap = BTreeMap<String, String>;

/// Reads one observation per CSV row. Per-sector coefficient columns are
/// used when all six are present, aggregate columns otherwise.
pub fn load_observations_csv(path: &Path, map: &ColumnMap) -> Result<Vec<Observation<f64>>, LoadError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| LoadError::parse(path, e))?;
    let headers = reader.headers().map_err(|e| LoadError::parse(path, e))?.clone();
    let position = |canonical: &str| -> Option<usize> {
        let name = map.get(canonical).map(String::as_str).unwrap_or(canonical);
        headers.iter().position(|h| h.trim() == name)
    };
    let columns: BTreeMap<&str, usize> =
        OBSERVATION_COLUMNS.iter().filter_map(|&c| position(c).map(|i| (c, i))).collect();
    let required = &OBSERVATION_COLUMNS[..13];
    if let Some(missing) = required.iter().find(|c| !columns.contains_key(*c)) {
        return Err(LoadError::parse(path, format!("missing column {missing}")));
    }
    let has = |names: &[&str]| names.iter().all(|c| columns.contains_key(c));
    let sector = has(&OBSERVATION_COLUMNS[13..19]);
    let aggregate = has(&OBSERVATION_COLUMNS[19..22]);
    if !sector && !aggregate {
        return Err(LoadError::parse(path, "need all a*_star columns or all a*0_prime columns"));
    }

    let mut out = Vec::new();
    for (row_no, record) in reader.records().enumerate() {
        let record = record.map_err(|e| LoadError::parse(path, e))?;
        let get = |c: &str| -> Result<f64, LoadError> {
            let raw = record.get(columns[c]).unwrap_or("").trim();
            raw.parse::<f64>()
                .map_err(|_| LoadError::parse(path, format!("row {}: column {c}: not a number: {raw:?}", row_no + 1)))
        };
        let pair = |a: &str, b: &str| -> Result<[f64; 2], LoadError> { Ok([get(a)?, get(b)?]) };
        out.push(Observation {
            theta_share: [pair("theta_T1", "theta_T2")?, pair("theta_K1", "theta_K2")?, pair("theta_L1", "theta_L2")?],
            theta_good: pair("theta_1", "theta_2")?,
            lambda_share: None,
            theta_factor: None,
            p_star: pair("p1_star", "p2_star")?,
            w_star: [get("wT_star")?, get("wK_star")?, get("wL_star")?],
            a_star: if sector {
                Some([pair("aT1_star", "aT2_star")?, pair("aK1_star", "aK2_star")?, pair("aL1_star", "aL2_star")?])
            } else {
                None
            },
            a0_prime: if sector { None } else { Some([get("aT0_prime")?, get("aK0_prime")?, get("aL0_prime")?]) },
        });
    }
    Ok(out)
}

/// A JSON observation file holds a single object or an array of them.
pub fn load_observations_json(path: &Path) -> Result<Vec<Observation<f64>>, LoadError> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(Box<Observation<f64>>),
        Many(Vec<Observation<f64>>),
    }
    Ok(match read_json::<OneOrMany>(path)? {
        OneOrMany::One(o) => vec![*o],
        OneOrMany::Many(v) => v,
    })
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_file(path: &Path, contents: &[u8]) -> Result<(), LoadError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| LoadError::Io { path: parent.to_path_buf(), source })?;
    }
    fs::write(path, contents).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })
}
