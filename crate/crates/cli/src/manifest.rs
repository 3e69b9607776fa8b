use std::fs;
use std::path::Path;

use loyd_core::rng::worker_rng;
use rand::RngCore;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{io_err, CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivedSeeds {
    pub master: u64,
    pub count: usize,
}

/// Either an explicit list or `count` seeds derived from a master seed.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    List(Vec<u64>),
    Derived(DerivedSeeds),
}

impl Seeds {
    pub fn derived(master: u64, count: usize) -> Self {
        Seeds::Derived(DerivedSeeds { master, count })
    }

    /// Seed `i` of a derived list is the first word of worker stream `i`.
    pub fn expand(&self) -> CliResult<Vec<u64>> {
        let v = match self {
            Seeds::List(v) => v.clone(),
            Seeds::Derived(d) => (0..d.count as u64).map(|i| worker_rng(d.master, i).next_u64()).collect(),
        };
        if v.is_empty() {
            return Err(CliError::Schema("seeds must not be empty".into()));
        }
        Ok(v)
    }
}

pub fn check_version(v: u32) -> CliResult<()> {
    if v != SCHEMA_VERSION {
        return Err(CliError::Schema(format!(
            "schema_version {v} is not supported (expected {SCHEMA_VERSION})"
        )));
    }
    Ok(())
}

/// Reads a manifest for `sub`. An optional top-level "subcommand" field must
/// name `sub`; every other field must belong to the subcommand's schema.
pub fn load<T: DeserializeOwned>(path: &Path, sub: &str) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut v: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
    let obj = v
        .as_object_mut()
        .ok_or_else(|| CliError::Schema("manifest must be a JSON object".into()))?;
    if let Some(s) = obj.remove("subcommand") {
        if s.as_str() != Some(sub) {
            return Err(CliError::Schema(format!("manifest is for subcommand {s}, not {sub:?}")));
        }
    }
    if !obj.contains_key("seeds") {
        return Err(CliError::Schema("missing field `seeds`".into()));
    }
    serde_json::from_value(v).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
}
