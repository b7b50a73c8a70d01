// SPDX-License-Identifier: Apache-2.0

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// One experiment run: catalog id, seed and experiment-specific parameters
/// (sample counts, model settings). Missing parameters take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub seed: u64,
    #[serde(default)]
    pub params: Map<String, Value>,
}

fn path_error<E: std::fmt::Display>(prefix: &str, e: serde_path_to_error::Error<E>) -> Error {
    let path = e.path().to_string();
    let reason = e.inner().to_string();
    let field = if path == "." {
        // Missing fields are reported at their parent; pull the name out of the message.
        reason.split('`').nth(1).map(|f| format!("{prefix}{f}")).unwrap_or_else(|| prefix.trim_end_matches('.').to_string())
    } else {
        format!("{prefix}{path}")
    };
    Error::Config { field: if field.is_empty() { "(root)".into() } else { field }, reason }
}

impl ExperimentConfig {
    pub fn new(experiment: &str, seed: u64) -> Self {
        Self { experiment: experiment.into(), seed, params: Map::new() }
    }

    pub fn with_param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }

    /// Parses JSON, naming the offending field on failure.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(&mut de).map_err(|e| path_error("", e))
    }

    /// SHA-256 of the canonical JSON form (keys sorted).
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

/// Typed experiment parameters with semantic validation.
pub trait Params: DeserializeOwned + Serialize + Default {
    fn validate(&self) -> Result<()>;
}

pub fn parse_params<P: Params>(params: &Map<String, Value>) -> Result<P> {
    let p: P = serde_path_to_error::deserialize(Value::Object(params.clone())).map_err(|e| path_error("params.", e))?;
    p.validate()?;
    Ok(p)
}

pub(crate) fn field_error(field: &str, reason: impl Into<String>) -> Error {
    Error::Config { field: format!("params.{field}"), reason: reason.into() }
}

pub(crate) fn positive(field: &str, v: usize) -> Result<()> {
    if v == 0 {
        return Err(field_error(field, "must be positive"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_bad_fields() {
        match ExperimentConfig::from_json(r#"{"experiment": "x", "sed": 1}"#) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "sed"),
            other => panic!("{other:?}"),
        }
        match ExperimentConfig::from_json(r#"{"experiment": "x"}"#) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "seed"),
            other => panic!("{other:?}"),
        }
        match ExperimentConfig::from_json(r#"{"experiment": "x", "seed": "one"}"#) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "seed"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hash_ignores_key_order() {
        let a = ExperimentConfig::from_json(r#"{"experiment": "x", "seed": 1, "params": {"a": 1, "b": 2}}"#).unwrap();
        let b = ExperimentConfig::from_json(r#"{"params": {"b": 2, "a": 1}, "seed": 1, "experiment": "x"}"#).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), ExperimentConfig::new("x", 2).hash());
    }
}
