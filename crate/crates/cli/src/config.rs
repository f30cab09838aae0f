use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use hardy_core::QuadratureSpec;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Environment variable naming a `key=value` settings file.
pub const CONFIG_ENV: &str = "HILBERT_CONFIG";

/// Keys a settings file may set. Dashes and underscores are interchangeable.
pub const FILE_KEYS: &[&str] = &["p", "d", "trials", "seed", "tol", "angular", "radial", "max_refine", "max_iters", "format"];

/// Settings read from a `key=value` file; `#` starts a comment.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| anyhow!("config line {}: expected key=value", n + 1))?;
            let key = key.trim().replace('-', "_");
            if !FILE_KEYS.contains(&key.as_str()) {
                bail!("config line {}: unknown key {key:?} (known: {})", n + 1, FILE_KEYS.join(", "));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config file {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config file {}", path.display()))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| anyhow!("config file: bad value {v:?} for {key}")),
        }
    }

    /// The flag value when given, otherwise the file value.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    /// Defaults, then file values, then flags.
    pub fn quadrature(&self, tol: Option<f64>, angular: Option<usize>, radial: Option<usize>) -> Result<QuadratureSpec> {
        let mut spec = QuadratureSpec::default();
        for (k, v) in &self.values {
            if QuadratureSpec::is_key(k) {
                spec.set(k, v).context("config file")?;
            }
        }
        if let Some(t) = tol {
            spec.target_tol = t;
        }
        if let Some(a) = angular {
            spec.angular_points = a;
        }
        if let Some(r) = radial {
            spec.radial_order = r;
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// The effective settings of one run. Embedded in every output, and hashed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub seed: u64,
    pub quadrature: QuadratureSpec,
    pub params: BTreeMap<String, Value>,
}

impl RunConfig {
    pub fn new(command: &str, seed: u64, quadrature: QuadratureSpec) -> Self {
        RunConfig { command: command.to_string(), seed, quadrature, params: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    /// Compact JSON with keys in sorted order.
    pub fn canonical_json(&self) -> String {
        serde_json::to_value(self).expect("config serializes").to_string()
    }

    /// SHA-256 of [`RunConfig::canonical_json`], in hex.
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical_json().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}
