//! Flat `key=value` configuration with `#` comments.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use airy_gibbs::RngSeed;

use crate::error::CliError;

#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub name: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

pub const fn key(name: &'static str, default: &'static str, help: &'static str) -> KeySpec {
    KeySpec { name, default, help }
}

/// Keys every experiment accepts besides its own.
pub const COMMON_KEYS: [KeySpec; 2] = [
    key("seed", "1", "master RNG seed"),
    key("workers", "1", "worker threads for replica loops"),
];

pub fn parse(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("config line {}: expected key=value", no + 1)));
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", no + 1)));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(CliError::Usage(format!("config line {}: duplicate key {k}", no + 1)));
        }
    }
    Ok(out)
}

/// Fully resolved parameters of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub experiment: String,
    values: BTreeMap<String, String>,
}

impl Params {
    /// Defaults, overlaid by `file`, overlaid by `flags`. Unknown keys are
    /// rejected.
    pub fn resolve(
        experiment: &str,
        keys: &[KeySpec],
        file: &BTreeMap<String, String>,
        flags: &BTreeMap<String, String>,
    ) -> Result<Self, CliError> {
        let mut values: BTreeMap<String, String> = keys
            .iter()
            .chain(&COMMON_KEYS)
            .map(|k| (k.name.to_string(), k.default.to_string()))
            .collect();
        for (k, v) in file.iter().chain(flags) {
            if k == "experiment" {
                if v != experiment {
                    return Err(CliError::Usage(format!(
                        "config is for experiment {v}, not {experiment}"
                    )));
                }
                continue;
            }
            match values.get_mut(k) {
                Some(slot) => *slot = v.clone(),
                None => return Err(CliError::Usage(format!("unknown key {k} for experiment {experiment}"))),
            }
        }
        Ok(Self {
            experiment: experiment.to_string(),
            values,
        })
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values
            .get(key)
            .map(String::as_str)
            .unwrap_or_else(|| panic!("experiment reads undeclared key {key}"))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        let raw = self.raw(key);
        raw.parse()
            .map_err(|e| CliError::Usage(format!("bad value {raw:?} for {key}: {e}")))
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>, CliError>
    where
        T::Err: Display,
    {
        self.raw(key)
            .split(',')
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|e| CliError::Usage(format!("bad list entry {s:?} for {key}: {e}")))
            })
            .collect()
    }

    /// `none` or a value.
    pub fn optional<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        if self.raw(key).eq_ignore_ascii_case("none") {
            Ok(None)
        } else {
            self.get(key).map(Some)
        }
    }

    pub fn seed(&self) -> Result<RngSeed, CliError> {
        Ok(RngSeed::new(self.get("seed")?, 0))
    }

    pub fn workers(&self) -> Result<usize, CliError> {
        self.get("workers")
    }

    /// Everything needed to reproduce the run.
    pub fn snapshot(&self) -> String {
        let mut s = format!("experiment={}\n", self.experiment);
        for (k, v) in &self.values {
            s.push_str(&format!("{k}={v}\n"));
        }
        s
    }
}
