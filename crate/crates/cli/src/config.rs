//! Plain `key = value` configuration files and flag/file/default merging.

use std::collections::BTreeMap;
use std::str::FromStr;

/// Values read from a config file; empty when no file was given.
#[derive(Debug, Default)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: Option<&str>) -> Result<Self, String> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {path}: {e}"))?;
        Self::parse(&text).map_err(|e| format!("{path}: {e}"))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
            values.insert(key.trim().replace('_', "-"), value.trim().to_string());
        }
        Ok(FileConfig { values })
    }

    /// Flag value if set, else the file's value, else `default`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, String> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.values.get(key) {
            Some(s) => s.parse().map_err(|_| format!("config key {key}: cannot parse '{s}'")),
            None => Ok(default),
        }
    }

    pub fn pick_opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, String> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.values.get(key).map(|s| s.parse().map_err(|_| format!("config key {key}: cannot parse '{s}'"))).transpose()
    }

    /// Comma-separated list from the flag or the file.
    pub fn pick_list<T: FromStr>(&self, flag: Option<&str>, key: &str, default: &str) -> Result<Vec<T>, String> {
        let raw = flag.map(str::to_string).or_else(|| self.values.get(key).cloned()).unwrap_or_else(|| default.to_string());
        raw.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|_| format!("{key}: cannot parse '{s}'")))
            .collect()
    }
}
