//! Flat key-value config files with one `[section]` per sweep.
//!
//! ```text
//! [audit]
//! model = curie-weiss
//! n = 100,400,1600
//! p = 0,3
//! format = csv
//! out = audit.csv
//! ```
//!
//! Lines are `key = value`; `#` starts a comment. Command-line flags
//! override file values.

use std::collections::BTreeMap;
use std::fs;

#[derive(Debug, Default, Clone)]
pub struct Config {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, String> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                current = name.trim().to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!("line {}: expected `key = value`, got `{line}`", lineno + 1));
            };
            if current.is_empty() {
                return Err(format!("line {}: key before any [section]", lineno + 1));
            }
            sections
                .get_mut(&current)
                .unwrap()
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Config { sections })
    }

    pub fn load(path: &str) -> Result<Config, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read config {path}: {e}"))?;
        Config::parse(&text)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section).and_then(|s| s.get(key)).map(String::as_str)
    }

    /// Parse a comma-separated list field.
    pub fn get_list(&self, section: &str, key: &str) -> Option<Vec<String>> {
        self.get(section, key)
            .map(|v| v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
    }
}

/// Pick the command-line value when present, else the config value, else the
/// fallback.
pub fn resolve<T: Clone>(cli: Option<T>, file: Option<T>, fallback: T) -> T {
    cli.or(file).unwrap_or(fallback)
}

/// Same, but the field is required from one of the two sources.
pub fn resolve_required<T>(cli: Option<T>, file: Option<T>, field: &str) -> Result<T, String> {
    cli.or(file).ok_or_else(|| format!("missing required field `{field}`"))
}
