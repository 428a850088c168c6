//! Flat `key = value` configuration files. Keys mirror the long flag names.

use std::collections::HashMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};

const KNOWN_KEYS: &[&str] = &[
    "mode",
    "alpha",
    "tau",
    "sigma",
    "h",
    "k",
    "max-requests",
    "max-iterations",
    "seeds",
    "patterns",
    "match-patterns",
    "catalog",
    "backend",
    "corpus",
    "cache-dir",
    "output-prefix",
    "endpoint",
    "threshold",
    "graph",
];

/// Alternative spellings accepted in files.
const ALIASES: &[(&str, &str)] = &[
    ("seeds-file", "seeds"),
    ("patterns-file", "patterns"),
    ("match-patterns-file", "match-patterns"),
];

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: HashMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config file {}", path.display()))
    }

    /// Blank lines and lines starting with `#` are ignored. Keys may use
    /// underscores in place of dashes, and `seeds_file` style names for the
    /// list files.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected key = value", i + 1);
            };
            let mut key = key.trim().replace('_', "-");
            if let Some((_, canonical)) = ALIASES.iter().find(|(alias, _)| *alias == key) {
                key = canonical.to_string();
            }
            if !KNOWN_KEYS.contains(&key.as_str()) {
                bail!("line {}: unknown key {key:?}", i + 1);
            }
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                bail!("line {}: duplicate key {key:?}", i + 1);
            }
        }
        Ok(Self { values })
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| anyhow::anyhow!("config key {key}: {e}")),
        }
    }

    /// The flag value if given, else the file value, else `default`.
    pub fn resolve<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.optional(flag, key)?.unwrap_or(default))
    }

    pub fn optional<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let cfg = ConfigFile::parse("# run\ntau = 3\nmax_requests=50\n\nmode = prio\n").unwrap();
        assert_eq!(cfg.resolve(None, "tau", 2u64).unwrap(), 3);
        assert_eq!(cfg.resolve(Some(5u64), "tau", 2).unwrap(), 5);
        assert_eq!(cfg.resolve(None, "max-requests", 1u64).unwrap(), 50);
        assert_eq!(cfg.resolve(None, "sigma", 5u64).unwrap(), 5);
    }

    #[test]
    fn file_suffixed_keys_are_aliases() {
        let cfg = ConfigFile::parse("seeds_file = s.txt
match-patterns-file = m.txt
").unwrap();
        assert_eq!(cfg.get::<String>("seeds").unwrap().as_deref(), Some("s.txt"));
        assert_eq!(cfg.get::<String>("match-patterns").unwrap().as_deref(), Some("m.txt"));
        assert!(ConfigFile::parse("seeds = a
seeds_file = b
").is_err());
    }

    #[test]
    fn rejects_unknown_duplicate_and_malformed() {
        assert!(ConfigFile::parse("colour = red").is_err());
        assert!(ConfigFile::parse("tau = 1\ntau = 2").is_err());
        assert!(ConfigFile::parse("tau").is_err());
        let cfg = ConfigFile::parse("tau = many").unwrap();
        assert!(cfg.get::<u64>("tau").is_err());
    }
}
