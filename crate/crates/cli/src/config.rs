//! Flat `key = value` configuration files and setting resolution.
//!
//! Keys are flag names without the leading dashes. A value given on the
//! command line wins over the file, which wins over `SPARSESENSE_SEED` (seed
//! only), which wins over built-in defaults.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

pub const SEED_ENV: &str = "SPARSESENSE_SEED";

const KNOWN_KEYS: &[&str] = &[
    "seed", "threads", "out-dir", "data", "out", "svg", "format", "a", "b", "n", "m", "n-sv",
    "basis", "oversample", "modes", "sensors", "r", "p", "noise", "noise-cheap", "noise-exp",
    "splits", "cv", "noise-draws", "train-fraction", "split", "steps", "band", "assignment",
    "p-cheap-max", "p-exp-max", "cost-cheap", "mode-threshold", "mode-factor", "tag-b",
    "noise-regime", "sensor-regime",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str, origin: &str) -> CliResult<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::data(format!(
                    "{origin}:{}: expected `key = value`",
                    i + 1
                )));
            };
            let key = k.trim().trim_start_matches("--").to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::usage(format!("{origin}:{}: unknown key `{key}`", i + 1)));
            }
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(CliError::data(format!("{origin}:{}: duplicate key `{key}`", i + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("reading config {}", path.display()), e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

/// Resolves each setting from flag, then file, then default.
pub struct Settings {
    file: ConfigFile,
    env_seed: Option<String>,
}

impl Settings {
    pub fn new(file: ConfigFile, env_seed: Option<String>) -> Self {
        Self { file, env_seed }
    }

    pub fn from_env(file: ConfigFile) -> Self {
        Self::new(file, std::env::var(SEED_ENV).ok())
    }

    /// `flag`, else the file's `key`, parsed as `T`.
    pub fn get<T>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.file
            .raw(key)
            .map(|v| parse_value(key, v))
            .transpose()
    }

    pub fn get_or<T>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        Ok(self.get(flag, key)?.unwrap_or(default))
    }

    pub fn require<T>(&self, flag: Option<T>, key: &str) -> CliResult<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        self.get(flag, key)?
            .ok_or_else(|| CliError::usage(format!("missing required setting --{key}")))
    }

    /// Master seed, the one setting that also reads the environment.
    pub fn seed(&self, flag: Option<u64>) -> CliResult<u64> {
        if let Some(s) = self.get(flag, "seed")? {
            return Ok(s);
        }
        match &self.env_seed {
            Some(v) => parse_value(SEED_ENV, v),
            None => Ok(0),
        }
    }

    /// Comma-separated list.
    pub fn list<T>(&self, flag: Option<Vec<T>>, key: &str) -> CliResult<Option<Vec<T>>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.file
            .raw(key)
            .map(|v| v.split(',').map(|item| parse_value(key, item.trim())).collect())
            .transpose()
    }
}

fn parse_value<T>(key: &str, v: &str) -> CliResult<T>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    v.parse()
        .map_err(|e| CliError::usage(format!("invalid value `{v}` for {key}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let file = ConfigFile::parse("seed = 5\nsplits=3\n# note\n", "t").unwrap();
        let s = Settings::new(file, Some("9".into()));
        assert_eq!(s.seed(Some(1)).unwrap(), 1);
        assert_eq!(s.seed(None).unwrap(), 5);
        assert_eq!(s.get_or::<usize>(None, "splits", 20).unwrap(), 3);
        assert_eq!(s.get_or::<usize>(Some(4), "splits", 20).unwrap(), 4);
        assert_eq!(s.get_or::<usize>(None, "cv", 20).unwrap(), 20);

        let env_only = Settings::new(ConfigFile::default(), Some("9".into()));
        assert_eq!(env_only.seed(None).unwrap(), 9);
        assert_eq!(Settings::new(ConfigFile::default(), None).seed(None).unwrap(), 0);
    }

    #[test]
    fn lists_and_errors() {
        let file = ConfigFile::parse("r = 10, 20,30", "t").unwrap();
        let s = Settings::new(file, None);
        assert_eq!(s.list::<usize>(None, "r").unwrap(), Some(vec![10, 20, 30]));
        assert!(ConfigFile::parse("bogus = 1", "t").is_err());
        assert!(ConfigFile::parse("seed 1", "t").is_err());
        assert!(ConfigFile::parse("seed=1\nseed=2", "t").is_err());
        let bad = Settings::new(ConfigFile::parse("splits = x", "t").unwrap(), None);
        assert_eq!(bad.get::<usize>(None, "splits").unwrap_err().exit_code(), 64);
    }
}
