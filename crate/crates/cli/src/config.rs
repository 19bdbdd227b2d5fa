//! Resolution of parameters from flags, an optional `key=value` file, the
//! environment and defaults, in that order of precedence.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

pub const SEED_ENV: &str = "NICF_SEED";

#[derive(Debug, Default)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    /// Reads `key = value` lines; `#` starts a comment, blank lines are skipped.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Input(format!(
                    "config line {}: expected key=value, got {raw:?}",
                    i + 1
                ))
            })?;
            entries.insert(key.trim().replace('_', "-"), value.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

/// `flag`, else the config entry `key` parsed as `T`, else `None`.
pub fn pick<T>(flag: Option<T>, file: &ConfigFile, key: &str) -> Result<Option<T>, CliError>
where
    T: FromStr,
    T::Err: Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    file.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|e| CliError::Input(format!("config key {key} = {v:?}: {e}")))
        })
        .transpose()
}

/// Like [`pick`], with a default when neither source sets the value.
pub fn pick_or<T>(flag: Option<T>, file: &ConfigFile, key: &str, default: T) -> Result<T, CliError>
where
    T: FromStr,
    T::Err: Display,
{
    Ok(pick(flag, file, key)?.unwrap_or(default))
}

/// Flag, config file, `NICF_SEED`, then `default`.
pub fn seed(flag: Option<u64>, file: &ConfigFile, default: u64) -> Result<u64, CliError> {
    if let Some(s) = pick(flag, file, "seed")? {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|e| CliError::Input(format!("{SEED_ENV} = {v:?}: {e}"))),
        Err(_) => Ok(default),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_underscores() {
        let c = ConfigFile::parse("# run\nn_max = 12\n\nkind=folded # trailing\n").unwrap();
        assert_eq!(c.get("n-max"), Some("12"));
        assert_eq!(c.get("kind"), Some("folded"));
        assert!(ConfigFile::parse("oops").is_err());
    }

    #[test]
    fn flags_win_over_file() {
        let c = ConfigFile::parse("degree = 32").unwrap();
        assert_eq!(pick_or(Some(16usize), &c, "degree", 64).unwrap(), 16);
        assert_eq!(pick_or(None::<usize>, &c, "degree", 64).unwrap(), 32);
        assert_eq!(pick_or(None::<usize>, &c, "truncation", 7).unwrap(), 7);
        assert!(pick(
            None::<usize>,
            &ConfigFile::parse("degree = x").unwrap(),
            "degree"
        )
        .is_err());
    }
}
