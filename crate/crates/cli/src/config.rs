//! Flat `key = value` config files and flag/file/default resolution.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if out.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(CliError::Config(format!("config line {}: duplicate key `{key}`", lineno + 1)));
        }
    }
    Ok(out)
}

pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Looks values up flag-first, then in the config file, then in defaults,
/// and remembers what it resolved.
pub struct Resolver {
    file: BTreeMap<String, String>,
    used: Vec<String>,
    resolved: BTreeMap<String, String>,
}

impl Resolver {
    pub fn new(file: BTreeMap<String, String>) -> Self {
        Self {
            file,
            used: Vec::new(),
            resolved: BTreeMap::new(),
        }
    }

    pub fn get<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        self.used.push(key.to_string());
        let value = match flag {
            Some(v) => Some(v),
            None => match self.file.get(key) {
                Some(text) => Some(
                    text.parse::<T>()
                        .map_err(|e| CliError::Config(format!("config key `{key}` = `{text}`: {e}")))?,
                ),
                None => None,
            },
        };
        if let Some(v) = &value {
            self.resolved.insert(key.to_string(), v.to_string());
        }
        Ok(value)
    }

    pub fn require<T>(&mut self, key: &str, flag: Option<T>) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        self.get(key, flag)?
            .ok_or_else(|| CliError::Usage(format!("missing required --{key}")))
    }

    pub fn or<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        match self.get(key, flag)? {
            Some(v) => Ok(v),
            None => {
                self.resolved.insert(key.to_string(), default.to_string());
                Ok(default)
            }
        }
    }

    /// A file value that is not part of the resolved run (paths, threads).
    pub fn raw(&mut self, key: &str) -> Option<String> {
        self.used.push(key.to_string());
        self.file.get(key).cloned()
    }

    /// Config keys this command never asked for.
    pub fn unused_keys(&self) -> Vec<&str> {
        self.file
            .keys()
            .filter(|k| !self.used.iter().any(|u| u == *k))
            .map(String::as_str)
            .collect()
    }

    /// The resolved configuration, re-runnable through `--config`.
    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.resolved
    }
}

/// Comma-separated list.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|item| item.trim().parse::<T>().map_err(|e| format!("`{}`: {e}", item.trim())))
            .collect::<Result<Vec<_>, _>>()
            .map(List)
    }
}

impl<T: Display> Display for List<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, item) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            item.fmt(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_files() {
        let map = parse_config("# run\nalpha = 0.75\n\nmodes=8 # trailing\nk_max = 10\n").unwrap();
        assert_eq!(map["alpha"], "0.75");
        assert_eq!(map["modes"], "8");
        assert_eq!(map["k-max"], "10");
        assert!(parse_config("alpha 0.75").is_err());
        assert!(parse_config("a=1\na=2").is_err());
    }

    #[test]
    fn flags_override_file() {
        let mut r = Resolver::new(parse_config("alpha = 0.75\nmodes = 8\nextra = 1").unwrap());
        assert_eq!(r.require::<f64>("alpha", Some(0.6)).unwrap(), 0.6);
        assert_eq!(r.require::<usize>("modes", None).unwrap(), 8);
        assert_eq!(r.or::<f64>("dt", None, 1e-3).unwrap(), 1e-3);
        assert!(matches!(r.require::<f64>("time", None), Err(CliError::Usage(_))));
        assert_eq!(r.unused_keys(), ["extra"]);
        assert_eq!(r.resolved()["alpha"], "0.6");
        assert_eq!(r.resolved()["dt"], "0.001");
    }

    #[test]
    fn bad_file_value_is_config_error() {
        let mut r = Resolver::new(parse_config("modes = many").unwrap());
        assert!(matches!(r.require::<usize>("modes", None), Err(CliError::Config(_))));
    }

    #[test]
    fn lists() {
        let l: List<f64> = "1, 1.5,2".parse().unwrap();
        assert_eq!(l.0, [1.0, 1.5, 2.0]);
        assert_eq!(l.to_string(), "1,1.5,2");
        assert!("1,x".parse::<List<f64>>().is_err());
    }
}
