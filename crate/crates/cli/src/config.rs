//! Run configuration: flags, an optional `key = value` file beneath them,
//! and validation.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use serde::Serialize;

use idxdiv::{parse_poly, IntPolynomial};

use crate::CliError;

/// Keys accepted in a config file, spelled like the flags.
const KEYS: &[&str] = &[
    "poly", "trinomial", "N", "P", "p", "n-max", "bits", "workers", "format", "output", "family", "c", "timing",
];

#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
            let key = key.trim().trim_start_matches("--");
            if !KEYS.contains(&key) {
                return Err(CliError::Usage(format!("config line {}: unknown key {key:?}", i + 1)));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    /// The flag value if given, else the file's, parsed.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.values
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| CliError::Usage(format!("config key {key}: {e}"))))
            .transpose()
    }

    pub fn flag(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        Ok(flag || self.pick::<bool>(None, key)?.unwrap_or(false))
    }

    pub fn format(&self, flag: Option<Format>) -> Result<Option<Format>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.values
            .get("format")
            .map(|v| Format::from_str(v, true).map_err(|_| CliError::Usage(format!("config key format: unknown format {v:?}"))))
            .transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Records,
    Dot,
    Csv,
}

/// The polynomial a command works on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Target {
    pub polynomial: IntPolynomial,
    /// `(d, e, c)` when given as a trinomial.
    pub trinomial: Option<(usize, usize, i64)>,
}

pub fn parse_trinomial(text: &str) -> Result<(usize, usize, i64), CliError> {
    let bad = || CliError::Usage(format!("--trinomial expects d,e,c, got {text:?}"));
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [d, e, c] = parts[..] else { return Err(bad()) };
    let (d, e, c) = (
        d.parse::<usize>().map_err(|_| bad())?,
        e.parse::<usize>().map_err(|_| bad())?,
        c.parse::<i64>().map_err(|_| bad())?,
    );
    if !(d > e && e >= 1) {
        return Err(CliError::Usage(format!("--trinomial needs d > e >= 1, got {d},{e}")));
    }
    Ok((d, e, c))
}

pub fn resolve_target(poly: Option<String>, trinomial: Option<String>) -> Result<Target, CliError> {
    match (poly, trinomial) {
        (Some(_), Some(_)) => Err(CliError::Usage("give either --poly or --trinomial, not both".into())),
        (None, None) => Err(CliError::Usage("a polynomial is required (--poly or --trinomial)".into())),
        (Some(text), None) => Ok(Target {
            polynomial: parse_poly(&text).map_err(|e| CliError::Usage(format!("--poly {text:?}: {e}")))?,
            trinomial: None,
        }),
        (None, Some(text)) => {
            let (d, e, c) = parse_trinomial(&text)?;
            Ok(Target {
                polynomial: IntPolynomial::trinomial(d, e, c),
                trinomial: Some((d, e, c)),
            })
        }
    }
}

/// Inclusive integer range `a..b`, or a single integer.
pub fn parse_range(text: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::Usage(format!("expected a range a..b, got {text:?}"));
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let v = text.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(CliError::Usage(format!("empty range {text:?}")));
    }
    Ok((lo, hi))
}

pub fn at_least_one<T: PartialOrd + From<u8> + std::fmt::Display>(value: T, name: &str) -> Result<T, CliError> {
    if value < T::from(1) {
        return Err(CliError::Usage(format!("{name} must be at least 1, got {value}")));
    }
    Ok(value)
}

/// Settings shared by every command.
#[derive(Debug, Clone)]
pub struct Common {
    pub workers: Option<usize>,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub timing: bool,
}
