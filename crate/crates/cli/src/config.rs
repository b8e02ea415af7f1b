//! Run parameters: a flat key → value map filled from an optional
//! `key=value` file and then from command-line flags, which win.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

/// Keys accepted in a config file or as flags.
pub const KNOWN_KEYS: &[&str] = &[
    // run
    "seed",
    "threads",
    "output",
    "out",
    "negative_control",
    // inputs
    "function",
    "p",
    "k",
    "x",
    "y",
    "t",
    "a",
    "b",
    "z",
    "dim",
    "points",
    "radius",
    "check",
    "experiment",
    "paths",
    "dt",
    "potential",
    "domain",
    "grid",
    "trials",
    "degree",
    "n",
    "direction",
    // thresholds
    "tol_d1",
    "tol_branch",
    "tol_lk",
    "tol_quadrature",
    "tol_majorization",
    "tol_integral",
    "tol_gap",
    "tol_exit",
    "lp_slack",
    "extremal_fraction",
    "tol_slack",
    "tol_duality",
    "tol_isometry",
];

/// Pass/fail thresholds with their default values.
pub const DEFAULT_THRESHOLDS: &[(&str, f64)] = &[
    ("tol_d1", 1e-9),
    ("tol_branch", 1e-8),
    ("tol_lk", 0.01),
    ("tol_quadrature", 1e-9),
    ("tol_majorization", 1e-9),
    ("tol_integral", 1e-6),
    ("tol_gap", 0.02),
    ("tol_exit", 0.02),
    ("lp_slack", 0.05),
    ("extremal_fraction", 0.9),
    ("tol_slack", 1e-9),
    ("tol_duality", 1e-10),
    ("tol_isometry", 1e-10),
];

/// Errors that map to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params {
    map: BTreeMap<String, String>,
}

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses `key=value` lines; `#` starts a comment, blank lines are skipped.
    pub fn parse_file_text(text: &str) -> Result<Self, UsageError> {
        let mut out = Self::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| UsageError(format!("config line {}: expected key=value", i + 1)))?;
            out.set(k.trim(), v.trim())?;
        }
        Ok(out)
    }

    pub fn from_file(path: &Path) -> Result<Self, UsageError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_file_text(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), UsageError> {
        let key = key.to_ascii_lowercase();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(UsageError(format!("unknown parameter '{key}'")));
        }
        self.map.insert(key, value.to_string());
        Ok(())
    }

    /// Overrides with every `Some` flag value.
    pub fn merge_flags<I, S>(&mut self, flags: I) -> Result<(), UsageError>
    where
        I: IntoIterator<Item = (&'static str, Option<S>)>,
        S: ToString,
    {
        for (k, v) in flags {
            if let Some(v) = v {
                self.set(k, &v.to_string())?;
            }
        }
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.str(key).unwrap_or(default)
    }

    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>, UsageError> {
        self.str(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| UsageError(format!("'{key}' expects a number, got '{v}'")))
            })
            .transpose()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, UsageError> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, UsageError> {
        match self.str(key) {
            None => Ok(default),
            Some(v) => {
                parse_count(v).ok_or_else(|| UsageError(format!("'{key}' expects a nonnegative integer, got '{v}'")))
            }
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, UsageError> {
        match self.str(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| UsageError(format!("'{key}' expects an integer, got '{v}'"))),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, UsageError> {
        match self.str(key) {
            None => Ok(default),
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(v) => Err(UsageError(format!("'{key}' expects true/false, got '{v}'"))),
        }
    }

    /// Threshold value, from the map or its default.
    pub fn threshold(&self, key: &str) -> Result<f64, UsageError> {
        let default = DEFAULT_THRESHOLDS
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| UsageError(format!("no threshold named '{key}'")))?;
        self.f64_or(key, default)
    }

    /// Everything that shapes the numbers, for the report header. The output
    /// path and format are left out so identical runs written to different
    /// files produce identical bytes.
    pub fn echo(&self) -> BTreeMap<String, String> {
        self.map
            .iter()
            .filter(|(k, _)| !matches!(k.as_str(), "out" | "output"))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }
}

/// Accepts plain integers, `1e5`-style counts and `2^14`.
pub fn parse_count(v: &str) -> Option<usize> {
    if let Ok(n) = v.parse::<usize>() {
        return Some(n);
    }
    if let Some((b, e)) = v.split_once('^') {
        let b: usize = b.trim().parse().ok()?;
        let e: u32 = e.trim().parse().ok()?;
        return b.checked_pow(e);
    }
    let f: f64 = v.parse().ok()?;
    (f >= 0.0 && f.fract() == 0.0 && f < 1e18).then_some(f as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let mut p = Params::parse_file_text("p = 3\n# comment\nseed=7 # trailing\n\nk=2").unwrap();
        p.merge_flags([("p", Some(1.5)), ("k", None)]).unwrap();
        assert_eq!(p.f64_or("p", 0.0).unwrap(), 1.5);
        assert_eq!(p.f64_or("k", 0.0).unwrap(), 2.0);
        assert_eq!(p.u64_or("seed", 0).unwrap(), 7);
    }

    #[test]
    fn unknown_keys_and_bad_lines_are_usage_errors() {
        assert!(Params::parse_file_text("bogus=1").is_err());
        assert!(Params::parse_file_text("p 3").is_err());
        let p = Params::parse_file_text("p=abc").unwrap();
        assert!(p.f64_or("p", 1.0).is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(parse_count("100000"), Some(100_000));
        assert_eq!(parse_count("1e4"), Some(10_000));
        assert_eq!(parse_count("2^14"), Some(16_384));
        assert_eq!(parse_count("1.5"), None);
        assert_eq!(parse_count("-3"), None);
    }

    #[test]
    fn thresholds_default_and_override() {
        let mut p = Params::new();
        assert_eq!(p.threshold("tol_gap").unwrap(), 0.02);
        p.set("tol_gap", "0.5").unwrap();
        assert_eq!(p.threshold("tol_gap").unwrap(), 0.5);
        assert!(p.threshold("nope").is_err());
    }

    #[test]
    fn echo_skips_output_location() {
        let mut p = Params::new();
        p.set("out", "/tmp/x.csv").unwrap();
        p.set("output", "csv").unwrap();
        p.set("seed", "42").unwrap();
        assert_eq!(
            p.echo().into_iter().collect::<Vec<_>>(),
            vec![("seed".into(), "42".into())]
        );
    }
}
