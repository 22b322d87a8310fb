//! Flat `key = value` settings file mirroring the global flags.

use std::collections::BTreeMap;
use std::path::Path;

use diamond_core::{ClusterParams, Error, Result};

pub const KEYS: [&str; 8] = ["J", "Jz", "J0", "h", "hp", "theta", "phi", "t"];

/// Values explicitly set either on the command line or in a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<&'static str, f64>,
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| Error::Config { line: k + 1, reason };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected 'key = value'".into()))?;
            let key = key.trim();
            let key = *KEYS.iter().find(|&&name| name == key).ok_or_else(|| err(format!("unknown key '{key}'")))?;
            let value: f64 = value.trim().parse().map_err(|_| err(format!("'{}' is not a number", value.trim())))?;
            if !value.is_finite() {
                return Err(err(format!("{key} must be finite")));
            }
            values.insert(key, value);
        }
        Ok(Settings { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Settings::parse(&std::fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &'static str, value: Option<f64>) {
        if let Some(v) = value {
            self.values.insert(key, v);
        }
    }

    /// Entries of `other` take precedence.
    pub fn overlay(mut self, other: &Settings) -> Self {
        self.values.extend(other.values.iter().map(|(k, v)| (*k, *v)));
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }

    pub fn explicit(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        self.values.iter().map(|(k, v)| (*k, *v))
    }

    /// Couplings default to 1, fields to 0.
    pub fn params(&self) -> Result<ClusterParams> {
        let or = |k: &str, d: f64| self.get(k).unwrap_or(d);
        ClusterParams::new(or("J", 1.0), or("Jz", 1.0), or("J0", 1.0), or("h", 0.0), or("hp", 0.0))
    }

    pub fn theta(&self) -> f64 {
        self.get("theta").unwrap_or(0.0)
    }

    pub fn phi(&self) -> f64 {
        self.get("phi").unwrap_or(0.0)
    }

    pub fn t(&self) -> f64 {
        self.get("t").unwrap_or(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blanks() {
        let s = Settings::parse("# cluster\nJ = 1.5\n\nJ0=-2 # strong\nt = 3\n").unwrap();
        assert_eq!(s.get("J"), Some(1.5));
        assert_eq!(s.get("J0"), Some(-2.0));
        assert_eq!(s.t(), 3.0);
        assert_eq!(s.params().unwrap().jz, 1.0);
    }

    #[test]
    fn reports_line_numbers() {
        match Settings::parse("J = 1\nbogus = 2\n") {
            Err(Error::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(Settings::parse("J 1"), Err(Error::Config { line: 1, .. })));
        assert!(matches!(Settings::parse("h = x"), Err(Error::Config { line: 1, .. })));
    }

    #[test]
    fn overlay_prefers_flags() {
        let file = Settings::parse("J = 1\nh = 2").unwrap();
        let mut flags = Settings::default();
        flags.set("J", Some(3.0));
        let merged = file.overlay(&flags);
        assert_eq!((merged.get("J"), merged.get("h")), (Some(3.0), Some(2.0)));
    }
}
