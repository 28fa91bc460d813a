//! `key = value` run configuration.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::grid::GridScheme;
use super::params::ModelParams;
use crate::error::{range, Result};

/// Settings shared by the command line tools.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub params: ModelParams,
    /// Background radial cell count.
    pub n_radial: usize,
    /// Angular frequency cap; derived when absent.
    pub kmax: Option<u64>,
    /// `composite-gauss` or `graded`.
    pub scheme: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: ModelParams::new(1e-4, 1.0, 1e-4, 1.0, 1.0),
            n_radial: 256,
            kmax: None,
            scheme: "graded".into(),
        }
    }
}

pub const KEYS: [&str; 8] = ["h", "beta", "alpha_s", "r0", "R", "n_radial", "kmax", "scheme"];

impl RunConfig {
    /// Parse `key = value` lines. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| range(format!("line {}: expected key=value", lineno + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    /// Set one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = || value.parse::<f64>().map_err(|_| range(format!("{key}: not a number: {value}")));
        let int = || value.parse::<u64>().map_err(|_| range(format!("{key}: not an integer: {value}")));
        match key {
            "h" => self.params.h = num()?,
            "beta" => self.params.beta = num()?,
            "alpha_s" => self.params.alpha_s = num()?,
            "r0" => self.params.r0 = num()?,
            "R" => self.params.big_r = num()?,
            "n_radial" => self.n_radial = int()? as usize,
            "kmax" => self.kmax = Some(int()?),
            "scheme" => match value {
                "composite-gauss" | "graded" => self.scheme = value.to_string(),
                _ => return Err(range(format!("unknown scheme {value}"))),
            },
            _ => return Err(range(format!("unknown config key {key}"))),
        }
        Ok(())
    }

    /// Canonical text form, one key per line in a fixed order.
    pub fn to_text(&self) -> String {
        let mut m = BTreeMap::new();
        m.insert("h", format!("{:e}", self.params.h));
        m.insert("beta", format!("{}", self.params.beta));
        m.insert("alpha_s", format!("{:e}", self.params.alpha_s));
        m.insert("r0", format!("{}", self.params.r0));
        m.insert("R", format!("{}", self.params.big_r));
        m.insert("n_radial", self.n_radial.to_string());
        if let Some(k) = self.kmax {
            m.insert("kmax", k.to_string());
        }
        m.insert("scheme", self.scheme.clone());
        KEYS.iter().filter_map(|k| m.get(k).map(|v| format!("{k}={v}\n"))).collect()
    }

    /// Grid scheme for these settings, refined around the given radii down to `finest`.
    pub fn grid_scheme(&self, focus: Vec<f64>, finest: f64) -> GridScheme {
        match self.scheme.as_str() {
            "composite-gauss" => GridScheme::CompositeGauss,
            _ => GridScheme::Graded { focus, finest, ratio: 1.15 },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let text = "# comment\nh = 1e-5\nbeta=2\nalpha_s=1e-7\nR=2\nn_radial=64\nkmax=4000\nscheme=composite-gauss\n";
        let c = RunConfig::parse(text).unwrap();
        assert_eq!(c.params.h, 1e-5);
        assert_eq!(c.params.big_r, 2.0);
        assert_eq!(c.kmax, Some(4000));
        assert_eq!(RunConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(RunConfig::parse("foo=1").is_err());
        assert!(RunConfig::parse("h").is_err());
    }
}
