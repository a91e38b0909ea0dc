//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored; a `#` after a value
//! starts a trailing comment. Keys are case-sensitive and unknown keys are
//! rejected. Command-line flags are applied as the same key/value pairs after
//! the file, so they override it.

use std::path::PathBuf;

use thiserror::Error;

use crate::decayed_graph::DecayParams;
use crate::engine::SimulationConfig;
use crate::routing::Protocol;
use crate::trace::PlantedTraceSpec;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("invalid value '{value}' for '{key}': {reason}")]
    InvalidValue { key: String, value: String, reason: String },
    #[error("missing required key '{0}'")]
    Missing(&'static str),
    #[error("path '{}' for '{key}' does not exist", path.display())]
    MissingPath { key: &'static str, path: PathBuf },
}

/// `(line, key, value)` in file order.
pub fn parse_key_values(text: &str) -> Result<Vec<(usize, String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(ConfigError::Syntax { line, reason: format!("expected 'key = value', found {content:?}") });
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(ConfigError::Syntax { line, reason: "empty key".into() });
        }
        out.push((line, k.to_string(), v.to_string()));
    }
    Ok(out)
}

fn invalid(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue { key: key.into(), value: value.into(), reason: reason.into() }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| invalid(key, value, "not a number"))
}

/// Comma- or whitespace-separated list.
fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty())
}

/// Everything the `simulate` and `communities` subcommands read.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Contact trace file.
    pub trace: Option<PathBuf>,
    /// Output directory.
    pub out: Option<PathBuf>,
    pub sim: SimulationConfig,
    /// Decay rate per `beta_unit` seconds.
    pub beta: f64,
    pub beta_unit: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { trace: None, out: None, sim: SimulationConfig::default(), beta: 1.0, beta_unit: 3600.0 }
    }
}

impl RunConfig {
    pub const KEYS: [&'static str; 18] = [
        "trace",
        "out",
        "protocols",
        "messages",
        "ttl",
        "runs",
        "epoch",
        "beta",
        "beta_unit",
        "R",
        "phi",
        "seed",
        "bubble_starts",
        "prophet_p_init",
        "prophet_gamma",
        "prophet_beta",
        "prophet_time_unit",
        "centering",
    ];

    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut c = RunConfig::default();
        for (_, k, v) in parse_key_values(text)? {
            c.set(&k, &v)?;
        }
        Ok(c)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let s = &mut self.sim;
        match key {
            "trace" => self.trace = Some(PathBuf::from(value)),
            "out" => self.out = Some(PathBuf::from(value)),
            "protocols" => {
                s.protocols = list(value)
                    .map(|p| p.parse::<Protocol>().map_err(|e| invalid(key, value, e.to_string())))
                    .collect::<Result<_, _>>()?;
            }
            "messages" => s.n_messages = num(key, value)?,
            "ttl" => s.ttl_list = list(value).map(|t| num(key, t)).collect::<Result<_, _>>()?,
            "runs" => s.runs = num(key, value)?,
            "epoch" => s.epoch = Some(num(key, value)?),
            "beta" => self.beta = num(key, value)?,
            "beta_unit" => self.beta_unit = num(key, value)?,
            "R" => s.community.ratio = num(key, value)?,
            "phi" => s.community.phi = num(key, value)?,
            "seed" => s.seed = num(key, value)?,
            "bubble_starts" => s.bubble_starts = num(key, value)?,
            "prophet_p_init" => s.prophet.p_init = num(key, value)?,
            "prophet_gamma" => s.prophet.gamma = num(key, value)?,
            "prophet_beta" => s.prophet.beta = num(key, value)?,
            "prophet_time_unit" => s.prophet.time_unit = num(key, value)?,
            "centering" => s.community.pca.centering = num(key, value)?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Resolves derived fields and checks every value and referenced path.
    pub fn finish(mut self) -> Result<Self, ConfigError> {
        self.sim.decay = DecayParams::per_time_unit(self.beta, self.beta_unit)
            .map_err(|e| invalid("beta", &self.beta.to_string(), e.to_string()))?;
        self.sim.validate().map_err(|e| invalid("config", "", e.to_string()))?;
        if let Some(p) = self.trace.as_ref().filter(|p| !p.exists()) {
            return Err(ConfigError::MissingPath { key: "trace", path: p.clone() });
        }
        Ok(self)
    }
}

/// Planted-trace parameters from key/value pairs.
pub fn planted_spec_from_text(text: &str) -> Result<PlantedTraceSpec, ConfigError> {
    let mut spec = PlantedTraceSpec::default();
    for (_, k, v) in parse_key_values(text)? {
        set_planted(&mut spec, &k, &v)?;
    }
    Ok(spec)
}

pub fn set_planted(spec: &mut PlantedTraceSpec, key: &str, value: &str) -> Result<(), ConfigError> {
    match key {
        "n" => spec.n = num(key, value)?,
        "k" => spec.k_true = num(key, value)?,
        "sizes" => spec.community_sizes = list(value).map(|t| num(key, t)).collect::<Result<_, _>>()?,
        "noise" => spec.n_noise = num(key, value)?,
        "bridges" => spec.n_bridge = num(key, value)?,
        "intra_rate" => spec.intra_rate = num(key, value)?,
        "inter_rate" => spec.inter_rate = num(key, value)?,
        "noise_rate" => spec.noise_rate = num(key, value)?,
        "mean_duration" => spec.mean_duration = num(key, value)?,
        "duration" => spec.duration = num(key, value)?,
        "seed" => spec.seed = num(key, value)?,
        other => return Err(ConfigError::UnknownKey(other.to_string())),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_whitespace() {
        let kv = parse_key_values("# header\n\n runs = 3 # trailing\nttl=60, 120\n").unwrap();
        assert_eq!(kv, vec![(3, "runs".into(), "3".into()), (4, "ttl".into(), "60, 120".into())]);
        assert!(matches!(parse_key_values("runs 3"), Err(ConfigError::Syntax { line: 1, .. })));
    }

    #[test]
    fn run_config_keys() {
        let c = RunConfig::from_text("protocols = epidemic, direct\nmessages = 10\nttl = 60 600\nR = 0.9\nbeta = 2").unwrap();
        assert_eq!(c.sim.protocols, vec![Protocol::Epidemic, Protocol::Direct]);
        assert_eq!((c.sim.n_messages, c.sim.ttl_list.clone(), c.sim.community.ratio), (10, vec![60.0, 600.0], 0.9));
        let c = c.finish().unwrap();
        assert!((c.sim.decay.beta - 2.0 / 3600.0).abs() < 1e-18);
    }

    #[test]
    fn rejects_unknown_and_bad_values() {
        assert_eq!(RunConfig::from_text("colour = red"), Err(ConfigError::UnknownKey("colour".into())));
        assert!(matches!(RunConfig::from_text("runs = many"), Err(ConfigError::InvalidValue { .. })));
        assert!(matches!(RunConfig::from_text("protocols = simbet"), Err(ConfigError::InvalidValue { .. })));
        assert!(RunConfig::from_text("runs = 0").unwrap().finish().is_err());
        let missing = RunConfig::from_text("trace = /nonexistent/contacts.csv").unwrap().finish();
        assert!(matches!(missing, Err(ConfigError::MissingPath { key: "trace", .. })));
    }

    #[test]
    fn every_key_is_settable() {
        let sample = |k: &str| match k {
            "protocols" => "ofpc",
            "trace" | "out" => "x",
            "centering" => "false",
            _ => "1",
        };
        for k in RunConfig::KEYS {
            RunConfig::default().set(k, sample(k)).unwrap_or_else(|e| panic!("{k}: {e}"));
        }
    }

    #[test]
    fn planted_spec_keys() {
        let s = planted_spec_from_text("n = 12\nk = 2\nsizes = 6,4\nnoise = 2\nbridges = 0\nseed = 9").unwrap();
        assert_eq!((s.n, s.k_true, s.community_sizes.clone(), s.seed), (12, 2, vec![6, 4], 9));
        assert!(s.validate().is_ok());
    }
}
