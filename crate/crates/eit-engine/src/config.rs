//! Flat `key = value` run configuration with `#` comments.
//!
//! Keys are the snake_case field names below; every physical field has a
//! default (the parameter set used throughout the tables), so an empty
//! config is valid. All frequencies are in 2π·MHz except the optical
//! transition frequencies `omega_4i_rad_s`, which are in rad/s.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::closed_form::ClosedFormOptions;
use crate::engine::{EngineParams, EngineVariant};
use crate::error::{Error, Result};
use crate::observables::{GridSpec, Method};
use crate::reservoir::{DecayRates, ReservoirSpec};

/// Response-evaluation backend selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    ClosedForm,
    Floquet,
    /// Run both backends (spectrum output gains paired columns).
    Both,
}

impl MethodChoice {
    pub fn parse(s: &str) -> Result<MethodChoice> {
        match s.trim().to_ascii_lowercase().as_str() {
            "closed-form" | "closed_form" | "closedform" => Ok(MethodChoice::ClosedForm),
            "floquet" => Ok(MethodChoice::Floquet),
            "both" => Ok(MethodChoice::Both),
            other => Err(Error::Config(format!(
                "method must be closed-form, floquet or both (got '{other}')"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            MethodChoice::ClosedForm => "closed-form",
            MethodChoice::Floquet => "floquet",
            MethodChoice::Both => "both",
        }
    }
}

/// Complete run configuration (engine parameters, grid, backend, output).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub variant: EngineVariant,
    pub gamma_41: f64,
    pub gamma_42: f64,
    pub gamma_43: f64,
    pub omega_41_rad_s: f64,
    pub omega_42_rad_s: f64,
    pub omega_43_rad_s: f64,
    pub t_41_k: f64,
    pub t_42_k: f64,
    pub t_43_k: f64,
    pub omega_pr: f64,
    pub omega_pu: f64,
    pub omega_c: f64,
    pub delta_pr: f64,
    pub delta_pu: f64,
    pub delta_c: f64,
    pub omega_m: f64,
    pub epsilon: f64,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_points: usize,
    pub method: MethodChoice,
    pub l_max: usize,
    /// Use the doubly-divided sideband-source variant in the closed form.
    pub nested_f: bool,
    /// Optional output path (CLI `--out` overrides).
    pub out: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            variant: EngineVariant::Composite,
            gamma_41: 5.7,
            gamma_42: 5.7,
            gamma_43: 5.7,
            omega_41_rad_s: 4.0e15,
            omega_42_rad_s: 3.0e15,
            omega_43_rad_s: 3.0e15,
            t_41_k: 5000.0,
            t_42_k: 5000.0,
            t_43_k: 5000.0,
            omega_pr: 0.868,
            omega_pu: 17.36,
            omega_c: 17.36,
            delta_pr: 0.0,
            delta_pu: 0.0,
            delta_c: 0.0,
            omega_m: 2.0,
            epsilon: 0.01,
            grid_min: -50.0,
            grid_max: 50.0,
            grid_points: 2001,
            method: MethodChoice::ClosedForm,
            l_max: 2,
            nested_f: false,
            out: None,
        }
    }
}

impl RunConfig {
    /// Parse from flat `key = value` text.
    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value', got '{line}'", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        RunConfig::parse(&text)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let float = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| Error::Config(format!("{key}: expected a number, got '{v}'")))
        };
        match key {
            "variant" => self.variant = EngineVariant::parse(value)?,
            "gamma_41" => self.gamma_41 = float(value)?,
            "gamma_42" => self.gamma_42 = float(value)?,
            "gamma_43" => self.gamma_43 = float(value)?,
            "omega_41_rad_s" => self.omega_41_rad_s = float(value)?,
            "omega_42_rad_s" => self.omega_42_rad_s = float(value)?,
            "omega_43_rad_s" => self.omega_43_rad_s = float(value)?,
            "t_41_k" => self.t_41_k = float(value)?,
            "t_42_k" => self.t_42_k = float(value)?,
            "t_43_k" => self.t_43_k = float(value)?,
            "omega_pr" => self.omega_pr = float(value)?,
            "omega_pu" => self.omega_pu = float(value)?,
            "omega_c" => self.omega_c = float(value)?,
            "delta_pr" => self.delta_pr = float(value)?,
            "delta_pu" => self.delta_pu = float(value)?,
            "delta_c" => self.delta_c = float(value)?,
            "omega_m" => self.omega_m = float(value)?,
            "epsilon" => self.epsilon = float(value)?,
            "grid_min" => self.grid_min = float(value)?,
            "grid_max" => self.grid_max = float(value)?,
            "grid_points" => {
                self.grid_points = value
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("grid_points: expected an integer, got '{value}'")))?
            }
            "method" => self.method = MethodChoice::parse(value)?,
            "l_max" => {
                self.l_max = value
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("l_max: expected an integer, got '{value}'")))?
            }
            "nested_f" => {
                self.nested_f = value
                    .parse::<bool>()
                    .map_err(|_| Error::Config(format!("nested_f: expected true/false, got '{value}'")))?
            }
            "out" => self.out = Some(value.to_string()),
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_41_k <= 0.0 {
            return Err(Error::Config(format!(
                "t_41_k: reservoir temperature must be positive (got {})",
                self.t_41_k
            )));
        }
        self.grid().validate().map_err(|e| Error::Config(e.to_string()))?;
        self.engine_params().validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    /// Engine parameters implied by this configuration. Fields of inactive
    /// channels are forced to zero so a shared config works for every
    /// variant.
    pub fn engine_params(&self) -> EngineParams {
        EngineParams {
            variant: self.variant,
            decays: DecayRates {
                gamma_41: self.gamma_41,
                gamma_42: self.gamma_42,
                gamma_43: self.gamma_43,
            },
            reservoirs: ReservoirSpec {
                omega_41_rad_s: self.omega_41_rad_s,
                omega_42_rad_s: self.omega_42_rad_s,
                omega_43_rad_s: self.omega_43_rad_s,
                t_41_k: self.t_41_k,
                t_42_k: self.t_42_k,
                t_43_k: self.t_43_k,
            },
            omega_pr: self.omega_pr,
            omega_pu: if self.variant.has_pump_channel() { self.omega_pu } else { 0.0 },
            omega_c: if self.variant.has_control_channel() { self.omega_c } else { 0.0 },
            delta_pr: self.delta_pr,
            delta_pu: if self.variant.has_pump_channel() { self.delta_pu } else { 0.0 },
            delta_c: if self.variant.has_control_channel() { self.delta_c } else { 0.0 },
            omega_m: self.omega_m,
            epsilon: if self.variant.has_control_channel() { self.epsilon } else { 0.0 },
        }
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec { min: self.grid_min, max: self.grid_max, points: self.grid_points }
    }

    /// Concrete backends to run (one, or two in `both` mode).
    pub fn methods(&self) -> Vec<Method> {
        let cf = Method::ClosedForm(ClosedFormOptions { nested_f: self.nested_f });
        let fl = Method::Floquet { l_max: self.l_max };
        match self.method {
            MethodChoice::ClosedForm => vec![cf],
            MethodChoice::Floquet => vec![fl],
            MethodChoice::Both => vec![cf, fl],
        }
    }

    /// Serialize the effective (defaults-applied) configuration; parsing
    /// the output reproduces this configuration exactly.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "variant = {}", self.variant.label());
        let _ = writeln!(s, "gamma_41 = {}", self.gamma_41);
        let _ = writeln!(s, "gamma_42 = {}", self.gamma_42);
        let _ = writeln!(s, "gamma_43 = {}", self.gamma_43);
        let _ = writeln!(s, "omega_41_rad_s = {:e}", self.omega_41_rad_s);
        let _ = writeln!(s, "omega_42_rad_s = {:e}", self.omega_42_rad_s);
        let _ = writeln!(s, "omega_43_rad_s = {:e}", self.omega_43_rad_s);
        let _ = writeln!(s, "t_41_k = {}", self.t_41_k);
        let _ = writeln!(s, "t_42_k = {}", self.t_42_k);
        let _ = writeln!(s, "t_43_k = {}", self.t_43_k);
        let _ = writeln!(s, "omega_pr = {}", self.omega_pr);
        let _ = writeln!(s, "omega_pu = {}", self.omega_pu);
        let _ = writeln!(s, "omega_c = {}", self.omega_c);
        let _ = writeln!(s, "delta_pr = {}", self.delta_pr);
        let _ = writeln!(s, "delta_pu = {}", self.delta_pu);
        let _ = writeln!(s, "delta_c = {}", self.delta_c);
        let _ = writeln!(s, "omega_m = {}", self.omega_m);
        let _ = writeln!(s, "epsilon = {}", self.epsilon);
        let _ = writeln!(s, "grid_min = {}", self.grid_min);
        let _ = writeln!(s, "grid_max = {}", self.grid_max);
        let _ = writeln!(s, "grid_points = {}", self.grid_points);
        let _ = writeln!(s, "method = {}", self.method.as_str());
        let _ = writeln!(s, "l_max = {}", self.l_max);
        let _ = writeln!(s, "nested_f = {}", self.nested_f);
        if let Some(out) = &self.out {
            let _ = writeln!(s, "out = {out}");
        }
        s
    }

    /// Key/value view (used by reports).
    pub fn entries(&self) -> BTreeMap<String, String> {
        self.serialize()
            .lines()
            .filter_map(|l| l.split_once(" = "))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        let cfg = RunConfig::parse("").unwrap();
        assert_eq!(cfg, RunConfig::default());
    }

    #[test]
    fn parses_keys_and_comments() {
        let text = "# heat engine run\nvariant = HE_c   # control only\nomega_c = 28.5\ngrid_points = 101\nmethod = both\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.variant, EngineVariant::Control);
        assert_eq!(cfg.omega_c, 28.5);
        assert_eq!(cfg.grid_points, 101);
        assert_eq!(cfg.method, MethodChoice::Both);
    }

    #[test]
    fn rejects_unknown_key_and_bad_values() {
        assert!(RunConfig::parse("omega_q = 1").is_err());
        assert!(RunConfig::parse("omega_pr = fast").is_err());
        assert!(RunConfig::parse("grid_points = 2").is_err());
    }

    #[test]
    fn rejects_zero_t41_naming_field() {
        let err = RunConfig::parse("t_41_k = 0").unwrap_err();
        assert!(err.to_string().contains("t_41_k"), "{err}");
    }

    #[test]
    fn round_trips_through_serialize() {
        let mut cfg = RunConfig::default();
        cfg.variant = EngineVariant::Pump;
        cfg.omega_pu = 8.68;
        cfg.method = MethodChoice::Floquet;
        cfg.out = Some("run.csv".into());
        let text = cfg.serialize();
        let back = RunConfig::parse(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn inactive_channel_fields_are_masked() {
        let mut cfg = RunConfig::default();
        cfg.variant = EngineVariant::Pump;
        let p = cfg.engine_params();
        assert_eq!(p.omega_c, 0.0);
        assert_eq!(p.epsilon, 0.0);
        assert!(p.validate().is_ok());
    }
}
