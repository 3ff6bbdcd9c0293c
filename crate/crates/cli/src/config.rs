//! `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Every key is optional; unknown or repeated keys are errors that carry the
//! offending line number.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use curvint::verify::suite::SuiteOptions;
use curvint::{AngularIndex, Curvature, IntegratorConfig, PhaseState, SystemKind, SystemSpec};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

fn line_err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Line {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kind: SystemKind,
    pub kappa: f64,
    pub g: f64,
    pub k_a: f64,
    pub k_b: f64,
    pub m_num: u32,
    pub m_den: u32,
    pub state: PhaseState,
    pub t_end: f64,
    pub integrator: IntegratorConfig,
    pub out: Option<PathBuf>,
    /// Append the invariant columns to the trajectory CSV.
    pub invariant_columns: bool,
    pub negative_control: bool,
    pub verify_trajectories: usize,
    pub verify_bracket_states: usize,
    pub verify_moduli_states: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let suite = SuiteOptions::default();
        RunConfig {
            kind: SystemKind::Pw,
            kappa: 1.0,
            g: 1.0,
            k_a: 0.8,
            k_b: 0.3,
            m_num: 2,
            m_den: 1,
            state: PhaseState::new(1.0, 0.7, 0.1, 0.2),
            t_end: 100.0,
            integrator: IntegratorConfig::default(),
            out: None,
            invariant_columns: true,
            negative_control: false,
            verify_trajectories: suite.trajectories,
            verify_bracket_states: suite.bracket_states,
            verify_moduli_states: suite.moduli_states,
        }
    }
}

pub const KEYS: &[&str] = &[
    "kind",
    "kappa",
    "g",
    "k_a",
    "k_b",
    "m_num",
    "m_den",
    "r",
    "phi",
    "p_r",
    "p_phi",
    "t_end",
    "rel_tol",
    "abs_tol",
    "max_step",
    "singularity_margin",
    "out",
    "invariant_columns",
    "negative_control",
    "verify_trajectories",
    "verify_bracket_states",
    "verify_moduli_states",
];

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| line_err(line, format!("invalid value `{value}` for `{key}`: {e}")))
}

fn parse_real(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = parse_value(line, key, value)?;
    if !v.is_finite() {
        return Err(line_err(line, format!("`{key}` must be finite, got `{value}`")));
    }
    Ok(v)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut seen: Vec<&str> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| line_err(line, format!("expected `key = value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let Some(&known) = KEYS.iter().find(|k| **k == key) else {
                return Err(line_err(line, format!("unknown key `{key}`")));
            };
            if seen.contains(&known) {
                return Err(line_err(line, format!("duplicate key `{key}`")));
            }
            seen.push(known);
            if value.is_empty() {
                return Err(line_err(line, format!("missing value for `{key}`")));
            }
            cfg.set(line, known, value)?;
        }
        Ok(cfg)
    }

    fn set(&mut self, line: usize, key: &str, value: &str) -> Result<(), ConfigError> {
        let real = |v| parse_real(line, key, v);
        match key {
            "kind" => {
                self.kind = value.parse().map_err(|e| line_err(line, format!("{e}")))?;
                if self.kind == SystemKind::GenericF {
                    return Err(line_err(
                        line,
                        "the generic kind needs an angular function and is library-only",
                    ));
                }
            }
            "kappa" => self.kappa = real(value)?,
            "g" => self.g = real(value)?,
            "k_a" => self.k_a = real(value)?,
            "k_b" => self.k_b = real(value)?,
            "m_num" => self.m_num = parse_value(line, key, value)?,
            "m_den" => self.m_den = parse_value(line, key, value)?,
            "r" => self.state.r = real(value)?,
            "phi" => self.state.phi = real(value)?,
            "p_r" => self.state.p_r = real(value)?,
            "p_phi" => self.state.p_phi = real(value)?,
            "t_end" => self.t_end = real(value)?,
            "rel_tol" => self.integrator.rel_tol = real(value)?,
            "abs_tol" => self.integrator.abs_tol = real(value)?,
            "max_step" => self.integrator.max_step = real(value)?,
            "singularity_margin" => self.integrator.singularity_margin = real(value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "invariant_columns" => self.invariant_columns = parse_value(line, key, value)?,
            "negative_control" => self.negative_control = parse_value(line, key, value)?,
            "verify_trajectories" => self.verify_trajectories = parse_value(line, key, value)?,
            "verify_bracket_states" => self.verify_bracket_states = parse_value(line, key, value)?,
            "verify_moduli_states" => self.verify_moduli_states = parse_value(line, key, value)?,
            _ => unreachable!("key list and setter disagree on `{key}`"),
        }
        Ok(())
    }

    /// Serialize every field. Floats use the shortest round-trip form, so
    /// `parse(to_config_string())` reproduces `self` exactly.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("kind", self.kind.name().to_string());
        put("kappa", format!("{:?}", self.kappa));
        put("g", format!("{:?}", self.g));
        put("k_a", format!("{:?}", self.k_a));
        put("k_b", format!("{:?}", self.k_b));
        put("m_num", self.m_num.to_string());
        put("m_den", self.m_den.to_string());
        put("r", format!("{:?}", self.state.r));
        put("phi", format!("{:?}", self.state.phi));
        put("p_r", format!("{:?}", self.state.p_r));
        put("p_phi", format!("{:?}", self.state.p_phi));
        put("t_end", format!("{:?}", self.t_end));
        put("rel_tol", format!("{:?}", self.integrator.rel_tol));
        put("abs_tol", format!("{:?}", self.integrator.abs_tol));
        put("max_step", format!("{:?}", self.integrator.max_step));
        put(
            "singularity_margin",
            format!("{:?}", self.integrator.singularity_margin),
        );
        if let Some(out) = &self.out {
            put("out", out.display().to_string());
        }
        put("invariant_columns", self.invariant_columns.to_string());
        put("negative_control", self.negative_control.to_string());
        put("verify_trajectories", self.verify_trajectories.to_string());
        put("verify_bracket_states", self.verify_bracket_states.to_string());
        put("verify_moduli_states", self.verify_moduli_states.to_string());
        s
    }

    pub fn spec(&self) -> Result<SystemSpec, ConfigError> {
        let invalid = |e: &dyn std::fmt::Display| ConfigError::Invalid(e.to_string());
        let kappa = Curvature::new(self.kappa).map_err(|e| invalid(&e))?;
        let spec = match self.kind {
            SystemKind::FreeGeodesic => Ok(SystemSpec::free(kappa)),
            SystemKind::Kepler => SystemSpec::kepler(kappa, self.g),
            SystemKind::Vc => SystemSpec::vc(kappa, self.g, self.k_a, self.k_b),
            SystemKind::Pw => {
                let m = AngularIndex::new(self.m_num, self.m_den).map_err(|e| invalid(&e))?;
                SystemSpec::pw(kappa, self.g, self.k_a, self.k_b, m)
            }
            SystemKind::GenericF => return Err(ConfigError::Invalid("the generic kind is library-only".into())),
        };
        spec.map_err(|e| invalid(&e))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.spec()?;
        self.integrator
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.t_end.is_nan() || self.t_end <= 0.0 {
            return Err(ConfigError::Invalid(format!("t_end = {} must be positive", self.t_end)));
        }
        Ok(())
    }

    pub fn suite_options(&self, seed: u64) -> SuiteOptions {
        SuiteOptions {
            t_end: self.t_end,
            integrator: self.integrator,
            trajectories: self.verify_trajectories,
            bracket_states: self.verify_bracket_states,
            moduli_states: self.verify_moduli_states,
            seed,
            negative_control: self.negative_control,
        }
    }
}
