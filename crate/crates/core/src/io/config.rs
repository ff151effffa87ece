use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fock::{FockParams, DEFAULT_BUFFER, DEFAULT_N_FOCK};
use crate::model::{AtomSchedule, CouplingSchedule, Schedule};
use crate::spectral::{linear_grid, SweepKind, DEFAULT_DEGENERACY_TOL};

pub const DEFAULT_OMEGA: f64 = 6.2832;
pub const DEFAULT_K_LEVELS: usize = 7;
pub const DEFAULT_SWEEP_POINTS: usize = 51;
pub const DEFAULT_TOL_ALGEBRA: f64 = 1e-10;
pub const DEFAULT_TOL_CONVERGENCE: f64 = 1e-6;
/// Coupling sweeps stop at this multiple of `omega` unless told otherwise.
pub const DEFAULT_G_STOP_FACTOR: f64 = 5.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
pub enum SweepVariable {
    #[default]
    #[serde(rename = "r")]
    R,
    #[serde(rename = "g")]
    G,
}

impl SweepVariable {
    pub fn kind(self) -> SweepKind {
        match self {
            SweepVariable::R => SweepKind::RSweep,
            SweepVariable::G => SweepKind::GSweep,
        }
    }
}

impl std::str::FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "r" => Ok(SweepVariable::R),
            "g" => Ok(SweepVariable::G),
            other => Err(Error::Config(format!(
                "sweep.kind: unknown sweep `{other}` (expected `r` or `g`)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub kind: SweepVariable,
    pub start: f64,
    /// `1` for `r` sweeps and `5 ω` for `g` sweeps when absent.
    pub stop: Option<f64>,
    pub points: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            kind: SweepVariable::R,
            start: 0.0,
            stop: None,
            points: DEFAULT_SWEEP_POINTS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub omega: f64,
    pub g_max: f64,
    pub c: f64,
    pub omega_a_schedule: String,
    pub g_schedule: String,
    pub n_fock: usize,
    pub buffer: usize,
    pub sweep: SweepConfig,
    pub k_levels: usize,
    pub tol_degeneracy: f64,
    pub tol_algebra: f64,
    pub tol_convergence: f64,
    pub out_csv: Option<PathBuf>,
    pub out_svg: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            omega: DEFAULT_OMEGA,
            g_max: DEFAULT_OMEGA,
            c: 0.0,
            omega_a_schedule: AtomSchedule::Linear.name().into(),
            g_schedule: CouplingSchedule::Linear.name().into(),
            n_fock: DEFAULT_N_FOCK,
            buffer: DEFAULT_BUFFER,
            sweep: SweepConfig::default(),
            k_levels: DEFAULT_K_LEVELS,
            tol_degeneracy: DEFAULT_DEGENERACY_TOL,
            tol_algebra: DEFAULT_TOL_ALGEBRA,
            tol_convergence: DEFAULT_TOL_CONVERGENCE,
            out_csv: None,
            out_svg: None,
        }
    }
}

/// Parses and validates a JSON configuration object.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    if !text.trim_start().starts_with('{') {
        return Err(config_err("configuration must be a JSON object"));
    }
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            Error::Config(e.into_inner().to_string())
        } else {
            Error::Config(format!("{path}: {}", e.into_inner()))
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let reals = [
            ("omega", self.omega),
            ("g_max", self.g_max),
            ("c", self.c),
            ("sweep.start", self.sweep.start),
            ("tol_degeneracy", self.tol_degeneracy),
            ("tol_algebra", self.tol_algebra),
            ("tol_convergence", self.tol_convergence),
        ];
        for (name, v) in reals {
            if !v.is_finite() {
                return Err(config_err(format!("{name}: must be finite")));
            }
        }
        if let Some(stop) = self.sweep.stop {
            if !stop.is_finite() {
                return Err(config_err("sweep.stop: must be finite"));
            }
        }
        if self.omega <= 0.0 {
            return Err(config_err("omega: must be positive"));
        }
        if self.g_max < 0.0 {
            return Err(config_err("g_max: must be non-negative"));
        }
        if self.c < 0.0 {
            return Err(config_err("c: must be non-negative"));
        }
        for (name, v) in [
            ("tol_degeneracy", self.tol_degeneracy),
            ("tol_algebra", self.tol_algebra),
            ("tol_convergence", self.tol_convergence),
        ] {
            if v <= 0.0 {
                return Err(config_err(format!("{name}: must be positive")));
            }
        }
        if self.sweep.points < 2 {
            return Err(config_err("sweep.points: at least 2 points are required"));
        }
        if self.k_levels == 0 {
            return Err(config_err("k_levels: must be at least 1"));
        }
        let fp = self
            .fock()
            .map_err(|e| config_err(format!("n_fock/buffer: {e}")))?;
        if self.k_levels > fp.total_dim() {
            return Err(config_err(format!(
                "k_levels: {} exceeds the state-space dimension {}",
                self.k_levels,
                fp.total_dim()
            )));
        }
        self.schedule()
            .map_err(|e| config_err(format!("schedule: {e}")))?;
        let (start, stop) = (self.sweep.start, self.sweep_stop());
        if start >= stop {
            return Err(config_err(format!(
                "sweep: start {start} must be below stop {stop}"
            )));
        }
        match self.sweep.kind {
            SweepVariable::R if start < 0.0 || stop > 1.0 => {
                return Err(config_err("sweep: r must lie in [0, 1]"));
            }
            SweepVariable::G if start < 0.0 => {
                return Err(config_err("sweep: g must be non-negative"));
            }
            _ => {}
        }
        for (name, p) in [("out_csv", &self.out_csv), ("out_svg", &self.out_svg)] {
            if p.as_ref().is_some_and(|p| p.as_os_str().is_empty()) {
                return Err(config_err(format!("{name}: path must not be empty")));
            }
        }
        Ok(())
    }

    pub fn fock(&self) -> Result<FockParams> {
        FockParams::new(self.n_fock, self.buffer)
    }

    pub fn schedule(&self) -> Result<Schedule> {
        Schedule::with_forms(
            self.omega,
            self.g_max,
            self.c,
            self.omega_a_schedule.parse()?,
            self.g_schedule.parse()?,
        )
    }

    pub fn sweep_stop(&self) -> f64 {
        self.sweep.stop.unwrap_or(match self.sweep.kind {
            SweepVariable::R => 1.0,
            SweepVariable::G => DEFAULT_G_STOP_FACTOR * self.omega,
        })
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        linear_grid(self.sweep.start, self.sweep_stop(), self.sweep.points)
    }
}
