use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use vortex_sheet::evolve::{InitialData, VerticalGrid};
use vortex_sheet::physics::ShearState;
use vortex_sheet::sobolev::IllposedParams;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum InitChoice {
    /// Analytic mode when a growing root exists, front bump otherwise.
    Auto,
    AnalyticMode,
    FrontBump,
}

/// Flags shared by every subcommand. Each one overrides the same key of the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Flat TOML file with any of the keys below (snake_case).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", env = "VSHEET_OUT_DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Mach number v/c of the upper stream.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mach: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sound_speed: Option<f64>,
    /// Mach floor used by the lower bounds.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub eps0: Option<f64>,
    /// Tangential frequency.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub eta: Option<f64>,
    #[arg(long, global = true)]
    pub band_min: Option<u32>,
    #[arg(long, global = true)]
    pub band_max: Option<u32>,
    /// Regularity of the initial norm.
    #[arg(long, global = true)]
    pub j: Option<u32>,
    /// Regularity of the later norm.
    #[arg(long, global = true)]
    pub k: Option<u32>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Grid points per side.
    #[arg(long, global = true)]
    pub grid_n: Option<usize>,
    /// Half-width of the vertical domain (default 40/|eta|).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid_l: Option<f64>,
    /// Time step (default: the stability limit).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub dt: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t_end: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub init: Option<InitChoice>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mach_min: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mach_max: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mach_step: Option<f64>,
    /// Normalisation constant of the band spectra.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub norm_constant: Option<f64>,
    /// Angle in degrees between wave vector and shear; the effective shear is v cos(angle).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub oblique_angle: Option<f64>,
}

/// Contents of the config file; every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub out_dir: Option<PathBuf>,
    pub format: Option<Format>,
    pub mach: Option<f64>,
    pub sound_speed: Option<f64>,
    pub eps0: Option<f64>,
    pub eta: Option<f64>,
    pub band_min: Option<u32>,
    pub band_max: Option<u32>,
    pub j: Option<u32>,
    pub k: Option<u32>,
    pub t0: Option<f64>,
    pub alpha: Option<f64>,
    pub grid_n: Option<usize>,
    pub grid_l: Option<f64>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub init: Option<InitChoice>,
    pub mach_min: Option<f64>,
    pub mach_max: Option<f64>,
    pub mach_step: Option<f64>,
    pub norm_constant: Option<f64>,
    pub oblique_angle: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
    }
}

/// Fully resolved and validated run configuration.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub out_dir: PathBuf,
    pub format: Format,
    pub mach: f64,
    pub sound_speed: f64,
    pub eps0: f64,
    pub eta: f64,
    pub band_min: u32,
    pub band_max: u32,
    pub j: u32,
    pub k: u32,
    pub t0: f64,
    pub alpha: f64,
    pub norm_constant: f64,
    pub grid_n: usize,
    pub grid_l: f64,
    pub dt: Option<f64>,
    pub t_end: f64,
    pub init: InitChoice,
    pub mach_min: f64,
    pub mach_max: f64,
    pub mach_step: f64,
    pub oblique_angle: f64,
}

fn field(name: &str, ok: bool, value: impl std::fmt::Display, rule: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Validation(format!("invalid {name} = {value}: {rule}")))
    }
}

impl RunConfig {
    pub fn resolve(flags: &Overrides) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let eta = flags.eta.or(file.eta).unwrap_or(1.0);
        let config = Self {
            out_dir: flags.out.clone().or(file.out_dir).unwrap_or_else(|| PathBuf::from("out")),
            format: flags.format.or(file.format).unwrap_or(Format::Csv),
            mach: flags.mach.or(file.mach).unwrap_or(1.0),
            sound_speed: flags.sound_speed.or(file.sound_speed).unwrap_or(1.0),
            eps0: flags.eps0.or(file.eps0).unwrap_or(0.1),
            eta,
            band_min: flags.band_min.or(file.band_min).unwrap_or(1),
            band_max: flags.band_max.or(file.band_max).unwrap_or(64),
            j: flags.j.or(file.j).unwrap_or(3),
            k: flags.k.or(file.k).unwrap_or(3),
            t0: flags.t0.or(file.t0).unwrap_or(1.0),
            alpha: flags.alpha.or(file.alpha).unwrap_or(2.0),
            norm_constant: flags.norm_constant.or(file.norm_constant).unwrap_or(1.0),
            grid_n: flags.grid_n.or(file.grid_n).unwrap_or(2048),
            grid_l: flags.grid_l.or(file.grid_l).unwrap_or(40.0 / eta.abs()),
            dt: flags.dt.or(file.dt),
            t_end: flags.t_end.or(file.t_end).unwrap_or(5.0),
            init: flags.init.or(file.init).unwrap_or(InitChoice::Auto),
            mach_min: flags.mach_min.or(file.mach_min).unwrap_or(0.1),
            mach_max: flags.mach_max.or(file.mach_max).unwrap_or(2.0),
            mach_step: flags.mach_step.or(file.mach_step).unwrap_or(0.01),
            oblique_angle: flags.oblique_angle.or(file.oblique_angle).unwrap_or(0.0),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        let positive = "must be finite and > 0";
        field("sound_speed", self.sound_speed.is_finite() && self.sound_speed > 0.0, self.sound_speed, positive)?;
        field("mach", self.mach.is_finite() && self.mach >= 0.0, self.mach, "must be finite and >= 0")?;
        field("eps0", self.eps0.is_finite() && self.eps0 > 0.0, self.eps0, positive)?;
        field("eta", self.eta.is_finite() && self.eta != 0.0, self.eta, "must be finite and non-zero")?;
        field("band_min", self.band_min >= 1, self.band_min, "must be >= 1")?;
        field("band_max", self.band_max >= self.band_min, self.band_max, "must be >= band_min")?;
        field("t_end", self.t_end.is_finite() && self.t_end > 0.0, self.t_end, positive)?;
        field("grid_l", self.grid_l.is_finite() && self.grid_l > 0.0, self.grid_l, positive)?;
        field("grid_n", self.grid_n >= 64, self.grid_n, "must be >= 64")?;
        if let Some(dt) = self.dt {
            field("dt", dt.is_finite() && dt > 0.0, dt, positive)?;
        }
        field("mach_min", self.mach_min.is_finite() && self.mach_min >= 0.0, self.mach_min, "must be >= 0")?;
        field("mach_max", self.mach_max.is_finite() && self.mach_max >= self.mach_min, self.mach_max, "must be >= mach_min")?;
        field("mach_step", self.mach_step.is_finite() && self.mach_step > 0.0, self.mach_step, positive)?;
        field(
            "mach_step",
            (self.mach_max - self.mach_min) / self.mach_step <= 1e6,
            self.mach_step,
            "sweep would exceed 10^6 rows",
        )?;
        field(
            "oblique_angle",
            self.oblique_angle.is_finite() && self.oblique_angle.abs() < 90.0,
            self.oblique_angle,
            "must lie in (-90, 90) degrees",
        )?;
        self.illposed_params()
            .validate()
            .map_err(|e| CliError::Validation(e.to_string()))?;
        self.state()?;
        Ok(())
    }

    /// Shear speed seen by the tangential mode.
    fn effective_shear(&self, mach: f64) -> f64 {
        mach * self.sound_speed * self.oblique_angle.to_radians().cos()
    }

    pub fn state(&self) -> Result<ShearState, CliError> {
        self.state_at(self.mach)
    }

    pub fn state_at(&self, mach: f64) -> Result<ShearState, CliError> {
        ShearState::new(self.sound_speed, self.effective_shear(mach), 1.0, self.eps0)
            .map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn illposed_params(&self) -> IllposedParams {
        IllposedParams {
            j: self.j,
            k: self.k,
            t0: self.t0,
            alpha: self.alpha,
            norm_constant: self.norm_constant,
        }
    }

    pub fn bands(&self) -> Vec<u32> {
        (self.band_min..=self.band_max).collect()
    }

    pub fn grid(&self) -> Result<VerticalGrid, CliError> {
        VerticalGrid::new(self.grid_l, self.grid_n).map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn machs(&self) -> Vec<f64> {
        let count = ((self.mach_max - self.mach_min) / self.mach_step + 1e-9).floor() as usize;
        // rounded so that 0.1 + 130 * 0.01 prints as 1.4
        (0..=count)
            .map(|i| ((self.mach_min + i as f64 * self.mach_step) * 1e12).round() / 1e12)
            .collect()
    }

    pub fn initial_data(&self, state: &ShearState) -> InitialData {
        match self.init {
            InitChoice::AnalyticMode => InitialData::AnalyticMode,
            InitChoice::FrontBump => InitialData::FrontBump,
            InitChoice::Auto => {
                if state.require_growing().is_ok() {
                    InitialData::AnalyticMode
                } else {
                    InitialData::FrontBump
                }
            }
        }
    }
}
