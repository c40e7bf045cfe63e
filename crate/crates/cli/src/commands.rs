use std::path::PathBuf;

use serde::Serialize;
use vortex_sheet::evolve::{linearized_solve, InitialData};
use vortex_sheet::modes::{build_mode, mode_residual, ExpProfile, LinearMode, ModeResidual};
use vortex_sheet::physics::{MachClass, ShearState};
use vortex_sheet::sobolev::{illposedness_table, IllposednessTable};
use vortex_sheet::symbol::{cartesian_root_data, root_atlas, velocity_coef_bounds, CartesianRootData, RootAtlas, VelocityCoefBounds};
use vortex_sheet::Complex64;

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::output::{fmt_f64, fmt_opt, write_csv, write_json};

pub const ATLAS_HEADER: [&str; 10] = [
    "M", "X1sq", "X1", "X2sq", "Y2", "a_over_eta2", "ratioSq", "coefLower", "coefValue", "coefUpper",
];

/// One row of the root atlas; the last five columns exist only with a growing root.
#[derive(Debug, Clone, Serialize)]
pub struct AtlasRow {
    #[serde(rename = "M")]
    pub mach: f64,
    #[serde(rename = "X1sq")]
    pub x1_sq: f64,
    #[serde(rename = "X1")]
    pub x1: Option<f64>,
    #[serde(rename = "X2sq")]
    pub x2_sq: f64,
    #[serde(rename = "Y2")]
    pub y2: f64,
    pub a_over_eta2: Option<f64>,
    #[serde(rename = "ratioSq")]
    pub ratio_sq: Option<f64>,
    #[serde(rename = "coefLower")]
    pub coef_lower: Option<f64>,
    #[serde(rename = "coefValue")]
    pub coef_value: Option<f64>,
    #[serde(rename = "coefUpper")]
    pub coef_upper: Option<f64>,
}

impl AtlasRow {
    fn new(mach: f64, state: &ShearState) -> Self {
        let atlas = root_atlas(state);
        let cart = cartesian_root_data(state, 1.0).ok();
        let coef = velocity_coef_bounds(state).ok();
        Self {
            mach,
            x1_sq: atlas.x1_sq,
            x1: atlas.growth_slope,
            x2_sq: atlas.x2_sq,
            y2: atlas.y2,
            a_over_eta2: cart.map(|c| c.a),
            ratio_sq: cart.map(|c| c.ratio_sq),
            coef_lower: coef.map(|b| b.lower),
            coef_value: coef.map(|b| b.value),
            coef_upper: coef.map(|b| b.upper),
        }
    }

    fn cells(&self) -> Vec<String> {
        vec![
            fmt_f64(self.mach),
            fmt_f64(self.x1_sq),
            fmt_opt(self.x1),
            fmt_f64(self.x2_sq),
            fmt_f64(self.y2),
            fmt_opt(self.a_over_eta2),
            fmt_opt(self.ratio_sq),
            fmt_opt(self.coef_lower),
            fmt_opt(self.coef_value),
            fmt_opt(self.coef_upper),
        ]
    }
}

pub fn atlas_rows(config: &RunConfig) -> Result<Vec<AtlasRow>, CliError> {
    config
        .machs()
        .into_iter()
        .map(|m| Ok(AtlasRow::new(m, &config.state_at(m)?)))
        .collect()
}

pub fn stability_map(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let rows = atlas_rows(config)?;
    let path = match config.format {
        Format::Csv => {
            let cells: Vec<_> = rows.iter().map(AtlasRow::cells).collect();
            write_csv(&config.out_dir, "stability_map.csv", &ATLAS_HEADER, &cells)?
        }
        Format::Json => write_json(&config.out_dir, "stability_map.json", &rows)?,
    };
    Ok(vec![path])
}

#[derive(Serialize)]
struct RootsReport {
    sound_speed: f64,
    shear_velocity: f64,
    mach: f64,
    mach_floor: f64,
    mach_class: MachClass,
    atlas: RootAtlas,
    cartesian: Option<CartesianRootData>,
    coefficient_bounds: Option<VelocityCoefBounds>,
}

pub fn roots(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let state = config.state()?;
    let path = match config.format {
        Format::Csv => {
            let row = AtlasRow::new(config.mach, &state);
            write_csv(&config.out_dir, "roots.csv", &ATLAS_HEADER, &[row.cells()])?
        }
        Format::Json => {
            let report = RootsReport {
                sound_speed: state.sound_speed(),
                shear_velocity: state.shear_velocity(),
                mach: state.mach(),
                mach_floor: state.mach_floor(),
                mach_class: state.mach_class(),
                atlas: root_atlas(&state),
                cartesian: cartesian_root_data(&state, config.eta.abs()).ok(),
                coefficient_bounds: velocity_coef_bounds(&state).ok(),
            };
            write_json(&config.out_dir, "roots.json", &report)?
        }
    };
    Ok(vec![path])
}

#[derive(Serialize)]
struct Profile {
    amplitude: Complex64,
    decay_rate: Complex64,
}

impl From<&ExpProfile> for Profile {
    fn from(p: &ExpProfile) -> Self {
        Self {
            amplitude: p.amplitude,
            decay_rate: p.decay_rate,
        }
    }
}

#[derive(Serialize)]
struct Sides {
    upper: Profile,
    lower: Profile,
}

#[derive(Serialize)]
struct Amplitudes {
    front: Complex64,
    pressure: Sides,
    v1: Sides,
    v2: Sides,
}

#[derive(Serialize)]
struct ModeReport {
    eta: f64,
    tau: Complex64,
    #[serde(rename = "X1")]
    x1: f64,
    mu_plus: Complex64,
    mu_minus: Complex64,
    amplitudes: Amplitudes,
    residual: ModeResidual,
    max_residual: f64,
}

/// Growing mode at the configured `eta`; negative `eta` gives the conjugate mode.
pub fn growing_mode(state: &ShearState, eta: f64) -> Result<LinearMode, CliError> {
    let mode = build_mode(state, eta.abs(), Complex64::new(1.0, 0.0))?;
    Ok(if eta < 0.0 { mode.conjugate() } else { mode })
}

pub fn mode(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let state = config.state()?;
    state.require_growing()?;
    let mode = growing_mode(&state, config.eta)?;
    let residual = mode_residual(&state, &mode);
    let sides = |u: &ExpProfile, l: &ExpProfile| Sides {
        upper: u.into(),
        lower: l.into(),
    };
    let report = ModeReport {
        eta: mode.eta,
        tau: mode.tau,
        x1: mode.tau.re / mode.eta.abs(),
        mu_plus: mode.roots.mu_plus,
        mu_minus: mode.roots.mu_minus,
        amplitudes: Amplitudes {
            front: mode.front_amp,
            pressure: sides(&mode.pressure_upper, &mode.pressure_lower),
            v1: sides(&mode.v1_upper, &mode.v1_lower),
            v2: sides(&mode.v2_upper, &mode.v2_lower),
        },
        residual,
        max_residual: residual.max(),
    };
    Ok(vec![write_json(&config.out_dir, "mode.json", &report)?])
}

pub const ILLPOSED_HEADER: [&str; 6] = [
    "n",
    "log_norm_initial_Hj",
    "log_norm_later_Hk",
    "lower_bound_log",
    "ratio_log",
    "threshold_flag",
];

pub fn illposed_table(config: &RunConfig) -> Result<IllposednessTable, CliError> {
    let state = config.state()?;
    state.require_growing()?;
    Ok(illposedness_table(&state, &config.illposed_params(), &config.bands())?)
}

#[derive(Serialize)]
struct IllposedSummary<'a> {
    mach: f64,
    growth_slope: f64,
    params: vortex_sheet::sobolev::IllposedParams,
    thresholds: vortex_sheet::sobolev::Thresholds,
    first_exceeding: Option<u32>,
    warnings: &'a [String],
}

pub fn illposed(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let table = illposed_table(config)?;
    for w in &table.warnings {
        eprintln!("warning: {w}");
    }
    match config.format {
        Format::Json => Ok(vec![write_json(&config.out_dir, "illposed.json", &table)?]),
        Format::Csv => {
            let rows: Vec<Vec<String>> = table
                .reports
                .iter()
                .map(|r| {
                    vec![
                        r.band_index.to_string(),
                        fmt_f64(r.log_norm_initial_hj),
                        fmt_f64(r.log_norm_later_hk),
                        fmt_f64(r.lower_bound_log_hk),
                        fmt_f64(r.ratio_log),
                        r.exceeds_alpha.to_string(),
                    ]
                })
                .collect();
            let csv = write_csv(&config.out_dir, "illposed.csv", &ILLPOSED_HEADER, &rows)?;
            let summary = IllposedSummary {
                mach: config.mach,
                growth_slope: table.growth_slope,
                params: table.params,
                thresholds: table.thresholds,
                first_exceeding: table.first_exceeding,
                warnings: &table.warnings,
            };
            let json = write_json(&config.out_dir, "illposed_summary.json", &summary)?;
            Ok(vec![csv, json])
        }
    }
}

#[derive(Serialize)]
struct GridInfo {
    half_width: f64,
    points_per_side: usize,
    spacing: f64,
    resolution_product: f64,
    resolved: bool,
}

#[derive(Serialize)]
struct EvolveSummary {
    mach: f64,
    eta: f64,
    init: InitialData,
    fitted_slope: f64,
    r_squared: f64,
    analytic_rate: Option<f64>,
    relative_error: Option<f64>,
    max_energy_residual: f64,
    dt: f64,
    steps: usize,
    t_end: f64,
    grid: GridInfo,
    far_field_ratio: f64,
    far_field_contaminated: bool,
}

#[derive(Serialize)]
struct EvolveJson<'a> {
    summary: EvolveSummary,
    samples: &'a [vortex_sheet::evolve::EvolutionSample],
}

pub const EVOLVE_HEADER: [&str; 5] = ["time", "log_norm", "front_re", "front_im", "energy_residual"];

pub fn evolve(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let state = config.state()?;
    let grid = config.grid()?;
    let dt = config.dt.unwrap_or_else(|| grid.max_step(&state));
    let init = config.initial_data(&state);
    let run = linearized_solve(&state, config.eta, grid, dt, config.t_end, init)?;
    let fit = run.fit()?;
    if run.far_field_contaminated {
        eprintln!(
            "warning: far-field amplitude ratio {:.3e} exceeds tolerance; enlarge the domain",
            run.far_field_ratio
        );
    }
    let summary = EvolveSummary {
        mach: config.mach,
        eta: run.eta,
        init: run.init,
        fitted_slope: fit.slope,
        r_squared: fit.r_squared,
        analytic_rate: run.analytic_rate,
        relative_error: run.analytic_rate.map(|r| (fit.slope - r).abs() / r),
        max_energy_residual: run.max_energy_residual(),
        dt: run.dt,
        steps: run.steps,
        t_end: config.t_end,
        grid: GridInfo {
            half_width: run.grid.half_width(),
            points_per_side: run.grid.points_per_side(),
            spacing: run.grid.spacing(),
            resolution_product: run.resolution_product,
            resolved: run.resolved,
        },
        far_field_ratio: run.far_field_ratio,
        far_field_contaminated: run.far_field_contaminated,
    };
    match config.format {
        Format::Json => {
            let doc = EvolveJson {
                summary,
                samples: &run.samples,
            };
            Ok(vec![write_json(&config.out_dir, "evolve.json", &doc)?])
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = run
                .samples
                .iter()
                .map(|s| {
                    vec![
                        fmt_f64(s.time),
                        fmt_f64(s.log_norm),
                        fmt_f64(s.front.re),
                        fmt_f64(s.front.im),
                        fmt_f64(s.energy_residual),
                    ]
                })
                .collect();
            let csv = write_csv(&config.out_dir, "evolve.csv", &EVOLVE_HEADER, &rows)?;
            let json = write_json(&config.out_dir, "evolve_summary.json", &summary)?;
            Ok(vec![csv, json])
        }
    }
}
