//! Run configuration as flat `key=value` text.
//!
//! Lines starting with `#` are comments. Every key is listed in
//! [`RunConfig::entries`], which is also what the run manifest contains, so
//! a manifest can be fed back with `--config`.

use std::path::Path;

use crate::channel::ChannelParams;
use crate::drive::DriveSignal;
use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::grid::{build_reference_grid, build_scaled_grid, CompartmentGrid, GridCounts};
use crate::noise::{log_omegas, NoiseOptions};
use crate::solver::{DriveMode, SolveSettings};
use crate::units::{DimensionlessSystem, ScalingBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridChoice {
    /// The 480-compartment grid with the listed widths.
    Reference,
    /// Same layout rescaled to the system's `d` and `δ`.
    Scaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    Potentiostatic,
    Galvanostatic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseConfig {
    pub d_a: f64,
    pub c_bulk: f64,
    pub relative_permittivity: f64,
    pub temperature: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    pub options: NoiseOptions,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            d_a: 2e-9,
            c_bulk: 100.0,
            relative_permittivity: 2.0,
            temperature: 298.15,
            omega_min: 1e-4,
            omega_max: 1e3,
            points: 71,
            options: NoiseOptions::default(),
        }
    }
}

impl NoiseConfig {
    pub fn basis(&self) -> Result<ScalingBasis> {
        ScalingBasis::from_relative_permittivity(self.d_a, self.c_bulk, self.relative_permittivity, self.temperature)
    }

    /// `0` followed by log-spaced frequencies.
    pub fn omegas(&self) -> Result<Vec<f64>> {
        let mut out = vec![0.0];
        out.extend(log_omegas(self.omega_min, self.omega_max, self.points)?);
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub system: DimensionlessSystem,
    pub grid: GridChoice,
    pub mode: ModeKind,
    pub drive: DriveSignal,
    pub tau_end: f64,
    /// Drive amplitudes for sweep scenarios.
    pub sweep: Vec<f64>,
    pub settings: SolveSettings,
    pub channel: ChannelParams,
    pub channel_segments: usize,
    pub channel_length: f64,
    pub noise: NoiseConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            system: DimensionlessSystem::default(),
            grid: GridChoice::Reference,
            mode: ModeKind::Potentiostatic,
            drive: DriveSignal::step(5.0),
            tau_end: 100.0,
            sweep: vec![1.0, 3.0, 5.0, 7.0],
            settings: SolveSettings::default(),
            channel: ChannelParams::default(),
            channel_segments: 1,
            channel_length: 0.0,
            noise: NoiseConfig::default(),
        }
    }
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(",")
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("`{key}`: expected a number, got `{v}`")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("`{key}`: expected a count, got `{v}`")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|x| parse_f64(key, x)).collect()
}

fn parse_auto(key: &str, v: &str) -> Result<Option<f64>> {
    if v.trim() == "auto" {
        Ok(None)
    } else {
        parse_f64(key, v).map(Some)
    }
}

fn auto(v: Option<f64>) -> String {
    v.map_or_else(|| "auto".to_string(), fmt_f64)
}

impl RunConfig {
    /// Sets one key. Unknown keys are a parse error.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        let v = value.trim();
        let f = |v: &str| parse_f64(key, v);
        match key {
            "system.X" => self.system.fixed_charge = f(v)?,
            "system.z" => {
                self.system.valences = v
                    .split(',')
                    .map(|x| {
                        x.trim()
                            .parse()
                            .map_err(|_| Error::Parse(format!("`{key}`: bad valence `{x}`")))
                    })
                    .collect::<Result<_>>()?
            }
            "system.D_s" => self.system.diffusion_solution = parse_list(key, v)?,
            "system.D_m" => self.system.diffusion_membrane = parse_list(key, v)?,
            "system.d" => self.system.membrane_thickness = f(v)?,
            "system.delta" => self.system.layer_width = f(v)?,
            "system.c0" => self.system.bulk_concentration = f(v)?,
            "system.eps" => self.system.permittivity = f(v)?,
            "grid" => {
                self.grid = match v {
                    "reference" => GridChoice::Reference,
                    "scaled" => GridChoice::Scaled,
                    _ => return Err(Error::Parse(format!("`grid`: expected reference or scaled, got `{v}`"))),
                }
            }
            "mode" => {
                self.mode = match v {
                    "potentiostatic" => ModeKind::Potentiostatic,
                    "galvanostatic" => ModeKind::Galvanostatic,
                    _ => {
                        return Err(Error::Parse(format!(
                            "`mode`: expected potentiostatic or galvanostatic, got `{v}`"
                        )))
                    }
                }
            }
            "drive" => self.drive = v.parse()?,
            "tau_end" => self.tau_end = f(v)?,
            "sweep" => self.sweep = parse_list(key, v)?,
            "solver.newton_tol" => self.settings.newton_tol = f(v)?,
            "solver.max_newton_iters" => self.settings.max_newton_iters = parse_usize(key, v)?,
            "solver.dt_init" => self.settings.dt_init = f(v)?,
            "solver.dt_min" => self.settings.dt_min = f(v)?,
            "solver.dt_max" => self.settings.dt_max = f(v)?,
            "solver.adapt_factor" => self.settings.adapt_factor = f(v)?,
            "solver.series_dt" => self.settings.series_dt = f(v)?,
            "solver.output_times" => self.settings.output_times = parse_list(key, v)?,
            "channel.D" => self.channel.diffusion = f(v)?,
            "channel.u" => self.channel.velocity = f(v)?,
            "channel.y_obs" => self.channel.y_obs = f(v)?,
            "channel.segments" => self.channel_segments = parse_usize(key, v)?,
            "channel.length" => self.channel_length = f(v)?,
            "noise.D_a" => self.noise.d_a = f(v)?,
            "noise.c_bulk" => self.noise.c_bulk = f(v)?,
            "noise.eps_r" => self.noise.relative_permittivity = f(v)?,
            "noise.temperature" => self.noise.temperature = f(v)?,
            "noise.thermal_model" => self.noise.options.thermal_model = v.parse()?,
            "noise.bandwidth" => self.noise.options.bandwidth = parse_auto(key, v)?,
            "noise.v0" => self.noise.options.v0 = parse_auto(key, v)?,
            "noise.dc_coefficient" => self.noise.options.dc_coefficient = f(v)?,
            "noise.omega_min" => self.noise.omega_min = f(v)?,
            "noise.omega_max" => self.noise.omega_max = f(v)?,
            "noise.points" => self.noise.points = parse_usize(key, v)?,
            _ => return Err(Error::Parse(format!("unknown configuration key `{key}`"))),
        }
        Ok(())
    }

    /// Applies a `key=value` assignment.
    pub fn apply(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got `{assignment}`")))?;
        self.set(k, v)
    }

    /// Applies every assignment in a config text.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            self.apply(line)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        self.apply_text(&std::fs::read_to_string(path)?)
    }

    /// Every effective parameter, in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let s = &self.system;
        let st = &self.settings;
        let n = &self.noise;
        vec![
            ("system.X", fmt_f64(s.fixed_charge)),
            (
                "system.z",
                s.valences.iter().map(|z| z.to_string()).collect::<Vec<_>>().join(","),
            ),
            ("system.D_s", list(&s.diffusion_solution)),
            ("system.D_m", list(&s.diffusion_membrane)),
            ("system.d", fmt_f64(s.membrane_thickness)),
            ("system.delta", fmt_f64(s.layer_width)),
            ("system.c0", fmt_f64(s.bulk_concentration)),
            ("system.eps", fmt_f64(s.permittivity)),
            (
                "grid",
                match self.grid {
                    GridChoice::Reference => "reference",
                    GridChoice::Scaled => "scaled",
                }
                .to_string(),
            ),
            (
                "mode",
                match self.mode {
                    ModeKind::Potentiostatic => "potentiostatic",
                    ModeKind::Galvanostatic => "galvanostatic",
                }
                .to_string(),
            ),
            ("drive", self.drive.to_string()),
            ("tau_end", fmt_f64(self.tau_end)),
            ("sweep", list(&self.sweep)),
            ("solver.newton_tol", fmt_f64(st.newton_tol)),
            ("solver.max_newton_iters", st.max_newton_iters.to_string()),
            ("solver.dt_init", fmt_f64(st.dt_init)),
            ("solver.dt_min", fmt_f64(st.dt_min)),
            ("solver.dt_max", fmt_f64(st.dt_max)),
            ("solver.adapt_factor", fmt_f64(st.adapt_factor)),
            ("solver.series_dt", fmt_f64(st.series_dt)),
            ("solver.output_times", list(&st.output_times)),
            ("channel.D", fmt_f64(self.channel.diffusion)),
            ("channel.u", fmt_f64(self.channel.velocity)),
            ("channel.y_obs", fmt_f64(self.channel.y_obs)),
            ("channel.segments", self.channel_segments.to_string()),
            ("channel.length", fmt_f64(self.channel_length)),
            ("noise.D_a", fmt_f64(n.d_a)),
            ("noise.c_bulk", fmt_f64(n.c_bulk)),
            ("noise.eps_r", fmt_f64(n.relative_permittivity)),
            ("noise.temperature", fmt_f64(n.temperature)),
            ("noise.thermal_model", n.options.thermal_model.name().to_string()),
            ("noise.bandwidth", auto(n.options.bandwidth)),
            ("noise.v0", auto(n.options.v0)),
            ("noise.dc_coefficient", fmt_f64(n.options.dc_coefficient)),
            ("noise.omega_min", fmt_f64(n.omega_min)),
            ("noise.omega_max", fmt_f64(n.omega_max)),
            ("noise.points", n.points.to_string()),
        ]
    }

    /// Manifest text: a comment naming the scenario, then every entry.
    pub fn manifest(&self, scenario: &str) -> String {
        let mut out = format!("# scenario {scenario}\n");
        for (k, v) in self.entries() {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        self.settings.validate()?;
        self.drive.validate()?;
        if !(self.tau_end > 0.0) {
            return Err(Error::invalid("tau_end", "must be positive"));
        }
        self.channel_params()?;
        self.noise.basis()?;
        self.noise.omegas()?;
        Ok(())
    }

    pub fn build_grid(&self) -> Result<CompartmentGrid> {
        match self.grid {
            GridChoice::Reference => Ok(build_reference_grid()),
            GridChoice::Scaled => build_scaled_grid(
                self.system.membrane_thickness,
                self.system.layer_width,
                GridCounts::default(),
            ),
        }
    }

    pub fn drive_mode(&self, signal: DriveSignal) -> DriveMode {
        match self.mode {
            ModeKind::Potentiostatic => DriveMode::Potentiostatic(signal),
            ModeKind::Galvanostatic => DriveMode::Galvanostatic(signal),
        }
    }

    pub fn channel_params(&self) -> Result<ChannelParams> {
        let ch = self
            .channel
            .clone()
            .with_line_source(self.channel_segments, self.channel_length)?;
        ch.validate()?;
        Ok(ch)
    }
}
