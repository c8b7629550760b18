//! Named figure scenarios and their CSV outputs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::channel::line_source_waveform;
use crate::config::{ModeKind, RunConfig};
use crate::drive::DriveSignal;
use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::noise::{noise_chain, NoiseChain};
use crate::solver::{BoundaryControl, MembraneModel, Simulation, StateVector};

pub const SCENARIOS: [&str; 9] = [
    "equilibrium",
    "fig3",
    "fig5",
    "fig6",
    "fig7",
    "fig8",
    "fig9",
    "fig10",
    "custom",
];

fn unknown(name: &str) -> Error {
    Error::UnknownScenario {
        name: name.to_string(),
        valid: SCENARIOS.join(", "),
    }
}

/// Default configuration of a scenario, before user overrides.
pub fn preset(name: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    match name {
        "equilibrium" | "custom" => {}
        "fig3" => {
            cfg.tau_end = 60.0;
            cfg.settings.output_times = vec![1.0, 60.0];
        }
        "fig5" => {}
        "fig6" => {
            cfg.drive = DriveSignal::square(5.0, 40.0, 0.5)?;
            cfg.tau_end = 120.0;
        }
        "fig7" => {
            cfg.drive = DriveSignal::square(5.0, 40.0, 0.5)?;
            cfg.tau_end = 120.0;
            cfg.sweep = vec![3.0, 5.0, 7.0, 9.0];
        }
        "fig8" | "fig9" => {}
        "fig10" => cfg.sweep = (1..=9).map(f64::from).collect(),
        _ => return Err(unknown(name)),
    }
    Ok(cfg)
}

/// Display form for file and column names: `5` rather than `5.0`.
fn label(v: f64) -> String {
    format!("{v}")
}

fn write(out: &Path, file: &str, text: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = out.join(file);
    fs::write(&path, text)?;
    written.push(path);
    Ok(())
}

fn steady_control(cfg: &RunConfig, amplitude: f64) -> BoundaryControl {
    match cfg.mode {
        ModeKind::Potentiostatic => BoundaryControl::Potential(amplitude),
        ModeKind::Galvanostatic => BoundaryControl::Current(amplitude),
    }
}

fn sweep_simulations(model: &MembraneModel, cfg: &RunConfig, eq: &StateVector) -> Result<Vec<Simulation>> {
    cfg.sweep
        .par_iter()
        .map(|v| {
            let drive = cfg.drive_mode(cfg.drive.with_amplitude(*v));
            model.simulate_from(eq, &drive, cfg.tau_end, &cfg.settings, &mut |_, _, _| {})
        })
        .collect()
}

/// Steady states along the sweep, each reached by continuation from equilibrium.
fn sweep_steady(model: &MembraneModel, cfg: &RunConfig, eq: &StateVector) -> Result<Vec<StateVector>> {
    cfg.sweep
        .par_iter()
        .map(|v| model.steady_from(eq, steady_control(cfg, *v), &cfg.settings))
        .collect()
}

fn sweep_noise(model: &MembraneModel, cfg: &RunConfig, eq: &StateVector) -> Result<Vec<(f64, NoiseChain)>> {
    let basis = cfg.noise.basis()?;
    let omegas = cfg.noise.omegas()?;
    let mid = model.grid().mid_membrane();
    let species = cfg.noise.options.species;
    sweep_steady(model, cfg, eq)?
        .iter()
        .map(|st| {
            let j = model.exit_flux(st);
            let chain = noise_chain(model, &basis, eq, j, st.conc[species][mid], &omegas, &cfg.noise.options)?;
            Ok((j, chain))
        })
        .collect()
}

/// Table with a shared first column and one column per sweep value.
fn sweep_table(first: &str, xs: &[f64], prefix: &str, sweep: &[f64], cols: &[Vec<f64>]) -> String {
    let mut out = String::from(first);
    for v in sweep {
        let _ = write!(out, ",{prefix}{}", label(*v));
    }
    out.push('\n');
    for (k, x) in xs.iter().enumerate() {
        out.push_str(&fmt_f64(*x));
        for c in cols {
            out.push(',');
            out.push_str(&fmt_f64(c[k]));
        }
        out.push('\n');
    }
    out
}

/// Runs scenario `name` with configuration `cfg`, writing CSVs and
/// `manifest.txt` into `out`. Returns the files written.
pub fn run_scenario(name: &str, cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    if !SCENARIOS.contains(&name) {
        return Err(unknown(name));
    }
    cfg.validate()?;
    fs::create_dir_all(out)?;
    let grid = cfg.build_grid()?;
    let model = MembraneModel::new(cfg.system.clone(), grid)?;
    let eq = model.equilibrium(&cfg.settings)?;
    let mut written = Vec::new();

    match name {
        "equilibrium" => {
            write(out, "equilibrium.csv", &model.snapshot_csv(&eq), &mut written)?;
            write(out, "grid.csv", &model.grid().to_csv(), &mut written)?;
        }
        "fig3" => {
            let drive = cfg.drive_mode(cfg.drive.clone());
            let sim = model.simulate_from(&eq, &drive, cfg.tau_end, &cfg.settings, &mut |_, _, _| {})?;
            for snap in &sim.snapshots {
                let file = format!("profile_tau{}.csv", label(snap.tau));
                write(out, &file, &model.snapshot_csv(snap), &mut written)?;
            }
            let steady = model.steady_from(&eq, steady_control(cfg, cfg.drive.peak()), &cfg.settings)?;
            write(out, "profile_steady.csv", &model.snapshot_csv(&steady), &mut written)?;
        }
        "fig5" => {
            let sims = sweep_simulations(&model, cfg, &eq)?;
            let cols: Vec<Vec<f64>> = sims.iter().map(|s| s.series.exit_flux.clone()).collect();
            let text = sweep_table("tau", &sims[0].series.tau, "J_V", &cfg.sweep, &cols);
            write(out, "flux.csv", &text, &mut written)?;
        }
        "fig6" | "custom" => {
            let drive = cfg.drive_mode(cfg.drive.clone());
            let sim = model.simulate_from(&eq, &drive, cfg.tau_end, &cfg.settings, &mut |_, _, _| {})?;
            write(out, "series.csv", &sim.series.to_csv(), &mut written)?;
            for snap in &sim.snapshots {
                let file = format!("profile_tau{}.csv", label(snap.tau));
                write(out, &file, &model.snapshot_csv(snap), &mut written)?;
            }
        }
        "fig7" => {
            let ch = cfg.channel_params()?;
            let sims = sweep_simulations(&model, cfg, &eq)?;
            for (v, sim) in cfg.sweep.iter().zip(&sims) {
                let wave = line_source_waveform(&sim.series, &ch)?;
                write(
                    out,
                    &format!("channel_V{}.csv", label(*v)),
                    &wave.to_csv(),
                    &mut written,
                )?;
            }
        }
        "fig8" | "fig9" => {
            let chains = sweep_noise(&model, cfg, &eq)?;
            for (v, (_, chain)) in cfg.sweep.iter().zip(&chains) {
                write(
                    out,
                    &format!("spectrum_V{}.csv", label(*v)),
                    &chain.to_csv(),
                    &mut written,
                )?;
            }
            let omegas = &chains[0].1.flux.omegas;
            let (file, prefix, cols): (&str, &str, Vec<Vec<f64>>) = if name == "fig8" {
                (
                    "psd.csv",
                    "S_J_V",
                    chains.iter().map(|(_, c)| c.flux.psd.clone()).collect(),
                )
            } else {
                (
                    "snr.csv",
                    "SNR_dB_V",
                    chains
                        .iter()
                        .map(|(_, c)| c.snr.psd.iter().map(|x| 10.0 * x.log10()).collect())
                        .collect(),
                )
            };
            write(
                out,
                file,
                &sweep_table("omega", omegas, prefix, &cfg.sweep, &cols),
                &mut written,
            )?;
        }
        "fig10" => {
            let chains = sweep_noise(&model, cfg, &eq)?;
            let mut text = String::from("V,J_ss,S_J0,SNR,SNR_dB\n");
            for (v, (j, chain)) in cfg.sweep.iter().zip(&chains) {
                let snr = chain.snr.psd[0];
                let _ = writeln!(
                    text,
                    "{},{},{},{},{}",
                    fmt_f64(*v),
                    fmt_f64(*j),
                    fmt_f64(chain.flux.psd[0]),
                    fmt_f64(snr),
                    fmt_f64(10.0 * snr.log10())
                );
            }
            write(out, "snr_vs_v.csv", &text, &mut written)?;
        }
        _ => unreachable!("checked above"),
    }
    write(out, "manifest.txt", &cfg.manifest(name), &mut written)?;
    Ok(written)
}
