//! Membrane RC lumping, thermal and shot noise, flux noise and SNR.
//!
//! All spectra are one-sided functions of the scaled angular frequency `ω`
//! (time unit `λ²/D_a`). A `δ(ω)` component is never added to sampled
//! values; it travels separately as [`NoiseSpectrum::dc_impulse_weight`].

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::solver::{MembraneModel, StateVector};
use crate::units::constants::{AVOGADRO, BOLTZMANN, GAS_CONSTANT};
use crate::units::{DimensionlessSystem, ScalingBasis};

/// Lumped membrane capacitance and resistance at equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembraneRC {
    pub capacitance: f64,
    pub resistance: f64,
    /// `R_M C_M`.
    pub theta: f64,
    /// Scaled voltage kick of one unitary event.
    pub v0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpectrum {
    pub omegas: Vec<f64>,
    pub psd: Vec<f64>,
    /// Coefficient of `δ(ω)`.
    pub dc_impulse_weight: f64,
}

impl NoiseSpectrum {
    pub fn new(omegas: Vec<f64>, psd: Vec<f64>, dc_impulse_weight: f64) -> Result<Self> {
        if omegas.len() != psd.len() {
            return Err(Error::Shape(format!(
                "{} frequencies but {} PSD samples",
                omegas.len(),
                psd.len()
            )));
        }
        check_omegas(&omegas)?;
        Ok(Self {
            omegas,
            psd,
            dc_impulse_weight,
        })
    }

    /// Same value at every frequency.
    pub fn flat(omegas: &[f64], value: f64) -> Self {
        Self {
            omegas: omegas.to_vec(),
            psd: vec![value; omegas.len()],
            dc_impulse_weight: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.psd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psd.is_empty()
    }

    /// `a·self + b·other` on a shared frequency grid.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.omegas != other.omegas {
            return Err(Error::Shape("spectra on different frequency grids".into()));
        }
        Ok(Self {
            omegas: self.omegas.clone(),
            psd: self.psd.iter().zip(&other.psd).map(|(x, y)| a * x + b * y).collect(),
            dc_impulse_weight: a * self.dc_impulse_weight + b * other.dc_impulse_weight,
        })
    }
}

fn check_omegas(omegas: &[f64]) -> Result<()> {
    if omegas.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
        return Err(Error::invalid("omegas", "must be finite and non-negative"));
    }
    if omegas.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("omegas", "must be sorted"));
    }
    Ok(())
}

/// Mean flux as a superposition of Poisson pore events, `J = N k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotParams {
    pub pores: f64,
    pub rate: f64,
}

impl ShotParams {
    pub fn new(pores: f64, rate: f64) -> Result<Self> {
        if !(pores > 0.0 && rate > 0.0) {
            return Err(Error::invalid("shot", "pores and rate must be positive"));
        }
        Ok(Self { pores, rate })
    }

    /// One pore carrying the whole flux.
    pub fn from_flux(flux: f64) -> Result<Self> {
        Self::new(1.0, flux)
    }

    pub fn flux(&self) -> f64 {
        self.pores * self.rate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThermalModel {
    /// `4 k_B R_M / (λ R T c_bulk Δf)`, already in scaled potential.
    #[default]
    Reduced,
    /// Johnson-Nyquist `4 k_B T R Δf`, converted to scaled potential.
    Standard,
}

impl FromStr for ThermalModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "reduced" => Ok(ThermalModel::Reduced),
            "standard" => Ok(ThermalModel::Standard),
            other => Err(Error::Parse(format!(
                "unknown thermal model `{other}` (expected reduced or standard)"
            ))),
        }
    }
}

impl ThermalModel {
    pub fn name(self) -> &'static str {
        match self {
            ThermalModel::Reduced => "reduced",
            ThermalModel::Standard => "standard",
        }
    }
}

/// Voltage kick of one elementary charge on the membrane capacitance of a
/// unit (1 m²) area, in thermal voltages.
pub fn unitary_voltage(b: &ScalingBasis, capacitance: f64) -> f64 {
    1.0 / (AVOGADRO * capacitance * b.c_bulk * b.lambda)
}

/// Lumps the membrane of an equilibrium state into a parallel RC element,
/// using the mid-membrane concentrations.
pub fn membrane_rc(model: &MembraneModel, eq: &StateVector, b: &ScalingBasis) -> Result<MembraneRC> {
    let s = model.system();
    let n = model.grid().len();
    if eq.conc.len() != s.species_count() || eq.phi.len() != n {
        return Err(Error::Shape("state does not match the model".into()));
    }
    let leak = (0..s.species_count())
        .flat_map(|i| model.face_fluxes(eq, i))
        .fold(0.0f64, |a, j| a.max(j.abs()));
    if eq.phi_left.abs() > 1e-10 || leak > 1e-8 {
        return Err(Error::Precondition(format!(
            "membrane_rc needs an equilibrium state (boundary potential {}, max flux {leak:e})",
            eq.phi_left
        )));
    }
    let mid = model.grid().mid_membrane();
    let d = s.membrane_thickness;
    let conductivity: f64 = (0..s.species_count())
        .map(|i| {
            let z = f64::from(s.valences[i]);
            z * z * s.diffusion_membrane[i] * eq.conc[i][mid]
        })
        .sum();
    let capacitance = s.permittivity / d;
    let resistance = d / conductivity;
    Ok(MembraneRC {
        capacitance,
        resistance,
        theta: resistance * capacitance,
        v0: unitary_voltage(b, capacitance),
    })
}

/// Flat thermal voltage PSD for a measurement bandwidth `bandwidth` in Hz.
pub fn thermal_psd(b: &ScalingBasis, rc: &MembraneRC, bandwidth: f64, model: ThermalModel) -> Result<f64> {
    if !(bandwidth > 0.0) {
        return Err(Error::invalid("bandwidth", "must be positive"));
    }
    Ok(match model {
        ThermalModel::Reduced => {
            4.0 * BOLTZMANN * rc.resistance / (b.lambda * GAS_CONSTANT * b.temperature * b.c_bulk * bandwidth)
        }
        ThermalModel::Standard => {
            let r = rc.resistance * b.resistance_unit();
            let vt = b.thermal_voltage();
            4.0 * BOLTZMANN * b.temperature * r * bandwidth / (vt * vt)
        }
    })
}

/// Sampled Lorentzian `(J/2π) V₀ θ² / (1 + ω²θ²)` and the `δ(ω)` weight
/// `(J V₀ ε R)²`, where `ε` is `dc_coefficient`.
pub fn shot_voltage_psd(p: &ShotParams, rc: &MembraneRC, omega: f64, dc_coefficient: f64) -> (f64, f64) {
    let j = p.flux();
    let th = rc.theta;
    let lorentz = j / (2.0 * std::f64::consts::PI) * rc.v0 * th * th / (1.0 + omega * omega * th * th);
    let w = j * rc.v0 * dc_coefficient * rc.resistance;
    (lorentz, w * w)
}

/// Shot-noise spectrum on a frequency grid.
pub fn shot_spectrum(p: &ShotParams, rc: &MembraneRC, omegas: &[f64], dc_coefficient: f64) -> Result<NoiseSpectrum> {
    check_omegas(omegas)?;
    let dc = shot_voltage_psd(p, rc, 0.0, dc_coefficient).1;
    let psd = omegas
        .iter()
        .map(|w| shot_voltage_psd(p, rc, *w, dc_coefficient).0)
        .collect();
    NoiseSpectrum::new(omegas.to_vec(), psd, dc)
}

/// Maps a potential PSD onto the flux of species `species` with the
/// linearized gain `(D_iM z_i c_i0 / d)²`.
pub fn flux_psd(s_phi: &NoiseSpectrum, s: &DimensionlessSystem, species: usize, c_i0: f64) -> Result<NoiseSpectrum> {
    if species >= s.species_count() {
        return Err(Error::invalid("species", "index out of range"));
    }
    let gain = s.diffusion_membrane[species] * f64::from(s.valences[species]) * c_i0 / s.membrane_thickness;
    let g2 = gain * gain;
    Ok(NoiseSpectrum {
        omegas: s_phi.omegas.clone(),
        psd: s_phi.psd.iter().map(|v| v * g2).collect(),
        dc_impulse_weight: s_phi.dc_impulse_weight * g2,
    })
}

/// `J² / S_J(ω)` per sample. The `δ(ω)` weight does not enter.
pub fn snr(flux: f64, s_j: &NoiseSpectrum) -> Result<NoiseSpectrum> {
    if let Some(k) = s_j.psd.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::ZeroSpectrum(k));
    }
    Ok(NoiseSpectrum {
        omegas: s_j.omegas.clone(),
        psd: s_j.psd.iter().map(|v| flux * flux / v).collect(),
        dc_impulse_weight: 0.0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseOptions {
    pub thermal_model: ThermalModel,
    /// Measurement bandwidth in Hz; defaults to the band covered by the
    /// frequency grid.
    pub bandwidth: Option<f64>,
    /// Overrides the unitary voltage kick.
    pub v0: Option<f64>,
    /// The `ε` factor of the `δ(ω)` weight.
    pub dc_coefficient: f64,
    /// Species whose flux is analysed.
    pub species: usize,
}

impl Default for NoiseOptions {
    fn default() -> Self {
        Self {
            thermal_model: ThermalModel::Reduced,
            bandwidth: None,
            v0: None,
            dc_coefficient: 1.0,
            species: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseChain {
    pub rc: MembraneRC,
    pub bandwidth: f64,
    /// Potential PSDs.
    pub thermal: NoiseSpectrum,
    pub shot: NoiseSpectrum,
    /// Flux PSD of thermal plus shot noise.
    pub flux: NoiseSpectrum,
    pub snr: NoiseSpectrum,
}

impl NoiseChain {
    /// CSV `omega, S_thermal, S_shot, S_J_total, SNR, SNR_dB` with the
    /// `δ(ω)` weight of `S_J` in a leading comment line.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# dc_impulse_weight={}\nomega,S_thermal,S_shot,S_J_total,SNR,SNR_dB\n",
            fmt_f64(self.flux.dc_impulse_weight)
        );
        for k in 0..self.flux.len() {
            let snr = self.snr.psd[k];
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt_f64(self.flux.omegas[k]),
                fmt_f64(self.thermal.psd[k]),
                fmt_f64(self.shot.psd[k]),
                fmt_f64(self.flux.psd[k]),
                fmt_f64(snr),
                fmt_f64(10.0 * snr.log10())
            );
        }
        out
    }
}

/// Physical bandwidth in Hz spanned by scaled angular frequencies up to `omega_max`.
pub fn grid_bandwidth(b: &ScalingBasis, omega_max: f64) -> f64 {
    omega_max * b.d_a / (2.0 * std::f64::consts::PI * b.lambda * b.lambda)
}

/// Full pipeline: RC lumping at equilibrium, thermal and shot voltage PSDs
/// with the shot flux set to `j_ss`, flux PSD at concentration `c_i0`, SNR.
pub fn noise_chain(
    model: &MembraneModel,
    b: &ScalingBasis,
    eq: &StateVector,
    j_ss: f64,
    c_i0: f64,
    omegas: &[f64],
    opts: &NoiseOptions,
) -> Result<NoiseChain> {
    check_omegas(omegas)?;
    let omega_max = omegas.last().copied().unwrap_or(0.0);
    let mut rc = membrane_rc(model, eq, b)?;
    if let Some(v0) = opts.v0 {
        if !(v0 > 0.0) {
            return Err(Error::invalid("v0", "must be positive"));
        }
        rc.v0 = v0;
    }
    let bandwidth = match opts.bandwidth {
        Some(f) => f,
        None if omega_max > 0.0 => grid_bandwidth(b, omega_max),
        None => {
            return Err(Error::invalid(
                "omegas",
                "need a positive maximum for the default bandwidth",
            ))
        }
    };
    let thermal = NoiseSpectrum::flat(omegas, thermal_psd(b, &rc, bandwidth, opts.thermal_model)?);
    let shot = shot_spectrum(&ShotParams::from_flux(j_ss)?, &rc, omegas, opts.dc_coefficient)?;
    let total = thermal.combine(1.0, &shot, 1.0)?;
    let flux = flux_psd(&total, model.system(), opts.species, c_i0)?;
    let snr = snr(j_ss, &flux)?;
    Ok(NoiseChain {
        rc,
        bandwidth,
        thermal,
        shot,
        flux,
        snr,
    })
}

/// `count` log-spaced frequencies from `lo` to `hi`, both included.
pub fn log_omegas(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && count >= 2) {
        return Err(Error::invalid("omegas", "need 0 < lo < hi and at least two points"));
    }
    let (a, b) = (lo.log10(), hi.log10());
    Ok((0..count)
        .map(|k| 10f64.powf(a + (b - a) * k as f64 / (count - 1) as f64))
        .collect())
}
