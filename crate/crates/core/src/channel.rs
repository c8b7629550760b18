//! One-dimensional advection-diffusion channel between the transmitter and
//! a passive observation point.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::solver::FluxSeries;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    /// Scaled diffusion coefficient of the medium.
    pub diffusion: f64,
    /// Scaled flow speed towards the observer.
    pub velocity: f64,
    /// Distance from the origin to the observation point.
    pub y_obs: f64,
    /// Source positions with their share of the total flux.
    pub segments: Vec<(f64, f64)>,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            diffusion: 1.0,
            velocity: 0.5,
            y_obs: 10.0,
            segments: vec![(0.0, 1.0)],
        }
    }
}

impl ChannelParams {
    /// `n` equally weighted segments spread evenly over `[0, length)`.
    pub fn with_line_source(mut self, n: usize, length: f64) -> Result<Self> {
        if n == 0 || !(length >= 0.0) {
            return Err(Error::invalid(
                "segments",
                "need at least one segment and a non-negative length",
            ));
        }
        self.segments = (0..n).map(|k| (length * k as f64 / n as f64, 1.0 / n as f64)).collect();
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.diffusion > 0.0 && self.diffusion.is_finite()) {
            return Err(Error::invalid("diffusion", "must be positive"));
        }
        if !self.velocity.is_finite() {
            return Err(Error::invalid("velocity", "must be finite"));
        }
        if !(self.y_obs > 0.0 && self.y_obs.is_finite()) {
            return Err(Error::invalid("y_obs", "must be positive"));
        }
        if self.segments.is_empty() {
            return Err(Error::invalid("segments", "need at least one"));
        }
        if self.segments.iter().any(|(y, w)| !y.is_finite() || !(*w >= 0.0)) {
            return Err(Error::invalid("segments", "positions finite, shares non-negative"));
        }
        let total: f64 = self.segments.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("segments", format!("shares sum to {total}, not 1")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConcentrationSeries {
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
}

impl ConcentrationSeries {
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    /// Largest value and its time.
    pub fn peak(&self) -> Option<(f64, f64)> {
        self.values
            .iter()
            .zip(&self.taus)
            .max_by(|a, b| a.0.total_cmp(b.0))
            .map(|(v, t)| (*t, *v))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau,concentration\n");
        for (t, v) in self.taus.iter().zip(&self.values) {
            let _ = writeln!(out, "{},{}", fmt_f64(*t), fmt_f64(*v));
        }
        out
    }
}

/// Concentration at distance `y` a time `tau` after a unit impulse.
pub fn greens_function(diffusion: f64, velocity: f64, y: f64, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::OutOfDomain {
            position: tau,
            lower: 0.0,
            upper: f64::INFINITY,
        });
    }
    let spread = 4.0 * diffusion * tau;
    let shift = y - velocity * tau;
    Ok((std::f64::consts::PI * spread).powf(-0.5) * (-shift * shift / spread).exp())
}

/// Time of the kernel maximum at fixed `y`: the positive root of
/// `u²τ² + 2Dτ - y² = 0`.
pub fn peak_arrival_time(diffusion: f64, velocity: f64, y: f64) -> f64 {
    let u2 = velocity * velocity;
    if u2 == 0.0 {
        return y * y / (2.0 * diffusion);
    }
    (-diffusion + (diffusion * diffusion + u2 * y * y).sqrt()) / u2
}

/// Uniform sample spacing of `taus`, or a precondition error.
pub fn uniform_spacing(taus: &[f64]) -> Result<f64> {
    if taus.len() < 2 {
        return Err(Error::Precondition("flux series needs at least two samples".into()));
    }
    let dt = (taus[taus.len() - 1] - taus[0]) / (taus.len() - 1) as f64;
    let uniform = dt > 0.0 && taus.windows(2).all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt);
    if !uniform {
        return Err(Error::Precondition("flux series is not uniformly sampled".into()));
    }
    Ok(dt)
}

/// Causal Riemann-sum convolution of the flux history with the advected
/// Gaussian kernel, summed over segments. The `j = i` term is skipped.
pub fn line_source_waveform(flux: &FluxSeries, ch: &ChannelParams) -> Result<ConcentrationSeries> {
    waveform(&flux.tau, &flux.exit_flux, ch)
}

/// Same as [`line_source_waveform`] on raw samples.
pub fn waveform(taus: &[f64], flux: &[f64], ch: &ChannelParams) -> Result<ConcentrationSeries> {
    ch.validate()?;
    if taus.len() != flux.len() {
        return Err(Error::Shape(format!(
            "{} times but {} flux samples",
            taus.len(),
            flux.len()
        )));
    }
    let dt = uniform_spacing(taus)?;
    let n = taus.len();
    // kernel depends only on the lag
    let kernel: Vec<f64> = (0..n)
        .map(|lag| {
            if lag == 0 {
                return 0.0;
            }
            let t = lag as f64 * dt;
            ch.segments
                .iter()
                .map(|(y, w)| w * greens_function(ch.diffusion, ch.velocity, ch.y_obs - y, t).expect("positive lag"))
                .sum()
        })
        .collect();
    let values = (0..n)
        .into_par_iter()
        .map(|i| (0..i).map(|j| flux[j] * dt * kernel[i - j]).sum())
        .collect();
    Ok(ConcentrationSeries {
        taus: taus.to_vec(),
        values,
    })
}
