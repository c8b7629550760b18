//! Nernst-Planck-Poisson solver on the compartment network.
//!
//! The compartment equations are exactly the Kirchhoff laws of the network
//! in [`crate::network`]: per species, `δ_k dc/dτ = J_in - J_out`; for the
//! electrical line, `D_out - D_in = δ_k ρ_k`. Time integration is implicit
//! Euler with an adaptive step; every step is a damped Newton solve with an
//! analytic banded Jacobian.
//!
//! Sign convention: a positive left boundary potential `φ_A` pushes cations
//! from the left bath through the membrane into the grounded right bath, and
//! fluxes are positive in +ξ.

mod assembly;
pub mod banded;
mod newton;

use std::fmt::Write as _;

pub use assembly::BoundaryControl;
use assembly::{assemble, face_displacement, face_flux, Layout, TimeTerm};
use newton::{NewtonOptions, NewtonReport};

use crate::drive::DriveSignal;
use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::grid::CompartmentGrid;
use crate::network::{shape_error, Discretization};
use crate::units::DimensionlessSystem;

/// Concentrations, potentials, and boundary displacement at one instant.
/// The right boundary is grounded and not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    /// `[species][compartment]`
    pub conc: Vec<Vec<f64>>,
    pub phi: Vec<f64>,
    /// Potential of the left boundary, `φ(-δ)`.
    pub phi_left: f64,
    /// Electric displacement at the left boundary.
    pub displacement_left: f64,
    pub tau: f64,
}

impl StateVector {
    /// Bath concentration everywhere, zero potential.
    pub fn uniform(s: &DimensionlessSystem, g: &CompartmentGrid) -> Self {
        Self {
            conc: vec![vec![s.bulk_concentration; g.len()]; s.species_count()],
            phi: vec![0.0; g.len()],
            phi_left: 0.0,
            displacement_left: 0.0,
            tau: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn species(&self) -> usize {
        self.conc.len()
    }

    pub fn phi_right(&self) -> f64 {
        0.0
    }

    pub(crate) fn check_shape(&self, n: usize, m: usize) -> Result<()> {
        if self.conc.len() != m {
            return Err(shape_error("species", m, self.conc.len()));
        }
        if self.phi.len() != n {
            return Err(shape_error("compartments", n, self.phi.len()));
        }
        if let Some(c) = self.conc.iter().find(|c| c.len() != n) {
            return Err(shape_error("concentration entries", n, c.len()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DriveMode {
    /// Prescribed left boundary potential `φ_A(τ)`.
    Potentiostatic(DriveSignal),
    /// Prescribed total current density `I(τ)`.
    Galvanostatic(DriveSignal),
}

impl DriveMode {
    pub fn signal(&self) -> &DriveSignal {
        match self {
            DriveMode::Potentiostatic(s) | DriveMode::Galvanostatic(s) => s,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DriveMode::Potentiostatic(_) => "potentiostatic",
            DriveMode::Galvanostatic(_) => "galvanostatic",
        }
    }

    /// Boundary control over the step `(tau0, tau1]`. The signal is sampled
    /// at the midpoint, which is the value on the whole interval because
    /// steps never straddle a breakpoint.
    fn control(&self, tau0: f64, tau1: f64) -> Result<BoundaryControl> {
        let v = self.signal().eval(0.5 * (tau0 + tau1))?;
        Ok(match self {
            DriveMode::Potentiostatic(_) => BoundaryControl::Potential(v),
            DriveMode::Galvanostatic(_) => BoundaryControl::Current(v),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveSettings {
    /// Max-norm of the scaled residual at which Newton stops.
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    /// Step growth after an easy Newton solve; at most 2.
    pub adapt_factor: f64,
    /// Times at which full state snapshots are kept.
    pub output_times: Vec<f64>,
    /// Spacing of the uniform flux/current series.
    pub series_dt: f64,
}

impl Default for SolveSettings {
    fn default() -> Self {
        Self {
            newton_tol: 1e-10,
            max_newton_iters: 30,
            dt_init: 1e-3,
            dt_min: 1e-10,
            dt_max: 0.5,
            adapt_factor: 1.5,
            output_times: Vec::new(),
            series_dt: 0.1,
        }
    }
}

impl SolveSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.newton_tol > 0.0) {
            return Err(Error::invalid("newton_tol", "must be positive"));
        }
        if self.max_newton_iters == 0 {
            return Err(Error::invalid("max_newton_iters", "must be positive"));
        }
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt_init && self.dt_init <= self.dt_max) {
            return Err(Error::invalid("dt", "need 0 < dt_min <= dt_init <= dt_max"));
        }
        if !(self.adapt_factor >= 1.0 && self.adapt_factor <= 2.0) {
            return Err(Error::invalid("adapt_factor", "must lie in [1, 2]"));
        }
        if !(self.series_dt > 0.0) {
            return Err(Error::invalid("series_dt", "must be positive"));
        }
        if self.output_times.iter().any(|t| !(*t >= 0.0)) {
            return Err(Error::invalid("output_times", "must be non-negative"));
        }
        Ok(())
    }

    fn newton(&self) -> NewtonOptions {
        NewtonOptions {
            tol: self.newton_tol,
            max_iters: self.max_newton_iters,
        }
    }
}

/// Uniformly sampled transmitter output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FluxSeries {
    pub tau: Vec<f64>,
    /// Cation flux leaving the membrane into the right bath.
    pub exit_flux: Vec<f64>,
    /// Total (faradaic plus displacement) current density.
    pub total_current: Vec<f64>,
    /// Value of the drive signal on the step ending at each sample.
    pub drive: Vec<f64>,
}

impl FluxSeries {
    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    /// CSV with columns `tau, J_exit, I_total`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau,J_exit,I_total\n");
        for k in 0..self.len() {
            let _ = writeln!(
                out,
                "{},{},{}",
                fmt_f64(self.tau[k]),
                fmt_f64(self.exit_flux[k]),
                fmt_f64(self.total_current[k])
            );
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub equilibrium: StateVector,
    /// States at the requested output times, in order.
    pub snapshots: Vec<StateVector>,
    pub series: FluxSeries,
    pub accepted_steps: usize,
}

/// A system bound to a grid, with precomputed network coefficients.
#[derive(Debug, Clone)]
pub struct MembraneModel {
    system: DimensionlessSystem,
    grid: CompartmentGrid,
    disc: Discretization,
}

impl MembraneModel {
    pub fn new(system: DimensionlessSystem, grid: CompartmentGrid) -> Result<Self> {
        let disc = Discretization::new(&system, &grid)?;
        Ok(Self { system, grid, disc })
    }

    pub fn system(&self) -> &DimensionlessSystem {
        &self.system
    }

    pub fn grid(&self) -> &CompartmentGrid {
        &self.grid
    }

    pub fn discretization(&self) -> &Discretization {
        &self.disc
    }

    fn layout(&self) -> Layout {
        Layout::new(&self.disc)
    }

    fn check(&self, state: &StateVector) -> Result<()> {
        state.check_shape(self.disc.len(), self.disc.species())
    }

    /// Uniform bath concentrations with the Donnan pair and potential in the
    /// membrane.
    pub fn initial_guess(&self) -> StateVector {
        let mut st = StateVector::uniform(&self.system, &self.grid);
        let (donnan, phi_d) = self.system.donnan();
        for k in self.grid.membrane_range() {
            for (i, c) in donnan.iter().enumerate() {
                st.conc[i][k] = *c;
            }
            st.phi[k] = phi_d;
        }
        st
    }

    fn finish(&self, x: &[f64], template: &StateVector, tau: f64) -> StateVector {
        let lay = self.layout();
        let mut st = template.clone();
        lay.unpack(x, &mut st);
        st.displacement_left = face_displacement(&self.disc, &lay, x, 0).0;
        st.tau = tau;
        st
    }

    fn newton_steady(
        &self,
        guess: &StateVector,
        control: BoundaryControl,
        settings: &SolveSettings,
    ) -> Result<StateVector> {
        let mut x = self.layout().pack(guess);
        newton::solve(
            &self.disc,
            &mut x,
            control,
            TimeTerm::Steady,
            settings.newton(),
            f64::INFINITY,
        )?;
        Ok(self.finish(&x, guess, f64::INFINITY))
    }

    fn newton_step(
        &self,
        prev: &StateVector,
        control: BoundaryControl,
        dt: f64,
        settings: &SolveSettings,
    ) -> Result<(StateVector, NewtonReport)> {
        let mut x = self.layout().pack(prev);
        if let BoundaryControl::Potential(v) = control {
            x[0] = v;
        }
        let report = newton::solve(
            &self.disc,
            &mut x,
            control,
            TimeTerm::Implicit { prev, dt },
            settings.newton(),
            prev.tau + dt,
        )?;
        Ok((self.finish(&x, prev, prev.tau + dt), report))
    }

    /// Zero-current equilibrium. Tries Newton from the Donnan guess, then
    /// falls back to pseudo-transient continuation.
    pub fn equilibrium(&self, settings: &SolveSettings) -> Result<StateVector> {
        settings.validate()?;
        let guess = self.initial_guess();
        let control = BoundaryControl::Potential(0.0);
        let mut st = match self.newton_steady(&guess, control, settings) {
            Ok(st) => st,
            Err(_) => self.pseudo_transient(guess, control, settings)?,
        };
        st.tau = 0.0;
        Ok(st)
    }

    fn pseudo_transient(
        &self,
        start: StateVector,
        control: BoundaryControl,
        settings: &SolveSettings,
    ) -> Result<StateVector> {
        let mut st = start;
        st.tau = 0.0;
        let mut dt = settings.dt_init;
        let mut last = Error::Convergence {
            tau: 0.0,
            residual: f64::NAN,
            iterations: 0,
        };
        for _ in 0..400 {
            if dt > 1e3 {
                match self.newton_steady(&st, control, settings) {
                    Ok(done) => return Ok(done),
                    Err(e) => last = e,
                }
            }
            match self.newton_step(&st, control, dt, settings) {
                Ok((next, _)) => {
                    st = next;
                    dt *= 2.0;
                }
                Err(e) => {
                    last = e;
                    dt *= 0.25;
                    if dt < settings.dt_min {
                        break;
                    }
                }
            }
        }
        Err(last)
    }

    /// Steady state (τ → ∞) under a constant boundary control, reached by
    /// continuation in the control value from equilibrium.
    pub fn steady_state(&self, control: BoundaryControl, settings: &SolveSettings) -> Result<StateVector> {
        let eq = self.equilibrium(settings)?;
        self.steady_from(&eq, control, settings)
    }

    /// Continuation from a known steady state `start` (usually equilibrium).
    pub fn steady_from(
        &self,
        start: &StateVector,
        control: BoundaryControl,
        settings: &SolveSettings,
    ) -> Result<StateVector> {
        let (target, make): (f64, fn(f64) -> BoundaryControl) = match control {
            BoundaryControl::Potential(v) => (v, BoundaryControl::Potential),
            BoundaryControl::Current(i) => (i, BoundaryControl::Current),
        };
        let mut st = start.clone();
        let mut frac = 0.0;
        // potentials step by about one thermal voltage at first
        let mut dfrac = if target.abs() > 1.0 { 1.0 / target.abs() } else { 1.0 };
        if matches!(control, BoundaryControl::Current(_)) {
            dfrac = 0.1;
        }
        while frac < 1.0 {
            let next = (frac + dfrac).min(1.0);
            match self.newton_steady(&st, make(next * target), settings) {
                Ok(s) => {
                    st = s;
                    frac = next;
                    dfrac *= 1.5;
                }
                Err(e) => {
                    dfrac *= 0.5;
                    if dfrac < 1e-6 {
                        return Err(e);
                    }
                }
            }
        }
        Ok(st)
    }

    /// One implicit Euler step of length `dt` from `state`.
    pub fn step(
        &self,
        state: &StateVector,
        drive: &DriveMode,
        dt: f64,
        settings: &SolveSettings,
    ) -> Result<StateVector> {
        self.check(state)?;
        if !(dt > 0.0) {
            return Err(Error::invalid("dt", "must be positive"));
        }
        let control = drive.control(state.tau, state.tau + dt)?;
        Ok(self.newton_step(state, control, dt, settings)?.0)
    }

    /// Residual of the implicit step from `prev` to `state`; `dt` is the step.
    pub fn residual(&self, state: &StateVector, drive: &DriveMode, prev: &StateVector, dt: f64) -> Result<Vec<f64>> {
        self.check(state)?;
        self.check(prev)?;
        let control = drive.control(prev.tau, prev.tau + dt)?;
        let lay = self.layout();
        let x = lay.pack(state);
        let mut res = vec![0.0; lay.unknowns()];
        assemble(&self.disc, &x, control, TimeTerm::Implicit { prev, dt }, &mut res, None);
        Ok(res)
    }

    /// Residual of the steady equations.
    pub fn steady_residual(&self, state: &StateVector, control: BoundaryControl) -> Result<Vec<f64>> {
        self.check(state)?;
        let lay = self.layout();
        let x = lay.pack(state);
        let mut res = vec![0.0; lay.unknowns()];
        assemble(&self.disc, &x, control, TimeTerm::Steady, &mut res, None);
        Ok(res)
    }

    /// Max-norm of the Poisson rows `(D_out - D_in)/δ - ρ`.
    pub fn poisson_residual(&self, state: &StateVector) -> Result<f64> {
        let res = self.steady_residual(state, BoundaryControl::Potential(state.phi_left))?;
        let lay = self.layout();
        Ok((0..lay.n).map(|k| res[lay.phi(k)].abs()).fold(0.0, f64::max))
    }

    /// Flux of species `i` across every face, left boundary first.
    pub fn face_fluxes(&self, state: &StateVector, i: usize) -> Vec<f64> {
        let lay = self.layout();
        let x = lay.pack(state);
        (0..=lay.n)
            .map(|f| face_flux(&self.disc, &lay, &x, i, f).0.value)
            .collect()
    }

    /// Electric displacement across every face.
    pub fn face_displacements(&self, state: &StateVector) -> Vec<f64> {
        let lay = self.layout();
        let x = lay.pack(state);
        (0..=lay.n)
            .map(|f| face_displacement(&self.disc, &lay, &x, f).0)
            .collect()
    }

    /// Total current (faradaic plus displacement) through every face over
    /// the step `prev → state`.
    pub fn face_currents(&self, state: &StateVector, prev: &StateVector, dt: f64) -> Vec<f64> {
        let d_now = self.face_displacements(state);
        let d_prev = self.face_displacements(prev);
        let mut out: Vec<f64> = d_now.iter().zip(&d_prev).map(|(a, b)| (a - b) / dt).collect();
        for i in 0..self.disc.species() {
            let z = self.disc.valence(i);
            for (o, j) in out.iter_mut().zip(self.face_fluxes(state, i)) {
                *o += z * j;
            }
        }
        out
    }

    /// Cation flux on the membrane/right-bath face.
    pub fn exit_flux(&self, state: &StateVector) -> f64 {
        let f = self.grid.membrane_exit_face();
        let n = self.disc.len();
        if f == n {
            self.disc
                .right_boundary_flux(0, state.conc[0][n - 1], state.phi[n - 1])
                .value
        } else {
            self.disc
                .interior_flux(
                    0,
                    f - 1,
                    [state.conc[0][f - 1], state.conc[0][f]],
                    [state.phi[f - 1], state.phi[f]],
                )
                .value
        }
    }

    /// `Σ z_i J_i` at the left boundary plus the displacement current.
    pub fn total_current(&self, state: &StateVector, displacement_rate: f64) -> f64 {
        (0..self.disc.species())
            .map(|i| {
                self.disc.valence(i)
                    * self
                        .disc
                        .left_boundary_flux(i, state.conc[i][0], state.phi[0], state.phi_left)
                        .value
            })
            .sum::<f64>()
            + displacement_rate
    }

    /// Net charge `Σ z_i c_i` in the first and last compartments.
    pub fn boundary_charge(&self, state: &StateVector) -> [f64; 2] {
        let n = self.disc.len();
        let q = |k: usize| {
            (0..self.disc.species())
                .map(|i| self.disc.valence(i) * state.conc[i][k])
                .sum::<f64>()
        };
        [q(0), q(n - 1)]
    }

    /// Per species: change of total content over the step minus the net
    /// boundary inflow. Zero up to solver tolerance.
    pub fn mass_imbalance(&self, state: &StateVector, prev: &StateVector, dt: f64) -> Vec<f64> {
        let n = self.disc.len();
        (0..self.disc.species())
            .map(|i| {
                let content = |s: &StateVector| (0..n).map(|k| self.disc.width(k) * s.conc[i][k]).sum::<f64>();
                let fluxes = self.face_fluxes(state, i);
                (content(state) - content(prev)) / dt - (fluxes[0] - fluxes[n])
            })
            .collect()
    }

    pub fn simulate(&self, drive: &DriveMode, tau_end: f64, settings: &SolveSettings) -> Result<Simulation> {
        self.simulate_observed(drive, tau_end, settings, |_, _, _| {})
    }

    /// Like [`Self::simulate`], calling `observer(prev, next, dt)` after every
    /// accepted step.
    pub fn simulate_observed(
        &self,
        drive: &DriveMode,
        tau_end: f64,
        settings: &SolveSettings,
        mut observer: impl FnMut(&StateVector, &StateVector, f64),
    ) -> Result<Simulation> {
        settings.validate()?;
        drive.signal().validate()?;
        if !(tau_end > 0.0) {
            return Err(Error::invalid("tau_end", "must be positive"));
        }
        let eq = self.equilibrium(settings)?;
        self.simulate_from(&eq, drive, tau_end, settings, &mut observer)
    }

    /// Integrates from a given initial state at τ = 0.
    pub fn simulate_from(
        &self,
        initial: &StateVector,
        drive: &DriveMode,
        tau_end: f64,
        settings: &SolveSettings,
        observer: &mut dyn FnMut(&StateVector, &StateVector, f64),
    ) -> Result<Simulation> {
        self.check(initial)?;
        let mut state = initial.clone();
        state.tau = 0.0;

        let samples = sample_times(settings.series_dt, tau_end);
        let mut outputs: Vec<f64> = settings
            .output_times
            .iter()
            .copied()
            .filter(|t| *t <= tau_end)
            .collect();
        outputs.sort_by(f64::total_cmp);
        let breaks = drive.signal().breakpoints(tau_end);
        let mut stops: Vec<f64> = samples
            .iter()
            .chain(&outputs)
            .chain(&breaks)
            .copied()
            .filter(|t| *t > 0.0)
            .collect();
        stops.sort_by(f64::total_cmp);
        stops.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * tau_end.max(1.0));

        let mut series = FluxSeries::default();
        let mut snapshots = Vec::new();
        let record = |series: &mut FluxSeries, st: &StateVector, current: f64, v: f64| {
            series.tau.push(st.tau);
            series.exit_flux.push(self.exit_flux(st));
            series.total_current.push(current);
            series.drive.push(v);
        };
        record(&mut series, &state, 0.0, drive.signal().eval(0.0)?);
        let mut next_sample = 1;
        let mut next_output = 0;
        while next_output < outputs.len() && outputs[next_output] <= 0.0 {
            snapshots.push(state.clone());
            next_output += 1;
        }

        let mut dt = settings.dt_init;
        let mut accepted = 0usize;
        for &stop in &stops {
            let restart = breaks.iter().any(|b| (b - state.tau).abs() <= 1e-12 * tau_end.max(1.0));
            if restart {
                dt = settings.dt_init;
            }
            let mut current = 0.0;
            let mut drive_value = 0.0;
            while state.tau < stop {
                let remaining = stop - state.tau;
                // never leave a sliver shorter than the step before `stop`
                let h = if remaining <= dt * (1.0 + 1e-6) {
                    remaining
                } else if remaining < 2.0 * dt {
                    0.5 * remaining
                } else {
                    dt
                };
                let control = drive.control(state.tau, state.tau + h)?;
                match self.newton_step(&state, control, h, settings) {
                    Ok((mut next, report)) => {
                        if h == remaining {
                            next.tau = stop;
                        }
                        current = self.total_current(&next, (next.displacement_left - state.displacement_left) / h);
                        drive_value = match control {
                            BoundaryControl::Potential(v) | BoundaryControl::Current(v) => v,
                        };
                        observer(&state, &next, h);
                        state = next;
                        accepted += 1;
                        if report.iterations <= 4 && h >= dt * (1.0 - 1e-9) {
                            dt = (dt * settings.adapt_factor).min(settings.dt_max);
                        }
                    }
                    Err(e) => {
                        dt = 0.5 * h;
                        if dt < settings.dt_min {
                            return Err(match e {
                                Error::Convergence { .. } => Error::StepTooSmall {
                                    tau: state.tau,
                                    dt_min: settings.dt_min,
                                },
                                other => other,
                            });
                        }
                    }
                }
            }
            if next_sample < samples.len() && (samples[next_sample] - stop).abs() <= 1e-12 * tau_end.max(1.0) {
                record(&mut series, &state, current, drive_value);
                next_sample += 1;
            }
            while next_output < outputs.len() && outputs[next_output] <= stop + 1e-12 * tau_end.max(1.0) {
                snapshots.push(state.clone());
                next_output += 1;
            }
        }

        Ok(Simulation {
            equilibrium: initial.clone(),
            snapshots,
            series,
            accepted_steps: accepted,
        })
    }

    /// CSV with columns `xi, c1, .., cm, phi, rho`.
    pub fn snapshot_csv(&self, state: &StateVector) -> String {
        let m = self.disc.species();
        let mut out = String::from("xi");
        for i in 0..m {
            let _ = write!(out, ",c{}", i + 1);
        }
        out.push_str(",phi,rho\n");
        for k in 0..self.disc.len() {
            out.push_str(&fmt_f64(self.grid.centers()[k]));
            for i in 0..m {
                out.push(',');
                out.push_str(&fmt_f64(state.conc[i][k]));
            }
            let rho = self.disc.charge_density(k, |i| state.conc[i][k]);
            let _ = writeln!(out, ",{},{}", fmt_f64(state.phi[k]), fmt_f64(rho));
        }
        out
    }
}

/// `0, dt, 2 dt, ...` up to and including `tau_end`.
fn sample_times(dt: f64, tau_end: f64) -> Vec<f64> {
    let count = (tau_end / dt * (1.0 + 1e-12)).floor() as usize;
    let mut out: Vec<f64> = (0..=count).map(|k| k as f64 * dt).collect();
    if tau_end - out[count] > 1e-9 * dt {
        out.push(tau_end);
    }
    out
}

pub fn solve_equilibrium(s: &DimensionlessSystem, g: &CompartmentGrid) -> Result<StateVector> {
    MembraneModel::new(s.clone(), g.clone())?.equilibrium(&SolveSettings::default())
}

pub fn residual(
    s: &DimensionlessSystem,
    g: &CompartmentGrid,
    state: &StateVector,
    drive: &DriveMode,
    state_prev: &StateVector,
    dt: f64,
) -> Result<Vec<f64>> {
    MembraneModel::new(s.clone(), g.clone())?.residual(state, drive, state_prev, dt)
}

pub fn step_transient(
    s: &DimensionlessSystem,
    g: &CompartmentGrid,
    state: &StateVector,
    drive: &DriveMode,
    dt: f64,
    settings: &SolveSettings,
) -> Result<StateVector> {
    MembraneModel::new(s.clone(), g.clone())?.step(state, drive, dt, settings)
}

pub fn simulate(
    s: &DimensionlessSystem,
    g: &CompartmentGrid,
    drive: &DriveMode,
    tau_end: f64,
    settings: &SolveSettings,
) -> Result<Simulation> {
    MembraneModel::new(s.clone(), g.clone())?.simulate(drive, tau_end, settings)
}

pub fn membrane_exit_flux(s: &DimensionlessSystem, g: &CompartmentGrid, state: &StateVector) -> Result<f64> {
    let model = MembraneModel::new(s.clone(), g.clone())?;
    model.check(state)?;
    Ok(model.exit_flux(state))
}

pub fn total_current(
    s: &DimensionlessSystem,
    g: &CompartmentGrid,
    state: &StateVector,
    displacement_rate: f64,
) -> Result<f64> {
    let model = MembraneModel::new(s.clone(), g.clone())?;
    model.check(state)?;
    Ok(model.total_current(state, displacement_rate))
}

#[cfg(test)]
mod tests;
