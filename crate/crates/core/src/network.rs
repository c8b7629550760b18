//! Circuit-network element values and the face relations they imply.
//!
//! Each compartment `k` carries, per species, two half-cell diffusion
//! resistors `R_d = δ_k / (2 D)`, a capacitor `C_d = δ_k` holding the
//! concentration, and two voltage-controlled sources for electromigration
//! that use the concentration at the face they connect to. The electrical
//! line has two half-cell resistors `R_p = δ_k / (2ε)` and a source
//! `GJ_p = -δ_k ρ_k` injecting the stored charge.
//!
//! Eliminating the face nodes by Kirchhoff's current law gives closed-form
//! face fluxes, which [`Discretization`] evaluates together with their
//! partial derivatives.

use crate::error::{Error, Result};
use crate::grid::CompartmentGrid;
use crate::solver::StateVector;
use crate::units::DimensionlessSystem;

/// Element values of the network at one state.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkElements {
    /// Diffusion resistance `[species][compartment]` (each of the two halves).
    pub diffusion_resistance: Vec<Vec<f64>>,
    pub capacitance: Vec<f64>,
    /// Medium resistance per half compartment.
    pub medium_resistance: Vec<f64>,
    /// Stored-charge source `GJ_p`.
    pub charge_source: Vec<f64>,
    /// Electromigration sources `[species][compartment]`, `[entering, leaving]`.
    pub migration_source: Vec<Vec<[f64; 2]>>,
}

/// A face flux together with its partial derivatives with respect to the
/// concentration and potential of the node on each side.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FluxEval {
    pub value: f64,
    pub dc_left: f64,
    pub dc_right: f64,
    pub dphi_left: f64,
    pub dphi_right: f64,
}

/// Per-compartment coefficients of the network, precomputed from a system
/// and a grid.
#[derive(Debug, Clone)]
pub struct Discretization {
    widths: Vec<f64>,
    /// `[compartment][species]`
    diffusion: Vec<Vec<f64>>,
    theta: Vec<f64>,
    valences: Vec<f64>,
    permittivity: f64,
    bath: f64,
}

impl Discretization {
    pub fn new(s: &DimensionlessSystem, g: &CompartmentGrid) -> Result<Self> {
        s.validate()?;
        let diffusion = g
            .regions()
            .iter()
            .map(|r| {
                if r.is_membrane() {
                    s.diffusion_membrane.clone()
                } else {
                    s.diffusion_solution.clone()
                }
            })
            .collect();
        let theta = g
            .regions()
            .iter()
            .map(|r| if r.is_membrane() { s.fixed_charge } else { 0.0 })
            .collect();
        Ok(Self {
            widths: g.widths().to_vec(),
            diffusion,
            theta,
            valences: s.valences.iter().map(|&z| z as f64).collect(),
            permittivity: s.permittivity,
            bath: s.bulk_concentration,
        })
    }

    pub fn len(&self) -> usize {
        self.widths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.widths.is_empty()
    }

    pub fn species(&self) -> usize {
        self.valences.len()
    }

    pub fn width(&self, k: usize) -> f64 {
        self.widths[k]
    }

    pub fn valence(&self, i: usize) -> f64 {
        self.valences[i]
    }

    pub fn theta(&self, k: usize) -> f64 {
        self.theta[k]
    }

    pub fn bath(&self) -> f64 {
        self.bath
    }

    pub fn diffusion(&self, i: usize, k: usize) -> f64 {
        self.diffusion[k][i]
    }

    /// Half-cell diffusion conductance `2 D / δ`.
    fn half_conductance(&self, i: usize, k: usize) -> f64 {
        2.0 * self.diffusion[k][i] / self.widths[k]
    }

    /// Weights of `φ_k` and `φ_{k+1}` in the potential of the face between
    /// them (displacement continuity through the two half-cell resistors).
    fn face_weights(&self, k: usize) -> (f64, f64) {
        let (wl, wr) = (self.widths[k], self.widths[k + 1]);
        (wr / (wl + wr), wl / (wl + wr))
    }

    pub fn face_potential(&self, k: usize, phi_k: f64, phi_k1: f64) -> f64 {
        let (wl, wr) = self.face_weights(k);
        wl * phi_k + wr * phi_k1
    }

    /// Concentration at the face between `k` and `k + 1` that balances the
    /// two half-cell fluxes.
    pub fn face_concentration(&self, i: usize, k: usize, c: [f64; 2], phi: [f64; 2]) -> f64 {
        let z = self.valences[i];
        let (wl, wr) = self.face_weights(k);
        let (al, ar) = (self.half_conductance(i, k), self.half_conductance(i, k + 1));
        let delta = phi[0] - phi[1];
        let alpha = 1.0 - z * wr * delta;
        let beta = 1.0 + z * wl * delta;
        (al * c[0] + ar * c[1]) / (al * alpha + ar * beta)
    }

    /// Flux of species `i` in +ξ across the face between `k` and `k + 1`.
    pub fn interior_flux(&self, i: usize, k: usize, c: [f64; 2], phi: [f64; 2]) -> FluxEval {
        let z = self.valences[i];
        let (wl, wr) = self.face_weights(k);
        let (al, ar) = (self.half_conductance(i, k), self.half_conductance(i, k + 1));
        let delta = phi[0] - phi[1];
        let alpha = 1.0 - z * wr * delta;
        let beta = 1.0 + z * wl * delta;
        let den = al * alpha + ar * beta;
        if !(den > 0.0) {
            // Potential drop across the face is too large for the two-point
            // scheme; report a non-finite flux so Newton backs off.
            return FluxEval {
                value: f64::NAN,
                ..FluxEval::default()
            };
        }
        let g = al * ar;
        let p = beta * c[0] - alpha * c[1];
        let value = g * p / den;
        let dp = z * (wl * c[0] + wr * c[1]);
        let dden = z * (ar * wl - al * wr);
        let ddelta = g * (dp * den - p * dden) / (den * den);
        FluxEval {
            value,
            dc_left: g * beta / den,
            dc_right: -g * alpha / den,
            dphi_left: ddelta,
            dphi_right: -ddelta,
        }
    }

    /// Flux into compartment 0 from the left bath held at `c0`, `φ_A`.
    /// The "left" node of the returned derivatives is the boundary.
    pub fn left_boundary_flux(&self, i: usize, c: f64, phi: f64, phi_boundary: f64) -> FluxEval {
        let z = self.valences[i];
        let a = self.half_conductance(i, 0);
        let c0 = self.bath;
        FluxEval {
            value: a * ((c0 - c) + z * c0 * (phi_boundary - phi)),
            dc_left: 0.0,
            dc_right: -a,
            dphi_left: a * z * c0,
            dphi_right: -a * z * c0,
        }
    }

    /// Flux out of the last compartment into the grounded right bath.
    pub fn right_boundary_flux(&self, i: usize, c: f64, phi: f64) -> FluxEval {
        let z = self.valences[i];
        let k = self.len() - 1;
        let a = self.half_conductance(i, k);
        let c0 = self.bath;
        FluxEval {
            value: a * ((c - c0) + z * c0 * phi),
            dc_left: a,
            dc_right: 0.0,
            dphi_left: a * z * c0,
            dphi_right: 0.0,
        }
    }

    /// Series conductance of the electrical line between the centres of
    /// `k` and `k + 1`; the displacement there is `G (φ_k - φ_{k+1})`.
    pub fn displacement_conductance(&self, k: usize) -> f64 {
        self.permittivity / (0.5 * (self.widths[k] + self.widths[k + 1]))
    }

    /// Conductance of the half cell between a boundary and compartment `k`.
    pub fn boundary_displacement_conductance(&self, k: usize) -> f64 {
        2.0 * self.permittivity / self.widths[k]
    }

    pub fn charge_density(&self, k: usize, conc: impl Fn(usize) -> f64) -> f64 {
        (0..self.species()).map(|i| self.valences[i] * conc(i)).sum::<f64>() - self.theta[k]
    }

    /// Half-cell medium resistance `δ / (2ε)`.
    pub fn medium_resistance(&self, k: usize) -> f64 {
        self.widths[k] / (2.0 * self.permittivity)
    }

    pub fn diffusion_resistance(&self, i: usize, k: usize) -> f64 {
        1.0 / self.half_conductance(i, k)
    }
}

/// Network element values at `state`.
pub fn network_elements(g: &CompartmentGrid, s: &DimensionlessSystem, state: &StateVector) -> Result<NetworkElements> {
    let disc = Discretization::new(s, g)?;
    state.check_shape(disc.len(), disc.species())?;
    let n = disc.len();
    let m = disc.species();
    let c0 = disc.bath();

    let mut migration = vec![vec![[0.0; 2]; n]; m];
    for (i, sources) in migration.iter_mut().enumerate() {
        let z = disc.valence(i);
        for (k, src) in sources.iter_mut().enumerate() {
            let d = disc.diffusion(i, k);
            let half = 0.5 * disc.width(k);
            let phi_k = state.phi[k];
            let (c_left, phi_left) = if k == 0 {
                (c0, state.phi_left)
            } else {
                let cc = [state.conc[i][k - 1], state.conc[i][k]];
                let pp = [state.phi[k - 1], phi_k];
                (
                    disc.face_concentration(i, k - 1, cc, pp),
                    disc.face_potential(k - 1, pp[0], pp[1]),
                )
            };
            let (c_right, phi_right) = if k == n - 1 {
                (c0, 0.0)
            } else {
                let cc = [state.conc[i][k], state.conc[i][k + 1]];
                let pp = [phi_k, state.phi[k + 1]];
                (
                    disc.face_concentration(i, k, cc, pp),
                    disc.face_potential(k, pp[0], pp[1]),
                )
            };
            src[0] = -d * z * c_left * (phi_k - phi_left) / half;
            src[1] = d * z * c_right * (phi_k - phi_right) / half;
        }
    }

    Ok(NetworkElements {
        diffusion_resistance: (0..m)
            .map(|i| (0..n).map(|k| disc.diffusion_resistance(i, k)).collect())
            .collect(),
        capacitance: (0..n).map(|k| disc.width(k)).collect(),
        medium_resistance: (0..n).map(|k| disc.medium_resistance(k)).collect(),
        charge_source: (0..n)
            .map(|k| -disc.width(k) * disc.charge_density(k, |i| state.conc[i][k]))
            .collect(),
        migration_source: migration,
    })
}

/// Shape check used by the element and solver entry points.
pub(crate) fn shape_error(what: &str, expected: usize, got: usize) -> Error {
    Error::Shape(format!("{what}: expected {expected}, got {got}"))
}
