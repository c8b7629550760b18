//! Physical parameter sets, the scaling basis, and the map between physical
//! and dimensionless variables.
//!
//! Lengths are measured in Debye lengths, concentrations in the bulk
//! concentration, potentials in thermal voltages `RT/F`, and time in
//! `λ²/D_a`. The simulator itself never sees SI units; they only appear at
//! the I/O boundary through [`ScalingBasis`].

use crate::error::{Error, Result};

/// Physical constants, SI units.
pub mod constants {
    /// Faraday constant, C/mol.
    pub const FARADAY: f64 = 96485.33212;
    /// Molar gas constant, J/(mol K).
    pub const GAS_CONSTANT: f64 = 8.31446;
    /// Boltzmann constant, J/K.
    pub const BOLTZMANN: f64 = 1.380649e-23;
    /// Avogadro constant, 1/mol.
    pub const AVOGADRO: f64 = 6.02214076e23;
    /// Elementary charge, C.
    pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;
    /// Vacuum permittivity, F/m.
    pub const VACUUM_PERMITTIVITY: f64 = 8.8541878128e-12;
}

use constants::{FARADAY, GAS_CONSTANT};

/// Membrane system in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    /// Absolute permittivity, C²/(N m²).
    pub permittivity: f64,
    /// Temperature, K.
    pub temperature: f64,
    /// Concentration of both baths, mol/m³.
    pub bulk_concentration: f64,
    /// Diffusion coefficients in solution, m²/s (one per species).
    pub diffusion_solution: Vec<f64>,
    /// Diffusion coefficients in the membrane, m²/s (one per species).
    pub diffusion_membrane: Vec<f64>,
    /// Membrane thickness, m.
    pub membrane_thickness: f64,
    /// Width of each bath layer, m.
    pub boundary_layer_width: f64,
    /// Fixed (negative) charge group concentration, mol/m³.
    pub fixed_charge: f64,
    pub valences: Vec<i32>,
}

impl PhysicalParams {
    fn validate(&self) -> Result<()> {
        positive("permittivity", self.permittivity)?;
        positive("temperature", self.temperature)?;
        positive("bulk_concentration", self.bulk_concentration)?;
        positive("membrane_thickness", self.membrane_thickness)?;
        positive("boundary_layer_width", self.boundary_layer_width)?;
        positive("fixed_charge", self.fixed_charge)?;
        check_species(&self.valences, &self.diffusion_solution, &self.diffusion_membrane)
    }
}

/// Characteristic scales used to remove units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingBasis {
    /// Diffusion coefficient scale `D_a`, m²/s.
    pub d_a: f64,
    /// Concentration scale `c_bulk`, mol/m³.
    pub c_bulk: f64,
    /// Length scale, m. Normally the Debye length.
    pub lambda: f64,
    /// Temperature, K. Sets the thermal voltage used for potentials.
    pub temperature: f64,
}

impl ScalingBasis {
    /// Basis whose length scale is the Debye length of `p`, so that the
    /// dimensionless permittivity comes out as exactly one.
    pub fn from_physical(p: &PhysicalParams, d_a: f64) -> Result<Self> {
        positive("d_a", d_a)?;
        Ok(Self {
            d_a,
            c_bulk: p.bulk_concentration,
            lambda: compute_debye_length(p)?,
            temperature: p.temperature,
        })
    }

    /// Basis from a relative permittivity, the way noise scenarios are specified.
    pub fn from_relative_permittivity(
        d_a: f64,
        c_bulk: f64,
        relative_permittivity: f64,
        temperature: f64,
    ) -> Result<Self> {
        positive("d_a", d_a)?;
        positive("relative_permittivity", relative_permittivity)?;
        let lambda = debye_length(
            relative_permittivity * constants::VACUUM_PERMITTIVITY,
            temperature,
            c_bulk,
        )?;
        Ok(Self {
            d_a,
            c_bulk,
            lambda,
            temperature,
        })
    }

    fn validate(&self) -> Result<()> {
        positive("d_a", self.d_a)?;
        positive("c_bulk", self.c_bulk)?;
        positive("lambda", self.lambda)?;
        positive("temperature", self.temperature)
    }

    /// Thermal voltage `RT/F`, V.
    pub fn thermal_voltage(&self) -> f64 {
        GAS_CONSTANT * self.temperature / FARADAY
    }

    pub fn time_to_physical(&self, tau: f64) -> f64 {
        tau * self.lambda * self.lambda / self.d_a
    }

    pub fn flux_to_physical(&self, flux: f64) -> f64 {
        flux * self.d_a * self.c_bulk / self.lambda
    }

    pub fn current_to_physical(&self, current: f64) -> f64 {
        current * FARADAY * self.d_a * self.c_bulk / self.lambda
    }

    pub fn potential_to_physical(&self, phi: f64) -> f64 {
        phi * self.thermal_voltage()
    }

    /// Unit of capacitance per area, F/m².
    pub fn capacitance_unit(&self) -> f64 {
        FARADAY * FARADAY * self.c_bulk * self.lambda / (GAS_CONSTANT * self.temperature)
    }

    /// Unit of area-specific resistance, Ω m².
    pub fn resistance_unit(&self) -> f64 {
        self.lambda * GAS_CONSTANT * self.temperature / (FARADAY * FARADAY * self.d_a * self.c_bulk)
    }
}

/// Scaled membrane system. Lengths are in units of the scaling length.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionlessSystem {
    /// Scaled fixed charge concentration `X`.
    pub fixed_charge: f64,
    pub valences: Vec<i32>,
    pub diffusion_solution: Vec<f64>,
    pub diffusion_membrane: Vec<f64>,
    pub membrane_thickness: f64,
    /// Width of each bath layer.
    pub layer_width: f64,
    /// Scaled bath concentration `c0`.
    pub bulk_concentration: f64,
    pub permittivity: f64,
}

impl Default for DimensionlessSystem {
    /// The reference cation-exchange membrane: X = 1, z = (+1, -1),
    /// d = 50, δ = 100, D_S = 1, D_M = 0.1, c0 = 1, ε = 1.
    fn default() -> Self {
        Self {
            fixed_charge: 1.0,
            valences: vec![1, -1],
            diffusion_solution: vec![1.0, 1.0],
            diffusion_membrane: vec![0.1, 0.1],
            membrane_thickness: 50.0,
            layer_width: 100.0,
            bulk_concentration: 1.0,
            permittivity: 1.0,
        }
    }
}

impl DimensionlessSystem {
    pub fn species_count(&self) -> usize {
        self.valences.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fixed_charge >= 0.0) {
            return Err(Error::invalid("fixed_charge", "must be non-negative"));
        }
        positive("membrane_thickness", self.membrane_thickness)?;
        positive("layer_width", self.layer_width)?;
        positive("bulk_concentration", self.bulk_concentration)?;
        positive("permittivity", self.permittivity)?;
        check_species(&self.valences, &self.diffusion_solution, &self.diffusion_membrane)
    }

    /// Membrane interior concentrations at zero current: the pair satisfying
    /// local electroneutrality against the fixed charge together with
    /// Boltzmann partitioning from the bath. Returns `(concentrations, potential)`
    /// where the potential is the Donnan potential relative to the bath.
    pub fn donnan(&self) -> (Vec<f64>, f64) {
        let c0 = self.bulk_concentration;
        let charge = |phi: f64| -> f64 {
            self.valences
                .iter()
                .map(|&z| z as f64 * c0 * (-(z as f64) * phi).exp())
                .sum::<f64>()
                - self.fixed_charge
        };
        // charge(phi) is strictly decreasing in phi; bracket and bisect.
        let (mut lo, mut hi) = (-1.0, 1.0);
        while charge(lo) < 0.0 {
            lo *= 2.0;
        }
        while charge(hi) > 0.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if charge(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let phi = 0.5 * (lo + hi);
        let conc = self.valences.iter().map(|&z| c0 * (-(z as f64) * phi).exp()).collect();
        (conc, phi)
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be positive, got {value}")))
    }
}

fn check_species(valences: &[i32], solution: &[f64], membrane: &[f64]) -> Result<()> {
    if valences.is_empty() {
        return Err(Error::invalid("valences", "need at least one species"));
    }
    if solution.len() != valences.len() || membrane.len() != valences.len() {
        return Err(Error::invalid(
            "diffusion",
            "one solution and one membrane coefficient per species",
        ));
    }
    if valences.contains(&0) {
        return Err(Error::invalid("valences", "species must be charged"));
    }
    for &d in solution.iter().chain(membrane) {
        positive("diffusion", d)?;
    }
    Ok(())
}

fn debye_length(permittivity: f64, temperature: f64, concentration: f64) -> Result<f64> {
    positive("permittivity", permittivity)?;
    positive("temperature", temperature)?;
    positive("bulk_concentration", concentration)?;
    Ok((permittivity * GAS_CONSTANT * temperature / (FARADAY * FARADAY * concentration)).sqrt())
}

/// Debye length `sqrt(ε' R T / (F² c_bulk))` in metres.
pub fn compute_debye_length(p: &PhysicalParams) -> Result<f64> {
    p.validate()?;
    debye_length(p.permittivity, p.temperature, p.bulk_concentration)
}

pub fn nondimensionalize(p: &PhysicalParams, b: &ScalingBasis) -> Result<DimensionlessSystem> {
    p.validate()?;
    b.validate()?;
    let permittivity =
        GAS_CONSTANT * p.temperature * p.permittivity / (FARADAY * FARADAY * b.c_bulk * b.lambda * b.lambda);
    Ok(DimensionlessSystem {
        fixed_charge: p.fixed_charge / b.c_bulk,
        valences: p.valences.clone(),
        diffusion_solution: p.diffusion_solution.iter().map(|d| d / b.d_a).collect(),
        diffusion_membrane: p.diffusion_membrane.iter().map(|d| d / b.d_a).collect(),
        membrane_thickness: p.membrane_thickness / b.lambda,
        layer_width: p.boundary_layer_width / b.lambda,
        bulk_concentration: p.bulk_concentration / b.c_bulk,
        permittivity,
    })
}

/// Inverse of [`nondimensionalize`]. The temperature is taken from the basis.
pub fn redimensionalize(s: &DimensionlessSystem, b: &ScalingBasis) -> Result<PhysicalParams> {
    b.validate()?;
    Ok(PhysicalParams {
        permittivity: s.permittivity * FARADAY * FARADAY * b.c_bulk * b.lambda * b.lambda
            / (GAS_CONSTANT * b.temperature),
        temperature: b.temperature,
        bulk_concentration: s.bulk_concentration * b.c_bulk,
        diffusion_solution: s.diffusion_solution.iter().map(|d| d * b.d_a).collect(),
        diffusion_membrane: s.diffusion_membrane.iter().map(|d| d * b.d_a).collect(),
        membrane_thickness: s.membrane_thickness * b.lambda,
        boundary_layer_width: s.layer_width * b.lambda,
        fixed_charge: s.fixed_charge * b.c_bulk,
        valences: s.valences.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn water_like() -> PhysicalParams {
        PhysicalParams {
            permittivity: 6.95e-10,
            temperature: 298.0,
            bulk_concentration: 100.0,
            diffusion_solution: vec![2e-9, 2e-9],
            diffusion_membrane: vec![2e-10, 2e-10],
            membrane_thickness: 6.8e-8,
            boundary_layer_width: 1.36e-7,
            fixed_charge: 100.0,
            valences: vec![1, -1],
        }
    }

    #[test]
    fn debye_length_of_decimolar_water() {
        // sqrt(6.95e-10 * 8.31446 * 298 / (96485.33212^2 * 100)), evaluated by hand
        let lambda = compute_debye_length(&water_like()).unwrap();
        assert_relative_eq!(lambda, 1.3600543e-9, max_relative = 1e-7);
    }

    #[test]
    fn quadrupling_concentration_halves_debye_length() {
        let p = water_like();
        let mut q = p.clone();
        q.bulk_concentration *= 4.0;
        let ratio = compute_debye_length(&q).unwrap() / compute_debye_length(&p).unwrap();
        assert_relative_eq!(ratio, 0.5, max_relative = 1e-14);
    }

    #[test]
    fn debye_basis_gives_unit_permittivity() {
        let p = water_like();
        let b = ScalingBasis::from_physical(&p, 2e-9).unwrap();
        let s = nondimensionalize(&p, &b).unwrap();
        assert_relative_eq!(s.permittivity, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn reference_values_scale_as_expected() {
        let p = water_like();
        let b = ScalingBasis::from_physical(&p, 2e-9).unwrap();
        let s = nondimensionalize(&p, &b).unwrap();
        assert_relative_eq!(s.bulk_concentration, 1.0);
        assert_relative_eq!(s.diffusion_membrane[0], 0.1, max_relative = 1e-14);
        assert_relative_eq!(s.fixed_charge, 1.0);
    }

    #[test]
    fn unit_flux_redimensionalizes_to_flux_scale() {
        let b = ScalingBasis {
            d_a: 2e-9,
            c_bulk: 100.0,
            lambda: 1e-9,
            temperature: 298.0,
        };
        assert_relative_eq!(b.flux_to_physical(1.0), 2e-9 * 100.0 / 1e-9);
        let s = DimensionlessSystem::default();
        let p = redimensionalize(&s, &b).unwrap();
        assert_relative_eq!(p.bulk_concentration, b.c_bulk);
    }

    #[test]
    fn rejects_non_positive_parameters() {
        let mut p = water_like();
        p.temperature = 0.0;
        assert!(matches!(compute_debye_length(&p), Err(Error::InvalidParameter { .. })));
        let b = ScalingBasis {
            d_a: 0.0,
            c_bulk: 1.0,
            lambda: 1.0,
            temperature: 1.0,
        };
        assert!(nondimensionalize(&water_like(), &b).is_err());
        assert!(redimensionalize(&DimensionlessSystem::default(), &b).is_err());
    }

    #[test]
    fn donnan_pair_for_unit_fixed_charge() {
        let (c, phi) = DimensionlessSystem::default().donnan();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert_relative_eq!(c[0], golden, max_relative = 1e-12);
        assert_relative_eq!(c[1], golden - 1.0, max_relative = 1e-12);
        assert_relative_eq!(phi, -golden.ln(), max_relative = 1e-12);
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(
            eps in 1e-11f64..1e-9,
            temp in 250.0f64..400.0,
            conc in 1.0f64..1000.0,
            d1 in 1e-10f64..1e-8,
            dm in 1e-12f64..1e-9,
            thick in 1e-8f64..1e-5,
            fixed in 1.0f64..1000.0,
            d_a in 1e-10f64..1e-8,
        ) {
            let p = PhysicalParams {
                permittivity: eps,
                temperature: temp,
                bulk_concentration: conc,
                diffusion_solution: vec![d1, 2.0 * d1],
                diffusion_membrane: vec![dm, dm],
                membrane_thickness: thick,
                boundary_layer_width: 2.0 * thick,
                fixed_charge: fixed,
                valences: vec![1, -1],
            };
            let b = ScalingBasis::from_physical(&p, d_a).unwrap();
            let q = redimensionalize(&nondimensionalize(&p, &b).unwrap(), &b).unwrap();
            let rel = |a: f64, b: f64| ((a - b) / a).abs();
            prop_assert!(rel(p.permittivity, q.permittivity) < 1e-12);
            prop_assert!(rel(p.bulk_concentration, q.bulk_concentration) < 1e-12);
            prop_assert!(rel(p.membrane_thickness, q.membrane_thickness) < 1e-12);
            prop_assert!(rel(p.fixed_charge, q.fixed_charge) < 1e-12);
            for i in 0..2 {
                prop_assert!(rel(p.diffusion_solution[i], q.diffusion_solution[i]) < 1e-12);
                prop_assert!(rel(p.diffusion_membrane[i], q.diffusion_membrane[i]) < 1e-12);
            }
        }

        #[test]
        fn debye_length_is_homogeneous(k in 1e-3f64..1e3) {
            let p = water_like();
            let mut q = p.clone();
            q.permittivity *= k;
            q.bulk_concentration *= k;
            let a = compute_debye_length(&p).unwrap();
            let b = compute_debye_length(&q).unwrap();
            prop_assert!(((a - b) / a).abs() < 1e-13);
        }
    }
}
