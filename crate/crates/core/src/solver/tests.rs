use super::*;
use crate::grid::{build_scaled_grid, GridCounts};

fn small_model() -> MembraneModel {
    let s = DimensionlessSystem::default();
    let g = CompartmentGrid::uniform(10, 10, 10, 1.0).unwrap();
    MembraneModel::new(s, g).unwrap()
}

#[test]
fn equilibrium_has_no_current_and_donnan_core() {
    let model = small_model();
    let eq = model.equilibrium(&SolveSettings::default()).unwrap();
    let fluxes = model.face_fluxes(&eq, 0);
    assert!(fluxes.iter().all(|j| j.abs() < 1e-9), "{fluxes:?}");
    let mid = model.grid().mid_membrane();
    let golden = 0.5 * (1.0 + 5f64.sqrt());
    assert!((eq.conc[0][mid] - golden).abs() < 1e-3);
    assert!((eq.conc[1][mid] - (golden - 1.0)).abs() < 1e-3);
}

#[test]
fn step_residual_vanishes_after_step() {
    let model = small_model();
    let settings = SolveSettings::default();
    let eq = model.equilibrium(&settings).unwrap();
    let drive = DriveMode::Potentiostatic(DriveSignal::step(2.0));
    let next = model.step(&eq, &drive, 0.05, &settings).unwrap();
    let r = model.residual(&next, &drive, &eq, 0.05).unwrap();
    assert!(r.iter().all(|v| v.abs() < 1e-9));
    assert_eq!(next.phi_left, 2.0);
    assert!((next.tau - 0.05).abs() < 1e-15);
}

#[test]
fn galvanostatic_step_carries_the_current() {
    let model = small_model();
    let settings = SolveSettings::default();
    let eq = model.equilibrium(&settings).unwrap();
    let drive = DriveMode::Galvanostatic(DriveSignal::step(0.01));
    let dt = 0.1;
    let next = model.step(&eq, &drive, dt, &settings).unwrap();
    let currents = model.face_currents(&next, &eq, dt);
    for i in currents {
        assert!((i - 0.01).abs() < 1e-8, "{i}");
    }
}

#[test]
fn mass_is_conserved_per_step() {
    let model = small_model();
    let settings = SolveSettings::default();
    let drive = DriveMode::Potentiostatic(DriveSignal::step(3.0));
    let mut worst = 0.0f64;
    model
        .simulate_observed(&drive, 2.0, &settings, |prev, next, dt| {
            for e in model.mass_imbalance(next, prev, dt) {
                worst = worst.max(e.abs() * dt);
            }
        })
        .unwrap();
    assert!(worst < 1e-9, "{worst}");
}

#[test]
fn series_is_uniform_and_lands_on_outputs() {
    let model = small_model();
    let settings = SolveSettings {
        output_times: vec![0.0, 0.35, 1.0],
        series_dt: 0.25,
        ..SolveSettings::default()
    };
    let drive = DriveMode::Potentiostatic(DriveSignal::square(1.0, 0.6, 0.5).unwrap());
    let sim = model.simulate(&drive, 1.0, &settings).unwrap();
    assert_eq!(sim.series.tau, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    let taus: Vec<f64> = sim.snapshots.iter().map(|s| s.tau).collect();
    assert_eq!(taus, vec![0.0, 0.35, 1.0]);
    assert_eq!(sim.series.drive[1], 1.0);
    assert_eq!(sim.series.drive[2], 0.0);
}

#[test]
fn steady_flux_grows_with_voltage() {
    let model = small_model();
    let settings = SolveSettings::default();
    let eq = model.equilibrium(&settings).unwrap();
    let mut last = 0.0;
    for v in [1.0, 2.0, 4.0] {
        let st = model
            .steady_from(&eq, BoundaryControl::Potential(v), &settings)
            .unwrap();
        let j = model.exit_flux(&st);
        assert!(j > last);
        last = j;
    }
}

#[test]
fn scaled_grid_equilibrium() {
    let s = DimensionlessSystem {
        membrane_thickness: 25.0,
        layer_width: 20.0,
        ..DimensionlessSystem::default()
    };
    let g = build_scaled_grid(25.0, 20.0, GridCounts::default()).unwrap();
    let eq = solve_equilibrium(&s, &g).unwrap();
    let j = membrane_exit_flux(&s, &g, &eq).unwrap();
    assert!(j.abs() < 1e-9);
}

#[test]
fn shape_mismatch_is_reported() {
    let model = small_model();
    let mut st = StateVector::uniform(model.system(), model.grid());
    st.phi.pop();
    assert!(matches!(
        model.step(
            &st,
            &DriveMode::Potentiostatic(DriveSignal::step(1.0)),
            0.1,
            &SolveSettings::default()
        ),
        Err(Error::Shape(_))
    ));
}

#[test]
fn bad_settings_rejected() {
    let s = SolveSettings {
        adapt_factor: 3.0,
        ..SolveSettings::default()
    };
    assert!(s.validate().is_err());
}
