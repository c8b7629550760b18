//! Dimensionless Nernst-Planck-Poisson network model of an ion-exchange
//! membrane transmitter, with drive signals, noise and SNR estimates, and a
//! 1D advection-diffusion channel.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod channel;
pub mod config;
pub mod drive;
pub mod error;
pub mod format;
pub mod grid;
pub mod netlist;
pub mod network;
pub mod noise;
pub mod scenario;
pub mod solver;
pub mod units;

pub use drive::DriveSignal;
pub use error::{Error, Result};
pub use grid::{build_reference_grid, build_scaled_grid, CompartmentGrid, GridCounts, Region};
pub use solver::{BoundaryControl, DriveMode, FluxSeries, MembraneModel, Simulation, SolveSettings, StateVector};
pub use units::{DimensionlessSystem, PhysicalParams, ScalingBasis};
