//! Pseudospectral simulation and diagnostics for defocusing Gross-Pitaevskii
//! on the 4-torus and cubic-quintic NLS on the 3-torus, written in the
//! excitation variable `v = u - 1` around the unit background.

pub mod energy;
pub mod equations;
pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod integrator;
pub mod io;
pub mod perturbation;
pub mod spectral;
pub mod strichartz;

pub use num_complex::Complex64;

pub use energy::EnergyReport;
pub use equations::{EquationSpec, GeneralCqParams, ReducedCq};
pub use error::{Error, Result};
pub use field::ComplexField;
pub use grid::Grid;
pub use integrator::{evolve, strang_step, Diagnostics, OrderEstimate, StepConfig, Trajectory};
pub use perturbation::{compare_runs, scaling_study, uniqueness_probe, ComparisonSetup, PerturbationReport};
pub use strichartz::{Exponent, FieldSelector, LebesguePair, Partition};
