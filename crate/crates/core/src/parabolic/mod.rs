//! Time integration of the viscous problem on a uniform grid.

mod evolve;
mod initial;
mod scheme;

pub use evolve::{
    discrete_steady, evolve, implicit_step, zero_crossing_series, EvolveRecord, StepperConfig, Termination,
};
pub use initial::{
    classify_grid, classify_initial, datum_jump, datum_kinks, load_initial, parse_initial, piecewise_initial, DataClass, DataKind,
    InitialData,
};
pub use scheme::{godunov_flux, semidiscrete_rhs, Tridiagonal};
