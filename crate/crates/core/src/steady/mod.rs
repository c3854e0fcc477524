//! Steady states of the stationary problem `eps (h(u) u')' = f(u)' - f'(u)`
//! with zero Dirichlet data.

mod branches;
mod checks;
mod shoot;

pub use branches::{
    boundary_slope_scaling, epsilon_sweep, glue_slopes, positive_arc, solve, solve_n_zero, solve_negative,
    solve_one_zero, solve_positive, FirstSign, PositiveArc, SteadyDiagnostics, SteadyKind, SteadyState,
    GLUE_TOLERANCE, LENGTH_TOLERANCE, SCAN_POINTS,
};
pub use checks::{check_invariants, distance_to_line, ordering_gap, Violation};
pub use shoot::{
    default_step, length_map, shoot, LengthMap, PositiveProfile, ShootOutcome, ShootResult,
    DEFAULT_STEPS_PER_LENGTH, LENGTH_MAP_TOLERANCE,
};
