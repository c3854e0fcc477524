//! Steady states, metastable dynamics and the inviscid limit of the
//! nonlinear-diffusion Burgers-Sivashinsky problem
//!
//! ```text
//! u_t = eps (h(u) u_x)_x - f(u)_x + f'(u),   u(0, t) = u(ell, t) = 0.
//! ```

pub mod error;
pub mod exec;
pub mod experiments;
pub mod grid;
pub mod hyperbolic;
pub mod io;
pub mod model;
mod ode;
pub mod parabolic;
pub mod steady;

pub use error::{Error, Result};
pub use exec::Execution;
pub use grid::{GridFunction, SignChange};
pub use model::{alpha_bar, apply_l, existence_threshold, validate_assumptions, Diffusion, Flux, ModelFunctions, ProblemSpec};
