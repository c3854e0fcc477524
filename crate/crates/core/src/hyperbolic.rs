//! The inviscid limit `U_t + f(U)_x = f'(U)` with zero Dirichlet data:
//! Godunov finite volumes with Strang splitting of the source, long-time
//! limits by sign class, and comparison with the viscous solver.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::GridFunction;
use crate::model::{ModelFunctions, ProblemSpec};
use crate::ode::rk4_scalar;
use crate::parabolic::{classify_grid, evolve, godunov_flux, DataClass, InitialData, StepperConfig};

#[derive(Debug, Clone, Serialize)]
pub struct HyperConfig {
    pub cfl: f64,
    /// Turn the reaction term off (pure conservation law).
    pub source: bool,
    pub snapshot_start: f64,
    pub snapshot_factor: f64,
}

impl Default for HyperConfig {
    fn default() -> Self {
        Self { cfl: 0.8, source: true, snapshot_start: 0.1, snapshot_factor: 1.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LimitKind {
    /// `x - x0`.
    Line(f64),
    /// `x`.
    PosLine,
    /// `x - ell`.
    NegLine,
    /// `x` left of `ell/2`, `x - ell` right of it.
    TwoPiece,
}

#[derive(Debug, Clone, Serialize)]
pub struct HyperbolicRun {
    pub class: DataClass,
    pub snapshot_times: Vec<f64>,
    pub snapshots: Vec<GridFunction>,
    pub final_state: GridFunction,
    pub limit_kind: Option<LimitKind>,
    pub predicted_limit: Option<GridFunction>,
    pub steps: usize,
}

/// Tolerance for deciding that a type C zero sits at the midpoint.
pub const MIDPOINT_TOLERANCE: f64 = 1e-6;

/// Long-time limit of the entropy solution for data with at most one sign
/// change. For type C data the shock between the two lines moves with
/// speed `x0 - ell/2`, so the side holding the larger share of the domain
/// takes over.
pub fn asymptotic_limit(class: DataClass, ell: f64, n_cells: usize) -> Result<(LimitKind, GridFunction)> {
    let half = 0.5 * ell;
    let kind = match class {
        DataClass::APos => LimitKind::PosLine,
        DataClass::ANeg => LimitKind::NegLine,
        DataClass::B(x0) => LimitKind::Line(x0),
        DataClass::C(x0) if (x0 - half).abs() <= MIDPOINT_TOLERANCE * ell => LimitKind::TwoPiece,
        DataClass::C(x0) if x0 < half => LimitKind::NegLine,
        DataClass::C(_) => LimitKind::PosLine,
        DataClass::Other => {
            return Err(Error::UnsupportedModel(
                "asymptotics are only known for data with at most one sign change".into(),
            ))
        }
    };
    let dx = ell / n_cells as f64;
    let g = GridFunction::sample(ell, n_cells, |x| match kind {
        LimitKind::Line(x0) => x - x0,
        LimitKind::PosLine => x,
        LimitKind::NegLine => x - ell,
        LimitKind::TwoPiece if (x - half).abs() < 1e-9 * dx => 0.0,
        LimitKind::TwoPiece if x < half => x,
        LimitKind::TwoPiece => x - ell,
    });
    Ok((kind, g))
}

fn source_step(model: &ModelFunctions, u: &mut [f64], tau: f64) {
    let n = u.len() - 1;
    if model.has_quadratic_flux() {
        let g = tau.exp();
        u[1..n].iter_mut().for_each(|v| *v *= g);
    } else {
        u[1..n].iter_mut().for_each(|v| *v = rk4_scalar(|z| model.df(z), *v, tau));
    }
}

fn convection_step(model: &ModelFunctions, u: &mut [f64], dt_dx: f64, flux: &mut Vec<f64>) {
    let n = u.len() - 1;
    flux.clear();
    flux.extend((0..n).map(|i| godunov_flux(model, u[i], u[i + 1])));
    for i in 1..n {
        u[i] -= dt_dx * (flux[i] - flux[i - 1]);
    }
}

fn schedule(cfg: &HyperConfig, t_end: f64) -> Vec<f64> {
    let mut times = Vec::new();
    let mut t = cfg.snapshot_start;
    while t < t_end * (1.0 - 1e-12) {
        times.push(t);
        t *= cfg.snapshot_factor;
    }
    times.push(t_end);
    times
}

/// Integrates from `u0` to `t_end` on `n_cells` cells.
pub fn solve_hyperbolic(
    u0: &InitialData,
    model: &ModelFunctions,
    n_cells: usize,
    cfg: &HyperConfig,
    t_end: f64,
) -> Result<HyperbolicRun> {
    if !(cfg.cfl > 0.0 && cfg.cfl <= 0.9) {
        return Err(Error::InvalidInput(format!("CFL number must lie in (0, 0.9], got {}", cfg.cfl)));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidInput(format!("t_end must be positive, got {t_end}")));
    }
    if n_cells < 16 {
        return Err(Error::InvalidInput(format!("need at least 16 cells, got {n_cells}")));
    }
    if !(cfg.snapshot_start > 0.0 && cfg.snapshot_factor > 1.0) {
        return Err(Error::InvalidInput("snapshot schedule must start after 0 and grow".into()));
    }
    let start = u0.sample(n_cells);
    let class = classify_grid(&start);
    let ell = u0.ell;
    let dx = ell / n_cells as f64;
    let mut u = start.values().to_vec();
    let mut flux = Vec::with_capacity(n_cells);
    let mut snapshot_times = vec![0.0];
    let mut snapshots = vec![start];
    let mut t = 0.0;
    let mut steps = 0;
    for target in schedule(cfg, t_end) {
        while t < target {
            let speed = u.iter().fold(0.0_f64, |m, &v| m.max(model.df(v).abs()));
            let mut dt = if speed > 0.0 { cfg.cfl * dx / speed } else { target - t };
            if cfg.source {
                // keep the speed growth from the source within the step below 5%
                dt = dt.min(0.05);
            }
            if t + dt >= target {
                dt = target - t;
            }
            if cfg.source {
                source_step(model, &mut u, 0.5 * dt);
            }
            convection_step(model, &mut u, dt / dx, &mut flux);
            if cfg.source {
                source_step(model, &mut u, 0.5 * dt);
            }
            t = if t + dt >= target { target } else { t + dt };
            steps += 1;
        }
        snapshot_times.push(t);
        snapshots.push(GridFunction::from_raw(ell, u.clone()));
    }
    let (limit_kind, predicted_limit) = match asymptotic_limit(class, ell, n_cells) {
        Ok((k, g)) => (Some(k), Some(g)),
        Err(_) => (None, None),
    };
    Ok(HyperbolicRun {
        class,
        snapshot_times,
        snapshots,
        final_state: GridFunction::from_raw(ell, u),
        limit_kind,
        predicted_limit,
        steps,
    })
}

/// `max_t |U(t, x0)|` over the stored snapshots.
pub fn fixed_zero_check(run: &HyperbolicRun, x0: f64) -> f64 {
    run.snapshots.iter().fold(0.0_f64, |m, g| m.max(g.eval(x0).abs()))
}

/// Sup distance on `[0.1 ell, 0.9 ell]` between the final state and the
/// predicted limit.
pub fn limit_distance(run: &HyperbolicRun) -> Option<f64> {
    let ell = run.final_state.ell();
    run.predicted_limit.as_ref().map(|p| run.final_state.sup_distance_on(p, 0.1 * ell, 0.9 * ell))
}

/// Sup distance on `[0.1 ell, 0.9 ell]` at `t_probe` between the viscous
/// solution for each `eps` and the inviscid one, all on the grid of `template`.
pub fn vanishing_viscosity_compare(
    u0: &InitialData,
    template: &ProblemSpec,
    epsilons: &[f64],
    t_probe: f64,
    stepper: &StepperConfig,
    exec: Execution,
) -> Result<Vec<(f64, f64)>> {
    let hyper = solve_hyperbolic(u0, &template.model, template.n_cells, &HyperConfig::default(), t_probe)?;
    let reference = hyper.final_state;
    let ell = template.ell;
    exec.map(epsilons, |&eps| {
        let spec = template.with_epsilon(eps)?;
        let rec = evolve(u0, &spec, stepper, t_probe, &[])?;
        Ok((eps, rec.final_state.sup_distance_on(&reference, 0.1 * ell, 0.9 * ell)))
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Diffusion, Flux};

    fn burgers() -> ModelFunctions {
        ModelFunctions::builtin(Diffusion::Const, Flux::Quadratic, 1.0).unwrap()
    }

    #[test]
    fn zero_stays_zero() {
        let zero = crate::parabolic::piecewise_initial(&[(0.0, 0.0), (1.0, 0.0)]).unwrap();
        let run = solve_hyperbolic(&zero, &burgers(), 64, &HyperConfig::default(), 10.0).unwrap();
        assert_eq!(run.final_state.max_abs(), 0.0);
    }

    #[test]
    fn exact_source_on_constant_state() {
        // away from the boundaries a constant state only feels the source
        let mut u = vec![0.0, 0.3, 0.3, 0.3, 0.3, 0.0];
        source_step(&burgers(), &mut u, 0.25);
        assert!((u[2] - 0.3 * 0.25f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn limits_by_class() {
        let (k, g) = asymptotic_limit(DataClass::C(0.3), 1.0, 10).unwrap();
        assert_eq!(k, LimitKind::NegLine);
        assert!((g.values()[3] + 0.7).abs() < 1e-12);
        assert_eq!(asymptotic_limit(DataClass::C(0.7), 1.0, 10).unwrap().0, LimitKind::PosLine);
        let (k, g) = asymptotic_limit(DataClass::C(0.5), 1.0, 10).unwrap();
        assert_eq!(k, LimitKind::TwoPiece);
        assert_eq!(g.values()[5], 0.0);
        assert!((g.values()[4] - 0.4).abs() < 1e-12 && (g.values()[6] + 0.4).abs() < 1e-12);
        assert!(asymptotic_limit(DataClass::Other, 1.0, 10).is_err());
    }
}
