//! Backward-Euler time stepping with damped Newton and adaptive steps.

use serde::Serialize;

use super::initial::InitialData;
use super::scheme::{rhs_jacobian, rhs_values};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::model::ProblemSpec;
use crate::steady::{SteadyKind, SteadyState};

#[derive(Debug, Clone, Serialize)]
pub struct StepperConfig {
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub dt_growth: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Sup-norm distance to a target that counts as converged.
    pub steady_tol: f64,
    /// Bound on `dt * lambda`, where `lambda` is the largest positive
    /// eigenvalue of the linearized right-hand side.
    pub growth_resolution: f64,
    /// Local error target per step, estimated as `dt/2 |rhs(u_new) - rhs(u_old)|`.
    pub time_tol: f64,
    /// First snapshot time; later ones are spaced by `snapshot_factor`.
    pub snapshot_start: f64,
    pub snapshot_factor: f64,
    /// Additional snapshot times hit exactly.
    pub extra_snapshots: Vec<f64>,
}

impl Default for StepperConfig {
    fn default() -> Self {
        Self {
            dt_init: 1e-3,
            dt_min: 1e-10,
            dt_max: 1e3,
            dt_growth: 1.5,
            newton_tol: 1e-10,
            newton_max_iter: 25,
            steady_tol: 1e-3,
            growth_resolution: 0.2,
            time_tol: 2e-5,
            snapshot_start: 0.1,
            snapshot_factor: 1.5,
            extra_snapshots: Vec::new(),
        }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dt_init", self.dt_init),
            ("dt_min", self.dt_min),
            ("dt_max", self.dt_max),
            ("newton_tol", self.newton_tol),
            ("steady_tol", self.steady_tol),
            ("growth_resolution", self.growth_resolution),
            ("time_tol", self.time_tol),
            ("snapshot_start", self.snapshot_start),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
        }
        if !(self.dt_growth > 1.0 && self.dt_growth <= 2.0) {
            return Err(Error::InvalidInput(format!("dt_growth must lie in (1, 2], got {}", self.dt_growth)));
        }
        if self.dt_min > self.dt_init || self.dt_init > self.dt_max {
            return Err(Error::InvalidInput("need dt_min <= dt_init <= dt_max".into()));
        }
        if self.newton_max_iter == 0 {
            return Err(Error::InvalidInput("newton_max_iter must be at least 1".into()));
        }
        if !(self.snapshot_factor > 1.0) {
            return Err(Error::InvalidInput("snapshot_factor must exceed 1".into()));
        }
        Ok(())
    }

    fn snapshot_schedule(&self, t_end: f64) -> Vec<f64> {
        let mut times = vec![];
        let mut t = self.snapshot_start;
        while t < t_end {
            times.push(t);
            t *= self.snapshot_factor;
        }
        times.extend(self.extra_snapshots.iter().copied().filter(|&s| s > 0.0 && s < t_end));
        times.push(t_end);
        times.sort_by(f64::total_cmp);
        times.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
        times
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Termination {
    ReachedTEnd,
    ConvergedTo(SteadyKind),
    Blowup,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolveRecord {
    pub snapshot_times: Vec<f64>,
    pub snapshots: Vec<GridFunction>,
    /// Zero of the solution after every accepted step while it has exactly
    /// one interior sign change.
    pub zero_crossings: Vec<(f64, f64)>,
    pub termination: Termination,
    pub metastable_t: Option<f64>,
    pub final_time: f64,
    pub final_state: GridFunction,
    /// Sup distance from the final state to each target.
    pub target_distances: Vec<(SteadyKind, f64)>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub newton_iterations: usize,
}

/// Outcome of one implicit step attempt.
struct StepOutcome {
    u: Vec<f64>,
    iterations: usize,
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Solves `u - u_old - dt rhs(u) = 0` by damped Newton from `u_old`.
fn implicit_solve(u_old: &[f64], spec: &ProblemSpec, dt: f64, cfg: &StepperConfig) -> Option<StepOutcome> {
    let n = u_old.len() - 1;
    let residual = |u: &[f64]| -> Vec<f64> {
        let r = rhs_values(u, spec);
        (1..n).map(|i| u[i] - u_old[i] - dt * r[i]).collect()
    };
    let mut u = u_old.to_vec();
    let mut g = residual(&u);
    let mut g_norm = sup(&g);
    for it in 1..=cfg.newton_max_iter {
        let mut jac = rhs_jacobian(&u, spec);
        for k in 0..jac.len() {
            jac.lower[k] *= -dt;
            jac.upper[k] *= -dt;
            jac.diag[k] = 1.0 - dt * jac.diag[k];
        }
        let minus_g: Vec<f64> = g.iter().map(|v| -v).collect();
        let delta = jac.solve(&minus_g)?;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..12 {
            let trial: Vec<f64> = (0..=n)
                .map(|i| if i == 0 || i == n { 0.0 } else { u[i] + lambda * delta[i - 1] })
                .collect();
            if trial.iter().all(|v| v.is_finite()) {
                let gt = residual(&trial);
                let nt = sup(&gt);
                if nt < g_norm || nt <= cfg.newton_tol {
                    accepted = Some((trial, gt, nt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let (trial, gt, nt) = accepted?;
        let step = lambda * sup(&delta);
        u = trial;
        g = gt;
        g_norm = nt;
        if step <= cfg.newton_tol * (1.0 + sup(&u)) || g_norm <= cfg.newton_tol {
            return Some(StepOutcome { u, iterations: it });
        }
    }
    None
}

/// One backward-Euler step of size `dt`; also used to test fixed points.
pub fn implicit_step(u: &GridFunction, spec: &ProblemSpec, dt: f64, cfg: &StepperConfig) -> Result<GridFunction> {
    let out = implicit_solve(u.values(), spec, dt, cfg)
        .ok_or(Error::Stiffness { t: 0.0, dt, state: u.values().to_vec() })?;
    Ok(GridFunction::from_raw(u.ell(), out.u))
}

/// Largest positive eigenvalue of the linearization at `u` (0 if none).
fn unstable_rate(u: &[f64], spec: &ProblemSpec) -> f64 {
    let jac = rhs_jacobian(u, spec);
    jac.max_eigenvalue(1e-6).max(0.0)
}

fn check_compatible(spec: &ProblemSpec, ell: f64, what: &str) -> Result<()> {
    if (ell - spec.ell).abs() > 1e-12 * spec.ell {
        return Err(Error::InvalidInput(format!("{what} lives on length {ell}, spec has {}", spec.ell)));
    }
    Ok(())
}

/// Integrates from `u0` to `t_end`, stopping early once within
/// `cfg.steady_tol` of one of `targets`.
pub fn evolve(
    u0: &InitialData,
    spec: &ProblemSpec,
    cfg: &StepperConfig,
    t_end: f64,
    targets: &[SteadyState],
) -> Result<EvolveRecord> {
    cfg.validate()?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidInput(format!("t_end must be positive, got {t_end}")));
    }
    check_compatible(spec, u0.ell, "initial datum")?;
    for t in targets {
        check_compatible(spec, t.ell(), "target")?;
        if t.u.n_cells() != spec.n_cells {
            return Err(Error::InvalidInput(format!(
                "target {} has {} cells, spec has {}",
                t.kind,
                t.u.n_cells(),
                spec.n_cells
            )));
        }
    }
    let bound = 1.5 * spec.model.radius();
    let schedule = cfg.snapshot_schedule(t_end);
    let start = u0.sample(spec.n_cells);
    let mut u = start.values().to_vec();
    let mut rec = EvolveRecord {
        snapshot_times: vec![0.0],
        snapshots: vec![start.clone()],
        zero_crossings: Vec::new(),
        termination: Termination::ReachedTEnd,
        metastable_t: None,
        final_time: 0.0,
        final_state: start.clone(),
        target_distances: Vec::new(),
        accepted_steps: 0,
        rejected_steps: 0,
        newton_iterations: 0,
    };
    let distances = |u: &[f64]| -> Vec<(SteadyKind, f64)> {
        targets
            .iter()
            .map(|s| {
                let d = s.u.values().iter().zip(u).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
                (s.kind, d)
            })
            .collect()
    };
    let push_zero = |t: f64, g: &GridFunction, rec: &mut EvolveRecord| {
        if let Some((x0, _)) = g.single_zero_crossing() {
            rec.zero_crossings.push((t, x0));
        }
    };
    push_zero(0.0, &start, &mut rec);

    let mut t = 0.0;
    let mut dt = cfg.dt_init;
    let mut next_snap = 0;
    'time: while next_snap < schedule.len() {
        let rate = unstable_rate(&u, spec);
        let mut dt_try = dt.min(cfg.dt_max);
        if rate > 0.0 {
            dt_try = dt_try.min(cfg.growth_resolution / rate);
        }
        let target_t = schedule[next_snap];
        let hits = t + dt_try >= target_t * (1.0 - 1e-12);
        if hits {
            dt_try = target_t - t;
        }
        let outcome = implicit_solve(&u, spec, dt_try, cfg);
        let Some(out) = outcome else {
            rec.rejected_steps += 1;
            dt = 0.5 * dt_try;
            if dt < cfg.dt_min {
                return Err(Error::Stiffness { t, dt, state: u });
            }
            continue;
        };
        let r_old = rhs_values(&u, spec);
        let r_new = rhs_values(&out.u, spec);
        let err = 0.5 * dt_try * r_old.iter().zip(&r_new).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        // admissible step from the first-order error model err ~ dt^2
        let dt_err = if err > 0.0 { 0.9 * dt_try * (cfg.time_tol / err).sqrt() } else { f64::INFINITY };
        if err > cfg.time_tol {
            rec.rejected_steps += 1;
            dt = dt_err.min(0.5 * dt_try).max(0.1 * dt_try);
            if dt < cfg.dt_min {
                return Err(Error::Stiffness { t, dt, state: u });
            }
            continue;
        }
        rec.accepted_steps += 1;
        rec.newton_iterations += out.iterations;
        t = if hits { target_t } else { t + dt_try };
        u = out.u;
        let grown = if out.iterations <= 4 { dt_try * cfg.dt_growth } else { dt_try };
        let next = grown.min(dt_err);
        // a step shortened to land on a snapshot does not shrink the next one
        dt = if hits { next.max(dt.min(dt_err)) } else { next };
        let g = GridFunction::from_raw(spec.ell, u.clone());
        push_zero(t, &g, &mut rec);
        if sup(&u) > bound {
            rec.termination = Termination::Blowup;
            rec.snapshot_times.push(t);
            rec.snapshots.push(g);
            break 'time;
        }
        let converged = distances(&u)
            .into_iter()
            .filter(|(_, d)| *d <= cfg.steady_tol)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if hits {
            rec.snapshot_times.push(t);
            rec.snapshots.push(g.clone());
            next_snap += 1;
        }
        if let Some((kind, _)) = converged {
            rec.termination = Termination::ConvergedTo(kind);
            rec.metastable_t = Some(t);
            if !hits {
                rec.snapshot_times.push(t);
                rec.snapshots.push(g);
            }
            break 'time;
        }
    }
    rec.final_time = t;
    rec.target_distances = distances(&u);
    rec.final_state = GridFunction::from_raw(spec.ell, u);
    log::debug!(
        "evolve: {:?} at t = {:.4e} after {} steps ({} rejected)",
        rec.termination,
        rec.final_time,
        rec.accepted_steps,
        rec.rejected_steps
    );
    Ok(rec)
}

/// Zeros interpolated per snapshot, truncated once the solution no longer
/// changes sign exactly once.
pub fn zero_crossing_series(record: &EvolveRecord) -> Vec<(f64, f64)> {
    record
        .snapshot_times
        .iter()
        .zip(&record.snapshots)
        .map_while(|(&t, g)| g.single_zero_crossing().map(|(x0, _)| (t, x0)))
        .collect()
}

/// Newton solve of the discrete steady equations starting from a computed
/// steady state, so that convergence tests measure distance to a fixed
/// point of the scheme. Returns the polished state and its distance to
/// the input.
pub fn discrete_steady(state: &SteadyState, spec: &ProblemSpec) -> Result<(SteadyState, f64)> {
    check_compatible(spec, state.ell(), "steady state")?;
    if state.u.n_cells() != spec.n_cells {
        return Err(Error::InvalidInput("steady state grid does not match the spec".into()));
    }
    let n = spec.n_cells;
    let mut u = state.u.values().to_vec();
    let mut r = rhs_values(&u, spec);
    let scale = spec.epsilon / (spec.dx() * spec.dx());
    // roundoff in the diffusion stencil grows like eps / dx^2
    let tol = 1e-12 + 1e-13 * scale;
    let mut converged = false;
    for _ in 0..50 {
        let jac = rhs_jacobian(&u, spec);
        let rhs: Vec<f64> = r[1..n].to_vec();
        let delta = jac.solve(&rhs).ok_or(Error::Stiffness { t: 0.0, dt: f64::INFINITY, state: u.clone() })?;
        let norm0 = sup(&r);
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let trial: Vec<f64> =
                (0..=n).map(|i| if i == 0 || i == n { 0.0 } else { u[i] - lambda * delta[i - 1] }).collect();
            let rt = rhs_values(&trial, spec);
            if sup(&rt) < norm0 {
                u = trial;
                r = rt;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if sup(&r) <= tol || lambda * sup(&delta) < 1e-14 {
            converged = true;
            break;
        }
        if !improved {
            break;
        }
    }
    if !converged && sup(&r) > 1e3 * tol {
        return Err(Error::Stiffness { t: 0.0, dt: f64::INFINITY, state: u });
    }
    let polished = GridFunction::from_raw(spec.ell, u);
    let distance = polished.sup_distance(&state.u);
    let mut out = state.clone();
    out.max_abs = polished.max_abs();
    out.u = polished;
    Ok((out, distance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelFunctions;

    #[test]
    fn zero_stays_zero() {
        let m = ModelFunctions::from_names("gauss", "quadratic", 1.0).unwrap();
        let spec = ProblemSpec::new(0.05, 1.0, m, 64).unwrap();
        let zero = crate::parabolic::piecewise_initial(&[(0.0, 0.0), (1.0, 0.0)]).unwrap();
        let rec = evolve(&zero, &spec, &StepperConfig::default(), 100.0, &[]).unwrap();
        assert_eq!(rec.termination, Termination::ReachedTEnd);
        assert!(rec.snapshots.iter().all(|s| s.max_abs() == 0.0));
        assert!(rec.snapshot_times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn schedule_includes_extras() {
        let cfg = StepperConfig { extra_snapshots: vec![1.5, 3.5], ..Default::default() };
        let s = cfg.snapshot_schedule(10.0);
        assert!(s.contains(&1.5) && s.contains(&3.5) && s.contains(&10.0));
        assert!(s.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn config_validation() {
        assert!(StepperConfig { dt_growth: 2.5, ..Default::default() }.validate().is_err());
        assert!(StepperConfig { steady_tol: 0.0, ..Default::default() }.validate().is_err());
        assert!(StepperConfig::default().validate().is_ok());
    }
}
