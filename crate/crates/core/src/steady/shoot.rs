//! Shooting for the stationary Cauchy problem.
//!
//! Two parametrizations of the same trajectories are provided. [`shoot`]
//! starts from the wall with slope `alpha`, which is what the return-length
//! map `L(alpha)` is defined on. The root finder instead starts at the crest
//! `(u, u') = (M, 0)` and marches both ways: for small viscosity the slope at
//! the wall approaches its limit to within `exp(-1/(2 eps))`, which `f64`
//! cannot resolve, while the crest height stays well conditioned.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::GridFunction;
use crate::model::{ModelFunctions, ProblemSpec};
use crate::ode::{march, Abort, State, Stop, Trajectory};

/// Number of RK4 steps per domain length used by default.
pub const DEFAULT_STEPS_PER_LENGTH: f64 = 1e4;

pub fn default_step(ell: f64) -> f64 {
    ell / DEFAULT_STEPS_PER_LENGTH
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ShootOutcome {
    ReturnAt,
    MonotoneEscape,
    Diverged,
}

impl ShootOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            ShootOutcome::ReturnAt => "return",
            ShootOutcome::MonotoneEscape => "escape",
            ShootOutcome::Diverged => "diverged",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ShootResult {
    pub outcome: ShootOutcome,
    pub alpha: f64,
    /// Return length, present iff the outcome is `ReturnAt`.
    pub length: Option<f64>,
    /// Slope at the return point.
    pub return_slope: Option<f64>,
    /// The trajectory resampled on `[0, L]` (or the covered range).
    pub trajectory: GridFunction,
}

/// `u'' = (f'(u)(u' - 1) - eps h'(u) u'^2) / (eps h(u))` as a first-order
/// system, marched in direction `dir` (+1 or -1).
pub(crate) fn stationary_rhs(model: &ModelFunctions, epsilon: f64, dir: f64) -> impl Fn(State) -> State + '_ {
    move |[u, v]: State| {
        let dv = (model.df(u) * (v - 1.0) - epsilon * model.dh(u) * v * v) / (epsilon * model.h(u));
        [dir * v, dir * dv]
    }
}

fn trajectory_grid(tr: &Trajectory) -> GridFunction {
    let len = tr.length().max(tr.step * 3.0);
    let cells = ((len / tr.step).round() as usize).max(3);
    GridFunction::sample(len, cells, |s| tr.eval(s)[0])
}

/// Integrates the Cauchy problem `u(0) = 0, u'(0) = alpha` with fixed step.
pub fn shoot(alpha: f64, spec: &ProblemSpec, step: f64, horizon: f64) -> Result<ShootResult> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
    }
    if !(step > 0.0) {
        return Err(Error::InvalidInput(format!("step must be positive, got {step}")));
    }
    if !(horizon >= 4.0 * spec.ell) {
        return Err(Error::InvalidInput(format!(
            "horizon {horizon} must be at least 4 ell = {}",
            4.0 * spec.ell
        )));
    }
    let bound = 1.5 * spec.model.radius();
    let mut monotone = true;
    let rhs = stationary_rhs(&spec.model, spec.epsilon, 1.0);
    let tr = march(rhs, [0.0, alpha], step, horizon, |_, y| {
        if y[1] <= 0.0 {
            monotone = false;
        }
        (y[0].abs() > bound).then_some(Abort::OutOfRange)
    });
    let (outcome, length, slope) = match tr.stop {
        Stop::Zero { s, y } => (ShootOutcome::ReturnAt, Some(s), Some(y[1])),
        Stop::Aborted(Abort::OutOfRange) | Stop::Horizon if monotone => {
            (ShootOutcome::MonotoneEscape, None, None)
        }
        _ => (ShootOutcome::Diverged, None, None),
    };
    Ok(ShootResult { outcome, alpha, length, return_slope: slope, trajectory: trajectory_grid(&tr) })
}

/// Points of the return-length map plus everything that did not return.
#[derive(Debug, Clone, Serialize)]
pub struct LengthMap {
    pub points: Vec<(f64, f64)>,
    pub escapes: Vec<(f64, ShootOutcome)>,
    /// Indices `k` into `points` where `L_{k+1} <= L_k` beyond the tolerance.
    pub monotonicity_violations: Vec<usize>,
}

pub const LENGTH_MAP_TOLERANCE: f64 = 1e-8;

/// Evaluates `L(alpha)` for an increasing list of slopes.
pub fn length_map(alphas: &[f64], spec: &ProblemSpec, exec: Execution) -> Result<LengthMap> {
    if alphas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("alphas must be strictly increasing".into()));
    }
    let step = default_step(spec.ell);
    let horizon = 4.0 * spec.ell;
    let shots = exec.map(alphas, |&a| shoot(a, spec, step, horizon));
    let mut points = Vec::new();
    let mut escapes = Vec::new();
    for r in shots {
        let r = r?;
        match r.length {
            Some(l) => points.push((r.alpha, l)),
            None => escapes.push((r.alpha, r.outcome)),
        }
    }
    let monotonicity_violations = points
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1].1 <= w[0].1 - LENGTH_MAP_TOLERANCE)
        .map(|(k, _)| k)
        .collect();
    Ok(LengthMap { points, escapes, monotonicity_violations })
}

/// A positive arc `u > 0` on `(0, length)` with `u(0) = u(length) = 0`,
/// stored as the two half-trajectories marched from its crest.
#[derive(Debug, Clone)]
pub struct PositiveProfile {
    pub crest_height: f64,
    /// Abscissa of the crest.
    pub crest_x: f64,
    pub length: f64,
    /// `u'(0+)`.
    pub alpha: f64,
    /// `u'(length-)`.
    pub end_slope: f64,
    left: Trajectory,
    right: Trajectory,
}

impl PositiveProfile {
    /// Dense evaluation of `u` on `[0, length]`.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_state(x)[0]
    }

    /// Dense evaluation of `(u, u')`.
    pub fn eval_state(&self, x: f64) -> [f64; 2] {
        if x <= self.crest_x {
            self.left.eval(self.crest_x - x)
        } else {
            self.right.eval(x - self.crest_x)
        }
    }
}

/// Result of marching both ways from a crest of height `m`.
pub(crate) enum Crest {
    Valid(PositiveProfile),
    /// The backward branch never reached zero as a positive arc; treat the
    /// length as infinite.
    TooLong,
}

pub(crate) fn march_from_crest(
    model: &ModelFunctions,
    epsilon: f64,
    height: f64,
    step: f64,
    max_len: f64,
) -> Crest {
    let bound = 1.5 * model.radius();
    let guard = |sign: f64| {
        move |k: usize, y: &State| {
            if y[0].abs() > bound {
                Some(Abort::OutOfRange)
            } else if k > 1 && sign * y[1] <= 0.0 {
                Some(Abort::SlopeSignChange)
            } else {
                None
            }
        }
    };
    // the state stays (u, u_x) in both directions; only the marching variable flips
    let left = march(stationary_rhs(model, epsilon, -1.0), [height, 0.0], step, max_len, guard(1.0));
    let Stop::Zero { s: s_left, y: y_left } = left.stop else {
        return Crest::TooLong;
    };
    let right = march(stationary_rhs(model, epsilon, 1.0), [height, 0.0], step, max_len, guard(-1.0));
    let Stop::Zero { s: s_right, y: y_right } = right.stop else {
        return Crest::TooLong;
    };
    Crest::Valid(PositiveProfile {
        crest_height: height,
        crest_x: s_left,
        length: s_left + s_right,
        alpha: y_left[1],
        end_slope: y_right[1],
        left,
        right,
    })
}
