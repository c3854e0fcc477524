//! The positive, negative, one-zero and N-zero steady branches.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::shoot::{default_step, march_from_crest, Crest, PositiveProfile};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::GridFunction;
use crate::model::{existence_threshold, ProblemSpec, DEFAULT_ASSUMPTION_SAMPLES};

/// Number of crest heights scanned before bisection.
pub const SCAN_POINTS: usize = 32;
/// Root tolerance on `|L - ell|`.
pub const LENGTH_TOLERANCE: f64 = 1e-9;
/// Allowed slope mismatch at glue points.
pub const GLUE_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "zeros")]
pub enum SteadyKind {
    Positive,
    Negative,
    OneZeroMinus,
    OneZeroPlus,
    NZero(usize),
}

impl SteadyKind {
    /// True for the two branches that attract type A data.
    pub fn is_stable(self) -> bool {
        matches!(self, SteadyKind::Positive | SteadyKind::Negative)
    }
}

impl fmt::Display for SteadyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SteadyKind::Positive => f.write_str("pos"),
            SteadyKind::Negative => f.write_str("neg"),
            SteadyKind::OneZeroMinus => f.write_str("1m"),
            SteadyKind::OneZeroPlus => f.write_str("1p"),
            SteadyKind::NZero(n) => write!(f, "nz:{n}"),
        }
    }
}

impl FromStr for SteadyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pos" => Ok(SteadyKind::Positive),
            "neg" => Ok(SteadyKind::Negative),
            "1m" => Ok(SteadyKind::OneZeroMinus),
            "1p" => Ok(SteadyKind::OneZeroPlus),
            _ => s
                .strip_prefix("nz:")
                .and_then(|n| n.parse().ok())
                .map(SteadyKind::NZero)
                .ok_or_else(|| {
                    Error::InvalidInput(format!("unknown steady kind '{s}' (expected pos, neg, 1m, 1p or nz:<N>)"))
                }),
        }
    }
}

/// Sign of the first arc of a multi-zero state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FirstSign {
    Minus,
    Plus,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SteadyDiagnostics {
    pub crest_height: f64,
    /// `|L - length|` of the underlying positive arc.
    pub length_residual: f64,
    pub arc_length: f64,
    pub roots_found: usize,
    pub bisection_steps: usize,
    /// Largest slope mismatch over the glue points (0 without gluing).
    pub glue_jump: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SteadyState {
    pub kind: SteadyKind,
    pub u: GridFunction,
    pub epsilon: f64,
    /// Initial slope of the underlying positive arc.
    pub alpha_star: f64,
    /// `(u'(0+), u'(ell-))`.
    pub boundary_slopes: (f64, f64),
    pub max_abs: f64,
    pub diagnostics: SteadyDiagnostics,
}

impl SteadyState {
    pub fn ell(&self) -> f64 {
        self.u.ell()
    }
}

fn require_below_threshold(spec: &ProblemSpec, length: f64) -> Result<()> {
    let threshold = existence_threshold(&spec.model, length)?;
    if spec.epsilon >= threshold {
        return Err(Error::NoSolution { epsilon: spec.epsilon, threshold, length });
    }
    Ok(())
}

fn require_even(spec: &ProblemSpec) -> Result<()> {
    if spec.model.diffusion_is_even(DEFAULT_ASSUMPTION_SAMPLES) {
        Ok(())
    } else {
        Err(Error::UnsupportedModel(format!(
            "diffusion '{}' is not even; negative arcs are built by reflection",
            spec.model.name_h()
        )))
    }
}

/// A positive arc of length `length` together with its root-finding record.
#[derive(Debug, Clone)]
pub struct PositiveArc {
    pub profile: PositiveProfile,
    pub length: f64,
    pub roots_found: usize,
    pub bisection_steps: usize,
}

/// Finds the positive arc of the stationary equation vanishing at `0` and
/// `length` by bisection on the crest height.
pub fn positive_arc(spec: &ProblemSpec, length: f64) -> Result<PositiveArc> {
    require_below_threshold(spec, length)?;
    let model = &spec.model;
    let eps = spec.epsilon;
    // L(alpha) increases from L(0+) = pi sqrt(eps h(0) / f''(0)), so shorter arcs do not exist
    let shortest = PI * (eps * model.h(0.0) / model.d2f0()).sqrt();
    if length <= shortest {
        return Err(Error::NoSolution {
            epsilon: eps,
            threshold: length * length * model.d2f0() / (PI * PI * model.h(0.0)),
            length,
        });
    }
    let step = default_step(length);
    let max_len = 4.0 * length;
    let radius = model.radius();
    let m_lo = 1e-3 * length.min(radius);
    let m_hi = length.min(1.5 * radius) * (1.0 - 1e-6);

    let eval = |m: f64| match march_from_crest(model, eps, m, step, max_len) {
        Crest::Valid(p) => (p.length, Some(p)),
        Crest::TooLong => (f64::INFINITY, None),
    };

    let heights: Vec<f64> =
        (0..SCAN_POINTS).map(|k| m_lo + (m_hi - m_lo) * k as f64 / (SCAN_POINTS - 1) as f64).collect();
    let scan: Vec<(f64, f64)> = heights.iter().map(|&m| (m, eval(m).0)).collect();
    let brackets: Vec<usize> =
        (0..scan.len() - 1).filter(|&k| (scan[k].1 - length) * (scan[k + 1].1 - length) <= 0.0).collect();
    if brackets.is_empty() {
        let finite = scan.iter().map(|p| p.1).filter(|l| l.is_finite());
        let l_min = finite.clone().fold(f64::INFINITY, f64::min);
        let l_max = finite.fold(f64::NEG_INFINITY, f64::max);
        return Err(Error::Bracketing { target: length, l_min, l_max });
    }
    if brackets.len() > 1 {
        log::warn!(
            "{} sign changes of L - {length} found while scanning crest heights (eps = {eps}); using the first",
            brackets.len()
        );
    }
    let k = brackets[0];
    let (mut lo, mut hi) = (scan[k].0, scan[k + 1].0);
    let mut steps = 0;
    let mut best: Option<PositiveProfile> = None;
    while steps < 200 {
        let mid = 0.5 * (lo + hi);
        steps += 1;
        let (l, p) = eval(mid);
        if let Some(p) = p {
            let closer = best.as_ref().is_none_or(|b| (l - length).abs() < (b.length - length).abs());
            if closer {
                best = Some(p);
            }
        }
        if (l - length).abs() <= LENGTH_TOLERANCE {
            break;
        }
        if l < length {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let profile = best.ok_or(Error::Bracketing { target: length, l_min: scan[k].1, l_max: scan[k + 1].1 })?;
    if (profile.length - length).abs() > LENGTH_TOLERANCE {
        log::warn!(
            "crest bisection stalled with |L - ell| = {:.3e} (eps = {eps}, length = {length})",
            (profile.length - length).abs()
        );
    }
    Ok(PositiveArc { profile, length, roots_found: brackets.len(), bisection_steps: steps })
}

/// Lays alternating copies of `arc` on `[0, ell]`; `signs[j]` is the sign of
/// the `j`-th piece. Returns the grid values and the largest slope jump.
fn glue(arc: &PositiveArc, signs: &[f64], spec: &ProblemSpec) -> (GridFunction, f64) {
    let d = arc.length;
    let p = &arc.profile;
    let piece = |j: usize, x: f64| -> [f64; 2] {
        let a = j as f64 * d;
        if signs[j] > 0.0 {
            p.eval_state((x - a).clamp(0.0, d))
        } else {
            let [u, du] = p.eval_state((a + d - x).clamp(0.0, d));
            [-u, du]
        }
    };
    let n = spec.n_cells;
    let tol = 1e-12 * spec.ell;
    let mut u = GridFunction::sample(spec.ell, n, |x| {
        let j = ((x / d).floor() as usize).min(signs.len() - 1);
        let junction = (x - (x / d).round() * d).abs() < tol;
        if junction {
            0.0
        } else {
            piece(j, x)[0]
        }
    });
    u.values_mut()[0] = 0.0;
    u.values_mut()[n] = 0.0;
    let jump = (1..signs.len())
        .map(|j| {
            let b = j as f64 * d;
            (piece(j - 1, b)[1] - piece(j, b)[1]).abs()
        })
        .fold(0.0, f64::max);
    (u, jump)
}

fn assemble(kind: SteadyKind, arc: &PositiveArc, signs: &[f64], spec: &ProblemSpec) -> Result<SteadyState> {
    let (u, jump) = glue(arc, signs, spec);
    if jump > GLUE_TOLERANCE {
        let at = arc.length;
        return Err(Error::Gluing { at, jump, tolerance: GLUE_TOLERANCE });
    }
    let p = &arc.profile;
    let left = if signs[0] > 0.0 { p.alpha } else { p.end_slope };
    let right = if *signs.last().unwrap() > 0.0 { p.end_slope } else { p.alpha };
    Ok(SteadyState {
        kind,
        max_abs: u.max_abs(),
        u,
        epsilon: spec.epsilon,
        alpha_star: p.alpha,
        boundary_slopes: (left, right),
        diagnostics: SteadyDiagnostics {
            crest_height: p.crest_height,
            length_residual: (p.length - arc.length).abs(),
            arc_length: arc.length,
            roots_found: arc.roots_found,
            bisection_steps: arc.bisection_steps,
            glue_jump: jump,
        },
    })
}

pub fn solve_positive(spec: &ProblemSpec) -> Result<SteadyState> {
    let arc = positive_arc(spec, spec.ell)?;
    assemble(SteadyKind::Positive, &arc, &[1.0], spec)
}

/// Reflection `u(x) = -u_+(ell - x)` of the positive state.
pub fn solve_negative(spec: &ProblemSpec) -> Result<SteadyState> {
    require_even(spec)?;
    let arc = positive_arc(spec, spec.ell)?;
    assemble(SteadyKind::Negative, &arc, &[-1.0], spec)
}

pub fn solve_one_zero(sign: FirstSign, spec: &ProblemSpec) -> Result<SteadyState> {
    let mut s = solve_n_zero(1, spec, sign)?;
    s.kind = match sign {
        FirstSign::Minus => SteadyKind::OneZeroMinus,
        FirstSign::Plus => SteadyKind::OneZeroPlus,
    };
    Ok(s)
}

/// `N + 1` alternating arcs of equal length `ell / (N + 1)`.
pub fn solve_n_zero(zeros: usize, spec: &ProblemSpec, first: FirstSign) -> Result<SteadyState> {
    let first_sign = match first {
        FirstSign::Minus => -1.0,
        FirstSign::Plus => 1.0,
    };
    if zeros == 0 {
        return if first_sign > 0.0 { solve_positive(spec) } else { solve_negative(spec) };
    }
    require_even(spec)?;
    let exponent = i32::try_from(zeros).map_err(|_| Error::InvalidInput(format!("too many zeros: {zeros}")))?;
    require_below_threshold(spec, spec.ell / 2f64.powi(exponent))?;
    let pieces = zeros + 1;
    let arc = positive_arc(spec, spec.ell / pieces as f64)?;
    let signs: Vec<f64> = (0..pieces).map(|j| if j % 2 == 0 { first_sign } else { -first_sign }).collect();
    let kind = match (zeros, first) {
        (1, FirstSign::Minus) => SteadyKind::OneZeroMinus,
        (1, FirstSign::Plus) => SteadyKind::OneZeroPlus,
        _ => SteadyKind::NZero(zeros),
    };
    assemble(kind, &arc, &signs, spec)
}

/// Dispatches on `kind`; `NZero` states start with a negative arc.
pub fn solve(kind: SteadyKind, spec: &ProblemSpec) -> Result<SteadyState> {
    match kind {
        SteadyKind::Positive => solve_positive(spec),
        SteadyKind::Negative => solve_negative(spec),
        SteadyKind::OneZeroMinus => solve_one_zero(FirstSign::Minus, spec),
        SteadyKind::OneZeroPlus => solve_one_zero(FirstSign::Plus, spec),
        SteadyKind::NZero(n) => solve_n_zero(n, spec, FirstSign::Minus),
    }
}

/// Solves `kind` for every viscosity in `epsilons` (strictly increasing).
pub fn epsilon_sweep(
    epsilons: &[f64],
    kind: SteadyKind,
    template: &ProblemSpec,
    exec: Execution,
) -> Result<Vec<SteadyState>> {
    if epsilons.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("epsilons must be strictly increasing".into()));
    }
    exec.map(epsilons, |&e| template.with_epsilon(e).and_then(|s| solve(kind, &s)))
        .into_iter()
        .collect()
}

/// `(eps, eps * u'_+(ell-))` for each viscosity.
pub fn boundary_slope_scaling(
    epsilons: &[f64],
    template: &ProblemSpec,
    exec: Execution,
) -> Result<Vec<(f64, f64)>> {
    let mut sorted = epsilons.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let states = epsilon_sweep(&sorted, SteadyKind::Positive, template, exec)?;
    let by_eps: Vec<(f64, f64)> = states.iter().map(|s| (s.epsilon, s.epsilon * s.boundary_slopes.1)).collect();
    Ok(epsilons
        .iter()
        .map(|e| *by_eps.iter().find(|(x, _)| x == e).expect("every requested eps was solved"))
        .collect())
}

/// One-sided slopes at `b` of the negative arc on `(a, b)` and the positive
/// arc on `(b, c)`.
pub fn glue_slopes(spec: &ProblemSpec, a: f64, b: f64, c: f64) -> Result<(f64, f64)> {
    if !(a < b && b < c) {
        return Err(Error::InvalidInput(format!("need a < b < c, got {a}, {b}, {c}")));
    }
    require_even(spec)?;
    let left = positive_arc(spec, b - a)?;
    let right = positive_arc(spec, c - b)?;
    Ok((left.profile.alpha, right.profile.alpha))
}
