//! Sign, bound and convexity checks for computed steady states.

use serde::Serialize;

use super::branches::{SteadyKind, SteadyState};
use crate::grid::GridFunction;

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub check: &'static str,
    pub x: f64,
    pub excess: f64,
}

/// Checks the branch-specific sign pattern, the bounds by the lines `x`,
/// `x - ell` (or their half-length translates) and the convexity sign of
/// each arc. Returns all violations beyond `tol`.
pub fn check_invariants(state: &SteadyState, tol: f64) -> Vec<Violation> {
    let u = &state.u;
    let ell = u.ell();
    let mut out = Vec::new();
    match state.kind {
        SteadyKind::Positive => check_arc(u, 0.0, ell, 1.0, tol, &mut out),
        SteadyKind::Negative => check_arc(u, 0.0, ell, -1.0, tol, &mut out),
        SteadyKind::OneZeroMinus => {
            check_arc(u, 0.0, 0.5 * ell, -1.0, tol, &mut out);
            check_arc(u, 0.5 * ell, ell, 1.0, tol, &mut out);
            check_midpoint(u, tol, &mut out);
        }
        SteadyKind::OneZeroPlus => {
            check_arc(u, 0.0, 0.5 * ell, 1.0, tol, &mut out);
            check_arc(u, 0.5 * ell, ell, -1.0, tol, &mut out);
            check_midpoint(u, tol, &mut out);
        }
        SteadyKind::NZero(n) => {
            let d = ell / (n + 1) as f64;
            let first = if state.u.eval(0.5 * d) > 0.0 { 1.0 } else { -1.0 };
            for j in 0..=n {
                let sign = if j % 2 == 0 { first } else { -first };
                check_arc(u, j as f64 * d, (j + 1) as f64 * d, sign, tol, &mut out);
            }
        }
    }
    out
}

fn check_midpoint(u: &GridFunction, tol: f64, out: &mut Vec<Violation>) {
    let mid = 0.5 * u.ell();
    let v = u.eval(mid).abs();
    if v > tol {
        out.push(Violation { check: "midpoint_zero", x: mid, excess: v - tol });
    }
}

/// One arc on `[a, b]`: for `sign > 0`, `0 < u <= x - a`, slope `<= 1`,
/// concave; for `sign < 0`, `x - b <= u < 0`, slope `<= 1`, convex.
fn check_arc(u: &GridFunction, a: f64, b: f64, sign: f64, tol: f64, out: &mut Vec<Violation>) {
    let dx = u.dx();
    let v = u.values();
    let eps_x = 1e-9 * u.ell();
    let inside: Vec<usize> = (1..u.n_cells()).filter(|&i| u.x(i) > a + eps_x && u.x(i) < b - eps_x).collect();
    let mut record = |check: &'static str, x: f64, excess: f64, limit: f64| {
        if excess > limit {
            out.push(Violation { check, x, excess });
        }
    };
    for &i in &inside {
        let x = u.x(i);
        let w = sign * v[i];
        record("strict_sign", x, -w, -f64::MIN_POSITIVE);
        let bound = if sign > 0.0 { x - a } else { b - x };
        record("line_bound", x, w - bound, tol);
        record("curvature", x, sign * (v[i + 1] - 2.0 * v[i] + v[i - 1]), tol);
    }
    for i in 0..u.n_cells() {
        let x = u.x(i);
        if x >= a - eps_x && u.x(i + 1) <= b + eps_x {
            record("slope", x, (v[i + 1] - v[i]) / dx - 1.0, tol);
        }
    }
}

/// `min_i (upper_i - lower_i)`; nonnegative when `lower <= upper` pointwise.
pub fn ordering_gap(lower: &GridFunction, upper: &GridFunction) -> f64 {
    lower.values().iter().zip(upper.values()).map(|(l, u)| u - l).fold(f64::INFINITY, f64::min)
}

/// Sup over `[0, 0.9 ell]` of `|u(x) - x|`.
pub fn distance_to_line(u: &GridFunction) -> f64 {
    u.sup_distance_to_fn(0.0, 0.9 * u.ell(), |x| x)
}
