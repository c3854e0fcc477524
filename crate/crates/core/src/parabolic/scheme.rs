//! Conservative semi-discretization: centered nonlinear diffusion, Godunov
//! convection and pointwise reaction, plus its tridiagonal Jacobian.

use crate::grid::GridFunction;
use crate::model::{ModelFunctions, ProblemSpec};

/// Godunov flux for a convex flux with its minimum at 0.
pub fn godunov_flux(model: &ModelFunctions, a: f64, b: f64) -> f64 {
    model.f(a.max(0.0)).max(model.f(b.min(0.0)))
}

/// Partial derivatives of [`godunov_flux`] in its two arguments.
fn godunov_partials(model: &ModelFunctions, a: f64, b: f64) -> (f64, f64) {
    let (ap, bm) = (a.max(0.0), b.min(0.0));
    if model.f(ap) >= model.f(bm) {
        (if a > 0.0 { model.df(a) } else { 0.0 }, 0.0)
    } else {
        (0.0, if b < 0.0 { model.df(b) } else { 0.0 })
    }
}

/// Tridiagonal matrix over the interior nodes `1..n`; row `k` is node `k + 1`.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Thomas algorithm; `None` on a zero pivot.
    pub fn solve(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        let m = self.len();
        let mut c = vec![0.0; m];
        let mut d = vec![0.0; m];
        let mut piv = self.diag[0];
        if piv == 0.0 {
            return None;
        }
        c[0] = self.upper[0] / piv;
        d[0] = rhs[0] / piv;
        for k in 1..m {
            piv = self.diag[k] - self.lower[k] * c[k - 1];
            if piv == 0.0 || !piv.is_finite() {
                return None;
            }
            c[k] = self.upper[k] / piv;
            d[k] = (rhs[k] - self.lower[k] * d[k - 1]) / piv;
        }
        for k in (0..m - 1).rev() {
            d[k] -= c[k] * d[k + 1];
        }
        Some(d)
    }

    /// Largest eigenvalue when `lower[k+1] * upper[k] > 0` for all `k`
    /// (then the matrix is similar to a symmetric one), by Sturm-count
    /// bisection to absolute accuracy `tol`.
    pub fn max_eigenvalue(&self, tol: f64) -> f64 {
        let m = self.len();
        let off2: Vec<f64> = (1..m).map(|k| (self.lower[k] * self.upper[k - 1]).max(0.0)).collect();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..m {
            let r = (if k > 0 { off2[k - 1].sqrt() } else { 0.0 }) + (if k + 1 < m { off2[k].sqrt() } else { 0.0 });
            lo = lo.min(self.diag[k] - r);
            hi = hi.max(self.diag[k] + r);
        }
        // number of eigenvalues strictly below sigma
        let below = |sigma: f64| {
            let mut count = 0;
            let mut q = self.diag[0] - sigma;
            for k in 0..m {
                if k > 0 {
                    let prev = if q == 0.0 { f64::MIN_POSITIVE } else { q };
                    q = self.diag[k] - sigma - off2[k - 1] / prev;
                }
                if q < 0.0 {
                    count += 1;
                }
            }
            count
        };
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if below(mid) == m {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

fn check_grid(u: &[f64], spec: &ProblemSpec) {
    debug_assert_eq!(u.len(), spec.n_cells + 1, "grid function does not match the spec");
}

/// Right-hand side of the semi-discrete system at the interior nodes (the
/// boundary entries are zero).
pub(crate) fn rhs_values(u: &[f64], spec: &ProblemSpec) -> Vec<f64> {
    check_grid(u, spec);
    let model = &spec.model;
    let n = u.len() - 1;
    let dx = spec.dx();
    let c = spec.epsilon / (dx * dx);
    // face quantities at i + 1/2 for i = 0..n
    let faces: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let (a, b) = (u[i], u[i + 1]);
            let diff = c * model.h(0.5 * (a + b)) * (b - a);
            (diff, godunov_flux(model, a, b) / dx)
        })
        .collect();
    let mut out = vec![0.0; n + 1];
    for i in 1..n {
        let (dr, fr) = faces[i];
        let (dl, fl) = faces[i - 1];
        out[i] = dr - dl - (fr - fl) + model.df(u[i]);
    }
    out
}

pub fn semidiscrete_rhs(u: &GridFunction, spec: &ProblemSpec) -> GridFunction {
    let mut values = u.values().to_vec();
    values[0] = 0.0;
    let n = values.len() - 1;
    values[n] = 0.0;
    GridFunction::from_raw(u.ell(), rhs_values(&values, spec))
}

/// Jacobian of [`rhs_values`] with respect to the interior values.
pub(crate) fn rhs_jacobian(u: &[f64], spec: &ProblemSpec) -> Tridiagonal {
    let model = &spec.model;
    let n = u.len() - 1;
    let dx = spec.dx();
    let c = spec.epsilon / (dx * dx);
    // for the face between i and i+1: d(diffusive flux)/du_i, /du_{i+1}, and Godunov partials
    let faces: Vec<[f64; 4]> = (0..n)
        .map(|i| {
            let (a, b) = (u[i], u[i + 1]);
            let mid = 0.5 * (a + b);
            let h = model.h(mid);
            let dh = 0.5 * model.dh(mid) * (b - a);
            let (fa, fb) = godunov_partials(model, a, b);
            [c * (dh - h), c * (dh + h), fa / dx, fb / dx]
        })
        .collect();
    let m = n - 1;
    let mut lower = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    for k in 0..m {
        let i = k + 1;
        let r = faces[i];
        let l = faces[i - 1];
        // rhs_i = D_r - D_l - (F_r - F_l) + f'(u_i)
        lower[k] = -l[0] + l[2];
        diag[k] = r[0] - l[1] - r[2] + l[3] + model.d2f(u[i]);
        upper[k] = r[1] - r[3];
    }
    Tridiagonal { lower, diag, upper }
}
