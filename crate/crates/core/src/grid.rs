//! Uniform-grid sampled functions on `[0, ell]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values at the nodes `x_i = i * ell / n`, `i = 0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    ell: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(ell: f64, values: Vec<f64>) -> Result<Self> {
        if !(ell > 0.0 && ell.is_finite()) {
            return Err(Error::InvalidInput(format!("grid length must be positive, got {ell}")));
        }
        if values.len() < 4 {
            return Err(Error::InvalidInput(format!(
                "a grid function needs at least 2 interior nodes, got {} nodes",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite grid value at node {i}")));
        }
        Ok(Self { ell, values })
    }

    /// Skips validation; callers guarantee the node count.
    pub(crate) fn from_raw(ell: f64, values: Vec<f64>) -> Self {
        debug_assert!(values.len() >= 2);
        Self { ell, values }
    }

    pub fn zeros(ell: f64, n_cells: usize) -> Self {
        Self::sample(ell, n_cells, |_| 0.0)
    }

    /// Samples `g` at the `n_cells + 1` nodes.
    pub fn sample(ell: f64, n_cells: usize, g: impl Fn(f64) -> f64) -> Self {
        let dx = ell / n_cells as f64;
        let values = (0..=n_cells).map(|i| g(i as f64 * dx)).collect();
        Self { ell, values }
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn n_cells(&self) -> usize {
        self.values.len() - 1
    }

    pub fn dx(&self) -> f64 {
        self.ell / self.n_cells() as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        let dx = self.dx();
        (0..self.values.len()).map(move |i| i as f64 * dx)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Piecewise-linear evaluation; clamps outside `[0, ell]`.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.n_cells();
        let s = (x / self.dx()).clamp(0.0, n as f64);
        let i = (s.floor() as usize).min(n - 1);
        let w = s - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    /// Centered first differences, one-sided at the ends.
    pub fn centered_derivative(&self) -> Vec<f64> {
        let n = self.n_cells();
        let dx = self.dx();
        let u = &self.values;
        (0..=n)
            .map(|i| match i {
                0 => (u[1] - u[0]) / dx,
                i if i == n => (u[n] - u[n - 1]) / dx,
                i => (u[i + 1] - u[i - 1]) / (2.0 * dx),
            })
            .collect()
    }

    /// Sup-norm distance over the nodes whose abscissa lies in `[a, b]`.
    pub fn sup_distance_on(&self, other: &GridFunction, a: f64, b: f64) -> f64 {
        debug_assert_eq!(self.values.len(), other.values.len());
        let tol = 1e-12 * self.ell;
        self.xs()
            .zip(self.values.iter().zip(&other.values))
            .filter(|(x, _)| *x >= a - tol && *x <= b + tol)
            .fold(0.0_f64, |m, (_, (p, q))| m.max((p - q).abs()))
    }

    pub fn sup_distance(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |m, (p, q)| m.max((p - q).abs()))
    }

    /// Sup-distance on `[a, b]` to an analytic profile.
    pub fn sup_distance_to_fn(&self, a: f64, b: f64, g: impl Fn(f64) -> f64) -> f64 {
        let tol = 1e-12 * self.ell;
        self.xs()
            .zip(&self.values)
            .filter(|(x, _)| *x >= a - tol && *x <= b + tol)
            .fold(0.0_f64, |m, (x, v)| m.max((v - g(x)).abs()))
    }

    /// Re-samples onto a grid with `n_cells` cells by linear interpolation.
    pub fn resample(&self, n_cells: usize) -> GridFunction {
        GridFunction::sample(self.ell, n_cells, |x| self.eval(x))
    }

    /// Location of the single interior sign change, if there is exactly one.
    ///
    /// Exact zeros are skipped when counting. The crossing is the midpoint of
    /// a run of exact zeros, or else the linear interpolant between the
    /// bracketing nodes.
    pub fn single_zero_crossing(&self) -> Option<(f64, SignChange)> {
        let n = self.n_cells();
        let mut last: Option<(usize, f64)> = None;
        let mut found = None;
        let mut count = 0;
        for i in 1..n {
            let v = self.values[i];
            if v == 0.0 {
                continue;
            }
            if let Some((j, w)) = last {
                if (w < 0.0) != (v < 0.0) {
                    count += 1;
                    let x0 = if i - j > 1 {
                        // exact zeros between the two nodes: take the middle of that run
                        0.5 * (self.x(j + 1) + self.x(i - 1))
                    } else {
                        let (xj, xi) = (self.x(j), self.x(i));
                        xj + (xi - xj) * w / (w - v)
                    };
                    let dir = if w < 0.0 { SignChange::NegToPos } else { SignChange::PosToNeg };
                    found = Some((x0, dir));
                }
            }
            last = Some((i, v));
        }
        if count == 1 {
            found
        } else {
            None
        }
    }

    /// Number of interior sign changes (exact zeros skipped).
    pub fn sign_changes(&self) -> usize {
        let mut prev: Option<bool> = None;
        let mut count = 0;
        for &v in &self.values[1..self.n_cells()] {
            if v == 0.0 {
                continue;
            }
            let neg = v < 0.0;
            if let Some(p) = prev {
                if p != neg {
                    count += 1;
                }
            }
            prev = Some(neg);
        }
        count
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignChange {
    NegToPos,
    PosToNeg,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_grids() {
        assert!(GridFunction::new(1.0, vec![0.0, 0.0, 0.0]).is_err());
        assert!(GridFunction::new(1.0, vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
        assert!(GridFunction::new(-1.0, vec![0.0; 5]).is_err());
    }

    #[test]
    fn linear_eval_and_derivative() {
        let g = GridFunction::sample(2.0, 10, |x| 3.0 * x - 1.0);
        assert!((g.eval(0.77) - (3.0 * 0.77 - 1.0)).abs() < 1e-12);
        assert!(g.centered_derivative().iter().all(|d| (d - 3.0).abs() < 1e-12));
    }

    #[test]
    fn zero_crossing_interpolates() {
        let g = GridFunction::sample(1.0, 100, |x| x * (1.0 - x) * (x - 0.45));
        let (x0, dir) = g.single_zero_crossing().unwrap();
        assert_eq!(dir, SignChange::NegToPos);
        assert!((x0 - 0.45).abs() < 1e-3);
        let h = GridFunction::sample(1.0, 100, |x| (6.0 * x).sin());
        assert_eq!(h.sign_changes(), 1);
        let k = GridFunction::sample(1.0, 100, |x| (10.0 * x).sin());
        assert!(k.single_zero_crossing().is_none());
    }
}
