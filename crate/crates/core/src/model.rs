//! Diffusion/flux pairs, problem setup, structural checks and the
//! stationary operator `L u = -eps (h(u) u_x)_x + f'(u) u_x - f'(u)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::GridFunction;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Built-in diffusion coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Diffusion {
    /// `h(u) = 1`
    Const,
    /// `h(u) = exp(-u^2)`
    Gauss,
    /// `h(u) = 1 / (1 + u^2)`
    Mullins,
}

impl Diffusion {
    pub const ALL: [Diffusion; 3] = [Diffusion::Const, Diffusion::Gauss, Diffusion::Mullins];

    pub fn name(self) -> &'static str {
        match self {
            Diffusion::Const => "const",
            Diffusion::Gauss => "gauss",
            Diffusion::Mullins => "mullins",
        }
    }
}

impl FromStr for Diffusion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "const" => Ok(Diffusion::Const),
            "gauss" => Ok(Diffusion::Gauss),
            "mullins" => Ok(Diffusion::Mullins),
            other => Err(Error::InvalidInput(format!(
                "unknown diffusion '{other}' (supported: const, gauss, mullins)"
            ))),
        }
    }
}

impl fmt::Display for Diffusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Built-in convex fluxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Flux {
    /// `f(u) = u^2 / 2`
    Quadratic,
}

impl Flux {
    pub fn name(self) -> &'static str {
        match self {
            Flux::Quadratic => "quadratic",
        }
    }
}

impl FromStr for Flux {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadratic" => Ok(Flux::Quadratic),
            other => Err(Error::InvalidInput(format!(
                "unknown flux '{other}' (supported: quadratic)"
            ))),
        }
    }
}

impl fmt::Display for Flux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The pair `(h, f)` with the derivatives the solvers need and the
/// validity radius `R` on which the structural assumptions are checked.
#[derive(Clone)]
pub struct ModelFunctions {
    h: ScalarFn,
    dh: ScalarFn,
    d2h0: f64,
    f: ScalarFn,
    df: ScalarFn,
    d2f: ScalarFn,
    d2f0: f64,
    radius: f64,
    name_h: String,
    name_f: String,
    quadratic_flux: bool,
}

impl fmt::Debug for ModelFunctions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelFunctions")
            .field("h", &self.name_h)
            .field("f", &self.name_f)
            .field("R", &self.radius)
            .finish()
    }
}

fn fd_step(u: f64) -> f64 {
    1e-6 * u.abs().max(1.0)
}

fn central_difference(g: ScalarFn) -> ScalarFn {
    Arc::new(move |u| {
        let s = fd_step(u);
        (g(u + s) - g(u - s)) / (2.0 * s)
    })
}

fn second_difference_at_zero(g: &ScalarFn) -> f64 {
    let s = 1e-4;
    (g(s) - 2.0 * g(0.0) + g(-s)) / (s * s)
}

impl ModelFunctions {
    pub fn builtin(h: Diffusion, f: Flux, radius: f64) -> Result<Self> {
        check_radius(radius)?;
        let (hf, dhf, d2h0): (ScalarFn, ScalarFn, f64) = match h {
            Diffusion::Const => (Arc::new(|_| 1.0), Arc::new(|_| 0.0), 0.0),
            Diffusion::Gauss => (
                Arc::new(|u: f64| (-u * u).exp()),
                Arc::new(|u: f64| -2.0 * u * (-u * u).exp()),
                -2.0,
            ),
            Diffusion::Mullins => (
                Arc::new(|u: f64| 1.0 / (1.0 + u * u)),
                Arc::new(|u: f64| {
                    let d = 1.0 + u * u;
                    -2.0 * u / (d * d)
                }),
                -2.0,
            ),
        };
        let (ff, dff, d2ff, d2f0): (ScalarFn, ScalarFn, ScalarFn, f64) = match f {
            Flux::Quadratic => (
                Arc::new(|u: f64| 0.5 * u * u),
                Arc::new(|u: f64| u),
                Arc::new(|_| 1.0),
                1.0,
            ),
        };
        Ok(Self {
            h: hf,
            dh: dhf,
            d2h0,
            f: ff,
            df: dff,
            d2f: d2ff,
            d2f0,
            radius,
            name_h: h.name().to_string(),
            name_f: f.name().to_string(),
            quadratic_flux: matches!(f, Flux::Quadratic),
        })
    }

    /// Looks up built-ins by their configuration identifiers.
    pub fn from_names(h: &str, f: &str, radius: f64) -> Result<Self> {
        Self::builtin(h.parse()?, f.parse()?, radius)
    }

    /// A user-supplied pair; all derivatives come from central differences.
    pub fn custom<H, F>(name_h: &str, h: H, name_f: &str, f: F, radius: f64) -> Result<Self>
    where
        H: Fn(f64) -> f64 + Send + Sync + 'static,
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_radius(radius)?;
        let h: ScalarFn = Arc::new(h);
        let f: ScalarFn = Arc::new(f);
        let dh = central_difference(h.clone());
        let df = central_difference(f.clone());
        let d2f = central_difference(df.clone());
        let d2h0 = second_difference_at_zero(&h);
        let d2f0 = second_difference_at_zero(&f);
        Ok(Self {
            h,
            dh,
            d2h0,
            f,
            df,
            d2f,
            d2f0,
            radius,
            name_h: name_h.to_string(),
            name_f: name_f.to_string(),
            quadratic_flux: false,
        })
    }

    #[inline]
    pub fn h(&self, u: f64) -> f64 {
        (self.h)(u)
    }

    #[inline]
    pub fn dh(&self, u: f64) -> f64 {
        (self.dh)(u)
    }

    #[inline]
    pub fn f(&self, u: f64) -> f64 {
        (self.f)(u)
    }

    #[inline]
    pub fn df(&self, u: f64) -> f64 {
        (self.df)(u)
    }

    #[inline]
    pub fn d2f(&self, u: f64) -> f64 {
        (self.d2f)(u)
    }

    pub fn d2h0(&self) -> f64 {
        self.d2h0
    }

    pub fn d2f0(&self) -> f64 {
        self.d2f0
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn name_h(&self) -> &str {
        &self.name_h
    }

    pub fn name_f(&self) -> &str {
        &self.name_f
    }

    /// True for `f(u) = u^2/2`, where the reaction ODE `z' = f'(z)` has the
    /// closed form `z e^t`.
    pub fn has_quadratic_flux(&self) -> bool {
        self.quadratic_flux
    }

    /// Sampled check of `h(u) = h(-u)` on `[-R, R]`.
    pub fn diffusion_is_even(&self, samples: usize) -> bool {
        (0..=samples).all(|k| {
            let u = self.radius * k as f64 / samples as f64;
            let (a, b) = (self.h(u), self.h(-u));
            (a - b).abs() <= 1e-12 * a.abs().max(1.0)
        })
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("validity radius must be positive, got {radius}")))
    }
}

/// Viscosity, domain length, model and grid resolution.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub epsilon: f64,
    pub ell: f64,
    pub model: ModelFunctions,
    pub n_cells: usize,
}

impl ProblemSpec {
    pub fn new(epsilon: f64, ell: f64, model: ModelFunctions, n_cells: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(ell > 0.0 && ell.is_finite()) {
            return Err(Error::InvalidInput(format!("ell must be positive, got {ell}")));
        }
        if n_cells < 16 {
            return Err(Error::InvalidInput(format!("n_cells must be at least 16, got {n_cells}")));
        }
        Ok(Self { epsilon, ell, model, n_cells })
    }

    pub fn dx(&self) -> f64 {
        self.ell / self.n_cells as f64
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(epsilon, self.ell, self.model.clone(), self.n_cells)
    }

    pub fn with_ell(&self, ell: f64) -> Result<Self> {
        Self::new(self.epsilon, ell, self.model.clone(), self.n_cells)
    }

    pub fn with_n_cells(&self, n_cells: usize) -> Result<Self> {
        Self::new(self.epsilon, self.ell, self.model.clone(), n_cells)
    }

    pub fn sample(&self, g: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction::sample(self.ell, self.n_cells, g)
    }
}

/// Outcome of one sampled structural condition.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Sample with the worst value of the checked quantity.
    pub worst_at: f64,
    pub worst_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub checks: Vec<ConditionCheck>,
    /// Sampled minimum of `h` on `[-R, R]`.
    pub h0: f64,
    /// Fitted constant of `f'(u) <= K u` on `(0, 0.9 R]`.
    pub k: f64,
}

impl AssumptionReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub const DEFAULT_ASSUMPTION_SAMPLES: usize = 201;

fn finite(function: &'static str, u: f64, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::EvaluationFailure { function, at: u })
    }
}

/// Tracks the sample where a quantity is largest; later samples win ties.
struct Worst {
    at: f64,
    value: f64,
}

impl Worst {
    fn new() -> Self {
        Self { at: f64::NAN, value: f64::NEG_INFINITY }
    }

    fn offer(&mut self, at: f64, value: f64) {
        if value >= self.value {
            self.at = at;
            self.value = value;
        }
    }
}

/// Checks the structural assumptions on `samples` uniform points of `[-R, R]`.
pub fn validate_assumptions(model: &ModelFunctions, samples: usize) -> Result<AssumptionReport> {
    if samples < 8 {
        return Err(Error::InvalidInput(format!("need at least 8 samples, got {samples}")));
    }
    let r = model.radius;
    let pts: Vec<f64> = (0..samples)
        .map(|k| -r + 2.0 * r * k as f64 / (samples - 1) as f64)
        .collect();

    // h(u) >= h0 > 0 and h'(u) u <= 0
    let mut h_min = Worst::new();
    let mut h_mono = Worst::new();
    // f'' > 0, f'(-u) = -f'(u), f'(u) u > 0
    let mut convex = Worst::new();
    let mut odd = Worst::new();
    let mut sign = Worst::new();
    for &u in &pts {
        let h = finite("h", u, model.h(u))?;
        let dh = finite("h'", u, model.dh(u))?;
        finite("f", u, model.f(u))?;
        let df = finite("f'", u, model.df(u))?;
        let dfm = finite("f'", -u, model.df(-u))?;
        let s = fd_step(u);
        let d2f = finite("f''", u, (model.df(u + s) - model.df(u - s)) / (2.0 * s))?;
        h_min.offer(u, -h);
        h_mono.offer(u, dh * u);
        convex.offer(u, -d2f);
        odd.offer(u, (dfm + df).abs() / df.abs().max(1.0));
        if u != 0.0 {
            sign.offer(u, -df * u);
        }
    }
    let f0 = finite("f", 0.0, model.f(0.0))?;
    let df0 = finite("f'", 0.0, model.df(0.0))?;

    let a = 0.9 * r;
    let mut k_fit = Worst::new();
    for j in 1..=samples {
        let u = a * j as f64 / samples as f64;
        let df = finite("f'", u, model.df(u))?;
        k_fit.offer(u, df / u);
    }

    let h0 = -h_min.value;
    let checks = vec![
        ConditionCheck {
            name: "h_positive",
            passed: h0 > 0.0,
            worst_at: h_min.at,
            worst_value: h0,
        },
        ConditionCheck {
            name: "h_nonincreasing_in_abs",
            passed: h_mono.value <= 1e-12,
            worst_at: h_mono.at,
            worst_value: h_mono.value,
        },
        ConditionCheck {
            name: "flux_origin",
            passed: f0.abs() <= 1e-12 && df0.abs() <= 1e-12,
            worst_at: 0.0,
            worst_value: f0.abs().max(df0.abs()),
        },
        ConditionCheck {
            name: "flux_convex",
            passed: convex.value < 0.0,
            worst_at: convex.at,
            worst_value: -convex.value,
        },
        ConditionCheck {
            name: "flux_odd_derivative",
            passed: odd.value <= 1e-9,
            worst_at: odd.at,
            worst_value: odd.value,
        },
        ConditionCheck {
            name: "flux_sign",
            passed: sign.value < 0.0,
            worst_at: sign.at,
            worst_value: -sign.value,
        },
        ConditionCheck {
            name: "flux_linear_bound",
            passed: k_fit.value.is_finite() && k_fit.value > 0.0,
            worst_at: k_fit.at,
            worst_value: k_fit.value,
        },
    ];
    Ok(AssumptionReport { checks, h0, k: k_fit.value })
}

/// Critical initial slope `2 / (1 + sqrt(1 - 4 eps h''(0) / f''(0)))`.
pub fn alpha_bar(epsilon: f64, model: &ModelFunctions) -> Result<f64> {
    let disc = 1.0 - 4.0 * epsilon * model.d2h0 / model.d2f0;
    if !(disc >= 0.0) {
        return Err(Error::Domain(format!(
            "critical slope undefined: 1 - 4 eps h''(0)/f''(0) = {disc} < 0 for eps = {epsilon}"
        )));
    }
    Ok(2.0 / (1.0 + disc.sqrt()))
}

/// `gamma ell^2 / pi^2` with `gamma = K / m`: at or above this viscosity
/// only the trivial steady state exists.
pub fn existence_threshold(model: &ModelFunctions, ell: f64) -> Result<f64> {
    let report = validate_assumptions(model, DEFAULT_ASSUMPTION_SAMPLES)?;
    if let Some(c) = report.failures().next() {
        return Err(Error::Domain(format!(
            "model assumption '{}' fails at u = {} (value {})",
            c.name, c.worst_at, c.worst_value
        )));
    }
    let gamma = report.k / report.h0;
    Ok(gamma * ell * ell / (PI * PI))
}

/// Central-difference residual of `L` at interior nodes (zero at the ends).
pub fn apply_l(u: &GridFunction, spec: &ProblemSpec) -> GridFunction {
    let m = &spec.model;
    let eps = spec.epsilon;
    let v = u.values();
    let n = u.n_cells();
    let dx = u.dx();
    let mut out = vec![0.0; n + 1];
    for i in 1..n {
        let hp = m.h(0.5 * (v[i] + v[i + 1]));
        let hm = m.h(0.5 * (v[i] + v[i - 1]));
        let diffusion = (hp * (v[i + 1] - v[i]) - hm * (v[i] - v[i - 1])) / (dx * dx);
        let ux = (v[i + 1] - v[i - 1]) / (2.0 * dx);
        let fp = m.df(v[i]);
        out[i] = -eps * diffusion + fp * ux - fp;
    }
    GridFunction::from_raw(u.ell(), out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss() -> ModelFunctions {
        ModelFunctions::builtin(Diffusion::Gauss, Flux::Quadratic, 1.0).unwrap()
    }

    #[test]
    fn builtins_pass_and_fit_k() {
        let r = validate_assumptions(&gauss(), 101).unwrap();
        assert!(r.all_passed(), "{r:?}");
        assert!((r.k - 1.0).abs() < 1e-12);
        assert!((r.h0 - (-1.0f64).exp()).abs() < 1e-12);

        let mullins = ModelFunctions::builtin(Diffusion::Mullins, Flux::Quadratic, 1.0).unwrap();
        let r = validate_assumptions(&mullins, 101).unwrap();
        assert!(r.all_passed());
        assert!((r.h0 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn increasing_diffusion_fails_with_positive_witness() {
        let bad = ModelFunctions::custom("1+u^2", |u| 1.0 + u * u, "u^2/2", |u| 0.5 * u * u, 1.0)
            .unwrap();
        let r = validate_assumptions(&bad, 64).unwrap();
        let c = r.check("h_nonincreasing_in_abs").unwrap();
        assert!(!c.passed);
        assert!(c.worst_at > 0.0);
        // the remaining conditions hold for a quadratic flux
        assert!(r.check("flux_convex").unwrap().passed);
        assert!(existence_threshold(&bad, 1.0).is_err());
    }

    #[test]
    fn non_finite_evaluation_names_the_sample() {
        let bad = ModelFunctions::custom("log", |u: f64| (1.0 - u).ln(), "u^2/2", |u| 0.5 * u * u, 1.0)
            .unwrap();
        match validate_assumptions(&bad, 16) {
            Err(Error::EvaluationFailure { function: "h", at }) => assert_eq!(at, 1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn too_few_samples() {
        assert!(validate_assumptions(&gauss(), 7).is_err());
    }

    #[test]
    fn custom_derivatives_match_builtin() {
        let c = ModelFunctions::custom(
            "gauss",
            |u: f64| (-u * u).exp(),
            "quad",
            |u| 0.5 * u * u,
            1.0,
        )
        .unwrap();
        let b = gauss();
        for k in 0..=20 {
            let u = -1.0 + 0.1 * k as f64;
            assert!((c.dh(u) - b.dh(u)).abs() < 1e-8);
            assert!((c.df(u) - b.df(u)).abs() < 1e-8);
        }
        assert!((c.d2h0() + 2.0).abs() < 1e-5);
        assert!((c.d2f0() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn alpha_bar_values() {
        let m = gauss();
        assert!((alpha_bar(0.06, &m).unwrap() - 0.902_302_11).abs() < 1e-7);
        assert!((alpha_bar(0.12, &m).unwrap() - 5.0 / 6.0).abs() < 1e-12);
        let c = ModelFunctions::builtin(Diffusion::Const, Flux::Quadratic, 1.0).unwrap();
        assert_eq!(alpha_bar(0.3, &c).unwrap(), 1.0);
        // strictly decreasing for h''(0) < 0
        let a: Vec<f64> = [0.01, 0.05, 0.1].iter().map(|&e| alpha_bar(e, &m).unwrap()).collect();
        assert!(a[0] > a[1] && a[1] > a[2]);
    }

    #[test]
    fn alpha_bar_domain_error() {
        let convex_h =
            ModelFunctions::custom("cosh", |u: f64| u.cosh(), "quad", |u| 0.5 * u * u, 1.0).unwrap();
        assert!(matches!(alpha_bar(1.0, &convex_h), Err(Error::Domain(_))));
    }

    #[test]
    fn thresholds() {
        let c = ModelFunctions::builtin(Diffusion::Const, Flux::Quadratic, 1.0).unwrap();
        let t1 = existence_threshold(&c, 1.0).unwrap();
        assert!((t1 - 1.0 / (PI * PI)).abs() < 1e-12);
        let t2 = existence_threshold(&c, 2.0).unwrap();
        assert!((t2 / t1 - 4.0).abs() < 1e-12);
        let g = existence_threshold(&gauss(), 1.0).unwrap();
        assert!((g - 1.0f64.exp() / (PI * PI)).abs() < 1e-12);
    }

    #[test]
    fn residual_of_trivial_state_is_exactly_zero() {
        let spec = ProblemSpec::new(0.01, 1.0, gauss(), 64).unwrap();
        let r = apply_l(&GridFunction::zeros(1.0, 64), &spec);
        assert!(r.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn affine_super_solution() {
        let spec = ProblemSpec::new(0.06, 1.0, gauss(), 200).unwrap();
        let v1 = spec.sample(|x| 1.5 * x + 0.1);
        let r = apply_l(&v1, &spec);
        assert!(r.values()[1..200].iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn sine_sub_solution() {
        for e in [0.01, 0.03] {
            let spec = ProblemSpec::new(e, 1.0, gauss(), 400).unwrap();
            let alpha = 0.1;
            let v2 = spec.sample(|x| alpha * (PI * x).sin());
            let r = apply_l(&v2, &spec);
            assert!(r.values().iter().all(|&v| v <= 1e-10), "eps = {e}");
        }
    }

    #[test]
    fn spec_validation() {
        assert!(ProblemSpec::new(0.0, 1.0, gauss(), 64).is_err());
        assert!(ProblemSpec::new(0.1, 0.0, gauss(), 64).is_err());
        assert!(ProblemSpec::new(0.1, 1.0, gauss(), 15).is_err());
    }

    #[test]
    fn names_round_trip() {
        for d in Diffusion::ALL {
            assert_eq!(d.name().parse::<Diffusion>().unwrap(), d);
        }
        let err = "cubic".parse::<Flux>().unwrap_err().to_string();
        assert!(err.contains("quadratic"));
    }
}
