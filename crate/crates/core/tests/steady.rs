use metastab::steady::{
    check_invariants, glue_slopes, length_map, shoot, solve, solve_n_zero, FirstSign, ShootOutcome, SteadyKind,
};
use metastab::{Diffusion, Error, Execution, Flux, ModelFunctions, ProblemSpec};

fn spec(h: Diffusion, eps: f64) -> ProblemSpec {
    ProblemSpec::new(eps, 1.0, ModelFunctions::builtin(h, Flux::Quadratic, 1.0).unwrap(), 800).unwrap()
}

/// For `h = 1` the slope `p` and height `u` of a trajectory keep
/// `eps (p + ln(1 - p)) - u^2 / 2` constant.
struct PhasePlane {
    eps: f64,
    alpha: f64,
}

impl PhasePlane {
    fn g(&self, p: f64) -> f64 {
        self.eps * (p + (1.0 - p).ln())
    }

    fn crest(&self) -> f64 {
        (-2.0 * self.g(self.alpha)).sqrt()
    }

    /// Slope at height `u` on the rising (`p > 0`) or falling leg.
    fn slope(&self, u: f64, rising: bool) -> f64 {
        let target = self.g(self.alpha) + 0.5 * u * u;
        let (mut lo, mut hi) = if rising { (0.0, self.alpha) } else { (-50.0, 0.0) };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            // g increases on p < 0 and decreases on 0 < p < 1
            let above = self.g(mid) > target;
            if above == rising {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn return_slope(&self) -> f64 {
        self.slope(0.0, false)
    }

    /// `int du / |p|` over both legs with `u = M sin(theta)`, which removes the
    /// square-root singularity at the crest. Composite Gauss-Legendre.
    fn length(&self) -> f64 {
        let m = self.crest();
        let nodes = [-0.906179845938664, -0.538469310105683, 0.0, 0.538469310105683, 0.906179845938664];
        let weights = [0.236926885056189, 0.478628670499366, 0.568888888888889, 0.478628670499366, 0.236926885056189];
        let panels = 400;
        let h = 0.5 * std::f64::consts::PI / panels as f64;
        let mut total = 0.0;
        for k in 0..panels {
            let mid = (k as f64 + 0.5) * h;
            for (x, w) in nodes.iter().zip(weights) {
                let th = mid + 0.5 * h * x;
                let u = m * th.sin();
                let du = m * th.cos();
                total += 0.5 * h * w * du * (1.0 / self.slope(u, true) + 1.0 / self.slope(u, false).abs());
            }
        }
        total
    }
}

#[test]
fn return_map_matches_phase_plane_for_constant_diffusion() {
    let s = spec(Diffusion::Const, 0.06);
    for alpha in [0.2, 0.5, 0.8] {
        let oracle = PhasePlane { eps: 0.06, alpha };
        let shot = shoot(alpha, &s, 1e-4, 4.0).unwrap();
        let l = shot.length.unwrap();
        let rel = (l - oracle.length()).abs() / oracle.length();
        assert!(rel < 1e-7, "alpha {alpha}: L = {l}, oracle {}", oracle.length());
        let beta = shot.return_slope.unwrap();
        assert!((beta - oracle.return_slope()).abs() < 1e-7, "alpha {alpha}: {beta} vs {}", oracle.return_slope());
        assert!((shot.trajectory.max_abs() - oracle.crest()).abs() < 1e-6);
    }
}

#[test]
fn constant_diffusion_escapes_at_unit_slope() {
    let s = spec(Diffusion::Const, 0.06);
    assert_eq!(shoot(1.0, &s, 1e-4, 4.0).unwrap().outcome, ShootOutcome::MonotoneEscape);
    assert_eq!(shoot(1.2, &s, 1e-4, 4.0).unwrap().outcome, ShootOutcome::MonotoneEscape);
}

#[test]
fn positive_state_has_the_requested_length() {
    for h in Diffusion::ALL {
        let st = solve(SteadyKind::Positive, &spec(h, 0.06)).unwrap();
        assert!(st.diagnostics.length_residual.abs() <= 1e-9);
        // the same slope, shot forward, returns at ell
        let shot = shoot(st.alpha_star, &spec(h, 0.06), 1e-4, 4.0).unwrap();
        assert!((shot.length.unwrap() - 1.0).abs() < 1e-6, "{h}: {:?}", shot.length);
    }
}

#[test]
fn negative_state_mirrors_positive_for_even_diffusion() {
    let s = spec(Diffusion::Mullins, 0.02);
    let pos = solve(SteadyKind::Positive, &s).unwrap();
    let neg = solve(SteadyKind::Negative, &s).unwrap();
    let n = pos.u.n_cells();
    for i in 0..=n {
        assert!((pos.u.values()[i] + neg.u.values()[n - i]).abs() < 1e-12);
    }
}

#[test]
fn multi_zero_states_satisfy_invariants() {
    let s = spec(Diffusion::Gauss, 0.003);
    for zeros in 1..=3 {
        let st = solve_n_zero(zeros, &s, FirstSign::Minus).unwrap();
        assert_eq!(st.u.sign_changes(), zeros);
        let v = check_invariants(&st, 1e-6);
        assert!(v.is_empty(), "{zeros} zeros: {v:?}");
    }
}

#[test]
fn too_viscous_for_the_arc_length() {
    // pi sqrt(0.03) > 1/2, so no arc fits on half the interval
    let err = solve(SteadyKind::OneZeroPlus, &spec(Diffusion::Gauss, 0.03)).unwrap_err();
    assert!(matches!(err, Error::NoSolution { .. }), "{err}");
    assert!(err.is_numerical());
}

#[test]
fn shorter_arc_has_smaller_boundary_slope() {
    let s = spec(Diffusion::Gauss, 0.01);
    let (left, right) = glue_slopes(&s, 0.0, 0.4, 1.0).unwrap();
    assert!(left < right, "{left} vs {right}");
}

#[test]
fn length_map_is_identical_across_execution_modes() {
    let s = spec(Diffusion::Gauss, 0.06);
    let alphas: Vec<f64> = (1..=16).map(|k| 0.05 * k as f64).collect();
    let seq = length_map(&alphas, &s, Execution::Sequential).unwrap();
    let par = length_map(&alphas, &s, Execution::Parallel).unwrap();
    assert_eq!(seq.points, par.points);
    assert!(seq.monotonicity_violations.is_empty());
}
