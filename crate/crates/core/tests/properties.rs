use metastab::parabolic::{godunov_flux, piecewise_initial, semidiscrete_rhs, Tridiagonal};
use metastab::steady::shoot;
use metastab::{alpha_bar, Diffusion, Flux, GridFunction, ModelFunctions, ProblemSpec, SignChange};
use proptest::prelude::*;

fn burgers() -> ModelFunctions {
    ModelFunctions::builtin(Diffusion::Const, Flux::Quadratic, 1.0).unwrap()
}

proptest! {
    #[test]
    fn godunov_flux_is_consistent_and_monotone(a in -2.0..2.0f64, b in -2.0..2.0f64, d in 0.0..0.5f64) {
        let m = burgers();
        prop_assert!((godunov_flux(&m, a, a) - m.f(a)).abs() < 1e-15);
        prop_assert!(godunov_flux(&m, a + d, b) >= godunov_flux(&m, a, b));
        prop_assert!(godunov_flux(&m, a, b + d) <= godunov_flux(&m, a, b));
    }

    #[test]
    fn alpha_bar_decreases_with_viscosity(e1 in 0.001..0.12f64, e2 in 0.001..0.12f64) {
        prop_assume!(e1 < e2);
        for h in [Diffusion::Gauss, Diffusion::Mullins] {
            let m = ModelFunctions::builtin(h, Flux::Quadratic, 1.0).unwrap();
            let (a1, a2) = (alpha_bar(e1, &m).unwrap(), alpha_bar(e2, &m).unwrap());
            prop_assert!(a2 < a1 && a1 < 1.0 && a2 > 0.0);
        }
        prop_assert_eq!(alpha_bar(e1, &burgers()).unwrap(), 1.0);
    }

    #[test]
    fn thomas_solves_dominant_systems(
        rows in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 2..40)
    ) {
        let lower: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let upper: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let diag: Vec<f64> = lower.iter().zip(&upper).map(|(l, u)| 2.5 + l.abs() + u.abs()).collect();
        let x: Vec<f64> = rows.iter().map(|r| r.2).collect();
        let m = x.len();
        let rhs: Vec<f64> = (0..m)
            .map(|k| {
                diag[k] * x[k]
                    + if k > 0 { lower[k] * x[k - 1] } else { 0.0 }
                    + if k + 1 < m { upper[k] * x[k + 1] } else { 0.0 }
            })
            .collect();
        let t = Tridiagonal { lower, diag, upper };
        let sol = t.solve(&rhs).unwrap();
        for (a, b) in sol.iter().zip(&x) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_crossing_of_a_line(x0 in 0.05..0.95f64, n in 16usize..400) {
        let g = GridFunction::sample(1.0, n, |x| if x == 0.0 || x == 1.0 { 0.0 } else { x - x0 });
        let (z, dir) = g.single_zero_crossing().unwrap();
        prop_assert!((z - x0).abs() < 1e-12);
        prop_assert_eq!(dir, SignChange::NegToPos);
    }

    #[test]
    fn return_length_increases_with_slope(a in 0.01..0.85f64, b in 0.01..0.85f64) {
        prop_assume!((a - b).abs() > 1e-3);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let m = ModelFunctions::builtin(Diffusion::Gauss, Flux::Quadratic, 1.0).unwrap();
        let spec = ProblemSpec::new(0.06, 1.0, m, 100).unwrap();
        let l1 = shoot(lo, &spec, 1e-4, 4.0).unwrap().length.unwrap();
        let l2 = shoot(hi, &spec, 1e-4, 4.0).unwrap().length.unwrap();
        prop_assert!(l2 > l1);
    }

    #[test]
    fn rhs_is_odd_for_even_diffusion(c in prop::collection::vec(-0.9..0.9f64, 3)) {
        // odd reflection u(x) -> -u(ell - x) commutes with the scheme
        let m = ModelFunctions::builtin(Diffusion::Gauss, Flux::Quadratic, 1.0).unwrap();
        let spec = ProblemSpec::new(0.05, 1.0, m, 64).unwrap();
        let u = spec.sample(|x| {
            let s = (std::f64::consts::PI * x).sin();
            s * (c[0] + c[1] * x + c[2] * x * x)
        });
        let n = u.n_cells();
        let reflected = GridFunction::new(1.0, (0..=n).map(|i| -u.values()[n - i]).collect()).unwrap();
        let r = semidiscrete_rhs(&u, &spec);
        let rr = semidiscrete_rhs(&reflected, &spec);
        for i in 0..=n {
            prop_assert!((rr.values()[i] + r.values()[n - i]).abs() < 1e-9);
        }
    }

    #[test]
    fn piecewise_data_interpolates(y in -0.9..0.9f64, xm in 0.1..0.9f64) {
        let d = piecewise_initial(&[(0.0, 0.0), (xm, y), (1.0, 0.0)]).unwrap();
        prop_assert!((d.eval(xm) - y).abs() < 1e-12);
        prop_assert!((d.eval(0.5 * xm) - 0.5 * y).abs() < 1e-12);
    }
}
