use metastab::experiments::{repro, ReproConfig, ReproTarget};
use metastab::parabolic::{
    classify_initial, discrete_steady, evolve, semidiscrete_rhs, DataClass, InitialData, StepperConfig, Termination,
};
use metastab::steady::{solve, SteadyKind};
use metastab::{Diffusion, Flux, ModelFunctions, ProblemSpec};

fn spec(eps: f64, n: usize) -> ProblemSpec {
    ProblemSpec::new(eps, 1.0, ModelFunctions::builtin(Diffusion::Gauss, Flux::Quadratic, 1.0).unwrap(), n).unwrap()
}

#[test]
fn discrete_steady_state_is_a_fixed_point_near_the_shooting_state() {
    let s = spec(0.06, 1000);
    let pos = solve(SteadyKind::Positive, &s).unwrap();
    let (disc, offset) = discrete_steady(&pos, &s).unwrap();
    let residual = semidiscrete_rhs(&disc.u, &s).max_abs();
    assert!(residual < 1e-8, "residual {residual}");
    assert!(offset > 0.0 && offset < 2e-3, "offset {offset}");
}

#[test]
fn positive_datum_converges_to_the_positive_state() {
    let s = spec(0.06, 200);
    let pos = solve(SteadyKind::Positive, &s).unwrap();
    let neg = solve(SteadyKind::Negative, &s).unwrap();
    let targets = [discrete_steady(&pos, &s).unwrap().0, discrete_steady(&neg, &s).unwrap().0];
    let rec = evolve(&InitialData::quadratic(1.0, true), &s, &StepperConfig::default(), 100.0, &targets).unwrap();
    assert_eq!(rec.termination, Termination::ConvergedTo(SteadyKind::Positive));
    assert!(rec.metastable_t.unwrap() > 1.0 && rec.metastable_t.unwrap() < 20.0);
    assert!(rec.snapshot_times.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn subsolution_datum_increases_in_time() {
    // a small multiple of sin(pi x) lies below the positive state and grows towards it
    let s = spec(0.06, 200);
    let datum = InitialData::custom(1.0, "0.05 sin(pi x)", |x| 0.05 * (std::f64::consts::PI * x).sin()).unwrap();
    let rec = evolve(&datum, &s, &StepperConfig::default(), 5.0, &[]).unwrap();
    for w in rec.snapshots.windows(2) {
        assert!(w[0].values().iter().zip(w[1].values()).all(|(a, b)| b >= &(a - 1e-12)));
    }
}

#[test]
fn cubic_data_are_classified_by_sign_pattern() {
    assert_eq!(classify_initial(&InitialData::cubic(1.0, 0.45, true).unwrap(), 400), DataClass::B(0.45));
    assert_eq!(classify_initial(&InitialData::cubic(1.0, 0.3, false).unwrap(), 400), DataClass::C(0.3));
    assert_eq!(classify_initial(&InitialData::quadratic(1.0, false), 400), DataClass::ANeg);
}

#[test]
fn repro_writes_manifest_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ReproConfig::new(dir.path());
    let manifest = repro(&cfg, ReproTarget::Hyper).unwrap();
    assert_eq!(manifest.artifacts.len(), 18);
    for a in &manifest.artifacts {
        assert!(dir.path().join(&a.path).is_file(), "{}", a.path);
    }
    let text = std::fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["artifacts"].as_array().unwrap().len(), 18);
    let snap = std::fs::read_to_string(dir.path().join("hyper/b_0.45/snapshots.csv")).unwrap();
    assert!(snap.starts_with("t,x,u\n0,0,0\n"));
}
