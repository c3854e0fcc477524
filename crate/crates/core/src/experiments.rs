//! Scripted numerical experiments. Every run writes its CSV/JSON files under
//! an output directory and returns the summaries plus the list of files it
//! produced, which `write_manifest` collects for the plotting scripts.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::GridFunction;
use crate::hyperbolic::{fixed_zero_check, limit_distance, solve_hyperbolic, HyperConfig, LimitKind};
use crate::io;
use crate::model::{alpha_bar, Diffusion, Flux, ModelFunctions, ProblemSpec};
use crate::parabolic::{
    datum_jump, datum_kinks, discrete_steady, evolve, zero_crossing_series, EvolveRecord, InitialData,
    StepperConfig, Termination,
};
use crate::steady::{
    distance_to_line, length_map, solve, solve_negative, solve_positive, SteadyKind, SteadyState,
};

/// Shared settings for all experiments.
#[derive(Debug, Clone, Serialize)]
pub struct ReproConfig {
    pub out_dir: PathBuf,
    pub ell: f64,
    pub radius: f64,
    pub steady_cells: usize,
    pub evolve_cells: usize,
    pub hyper_cells: usize,
    pub stepper: StepperConfig,
    #[serde(skip)]
    pub exec: Execution,
    pub include_slow: bool,
}

impl ReproConfig {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        Self {
            out_dir: out_dir.into(),
            ell: 1.0,
            radius: 1.0,
            steady_cells: 800,
            evolve_cells: 2000,
            hyper_cells: 400,
            stepper: StepperConfig::default(),
            exec: Execution::default(),
            include_slow: false,
        }
    }

    fn model(&self, h: Diffusion) -> ModelFunctions {
        ModelFunctions::builtin(h, Flux::Quadratic, self.radius).expect("built-in models are valid")
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.out_dir.join(rel)
    }
}

/// One produced file.
#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub path: String,
    /// Figure id the file feeds.
    pub figure: String,
    pub description: String,
    pub config: serde_json::Value,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct Manifest {
    pub artifacts: Vec<Artifact>,
}

impl Manifest {
    pub fn extend(&mut self, more: Vec<Artifact>) {
        self.artifacts.extend(more);
    }
}

pub fn write_manifest(cfg: &ReproConfig, manifest: &Manifest) -> Result<PathBuf> {
    let p = cfg.path("manifest.json");
    io::write_json(&p, manifest)?;
    Ok(p)
}

fn artifact(rel: &str, figure: &str, description: &str, config: serde_json::Value) -> Artifact {
    Artifact { path: rel.to_string(), figure: figure.to_string(), description: description.to_string(), config }
}

/// Distances of one snapshot to the stable states.
#[derive(Debug, Clone, Serialize)]
pub struct Probe {
    pub t: f64,
    /// To the steady states of the discretized equations; `None` when the
    /// stable states do not exist or were not computed.
    pub dist_pos: Option<f64>,
    pub dist_neg: Option<f64>,
    /// To the shooting states sampled on the grid.
    pub dist_pos_shooting: Option<f64>,
    pub dist_neg_shooting: Option<f64>,
    pub zero: Option<f64>,
    /// Largest jump between neighbouring nodes.
    pub max_node_jump: f64,
}

/// What an evolution case reports (also written as `summary.json`).
#[derive(Debug, Clone, Serialize)]
pub struct CaseSummary {
    pub name: String,
    pub h: String,
    pub f: String,
    pub epsilon: f64,
    pub ell: f64,
    pub n_cells: usize,
    pub datum: String,
    pub t_end: f64,
    pub termination: Termination,
    pub reached: Option<SteadyKind>,
    pub metastable_t: Option<f64>,
    pub final_time: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Sup distance between the discrete and the shooting steady states.
    pub discretization_offset: Option<f64>,
    pub probes: Vec<Probe>,
    pub stepper: StepperConfig,
}

/// Positive and negative steady states: as computed by shooting and as
/// fixed points of the discretization.
#[derive(Debug, Clone)]
pub struct StableTargets {
    pub shooting: [SteadyState; 2],
    pub discrete: [SteadyState; 2],
    pub offset: f64,
}

pub fn stable_targets(spec: &ProblemSpec) -> Result<StableTargets> {
    let pos = solve_positive(spec)?;
    let neg = solve_negative(spec)?;
    let (dp, op) = discrete_steady(&pos, spec)?;
    let (dn, on) = discrete_steady(&neg, spec)?;
    Ok(StableTargets { shooting: [pos, neg], discrete: [dp, dn], offset: op.max(on) })
}

fn probe(t: f64, g: &GridFunction, targets: Option<&StableTargets>) -> Probe {
    let dist = |s: &SteadyState| g.sup_distance(&s.u);
    Probe {
        t,
        dist_pos: targets.map(|tg| dist(&tg.discrete[0])),
        dist_neg: targets.map(|tg| dist(&tg.discrete[1])),
        dist_pos_shooting: targets.map(|tg| dist(&tg.shooting[0])),
        dist_neg_shooting: targets.map(|tg| dist(&tg.shooting[1])),
        zero: g.single_zero_crossing().map(|z| z.0),
        max_node_jump: g.values().windows(2).fold(0.0, |m, w| f64::max(m, (w[1] - w[0]).abs())),
    }
}

/// Input of one evolution.
#[derive(Debug, Clone)]
pub struct Case {
    pub name: String,
    pub h: Diffusion,
    pub epsilon: f64,
    pub datum: InitialData,
    pub t_end: f64,
    /// Times at which probes are recorded.
    pub probe_times: Vec<f64>,
}

/// Evolution towards the stable states with probes and the files
/// `<name>/snapshots.csv`, `<name>/zeros.csv`, `<name>/summary.json`.
pub struct CaseRun {
    pub summary: CaseSummary,
    pub record: EvolveRecord,
    pub targets: Option<StableTargets>,
    pub artifacts: Vec<Artifact>,
}

pub fn run_case(cfg: &ReproConfig, case: &Case, figure: &str) -> Result<CaseRun> {
    run_case_with(cfg, case, &cfg.model(case.h), figure)
}

fn case_path(name: &str, file: &str) -> String {
    if name.is_empty() {
        file.to_string()
    } else {
        format!("{name}/{file}")
    }
}

/// As [`run_case`] with an arbitrary model in place of `case.h`. Without
/// stable states (viscosity too large, or `h` not even) the run has no
/// convergence targets and the probes carry no distances.
pub fn run_case_with(cfg: &ReproConfig, case: &Case, model: &ModelFunctions, figure: &str) -> Result<CaseRun> {
    let spec = ProblemSpec::new(case.epsilon, cfg.ell, model.clone(), cfg.evolve_cells)?;
    let targets = match stable_targets(&spec) {
        Ok(t) => Some(t),
        Err(e @ (Error::NoSolution { .. } | Error::UnsupportedModel(_))) => {
            log::warn!("{}: evolving without stable targets: {e}", case.name);
            None
        }
        Err(e) => return Err(e),
    };
    let mut stepper = cfg.stepper.clone();
    stepper.extra_snapshots.extend(case.probe_times.iter().copied());
    let goals: &[SteadyState] = targets.as_ref().map_or(&[], |t| &t.discrete[..]);
    let record = evolve(&case.datum, &spec, &stepper, case.t_end, goals)?;
    let probes = record
        .snapshot_times
        .iter()
        .zip(&record.snapshots)
        .filter(|(t, _)| case.probe_times.iter().any(|p| (*p - **t).abs() <= 1e-12 * p.max(1.0)))
        .map(|(&t, g)| probe(t, g, targets.as_ref()))
        .collect();
    let reached = match record.termination {
        Termination::ConvergedTo(k) => Some(k),
        _ => None,
    };
    let summary = CaseSummary {
        name: case.name.clone(),
        h: model.name_h().into(),
        f: model.name_f().into(),
        epsilon: case.epsilon,
        ell: cfg.ell,
        n_cells: cfg.evolve_cells,
        datum: case.datum.description.clone(),
        t_end: case.t_end,
        termination: record.termination,
        reached,
        metastable_t: record.metastable_t,
        final_time: record.final_time,
        accepted_steps: record.accepted_steps,
        rejected_steps: record.rejected_steps,
        discretization_offset: targets.as_ref().map(|t| t.offset),
        probes,
        stepper,
    };
    let conf = json!({
        "h": summary.h, "f": summary.f, "epsilon": case.epsilon, "ell": cfg.ell,
        "n_cells": cfg.evolve_cells, "datum": summary.datum, "t_end": case.t_end,
        "steady_tol": summary.stepper.steady_tol,
    });
    let (snap, zeros, sum) =
        (case_path(&case.name, "snapshots.csv"), case_path(&case.name, "zeros.csv"), case_path(&case.name, "summary.json"));
    io::write_snapshots(&cfg.path(&snap), &record.snapshot_times, &record.snapshots)?;
    io::write_zeros(&cfg.path(&zeros), &zero_crossing_series(&record))?;
    io::write_json(&cfg.path(&sum), &summary)?;
    let artifacts = vec![
        artifact(&snap, figure, "solution snapshots (t,x,u)", conf.clone()),
        artifact(&zeros, figure, "zero of the solution per snapshot (t,x0)", conf.clone()),
        artifact(&sum, figure, "termination, metastable time and probes", conf),
    ];
    Ok(CaseRun { summary, record, targets, artifacts })
}

fn run_cases(cfg: &ReproConfig, cases: &[Case], figure: &str) -> Result<Vec<CaseRun>> {
    cfg.exec.map(cases, |c| run_case(cfg, c, figure)).into_iter().collect()
}

pub struct TestReport {
    pub cases: Vec<CaseSummary>,
    pub artifacts: Vec<Artifact>,
}

fn report(runs: Vec<CaseRun>) -> TestReport {
    let mut cases = Vec::new();
    let mut artifacts = Vec::new();
    for r in runs {
        cases.push(r.summary);
        artifacts.extend(r.artifacts);
    }
    TestReport { cases, artifacts }
}

/// Test 1: `+-x(1-x)` at `eps` in {0.06, 0.006}, `h = exp(-u^2)`.
pub fn run_test1(cfg: &ReproConfig) -> Result<TestReport> {
    let mut cases = Vec::new();
    for (eps, tag) in [(0.06, "figB"), (0.006, "figA")] {
        for positive in [true, false] {
            cases.push((
                Case {
                    name: format!("test1/eps{eps}_{}", if positive { "pos" } else { "neg" }),
                    h: Diffusion::Gauss,
                    epsilon: eps,
                    datum: InitialData::quadratic(cfg.ell, positive),
                    t_end: 1e3,
                    probe_times: vec![1.5, 3.5, 5.0],
                },
                tag,
            ));
        }
    }
    let runs: Vec<CaseRun> = cfg
        .exec
        .map(&cases, |(c, tag)| run_case(cfg, c, tag))
        .into_iter()
        .collect::<Result<_>>()?;
    Ok(report(runs))
}

/// Test 2: `-x(1-x)(x-x0)`, `x0` in {0.45, 0.55}, gauss and mullins, `eps = 0.06`.
pub fn run_test2(cfg: &ReproConfig) -> Result<TestReport> {
    let mut cases = Vec::new();
    for h in [Diffusion::Gauss, Diffusion::Mullins] {
        for x0 in [0.45, 0.55] {
            cases.push(Case {
                name: format!("test2/{}_x0_{x0}", h.name()),
                h,
                epsilon: 0.06,
                datum: InitialData::cubic(cfg.ell, x0, false)?,
                t_end: 1e3,
                probe_times: vec![1.5, 3.5],
            });
        }
    }
    Ok(report(run_cases(cfg, &cases, "figC")?))
}

/// Reference values of the metastability table (h, eps, T).
pub const REFERENCE_METASTABLE_T: [(&str, f64, f64); 9] = [
    ("const", 0.024, 4.0),
    ("const", 0.012, 20.0),
    ("const", 0.006, 7.7e4),
    ("mullins", 0.024, 3.2),
    ("mullins", 0.012, 21.75),
    ("mullins", 0.006, 2.14e5),
    ("gauss", 0.024, 6.0),
    ("gauss", 0.012, 22.0),
    ("gauss", 0.006, 2.5e5),
];

pub fn reference_t(h: &str, eps: f64) -> Option<f64> {
    REFERENCE_METASTABLE_T.iter().find(|(n, e, _)| *n == h && (e - eps).abs() < 1e-12).map(|r| r.2)
}

#[derive(Debug, Clone, Serialize)]
pub struct MetastabilityRow {
    pub h_name: String,
    pub epsilon: f64,
    /// `None` when no stable state was reached before `t_end`.
    pub t: Option<f64>,
    pub reached: Option<SteadyKind>,
    pub steady_tol: f64,
    pub n_cells: usize,
    pub reference_t: Option<f64>,
}

pub const TEST3_EPSILONS: [f64; 3] = [0.024, 0.012, 0.006];
pub const TEST3_T_END: f64 = 1e7;

pub struct Test3Report {
    pub rows: Vec<MetastabilityRow>,
    pub cases: Vec<CaseSummary>,
    /// Zero crossings after every accepted step, per case.
    pub zero_tracks: Vec<Vec<(f64, f64)>>,
    pub artifacts: Vec<Artifact>,
}

/// Test 3: metastable times from `x(1-x)(x-0.45)`.
pub fn run_test3(cfg: &ReproConfig, epsilons: &[f64], h_names: &[Diffusion]) -> Result<Test3Report> {
    let mut cases = Vec::new();
    for &h in h_names {
        for &eps in epsilons {
            cases.push(Case {
                name: format!("test3/{}_eps{eps}", h.name()),
                h,
                epsilon: eps,
                datum: InitialData::cubic(cfg.ell, 0.45, true)?,
                t_end: TEST3_T_END,
                probe_times: vec![5.0, 1e3],
            });
        }
    }
    let runs = run_cases(cfg, &cases, "figD")?;
    let rows: Vec<MetastabilityRow> = runs
        .iter()
        .map(|r| MetastabilityRow {
            h_name: r.summary.h.clone(),
            epsilon: r.summary.epsilon,
            t: r.summary.metastable_t,
            reached: r.summary.reached,
            steady_tol: r.summary.stepper.steady_tol,
            n_cells: r.summary.n_cells,
            reference_t: reference_t(&r.summary.h, r.summary.epsilon),
        })
        .collect();
    let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
    io::write_records(
        &cfg.path("test3/table.csv"),
        &["h", "eps", "T", "reached", "steady_tol", "n_cells", "reference_T"],
        rows.iter().map(|r| {
            vec![
                r.h_name.clone(),
                format!("{}", r.epsilon),
                fmt_opt(r.t),
                r.reached.map(|k| k.to_string()).unwrap_or_else(|| "incomplete".into()),
                format!("{}", r.steady_tol),
                r.n_cells.to_string(),
                fmt_opt(r.reference_t),
            ]
        }),
    )?;
    let zero_tracks: Vec<Vec<(f64, f64)>> = runs.iter().map(|r| r.record.zero_crossings.clone()).collect();
    for (r, track) in runs.iter().zip(&zero_tracks) {
        io::write_zeros(&cfg.path(&format!("{}/zeros_steps.csv", r.summary.name)), track)?;
    }
    let mut rep = report(runs);
    for c in &rep.cases {
        let conf = json!({"h": c.h, "epsilon": c.epsilon, "n_cells": c.n_cells, "datum": c.datum});
        rep.artifacts.push(artifact(
            &format!("{}/zeros_steps.csv", c.name),
            "spost",
            "zero of the solution after every accepted step (t,x0)",
            conf,
        ));
    }
    rep.artifacts.push(artifact(
        "test3/table.csv",
        "meta",
        "metastable times with the reference values",
        json!({"epsilons": epsilons, "t_end": TEST3_T_END, "steady_tol": cfg.stepper.steady_tol}),
    ));
    Ok(Test3Report { rows, cases: rep.cases, zero_tracks, artifacts: rep.artifacts })
}

/// Opt-in runs at `eps = 0.003`: the type B datum up to `t = 1e6`, where the
/// plateau persists, plus type A and type C data up to `t = 1e3`.
pub fn run_slow(cfg: &ReproConfig) -> Result<TestReport> {
    let short = |name: &str, datum: InitialData, figure: &'static str| {
        (
            Case {
                name: format!("slow/{name}"),
                h: Diffusion::Gauss,
                epsilon: 0.003,
                datum,
                t_end: 1e3,
                probe_times: vec![5.0, 1e3],
            },
            figure,
        )
    };
    let cases = vec![
        (
            Case {
                name: "slow/cubic_0.45".into(),
                h: Diffusion::Gauss,
                epsilon: 0.003,
                datum: InitialData::cubic(cfg.ell, 0.45, true)?,
                t_end: 1e6,
                probe_times: vec![5.0, 1e3, 1e6],
            },
            "fig1",
        ),
        short("quad_pos", InitialData::quadratic(cfg.ell, true), "fig2"),
        short("quad_neg", InitialData::quadratic(cfg.ell, false), "fig2"),
        short("cubic_neg_0.3", InitialData::cubic(cfg.ell, 0.3, false)?, "fig3"),
        short("cubic_neg_0.7", InitialData::cubic(cfg.ell, 0.7, false)?, "fig3"),
    ];
    let runs: Vec<CaseRun> = cfg
        .exec
        .map(&cases, |(c, figure)| run_case(cfg, c, figure))
        .into_iter()
        .collect::<Result<_>>()?;
    Ok(report(runs))
}

/// Test 4: the discontinuous and the kinked datum at `eps = 0.006`.
pub fn run_test4(cfg: &ReproConfig) -> Result<TestReport> {
    let cases = [("jump", datum_jump()), ("kinks", datum_kinks())].map(|(name, datum)| Case {
        name: format!("test4/{name}"),
        h: Diffusion::Gauss,
        epsilon: 0.006,
        datum,
        t_end: 1e5,
        probe_times: vec![1.5, 10.0, 1e3, 1e5],
    });
    Ok(report(run_cases(cfg, &cases, "test4")?))
}

#[derive(Debug, Clone, Serialize)]
pub struct LalphaCurve {
    pub h: String,
    pub epsilon: f64,
    pub alpha_bar: f64,
    /// Largest slope that still returned to zero.
    pub last_return: Option<f64>,
    pub first_escape: Option<f64>,
    pub monotone: bool,
}

pub struct LalphaReport {
    pub curves: Vec<LalphaCurve>,
    pub artifacts: Vec<Artifact>,
}

pub const LALPHA_POINTS: usize = 200;

/// `L(alpha)` for the three diffusions at `eps` in {0.06, 0.12}, on a grid
/// up to the critical slope and on an extended grid up to 1.
pub fn run_lalpha(cfg: &ReproConfig) -> Result<LalphaReport> {
    let mut jobs = Vec::new();
    for eps in [0.06, 0.12] {
        for h in Diffusion::ALL {
            jobs.push((h, eps));
        }
    }
    type Rows = Vec<Vec<String>>;
    let results: Vec<Result<(LalphaCurve, Rows, Rows)>> = cfg.exec.map(&jobs, |&(h, eps)| {
        let model = cfg.model(h);
        let spec = ProblemSpec::new(eps, cfg.ell, model.clone(), cfg.steady_cells)?;
        let ab = alpha_bar(eps, &model)?;
        let alphas: Vec<f64> = (1..=LALPHA_POINTS).map(|k| ab * k as f64 / LALPHA_POINTS as f64).collect();
        let map = length_map(&alphas, &spec, Execution::Sequential)?;
        let ext: Vec<f64> = (1..=50).map(|k| ab + (1.0 - ab) * k as f64 / 50.0).filter(|&a| a > ab).collect();
        let ext_map = if ext.is_empty() { None } else { Some(length_map(&ext, &spec, Execution::Sequential)?) };
        let rows = |m: &crate::steady::LengthMap| -> Vec<Vec<String>> {
            let mut r: Vec<(f64, String, &str)> =
                m.points.iter().map(|&(a, l)| (a, format!("{l}"), "return")).collect();
            r.extend(m.escapes.iter().map(|&(a, o)| (a, String::new(), o.as_str())));
            r.sort_by(|a, b| a.0.total_cmp(&b.0));
            r.into_iter()
                .map(|(a, l, o)| vec![h.name().to_string(), format!("{eps}"), format!("{a}"), l, o.to_string()])
                .collect()
        };
        let curve = LalphaCurve {
            h: h.name().into(),
            epsilon: eps,
            alpha_bar: ab,
            last_return: map.points.last().map(|p| p.0),
            first_escape: map.escapes.first().map(|e| e.0),
            monotone: map.monotonicity_violations.is_empty(),
        };
        let ext_rows = ext_map.as_ref().map(rows).unwrap_or_default();
        Ok((curve, rows(&map), ext_rows))
    });
    let mut curves = Vec::new();
    let mut main_rows = Vec::new();
    let mut ext_rows = Vec::new();
    for r in results {
        let (c, m, e) = r?;
        curves.push(c);
        main_rows.extend(m);
        ext_rows.extend(e);
    }
    let header = ["h", "eps", "alpha", "L", "outcome"];
    io::write_records(&cfg.path("lalpha/lalpha.csv"), &header, main_rows)?;
    io::write_records(&cfg.path("lalpha/lalpha_extended.csv"), &header, ext_rows)?;
    io::write_json(&cfg.path("lalpha/curves.json"), &curves)?;
    let conf = json!({"epsilons": [0.06, 0.12], "points": LALPHA_POINTS, "step": "ell/1e4"});
    let artifacts = vec![
        artifact("lalpha/lalpha.csv", "lal", "return length for alpha in (0, alpha_bar]", conf.clone()),
        artifact("lalpha/lalpha_extended.csv", "lal", "return length for alpha in (alpha_bar, 1]", conf.clone()),
        artifact("lalpha/curves.json", "lal", "critical slope and last return per curve", conf),
    ];
    Ok(LalphaReport { curves, artifacts })
}

#[derive(Debug, Clone, Serialize)]
pub struct SteadySummary {
    pub kind: SteadyKind,
    pub h: String,
    pub epsilon: f64,
    pub alpha_star: f64,
    pub boundary_slopes: (f64, f64),
    pub max_abs: f64,
    pub distance_to_line: f64,
}

pub struct SteadyReport {
    pub states: Vec<SteadySummary>,
    pub artifacts: Vec<Artifact>,
}

fn write_states(path: &Path, states: &[(String, &SteadyState)]) -> Result<()> {
    let mut rows = Vec::new();
    for (label, s) in states {
        let du = s.u.centered_derivative();
        for ((x, &u), d) in s.u.xs().zip(s.u.values()).zip(du) {
            rows.push(vec![label.clone(), format!("{}", s.epsilon), format!("{x}"), format!("{u}"), format!("{d}")]);
        }
    }
    io::write_records(path, &["kind", "eps", "x", "u", "du"], rows)
}

/// Steady-state families: the four branches at `eps = 0.01`, positive and
/// negative states over `eps`, and the one-zero family as `eps` shrinks.
pub fn run_steady(cfg: &ReproConfig) -> Result<SteadyReport> {
    let model = cfg.model(Diffusion::Gauss);
    let spec = ProblemSpec::new(0.01, cfg.ell, model, cfg.steady_cells)?;
    let kinds = [SteadyKind::Positive, SteadyKind::Negative, SteadyKind::OneZeroMinus, SteadyKind::OneZeroPlus];
    let four: Vec<SteadyState> = cfg.exec.map(&kinds, |&k| solve(k, &spec)).into_iter().collect::<Result<_>>()?;
    let family_eps = [0.01, 0.03, 0.06];
    let mut jobs = Vec::new();
    for &e in &family_eps {
        jobs.push((SteadyKind::Positive, e));
        jobs.push((SteadyKind::Negative, e));
    }
    for e in [0.002, 0.006, 0.02] {
        jobs.push((SteadyKind::OneZeroMinus, e));
    }
    let family: Vec<SteadyState> = cfg
        .exec
        .map(&jobs, |&(k, e)| spec.with_epsilon(e).and_then(|s| solve(k, &s)))
        .into_iter()
        .collect::<Result<_>>()?;
    fn label(s: &SteadyState) -> (String, &SteadyState) {
        (s.kind.to_string(), s)
    }
    write_states(&cfg.path("steady/four_states.csv"), &four.iter().map(label).collect::<Vec<_>>())?;
    let (mono, conv): (Vec<_>, Vec<_>) = family.iter().partition(|s| s.kind.is_stable());
    write_states(&cfg.path("steady/eps_family.csv"), &mono.iter().map(|s| label(s)).collect::<Vec<_>>())?;
    write_states(&cfg.path("steady/one_zero_family.csv"), &conv.iter().map(|s| label(s)).collect::<Vec<_>>())?;
    let states = four
        .iter()
        .chain(&family)
        .map(|s| SteadySummary {
            kind: s.kind,
            h: Diffusion::Gauss.name().into(),
            epsilon: s.epsilon,
            alpha_star: s.alpha_star,
            boundary_slopes: s.boundary_slopes,
            max_abs: s.max_abs,
            distance_to_line: distance_to_line(&s.u),
        })
        .collect::<Vec<_>>();
    io::write_json(&cfg.path("steady/summary.json"), &states)?;
    let conf = json!({"h": "gauss", "f": "quadratic", "ell": cfg.ell, "n_cells": cfg.steady_cells});
    let artifacts = vec![
        artifact("steady/four_states.csv", "staz", "positive, negative and one-zero states at eps = 0.01", conf.clone()),
        artifact("steady/eps_family.csv", "lemma", "positive and negative states for eps in {0.01, 0.03, 0.06}", conf.clone()),
        artifact("steady/one_zero_family.csv", "convergenza", "one-zero states for eps in {0.002, 0.006, 0.02}", conf.clone()),
        artifact("steady/summary.json", "staz", "slopes and distances of every state", conf),
    ];
    Ok(SteadyReport { states, artifacts })
}

#[derive(Debug, Clone, Serialize)]
pub struct HyperSummary {
    pub datum: String,
    pub class: String,
    pub limit: Option<LimitKind>,
    pub limit_distance: Option<f64>,
    pub fixed_zero_deviation: Option<f64>,
}

/// Inviscid runs to `t = 10` for the six sign classes.
pub fn run_hyper(cfg: &ReproConfig) -> Result<(Vec<HyperSummary>, Vec<Artifact>)> {
    let ell = cfg.ell;
    let data = vec![
        ("a_pos", InitialData::quadratic(ell, true), None),
        ("a_neg", InitialData::quadratic(ell, false), None),
        ("b_0.45", InitialData::cubic(ell, 0.45 * ell, true)?, Some(0.45 * ell)),
        ("c_0.3", InitialData::cubic(ell, 0.3 * ell, false)?, None),
        ("c_0.5", InitialData::cubic(ell, 0.5 * ell, false)?, None),
        ("c_0.7", InitialData::cubic(ell, 0.7 * ell, false)?, None),
    ];
    let model = cfg.model(Diffusion::Const);
    let hcfg = HyperConfig::default();
    let out: Vec<Result<(HyperSummary, Vec<Artifact>)>> = cfg.exec.map(&data, |(name, d, x0)| {
        let run = solve_hyperbolic(d, &model, cfg.hyper_cells, &hcfg, 10.0)?;
        let base = format!("hyper/{name}");
        io::write_snapshots(&cfg.path(&format!("{base}/snapshots.csv")), &run.snapshot_times, &run.snapshots)?;
        if let Some(p) = &run.predicted_limit {
            io::write_table(
                &cfg.path(&format!("{base}/limit.csv")),
                &["x", "u"],
                p.xs().zip(p.values()).map(|(x, &v)| vec![x, v]),
            )?;
        }
        let summary = HyperSummary {
            datum: d.description.clone(),
            class: run.class.to_string(),
            limit: run.limit_kind,
            limit_distance: limit_distance(&run),
            fixed_zero_deviation: x0.map(|x| fixed_zero_check(&run, x)),
        };
        io::write_json(&cfg.path(&format!("{base}/summary.json")), &summary)?;
        let conf = json!({"datum": d.description, "n_cells": cfg.hyper_cells, "cfl": hcfg.cfl, "t_end": 10.0});
        Ok((
            summary,
            vec![
                artifact(&format!("{base}/snapshots.csv"), "hyper", "inviscid snapshots (t,x,u)", conf.clone()),
                artifact(&format!("{base}/limit.csv"), "hyper", "predicted long-time limit (x,u)", conf.clone()),
                artifact(&format!("{base}/summary.json"), "hyper", "class, limit and distances", conf),
            ],
        ))
    });
    let mut sums = Vec::new();
    let mut arts = Vec::new();
    for r in out {
        let (s, a) = r?;
        sums.push(s);
        arts.extend(a);
    }
    Ok((sums, arts))
}

/// Which experiments `repro` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReproTarget {
    Test1,
    Test2,
    Test3,
    Test4,
    Lalpha,
    Steady,
    Hyper,
    All,
}

impl std::str::FromStr for ReproTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "1" => ReproTarget::Test1,
            "2" => ReproTarget::Test2,
            "3" => ReproTarget::Test3,
            "4" => ReproTarget::Test4,
            "lalpha" => ReproTarget::Lalpha,
            "steady" => ReproTarget::Steady,
            "hyper" => ReproTarget::Hyper,
            "all" => ReproTarget::All,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "unknown test '{s}' (expected 1, 2, 3, 4, lalpha, steady, hyper or all)"
                )))
            }
        })
    }
}

/// Runs the selected experiments and writes `manifest.json`.
pub fn repro(cfg: &ReproConfig, target: ReproTarget) -> Result<Manifest> {
    let all = target == ReproTarget::All;
    let mut manifest = Manifest::default();
    if all || target == ReproTarget::Steady {
        manifest.extend(run_steady(cfg)?.artifacts);
    }
    if all || target == ReproTarget::Lalpha {
        manifest.extend(run_lalpha(cfg)?.artifacts);
    }
    if all || target == ReproTarget::Test1 {
        manifest.extend(run_test1(cfg)?.artifacts);
    }
    if all || target == ReproTarget::Test2 {
        manifest.extend(run_test2(cfg)?.artifacts);
    }
    if all || target == ReproTarget::Test3 {
        manifest.extend(run_test3(cfg, &TEST3_EPSILONS, &Diffusion::ALL)?.artifacts);
        if cfg.include_slow {
            manifest.extend(run_slow(cfg)?.artifacts);
        }
    }
    if all || target == ReproTarget::Test4 {
        manifest.extend(run_test4(cfg)?.artifacts);
    }
    if all || target == ReproTarget::Hyper {
        manifest.extend(run_hyper(cfg)?.1);
    }
    write_manifest(cfg, &manifest)?;
    Ok(manifest)
}
