use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use log::info;
use serde_json::json;

use metastab::experiments::{repro, run_case_with, Case, ReproConfig, ReproTarget};
use metastab::hyperbolic::{limit_distance, solve_hyperbolic, HyperConfig};
use metastab::parabolic::{parse_initial, StepperConfig};
use metastab::steady::{length_map, solve, SteadyKind};
use metastab::{alpha_bar, io, Diffusion, Error, Execution, ModelFunctions, ProblemSpec};

/// Steady states, metastable dynamics and the inviscid limit of
/// u_t = eps (h(u) u_x)_x - f(u)_x + f'(u) with zero Dirichlet data.
#[derive(Parser, Debug)]
#[command(name = "metastab", version)]
struct Cli {
    /// File of `key = value` lines; keys are long flag names without dashes
    /// (`eps`, `n-cells`, ...). Flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// error, warn, info, debug or trace.
    #[arg(long, global = true, default_value = "info")]
    log_level: String,

    /// Worker threads for sweeps (default: available cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Viscosity.
    #[arg(long)]
    eps: Option<f64>,
    /// Interval length.
    #[arg(long)]
    ell: Option<f64>,
    /// Diffusion: const, gauss or mullins.
    #[arg(long)]
    h: Option<String>,
    /// Flux: quadratic.
    #[arg(long)]
    f: Option<String>,
    /// Radius R of the interval [-R, R] on which h and f are checked.
    #[arg(long)]
    radius: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute one steady state and write x,u,du plus a JSON summary.
    Steady {
        #[command(flatten)]
        model: ModelArgs,
        /// pos, neg, 1m, 1p or nz:<N>.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        n_cells: Option<usize>,
        /// Output CSV; the summary goes next to it with extension .json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the return length L(alpha) of the Cauchy problem u(0)=0, u'(0)=alpha.
    Shoot {
        #[command(flatten)]
        model: ModelArgs,
        /// Smallest slope (default: alpha_bar / steps).
        #[arg(long)]
        alpha_min: Option<f64>,
        /// Largest slope (default: alpha_bar).
        #[arg(long)]
        alpha_max: Option<f64>,
        #[arg(long)]
        alpha_steps: Option<usize>,
        /// Output CSV with columns alpha,L,outcome.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the parabolic problem until a stable state or t_end.
    Evolve {
        #[command(flatten)]
        model: ModelArgs,
        /// quad-pos, quad-neg, cubic:<x0>, cubic-neg:<x0>, jump, kinks or file:<path>.
        #[arg(long)]
        u0: Option<String>,
        #[arg(long)]
        t_end: Option<f64>,
        /// Sup distance to a stable state that ends the run.
        #[arg(long)]
        steady_tol: Option<f64>,
        #[arg(long)]
        n_cells: Option<usize>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the inviscid problem U_t + f(U)_x = f'(U).
    Hyper {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        u0: Option<String>,
        #[arg(long)]
        cfl: Option<f64>,
        #[arg(long)]
        n_cells: Option<usize>,
        #[arg(long)]
        t_end: Option<f64>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the data behind the figures and tables, plus manifest.json.
    Repro {
        /// 1, 2, 3, 4, lalpha, steady, hyper or all.
        #[arg(long)]
        test: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also run the eps = 0.003 cases.
        #[arg(long)]
        include_slow: bool,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Flat `key = value` settings from `--config`.
#[derive(Default)]
struct Settings {
    values: HashMap<String, String>,
}

impl Settings {
    fn load(path: &Path) -> Outcome<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut values = HashMap::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("{}:{}: expected key = value", path.display(), k + 1)))?;
            values.insert(key.trim().replace('_', "-"), value.trim().to_string());
        }
        Ok(Self { values })
    }

    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Outcome<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Failure::Usage(format!("config value '{v}' for '{key}' is not valid"))),
        }
    }

    fn or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Outcome<T> {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }

    fn required<T: FromStr>(&self, flag: Option<T>, key: &str) -> Outcome<T> {
        self.pick(flag, key)?.ok_or_else(|| Failure::Usage(format!("--{key} is required (flag or config key)")))
    }
}

fn model_from(s: &Settings, m: &ModelArgs) -> Outcome<ModelFunctions> {
    let h: String = s.or(m.h.clone(), "h", "gauss".into())?;
    let f: String = s.or(m.f.clone(), "f", "quadratic".into())?;
    let radius = s.or(m.radius, "radius", 1.0)?;
    Ok(ModelFunctions::from_names(&h, &f, radius)?)
}

fn problem(s: &Settings, m: &ModelArgs, n_cells: usize) -> Outcome<ProblemSpec> {
    let eps = s.required(m.eps, "eps")?;
    let ell = s.or(m.ell, "ell", 1.0)?;
    Ok(ProblemSpec::new(eps, ell, model_from(s, m)?, n_cells)?)
}

fn with_json_extension(p: &Path) -> PathBuf {
    p.with_extension("json")
}

fn run(cli: &Cli, s: &Settings, exec: Execution) -> Outcome<()> {
    match &cli.command {
        Command::Steady { model, kind, n_cells, out } => {
            let n = s.or(*n_cells, "n-cells", 800)?;
            let spec = problem(s, model, n)?;
            let kind: String = s.or(kind.clone(), "kind", "pos".into())?;
            let kind: SteadyKind = kind.parse()?;
            let out = s.or(out.clone(), "out", PathBuf::from("steady.csv"))?;
            let state = solve(kind, &spec)?;
            io::write_profile(&out, &state.u)?;
            let summary = json!({
                "config": {"eps": spec.epsilon, "ell": spec.ell, "h": spec.model.name_h(), "f": spec.model.name_f(),
                           "radius": spec.model.radius(), "kind": kind.to_string(), "n_cells": n},
                "kind": state.kind,
                "alpha_star": state.alpha_star,
                "boundary_slopes": state.boundary_slopes,
                "max_abs": state.max_abs,
                "diagnostics": state.diagnostics,
            });
            io::write_json(&with_json_extension(&out), &summary)?;
            info!("{kind} state: alpha* = {:.8}, max |u| = {:.6}, written to {}", state.alpha_star, state.max_abs, out.display());
            Ok(())
        }
        Command::Shoot { model, alpha_min, alpha_max, alpha_steps, out } => {
            let spec = problem(s, model, 100)?;
            let ab = alpha_bar(spec.epsilon, &spec.model)?;
            let steps = s.or(*alpha_steps, "alpha-steps", 40)?;
            if steps < 2 {
                return Err(Failure::Usage("--alpha-steps must be at least 2".into()));
            }
            let hi = s.or(*alpha_max, "alpha-max", ab)?;
            let lo = s.or(*alpha_min, "alpha-min", hi / steps as f64)?;
            if !(lo > 0.0 && hi > lo) {
                return Err(Failure::Usage(format!("need 0 < alpha-min < alpha-max, got {lo} and {hi}")));
            }
            let alphas: Vec<f64> = (0..steps).map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64).collect();
            let map = length_map(&alphas, &spec, exec)?;
            let out = s.or(out.clone(), "out", PathBuf::from("lalpha.csv"))?;
            io::write_length_map(&out, &map)?;
            io::write_json(
                &with_json_extension(&out),
                &json!({
                    "config": {"eps": spec.epsilon, "ell": spec.ell, "h": spec.model.name_h(), "f": spec.model.name_f(),
                               "alpha_min": lo, "alpha_max": hi, "alpha_steps": steps},
                    "alpha_bar": ab,
                    "returns": map.points.len(),
                    "escapes": map.escapes,
                    "monotonicity_violations": map.monotonicity_violations,
                }),
            )?;
            if !map.monotonicity_violations.is_empty() {
                log::warn!("L(alpha) decreased at {} points", map.monotonicity_violations.len());
            }
            info!("{} returns, {} escapes (alpha_bar = {ab:.8}), written to {}", map.points.len(), map.escapes.len(), out.display());
            Ok(())
        }
        Command::Evolve { model, u0, t_end, steady_tol, n_cells, out } => {
            let n = s.or(*n_cells, "n-cells", 2000)?;
            let spec = problem(s, model, n)?;
            let datum = parse_initial(&s.required(u0.clone(), "u0")?, spec.ell)?;
            let t_end = s.required(*t_end, "t-end")?;
            let out = s.or(out.clone(), "out", PathBuf::from("evolve"))?;
            let mut cfg = ReproConfig::new(&out);
            cfg.ell = spec.ell;
            cfg.radius = spec.model.radius();
            cfg.evolve_cells = n;
            cfg.exec = exec;
            cfg.stepper = StepperConfig { steady_tol: s.or(*steady_tol, "steady-tol", 1e-3)?, ..StepperConfig::default() };
            cfg.stepper.validate()?;
            let case = Case {
                name: String::new(),
                h: Diffusion::Gauss,
                epsilon: spec.epsilon,
                datum,
                t_end,
                probe_times: vec![],
            };
            let r = run_case_with(&cfg, &case, &spec.model, "evolve")?;
            info!(
                "{:?} at t = {:.6e} after {} steps; metastable T = {:?}; written to {}",
                r.summary.termination,
                r.summary.final_time,
                r.summary.accepted_steps,
                r.summary.metastable_t,
                out.display()
            );
            Ok(())
        }
        Command::Hyper { model, u0, cfl, n_cells, t_end, out } => {
            let ell = s.or(model.ell, "ell", 1.0)?;
            let m = model_from(s, model)?;
            let datum = parse_initial(&s.required(u0.clone(), "u0")?, ell)?;
            let n = s.or(*n_cells, "n-cells", 400)?;
            let t_end = s.or(*t_end, "t-end", 10.0)?;
            let hc = HyperConfig { cfl: s.or(*cfl, "cfl", 0.8)?, ..HyperConfig::default() };
            let out = s.or(out.clone(), "out", PathBuf::from("hyper"))?;
            let run = solve_hyperbolic(&datum, &m, n, &hc, t_end)?;
            io::write_snapshots(&out.join("snapshots.csv"), &run.snapshot_times, &run.snapshots)?;
            if let Some(p) = &run.predicted_limit {
                io::write_profile(&out.join("limit.csv"), p)?;
            }
            io::write_json(
                &out.join("summary.json"),
                &json!({
                    "config": {"u0": datum.description, "ell": ell, "f": m.name_f(), "cfl": hc.cfl, "n_cells": n, "t_end": t_end},
                    "class": run.class.to_string(),
                    "limit": run.limit_kind,
                    "limit_distance": limit_distance(&run),
                    "steps": run.steps,
                }),
            )?;
            info!("class {}, limit {:?}, distance {:?}", run.class, run.limit_kind, limit_distance(&run));
            Ok(())
        }
        Command::Repro { test, out, include_slow } => {
            let target: ReproTarget = s.or(test.clone(), "test", "all".into())?.parse()?;
            let out = s.or(out.clone(), "out", PathBuf::from("repro"))?;
            let mut cfg = ReproConfig::new(&out);
            cfg.exec = exec;
            cfg.include_slow = *include_slow || s.or(None, "include-slow", false)?;
            let manifest = repro(&cfg, target)?;
            info!("{} files listed in {}", manifest.artifacts.len(), out.join("manifest.json").display());
            Ok(())
        }
    }
}

/// Where a numerical failure is documented.
fn output_dir(cli: &Cli) -> PathBuf {
    let dir = match &cli.command {
        Command::Steady { out, .. } | Command::Shoot { out, .. } => {
            out.as_ref().and_then(|p| p.parent().map(Path::to_path_buf)).unwrap_or_default()
        }
        Command::Evolve { out, .. } => out.clone().unwrap_or_else(|| "evolve".into()),
        Command::Hyper { out, .. } => out.clone().unwrap_or_else(|| "hyper".into()),
        Command::Repro { out, .. } => out.clone().unwrap_or_else(|| "repro".into()),
    };
    if dir.as_os_str().is_empty() {
        PathBuf::from(".")
    } else {
        dir
    }
}

fn write_diagnostic(cli: &Cli, e: &Error) -> Option<PathBuf> {
    let path = output_dir(cli).join("diagnostic.json");
    let detail = match e {
        Error::Stiffness { t, dt, state } => json!({"t": t, "dt": dt, "state": state}),
        Error::NoSolution { epsilon, threshold, length } => {
            json!({"epsilon": epsilon, "threshold": threshold, "length": length})
        }
        Error::Bracketing { target, l_min, l_max } => json!({"target": target, "l_min": l_min, "l_max": l_max}),
        Error::Gluing { at, jump, tolerance } => json!({"at": at, "jump": jump, "tolerance": tolerance}),
        Error::EvaluationFailure { function, at } => json!({"function": function, "at": at}),
        _ => json!(null),
    };
    let body = json!({
        "error": e.to_string(),
        "detail": detail,
        "args": std::env::args().collect::<Vec<_>>(),
    });
    io::write_json(&path, &body).ok().map(|_| path)
}

fn fail(cli: &Cli, f: Failure) -> ExitCode {
    match f {
        Failure::Usage(m) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Failure::Run(e) if e.is_numerical() => {
            eprintln!("error: {e}");
            if let Some(p) = write_diagnostic(cli, &e) {
                eprintln!("diagnostic written to {}", p.display());
            }
            ExitCode::from(2)
        }
        Failure::Run(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Ok(level) = log::LevelFilter::from_str(&cli.log_level) else {
        return fail(&cli, Failure::Usage(format!("unknown log level '{}' (error, warn, info, debug, trace)", cli.log_level)));
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();

    let settings = match cli.config.as_deref().map(Settings::load).transpose() {
        Ok(s) => s.unwrap_or_default(),
        Err(f) => return fail(&cli, f),
    };
    let jobs = match settings.pick(cli.jobs, "jobs") {
        Ok(Some(0)) => return fail(&cli, Failure::Usage("--jobs must be at least 1".into())),
        Ok(j) => j,
        Err(f) => return fail(&cli, f),
    };
    if let Some(j) = jobs {
        if !metastab::exec::configure_threads(j) {
            log::warn!("thread pool already initialized; --jobs ignored");
        }
    }
    let exec = if jobs == Some(1) { Execution::Sequential } else { Execution::Parallel };

    match run(&cli, &settings, exec) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => fail(&cli, f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let mut s = Settings::default();
        s.values.insert("eps".into(), "0.02".into());
        assert_eq!(s.pick(Some(0.05), "eps").unwrap(), Some(0.05));
        assert_eq!(s.pick(None::<f64>, "eps").unwrap(), Some(0.02));
        assert!(s.required(None::<f64>, "ell").is_err());
    }

    #[test]
    fn config_parsing() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.cfg");
        std::fs::write(&p, "# run\neps = 0.01\nn_cells=400  # fine\n").unwrap();
        let s = Settings::load(&p).unwrap();
        assert_eq!(s.values["eps"], "0.01");
        assert_eq!(s.values["n-cells"], "400");
        std::fs::write(&p, "eps 0.01\n").unwrap();
        assert!(Settings::load(&p).is_err());
    }
}
