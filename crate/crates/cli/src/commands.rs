use std::path::{Path, PathBuf};

use l1min::bench::{
    bouquet_trial, identify_group, interpolate_success_contour, mix_seed, phase_svg, run_noise_sweep, run_phase_grid,
    sweep_svg, BouquetSpec, Environment, PhaseGrid, SweepMode, SweepResult, SweepRow,
};
use l1min::numerics::{norm1, norm2, norm_inf, relative_error};
use l1min::robust::{align_solve, cab_solve};
use l1min::synth::{corrupt_entries, gen_gaussian_dict, gen_sparse_signal, generate, GenSpec, Generated};
use l1min::{
    kkt_residual_of, objective_of, solve as run_solver, Algorithm, AlignmentProblem, DenseMatrix, Dictionary,
    ExtendedDictionary, Problem, SolverConfig, SolverResult,
};
use serde::{Deserialize, Serialize};

use crate::io::{output_path, read_matrix, read_vector, write_json, write_matrix, write_vector, write_with};
use crate::{
    AlignArgs, Axis, CabArgs, CliError, ConfigArgs, GenArgs, Metric, NoiseSweepArgs, PhaseArgs, ReportArgs, SolveArgs,
    Status,
};

/// Result file of `solve`, `cab` and `align`. Field order is part of the
/// format.
#[derive(Serialize)]
struct ResultJson<'a> {
    algo: &'a str,
    n: usize,
    d: usize,
    /// `None` for the equality-constrained problem.
    lambda: Option<f64>,
    iterations: usize,
    converged: bool,
    wall_time_seconds: f64,
    x: &'a [f64],
    objective: f64,
    kkt_residual: f64,
    config_echo: &'a SolverConfig,
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    e: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rel_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    group: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    identified_group: Option<usize>,
    #[serde(skip_serializing_if = "<[String]>::is_empty")]
    warnings: &'a [String],
}

/// Summary written beside benchmark CSVs and read by `report`.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum Summary {
    Phase { grid: PhaseGrid, config_echo: SolverConfig, environment: Environment },
    NoiseSweep { result: SweepResult, noise_sigma: f64, config_echo: SolverConfig, environment: Environment },
}

fn load_config(args: &ConfigArgs) -> Result<SolverConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot open {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?
        }
        None => SolverConfig::default(),
    };
    if let Some(l) = args.lambda {
        cfg.lambda = Some(l);
    }
    if let Some(t) = args.tol {
        cfg.tol = t;
    }
    if let Some(m) = args.max_iter {
        cfg.max_iter = m;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// λ the solver works with: `None` for the equality form.
fn effective_lambda<D: Dictionary + ?Sized>(
    algo: Algorithm,
    problem: &Problem<'_, D>,
    cfg: &SolverConfig,
) -> Option<f64> {
    match algo {
        Algorithm::Homotopy => cfg.lambda.filter(|&l| l > 0.0),
        a if a.is_equality_form() => None,
        _ => Some(problem.resolve_lambda(cfg)),
    }
}

/// `(objective, kkt_residual)`: the λ-form objective and `‖·‖∞` optimality
/// residual, or for the equality form `‖x‖₁` and `‖b − Ax‖₂/‖b‖₂`.
fn quality<D: Dictionary + ?Sized>(
    problem: &Problem<'_, D>,
    lambda: Option<f64>,
    x: &[f64],
) -> Result<(f64, f64), CliError> {
    Ok(match lambda {
        Some(l) => (objective_of(problem, x, l)?, kkt_residual_of(problem, x, l)?),
        None => {
            let r = norm2(&problem.residual(x));
            let b = norm2(problem.b);
            (norm1(x), if b > 0.0 { r / b } else { r })
        }
    })
}

fn status(result: &SolverResult) -> Status {
    if result.converged {
        Status::Done
    } else {
        Status::NotConverged
    }
}

fn check_rhs(name: &str, a: &DenseMatrix, b: &[f64]) -> Result<(), CliError> {
    if a.rows() != b.len() {
        return Err(CliError::usage(format!(
            "dimension mismatch: {name} is {}x{} but b has length {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    Ok(())
}

fn no_generation_flags(noise: f64, corruption: f64) -> Result<(), CliError> {
    if noise != 0.0 || corruption != 0.0 {
        return Err(CliError::usage("--noise and --corruption apply to generated instances only"));
    }
    Ok(())
}

fn environment() -> Environment {
    Environment::current(1)
}

pub fn solve(args: SolveArgs) -> Result<Status, CliError> {
    let mut cfg = load_config(&args.config)?;
    let shape = &args.shape;
    let (a, b, truth, seed) = match (&args.matrix, &args.rhs, shape.n, shape.d, shape.k) {
        (Some(m), Some(r), ..) => {
            no_generation_flags(shape.noise, shape.corruption)?;
            let a = read_matrix(m)?;
            let b = read_vector(r)?;
            check_rhs("A", &a, &b)?;
            let truth = match &args.truth {
                Some(path) => {
                    let x0 = read_vector(path)?;
                    if x0.len() != a.cols() {
                        return Err(CliError::usage(format!(
                            "dimension mismatch: A is {}x{} but the true signal has length {}",
                            a.rows(),
                            a.cols(),
                            x0.len()
                        )));
                    }
                    Some(x0)
                }
                None => None,
            };
            (a, b, truth, None)
        }
        (None, None, Some(n), Some(d), Some(k)) => {
            let spec =
                GenSpec { n, d, k, seed: args.seed, noise_sigma: shape.noise, corruption_fraction: shape.corruption };
            let Generated { instance, .. } = generate(&spec)?;
            (instance.a, instance.b, instance.ground_truth, Some(args.seed))
        }
        _ => return Err(CliError::usage("give either --matrix and --rhs, or --n, --d and --k")),
    };
    let problem = Problem::new(&a, &b)?;
    let lambda = effective_lambda(args.algo, &problem, &cfg);
    if args.algo != Algorithm::Homotopy && lambda.is_some() {
        cfg.lambda = lambda;
    }
    let result = run_solver(args.algo, &problem, &cfg)?;
    let (objective, kkt_residual) = quality(&problem, lambda, &result.x_star)?;
    let report = ResultJson {
        algo: args.algo.name(),
        n: a.cols(),
        d: a.rows(),
        lambda,
        iterations: result.iterations,
        converged: result.converged,
        wall_time_seconds: result.wall_time_seconds,
        x: &result.x_star,
        objective,
        kkt_residual,
        config_echo: &cfg,
        seed,
        e: None,
        rel_error: truth.as_deref().map(|x0| relative_error(&result.x_star, x0)),
        group: None,
        identified_group: None,
        warnings: &result.warnings,
    };
    write_json(&output_path(args.out.as_deref(), "result.json"), &report)?;
    Ok(status(&result))
}

#[derive(Serialize)]
struct GenJson<'a> {
    spec: &'a GenSpec,
    corrupted: &'a [usize],
    files: [&'a str; 3],
    environment: Environment,
}

pub fn gen(args: GenArgs) -> Result<Status, CliError> {
    let spec = GenSpec {
        n: args.n,
        d: args.d,
        k: args.k,
        seed: args.seed,
        noise_sigma: args.noise,
        corruption_fraction: args.corruption,
    };
    let Generated { instance, corrupted } = generate(&spec)?;
    let dir = output_path(args.out.as_deref(), ".");
    write_matrix(&dir.join("A.csv"), &instance.a)?;
    write_vector(&dir.join("b.csv"), &instance.b)?;
    write_vector(&dir.join("x0.csv"), instance.ground_truth.as_deref().unwrap_or_default())?;
    let meta =
        GenJson { spec: &spec, corrupted: &corrupted, files: ["A.csv", "b.csv", "x0.csv"], environment: environment() };
    write_json(&dir.join("gen.json"), &meta)?;
    Ok(Status::Done)
}

fn summary_path(csv: &Path) -> PathBuf {
    if csv.extension().is_some_and(|e| e == "json") {
        csv.with_extension("summary.json")
    } else {
        csv.with_extension("json")
    }
}

pub fn phase(args: PhaseArgs) -> Result<Status, CliError> {
    let cfg = load_config(&args.config)?;
    let grid =
        run_phase_grid(args.algo, args.n, &args.grid, args.trials, args.success_tol, args.seed, &cfg, args.jobs)?;
    let out = output_path(args.out.as_deref(), "phase.csv");
    write_with(&out, |w| grid.write_csv(w))?;
    if let Some(svg) = &args.svg {
        write_with(svg, |w| w.write_all(phase_svg(&grid, args.level).as_bytes()))?;
    }
    let summary = Summary::Phase { grid, config_echo: cfg, environment: Environment::current(args.jobs) };
    write_json(&summary_path(&out), &summary)?;
    Ok(Status::Done)
}

pub fn noise_sweep(args: NoiseSweepArgs) -> Result<Status, CliError> {
    let cfg = load_config(&args.config)?;
    let mode = match args.mode {
        Axis::VaryD => SweepMode::VaryD { n: args.n, k: args.k, d_values: args.values.clone() },
        Axis::VaryK => SweepMode::VaryK { n: args.n, d: args.d, k_values: args.values.clone() },
    };
    let result = run_noise_sweep(&args.algos, &mode, args.sigma, args.trials, args.seed, &cfg, args.jobs)?;
    let out = output_path(args.out.as_deref(), "sweep.csv");
    write_with(&out, |w| result.write_csv(w))?;
    if let Some(svg) = &args.svg {
        write_with(svg, |w| w.write_all(sweep_svg(&result, |r| r.mean_rel_error, "mean relative error").as_bytes()))?;
    }
    let summary = Summary::NoiseSweep {
        result,
        noise_sigma: args.sigma,
        config_echo: cfg,
        environment: Environment::current(args.jobs),
    };
    write_json(&summary_path(&out), &summary)?;
    Ok(Status::Done)
}

pub fn cab(args: CabArgs) -> Result<Status, CliError> {
    let mut cfg = load_config(&args.config)?;
    // dictionary, observation, and for generated data (labels, group, x0)
    let (a, b, truth, seed) = match (&args.matrix, &args.rhs, args.d, args.n, args.groups) {
        (Some(m), Some(r), ..) => {
            no_generation_flags(0.0, args.corruption)?;
            let a = read_matrix(m)?;
            let b = read_vector(r)?;
            check_rhs("A", &a, &b)?;
            (a, b, None, None)
        }
        (None, None, Some(d), Some(n), Some(groups)) => {
            let spec = BouquetSpec { d, n, groups, coherence: args.coherence };
            let trial = bouquet_trial(&spec, args.seed)?;
            let hi = norm_inf(&trial.clean);
            let (b, _) = corrupt_entries(&trial.clean, args.corruption, -hi, hi, mix_seed(args.seed, &[2]))?;
            (trial.dict, b, Some((trial.labels, trial.group, trial.x0, groups)), Some(args.seed))
        }
        _ => return Err(CliError::usage("give either --matrix and --rhs, or --d, --n and --groups")),
    };
    if !(args.weight > 0.0) || !args.weight.is_finite() {
        return Err(CliError::usage(format!("--weight must be positive, got {}", args.weight)));
    }
    let ext = ExtendedDictionary::with_scale(&a, 1.0 / args.weight)?;
    let problem = Problem::new(&ext, &b)?;
    let lambda = effective_lambda(args.algo, &problem, &cfg);
    if args.algo != Algorithm::Homotopy && lambda.is_some() {
        cfg.lambda = lambda;
    }
    let sol = cab_solve(&a, &b, args.algo, &cfg, args.weight)?;
    let (objective, kkt_residual) = quality(&problem, lambda, &sol.result.x_star)?;
    let (rel_error, group, identified_group) = match &truth {
        Some((labels, group, x0, groups)) => {
            (Some(relative_error(&sol.x, x0)), Some(*group), Some(identify_group(&sol.x, labels, *groups)))
        }
        None => (None, None, None),
    };
    let report = ResultJson {
        algo: args.algo.name(),
        n: a.cols(),
        d: a.rows(),
        lambda,
        iterations: sol.result.iterations,
        converged: sol.result.converged,
        wall_time_seconds: sol.result.wall_time_seconds,
        x: &sol.x,
        objective,
        kkt_residual,
        config_echo: &cfg,
        seed,
        e: Some(&sol.e),
        rel_error,
        group,
        identified_group,
        warnings: &sol.result.warnings,
    };
    write_json(&output_path(args.out.as_deref(), "cab.json"), &report)?;
    Ok(status(&sol.result))
}

pub fn align(args: AlignArgs) -> Result<Status, CliError> {
    let cfg = load_config(&args.config)?;
    let (prob, truth, seed) = match (&args.basis, &args.rhs, args.d, args.m) {
        (Some(basis), Some(r), ..) => {
            let basis = read_matrix(basis)?;
            let b = read_vector(r)?;
            check_rhs("B", &basis, &b)?;
            (AlignmentProblem::new(basis, b)?, None, None)
        }
        (None, None, Some(d), Some(m)) => {
            let basis = gen_gaussian_dict(d, m, mix_seed(args.seed, &[0]))?;
            let w0 = gen_sparse_signal(m, m, mix_seed(args.seed, &[1]))?;
            let clean = basis.matvec(&w0);
            let hi = norm_inf(&clean);
            let (b, _) = corrupt_entries(&clean, args.corruption, -hi, hi, mix_seed(args.seed, &[2]))?;
            (AlignmentProblem::new(basis, b)?, Some(w0), Some(args.seed))
        }
        _ => return Err(CliError::usage("give either --basis and --rhs, or --d and --m")),
    };
    let sol = align_solve(&prob, args.algo, &cfg)?;
    let (fit, sparsity) = prob.kkt_residual(&sol.w, &sol.e, sol.lambda);
    let report = ResultJson {
        algo: args.algo.name(),
        n: prob.m(),
        d: prob.d(),
        lambda: Some(sol.lambda),
        iterations: sol.result.iterations,
        converged: sol.result.converged,
        wall_time_seconds: sol.result.wall_time_seconds,
        x: &sol.w,
        objective: sol.objective,
        kkt_residual: fit.max(sparsity),
        config_echo: &cfg,
        seed,
        e: Some(&sol.e),
        rel_error: truth.as_deref().map(|w0| relative_error(&sol.w, w0)),
        group: None,
        identified_group: None,
        warnings: &sol.result.warnings,
    };
    write_json(&output_path(args.out.as_deref(), "align.json"), &report)?;
    Ok(status(&sol.result))
}

pub fn report(args: ReportArgs) -> Result<Status, CliError> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::usage(format!("cannot open {}: {e}", args.input.display())))?;
    let summary: Summary =
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", args.input.display())))?;
    match &summary {
        Summary::Phase { grid, .. } => {
            println!(
                "phase grid: {} with n = {}, {}x{} cells, {} trials per cell, seed {}",
                grid.algo,
                grid.n,
                grid.rho_values.len(),
                grid.delta_values.len(),
                grid.trials_per_cell,
                grid.base_seed
            );
            let contour = interpolate_success_contour(grid, args.level)?;
            println!("{:.0}% success contour (delta, rho):", 100.0 * args.level);
            for (delta, rho) in &contour {
                println!("  {delta:.4} {rho:.4}");
            }
            if let Some(svg) = &args.svg {
                write_with(svg, |w| w.write_all(phase_svg(grid, args.level).as_bytes()))?;
            }
        }
        Summary::NoiseSweep { result, noise_sigma, .. } => {
            println!(
                "{} sweep, sigma = {noise_sigma}, {} trials, seed {}",
                result.kind, result.trials, result.base_seed
            );
            println!(
                "{:>8} {:>10} {:>12} {:>12} {:>10} {:>6}",
                result.axis, "algo", "time (s)", "rel error", "iterations", "rate"
            );
            for r in &result.rows {
                println!(
                    "{:>8} {:>10} {:>12.4e} {:>12.4e} {:>10.1} {:>6.2}",
                    r.axis_value,
                    r.algo.name(),
                    r.mean_wall_time_seconds,
                    r.mean_rel_error,
                    r.mean_iterations,
                    r.rate
                );
            }
            if let Some(svg) = &args.svg {
                let (metric, label): (fn(&SweepRow) -> f64, &str) = match args.metric {
                    Metric::Error => (|r| r.mean_rel_error, "mean relative error"),
                    Metric::Time => (|r| r.mean_wall_time_seconds, "mean run time (s)"),
                    Metric::Iterations => (|r| r.mean_iterations, "mean iterations"),
                };
                write_with(svg, |w| w.write_all(sweep_svg(result, metric, label).as_bytes()))?;
            }
        }
    }
    Ok(Status::Done)
}
