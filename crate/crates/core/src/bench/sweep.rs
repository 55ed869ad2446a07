use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::{format_g17, mix_seed, par_map};
use crate::alm::DalmParams;
use crate::error::{L1Error, Result};
use crate::model::{Problem, SolverConfig};
use crate::numerics::DenseMatrix;
use crate::numerics::{norm2, norm_inf, relative_error};
use crate::robust::cab_solve;
use crate::solver::{solve, Algorithm};
use crate::synth::{add_noise, corrupt_entries, gen_bouquet_dict, gen_gaussian_dict, gen_sparse_signal};

/// Axis of a noise sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum SweepMode {
    VaryD { n: usize, k: usize, d_values: Vec<usize> },
    VaryK { n: usize, d: usize, k_values: Vec<usize> },
}

impl SweepMode {
    pub fn name(&self) -> &'static str {
        match self {
            SweepMode::VaryD { .. } => "vary-d",
            SweepMode::VaryK { .. } => "vary-k",
        }
    }

    fn axis(&self) -> (&'static str, Vec<usize>) {
        match self {
            SweepMode::VaryD { d_values, .. } => ("d", d_values.clone()),
            SweepMode::VaryK { k_values, .. } => ("k", k_values.clone()),
        }
    }

    /// `(n, d, k)` at axis value `v`.
    fn dims(&self, v: usize) -> (usize, usize, usize) {
        match *self {
            SweepMode::VaryD { n, k, .. } => (n, v, k),
            SweepMode::VaryK { n, d, .. } => (n, d, v),
        }
    }
}

/// Averages for one axis value and one solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub algo: Algorithm,
    pub trials: usize,
    /// Trials where the solver returned an error; excluded from the means.
    pub failures: usize,
    pub mean_wall_time_seconds: f64,
    pub mean_rel_error: f64,
    pub mean_iterations: f64,
    /// Fraction of trials meeting the sweep's success notion (see `rate_name`).
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub kind: String,
    pub axis: String,
    pub axis_values: Vec<f64>,
    pub rate_name: String,
    pub trials: usize,
    pub base_seed: u64,
    /// Axis-major, then solver order as given.
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn rows_for(&self, algo: Algorithm) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.algo == algo).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "{},algo,trials,failures,mean_wall_time_seconds,mean_rel_error,mean_iterations,{}",
            self.axis, self.rate_name
        )?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                format_g17(r.axis_value),
                r.algo,
                r.trials,
                r.failures,
                format_g17(r.mean_wall_time_seconds),
                format_g17(r.mean_rel_error),
                format_g17(r.mean_iterations),
                format_g17(r.rate)
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Outcome {
    time: f64,
    error: f64,
    iterations: usize,
    hit: bool,
}

fn reduce(
    axis_values: &[f64],
    solvers: &[Algorithm],
    trials: usize,
    outcomes: &[Vec<Option<Outcome>>],
) -> Vec<SweepRow> {
    let mut rows = Vec::new();
    for (a, &value) in axis_values.iter().enumerate() {
        for (s, &algo) in solvers.iter().enumerate() {
            let runs: Vec<Outcome> = (0..trials).filter_map(|t| outcomes[a * trials + t][s]).collect();
            let ok = runs.len().max(1) as f64;
            rows.push(SweepRow {
                axis_value: value,
                algo,
                trials,
                failures: trials - runs.len(),
                mean_wall_time_seconds: runs.iter().map(|o| o.time).sum::<f64>() / ok,
                mean_rel_error: if runs.is_empty() { f64::NAN } else { runs.iter().map(|o| o.error).sum::<f64>() / ok },
                mean_iterations: runs.iter().map(|o| o.iterations as f64).sum::<f64>() / ok,
                rate: runs.iter().filter(|o| o.hit).count() as f64 / trials as f64,
            });
        }
    }
    rows
}

fn check_common(solvers: &[Algorithm], trials: usize) -> Result<()> {
    if solvers.is_empty() {
        return Err(L1Error::InvalidArgument("no solvers given".into()));
    }
    if trials == 0 {
        return Err(L1Error::InvalidArgument("trials must be at least 1".into()));
    }
    Ok(())
}

/// λ used by noise sweeps when none is configured: a quarter of the
/// universal threshold `σ√(2 log n)`.
pub fn noise_lambda(sigma: f64, n: usize) -> f64 {
    0.25 * sigma * (2.0 * (n as f64).ln()).sqrt()
}

/// Mean error, time and iterations on noisy Gaussian instances along one
/// axis. All solvers see identical instances and share one λ
/// (`config.lambda`, else [`noise_lambda`] when `noise_sigma > 0`, else the
/// per-instance default). With noise, the equality-form solvers are adapted
/// unless configured otherwise: PALM stops once `‖b − Ax‖ ≤ σ√d`, DALM
/// solves the penalized problem with the shared λ. `rate` is the fraction
/// of runs reporting convergence.
///
/// Trial `t` draws its signal from the trial seed and the sparsity, its
/// dictionary from the trial seed and `d`, and its noise from the trial
/// seed alone, so neighbouring axis points share as much randomness as the
/// shapes allow.
pub fn run_noise_sweep(
    solvers: &[Algorithm],
    mode: &SweepMode,
    noise_sigma: f64,
    trials: usize,
    base_seed: u64,
    config: &SolverConfig,
    jobs: usize,
) -> Result<SweepResult> {
    check_common(solvers, trials)?;
    config.validate()?;
    let (axis, values) = mode.axis();
    if values.is_empty() {
        return Err(L1Error::InvalidArgument("sweep axis is empty".into()));
    }
    for &v in &values {
        let (n, d, k) = mode.dims(v);
        if d == 0 || k == 0 || k > n {
            return Err(L1Error::InvalidArgument(format!("invalid sweep point n = {n}, d = {d}, k = {k}")));
        }
    }
    let items: Vec<(usize, usize)> = (0..values.len()).flat_map(|a| (0..trials).map(move |t| (a, t))).collect();
    let outcomes = par_map(jobs, &items, |&(a, t)| -> Result<Vec<Option<Outcome>>> {
        let (n, d, k) = mode.dims(values[a]);
        let seed = mix_seed(base_seed, &[t as u64]);
        let dict = gen_gaussian_dict(d, n, mix_seed(seed, &[0, d as u64]))?;
        let x0 = gen_sparse_signal(n, k, mix_seed(seed, &[1, k as u64]))?;
        let b = add_noise(&dict.matvec(&x0), noise_sigma, mix_seed(seed, &[2]))?;
        let problem = Problem::new(&dict, &b)?.with_ground_truth(Some(&x0))?;
        let cfg = noisy_config(config, &problem, noise_sigma);
        Ok(solvers
            .iter()
            .map(|&algo| {
                solve(algo, &problem, &cfg).ok().map(|r| Outcome {
                    time: r.wall_time_seconds,
                    error: relative_error(&r.x_star, &x0),
                    iterations: r.iterations,
                    hit: r.converged,
                })
            })
            .collect())
    })?
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let axis_values: Vec<f64> = values.iter().map(|&v| v as f64).collect();
    Ok(SweepResult {
        kind: mode.name().into(),
        axis: axis.into(),
        rows: reduce(&axis_values, solvers, trials, &outcomes),
        axis_values,
        rate_name: "converged_rate".into(),
        trials,
        base_seed,
    })
}

fn noisy_config(config: &SolverConfig, problem: &Problem<'_, DenseMatrix>, sigma: f64) -> SolverConfig {
    if sigma == 0.0 {
        return config.clone().with_lambda(problem.resolve_lambda(config));
    }
    let lambda = config.lambda.unwrap_or_else(|| noise_lambda(sigma, problem.n()));
    let mut cfg = config.clone().with_lambda(lambda);
    if cfg.palm.residual_target.is_none() {
        cfg.palm.residual_target = Some(sigma * (problem.d() as f64).sqrt());
    }
    if cfg.dalm.penalty.is_none() && !cfg.dalm.cg_step {
        cfg.dalm.penalty = Some(lambda);
        if cfg.dalm.beta == DalmParams::default().beta {
            cfg.dalm.beta = 3.0 * lambda;
        }
    }
    cfg
}

/// Bouquet dictionary shape for the corruption sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BouquetSpec {
    pub d: usize,
    pub n: usize,
    pub groups: usize,
    pub coherence: f64,
}

impl Default for BouquetSpec {
    fn default() -> Self {
        Self { d: 80, n: 140, groups: 20, coherence: 0.6 }
    }
}

/// One corruption-sweep instance: the clean signal is a positive
/// combination of one group's columns.
pub struct BouquetTrial {
    pub dict: DenseMatrix,
    pub labels: Vec<usize>,
    pub group: usize,
    pub x0: Vec<f64>,
    pub clean: Vec<f64>,
}

pub fn bouquet_trial(spec: &BouquetSpec, seed: u64) -> Result<BouquetTrial> {
    let (dict, labels) = gen_bouquet_dict(spec.d, spec.n, spec.groups, spec.coherence, mix_seed(seed, &[0]))?;
    let mut rng = ChaCha20Rng::seed_from_u64(mix_seed(seed, &[1]));
    let group = rng.random_range(0..spec.groups);
    let mut x0: Vec<f64> = labels.iter().map(|&g| if g == group { rng.random_range(0.5..=1.0) } else { 0.0 }).collect();
    let s = norm2(&x0);
    x0.iter_mut().for_each(|v| *v /= s);
    let clean = dict.matvec(&x0);
    Ok(BouquetTrial { dict, labels, group, x0, clean })
}

/// Index of the group with the largest coefficient energy.
pub fn identify_group(x: &[f64], labels: &[usize], groups: usize) -> usize {
    let mut energy = vec![0.0; groups];
    for (v, &g) in x.iter().zip(labels) {
        energy[g] += v * v;
    }
    (0..groups).fold(0, |best, g| if energy[g] > energy[best] { g } else { best })
}

/// Group identification under growing corruption. Each trial keeps its
/// dictionary and signal across levels; corrupted entries are replaced by
/// uniform draws from `[−‖b‖∞, ‖b‖∞]`. `rate` is the identification rate.
pub fn run_corruption_sweep(
    spec: &BouquetSpec,
    levels: &[f64],
    solvers: &[Algorithm],
    trials: usize,
    base_seed: u64,
    config: &SolverConfig,
    jobs: usize,
) -> Result<SweepResult> {
    check_common(solvers, trials)?;
    config.validate()?;
    if levels.is_empty() || levels.iter().any(|l| !(0.0..=1.0).contains(l)) {
        return Err(L1Error::InvalidArgument("corruption levels must be a non-empty list in [0, 1]".into()));
    }
    gen_bouquet_dict(spec.d, spec.n, spec.groups, spec.coherence, 0)?;
    let items: Vec<(usize, usize)> = (0..levels.len()).flat_map(|a| (0..trials).map(move |t| (a, t))).collect();
    let outcomes = par_map(jobs, &items, |&(a, t)| -> Result<Vec<Option<Outcome>>> {
        let seed = mix_seed(base_seed, &[t as u64]);
        let trial = bouquet_trial(spec, seed)?;
        let hi = norm_inf(&trial.clean);
        let (b, _) = corrupt_entries(&trial.clean, levels[a], -hi, hi, mix_seed(seed, &[2, a as u64]))?;
        Ok(solvers
            .iter()
            .map(|&algo| {
                cab_solve(&trial.dict, &b, algo, config, 1.0).ok().map(|sol| Outcome {
                    time: sol.result.wall_time_seconds,
                    error: relative_error(&sol.x, &trial.x0),
                    iterations: sol.result.iterations,
                    hit: identify_group(&sol.x, &trial.labels, spec.groups) == trial.group,
                })
            })
            .collect())
    })?
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        kind: "corruption".into(),
        axis: "corruption".into(),
        rows: reduce(levels, solvers, trials, &outcomes),
        axis_values: levels.to_vec(),
        rate_name: "identification_rate".into(),
        trials,
        base_seed,
    })
}
