use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{format_g17, mix_seed, par_map};
use crate::error::{L1Error, Result};
use crate::model::{Problem, SolverConfig};
use crate::numerics::relative_error;
use crate::solver::{solve, Algorithm};
use crate::synth::{gen_gaussian_dict, gen_sparse_signal};

/// Sampled sparsity rates `ρ = k/n` and sampling rates `δ = d/n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub rho_values: Vec<f64>,
    pub delta_values: Vec<f64>,
}

impl GridSpec {
    /// `rows` values of ρ and `cols` values of δ, each `i/count` for `i = 1..=count`.
    pub fn uniform(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(L1Error::InvalidArgument(format!("grid needs at least one cell, got {rows}x{cols}")));
        }
        let axis = |m: usize| (1..=m).map(|i| i as f64 / m as f64).collect();
        Ok(Self { rho_values: axis(rows), delta_values: axis(cols) })
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("rho", &self.rho_values), ("delta", &self.delta_values)] {
            if v.is_empty() {
                return Err(L1Error::InvalidArgument(format!("{name} axis is empty")));
            }
            if v.iter().any(|x| !(*x > 0.0 && *x <= 1.0)) {
                return Err(L1Error::InvalidArgument(format!("{name} values must lie in (0, 1]")));
            }
            if v.windows(2).any(|w| w[0] >= w[1]) {
                return Err(L1Error::InvalidArgument(format!("{name} values must be strictly increasing")));
            }
        }
        Ok(())
    }
}

/// Parses `"16x16"` (ρ count × δ count).
impl FromStr for GridSpec {
    type Err = L1Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || L1Error::InvalidArgument(format!("grid must look like RxD (e.g. 16x16), got '{s}'"));
        let (r, d) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let r: usize = r.trim().parse().map_err(|_| bad())?;
        let d: usize = d.trim().parse().map_err(|_| bad())?;
        GridSpec::uniform(r, d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub algo: Algorithm,
    pub n: usize,
    pub rho_values: Vec<f64>,
    pub delta_values: Vec<f64>,
    /// `success_rate[i][j]` for `rho_values[i]`, `delta_values[j]`.
    pub success_rate: Vec<Vec<f64>>,
    pub successes: Vec<Vec<usize>>,
    pub trials_per_cell: usize,
    pub base_seed: u64,
    pub success_tol: f64,
}

impl PhaseGrid {
    pub fn k_for(&self, rho: f64) -> usize {
        cell_count(rho, self.n)
    }

    pub fn d_for(&self, delta: f64) -> usize {
        cell_count(delta, self.n)
    }

    /// One row per cell, ρ-major, all numbers in `%.17g`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "rho,delta,k,d,algo,trials,successes,success_rate")?;
        for (i, &rho) in self.rho_values.iter().enumerate() {
            for (j, &delta) in self.delta_values.iter().enumerate() {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{}",
                    format_g17(rho),
                    format_g17(delta),
                    self.k_for(rho),
                    self.d_for(delta),
                    self.algo,
                    self.trials_per_cell,
                    self.successes[i][j],
                    format_g17(self.success_rate[i][j])
                )?;
            }
        }
        Ok(())
    }
}

fn cell_count(rate: f64, n: usize) -> usize {
    ((rate * n as f64).round() as usize).clamp(1, n)
}

/// Success rate of `algo` over a ρ-δ grid of noise-free Gaussian instances.
///
/// A trial succeeds when `‖x* − x₀‖/‖x₀‖ ≤ success_tol`; solver errors count
/// as failures.
#[allow(clippy::too_many_arguments)]
pub fn run_phase_grid(
    algo: Algorithm,
    n: usize,
    grid: &GridSpec,
    trials: usize,
    success_tol: f64,
    base_seed: u64,
    config: &SolverConfig,
    jobs: usize,
) -> Result<PhaseGrid> {
    if trials == 0 {
        return Err(L1Error::InvalidArgument("trials must be at least 1".into()));
    }
    if n == 0 {
        return Err(L1Error::InvalidArgument("n must be at least 1".into()));
    }
    if !(success_tol > 0.0) {
        return Err(L1Error::InvalidArgument(format!("success tolerance must be positive, got {success_tol}")));
    }
    grid.validate()?;
    config.validate()?;
    let (nr, nd) = (grid.rho_values.len(), grid.delta_values.len());
    let items: Vec<(usize, usize, usize)> =
        (0..nr).flat_map(|i| (0..nd).flat_map(move |j| (0..trials).map(move |t| (i, j, t)))).collect();
    let outcomes = par_map(jobs, &items, |&(i, j, t)| {
        let k = cell_count(grid.rho_values[i], n);
        let d = cell_count(grid.delta_values[j], n);
        let seed = mix_seed(base_seed, &[i as u64, j as u64, t as u64]);
        trial_succeeds(algo, n, d, k, seed, success_tol, config)
    })?;
    let mut successes = vec![vec![0usize; nd]; nr];
    for (&(i, j, _), ok) in items.iter().zip(outcomes) {
        successes[i][j] += usize::from(ok?);
    }
    let success_rate = successes.iter().map(|row| row.iter().map(|&s| s as f64 / trials as f64).collect()).collect();
    Ok(PhaseGrid {
        algo,
        n,
        rho_values: grid.rho_values.clone(),
        delta_values: grid.delta_values.clone(),
        success_rate,
        successes,
        trials_per_cell: trials,
        base_seed,
        success_tol,
    })
}

fn trial_succeeds(
    algo: Algorithm,
    n: usize,
    d: usize,
    k: usize,
    seed: u64,
    tol: f64,
    config: &SolverConfig,
) -> Result<bool> {
    let a = gen_gaussian_dict(d, n, mix_seed(seed, &[0]))?;
    let x0 = gen_sparse_signal(n, k, mix_seed(seed, &[1]))?;
    let b = a.matvec(&x0);
    let problem = Problem::new(&a, &b)?.with_ground_truth(Some(&x0))?;
    Ok(match solve(algo, &problem, config) {
        Ok(r) => relative_error(&r.x_star, &x0) <= tol,
        Err(_) => false,
    })
}

/// Per δ-column, the ρ at which the success rate first falls through
/// `level`, by linear interpolation between neighbouring cells. Columns that
/// never cross are omitted. Returns `(δ, ρ)` pairs.
pub fn interpolate_success_contour(grid: &PhaseGrid, level: f64) -> Result<Vec<(f64, f64)>> {
    if !(level > 0.0 && level < 1.0) {
        return Err(L1Error::InvalidArgument(format!("contour level must lie in (0, 1), got {level}")));
    }
    let mut out = Vec::new();
    for (j, &delta) in grid.delta_values.iter().enumerate() {
        let rates: Vec<f64> = grid.success_rate.iter().map(|row| row[j]).collect();
        let crossing = (0..rates.len().saturating_sub(1)).find(|&i| rates[i] >= level && rates[i + 1] < level);
        if let Some(i) = crossing {
            let (r0, r1) = (rates[i], rates[i + 1]);
            let (p0, p1) = (grid.rho_values[i], grid.rho_values[i + 1]);
            out.push((delta, p0 + (r0 - level) / (r0 - r1) * (p1 - p0)));
        }
    }
    Ok(out)
}
