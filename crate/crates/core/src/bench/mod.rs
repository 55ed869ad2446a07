//! Experiment harness: phase-transition grids, noise sweeps and corruption
//! sweeps over seeded synthetic instances, with CSV, JSON and SVG output.
//!
//! Every trial draws its data from a seed mixed from the base seed and the
//! trial's coordinates, so results do not depend on scheduling or `jobs`.

mod phase;
mod svg;
mod sweep;

pub use phase::{interpolate_success_contour, run_phase_grid, GridSpec, PhaseGrid};
pub use svg::{phase_svg, sweep_svg};
pub use sweep::{
    bouquet_trial, identify_group, noise_lambda, run_corruption_sweep, run_noise_sweep, BouquetSpec, BouquetTrial,
    SweepMode, SweepResult, SweepRow,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{L1Error, Result};

/// C's `%.17g`: enough digits to round-trip any `f64`.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    const P: i32 = 17;
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..P).contains(&exp) {
        let fixed = format!("{:.*}", (P - 1 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// The splitmix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable 64-bit mix of a base seed and a sequence of indices.
pub fn mix_seed(base: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix64(base), |h, &p| splitmix64(h ^ splitmix64(p)))
}

/// Metadata written next to benchmark results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub crate_version: String,
    pub rng: String,
    pub os: String,
    pub arch: String,
    pub jobs: usize,
}

impl Environment {
    pub fn current(jobs: usize) -> Self {
        Self {
            crate_version: env!("CARGO_PKG_VERSION").into(),
            rng: crate::synth::RNG_NAME.into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            jobs,
        }
    }
}

/// Maps `f` over `items` on a pool of `jobs` threads, keeping input order.
pub(crate) fn par_map<T, R, F>(jobs: usize, items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    if jobs == 0 {
        return Err(L1Error::InvalidArgument("jobs must be at least 1".into()));
    }
    if jobs == 1 {
        return Ok(items.iter().map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| L1Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(&f).collect()))
}
