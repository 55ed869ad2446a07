//! Seeded generators for dictionaries, sparse signals, noise and corruption.
//!
//! Every generator draws from its own `ChaCha20Rng` seeded with the given
//! 64-bit seed, so outputs depend only on the arguments.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bench::mix_seed;
use crate::error::{L1Error, Result};
use crate::model::ProblemInstance;
use crate::numerics::{norm2, norm_inf, DenseMatrix};

/// Name recorded in output metadata.
pub const RNG_NAME: &str = "ChaCha20 (rand_chacha 0.9, seed_from_u64)";

/// Share of a bouquet column's non-mean part that comes from its group direction.
pub const BOUQUET_GROUP_SHARE: f64 = 0.8;

/// Parameters of one generated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub seed: u64,
    #[serde(default)]
    pub noise_sigma: f64,
    #[serde(default)]
    pub corruption_fraction: f64,
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        if self.d < 1 || self.n < 1 {
            return Err(L1Error::InvalidArgument(format!("need d, n >= 1 (d = {}, n = {})", self.d, self.n)));
        }
        if self.k > self.n {
            return Err(L1Error::InvalidArgument(format!("sparsity k = {} exceeds n = {}", self.k, self.n)));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(L1Error::InvalidArgument("noise sigma must be non-negative".into()));
        }
        if !(0.0..=1.0).contains(&self.corruption_fraction) {
            return Err(L1Error::InvalidArgument("corruption fraction must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn normal_vec(rng: &mut ChaCha20Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

fn normalize(v: &mut [f64]) {
    let s = norm2(v);
    if s > 0.0 {
        v.iter_mut().for_each(|x| *x /= s);
    }
}

/// `d × n` i.i.d. Gaussian matrix with unit-norm columns.
pub fn gen_gaussian_dict(d: usize, n: usize, seed: u64) -> Result<DenseMatrix> {
    if d < 1 || n < 1 {
        return Err(L1Error::InvalidArgument(format!("dictionary needs d, n >= 1 (d = {d}, n = {n})")));
    }
    let mut r = rng(seed);
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut c = normal_vec(&mut r, d);
            normalize(&mut c);
            c
        })
        .collect();
    DenseMatrix::from_columns(d, &cols)
}

/// Unit-norm vector with exactly `k` Gaussian nonzeros on a uniform support.
pub fn gen_sparse_signal(n: usize, k: usize, seed: u64) -> Result<Vec<f64>> {
    if k < 1 || k > n {
        return Err(L1Error::InvalidArgument(format!("sparsity must satisfy 1 <= k <= n (k = {k}, n = {n})")));
    }
    let mut r = rng(seed);
    let support = sample(&mut r, n, k);
    let mut x = vec![0.0; n];
    for i in support.iter() {
        // a draw of exactly zero would lose a nonzero; redraw
        let mut v = 0.0;
        while v == 0.0 {
            v = r.sample::<f64, _>(StandardNormal);
        }
        x[i] = v;
    }
    normalize(&mut x);
    Ok(x)
}

/// `b + e` with `e ~ N(0, σ²I)`.
pub fn add_noise(b: &[f64], sigma: f64, seed: u64) -> Result<Vec<f64>> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(L1Error::InvalidArgument(format!("noise sigma must be non-negative, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(b.to_vec());
    }
    let mut r = rng(seed);
    Ok(b.iter().map(|v| v + sigma * r.sample::<f64, _>(StandardNormal)).collect())
}

/// Replaces `⌊fraction·d⌋` uniformly chosen entries by uniform draws from
/// `[lo, hi]`. Returns the corrupted vector and the sorted corrupted indices.
pub fn corrupt_entries(b: &[f64], fraction: f64, lo: f64, hi: f64, seed: u64) -> Result<(Vec<f64>, Vec<usize>)> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(L1Error::InvalidArgument(format!("corruption fraction must lie in [0, 1], got {fraction}")));
    }
    if !(lo <= hi) {
        return Err(L1Error::InvalidArgument(format!("empty corruption range [{lo}, {hi}]")));
    }
    let d = b.len();
    // guard against 0.1·30 = 2.9999999999999996
    let count = ((fraction * d as f64) * (1.0 + 1e-12)).floor() as usize;
    let count = count.min(d);
    let mut r = rng(seed);
    let mut mask: Vec<usize> = sample(&mut r, d, count).into_vec();
    mask.sort_unstable();
    let mut out = b.to_vec();
    for &i in &mask {
        out[i] = if lo == hi { lo } else { r.random_range(lo..=hi) };
    }
    Ok((out, mask))
}

/// Dictionary whose columns bundle around a common mean direction.
///
/// Column `j` of group `g` is `c·m + √(1−c²)·(a·o_g + √(1−a²)·η_j)`,
/// renormalized, where `m`, `o_g`, `η_j` are independent random unit
/// vectors, `c` the coherence and `a` the group share. Groups are
/// contiguous blocks of near-equal size; labels are `0..groups`.
pub fn gen_bouquet_dict(
    d: usize,
    n: usize,
    groups: usize,
    coherence: f64,
    seed: u64,
) -> Result<(DenseMatrix, Vec<usize>)> {
    if d < 1 || n < 1 {
        return Err(L1Error::InvalidArgument(format!("dictionary needs d, n >= 1 (d = {d}, n = {n})")));
    }
    if groups < 1 || groups > n {
        return Err(L1Error::InvalidArgument(format!("need 1 <= groups <= n (groups = {groups}, n = {n})")));
    }
    if !(coherence > 0.0 && coherence < 1.0) {
        return Err(L1Error::InvalidArgument(format!("coherence must lie in (0, 1), got {coherence}")));
    }
    let mut r = rng(seed);
    let unit = |r: &mut ChaCha20Rng| {
        let mut v = normal_vec(r, d);
        normalize(&mut v);
        v
    };
    let mean = unit(&mut r);
    let offsets: Vec<Vec<f64>> = (0..groups).map(|_| unit(&mut r)).collect();
    let labels = group_labels(n, groups);
    let spread = (1.0 - coherence * coherence).sqrt();
    let share = BOUQUET_GROUP_SHARE;
    let own = (1.0 - share * share).sqrt();
    let cols: Vec<Vec<f64>> = labels
        .iter()
        .map(|&g| {
            let eta = unit(&mut r);
            let mut col: Vec<f64> =
                (0..d).map(|i| coherence * mean[i] + spread * (share * offsets[g][i] + own * eta[i])).collect();
            normalize(&mut col);
            col
        })
        .collect();
    Ok((DenseMatrix::from_columns(d, &cols)?, labels))
}

/// Contiguous blocks of near-equal size (the first `n mod groups` get one extra).
pub fn group_labels(n: usize, groups: usize) -> Vec<usize> {
    let base = n / groups;
    let extra = n % groups;
    let mut labels = Vec::with_capacity(n);
    for g in 0..groups {
        let size = base + usize::from(g < extra);
        labels.extend(std::iter::repeat_n(g, size));
    }
    labels
}

/// A generated instance and the indices of its corrupted entries.
#[derive(Debug, Clone)]
pub struct Generated {
    pub instance: ProblemInstance,
    pub corrupted: Vec<usize>,
}

/// Builds the instance described by `spec`: a Gaussian dictionary, a
/// `k`-sparse unit signal, then noise, then corruption of the clean-signal
/// range `[−‖Ax₀‖∞, ‖Ax₀‖∞]`. Sub-seeds 0..=3 of `spec.seed` feed the four
/// draws, so changing one setting leaves the other draws untouched.
pub fn generate(spec: &GenSpec) -> Result<Generated> {
    spec.validate()?;
    let a = gen_gaussian_dict(spec.d, spec.n, mix_seed(spec.seed, &[0]))?;
    let x0 =
        if spec.k == 0 { vec![0.0; spec.n] } else { gen_sparse_signal(spec.n, spec.k, mix_seed(spec.seed, &[1]))? };
    let clean = a.matvec(&x0);
    let noisy = add_noise(&clean, spec.noise_sigma, mix_seed(spec.seed, &[2]))?;
    let hi = norm_inf(&clean);
    let (b, corrupted) = corrupt_entries(&noisy, spec.corruption_fraction, -hi, hi, mix_seed(spec.seed, &[3]))?;
    let instance =
        if spec.d > spec.n { ProblemInstance::new_overdetermined(a, b)? } else { ProblemInstance::new(a, b)? };
    let mut instance = instance.with_ground_truth(x0)?;
    if spec.noise_sigma > 0.0 {
        instance = instance.with_noise_sigma(spec.noise_sigma)?;
    }
    Ok(Generated { instance, corrupted })
}
