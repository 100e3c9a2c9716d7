//! Percentile bootstrap for shot-level estimates.

use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Percentile bootstrap confidence interval for the mean of `samples`.
///
/// Resamples with replacement `resamples` times, takes the empirical
/// quantiles of the resampled means at `(1 - level)/2` and `1 - (1-level)/2`
/// (linear interpolation between order statistics). Deterministic for a
/// fixed seed.
pub fn bootstrap_ci(
    samples: &[f64],
    level: f64,
    resamples: u32,
    seed: u64,
) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::Domain("bootstrap needs a non-empty sample set".into()));
    }
    if !(0.0 < level && level < 1.0) {
        return Err(Error::Domain(alloc::format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    if resamples < 100 {
        return Err(Error::Domain(alloc::format!(
            "need at least 100 resamples, got {resamples}"
        )));
    }
    let n = samples.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means = Vec::with_capacity(resamples as usize);
    for _ in 0..resamples {
        let mut acc = 0.0;
        for _ in 0..n {
            acc += samples[rng.gen_range(0..n)];
        }
        means.push(acc / n as f64);
    }
    means.sort_by(|a, b| a.partial_cmp(b).expect("finite means"));
    let tail = 0.5 * (1.0 - level);
    Ok((quantile(&means, tail), quantile(&means, 1.0 - tail)))
}

/// Linear-interpolation quantile of a sorted slice.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let last = sorted.len() - 1;
    let pos = p * last as f64;
    let lo = pos as usize;
    if lo >= last {
        return sorted[last];
    }
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac
}
