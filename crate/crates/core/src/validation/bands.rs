use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::bayes::{trajectory_from_iter, Bands, ValidationTrajectory};
use super::pair::HypothesisPair;
use crate::error::{Error, Result};
use crate::fock::{Distribution, Sampler};

/// Runs `sets` independent sample sets of `set_size` draws from `truth`
/// and summarizes the posterior of A at every step by its mean, median
/// and the central `level` empirical quantile band.
pub fn confidence_bands(
    pair: &HypothesisPair,
    truth: &Distribution,
    sets: usize,
    set_size: usize,
    level: f64,
    seed: u64,
) -> Result<ValidationTrajectory> {
    if sets < 2 {
        return Err(Error::Argument(format!("need at least 2 sample sets, got {sets}")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Argument(format!("confidence level {level} outside (0, 1)")));
    }
    let sampler = Sampler::new(truth)?;
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..sets).map(|_| master.next_u64()).collect();

    let runs: Vec<Vec<f64>> = seeds
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let draws: Vec<_> = (0..set_size).map(|_| sampler.draw(&mut rng)).collect();
            trajectory_from_iter(draws.into_iter(), pair.dist_a(), pair.dist_b(), set_size).map(|t| t.posterior_a)
        })
        .collect::<Result<_>>()?;

    let tail = (1.0 - level) / 2.0;
    let steps = set_size + 1;
    let mut mean = Vec::with_capacity(steps);
    let mut lower = Vec::with_capacity(steps);
    let mut upper = Vec::with_capacity(steps);
    let mut median = Vec::with_capacity(steps);
    let mut column = vec![0.0; sets];
    for k in 0..steps {
        for (slot, run) in column.iter_mut().zip(&runs) {
            *slot = run[k];
        }
        mean.push(column.iter().sum::<f64>() / sets as f64);
        column.sort_unstable_by(f64::total_cmp);
        lower.push(quantile_sorted(&column, tail));
        median.push(quantile_sorted(&column, 0.5));
        upper.push(quantile_sorted(&column, 1.0 - tail));
    }
    Ok(ValidationTrajectory {
        posterior_a: mean,
        log_chi: Vec::new(),
        clamped_at: None,
        bands: Some(Bands {
            level,
            sets,
            lower,
            upper,
            median,
        }),
    })
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
    }
}
