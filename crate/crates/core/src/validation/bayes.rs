use crate::error::{Error, Result};
use crate::fock::{Distribution, SampleSet};

use super::pair::HypothesisPair;

/// Posterior of hypothesis A after each processed sample.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationTrajectory {
    /// `P(A)`; entry 0 is the 0.5 prior and entry `k` follows `k` samples.
    /// For banded trajectories this is the mean over sample sets.
    pub posterior_a: Vec<f64>,
    /// Running `ln chi`, aligned with `posterior_a`. Empty for banded
    /// trajectories.
    pub log_chi: Vec<f64>,
    /// First step at which a sample impossible under one hypothesis pinned
    /// the posterior to 0 or 1.
    pub clamped_at: Option<usize>,
    pub bands: Option<Bands>,
}

/// Empirical quantile band over many sample sets.
#[derive(Clone, Debug, PartialEq)]
pub struct Bands {
    pub level: f64,
    pub sets: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub median: Vec<f64>,
}

impl ValidationTrajectory {
    pub fn steps(&self) -> usize {
        self.posterior_a.len().saturating_sub(1)
    }

    pub fn final_posterior(&self) -> f64 {
        *self.posterior_a.last().expect("trajectory holds the prior")
    }
}

/// `chi / (chi + 1)` from `ln chi`, evaluated without overflow.
///
/// The smaller of the two posteriors is snapped to `1 - larger`, which makes
/// swapping the hypotheses map `p` to exactly `1 - p`.
pub fn posterior_from_log_chi(log_chi: f64) -> f64 {
    if log_chi == f64::INFINITY {
        return 1.0;
    }
    if log_chi == f64::NEG_INFINITY {
        return 0.0;
    }
    let e = (-log_chi.abs()).exp();
    let larger = 1.0 - e / (1.0 + e);
    if log_chi >= 0.0 {
        larger
    } else {
        1.0 - larger
    }
}

/// Sequential Bayesian update starting from `P(A) = P(B) = 1/2`.
pub fn bayesian_trajectory(samples: &SampleSet, pair: &HypothesisPair) -> Result<ValidationTrajectory> {
    trajectory_from_iter(samples.samples.iter(), pair.dist_a(), pair.dist_b(), samples.len())
}

pub(crate) fn trajectory_from_iter<'a>(
    samples: impl Iterator<Item = &'a crate::fock::FockState>,
    a: &Distribution,
    b: &Distribution,
    hint: usize,
) -> Result<ValidationTrajectory> {
    let mut posterior_a = Vec::with_capacity(hint + 1);
    let mut log_chi = Vec::with_capacity(hint + 1);
    posterior_a.push(0.5);
    log_chi.push(0.0);
    let mut acc = 0.0f64;
    let mut clamped_at = None;
    for (i, s) in samples.enumerate() {
        let pa = a.probability(s);
        let pb = b.probability(s);
        if pa == 0.0 && pb == 0.0 {
            return Err(Error::ImpossibleSample { sample: i });
        }
        let step = pa.ln() - pb.ln();
        if acc.is_infinite() && step.is_infinite() && acc.signum() != step.signum() {
            // the surviving hypothesis is now excluded as well
            return Err(Error::ImpossibleSample { sample: i });
        }
        acc += step;
        if acc.is_infinite() && clamped_at.is_none() {
            clamped_at = Some(i + 1);
        }
        log_chi.push(acc);
        posterior_a.push(posterior_from_log_chi(acc));
    }
    Ok(ValidationTrajectory {
        posterior_a,
        log_chi,
        clamped_at,
        bands: None,
    })
}

/// `sum_n a(n) ln(a(n) / b(n))`; infinite when `b` misses part of `a`'s support.
pub fn kl_divergence(a: &Distribution, b: &Distribution) -> f64 {
    a.entries()
        .iter()
        .filter(|(_, p)| *p > 0.0)
        .map(|(s, p)| p * (p.ln() - b.probability(s).ln()))
        .sum()
}

/// First step whose value exceeds `threshold`.
pub fn first_crossing(values: &[f64], threshold: f64) -> Option<usize> {
    values.iter().position(|&v| v > threshold)
}
