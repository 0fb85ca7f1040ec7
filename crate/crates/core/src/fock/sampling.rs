use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::distribution::{Distribution, DistributionMeta};
use super::state::FockState;
use crate::error::{Error, Result};

const NORMALIZATION_TOL: f64 = 1e-9;

/// Outcomes drawn from a distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub samples: Vec<FockState>,
    pub seed: u64,
    pub source: DistributionMeta,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Inverse-CDF sampler over the enumerated support.
#[derive(Clone, Debug)]
pub struct Sampler<'a> {
    dist: &'a Distribution,
    cdf: Vec<f64>,
}

impl<'a> Sampler<'a> {
    pub fn new(dist: &'a Distribution) -> Result<Self> {
        let total = dist.total();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::State(format!("distribution sums to {total}, not 1")));
        }
        let mut acc = 0.0;
        let cdf = dist
            .entries()
            .iter()
            .map(|(_, p)| {
                acc += p;
                acc
            })
            .collect();
        Ok(Self { dist, cdf })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> &'a FockState {
        let total = *self.cdf.last().expect("non-empty distribution");
        let u = rng.gen::<f64>() * total;
        let i = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        &self.dist.entries()[i].0
    }
}

/// `n` independent draws, deterministic in `seed`.
pub fn draw_samples(dist: &Distribution, n: usize, seed: u64) -> Result<SampleSet> {
    let sampler = Sampler::new(dist)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..n).map(|_| sampler.draw(&mut rng).clone()).collect();
    Ok(SampleSet {
        samples,
        seed,
        source: dist.meta().clone(),
    })
}
