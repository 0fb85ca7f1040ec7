use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal};

use super::visibility::hom_visibility;
use crate::error::{Error, Result};
use crate::linalg::{check_isometry, ComplexMatrix};

/// One two-photon interference measurement. Pairs are stored with
/// `inputs.0 < inputs.1` and `outputs.0 < outputs.1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VisibilityRecord {
    pub inputs: (usize, usize),
    pub outputs: (usize, usize),
    pub value: f64,
}

impl VisibilityRecord {
    pub fn new(inputs: (usize, usize), outputs: (usize, usize), value: f64) -> Result<Self> {
        let order = |(a, b): (usize, usize)| if a <= b { (a, b) } else { (b, a) };
        let (inputs, outputs) = (order(inputs), order(outputs));
        if inputs.0 == inputs.1 || outputs.0 == outputs.1 {
            return Err(Error::Argument(
                "visibility record needs distinct modes in each pair".into(),
            ));
        }
        if !value.is_finite() {
            return Err(Error::Argument("visibility must be finite".into()));
        }
        Ok(Self { inputs, outputs, value })
    }

    fn key(&self) -> (usize, usize, usize, usize) {
        (self.inputs.0, self.inputs.1, self.outputs.0, self.outputs.1)
    }
}

/// Single-photon moduli and two-photon visibilities of an `M`-mode device.
#[derive(Clone, Debug, PartialEq)]
pub struct TomographyData {
    modes: usize,
    /// Row-major `moduli[k * M + i]`: output `k`, input `i`.
    moduli: Vec<f64>,
    visibilities: Vec<VisibilityRecord>,
    noise_level: f64,
}

impl TomographyData {
    pub fn new(modes: usize, moduli: Vec<f64>, visibilities: Vec<VisibilityRecord>, noise_level: f64) -> Result<Self> {
        if modes < 2 {
            return Err(Error::Dimension("tomography needs at least two modes".into()));
        }
        if moduli.len() != modes * modes {
            return Err(Error::Dimension(format!("{} moduli for {modes} modes", moduli.len())));
        }
        if moduli.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::Argument("moduli must be finite and non-negative".into()));
        }
        if moduli.iter().all(|m| *m == 0.0) {
            return Err(Error::Degenerate("all moduli are zero".into()));
        }
        let mut seen = HashSet::new();
        for r in &visibilities {
            if r.inputs.1 >= modes || r.outputs.1 >= modes {
                return Err(Error::Bounds {
                    index: r.inputs.1.max(r.outputs.1),
                    dim: modes,
                });
            }
            if !seen.insert(r.key()) {
                return Err(Error::Argument(format!("duplicate visibility record {:?}", r.key())));
            }
        }
        Ok(Self {
            modes,
            moduli,
            visibilities,
            noise_level,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn modulus(&self, output: usize, input: usize) -> f64 {
        self.moduli[output * self.modes + input]
    }

    pub fn moduli(&self) -> &[f64] {
        &self.moduli
    }

    pub fn moduli_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.modes, self.modes, |k, i| self.modulus(k, i).into())
    }

    pub fn visibilities(&self) -> &[VisibilityRecord] {
        &self.visibilities
    }

    pub fn noise_level(&self) -> f64 {
        self.noise_level
    }

    /// Distinct input pairs that appear in the visibility table, sorted.
    pub fn input_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<_> = self
            .visibilities
            .iter()
            .map(|r| r.inputs)
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        pairs.sort_unstable();
        pairs
    }
}

/// Settings of the synthetic measurement generator.
#[derive(Clone, Debug)]
pub struct SynthOptions {
    pub input_loss: Vec<f64>,
    pub output_loss: Vec<f64>,
    /// Number of distinct input pairs probed with two photons.
    pub pair_budget: usize,
    pub noise_sigma: f64,
    /// Two-photon indistinguishability; scales every visibility.
    pub indistinguishability: f64,
    pub seed: u64,
}

impl SynthOptions {
    pub fn lossless(modes: usize, pair_budget: usize, noise_sigma: f64, seed: u64) -> Self {
        Self {
            input_loss: vec![1.0; modes],
            output_loss: vec![1.0; modes],
            pair_budget,
            noise_sigma,
            indistinguishability: 1.0,
            seed,
        }
    }
}

/// Simulated single-photon and two-photon measurements on `u_true`.
///
/// Moduli carry multiplicative Gaussian noise of relative width `sigma`
/// (clamped at zero); visibilities carry additive noise of width `sigma`
/// (clamped to `[-1, 1]`). Quadruples without classical coincidences are
/// skipped.
pub fn synthesize_measurements(u_true: &ComplexMatrix, opts: &SynthOptions) -> Result<TomographyData> {
    let m = u_true.rows();
    if !u_true.is_square() || !check_isometry(u_true, 1e-10)?.is_isometry {
        return Err(Error::Argument("ground truth must be a unitary matrix".into()));
    }
    if opts.input_loss.len() != m || opts.output_loss.len() != m {
        return Err(Error::Dimension(format!("loss vectors must have {m} entries")));
    }
    let in_range = |x: &f64| (0.0..=1.0).contains(x);
    if !opts.input_loss.iter().chain(&opts.output_loss).all(in_range) || !in_range(&opts.indistinguishability) {
        return Err(Error::Argument("efficiencies must lie in [0, 1]".into()));
    }
    if !(opts.noise_sigma >= 0.0 && opts.noise_sigma.is_finite()) {
        return Err(Error::Argument("noise level must be finite and non-negative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let noise = |rng: &mut ChaCha8Rng| -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        opts.noise_sigma * z
    };

    let mut moduli = Vec::with_capacity(m * m);
    for k in 0..m {
        for i in 0..m {
            let value = opts.output_loss[k] * u_true[(k, i)].norm_sqr() * opts.input_loss[i];
            moduli.push((value * (1.0 + noise(&mut rng))).max(0.0));
        }
    }

    let mut pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    pairs.shuffle(&mut rng);
    pairs.truncate(opts.pair_budget);
    pairs.sort_unstable();
    let mut records = Vec::new();
    for &(i, j) in &pairs {
        for k in 0..m {
            for l in k + 1..m {
                let Ok(v) = hom_visibility(u_true, i, j, k, l) else {
                    continue;
                };
                let value = (opts.indistinguishability * v + noise(&mut rng)).clamp(-1.0, 1.0);
                records.push(VisibilityRecord {
                    inputs: (i, j),
                    outputs: (k, l),
                    value,
                });
            }
        }
    }
    TomographyData::new(m, moduli, records, opts.noise_sigma)
}

/// Fresh noisy visibilities for every input pair that `training` does not
/// probe, for out-of-sample checks.
pub fn heldout_measurements(
    u_true: &ComplexMatrix,
    training: &TomographyData,
    noise_sigma: f64,
    seed: u64,
) -> Result<Vec<VisibilityRecord>> {
    let m = u_true.rows();
    if training.modes() != m {
        return Err(Error::Dimension(format!(
            "{m}-mode truth against {}-mode data",
            training.modes()
        )));
    }
    let seen: HashSet<(usize, usize)> = training.input_pairs().into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            if seen.contains(&(i, j)) {
                continue;
            }
            for k in 0..m {
                for l in k + 1..m {
                    let Ok(v) = hom_visibility(u_true, i, j, k, l) else {
                        continue;
                    };
                    let z: f64 = StandardNormal.sample(&mut rng);
                    let value = (v + noise_sigma * z).clamp(-1.0, 1.0);
                    out.push(VisibilityRecord {
                        inputs: (i, j),
                        outputs: (k, l),
                        value,
                    });
                }
            }
        }
    }
    Ok(out)
}
