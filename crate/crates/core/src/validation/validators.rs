use std::fmt;
use std::str::FromStr;

use super::pair::HypothesisPair;
use crate::error::{Error, Result};
use crate::fock::{apply_loss_with, model_distribution, phase_average_with, Distribution, Kind, SimOptions};
use crate::network::{Feedback, InterferometerSpec};

/// Which detected patterns enter the likelihoods.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhotonSelection {
    /// Every iteration shows exactly the photons injected in it.
    PerIteration,
    /// All injected photons are detected, in any iteration.
    Total,
    /// No post-selection; likelihoods over every detected pattern.
    Detected,
}

impl fmt::Display for PhotonSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhotonSelection::PerIteration => "per-iteration",
            PhotonSelection::Total => "total",
            PhotonSelection::Detected => "detected",
        })
    }
}

impl FromStr for PhotonSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-iteration" => Ok(Self::PerIteration),
            "total" => Ok(Self::Total),
            "detected" => Ok(Self::Detected),
            other => Err(Error::Argument(format!("unknown photon selection `{other}`"))),
        }
    }
}

/// Restricts a detected-mode distribution to the selected patterns and
/// renormalizes. `injected[t]` is the photon count of iteration `t + 1`.
pub fn postselect(dist: &Distribution, selection: PhotonSelection, injected: &[usize]) -> Result<Distribution> {
    let labels = dist.meta().modes.clone();
    let mut out = match selection {
        PhotonSelection::Detected => return Ok(dist.clone()),
        PhotonSelection::Total => {
            let total: usize = injected.iter().sum();
            dist.filter(|s| s.photons() == total)?
        }
        PhotonSelection::PerIteration => dist.filter(|s| {
            let mut counts = vec![0usize; injected.len()];
            for (label, &n) in labels.iter().zip(s.occupations()) {
                if label.is_external() {
                    if let Some(c) = counts.get_mut(label.iteration() - 1) {
                        *c += n as usize;
                    }
                }
            }
            counts == injected
        })?,
    };
    out.meta_mut().set_tag("selection", selection.to_string());
    out.normalized()
}

/// Knobs for [`standard_validators`].
#[derive(Clone, Copy, Debug)]
pub struct ValidatorOptions {
    /// Random phase draws for the phase-averaged pair.
    pub phase_samples: usize,
    pub seed: u64,
    /// Post-selection for the photon-statistics pairs.
    pub selection: PhotonSelection,
    /// Post-selection for the feedback pairs.
    pub feedback_selection: PhotonSelection,
    /// Evaluate likelihoods over the lossy distributions of the spec.
    pub lossy: bool,
    pub sim: SimOptions,
}

impl Default for ValidatorOptions {
    fn default() -> Self {
        Self {
            phase_samples: 200,
            seed: 0,
            selection: PhotonSelection::PerIteration,
            feedback_selection: PhotonSelection::Detected,
            lossy: false,
            sim: SimOptions::default(),
        }
    }
}

/// Names accepted by [`standard_validators`] output, in order.
pub const VALIDATOR_NAMES: [&str; 4] = ["distinguishable", "uniform", "unlooped", "unlooped-averaged"];

/// The canonical hypothesis pairs, hypothesis A always being the ideal
/// looped quantum device:
///
/// - `distinguishable`: against distinguishable photons
/// - `uniform`: against a uniform sampler over the same outcomes
/// - `unlooped`: against the same device with blocked feedback lines
/// - `unlooped-averaged`: as above with A averaged over random fiber phases
pub fn standard_validators(
    spec: &InterferometerSpec,
    iterations: usize,
    opts: &ValidatorOptions,
) -> Result<Vec<HypothesisPair>> {
    let injected: Vec<usize> = spec.injection()[..iterations.min(spec.injection().len())]
        .iter()
        .map(|s| s.photons())
        .collect();
    let prepare = |dist: Distribution, selection: PhotonSelection| -> Result<Distribution> {
        let dist = if opts.lossy {
            apply_loss_with(&dist, spec.loss(), spec, &opts.sim)?
        } else {
            dist
        };
        postselect(&dist.detected()?, selection, &injected)
    };
    let model = |kind: Kind, feedback: Feedback| model_distribution(spec, iterations, kind, feedback, &opts.sim);

    let quantum = prepare(model(Kind::Quantum, Feedback::Looped)?, opts.selection)?;
    let distinguishable = prepare(model(Kind::Distinguishable, Feedback::Looped)?, opts.selection)?;
    let mut uniform_meta = quantum.meta().clone();
    uniform_meta.kind = Kind::Uniform;
    let uniform = Distribution::uniform(quantum.entries().iter().map(|(s, _)| s.clone()).collect(), uniform_meta)?;

    let looped = prepare(model(Kind::Quantum, Feedback::Looped)?, opts.feedback_selection)?;
    let unlooped = prepare(model(Kind::Quantum, Feedback::Unlooped)?, opts.feedback_selection)?;
    let averaged = phase_average_with(
        spec,
        iterations,
        opts.phase_samples,
        opts.seed,
        Kind::Quantum,
        Feedback::Looped,
        &opts.sim,
    )?;
    let averaged = prepare(averaged.distribution, opts.feedback_selection)?;

    let labels = |a: &str, b: &str| (a.to_string(), b.to_string());
    Ok(vec![
        HypothesisPair::new(
            VALIDATOR_NAMES[0],
            quantum.clone(),
            distinguishable,
            labels("quantum", "distinguishable"),
        )?,
        HypothesisPair::new(VALIDATOR_NAMES[1], quantum, uniform, labels("quantum", "uniform"))?,
        HypothesisPair::new(
            VALIDATOR_NAMES[2],
            looped,
            unlooped.clone(),
            labels("looped", "unlooped"),
        )?,
        HypothesisPair::new(
            VALIDATOR_NAMES[3],
            averaged,
            unlooped,
            labels("looped-averaged", "unlooped"),
        )?,
    ])
}
