use std::collections::HashMap;

use super::distribution::{canonical_entries, Distribution};
use super::models::LossModel;
use super::simulate::{binomial, entries_for_input, sub_occupations, SimOptions};
use super::state::FockState;
use crate::error::{Error, Result};
use crate::network::{output_layout, InterferometerSpec, SpatioTemporalMode};

/// Applies input, output and detector losses to a lossless distribution.
///
/// Input loss is exact: the device is re-simulated for every pattern of
/// surviving injected photons and the results mixed with binomial weights.
/// Output and detector loss thin each outcome mode by mode. Looped outputs
/// carry no detector and are left untouched.
pub fn apply_loss(dist: &Distribution, loss: &LossModel, spec: &InterferometerSpec) -> Result<Distribution> {
    apply_loss_with(dist, loss, spec, &SimOptions::default())
}

pub fn apply_loss_with(
    dist: &Distribution,
    loss: &LossModel,
    spec: &InterferometerSpec,
    opts: &SimOptions,
) -> Result<Distribution> {
    if loss.is_lossless() {
        return Ok(dist.clone());
    }
    let ext = spec.external_modes();
    if loss.input_efficiency().len() != ext || loss.output_efficiency().len() != ext {
        return Err(Error::Dimension(format!(
            "loss model must cover {ext} external inputs and outputs"
        )));
    }
    let meta = dist.meta();
    let iterations = meta.iterations;
    let layout = output_layout(ext, spec.loops(), iterations, meta.feedback);
    let keep: Vec<usize> = meta
        .modes
        .iter()
        .map(|label| {
            layout
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| Error::Argument(format!("mode {label} is not produced by this device")))
        })
        .collect::<Result<_>>()?;

    let input = spec.schedule_input(iterations)?;
    let survival: Vec<f64> = (0..input.modes()).map(|c| loss.input_efficiency()[c % ext]).collect();

    let mut mixed: HashMap<FockState, f64> = HashMap::new();
    for surviving in sub_occupations(input.occupations()) {
        let mut weight = 1.0;
        for ((&k, &n), &eta) in surviving.iter().zip(input.occupations()).zip(&survival) {
            weight *= binomial(n, k) * eta.powi(k as i32) * (1.0 - eta).powi((n - k) as i32);
        }
        if weight == 0.0 {
            continue;
        }
        let reduced = FockState::new(surviving);
        let entries = entries_for_input(
            spec,
            iterations,
            meta.kind,
            meta.feedback,
            &reduced,
            meta.phase_average,
            opts,
        )?;
        for (state, p) in entries {
            *mixed.entry(state.select(&keep)).or_insert(0.0) += weight * p;
        }
    }

    let detect: Vec<f64> = meta
        .modes
        .iter()
        .map(|label| match label {
            SpatioTemporalMode::External { mode, .. } => loss.detection_probability(*mode),
            SpatioTemporalMode::Loop { .. } => 1.0,
        })
        .collect();
    let mut detected: HashMap<FockState, f64> = HashMap::new();
    for (state, p) in mixed {
        thin(
            state.occupations(),
            &detect,
            p,
            &mut Vec::with_capacity(detect.len()),
            &mut detected,
        );
    }

    let mut out_meta = meta.clone();
    out_meta.set_tag("loss", "applied");
    Distribution::new(canonical_entries(detected), out_meta)
}

/// Binomial thinning of the remaining modes of `occ`, accumulating into `acc`.
fn thin(occ: &[u32], eta: &[f64], weight: f64, prefix: &mut Vec<u32>, acc: &mut HashMap<FockState, f64>) {
    let pos = prefix.len();
    if pos == occ.len() {
        *acc.entry(FockState::new(prefix.clone())).or_insert(0.0) += weight;
        return;
    }
    let n = occ[pos];
    let e = eta[pos];
    for k in 0..=n {
        let w = binomial(n, k) * e.powi(k as i32) * (1.0 - e).powi((n - k) as i32);
        if w == 0.0 && n > 0 {
            continue;
        }
        prefix.push(k);
        thin(occ, eta, weight * w, prefix, acc);
        prefix.pop();
    }
}
