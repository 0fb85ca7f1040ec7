//! Exact output distributions from permanents of transfer-matrix submatrices.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::distribution::{canonical_entries, Distribution, DistributionMeta, Kind};
use super::state::{enumerate_fock_states, fock_space_dimension, FockState};
use crate::error::{Error, Result};
use crate::linalg::{permanent, submatrix_multiset, ComplexMatrix, ModeMultiset};
use crate::network::{
    apply_feedback_phases, build_extended_matrix, build_unlooped_matrix, output_layout, partition_unitary, Feedback,
    InterferometerSpec,
};

/// Default ceiling on the number of enumerated outcomes.
pub const DEFAULT_OUTCOME_CAP: u128 = 2_000_000;

#[derive(Clone, Copy, Debug)]
pub struct SimOptions {
    pub cap: u128,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_OUTCOME_CAP,
        }
    }
}

/// Probability of detecting `output` given `input`.
///
/// Columns of `transfer` are input modes and rows are output modes. Only
/// the quantum and distinguishable models have a single-event formula.
pub fn event_probability(transfer: &ComplexMatrix, input: &FockState, output: &FockState, kind: Kind) -> Result<f64> {
    if input.photons() != output.photons() {
        return Err(Error::Conservation {
            input: input.photons(),
            output: output.photons(),
        });
    }
    if input.modes() != transfer.cols() || output.modes() != transfer.rows() {
        return Err(Error::Dimension(format!(
            "input over {} modes and output over {} modes for a {}x{} transfer matrix",
            input.modes(),
            output.modes(),
            transfer.rows(),
            transfer.cols()
        )));
    }
    let a = submatrix_multiset(transfer, &output.multiset(), &input.multiset())?;
    probability_from_submatrix(&a, input, output, kind)
}

fn probability_from_submatrix(a: &ComplexMatrix, input: &FockState, output: &FockState, kind: Kind) -> Result<f64> {
    match kind {
        Kind::Quantum => {
            let perm = permanent(a)?;
            Ok(perm.norm_sqr() / (input.factorial_product() * output.factorial_product()))
        }
        Kind::Distinguishable => {
            let weights = a.map(|z| num_complex::Complex64::new(z.norm_sqr(), 0.0));
            Ok(permanent(&weights)?.re.max(0.0) / output.factorial_product())
        }
        other => Err(Error::Argument(format!(
            "no single-event probability for the {other} model"
        ))),
    }
}

fn check_cap(modes: usize, photons: usize, opts: &SimOptions) -> Result<()> {
    let outcomes = fock_space_dimension(modes, photons);
    if outcomes > opts.cap {
        return Err(Error::Resource {
            outcomes,
            cap: opts.cap,
        });
    }
    Ok(())
}

/// Outcome probabilities over every `input.photons()`-photon output pattern.
pub(crate) fn transfer_entries(
    transfer: &ComplexMatrix,
    input: &FockState,
    kind: Kind,
    opts: &SimOptions,
) -> Result<Vec<(FockState, f64)>> {
    let n = input.photons();
    let rows = transfer.rows();
    check_cap(rows, n, opts)?;
    let outputs = enumerate_fock_states(rows, n);
    match kind {
        Kind::Uniform => {
            let w = 1.0 / outputs.len() as f64;
            Ok(outputs.into_iter().map(|s| (s, w)).collect())
        }
        Kind::Quantum | Kind::Distinguishable => {
            let all_rows = ModeMultiset::new((0..rows).collect());
            let columns = submatrix_multiset(transfer, &all_rows, &input.multiset())?;
            outputs
                .into_par_iter()
                .map(|out| {
                    let a = submatrix_multiset(&columns, &out.multiset(), &ModeMultiset::new((0..n).collect()))?;
                    let p = probability_from_submatrix(&a, input, &out, kind)?;
                    Ok((out, p))
                })
                .collect()
        }
        Kind::Partial(p) => partial_entries(transfer, input, p, opts),
    }
}

/// Each photon independently sits in a shared internal mode with
/// probability `sqrt(p)` and in a private orthogonal one otherwise, so any
/// pair overlaps with probability `p`. Photons in the shared mode interfere;
/// the others are routed classically.
fn partial_entries(
    transfer: &ComplexMatrix,
    input: &FockState,
    p: f64,
    opts: &SimOptions,
) -> Result<Vec<(FockState, f64)>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Argument(format!("indistinguishability {p} outside [0, 1]")));
    }
    let q = p.sqrt();
    let rows = transfer.rows();
    let n = input.photons();
    let mut acc: HashMap<FockState, f64> = enumerate_fock_states(rows, n).into_iter().map(|s| (s, 0.0)).collect();

    for shared in sub_occupations(input.occupations()) {
        let mut weight = 1.0;
        for (&k, &total) in shared.iter().zip(input.occupations()) {
            weight *= binomial(total, k) * q.powi(k as i32) * (1.0 - q).powi((total - k) as i32);
        }
        if weight == 0.0 {
            continue;
        }
        let shared = FockState::new(shared);
        let rest = FockState::new(
            input
                .occupations()
                .iter()
                .zip(shared.occupations())
                .map(|(a, b)| a - b)
                .collect(),
        );
        let interfering = transfer_entries(transfer, &shared, Kind::Quantum, opts)?;
        let classical = transfer_entries(transfer, &rest, Kind::Distinguishable, opts)?;
        for (a, pa) in &interfering {
            if *pa == 0.0 {
                continue;
            }
            for (b, pb) in &classical {
                if *pb != 0.0 {
                    *acc.get_mut(&a.add(b)).expect("photon number conserved") += weight * pa * pb;
                }
            }
        }
    }
    Ok(canonical_entries(acc))
}

/// Every occupation vector bounded componentwise by `occ`.
pub(crate) fn sub_occupations(occ: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::with_capacity(occ.len())];
    for &n in occ {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=n).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (1..=k).fold(1.0, |acc, i| acc * f64::from(n - k + i) / f64::from(i))
}

fn transfer_for(
    spec: &InterferometerSpec,
    iterations: usize,
    feedback: Feedback,
    phases: &[f64],
) -> Result<ComplexMatrix> {
    let blocks = apply_feedback_phases(&partition_unitary(spec)?, phases)?;
    match feedback {
        Feedback::Looped => build_extended_matrix(&blocks, iterations),
        Feedback::Unlooped => build_unlooped_matrix(&blocks, iterations),
    }
}

fn meta_for(spec: &InterferometerSpec, iterations: usize, kind: Kind, feedback: Feedback) -> DistributionMeta {
    let modes = output_layout(spec.external_modes(), spec.loops(), iterations, feedback);
    DistributionMeta::new(kind, feedback, iterations, modes)
}

/// Draws `draws` phase vectors uniform on `[0, 2pi)^loops`.
pub fn random_phases(loops: usize, draws: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..draws)
        .map(|_| (0..loops).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect())
        .collect()
}

/// Entries for an explicit input, either at the spec's phases or averaged
/// over `phase_average = (draws, seed)`.
pub(crate) fn entries_for_input(
    spec: &InterferometerSpec,
    iterations: usize,
    kind: Kind,
    feedback: Feedback,
    input: &FockState,
    phase_average: Option<(usize, u64)>,
    opts: &SimOptions,
) -> Result<Vec<(FockState, f64)>> {
    match phase_average {
        None => {
            let transfer = transfer_for(spec, iterations, feedback, spec.feedback_phases())?;
            transfer_entries(&transfer, input, kind, opts)
        }
        Some((draws, seed)) => {
            let (mean, _) = averaged_entries(spec, iterations, kind, feedback, input, draws, seed, opts)?;
            Ok(mean)
        }
    }
}

type Entries = Vec<(FockState, f64)>;

#[allow(clippy::too_many_arguments)]
fn averaged_entries(
    spec: &InterferometerSpec,
    iterations: usize,
    kind: Kind,
    feedback: Feedback,
    input: &FockState,
    draws: usize,
    seed: u64,
    opts: &SimOptions,
) -> Result<(Entries, Vec<f64>)> {
    if draws == 0 {
        return Err(Error::Count("phase averaging needs at least one draw".into()));
    }
    let runs: Vec<Vec<(FockState, f64)>> = random_phases(spec.loops(), draws, seed)
        .into_par_iter()
        .map(|phases| {
            let transfer = transfer_for(spec, iterations, feedback, &phases)?;
            transfer_entries(&transfer, input, kind, opts)
        })
        .collect::<Result<_>>()?;
    let k = draws as f64;
    let outcomes = runs[0].len();
    let mut mean = runs[0].clone();
    let mut std_err = vec![0.0; outcomes];
    for (i, slot) in mean.iter_mut().enumerate() {
        let m = runs.iter().map(|r| r[i].1).sum::<f64>() / k;
        if draws > 1 {
            let var = runs.iter().map(|r| (r[i].1 - m).powi(2)).sum::<f64>() / (k - 1.0);
            std_err[i] = (var / k).sqrt();
        }
        slot.1 = m;
    }
    Ok((mean, std_err))
}

/// Lossless distribution of the device under any photon model and feedback
/// setting, over every spatio-temporal output mode.
pub fn model_distribution(
    spec: &InterferometerSpec,
    iterations: usize,
    kind: Kind,
    feedback: Feedback,
    opts: &SimOptions,
) -> Result<Distribution> {
    let input = spec.schedule_input(iterations)?;
    let entries = entries_for_input(spec, iterations, kind, feedback, &input, None, opts)?;
    Distribution::new(entries, meta_for(spec, iterations, kind, feedback))
}

/// Distribution of the looped device over `(M-L)T + L` output modes,
/// the final looped outputs included.
pub fn full_distribution(spec: &InterferometerSpec, iterations: usize, kind: Kind) -> Result<Distribution> {
    model_distribution(spec, iterations, kind, Feedback::Looped, &SimOptions::default())
}

/// Looped device with partially distinguishable photons; `p = 1` is the
/// quantum model and `p = 0` the distinguishable one.
pub fn mix_distinguishability(spec: &InterferometerSpec, iterations: usize, p: f64) -> Result<Distribution> {
    model_distribution(
        spec,
        iterations,
        Kind::Partial(p),
        Feedback::Looped,
        &SimOptions::default(),
    )
}

/// Monte-Carlo phase average with its per-outcome standard error.
#[derive(Clone, Debug)]
pub struct PhaseAverage {
    pub distribution: Distribution,
    /// Standard error of each entry of `distribution`, in the same order.
    pub std_err: Vec<f64>,
}

/// Averages the looped distribution over `draws` uniformly random sets of
/// feedback phases.
pub fn phase_average(
    spec: &InterferometerSpec,
    iterations: usize,
    draws: usize,
    seed: u64,
    kind: Kind,
) -> Result<PhaseAverage> {
    phase_average_with(
        spec,
        iterations,
        draws,
        seed,
        kind,
        Feedback::Looped,
        &SimOptions::default(),
    )
}

pub fn phase_average_with(
    spec: &InterferometerSpec,
    iterations: usize,
    draws: usize,
    seed: u64,
    kind: Kind,
    feedback: Feedback,
    opts: &SimOptions,
) -> Result<PhaseAverage> {
    let input = spec.schedule_input(iterations)?;
    let (entries, std_err) = averaged_entries(spec, iterations, kind, feedback, &input, draws, seed, opts)?;
    let mut meta = meta_for(spec, iterations, kind, feedback);
    meta.phase_average = Some((draws, seed));
    Ok(PhaseAverage {
        distribution: Distribution::new(entries, meta)?,
        std_err,
    })
}
