//! End-to-end acceptance checks. Runs without the libtest harness so the
//! per-criterion lines are always printed; exits non-zero if any fails.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use loopsampler::fock::{
    apply_loss, full_distribution, mix_distinguishability, model_distribution, oracle_distribution, phase_average,
    total_variation, Distribution, FockState, Kind, LossModel, SimOptions,
};
use loopsampler::linalg::{check_isometry, permanent_naive, permanent_ryser, random_unitary};
use loopsampler::network::{build_extended_matrix, build_total_matrix, EffectiveSize, Feedback, InterferometerSpec};
use loopsampler::tomography::{
    evaluate_reconstruction, heldout_measurements, reconstruct, synthesize_measurements, Objective,
    ReconstructionConfig, SynthOptions,
};
use loopsampler::validation::{confidence_bands, first_crossing, standard_validators, ValidatorOptions};
use loopsampler::{ComplexMatrix, Result};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

/// Random device: `modes` ports, `loops` of them looped, random phases and
/// a random injection schedule of at most `max_photons` photons in total.
fn random_spec(
    rng: &mut ChaCha8Rng,
    modes: usize,
    loops: usize,
    iterations: usize,
    max_photons: usize,
) -> Result<InterferometerSpec> {
    let ext = modes - loops;
    let mut schedule = vec![vec![0u32; ext]; iterations];
    let photons = rng.gen_range(1..=max_photons);
    for _ in 0..photons {
        schedule[rng.gen_range(0..iterations)][rng.gen_range(0..ext)] += 1;
    }
    let phases = (0..loops).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    InterferometerSpec::new(random_unitary(modes, rng.gen())?, loops)?
        .with_phases(phases)?
        .with_injection(schedule.into_iter().map(FockState::new).collect())
}

fn block_structure() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut zeros_exact = true;
    for _ in 0..50 {
        let m = rng.gen_range(2..=8);
        let l = rng.gen_range(1..m);
        let blocks = random_spec(&mut rng, m, l, 1, 1)?.phased_blocks()?;
        let e = m - l;
        let total = build_total_matrix(&blocks, 3)?;
        let lag1 = blocks.u_el.matmul(&blocks.u_le)?;
        let lag2 = blocks.u_el.matmul(&blocks.u_ll)?.matmul(&blocks.u_le)?;
        for t in 0..3 {
            for tp in 0..3 {
                let got = total.block(t * e, tp * e, e, e)?;
                match t as isize - tp as isize {
                    0 => worst = worst.max(got.max_abs_diff(&blocks.u_ee)?),
                    1 => worst = worst.max(got.max_abs_diff(&lag1)?),
                    2 => worst = worst.max(got.max_abs_diff(&lag2)?),
                    _ => zeros_exact &= got.as_slice().iter().all(|z| *z == Complex64::new(0.0, 0.0)),
                }
            }
        }
    }
    outcome(
        zeros_exact && worst <= 1e-12,
        format!("50 specs, upper blocks exactly zero: {zeros_exact}, max deviation {worst:.1e}"),
    )
}

fn isometry() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut all = true;
    for _ in 0..100 {
        let m = rng.gen_range(2..=8);
        let l = rng.gen_range(0..=3.min(m - 1));
        let t = rng.gen_range(1..=4);
        let blocks = random_spec(&mut rng, m, l, 1, 1)?.phased_blocks()?;
        let check = check_isometry(&build_extended_matrix(&blocks, t)?, 1e-10)?;
        all &= check.is_isometry;
        worst = worst.max(check.deviation);
    }
    outcome(all, format!("100 specs, max |U'^H U' - I| = {worst:.1e}"))
}

fn oracle_equivalence() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let m = rng.gen_range(2..=4);
        let l = rng.gen_range(0..=1);
        let t = rng.gen_range(1..=2);
        let spec = random_spec(&mut rng, m, l, t, 3)?;
        let exact = full_distribution(&spec, t, Kind::Quantum)?;
        let (transfer, _) = spec.transfer(t, Feedback::Looped)?;
        let oracle = oracle_distribution(&transfer, &spec.schedule_input(t)?)?;
        worst = worst.max(total_variation(&exact, &oracle));
    }
    outcome(worst <= 1e-9, format!("20 instances, max TV {worst:.1e}"))
}

fn normalization() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst_sum, mut worst_marg): (f64, f64) = (0.0, 0.0);
    let mut conserved = true;
    let mut count = 0;
    for _ in 0..20 {
        let m = rng.gen_range(2..=5);
        let l = rng.gen_range(0..=1.min(m - 1));
        let t = rng.gen_range(1..=3);
        let spec = random_spec(&mut rng, m, l, t, 3)?;
        let photons = spec.schedule_input(t)?.photons();
        let opts = SimOptions::default();
        let mut lossless: Vec<Distribution> = vec![
            full_distribution(&spec, t, Kind::Quantum)?,
            full_distribution(&spec, t, Kind::Distinguishable)?,
            mix_distinguishability(&spec, t, 0.6)?,
            model_distribution(&spec, t, Kind::Quantum, Feedback::Unlooped, &opts)?,
        ];
        if l > 0 {
            lossless.push(phase_average(&spec, t, 20, 0, Kind::Quantum)?.distribution);
        }
        let ext = m - l;
        let loss = LossModel::new(vec![0.8; ext], vec![0.9; ext], 0.7)?;
        let lossy = apply_loss(&lossless[0], &loss, &spec)?;
        for d in lossless.iter().chain(std::iter::once(&lossy)) {
            worst_sum = worst_sum.max((d.total() - 1.0).abs());
            worst_marg = worst_marg.max((d.detected()?.total() - 1.0).abs());
            for it in 1..=t {
                worst_marg = worst_marg.max((d.iteration_marginal(it)?.total() - 1.0).abs());
            }
            count += 1;
        }
        conserved &= lossless
            .iter()
            .all(|d| d.entries().iter().all(|(s, _)| s.photons() == photons));
    }
    outcome(
        worst_sum <= 1e-9 && worst_marg <= 1e-9 && conserved,
        format!(
            "{count} distributions, max |sum - 1| {worst_sum:.1e}, marginals {worst_marg:.1e}, photon number conserved: {conserved}"
        ),
    )
}

fn permanents() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for n in 1..=8 {
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 * n as u64 + seed);
            let m = ComplexMatrix::from_fn(n, n, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let (a, b) = (permanent_naive(&m)?, permanent_ryser(&m)?);
            worst = worst.max((a - b).norm() / a.norm().max(1e-300));
        }
    }
    let mut exact = true;
    let mut factorial: u64 = 1;
    for n in 1..=12usize {
        factorial *= n as u64;
        let p = permanent_ryser(&ComplexMatrix::from_fn(n, n, |_, _| Complex64::new(1.0, 0.0)))?;
        exact &= p.im == 0.0 && p.re.round() as u64 == factorial && (p.re - factorial as f64).abs() < 0.5;
    }
    outcome(
        worst <= 1e-10 && exact,
        format!("max relative naive/Ryser gap {worst:.1e}, perm(J_n) = n! for n <= 12: {exact}"),
    )
}

fn effective_size() -> Result<Outcome> {
    let size = EffectiveSize::from_total(10, 25, 5, 4);
    let pass = size.modes == 85 && (size.qubit_equivalent - 43.0).abs() <= 0.1;
    outcome(
        pass,
        format!("{} modes, {:.3} qubits", size.modes, size.qubit_equivalent),
    )
}

/// M=5 with one loop and two iterations.
fn desk_spec(unitary_seed: u64, injection: Vec<u32>) -> Result<InterferometerSpec> {
    InterferometerSpec::new(random_unitary(5, unitary_seed)?, 1)?.with_injection(vec![FockState::new(injection); 2])
}

fn feedback_discrimination() -> Result<Outcome> {
    let spec = desk_spec(0, vec![1, 0, 0, 0])?;
    let opts = ValidatorOptions::default();
    let pairs = standard_validators(&spec, 2, &opts)?;
    let pair = &pairs[3];
    let tv = total_variation(
        &pair.dist_a().iteration_marginal(2)?,
        &pair.dist_b().iteration_marginal(2)?,
    );
    let traj = confidence_bands(pair, pair.dist_a(), 1000, 200, 0.9, 7)?;
    let crossing = first_crossing(&traj.bands.as_ref().expect("bands").median, 0.99);

    let flat_pairs = standard_validators(&spec, 1, &opts)?;
    let flat = &flat_pairs[3];
    let flat_traj = confidence_bands(flat, flat.dist_a(), 1000, 200, 0.9, 8)?;
    let flat_dev = flat_traj
        .bands
        .as_ref()
        .expect("bands")
        .median
        .iter()
        .fold(0.0f64, |a, p| a.max((p - 0.5).abs()));
    outcome(
        tv > 1e-3 && crossing.is_some() && flat_dev < 1e-9,
        format!("iteration-2 TV {tv:.3}, median P(looped) > 0.99 after {crossing:?} samples, T=1 max |P - 0.5| {flat_dev:.1e}"),
    )
}

fn convergence_scale() -> Result<Outcome> {
    let spec = desk_spec(0, vec![1, 1, 0, 0])?;
    let pairs = standard_validators(&spec, 2, &ValidatorOptions::default())?;
    let crossing = |idx: usize, seed: u64| -> Result<Option<usize>> {
        let pair = &pairs[idx];
        let traj = confidence_bands(pair, pair.dist_a(), 1000, 300, 0.9, seed)?;
        Ok(first_crossing(&traj.bands.as_ref().expect("bands").median, 0.99))
    };
    let dist = crossing(0, 11)?;
    let unif = crossing(1, 12)?;
    let pass = matches!(dist, Some(k) if (10..100).contains(&k)) && matches!(unif, Some(k) if k <= 300);
    outcome(
        pass,
        format!("median crossing: vs distinguishable {dist:?}, vs uniform {unif:?} samples"),
    )
}

fn tomography() -> Result<Outcome> {
    let config = ReconstructionConfig::default();
    let u = random_unitary(8, 21)?;
    let clean = synthesize_measurements(&u, &SynthOptions::lossless(8, 16, 0.0, 21))?;
    let clean_fid = evaluate_reconstruction(&reconstruct(&clean, &config)?, &u, None)?.moduli_fidelity;

    let sigma = 0.05;
    let (mut abs_sum, mut records, mut train_sum) = (0.0, 0usize, 0.0);
    let mut min_fid = f64::INFINITY;
    let instances = 4u64;
    for seed in 0..instances {
        let u = random_unitary(8, 40 + seed)?;
        let data = synthesize_measurements(&u, &SynthOptions::lossless(8, 16, sigma, 40 + seed))?;
        let result = reconstruct(&data, &ReconstructionConfig { seed, ..config.clone() })?;
        let held = heldout_measurements(&u, &data, sigma, 1000 + seed)?;
        let metrics = evaluate_reconstruction(&result, &u, Some(&held))?;
        abs_sum += metrics.heldout_visibility_mae.unwrap_or(f64::NAN) * metrics.heldout_records as f64;
        records += metrics.heldout_records;
        train_sum += result.visibility_mae;
        min_fid = min_fid.min(result.moduli_fidelity).min(metrics.moduli_fidelity);
    }
    let mae = abs_sum / records as f64;
    let pass = clean_fid >= 0.999 && (0.8 * sigma..=1.3 * sigma).contains(&mae) && min_fid >= 0.98;
    outcome(
        pass,
        format!(
            "noiseless fidelity {clean_fid:.5}; sigma={sigma}: held-out MAE {mae:.4} ({:.2} sigma, {records} records), \
             training MAE {:.4}, min moduli fidelity {min_fid:.4}",
            mae / sigma,
            train_sum / instances as f64
        ),
    )
}

fn gradient_check() -> Result<Outcome> {
    let u = random_unitary(5, 3)?;
    let data = synthesize_measurements(&u, &SynthOptions::lossless(5, 6, 0.05, 3))?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for point in 0..20 {
        let obj = Objective::new(&data, 1.0, point % 2 == 1);
        let mut x: Vec<f64> = (0..obj.dimension()).map(|_| rng.gen_range(-1.5..1.5)).collect();
        if point % 2 == 1 {
            *x.last_mut().expect("scale parameter") = rng.gen_range(0.5..1.5);
        }
        let (_, g) = obj.value_and_gradient(&x);
        let fd = obj.finite_difference_gradient(&x, 1e-6);
        // components far below the gradient scale carry only rounding noise
        let floor = 1e-3 * g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for (a, b) in g.iter().zip(&fd) {
            worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(floor));
        }
    }
    outcome(worst <= 1e-5, format!("20 points, max relative deviation {worst:.1e}"))
}

type Check = fn() -> Result<Outcome>;

fn main() {
    let criteria: [(&str, Check, Duration); 10] = [
        ("block structure", block_structure, Duration::from_secs(1)),
        ("isometry", isometry, Duration::from_secs(5)),
        ("oracle equivalence", oracle_equivalence, Duration::from_secs(60)),
        ("normalization and conservation", normalization, Duration::MAX),
        ("permanent kernel", permanents, Duration::MAX),
        ("effective size", effective_size, Duration::from_secs(1)),
        (
            "feedback discrimination",
            feedback_discrimination,
            Duration::from_secs(120),
        ),
        (
            "validator convergence scale",
            convergence_scale,
            Duration::from_secs(300),
        ),
        ("tomography closed loop", tomography, Duration::from_secs(600)),
        ("gradient check", gradient_check, Duration::MAX),
    ];
    let mut failures = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && elapsed <= *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let timing = if *budget == Duration::MAX {
            format!("{:.2}s", elapsed.as_secs_f64())
        } else {
            format!("{:.2}s of {}s", elapsed.as_secs_f64(), budget.as_secs())
        };
        println!(
            "criterion {:>2} {:<31} {}  {detail} [{timing}]",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" }
        );
        failures += usize::from(!pass);
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
