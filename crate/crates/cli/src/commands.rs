use std::path::{Path, PathBuf};

use loopsampler::config::{load_device, Device};
use loopsampler::fock::{
    apply_loss_with, draw_samples, mix_distinguishability, model_distribution, phase_average_with, write_distribution,
    write_samples, Distribution, SimOptions, DEFAULT_OUTCOME_CAP,
};
use loopsampler::linalg::{random_unitary, read_matrix, write_matrix};
use loopsampler::tomography::{
    evaluate_reconstruction, heldout_measurements, read_tomography_data, reconstruct, synthesize_measurements,
    write_result, write_tomography_data, ReconstructionConfig, SynthOptions,
};
use loopsampler::validation::{
    confidence_bands, first_crossing, standard_validators, write_trajectory, ValidatorOptions,
};
use loopsampler::{EffectiveSize, Error, Feedback, Kind, Result};

use crate::provenance::Provenance;
use crate::{Common, SampleArgs, TomoArgs, ValidateArgs};

fn setup(common: &Common) -> Result<()> {
    if let Some(n) = common.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    std::fs::create_dir_all(&common.out).map_err(|e| Error::io(&common.out, e))
}

fn device(common: &Common) -> Result<(Device, PathBuf)> {
    let path = common
        .spec
        .clone()
        .ok_or_else(|| Error::Argument("--spec is required for this command".into()))?;
    Ok((load_device(&path, &common.overrides)?, path))
}

fn sim_options(common: &Common) -> SimOptions {
    SimOptions {
        cap: common.cap.unwrap_or(DEFAULT_OUTCOME_CAP),
    }
}

fn size_of(dev: &Device) -> EffectiveSize {
    let photons = dev.spec.injection().iter().map(|s| s.photons()).sum();
    EffectiveSize::from_total(photons, dev.spec.modes(), dev.spec.loops(), dev.iterations)
}

fn size_line(size: &EffectiveSize) -> String {
    format!(
        "{} photons / {} modes / \u{2248}{:.1} qubits",
        size.photons, size.modes, size.qubit_equivalent
    )
}

fn stamp(mut dist: Distribution, prov: &Provenance) -> Distribution {
    for (k, v) in &prov.pairs {
        dist.meta_mut().set_tag(k.as_str(), v.as_str());
    }
    dist
}

fn emit(out: &Path, name: &str, dist: Distribution, prov: &Provenance) -> Result<()> {
    let path = out.join(format!("{name}.dist"));
    write_distribution(&path, &stamp(dist, prov))?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn simulate(common: &Common, argv: &[String]) -> Result<u8> {
    setup(common)?;
    let (dev, path) = device(common)?;
    let prov = Provenance::new(argv, common.seed, Some(&path), &common.overrides)?;
    let (spec, t, opts) = (&dev.spec, dev.iterations, sim_options(common));
    println!("effective size: {}", size_line(&size_of(&dev)));

    let quantum = model_distribution(spec, t, Kind::Quantum, Feedback::Looped, &opts)?;
    let distinguishable = model_distribution(spec, t, Kind::Distinguishable, Feedback::Looped, &opts)?.detected()?;
    let detected = quantum.detected()?;
    let mut meta = detected.meta().clone();
    meta.kind = Kind::Uniform;
    let uniform = Distribution::uniform(detected.entries().iter().map(|(s, _)| s.clone()).collect(), meta)?;

    if t > 1 {
        for it in 1..=t {
            emit(
                &common.out,
                &format!("quantum-iter{it}"),
                quantum.iteration_marginal(it)?,
                &prov,
            )?;
        }
    }
    if !spec.loss().is_lossless() {
        emit(
            &common.out,
            "quantum-lossy",
            apply_loss_with(&quantum, spec.loss(), spec, &opts)?.detected()?,
            &prov,
        )?;
    }
    let p = spec.source().indistinguishability();
    if p < 1.0 {
        emit(
            &common.out,
            "partial",
            mix_distinguishability(spec, t, p)?.detected()?,
            &prov,
        )?;
    }
    if spec.loops() > 0 {
        for kind in [Kind::Quantum, Kind::Distinguishable] {
            let d = model_distribution(spec, t, kind, Feedback::Unlooped, &opts)?.detected()?;
            emit(&common.out, &format!("{kind}-unlooped"), d, &prov)?;
        }
        if dev.random_phases {
            let avg = phase_average_with(
                spec,
                t,
                common.phase_samples,
                common.seed,
                Kind::Quantum,
                Feedback::Looped,
                &opts,
            )?;
            emit(&common.out, "quantum-averaged", avg.distribution.detected()?, &prov)?;
        }
    }
    emit(&common.out, "quantum", detected, &prov)?;
    emit(&common.out, "distinguishable", distinguishable, &prov)?;
    emit(&common.out, "uniform", uniform, &prov)?;
    Ok(0)
}

pub fn sample(args: &SampleArgs, argv: &[String]) -> Result<u8> {
    let common = &args.common;
    setup(common)?;
    let (dev, path) = device(common)?;
    let prov = Provenance::new(argv, common.seed, Some(&path), &common.overrides)?;
    let (spec, t, opts) = (&dev.spec, dev.iterations, sim_options(common));
    let dist = match args.kind.as_str() {
        "quantum" => model_distribution(spec, t, Kind::Quantum, args.feedback, &opts)?,
        "distinguishable" => model_distribution(spec, t, Kind::Distinguishable, args.feedback, &opts)?,
        "partial" => model_distribution(
            spec,
            t,
            Kind::Partial(spec.source().indistinguishability()),
            args.feedback,
            &opts,
        )?,
        "uniform" => {
            let q = model_distribution(spec, t, Kind::Quantum, args.feedback, &opts)?.detected()?;
            let mut meta = q.meta().clone();
            meta.kind = Kind::Uniform;
            Distribution::uniform(q.entries().iter().map(|(s, _)| s.clone()).collect(), meta)?
        }
        other => return Err(Error::Argument(format!("unknown kind `{other}`"))),
    };
    let dist = stamp(dist.detected()?, &prov);
    let set = draw_samples(&dist, args.samples, common.seed)?;
    let path = common.out.join(format!("{}-{}.samples", args.kind, args.feedback));
    write_samples(&path, &set)?;
    println!("wrote {} ({} samples)", path.display(), set.len());
    Ok(0)
}

pub fn validate(args: &ValidateArgs, argv: &[String]) -> Result<u8> {
    let common = &args.common;
    setup(common)?;
    let (dev, path) = device(common)?;
    let prov = Provenance::new(argv, common.seed, Some(&path), &common.overrides)?;
    let opts = ValidatorOptions {
        phase_samples: common.phase_samples,
        seed: common.seed,
        selection: args.selection,
        feedback_selection: args.feedback_selection,
        lossy: args.lossy,
        sim: sim_options(common),
    };
    let pairs = standard_validators(&dev.spec, dev.iterations, &opts)?;
    for (n, pair) in pairs.iter().enumerate() {
        let (a, b) = pair.labels();
        if pair.is_degenerate() {
            eprintln!(
                "warning: `{}` hypotheses are indistinguishable; the trajectory stays at 0.5",
                pair.name()
            );
        }
        let traj = confidence_bands(
            pair,
            pair.dist_a(),
            args.sets,
            args.set_size,
            args.level,
            common.seed.wrapping_add(n as u64),
        )?;
        let mut header = prov.pairs.clone();
        header.push(("pair".into(), format!("{a} vs {b}")));
        header.push(("truth".into(), a.to_string()));
        let out = common.out.join(format!("{}.traj", pair.name()));
        write_trajectory(&out, &traj, &header)?;
        let median = &traj.bands.as_ref().expect("bands requested").median;
        match first_crossing(median, 0.99) {
            Some(k) => println!(
                "{}: median P({a}) > 0.99 after {k} samples ({})",
                pair.name(),
                out.display()
            ),
            None => println!(
                "{}: median P({a}) stays <= 0.99 over {} samples ({})",
                pair.name(),
                args.set_size,
                out.display()
            ),
        }
    }
    Ok(0)
}

pub fn tomo(args: &TomoArgs, argv: &[String]) -> Result<u8> {
    let common = &args.common;
    setup(common)?;
    let prov = Provenance::new(argv, common.seed, None, &[])?;
    let config = ReconstructionConfig {
        restarts: args.restarts,
        max_iterations: args.max_iterations,
        lambda: args.lambda,
        gradient: args.gradient,
        fit_visibility_scale: args.fit_scale,
        seed: common.seed,
        ..Default::default()
    };

    let truth = match (&args.truth, args.synthetic) {
        (Some(p), _) => Some(read_matrix(p)?),
        (None, Some(m)) => Some(random_unitary(m, common.seed)?),
        (None, None) => None,
    };
    let (data, truth) = match (truth, &args.moduli, &args.visibilities) {
        (Some(u), _, _) => {
            let m = u.rows();
            let synth = SynthOptions {
                pair_budget: args.pair_budget.unwrap_or(2 * m),
                indistinguishability: args.indistinguishability,
                ..SynthOptions::lossless(m, 0, args.noise, common.seed)
            };
            let data = synthesize_measurements(&u, &synth)?;
            write_tomography_data(
                common.out.join("tomo-moduli.txt"),
                common.out.join("tomo-visibilities.csv"),
                &data,
            )?;
            write_matrix(common.out.join("tomo-truth.txt"), &u, &prov.comment_lines())?;
            (data, Some(u))
        }
        (None, Some(mp), Some(vp)) => (read_tomography_data(mp, vp)?, None),
        _ => {
            return Err(Error::Argument(
                "tomo needs --truth FILE or --synthetic M, or --moduli FILE with --visibilities FILE".into(),
            ))
        }
    };

    println!(
        "tomography: {} modes, {} visibility records, {} restarts",
        data.modes(),
        data.visibilities().len(),
        config.restarts
    );
    let mut result = reconstruct(&data, &config)?;
    let mut extra = prov.comment_lines();
    if let Some(u) = &truth {
        let held = heldout_measurements(u, &data, args.noise, common.seed.wrapping_add(1))?;
        let metrics = evaluate_reconstruction(&result, u, Some(&held))?;
        result.fidelity_vs_truth = Some(metrics.moduli_fidelity);
        println!("fidelity vs truth (moduli): {:.6}", metrics.moduli_fidelity);
        println!("fidelity vs truth (gauge-fixed): {:.6}", metrics.complex_fidelity);
        println!("visibility error vs truth: {:.4}", metrics.visibility_error);
        extra.push(format!("complex_fidelity={:.17e}", metrics.complex_fidelity));
        extra.push(format!("visibility_error={:.17e}", metrics.visibility_error));
        if let Some(mae) = metrics.heldout_visibility_mae {
            println!(
                "held-out visibility MAE: {mae:.4} over {} records",
                metrics.heldout_records
            );
            extra.push(format!("heldout_visibility_mae={mae:.17e}"));
        }
    }
    println!("visibility MAE (fit): {:.4}", result.visibility_mae);
    println!("moduli fidelity (measured vs predicted): {:.6}", result.moduli_fidelity);
    let out = common.out.join("reconstruction.txt");
    write_result(&out, &result, &extra)?;
    println!("wrote {}", out.display());
    if !result.converged {
        eprintln!("warning: optimizer stopped at the iteration limit; best-so-far reported");
        return Ok(3);
    }
    Ok(0)
}

pub fn info(common: &Common) -> Result<u8> {
    let (dev, _) = device(common)?;
    let size = size_of(&dev);
    let cap = common.cap.unwrap_or(DEFAULT_OUTCOME_CAP);
    println!(
        "device: {} modes, {} loops, {} iterations, phases {}",
        dev.spec.modes(),
        dev.spec.loops(),
        dev.iterations,
        if dev.random_phases { "random" } else { "fixed" }
    );
    println!("effective size: {}", size_line(&size));
    let count = size.outcome_count();
    if count > cap {
        println!("outcome count {count} exceeds cap {cap}: enumeration refused");
    } else {
        println!("outcome count {count} (cap {cap})");
    }
    Ok(0)
}
