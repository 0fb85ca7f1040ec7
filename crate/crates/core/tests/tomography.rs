use num_complex::Complex64;
use proptest::prelude::*;

use loopsampler::linalg::{matrix_fidelity, random_unitary};
use loopsampler::tomography::{
    evaluate_reconstruction, hom_visibility, reconstruct, synthesize_measurements, GradientMode, ReconstructionConfig,
    ReconstructionResult, SynthOptions,
};
use loopsampler::ComplexMatrix;

fn as_result(u: ComplexMatrix) -> ReconstructionResult {
    let m = u.rows();
    ReconstructionResult {
        unitary_estimate: u,
        input_loss: vec![1.0; m],
        output_loss: vec![1.0; m],
        visibility_scale: None,
        objective: 0.0,
        iterations: 0,
        converged: true,
        best_restart: 0,
        visibility_mae: 0.0,
        moduli_fidelity: 1.0,
        fidelity_vs_truth: None,
    }
}

fn phases(m: usize, seed: u64) -> ComplexMatrix {
    let mut x = seed as f64;
    ComplexMatrix::from_fn(m, m, |r, c| {
        x = (x * 1.618 + 0.7) % std::f64::consts::TAU;
        if r == c {
            Complex64::from_polar(1.0, x)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn visibility_symmetric_in_pairs(seed in any::<u64>(), idx in prop::array::uniform4(0usize..5)) {
        let [i, j, k, l] = idx;
        prop_assume!(i != j && k != l);
        let u = random_unitary(5, seed).unwrap();
        let v = hom_visibility(&u, i, j, k, l).unwrap();
        prop_assert!((v - hom_visibility(&u, j, i, k, l).unwrap()).abs() < 1e-12);
        prop_assert!((v - hom_visibility(&u, i, j, l, k).unwrap()).abs() < 1e-12);
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&v));
    }

    #[test]
    fn evaluation_ignores_mode_phases(seed in any::<u64>(), left in any::<u64>(), right in any::<u64>()) {
        let u = random_unitary(6, seed).unwrap();
        let v = phases(6, left).matmul(&u).unwrap().matmul(&phases(6, right)).unwrap();
        let m = evaluate_reconstruction(&as_result(v), &u, None).unwrap();
        let base = evaluate_reconstruction(&as_result(u.clone()), &u, None).unwrap().moduli_fidelity;
        // |e^{i phi} z| may differ from |z| in the last bit
        prop_assert!((m.moduli_fidelity - base).abs() < 1e-14);
        prop_assert!((m.complex_fidelity - 1.0).abs() < 1e-12);
        prop_assert!(m.visibility_error < 1e-12);
    }
}

#[test]
fn unrelated_unitaries_score_low() {
    let (m, n) = (8usize, 300u64);
    let (mut raw, mut fixed) = (Vec::new(), Vec::new());
    for s in 0..n {
        let a = random_unitary(m, s).unwrap();
        let b = random_unitary(m, 50_000 + s).unwrap();
        raw.push(matrix_fidelity(&a, &b).unwrap());
        fixed.push(
            evaluate_reconstruction(&as_result(b), &a, None)
                .unwrap()
                .complex_fidelity,
        );
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let se = |v: &[f64]| {
        let mu = mean(v);
        (v.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (v.len() * (v.len() - 1)) as f64).sqrt()
    };
    // E|Tr(A^H B)|^2 = 1 for independent Haar matrices, so the raw overlap is 1/M^2
    let expected = 1.0 / (m * m) as f64;
    assert!(
        (mean(&raw) - expected).abs() < 4.0 * se(&raw),
        "{} vs {expected}",
        mean(&raw)
    );
    // gauge fixing aligns the first row and column, which lifts it toward 1/M
    assert!(
        mean(&fixed) > expected && mean(&fixed) < 1.0 / m as f64,
        "{}",
        mean(&fixed)
    );
}

#[test]
fn identity_is_recovered_up_to_phases() {
    let u = ComplexMatrix::identity(4);
    let data = synthesize_measurements(&u, &SynthOptions::lossless(4, 6, 0.0, 0)).unwrap();
    let result = reconstruct(
        &data,
        &ReconstructionConfig {
            restarts: 4,
            ..Default::default()
        },
    )
    .unwrap();
    let est = &result.unitary_estimate;
    // the data are intensities, so compare |u|^2
    for r in 0..4 {
        for c in 0..4 {
            let want = if r == c { 1.0 } else { 0.0 };
            assert!((est[(r, c)].norm_sqr() - want).abs() < 1e-6, "{r},{c}: {}", est[(r, c)]);
        }
    }
    assert!(evaluate_reconstruction(&result, &u, None).unwrap().moduli_fidelity > 1.0 - 1e-5);
}

#[test]
fn error_grows_with_noise() {
    let sigmas = [0.0, 0.01, 0.05, 0.1];
    let config = ReconstructionConfig {
        restarts: 4,
        ..Default::default()
    };
    let mut errors = vec![0.0; sigmas.len()];
    for seed in 0..3u64 {
        let u = random_unitary(5, 70 + seed).unwrap();
        for (slot, &sigma) in errors.iter_mut().zip(&sigmas) {
            let data = synthesize_measurements(&u, &SynthOptions::lossless(5, 10, sigma, seed)).unwrap();
            let result = reconstruct(&data, &config).unwrap();
            *slot += evaluate_reconstruction(&result, &u, None).unwrap().visibility_error;
        }
    }
    assert!(errors.windows(2).all(|w| w[0] <= w[1]), "{errors:?}");
    assert!(errors[0] < 1e-4 && errors[3] > 10.0 * errors[1], "{errors:?}");
}

#[test]
fn losses_and_imperfect_visibility_are_fitted() {
    let u = random_unitary(4, 12).unwrap();
    let synth = SynthOptions {
        input_loss: vec![0.9, 0.5, 0.7, 1.0],
        output_loss: vec![1.0, 0.6, 0.8, 0.75],
        indistinguishability: 0.9,
        ..SynthOptions::lossless(4, 6, 0.0, 3)
    };
    let data = synthesize_measurements(&u, &synth).unwrap();
    let config = ReconstructionConfig {
        fit_visibility_scale: true,
        ..Default::default()
    };
    let result = reconstruct(&data, &config).unwrap();
    assert!(
        (result.visibility_scale.unwrap() - 0.9).abs() < 1e-3,
        "{:?}",
        result.visibility_scale
    );
    for (got, want) in result.output_loss.iter().zip(&synth.output_loss) {
        assert!((got - want).abs() < 1e-3, "{:?}", result.output_loss);
    }
    for (got, want) in result.input_loss.iter().zip(&synth.input_loss) {
        assert!((got - want).abs() < 1e-3, "{:?}", result.input_loss);
    }
    assert!(evaluate_reconstruction(&result, &u, None).unwrap().moduli_fidelity > 0.9999);
}

#[test]
fn finite_difference_mode_also_converges() {
    let u = random_unitary(3, 4).unwrap();
    let data = synthesize_measurements(&u, &SynthOptions::lossless(3, 3, 0.0, 1)).unwrap();
    let config = ReconstructionConfig {
        gradient: GradientMode::FiniteDifference,
        restarts: 3,
        ..Default::default()
    };
    let result = reconstruct(&data, &config).unwrap();
    assert!(evaluate_reconstruction(&result, &u, None).unwrap().moduli_fidelity > 0.999);
}

#[test]
fn restarts_are_reproducible() {
    let u = random_unitary(4, 6).unwrap();
    let data = synthesize_measurements(&u, &SynthOptions::lossless(4, 6, 0.03, 2)).unwrap();
    let config = ReconstructionConfig {
        restarts: 3,
        seed: 9,
        ..Default::default()
    };
    let a = reconstruct(&data, &config).unwrap();
    let b = reconstruct(&data, &config).unwrap();
    assert_eq!(a.unitary_estimate, b.unitary_estimate);
    assert_eq!(a.objective, b.objective);
}
