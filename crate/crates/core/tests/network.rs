use num_complex::Complex64;
use proptest::prelude::*;

use loopsampler::linalg::{check_isometry, random_unitary};
use loopsampler::network::{
    apply_feedback_phases, build_extended_matrix, build_total_matrix, partition_unitary, rewire, BlockPartition,
    InterferometerSpec,
};

/// (modes, loops, iterations, unitary seed, phases)
fn device() -> impl Strategy<Value = (usize, usize, usize, u64, Vec<f64>)> {
    (2usize..=8, 1usize..=4, any::<u64>()).prop_flat_map(|(m, t, seed)| {
        (0..=3.min(m - 1)).prop_flat_map(move |l| {
            (
                Just(m),
                Just(l),
                Just(t),
                Just(seed),
                prop::collection::vec(0.0f64..std::f64::consts::TAU, l),
            )
        })
    })
}

fn blocks(m: usize, l: usize, seed: u64, phases: &[f64]) -> BlockPartition {
    let spec = InterferometerSpec::new(random_unitary(m, seed).unwrap(), l).unwrap();
    apply_feedback_phases(&partition_unitary(&spec).unwrap(), phases).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn total_is_block_lower_triangular_toeplitz((m, l, t, seed, phases) in device()) {
        let b = blocks(m, l, seed, &phases);
        let e = m - l;
        let total = build_total_matrix(&b, t).unwrap();
        for r in 0..t {
            for c in 0..t {
                let block = total.block(r * e, c * e, e, e).unwrap();
                if c > r {
                    prop_assert!(block.as_slice().iter().all(|z| *z == Complex64::new(0.0, 0.0)));
                } else {
                    let first = total.block((r - c) * e, 0, e, e).unwrap();
                    prop_assert_eq!(block, first);
                }
            }
        }
    }

    #[test]
    fn extended_is_isometry_containing_total((m, l, t, seed, phases) in device()) {
        let b = blocks(m, l, seed, &phases);
        let ext = build_extended_matrix(&b, t).unwrap();
        let check = check_isometry(&ext, 1e-10).unwrap();
        prop_assert!(check.is_isometry, "deviation {}", check.deviation);
        let e = m - l;
        prop_assert_eq!(ext.block(0, 0, e * t, e * t).unwrap(), build_total_matrix(&b, t).unwrap());
    }

    #[test]
    fn phases_leave_diagonal_blocks((m, l, t, seed, phases) in device()) {
        let e = m - l;
        let plain = build_total_matrix(&blocks(m, l, seed, &vec![0.0; l]), t).unwrap();
        let phased = build_total_matrix(&blocks(m, l, seed, &phases), t).unwrap();
        for r in 0..t {
            let a = plain.block(r * e, r * e, e, e).unwrap();
            prop_assert_eq!(a, phased.block(r * e, r * e, e, e).unwrap());
        }
    }

    // with one loop every lag block is a scalar phase times the unphased one;
    // with several loops the phases interfere and magnitudes do change
    #[test]
    fn single_loop_phases_leave_magnitudes(m in 2usize..=8, t in 1usize..=4, seed in any::<u64>(), phi in 0.0f64..std::f64::consts::TAU) {
        let plain = build_total_matrix(&blocks(m, 1, seed, &[0.0]), t).unwrap();
        let phased = build_total_matrix(&blocks(m, 1, seed, &[phi]), t).unwrap();
        prop_assert!(plain.abs().max_abs_diff(&phased.abs()).unwrap() < 1e-12);
    }
}

#[test]
fn rewire_moves_looped_ports_last() {
    let u = random_unitary(4, 9).unwrap();
    let order = [1, 3, 0, 2];
    let r = rewire(&u, &order, &order).unwrap();
    for a in 0..4 {
        for b in 0..4 {
            assert_eq!(r[(a, b)], u[(order[a], order[b])]);
        }
    }
    assert!(rewire(&u, &[0, 0, 1, 2], &order).is_err());
}

#[test]
fn spec_rejects_bad_loop_counts() {
    assert!(InterferometerSpec::new(random_unitary(3, 0).unwrap(), 3).is_err());
    let spec = InterferometerSpec::new(random_unitary(3, 0).unwrap(), 1).unwrap();
    assert!(spec.clone().with_phases(vec![0.1, 0.2]).is_err());
    assert_eq!(spec.external_modes(), 2);
}
