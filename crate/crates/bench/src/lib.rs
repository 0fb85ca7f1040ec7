//! Fixtures shared by the benchmarks.

use loopsampler::fock::FockState;
use loopsampler::linalg::random_unitary;
use loopsampler::network::{partition_unitary, BlockPartition};
use loopsampler::{ComplexMatrix, InterferometerSpec};

pub fn square(n: usize, seed: u64) -> ComplexMatrix {
    random_unitary(n, seed).expect("n > 0")
}

/// `modes` ports, one loop, single photons in the first `photons` external
/// inputs on every iteration.
pub fn looped_device(modes: usize, photons: usize, iterations: usize) -> InterferometerSpec {
    let mut occ = vec![0u32; modes - 1];
    occ[..photons].iter_mut().for_each(|o| *o = 1);
    InterferometerSpec::new(square(modes, 11), 1)
        .and_then(|s| s.with_phases(vec![0.7]))
        .and_then(|s| s.with_injection(vec![FockState::new(occ); iterations]))
        .expect("valid device")
}

pub fn blocks(modes: usize, loops: usize) -> BlockPartition {
    let spec = InterferometerSpec::new(square(modes, 5), loops).expect("valid device");
    partition_unitary(&spec).expect("partition")
}
