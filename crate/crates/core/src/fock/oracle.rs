//! Permanent-free reference distribution.
//!
//! Each input creation operator is replaced by its image `sum_k t_kc b_k^dagger`
//! and the product is expanded term by term, so the amplitude of every output
//! configuration accumulates over all photon-path assignments. The
//! coefficient of `prod_k (b_k^dagger)^{n_k}` becomes a Fock amplitude after
//! multiplying by `sqrt(prod n_k! / prod m_c!)`.

use std::collections::HashMap;

use num_complex::Complex64;

use super::distribution::{canonical_entries, Distribution, DistributionMeta, Kind};
use super::state::{fock_space_dimension, FockState};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::network::{Feedback, SpatioTemporalMode};

/// Hard ceiling on the number of tracked amplitudes.
pub const ORACLE_CAP: u128 = 100_000;

/// Exact distribution of `input` through `transfer` without permanents.
///
/// Rows are labelled as detected modes of a single iteration; use
/// [`Distribution::with_meta`] to attach a device layout.
pub fn oracle_distribution(transfer: &ComplexMatrix, input: &FockState) -> Result<Distribution> {
    if input.modes() != transfer.cols() {
        return Err(Error::Dimension(format!(
            "input over {} modes for {} transfer columns",
            input.modes(),
            transfer.cols()
        )));
    }
    let rows = transfer.rows();
    let outcomes = fock_space_dimension(rows, input.photons());
    if outcomes > ORACLE_CAP {
        return Err(Error::Resource {
            outcomes,
            cap: ORACLE_CAP,
        });
    }

    let mut terms: HashMap<Vec<u32>, Complex64> = HashMap::new();
    terms.insert(vec![0; rows], Complex64::new(1.0, 0.0));
    for col in input.multiset().indices() {
        let mut next: HashMap<Vec<u32>, Complex64> = HashMap::with_capacity(terms.len() * rows);
        for (occ, amp) in &terms {
            for row in 0..rows {
                let t = transfer[(row, *col)];
                if t == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let mut o = occ.clone();
                o[row] += 1;
                *next.entry(o).or_insert(Complex64::new(0.0, 0.0)) += amp * t;
            }
        }
        terms = next;
    }

    let input_norm = input.factorial_product();
    let probs: HashMap<FockState, f64> = terms
        .into_iter()
        .map(|(occ, coeff)| {
            let state = FockState::new(occ);
            let p = coeff.norm_sqr() * state.factorial_product() / input_norm;
            (state, p)
        })
        .collect();
    let modes = (0..rows)
        .map(|mode| SpatioTemporalMode::External { iteration: 1, mode })
        .collect();
    Distribution::new(
        canonical_entries(probs),
        DistributionMeta::new(Kind::Quantum, Feedback::Looped, 1, modes),
    )
}
