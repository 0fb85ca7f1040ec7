//! Matrix permanent kernels.
//!
//! Small matrices go through direct expansion over permutations; from
//! [`RYSER_MIN_DIM`] upward Ryser's inclusion-exclusion formula is used with
//! Gray-code ordered subsets, so each step touches a single column and the
//! row sums update in O(n).

use num_complex::Complex64;
use rayon::prelude::*;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Smallest dimension evaluated with Ryser's formula.
pub const RYSER_MIN_DIM: usize = 6;

/// Dimension from which the Gray-code walk is split across threads.
const PARALLEL_MIN_DIM: usize = 16;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Permanent of a square matrix. The permanent of the 0x0 matrix is 1.
pub fn permanent(m: &ComplexMatrix) -> Result<Complex64> {
    check_square(m)?;
    if m.rows() < RYSER_MIN_DIM {
        Ok(naive_unchecked(m))
    } else {
        Ok(ryser_unchecked(m))
    }
}

/// Direct expansion over all n! permutations, O(n * n!).
pub fn permanent_naive(m: &ComplexMatrix) -> Result<Complex64> {
    check_square(m)?;
    Ok(naive_unchecked(m))
}

/// Ryser's formula with Gray-code column updates, O(2^n * n).
pub fn permanent_ryser(m: &ComplexMatrix) -> Result<Complex64> {
    check_square(m)?;
    Ok(ryser_unchecked(m))
}

fn check_square(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "permanent needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

fn naive_unchecked(m: &ComplexMatrix) -> Complex64 {
    let n = m.rows();
    match n {
        0 => return ONE,
        1 => return m[(0, 0)],
        2 => return m[(0, 0)] * m[(1, 1)] + m[(0, 1)] * m[(1, 0)],
        _ => {}
    }
    // Heap's algorithm; perm[i] is the column assigned to row i.
    let mut perm: Vec<usize> = (0..n).collect();
    let mut counters = vec![0usize; n];
    let product = |perm: &[usize]| -> Complex64 {
        perm.iter()
            .enumerate()
            .fold(ONE, |acc, (row, &col)| acc * m[(row, col)])
    };
    let mut total = product(&perm);
    let mut i = 1;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            total += product(&perm);
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    total
}

fn ryser_unchecked(m: &ComplexMatrix) -> Complex64 {
    let n = m.rows();
    if n == 0 {
        return ONE;
    }
    let subsets: u64 = 1u64 << n;
    let sum = if n >= PARALLEL_MIN_DIM {
        let segments = (rayon::current_num_threads() as u64 * 4).clamp(1, subsets - 1);
        let span = (subsets - 1).div_ceil(segments);
        (0..segments)
            .into_par_iter()
            .map(|s| {
                let start = 1 + s * span;
                let end = (start + span).min(subsets);
                ryser_segment(m, start, end)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .sum()
    } else {
        ryser_segment(m, 1, subsets)
    };
    if n % 2 == 1 {
        -sum
    } else {
        sum
    }
}

/// Sums the signed Ryser terms for Gray-code indices `start..end` (start >= 1).
fn ryser_segment(m: &ComplexMatrix, start: u64, end: u64) -> Complex64 {
    let n = m.rows();
    let mut row_sums = vec![ZERO; n];
    let mut code = gray(start - 1);
    for col in 0..n {
        if code >> col & 1 == 1 {
            for (r, s) in row_sums.iter_mut().enumerate() {
                *s += m[(r, col)];
            }
        }
    }
    let mut total = ZERO;
    for k in start..end {
        let col = k.trailing_zeros() as usize;
        code ^= 1 << col;
        if code >> col & 1 == 1 {
            for (r, s) in row_sums.iter_mut().enumerate() {
                *s += m[(r, col)];
            }
        } else {
            for (r, s) in row_sums.iter_mut().enumerate() {
                *s -= m[(r, col)];
            }
        }
        let prod = row_sums.iter().fold(ONE, |acc, &s| acc * s);
        if code.count_ones() % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    total
}

#[inline]
fn gray(k: u64) -> u64 {
    k ^ (k >> 1)
}
