use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Haar-random unitary of dimension `dim`, deterministic in `seed`.
///
/// Columns of a complex Ginibre matrix are orthonormalized by Gram-Schmidt,
/// which is the QR factorization with a positive-real diagonal in R.
pub fn random_unitary(dim: usize, seed: u64) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::Dimension("random unitary of dimension 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re * scale, im * scale)
                })
                .collect()
        })
        .collect();

    for j in 0..dim {
        let (done, rest) = cols.split_at_mut(j);
        let v = &mut rest[0];
        // two passes keep the loss of orthogonality at machine precision
        for _ in 0..2 {
            for q in done.iter() {
                let proj: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for (x, a) in v.iter_mut().zip(q) {
                    *x -= proj * a;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Degenerate("rank-deficient Gaussian draw".into()));
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    Ok(ComplexMatrix::from_fn(dim, dim, |r, c| cols[c][r]))
}

/// Result of an orthonormal-columns check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsometryCheck {
    pub is_isometry: bool,
    /// Largest entry of `|m^dagger m - I|`.
    pub deviation: f64,
}

/// Checks that `m` has orthonormal columns to within `tol`.
pub fn check_isometry(m: &ComplexMatrix, tol: f64) -> Result<IsometryCheck> {
    if m.rows() < m.cols() {
        return Err(Error::Shape(format!(
            "isometry check needs rows >= cols, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let gram = m.adjoint().matmul(m)?;
    let deviation = gram.max_abs_diff(&ComplexMatrix::identity(m.cols()))?;
    Ok(IsometryCheck {
        is_isometry: deviation <= tol,
        deviation,
    })
}

/// Normalized overlap `|Tr(a^dagger b)|^2 / (Tr(a^dagger a) Tr(b^dagger b))`.
pub fn matrix_fidelity(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension(format!(
            "fidelity of {:?} and {:?} matrices",
            a.shape(),
            b.shape()
        )));
    }
    let overlap: Complex64 = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x.conj() * y).sum();
    let denom = a.frobenius_norm_sqr() * b.frobenius_norm_sqr();
    if denom == 0.0 {
        return Err(Error::Degenerate("fidelity with an all-zero matrix".into()));
    }
    Ok((overlap.norm_sqr() / denom).min(1.0))
}
