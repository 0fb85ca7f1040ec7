use super::data::VisibilityRecord;
use super::reconstruct::{gauge_fix, ReconstructionResult};
use super::visibility::VisibilityTerms;
use crate::error::{Error, Result};
use crate::linalg::{matrix_fidelity, ComplexMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReconstructionMetrics {
    /// Fidelity between `|u_est|` and `|u_true|`.
    pub moduli_fidelity: f64,
    /// Fidelity after gauge-fixing both matrices, maximized over complex
    /// conjugation of the estimate (which no visibility can detect).
    pub complex_fidelity: f64,
    /// Mean absolute difference between predicted and exact visibilities
    /// over every input and output pair.
    pub visibility_error: f64,
    /// Mean absolute residual against held-out measured visibilities.
    pub heldout_visibility_mae: Option<f64>,
    pub heldout_records: usize,
}

fn predicted(u: &ComplexMatrix, scale: f64, (i, j): (usize, usize), (k, l): (usize, usize)) -> Option<f64> {
    VisibilityTerms::new(u[(k, i)], u[(l, j)], u[(k, j)], u[(l, i)])
        .value()
        .map(|v| scale * v)
}

/// Compares a reconstruction with the ground truth and, when given, with
/// measurements withheld from the fit.
pub fn evaluate_reconstruction(
    result: &ReconstructionResult,
    u_true: &ComplexMatrix,
    heldout: Option<&[VisibilityRecord]>,
) -> Result<ReconstructionMetrics> {
    let est = &result.unitary_estimate;
    if est.shape() != u_true.shape() || !u_true.is_square() {
        return Err(Error::Dimension(format!(
            "estimate {:?} against truth {:?}",
            est.shape(),
            u_true.shape()
        )));
    }
    let moduli_fidelity = matrix_fidelity(&est.abs(), &u_true.abs())?;
    let truth = gauge_fix(u_true);
    let complex_fidelity =
        matrix_fidelity(&gauge_fix(est), &truth)?.max(matrix_fidelity(&gauge_fix(&est.conj()), &truth)?);

    let m = u_true.rows();
    let (mut sum, mut n) = (0.0, 0usize);
    for i in 0..m {
        for j in i + 1..m {
            for k in 0..m {
                for l in k + 1..m {
                    if let (Some(p), Some(t)) = (
                        predicted(est, 1.0, (i, j), (k, l)),
                        predicted(u_true, 1.0, (i, j), (k, l)),
                    ) {
                        sum += (p - t).abs();
                        n += 1;
                    }
                }
            }
        }
    }

    let scale = result.visibility_scale.unwrap_or(1.0);
    let residuals: Vec<f64> = heldout
        .unwrap_or_default()
        .iter()
        .filter_map(|r| {
            if r.inputs.1 >= m || r.outputs.1 >= m {
                return None;
            }
            predicted(est, scale, r.inputs, r.outputs).map(|p| (p - r.value).abs())
        })
        .collect();
    Ok(ReconstructionMetrics {
        moduli_fidelity,
        complex_fidelity,
        visibility_error: if n == 0 { 0.0 } else { sum / n as f64 },
        heldout_visibility_mae: (!residuals.is_empty()).then(|| residuals.iter().sum::<f64>() / residuals.len() as f64),
        heldout_records: residuals.len(),
    })
}
