//! Least-squares misfit between a candidate device and the measurements.
//!
//! Parameter layout: mesh angles, then log input efficiencies, then log
//! output efficiencies, then (optionally) the visibility scale.

use num_complex::Complex64;

use super::data::TomographyData;
use super::mesh::Mesh;
use super::visibility::VisibilityTerms;
use crate::linalg::ComplexMatrix;

/// How a visibility record enters the misfit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Residual {
    /// `s V - v`
    Visibility,
    /// `((1 - v) C - Q) / C_meas`, with `C_meas` built from the measured
    /// moduli. Polynomial in the matrix entries, so it stays smooth where a
    /// classical rate vanishes; it agrees with the visibility residual to
    /// first order at a good fit.
    Rate,
}

/// The reconstruction misfit: squared moduli residuals plus `lambda`
/// times squared visibility residuals.
#[derive(Clone, Debug)]
pub struct Objective<'a> {
    pub(crate) data: &'a TomographyData,
    pub(crate) mesh: Mesh,
    pub(crate) lambda: f64,
    pub(crate) fit_scale: bool,
    pub(crate) residual: Residual,
}

/// Device described by a parameter vector.
pub(crate) struct Candidate {
    pub unitary: ComplexMatrix,
    pub input_eff: Vec<f64>,
    pub output_eff: Vec<f64>,
    pub scale: f64,
}

impl<'a> Objective<'a> {
    pub fn new(data: &'a TomographyData, lambda: f64, fit_scale: bool) -> Self {
        Self {
            data,
            mesh: Mesh::triangular(data.modes()),
            lambda,
            fit_scale,
            residual: Residual::Visibility,
        }
    }

    pub(crate) fn with_residual(mut self, residual: Residual) -> Self {
        self.residual = residual;
        self
    }

    /// Length of the parameter vector.
    pub fn dimension(&self) -> usize {
        self.mesh.parameters() + 2 * self.data.modes() + usize::from(self.fit_scale)
    }

    pub(crate) fn candidate(&self, x: &[f64]) -> Candidate {
        let m = self.data.modes();
        let p = self.mesh.parameters();
        Candidate {
            unitary: self.mesh.unitary(&x[..p]),
            input_eff: x[p..p + m].iter().map(|a| a.exp()).collect(),
            output_eff: x[p + m..p + 2 * m].iter().map(|b| b.exp()).collect(),
            scale: if self.fit_scale { x[p + 2 * m] } else { 1.0 },
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.evaluate(x, false).0
    }

    pub fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        self.evaluate(x, true)
    }

    /// Central differences, for checking and for the derivative-free mode.
    pub fn finite_difference_gradient(&self, x: &[f64], step: f64) -> Vec<f64> {
        let mut probe = x.to_vec();
        (0..x.len())
            .map(|i| {
                probe[i] = x[i] + step;
                let up = self.value(&probe);
                probe[i] = x[i] - step;
                let down = self.value(&probe);
                probe[i] = x[i];
                (up - down) / (2.0 * step)
            })
            .collect()
    }

    fn evaluate(&self, x: &[f64], with_grad: bool) -> (f64, Vec<f64>) {
        let m = self.data.modes();
        let p = self.mesh.parameters();
        let c = self.candidate(x);
        let u = &c.unitary;
        let mut grad_u = ComplexMatrix::zeros(m, m);
        let mut grad = vec![0.0; x.len()];
        let mut f = 0.0;

        for k in 0..m {
            for i in 0..m {
                let gain = c.output_eff[k] * c.input_eff[i];
                let predicted = gain * u[(k, i)].norm_sqr();
                let r = predicted - self.data.modulus(k, i);
                f += r * r;
                if with_grad {
                    grad_u[(k, i)] += u[(k, i)] * (4.0 * r * gain);
                    grad[p + i] += 2.0 * r * predicted;
                    grad[p + m + k] += 2.0 * r * predicted;
                }
            }
        }

        let scale_slot = p + 2 * m;
        for rec in self.data.visibilities() {
            let ((i, j), (k, l)) = (rec.inputs, rec.outputs);
            let idx = [(k, i), (l, j), (k, j), (l, i)];
            let terms = VisibilityTerms::new(u[idx[0]], u[idx[1]], u[idx[2]], u[idx[3]]);
            match self.residual {
                Residual::Visibility => {
                    // a vanishing classical rate carries no phase information
                    let Some(v) = terms.value() else { continue };
                    let r = c.scale * v - rec.value;
                    f += self.lambda * r * r;
                    if with_grad {
                        let dv = 2.0 * self.lambda * r;
                        for (at, g) in idx.into_iter().zip(terms.gradient()) {
                            grad_u[at] += g * (dv * c.scale);
                        }
                        if self.fit_scale {
                            grad[scale_slot] += dv * v;
                        }
                    }
                }
                Residual::Rate => {
                    let d = self.data;
                    let measured = d.modulus(k, i) * d.modulus(l, j) + d.modulus(k, j) * d.modulus(l, i);
                    if measured <= 0.0 {
                        continue;
                    }
                    // the scale has no stable optimum here; it is held at one
                    let target = 1.0 - rec.value;
                    let r = (target * terms.classical - terms.quantum) / measured;
                    f += self.lambda * r * r;
                    if with_grad {
                        let dr = 2.0 * self.lambda * r / measured;
                        let (gq, gc) = terms.rate_gradients();
                        for n in 0..4 {
                            grad_u[idx[n]] += (gc[n] * target - gq[n]) * dr;
                        }
                    }
                }
            }
        }

        if with_grad {
            let mesh_grad = self.mesh.backprop(&x[..p], u, &grad_u);
            grad[..p].copy_from_slice(&mesh_grad);
        }
        (f, grad)
    }
}

/// Predicted moduli matrix `o_k |u_ki|^2 n_i`.
pub(crate) fn predicted_moduli(u: &ComplexMatrix, input_eff: &[f64], output_eff: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(u.rows(), u.cols(), |k, i| {
        Complex64::new(output_eff[k] * u[(k, i)].norm_sqr() * input_eff[i], 0.0)
    })
}
