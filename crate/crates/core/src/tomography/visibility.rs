use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Two-photon interference visibility for photons injected at inputs `i`,
/// `j` and detected in coincidence at outputs `k`, `l`:
/// `V = (C - Q) / C` with `Q = |u_ki u_lj + u_kj u_li|^2` and the classical
/// rate `C = |u_ki|^2 |u_lj|^2 + |u_kj|^2 |u_li|^2`.
pub fn hom_visibility(u: &ComplexMatrix, i: usize, j: usize, k: usize, l: usize) -> Result<f64> {
    for idx in [i, j] {
        if idx >= u.cols() {
            return Err(Error::Bounds {
                index: idx,
                dim: u.cols(),
            });
        }
    }
    for idx in [k, l] {
        if idx >= u.rows() {
            return Err(Error::Bounds {
                index: idx,
                dim: u.rows(),
            });
        }
    }
    if i == j || k == l {
        return Err(Error::Argument(
            "visibility needs distinct inputs and distinct outputs".into(),
        ));
    }
    let terms = VisibilityTerms::new(u[(k, i)], u[(l, j)], u[(k, j)], u[(l, i)]);
    terms
        .value()
        .ok_or_else(|| Error::Degenerate(format!("no classical coincidences for ({i},{j}) -> ({k},{l})")))
}

/// Closed-form pieces of the visibility of one input/output quadruple.
#[derive(Clone, Copy, Debug)]
pub(crate) struct VisibilityTerms {
    pub ki: Complex64,
    pub lj: Complex64,
    pub kj: Complex64,
    pub li: Complex64,
    pub amplitude: Complex64,
    pub quantum: f64,
    pub classical: f64,
}

impl VisibilityTerms {
    pub fn new(ki: Complex64, lj: Complex64, kj: Complex64, li: Complex64) -> Self {
        let amplitude = ki * lj + kj * li;
        Self {
            ki,
            lj,
            kj,
            li,
            amplitude,
            quantum: amplitude.norm_sqr(),
            classical: ki.norm_sqr() * lj.norm_sqr() + kj.norm_sqr() * li.norm_sqr(),
        }
    }

    pub fn value(&self) -> Option<f64> {
        (self.classical > 0.0).then(|| 1.0 - self.quantum / self.classical)
    }

    /// Gradients of `Q` and `C` with respect to `(u_ki, u_lj, u_kj, u_li)`,
    /// each entry as `d/dRe + i d/dIm`.
    pub fn rate_gradients(&self) -> ([Complex64; 4], [Complex64; 4]) {
        let z = self.amplitude;
        // (partner in the product, own entry, partner in C)
        let parts = [
            (self.lj, self.ki),
            (self.ki, self.lj),
            (self.li, self.kj),
            (self.kj, self.li),
        ];
        (
            parts.map(|(partner, _)| z * partner.conj() * 2.0),
            parts.map(|(partner, own)| own * (2.0 * partner.norm_sqr())),
        )
    }

    /// Gradient of `V` in the same layout as [`Self::rate_gradients`].
    pub fn gradient(&self) -> [Complex64; 4] {
        let (q, c) = (self.quantum, self.classical);
        let (gq, gc) = self.rate_gradients();
        let mut out = [Complex64::new(0.0, 0.0); 4];
        for n in 0..4 {
            out[n] = -(gq[n] * c - gc[n] * q) / (c * c);
        }
        out
    }
}
