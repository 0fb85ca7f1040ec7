//! Triangular mesh of two-mode rotations.
//!
//! Rotation `(m, theta, phi)` acts on neighbouring modes `m, m+1` as
//! `[[e^{i phi} cos theta, -sin theta], [e^{i phi} sin theta, cos theta]]`.
//! Sweeps of decreasing length over `M(M-1)/2` rotations reach every
//! unitary up to a diagonal of output phases, which no intensity or
//! two-photon measurement can see.

use num_complex::Complex64;

use crate::linalg::ComplexMatrix;

#[derive(Clone, Debug)]
pub struct Mesh {
    modes: usize,
    /// Upper mode index of each rotation's pair, in application order.
    sites: Vec<usize>,
}

impl Mesh {
    pub fn triangular(modes: usize) -> Self {
        let mut sites = Vec::with_capacity(modes * modes.saturating_sub(1) / 2);
        for sweep in 0..modes.saturating_sub(1) {
            sites.extend(0..modes - 1 - sweep);
        }
        Self { modes, sites }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn rotations(&self) -> usize {
        self.sites.len()
    }

    /// Number of real parameters, two per rotation.
    pub fn parameters(&self) -> usize {
        2 * self.sites.len()
    }

    /// Unitary for parameters laid out as `[theta_0, phi_0, theta_1, ...]`.
    pub fn unitary(&self, params: &[f64]) -> ComplexMatrix {
        let mut u = ComplexMatrix::identity(self.modes);
        for (r, &m) in self.sites.iter().enumerate() {
            let t = rotation(params[2 * r], params[2 * r + 1]);
            apply_rows(&mut u, m, &t);
        }
        u
    }

    /// Pulls `grad_u` (entries `df/dRe + i df/dIm`) back onto the mesh
    /// parameters, given the forward output `u`.
    pub fn backprop(&self, params: &[f64], u: &ComplexMatrix, grad_u: &ComplexMatrix) -> Vec<f64> {
        let n = self.modes;
        let mut out = vec![0.0; self.parameters()];
        let mut cur = u.clone();
        let mut g = grad_u.clone();
        for (r, &m) in self.sites.iter().enumerate().rev() {
            let (theta, phi) = (params[2 * r], params[2 * r + 1]);
            let t = rotation(theta, phi);
            let t_adj = adjoint2(&t);
            // state before this rotation
            apply_rows(&mut cur, m, &t_adj);
            let mut h = [[Complex64::new(0.0, 0.0); 2]; 2];
            for (a, row_h) in h.iter_mut().enumerate() {
                for (b, slot) in row_h.iter_mut().enumerate() {
                    *slot = (0..n).map(|c| g[(m + a, c)] * cur[(m + b, c)].conj()).sum();
                }
            }
            let (dt_theta, dt_phi) = rotation_derivatives(theta, phi);
            out[2 * r] = contract(&h, &dt_theta);
            out[2 * r + 1] = contract(&h, &dt_phi);
            apply_rows(&mut g, m, &t_adj);
        }
        out
    }
}

type Block = [[Complex64; 2]; 2];

fn rotation(theta: f64, phi: f64) -> Block {
    let e = Complex64::from_polar(1.0, phi);
    let (s, c) = theta.sin_cos();
    [[e * c, Complex64::new(-s, 0.0)], [e * s, Complex64::new(c, 0.0)]]
}

fn rotation_derivatives(theta: f64, phi: f64) -> (Block, Block) {
    let e = Complex64::from_polar(1.0, phi);
    let ie = e * Complex64::i();
    let (s, c) = theta.sin_cos();
    let zero = Complex64::new(0.0, 0.0);
    (
        [[-e * s, Complex64::new(-c, 0.0)], [e * c, Complex64::new(-s, 0.0)]],
        [[ie * c, zero], [ie * s, zero]],
    )
}

fn adjoint2(t: &Block) -> Block {
    [[t[0][0].conj(), t[1][0].conj()], [t[0][1].conj(), t[1][1].conj()]]
}

/// `Re sum_ab conj(h_ab) d_ab`
fn contract(h: &Block, d: &Block) -> f64 {
    let mut acc = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            acc += (h[a][b].conj() * d[a][b]).re;
        }
    }
    acc
}

/// Left-multiplies rows `m, m+1` of `u` by the 2x2 block `t`.
fn apply_rows(u: &mut ComplexMatrix, m: usize, t: &Block) {
    for c in 0..u.cols() {
        let x = u[(m, c)];
        let y = u[(m + 1, c)];
        u[(m, c)] = t[0][0] * x + t[0][1] * y;
        u[(m + 1, c)] = t[1][0] * x + t[1][1] * y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::check_isometry;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn counts_and_unitarity() {
        let mesh = Mesh::triangular(5);
        assert_eq!(mesh.rotations(), 10);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p: Vec<f64> = (0..mesh.parameters()).map(|_| rng.gen_range(-3.0..3.0)).collect();
        assert!(check_isometry(&mesh.unitary(&p), 1e-12).unwrap().is_isometry);
        assert_eq!(mesh.unitary(&vec![0.0; mesh.parameters()]), ComplexMatrix::identity(5));
        assert_eq!(Mesh::triangular(1).parameters(), 0);
    }

    #[test]
    fn backprop_matches_finite_differences() {
        let mesh = Mesh::triangular(4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p: Vec<f64> = (0..mesh.parameters()).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let w = ComplexMatrix::from_fn(4, 4, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        // f(U) = Re sum conj(w) U has gradient w
        let f = |p: &[f64]| -> f64 {
            let u = mesh.unitary(p);
            u.as_slice()
                .iter()
                .zip(w.as_slice())
                .map(|(a, b)| (b.conj() * a).re)
                .sum()
        };
        let u = mesh.unitary(&p);
        let g = mesh.backprop(&p, &u, &w);
        let h = 1e-6;
        for i in 0..p.len() {
            let mut a = p.clone();
            let mut b = p.clone();
            a[i] += h;
            b[i] -= h;
            let fd = (f(&a) - f(&b)) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-8, "param {i}: {fd} vs {}", g[i]);
        }
    }
}
