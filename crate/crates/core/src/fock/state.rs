use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::ModeMultiset;

/// Photon occupation numbers per mode.
///
/// The derived `Ord` is plain lexicographic; outcome lists are kept in
/// descending lexicographic order, so `(1, 0)` precedes `(0, 1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockState(Vec<u32>);

impl FockState {
    pub fn new(occupations: Vec<u32>) -> Self {
        Self(occupations)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self(vec![0; modes])
    }

    /// One photon in each listed mode (modes may repeat).
    pub fn from_modes(modes: usize, occupied: &[usize]) -> Result<Self> {
        let mut occ = vec![0; modes];
        for &m in occupied {
            if m >= modes {
                return Err(Error::Bounds { index: m, dim: modes });
            }
            occ[m] += 1;
        }
        Ok(Self(occ))
    }

    pub fn concat(parts: &[FockState]) -> Self {
        Self(parts.iter().flat_map(|p| p.0.iter().copied()).collect())
    }

    pub fn occupations(&self) -> &[u32] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn photons(&self) -> usize {
        self.0.iter().map(|&n| n as usize).sum()
    }

    /// Mode indices with repetition, in non-decreasing order.
    pub fn multiset(&self) -> ModeMultiset {
        ModeMultiset::from_occupations(&self.0)
    }

    /// Product of the factorials of the occupations.
    pub fn factorial_product(&self) -> f64 {
        self.0.iter().map(|&n| factorial(n)).product()
    }

    pub fn select(&self, modes: &[usize]) -> Self {
        Self(modes.iter().map(|&m| self.0[m]).collect())
    }

    pub(crate) fn add(&self, other: &FockState) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Debug for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ">")
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

pub(crate) fn factorial(n: u32) -> f64 {
    (2..=n).map(f64::from).product()
}

/// `C(modes + photons - 1, photons)`, saturating at `u128::MAX`.
pub fn fock_space_dimension(modes: usize, photons: usize) -> u128 {
    if modes == 0 {
        return u128::from(photons == 0);
    }
    let n = (modes + photons - 1) as u128;
    let k = photons.min(modes - 1) as u128;
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc * (n - k + i) / i stays integral at every step
        acc = match acc.checked_mul(n - k + i) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
    }
    acc
}

/// Every distribution of `photons` over `modes`, in descending
/// lexicographic order.
pub fn enumerate_fock_states(modes: usize, photons: usize) -> Vec<FockState> {
    let mut out = Vec::new();
    if modes == 0 {
        if photons == 0 {
            out.push(FockState(Vec::new()));
        }
        return out;
    }
    let mut occ = vec![0u32; modes];
    fill(&mut occ, 0, photons as u32, &mut out);
    out
}

fn fill(occ: &mut [u32], pos: usize, left: u32, out: &mut Vec<FockState>) {
    if pos == occ.len() - 1 {
        occ[pos] = left;
        out.push(FockState(occ.to_vec()));
        return;
    }
    for n in (0..=left).rev() {
        occ[pos] = n;
        fill(occ, pos + 1, left - n, out);
    }
    occ[pos] = 0;
}
