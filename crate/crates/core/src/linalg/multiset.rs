use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Sorted list of mode indices with repetition, used to pick rows or columns.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModeMultiset(Vec<usize>);

impl ModeMultiset {
    /// Canonicalizes `indices` into non-decreasing order.
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        Self(indices)
    }

    /// Mode `i` repeated `occupations[i]` times.
    pub fn from_occupations(occupations: &[u32]) -> Self {
        let indices = occupations
            .iter()
            .enumerate()
            .flat_map(|(mode, &n)| std::iter::repeat_n(mode, n as usize))
            .collect();
        Self(indices)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    fn check_bounds(&self, dim: usize) -> Result<()> {
        match self.0.iter().find(|&&i| i >= dim) {
            Some(&index) => Err(Error::Bounds { index, dim }),
            None => Ok(()),
        }
    }
}

/// Entry `(i, j)` of the result is `m[rows[i], cols[j]]`; repeated indices
/// duplicate rows or columns.
pub fn submatrix_multiset(m: &ComplexMatrix, rows: &ModeMultiset, cols: &ModeMultiset) -> Result<ComplexMatrix> {
    rows.check_bounds(m.rows())?;
    cols.check_bounds(m.cols())?;
    Ok(ComplexMatrix::from_fn(rows.len(), cols.len(), |i, j| {
        m[(rows.0[i], cols.0[j])]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn sample() -> ComplexMatrix {
        ComplexMatrix::from_fn(2, 2, |r, c| Complex64::new((2 * r + c) as f64, 0.0))
    }

    #[test]
    fn picks_single_entry() {
        let s = submatrix_multiset(&sample(), &ModeMultiset::new(vec![0]), &ModeMultiset::new(vec![1])).unwrap();
        assert_eq!(s.shape(), (1, 1));
        assert_eq!(s[(0, 0)], sample()[(0, 1)]);
    }

    #[test]
    fn repeated_rows_duplicate() {
        let m = sample();
        let s = submatrix_multiset(&m, &ModeMultiset::new(vec![0, 0]), &ModeMultiset::new(vec![0, 1])).unwrap();
        assert_eq!(s.row(0), s.row(1));
        assert_eq!(s.row(0), m.row(0));
    }

    #[test]
    fn out_of_range_is_bounds_error() {
        let err = submatrix_multiset(&sample(), &ModeMultiset::new(vec![2]), &ModeMultiset::new(vec![0])).unwrap_err();
        assert!(matches!(err, Error::Bounds { index: 2, dim: 2 }));
    }

    #[test]
    fn occupations_expand_in_order() {
        let s = ModeMultiset::from_occupations(&[2, 0, 1]);
        assert_eq!(s.indices(), &[0, 0, 2]);
        assert_eq!(ModeMultiset::new(vec![3, 1, 1]).indices(), &[1, 1, 3]);
    }
}
