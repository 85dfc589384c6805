//! Exhaustive subspace enumeration over finite fields.
//!
//! Every r-dimensional subspace of F^m has exactly one basis in reduced
//! echelon form, so iterating over canonical echelon matrices visits each
//! subspace once. Exact Gaussian-binomial counts let callers enforce
//! budgets before starting.

use num::{BigUint, One, Zero};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::Matrix;

/// The Gaussian binomial [m choose r]_q: the number of r-dimensional
/// subspaces of F_q^m.
pub fn gaussian_binomial(q: &BigUint, m: usize, r: usize) -> BigUint {
    if r > m {
        return BigUint::zero();
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..r {
        num *= q.pow((m - i) as u32) - 1u32;
        den *= q.pow((i + 1) as u32) - 1u32;
    }
    // The product of the first r cyclotomic-style factors divides exactly.
    debug_assert!((&num % &den).is_zero());
    num / den
}

/// Number of nonzero subspaces of F_q^m (dimensions 1 through m).
pub fn nonzero_subspace_count(q: &BigUint, m: usize) -> BigUint {
    (1..=m).map(|r| gaussian_binomial(q, m, r)).sum()
}

/// Iterator over the canonical reduced-echelon bases of all r-dimensional
/// subspaces of F^m, in lexicographic pivot-column order.
pub struct EchelonBases<F: Field> {
    field: F,
    elements: Vec<F::Elem>,
    m: usize,
    r: usize,
    pivots: Option<Vec<usize>>,
    free_positions: Vec<(usize, usize)>,
    odometer: Vec<usize>,
}

/// All r-dimensional subspaces of F^m. Requires a finite field.
pub fn subspaces_of_dim<F: Field>(f: &F, m: usize, r: usize) -> Result<EchelonBases<F>> {
    let elements = f.elements().ok_or(Error::InfiniteFieldExhaustive)?;
    let pivots = if r <= m {
        Some((0..r).collect::<Vec<usize>>())
    } else {
        None
    };
    let mut it = EchelonBases {
        field: f.clone(),
        elements,
        m,
        r,
        pivots,
        free_positions: vec![],
        odometer: vec![],
    };
    it.reset_odometer();
    Ok(it)
}

/// All nonzero subspaces of F^m, dimension 1 first.
pub fn nonzero_subspaces<F: Field>(
    f: &F,
    m: usize,
) -> Result<impl Iterator<Item = Matrix<F>>> {
    let per_dim: Result<Vec<EchelonBases<F>>> =
        (1..=m).map(|r| subspaces_of_dim(f, m, r)).collect();
    Ok(per_dim?.into_iter().flatten())
}

impl<F: Field> EchelonBases<F> {
    fn reset_odometer(&mut self) {
        let Some(pivots) = &self.pivots else {
            return;
        };
        // Free entries sit strictly right of their row's pivot, outside
        // pivot columns; everything else is forced by reduced echelon form.
        self.free_positions.clear();
        for (i, &p) in pivots.iter().enumerate() {
            for j in (p + 1)..self.m {
                if !pivots.contains(&j) {
                    self.free_positions.push((i, j));
                }
            }
        }
        self.odometer = vec![0; self.free_positions.len()];
    }

    fn emit(&self) -> Matrix<F> {
        let pivots = self.pivots.as_ref().expect("live iterator");
        let mut rows = vec![vec![self.field.zero(); self.m]; self.r];
        for (i, &p) in pivots.iter().enumerate() {
            rows[i][p] = self.field.one();
        }
        for (slot, &(i, j)) in self.odometer.iter().zip(&self.free_positions) {
            rows[i][j] = self.elements[*slot].clone();
        }
        Matrix::from_rows(self.field.clone(), self.m, rows).expect("fixed width")
    }

    /// Advance the free-entry odometer; false when it wraps.
    fn bump_odometer(&mut self) -> bool {
        for slot in self.odometer.iter_mut() {
            *slot += 1;
            if *slot < self.elements.len() {
                return true;
            }
            *slot = 0;
        }
        false
    }

    /// Advance the pivot-column combination lexicographically; false when
    /// exhausted.
    fn bump_pivots(&mut self) -> bool {
        let Some(pivots) = self.pivots.as_mut() else {
            return false;
        };
        if pivots.is_empty() {
            self.pivots = None;
            return false;
        }
        let r = pivots.len();
        let mut i = r;
        while i > 0 {
            i -= 1;
            if pivots[i] < self.m - (r - i) {
                pivots[i] += 1;
                for j in (i + 1)..r {
                    pivots[j] = pivots[j - 1] + 1;
                }
                self.reset_odometer();
                return true;
            }
        }
        self.pivots = None;
        false
    }
}

impl<F: Field> Iterator for EchelonBases<F> {
    type Item = Matrix<F>;

    fn next(&mut self) -> Option<Matrix<F>> {
        self.pivots.as_ref()?;
        let out = self.emit();
        if !self.bump_odometer() && !self.bump_pivots() {
            self.pivots = None;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use std::collections::BTreeSet;

    fn q(n: u64) -> BigUint {
        BigUint::from(n)
    }

    // Oracles: [3 1]_2 = [3 2]_2 = 7, [3 3]_2 = 1 (15 nonzero subspaces);
    // [4 2]_2 = 35; [2 1]_3 = 4; [3 1]_3 = 13.
    #[test]
    fn gaussian_binomial_oracles() {
        assert_eq!(gaussian_binomial(&q(2), 3, 1), q(7));
        assert_eq!(gaussian_binomial(&q(2), 3, 2), q(7));
        assert_eq!(gaussian_binomial(&q(2), 3, 3), q(1));
        assert_eq!(nonzero_subspace_count(&q(2), 3), q(15));
        assert_eq!(gaussian_binomial(&q(2), 4, 2), q(35));
        assert_eq!(gaussian_binomial(&q(3), 2, 1), q(4));
        assert_eq!(gaussian_binomial(&q(3), 3, 1), q(13));
        assert_eq!(gaussian_binomial(&q(5), 2, 3), q(0));
    }

    #[test]
    fn enumeration_matches_counts_and_is_canonical() {
        for (p, m) in [(2u64, 3usize), (2, 4), (3, 2), (5, 2)] {
            let f = PrimeField::new(p).unwrap();
            let mut seen: BTreeSet<Vec<Vec<u64>>> = BTreeSet::new();
            for r in 0..=m {
                let mut count = 0usize;
                for mat in subspaces_of_dim(&f, m, r).unwrap() {
                    count += 1;
                    assert_eq!(mat.nrows(), r);
                    // Canonical: the matrix is its own reduced echelon form.
                    let rref = mat.rref();
                    assert_eq!(rref.rank, r);
                    assert_eq!(rref.matrix.rows_iter().count(), r);
                    for (a, b) in mat.rows_iter().zip(rref.matrix.rows_iter()) {
                        assert_eq!(a, b);
                    }
                    let key: Vec<Vec<u64>> =
                        mat.rows_iter().map(|row| row.to_vec()).collect();
                    assert!(seen.insert(key), "duplicate subspace emitted");
                }
                let expect = gaussian_binomial(&q(p), m, r);
                assert_eq!(BigUint::from(count), expect, "p={p} m={m} r={r}");
            }
        }
    }

    #[test]
    fn nonzero_chain_and_infinite_field() {
        let f = PrimeField::new(2).unwrap();
        let all: Vec<_> = nonzero_subspaces(&f, 3).unwrap().collect();
        assert_eq!(all.len(), 15);
        assert!(all.iter().take(7).all(|m| m.nrows() == 1));
        assert!(matches!(
            subspaces_of_dim(&Rationals, 2, 1),
            Err(Error::InfiniteFieldExhaustive)
        ));
    }
}
