//! Gaussian elimination over the field of rational functions.

use super::ratfunc::RationalFunction;
use crate::error::{HatError, Result};

/// Square system `matrix · x = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    matrix: Vec<Vec<RationalFunction>>,
    rhs: Vec<RationalFunction>,
}

impl LinearSystem {
    pub fn new(matrix: Vec<Vec<RationalFunction>>, rhs: Vec<RationalFunction>) -> Result<Self> {
        let n = rhs.len();
        if n == 0 {
            return Err(HatError::invalid(
                "linear system must have at least one unknown",
            ));
        }
        if matrix.len() != n {
            return Err(HatError::SizeMismatch {
                expected: n,
                found: matrix.len(),
            });
        }
        if let Some(row) = matrix.iter().find(|row| row.len() != n) {
            return Err(HatError::SizeMismatch {
                expected: n,
                found: row.len(),
            });
        }
        Ok(LinearSystem { matrix, rhs })
    }

    pub fn size(&self) -> usize {
        self.rhs.len()
    }

    pub fn matrix(&self) -> &[Vec<RationalFunction>] {
        &self.matrix
    }

    pub fn rhs(&self) -> &[RationalFunction] {
        &self.rhs
    }

    /// `matrix · x - rhs`, row by row.
    pub fn residual(&self, x: &[RationalFunction]) -> Vec<RationalFunction> {
        self.matrix
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| {
                let lhs = row
                    .iter()
                    .zip(x)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(RationalFunction::zero(), |acc, (a, xi)| &acc + &(a * xi));
                &lhs - b
            })
            .collect()
    }
}

/// Solves the system exactly. Each column pivots on the nonzero entry of
/// lowest total degree to keep intermediate expressions small.
pub fn solve_linear_system(sys: &LinearSystem) -> Result<Vec<RationalFunction>> {
    let n = sys.size();
    let mut a = sys.matrix.clone();
    let mut b = sys.rhs.clone();

    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !a[r][col].is_zero())
            .min_by_key(|&r| a[r][col].total_degree())
            .ok_or(HatError::SingularSystem)?;
        a.swap(col, pivot);
        b.swap(col, pivot);

        let inv = &RationalFunction::one() / &a[col][col];
        for c in col..n {
            if !a[col][c].is_zero() {
                a[col][c] = &a[col][c] * &inv;
            }
        }
        b[col] = &b[col] * &inv;

        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in col..n {
                if !a[col][c].is_zero() {
                    a[r][c] = &a[r][c] - &(&factor * &a[col][c]);
                }
            }
            b[r] = &b[r] - &(&factor * &b[col]);
        }
    }
    Ok(b)
}
