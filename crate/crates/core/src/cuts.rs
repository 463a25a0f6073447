//! Weight functions on a tiled rectangle that are nonnegative combinations of
//! strictly monotonic skinny cuts: cuts taking exactly one tile per column
//! and moving by at most one row between neighbouring columns.
//!
//! Matrices are stored as columns, each listed from the top row down.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exact::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CutError {
    #[error("matrix is not a sum of strictly monotonic cuts")]
    NotDecomposable,
}

/// A cut given by its row (1 = top) in each column, with a positive coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedCut {
    pub coefficient: Rational,
    pub rows: Vec<usize>,
}

pub fn is_strictly_monotonic(rows: &[usize]) -> bool {
    rows.iter().all(|r| *r >= 1) && rows.windows(2).all(|w| w[0].abs_diff(w[1]) <= 1)
}

fn prefix_sums(col: &[Rational]) -> Vec<Rational> {
    let mut s = vec![Rational::zero()];
    for v in col {
        let next = s.last().unwrap() + v;
        s.push(next);
    }
    s
}

fn well_formed(columns: &[Vec<Rational>]) -> bool {
    let Some(n) = columns.first().map(Vec::len) else {
        return false;
    };
    n > 0
        && columns.iter().all(|c| c.len() == n)
        && columns.iter().flatten().all(|v| !v.is_negative())
        && columns.iter().flatten().any(|v| !v.is_zero())
}

/// Equal column sums, and for neighbouring columns the first `k` entries of
/// either are bounded by the first `k + 1` entries of the other.
pub fn is_sum_of_monotone_cuts(columns: &[Vec<Rational>]) -> bool {
    if !well_formed(columns) {
        return false;
    }
    let n = columns[0].len();
    let sums: Vec<Vec<Rational>> = columns.iter().map(|c| prefix_sums(c)).collect();
    sums.windows(2).all(|w| {
        let (a, b) = (&w[0], &w[1]);
        a[n] == b[n] && (1..n).all(|k| a[k] <= b[k + 1] && b[k] <= a[k + 1])
    })
}

/// Peels off the cut through the topmost nonzero tile of every column, with
/// the smallest weight on it as coefficient, until nothing is left.
pub fn decompose_monotone_cuts(columns: &[Vec<Rational>]) -> Result<Vec<WeightedCut>, CutError> {
    if !is_sum_of_monotone_cuts(columns) {
        return Err(CutError::NotDecomposable);
    }
    let mut rest: Vec<Vec<Rational>> = columns.to_vec();
    let mut cuts = Vec::new();
    loop {
        let tops: Vec<Option<usize>> = rest
            .iter()
            .map(|c| c.iter().position(|v| !v.is_zero()))
            .collect();
        if tops.iter().all(Option::is_none) {
            break;
        }
        let rows: Vec<usize> = tops
            .iter()
            .map(|t| t.map(|i| i + 1).ok_or(CutError::NotDecomposable))
            .collect::<Result<_, _>>()?;
        if !is_strictly_monotonic(&rows) {
            return Err(CutError::NotDecomposable);
        }
        let coefficient = rest
            .iter()
            .zip(&rows)
            .map(|(c, r)| c[r - 1].clone())
            .min()
            .expect("at least one column");
        for (c, r) in rest.iter_mut().zip(&rows) {
            c[r - 1] -= &coefficient;
        }
        cuts.push(WeightedCut { coefficient, rows });
    }
    Ok(cuts)
}

/// Sum of the weighted characteristic functions of the cuts.
pub fn recompose(n: usize, m: usize, cuts: &[WeightedCut]) -> Vec<Vec<Rational>> {
    let mut columns = vec![vec![Rational::zero(); n]; m];
    for cut in cuts {
        for (c, r) in columns.iter_mut().zip(&cut.rows) {
            c[r - 1] += &cut.coefficient;
        }
    }
    columns
}
