#![allow(dead_code)]

use num_traits::Zero;
use proptest::prelude::*;
use sqrect::corpus;
use sqrect::exact::{int, rat, Rational};
use sqrect::grid::GridComplex;
use sqrect::qp::DenseQp;
use sqrect::vector::WeightVector;

/// Random quadrilateral with at most `max_tiles` tiles.
pub fn quadrilateral(max_tiles: usize) -> impl Strategy<Value = GridComplex> {
    any::<u64>().prop_map(move |seed| corpus::quadrilateral_corpus(seed, 1, max_tiles).remove(0))
}

/// Nonnegative rational with numerator below `num` and denominator below `den`.
pub fn rational(num: i64, den: i64) -> impl Strategy<Value = Rational> {
    (0..num, 1..den).prop_map(|(n, d)| rat(n, d))
}

/// Random nonzero weight vector of length in `lengths`.
pub fn vector(lengths: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = WeightVector> {
    lengths
        .prop_flat_map(|n| prop::collection::vec(rational(6, 5), n))
        .prop_map(|mut comps| {
            if comps.iter().all(|c| *c == rat(0, 1)) {
                comps[0] = rat(1, 1);
            }
            WeightVector::new(comps).unwrap()
        })
}

/// Every composition of `total` into `parts` nonnegative integers.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    (0..=total)
        .flat_map(|first| {
            compositions(total - first, parts - 1)
                .into_iter()
                .map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
        })
        .collect()
}

/// Minimum-area matrix over the polytope cut out by the prefix-sum
/// inequalities, with the first column fixed. Variables are laid out column
/// by column.
pub fn extension_qp(x: &WeightVector, m: usize) -> DenseQp {
    let n = x.len();
    let var = |j: usize, i: usize| j * n + i;
    let mut qp = DenseQp::new(n * m);
    let prefix = |j: usize, k: usize| -> Vec<Rational> {
        let mut a = vec![Rational::zero(); n * m];
        for i in 0..k {
            a[var(j, i)] = int(1);
        }
        a
    };
    for i in 0..n {
        let mut e = vec![Rational::zero(); n * m];
        e[var(0, i)] = int(1);
        qp.equal(e, x.components()[i].clone());
    }
    for j in 0..m {
        for i in 0..n {
            let mut a = vec![Rational::zero(); n * m];
            a[var(j, i)] = int(1);
            qp.at_least(a, Rational::zero());
        }
    }
    for j in 0..m - 1 {
        let total: Vec<Rational> = prefix(j, n)
            .iter()
            .zip(prefix(j + 1, n))
            .map(|(a, b)| a - b)
            .collect();
        qp.equal(total, Rational::zero());
        for k in 1..n {
            // first k of one column <= first k + 1 of the other, both ways
            for (a, b) in [(j, j + 1), (j + 1, j)] {
                let row: Vec<Rational> = prefix(b, k + 1)
                    .iter()
                    .zip(prefix(a, k))
                    .map(|(u, v)| u - v)
                    .collect();
                qp.at_least(row, Rational::zero());
            }
        }
    }
    qp
}
