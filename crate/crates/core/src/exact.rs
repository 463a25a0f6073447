//! Exact rational linear algebra: consistent-system solving and nonnegative
//! combination feasibility (phase-one simplex with Bland's rule).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Best rational approximation with denominator at most `max_den`
/// (continued fractions).
pub fn approximate(x: f64, max_den: i64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let neg = x < 0.0;
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e18 {
            break;
        }
        let a = a as i128;
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        if q2 > max_den as i128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = v - a as f64;
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    let r = Rational::new(BigInt::from(p1), BigInt::from(q1));
    Some(if neg { -r } else { r })
}

/// Solves `a z = b` for a consistent (possibly singular or rectangular)
/// system, setting free variables to zero. `None` if inconsistent.
pub fn solve_consistent(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r][c..].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..=cols {
                    let sub = &f * &m[r][k];
                    m[i][k] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut z = vec![Rational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        z[c] = m[i][cols].clone();
    }
    Some(z)
}

/// Finds `lambda >= 0` with `sum_j lambda_j * columns[j] = target`, or `None`
/// if no such combination exists.
pub fn nonnegative_combination(
    columns: &[Vec<Rational>],
    target: &[Rational],
) -> Option<Vec<Rational>> {
    let m = target.len();
    let k = columns.len();
    if m == 0 {
        return Some(vec![Rational::zero(); k]);
    }
    // tableau rows: constraints; columns: k originals, m artificials, rhs
    let width = k + m + 1;
    let mut t: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let sign = if target[i].is_negative() {
                -Rational::one()
            } else {
                Rational::one()
            };
            let mut row = Vec::with_capacity(width);
            row.extend(columns.iter().map(|col| &col[i] * &sign));
            row.extend((0..m).map(|a| {
                if a == i {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            row.push(&target[i] * &sign);
            row
        })
        .collect();
    let mut basis: Vec<usize> = (k..k + m).collect();
    // phase-one costs: minimize the sum of artificials
    let mut cost: Vec<Rational> = vec![Rational::zero(); width];
    for row in &t {
        for j in 0..k {
            cost[j] -= &row[j];
        }
        cost[width - 1] -= &row[width - 1];
    }
    loop {
        let Some(enter) = (0..k + m).find(|&j| cost[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leave else { break };
        pivot(&mut t, &mut cost, row, enter);
        basis[row] = enter;
    }
    if !cost[width - 1].is_zero() {
        return None;
    }
    let mut lambda = vec![Rational::zero(); k];
    for (i, &b) in basis.iter().enumerate() {
        if b < k {
            lambda[b] = t[i][width - 1].clone();
        }
    }
    Some(lambda)
}

fn pivot(t: &mut [Vec<Rational>], cost: &mut [Rational], row: usize, col: usize) {
    let inv = t[row][col].recip();
    for v in t[row].iter_mut() {
        *v *= &inv;
    }
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i != row && !r[col].is_zero() {
            let f = r[col].clone();
            for (v, p) in r.iter_mut().zip(&pivot_row) {
                *v -= &f * p;
            }
        }
    }
    if !cost[col].is_zero() {
        let f = cost[col].clone();
        for (v, p) in cost.iter_mut().zip(&pivot_row) {
            *v -= &f * p;
        }
    }
}
