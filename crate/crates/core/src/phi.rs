//! The skinny cut function: the minimal-area weight vector compatible with a
//! given one, together with its optimality checker, minimal preimages, the
//! iteration count invariant and multi-column extension.

use num_traits::Zero;
use thiserror::Error;

use crate::exact::Rational;
use crate::vector::{is_compatible, Direction, Leaner, WeightVector};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiResult {
    pub y: WeightVector,
    /// Each leaner of `y` with the index of the partition point of `x` that
    /// blocks it.
    pub blocked_leaners: Vec<(Leaner, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuValue {
    pub mu: usize,
    /// `per_index[i - 1]` is the count for partition point `p_i`.
    pub per_index: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhiError {
    #[error("{0} is not in the image of the skinny cut function")]
    NotInImage(String),
}

fn from_usize(k: usize) -> Rational {
    Rational::from_integer((k as i64).into())
}

/// Evaluates the skinny cut function.
///
/// The partition points `q_k` of the result trace the shortest polygonal path
/// from `(0, 0)` to `(n, h)` through the gates `p_{k-1} <= q_k <= p_{k+1}`.
pub fn phi(x: &WeightVector) -> PhiResult {
    let n = x.len();
    let p = x.partition();
    let h = p[n].clone();
    let gate = |k: usize| -> (Rational, Rational) {
        if k == n {
            (h.clone(), h.clone())
        } else {
            (p[k - 1].clone(), p[k + 1].clone())
        }
    };
    let mut q = vec![Rational::zero(); n + 1];
    let mut anchor = 0usize;
    let mut anchor_value = Rational::zero();
    'outer: loop {
        // slope window of lines from the anchor through every gate so far
        let mut low: Option<(Rational, usize)> = None;
        let mut high: Option<(Rational, usize)> = None;
        for k in anchor + 1..=n {
            let (lo, hi) = gate(k);
            let d = from_usize(k - anchor);
            let s_lo = (&lo - &anchor_value) / &d;
            let s_hi = (&hi - &anchor_value) / &d;
            if let Some((u, iu)) = &high {
                if s_lo > *u {
                    // string wraps over the top of gate iu
                    let (iu, u) = (*iu, u.clone());
                    fill(&mut q, anchor, &anchor_value, iu, &u);
                    anchor_value = gate(iu).1;
                    anchor = iu;
                    continue 'outer;
                }
            }
            if let Some((l, il)) = &low {
                if s_hi < *l {
                    let (il, l) = (*il, l.clone());
                    fill(&mut q, anchor, &anchor_value, il, &l);
                    anchor_value = gate(il).0;
                    anchor = il;
                    continue 'outer;
                }
            }
            if low.as_ref().is_none_or(|(l, _)| s_lo >= *l) {
                low = Some((s_lo, k));
            }
            if high.as_ref().is_none_or(|(u, _)| s_hi <= *u) {
                high = Some((s_hi, k));
            }
        }
        let slope = (&h - &anchor_value) / from_usize(n - anchor);
        fill(&mut q, anchor, &anchor_value, n, &slope);
        break;
    }
    let y = WeightVector::unpartition(&q).expect("taut string through a monotone corridor");
    let blocked_leaners =
        blocking(x, &y).expect("taut string must satisfy the blocking certificate");
    PhiResult { y, blocked_leaners }
}

fn fill(q: &mut [Rational], from: usize, value: &Rational, to: usize, slope: &Rational) {
    for k in from + 1..=to {
        q[k] = value + slope * from_usize(k - from);
    }
}

/// Pairs each leaner of `y` with its blocking partition index, or `None` if
/// `y` is incompatible with `x` or some leaner is free.
fn blocking(x: &WeightVector, y: &WeightVector) -> Option<Vec<(Leaner, usize)>> {
    if !is_compatible(x, y) {
        return None;
    }
    let (p, q) = (x.partition(), y.partition());
    y.leaners()
        .into_iter()
        .map(|l| {
            let k = l.index;
            let b = match l.direction {
                Direction::Left => k - 1,
                Direction::Right => k + 1,
            };
            (q[k] == p[b]).then_some((l, b))
        })
        .collect()
}

/// True iff `y` is compatible with `x` and `x` blocks every leaner of `y`,
/// which characterizes `y` as the image of `x`.
pub fn is_minimal_compatible(x: &WeightVector, y: &WeightVector) -> bool {
    blocking(x, y).is_some()
}

/// The area-minimal weight vector mapping onto `y`.
pub fn minimal_preimage(y: &WeightVector) -> Result<WeightVector, PhiError> {
    let mut components = Vec::with_capacity(y.len());
    for s in y.segments() {
        let dim = s.dimension() as i64 + s.leaning_away() as i64 - s.leaning_toward() as i64;
        if dim < 1 {
            return Err(PhiError::NotInImage(y.to_string()));
        }
        let value = s.height() / Rational::from_integer(dim.into());
        components.extend(std::iter::repeat_n(value, dim as usize));
    }
    if components.len() != y.len() {
        return Err(PhiError::NotInImage(y.to_string()));
    }
    let x = WeightVector::new(components).map_err(|_| PhiError::NotInImage(y.to_string()))?;
    if phi(&x).y != *y {
        return Err(PhiError::NotInImage(y.to_string()));
    }
    Ok(x)
}

/// Number of iterations after which repeated application reaches the
/// uniform vector, read off from the positions of the partition points.
pub fn mu(x: &WeightVector) -> MuValue {
    let n = x.len();
    let p = x.partition();
    let h = &p[n];
    let per_index: Vec<usize> = (1..n)
        .map(|i| {
            let t = h * from_usize(i) / from_usize(n);
            if p[i] < t {
                (i..n).filter(|&j| p[i] <= p[j] && p[j] < t).count()
            } else if p[i] > t {
                (1..=i).filter(|&j| t < p[j] && p[j] <= p[i]).count()
            } else {
                0
            }
        })
        .collect();
    MuValue {
        mu: per_index.iter().copied().max().unwrap_or(0),
        per_index,
    }
}

pub fn iterate_phi(x: &WeightVector, m: usize) -> WeightVector {
    (0..m).fold(x.clone(), |v, _| phi(&v).y)
}

/// Smallest `m` with `iterate_phi(x, m)` uniform, searching up to `limit`.
pub fn iterations_to_uniform(x: &WeightVector, limit: usize) -> Option<usize> {
    let mut v = x.clone();
    for m in 0..=limit {
        if v.is_uniform() {
            return Some(m);
        }
        v = phi(&v).y;
    }
    None
}

/// Columns of the minimal-area sum of strictly monotonic cuts on an `n x m`
/// rectangle whose first column is `x`.
pub fn extend_rectangle(x: &WeightVector, m: usize) -> Vec<WeightVector> {
    assert!(m >= 1);
    let mut columns = vec![x.clone()];
    while columns.len() < m {
        let next = phi(columns.last().unwrap()).y;
        columns.push(next);
    }
    columns
}
