//! Exact weight vectors for a single bar column: height, area, partition
//! points, leaners, segments and compatibility.

use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exact::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VectorError {
    #[error("a weight vector needs at least one component")]
    Empty,
    #[error("component {index} is negative")]
    Negative { index: usize },
    #[error("all components are zero")]
    AllZero,
    #[error("not a weak partition: {0}")]
    NotAPartition(String),
    #[error("vectors have different lengths ({0} and {1})")]
    LengthMismatch(usize, usize),
}

/// Nonnegative rational components `x_1..x_n`, not all zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightVector(Vec<Rational>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Left,
    Right,
}

/// An interior partition point `p_k` where `x_k != x_{k+1}`. `Left` means the
/// components decrease across it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Leaner {
    pub index: usize,
    pub direction: Direction,
}

/// How a segment endpoint relates to the leaner sitting on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EndLean {
    /// The endpoint is `0` or `h`.
    IntervalEnd,
    Toward,
    Away,
}

/// A maximal run of equal components `x_{start+1} = .. = x_end`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub value: Rational,
    pub left_end: EndLean,
    pub right_end: EndLean,
}

impl Segment {
    pub fn dimension(&self) -> usize {
        self.end - self.start
    }

    pub fn height(&self) -> Rational {
        &self.value * Rational::from_integer((self.dimension() as i64).into())
    }

    pub fn leaning_away(&self) -> usize {
        [self.left_end, self.right_end]
            .iter()
            .filter(|e| **e == EndLean::Away)
            .count()
    }

    pub fn leaning_toward(&self) -> usize {
        [self.left_end, self.right_end]
            .iter()
            .filter(|e| **e == EndLean::Toward)
            .count()
    }
}

impl WeightVector {
    pub fn new(components: Vec<Rational>) -> Result<Self, VectorError> {
        if components.is_empty() {
            return Err(VectorError::Empty);
        }
        if let Some(index) = components.iter().position(Signed::is_negative) {
            return Err(VectorError::Negative { index: index + 1 });
        }
        if components.iter().all(Zero::is_zero) {
            return Err(VectorError::AllZero);
        }
        Ok(WeightVector(components))
    }

    /// `(h/n, .., h/n)`.
    pub fn uniform(n: usize, h: &Rational) -> Self {
        assert!(
            n >= 1 && h.is_positive(),
            "uniform vector needs n >= 1 and h > 0"
        );
        let v = h / Rational::from_integer((n as i64).into());
        WeightVector(vec![v; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn components(&self) -> &[Rational] {
        &self.0
    }

    /// Component `x_i` with 1-based `i`.
    pub fn get(&self, i: usize) -> &Rational {
        &self.0[i - 1]
    }

    pub fn height(&self) -> Rational {
        self.0.iter().fold(Rational::zero(), |a, v| a + v)
    }

    pub fn area(&self) -> Rational {
        self.0.iter().fold(Rational::zero(), |a, v| a + v * v)
    }

    pub fn scaled(&self, r: &Rational) -> Self {
        assert!(r.is_positive());
        WeightVector(self.0.iter().map(|v| v * r).collect())
    }

    pub fn is_uniform(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }

    /// Partition points `p_0 = 0, p_k = x_1 + .. + x_k`.
    pub fn partition(&self) -> Vec<Rational> {
        let mut p = Vec::with_capacity(self.0.len() + 1);
        p.push(Rational::zero());
        for v in &self.0 {
            let next = p.last().unwrap() + v;
            p.push(next);
        }
        p
    }

    /// Inverse of [`WeightVector::partition`].
    pub fn unpartition(p: &[Rational]) -> Result<Self, VectorError> {
        if p.len() < 2 {
            return Err(VectorError::NotAPartition(
                "needs at least two points".into(),
            ));
        }
        if !p[0].is_zero() {
            return Err(VectorError::NotAPartition("first point must be 0".into()));
        }
        if let Some(k) = p.windows(2).position(|w| w[1] < w[0]) {
            return Err(VectorError::NotAPartition(format!(
                "decreases at index {}",
                k + 1
            )));
        }
        WeightVector::new(p.windows(2).map(|w| &w[1] - &w[0]).collect())
            .map_err(|_| VectorError::NotAPartition("last point must be positive".into()))
    }

    pub fn leaners(&self) -> Vec<Leaner> {
        self.0
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] != w[1])
            .map(|(k, w)| Leaner {
                index: k + 1,
                direction: if w[0] > w[1] {
                    Direction::Left
                } else {
                    Direction::Right
                },
            })
            .collect()
    }

    pub fn segments(&self) -> Vec<Segment> {
        let n = self.0.len();
        let mut bounds = vec![0];
        bounds.extend(self.leaners().iter().map(|l| l.index));
        bounds.push(n);
        let lean_at = |k: usize| -> Option<Direction> {
            (k > 0 && k < n && self.0[k - 1] != self.0[k]).then(|| {
                if self.0[k - 1] > self.0[k] {
                    Direction::Left
                } else {
                    Direction::Right
                }
            })
        };
        bounds
            .windows(2)
            .map(|w| {
                let (i, j) = (w[0], w[1]);
                // a left leaner leans toward the segment on its left
                let left_end = match lean_at(i) {
                    None => EndLean::IntervalEnd,
                    Some(Direction::Left) => EndLean::Away,
                    Some(Direction::Right) => EndLean::Toward,
                };
                let right_end = match lean_at(j) {
                    None => EndLean::IntervalEnd,
                    Some(Direction::Left) => EndLean::Toward,
                    Some(Direction::Right) => EndLean::Away,
                };
                Segment {
                    start: i,
                    end: j,
                    value: self.0[i].clone(),
                    left_end,
                    right_end,
                }
            })
            .collect()
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Equal heights and `q_{k-1} <= p_k <= q_{k+1}` for `0 < k < n`.
pub fn is_compatible(x: &WeightVector, y: &WeightVector) -> bool {
    if x.len() != y.len() || x.height() != y.height() {
        return false;
    }
    let (p, q) = (x.partition(), y.partition());
    (1..x.len()).all(|k| q[k - 1] <= p[k] && p[k] <= q[k + 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn v(xs: &[(i64, i64)]) -> WeightVector {
        WeightVector::new(xs.iter().map(|(n, d)| rat(*n, *d)).collect()).unwrap()
    }

    fn ints(xs: &[i64]) -> WeightVector {
        WeightVector::new(xs.iter().map(|n| int(*n)).collect()).unwrap()
    }

    #[test]
    fn height_and_area() {
        let x = ints(&[1, 2, 1]);
        assert_eq!(x.height(), int(4));
        assert_eq!(x.area(), int(6));
        let w = WeightVector::uniform(5, &int(3));
        assert_eq!(w.height(), int(3));
        assert_eq!(w.area(), rat(9, 5));
        assert_eq!(ints(&[7]).area(), int(49));
    }

    #[test]
    fn uniform_vectors() {
        assert_eq!(
            WeightVector::uniform(3, &int(1)),
            v(&[(1, 3), (1, 3), (1, 3)])
        );
        assert_eq!(WeightVector::uniform(1, &int(2)), ints(&[2]));
        assert_eq!(WeightVector::uniform(2, &int(1)), v(&[(1, 2), (1, 2)]));
    }

    #[test]
    fn rejects_invalid() {
        assert_eq!(WeightVector::new(vec![]).unwrap_err(), VectorError::Empty);
        assert_eq!(
            WeightVector::new(vec![int(0), int(0)]).unwrap_err(),
            VectorError::AllZero
        );
        assert_eq!(
            WeightVector::new(vec![int(1), int(-1)]).unwrap_err(),
            VectorError::Negative { index: 2 }
        );
    }

    #[test]
    fn partitions() {
        assert_eq!(
            ints(&[1, 2, 1]).partition(),
            vec![int(0), int(1), int(3), int(4)]
        );
        assert_eq!(
            ints(&[0, 0, 1]).partition(),
            vec![int(0), int(0), int(0), int(1)]
        );
        assert_eq!(
            WeightVector::unpartition(&[int(0), rat(1, 2), int(1)]).unwrap(),
            v(&[(1, 2), (1, 2)])
        );
        assert!(matches!(
            WeightVector::unpartition(&[int(0), int(2), int(1)]),
            Err(VectorError::NotAPartition(_))
        ));
        assert!(matches!(
            WeightVector::unpartition(&[int(1), int(2)]),
            Err(VectorError::NotAPartition(_))
        ));
    }

    #[test]
    fn leaners() {
        let l = ints(&[1, 2, 1]).leaners();
        assert_eq!(
            l,
            vec![
                Leaner {
                    index: 1,
                    direction: Direction::Right
                },
                Leaner {
                    index: 2,
                    direction: Direction::Left
                }
            ]
        );
        assert!(WeightVector::uniform(4, &int(1)).leaners().is_empty());
        assert_eq!(
            ints(&[1, 0, 0]).leaners(),
            vec![Leaner {
                index: 1,
                direction: Direction::Left
            }]
        );
    }

    #[test]
    fn segments() {
        let s = v(&[(1, 2), (1, 2), (0, 1)]).segments();
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].dimension(), s[0].value.clone()), (2, rat(1, 2)));
        assert_eq!(
            (s[0].left_end, s[0].right_end),
            (EndLean::IntervalEnd, EndLean::Toward)
        );
        assert_eq!((s[1].dimension(), s[1].value.clone()), (1, int(0)));
        assert_eq!(
            (s[1].left_end, s[1].right_end),
            (EndLean::Away, EndLean::IntervalEnd)
        );

        let s = WeightVector::uniform(4, &int(1)).segments();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].dimension(), 4);

        let s = ints(&[1, 2, 1]).segments();
        assert_eq!(
            s.iter().map(Segment::dimension).collect::<Vec<_>>(),
            vec![1, 1, 1]
        );
        // both leaners lean into the highest segment
        assert_eq!((s[1].leaning_toward(), s[1].leaning_away()), (2, 0));
        assert_eq!((s[0].leaning_toward(), s[0].leaning_away()), (0, 1));
    }

    #[test]
    fn compatibility() {
        assert!(is_compatible(&ints(&[1, 0]), &v(&[(1, 2), (1, 2)])));
        assert!(!is_compatible(&ints(&[1, 0, 0]), &ints(&[0, 0, 1])));
        let x = ints(&[3, 1, 4]);
        assert!(is_compatible(&x, &x));
        assert!(!is_compatible(&ints(&[1, 1]), &ints(&[1, 2])));
    }
}
