//! Weight functions on the tiles of a complex.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exact::{to_f64, Rational};
use crate::grid::{GridComplex, Side, TileId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("expected {expected} weights, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("negative weight {weight} on tile {tile}")]
    Negative { tile: TileId, weight: f64 },
    #[error("all weights are zero")]
    AllZero,
    #[error("tile {0} is not in the complex")]
    UnknownTile(TileId),
    #[error("tile {0} has no weight")]
    MissingTile(TileId),
}

/// Nonnegative weights indexed like [`GridComplex::tiles`]. An exact rational
/// companion is carried when the weights were computed or supplied exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    values: Vec<f64>,
    exact: Option<Vec<Rational>>,
}

impl WeightFunction {
    pub fn new(c: &GridComplex, values: Vec<f64>) -> Result<Self, WeightError> {
        if values.len() != c.len() {
            return Err(WeightError::WrongLength {
                expected: c.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !(*v >= 0.0)) {
            return Err(WeightError::Negative {
                tile: c.tile(i),
                weight: values[i],
            });
        }
        if values.iter().all(|v| *v == 0.0) {
            return Err(WeightError::AllZero);
        }
        Ok(WeightFunction {
            values,
            exact: None,
        })
    }

    pub fn new_exact(c: &GridComplex, values: Vec<Rational>) -> Result<Self, WeightError> {
        if values.len() != c.len() {
            return Err(WeightError::WrongLength {
                expected: c.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(Signed::is_negative) {
            return Err(WeightError::Negative {
                tile: c.tile(i),
                weight: to_f64(&values[i]),
            });
        }
        if values.iter().all(Zero::is_zero) {
            return Err(WeightError::AllZero);
        }
        Ok(WeightFunction {
            values: values.iter().map(to_f64).collect(),
            exact: Some(values),
        })
    }

    pub fn from_map(c: &GridComplex, map: &BTreeMap<TileId, f64>) -> Result<Self, WeightError> {
        if let Some(t) = map.keys().find(|t| !c.contains(**t)) {
            return Err(WeightError::UnknownTile(*t));
        }
        let values = c
            .tiles()
            .iter()
            .map(|t| map.get(t).copied().ok_or(WeightError::MissingTile(*t)))
            .collect::<Result<Vec<_>, _>>()?;
        WeightFunction::new(c, values)
    }

    pub fn constant(c: &GridComplex, value: f64) -> Self {
        WeightFunction {
            values: vec![value; c.len()],
            exact: None,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn exact(&self) -> Option<&[Rational]> {
        self.exact.as_deref()
    }

    pub fn get(&self, c: &GridComplex, t: TileId) -> Option<f64> {
        c.index_of(t).map(|i| self.values[i])
    }

    pub fn to_map(&self, c: &GridComplex) -> BTreeMap<TileId, f64> {
        c.tiles()
            .iter()
            .copied()
            .zip(self.values.iter().copied())
            .collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        WeightFunction {
            values: self.values.iter().map(|v| v * factor).collect(),
            exact: None,
        }
    }

    pub fn scaled_exact(&self, factor: &Rational) -> Self {
        match &self.exact {
            Some(e) => {
                let exact: Vec<Rational> = e.iter().map(|v| v * factor).collect();
                WeightFunction {
                    values: exact.iter().map(to_f64).collect(),
                    exact: Some(exact),
                }
            }
            None => self.scaled(to_f64(factor)),
        }
    }
}

/// Minimum weighted length of a fat path joining the top and bottom.
pub fn height(c: &GridComplex, rho: &WeightFunction) -> f64 {
    c.fat_shortest_path(rho.values(), Side::Top, Side::Bottom).0
}

pub fn exact_height(c: &GridComplex, rho: &[Rational]) -> Rational {
    c.fat_shortest_path(rho, Side::Top, Side::Bottom).0
}

/// Sum of squared weights.
pub fn area(rho: &WeightFunction) -> f64 {
    rho.values().iter().map(|v| v * v).sum()
}

pub fn exact_area(rho: &[Rational]) -> Rational {
    rho.iter().fold(Rational::zero(), |acc, v| acc + v * v)
}

pub fn modulus(c: &GridComplex, rho: &WeightFunction) -> f64 {
    let h = height(c, rho);
    h * h / area(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn height_and_area_of_uniform_rectangle() {
        let c = GridComplex::rectangle(4, 2).unwrap();
        let rho = WeightFunction::constant(&c, 0.5);
        assert_eq!(height(&c, &rho), 1.0);
        assert_eq!(area(&rho), 2.0);
        assert_eq!(modulus(&c, &rho), 0.5);
    }

    #[test]
    fn single_tile() {
        let c = GridComplex::rectangle(1, 1).unwrap();
        let rho = WeightFunction::new_exact(&c, vec![int(3)]).unwrap();
        assert_eq!(exact_height(&c, rho.exact().unwrap()), int(3));
        assert_eq!(exact_area(rho.exact().unwrap()), int(9));
        let rho = WeightFunction::new(&c, vec![5.0]).unwrap();
        assert_eq!(height(&c, &rho), 5.0);
    }

    #[test]
    fn rejects_invalid_weights() {
        let c = GridComplex::rectangle(2, 1).unwrap();
        assert_eq!(
            WeightFunction::new(&c, vec![0.0, 0.0]).unwrap_err(),
            WeightError::AllZero
        );
        assert!(matches!(
            WeightFunction::new(&c, vec![1.0, -1.0]),
            Err(WeightError::Negative { .. })
        ));
        assert!(matches!(
            WeightFunction::new(&c, vec![1.0]),
            Err(WeightError::WrongLength {
                expected: 2,
                got: 1
            })
        ));
    }
}
