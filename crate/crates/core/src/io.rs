//! JSON documents for complexes, dumbbells, solver results and weight vectors.
//!
//! Rationals are written as `"p/q"` strings (or `"p"` for integers).

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::dumbbell::{Dumbbell, DumbbellError, DumbbellSpec};
use crate::exact::Rational;
use crate::grid::{ComplexError, GridComplex, TileId, Vertex};
use crate::solver::ModulusResult;
use crate::vector::{VectorError, WeightVector};
use crate::weights::{WeightError, WeightFunction};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("not a rational number: {0:?}")]
    BadRational(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Dumbbell(#[from] DumbbellError),
    #[error(transparent)]
    Vector(#[from] VectorError),
    #[error(transparent)]
    Weights(#[from] WeightError),
    #[error("{0}")]
    Shape(String),
}

/// `{"tiles": [[col, row], ..], "corners": [[x, y] x 4]}`; without corners
/// the default corners are used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub tiles: Vec<TileId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corners: Option<[Vertex; 4]>,
}

impl ComplexDoc {
    pub fn of(c: &GridComplex) -> Self {
        ComplexDoc {
            tiles: c.tiles().to_vec(),
            corners: Some(c.corners()),
        }
    }

    pub fn build(&self) -> Result<GridComplex, ComplexError> {
        match self.corners {
            Some(corners) => GridComplex::new(self.tiles.iter().copied(), corners),
            None => GridComplex::with_default_corners(self.tiles.iter().copied()),
        }
    }
}

/// Either kind of input accepted by the tools.
#[derive(Debug, Clone)]
pub enum Input {
    Complex(GridComplex),
    Dumbbell(Dumbbell),
}

impl Input {
    pub fn complex(&self) -> &GridComplex {
        match self {
            Input::Complex(c) => c,
            Input::Dumbbell(d) => d.complex(),
        }
    }

    pub fn subdivide_times(&self, level: u32) -> Input {
        match self {
            Input::Complex(c) => Input::Complex((0..level).fold(c.clone(), |c, _| c.subdivide())),
            Input::Dumbbell(d) => Input::Dumbbell(d.subdivide_times(level)),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Input::Complex(c) => serde_json::to_value(ComplexDoc::of(c)),
            Input::Dumbbell(d) => serde_json::to_value(d.spec()),
        }
        .expect("documents serialize")
    }
}

/// A document with a `"bar"` key is a dumbbell, anything else a complex.
pub fn parse_input(text: &str) -> Result<Input, IoError> {
    let v: Value = serde_json::from_str(text)?;
    if v.get("bar").is_some() {
        let spec: DumbbellSpec = serde_json::from_value(v)?;
        Ok(Input::Dumbbell(Dumbbell::new(&spec)?))
    } else {
        let doc: ComplexDoc = serde_json::from_value(v)?;
        Ok(Input::Complex(doc.build()?))
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, IoError> {
    Rational::from_str(s.trim()).map_err(|_| IoError::BadRational(s.to_string()))
}

fn rational_of(v: &Value) -> Result<Rational, IoError> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().unwrap().into())),
        other => Err(IoError::BadRational(other.to_string())),
    }
}

/// Reads `["p/q", ..]`; plain JSON integers are accepted as well.
pub fn parse_vector(text: &str) -> Result<WeightVector, IoError> {
    let v: Value = serde_json::from_str(text)?;
    let items = v
        .as_array()
        .ok_or_else(|| IoError::Shape("expected an array".into()))?;
    let comps = items
        .iter()
        .map(rational_of)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(WeightVector::new(comps)?)
}

pub fn vector_json(x: &WeightVector) -> Value {
    Value::Array(
        x.components()
            .iter()
            .map(|q| Value::String(q.to_string()))
            .collect(),
    )
}

/// Matrix as an array of columns.
pub fn matrix_json(columns: &[WeightVector]) -> Value {
    Value::Array(columns.iter().map(vector_json).collect())
}

/// `{"height", "area", "modulus", "weights": [{"tile", "w", "w_exact"?}], ..}`.
pub fn result_json(c: &GridComplex, r: &ModulusResult) -> Value {
    let exact = r.rho.exact();
    let weights: Vec<Value> = c
        .tiles()
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut w = json!({ "tile": [t.col, t.row], "w": r.rho.values()[i] });
            if let Some(e) = exact {
                w["w_exact"] = Value::String(e[i].to_string());
            }
            w
        })
        .collect();
    let mut doc = json!({
        "height": r.height,
        "area": r.area,
        "modulus": r.modulus,
        "iterations": r.iterations,
        "feasibility_residual": r.feasibility_residual,
        "kkt_residual": r.kkt_residual,
        "weights": weights,
    });
    if let Some(e) = &r.exact {
        doc["height_exact"] = Value::String(e.height.to_string());
        doc["area_exact"] = Value::String(e.area.to_string());
        doc["modulus_exact"] = Value::String(e.modulus.to_string());
    }
    doc
}

/// Reads the weights of a result document (exact when every entry carries
/// `w_exact`).
pub fn parse_weights(c: &GridComplex, text: &str) -> Result<WeightFunction, IoError> {
    #[derive(Deserialize)]
    struct Entry {
        tile: TileId,
        w: f64,
        w_exact: Option<String>,
    }
    #[derive(Deserialize)]
    struct Doc {
        weights: Vec<Entry>,
    }
    let doc: Doc = serde_json::from_str(text)?;
    if doc.weights.iter().all(|e| e.w_exact.is_some()) {
        let mut exact = vec![None; c.len()];
        for e in &doc.weights {
            let i = c.index_of(e.tile).ok_or(WeightError::UnknownTile(e.tile))?;
            exact[i] = Some(parse_rational(e.w_exact.as_deref().unwrap())?);
        }
        let values = exact
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or(WeightError::MissingTile(c.tile(i))))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(WeightFunction::new_exact(c, values)?);
    }
    let map = doc.weights.iter().map(|e| (e.tile, e.w)).collect();
    Ok(WeightFunction::from_map(c, &map)?)
}
