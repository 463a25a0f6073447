//! Dumbbells: a left ball and a right ball joined by a long, narrow bar.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{ComplexError, GridComplex, Side, TileId, Vertex};
use crate::weights::{height, WeightFunction};

/// The bar rectangle: `width` columns and `height` rows of tiles with lower-left
/// lattice corner `origin`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bar {
    pub origin: [i64; 2],
    pub width: i64,
    pub height: i64,
}

impl Bar {
    pub fn contains(&self, t: TileId) -> bool {
        let [x, y] = self.origin;
        (x..x + self.width).contains(&t.col) && (y..y + self.height).contains(&t.row)
    }

    pub fn tiles(&self) -> impl Iterator<Item = TileId> + '_ {
        let [x, y] = self.origin;
        (x..x + self.width).flat_map(move |c| (y..y + self.height).map(move |r| TileId::new(c, r)))
    }

    /// Bar columns left to right, each listed top to bottom.
    pub fn columns(&self) -> Vec<Vec<TileId>> {
        let [x, y] = self.origin;
        (x..x + self.width)
            .map(|c| {
                (y..y + self.height)
                    .rev()
                    .map(|r| TileId::new(c, r))
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DumbbellSpec {
    pub bar: Bar,
    #[serde(default)]
    pub left_ball: Vec<TileId>,
    #[serde(default)]
    pub right_ball: Vec<TileId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corners: Option<[Vertex; 4]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DumbbellError {
    #[error(
        "bar is {width} wide and {height} high; it must be at least six times as wide as high"
    )]
    BarTooShort { width: i64, height: i64 },
    #[error("bar must contain at least one tile")]
    EmptyBar,
    #[error("the {0:?} ball does not meet the bar in a connected part of its side")]
    AttachmentNotConnected(Side),
    #[error("ball tile {0} touches the bar away from its end")]
    BallOffEnd(TileId),
    #[error("tile {0} is listed twice")]
    Overlap(TileId),
    #[error("not a disk: {0}")]
    NotADisk(#[from] ComplexError),
}

/// A validated dumbbell. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Dumbbell {
    complex: GridComplex,
    bar: Bar,
    left_ball: BTreeSet<TileId>,
    right_ball: BTreeSet<TileId>,
}

/// Result of a virtual bar uniformity check.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformityReport {
    pub qualifying_tiles: BTreeSet<TileId>,
    pub height: f64,
    /// Largest `|rho(t) - H / n|` over the qualifying tiles.
    pub max_deviation: f64,
    pub violating_tiles: BTreeSet<TileId>,
    pub tolerance: f64,
}

impl UniformityReport {
    pub fn passed(&self) -> bool {
        self.violating_tiles.is_empty()
    }
}

impl Dumbbell {
    pub fn new(spec: &DumbbellSpec) -> Result<Self, DumbbellError> {
        let bar = spec.bar;
        if bar.width < 1 || bar.height < 1 {
            return Err(DumbbellError::EmptyBar);
        }
        if bar.width < 6 * bar.height {
            return Err(DumbbellError::BarTooShort {
                width: bar.width,
                height: bar.height,
            });
        }
        let mut seen: BTreeSet<TileId> = bar.tiles().collect();
        for t in spec.left_ball.iter().chain(&spec.right_ball) {
            if !seen.insert(*t) {
                return Err(DumbbellError::Overlap(*t));
            }
        }
        let left: BTreeSet<TileId> = spec.left_ball.iter().copied().collect();
        let right: BTreeSet<TileId> = spec.right_ball.iter().copied().collect();
        check_attachment(&bar, &left, Side::Left)?;
        check_attachment(&bar, &right, Side::Right)?;

        let tiles: Vec<TileId> = seen.into_iter().collect();
        let complex = match spec.corners {
            Some(corners) => GridComplex::new(tiles, corners)?,
            None => GridComplex::with_default_corners(tiles)?,
        };
        Ok(Dumbbell {
            complex,
            bar,
            left_ball: left,
            right_ball: right,
        })
    }

    pub fn complex(&self) -> &GridComplex {
        &self.complex
    }

    pub fn bar(&self) -> Bar {
        self.bar
    }

    /// Bar height `n`.
    pub fn bar_height(&self) -> i64 {
        self.bar.height
    }

    pub fn left_ball(&self) -> &BTreeSet<TileId> {
        &self.left_ball
    }

    pub fn right_ball(&self) -> &BTreeSet<TileId> {
        &self.right_ball
    }

    pub fn spec(&self) -> DumbbellSpec {
        DumbbellSpec {
            bar: self.bar,
            left_ball: self.left_ball.iter().copied().collect(),
            right_ball: self.right_ball.iter().copied().collect(),
            corners: Some(self.complex.corners()),
        }
    }

    /// Skinny path distance from each bar tile to the balls, measured as the
    /// fewest steps from the tile to a tile that meets a ball. `None` when both
    /// balls are empty.
    pub fn ball_distances(&self) -> Vec<(TileId, Option<usize>)> {
        let c = &self.complex;
        let balls: Vec<usize> = self
            .left_ball
            .iter()
            .chain(&self.right_ball)
            .filter_map(|t| c.index_of(*t))
            .collect();
        let mut meeting: BTreeSet<usize> = balls.iter().copied().collect();
        for &b in &balls {
            meeting.extend(c.skinny_adjacency()[b].iter().copied());
        }
        let sources: Vec<usize> = meeting.into_iter().collect();
        let dist = c.skinny_hops_from(&sources);
        self.bar
            .tiles()
            .map(|t| (t, dist[c.index_of(t).expect("bar tile in complex")]))
            .collect()
    }

    /// Bar tiles whose skinny path distance to the balls is at least `3n`.
    pub fn middle_tiles(&self) -> BTreeSet<TileId> {
        self.middle_tiles_at(3 * self.bar.height as usize)
    }

    pub fn middle_tiles_at(&self, threshold: usize) -> BTreeSet<TileId> {
        self.ball_distances()
            .into_iter()
            .filter(|(_, d)| d.is_none_or(|d| d >= threshold))
            .map(|(t, _)| t)
            .collect()
    }

    /// Compares `rho` on the middle tiles against `H_rho / n`; passes when every
    /// deviation is at most `tol * H_rho`.
    pub fn check_virtually_bar_uniform(&self, rho: &WeightFunction, tol: f64) -> UniformityReport {
        self.check_uniform_on(self.middle_tiles(), rho, tol)
    }

    /// Same comparison on an arbitrary set of tiles.
    pub fn check_uniform_on(
        &self,
        tiles: BTreeSet<TileId>,
        rho: &WeightFunction,
        tol: f64,
    ) -> UniformityReport {
        let h = height(&self.complex, rho);
        let target = h / self.bar.height as f64;
        let mut max_deviation: f64 = 0.0;
        let mut violating = BTreeSet::new();
        for &t in &tiles {
            let v = rho.get(&self.complex, t).expect("bar tile in complex");
            let d = (v - target).abs();
            max_deviation = max_deviation.max(d);
            if d > tol * h {
                violating.insert(t);
            }
        }
        UniformityReport {
            qualifying_tiles: tiles,
            height: h,
            max_deviation,
            violating_tiles: violating,
            tolerance: tol,
        }
    }

    /// Binary subdivision; the result has bar height `2n` and bar width `2w`.
    pub fn subdivide(&self) -> Dumbbell {
        let children = |t: &TileId| {
            let (c, r) = (2 * t.col, 2 * t.row);
            [
                TileId::new(c, r),
                TileId::new(c + 1, r),
                TileId::new(c, r + 1),
                TileId::new(c + 1, r + 1),
            ]
        };
        let bar = Bar {
            origin: [2 * self.bar.origin[0], 2 * self.bar.origin[1]],
            width: 2 * self.bar.width,
            height: 2 * self.bar.height,
        };
        Dumbbell {
            complex: self.complex.subdivide(),
            bar,
            left_ball: self.left_ball.iter().flat_map(children).collect(),
            right_ball: self.right_ball.iter().flat_map(children).collect(),
        }
    }

    pub fn subdivide_times(&self, level: u32) -> Dumbbell {
        (0..level).fold(self.clone(), |d, _| d.subdivide())
    }
}

/// A ball may touch the bar only at the bar's own end, and the contact must be
/// a connected piece of that end's side.
fn check_attachment(bar: &Bar, ball: &BTreeSet<TileId>, side: Side) -> Result<(), DumbbellError> {
    let [x0, y0] = bar.origin;
    let (x1, y1) = (x0 + bar.width, y0 + bar.height);
    let end_x = if side == Side::Left { x0 } else { x1 };
    // rows of the side segment covered by shared edges, and touched vertices
    let mut edge_rows = BTreeSet::new();
    let mut points = BTreeSet::new();
    for &t in ball {
        let edge_adjacent = [(-1, 0), (1, 0), (0, -1), (0, 1)]
            .iter()
            .any(|(dc, dr)| bar.contains(TileId::new(t.col + dc, t.row + dr)));
        let outside_end = if side == Side::Left {
            t.col == x0 - 1
        } else {
            t.col == x1
        };
        if edge_adjacent && !(outside_end && (y0..y1).contains(&t.row)) {
            return Err(DumbbellError::BallOffEnd(t));
        }
        for v in t.vertices() {
            let on_bar_boundary = (x0..=x1).contains(&v.x) && (y0..=y1).contains(&v.y);
            if on_bar_boundary {
                if v.x != end_x {
                    return Err(DumbbellError::BallOffEnd(t));
                }
                points.insert(v.y);
            }
        }
        if outside_end && (y0..y1).contains(&t.row) {
            edge_rows.insert(t.row);
        }
    }
    if points.is_empty() {
        return Ok(());
    }
    // the contact set is connected iff every gap between consecutive touched
    // points is spanned by a shared edge
    let pts: Vec<i64> = points.into_iter().collect();
    for w in pts.windows(2) {
        if (w[0]..w[1]).any(|r| !edge_rows.contains(&r)) {
            return Err(DumbbellError::AttachmentNotConnected(side));
        }
    }
    Ok(())
}
