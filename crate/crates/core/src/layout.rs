//! Squared rectangles from optimal weight functions.
//!
//! Each tile of positive weight becomes a square whose side is its weight.
//! The square's top sits at the least weighted length of a fat path from the
//! top arc to the tile (excluding the tile), and its left side at the least
//! weighted length of a skinny chain from the left arc to the tile (excluding
//! the tile). The rectangle is `A / H` wide and `H` high; `y` grows downward.

use std::fmt::Write as _;
use std::path::Path;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{to_f64, Rational};
use crate::grid::{node_weighted_dijkstra, GridComplex, PathWeight, Side, TileId};
use crate::solver::ModulusResult;
use crate::weights::{area, exact_area, exact_height, height};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Square {
    pub tile: TileId,
    pub x: f64,
    pub y: f64,
    #[serde(rename = "s")]
    pub side: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSquare {
    pub tile: TileId,
    pub x: Rational,
    pub y: Rational,
    pub side: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactLayout {
    pub width: Rational,
    pub height: Rational,
    pub squares: Vec<ExactSquare>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SquaredLayout {
    pub width: f64,
    pub height: f64,
    /// Tiles of positive weight, in tile order.
    pub squares: Vec<Square>,
    /// Zero-weight tiles, placed as points.
    pub collapsed: Vec<Square>,
    pub exact: Option<ExactLayout>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutReport {
    /// `|sum of squared sides - width * height|`.
    pub area_residual: f64,
    /// Largest overlap area of two squares.
    pub max_overlap: f64,
    /// Largest distance by which a square leaves the rectangle.
    pub max_excess: f64,
    /// Sample points of the grid covered by no square.
    pub uncovered_samples: usize,
    pub samples_per_side: usize,
    /// In exact mode: area equality, containment and disjoint interiors
    /// checked with rational arithmetic.
    pub exact_ok: Option<bool>,
    pub tolerance: f64,
}

impl LayoutReport {
    pub fn passed(&self) -> bool {
        self.area_residual <= self.tolerance
            && self.max_overlap <= self.tolerance
            && self.max_excess <= self.tolerance
            && self.uncovered_samples == 0
            && self.exact_ok != Some(false)
    }
}

#[derive(Debug, Error)]
pub enum LayoutError {
    #[error("layout failed validation: {0:?}")]
    NotOptimal(Box<LayoutReport>),
    #[error("i/o failure: {0}")]
    IoFailure(#[from] std::io::Error),
    #[error("malformed layout document: {0}")]
    Malformed(String),
}

pub const DEFAULT_SAMPLES: usize = 512;

/// Places the squares and validates the result; a layout that fails
/// validation is returned inside the error.
pub fn layout_squares(
    c: &GridComplex,
    r: &ModulusResult,
    tol: f64,
) -> Result<SquaredLayout, LayoutError> {
    let layout = place(c, r);
    let report = validate_layout(&layout, tol, DEFAULT_SAMPLES);
    if report.passed() {
        Ok(layout)
    } else {
        Err(LayoutError::NotOptimal(Box::new(report)))
    }
}

/// Coordinates for every tile, without validation.
pub fn place(c: &GridComplex, r: &ModulusResult) -> SquaredLayout {
    let rho = r.rho.values();
    let ys = offsets(c.fat_adjacency(), rho, c.side_tiles(Side::Top));
    let xs = offsets(c.skinny_adjacency(), rho, c.side_touching_tiles(Side::Left));
    let h = height(c, &r.rho);
    let a = area(&r.rho);
    let mut squares = Vec::new();
    let mut collapsed = Vec::new();
    for (i, &t) in c.tiles().iter().enumerate() {
        let sq = Square {
            tile: t,
            x: xs[i],
            y: ys[i],
            side: rho[i],
        };
        if rho[i] > 0.0 {
            squares.push(sq);
        } else {
            collapsed.push(sq);
        }
    }
    let exact = r.rho.exact().map(|e| {
        let ys = offsets(c.fat_adjacency(), e, c.side_tiles(Side::Top));
        let xs = offsets(c.skinny_adjacency(), e, c.side_touching_tiles(Side::Left));
        let height = exact_height(c, e);
        let width = exact_area(e) / &height;
        let squares = c
            .tiles()
            .iter()
            .enumerate()
            .filter(|(i, _)| e[*i].is_positive())
            .map(|(i, &t)| ExactSquare {
                tile: t,
                x: xs[i].clone(),
                y: ys[i].clone(),
                side: e[i].clone(),
            })
            .collect();
        ExactLayout {
            width,
            height,
            squares,
        }
    });
    SquaredLayout {
        width: a / h,
        height: h,
        squares,
        collapsed,
        exact,
    }
}

fn offsets<W: PathWeight + std::ops::Sub<Output = W>>(
    adj: &[Vec<usize>],
    w: &[W],
    sources: &[usize],
) -> Vec<W> {
    let sp = node_weighted_dijkstra(adj, w, sources);
    sp.dist
        .into_iter()
        .zip(w)
        .map(|(d, wi)| d.expect("complex is connected") - wi.clone())
        .collect()
}

pub fn validate_layout(l: &SquaredLayout, tol: f64, samples: usize) -> LayoutReport {
    let total: f64 = l.squares.iter().map(|s| s.side * s.side).sum();
    let area_residual = (total - l.width * l.height).abs();
    let max_excess = l
        .squares
        .iter()
        .flat_map(|s| [-s.x, -s.y, s.x + s.side - l.width, s.y + s.side - l.height])
        .fold(0.0, f64::max);
    let max_overlap = max_overlap(&l.squares);
    let uncovered_samples = uncovered(l, samples, tol);
    let exact_ok = l.exact.as_ref().map(exact_check);
    LayoutReport {
        area_residual,
        max_overlap,
        max_excess,
        uncovered_samples,
        samples_per_side: samples,
        exact_ok,
        tolerance: tol,
    }
}

fn max_overlap(squares: &[Square]) -> f64 {
    let mut order: Vec<&Square> = squares.iter().collect();
    order.sort_by(|a, b| a.x.total_cmp(&b.x));
    let mut worst: f64 = 0.0;
    for (i, a) in order.iter().enumerate() {
        let right = a.x + a.side;
        for b in order[i + 1..].iter().take_while(|b| b.x < right) {
            let w = right.min(b.x + b.side) - a.x.max(b.x);
            let h = (a.y + a.side).min(b.y + b.side) - a.y.max(b.y);
            if w > 0.0 && h > 0.0 {
                worst = worst.max(w * h);
            }
        }
    }
    worst
}

/// Counts grid cell centres covered by no square, allowing `tol` slack.
fn uncovered(l: &SquaredLayout, samples: usize, tol: f64) -> usize {
    if samples == 0 || l.width <= 0.0 || l.height <= 0.0 {
        return 0;
    }
    let mut covered = vec![false; samples * samples];
    let (dx, dy) = (l.width / samples as f64, l.height / samples as f64);
    // indices k whose cell centre (k + 1/2) * step lies in [lo - tol, hi + tol]
    let range = |lo: f64, hi: f64, step: f64| {
        let first = ((lo - tol) / step - 0.5).ceil().clamp(0.0, samples as f64);
        let end = (((hi + tol) / step - 0.5).floor() + 1.0).clamp(0.0, samples as f64);
        first as usize..(end as usize).max(first as usize)
    };
    for s in &l.squares {
        let cols = range(s.x, s.x + s.side, dx);
        for j in range(s.y, s.y + s.side, dy) {
            covered[j * samples + cols.start..j * samples + cols.end].fill(true);
        }
    }
    covered.iter().filter(|c| !**c).count()
}

fn exact_check(e: &ExactLayout) -> bool {
    let total = e
        .squares
        .iter()
        .fold(Rational::zero(), |a, s| a + &s.side * &s.side);
    if total != &e.width * &e.height {
        return false;
    }
    let inside = e.squares.iter().all(|s| {
        !s.x.is_negative()
            && !s.y.is_negative()
            && &s.x + &s.side <= e.width
            && &s.y + &s.side <= e.height
    });
    if !inside {
        return false;
    }
    let mut order: Vec<&ExactSquare> = e.squares.iter().collect();
    order.sort_by(|a, b| a.x.cmp(&b.x));
    for (i, a) in order.iter().enumerate() {
        let right = &a.x + &a.side;
        for b in order[i + 1..].iter().take_while(|b| b.x < right) {
            let w = right.clone().min(&b.x + &b.side) - a.x.clone().max(b.x.clone());
            let h = (&a.y + &a.side).min(&b.y + &b.side) - a.y.clone().max(b.y.clone());
            if w.is_positive() && h.is_positive() {
                return false;
            }
        }
    }
    // disjoint interiors inside the rectangle with equal total area tile it
    true
}

#[derive(Serialize, Deserialize)]
struct LayoutDoc {
    rect: [f64; 2],
    squares: Vec<Square>,
}

/// JSON document `{"rect": [w, h], "squares": [{"tile", "x", "y", "s"}]}`;
/// zero-weight tiles appear with `s = 0`.
pub fn emit_json(l: &SquaredLayout) -> serde_json::Value {
    let mut squares: Vec<Square> = l.squares.iter().chain(&l.collapsed).copied().collect();
    squares.sort_by_key(|s| s.tile);
    serde_json::to_value(LayoutDoc {
        rect: [l.width, l.height],
        squares,
    })
    .expect("layout serializes")
}

pub fn parse_json(v: &serde_json::Value) -> Result<SquaredLayout, LayoutError> {
    let doc: LayoutDoc =
        serde_json::from_value(v.clone()).map_err(|e| LayoutError::Malformed(e.to_string()))?;
    let (squares, collapsed) = doc.squares.into_iter().partition(|s| s.side > 0.0);
    Ok(SquaredLayout {
        width: doc.rect[0],
        height: doc.rect[1],
        squares,
        collapsed,
        exact: None,
    })
}

/// Static SVG with the rectangle scaled to `width_px` pixels across.
pub fn render_svg(l: &SquaredLayout, width_px: f64, labels: bool) -> String {
    let scale = if l.width > 0.0 {
        width_px / l.width
    } else {
        1.0
    };
    let (w, h) = (l.width * scale, l.height * scale);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.3}" height="{:.3}" viewBox="-1 -1 {:.3} {:.3}">"#,
        w,
        h,
        w + 2.0,
        h + 2.0
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{w:.3}" height="{h:.3}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    for s in &l.squares {
        let (x, y, side) = (s.x * scale, s.y * scale, s.side * scale);
        let _ = writeln!(
            out,
            r##"<rect x="{x:.3}" y="{y:.3}" width="{side:.3}" height="{side:.3}" fill="#dde6f0" stroke="black" stroke-width="1"/>"##
        );
        if labels && side >= 24.0 {
            let _ = writeln!(
                out,
                r#"<text x="{:.3}" y="{:.3}" font-size="{:.1}" text-anchor="middle" dominant-baseline="middle">{},{}</text>"#,
                x + side / 2.0,
                y + side / 2.0,
                (side / 4.0).min(14.0),
                s.tile.col,
                s.tile.row
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

pub fn emit_svg(l: &SquaredLayout, path: &Path, labels: bool) -> Result<(), LayoutError> {
    std::fs::write(path, render_svg(l, 800.0, labels))?;
    Ok(())
}

/// Converts an exact layout to floating point.
pub fn to_float(e: &ExactLayout) -> SquaredLayout {
    SquaredLayout {
        width: to_f64(&e.width),
        height: to_f64(&e.height),
        squares: e
            .squares
            .iter()
            .map(|s| Square {
                tile: s.tile,
                x: to_f64(&s.x),
                y: to_f64(&s.y),
                side: to_f64(&s.side),
            })
            .collect(),
        collapsed: Vec::new(),
        exact: Some(e.clone()),
    }
}
