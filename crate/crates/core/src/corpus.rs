//! Named fixtures and seeded random generators of quadrilaterals and dumbbells.

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::dumbbell::{Bar, Dumbbell, DumbbellSpec};
use crate::grid::{GridComplex, TileId, Vertex};

fn block(cols: std::ops::Range<i64>, rows: std::ops::Range<i64>) -> Vec<TileId> {
    cols.flat_map(|c| rows.clone().map(move |r| TileId::new(c, r)))
        .collect()
}

/// Diamond of tiles with the given radius around `centre`.
fn diamond(centre: TileId, radius: i64) -> Vec<TileId> {
    block(
        centre.col - radius..centre.col + radius + 1,
        centre.row - radius..centre.row + radius + 1,
    )
    .into_iter()
    .filter(|t| (t.col - centre.col).abs() + (t.row - centre.row).abs() <= radius)
    .collect()
}

/// Bar of width 8 and height 1 with a diamond ball of radius 2 on each end,
/// each meeting the bar at its tip. The left side of the quadrilateral is the
/// left side of the left ball.
pub fn diamond_dumbbell_spec() -> DumbbellSpec {
    DumbbellSpec {
        bar: Bar {
            origin: [0, 0],
            width: 8,
            height: 1,
        },
        left_ball: diamond(TileId::new(-3, 0), 2),
        right_ball: diamond(TileId::new(10, 0), 2),
        corners: None,
    }
}

pub fn diamond_dumbbell() -> Dumbbell {
    Dumbbell::new(&diamond_dumbbell_spec()).expect("fixture is a dumbbell")
}

/// A vertical domino with one tile attached to the right of its lower half.
pub fn ell() -> GridComplex {
    GridComplex::with_default_corners([TileId::new(0, 0), TileId::new(0, 1), TileId::new(1, 0)])
        .expect("fixture is a quadrilateral")
}

/// The bar of [`diamond_dumbbell`] with a vertical domino at each end; the left and right
/// sides of the quadrilateral are the tops of the dominoes.
pub fn domino_dumbbell_spec() -> DumbbellSpec {
    DumbbellSpec {
        bar: Bar {
            origin: [0, 0],
            width: 8,
            height: 1,
        },
        left_ball: vec![TileId::new(-1, 0), TileId::new(-1, 1)],
        right_ball: vec![TileId::new(8, 0), TileId::new(8, 1)],
        corners: Some([
            Vertex::new(0, 2),
            Vertex::new(8, 2),
            Vertex::new(9, 2),
            Vertex::new(-1, 2),
        ]),
    }
}

pub fn domino_dumbbell() -> Dumbbell {
    Dumbbell::new(&domino_dumbbell_spec()).expect("fixture is a dumbbell")
}

/// Boundary vertices in clockwise order starting at the first corner.
pub fn boundary_vertices(c: &GridComplex) -> Vec<Vertex> {
    let arcs = c.arcs();
    arcs.top
        .iter()
        .chain(&arcs.right)
        .chain(&arcs.bottom)
        .chain(&arcs.left)
        .map(|e| e.from)
        .collect()
}

/// Grows a random edge-connected set of up to `size` tiles around `seed`.
fn grow(
    rng: &mut StdRng,
    size: usize,
    allowed: impl Fn(TileId) -> bool,
    seed: TileId,
) -> BTreeSet<TileId> {
    let mut tiles: BTreeSet<TileId> = [seed].into();
    let mut attempts = 0;
    while tiles.len() < size && attempts < 100 * size {
        attempts += 1;
        let from = *tiles.iter().collect::<Vec<_>>().choose(rng).unwrap();
        let (dc, dr) = [(1, 0), (-1, 0), (0, 1), (0, -1)][rng.gen_range(0..4)];
        let t = TileId::new(from.col + dc, from.row + dr);
        if allowed(t) {
            tiles.insert(t);
        }
    }
    tiles
}

/// A random polyomino with at most `max_tiles` tiles and random corners.
pub fn random_quadrilateral(rng: &mut StdRng, max_tiles: usize) -> GridComplex {
    loop {
        let size = rng.gen_range(1..=max_tiles);
        let tiles: Vec<TileId> = grow(rng, size, |_| true, TileId::new(0, 0))
            .into_iter()
            .collect();
        let Ok(base) = GridComplex::with_default_corners(tiles.clone()) else {
            continue;
        };
        let boundary = boundary_vertices(&base);
        let mut picks: Vec<usize> = rand::seq::index::sample(rng, boundary.len(), 4).into_vec();
        picks.sort_unstable();
        let corners = [
            boundary[picks[0]],
            boundary[picks[1]],
            boundary[picks[2]],
            boundary[picks[3]],
        ];
        if let Ok(c) = GridComplex::new(tiles, corners) {
            return c;
        }
    }
}

/// `count` random quadrilaterals from a fixed seed.
pub fn quadrilateral_corpus(seed: u64, count: usize, max_tiles: usize) -> Vec<GridComplex> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_quadrilateral(&mut rng, max_tiles))
        .collect()
}

/// A random dumbbell with bar height in `1..=3`, bar width between six and
/// twelve times the height, and balls of at most `max_ball` tiles each
/// (possibly empty).
pub fn random_dumbbell(rng: &mut StdRng, max_ball: usize) -> Dumbbell {
    loop {
        let n = rng.gen_range(1..=3i64);
        let w = rng.gen_range(6 * n..=12 * n);
        let ball = |left: bool, rng: &mut StdRng| -> Vec<TileId> {
            let size = rng.gen_range(0..=max_ball);
            if size == 0 {
                return Vec::new();
            }
            let row = rng.gen_range(0..n);
            let (seed, allowed): (TileId, Box<dyn Fn(TileId) -> bool>) = if left {
                (TileId::new(-1, row), Box::new(|t: TileId| t.col < 0))
            } else {
                (TileId::new(w, row), Box::new(move |t: TileId| t.col >= w))
            };
            grow(rng, size, allowed, seed).into_iter().collect()
        };
        let spec = DumbbellSpec {
            bar: Bar {
                origin: [0, 0],
                width: w,
                height: n,
            },
            left_ball: ball(true, rng),
            right_ball: ball(false, rng),
            corners: None,
        };
        if let Ok(d) = Dumbbell::new(&spec) {
            return d;
        }
    }
}

pub fn dumbbell_corpus(seed: u64, count: usize, max_ball: usize) -> Vec<Dumbbell> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_dumbbell(&mut rng, max_ball))
        .collect()
}
