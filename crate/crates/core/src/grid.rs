//! Square-tiled quadrilaterals.
//!
//! A [`GridComplex`] is a finite, edge-connected union of unit lattice squares
//! whose union is a closed disk, together with four boundary corners that cut
//! the boundary circuit into the top, right, bottom and left arcs.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::ops::Add;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A unit square with lower-left corner `(col, row)`.
///
/// Ordering is lexicographic by `(col, row)`; this order is also the
/// tie-breaking order used by every shortest-path search in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(i64, i64)", into = "(i64, i64)")]
pub struct TileId {
    pub col: i64,
    pub row: i64,
}

impl TileId {
    pub const fn new(col: i64, row: i64) -> Self {
        TileId { col, row }
    }

    /// The four lattice vertices of the tile.
    pub fn vertices(self) -> [Vertex; 4] {
        let (c, r) = (self.col, self.row);
        [
            Vertex::new(c, r),
            Vertex::new(c + 1, r),
            Vertex::new(c + 1, r + 1),
            Vertex::new(c, r + 1),
        ]
    }

    /// Boundary edges of the tile, oriented clockwise (interior on the right).
    fn clockwise_edges(self) -> [(Edge, TileId); 4] {
        let (c, r) = (self.col, self.row);
        [
            // top, moving east
            (
                Edge::new(Vertex::new(c, r + 1), Vertex::new(c + 1, r + 1)),
                TileId::new(c, r + 1),
            ),
            // right, moving south
            (
                Edge::new(Vertex::new(c + 1, r + 1), Vertex::new(c + 1, r)),
                TileId::new(c + 1, r),
            ),
            // bottom, moving west
            (
                Edge::new(Vertex::new(c + 1, r), Vertex::new(c, r)),
                TileId::new(c, r - 1),
            ),
            // left, moving north
            (
                Edge::new(Vertex::new(c, r), Vertex::new(c, r + 1)),
                TileId::new(c - 1, r),
            ),
        ]
    }

    fn edge_offsets(self) -> [TileId; 4] {
        let (c, r) = (self.col, self.row);
        [
            TileId::new(c - 1, r),
            TileId::new(c, r - 1),
            TileId::new(c, r + 1),
            TileId::new(c + 1, r),
        ]
    }

    fn king_offsets(self) -> [TileId; 8] {
        let (c, r) = (self.col, self.row);
        [
            TileId::new(c - 1, r - 1),
            TileId::new(c - 1, r),
            TileId::new(c - 1, r + 1),
            TileId::new(c, r - 1),
            TileId::new(c, r + 1),
            TileId::new(c + 1, r - 1),
            TileId::new(c + 1, r),
            TileId::new(c + 1, r + 1),
        ]
    }
}

impl fmt::Display for TileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.col, self.row)
    }
}

/// A lattice point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(i64, i64)", into = "(i64, i64)")]
pub struct Vertex {
    pub x: i64,
    pub y: i64,
}

impl Vertex {
    pub const fn new(x: i64, y: i64) -> Self {
        Vertex { x, y }
    }
}

impl From<(i64, i64)> for TileId {
    fn from((col, row): (i64, i64)) -> Self {
        TileId { col, row }
    }
}

impl From<TileId> for (i64, i64) {
    fn from(t: TileId) -> Self {
        (t.col, t.row)
    }
}

impl From<(i64, i64)> for Vertex {
    fn from((x, y): (i64, i64)) -> Self {
        Vertex { x, y }
    }
}

impl From<Vertex> for (i64, i64) {
    fn from(v: Vertex) -> Self {
        (v.x, v.y)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A directed unit lattice edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: Vertex,
    pub to: Vertex,
}

impl Edge {
    const fn new(from: Vertex, to: Vertex) -> Self {
        Edge { from, to }
    }
}

/// The four sides of a quadrilateral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Top,
    Right,
    Bottom,
    Left,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Top, Side::Right, Side::Bottom, Side::Left];

    fn index(self) -> usize {
        match self {
            Side::Top => 0,
            Side::Right => 1,
            Side::Bottom => 2,
            Side::Left => 3,
        }
    }
}

/// Boundary arcs in clockwise order: top runs a→b, right b→c, bottom c→d, left d→a.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryArcs {
    pub top: Vec<Edge>,
    pub right: Vec<Edge>,
    pub bottom: Vec<Edge>,
    pub left: Vec<Edge>,
}

impl BoundaryArcs {
    pub fn side(&self, side: Side) -> &[Edge] {
        match side {
            Side::Top => &self.top,
            Side::Right => &self.right,
            Side::Bottom => &self.bottom,
            Side::Left => &self.left,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("a complex needs at least one tile")]
    Empty,
    #[error("duplicate tile {0}")]
    DuplicateTile(TileId),
    #[error("tiles are not edge-connected")]
    NotConnected,
    #[error("union of tiles is not a disk (V - E + F = {euler})")]
    HasHoles { euler: i64 },
    #[error("corner {0} is not a boundary vertex")]
    CornersNotOnBoundary(Vertex),
    #[error("corners are not in clockwise order along the boundary")]
    CornersNotClockwise,
    #[error("the {0:?} side has zero length")]
    DegenerateSide(Side),
    #[error("tile {0} is not in the complex")]
    UnknownTile(TileId),
}

/// A validated square-tiled quadrilateral. Immutable after construction.
#[derive(Debug, Clone)]
pub struct GridComplex {
    tiles: Vec<TileId>,
    index: HashMap<TileId, usize>,
    corners: [Vertex; 4],
    arcs: BoundaryArcs,
    // tiles owning at least one boundary edge of each arc, sorted by index
    arc_tiles: [Vec<usize>; 4],
    // tiles containing at least one point of each arc
    arc_touching: [Vec<usize>; 4],
    fat: Vec<Vec<usize>>,
    skinny: Vec<Vec<usize>>,
}

impl GridComplex {
    /// Validates `tiles` and `corners = (a, b, c, d)` and computes the boundary arcs.
    pub fn new(
        tiles: impl IntoIterator<Item = TileId>,
        corners: [Vertex; 4],
    ) -> Result<Self, ComplexError> {
        let mut sorted: Vec<TileId> = tiles.into_iter().collect();
        if sorted.is_empty() {
            return Err(ComplexError::Empty);
        }
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(ComplexError::DuplicateTile(w[0]));
        }
        let index: HashMap<TileId, usize> =
            sorted.iter().enumerate().map(|(i, &t)| (t, i)).collect();

        let fat: Vec<Vec<usize>> = sorted
            .iter()
            .map(|t| {
                t.edge_offsets()
                    .iter()
                    .filter_map(|n| index.get(n).copied())
                    .collect()
            })
            .collect();
        let skinny: Vec<Vec<usize>> = sorted
            .iter()
            .map(|t| {
                t.king_offsets()
                    .iter()
                    .filter_map(|n| index.get(n).copied())
                    .collect()
            })
            .collect();

        if !is_connected(&fat) {
            return Err(ComplexError::NotConnected);
        }
        let euler = euler_characteristic(&sorted);
        if euler != 1 {
            return Err(ComplexError::HasHoles { euler });
        }

        let circuit = boundary_circuit(&sorted, &index)?;
        let arcs = split_circuit(&circuit, corners)?;

        let mut owner: HashMap<Edge, usize> = HashMap::new();
        for (i, t) in sorted.iter().enumerate() {
            for (e, _) in t.clockwise_edges() {
                owner.insert(e, i);
            }
        }
        let mut arc_tiles: [Vec<usize>; 4] = Default::default();
        let mut arc_touching: [Vec<usize>; 4] = Default::default();
        for side in Side::ALL {
            let edges = arcs.side(side);
            let owned: BTreeSet<usize> = edges.iter().map(|e| owner[e]).collect();
            arc_tiles[side.index()] = owned.into_iter().collect();
            let points: HashSet<Vertex> = edges.iter().flat_map(|e| [e.from, e.to]).collect();
            arc_touching[side.index()] = sorted
                .iter()
                .enumerate()
                .filter(|(_, t)| t.vertices().iter().any(|v| points.contains(v)))
                .map(|(i, _)| i)
                .collect();
        }

        Ok(GridComplex {
            tiles: sorted,
            index,
            corners,
            arcs,
            arc_tiles,
            arc_touching,
            fat,
            skinny,
        })
    }

    /// An `cols × rows` rectangle with lower-left tile `(0, 0)` and its natural corners.
    pub fn rectangle(cols: i64, rows: i64) -> Result<Self, ComplexError> {
        let tiles = (0..cols).flat_map(|c| (0..rows).map(move |r| TileId::new(c, r)));
        GridComplex::new(
            tiles,
            [
                Vertex::new(0, rows),
                Vertex::new(cols, rows),
                Vertex::new(cols, 0),
                Vertex::new(0, 0),
            ],
        )
    }

    /// Builds a complex using the extreme-vertex corner rule: `a` and `d` are the
    /// top and bottom of the westmost boundary vertices, `b` and `c` the top and
    /// bottom of the eastmost ones.
    pub fn with_default_corners(
        tiles: impl IntoIterator<Item = TileId>,
    ) -> Result<Self, ComplexError> {
        let tiles: Vec<TileId> = tiles.into_iter().collect();
        let corners = default_corners(&tiles).ok_or(ComplexError::Empty)?;
        GridComplex::new(tiles, corners)
    }

    pub fn tiles(&self) -> &[TileId] {
        &self.tiles
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn corners(&self) -> [Vertex; 4] {
        self.corners
    }

    pub fn arcs(&self) -> &BoundaryArcs {
        &self.arcs
    }

    pub fn contains(&self, t: TileId) -> bool {
        self.index.contains_key(&t)
    }

    pub fn index_of(&self, t: TileId) -> Option<usize> {
        self.index.get(&t).copied()
    }

    pub fn tile(&self, i: usize) -> TileId {
        self.tiles[i]
    }

    /// Indices of tiles owning a boundary edge of `side`.
    pub fn side_tiles(&self, side: Side) -> &[usize] {
        &self.arc_tiles[side.index()]
    }

    /// Indices of tiles containing at least one point of `side`.
    pub fn side_touching_tiles(&self, side: Side) -> &[usize] {
        &self.arc_touching[side.index()]
    }

    /// Edge-adjacency lists by tile index.
    pub fn fat_adjacency(&self) -> &[Vec<usize>] {
        &self.fat
    }

    /// Point-adjacency (edge or vertex) lists by tile index.
    pub fn skinny_adjacency(&self) -> &[Vec<usize>] {
        &self.skinny
    }

    pub fn fat_neighbors(&self, t: TileId) -> Result<BTreeSet<TileId>, ComplexError> {
        let i = self.index_of(t).ok_or(ComplexError::UnknownTile(t))?;
        Ok(self.fat[i].iter().map(|&j| self.tiles[j]).collect())
    }

    pub fn skinny_neighbors(&self, t: TileId) -> Result<BTreeSet<TileId>, ComplexError> {
        let i = self.index_of(t).ok_or(ComplexError::UnknownTile(t))?;
        Ok(self.skinny[i].iter().map(|&j| self.tiles[j]).collect())
    }

    /// One less than the fewest tiles in a skinny chain starting at a tile of
    /// `a` and ending at a tile of `b`. `None` if either set has no tile in the
    /// complex.
    pub fn skinny_distance(&self, a: &BTreeSet<TileId>, b: &BTreeSet<TileId>) -> Option<usize> {
        let sources: Vec<usize> = a.iter().filter_map(|t| self.index_of(*t)).collect();
        let targets: HashSet<usize> = b.iter().filter_map(|t| self.index_of(*t)).collect();
        if targets.is_empty() {
            return None;
        }
        let dist = bfs(&self.skinny, &sources);
        targets.iter().filter_map(|&j| dist[j]).min()
    }

    /// Hop distances in the skinny graph from the given tile indices.
    pub fn skinny_hops_from(&self, sources: &[usize]) -> Vec<Option<usize>> {
        bfs(&self.skinny, sources)
    }

    /// Hop distances in the fat graph from the given tile indices.
    pub fn fat_hops_from(&self, sources: &[usize]) -> Vec<Option<usize>> {
        bfs(&self.fat, sources)
    }

    /// Replaces every tile by its four half-size children (at doubled coordinates).
    pub fn subdivide(&self) -> GridComplex {
        let tiles = self.tiles.iter().flat_map(|t| {
            let (c, r) = (2 * t.col, 2 * t.row);
            [
                TileId::new(c, r),
                TileId::new(c + 1, r),
                TileId::new(c, r + 1),
                TileId::new(c + 1, r + 1),
            ]
        });
        let corners = self.corners.map(|v| Vertex::new(2 * v.x, 2 * v.y));
        GridComplex::new(tiles, corners).expect("subdivision preserves validity")
    }

    /// Node-weighted shortest path in the fat graph from tiles owning an edge of
    /// `from` to tiles owning an edge of `to`. The length counts both endpoint
    /// tiles. Ties are broken by tile order.
    pub fn fat_shortest_path<W: PathWeight>(
        &self,
        weights: &[W],
        from: Side,
        to: Side,
    ) -> (W, Vec<TileId>) {
        let sp = node_weighted_dijkstra(&self.fat, weights, self.side_tiles(from));
        let target = sp.best_target(self.side_tiles(to));
        let path = sp
            .path_to(target)
            .into_iter()
            .map(|i| self.tiles[i])
            .collect();
        (sp.dist[target].clone().expect("complex is connected"), path)
    }
}

/// Lattice vertices shared by all tiles, used by [`GridComplex::with_default_corners`].
pub fn default_corners(tiles: &[TileId]) -> Option<[Vertex; 4]> {
    let verts: BTreeSet<Vertex> = tiles.iter().flat_map(|t| t.vertices()).collect();
    let min_x = verts.iter().map(|v| v.x).min()?;
    let max_x = verts.iter().map(|v| v.x).max()?;
    let west = verts.iter().filter(|v| v.x == min_x);
    let east = verts.iter().filter(|v| v.x == max_x);
    let a = *west.clone().max_by_key(|v| v.y)?;
    let d = *west.min_by_key(|v| v.y)?;
    let b = *east.clone().max_by_key(|v| v.y)?;
    let c = *east.min_by_key(|v| v.y)?;
    Some([a, b, c, d])
}

fn is_connected(adj: &[Vec<usize>]) -> bool {
    bfs(adj, &[0]).iter().all(Option::is_some)
}

fn bfs(adj: &[Vec<usize>], sources: &[usize]) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s].is_none() {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// `V - E + F` of the closed cell complex formed by the tiles.
pub fn euler_characteristic(tiles: &[TileId]) -> i64 {
    let mut verts = HashSet::new();
    let mut edges = HashSet::new();
    for t in tiles {
        let v = t.vertices();
        verts.extend(v);
        for k in 0..4 {
            let (p, q) = (v[k], v[(k + 1) % 4]);
            edges.insert(if p < q { (p, q) } else { (q, p) });
        }
    }
    verts.len() as i64 - edges.len() as i64 + tiles.len() as i64
}

fn boundary_circuit(
    tiles: &[TileId],
    index: &HashMap<TileId, usize>,
) -> Result<Vec<Edge>, ComplexError> {
    let mut outgoing: HashMap<Vertex, Vec<Edge>> = HashMap::new();
    let mut count = 0usize;
    for t in tiles {
        for (e, across) in t.clockwise_edges() {
            if !index.contains_key(&across) {
                outgoing.entry(e.from).or_default().push(e);
                count += 1;
            }
        }
    }
    // a pinch vertex would have two outgoing boundary edges
    if outgoing.values().any(|v| v.len() != 1) {
        return Err(ComplexError::HasHoles { euler: 1 });
    }
    let start = *outgoing
        .keys()
        .min()
        .expect("nonempty complex has a boundary");
    let mut circuit = Vec::with_capacity(count);
    let mut at = start;
    loop {
        let e = outgoing[&at][0];
        circuit.push(e);
        at = e.to;
        if at == start {
            break;
        }
    }
    if circuit.len() != count {
        return Err(ComplexError::HasHoles { euler: 1 });
    }
    Ok(circuit)
}

fn split_circuit(circuit: &[Edge], corners: [Vertex; 4]) -> Result<BoundaryArcs, ComplexError> {
    let position = |v: Vertex| circuit.iter().position(|e| e.from == v);
    let mut pos = [0usize; 4];
    for (k, &v) in corners.iter().enumerate() {
        pos[k] = position(v).ok_or(ComplexError::CornersNotOnBoundary(v))?;
    }
    let len = circuit.len();
    let rel: Vec<usize> = pos.iter().map(|&p| (p + len - pos[0]) % len).collect();
    for k in 0..3 {
        if rel[k + 1] == rel[k] {
            return Err(ComplexError::DegenerateSide(Side::ALL[k]));
        }
    }
    if rel[3] == 0 && len > 0 {
        return Err(ComplexError::DegenerateSide(Side::Left));
    }
    if !(rel[0] < rel[1] && rel[1] < rel[2] && rel[2] < rel[3]) {
        return Err(ComplexError::CornersNotClockwise);
    }
    let arc = |from: usize, to: usize| -> Vec<Edge> {
        (from..to).map(|k| circuit[(pos[0] + k) % len]).collect()
    };
    Ok(BoundaryArcs {
        top: arc(rel[0], rel[1]),
        right: arc(rel[1], rel[2]),
        bottom: arc(rel[2], rel[3]),
        left: arc(rel[3], len),
    })
}

/// Weights usable by the node-weighted searches: nonnegative, totally
/// ordered on the values that occur.
pub trait PathWeight: Clone + PartialOrd + Add<Output = Self> + Zero {}

impl<T: Clone + PartialOrd + Add<Output = T> + Zero> PathWeight for T {}

struct HeapEntry<W> {
    dist: W,
    node: usize,
}

impl<W: PartialOrd> PartialEq for HeapEntry<W> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<W: PartialOrd> Eq for HeapEntry<W> {}

impl<W: PartialOrd> PartialOrd for HeapEntry<W> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<W: PartialOrd> Ord for HeapEntry<W> {
    // min-heap on (dist, node)
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .partial_cmp(&self.dist)
            .expect("path weights are comparable")
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Result of a multi-source node-weighted search.
pub struct ShortestPaths<W> {
    pub dist: Vec<Option<W>>,
    pub pred: Vec<Option<usize>>,
}

impl<W: PathWeight> ShortestPaths<W> {
    /// The target with least distance, ties broken by index.
    pub fn best_target(&self, targets: &[usize]) -> usize {
        let mut best: Option<usize> = None;
        for &t in targets {
            let Some(d) = &self.dist[t] else { continue };
            match best {
                None => best = Some(t),
                Some(b) => {
                    let db = self.dist[b].as_ref().unwrap();
                    if d < db || (d == db && t < b) {
                        best = Some(t);
                    }
                }
            }
        }
        best.expect("some target is reachable")
    }

    pub fn path_to(&self, target: usize) -> Vec<usize> {
        let mut path = vec![target];
        let mut at = target;
        while let Some(p) = self.pred[at] {
            path.push(p);
            at = p;
        }
        path.reverse();
        path
    }
}

/// Dijkstra where entering node `v` costs `weights[v]`; a source `s` starts at
/// distance `weights[s]`.
pub fn node_weighted_dijkstra<W: PathWeight>(
    adj: &[Vec<usize>],
    weights: &[W],
    sources: &[usize],
) -> ShortestPaths<W> {
    let n = adj.len();
    let mut dist: Vec<Option<W>> = vec![None; n];
    let mut pred = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        let d = weights[s].clone();
        if dist[s].as_ref().is_none_or(|cur| d < *cur) {
            dist[s] = Some(d.clone());
            heap.push(HeapEntry { dist: d, node: s });
        }
    }
    while let Some(HeapEntry { dist: d, node: u }) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for &v in &adj[u] {
            if done[v] {
                continue;
            }
            let nd = d.clone() + weights[v].clone();
            let better = match &dist[v] {
                None => true,
                Some(cur) => nd < *cur || (nd == *cur && pred[v].is_some_and(|p| u < p)),
            };
            if better {
                dist[v] = Some(nd.clone());
                pred[v] = Some(u);
                heap.push(HeapEntry { dist: nd, node: v });
            }
        }
    }
    ShortestPaths { dist, pred }
}
