//! Fat-flow optimal weight functions.
//!
//! The optimal weight function minimizes `sum rho(t)^2` subject to every fat
//! path from the top to the bottom having weighted length at least one. Path
//! constraints are generated lazily: the separation oracle is a node-weighted
//! shortest path search, and each violated path is added by a dual active-set
//! step (Goldfarb–Idnani with identity Hessian). The active set is kept
//! linearly independent through an updated Cholesky factor of its Gram matrix
//! of path overlaps, so every primal iterate is a nonnegative combination of
//! path indicator vectors.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exact::{common_denominator, solve_consistent, to_f64, Rational};
use crate::grid::{node_weighted_dijkstra, GridComplex, Side, TileId};
use crate::weights::{exact_area, exact_height, WeightError, WeightFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Scale so that the height is one.
    #[default]
    HeightOne,
    /// Scale the exact solution by the least common denominator of its weights.
    Integer,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Stop once the shortest path has length at least `1 - tol_feas`.
    pub tol_feas: f64,
    /// Largest accepted deviation of an active path length from one.
    pub tol_kkt: f64,
    pub max_iter: usize,
    pub normalization: Normalization,
    /// Recompute the solution in rational arithmetic on the final active set.
    pub exact: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol_feas: 1e-12,
            tol_kkt: 1e-9,
            max_iter: 1_000_000,
            normalization: Normalization::HeightOne,
            exact: false,
        }
    }
}

/// Exact companion of a [`ModulusResult`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExactModulus {
    pub height: Rational,
    pub area: Rational,
    pub modulus: Rational,
}

#[derive(Debug, Clone)]
pub struct ModulusResult {
    pub rho: WeightFunction,
    pub height: f64,
    pub area: f64,
    pub modulus: f64,
    /// Tight fat paths supporting the solution.
    pub active_paths: Vec<Vec<TileId>>,
    pub iterations: usize,
    /// `max(0, 1 - shortest path length)` before normalization.
    pub feasibility_residual: f64,
    /// Largest deviation from one of an active path length, or the most
    /// negative multiplier, before normalization.
    pub kkt_residual: f64,
    pub exact: Option<ExactModulus>,
}

#[derive(Debug, Clone, Error)]
pub enum SolveError {
    #[error("no convergence after {iterations} iterations (feasibility residual {residual:e})")]
    MaxIterationsExceeded {
        iterations: usize,
        residual: f64,
        best: Box<ModulusResult>,
    },
    #[error("more than {cap} top-to-bottom paths")]
    TooManyPaths { cap: usize },
    #[error("exact refinement failed: {0}")]
    ExactRefinement(String),
    #[error(transparent)]
    Weights(#[from] WeightError),
}

/// Active path constraints with an upper-triangular factor `R` of their Gram
/// matrix (`G = R^T R`), stored by columns.
struct ActiveSet {
    paths: Vec<Vec<usize>>,
    lambda: Vec<f64>,
    r_cols: Vec<Vec<f64>>,
}

impl ActiveSet {
    fn new() -> Self {
        ActiveSet {
            paths: Vec::new(),
            lambda: Vec::new(),
            r_cols: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.paths.len()
    }

    /// Solves `R^T u = v`.
    fn forward(&self, v: &[f64]) -> Vec<f64> {
        let mut u = vec![0.0; v.len()];
        for j in 0..v.len() {
            let col = &self.r_cols[j];
            let s: f64 = (0..j).map(|i| col[i] * u[i]).sum();
            u[j] = (v[j] - s) / col[j];
        }
        u
    }

    /// Solves `R r = u`.
    fn backward(&self, u: &[f64]) -> Vec<f64> {
        let q = u.len();
        let mut r = vec![0.0; q];
        for i in (0..q).rev() {
            let s: f64 = (i + 1..q).map(|j| self.r_cols[j][i] * r[j]).sum();
            r[i] = (u[i] - s) / self.r_cols[i][i];
        }
        r
    }

    fn push(&mut self, path: Vec<usize>, lambda: f64, u: Vec<f64>, diag: f64) {
        let mut col = u;
        col.push(diag);
        self.r_cols.push(col);
        self.paths.push(path);
        self.lambda.push(lambda);
    }

    fn remove(&mut self, k: usize) {
        self.paths.remove(k);
        self.lambda.remove(k);
        self.r_cols.remove(k);
        let q = self.r_cols.len();
        for i in k..q {
            let a = self.r_cols[i][i];
            let b = self.r_cols[i][i + 1];
            let h = a.hypot(b);
            let (c, s) = if h == 0.0 { (1.0, 0.0) } else { (a / h, b / h) };
            for j in i..q {
                let col = &mut self.r_cols[j];
                let (x, y) = (col[i], col[i + 1]);
                col[i] = c * x + s * y;
                col[i + 1] = -s * x + c * y;
            }
            self.r_cols[i].truncate(i + 1);
        }
    }

    fn primal(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for (p, l) in self.paths.iter().zip(&self.lambda) {
            for &t in p {
                x[t] += l;
            }
        }
        x
    }
}

fn overlaps(active: &ActiveSet, marks: &[bool]) -> Vec<f64> {
    active
        .paths
        .iter()
        .map(|p| p.iter().filter(|&&t| marks[t]).count() as f64)
        .collect()
}

fn path_length(x: &[f64], path: &[usize]) -> f64 {
    path.iter().map(|&t| x[t]).sum()
}

struct Separation {
    length: f64,
    path: Vec<usize>,
}

fn separate(c: &GridComplex, x: &[f64]) -> Separation {
    let sp = node_weighted_dijkstra(c.fat_adjacency(), x, c.side_tiles(Side::Top));
    let target = sp.best_target(c.side_tiles(Side::Bottom));
    let mut path = sp.path_to(target);
    let length = sp.dist[target].expect("complex is connected");
    path.sort_unstable();
    Separation { length, path }
}

/// Computes the fat-flow optimal weight function of `c`.
pub fn solve_optimal(c: &GridComplex, opts: &SolveOptions) -> Result<ModulusResult, SolveError> {
    let n = c.len();
    let mut active = ActiveSet::new();
    let mut x = vec![0.0; n];
    let mut marks = vec![false; n];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iter {
        let sep = separate(c, &x);
        if sep.length >= 1.0 - opts.tol_feas {
            converged = true;
            break;
        }
        iterations += 1;
        let p = sep.path;
        for &t in &p {
            marks[t] = true;
        }
        let plen = p.len() as f64;
        let mut lambda_p = 0.0;
        loop {
            let v = overlaps(&active, &marks);
            let u = active.forward(&v);
            let r = active.backward(&u);
            let zn = plen - u.iter().map(|a| a * a).sum::<f64>();
            let slack = path_length(&x, &p) - 1.0;
            let full = if zn > 1e-9 * plen {
                -slack / zn
            } else {
                f64::INFINITY
            };
            let mut partial = f64::INFINITY;
            let mut blocking = None;
            for (j, (&rj, &lj)) in r.iter().zip(&active.lambda).enumerate() {
                if rj > 1e-14 {
                    let t = lj / rj;
                    if t < partial {
                        partial = t;
                        blocking = Some(j);
                    }
                }
            }
            if slack >= 0.0 && lambda_p > 0.0 {
                // a partial step already made the path tight
                if zn > 1e-9 * plen {
                    active.push(p.clone(), lambda_p, u, zn.sqrt());
                } else {
                    for (lj, rj) in active.lambda.iter_mut().zip(&r) {
                        *lj = (*lj + lambda_p * rj).max(0.0);
                    }
                }
                x = active.primal(n);
                break;
            }
            if slack >= 0.0 || (full.is_infinite() && partial.is_infinite()) {
                // already satisfied, or dependent with nothing to release
                break;
            }
            let step = full.min(partial);
            for (lj, rj) in active.lambda.iter_mut().zip(&r) {
                *lj = (*lj - step * rj).max(0.0);
            }
            lambda_p += step;
            if step == full {
                active.push(p.clone(), lambda_p, u, zn.sqrt());
                x = active.primal(n);
                break;
            }
            let k = blocking.expect("partial step has a blocking constraint");
            active.remove(k);
            x = active.primal(n);
            for &t in &p {
                x[t] += lambda_p;
            }
        }
        for &t in &p {
            marks[t] = false;
        }
    }

    refine_multipliers(&mut active);
    let x = active.primal(n);
    let result = finish(c, &active, &x, iterations, opts)?;
    if !converged {
        return Err(SolveError::MaxIterationsExceeded {
            iterations,
            residual: result.feasibility_residual,
            best: Box::new(result),
        });
    }
    Ok(result)
}

/// Re-solves `G lambda = 1` on the final active set; keeps the update only if
/// the multipliers stay nonnegative.
fn refine_multipliers(active: &mut ActiveSet) {
    if active.len() == 0 {
        return;
    }
    let ones = vec![1.0; active.len()];
    let lambda = active.backward(&active.forward(&ones));
    if lambda.iter().all(|l| *l >= -1e-12) {
        active.lambda = lambda.into_iter().map(|l| l.max(0.0)).collect();
    }
}

fn finish(
    c: &GridComplex,
    active: &ActiveSet,
    x: &[f64],
    iterations: usize,
    opts: &SolveOptions,
) -> Result<ModulusResult, SolveError> {
    let raw_height = separate(c, x).length;
    let feasibility_residual = (1.0 - raw_height).max(0.0);
    let kkt_residual = active
        .paths
        .iter()
        .map(|p| (path_length(x, p) - 1.0).abs())
        .chain(active.lambda.iter().map(|l| (-l).max(0.0)))
        .fold(0.0, f64::max);
    let active_paths: Vec<Vec<TileId>> = active
        .paths
        .iter()
        .map(|p| {
            let mut tiles: Vec<TileId> = p.iter().map(|&i| c.tile(i)).collect();
            order_path(c, &mut tiles);
            tiles
        })
        .collect();

    let want_exact = opts.exact || opts.normalization == Normalization::Integer;
    if want_exact {
        let exact_x = exact_on_active(c, &active.paths)?;
        let h = exact_height(c, &exact_x);
        let scale = match opts.normalization {
            Normalization::HeightOne => h.recip(),
            Normalization::Integer => {
                let normalized: Vec<Rational> = exact_x.iter().map(|v| v / &h).collect();
                Rational::from_integer(common_denominator(&normalized)) / &h
            }
        };
        let weights: Vec<Rational> = exact_x.iter().map(|v| v * &scale).collect();
        let height = &h * &scale;
        let area = exact_area(&weights);
        let modulus = &height * &height / &area;
        let rho = WeightFunction::new_exact(c, weights)?;
        return Ok(ModulusResult {
            rho,
            height: to_f64(&height),
            area: to_f64(&area),
            modulus: to_f64(&modulus),
            active_paths,
            iterations,
            feasibility_residual,
            kkt_residual,
            exact: Some(ExactModulus {
                height,
                area,
                modulus,
            }),
        });
    }

    let scale = if raw_height > 0.0 {
        raw_height.recip()
    } else {
        1.0
    };
    let values: Vec<f64> = x.iter().map(|v| v * scale).collect();
    let rho = WeightFunction::new(c, values)?;
    let height = crate::weights::height(c, &rho);
    let area = crate::weights::area(&rho);
    Ok(ModulusResult {
        rho,
        height,
        area,
        modulus: height * height / area,
        active_paths,
        iterations,
        feasibility_residual,
        kkt_residual,
        exact: None,
    })
}

/// Exact minimum-norm weights with every active path at length one,
/// verified feasible for all paths and expressible with nonnegative multipliers.
fn exact_on_active(c: &GridComplex, paths: &[Vec<usize>]) -> Result<Vec<Rational>, SolveError> {
    let q = paths.len();
    let sets: Vec<BTreeSet<usize>> = paths.iter().map(|p| p.iter().copied().collect()).collect();
    let gram: Vec<Vec<Rational>> = sets
        .iter()
        .map(|a| {
            sets.iter()
                .map(|b| Rational::from_integer(BigInt::from(a.intersection(b).count())))
                .collect()
        })
        .collect();
    let ones = vec![Rational::from_integer(BigInt::from(1)); q];
    let lambda = solve_consistent(&gram, &ones)
        .ok_or_else(|| SolveError::ExactRefinement("active paths are inconsistent".into()))?;
    if lambda.iter().any(Signed::is_negative) {
        return Err(SolveError::ExactRefinement(
            "negative multiplier on the active set".into(),
        ));
    }
    let mut x = vec![Rational::zero(); c.len()];
    for (p, l) in paths.iter().zip(&lambda) {
        for &t in p {
            x[t] += l;
        }
    }
    let h = exact_height(c, &x);
    if h != Rational::from_integer(BigInt::from(1)) {
        return Err(SolveError::ExactRefinement(format!(
            "exact height is {h}, not 1"
        )));
    }
    Ok(x)
}

/// Orders the tiles of a fat path from its top end to its bottom end.
fn order_path(c: &GridComplex, tiles: &mut Vec<TileId>) {
    let set: BTreeSet<TileId> = tiles.iter().copied().collect();
    let top: BTreeSet<TileId> = c.side_tiles(Side::Top).iter().map(|&i| c.tile(i)).collect();
    let start = tiles
        .iter()
        .copied()
        .find(|t| top.contains(t))
        .unwrap_or(tiles[0]);
    let mut ordered = vec![start];
    let mut seen: BTreeSet<TileId> = [start].into();
    while ordered.len() < tiles.len() {
        let last = *ordered.last().unwrap();
        let next = c
            .fat_neighbors(last)
            .unwrap_or_default()
            .into_iter()
            .find(|t| set.contains(t) && !seen.contains(t));
        match next {
            Some(t) => {
                seen.insert(t);
                ordered.push(t);
            }
            None => return,
        }
    }
    *tiles = ordered;
}
