//! Independent checks for the optimal weight solver: the quadratic program
//! with every top-to-bottom path written out, and optimality certificates.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::exact::{approximate, nonnegative_combination, to_f64, Rational};
use crate::grid::{node_weighted_dijkstra, GridComplex, Side, TileId};
use crate::qp::DenseQp;
use crate::solver::{ExactModulus, ModulusResult, SolveError};
use crate::weights::{exact_area, exact_height, height, WeightFunction};

pub const DEFAULT_PATH_CAP: usize = 200_000;

/// Tile sets of the simple fat paths from the top to the bottom.
///
/// A path stops at the first bottom tile it meets and never re-enters the top
/// after leaving its first tile; every other path contains one of these and
/// so adds no constraint.
pub fn enumerate_paths(c: &GridComplex, cap: usize) -> Result<Vec<Vec<usize>>, SolveError> {
    let n = c.len();
    let mut is_top = vec![false; n];
    let mut is_bottom = vec![false; n];
    for &t in c.side_tiles(Side::Top) {
        is_top[t] = true;
    }
    for &t in c.side_tiles(Side::Bottom) {
        is_bottom[t] = true;
    }
    let adj = c.fat_adjacency();
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut on_path = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();

    fn walk(
        t: usize,
        adj: &[Vec<usize>],
        is_top: &[bool],
        is_bottom: &[bool],
        on_path: &mut [bool],
        stack: &mut Vec<usize>,
        found: &mut BTreeSet<Vec<usize>>,
        cap: usize,
    ) -> Result<(), SolveError> {
        on_path[t] = true;
        stack.push(t);
        if is_bottom[t] {
            let mut set = stack.clone();
            set.sort_unstable();
            found.insert(set);
            if found.len() > cap {
                return Err(SolveError::TooManyPaths { cap });
            }
        } else {
            for &u in &adj[t] {
                if !on_path[u] && !is_top[u] {
                    walk(u, adj, is_top, is_bottom, on_path, stack, found, cap)?;
                }
            }
        }
        stack.pop();
        on_path[t] = false;
        Ok(())
    }

    for &s in c.side_tiles(Side::Top) {
        walk(
            s,
            adj,
            &is_top,
            &is_bottom,
            &mut on_path,
            &mut stack,
            &mut found,
            cap,
        )?;
    }
    Ok(found.into_iter().collect())
}

/// Solves the optimal weight problem with all path constraints at once,
/// normalized to height one. The solution is exact when the dense solver's
/// active set can be certified in rational arithmetic.
pub fn brute_force_optimal(c: &GridComplex, cap: usize) -> Result<ModulusResult, SolveError> {
    let paths = enumerate_paths(c, cap)?;
    let mut qp = DenseQp::new(c.len());
    for p in &paths {
        let mut a = vec![Rational::zero(); c.len()];
        for &t in p {
            a[t] = Rational::one();
        }
        qp.at_least(a, Rational::one());
    }
    let sol = qp.solve(200_000);
    let active_of = |len: &dyn Fn(&[usize]) -> bool| -> Vec<Vec<TileId>> {
        paths
            .iter()
            .filter(|p| len(p))
            .map(|p| p.iter().map(|&i| c.tile(i)).collect())
            .collect()
    };
    if let Some(z) = &sol.exact {
        let h = exact_height(c, z);
        let weights: Vec<Rational> = z.iter().map(|v| v / &h).collect();
        let area = exact_area(&weights);
        let height = Rational::one();
        let modulus = &height / &area;
        let rho = WeightFunction::new_exact(c, weights.clone())?;
        let active_paths = active_of(&|p: &[usize]| {
            p.iter().fold(Rational::zero(), |a, &t| a + &weights[t]) == height
        });
        return Ok(ModulusResult {
            rho,
            height: 1.0,
            area: to_f64(&area),
            modulus: to_f64(&modulus),
            active_paths,
            iterations: sol.sweeps,
            feasibility_residual: 0.0,
            kkt_residual: 0.0,
            exact: Some(ExactModulus {
                height,
                area,
                modulus,
            }),
        });
    }
    let h = c.fat_shortest_path(&sol.z, Side::Top, Side::Bottom).0;
    let rho = WeightFunction::new(c, sol.z.iter().map(|v| v / h).collect())?;
    let area = crate::weights::area(&rho);
    let values = rho.values().to_vec();
    let active_paths =
        active_of(&|p: &[usize]| p.iter().map(|&t| values[t]).sum::<f64>() <= 1.0 + 1e-9);
    Ok(ModulusResult {
        rho,
        height: 1.0,
        area,
        modulus: 1.0 / area,
        active_paths,
        iterations: sol.sweeps,
        feasibility_residual: sol.max_violation,
        kkt_residual: f64::NAN,
        exact: None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    /// Every tile of positive weight lies on a path of near-minimal length.
    pub support_ok: bool,
    /// The weights are a nonnegative combination of indicator vectors of
    /// minimal paths. Checked only on small complexes.
    pub flow_ok: Option<bool>,
    /// Modulus difference against the exhaustive solver, when it is feasible.
    pub gap: Option<f64>,
}

impl Certificate {
    pub fn passed(&self, gap_tol: f64) -> bool {
        self.support_ok && self.flow_ok != Some(false) && self.gap.is_none_or(|g| g <= gap_tol)
    }
}

pub const FLOW_CHECK_MAX_TILES: usize = 12;

pub fn certify(c: &GridComplex, r: &ModulusResult) -> Certificate {
    certify_with(c, r, 1e-7, 20_000)
}

/// `tol` is relative to the height; the exhaustive comparison runs when the
/// complex has at most `gap_cap` paths.
pub fn certify_with(c: &GridComplex, r: &ModulusResult, tol: f64, gap_cap: usize) -> Certificate {
    let rho = r.rho.values();
    let h = height(c, &r.rho);
    let support_ok = tiles_on_short_paths(c, rho, h * (1.0 + tol))
        .iter()
        .zip(rho)
        .all(|(on, w)| *on || *w <= tol * h);

    let flow_ok = (c.len() <= FLOW_CHECK_MAX_TILES).then(|| flow_check(c, &r.rho));
    let gap = brute_force_optimal(c, gap_cap)
        .ok()
        .map(|b| (b.modulus - r.modulus).abs());
    Certificate {
        support_ok,
        flow_ok,
        gap,
    }
}

/// For each tile, whether some top-to-bottom fat path through it has length
/// at most `bound`.
pub fn tiles_on_short_paths(c: &GridComplex, rho: &[f64], bound: f64) -> Vec<bool> {
    let adj = c.fat_adjacency();
    let from_top = node_weighted_dijkstra(adj, rho, c.side_tiles(Side::Top));
    let from_bottom = node_weighted_dijkstra(adj, rho, c.side_tiles(Side::Bottom));
    (0..c.len())
        .map(|t| match (&from_top.dist[t], &from_bottom.dist[t]) {
            (Some(a), Some(b)) => a + b - rho[t] <= bound,
            _ => false,
        })
        .collect()
}

fn flow_check(c: &GridComplex, rho: &WeightFunction) -> bool {
    let exact: Vec<Rational> = match rho.exact() {
        Some(e) => e.to_vec(),
        None => {
            let h = height(c, rho);
            match rho
                .values()
                .iter()
                .map(|v| approximate(v / h, 1_000_000))
                .collect()
            {
                Some(e) => e,
                None => return false,
            }
        }
    };
    let h = exact_height(c, &exact);
    let Ok(paths) = enumerate_paths(c, DEFAULT_PATH_CAP) else {
        return false;
    };
    let minimal: Vec<Vec<Rational>> = paths
        .iter()
        .filter(|p| p.iter().fold(Rational::zero(), |a, &t| a + &exact[t]) == h)
        .map(|p| {
            let mut col = vec![Rational::zero(); c.len()];
            for &t in p {
                col[t] = Rational::one();
            }
            col
        })
        .collect();
    nonnegative_combination(&minimal, &exact).is_some()
}
