//! Dense minimum-norm quadratic programs with an exact certificate.
//!
//! Solves `minimize |z|^2` subject to `a_i . z >= b_i` and `e_j . z = f_j` by
//! dual coordinate ascent (Hildreth's method), then guesses the active set,
//! recomputes the solution in rational arithmetic and certifies it through the
//! KKT conditions. Intended for small instances; it serves as an independent
//! oracle for the specialised solvers.

use num_traits::Zero;

use crate::exact::{nonnegative_combination, solve_consistent, to_f64, Rational};

#[derive(Debug, Clone, Default)]
pub struct DenseQp {
    pub dim: usize,
    /// `(a, b)` meaning `a . z >= b`.
    pub inequalities: Vec<(Vec<Rational>, Rational)>,
    /// `(e, f)` meaning `e . z = f`.
    pub equalities: Vec<(Vec<Rational>, Rational)>,
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub z: Vec<f64>,
    /// Present when the active-set guess was certified optimal in exact arithmetic.
    pub exact: Option<Vec<Rational>>,
    pub sweeps: usize,
    pub max_violation: f64,
}

impl DenseQp {
    pub fn new(dim: usize) -> Self {
        DenseQp {
            dim,
            ..Default::default()
        }
    }

    pub fn at_least(&mut self, a: Vec<Rational>, b: Rational) {
        debug_assert_eq!(a.len(), self.dim);
        self.inequalities.push((a, b));
    }

    pub fn equal(&mut self, e: Vec<Rational>, f: Rational) {
        debug_assert_eq!(e.len(), self.dim);
        self.equalities.push((e, f));
    }

    pub fn solve(&self, max_sweeps: usize) -> QpSolution {
        let rows: Vec<(Vec<f64>, f64, bool)> = self
            .inequalities
            .iter()
            .map(|(a, b)| (a.iter().map(to_f64).collect(), to_f64(b), true))
            .chain(
                self.equalities
                    .iter()
                    .map(|(e, f)| (e.iter().map(to_f64).collect(), to_f64(f), false)),
            )
            .collect();
        let sparse: Vec<Vec<(usize, f64)>> = rows
            .iter()
            .map(|(a, _, _)| {
                a.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(i, v)| (i, *v))
                    .collect()
            })
            .collect();
        let norms: Vec<f64> = sparse
            .iter()
            .map(|r| r.iter().map(|(_, v)| v * v).sum())
            .collect();
        let mut z = vec![0.0; self.dim];
        let mut mult = vec![0.0; rows.len()];
        let mut sweeps = 0;
        let mut max_violation = f64::INFINITY;
        while sweeps < max_sweeps {
            sweeps += 1;
            let mut max_step: f64 = 0.0;
            for (k, (_, b, ineq)) in rows.iter().enumerate() {
                if norms[k] == 0.0 {
                    continue;
                }
                let dot: f64 = sparse[k].iter().map(|(i, v)| v * z[*i]).sum();
                let mut next = mult[k] + (b - dot) / norms[k];
                if *ineq && next < 0.0 {
                    next = 0.0;
                }
                let step = next - mult[k];
                if step != 0.0 {
                    for (i, v) in &sparse[k] {
                        z[*i] += step * v;
                    }
                    mult[k] = next;
                    max_step = max_step.max(step.abs() * norms[k].sqrt());
                }
            }
            max_violation = rows
                .iter()
                .zip(&sparse)
                .map(|((_, b, ineq), r)| {
                    let dot: f64 = r.iter().map(|(i, v)| v * z[*i]).sum();
                    if *ineq {
                        (b - dot).max(0.0)
                    } else {
                        (b - dot).abs()
                    }
                })
                .fold(0.0, f64::max);
            if max_violation < 1e-13 && max_step < 1e-15 {
                break;
            }
            if sweeps % 64 == 0 && max_violation < 1e-10 {
                if let Some(exact) = self.polish(&z) {
                    return QpSolution {
                        z: exact.iter().map(to_f64).collect(),
                        exact: Some(exact),
                        sweeps,
                        max_violation,
                    };
                }
            }
        }
        let exact = self.polish(&z);
        let z = exact.as_ref().map_or(z, |e| e.iter().map(to_f64).collect());
        QpSolution {
            z,
            exact,
            sweeps,
            max_violation,
        }
    }

    /// Exact minimum-norm point on the guessed active set, returned only if it
    /// satisfies the KKT conditions exactly.
    pub fn polish(&self, z: &[f64]) -> Option<Vec<Rational>> {
        for threshold in [1e-10, 1e-8, 1e-6, 1e-4] {
            let active: Vec<usize> = self
                .inequalities
                .iter()
                .enumerate()
                .filter(|(_, (a, b))| {
                    let dot: f64 = a.iter().zip(z).map(|(ai, zi)| to_f64(ai) * zi).sum();
                    dot - to_f64(b) <= threshold * (1.0 + to_f64(b).abs())
                })
                .map(|(i, _)| i)
                .collect();
            if let Some(exact) = self.certify_active(&active) {
                return Some(exact);
            }
        }
        None
    }

    /// Minimum-norm point with the given inequalities held at equality, if it
    /// is feasible and admits nonnegative multipliers.
    pub fn certify_active(&self, active: &[usize]) -> Option<Vec<Rational>> {
        let normals: Vec<(&Vec<Rational>, &Rational)> = active
            .iter()
            .map(|&i| (&self.inequalities[i].0, &self.inequalities[i].1))
            .chain(self.equalities.iter().map(|(e, f)| (e, f)))
            .collect();
        let z = min_norm_solution(self.dim, &normals)?;
        let feasible = self.inequalities.iter().all(|(a, b)| dot(a, &z) >= *b)
            && self.equalities.iter().all(|(e, f)| dot(e, &z) == *f);
        if !feasible {
            return None;
        }
        // z = sum mu_i a_i + sum nu_j e_j with mu >= 0 and nu free
        let mut columns: Vec<Vec<Rational>> = active
            .iter()
            .map(|&i| self.inequalities[i].0.clone())
            .collect();
        for (e, _) in &self.equalities {
            columns.push(e.clone());
            columns.push(e.iter().map(|v| -v).collect());
        }
        nonnegative_combination(&columns, &z)?;
        Some(z)
    }

    /// Checks the KKT conditions exactly for a candidate point.
    pub fn is_optimal(&self, z: &[Rational]) -> bool {
        let feasible = self.inequalities.iter().all(|(a, b)| dot(a, z) >= *b)
            && self.equalities.iter().all(|(e, f)| dot(e, z) == *f);
        if !feasible {
            return false;
        }
        let mut columns: Vec<Vec<Rational>> = self
            .inequalities
            .iter()
            .filter(|(a, b)| dot(a, z) == *b)
            .map(|(a, _)| a.clone())
            .collect();
        for (e, _) in &self.equalities {
            columns.push(e.clone());
            columns.push(e.iter().map(|v| -v).collect());
        }
        nonnegative_combination(&columns, z).is_some()
    }
}

fn dot(a: &[Rational], z: &[Rational]) -> Rational {
    a.iter()
        .zip(z)
        .filter(|(ai, _)| !ai.is_zero())
        .fold(Rational::zero(), |acc, (ai, zi)| acc + ai * zi)
}

/// The least-norm `z` in the span of the normals with `n_i . z = rhs_i`.
fn min_norm_solution(dim: usize, normals: &[(&Vec<Rational>, &Rational)]) -> Option<Vec<Rational>> {
    if normals.is_empty() {
        return Some(vec![Rational::zero(); dim]);
    }
    let gram: Vec<Vec<Rational>> = normals
        .iter()
        .map(|(a, _)| normals.iter().map(|(b, _)| dot(a, b)).collect())
        .collect();
    let rhs: Vec<Rational> = normals.iter().map(|(_, r)| (*r).clone()).collect();
    let mu = solve_consistent(&gram, &rhs)?;
    let mut z = vec![Rational::zero(); dim];
    for (m, (a, _)) in mu.iter().zip(normals) {
        if m.is_zero() {
            continue;
        }
        for (zi, ai) in z.iter_mut().zip(a.iter()) {
            if !ai.is_zero() {
                *zi += m * ai;
            }
        }
    }
    Some(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn projection_onto_halfspace() {
        // minimize x^2 + y^2 subject to x + 2y >= 1  ->  (1/5, 2/5)
        let mut qp = DenseQp::new(2);
        qp.at_least(vec![int(1), int(2)], int(1));
        let sol = qp.solve(10_000);
        assert_eq!(sol.exact.unwrap(), vec![rat(1, 5), rat(2, 5)]);
    }

    #[test]
    fn equality_and_bounds() {
        // minimize |z|^2, z1 + z2 + z3 = 1, z1 >= 1/2  ->  (1/2, 1/4, 1/4)
        let mut qp = DenseQp::new(3);
        qp.equal(vec![int(1), int(1), int(1)], int(1));
        qp.at_least(vec![int(1), int(0), int(0)], rat(1, 2));
        let sol = qp.solve(10_000);
        let z = sol.exact.unwrap();
        assert_eq!(z, vec![rat(1, 2), rat(1, 4), rat(1, 4)]);
        assert!(qp.is_optimal(&z));
        assert!(!qp.is_optimal(&[rat(1, 2), rat(1, 2), int(0)]));
    }
}
