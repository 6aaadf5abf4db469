//! Exact reference checks for small LPs, independent of the simplex kernel.
//!
//! [`feasible_by_elimination`] decides `A x = b, x >= 0` by Gauss–Jordan
//! elimination of the equalities followed by Fourier–Motzkin elimination of
//! the remaining inequalities. [`minimize_by_vertices`] enumerates basic
//! solutions. Both are exponential and meant for a handful of variables.

use num_traits::{One, Signed, Zero};

use crate::matrix::Matrix;
use crate::scalar::Rational;

/// Reduced row echelon form of `[A | b]`; returns pivot columns per row, or
/// `None` when the system is inconsistent.
fn rref(a: &Matrix<Rational>, b: &[Rational]) -> Option<(Vec<Vec<Rational>>, Vec<usize>)> {
    let (m, n) = (a.rows(), a.cols());
    let mut rows: Vec<Vec<Rational>> =
        (0..m).map(|r| a.row(r).iter().cloned().chain(std::iter::once(b[r].clone())).collect()).collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..m).find(|&r| !rows[r][col].is_zero()) else { continue };
        rows.swap(rank, p);
        let lead = rows[rank][col].clone();
        for v in rows[rank].iter_mut() {
            *v = v.clone() / lead.clone();
        }
        for r in 0..m {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for k in 0..=n {
                    let delta = factor.clone() * rows[rank][k].clone();
                    rows[r][k] = rows[r][k].clone() - delta;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if rows[rank..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    rows.truncate(rank);
    Some((rows, pivots))
}

/// Inequality `coef . z <= bound` over the free variables.
#[derive(Clone, PartialEq)]
struct Ineq {
    coef: Vec<Rational>,
    bound: Rational,
}

impl Ineq {
    /// Scales so the first nonzero coefficient has magnitude one, for
    /// deduplication.
    fn normalized(mut self) -> Self {
        if let Some(lead) = self.coef.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            for c in self.coef.iter_mut() {
                *c = c.clone() / lead.clone();
            }
            self.bound /= lead;
        }
        self
    }
}

/// Exact feasibility of `A x = b, x >= 0`.
pub fn feasible_by_elimination(a: &Matrix<Rational>, b: &[Rational]) -> bool {
    let n = a.cols();
    let Some((rows, pivots)) = rref(a, b) else { return false };
    let free: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();

    // x_p = b_p - sum_f row[f] x_f >= 0   ->   sum_f row[f] z_f <= b_p
    // x_f >= 0                           ->   -z_f <= 0
    let mut system: Vec<Ineq> = rows
        .iter()
        .map(|row| Ineq { coef: free.iter().map(|&f| row[f].clone()).collect(), bound: row[n].clone() })
        .collect();
    for k in 0..free.len() {
        let mut coef = vec![Rational::zero(); free.len()];
        coef[k] = -Rational::one();
        system.push(Ineq { coef, bound: Rational::zero() });
    }

    for k in 0..free.len() {
        let (mut upper, mut lower, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for ineq in system {
            if ineq.coef[k].is_positive() {
                upper.push(ineq);
            } else if ineq.coef[k].is_negative() {
                lower.push(ineq);
            } else {
                rest.push(ineq);
            }
        }
        for u in &upper {
            for l in &lower {
                let (cu, cl) = (u.coef[k].clone(), -l.coef[k].clone());
                let coef: Vec<Rational> =
                    u.coef.iter().zip(&l.coef).map(|(x, y)| x.clone() * cl.clone() + y.clone() * cu.clone()).collect();
                let bound = u.bound.clone() * cl.clone() + l.bound.clone() * cu.clone();
                let combined = Ineq { coef, bound }.normalized();
                if !rest.contains(&combined) {
                    rest.push(combined);
                }
            }
        }
        system = rest;
    }
    system.iter().all(|ineq| !ineq.bound.is_negative())
}

/// Exact `min c^T x` over `A x = b, x >= 0` by enumerating every column
/// subset with a unique solution. `None` when infeasible. Assumes the
/// minimum is attained (e.g. `c >= 0`).
pub fn minimize_by_vertices(a: &Matrix<Rational>, b: &[Rational], c: &[Rational]) -> Option<Rational> {
    let n = a.cols();
    assert!(n < 24, "vertex enumeration is limited to small problems");
    let mut best: Option<Rational> = None;
    for mask in 0u32..(1 << n) {
        let cols: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        let sub = Matrix::from_fn(a.rows(), cols.len(), |r, k| a[(r, cols[k])].clone());
        let Some((rows, pivots)) = rref(&sub, b) else { continue };
        if pivots.len() != cols.len() {
            continue;
        }
        let values: Vec<Rational> = rows.iter().map(|row| row[cols.len()].clone()).collect();
        if values.iter().any(Signed::is_negative) {
            continue;
        }
        let objective =
            pivots.iter().zip(&values).fold(Rational::zero(), |acc, (&k, v)| acc + c[cols[k]].clone() * v.clone());
        if best.as_ref().is_none_or(|b| objective < *b) {
            best = Some(objective);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn q(n: i64) -> Rational {
        Rational::ratio(n, 1)
    }

    #[test]
    fn elimination_simple_cases() {
        let a = Matrix::from_rows(vec![vec![q(1)]]).unwrap();
        assert!(feasible_by_elimination(&a, &[q(1)]));
        assert!(!feasible_by_elimination(&a, &[q(-1)]));

        // x + y = 1, x - y = 3 -> x = 2, y = -1
        let a = Matrix::from_rows(vec![vec![q(1), q(1)], vec![q(1), q(-1)]]).unwrap();
        assert!(!feasible_by_elimination(&a, &[q(1), q(3)]));
        assert!(feasible_by_elimination(&a, &[q(1), q(1)]));

        // inconsistent equalities
        let a = Matrix::from_rows(vec![vec![q(1), q(1)], vec![q(2), q(2)]]).unwrap();
        assert!(!feasible_by_elimination(&a, &[q(1), q(3)]));
    }

    #[test]
    fn elimination_with_free_variables() {
        // x0 + x1 + x2 = 1, x1 + 2 x2 = 3 needs x2 >= 1 and x0 + x1 = 1 - x2 <= 0
        let a = Matrix::from_rows(vec![vec![q(1), q(1), q(1)], vec![q(0), q(1), q(2)]]).unwrap();
        assert!(!feasible_by_elimination(&a, &[q(1), q(3)]));
        assert!(feasible_by_elimination(&a, &[q(1), q(2)]));
    }

    #[test]
    fn vertex_minimum() {
        let a = Matrix::from_rows(vec![vec![q(1), q(1), q(1)], vec![q(0), q(1), q(2)]]).unwrap();
        let c = [q(0), q(0), q(1)];
        assert_eq!(minimize_by_vertices(&a, &[q(1), q(1)], &c), Some(q(0)));
        assert_eq!(minimize_by_vertices(&a, &[q(1), q(3)], &c), None);
    }
}
