//! Two-phase dense tableau simplex for `A x = b, x >= 0`, generic over the
//! scalar type.
//!
//! Sign convention: an infeasible system is reported with a Farkas vector
//! `y` such that `y^T A <= 0` componentwise and `y^T b > 0`. Dual values of
//! an optimal solution satisfy `c - A^T y >= 0` with `b^T y` equal to the
//! optimal objective.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArithmeticMode {
    #[default]
    Float,
    Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    #[default]
    Bland,
    Dantzig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Primal feasibility tolerance. Certificates must clear ten times this.
    pub tolerance: f64,
    pub arithmetic_mode: ArithmeticMode,
    pub pivot_rule: PivotRule,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            arithmetic_mode: ArithmeticMode::Float,
            pivot_rule: PivotRule::Bland,
            max_iterations: 100_000,
        }
    }
}

impl SolverOptions {
    pub fn rational() -> Self {
        Self { arithmetic_mode: ArithmeticMode::Rational, ..Self::default() }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_pivot_rule(mut self, rule: PivotRule) -> Self {
        self.pivot_rule = rule;
        self
    }

    /// Checks the tolerance range and that rational mode runs on an exact
    /// scalar type.
    pub fn validate<T: Scalar>(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance <= 1e-3) {
            return Err(Error::InvalidArgument(format!("tolerance {} must lie in (0, 1e-3]", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be positive".into()));
        }
        if self.arithmetic_mode == ArithmeticMode::Rational && !T::EXACT {
            return Err(Error::InvalidArgument("rational mode requires an exact scalar type".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    /// Equality-constraint duals; zero when no objective was given.
    pub dual: Vec<T>,
    pub objective: T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Optimal(LpSolution<T>),
    /// `farkas^T A <= 0`, `farkas^T b = residual > 0`.
    Infeasible {
        farkas: Vec<T>,
        residual: T,
    },
    Unbounded,
}

/// Solves `min c^T x` (or plain feasibility) subject to `A x = b`, `x >= 0`.
pub fn lp_feasibility<T: Scalar>(
    a: &Matrix<T>,
    b: &[T],
    objective: Option<&[T]>,
    opts: &SolverOptions,
) -> Result<LpOutcome<T>> {
    opts.validate::<T>()?;
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(Error::Dimension { expected: m, found: b.len() });
    }
    if let Some(c) = objective {
        if c.len() != n {
            return Err(Error::Dimension { expected: n, found: c.len() });
        }
    }

    let mut tab = Tableau::new(a, b);
    let mut runner = Runner::new(opts);

    let phase_one: Vec<T> = (0..n + m).map(|j| if j < n { T::zero() } else { T::one() }).collect();
    runner.run(&mut tab, &phase_one)?;
    let residual = tab.objective(&phase_one);
    if residual > T::slack(opts.tolerance) {
        let farkas = tab.duals(&phase_one);
        return Ok(LpOutcome::Infeasible { farkas, residual });
    }
    tab.drive_out_artificials(&runner.pivot_eps);

    let Some(c) = objective else {
        return Ok(LpOutcome::Optimal(LpSolution { x: tab.primal(), dual: vec![T::zero(); m], objective: T::zero() }));
    };
    let phase_two: Vec<T> = c.iter().cloned().chain((0..m).map(|_| T::zero())).collect();
    if runner.run(&mut tab, &phase_two)? == Status::Unbounded {
        return Ok(LpOutcome::Unbounded);
    }
    Ok(LpOutcome::Optimal(LpSolution {
        x: tab.primal(),
        dual: tab.duals(&phase_two),
        objective: tab.objective(&phase_two),
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Optimal,
    Unbounded,
}

/// Rows hold `B^{-1} [A' | I]`, where `A'` is `A` with rows flipped so the
/// right-hand side starts nonnegative.
struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    flipped: Vec<bool>,
    n: usize,
}

impl<T: Scalar> Tableau<T> {
    fn new(a: &Matrix<T>, b: &[T]) -> Self {
        let (m, n) = (a.rows(), a.cols());
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut flipped = Vec::with_capacity(m);
        for r in 0..m {
            let flip = b[r] < T::zero();
            let mut row: Vec<T> = a.row(r).iter().map(|v| if flip { -v.clone() } else { v.clone() }).collect();
            row.extend((0..m).map(|k| if k == r { T::one() } else { T::zero() }));
            rows.push(row);
            rhs.push(if flip { -b[r].clone() } else { b[r].clone() });
            flipped.push(flip);
        }
        Self { rows, rhs, basis: (n..n + m).collect(), flipped, n }
    }

    fn width(&self) -> usize {
        self.n + self.rows.len()
    }

    fn pivot(&mut self, r: usize, c: usize, drop_eps: &T) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        self.rhs[r] = self.rhs[r].clone() / p;
        self.rows[r][c] = T::one();
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let factor = self.rows[i][c].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    let updated = v.clone() - factor.clone() * pv.clone();
                    *v = if updated.abs() <= *drop_eps { T::zero() } else { updated };
                }
            }
            self.rows[i][c] = T::zero();
            let updated = self.rhs[i].clone() - factor * pivot_rhs.clone();
            self.rhs[i] = if updated.abs() <= *drop_eps { T::zero() } else { updated };
        }
        self.basis[r] = c;
    }

    fn reduced_cost(&self, costs: &[T], j: usize) -> T {
        self.rows
            .iter()
            .zip(&self.basis)
            .fold(costs[j].clone(), |acc, (row, &bj)| acc - costs[bj].clone() * row[j].clone())
    }

    fn objective(&self, costs: &[T]) -> T {
        self.rhs.iter().zip(&self.basis).fold(T::zero(), |acc, (v, &bj)| acc + costs[bj].clone() * v.clone())
    }

    /// `y_i = sign_i * (c_B^T B^{-1})_i`.
    fn duals(&self, costs: &[T]) -> Vec<T> {
        (0..self.rows.len())
            .map(|i| {
                let col = self.n + i;
                let value = self
                    .rows
                    .iter()
                    .zip(&self.basis)
                    .fold(T::zero(), |acc, (row, &bj)| acc + costs[bj].clone() * row[col].clone());
                if self.flipped[i] {
                    -value
                } else {
                    value
                }
            })
            .collect()
    }

    fn primal(&self) -> Vec<T> {
        let mut x = vec![T::zero(); self.n];
        for (r, &bj) in self.basis.iter().enumerate() {
            if bj < self.n {
                let v = self.rhs[r].clone();
                x[bj] = if v < T::zero() { T::zero() } else { v };
            }
        }
        x
    }

    /// Replaces zero-level artificial basics by structural columns where
    /// possible. Rows where that is impossible are redundant and keep their
    /// artificial at zero.
    fn drive_out_artificials(&mut self, pivot_eps: &T) {
        for r in 0..self.rows.len() {
            if self.basis[r] < self.n {
                continue;
            }
            let best = (0..self.n)
                .filter(|&j| self.rows[r][j].abs() > *pivot_eps)
                .max_by(|&a, &b| self.rows[r][a].abs().partial_cmp(&self.rows[r][b].abs()).expect("comparable"));
            if let Some(j) = best {
                self.pivot(r, j, &T::zero());
            }
        }
    }
}

struct Runner<T> {
    rule: PivotRule,
    max_iterations: usize,
    iterations: usize,
    cost_eps: T,
    pivot_eps: T,
    drop_eps: T,
}

/// Consecutive degenerate pivots tolerated under Dantzig before switching
/// to Bland's rule.
const DEGENERACY_GUARD: usize = 50;

impl<T: Scalar> Runner<T> {
    fn new(opts: &SolverOptions) -> Self {
        Self {
            rule: opts.pivot_rule,
            max_iterations: opts.max_iterations,
            iterations: 0,
            cost_eps: T::slack(1e-11),
            pivot_eps: T::slack(1e-11),
            drop_eps: T::slack(1e-14),
        }
    }

    fn run(&mut self, tab: &mut Tableau<T>, costs: &[T]) -> Result<Status> {
        let mut rule = self.rule;
        let mut degenerate_streak = 0usize;
        debug_assert_eq!(costs.len(), tab.width());
        loop {
            if self.iterations >= self.max_iterations {
                return Err(Error::IterationLimit(self.max_iterations));
            }
            let Some(entering) = self.entering(tab, costs, rule) else {
                return Ok(Status::Optimal);
            };
            let Some(leaving) = self.leaving(tab, entering) else {
                return Ok(Status::Unbounded);
            };
            if tab.rhs[leaving] <= self.pivot_eps {
                degenerate_streak += 1;
                if rule == PivotRule::Dantzig && degenerate_streak > DEGENERACY_GUARD {
                    rule = PivotRule::Bland;
                }
            } else {
                degenerate_streak = 0;
            }
            tab.pivot(leaving, entering, &self.drop_eps);
            self.iterations += 1;
        }
    }

    /// Only structural columns may enter.
    fn entering(&self, tab: &Tableau<T>, costs: &[T], rule: PivotRule) -> Option<usize> {
        let threshold = -self.cost_eps.clone();
        let mut best: Option<(usize, T)> = None;
        for j in 0..tab.n {
            if tab.basis.contains(&j) {
                continue;
            }
            let d = tab.reduced_cost(costs, j);
            if d >= threshold || d.is_zero() {
                continue;
            }
            match rule {
                PivotRule::Bland => return Some(j),
                PivotRule::Dantzig => {
                    if best.as_ref().is_none_or(|(_, bd)| d < *bd) {
                        best = Some((j, d));
                    }
                }
            }
        }
        best.map(|(j, _)| j)
    }

    /// Minimum ratio, ties to the smallest basic index.
    fn leaving(&self, tab: &Tableau<T>, col: usize) -> Option<usize> {
        let mut best: Option<(usize, T)> = None;
        for r in 0..tab.rows.len() {
            let coef = &tab.rows[r][col];
            if *coef <= self.pivot_eps || coef.is_zero() {
                continue;
            }
            let rhs = if tab.rhs[r] < T::zero() { T::zero() } else { tab.rhs[r].clone() };
            let ratio = rhs / coef.clone();
            let better = match &best {
                None => true,
                Some((br, bratio)) => {
                    let tie_slack = self.pivot_eps.clone();
                    ratio < bratio.clone() - tie_slack.clone()
                        || (ratio <= bratio.clone() + tie_slack && tab.basis[r] < tab.basis[*br])
                }
            };
            if better {
                best = Some((r, ratio));
            }
        }
        best.map(|(r, _)| r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn m(rows: Vec<Vec<f64>>) -> Matrix<f64> {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn trivial_feasible() {
        let out = lp_feasibility(&m(vec![vec![1.0]]), &[1.0], None, &SolverOptions::default()).unwrap();
        match out {
            LpOutcome::Optimal(sol) => assert_eq!(sol.x, vec![1.0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn trivial_infeasible_farkas() {
        let out = lp_feasibility(&m(vec![vec![1.0]]), &[-1.0], None, &SolverOptions::default()).unwrap();
        match out {
            LpOutcome::Infeasible { farkas, residual } => {
                assert_eq!(farkas, vec![-1.0]);
                assert_eq!(residual, 1.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn minimizes_with_duals() {
        // min x0 + 2 x1 + 3 x2, x0 + x1 + x2 = 1, x1 + 2 x2 = 1
        let a = m(vec![vec![1.0, 1.0, 1.0], vec![0.0, 1.0, 2.0]]);
        let c = [1.0, 2.0, 3.0];
        let out = lp_feasibility(&a, &[1.0, 1.0], Some(&c), &SolverOptions::default()).unwrap();
        let LpOutcome::Optimal(sol) = out else { panic!() };
        // x0 = x2 = 1/2 and x1 = 1 both cost 2.
        assert!((sol.objective - 2.0).abs() < 1e-12);
        let dual_obj = sol.dual[0] + sol.dual[1];
        assert!((dual_obj - 2.0).abs() < 1e-12);
        for j in 0..3 {
            let reduced = c[j] - sol.dual[0] * a[(0, j)] - sol.dual[1] * a[(1, j)];
            assert!(reduced >= -1e-12);
        }
    }

    #[test]
    fn detects_unbounded() {
        let a = m(vec![vec![1.0, -1.0]]);
        let out = lp_feasibility(&a, &[0.0], Some(&[0.0, -1.0]), &SolverOptions::default()).unwrap();
        assert_eq!(out, LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let a = m(vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![0.0, 0.0]]);
        let out = lp_feasibility(&a, &[1.0, 2.0, 0.0], Some(&[1.0, 0.0]), &SolverOptions::default()).unwrap();
        let LpOutcome::Optimal(sol) = out else { panic!() };
        assert_eq!(sol.x, vec![0.0, 1.0]);
    }

    #[test]
    fn rational_mode_requires_exact_type() {
        let err = lp_feasibility(&m(vec![vec![1.0]]), &[1.0], None, &SolverOptions::rational());
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
        let a = Matrix::from_rows(vec![vec![Rational::ratio(3, 1)]]).unwrap();
        let out = lp_feasibility(&a, &[Rational::ratio(1, 1)], None, &SolverOptions::rational()).unwrap();
        let LpOutcome::Optimal(sol) = out else { panic!() };
        assert_eq!(sol.x, vec![Rational::ratio(1, 3)]);
    }

    #[test]
    fn tolerance_range_is_enforced() {
        let a = m(vec![vec![1.0]]);
        for tol in [0.0, -1.0, 1e-2] {
            let opts = SolverOptions::default().with_tolerance(tol);
            assert!(lp_feasibility(&a, &[1.0], None, &opts).is_err());
        }
    }

    #[test]
    fn iteration_limit_is_reported() {
        let a = m(vec![vec![1.0, 1.0], vec![1.0, -1.0]]);
        let opts = SolverOptions { max_iterations: 1, ..SolverOptions::default() };
        assert_eq!(lp_feasibility(&a, &[2.0, 0.0], None, &opts), Err(Error::IterationLimit(1)));
    }

    #[test]
    fn dantzig_agrees_with_bland() {
        let a = m(vec![vec![1.0, 2.0, 0.0, 1.0], vec![0.0, 1.0, 1.0, 3.0], vec![1.0, 0.0, 2.0, 1.0]]);
        let b = [3.0, 2.0, 4.0];
        let c = [1.0, 1.0, 1.0, 0.5];
        let bland = lp_feasibility(&a, &b, Some(&c), &SolverOptions::default()).unwrap();
        let dantzig =
            lp_feasibility(&a, &b, Some(&c), &SolverOptions::default().with_pivot_rule(PivotRule::Dantzig)).unwrap();
        let (LpOutcome::Optimal(x), LpOutcome::Optimal(y)) = (bland, dantzig) else { panic!() };
        assert!((x.objective - y.objective).abs() < 1e-12);
    }
}
