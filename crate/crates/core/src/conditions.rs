//! Necessary conditions from quadratic polynomials in a single linear
//! observable `x = <f, eta>`.
//!
//! With `E(f)` and `V(f)` the mean and variance implied by `(rho1, rho2)`
//! and `F` the range of the observable, the extremal conditions are
//!
//! * variance: `V >= 0`;
//! * gap: `V >= (x+ - E)(E - x-)` with `x-`, `x+` the nearest points of `F`
//!   below and above `E` (for integer ranges this is Yamada's bound);
//! * upper: `V <= (sup F - E)(E - inf F)`;
//! * mean bounds: `inf F <= E <= sup F`.
//!
//! None of these is sufficient; the LP in [`crate::solver`] is.

use std::fmt;

use crate::enumeration::{enumerate_configurations, range_over, RangeSet, DEFAULT_MERGE_TOLERANCE};
use crate::error::{Error, Result};
use crate::model::{Configuration, CorrelationPair, Domain};
use crate::scalar::Scalar;

/// A verdict passes when its margin is at least `-VERDICT_TOLERANCE`.
pub const VERDICT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConditionKind {
    Variance,
    Gap,
    Upper,
    MeanBounds,
}

impl ConditionKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Variance => "variance",
            Self::Gap => "gap",
            Self::Upper => "upper",
            Self::MeanBounds => "mean_bounds",
        }
    }
}

impl fmt::Display for ConditionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionVerdict<T = f64> {
    pub condition: ConditionKind,
    pub test_function_id: String,
    pub lhs: T,
    pub rhs: T,
    /// Oriented so that a nonnegative margin means the condition holds.
    pub margin: T,
    pub passed: bool,
    /// Set on gap verdicts whose mean falls outside the hull of the range;
    /// the verdict then carries the mean-bound failure.
    pub delegated: bool,
}

impl<T: Scalar> ConditionVerdict<T> {
    fn new(condition: ConditionKind, id: &str, lhs: T, rhs: T, margin: T) -> Self {
        let passed = margin >= -T::slack(VERDICT_TOLERANCE);
        Self { condition, test_function_id: id.to_string(), lhs, rhs, margin, passed, delegated: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport<T = f64> {
    pub verdicts: Vec<ConditionVerdict<T>>,
    pub overall: bool,
}

impl<T: Scalar> ConditionReport<T> {
    fn from_verdicts(verdicts: Vec<ConditionVerdict<T>>) -> Self {
        let overall = verdicts.iter().all(|v| v.passed);
        Self { verdicts, overall }
    }

    /// Verdict with the smallest margin (first on ties).
    pub fn worst(&self) -> Option<&ConditionVerdict<T>> {
        self.verdicts.iter().fold(None, |best: Option<&ConditionVerdict<T>>, v| match best {
            Some(b) if b.margin <= v.margin => Some(b),
            _ => Some(v),
        })
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionVerdict<T>> {
        self.verdicts.iter().filter(|v| !v.passed)
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}

/// `E(f) = sum f_i rho1_i`,
/// `V(f) = sum_ij f_i f_j rho2_ij + sum_i f_i^2 rho1_i - E(f)^2`.
pub fn mean_and_variance<T: Scalar>(corr: &CorrelationPair<T>, f: &[T]) -> Result<(T, T)> {
    let s = corr.site_count();
    check_len(s, f.len())?;
    let mut mean = T::zero();
    let mut second = T::zero();
    for i in 0..s {
        let r1 = corr.rho1()[i].clone();
        mean = mean + f[i].clone() * r1.clone();
        second = second + f[i].clone() * f[i].clone() * r1;
        for j in 0..s {
            second = second + f[i].clone() * f[j].clone() * corr.rho2()[(i, j)].clone();
        }
    }
    let variance = second - mean.clone() * mean.clone();
    Ok((mean, variance))
}

pub fn check_variance<T: Scalar>(corr: &CorrelationPair<T>, f: &[T]) -> Result<ConditionVerdict<T>> {
    variance_verdict(corr, f, "f")
}

fn variance_verdict<T: Scalar>(corr: &CorrelationPair<T>, f: &[T], id: &str) -> Result<ConditionVerdict<T>> {
    let (_, v) = mean_and_variance(corr, f)?;
    Ok(ConditionVerdict::new(ConditionKind::Variance, id, v.clone(), T::zero(), v))
}

pub fn check_gap<T: Scalar>(corr: &CorrelationPair<T>, f: &[T], domain: &Domain) -> Result<ConditionVerdict<T>> {
    let configs = enumerate_configurations(domain)?;
    let range = range_over(f, &configs, DEFAULT_MERGE_TOLERANCE)?;
    gap_verdict(corr, f, &range, "f")
}

fn gap_verdict<T: Scalar>(
    corr: &CorrelationPair<T>,
    f: &[T],
    range: &RangeSet<T>,
    id: &str,
) -> Result<ConditionVerdict<T>> {
    let (e, v) = mean_and_variance(corr, f)?;
    let slack = T::slack(DEFAULT_MERGE_TOLERANCE);
    match range.bracket(&e, &slack) {
        (Some(lo), Some(hi)) => {
            let rhs = (hi - e.clone()) * (e - lo);
            let margin = v.clone() - rhs.clone();
            Ok(ConditionVerdict::new(ConditionKind::Gap, id, v, rhs, margin))
        }
        _ => {
            let mut verdict = mean_verdict(corr, f, range, id)?;
            verdict.condition = ConditionKind::Gap;
            verdict.delegated = true;
            Ok(verdict)
        }
    }
}

pub fn check_upper<T: Scalar>(corr: &CorrelationPair<T>, f: &[T], domain: &Domain) -> Result<ConditionVerdict<T>> {
    let configs = enumerate_configurations(domain)?;
    let range = range_over(f, &configs, DEFAULT_MERGE_TOLERANCE)?;
    upper_verdict(corr, f, &range, "f")
}

fn upper_verdict<T: Scalar>(
    corr: &CorrelationPair<T>,
    f: &[T],
    range: &RangeSet<T>,
    id: &str,
) -> Result<ConditionVerdict<T>> {
    let (e, v) = mean_and_variance(corr, f)?;
    let bound = (range.max().clone() - e.clone()) * (e - range.min().clone());
    let margin = bound.clone() - v.clone();
    Ok(ConditionVerdict::new(ConditionKind::Upper, id, bound, v, margin))
}

pub fn check_mean_bounds<T: Scalar>(
    corr: &CorrelationPair<T>,
    f: &[T],
    domain: &Domain,
) -> Result<ConditionVerdict<T>> {
    let configs = enumerate_configurations(domain)?;
    let range = range_over(f, &configs, DEFAULT_MERGE_TOLERANCE)?;
    mean_verdict(corr, f, &range, "f")
}

/// `lhs = E`; `rhs` is whichever end of `[inf F, sup F]` is closer.
fn mean_verdict<T: Scalar>(
    corr: &CorrelationPair<T>,
    f: &[T],
    range: &RangeSet<T>,
    id: &str,
) -> Result<ConditionVerdict<T>> {
    let (e, _) = mean_and_variance(corr, f)?;
    let above_min = e.clone() - range.min().clone();
    let below_max = range.max().clone() - e.clone();
    let (rhs, margin) =
        if above_min <= below_max { (range.min().clone(), above_min) } else { (range.max().clone(), below_max) };
    Ok(ConditionVerdict::new(ConditionKind::MeanBounds, id, e, rhs, margin))
}

/// Named linear observable `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction<T = f64> {
    pub id: String,
    pub values: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TestFamily<T = f64> {
    /// Indicator of each site.
    Singletons,
    /// Indicator of each unordered pair of distinct sites.
    Pairs,
    /// Indicators of every metric ball `{j : d(c, j) <= r}` with `r` up to
    /// the given radius, deduplicated.
    Balls {
        radius: f64,
    },
    Custom(Vec<TestFunction<T>>),
}

impl<T: Scalar> TestFamily<T> {
    pub fn functions(&self, domain: &Domain) -> Result<Vec<TestFunction<T>>> {
        let s = domain.site_count();
        let labels = domain.labels();
        let indicator = |sites: &[usize]| {
            let mut v = vec![T::zero(); s];
            for &i in sites {
                v[i] = T::one();
            }
            v
        };
        Ok(match self {
            Self::Singletons => {
                (0..s).map(|i| TestFunction { id: format!("site[{}]", labels[i]), values: indicator(&[i]) }).collect()
            }
            Self::Pairs => (0..s)
                .flat_map(|i| (i + 1..s).map(move |j| (i, j)))
                .map(|(i, j)| TestFunction {
                    id: format!("pair[{},{}]", labels[i], labels[j]),
                    values: indicator(&[i, j]),
                })
                .collect(),
            Self::Balls { radius } => {
                if !radius.is_finite() || *radius < 0.0 {
                    return Err(Error::InvalidArgument(format!("ball radius {radius} must be finite and nonnegative")));
                }
                let mut windows: Vec<Vec<usize>> = Vec::new();
                let mut out = Vec::new();
                for c in 0..s {
                    let mut radii: Vec<f64> = (0..s).map(|j| domain.distance(c, j)).filter(|d| *d <= *radius).collect();
                    radii.sort_by(f64::total_cmp);
                    radii.dedup();
                    for r in radii {
                        let window: Vec<usize> = (0..s).filter(|&j| domain.distance(c, j) <= r).collect();
                        if windows.contains(&window) {
                            continue;
                        }
                        out.push(TestFunction { id: format!("ball[{},{r}]", labels[c]), values: indicator(&window) });
                        windows.push(window);
                    }
                }
                out
            }
            Self::Custom(functions) => {
                for f in functions {
                    check_len(s, f.values.len())?;
                }
                functions.clone()
            }
        })
    }
}

/// Evaluates variance, gap, upper and mean-bound conditions for every test
/// function of every family, in declaration order.
pub fn run_battery<T: Scalar>(
    domain: &Domain,
    corr: &CorrelationPair<T>,
    families: &[TestFamily<T>],
) -> Result<ConditionReport<T>> {
    check_len(domain.site_count(), corr.site_count())?;
    let functions = families.iter().map(|family| family.functions(domain)).collect::<Result<Vec<_>>>()?.concat();
    if functions.is_empty() {
        return Ok(ConditionReport::from_verdicts(Vec::new()));
    }
    let configs = enumerate_configurations(domain)?;
    let mut verdicts = Vec::with_capacity(4 * functions.len());
    for function in &functions {
        verdicts.extend(battery_for(corr, function, &configs)?);
    }
    Ok(ConditionReport::from_verdicts(verdicts))
}

fn battery_for<T: Scalar>(
    corr: &CorrelationPair<T>,
    function: &TestFunction<T>,
    configs: &[Configuration],
) -> Result<[ConditionVerdict<T>; 4]> {
    let f = &function.values;
    let id = function.id.as_str();
    let range = range_over(f, configs, DEFAULT_MERGE_TOLERANCE)?;
    Ok([
        variance_verdict(corr, f, id)?,
        gap_verdict(corr, f, &range, id)?,
        upper_verdict(corr, f, &range, id)?,
        mean_verdict(corr, f, &range, id)?,
    ])
}

/// `p(E) + a V` for `p(x) = a x^2 + b x + c`: the pairing of the quadratic
/// polynomial `p(<f, eta>)` with the correlations.
pub fn quadratic_condition_value<T: Scalar>(corr: &CorrelationPair<T>, f: &[T], a: &T, b: &T, c: &T) -> Result<T> {
    let (e, v) = mean_and_variance(corr, f)?;
    Ok(a.clone() * v + a.clone() * e.clone() * e.clone() + b.clone() * e + c.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use crate::scalar::Rational;

    fn two_site(rho1: f64, q: f64) -> CorrelationPair<f64> {
        CorrelationPair::new(vec![rho1, rho1], Matrix::from_rows(vec![vec![0.0, q], vec![q, 0.0]]).unwrap()).unwrap()
    }

    fn one_site(rho1: Rational, rho2: Rational) -> CorrelationPair<Rational> {
        CorrelationPair::new(vec![rho1], Matrix::filled(1, 1, rho2)).unwrap()
    }

    #[test]
    fn mean_and_variance_examples() {
        let corr = two_site(0.75, 0.4);
        assert_eq!(mean_and_variance(&corr, &[0.0, 0.0]).unwrap(), (0.0, 0.0));
        let (e, v) = mean_and_variance(&corr, &[1.0, 1.0]).unwrap();
        assert_eq!(e, 1.5);
        assert!((v - 0.05).abs() < 1e-12);

        let corr = one_site(Rational::ratio(1, 3), Rational::ratio(1, 1));
        let (e, v) = mean_and_variance(&corr, &[Rational::ratio(1, 1)]).unwrap();
        assert_eq!(e, Rational::ratio(1, 3));
        assert_eq!(v, Rational::ratio(11, 9));
    }

    #[test]
    fn variance_examples() {
        let v = check_variance(&two_site(0.5, 0.1), &[1.0, 1.0]).unwrap();
        assert!(v.passed && (v.margin - 0.2).abs() < 1e-12);
        let v = check_variance(&two_site(0.75, 0.3), &[1.0, 1.0]).unwrap();
        assert!(!v.passed && (v.margin + 0.15).abs() < 1e-12);
    }

    #[test]
    fn gap_examples() {
        let d = Domain::lattice_gas(2).unwrap();
        let v = check_gap(&two_site(0.75, 0.4), &[1.0, 1.0], &d).unwrap();
        assert!(!v.passed);
        assert_eq!(v.rhs, 0.25);
        assert!((v.lhs - 0.05).abs() < 1e-12);

        let v = check_gap(&two_site(0.75, 0.5), &[1.0, 1.0], &d).unwrap();
        assert!(v.passed);
        assert_eq!(v.margin, 0.0);
    }

    #[test]
    fn gap_reduces_to_variance_when_mean_is_in_range() {
        let d = Domain::lattice_gas(2).unwrap();
        let corr = two_site(0.5, 0.1);
        let gap = check_gap(&corr, &[1.0, 1.0], &d).unwrap();
        assert_eq!(gap.rhs, 0.0);
        assert_eq!(gap.margin, check_variance(&corr, &[1.0, 1.0]).unwrap().margin);
    }

    #[test]
    fn gap_outside_hull_is_delegated() {
        let d = Domain::lattice_gas(1).unwrap();
        let corr = CorrelationPair::new(vec![1.2], Matrix::filled(1, 1, 0.0)).unwrap();
        let v = check_gap(&corr, &[1.0], &d).unwrap();
        assert!(v.delegated && !v.passed);
        assert_eq!(v.condition, ConditionKind::Gap);
    }

    #[test]
    fn upper_examples() {
        let d = Domain::lattice_gas(1).unwrap();
        let corr = CorrelationPair::new(vec![0.5], Matrix::filled(1, 1, 0.0)).unwrap();
        let v = check_upper(&corr, &[1.0], &d).unwrap();
        assert!(v.passed && v.margin == 0.0);

        let corr = one_site(Rational::ratio(1, 3), Rational::ratio(1, 1));
        let one = [Rational::ratio(1, 1)];
        let v = check_upper(&corr, &one, &Domain::single_site(4).unwrap()).unwrap();
        assert!(v.passed);
        assert_eq!(v.lhs, Rational::ratio(11, 9));
        assert_eq!(v.margin, Rational::ratio(0, 1));
        let v = check_upper(&corr, &one, &Domain::single_site(3).unwrap()).unwrap();
        assert!(!v.passed);
        assert_eq!(v.lhs, Rational::ratio(8, 9));
    }

    #[test]
    fn mean_bound_examples() {
        let d = Domain::lattice_gas(1).unwrap();
        let corr = CorrelationPair::new(vec![1.2], Matrix::filled(1, 1, 0.0)).unwrap();
        assert!(!check_mean_bounds(&corr, &[1.0], &d).unwrap().passed);

        let d = Domain::builder(vec![Some(3); 3]).total_exact(2).build().unwrap();
        let ok = CorrelationPair::new(vec![2.0 / 3.0; 3], Matrix::filled(3, 3, 0.0)).unwrap();
        assert!(check_mean_bounds(&ok, &[1.0; 3], &d).unwrap().passed);
        let too_many = CorrelationPair::new(vec![0.8; 3], Matrix::filled(3, 3, 0.0)).unwrap();
        assert!(!check_mean_bounds(&too_many, &[1.0; 3], &d).unwrap().passed);
    }

    #[test]
    fn battery_on_pair_instance_fails_gap_only() {
        let d = Domain::lattice_gas(2).unwrap();
        let report = run_battery(&d, &two_site(0.75, 0.4), &[TestFamily::Pairs]).unwrap();
        assert!(!report.overall);
        let worst = report.worst().unwrap();
        assert_eq!(worst.condition, ConditionKind::Gap);
        assert_eq!(worst.test_function_id, "pair[s0,s1]");
        assert!(report.verdicts.iter().find(|v| v.condition == ConditionKind::Variance).unwrap().passed);
    }

    #[test]
    fn battery_on_example_fails_upper() {
        let d = Domain::single_site(5).unwrap();
        let corr = CorrelationPair::new(vec![0.0], Matrix::filled(1, 1, 1.0)).unwrap();
        let report = run_battery(&d, &corr, &[TestFamily::Singletons]).unwrap();
        let upper = report.verdicts.iter().find(|v| v.condition == ConditionKind::Upper).unwrap();
        assert!(!upper.passed);
        assert_eq!(upper.lhs, 0.0);
        assert_eq!(upper.rhs, 1.0);
    }

    #[test]
    fn empty_family_gives_empty_passing_report() {
        let d = Domain::lattice_gas(2).unwrap();
        let report = run_battery(&d, &two_site(0.75, 0.4), &[TestFamily::Custom(vec![])]).unwrap();
        assert!(report.overall && report.verdicts.is_empty() && report.worst().is_none());
    }

    #[test]
    fn ball_family_deduplicates() {
        let d = Domain::cycle(4, false).unwrap();
        let fs = TestFamily::<f64>::Balls { radius: 1.0 }.functions(&d).unwrap();
        // four singletons and four 3-site arcs
        assert_eq!(fs.len(), 8);
        let all = TestFamily::<f64>::Balls { radius: 2.0 }.functions(&d).unwrap();
        assert_eq!(all.len(), 9);
    }

    #[test]
    fn quadratic_condition_value_matches_definition() {
        let corr = two_site(0.75, 0.4);
        let f = [1.0, 1.0];
        let (e, v) = mean_and_variance(&corr, &f).unwrap();
        let value = quadratic_condition_value(&corr, &f, &1.0, &-3.0, &2.0).unwrap();
        assert!((value - (v + (e - 1.0) * (e - 2.0))).abs() < 1e-12);
    }
}
