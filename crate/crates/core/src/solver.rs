//! Realizability decisions, certificate replay and the minimal third moment.
//!
//! The LP has one variable `p_eta >= 0` per admissible configuration and the
//! rows
//!
//! * `sum p_eta = 1`,
//! * `sum p_eta n_i(eta) = rho1_i` for each site,
//! * `sum p_eta eta^(2)_ij = rho2_ij` for each `i <= j`.
//!
//! A Farkas vector `y` of this system (see [`crate::lp`]) becomes the
//! certificate `P = -(y_0 + sum y_i n_i + sum_{i<=j} y_ij eta^(2)_ij)`, which
//! is nonnegative on every admissible configuration and pairs negatively
//! with `(rho1, rho2)`.

use crate::enumeration::enumerate_configurations;
use crate::error::{Error, Result};
use crate::lp::{lp_feasibility, LpOutcome, SolverOptions};
use crate::matrix::Matrix;
use crate::model::{
    correlations_of, eval_quadratic, h3, max_correlation_gap, pairing, Configuration, CorrelationPair, Distribution,
    Domain, QuadraticPolynomial, RealizationResult,
};
use crate::scalar::{self, Scalar};

/// Certificates must pair below `-CERTIFICATE_MARGIN * tolerance`.
pub const CERTIFICATE_MARGIN: f64 = 10.0;

/// Cubic `quadratic(eta) + f3 * H_3(eta)` with `chi == 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedCubic<T = f64> {
    pub quadratic: QuadraticPolynomial<T>,
    pub f3: T,
}

impl<T: Scalar> RestrictedCubic<T> {
    pub fn eval(&self, config: &Configuration) -> Result<T> {
        Ok(eval_quadratic(&self.quadratic, config)? + self.f3.clone() * T::from_count(h3(config)))
    }

    /// `f0 + <f1, rho1> + <f2, rho2> + f3 * r`.
    pub fn pairing(&self, corr: &CorrelationPair<T>, r: &T) -> Result<T> {
        Ok(pairing(&self.quadratic, corr)? + self.f3.clone() * r.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ThirdMomentResult<T = f64> {
    /// `r_star` is the least `E[H_3]` over realizing distributions. `bound`
    /// is a restricted cubic, nonnegative on configurations, whose pairing
    /// at `R = r_star` vanishes; it proves no realization does better.
    Finite {
        r_star: T,
        witness: Distribution<T>,
        bound: RestrictedCubic<T>,
    },
    Infeasible {
        certificate: QuadraticPolynomial<T>,
    },
}

/// Row layout of the realization LP.
pub(crate) fn pair_rows(sites: usize) -> Vec<(usize, usize)> {
    (0..sites).flat_map(|i| (i..sites).map(move |j| (i, j))).collect()
}

fn realization_system<T: Scalar>(configs: &[Configuration], corr: &CorrelationPair<T>) -> (Matrix<T>, Vec<T>) {
    let s = corr.site_count();
    let pairs = pair_rows(s);
    let rows = 1 + s + pairs.len();
    let a = Matrix::from_fn(rows, configs.len(), |r, j| {
        let c = &configs[j];
        let count = if r == 0 {
            1
        } else if r <= s {
            u64::from(c.occupancy()[r - 1])
        } else {
            let (p, q) = pairs[r - 1 - s];
            c.factorial_entry(p, q)
        };
        T::from_count(count)
    });
    let mut b = Vec::with_capacity(rows);
    b.push(T::one());
    b.extend(corr.rho1().iter().cloned());
    b.extend(pairs.iter().map(|&(i, j)| corr.rho2()[(i, j)].clone()));
    (a, b)
}

/// Quadratic polynomial whose value on `eta` is `y . A_eta` for the row
/// layout above.
fn row_polynomial<T: Scalar>(y: &[T], sites: usize) -> QuadraticPolynomial<T> {
    let mut poly = QuadraticPolynomial::zero(sites);
    let (f0, f1, f2) = poly.parts_mut();
    *f0 = y[0].clone();
    f1.clone_from_slice(&y[1..=sites]);
    let half = scalar::half::<T>();
    for (k, (i, j)) in pair_rows(sites).into_iter().enumerate() {
        let v = y[1 + sites + k].clone();
        if i == j {
            f2[(i, i)] = v;
        } else {
            f2[(i, j)] = v.clone() * half.clone();
            f2[(j, i)] = v * half.clone();
        }
    }
    poly
}

fn margin_ok<T: Scalar>(value: &T, tolerance: f64) -> bool {
    if T::EXACT {
        *value < T::zero()
    } else {
        *value <= -T::slack(CERTIFICATE_MARGIN * tolerance)
    }
}

/// Normalizes a candidate certificate and checks it against the listed
/// configurations and the correlations.
pub(crate) fn finalize_certificate<T: Scalar>(
    configs: &[Configuration],
    candidate: QuadraticPolynomial<T>,
    corr: &CorrelationPair<T>,
    tolerance: f64,
) -> Result<QuadraticPolynomial<T>> {
    let certificate = candidate.normalized();
    let floor = -T::slack(tolerance);
    for c in configs {
        let v = eval_quadratic(&certificate, c)?;
        if v < floor {
            return Err(Error::Ambiguous(format!("certificate takes value {v} on {c}")));
        }
    }
    let paired = pairing(&certificate, corr)?;
    if !margin_ok(&paired, tolerance) {
        return Err(Error::Ambiguous(format!("certificate pairing {paired} does not clear the margin")));
    }
    Ok(certificate)
}

/// Analytic certificates for inputs that break an obvious constraint:
/// negative entries, a nonzero diagonal on lattice-gas sites, mass on
/// excluded pairs or on sites with zero capacity.
pub fn validation_certificate<T: Scalar>(
    domain: &Domain,
    corr: &CorrelationPair<T>,
    tolerance: f64,
) -> Option<QuadraticPolynomial<T>> {
    let s = domain.site_count();
    let caps = domain.occupancy_caps();
    let mut candidates: Vec<QuadraticPolynomial<T>> = Vec::new();
    let linear = |i: usize, sign: T| {
        let mut p = QuadraticPolynomial::zero(s);
        p.parts_mut().1[i] = sign;
        p
    };
    let quadratic = |i: usize, j: usize, sign: T| {
        let mut p = QuadraticPolynomial::zero(s);
        let f2 = p.parts_mut().2;
        f2[(i, j)] = sign.clone();
        f2[(j, i)] = sign;
        p
    };
    for i in 0..s {
        let r1 = &corr.rho1()[i];
        if *r1 < T::zero() {
            candidates.push(linear(i, T::one()));
        } else if caps[i] == 0 && *r1 > T::zero() {
            candidates.push(linear(i, -T::one()));
        }
    }
    for i in 0..s {
        for j in i..s {
            let r2 = &corr.rho2()[(i, j)];
            if *r2 < T::zero() {
                candidates.push(quadratic(i, j, T::one()));
            } else if *r2 > T::zero() {
                let forbidden =
                    if i == j { caps[i] <= 1 } else { domain.excludes(i, j) || caps[i] == 0 || caps[j] == 0 };
                if forbidden {
                    candidates.push(quadratic(i, j, -T::one()));
                }
            }
        }
    }
    candidates.into_iter().find(|p| pairing(p, corr).is_ok_and(|v| margin_ok(&v, tolerance))).map(|p| p.normalized())
}

fn check_shapes<T: Scalar>(domain: &Domain, corr: &CorrelationPair<T>) -> Result<()> {
    if corr.site_count() != domain.site_count() {
        return Err(Error::Dimension { expected: domain.site_count(), found: corr.site_count() });
    }
    Ok(())
}

/// Decides whether `corr` is realized by some distribution on the
/// admissible configurations of `domain`.
pub fn check_realizability<T: Scalar>(
    domain: &Domain,
    corr: &CorrelationPair<T>,
    opts: &SolverOptions,
) -> Result<RealizationResult<T>> {
    opts.validate::<T>()?;
    check_shapes(domain, corr)?;
    if let Some(certificate) = validation_certificate(domain, corr, opts.tolerance) {
        return Ok(RealizationResult::Infeasible { certificate });
    }
    let configs = enumerate_configurations(domain)?;
    realize_over(domain, &configs, corr, opts)
}

/// Realization LP over an explicit configuration list.
pub fn realize_over<T: Scalar>(
    domain: &Domain,
    configs: &[Configuration],
    corr: &CorrelationPair<T>,
    opts: &SolverOptions,
) -> Result<RealizationResult<T>> {
    let (a, b) = realization_system(configs, corr);
    match lp_feasibility(&a, &b, None, opts)? {
        LpOutcome::Optimal(sol) => {
            let distribution = witness_from(domain, configs, &sol.x, corr, opts.tolerance)?;
            Ok(RealizationResult::Feasible { distribution })
        }
        LpOutcome::Infeasible { farkas, .. } => {
            let candidate = row_polynomial(&farkas, corr.site_count()).scaled(&-T::one());
            let certificate = finalize_certificate(configs, candidate, corr, opts.tolerance)?;
            Ok(RealizationResult::Infeasible { certificate })
        }
        LpOutcome::Unbounded => unreachable!("feasibility problems have no objective"),
    }
}

fn witness_from<T: Scalar>(
    domain: &Domain,
    configs: &[Configuration],
    x: &[T],
    corr: &CorrelationPair<T>,
    tolerance: f64,
) -> Result<Distribution<T>> {
    let atoms: Vec<(Configuration, T)> =
        configs.iter().zip(x).filter(|(_, w)| **w > T::zero()).map(|(c, w)| (c.clone(), w.clone())).collect();
    let distribution = Distribution::new(domain, atoms).map_err(|e| Error::Ambiguous(e.to_string()))?;
    let gap = max_correlation_gap(&correlations_of(&distribution), corr);
    if gap > tolerance {
        return Err(Error::Ambiguous(format!("witness misses the correlations by {gap:e}")));
    }
    Ok(distribution)
}

/// Replays a certificate by enumeration only: true iff `P >= -tol` on every
/// admissible configuration and the pairing is below `-tol`.
pub fn verify_certificate<T: Scalar>(
    domain: &Domain,
    certificate: &QuadraticPolynomial<T>,
    corr: &CorrelationPair<T>,
    tol: f64,
) -> Result<bool> {
    check_shapes(domain, corr)?;
    if certificate.site_count() != domain.site_count() {
        return Err(Error::Dimension { expected: domain.site_count(), found: certificate.site_count() });
    }
    let tol = T::from_f64(tol).ok_or_else(|| Error::InvalidArgument("tolerance is not representable".into()))?;
    if pairing(certificate, corr)? >= -tol.clone() {
        return Ok(false);
    }
    for c in enumerate_configurations(domain)? {
        if eval_quadratic(certificate, &c)? < -tol.clone() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Least `E[H_3]` over distributions realizing `corr` on `domain`.
pub fn minimal_third_moment<T: Scalar>(
    domain: &Domain,
    corr: &CorrelationPair<T>,
    opts: &SolverOptions,
) -> Result<ThirdMomentResult<T>> {
    opts.validate::<T>()?;
    check_shapes(domain, corr)?;
    if let Some(certificate) = validation_certificate(domain, corr, opts.tolerance) {
        return Ok(ThirdMomentResult::Infeasible { certificate });
    }
    let configs = enumerate_configurations(domain)?;
    let (a, b) = realization_system(&configs, corr);
    let cost: Vec<T> = configs.iter().map(|c| T::from_count(h3(c))).collect();
    match lp_feasibility(&a, &b, Some(&cost), opts)? {
        LpOutcome::Optimal(sol) => {
            let witness = witness_from(domain, &configs, &sol.x, corr, opts.tolerance)?;
            let bound = RestrictedCubic {
                quadratic: row_polynomial(&sol.dual, corr.site_count()).scaled(&-T::one()),
                f3: T::one(),
            };
            let r_star = if sol.objective < T::zero() { T::zero() } else { sol.objective };
            Ok(ThirdMomentResult::Finite { r_star, witness, bound })
        }
        LpOutcome::Infeasible { farkas, .. } => {
            let candidate = row_polynomial(&farkas, corr.site_count()).scaled(&-T::one());
            let certificate = finalize_certificate(&configs, candidate, corr, opts.tolerance)?;
            Ok(ThirdMomentResult::Infeasible { certificate })
        }
        LpOutcome::Unbounded => Err(Error::Ambiguous("third-moment LP reported unbounded".into())),
    }
}

/// Enumerated configurations with the realization system `(A, b)`.
pub fn realization_system_for<T: Scalar>(
    domain: &Domain,
    corr: &CorrelationPair<T>,
) -> Result<(Vec<Configuration>, Matrix<T>, Vec<T>)> {
    check_shapes(domain, corr)?;
    let configs = enumerate_configurations(domain)?;
    let (a, b) = realization_system(&configs, corr);
    Ok((configs, a, b))
}
