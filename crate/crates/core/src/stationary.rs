//! Finite symmetry groups acting on sites: invariance checks, uniform
//! (Haar) averaging of distributions, and the realization LP restricted to
//! group-invariant distributions.
//!
//! The invariant LP has one variable per configuration orbit (the total
//! mass `q_O` of the orbit, spread uniformly over its members) and one row
//! per orbit of sites and per orbit of unordered site pairs. Since the
//! uniform average of any realizing distribution is invariant and still
//! realizes stationary correlations, the reduced LP is feasible exactly when
//! the full one is.

use std::collections::{BTreeMap, BTreeSet};

use crate::enumeration::enumerate_configurations;
use crate::error::{Error, Result};
use crate::lp::{lp_feasibility, LpOutcome, SolverOptions};
use crate::matrix::Matrix;
use crate::model::{
    correlations_of, max_correlation_gap, torus_coordinates, torus_index, Configuration, CorrelationPair, Distribution,
    Domain, QuadraticPolynomial, RealizationResult,
};
use crate::scalar::{self, Scalar};
use crate::solver::{finalize_certificate, validation_certificate};

/// Tolerance for invariance of floating correlations.
pub const STATIONARITY_TOLERANCE: f64 = 1e-12;

/// Site permutation: site `i` is sent to `perm[i]`.
pub type Permutation = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    elements: Vec<Permutation>,
    identity: usize,
}

impl FiniteGroup {
    /// Validates that the permutations form a group.
    pub fn new(elements: Vec<Permutation>) -> Result<Self> {
        let degree = elements.first().map(Vec::len).ok_or_else(|| Error::InvalidArgument("empty group".into()))?;
        let set: BTreeSet<&Permutation> = elements.iter().collect();
        if set.len() != elements.len() {
            return Err(Error::InvalidArgument("group elements repeat".into()));
        }
        for g in &elements {
            if g.len() != degree {
                return Err(Error::Dimension { expected: degree, found: g.len() });
            }
            let image: BTreeSet<usize> = g.iter().copied().collect();
            if image.len() != degree || image.iter().any(|&i| i >= degree) {
                return Err(Error::InvalidArgument(format!("{g:?} is not a permutation")));
            }
        }
        let identity_perm: Permutation = (0..degree).collect();
        let identity = elements
            .iter()
            .position(|g| *g == identity_perm)
            .ok_or_else(|| Error::InvalidArgument("group lacks the identity".into()))?;
        for g in &elements {
            if !set.contains(&inverse(g)) {
                return Err(Error::InvalidArgument("group is not closed under inverses".into()));
            }
            for h in &elements {
                if !set.contains(&compose(g, h)) {
                    return Err(Error::InvalidArgument("group is not closed under composition".into()));
                }
            }
        }
        Ok(Self { elements, identity })
    }

    pub fn trivial(sites: usize) -> Self {
        Self { elements: vec![(0..sites).collect()], identity: 0 }
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self) -> usize {
        self.elements[0].len()
    }

    /// `(g eta)_{g(i)} = eta_i`.
    pub fn act(g: &Permutation, config: &Configuration) -> Configuration {
        let mut out = vec![0; config.site_count()];
        for (i, &n) in config.occupancy().iter().enumerate() {
            out[g[i]] = n;
        }
        Configuration::new(out)
    }

    /// Checks the group preserves distances and caps of `domain`.
    pub fn check_acts_on(&self, domain: &Domain) -> Result<()> {
        if self.degree() != domain.site_count() {
            return Err(Error::Dimension { expected: domain.site_count(), found: self.degree() });
        }
        let caps = domain.occupancy_caps();
        for g in &self.elements {
            for i in 0..self.degree() {
                if caps[g[i]] != caps[i] {
                    return Err(Error::Precondition(format!("group element {g:?} does not preserve caps")));
                }
                for j in 0..self.degree() {
                    if domain.distance(g[i], g[j]) != domain.distance(i, j) {
                        return Err(Error::Precondition(format!("group element {g:?} does not preserve distances")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Orbit of `x` under `act`, each member once.
    fn orbit<X: Ord + Clone>(&self, x: &X, act: impl Fn(&Permutation, &X) -> X) -> BTreeSet<X> {
        self.elements.iter().map(|g| act(g, x)).collect()
    }
}

fn compose(g: &Permutation, h: &Permutation) -> Permutation {
    h.iter().map(|&i| g[i]).collect()
}

fn inverse(g: &Permutation) -> Permutation {
    let mut inv = vec![0; g.len()];
    for (i, &gi) in g.iter().enumerate() {
        inv[gi] = i;
    }
    inv
}

/// All translations of a discrete torus with the given side lengths, sites
/// indexed as in [`Domain::torus`].
pub fn translation_group(dims: &[usize]) -> Result<FiniteGroup> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidArgument("torus dimensions must be positive".into()));
    }
    let sites: usize = dims.iter().product();
    let elements = (0..sites)
        .map(|shift| {
            let offset = torus_coordinates(dims, shift);
            (0..sites)
                .map(|s| {
                    let c = torus_coordinates(dims, s);
                    let moved: Vec<usize> = c.iter().zip(&offset).zip(dims).map(|((a, b), d)| (a + b) % d).collect();
                    torus_index(dims, &moved)
                })
                .collect()
        })
        .collect();
    Ok(FiniteGroup { elements, identity: 0 })
}

/// Translation group checked against the site count of `domain`.
pub fn translation_group_for(domain: &Domain, dims: &[usize]) -> Result<FiniteGroup> {
    let product: usize = dims.iter().product();
    if product != domain.site_count() {
        return Err(Error::Dimension { expected: domain.site_count(), found: product });
    }
    translation_group(dims)
}

pub fn is_stationary<T: Scalar>(corr: &CorrelationPair<T>, group: &FiniteGroup) -> bool {
    if group.degree() != corr.site_count() {
        return false;
    }
    let slack = T::slack(STATIONARITY_TOLERANCE);
    let s = corr.site_count();
    group.elements().iter().all(|g| {
        (0..s).all(|i| {
            scalar::approx_eq(&corr.rho1()[g[i]], &corr.rho1()[i], &slack)
                && (0..s).all(|j| scalar::approx_eq(&corr.rho2()[(g[i], g[j])], &corr.rho2()[(i, j)], &slack))
        })
    })
}

/// Uniform average of `g mu` over the group; atoms in lexicographic order.
pub fn symmetrize<T: Scalar>(dist: &Distribution<T>, group: &FiniteGroup) -> Result<Distribution<T>> {
    if group.degree() != dist.site_count() {
        return Err(Error::Dimension { expected: dist.site_count(), found: group.degree() });
    }
    let share = T::one() / T::from_count(group.order() as u64);
    let mut mass: BTreeMap<Configuration, T> = BTreeMap::new();
    for (config, weight) in dist.atoms() {
        for g in group.elements() {
            let entry = mass.entry(FiniteGroup::act(g, config)).or_insert_with(T::zero);
            *entry = entry.clone() + weight.clone() * share.clone();
        }
    }
    Ok(Distribution::from_parts_unchecked(dist.site_count(), mass.into_iter().collect()))
}

struct OrbitSystem<T> {
    /// Orbit members, each orbit sorted; the first is the representative.
    orbits: Vec<Vec<Configuration>>,
    site_orbits: Vec<Vec<usize>>,
    pair_orbits: Vec<Vec<(usize, usize)>>,
    a: Matrix<T>,
    b: Vec<T>,
}

fn orbit_system<T: Scalar>(
    configs: &[Configuration],
    corr: &CorrelationPair<T>,
    group: &FiniteGroup,
) -> OrbitSystem<T> {
    let s = corr.site_count();
    let mut assigned: BTreeSet<&Configuration> = BTreeSet::new();
    let mut orbits: Vec<Vec<Configuration>> = Vec::new();
    for config in configs {
        if assigned.contains(config) {
            continue;
        }
        let orbit: Vec<Configuration> = group.orbit(config, FiniteGroup::act).into_iter().collect();
        for member in &orbit {
            if let Some(c) = configs.iter().find(|c| *c == member) {
                assigned.insert(c);
            }
        }
        orbits.push(orbit);
    }

    let mut seen_sites = BTreeSet::new();
    let mut site_orbits = Vec::new();
    for i in 0..s {
        if seen_sites.insert(i) {
            let orbit: Vec<usize> = group.orbit(&i, |g, &x| g[x]).into_iter().collect();
            seen_sites.extend(orbit.iter().copied());
            site_orbits.push(orbit);
        }
    }
    let normalize = |(i, j): (usize, usize)| if i <= j { (i, j) } else { (j, i) };
    let mut seen_pairs = BTreeSet::new();
    let mut pair_orbits = Vec::new();
    for i in 0..s {
        for j in i..s {
            if seen_pairs.insert((i, j)) {
                let orbit: Vec<(usize, usize)> =
                    group.orbit(&(i, j), |g, &(x, y)| normalize((g[x], g[y]))).into_iter().collect();
                seen_pairs.extend(orbit.iter().copied());
                pair_orbits.push(orbit);
            }
        }
    }

    let rows = 1 + site_orbits.len() + pair_orbits.len();
    // Column value: the orbit average of the row feature at the orbit's
    // representative site or pair.
    let a = Matrix::from_fn(rows, orbits.len(), |r, k| {
        let orbit = &orbits[k];
        if r == 0 {
            return T::one();
        }
        let total: u64 = if r <= site_orbits.len() {
            let site = site_orbits[r - 1][0];
            orbit.iter().map(|c| u64::from(c.occupancy()[site])).sum()
        } else {
            let (i, j) = pair_orbits[r - 1 - site_orbits.len()][0];
            orbit.iter().map(|c| c.factorial_entry(i, j)).sum()
        };
        T::from_count(total) / T::from_count(orbit.len() as u64)
    });
    let mut b = vec![T::one()];
    b.extend(site_orbits.iter().map(|o| corr.rho1()[o[0]].clone()));
    b.extend(pair_orbits.iter().map(|o| corr.rho2()[o[0]].clone()));
    OrbitSystem { orbits, site_orbits, pair_orbits, a, b }
}

/// Spreads orbit-row coefficients uniformly over each orbit, giving an
/// invariant polynomial whose value on `eta` equals the orbit column of
/// `eta` paired with `y`.
fn orbit_polynomial<T: Scalar>(y: &[T], system: &OrbitSystem<T>, sites: usize) -> QuadraticPolynomial<T> {
    let mut poly = QuadraticPolynomial::zero(sites);
    let (f0, f1, f2) = poly.parts_mut();
    *f0 = y[0].clone();
    for (k, orbit) in system.site_orbits.iter().enumerate() {
        let share = y[1 + k].clone() / T::from_count(orbit.len() as u64);
        for &i in orbit {
            f1[i] = share.clone();
        }
    }
    let offset = 1 + system.site_orbits.len();
    let half = scalar::half::<T>();
    for (k, orbit) in system.pair_orbits.iter().enumerate() {
        let share = y[offset + k].clone() / T::from_count(orbit.len() as u64);
        for &(i, j) in orbit {
            if i == j {
                f2[(i, i)] = share.clone();
            } else {
                f2[(i, j)] = share.clone() * half.clone();
                f2[(j, i)] = share.clone() * half.clone();
            }
        }
    }
    poly
}

/// Realizability by a group-invariant distribution. Requires stationary
/// correlations and a group preserving the domain.
pub fn check_realizability_stationary<T: Scalar>(
    domain: &Domain,
    corr: &CorrelationPair<T>,
    group: &FiniteGroup,
    opts: &SolverOptions,
) -> Result<RealizationResult<T>> {
    opts.validate::<T>()?;
    if corr.site_count() != domain.site_count() {
        return Err(Error::Dimension { expected: domain.site_count(), found: corr.site_count() });
    }
    group.check_acts_on(domain)?;
    if !is_stationary(corr, group) {
        return Err(Error::Precondition("correlations are not invariant under the group".into()));
    }
    if let Some(certificate) = validation_certificate(domain, corr, opts.tolerance) {
        return Ok(RealizationResult::Infeasible { certificate });
    }
    let configs = enumerate_configurations(domain)?;
    let system = orbit_system(&configs, corr, group);
    match lp_feasibility(&system.a, &system.b, None, opts)? {
        LpOutcome::Optimal(sol) => {
            let mut atoms = Vec::new();
            for (orbit, q) in system.orbits.iter().zip(&sol.x) {
                if *q <= T::zero() {
                    continue;
                }
                let share = q.clone() / T::from_count(orbit.len() as u64);
                atoms.extend(orbit.iter().map(|c| (c.clone(), share.clone())));
            }
            atoms.sort_by(|a, b| a.0.cmp(&b.0));
            let distribution = Distribution::new(domain, atoms).map_err(|e| Error::Ambiguous(e.to_string()))?;
            let gap = max_correlation_gap(&correlations_of(&distribution), corr);
            if gap > opts.tolerance {
                return Err(Error::Ambiguous(format!("invariant witness misses the correlations by {gap:e}")));
            }
            Ok(RealizationResult::Feasible { distribution })
        }
        LpOutcome::Infeasible { farkas, .. } => {
            let candidate = orbit_polynomial(&farkas, &system, domain.site_count()).scaled(&-T::one());
            let certificate = finalize_certificate(&configs, candidate, corr, opts.tolerance)?;
            Ok(RealizationResult::Infeasible { certificate })
        }
        LpOutcome::Unbounded => unreachable!("feasibility problems have no objective"),
    }
}

/// Stationary correlations on a torus as a density and a pair correlation
/// indexed by displacement: `rho2_ij = rho^2 g2(x_j - x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedPairCorrelation<T = f64> {
    pub dims: Vec<usize>,
    pub rho: T,
    /// `g2[k]` is the value at the displacement with torus index `k`.
    pub g2: Vec<T>,
}

impl<T: Scalar> ReducedPairCorrelation<T> {
    pub fn displacement(&self, k: usize) -> Vec<usize> {
        torus_coordinates(&self.dims, k)
    }

    /// Rebuilds the full correlation pair.
    pub fn expand(&self) -> Result<CorrelationPair<T>> {
        let sites = self.g2.len();
        let rho_sq = self.rho.clone() * self.rho.clone();
        let rho2 = Matrix::from_fn(sites, sites, |i, j| {
            rho_sq.clone() * self.g2[displacement_index(&self.dims, i, j)].clone()
        });
        CorrelationPair::new(vec![self.rho.clone(); sites], rho2)
    }
}

/// Torus index of `x_j - x_i`, componentwise mod the side lengths.
fn displacement_index(dims: &[usize], i: usize, j: usize) -> usize {
    let ci = torus_coordinates(dims, i);
    let cj = torus_coordinates(dims, j);
    let diff: Vec<usize> = ci.iter().zip(&cj).zip(dims).map(|((a, b), d)| (b + d - a) % d).collect();
    torus_index(dims, &diff)
}

pub fn reduce_pair_correlation<T: Scalar>(
    corr: &CorrelationPair<T>,
    dims: &[usize],
) -> Result<ReducedPairCorrelation<T>> {
    let product: usize = dims.iter().product();
    if product != corr.site_count() {
        return Err(Error::Dimension { expected: corr.site_count(), found: product });
    }
    let group = translation_group(dims)?;
    if !is_stationary(corr, &group) {
        return Err(Error::Precondition("correlations are not translation invariant".into()));
    }
    let rho = corr.rho1()[0].clone();
    if rho.is_zero() {
        return Err(Error::Precondition("density is zero, so the pair correlation is undefined".into()));
    }
    let rho_sq = rho.clone() * rho.clone();
    let g2 = (0..product).map(|k| corr.rho2()[(0, k)].clone() / rho_sq.clone()).collect();
    Ok(ReducedPairCorrelation { dims: dims.to_vec(), rho, g2 })
}
