//! Domains, configurations and the correlation algebra on them.
//!
//! A configuration is an occupancy vector `n` over the sites of a finite
//! [`Domain`]. Second-order quantities always use the factorial diagonal:
//! entry `(i, i)` of the second factorial power is `n_i (n_i - 1)` and entry
//! `(i, j)`, `i != j`, is `n_i n_j`. The same convention applies to `rho2`.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{self, Scalar};

/// Absolute tolerance on the total mass of a [`Distribution`].
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Finite site set with pairwise distances and occupancy constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    labels: Vec<String>,
    distance: Matrix<f64>,
    caps: Vec<u32>,
    exclusion_diameter: Option<f64>,
    total_cap: Option<u32>,
    total_exact: Option<u32>,
}

/// Builder for [`Domain`]. A `None` cap is accepted only when the total
/// particle constraint or a positive exclusion diameter bounds the site.
#[derive(Debug, Clone)]
pub struct DomainBuilder {
    caps: Vec<Option<u32>>,
    labels: Option<Vec<String>>,
    distance: Option<Matrix<f64>>,
    exclusion_diameter: Option<f64>,
    total_cap: Option<u32>,
    total_exact: Option<u32>,
}

impl DomainBuilder {
    pub fn labels(mut self, labels: Vec<String>) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn distance(mut self, distance: Matrix<f64>) -> Self {
        self.distance = Some(distance);
        self
    }

    pub fn exclusion_diameter(mut self, diameter: f64) -> Self {
        self.exclusion_diameter = Some(diameter);
        self
    }

    pub fn total_cap(mut self, cap: u32) -> Self {
        self.total_cap = Some(cap);
        self
    }

    pub fn total_exact(mut self, count: u32) -> Self {
        self.total_exact = Some(count);
        self
    }

    pub fn build(self) -> Result<Domain> {
        let sites = self.caps.len();
        if sites == 0 {
            return Err(Error::InvalidDomain("a domain needs at least one site".into()));
        }
        let labels = match self.labels {
            Some(labels) if labels.len() != sites => {
                return Err(Error::Dimension { expected: sites, found: labels.len() })
            }
            Some(labels) => labels,
            None => (0..sites).map(|i| format!("s{i}")).collect(),
        };
        let distance = match self.distance {
            Some(d) => {
                if d.rows() != sites || d.cols() != sites {
                    return Err(Error::Dimension { expected: sites, found: d.rows().max(d.cols()) });
                }
                for ((i, j), &v) in d.iter() {
                    if !v.is_finite() || v < 0.0 {
                        return Err(Error::InvalidDomain(format!(
                            "distance ({i},{j}) = {v} is not a finite nonnegative number"
                        )));
                    }
                    if i == j && v != 0.0 {
                        return Err(Error::InvalidDomain(format!("distance ({i},{i}) must be zero")));
                    }
                    if d[(j, i)] != v {
                        return Err(Error::InvalidDomain(format!("distance is not symmetric at ({i},{j})")));
                    }
                }
                d
            }
            None => Matrix::from_fn(sites, sites, |i, j| if i == j { 0.0 } else { 1.0 }),
        };
        if let Some(diameter) = self.exclusion_diameter {
            if !diameter.is_finite() || diameter < 0.0 {
                return Err(Error::InvalidDomain(format!(
                    "exclusion diameter {diameter} must be finite and nonnegative"
                )));
            }
        }
        if self.total_cap.is_some() && self.total_exact.is_some() {
            return Err(Error::InvalidDomain("total_cap and total_exact are mutually exclusive".into()));
        }
        let hard_core = self.exclusion_diameter.is_some_and(|d| d > 0.0);
        let total_bound = self.total_cap.or(self.total_exact);
        let caps = self
            .caps
            .iter()
            .enumerate()
            .map(|(i, cap)| {
                let mut effective = match (cap, total_bound) {
                    (Some(k), Some(t)) => (*k).min(t),
                    (Some(k), None) => *k,
                    (None, Some(t)) => t,
                    (None, None) if hard_core => 1,
                    (None, None) => return Err(Error::UnboundedSite(i)),
                };
                if hard_core {
                    effective = effective.min(1);
                }
                Ok(effective)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Domain {
            labels,
            distance,
            caps,
            exclusion_diameter: self.exclusion_diameter,
            total_cap: self.total_cap,
            total_exact: self.total_exact,
        })
    }
}

impl Domain {
    pub fn builder(caps: Vec<Option<u32>>) -> DomainBuilder {
        DomainBuilder {
            caps,
            labels: None,
            distance: None,
            exclusion_diameter: None,
            total_cap: None,
            total_exact: None,
        }
    }

    /// Sites with the given finite caps, discrete metric, no other constraint.
    pub fn with_caps(caps: &[u32]) -> Result<Self> {
        Self::builder(caps.iter().copied().map(Some).collect()).build()
    }

    /// `sites` lattice-gas sites without exclusion.
    pub fn lattice_gas(sites: usize) -> Result<Self> {
        Self::with_caps(&vec![1; sites])
    }

    pub fn single_site(cap: u32) -> Result<Self> {
        Self::with_caps(&[cap])
    }

    /// Cycle of `sites` lattice-gas sites with graph distance, excluding
    /// nearest neighbours when `exclude_neighbours` is set.
    pub fn cycle(sites: usize, exclude_neighbours: bool) -> Result<Self> {
        let dims = [sites];
        Self::torus(&dims, 1, exclude_neighbours.then_some(1.5))
    }

    /// Discrete torus with periodic L1 distance, uniform cap and optional
    /// exclusion diameter. Sites are indexed row-major with the last
    /// dimension fastest.
    pub fn torus(dims: &[usize], cap: u32, exclusion_diameter: Option<f64>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidDomain("torus dimensions must be positive".into()));
        }
        let sites: usize = dims.iter().product();
        let coords: Vec<Vec<usize>> = (0..sites).map(|s| torus_coordinates(dims, s)).collect();
        let distance = Matrix::from_fn(sites, sites, |i, j| {
            dims.iter()
                .enumerate()
                .map(|(k, &d)| {
                    let diff = coords[i][k].abs_diff(coords[j][k]);
                    diff.min(d - diff) as f64
                })
                .sum()
        });
        let labels = coords
            .iter()
            .map(|c| c.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
            .map(|c| format!("({c})"))
            .collect();
        let mut builder = Self::builder(vec![Some(cap); sites]).labels(labels).distance(distance);
        if let Some(diameter) = exclusion_diameter {
            builder = builder.exclusion_diameter(diameter);
        }
        builder.build()
    }

    pub fn site_count(&self) -> usize {
        self.caps.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distance[(i, j)]
    }

    pub fn distance_matrix(&self) -> &Matrix<f64> {
        &self.distance
    }

    /// Effective per-site caps after folding in exclusion and total bounds.
    pub fn occupancy_caps(&self) -> &[u32] {
        &self.caps
    }

    pub fn exclusion_diameter(&self) -> Option<f64> {
        self.exclusion_diameter
    }

    pub fn total_cap(&self) -> Option<u32> {
        self.total_cap
    }

    pub fn total_exact(&self) -> Option<u32> {
        self.total_exact
    }

    /// Every site holds at most one particle.
    pub fn is_lattice_gas(&self) -> bool {
        self.caps.iter().all(|&k| k <= 1)
    }

    /// True when sites `i != j` may not be occupied together (`d < D`).
    pub fn excludes(&self, i: usize, j: usize) -> bool {
        i != j && self.exclusion_diameter.is_some_and(|diameter| self.distance[(i, j)] < diameter)
    }

    /// Same domain with every site cap replaced by `cap` (still subject to
    /// exclusion and total bounds).
    pub fn with_uniform_cap(&self, cap: u32) -> Result<Self> {
        let mut builder = Self::builder(vec![Some(cap); self.site_count()])
            .labels(self.labels.clone())
            .distance(self.distance.clone());
        if let Some(d) = self.exclusion_diameter {
            builder = builder.exclusion_diameter(d);
        }
        if let Some(t) = self.total_cap {
            builder = builder.total_cap(t);
        }
        if let Some(t) = self.total_exact {
            builder = builder.total_exact(t);
        }
        builder.build()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len == self.site_count() {
            Ok(())
        } else {
            Err(Error::Dimension { expected: self.site_count(), found: len })
        }
    }
}

pub(crate) fn torus_coordinates(dims: &[usize], mut site: usize) -> Vec<usize> {
    let mut coords = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        coords[k] = site % dims[k];
        site /= dims[k];
    }
    coords
}

pub(crate) fn torus_index(dims: &[usize], coords: &[usize]) -> usize {
    coords.iter().zip(dims).fold(0, |acc, (&c, &d)| acc * d + c)
}

/// Occupancy vector. Ordering is lexicographic on the occupancies.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration(Vec<u32>);

impl Configuration {
    pub fn new(occupancy: Vec<u32>) -> Self {
        Self(occupancy)
    }

    pub fn empty(sites: usize) -> Self {
        Self(vec![0; sites])
    }

    pub fn occupancy(&self) -> &[u32] {
        &self.0
    }

    pub fn site_count(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&n| u64::from(n)).sum()
    }

    /// Entry `(i, j)` of the second factorial power.
    pub fn factorial_entry(&self, i: usize, j: usize) -> u64 {
        let ni = u64::from(self.0[i]);
        if i == j {
            ni * ni.saturating_sub(1)
        } else {
            ni * u64::from(self.0[j])
        }
    }
}

impl From<Vec<u32>> for Configuration {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, n) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}

pub fn is_admissible(domain: &Domain, config: &Configuration) -> Result<bool> {
    domain.check_len(config.site_count())?;
    let n = config.occupancy();
    if n.iter().zip(domain.occupancy_caps()).any(|(&ni, &k)| ni > k) {
        return Ok(false);
    }
    let total = config.total();
    if domain.total_cap.is_some_and(|t| total > u64::from(t)) {
        return Ok(false);
    }
    if domain.total_exact.is_some_and(|t| total != u64::from(t)) {
        return Ok(false);
    }
    if let Some(diameter) = domain.exclusion_diameter {
        if diameter > 0.0 && n.iter().any(|&ni| ni >= 2) {
            return Ok(false);
        }
        for i in 0..n.len() {
            for j in i + 1..n.len() {
                if n[i] > 0 && n[j] > 0 && domain.distance[(i, j)] < diameter {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Second factorial power of a configuration as an `S x S` matrix.
pub fn factorial_power2(config: &Configuration) -> Matrix<u64> {
    let s = config.site_count();
    Matrix::from_fn(s, s, |i, j| config.factorial_entry(i, j))
}

/// Factorial moment sum `H_n^chi` for `n` in `{1, 2, 3}`: the sum of
/// `chi(x_1)...chi(x_n)` over ordered tuples of distinct particles.
pub fn h_moment<T: Scalar>(config: &Configuration, chi: &[T], order: u32) -> Result<T> {
    if chi.len() != config.site_count() {
        return Err(Error::Dimension { expected: config.site_count(), found: chi.len() });
    }
    if chi.iter().any(|c| *c <= T::zero()) {
        return Err(Error::InvalidArgument("chi must be strictly positive".into()));
    }
    // Power sums p_k = sum_i chi_i^k n_i, then Newton-style identities for
    // sums over distinct labels.
    let power_sum = |k: u32| {
        chi.iter()
            .zip(config.occupancy())
            .fold(T::zero(), |acc, (c, &n)| acc + num_traits::pow(c.clone(), k as usize) * T::from_count(u64::from(n)))
    };
    let p1 = power_sum(1);
    match order {
        1 => Ok(p1),
        2 => Ok(p1.clone() * p1 - power_sum(2)),
        3 => {
            let two = T::from_count(2);
            let three = T::from_count(3);
            let p2 = power_sum(2);
            let p3 = power_sum(3);
            Ok(p1.clone() * p1.clone() * p1.clone() - three * p1 * p2 + two * p3)
        }
        _ => Err(Error::InvalidArgument(format!("moment order {order} is outside 1..=3"))),
    }
}

/// `H_3` with `chi == 1`: `N (N - 1) (N - 2)` for `N` total particles.
pub fn h3(config: &Configuration) -> u64 {
    let total = config.total();
    total * total.saturating_sub(1) * total.saturating_sub(2)
}

/// Prescribed `(rho1, rho2)` with factorial diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationPair<T = f64> {
    rho1: Vec<T>,
    rho2: Matrix<T>,
}

impl<T: Scalar> CorrelationPair<T> {
    /// Validated constructor: entries finite and nonnegative, `rho2`
    /// symmetric and `S x S`.
    pub fn new(rho1: Vec<T>, rho2: Matrix<T>) -> Result<Self> {
        let pair = Self::new_unchecked(rho1, rho2)?;
        for (i, v) in pair.rho1.iter().enumerate() {
            if !v.is_finite_value() || *v < T::zero() {
                return Err(Error::InvalidCorrelations(format!("rho1[{i}] = {v} must be finite and nonnegative")));
            }
        }
        for ((i, j), v) in pair.rho2.iter() {
            if !v.is_finite_value() || *v < T::zero() {
                return Err(Error::InvalidCorrelations(format!("rho2[{i}][{j}] = {v} must be finite and nonnegative")));
            }
            if pair.rho2[(j, i)] != *v {
                return Err(Error::InvalidCorrelations(format!("rho2 is not symmetric at ({i},{j})")));
            }
        }
        Ok(pair)
    }

    /// Only checks shapes. Used for deliberately invalid inputs.
    pub fn new_unchecked(rho1: Vec<T>, rho2: Matrix<T>) -> Result<Self> {
        if rho2.rows() != rho1.len() || rho2.cols() != rho1.len() {
            return Err(Error::Dimension { expected: rho1.len(), found: rho2.rows().max(rho2.cols()) });
        }
        Ok(Self { rho1, rho2 })
    }

    pub fn site_count(&self) -> usize {
        self.rho1.len()
    }

    pub fn rho1(&self) -> &[T] {
        &self.rho1
    }

    pub fn rho2(&self) -> &Matrix<T> {
        &self.rho2
    }

    pub fn map<U: Scalar>(&self, mut f: impl FnMut(&T) -> U) -> CorrelationPair<U> {
        CorrelationPair { rho1: self.rho1.iter().map(&mut f).collect(), rho2: self.rho2.map(f) }
    }
}

/// `P(n) = f0 + <f1, n> + <f2, n^(2)>` with symmetric `f2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticPolynomial<T = f64> {
    f0: T,
    f1: Vec<T>,
    f2: Matrix<T>,
}

impl<T: Scalar> QuadraticPolynomial<T> {
    pub fn new(f0: T, f1: Vec<T>, f2: Matrix<T>) -> Result<Self> {
        let s = f1.len();
        if f2.rows() != s || f2.cols() != s {
            return Err(Error::Dimension { expected: s, found: f2.rows().max(f2.cols()) });
        }
        let slack = T::slack(1e-12);
        for ((i, j), v) in f2.iter() {
            let scale = scalar::max_of(T::one(), v.abs());
            if !scalar::approx_eq(v, &f2[(j, i)], &(slack.clone() * scale)) {
                return Err(Error::InvalidPolynomial(format!("f2 is not symmetric at ({i},{j})")));
            }
        }
        Ok(Self { f0, f1, f2 })
    }

    pub fn constant(value: T, sites: usize) -> Self {
        Self { f0: value, f1: vec![T::zero(); sites], f2: Matrix::filled(sites, sites, T::zero()) }
    }

    pub fn zero(sites: usize) -> Self {
        Self::constant(T::zero(), sites)
    }

    pub fn site_count(&self) -> usize {
        self.f1.len()
    }

    pub fn f0(&self) -> &T {
        &self.f0
    }

    pub fn f1(&self) -> &[T] {
        &self.f1
    }

    pub fn f2(&self) -> &Matrix<T> {
        &self.f2
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut T, &mut Vec<T>, &mut Matrix<T>) {
        (&mut self.f0, &mut self.f1, &mut self.f2)
    }

    pub fn eval(&self, config: &Configuration) -> Result<T> {
        eval_quadratic(self, config)
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coefficient(&self) -> T {
        std::iter::once(&self.f0)
            .chain(&self.f1)
            .chain(self.f2.as_slice())
            .fold(T::zero(), |acc, c| scalar::max_of(acc, c.abs()))
    }

    pub fn scaled(&self, factor: &T) -> Self {
        Self {
            f0: self.f0.clone() * factor.clone(),
            f1: self.f1.iter().map(|c| c.clone() * factor.clone()).collect(),
            f2: self.f2.map(|c| c.clone() * factor.clone()),
        }
    }

    /// Rescaled so the largest absolute coefficient is one. The zero
    /// polynomial is returned unchanged.
    pub fn normalized(&self) -> Self {
        let max = self.max_abs_coefficient();
        if max.is_zero() {
            self.clone()
        } else {
            self.scaled(&(T::one() / max))
        }
    }

    pub fn map<U: Scalar>(&self, mut f: impl FnMut(&T) -> U) -> QuadraticPolynomial<U> {
        QuadraticPolynomial { f0: f(&self.f0), f1: self.f1.iter().map(&mut f).collect(), f2: self.f2.map(f) }
    }
}

pub fn eval_quadratic<T: Scalar>(poly: &QuadraticPolynomial<T>, config: &Configuration) -> Result<T> {
    let s = poly.site_count();
    if config.site_count() != s {
        return Err(Error::Dimension { expected: s, found: config.site_count() });
    }
    let n = config.occupancy();
    let mut value = poly.f0.clone();
    for i in 0..s {
        if n[i] == 0 {
            continue;
        }
        value = value + poly.f1[i].clone() * T::from_count(u64::from(n[i]));
        for j in 0..s {
            let fp = config.factorial_entry(i, j);
            if fp != 0 {
                value = value + poly.f2[(i, j)].clone() * T::from_count(fp);
            }
        }
    }
    Ok(value)
}

/// `f0 + sum_i f1_i rho1_i + sum_ij f2_ij rho2_ij`.
pub fn pairing<T: Scalar>(poly: &QuadraticPolynomial<T>, corr: &CorrelationPair<T>) -> Result<T> {
    let s = poly.site_count();
    if corr.site_count() != s {
        return Err(Error::Dimension { expected: s, found: corr.site_count() });
    }
    let linear = poly.f1.iter().zip(&corr.rho1).fold(T::zero(), |acc, (f, r)| acc + f.clone() * r.clone());
    let quadratic =
        poly.f2.as_slice().iter().zip(corr.rho2.as_slice()).fold(T::zero(), |acc, (f, r)| acc + f.clone() * r.clone());
    Ok(poly.f0.clone() + linear + quadratic)
}

/// Finite-support probability distribution over admissible configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T = f64> {
    sites: usize,
    atoms: Vec<(Configuration, T)>,
}

impl<T: Scalar> Distribution<T> {
    /// Validates weights (nonnegative, total one within
    /// [`WEIGHT_SUM_TOLERANCE`]), admissibility and distinctness.
    pub fn new(domain: &Domain, atoms: Vec<(Configuration, T)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (config, weight) in &atoms {
            if !is_admissible(domain, config)? {
                return Err(Error::InvalidDistribution(format!("configuration {config} is not admissible")));
            }
            if !weight.is_finite_value() || *weight < T::zero() {
                return Err(Error::InvalidDistribution(format!("weight {weight} of {config} is negative")));
            }
            if !seen.insert(config) {
                return Err(Error::InvalidDistribution(format!("configuration {config} appears twice")));
            }
        }
        let total = scalar::sum(atoms.iter().map(|(_, w)| w));
        if !scalar::approx_eq(&total, &T::one(), &T::slack(WEIGHT_SUM_TOLERANCE)) {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { sites: domain.site_count(), atoms })
    }

    /// Point mass at one configuration.
    pub fn dirac(domain: &Domain, config: Configuration) -> Result<Self> {
        Self::new(domain, vec![(config, T::one())])
    }

    /// Divides all weights by their sum and drops zero atoms.
    pub fn renormalized(domain: &Domain, atoms: Vec<(Configuration, T)>) -> Result<Self> {
        let total = scalar::sum(atoms.iter().map(|(_, w)| w));
        if total <= T::zero() {
            return Err(Error::InvalidDistribution("total weight must be positive".into()));
        }
        let atoms = atoms.into_iter().filter(|(_, w)| !w.is_zero()).map(|(c, w)| (c, w / total.clone())).collect();
        Self::new(domain, atoms)
    }

    pub fn site_count(&self) -> usize {
        self.sites
    }

    pub fn atoms(&self) -> &[(Configuration, T)] {
        &self.atoms
    }

    pub fn weight_of(&self, config: &Configuration) -> T {
        self.atoms.iter().find(|(c, _)| c == config).map_or_else(T::zero, |(_, w)| w.clone())
    }

    /// `sum_eta p_eta g(eta)`.
    pub fn expectation(&self, mut g: impl FnMut(&Configuration) -> T) -> T {
        self.atoms.iter().fold(T::zero(), |acc, (c, w)| acc + w.clone() * g(c))
    }

    pub(crate) fn from_parts_unchecked(sites: usize, atoms: Vec<(Configuration, T)>) -> Self {
        Self { sites, atoms }
    }
}

pub fn correlations_of<T: Scalar>(dist: &Distribution<T>) -> CorrelationPair<T> {
    let s = dist.site_count();
    let mut rho1 = vec![T::zero(); s];
    let mut rho2 = Matrix::filled(s, s, T::zero());
    for (config, weight) in dist.atoms() {
        let n = config.occupancy();
        for i in 0..s {
            if n[i] == 0 {
                continue;
            }
            rho1[i] = rho1[i].clone() + weight.clone() * T::from_count(u64::from(n[i]));
            for j in 0..s {
                let fp = config.factorial_entry(i, j);
                if fp != 0 {
                    rho2[(i, j)] = rho2[(i, j)].clone() + weight.clone() * T::from_count(fp);
                }
            }
        }
    }
    CorrelationPair { rho1, rho2 }
}

/// Outcome of a realizability decision.
#[derive(Debug, Clone, PartialEq)]
pub enum RealizationResult<T = f64> {
    Feasible { distribution: Distribution<T> },
    Infeasible { certificate: QuadraticPolynomial<T> },
}

impl<T> RealizationResult<T> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible { .. })
    }

    pub fn witness(&self) -> Option<&Distribution<T>> {
        match self {
            Self::Feasible { distribution } => Some(distribution),
            Self::Infeasible { .. } => None,
        }
    }

    pub fn certificate(&self) -> Option<&QuadraticPolynomial<T>> {
        match self {
            Self::Feasible { .. } => None,
            Self::Infeasible { certificate } => Some(certificate),
        }
    }
}

/// Largest entrywise deviation between two correlation pairs, as `f64`.
pub fn max_correlation_gap<T: Scalar>(a: &CorrelationPair<T>, b: &CorrelationPair<T>) -> f64 {
    let linear = a.rho1.iter().zip(&b.rho1);
    let quadratic = a.rho2.as_slice().iter().zip(b.rho2.as_slice());
    linear.chain(quadratic).map(|(x, y)| (x.clone() - y.clone()).abs().to_f64_lossy()).fold(0.0, f64::max)
}
