//! Exactly computable reference distributions. Weights are built with the
//! scalar's own arithmetic, so rational parameters give exact rational
//! weights.

use crate::enumeration::enumerate_configurations;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::{Configuration, CorrelationPair, Distribution, Domain};
use crate::scalar::Scalar;

fn pow<T: Scalar>(base: &T, exp: u64) -> T {
    (0..exp).fold(T::one(), |acc, _| acc * base.clone())
}

fn require_product_domain(domain: &Domain, generator: &str) -> Result<()> {
    if domain.exclusion_diameter().is_some() || domain.total_cap().is_some() || domain.total_exact().is_some() {
        return Err(Error::InvalidArgument(format!(
            "{generator} needs a product domain without exclusion or total-count constraints"
        )));
    }
    Ok(())
}

fn require_positive<T: Scalar>(value: &T, name: &str) -> Result<()> {
    if !value.is_finite_value() || *value <= T::zero() {
        return Err(Error::InvalidArgument(format!("{name} must be positive, got {value}")));
    }
    Ok(())
}

/// Independent Bernoulli(`p_i`) occupancies.
pub fn bernoulli_product<T: Scalar>(domain: &Domain, p: &[T]) -> Result<Distribution<T>> {
    require_product_domain(domain, "bernoulli_product")?;
    let s = domain.site_count();
    if p.len() != s {
        return Err(Error::Dimension { expected: s, found: p.len() });
    }
    if let Some(i) = domain.occupancy_caps().iter().position(|&k| k == 0) {
        return Err(Error::InvalidArgument(format!("site {i} has cap 0")));
    }
    if let Some(bad) = p.iter().find(|x| !x.is_finite_value() || **x < T::zero() || **x > T::one()) {
        return Err(Error::InvalidArgument(format!("probability {bad} is outside [0, 1]")));
    }
    // Sites with 0 < p < 1 vary; the rest are fixed.
    let base: Vec<u32> = p.iter().map(|x| u32::from(x.is_one())).collect();
    let free: Vec<usize> = (0..s).filter(|&i| !p[i].is_zero() && !p[i].is_one()).collect();
    if free.len() >= 32 {
        return Err(Error::Capacity { limit: 1 << 31 });
    }
    let mut atoms = Vec::with_capacity(1 << free.len());
    for mask in 0u32..(1 << free.len()) {
        let mut occupancy = base.clone();
        let mut weight = T::one();
        for (bit, &i) in free.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                occupancy[i] = 1;
                weight = weight * p[i].clone();
            } else {
                weight = weight * (T::one() - p[i].clone());
            }
        }
        atoms.push((Configuration::new(occupancy), weight));
    }
    atoms.sort_by(|a, b| a.0.cmp(&b.0));
    Distribution::new(domain, atoms)
}

/// Correlations of [`bernoulli_product`] in closed form.
pub fn bernoulli_correlations<T: Scalar>(p: &[T]) -> Result<CorrelationPair<T>> {
    let s = p.len();
    let rho2 = Matrix::from_fn(s, s, |i, j| if i == j { T::zero() } else { p[i].clone() * p[j].clone() });
    CorrelationPair::new(p.to_vec(), rho2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GibbsMeasure<T = f64> {
    pub distribution: Distribution<T>,
    pub partition_function: T,
}

/// `p_eta = z^{N(eta)} / Z` over the admissible configurations of `domain`.
pub fn hardcore_gibbs<T: Scalar>(domain: &Domain, z: &T) -> Result<GibbsMeasure<T>> {
    require_positive(z, "activity")?;
    let configs = enumerate_configurations(domain)?;
    let weights: Vec<T> = configs.iter().map(|c| pow(z, c.total())).collect();
    let partition_function = weights.iter().fold(T::zero(), |acc, w| acc + w.clone());
    let atoms = configs
        .into_iter()
        .zip(weights)
        .map(|(c, w)| (c, w / partition_function.clone()))
        .filter(|(_, w)| !w.is_zero())
        .collect();
    Ok(GibbsMeasure { distribution: Distribution::new(domain, atoms)?, partition_function })
}

/// One site with cap `cap`: mass `1/(m(m+1))` at occupancy `m + 1`, the rest
/// at zero. Realizes `rho1 = 1/m`, `rho2 = 1`.
pub fn two_atom_family<T: Scalar>(cap: u32, m: u32) -> Result<(CorrelationPair<T>, Distribution<T>)> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    if cap < m + 1 {
        return Err(Error::InvalidArgument(format!("cap {cap} is below the required occupancy {}", m + 1)));
    }
    let domain = Domain::single_site(cap)?;
    let m = i64::from(m);
    let top = T::ratio(1, m * (m + 1));
    let atoms =
        vec![(Configuration::new(vec![0]), T::one() - top.clone()), (Configuration::new(vec![(m + 1) as u32]), top)];
    let corr = CorrelationPair::new(vec![T::ratio(1, m)], Matrix::filled(1, 1, T::one()))?;
    Ok((corr, Distribution::new(&domain, atoms)?))
}

/// Product of per-site Poisson(`lambda`) laws conditioned on `n_i <= k_i`.
pub fn truncated_poisson_product<T: Scalar>(domain: &Domain, lambda: &T) -> Result<Distribution<T>> {
    require_positive(lambda, "lambda")?;
    require_product_domain(domain, "truncated_poisson_product")?;
    let configs = enumerate_configurations(domain)?;
    // Per-site normalizers are constant factors, so one global
    // normalization gives the product law.
    let weights: Vec<T> = configs
        .iter()
        .map(|c| {
            c.occupancy().iter().fold(T::one(), |acc, &n| {
                let factorial = (1..=u64::from(n)).fold(T::one(), |f, k| f * T::from_count(k));
                acc * pow(lambda, u64::from(n)) / factorial
            })
        })
        .collect();
    let total = weights.iter().fold(T::zero(), |acc, w| acc + w.clone());
    let atoms = configs.into_iter().zip(weights).map(|(c, w)| (c, w / total.clone())).collect();
    Distribution::new(domain, atoms)
}

/// Fixture description, e.g. for instance files and randomized tests.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec<T = f64> {
    BernoulliProduct {
        p: Vec<T>,
    },
    HardcoreGibbs {
        z: T,
    },
    TruncatedPoissonProduct {
        lambda: T,
    },
    /// Uses the cap of a single-site domain.
    TwoAtom {
        m: u32,
    },
}

impl<T: Scalar> GeneratorSpec<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::BernoulliProduct { .. } => "bernoulli_product",
            Self::HardcoreGibbs { .. } => "hardcore_gibbs",
            Self::TruncatedPoissonProduct { .. } => "truncated_poisson_product",
            Self::TwoAtom { .. } => "two_atom",
        }
    }

    pub fn generate(&self, domain: &Domain) -> Result<Distribution<T>> {
        match self {
            Self::BernoulliProduct { p } => bernoulli_product(domain, p),
            Self::HardcoreGibbs { z } => Ok(hardcore_gibbs(domain, z)?.distribution),
            Self::TruncatedPoissonProduct { lambda } => truncated_poisson_product(domain, lambda),
            Self::TwoAtom { m } => {
                if domain.site_count() != 1 {
                    return Err(Error::Dimension { expected: 1, found: domain.site_count() });
                }
                Ok(two_atom_family(domain.occupancy_caps()[0], *m)?.1)
            }
        }
    }
}
