//! Exhaustive generation of admissible configurations and of the range of
//! linear observables over them.

use crate::error::{Error, Result};
use crate::model::{Configuration, Domain};
use crate::scalar::Scalar;

pub const DEFAULT_CONFIGURATION_LIMIT: usize = 10_000_000;

/// Values closer than this are merged in [`range_of`].
pub const DEFAULT_MERGE_TOLERANCE: f64 = 1e-12;

/// All admissible configurations in lexicographic order, with the default
/// capacity limit.
pub fn enumerate_configurations(domain: &Domain) -> Result<Vec<Configuration>> {
    enumerate_configurations_with_limit(domain, DEFAULT_CONFIGURATION_LIMIT)
}

/// Depth-first over sites, pruned by caps, total bounds and exclusion.
pub fn enumerate_configurations_with_limit(domain: &Domain, limit: usize) -> Result<Vec<Configuration>> {
    let sites = domain.site_count();
    let caps = domain.occupancy_caps();
    // suffix_caps[i] = most particles sites i.. can still hold
    let mut suffix_caps = vec![0u64; sites + 1];
    for i in (0..sites).rev() {
        suffix_caps[i] = suffix_caps[i + 1] + u64::from(caps[i]);
    }
    let mut walker = Walker { domain, suffix_caps, limit, current: vec![0; sites], out: Vec::new() };
    walker.visit(0, 0)?;
    Ok(walker.out)
}

struct Walker<'a> {
    domain: &'a Domain,
    suffix_caps: Vec<u64>,
    limit: usize,
    current: Vec<u32>,
    out: Vec<Configuration>,
}

impl Walker<'_> {
    fn visit(&mut self, site: usize, total: u64) -> Result<()> {
        let domain = self.domain;
        if let Some(exact) = domain.total_exact() {
            let exact = u64::from(exact);
            if total > exact || total + self.suffix_caps[site] < exact {
                return Ok(());
            }
        }
        if site == domain.site_count() {
            if self.out.len() >= self.limit {
                return Err(Error::Capacity { limit: self.limit });
            }
            self.out.push(Configuration::new(self.current.clone()));
            return Ok(());
        }
        let mut max_here = domain.occupancy_caps()[site];
        if let Some(cap) = domain.total_cap() {
            max_here = max_here.min((u64::from(cap) - total) as u32);
        }
        if max_here > 0 && (0..site).any(|j| self.current[j] > 0 && domain.excludes(site, j)) {
            max_here = 0;
        }
        for n in 0..=max_here {
            self.current[site] = n;
            self.visit(site + 1, total + u64::from(n))?;
        }
        self.current[site] = 0;
        Ok(())
    }
}

/// Sorted distinct values of a linear observable over admissible configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeSet<T = f64> {
    values: Vec<T>,
}

impl<T: Scalar> RangeSet<T> {
    /// Sorts and merges values within `merge_tolerance` of their predecessor.
    pub fn from_values(mut values: Vec<T>, merge_tolerance: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("a range set cannot be empty".into()));
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("range values are comparable"));
        let slack = T::slack(merge_tolerance);
        let mut merged: Vec<T> = Vec::with_capacity(values.len());
        for v in values {
            match merged.last() {
                Some(last) if v.clone() - last.clone() <= slack => {}
                _ => merged.push(v),
            }
        }
        Ok(Self { values: merged })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> &T {
        &self.values[0]
    }

    pub fn max(&self) -> &T {
        &self.values[self.values.len() - 1]
    }

    /// `(sup{x <= e}, inf{x >= e})`, each `None` when `e` lies outside the
    /// hull. A value within `slack` of `e` counts on both sides.
    pub fn bracket(&self, e: &T, slack: &T) -> (Option<T>, Option<T>) {
        let below = self.values.iter().rev().find(|x| **x <= e.clone() + slack.clone()).cloned();
        let above = self.values.iter().find(|x| **x >= e.clone() - slack.clone()).cloned();
        (below, above)
    }
}

pub fn range_of<T: Scalar>(f: &[T], domain: &Domain) -> Result<RangeSet<T>> {
    let configs = enumerate_configurations(domain)?;
    range_over(f, &configs, DEFAULT_MERGE_TOLERANCE)
}

/// Range of `<f, n>` over an already enumerated configuration list.
pub fn range_over<T: Scalar>(f: &[T], configs: &[Configuration], merge_tolerance: f64) -> Result<RangeSet<T>> {
    let values = configs.iter().map(|c| linear_value(f, c)).collect::<Result<Vec<_>>>()?;
    RangeSet::from_values(values, merge_tolerance)
}

pub(crate) fn linear_value<T: Scalar>(f: &[T], config: &Configuration) -> Result<T> {
    if f.len() != config.site_count() {
        return Err(Error::Dimension { expected: config.site_count(), found: f.len() });
    }
    Ok(f.iter()
        .zip(config.occupancy())
        .filter(|(_, &n)| n > 0)
        .fold(T::zero(), |acc, (fi, &n)| acc + fi.clone() * T::from_count(u64::from(n))))
}

/// Largest number of particles an admissible configuration puts in `window`.
pub fn max_occupancy(domain: &Domain, window: &[usize]) -> Result<u64> {
    if let Some(&bad) = window.iter().find(|&&i| i >= domain.site_count()) {
        return Err(Error::InvalidArgument(format!("window site {bad} is out of range")));
    }
    let configs = enumerate_configurations(domain)?;
    Ok(configs.iter().map(|c| window.iter().map(|&i| u64::from(c.occupancy()[i])).sum::<u64>()).max().unwrap_or(0))
}
