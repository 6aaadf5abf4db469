#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use realz::{
    check_realizability, correlations_of, enumerate_configurations, CorrelationPair, Distribution, Domain,
    GeneratorSpec, Matrix, QuadraticPolynomial, Rational, RealizationResult, Scalar, SolverOptions,
};

/// Small domain of one of several shapes with at most `max_sites` sites.
pub fn random_domain(rng: &mut impl Rng, max_sites: usize) -> Domain {
    let sites = rng.gen_range(1..=max_sites);
    match rng.gen_range(0..4) {
        0 => {
            let caps: Vec<u32> = (0..sites).map(|_| rng.gen_range(0..=2)).collect();
            Domain::with_caps(&caps).unwrap()
        }
        1 => Domain::lattice_gas(sites).unwrap(),
        2 if sites >= 3 => Domain::cycle(sites, true).unwrap(),
        _ => {
            let caps = (0..sites).map(|_| Some(rng.gen_range(1..=3))).collect();
            Domain::builder(caps).total_cap(rng.gen_range(1..=3)).build().unwrap()
        }
    }
}

/// Random weights on a random subset of the admissible configurations.
pub fn random_distribution(rng: &mut impl Rng, domain: &Domain) -> Distribution<f64> {
    let mut configs = enumerate_configurations(domain).unwrap();
    configs.shuffle(rng);
    let support = rng.gen_range(1..=configs.len().min(6));
    let atoms = configs.into_iter().take(support).map(|c| (c, rng.gen_range(0.05..1.0))).collect();
    Distribution::renormalized(domain, atoms).unwrap()
}

/// Same as [`random_distribution`] with small integer weights, exactly.
pub fn random_rational_distribution(rng: &mut impl Rng, domain: &Domain) -> Distribution<Rational> {
    let mut configs = enumerate_configurations(domain).unwrap();
    configs.shuffle(rng);
    let support = rng.gen_range(1..=configs.len().min(6));
    let atoms = configs.into_iter().take(support).map(|c| (c, Rational::ratio(rng.gen_range(1..=9), 1))).collect();
    Distribution::renormalized(domain, atoms).unwrap()
}

pub fn random_generator(rng: &mut impl Rng, max_sites: usize) -> (Domain, GeneratorSpec<f64>) {
    let sites = rng.gen_range(1..=max_sites);
    match rng.gen_range(0..4) {
        0 => {
            let p = (0..sites).map(|_| rng.gen_range(0.0..=1.0)).collect();
            (Domain::lattice_gas(sites).unwrap(), GeneratorSpec::BernoulliProduct { p })
        }
        1 => {
            let domain = if sites >= 3 { Domain::cycle(sites, true) } else { Domain::lattice_gas(sites) };
            (domain.unwrap(), GeneratorSpec::HardcoreGibbs { z: rng.gen_range(0.1..4.0) })
        }
        2 => {
            let caps: Vec<u32> = (0..sites.min(3)).map(|_| rng.gen_range(1..=3)).collect();
            let lambda = rng.gen_range(0.1..3.0);
            (Domain::with_caps(&caps).unwrap(), GeneratorSpec::TruncatedPoissonProduct { lambda })
        }
        _ => {
            let m = rng.gen_range(1..=4);
            let cap = m + rng.gen_range(1..=2);
            (Domain::single_site(cap).unwrap(), GeneratorSpec::TwoAtom { m })
        }
    }
}

/// Moves `corr` along a random direction that raises every density, doubling
/// the step until the LP rejects it. Returns the rejected pair and its
/// certificate.
pub fn perturb_until_infeasible(
    rng: &mut impl Rng,
    domain: &Domain,
    corr: &CorrelationPair<f64>,
    opts: &SolverOptions,
) -> (CorrelationPair<f64>, QuadraticPolynomial<f64>) {
    let s = corr.site_count();
    let d1: Vec<f64> = (0..s).map(|_| rng.gen_range(0.2..1.0)).collect();
    let mut d2 = Matrix::filled(s, s, 0.0);
    for i in 0..s {
        for j in i..s {
            let v = rng.gen_range(-1.0..1.0);
            d2[(i, j)] = v;
            d2[(j, i)] = v;
        }
    }
    let mut step = 0.02;
    loop {
        let rho1 = corr.rho1().iter().zip(&d1).map(|(r, d)| r + step * d).collect();
        let rho2 = Matrix::from_fn(s, s, |i, j| (corr.rho2()[(i, j)] + step * d2[(i, j)]).max(0.0));
        let moved = CorrelationPair::new(rho1, rho2).unwrap();
        match check_realizability(domain, &moved, opts).unwrap() {
            RealizationResult::Infeasible { certificate } => return (moved, certificate),
            RealizationResult::Feasible { .. } => step *= 2.0,
        }
        assert!(step < 1e6, "perturbation never left the feasible set");
    }
}

pub fn feasible_instance(rng: &mut impl Rng, max_sites: usize) -> (Domain, Distribution<f64>, CorrelationPair<f64>) {
    let domain = random_domain(rng, max_sites);
    let mu = random_distribution(rng, &domain);
    let corr = correlations_of(&mu);
    (domain, mu, corr)
}

/// `(min over configurations, pairing)` of a certificate.
pub fn certificate_extremes(
    domain: &Domain,
    certificate: &QuadraticPolynomial<f64>,
    corr: &CorrelationPair<f64>,
) -> (f64, f64) {
    let min = enumerate_configurations(domain)
        .unwrap()
        .iter()
        .map(|c| realz::eval_quadratic(certificate, c).unwrap())
        .fold(f64::INFINITY, f64::min);
    (min, realz::pairing(certificate, corr).unwrap())
}
