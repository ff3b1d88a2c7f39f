//! Configuration observables, Monte Carlo estimators and closed-form
//! predictions to compare them with.

mod block;
mod estimate;
pub mod theory;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lattice::{Configuration, Height, Topology};

pub use block::mc_generator_block_estimate;
pub use estimate::{batch_means, replicate_means, CiMethod, EstimateWithCI, MIN_GROUPS};
pub use theory::{GeneratorPart, TheoryContext};

pub fn density_of_ones(cfg: &Configuration) -> f64 {
    cfg.density_of_ones()
}

/// `H_n`: 1 iff sites `offset+1 ..= offset+n` all have height 1.
pub fn block_indicator(cfg: &Configuration, n: usize, offset: usize) -> Result<u8> {
    if n == 0 {
        return Err(Error::InvalidParameter("block length must be >= 1".into()));
    }
    let len = cfg.len();
    let fits = match cfg.topology() {
        Topology::Ring { .. } => n <= len && offset < len,
        Topology::Interval { .. } => offset + n < len,
    };
    if !fits {
        return Err(Error::InvalidParameter(format!(
            "block of {n} sites after offset {offset} exceeds {len} sites"
        )));
    }
    let all_ones = (1..=n).all(|i| cfg.height((offset + i) % len) == Height::One);
    Ok(all_ones as u8)
}

/// Histogram of distances between cyclically consecutive height-1 sites on a
/// ring. The distances sum to `N`.
pub fn gap_statistics(cfg: &Configuration) -> Result<BTreeMap<usize, usize>> {
    if !cfg.topology().is_ring() {
        return Err(Error::Unsupported("gap statistics are defined on rings".into()));
    }
    let ones = cfg.inactive_index();
    if ones.len() < 2 {
        return Err(Error::Undefined("fewer than two height-1 sites".into()));
    }
    let first = ones.first().expect("nonempty");
    let mut hist = BTreeMap::new();
    let mut prev = first;
    for x in ones.iter().skip(1).chain(std::iter::once(first + cfg.len())) {
        *hist.entry(x - prev).or_insert(0) += 1;
        prev = x;
    }
    Ok(hist)
}

/// Gap statistics of the height-2 sites, i.e. of the globally flipped
/// configuration.
pub fn dual_gap_statistics(cfg: &Configuration) -> Result<BTreeMap<usize, usize>> {
    gap_statistics(&cfg.global_flip())
}

/// `(1/N) Σ_x χ(η(x)=1) k⁻(x, η) − 1` on a ring. Gaps between height-1 sites
/// tile the ring, so this is exactly zero.
pub fn renewal_identity_residual(cfg: &Configuration) -> Result<f64> {
    if !cfg.topology().is_ring() {
        return Err(Error::Unsupported("the renewal identity is stated on rings".into()));
    }
    if cfg.count_ones() == 0 {
        return Err(Error::Undefined("no height-1 site".into()));
    }
    let total: usize = cfg
        .inactive_index()
        .iter()
        .map(|x| cfg.k_minus(x).expect("a height-1 site exists"))
        .sum();
    Ok(total as f64 / cfg.len() as f64 - 1.0)
}

/// Equal-time two-point function `P(η(0)=1, η(r)=1) − ρ²` averaged over
/// translations of a ring configuration.
pub fn pair_correlation(cfg: &Configuration, r: usize) -> f64 {
    let n = cfg.len();
    let rho = cfg.density_of_ones();
    let pairs = cfg
        .inactive_index()
        .iter()
        .filter(|&x| cfg.height((x + r) % n) == Height::One)
        .count();
    pairs as f64 / n as f64 - rho * rho
}

#[cfg(test)]
mod tests;
