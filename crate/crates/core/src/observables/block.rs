//! Monte Carlo estimate of `∫ L H_n dλ_ρ` for product Bernoulli measures.

use rand::Rng;

use super::estimate::{batch_means, EstimateWithCI};
use super::theory::GeneratorPart;
use crate::error::{Error, Result};
use crate::lattice::{Configuration, Effect, Height, Topology};

/// Estimates the expectation of `(part) H_n` under independent heights with
/// `P(height 1) = rho` on `topology` (a ring; use a large one for the
/// infinite-volume value).
///
/// Only sites between the nearest height-1 and height-2 sites on either side
/// of the block can move it, so each sample draws sites outward from the
/// block until both heights have been seen on both sides, and evaluates the
/// generator on the ring formed by that segment. If the whole ring gets
/// drawn first, the full ring is used.
pub fn mc_generator_block_estimate(
    rho: f64,
    n: usize,
    which: GeneratorPart,
    samples: usize,
    topology: Topology,
    rng: &mut impl Rng,
) -> Result<EstimateWithCI> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidParameter(format!("rho = {rho} must lie in (0, 1)")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("block length must be >= 1".into()));
    }
    let Topology::Ring { n: len } = topology else {
        return Err(Error::Unsupported("block estimates use a ring".into()));
    };
    if len < n + 4 {
        return Err(Error::InvalidParameter(format!("ring of {len} sites too small for block {n}")));
    }
    let values = (0..samples)
        .map(|_| one_sample(rho, n, which, len, rng))
        .collect::<Result<Vec<f64>>>()?;
    batch_means(&values)
}

fn draw(rho: f64, rng: &mut impl Rng) -> Height {
    if rng.random::<f64>() < rho {
        Height::One
    } else {
        Height::Two
    }
}

fn one_sample(rho: f64, n: usize, which: GeneratorPart, len: usize, rng: &mut impl Rng) -> Result<f64> {
    let block: Vec<Height> = (0..n).map(|_| draw(rho, rng)).collect();
    let mut left: Vec<Height> = Vec::new();
    let mut right: Vec<Height> = Vec::new();
    let complete = |side: &[Height]| side.contains(&Height::One) && side.contains(&Height::Two);
    let mut whole_ring = false;
    while !complete(&left) {
        if n + left.len() + right.len() == len {
            whole_ring = true;
            break;
        }
        left.push(draw(rho, rng));
    }
    while !whole_ring && !complete(&right) {
        if n + left.len() + right.len() == len {
            whole_ring = true;
            break;
        }
        right.push(draw(rho, rng));
    }
    if whole_ring {
        // Sites still undrawn are independent of everything drawn so far.
        while n + left.len() + right.len() < len {
            right.push(draw(rho, rng));
        }
    }
    let mut heights = Vec::with_capacity(n + left.len() + right.len());
    heights.extend(left.iter().rev());
    let offset = heights.len();
    heights.extend(&block);
    heights.extend(&right);
    let size = heights.len();
    let cfg = Configuration::from_heights(Topology::ring(size)?, heights)?;
    generator_on_block(&cfg, offset, n, which)
}

fn block_after(cfg: &Configuration, offset: usize, n: usize, effect: &Effect) -> bool {
    (offset..offset + n).all(|s| effect.height_after(s, cfg.height(s)) == Height::One)
}

/// `Σ_x (rate) [H(after event at x) − H]` on a ring, all rates 1.
fn generator_on_block(cfg: &Configuration, offset: usize, n: usize, which: GeneratorPart) -> Result<f64> {
    let before = (offset..offset + n).all(|s| cfg.height(s) == Height::One) as i64;
    let in_block = |e: &Effect| e.changes().iter().any(|&(s, _)| s >= offset && s < offset + n);
    let mut total = 0i64;
    let mut accumulate = |e: Effect| {
        if in_block(&e) {
            total += block_after(cfg, offset, n, &e) as i64 - before;
        }
    };
    for x in 0..cfg.len() {
        match which {
            GeneratorPart::LS => accumulate(cfg.add_effect(x)?),
            GeneratorPart::LF => accumulate(cfg.flip_effect(x)?),
            GeneratorPart::SA => {
                accumulate(cfg.add_effect(x)?);
                accumulate(cfg.anti_add_effect(x)?);
            }
        }
    }
    Ok(total as f64)
}
