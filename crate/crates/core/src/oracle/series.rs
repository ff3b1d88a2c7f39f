//! Truncated Taylor series `Σ_{k<=n} t^k (L^k f)(η) / k!` evaluated
//! pointwise, without building a matrix.

use std::collections::{HashMap, HashSet};
use std::f64::consts::E;

use crate::dynamics::ModelSpec;
use crate::error::{Error, Result};
use crate::lattice::Configuration;

use super::{config_of, for_each_transition, state_of};

const MAX_TERMS: usize = 8;
const MAX_SITES: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesEstimate {
    pub estimate: f64,
    /// Bound on the neglected tail.
    pub bound: f64,
    /// `(L^k f)(η)` for `k = 0..=n_max`.
    pub derivatives: Vec<f64>,
}

/// Largest `t` accepted by [`series_semigroup`]: `1 / [4 (rate) e a(η)]`
/// where `a(η)` is the mean spacing of height-1 sites on the ring (for the
/// SA process, the larger of that and the spacing of height-2 sites) and
/// `rate` the per-site rate (`1 + α` for pure flips).
pub fn series_window(cfg: &Configuration, spec: &ModelSpec) -> Result<f64> {
    let n = cfg.len() as f64;
    let spacing = |count: usize| {
        if count == 0 {
            Err(Error::Undefined("no site of the needed height; spacing is infinite".into()))
        } else {
            Ok(n / count as f64)
        }
    };
    let a = match spec {
        ModelSpec::Sf { .. } => spacing(cfg.count_ones())?,
        ModelSpec::Sa { .. } => spacing(cfg.count_ones())?.max(spacing(cfg.count_twos())?),
    };
    Ok(1.0 / (4.0 * spec.site_rate() * E * a))
}

fn tail_bound(x: f64, n_max: usize) -> f64 {
    // Σ_{k > n} x^k / k! <= x^{n+1} / (n+1)! · e^x
    let mut term = 1.0;
    for k in 1..=n_max + 1 {
        term *= x / k as f64;
    }
    term * x.exp()
}

pub fn series_semigroup(
    cfg: &Configuration,
    observable: impl Fn(&Configuration) -> f64,
    spec: &ModelSpec,
    t: f64,
    n_max: usize,
) -> Result<SeriesEstimate> {
    spec.validate()?;
    if n_max > MAX_TERMS {
        return Err(Error::InvalidParameter(format!("n_max = {n_max} exceeds {MAX_TERMS}")));
    }
    let n = cfg.len();
    if n > MAX_SITES {
        return Err(Error::TooLarge {
            n,
            limit: MAX_SITES,
            what: "series expansion",
        });
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("t = {t} must be >= 0")));
    }
    let limit = series_window(cfg, spec)?;
    if t >= limit {
        return Err(Error::OutsideWindow { t, limit });
    }
    let topology = cfg.topology();
    let start = state_of(cfg);

    // reach[j]: states within j events of the start.
    let mut reach: Vec<Vec<usize>> = vec![vec![start]];
    let mut seen: HashSet<usize> = HashSet::from([start]);
    let mut moves: HashMap<usize, Vec<(usize, f64)>> = HashMap::new();
    for _ in 0..n_max {
        let frontier = reach.last().expect("nonempty").clone();
        let mut next = frontier.clone();
        for &s in &frontier {
            let out = moves.entry(s).or_insert_with(|| {
                let mut v = Vec::new();
                for_each_transition(&config_of(topology, s), spec, |to, r| {
                    if to != s && r > 0.0 {
                        v.push((to, r));
                    }
                });
                v
            });
            for &(to, _) in out.iter() {
                if seen.insert(to) {
                    next.push(to);
                }
            }
        }
        reach.push(next);
    }

    let mut g: HashMap<usize, f64> = reach[n_max]
        .iter()
        .map(|&s| (s, observable(&config_of(topology, s))))
        .collect();
    let mut derivatives = vec![g[&start]];
    for k in 1..=n_max {
        let domain = &reach[n_max - k];
        let next: HashMap<usize, f64> = domain
            .iter()
            .map(|&s| {
                let here = g[&s];
                let v = moves[&s].iter().map(|&(to, r)| r * (g[&to] - here)).sum();
                (s, v)
            })
            .collect();
        derivatives.push(next[&start]);
        g = next;
    }

    let mut estimate = 0.0;
    let mut coeff = 1.0;
    for (k, d) in derivatives.iter().enumerate() {
        if k > 0 {
            coeff *= t / k as f64;
        }
        estimate += coeff * d;
    }

    let sup = (0..1usize << n)
        .map(|s| observable(&config_of(topology, s)).abs())
        .fold(0.0, f64::max);
    let total_rate = n as f64 * spec.site_rate();
    let bound = sup * tail_bound(2.0 * total_rate * t, n_max);
    Ok(SeriesEstimate {
        estimate,
        bound,
        derivatives,
    })
}
