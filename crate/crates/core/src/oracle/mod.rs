//! Exact analysis on small lattices: the full rate matrix over all `2^N`
//! configurations, transient laws by uniformization, stationary laws by a
//! direct linear solve, stochastic-order checks and the truncated generator
//! series.
//!
//! States are bitmasks with bit `x` set iff site `x` has height 2, so the
//! sitewise height order is the subset order on masks.

mod domination;
mod linalg;
mod series;

use std::collections::{HashMap, VecDeque};

use crate::dynamics::ModelSpec;
use crate::error::{Error, Result};
use crate::lattice::{Configuration, Effect, Height, Topology};

pub use domination::{cylinder_prefilter, exact_domination, stochastic_domination_check, DominationVerdict};
pub use linalg::solve_dense;
pub use series::{series_semigroup, series_window, SeriesEstimate};

pub const MAX_EXACT_SITES: usize = 12;

/// Tail mass of the Poisson mixture left out by uniformization.
const POISSON_TAIL: f64 = 1e-13;

pub fn state_of(cfg: &Configuration) -> usize {
    cfg.active_index().iter().fold(0, |s, x| s | (1 << x))
}

pub fn config_of(topology: Topology, state: usize) -> Configuration {
    let heights = (0..topology.len())
        .map(|x| if state >> x & 1 == 1 { Height::Two } else { Height::One })
        .collect();
    Configuration::from_heights(topology, heights).expect("length matches topology")
}

fn apply_to_state(state: usize, effect: &Effect) -> usize {
    effect.changes().iter().fold(state, |s, &(x, h)| match h {
        Height::Two => s | (1 << x),
        Height::One => s & !(1 << x),
    })
}

/// Calls `f(target, rate)` for every operator application out of `cfg`,
/// including those that change nothing (`target == state_of(cfg)`).
pub(crate) fn for_each_transition(cfg: &Configuration, spec: &ModelSpec, mut f: impl FnMut(usize, f64)) {
    let s = state_of(cfg);
    for x in 0..cfg.len() {
        let add = cfg.add_effect(x).expect("site in range");
        match *spec {
            ModelSpec::Sf { alpha, flip } => {
                f(apply_to_state(s, &add), alpha);
                f(s ^ (1 << x), flip.rate(cfg, x));
            }
            ModelSpec::Sa { alpha, beta } => {
                f(apply_to_state(s, &add), alpha);
                let anti = cfg.anti_add_effect(x).expect("site in range");
                f(apply_to_state(s, &anti), beta);
            }
        }
    }
}

/// Probability vector over the `2^N` configurations of a lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    topology: Topology,
    weights: Vec<f64>,
}

impl Distribution {
    pub fn from_weights(topology: Topology, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != 1usize << topology.len() {
            return Err(Error::LengthMismatch {
                expected: 1 << topology.len(),
                got: weights.len(),
            });
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidParameter("negative or NaN weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("weights sum to {total}")));
        }
        Ok(Distribution { topology, weights })
    }

    pub fn dirac(topology: Topology, state: usize) -> Self {
        let mut weights = vec![0.0; 1 << topology.len()];
        weights[state] = 1.0;
        Distribution { topology, weights }
    }

    pub fn dirac_config(cfg: &Configuration) -> Self {
        Self::dirac(cfg.topology(), state_of(cfg))
    }

    pub fn all_ones(topology: Topology) -> Self {
        Self::dirac(topology, 0)
    }

    pub fn all_twos(topology: Topology) -> Self {
        Self::dirac(topology, (1 << topology.len()) - 1)
    }

    pub fn uniform(topology: Topology) -> Self {
        let size = 1usize << topology.len();
        Distribution {
            topology,
            weights: vec![1.0 / size as f64; size],
        }
    }

    /// Independent sites with `P(height 1) = rho`.
    pub fn product(topology: Topology, rho: f64) -> Self {
        let n = topology.len();
        let weights = (0..1usize << n)
            .map(|s| {
                let twos = s.count_ones() as i32;
                (1.0 - rho).powi(twos) * rho.powi(n as i32 - twos)
            })
            .collect();
        Distribution { topology, weights }
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn n_sites(&self) -> usize {
        self.topology.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `P(η(x) = 1)`.
    pub fn prob_one_at(&self, x: usize) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .filter(|(s, _)| s >> x & 1 == 0)
            .map(|(_, w)| w)
            .sum()
    }
}

pub fn expectation(dist: &Distribution, observable: impl Fn(&Configuration) -> f64) -> f64 {
    dist.weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w != 0.0)
        .map(|(s, &w)| w * observable(&config_of(dist.topology, s)))
        .sum()
}

/// Generator of the process restricted to a small lattice.
#[derive(Clone, Debug)]
pub struct ExactChain {
    topology: Topology,
    spec: ModelSpec,
    /// Off-diagonal rates per state, sorted by target.
    rows: Vec<Vec<(u32, f64)>>,
    exit: Vec<f64>,
    lambda: f64,
}

pub fn enumerate_chain(topology: Topology, spec: ModelSpec) -> Result<ExactChain> {
    ExactChain::new(topology, spec)
}

impl ExactChain {
    pub fn new(topology: Topology, spec: ModelSpec) -> Result<Self> {
        spec.validate()?;
        let n = topology.len();
        if n > MAX_EXACT_SITES {
            return Err(Error::TooLarge {
                n,
                limit: MAX_EXACT_SITES,
                what: "exact enumeration",
            });
        }
        let size = 1usize << n;
        let mut rows = Vec::with_capacity(size);
        let mut exit = Vec::with_capacity(size);
        let mut acc: Vec<(u32, f64)> = Vec::new();
        for s in 0..size {
            let cfg = config_of(topology, s);
            acc.clear();
            for_each_transition(&cfg, &spec, |t, rate| {
                if t != s && rate > 0.0 {
                    acc.push((t as u32, rate));
                }
            });
            acc.sort_by_key(|&(t, _)| t);
            let mut row: Vec<(u32, f64)> = Vec::with_capacity(acc.len());
            for &(t, r) in &acc {
                match row.last_mut() {
                    Some(last) if last.0 == t => last.1 += r,
                    _ => row.push((t, r)),
                }
            }
            exit.push(row.iter().map(|&(_, r)| r).sum());
            rows.push(row);
        }
        let lambda = exit.iter().copied().fold(0.0, f64::max);
        Ok(ExactChain {
            topology,
            spec,
            rows,
            exit,
            lambda,
        })
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn n_states(&self) -> usize {
        self.rows.len()
    }

    /// Uniformization constant: the largest total exit rate.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn off_diagonal(&self, state: usize) -> &[(u32, f64)] {
        &self.rows[state]
    }

    pub fn rate(&self, from: usize, to: usize) -> f64 {
        if from == to {
            return -self.exit[from];
        }
        self.rows[from]
            .binary_search_by_key(&(to as u32), |&(t, _)| t)
            .map_or(0.0, |i| self.rows[from][i].1)
    }

    /// Largest `|Σ_j Q[i][j]|` over rows.
    pub fn row_sum_residual(&self) -> f64 {
        self.rows
            .iter()
            .zip(&self.exit)
            .map(|(row, &e)| (row.iter().map(|&(_, r)| r).sum::<f64>() - e).abs())
            .fold(0.0, f64::max)
    }

    /// `v Q` for a row vector `v`.
    pub fn left_multiply(&self, v: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = v.iter().zip(&self.exit).map(|(a, e)| -a * e).collect();
        for (i, row) in self.rows.iter().enumerate() {
            if v[i] == 0.0 {
                continue;
            }
            for &(j, r) in row {
                out[j as usize] += v[i] * r;
            }
        }
        out
    }

    /// `Q g` for a column vector `g`.
    pub fn apply(&self, g: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| row.iter().map(|&(j, r)| r * (g[j as usize] - g[i])).sum())
            .collect()
    }

    fn uniformized_step(&self, v: &[f64]) -> Vec<f64> {
        let inv = 1.0 / self.lambda;
        let mut out: Vec<f64> = v
            .iter()
            .zip(&self.exit)
            .map(|(a, e)| a * (1.0 - e * inv))
            .collect();
        for (i, row) in self.rows.iter().enumerate() {
            if v[i] == 0.0 {
                continue;
            }
            for &(j, r) in row {
                out[j as usize] += v[i] * r * inv;
            }
        }
        out
    }

    fn is_irreducible(&self) -> bool {
        let size = self.n_states();
        let mut reverse: Vec<Vec<u32>> = vec![Vec::new(); size];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, _) in row {
                reverse[j as usize].push(i as u32);
            }
        }
        let reach = |adj: &dyn Fn(usize) -> Vec<usize>| {
            let mut seen = vec![false; size];
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            let mut count = 1;
            while let Some(i) = queue.pop_front() {
                for j in adj(i) {
                    if !seen[j] {
                        seen[j] = true;
                        count += 1;
                        queue.push_back(j);
                    }
                }
            }
            count == size
        };
        reach(&|i| self.rows[i].iter().map(|&(j, _)| j as usize).collect())
            && reach(&|i| reverse[i].iter().map(|&j| j as usize).collect())
    }
}

/// `init · exp(tQ)` by uniformization, dropping Poisson tail mass below 1e-13.
pub fn transient_distribution(chain: &ExactChain, init: &Distribution, t: f64) -> Result<Distribution> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("t = {t} must be >= 0")));
    }
    if init.topology != chain.topology {
        return Err(Error::InvalidParameter("distribution and chain differ in lattice".into()));
    }
    if t == 0.0 || chain.lambda == 0.0 {
        return Ok(init.clone());
    }
    // Keep each Poisson mean moderate so exp(-Λt) does not underflow.
    let pieces = (chain.lambda * t / 200.0).ceil().max(1.0) as usize;
    let h = t / pieces as f64;
    let mean = chain.lambda * h;
    let mut v = init.weights.clone();
    for _ in 0..pieces {
        let mut weight = (-mean).exp();
        let mut acc = weight;
        let mut out: Vec<f64> = v.iter().map(|a| a * weight).collect();
        let mut term = v;
        let mut k = 0u64;
        while 1.0 - acc > POISSON_TAIL {
            k += 1;
            term = chain.uniformized_step(&term);
            weight *= mean / k as f64;
            acc += weight;
            for (o, x) in out.iter_mut().zip(&term) {
                *o += weight * x;
            }
            if k > 100_000 {
                return Err(Error::Numerical("uniformization did not converge".into()));
            }
        }
        v = out;
    }
    Ok(Distribution {
        topology: chain.topology,
        weights: v,
    })
}

fn solve_stationary_system(size: usize, entry: impl Fn(usize, usize) -> f64) -> Result<Vec<f64>> {
    // Rows of Qᵀ, last row replaced by the normalization Σπ = 1.
    let mut a = vec![0.0; size * size];
    for i in 0..size {
        for j in 0..size {
            a[j * size + i] = entry(i, j);
        }
    }
    for j in 0..size {
        a[(size - 1) * size + j] = 1.0;
    }
    let mut b = vec![0.0; size];
    b[size - 1] = 1.0;
    let mut pi = solve_dense(a, b, size)?;
    for p in pi.iter_mut() {
        if *p < 0.0 && *p > -1e-13 {
            *p = 0.0;
        }
    }
    Ok(pi)
}

fn check_stationary(chain: &ExactChain, pi: Vec<f64>) -> Result<Distribution> {
    let residual = chain
        .left_multiply(&pi)
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if residual >= 1e-10 {
        return Err(Error::Numerical(format!("stationary residual {residual:e}")));
    }
    let total: f64 = pi.iter().sum();
    let weights = pi.into_iter().map(|p| p / total).collect();
    Distribution::from_weights(chain.topology, weights)
}

/// Stationary law by a dense LU solve of `πQ = 0, Σπ = 1` on the full state
/// space.
pub fn stationary_distribution_dense(chain: &ExactChain) -> Result<Distribution> {
    if !chain.is_irreducible() {
        return Err(Error::Reducible);
    }
    let size = chain.n_states();
    let pi = solve_stationary_system(size, |i, j| chain.rate(i, j))?;
    check_stationary(chain, pi)
}

/// Stationary law. On a ring the chain commutes with rotations, so it is
/// lumped onto rotation orbits, solved densely there and spread uniformly
/// over each orbit; intervals use the full dense solve. Either way the result
/// is checked against `‖πQ‖∞ < 1e-10`.
pub fn stationary_distribution(chain: &ExactChain) -> Result<Distribution> {
    let Topology::Ring { n } = chain.topology else {
        return stationary_distribution_dense(chain);
    };
    if !chain.is_irreducible() {
        return Err(Error::Reducible);
    }
    let size = chain.n_states();
    let mask = size - 1;
    let rotate = |s: usize| ((s << 1) | (s >> (n - 1))) & mask;
    let mut orbit_of = vec![usize::MAX; size];
    let mut reps = Vec::new();
    let mut orbit_len = Vec::new();
    for s in 0..size {
        if orbit_of[s] != usize::MAX {
            continue;
        }
        let id = reps.len();
        let mut r = s;
        let mut len = 0;
        loop {
            if orbit_of[r] == usize::MAX {
                orbit_of[r] = id;
                len += 1;
            }
            r = rotate(r);
            if r == s {
                break;
            }
        }
        reps.push(s);
        orbit_len.push(len);
    }
    let m = reps.len();
    let mut lumped: HashMap<(usize, usize), f64> = HashMap::new();
    for (a, &r) in reps.iter().enumerate() {
        for &(t, rate) in chain.off_diagonal(r) {
            let b = orbit_of[t as usize];
            if b != a {
                *lumped.entry((a, b)).or_default() += rate;
            }
        }
    }
    let mut diag = vec![0.0; m];
    for (&(a, _), &r) in &lumped {
        diag[a] -= r;
    }
    let pi_bar = solve_stationary_system(m, |a, b| {
        if a == b {
            diag[a]
        } else {
            lumped.get(&(a, b)).copied().unwrap_or(0.0)
        }
    })?;
    let pi = (0..size)
        .map(|s| pi_bar[orbit_of[s]] / orbit_len[orbit_of[s]] as f64)
        .collect();
    check_stationary(chain, pi)
}
