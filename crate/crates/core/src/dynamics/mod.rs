//! Continuous-time kinetic Monte Carlo for the SF and SA processes.
//!
//! Every site carries Poisson clocks: additions at rate `α`, and either flip
//! proposals at rate `M` (accepted with probability `c(x, η)/M`) or
//! anti-additions at rate `β`. All clocks are merged into one clock of rate
//! `N · site_rate`; events that change nothing still advance time.

mod model;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Configuration, Height, Topology};

pub use model::{FlipRateSpec, ModelSpec};

pub type SimRng = ChaCha8Rng;

/// Independent stream for one replica. Streams depend only on
/// `(master_seed, replica)`, so adding replicas leaves existing ones intact.
pub fn replica_rng(master_seed: u64, replica: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(replica);
    rng
}

/// Runs `count` replicas, in parallel when the `parallel` feature is on.
/// Output is ordered by replica id.
pub fn run_replicas<T, F>(count: usize, master_seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, SimRng) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count)
            .into_par_iter()
            .map(|r| f(r, replica_rng(master_seed, r as u64)))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count)
            .map(|r| f(r, replica_rng(master_seed, r as u64)))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialDistribution {
    /// Independent sites with `P(height 1) = rho`.
    Product { rho: f64 },
    AllOnes,
    AllTwos,
    /// Height 1 at `y` only.
    SingleOne { y: usize },
}

pub fn sample_initial(
    dist: &InitialDistribution,
    topology: Topology,
    rng: &mut impl Rng,
) -> Result<Configuration> {
    let n = topology.len();
    match *dist {
        InitialDistribution::Product { rho } => {
            if !(0.0..=1.0).contains(&rho) {
                return Err(Error::InvalidParameter(format!("rho = {rho} outside [0, 1]")));
            }
            let heights = (0..n)
                .map(|_| if rng.random::<f64>() < rho { Height::One } else { Height::Two })
                .collect();
            Configuration::from_heights(topology, heights)
        }
        InitialDistribution::AllOnes => Ok(Configuration::constant(topology, Height::One)),
        InitialDistribution::AllTwos => Ok(Configuration::constant(topology, Height::Two)),
        InitialDistribution::SingleOne { y } => {
            if y >= n {
                return Err(Error::InvalidSite { site: y, len: n });
            }
            let mut cfg = Configuration::constant(topology, Height::Two);
            cfg.set(y, Height::One);
            Ok(cfg)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventKind {
    Addition,
    AntiAddition,
    Flip,
    RejectedFlip,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Event {
    pub kind: EventKind,
    pub site: usize,
    /// False when the operator left the configuration unchanged.
    pub changed: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventCounters {
    pub additions: u64,
    pub anti_additions: u64,
    pub flips_accepted: u64,
    pub flips_rejected: u64,
}

impl EventCounters {
    pub fn total(&self) -> u64 {
        self.additions + self.anti_additions + self.flips_accepted + self.flips_rejected
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    pub event: Event,
    pub dt: f64,
}

#[derive(Clone, Debug)]
pub struct SimState {
    pub cfg: Configuration,
    pub t: f64,
    pub counters: EventCounters,
    rng: SimRng,
    /// Absolute time of the next event, once drawn, and the total rate it was
    /// drawn with.
    pending: Option<(f64, f64)>,
}

impl SimState {
    pub fn new(cfg: Configuration, rng: SimRng) -> Self {
        SimState {
            cfg,
            t: 0.0,
            counters: EventCounters::default(),
            rng,
            pending: None,
        }
    }

    pub fn rng(&mut self) -> &mut SimRng {
        &mut self.rng
    }

    fn total_rate(&self, spec: &ModelSpec) -> f64 {
        self.cfg.len() as f64 * spec.site_rate()
    }

    /// Time of the next event, drawing it if needed. `None` if every rate is
    /// zero.
    fn next_event_time(&mut self, spec: &ModelSpec) -> Option<f64> {
        let rate = self.total_rate(spec);
        if rate <= 0.0 {
            return None;
        }
        match self.pending {
            Some((at, r)) if r == rate => Some(at),
            _ => {
                let wait: f64 = self.rng.sample::<f64, _>(Exp1) / rate;
                let at = self.t + wait;
                self.pending = Some((at, rate));
                Some(at)
            }
        }
    }

    fn fire(&mut self, spec: &ModelSpec, at: f64) -> StepOutcome {
        self.pending = None;
        let dt = at - self.t;
        self.t = at;
        let n = self.cfg.len();
        let site = self.rng.random_range(0..n);
        let u = self.rng.random::<f64>() * spec.site_rate();
        let (kind, changed) = match *spec {
            ModelSpec::Sf { alpha, flip } => {
                if u < alpha {
                    let e = self.cfg.add_in_place(site).expect("site in range");
                    self.counters.additions += 1;
                    (EventKind::Addition, !e.is_identity())
                } else if u - alpha < flip.rate(&self.cfg, site) {
                    self.cfg.flip_in_place(site).expect("site in range");
                    self.counters.flips_accepted += 1;
                    (EventKind::Flip, true)
                } else {
                    self.counters.flips_rejected += 1;
                    (EventKind::RejectedFlip, false)
                }
            }
            ModelSpec::Sa { alpha, .. } => {
                if u < alpha {
                    let e = self.cfg.add_in_place(site).expect("site in range");
                    self.counters.additions += 1;
                    (EventKind::Addition, !e.is_identity())
                } else {
                    let e = self.cfg.anti_add_in_place(site).expect("site in range");
                    self.counters.anti_additions += 1;
                    (EventKind::AntiAddition, !e.is_identity())
                }
            }
        };
        StepOutcome {
            event: Event {
                kind,
                site,
                changed,
            },
            dt,
        }
    }
}

/// Performs one event. Returns `None` (state untouched) if all rates vanish.
pub fn step(state: &mut SimState, spec: &ModelSpec) -> Option<StepOutcome> {
    let at = state.next_event_time(spec)?;
    Some(state.fire(spec, at))
}

/// Runs up to `t_end`, evaluating `observe` at each of `sample_times` (which
/// must be sorted) on the configuration in force at that time. Sample times
/// before the current time see the current configuration; those after
/// `t_end` are skipped.
pub fn run_until<T>(
    state: &mut SimState,
    spec: &ModelSpec,
    t_end: f64,
    sample_times: &[f64],
    mut observe: impl FnMut(&Configuration) -> T,
) -> Vec<(f64, T)> {
    let mut out = Vec::new();
    let mut pending_samples = sample_times.iter().copied().filter(|&s| s <= t_end).peekable();
    if t_end < state.t {
        return out;
    }
    loop {
        let next = state.next_event_time(spec).unwrap_or(f64::INFINITY);
        while let Some(&s) = pending_samples.peek() {
            if s < next {
                out.push((s, observe(&state.cfg)));
                pending_samples.next();
            } else {
                break;
            }
        }
        if next > t_end {
            state.t = t_end;
            return out;
        }
        state.fire(spec, next);
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FreezeTarget {
    /// Density of height-1 sites drops below the threshold.
    OnesBelow(f64),
    /// Density of height-2 sites drops below the threshold.
    TwosBelow(f64),
}

impl FreezeTarget {
    fn reached(&self, cfg: &Configuration) -> bool {
        match *self {
            FreezeTarget::OnesBelow(eps) => cfg.density_of_ones() < eps,
            FreezeTarget::TwosBelow(eps) => cfg.density_of_twos() < eps,
        }
    }
}

/// First time the target density threshold is crossed, or `None` if that
/// does not happen by `t_max`.
pub fn freezing_time(
    state: &mut SimState,
    spec: &ModelSpec,
    target: FreezeTarget,
    t_max: f64,
) -> Result<Option<f64>> {
    let eps = match target {
        FreezeTarget::OnesBelow(e) | FreezeTarget::TwosBelow(e) => e,
    };
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("threshold {eps} outside (0, 1)")));
    }
    if target.reached(&state.cfg) {
        return Ok(Some(state.t));
    }
    loop {
        let Some(next) = state.next_event_time(spec) else {
            state.t = state.t.max(t_max);
            return Ok(None);
        };
        if next > t_max {
            state.t = t_max;
            return Ok(None);
        }
        state.fire(spec, next);
        if target.reached(&state.cfg) {
            return Ok(Some(state.t));
        }
    }
}

/// Pure-flip SF process on an interval of `n` sites started from a single
/// height-1 site at the center; returns the first time no height-1 site is
/// left within `window` sites of the center.
pub fn lone_one_vanish_time(n: usize, alpha: f64, window: usize, rng: SimRng) -> Result<f64> {
    let topology = Topology::interval(n)?;
    let center = n / 2;
    if window > center || center + window >= n {
        return Err(Error::InvalidParameter(format!(
            "window {window} does not fit in {n} sites"
        )));
    }
    if alpha <= 0.0 {
        return Err(Error::InvalidParameter("alpha must be positive".into()));
    }
    let spec = ModelSpec::sf_pure(alpha);
    let mut cfg = Configuration::constant(topology, Height::Two);
    cfg.set(center, Height::One);
    let mut state = SimState::new(cfg, rng);
    let (lo, hi) = (center - window, center + window);
    loop {
        step(&mut state, &spec).expect("positive rate");
        let next_one = state.cfg.inactive_index().next_at_or_after(lo);
        if next_one.is_none_or(|s| s > hi) {
            return Ok(state.t);
        }
    }
}

#[cfg(test)]
mod tests;
