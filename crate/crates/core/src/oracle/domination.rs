//! Stochastic order between two laws on `{1,2}^N` under the sitewise order.
//!
//! `lower ≼ upper` iff a coupling exists that is supported on pairs
//! `η ≤ ξ`. That is a transportation feasibility question, decided exactly by
//! a max-flow computation for `N <= 8`. A cheaper necessary condition checks
//! `lower(U) <= upper(U)` for every increasing event `U` depending on at most
//! four sites.

use std::collections::VecDeque;
use std::sync::OnceLock;

use crate::error::{Error, Result};

use super::Distribution;

pub const MAX_EXACT_DOMINATION_SITES: usize = 8;
const TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DominationVerdict {
    /// A monotone coupling exists.
    Dominated,
    /// Some increasing event or the flow check refutes the order.
    NotDominated,
    /// Only the cylinder prefilter ran and found no violation.
    NotRefuted,
}

impl DominationVerdict {
    pub fn holds(self) -> bool {
        self == DominationVerdict::Dominated
    }
}

pub fn stochastic_domination_check(lower: &Distribution, upper: &Distribution) -> Result<DominationVerdict> {
    if lower.topology() != upper.topology() {
        return Err(Error::InvalidParameter("laws live on different lattices".into()));
    }
    let n = lower.n_sites();
    if n > super::MAX_EXACT_SITES {
        return Err(Error::TooLarge {
            n,
            limit: super::MAX_EXACT_SITES,
            what: "domination check",
        });
    }
    if !cylinder_prefilter(lower, upper) {
        return Ok(DominationVerdict::NotDominated);
    }
    if n > MAX_EXACT_DOMINATION_SITES {
        return Ok(DominationVerdict::NotRefuted);
    }
    Ok(if exact_domination(lower, upper) {
        DominationVerdict::Dominated
    } else {
        DominationVerdict::NotDominated
    })
}

/// Up-sets of `{0,1}^k` as bitmasks over the `2^k` points, for `k <= 4`.
fn up_sets(k: usize) -> &'static [u32] {
    static CACHE: OnceLock<Vec<Vec<u32>>> = OnceLock::new();
    &CACHE.get_or_init(|| {
        (0..=4)
            .map(|k| {
                let points = 1usize << k;
                (1u32..(1u64 << points) as u32)
                    .filter(|&set| {
                        (0..points).all(|p| {
                            set >> p & 1 == 0
                                || (0..k).all(|b| set >> (p | (1 << b)) & 1 == 1)
                        })
                    })
                    .collect()
            })
            .collect()
    })[k]
}

fn marginal(dist: &Distribution, sites: &[usize]) -> Vec<f64> {
    let mut m = vec![0.0; 1 << sites.len()];
    for (s, &w) in dist.weights().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let p = sites
            .iter()
            .enumerate()
            .fold(0, |acc, (b, &x)| acc | ((s >> x & 1) << b));
        m[p] += w;
    }
    m
}

fn subsets_up_to(n: usize, max: usize) -> Vec<Vec<usize>> {
    (1usize..1 << n)
        .filter(|m| m.count_ones() as usize <= max)
        .map(|m| (0..n).filter(|x| m >> x & 1 == 1).collect())
        .collect()
}

/// Necessary condition: `lower(U) <= upper(U)` for every increasing event
/// determined by at most four sites.
pub fn cylinder_prefilter(lower: &Distribution, upper: &Distribution) -> bool {
    let n = lower.n_sites();
    subsets_up_to(n, 4).iter().all(|sites| {
        let ml = marginal(lower, sites);
        let mu = marginal(upper, sites);
        up_sets(sites.len()).iter().all(|&set| {
            let mass = |m: &[f64]| -> f64 {
                m.iter()
                    .enumerate()
                    .filter(|(p, _)| set >> p & 1 == 1)
                    .map(|(_, w)| w)
                    .sum()
            };
            mass(&ml) <= mass(&mu) + TOL
        })
    })
}

struct FlowNetwork {
    head: Vec<Option<usize>>,
    to: Vec<usize>,
    cap: Vec<f64>,
    next: Vec<Option<usize>>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        FlowNetwork {
            head: vec![None; nodes],
            to: Vec::new(),
            cap: Vec::new(),
            next: Vec::new(),
        }
    }

    fn edge(&mut self, u: usize, v: usize, c: f64) {
        for (a, b, cap) in [(u, v, c), (v, u, 0.0)] {
            self.to.push(b);
            self.cap.push(cap);
            self.next.push(self.head[a]);
            self.head[a] = Some(self.to.len() - 1);
        }
    }

    fn levels(&self, s: usize, t: usize) -> Option<Vec<usize>> {
        let mut level = vec![usize::MAX; self.head.len()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let mut e = self.head[u];
            while let Some(i) = e {
                let v = self.to[i];
                if self.cap[i] > 1e-15 && level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
                e = self.next[i];
            }
        }
        (level[t] != usize::MAX).then_some(level)
    }

    fn push(&mut self, u: usize, t: usize, limit: f64, level: &[usize], iter: &mut [Option<usize>]) -> f64 {
        if u == t {
            return limit;
        }
        while let Some(i) = iter[u] {
            let v = self.to[i];
            if self.cap[i] > 1e-15 && level[v] == level[u] + 1 {
                let got = self.push(v, t, limit.min(self.cap[i]), level, iter);
                if got > 0.0 {
                    self.cap[i] -= got;
                    self.cap[i ^ 1] += got;
                    return got;
                }
            }
            iter[u] = self.next[i];
        }
        0.0
    }

    /// Dinic's algorithm.
    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        while let Some(level) = self.levels(s, t) {
            let mut iter = self.head.clone();
            loop {
                let f = self.push(s, t, f64::INFINITY, &level, &mut iter);
                if f <= 0.0 {
                    break;
                }
                total += f;
            }
        }
        total
    }
}

/// Exact check: the bipartite network source → η (capacity `lower(η)`),
/// η → ξ for `η ≤ ξ` (unbounded), ξ → sink (capacity `upper(ξ)`) carries a
/// unit flow iff `lower ≼ upper`.
pub fn exact_domination(lower: &Distribution, upper: &Distribution) -> bool {
    let size = lower.weights().len();
    let (source, sink) = (2 * size, 2 * size + 1);
    let mut net = FlowNetwork::new(2 * size + 2);
    let lw = lower.weights();
    let uw = upper.weights();
    for (s, &w) in lw.iter().enumerate() {
        if w > 0.0 {
            net.edge(source, s, w);
        }
    }
    for (s, &w) in uw.iter().enumerate() {
        if w > 0.0 {
            net.edge(size + s, sink, w);
        }
    }
    for (a, &wa) in lw.iter().enumerate() {
        if wa == 0.0 {
            continue;
        }
        for (b, &wb) in uw.iter().enumerate() {
            // Bit set = height 2, so a ≤ b sitewise iff a ⊆ b.
            if wb > 0.0 && a & !b == 0 {
                net.edge(a, size + b, f64::INFINITY);
            }
        }
    }
    let flow = net.max_flow(source, sink);
    flow >= lower.total() - TOL
}
