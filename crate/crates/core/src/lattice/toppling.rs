//! Brute-force stabilization by (reversed) topplings. Independent of the
//! closed-form operators and used to check them.

use crate::error::{Error, Result};

use super::{Configuration, Height, Topology};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ToppleMode {
    /// Height >= 3 sheds two grains, one to each neighbor; grains leaving an
    /// interval are lost.
    Forward,
    /// Height <= 0 absorbs two grains, one from each neighbor; the outside of
    /// an interval supplies grains freely.
    Reverse,
}

/// Which unstable site to topple next. The final result must not depend on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ToppleOrder {
    Leftmost,
    Rightmost,
    Stack,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnstableConfiguration {
    pub topology: Topology,
    pub heights: Vec<i64>,
}

impl UnstableConfiguration {
    pub fn from_config(cfg: &Configuration) -> Self {
        UnstableConfiguration {
            topology: cfg.topology(),
            heights: cfg.heights().iter().map(|h| h.value() as i64).collect(),
        }
    }

    /// `η + delta·e_x`.
    pub fn perturbed(cfg: &Configuration, x: usize, delta: i64) -> Self {
        let mut u = Self::from_config(cfg);
        u.heights[x] += delta;
        u
    }
}

fn unstable(h: i64, mode: ToppleMode) -> bool {
    match mode {
        ToppleMode::Forward => h >= 3,
        ToppleMode::Reverse => h <= 0,
    }
}

pub fn stabilize_by_toppling(u: UnstableConfiguration, mode: ToppleMode) -> Result<Configuration> {
    stabilize_with_order(u, mode, ToppleOrder::Stack)
}

pub fn stabilize_with_order(
    u: UnstableConfiguration,
    mode: ToppleMode,
    order: ToppleOrder,
) -> Result<Configuration> {
    let Topology::Interval { n } = u.topology else {
        return Err(Error::Unsupported(
            "toppling needs an interval; rings have no sink".into(),
        ));
    };
    let mut h = u.heights;
    let cap = n * n + 4 * n;
    let sign = match mode {
        ToppleMode::Forward => 1,
        ToppleMode::Reverse => -1,
    };
    let mut pending: Vec<usize> = (0..n).filter(|&x| unstable(h[x], mode)).collect();
    let mut topplings = 0usize;
    loop {
        let x = match order {
            ToppleOrder::Stack => pending.pop(),
            ToppleOrder::Leftmost => (0..n).find(|&x| unstable(h[x], mode)),
            ToppleOrder::Rightmost => (0..n).rev().find(|&x| unstable(h[x], mode)),
        };
        let Some(x) = x else { break };
        if !unstable(h[x], mode) {
            continue;
        }
        topplings += 1;
        if topplings > cap {
            return Err(Error::ToppleCap { cap });
        }
        h[x] -= 2 * sign;
        if unstable(h[x], mode) && order == ToppleOrder::Stack {
            pending.push(x);
        }
        for y in [x.checked_sub(1), Some(x + 1).filter(|&y| y < n)].into_iter().flatten() {
            h[y] += sign;
            if unstable(h[y], mode) && order == ToppleOrder::Stack {
                pending.push(y);
            }
        }
    }
    let heights = h
        .into_iter()
        .map(|v| {
            u8::try_from(v)
                .map_err(|_| Error::Numerical(format!("stabilized height {v}")))
                .and_then(Height::from_value)
        })
        .collect::<Result<Vec<_>>>()?;
    Configuration::from_heights(u.topology, heights)
}

/// Applies an addition (`Forward`) or anti-addition (`Reverse`) at `x` on a
/// ring by toppling on a three-period unrolled interval and folding the
/// changed sites back modulo `n`.
///
/// Needs at least one site of the height being filled (1 for `Forward`,
/// 2 for `Reverse`); with none, the ring operator is the identity by
/// convention and there is nothing to check.
pub fn ring_operator_by_unrolling(
    cfg: &Configuration,
    x: usize,
    mode: ToppleMode,
) -> Result<Configuration> {
    let Topology::Ring { n } = cfg.topology() else {
        return Err(Error::Unsupported("unrolling needs a ring".into()));
    };
    if x >= n {
        return Err(Error::InvalidSite { site: x, len: n });
    }
    let hole = match mode {
        ToppleMode::Forward => Height::One,
        ToppleMode::Reverse => Height::Two,
    };
    if cfg.sites_at(hole).is_empty() {
        return Err(Error::Unsupported("no site of the filled height".into()));
    }
    let lifted: Vec<Height> = (0..3 * n).map(|y| cfg.height(y % n)).collect();
    let lifted = Configuration::from_heights(Topology::interval(3 * n)?, lifted)?;
    let delta = match mode {
        ToppleMode::Forward => 1,
        ToppleMode::Reverse => -1,
    };
    let stable = stabilize_by_toppling(UnstableConfiguration::perturbed(&lifted, x + n, delta), mode)?;
    let mut out = cfg.clone();
    for y in 0..3 * n {
        if stable.height(y) != lifted.height(y) {
            out.set(y % n, stable.height(y));
        }
    }
    Ok(out)
}
