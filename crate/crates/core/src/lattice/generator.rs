//! Pointwise generator evaluations and the finite-window decency statistic.

use crate::dynamics::ModelSpec;
use crate::error::{Error, Result};

use super::{Configuration, Height, Topology};

/// Explicit sum `Σ_x rate(x)·[(op_x η)(0) − η(0)]` for `f(η) = η(0)`, with
/// no wrap-safety check. Every site is visited; sites whose operator leaves
/// site 0 alone contribute zero.
pub fn explicit_generator_height0(cfg: &Configuration, spec: &ModelSpec) -> Result<f64> {
    let h0 = cfg.height(0);
    let before = h0.value() as f64;
    let mut additions = 0.0;
    let mut anti_additions = 0.0;
    for x in 0..cfg.len() {
        let a = cfg.add_effect(x)?.height_after(0, h0).value() as f64;
        additions += a - before;
        if let ModelSpec::Sa { .. } = spec {
            let b = cfg.anti_add_effect(x)?.height_after(0, h0).value() as f64;
            anti_additions += b - before;
        }
    }
    Ok(match spec {
        ModelSpec::Sf { alpha, flip } => {
            let flipped = h0.toggled().value() as f64 - before;
            alpha * additions + flip.rate(cfg, 0) * flipped
        }
        ModelSpec::Sa { alpha, beta } => alpha * additions + beta * anti_additions,
    })
}

/// Describes why `cfg` is not wrap-safe around site 0, or `None` if it is.
///
/// Wrap-safe means at least two sites of each height, and the nearest site of
/// each height on either side of site 0 closer than `n / 2`.
pub fn wrap_safety(cfg: &Configuration) -> Option<String> {
    let n = cfg.len();
    if cfg.count_ones() < 2 || cfg.count_twos() < 2 {
        return Some("needs at least two sites of each height".into());
    }
    if !cfg.topology().is_ring() {
        return None;
    }
    for h in [Height::One, Height::Two] {
        let set = cfg.sites_at(h);
        let right = set.next_at_or_after(1).unwrap_or(n + set.first().unwrap_or(0));
        let left = set.last().map_or(n, |s| if s == 0 { n } else { n - s });
        if 2 * right >= n || 2 * left >= n {
            return Some(format!("gap around site 0 too long for height {}", h.value()));
        }
    }
    None
}

/// `L f(η)` for `f(η) = η(0)`, computed as an explicit sum over operator
/// applications. Refuses configurations that are not wrap-safe.
pub fn pointwise_generator_height0(cfg: &Configuration, spec: &ModelSpec) -> Result<f64> {
    if let Some(why) = wrap_safety(cfg) {
        return Err(Error::NotWrapSafe(why));
    }
    explicit_generator_height0(cfg, spec)
}

/// Closed form for pure flips:
/// `α·χ(η(0)=1)·(k⁺(1,η) + k⁻(0,η) + 1) + 3 − α − 2η(0)`.
pub fn rene_closed_form(cfg: &Configuration, alpha: f64) -> Result<f64> {
    let undefined = || Error::Undefined("no height-1 site".into());
    let k_plus = cfg.k_plus(1).ok_or_else(undefined)? as f64;
    let k_minus = cfg.k_minus(0).ok_or_else(undefined)? as f64;
    let h0 = cfg.height(0);
    let indicator = if h0 == Height::One { 1.0 } else { 0.0 };
    Ok(alpha * indicator * (k_plus + k_minus + 1.0) + 3.0 - alpha - 2.0 * h0.value() as f64)
}

/// Mean distance between consecutive height-1 sites within `window` sites of
/// site 0 (unrolled on a ring).
pub fn decency_statistic(cfg: &Configuration, window: usize) -> Result<f64> {
    let n = cfg.len() as isize;
    let w = window as isize;
    let positions: Vec<isize> = match cfg.topology() {
        Topology::Ring { .. } => (-w..=w)
            .filter(|&p| cfg.height(p.rem_euclid(n) as usize) == Height::One)
            .collect(),
        Topology::Interval { .. } => (0..=w.min(n - 1))
            .filter(|&p| cfg.height(p as usize) == Height::One)
            .collect(),
    };
    if positions.len() < 2 {
        return Err(Error::Undefined(
            "fewer than two height-1 sites in the window".into(),
        ));
    }
    let span = positions[positions.len() - 1] - positions[0];
    Ok(span as f64 / (positions.len() - 1) as f64)
}
