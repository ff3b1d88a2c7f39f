//! Closed-form predictions for infinite-volume translation-invariant starts.

use serde::{Deserialize, Serialize};

use crate::dynamics::{FlipRateSpec, ModelSpec};
use crate::error::{Error, Result};

/// Which part of the generator a block computation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeneratorPart {
    /// Sandpile additions at unit rate.
    LS,
    /// Pure spin flips at unit rate.
    LF,
    /// Additions plus anti-additions, both at unit rate.
    SA,
}

/// `ρ e^{−2t} + (1−α)/2 · (1 − e^{−2t})`, clipped to `[0, 1]`.
pub fn predicted_density(t: f64, rho0: f64, alpha: f64) -> f64 {
    let decay = (-2.0 * t).exp();
    (rho0 * decay + 0.5 * (1.0 - alpha) * (1.0 - decay)).clamp(0.0, 1.0)
}

/// Density ODE for any flip family:
/// pure and Glauber relax at rate `2(1−2γ)`, biased at rate 2, toward the
/// (unclipped) fixed point; the result is clipped to `[0, 1]`.
pub fn predicted_density_family(t: f64, rho0: f64, alpha: f64, flip: &FlipRateSpec) -> f64 {
    let (rate, fixed) = match *flip {
        FlipRateSpec::Pure => (2.0, 0.5 * (1.0 - alpha)),
        FlipRateSpec::Glauber { gamma } => {
            let ac = 1.0 - 2.0 * gamma;
            (2.0 * ac, 0.5 * (ac - alpha) / ac.max(f64::MIN_POSITIVE))
        }
        FlipRateSpec::Biased { kappa } => (2.0, 0.5 * (1.0 - kappa - alpha)),
    };
    (fixed + (rho0 - fixed) * (-rate * t).exp()).clamp(0.0, 1.0)
}

/// Time at which the pure-flip density ODE started at `rho0` reaches zero:
/// the root of `(ρ + (α−1)/2) e^{−2t} + (1−α)/2 = 0`, or `+∞` if there is
/// none (`α <= 1`).
pub fn freeze_time(rho0: f64, alpha: f64) -> f64 {
    if alpha <= 1.0 {
        return f64::INFINITY;
    }
    0.5 * ((2.0 * rho0 + alpha - 1.0) / (alpha - 1.0)).ln()
}

/// Time at which the pure-flip density ODE from `rho0` first drops to `eps`;
/// `+∞` if it never does.
pub fn density_hitting_time(rho0: f64, alpha: f64, eps: f64) -> f64 {
    if rho0 <= eps {
        return 0.0;
    }
    let fixed = 0.5 * (1.0 - alpha);
    if eps <= fixed {
        return f64::INFINITY;
    }
    0.5 * ((rho0 - fixed) / (eps - fixed)).ln()
}

/// Critical addition rate: 1 (pure), `1 − 2γ` (Glauber), `1 − κ` (biased).
pub fn critical_alpha(flip: &FlipRateSpec) -> f64 {
    match *flip {
        FlipRateSpec::Pure => 1.0,
        FlipRateSpec::Glauber { gamma } => 1.0 - 2.0 * gamma,
        FlipRateSpec::Biased { kappa } => 1.0 - kappa,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryPrediction {
    pub density: f64,
    /// `α_c <= 0`: every positive addition rate freezes.
    pub strong_coupling: bool,
}

/// Stationary density of height-1 sites.
///
/// Pure and Glauber: `max(0, ½(1 − α/α_c))`. Biased flips give the density
/// ODE `ρ' = 1 − κ − α − 2ρ`, whose fixed point is `max(0, ½(α_c − α))`.
pub fn predicted_stationary_density(alpha: f64, flip: &FlipRateSpec) -> StationaryPrediction {
    let ac = critical_alpha(flip);
    if ac <= 0.0 {
        return StationaryPrediction {
            density: if alpha > 0.0 { 0.0 } else { 0.5 },
            strong_coupling: true,
        };
    }
    let density = match flip {
        FlipRateSpec::Biased { .. } => 0.5 * (ac - alpha),
        _ => 0.5 * (1.0 - alpha / ac),
    };
    StationaryPrediction {
        density: density.max(0.0),
        strong_coupling: false,
    }
}

/// Lower bound `(m − α)/(2M)` on the density of any translation-invariant
/// stationary law, meaningful when `α < m`.
pub fn density_lower_bound(alpha: f64, flip: &FlipRateSpec) -> f64 {
    let (m, big_m) = flip.bounds();
    (m - alpha) / (2.0 * big_m)
}

/// SA density: linear drift `β − α` until it reaches 0 or 1.
pub fn sa_predicted_density(t: f64, rho0: f64, alpha: f64, beta: f64) -> f64 {
    (rho0 + (beta - alpha) * t).clamp(0.0, 1.0)
}

/// `∫ (part) H_n dλ_ρ` for `n >= 2`:
/// * `LS`: `−nρⁿ − 2ρ^{n−1}(1−ρ)`
/// * `LF`: `−nρⁿ + nρ^{n−1}(1−ρ)`
/// * `SA`: `ρ^{n−1}(1−ρ)(n−2)`
pub fn predicted_generator_block(rho: f64, n: usize, which: GeneratorPart) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(
            "block formulas need n >= 2; a single height-1 site can be created".into(),
        ));
    }
    let nf = n as f64;
    let p = rho.powi(n as i32 - 1);
    Ok(match which {
        GeneratorPart::LS => -nf * p * rho - 2.0 * p * (1.0 - rho),
        GeneratorPart::LF => -nf * p * rho + nf * p * (1.0 - rho),
        GeneratorPart::SA => p * (1.0 - rho) * (nf - 2.0),
    })
}

/// The density for which `λ_ρ` would satisfy `∫ (αL_S + L_F) H_n dλ_ρ = 0`:
/// `(n − 2α)/(2n + (n−2)α)`. It depends on `n`, so no product law is
/// stationary when `0 < α < 1`.
pub fn product_consistency_rho(n: usize, alpha: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter("block length must be >= 2".into()));
    }
    let nf = n as f64;
    Ok((nf - 2.0 * alpha) / (2.0 * nf + (nf - 2.0) * alpha))
}

/// Derived quantities for one model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryContext {
    pub spec: ModelSpec,
    /// Critical addition rate (SF only).
    pub alpha_c: Option<f64>,
    /// Stationary density of height-1 sites.
    pub rho_stationary: f64,
}

impl TheoryContext {
    pub fn new(spec: ModelSpec) -> Self {
        match spec {
            ModelSpec::Sf { alpha, flip } => TheoryContext {
                spec,
                alpha_c: Some(critical_alpha(&flip)),
                rho_stationary: predicted_stationary_density(alpha, &flip).density,
            },
            ModelSpec::Sa { alpha, beta } => TheoryContext {
                spec,
                alpha_c: None,
                // Absorbed at all-1 or all-2; α = β conserves the density
                // and has no single answer.
                rho_stationary: if beta > alpha {
                    1.0
                } else if alpha > beta {
                    0.0
                } else {
                    f64::NAN
                },
            },
        }
    }

    /// Density at time `t` from a translation-invariant start of density `rho0`.
    pub fn density_at(&self, t: f64, rho0: f64) -> f64 {
        match self.spec {
            ModelSpec::Sf { alpha, flip } => predicted_density_family(t, rho0, alpha, &flip),
            ModelSpec::Sa { alpha, beta } => sa_predicted_density(t, rho0, alpha, beta),
        }
    }

    /// Freezing time from density `rho0` (pure flips only; `+∞` otherwise
    /// or below criticality).
    pub fn freeze_time(&self, rho0: f64) -> f64 {
        match self.spec {
            ModelSpec::Sf {
                alpha,
                flip: FlipRateSpec::Pure,
            } => freeze_time(rho0, alpha),
            _ => f64::INFINITY,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_formula_values() {
        assert_eq!(predicted_density(0.0, 0.37, 0.5), 0.37);
        assert!((predicted_density(60.0, 0.9, 0.4) - 0.3).abs() < 1e-15);
        // 0.25 + 0.25 e^{-2}
        assert!((predicted_density(1.0, 0.5, 0.5) - 0.283_833_8).abs() < 1e-6);
        assert_eq!(predicted_density(5.0, 1.0, 2.0), 0.0);
    }

    #[test]
    fn density_is_monotone_toward_fixed_point() {
        for &rho0 in &[0.0, 0.1, 0.3, 0.7, 1.0] {
            let mut prev = predicted_density(0.0, rho0, 0.4);
            for i in 1..200 {
                let cur = predicted_density(i as f64 * 0.05, rho0, 0.4);
                assert!((cur - 0.3).abs() <= (prev - 0.3).abs() + 1e-15);
                prev = cur;
            }
        }
        for i in 0..50 {
            assert!((predicted_density(i as f64 * 0.3, 0.3, 0.4) - 0.3).abs() < 1e-15);
        }
    }

    #[test]
    fn freeze_times() {
        assert!((freeze_time(1.0, 2.0) - 0.5 * 3f64.ln()).abs() < 1e-15);
        assert!((freeze_time(1.0, 2.0) - 0.549_306).abs() < 1e-6);
        assert!(freeze_time(0.4, 0.9).is_infinite());
        assert!(freeze_time(1.0, 1.0).is_infinite());
        // Hitting 1e-3: ½ ln(3 / 1.002).
        assert!((density_hitting_time(1.0, 2.0, 1e-3) - 0.5 * (3.0f64 / 1.002).ln()).abs() < 1e-12);
        assert!((density_hitting_time(1.0, 2.0, 1e-3) - 0.548).abs() < 1e-3);
        assert!(density_hitting_time(1.0, 0.0, 1e-3).is_infinite());
    }

    #[test]
    fn critical_values() {
        assert_eq!(critical_alpha(&FlipRateSpec::Pure), 1.0);
        assert_eq!(critical_alpha(&FlipRateSpec::Glauber { gamma: 0.25 }), 0.5);
        assert!((critical_alpha(&FlipRateSpec::Biased { kappa: 0.3 }) - 0.7).abs() < 1e-15);
        assert!((predicted_stationary_density(0.4, &FlipRateSpec::Pure).density - 0.3).abs() < 1e-15);
        assert_eq!(
            predicted_stationary_density(0.25, &FlipRateSpec::Glauber { gamma: 0.25 }).density,
            0.25
        );
        assert_eq!(predicted_stationary_density(1.3, &FlipRateSpec::Pure).density, 0.0);
        let strong = predicted_stationary_density(0.1, &FlipRateSpec::Glauber { gamma: 0.5 });
        assert!(strong.strong_coupling);
        assert_eq!(strong.density, 0.0);
    }

    #[test]
    fn glauber_ode_matches_pure_at_zero_coupling() {
        for i in 0..20 {
            let t = i as f64 * 0.1;
            let a = predicted_density_family(t, 0.8, 0.3, &FlipRateSpec::Glauber { gamma: 0.0 });
            assert!((a - predicted_density(t, 0.8, 0.3)).abs() < 1e-15);
        }
    }

    #[test]
    fn lower_bound_for_glauber() {
        // m = 1/2, M = 3/2 at γ = 0.25: (0.5 − 0.2)/3 = 0.1.
        let b = density_lower_bound(0.2, &FlipRateSpec::Glauber { gamma: 0.25 });
        assert!((b - 0.1).abs() < 1e-15);
    }

    #[test]
    fn block_formulas() {
        assert_eq!(predicted_generator_block(0.5, 2, GeneratorPart::LS).unwrap(), -1.0);
        assert_eq!(predicted_generator_block(0.5, 2, GeneratorPart::LF).unwrap(), 0.0);
        assert_eq!(predicted_generator_block(0.37, 2, GeneratorPart::SA).unwrap(), 0.0);
        assert_eq!(predicted_generator_block(0.5, 3, GeneratorPart::SA).unwrap(), 0.125);
        assert!(predicted_generator_block(0.5, 1, GeneratorPart::LS).is_err());
    }

    #[test]
    fn product_consistency() {
        assert_eq!(product_consistency_rho(2, 0.5).unwrap(), 0.25);
        assert!((product_consistency_rho(3, 0.5).unwrap() - 4.0 / 13.0).abs() < 1e-15);
        for n in 2..10 {
            assert_eq!(product_consistency_rho(n, 0.0).unwrap(), 0.5);
        }
        // The stationarity condition holds at that density for its own n.
        for n in 2..8 {
            let alpha = 0.35;
            let rho = product_consistency_rho(n, alpha).unwrap();
            let ls = predicted_generator_block(rho, n, GeneratorPart::LS).unwrap();
            let lf = predicted_generator_block(rho, n, GeneratorPart::LF).unwrap();
            assert!((alpha * ls + lf).abs() < 1e-14);
        }
    }

    #[test]
    fn consistency_rho_varies_with_n() {
        for i in 1..20 {
            let alpha = i as f64 / 20.0;
            let r2 = product_consistency_rho(2, alpha).unwrap();
            let r3 = product_consistency_rho(3, alpha).unwrap();
            assert!((r2 - r3).abs() > 1e-6, "alpha = {alpha}");
        }
    }
}
