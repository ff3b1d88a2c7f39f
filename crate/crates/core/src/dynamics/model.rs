use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Configuration, Height};

/// Spin-flip rate family `c(x, η)`.
///
/// With `f_x(η) = 1 − 2χ(η(x) = 1)`:
/// * `Pure`: `c = 1`.
/// * `Glauber`: `c = 1 − γ f_x (f_{x−1} + f_{x+1})`. The Ising Glauber choice
///   is `γ = ½ tanh(2β)` for an inverse temperature `β`.
/// * `Biased`: `c = 1 − κ f_x`.
///
/// Virtual sites outside an interval count as height 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum FlipRateSpec {
    Pure,
    Glauber { gamma: f64 },
    Biased { kappa: f64 },
}

fn spin(h: Height) -> f64 {
    match h {
        Height::One => -1.0,
        Height::Two => 1.0,
    }
}

impl FlipRateSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FlipRateSpec::Pure => Ok(()),
            FlipRateSpec::Glauber { gamma } if (-0.5..=0.5).contains(&gamma) => Ok(()),
            FlipRateSpec::Glauber { gamma } => Err(Error::InvalidParameter(format!(
                "gamma = {gamma} outside [-1/2, 1/2]"
            ))),
            FlipRateSpec::Biased { kappa } if kappa > -1.0 && kappa < 1.0 => Ok(()),
            FlipRateSpec::Biased { kappa } => Err(Error::InvalidParameter(format!(
                "kappa = {kappa} outside (-1, 1)"
            ))),
        }
    }

    /// `(m, M)` with `m <= c(x, η) <= M` for every configuration.
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            FlipRateSpec::Pure => (1.0, 1.0),
            FlipRateSpec::Glauber { gamma } => (1.0 - 2.0 * gamma.abs(), 1.0 + 2.0 * gamma.abs()),
            FlipRateSpec::Biased { kappa } => (1.0 - kappa.abs(), 1.0 + kappa.abs()),
        }
    }

    pub fn max_rate(&self) -> f64 {
        self.bounds().1
    }

    pub fn rate(&self, cfg: &Configuration, x: usize) -> f64 {
        match *self {
            FlipRateSpec::Pure => 1.0,
            FlipRateSpec::Glauber { gamma } => {
                let topo = cfg.topology();
                let neighbor = |off: isize| topo.shift(x, off).map_or(-1.0, |y| spin(cfg.height(y)));
                1.0 - gamma * spin(cfg.height(x)) * (neighbor(-1) + neighbor(1))
            }
            FlipRateSpec::Biased { kappa } => 1.0 - kappa * spin(cfg.height(x)),
        }
    }
}

/// Rates of the two processes.
///
/// `Sf`: additions at rate `α` per site plus spin flips at rate `c(x, η)`.
/// `Sa`: additions at rate `α` plus anti-additions at rate `β` per site.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelSpec {
    Sf { alpha: f64, flip: FlipRateSpec },
    Sa { alpha: f64, beta: f64 },
}

fn check_rate(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} must be finite and >= 0")))
    }
}

impl ModelSpec {
    pub fn sf_pure(alpha: f64) -> ModelSpec {
        ModelSpec::Sf {
            alpha,
            flip: FlipRateSpec::Pure,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::Sf { alpha, flip } => {
                check_rate("alpha", *alpha)?;
                flip.validate()
            }
            ModelSpec::Sa { alpha, beta } => {
                check_rate("alpha", *alpha)?;
                check_rate("beta", *beta)
            }
        }
    }

    pub fn alpha(&self) -> f64 {
        match *self {
            ModelSpec::Sf { alpha, .. } | ModelSpec::Sa { alpha, .. } => alpha,
        }
    }

    /// Total proposal rate at one site (flip proposals use the bound `M`).
    pub fn site_rate(&self) -> f64 {
        match *self {
            ModelSpec::Sf { alpha, flip } => alpha + flip.max_rate(),
            ModelSpec::Sa { alpha, beta } => alpha + beta,
        }
    }
}
