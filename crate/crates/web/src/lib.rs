//! Browser bindings for the demo page in `www/`.
//!
//! Three operations: a space-time diagram of a running process, a density
//! curve against its prediction, and a playground applying single operators
//! to a hand-edited configuration.

use sandflip_core::dynamics::{replica_rng, run_until, sample_initial, FlipRateSpec, InitialDistribution, ModelSpec, SimState};
use sandflip_core::lattice::{Configuration, Topology};
use sandflip_core::observables::theory::TheoryContext;
use wasm_bindgen::prelude::*;

fn js_err(e: sandflip_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `model` is `"sf"` (pure flips), `"glauber"` (with `param` = γ), `"biased"`
/// (with `param` = κ) or `"sa"` (with `param` = β).
fn model_from(model: &str, alpha: f64, param: f64) -> Result<ModelSpec, JsError> {
    let spec = match model {
        "sf" => ModelSpec::sf_pure(alpha),
        "glauber" => ModelSpec::Sf { alpha, flip: FlipRateSpec::Glauber { gamma: param } },
        "biased" => ModelSpec::Sf { alpha, flip: FlipRateSpec::Biased { kappa: param } },
        "sa" => ModelSpec::Sa { alpha, beta: param },
        other => return Err(JsError::new(&format!("unknown model {other}"))),
    };
    spec.validate().map_err(js_err)?;
    Ok(spec)
}

/// A ring evolving in time, sampled row by row for a space-time picture.
#[wasm_bindgen]
pub struct SpaceTime {
    state: SimState,
    spec: ModelSpec,
}

#[wasm_bindgen]
impl SpaceTime {
    #[wasm_bindgen(constructor)]
    pub fn new(n: usize, model: &str, alpha: f64, param: f64, rho0: f64, seed: u64) -> Result<SpaceTime, JsError> {
        let spec = model_from(model, alpha, param)?;
        let topology = Topology::ring(n).map_err(js_err)?;
        let mut rng = replica_rng(seed, 0);
        let cfg = sample_initial(&InitialDistribution::Product { rho: rho0 }, topology, &mut rng).map_err(js_err)?;
        Ok(SpaceTime {
            state: SimState::new(cfg, rng),
            spec,
        })
    }

    /// Advances `rows` times by `dt`; returns the heights (1 or 2) after each
    /// advance, row after row.
    pub fn advance(&mut self, rows: usize, dt: f64) -> Vec<u8> {
        let mut out = Vec::with_capacity(rows * self.state.cfg.len());
        for _ in 0..rows {
            let t = self.state.t + dt;
            run_until(&mut self.state, &self.spec, t, &[], |_| ());
            out.extend(self.state.cfg.heights().iter().map(|h| h.value()));
        }
        out
    }

    pub fn time(&self) -> f64 {
        self.state.t
    }

    pub fn density(&self) -> f64 {
        self.state.cfg.density_of_ones()
    }
}

/// Measured density of height-1 sites and its prediction at `points` evenly
/// spaced times in `[0, t_end]`, flattened as `[t, measured, predicted, ...]`.
#[wasm_bindgen]
pub fn density_curve(
    n: usize,
    model: &str,
    alpha: f64,
    param: f64,
    rho0: f64,
    t_end: f64,
    points: usize,
    seed: u64,
) -> Result<Vec<f64>, JsError> {
    let spec = model_from(model, alpha, param)?;
    let topology = Topology::ring(n).map_err(js_err)?;
    if points < 2 || !(t_end > 0.0) {
        return Err(JsError::new("need at least two points and t_end > 0"));
    }
    let mut rng = replica_rng(seed, 0);
    let cfg = sample_initial(&InitialDistribution::Product { rho: rho0 }, topology, &mut rng).map_err(js_err)?;
    let mut state = SimState::new(cfg, rng);
    let times: Vec<f64> = (0..points).map(|i| t_end * i as f64 / (points - 1) as f64).collect();
    let samples = run_until(&mut state, &spec, t_end, &times, |c| c.density_of_ones());
    let theory = TheoryContext::new(spec);
    Ok(samples
        .into_iter()
        .flat_map(|(t, d)| [t, d, theory.density_at(t, rho0)])
        .collect())
}

/// Applies `op` (`"add"`, `"anti_add"` or `"flip"`) at site `x` of the
/// configuration `heights` (values 1 or 2) and returns the new heights.
#[wasm_bindgen]
pub fn apply_operator(heights: &[u8], ring: bool, op: &str, x: usize) -> Result<Vec<u8>, JsError> {
    let topology = if ring { Topology::ring(heights.len()) } else { Topology::interval(heights.len()) }.map_err(js_err)?;
    let cfg = Configuration::from_values(topology, heights).map_err(js_err)?;
    let next = match op {
        "add" => cfg.add(x),
        "anti_add" => cfg.anti_add(x),
        "flip" => cfg.flip(x),
        other => return Err(JsError::new(&format!("unknown operator {other}"))),
    }
    .map_err(js_err)?;
    Ok(next.values())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operators_follow_the_core() {
        assert_eq!(apply_operator(&[1, 2, 2, 1, 2], false, "add", 2).unwrap(), vec![2, 1, 2, 2, 2]);
        assert_eq!(apply_operator(&[1, 2, 1], true, "flip", 1).unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn space_time_rows() {
        let mut st = SpaceTime::new(50, "sf", 0.5, 0.0, 0.5, 3).unwrap();
        let rows = st.advance(4, 0.1);
        assert_eq!(rows.len(), 200);
        assert!(rows.iter().all(|&h| h == 1 || h == 2));
        assert!((st.time() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn density_curve_layout() {
        let c = density_curve(2000, "sa", 0.3, 0.7, 0.2, 1.0, 5, 1).unwrap();
        assert_eq!(c.len(), 15);
        assert_eq!(c[0], 0.0);
        assert!((c[14 - 2] - 1.0).abs() < 1e-12);
        assert!((c[14] - 0.6).abs() < 1e-12);
    }
}
