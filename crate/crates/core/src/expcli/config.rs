//! The flat sectioned `key = value` config format.
//!
//! ```text
//! # density relaxation
//! [model]
//! model = sf
//! alpha = 0.5
//!
//! [topology]
//! n = 100000
//!
//! [run]
//! scenario = E1
//! ```

use std::cell::Cell;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::dynamics::{FlipRateSpec, InitialDistribution, ModelSpec};
use crate::error::{Error, Result};
use crate::lattice::Topology;
use crate::observables::theory::critical_alpha;

use super::{ExperimentSpec, Scenario};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "SANDFLIP_OUTPUT_DIR";
const FALLBACK_OUTPUT_DIR: &str = "sandflip-out";

pub fn default_output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(FALLBACK_OUTPUT_DIR))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Model,
    Topology,
    Initial,
    Run,
}

impl Section {
    fn parse(name: &str) -> Option<Section> {
        match name {
            "model" => Some(Section::Model),
            "topology" => Some(Section::Topology),
            "initial" => Some(Section::Initial),
            "run" => Some(Section::Run),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Section::Model => "model",
            Section::Topology => "topology",
            Section::Initial => "initial",
            Section::Run => "run",
        }
    }
}

struct Entry {
    value: String,
    line: usize,
    used: Cell<bool>,
}

/// Raw entries, with a record of which ones the interpreter consumed.
struct Document {
    entries: BTreeMap<(Section, String), Entry>,
    headers: BTreeMap<Section, usize>,
}

fn config_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config {
        line,
        msg: msg.into(),
    }
}

impl Document {
    fn parse(text: &str) -> Result<Document> {
        let mut entries = BTreeMap::new();
        let mut headers = BTreeMap::new();
        let mut current = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| config_err(line, "unterminated section header"))?
                    .trim();
                let section =
                    Section::parse(name).ok_or_else(|| config_err(line, format!("unknown section [{name}]")))?;
                if headers.insert(section, line).is_some() {
                    return Err(config_err(line, format!("section [{name}] appears twice")));
                }
                current = Some(section);
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| config_err(line, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(config_err(line, "empty key"));
            }
            let section = current.ok_or_else(|| config_err(line, format!("key `{key}` before any section")))?;
            let entry = Entry {
                value: value.to_string(),
                line,
                used: Cell::new(false),
            };
            if entries.insert((section, key.to_string()), entry).is_some() {
                return Err(config_err(line, format!("duplicate key `{key}` in [{}]", section.name())));
            }
        }
        Ok(Document { entries, headers })
    }

    fn take(&self, section: Section, key: &str) -> Option<(&str, usize)> {
        self.entries.get(&(section, key.to_string())).map(|e| {
            e.used.set(true);
            (e.value.as_str(), e.line)
        })
    }

    fn line_of(&self, section: Section, key: &str) -> Option<usize> {
        self.entries.get(&(section, key.to_string())).map(|e| e.line)
    }

    fn missing(&self, section: Section, key: &str, why: &str) -> Error {
        let msg = format!("missing key `{key}` in [{}]{why}", section.name());
        match self.headers.get(&section) {
            Some(&line) => config_err(line, msg),
            None => Error::ConfigMissing(msg),
        }
    }

    fn required(&self, section: Section, key: &str, why: &str) -> Result<(&str, usize)> {
        self.take(section, key).ok_or_else(|| self.missing(section, key, why))
    }

    fn parsed<T: FromStr>(&self, section: Section, key: &str) -> Result<Option<(T, usize)>> {
        match self.take(section, key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<T>()
                .map(|x| Some((x, line)))
                .map_err(|_| config_err(line, format!("cannot parse `{v}` as a value of `{key}`"))),
        }
    }

    fn number(&self, section: Section, key: &str) -> Result<Option<(f64, usize)>> {
        match self.parsed::<f64>(section, key)? {
            Some((x, line)) if !x.is_finite() => Err(config_err(line, format!("`{key}` must be finite"))),
            other => Ok(other),
        }
    }

    fn list<T: FromStr>(&self, section: Section, key: &str) -> Result<Option<(Vec<T>, usize)>> {
        let Some((v, line)) = self.take(section, key) else {
            return Ok(None);
        };
        if v.is_empty() {
            return Ok(Some((Vec::new(), line)));
        }
        v.split(',')
            .map(|item| {
                let item = item.trim();
                item.parse::<T>()
                    .map_err(|_| config_err(line, format!("cannot parse `{item}` in `{key}`")))
            })
            .collect::<Result<Vec<T>>>()
            .map(|xs| Some((xs, line)))
    }

    /// Errors on the first entry nothing consumed.
    fn finish(&self, context: &str) -> Result<()> {
        let unused = self
            .entries
            .iter()
            .filter(|(_, e)| !e.used.get())
            .min_by_key(|(_, e)| e.line);
        match unused {
            None => Ok(()),
            Some(((section, key), e)) => Err(config_err(
                e.line,
                format!("unknown key `{key}` in [{}] for {context}", section.name()),
            )),
        }
    }
}

fn nonnegative(x: f64, line: usize, key: &str) -> Result<f64> {
    if x < 0.0 {
        Err(config_err(line, format!("`{key}` = {x} must be >= 0")))
    } else {
        Ok(x)
    }
}

fn parse_model(doc: &Document) -> Result<ModelSpec> {
    let (kind, kind_line) = doc.required(Section::Model, "model", " (sf or sa)")?;
    let (alpha, alpha_line) = doc
        .number(Section::Model, "alpha")?
        .ok_or_else(|| doc.missing(Section::Model, "alpha", ""))?;
    let alpha = nonnegative(alpha, alpha_line, "alpha")?;
    match kind {
        "sf" => {
            let flip = match doc.take(Section::Model, "flip").unwrap_or(("pure", kind_line)) {
                ("pure", _) => FlipRateSpec::Pure,
                ("glauber", _) => {
                    let (gamma, line) = doc
                        .number(Section::Model, "gamma")?
                        .ok_or_else(|| doc.missing(Section::Model, "gamma", " for flip = glauber"))?;
                    let flip = FlipRateSpec::Glauber { gamma };
                    flip.validate().map_err(|e| config_err(line, e.to_string()))?;
                    flip
                }
                ("biased", _) => {
                    let (kappa, line) = doc
                        .number(Section::Model, "kappa")?
                        .ok_or_else(|| doc.missing(Section::Model, "kappa", " for flip = biased"))?;
                    let flip = FlipRateSpec::Biased { kappa };
                    flip.validate().map_err(|e| config_err(line, e.to_string()))?;
                    flip
                }
                (other, line) => {
                    return Err(config_err(line, format!("unknown flip family `{other}` (pure, glauber or biased)")))
                }
            };
            Ok(ModelSpec::Sf { alpha, flip })
        }
        "sa" => {
            let (beta, line) = doc
                .number(Section::Model, "beta")?
                .ok_or_else(|| doc.missing(Section::Model, "beta", " for model = sa"))?;
            let beta = nonnegative(beta, line, "beta")?;
            Ok(ModelSpec::Sa { alpha, beta })
        }
        other => Err(config_err(kind_line, format!("unknown model `{other}` (sf or sa)"))),
    }
}

fn parse_topology(doc: &Document) -> Result<Topology> {
    let (n, n_line) = doc
        .parsed::<usize>(Section::Topology, "n")?
        .ok_or_else(|| doc.missing(Section::Topology, "n", ""))?;
    let kind = doc.take(Section::Topology, "kind");
    let topology = match kind.map(|(k, _)| k).unwrap_or("ring") {
        "ring" => Topology::ring(n),
        "interval" => Topology::interval(n),
        other => {
            return Err(config_err(
                kind.map_or(n_line, |(_, l)| l),
                format!("unknown topology `{other}` (ring or interval)"),
            ))
        }
    };
    topology.map_err(|e| config_err(n_line, e.to_string()))
}

fn parse_initial(doc: &Document, topology: Topology, default_kind: &str) -> Result<InitialDistribution> {
    let kind = doc.take(Section::Initial, "kind");
    match kind.map(|(k, _)| k).unwrap_or(default_kind) {
        "product" => {
            let rho = match doc.number(Section::Initial, "rho")? {
                None => 0.5,
                Some((rho, line)) if !(0.0..=1.0).contains(&rho) => {
                    return Err(config_err(line, format!("rho = {rho} outside [0, 1]")))
                }
                Some((rho, _)) => rho,
            };
            Ok(InitialDistribution::Product { rho })
        }
        "all_ones" => Ok(InitialDistribution::AllOnes),
        "all_twos" => Ok(InitialDistribution::AllTwos),
        "single_one" => {
            let y = match doc.parsed::<usize>(Section::Initial, "y")? {
                None => topology.len() / 2,
                Some((y, line)) if y >= topology.len() => {
                    return Err(config_err(line, format!("y = {y} outside a lattice of {} sites", topology.len())))
                }
                Some((y, _)) => y,
            };
            Ok(InitialDistribution::SingleOne { y })
        }
        other => Err(config_err(
            kind.map_or(0, |(_, l)| l),
            format!("unknown initial kind `{other}` (product, all_ones, all_twos or single_one)"),
        )),
    }
}

fn default_sample_times(id: &str) -> Option<Vec<f64>> {
    let steps = |from: f64, to: f64, by: f64| {
        let k = ((to - from) / by).round() as usize;
        (0..=k).map(|i| from + by * i as f64).collect::<Vec<_>>()
    };
    match id {
        "E1" => Some(vec![0.25, 0.5, 1.0, 2.0]),
        "E2" => Some(vec![0.5, 1.0, 2.0, 5.0]),
        "E3" | "E4" => Some(steps(10.0, 30.0, 2.0)),
        "E5" => Some(vec![0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 1.9, 3.0, 4.0]),
        "E6" => Some(steps(0.0, 10.0, 1.0)),
        "E7" => Some(Vec::new()),
        _ => None,
    }
}

const DEFAULT_BLOCK_SIZES: [usize; 2] = [2, 3];
const DEFAULT_BLOCK_SAMPLES: usize = 200_000;

fn block_params(doc: &Document) -> Result<(Vec<usize>, usize)> {
    let sizes = match doc.list::<usize>(Section::Run, "block_sizes")? {
        None => DEFAULT_BLOCK_SIZES.to_vec(),
        Some((s, line)) if s.is_empty() || s.iter().any(|&n| n < 2) => {
            return Err(config_err(line, "block_sizes must be a non-empty list of lengths >= 2"))
        }
        Some((s, _)) => s,
    };
    let samples = match doc.parsed::<usize>(Section::Run, "block_samples")? {
        None => DEFAULT_BLOCK_SAMPLES,
        Some((s, line)) if s < crate::observables::MIN_GROUPS => {
            return Err(config_err(line, format!("block_samples must be >= {}", crate::observables::MIN_GROUPS)))
        }
        Some((s, _)) => s,
    };
    Ok((sizes, samples))
}

fn average_from(doc: &Document) -> Result<f64> {
    match doc.number(Section::Run, "average_from")? {
        None => Ok(10.0),
        Some((x, line)) => nonnegative(x, line, "average_from"),
    }
}

fn parse_scenario(doc: &Document, id: &str, id_line: usize, topology: Topology) -> Result<Scenario> {
    Ok(match id {
        "E1" => Scenario::E1,
        "E2" => {
            let epsilon = match doc.number(Section::Run, "epsilon")? {
                None => 1e-3,
                Some((e, line)) if !(e > 0.0 && e < 1.0) => {
                    return Err(config_err(line, format!("epsilon = {e} outside (0, 1)")))
                }
                Some((e, _)) => e,
            };
            let t_max = match doc.number(Section::Run, "t_max")? {
                None => 10.0,
                Some((t, line)) if t <= 0.0 => return Err(config_err(line, "t_max must be > 0")),
                Some((t, _)) => t,
            };
            Scenario::E2 { epsilon, t_max }
        }
        "E3" => {
            let average_from = average_from(doc)?;
            let (block_sizes, block_samples) = block_params(doc)?;
            Scenario::E3 {
                average_from,
                block_sizes,
                block_samples,
            }
        }
        "E4" => {
            let (alpha_grid, line) = doc
                .list::<f64>(Section::Run, "alpha_grid")?
                .ok_or_else(|| doc.missing(Section::Run, "alpha_grid", " for scenario E4"))?;
            if alpha_grid.is_empty() || alpha_grid.iter().any(|a| !a.is_finite() || *a < 0.0) {
                return Err(config_err(line, "alpha_grid must list finite rates >= 0"));
            }
            Scenario::E4 {
                alpha_grid,
                average_from: average_from(doc)?,
            }
        }
        "E5" => Scenario::E5,
        "E6" => {
            let (block_sizes, block_samples) = block_params(doc)?;
            Scenario::E6 {
                block_sizes,
                block_samples,
            }
        }
        "E7" => {
            let window = match doc.parsed::<usize>(Section::Run, "window")? {
                None => 5,
                Some((0, line)) => return Err(config_err(line, "window must be >= 1")),
                Some((w, _)) => w,
            };
            let n = topology.len();
            let (sizes, line) = doc
                .list::<usize>(Section::Run, "sizes")?
                .unwrap_or_else(|| (vec![n / 100, n / 10, n], id_line));
            if sizes.len() < 2 || sizes.windows(2).any(|w| w[0] >= w[1]) {
                return Err(config_err(line, "sizes must list at least two increasing lattice sizes"));
            }
            if let Some(&small) = sizes.iter().find(|&&s| s < 2 * window + 3) {
                return Err(config_err(line, format!("size {small} cannot hold a window of {window} sites")));
            }
            Scenario::E7 { sizes, window }
        }
        "custom" => Scenario::Custom,
        other => {
            return Err(config_err(
                id_line,
                format!("unknown scenario `{other}` (E1 to E7 or custom)"),
            ))
        }
    })
}

/// Cross-section constraints of each scenario.
fn check_scenario(doc: &Document, spec: &ExperimentSpec, scenario_line: usize) -> Result<()> {
    let model_line = doc.line_of(Section::Model, "model").unwrap_or(scenario_line);
    let alpha_line = doc.line_of(Section::Model, "alpha").unwrap_or(model_line);
    let fail = |line: usize, msg: String| Err(config_err(line, format!("{}: {msg}", spec.scenario.name())));
    let needs_ring = || -> Result<()> {
        if spec.topology.is_ring() {
            Ok(())
        } else {
            fail(
                doc.line_of(Section::Topology, "kind").unwrap_or(scenario_line),
                "needs a ring topology".into(),
            )
        }
    };
    match (&spec.scenario, spec.model) {
        (Scenario::E1, ModelSpec::Sf { .. }) | (Scenario::Custom, _) => Ok(()),
        (Scenario::E2 { .. }, ModelSpec::Sf { alpha, flip }) => {
            if flip != FlipRateSpec::Pure {
                fail(doc.line_of(Section::Model, "flip").unwrap_or(model_line), "needs pure flips".into())
            } else if alpha < 1.0 {
                fail(alpha_line, format!("freezing needs alpha >= 1, got {alpha}"))
            } else {
                Ok(())
            }
        }
        (Scenario::E3 { block_sizes, .. }, ModelSpec::Sf { alpha, flip }) => {
            let ac = critical_alpha(&flip);
            if alpha >= ac {
                return fail(alpha_line, format!("needs alpha below the critical value {ac}, got {alpha}"));
            }
            needs_ring()?;
            check_block_room(doc, spec, block_sizes, scenario_line)
        }
        (Scenario::E4 { alpha_grid, .. }, ModelSpec::Sf { flip, .. }) => {
            if flip == FlipRateSpec::Pure {
                return fail(
                    doc.line_of(Section::Model, "flip").unwrap_or(model_line),
                    "needs glauber or biased flips".into(),
                );
            }
            let ac = critical_alpha(&flip);
            if !(alpha_grid.iter().any(|&a| a < ac) && alpha_grid.iter().any(|&a| a > ac)) {
                return fail(
                    doc.line_of(Section::Run, "alpha_grid").unwrap_or(scenario_line),
                    format!("alpha_grid must bracket the critical value {ac}"),
                );
            }
            Ok(())
        }
        (Scenario::E5, ModelSpec::Sa { alpha, beta }) if alpha != beta => Ok(()),
        (Scenario::E5, ModelSpec::Sa { .. }) => fail(alpha_line, "drift needs alpha != beta".into()),
        (Scenario::E6 { block_sizes, .. }, ModelSpec::Sa { alpha, beta }) => {
            if alpha != beta {
                return fail(alpha_line, format!("conservation needs alpha = beta, got {alpha} and {beta}"));
            }
            needs_ring()?;
            check_block_room(doc, spec, block_sizes, scenario_line)
        }
        (Scenario::E7 { .. }, ModelSpec::Sf { alpha, flip }) => {
            if flip != FlipRateSpec::Pure {
                fail(doc.line_of(Section::Model, "flip").unwrap_or(model_line), "needs pure flips".into())
            } else if alpha <= 0.0 {
                fail(alpha_line, "needs alpha > 0".into())
            } else if !matches!(spec.initial, InitialDistribution::SingleOne { .. }) {
                fail(
                    doc.line_of(Section::Initial, "kind").unwrap_or(scenario_line),
                    "starts from a single height-1 site".into(),
                )
            } else {
                Ok(())
            }
        }
        (scenario, _) => {
            let wanted = if matches!(scenario, Scenario::E5 | Scenario::E6 { .. }) { "sa" } else { "sf" };
            fail(model_line, format!("needs model = {wanted}"))
        }
    }
}

fn check_block_room(doc: &Document, spec: &ExperimentSpec, sizes: &[usize], scenario_line: usize) -> Result<()> {
    let n = spec.topology.len();
    match sizes.iter().find(|&&b| n < b + 4) {
        Some(b) => Err(config_err(
            doc.line_of(Section::Run, "block_sizes")
                .or(doc.line_of(Section::Topology, "n"))
                .unwrap_or(scenario_line),
            format!("a ring of {n} sites is too small for blocks of {b}"),
        )),
        None => Ok(()),
    }
}

/// Parses a config, taking the output directory from the environment when
/// the file does not name one.
pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    parse_config_with_default(text, &default_output_dir())
}

pub fn parse_config_with_default(text: &str, default_dir: &Path) -> Result<ExperimentSpec> {
    let doc = Document::parse(text)?;
    let model = parse_model(&doc)?;
    let topology = parse_topology(&doc)?;

    let (id_raw, id_line) = doc.required(Section::Run, "scenario", "")?;
    let id = if id_raw.eq_ignore_ascii_case("custom") {
        "custom".to_string()
    } else {
        id_raw.to_ascii_uppercase()
    };
    let initial = parse_initial(&doc, topology, if id == "E7" { "single_one" } else { "product" })?;
    let scenario = parse_scenario(&doc, &id, id_line, topology)?;

    let replicas = match doc.parsed::<usize>(Section::Run, "replicas")? {
        None => 1,
        Some((0, line)) => return Err(config_err(line, "replicas must be >= 1")),
        Some((r, _)) => r,
    };
    let seed = doc.parsed::<u64>(Section::Run, "seed")?.map_or(0, |(s, _)| s);
    let sample_times = match doc.list::<f64>(Section::Run, "sample_times")? {
        Some((ts, line)) => {
            if ts.iter().any(|t| !t.is_finite() || *t < 0.0) {
                return Err(config_err(line, "sample times must be finite and >= 0"));
            }
            if ts.windows(2).any(|w| w[0] >= w[1]) {
                return Err(config_err(line, "sample times must be strictly increasing"));
            }
            ts
        }
        None => default_sample_times(&id).ok_or_else(|| doc.missing(Section::Run, "sample_times", " for scenario custom"))?,
    };
    if sample_times.is_empty() && !matches!(scenario, Scenario::E7 { .. }) {
        return Err(config_err(
            doc.line_of(Section::Run, "sample_times").unwrap_or(id_line),
            "at least one sample time is needed",
        ));
    }
    let output_dir = doc
        .take(Section::Run, "output_dir")
        .map_or_else(|| default_dir.to_path_buf(), |(p, _)| PathBuf::from(p));
    let tolerance = match doc.number(Section::Run, "tolerance")? {
        Some((tol, line)) if tol <= 0.0 => return Err(config_err(line, "tolerance must be > 0")),
        other => other.map(|(t, _)| t),
    };
    let max_events = match doc.parsed::<u64>(Section::Run, "max_events")? {
        Some((0, line)) => return Err(config_err(line, "max_events must be >= 1")),
        other => other.map(|(m, _)| m),
    };

    let spec = ExperimentSpec {
        scenario,
        model,
        topology,
        initial,
        replicas,
        sample_times,
        seed,
        output_dir,
        tolerance,
        max_events,
    };
    check_scenario(&doc, &spec, id_line)?;
    let model_name = match model {
        ModelSpec::Sf { .. } => "sf",
        ModelSpec::Sa { .. } => "sa",
    };
    doc.finish(&format!("model = {model_name}, scenario = {}", spec.scenario.name()))?;
    Ok(spec)
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Writes every field explicitly, so that `parse_config(emit_config(s))`
/// returns `s`.
pub fn emit_config(spec: &ExperimentSpec) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "[model]");
    match spec.model {
        ModelSpec::Sf { alpha, flip } => {
            let _ = writeln!(w, "model = sf\nalpha = {alpha}");
            match flip {
                FlipRateSpec::Pure => {
                    let _ = writeln!(w, "flip = pure");
                }
                FlipRateSpec::Glauber { gamma } => {
                    let _ = writeln!(w, "flip = glauber\ngamma = {gamma}");
                }
                FlipRateSpec::Biased { kappa } => {
                    let _ = writeln!(w, "flip = biased\nkappa = {kappa}");
                }
            }
        }
        ModelSpec::Sa { alpha, beta } => {
            let _ = writeln!(w, "model = sa\nalpha = {alpha}\nbeta = {beta}");
        }
    }
    let (kind, n) = match spec.topology {
        Topology::Ring { n } => ("ring", n),
        Topology::Interval { n } => ("interval", n),
    };
    let _ = writeln!(w, "\n[topology]\nkind = {kind}\nn = {n}");
    let _ = writeln!(w, "\n[initial]");
    match spec.initial {
        InitialDistribution::Product { rho } => {
            let _ = writeln!(w, "kind = product\nrho = {rho}");
        }
        InitialDistribution::AllOnes => {
            let _ = writeln!(w, "kind = all_ones");
        }
        InitialDistribution::AllTwos => {
            let _ = writeln!(w, "kind = all_twos");
        }
        InitialDistribution::SingleOne { y } => {
            let _ = writeln!(w, "kind = single_one\ny = {y}");
        }
    }
    let _ = writeln!(w, "\n[run]\nscenario = {}", spec.scenario.name());
    let _ = writeln!(w, "replicas = {}\nseed = {}", spec.replicas, spec.seed);
    let _ = writeln!(w, "sample_times = {}", join(&spec.sample_times));
    let _ = writeln!(w, "output_dir = {}", spec.output_dir.display());
    if let Some(tol) = spec.tolerance {
        let _ = writeln!(w, "tolerance = {tol}");
    }
    if let Some(m) = spec.max_events {
        let _ = writeln!(w, "max_events = {m}");
    }
    match &spec.scenario {
        Scenario::E1 | Scenario::E5 | Scenario::Custom => {}
        Scenario::E2 { epsilon, t_max } => {
            let _ = writeln!(w, "epsilon = {epsilon}\nt_max = {t_max}");
        }
        Scenario::E3 {
            average_from,
            block_sizes,
            block_samples,
        } => {
            let _ = writeln!(w, "average_from = {average_from}");
            let _ = writeln!(w, "block_sizes = {}\nblock_samples = {block_samples}", join(block_sizes));
        }
        Scenario::E4 {
            alpha_grid,
            average_from,
        } => {
            let _ = writeln!(w, "alpha_grid = {}\naverage_from = {average_from}", join(alpha_grid));
        }
        Scenario::E6 {
            block_sizes,
            block_samples,
        } => {
            let _ = writeln!(w, "block_sizes = {}\nblock_samples = {block_samples}", join(block_sizes));
        }
        Scenario::E7 { sizes, window } => {
            let _ = writeln!(w, "sizes = {}\nwindow = {window}", join(sizes));
        }
    }
    out
}
