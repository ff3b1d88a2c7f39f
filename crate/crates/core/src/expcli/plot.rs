//! Matplotlib script for the measured-vs-theory curves of a run.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::output::RunManifest;

/// Script for a manifest on disk. Errors if the manifest lists no data file
/// or a listed data file is missing next to it.
pub fn emit_plot_script(manifest_path: &Path) -> Result<String> {
    let manifest = RunManifest::read(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    for f in manifest.files.iter().filter(|f| f.path.ends_with(".csv")) {
        let path = dir.join(&f.path);
        if !path.is_file() {
            return Err(Error::io(
                path,
                std::io::Error::new(std::io::ErrorKind::NotFound, "data file listed in the manifest is missing"),
            ));
        }
    }
    plot_script_for(&manifest)
}

/// The script reads the data files relative to its own location, so it
/// must be saved next to the manifest.
pub fn plot_script_for(manifest: &RunManifest) -> Result<String> {
    let data: Vec<&str> = manifest
        .files
        .iter()
        .map(|f| f.path.as_str())
        .filter(|p| p.ends_with(".csv"))
        .collect();
    if data.is_empty() {
        return Err(Error::InvalidParameter("manifest lists no data files".into()));
    }
    if let Some(bad) = data.iter().find(|p| Path::new(p).is_absolute() || p.contains("..")) {
        return Err(Error::InvalidParameter(format!("data path {bad} is not relative to the manifest")));
    }
    let list = data.iter().map(|p| format!("{p:?}")).collect::<Vec<_>>().join(", ");
    let mut s = String::new();
    let _ = writeln!(s, "# Measured (points) and predicted (lines) curves for scenario {}.", manifest.scenario);
    let _ = writeln!(s, "# Rows aggregated over replicas are plotted; rows without a time are skipped.");
    s.push_str(
        r#"import csv
import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
"#,
    );
    let _ = writeln!(s, "DATA = [{list}]");
    let _ = writeln!(s, "OUT = {:?}", format!("{}_plot.png", manifest.scenario.to_lowercase()));
    s.push_str(
        r#"

def load(name):
    curves = defaultdict(lambda: ([], [], []))
    with open(os.path.join(HERE, name), newline="") as f:
        for row in csv.DictReader(f):
            if row["replica"].isdigit() or not row["t"]:
                continue
            t, value, theory = curves[row["observable"]]
            t.append(float(row["t"]))
            value.append(float(row["value"]))
            theory.append(float(row["theory"]) if row["theory"] else float("nan"))
    return curves


fig, ax = plt.subplots(figsize=(7, 4.5))
for name in DATA:
    for i, (observable, (t, value, theory)) in enumerate(sorted(load(name).items())):
        color = "C%d" % (i % 10)
        ax.plot(t, value, "o", color=color, label=observable + " measured")
        ax.plot(t, theory, "-", color=color, label=observable + " theory")
ax.set_xlabel("t")
ax.set_ylabel("value")
ax.legend(fontsize="small")
fig.tight_layout()
fig.savefig(os.path.join(HERE, OUT), dpi=150)
print("wrote", OUT)
"#,
    );
    Ok(s)
}
