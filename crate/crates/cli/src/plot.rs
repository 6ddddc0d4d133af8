//! Table index and plotting script for an external plotter.

use std::fs;
use std::path::Path;

use kiu_core::report::Table;

use crate::error::CliError;

/// Bumped whenever a CSV layout or the script format changes.
pub const FORMAT_VERSION: u32 = 1;

fn kind(header: &str) -> &'static str {
    match header {
        "t,Z,sign" => "path",
        "t,Z" => "entrance-path",
        "t,path,Z" => "marginals",
        "level,init_state,passed,no_passage,killed,median,mean" => "overshoot",
        "check,statistic,tolerance,result,detail" => "checks",
        "criterion,title,result,checks,failed" => "summary",
        "start,probability" => "witness",
        "holds,reason,regime,integral,detail" => "condition",
        _ => "other",
    }
}

/// Indexes the CSV files in `dir` (sorted by name) and renders the script.
pub fn build(dir: &Path) -> Result<(Table, String), CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::Run(format!("cannot read {}: {e}", dir.display())))?;
    let mut names: Vec<String> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv") && n != "manifest.csv")
        .collect();
    names.sort();
    let mut manifest = Table::new(&["file", "kind", "rows", "format_version"]);
    for n in &names {
        let text = fs::read_to_string(dir.join(n))?;
        let mut lines = text.lines();
        let header = lines.next().unwrap_or("");
        manifest.push(vec![
            n.clone(),
            kind(header).into(),
            lines.count().to_string(),
            FORMAT_VERSION.to_string(),
        ]);
    }
    Ok((manifest, script(dir)))
}

fn script(dir: &Path) -> String {
    let data = dir.display().to_string().replace('\\', "\\\\").replace('"', "\\\"");
    format!(
        r#"# kiu plot script, format {FORMAT_VERSION}
# Reads manifest.csv next to this file and writes one PNG per plottable table.
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = sys.argv[1] if len(sys.argv) > 1 else "{data}"


def rows(name):
    with open(os.path.join(DATA, name)) as f:
        return list(csv.DictReader(f))


def save(fig, name):
    fig.savefig(os.path.join(HERE, name.replace(".csv", ".png")), dpi=120)
    plt.close(fig)


with open(os.path.join(HERE, "manifest.csv")) as f:
    manifest = list(csv.DictReader(f))

for entry in manifest:
    name, kind = entry["file"], entry["kind"]
    fig, ax = plt.subplots()
    if kind in ("path", "entrance-path"):
        r = rows(name)
        ax.plot([float(x["t"]) for x in r], [float(x["Z"]) for x in r], drawstyle="steps-post")
        ax.set_xlabel("t")
        ax.set_ylabel("Z")
    elif kind == "marginals":
        by_t = {{}}
        for x in rows(name):
            by_t.setdefault(x["t"], []).append(float(x["Z"]))
        for t, zs in sorted(by_t.items()):
            ax.hist(zs, bins=80, histtype="step", density=True, label="t = " + t)
        ax.legend()
    elif kind == "overshoot":
        r = rows(name)
        for state in sorted({{x["init_state"] for x in r}}):
            pts = [x for x in r if x["init_state"] == state and x["median"]]
            ax.plot([float(x["level"]) for x in pts], [float(x["median"]) for x in pts], marker="o", label="state " + state)
        ax.set_xlabel("level")
        ax.set_ylabel("median overshoot")
        ax.legend()
    elif kind == "witness":
        r = rows(name)
        ax.semilogx([float(x["start"]) for x in r], [float(x["probability"]) for x in r], marker="o")
        ax.set_xlabel("start")
        ax.set_ylabel("probability")
    else:
        plt.close(fig)
        continue
    ax.set_title(name)
    save(fig, name)
"#
    )
}
