use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::experiment::RunRecord;
use super::stats::SummaryRow;
use super::svg::{map_svg, trajectory_svg};

pub const SUMMARY_HEADER: &str = "scenario,strategy,mean_objects,sd_objects,mean_states,sd_states,mean_time_s,sd_time_s";

pub fn run_stem(r: &RunRecord) -> String {
    format!("{}_{}_v{}_r{}", r.scenario, r.strategy, r.variant, r.repetition)
}

fn write(path: PathBuf, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.3},{:.3},{:.3},{:.3},{:.6},{:.6}\n",
            r.scenario, r.strategy, r.mean_objects, r.sd_objects, r.mean_states, r.sd_states, r.mean_time_s, r.sd_time_s
        ));
    }
    out
}

pub fn runs_json(records: &[RunRecord]) -> Result<String> {
    serde_json::to_string_pretty(records).map_err(|e| Error::json("runs.json", e))
}

/// SVGs for each run, written into `dir`.
pub fn write_svgs(records: &[RunRecord], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    for r in records {
        let stem = run_stem(r);
        write(dir.join(format!("{stem}_trajectory.svg")), &trajectory_svg(r), &mut written)?;
        let map_doc = match (&r.map, &r.plan) {
            (Some(map), plan) => map_svg(map, &plan.as_ref().map_or(vec![false; map.len()], |p| p.psi(map.len()))),
            (None, _) => map_svg(&Default::default(), &[]),
        };
        write(dir.join(format!("{stem}_map.svg")), &map_doc, &mut written)?;
    }
    Ok(written)
}

/// runs.json, summary.csv and two SVGs per run.
pub fn export_outputs(records: &[RunRecord], stats: &[SummaryRow], out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    write(out_dir.join("runs.json"), &runs_json(records)?, &mut written)?;
    write(out_dir.join("summary.csv"), &summary_csv(stats), &mut written)?;
    written.extend(write_svgs(records, out_dir)?);
    Ok(written)
}

pub fn load_runs(path: &Path) -> Result<Vec<RunRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::json(path, e))
}
