use std::fmt::Write as _;
use std::path::Path;

use super::bayes::ValidationTrajectory;
use crate::error::{Error, Result};

/// One line per step: `step mean lower upper`, plus `median` when bands
/// are present. Unbanded trajectories repeat the posterior in the band
/// columns.
pub fn format_trajectory(traj: &ValidationTrajectory, header: &[(String, String)]) -> String {
    let mut out = String::from("# loopsampler trajectory\n");
    for (k, v) in header {
        let _ = writeln!(out, "# {k}={v}");
    }
    if let Some(b) = &traj.bands {
        let _ = writeln!(out, "# level={} sets={}", b.level, b.sets);
    }
    match &traj.bands {
        Some(b) => {
            let _ = writeln!(out, "# step mean lower upper median");
            for (k, mean) in traj.posterior_a.iter().enumerate() {
                let (lo, hi, med) = (b.lower[k], b.upper[k], b.median[k]);
                let _ = writeln!(out, "{k} {mean:.17e} {lo:.17e} {hi:.17e} {med:.17e}");
            }
        }
        None => {
            let _ = writeln!(out, "# step mean lower upper");
            for (k, mean) in traj.posterior_a.iter().enumerate() {
                let _ = writeln!(out, "{k} {mean:.17e} {mean:.17e} {mean:.17e}");
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryRow {
    pub step: usize,
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
    pub median: Option<f64>,
}

pub fn parse_trajectory(text: &str) -> Result<Vec<TrajectoryRow>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            let t: Vec<&str> = l.split_whitespace().collect();
            let bad = || Error::parse(i + 1, "expected `step mean lower upper [median]`");
            if !(4..=5).contains(&t.len()) {
                return Err(bad());
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
            Ok(TrajectoryRow {
                step: t[0].parse().map_err(|_| bad())?,
                mean: num(t[1])?,
                lower: num(t[2])?,
                upper: num(t[3])?,
                median: t.get(4).map(|s| num(s)).transpose()?,
            })
        })
        .collect()
}

pub fn write_trajectory(
    path: impl AsRef<Path>,
    traj: &ValidationTrajectory,
    header: &[(String, String)],
) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_trajectory(traj, header)).map_err(|e| Error::io(path, e))
}
