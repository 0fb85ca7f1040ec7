use std::fmt::Write as _;
use std::path::Path;

use super::data::{TomographyData, VisibilityRecord};
use super::reconstruct::ReconstructionResult;
use crate::error::{Error, Result};
use crate::linalg::{format_matrix, parse_matrix};

/// Moduli in the matrix text format with a `# noise=` comment.
pub fn format_moduli(data: &TomographyData) -> String {
    format_matrix(&data.moduli_matrix(), &[format!("noise={:.17e}", data.noise_level())])
}

/// One `i,j,k,l,V` line per record.
pub fn format_visibilities(data: &TomographyData) -> String {
    let mut out = String::from("# i,j,k,l,V\n");
    for r in data.visibilities() {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.17e}",
            r.inputs.0, r.inputs.1, r.outputs.0, r.outputs.1, r.value
        );
    }
    out
}

pub fn parse_visibilities(text: &str) -> Result<Vec<VisibilityRecord>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| Error::parse(n + 1, msg);
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 5 {
            return Err(bad("expected `i,j,k,l,V`"));
        }
        let idx = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| bad("mode index must be a non-negative integer"))
        };
        let value = f[4].parse::<f64>().map_err(|_| bad("visibility must be a number"))?;
        out.push(
            VisibilityRecord::new((idx(f[0])?, idx(f[1])?), (idx(f[2])?, idx(f[3])?), value)
                .map_err(|e| bad(&e.to_string()))?,
        );
    }
    Ok(out)
}

pub fn parse_tomography_data(moduli: &str, visibilities: &str) -> Result<TomographyData> {
    let m = parse_matrix(moduli)?;
    if !m.is_square() {
        return Err(Error::Dimension(format!("moduli matrix is {}x{}", m.rows(), m.cols())));
    }
    if m.as_slice().iter().any(|z| z.im != 0.0) {
        return Err(Error::Argument("moduli must be real".into()));
    }
    let noise = moduli
        .lines()
        .filter_map(|l| l.trim().strip_prefix('#'))
        .filter_map(|l| l.trim().strip_prefix("noise="))
        .find_map(|v| v.trim().parse().ok())
        .unwrap_or(0.0);
    TomographyData::new(
        m.rows(),
        m.as_slice().iter().map(|z| z.re).collect(),
        parse_visibilities(visibilities)?,
        noise,
    )
}

pub fn read_tomography_data(moduli: impl AsRef<Path>, visibilities: impl AsRef<Path>) -> Result<TomographyData> {
    let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| Error::io(p, e));
    parse_tomography_data(&read(moduli.as_ref())?, &read(visibilities.as_ref())?)
}

pub fn write_tomography_data(
    moduli: impl AsRef<Path>,
    visibilities: impl AsRef<Path>,
    data: &TomographyData,
) -> Result<()> {
    let (mp, vp) = (moduli.as_ref(), visibilities.as_ref());
    std::fs::write(mp, format_moduli(data)).map_err(|e| Error::io(mp, e))?;
    std::fs::write(vp, format_visibilities(data)).map_err(|e| Error::io(vp, e))
}

/// The estimate in the matrix text format preceded by a metrics block of
/// `# key=value` comments. `extra` lines go first.
pub fn format_result(result: &ReconstructionResult, extra: &[String]) -> String {
    let join = |v: &[f64]| v.iter().map(|x| format!("{x:.17e}")).collect::<Vec<_>>().join(",");
    let mut lines: Vec<String> = extra.to_vec();
    lines.push(format!("objective={:.17e}", result.objective));
    lines.push(format!("iterations={}", result.iterations));
    lines.push(format!("converged={}", result.converged));
    lines.push(format!("best_restart={}", result.best_restart));
    lines.push(format!("visibility_mae={:.17e}", result.visibility_mae));
    lines.push(format!("moduli_fidelity={:.17e}", result.moduli_fidelity));
    if let Some(f) = result.fidelity_vs_truth {
        lines.push(format!("fidelity_vs_truth={f:.17e}"));
    }
    if let Some(s) = result.visibility_scale {
        lines.push(format!("visibility_scale={s:.17e}"));
    }
    lines.push(format!("input_loss={}", join(&result.input_loss)));
    lines.push(format!("output_loss={}", join(&result.output_loss)));
    format_matrix(&result.unitary_estimate, &lines)
}

pub fn write_result(path: impl AsRef<Path>, result: &ReconstructionResult, extra: &[String]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_result(result, extra)).map_err(|e| Error::io(path, e))
}
