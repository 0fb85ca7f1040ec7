//! Device description files.
//!
//! ```toml
//! modes = 4
//! loops = 1
//! iterations = 3
//! unitary_seed = 7              # or: unitary_file = "u.txt"
//! feedback_phases = [0.4]       # or: feedback_phases = "random"
//! injection = [[1, 1, 0]]       # repeated when shorter than `iterations`
//!
//! [loss]
//! input_efficiency = 0.9        # one value or one per external mode
//! output_efficiency = [1.0, 0.8, 0.9]
//! detector_efficiency = 0.7
//!
//! [source]
//! indistinguishability = 0.918
//! g2 = 0.046
//! ```
//!
//! Optional `input_permutation` / `output_permutation` list the physical
//! ports in canonical order (looped ports last).

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fock::{FockState, LossModel, SourceModel};
use crate::linalg::{random_unitary, read_matrix};
use crate::network::{rewire, InterferometerSpec};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDevice {
    modes: usize,
    #[serde(default)]
    loops: usize,
    #[serde(default = "one")]
    iterations: usize,
    unitary_file: Option<PathBuf>,
    unitary_seed: Option<u64>,
    feedback_phases: Option<RawPhases>,
    injection: Vec<Vec<u32>>,
    input_permutation: Option<Vec<usize>>,
    output_permutation: Option<Vec<usize>>,
    loss: Option<RawLoss>,
    source: Option<RawSource>,
}

fn one() -> usize {
    1
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawPhases {
    Fixed(Vec<f64>),
    Keyword(String),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Efficiency {
    Uniform(f64),
    PerMode(Vec<f64>),
}

impl Efficiency {
    fn expand(&self, modes: usize, what: &str) -> Result<Vec<f64>> {
        match self {
            Efficiency::Uniform(v) => Ok(vec![*v; modes]),
            Efficiency::PerMode(v) if v.len() == modes => Ok(v.clone()),
            Efficiency::PerMode(v) => Err(Error::InvalidSpec(format!(
                "{what} has {} entries, expected {modes}",
                v.len()
            ))),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLoss {
    input_efficiency: Option<Efficiency>,
    output_efficiency: Option<Efficiency>,
    #[serde(default = "unit")]
    detector_efficiency: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSource {
    #[serde(default = "unit")]
    indistinguishability: f64,
    #[serde(default)]
    g2: f64,
}

/// A parsed device file.
#[derive(Clone, Debug)]
pub struct Device {
    pub spec: InterferometerSpec,
    pub iterations: usize,
    /// Fiber phases are unknown and must be averaged over.
    pub random_phases: bool,
}

/// Reads a device file. Relative `unitary_file` paths resolve against the
/// file's directory; `overrides` are `key=value` pairs applied first.
pub fn load_device(path: impl AsRef<Path>, overrides: &[String]) -> Result<Device> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_device(&text, path.parent().unwrap_or(Path::new(".")), overrides)
}

pub fn parse_device(text: &str, base_dir: &Path, overrides: &[String]) -> Result<Device> {
    let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| toml_error(text, &e))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let raw: RawDevice = table
        .try_into()
        .map_err(|e: toml::de::Error| Error::InvalidSpec(e.message().to_string()))?;
    build(raw, base_dir)
}

fn toml_error(text: &str, e: &toml::de::Error) -> Error {
    let line = e.span().map(|s| text[..s.start].lines().count().max(1)).unwrap_or(0);
    Error::parse(line, e.message())
}

/// Sets a (possibly dotted) key. The value is read as TOML and falls back
/// to a bare string.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, value) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Argument(format!("override `{assignment}` is not KEY=VALUE")))?;
    let (key, value) = (key.trim(), value.trim());
    if key.is_empty() {
        return Err(Error::Argument(format!("override `{assignment}` has an empty key")));
    }
    let parsed = format!("v = {value}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()));
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().expect("split yields one part");
    let mut cur = table;
    for part in parts {
        cur = cur
            .entry(part)
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::Argument(format!("override key `{key}`: `{part}` is not a section")))?;
    }
    cur.insert(last.to_string(), parsed);
    Ok(())
}

fn build(raw: RawDevice, base_dir: &Path) -> Result<Device> {
    if raw.iterations == 0 {
        return Err(Error::InvalidSpec("iterations must be at least 1".into()));
    }
    let unitary = match (&raw.unitary_file, raw.unitary_seed) {
        (Some(_), Some(_)) => {
            return Err(Error::InvalidSpec(
                "give either unitary_file or unitary_seed, not both".into(),
            ))
        }
        (Some(file), None) => read_matrix(base_dir.join(file))?,
        (None, Some(seed)) => random_unitary(raw.modes, seed)?,
        (None, None) => return Err(Error::InvalidSpec("missing unitary_file or unitary_seed".into())),
    };
    if unitary.shape() != (raw.modes, raw.modes) {
        return Err(Error::InvalidSpec(format!(
            "unitary is {}x{} but modes = {}",
            unitary.rows(),
            unitary.cols(),
            raw.modes
        )));
    }
    let unitary = match (&raw.input_permutation, &raw.output_permutation) {
        (None, None) => unitary,
        (i, o) => {
            let identity: Vec<usize> = (0..raw.modes).collect();
            rewire(
                &unitary,
                i.as_deref().unwrap_or(&identity),
                o.as_deref().unwrap_or(&identity),
            )?
        }
    };

    let mut spec = InterferometerSpec::new(unitary, raw.loops)?;
    let random_phases = match raw.feedback_phases {
        None => false,
        Some(RawPhases::Fixed(p)) => {
            spec = spec.with_phases(p)?;
            false
        }
        Some(RawPhases::Keyword(k)) if k == "random" => true,
        Some(RawPhases::Keyword(k)) => {
            return Err(Error::InvalidSpec(format!(
                "feedback_phases must be a list or \"random\", got \"{k}\""
            )))
        }
    };

    if raw.injection.is_empty() {
        return Err(Error::InvalidSpec("injection schedule is empty".into()));
    }
    let schedule: Vec<FockState> = (0..raw.iterations)
        .map(|t| FockState::new(raw.injection[t % raw.injection.len()].clone()))
        .collect();
    spec = spec.with_injection(schedule)?;

    let ext = spec.external_modes();
    if let Some(loss) = raw.loss {
        let inputs = loss
            .input_efficiency
            .map_or(Ok(vec![1.0; ext]), |e| e.expand(ext, "input_efficiency"))?;
        let outputs = loss
            .output_efficiency
            .map_or(Ok(vec![1.0; ext]), |e| e.expand(ext, "output_efficiency"))?;
        spec = spec.with_loss(LossModel::new(inputs, outputs, loss.detector_efficiency)?)?;
    }
    if let Some(source) = raw.source {
        spec = spec.with_source(SourceModel::new(source.indistinguishability, source.g2)?);
    }
    Ok(Device {
        spec,
        iterations: raw.iterations,
        random_phases,
    })
}
