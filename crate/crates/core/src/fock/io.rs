//! Text formats for distributions and sample sets.
//!
//! Both start with `# key=value` header lines carrying the provenance,
//! followed by one outcome per line. Probabilities are written with 18
//! significant digits so files round-trip bit-exactly.

use std::fmt::Write as _;
use std::path::Path;

use super::distribution::{Distribution, DistributionMeta, Kind};
use super::sampling::SampleSet;
use super::state::FockState;
use crate::error::{Error, Result};
use crate::network::SpatioTemporalMode;

const DIST_BANNER: &str = "# loopsampler distribution";
const SAMPLE_BANNER: &str = "# loopsampler samples";

fn write_meta(out: &mut String, meta: &DistributionMeta) {
    let _ = writeln!(out, "# kind={}", meta.kind);
    if let Kind::Partial(p) = meta.kind {
        let _ = writeln!(out, "# indistinguishability={p:.17e}");
    }
    let _ = writeln!(out, "# feedback={}", meta.feedback);
    let _ = writeln!(out, "# T={}", meta.iterations);
    let _ = writeln!(out, "# modes={}", join_labels(&meta.modes));
    if !meta.traced_out.is_empty() {
        let _ = writeln!(out, "# traced={}", join_labels(&meta.traced_out));
    }
    if let Some((draws, seed)) = meta.phase_average {
        let _ = writeln!(out, "# phase_average={draws},{seed}");
    }
    for (k, v) in &meta.tags {
        let _ = writeln!(out, "# {k}={v}");
    }
}

fn join_labels(labels: &[SpatioTemporalMode]) -> String {
    labels.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

pub fn format_distribution(dist: &Distribution) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{DIST_BANNER}");
    write_meta(&mut out, dist.meta());
    for (state, p) in dist.entries() {
        if state.modes() == 0 {
            let _ = writeln!(out, "{p:.17e}");
        } else {
            let _ = writeln!(out, "{state} {p:.17e}");
        }
    }
    out
}

pub fn format_samples(set: &SampleSet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{SAMPLE_BANNER}");
    let _ = writeln!(out, "# seed={}", set.seed);
    write_meta(&mut out, &set.source);
    for s in &set.samples {
        let _ = writeln!(out, "{s}");
    }
    out
}

#[derive(Default)]
struct Header {
    kind: Option<String>,
    indistinguishability: Option<f64>,
    feedback: Option<String>,
    iterations: Option<usize>,
    modes: Option<Vec<SpatioTemporalMode>>,
    traced: Vec<SpatioTemporalMode>,
    phase_average: Option<(usize, u64)>,
    seed: Option<u64>,
    tags: Vec<(String, String)>,
}

fn parse_labels(line: usize, v: &str) -> Result<Vec<SpatioTemporalMode>> {
    v.split_whitespace()
        .map(|t| t.parse().map_err(|e: Error| Error::parse(line, e.to_string())))
        .collect()
}

impl Header {
    fn absorb(&mut self, line: usize, body: &str) -> Result<()> {
        let Some((key, value)) = body.split_once('=') else {
            return Ok(());
        };
        let bad = |what: &str| Error::parse(line, format!("bad {what} `{value}`"));
        match key {
            "kind" => self.kind = Some(value.to_string()),
            "indistinguishability" => self.indistinguishability = Some(value.parse().map_err(|_| bad(key))?),
            "feedback" => self.feedback = Some(value.to_string()),
            "T" => self.iterations = Some(value.parse().map_err(|_| bad(key))?),
            "modes" => self.modes = Some(parse_labels(line, value)?),
            "traced" => self.traced = parse_labels(line, value)?,
            "phase_average" => {
                let (k, s) = value.split_once(',').ok_or_else(|| bad(key))?;
                self.phase_average = Some((k.parse().map_err(|_| bad(key))?, s.parse().map_err(|_| bad(key))?));
            }
            "seed" if self.seed.is_none() && self.kind.is_none() => {
                self.seed = Some(value.parse().map_err(|_| bad(key))?)
            }
            _ => self.tags.push((key.to_string(), value.to_string())),
        }
        Ok(())
    }

    fn into_meta(self) -> Result<DistributionMeta> {
        let missing = |k: &str| Error::parse(0, format!("missing `{k}` header"));
        let kind = match self.kind.ok_or_else(|| missing("kind"))?.as_str() {
            "quantum" => Kind::Quantum,
            "distinguishable" => Kind::Distinguishable,
            "uniform" => Kind::Uniform,
            "partial" => Kind::Partial(
                self.indistinguishability
                    .ok_or_else(|| missing("indistinguishability"))?,
            ),
            other => return Err(Error::parse(0, format!("unknown kind `{other}`"))),
        };
        let feedback = self
            .feedback
            .ok_or_else(|| missing("feedback"))?
            .parse()
            .map_err(|e: Error| Error::parse(0, e.to_string()))?;
        let mut meta = DistributionMeta::new(
            kind,
            feedback,
            self.iterations.ok_or_else(|| missing("T"))?,
            self.modes.ok_or_else(|| missing("modes"))?,
        );
        meta.traced_out = self.traced;
        meta.phase_average = self.phase_average;
        meta.tags = self.tags;
        Ok(meta)
    }
}

fn parse_occupations(line: usize, tokens: &[&str]) -> Result<FockState> {
    tokens
        .iter()
        .map(|t| t.parse::<u32>().map_err(|e| Error::parse(line, format!("`{t}`: {e}"))))
        .collect::<Result<Vec<_>>>()
        .map(FockState::new)
}

pub fn parse_distribution(text: &str) -> Result<Distribution> {
    let mut header = Header::default();
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(body) = line.strip_prefix('#') {
            header.absorb(i + 1, body.trim_start())?;
        } else if !line.is_empty() {
            rows.push((i + 1, line));
        }
    }
    let meta = header.into_meta()?;
    let modes = meta.modes.len();
    let entries = rows
        .into_iter()
        .map(|(n, line)| {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != modes + 1 {
                return Err(Error::parse(
                    n,
                    format!("expected {modes} occupations and a probability"),
                ));
            }
            let p: f64 = tokens[modes].parse().map_err(|e| Error::parse(n, format!("{e}")))?;
            Ok((parse_occupations(n, &tokens[..modes])?, p))
        })
        .collect::<Result<Vec<_>>>()?;
    Distribution::new(entries, meta)
}

pub fn parse_samples(text: &str) -> Result<SampleSet> {
    let mut header = Header::default();
    let mut samples = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(body) = line.strip_prefix('#') {
            header.absorb(i + 1, body.trim_start())?;
        } else if !line.is_empty() {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            samples.push((i + 1, parse_occupations(i + 1, &tokens)?));
        }
    }
    let seed = header.seed.ok_or_else(|| Error::parse(0, "missing `seed` header"))?;
    let source = header.into_meta()?;
    let samples = samples
        .into_iter()
        .map(|(n, s)| {
            if s.modes() != source.modes.len() {
                Err(Error::parse(n, format!("expected {} occupations", source.modes.len())))
            } else {
                Ok(s)
            }
        })
        .collect::<Result<_>>()?;
    Ok(SampleSet { samples, seed, source })
}

pub fn write_distribution(path: impl AsRef<Path>, dist: &Distribution) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_distribution(dist)).map_err(|e| Error::io(path, e))
}

pub fn read_distribution(path: impl AsRef<Path>) -> Result<Distribution> {
    let path = path.as_ref();
    parse_distribution(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

pub fn write_samples(path: impl AsRef<Path>, set: &SampleSet) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_samples(set)).map_err(|e| Error::io(path, e))
}

pub fn read_samples(path: impl AsRef<Path>) -> Result<SampleSet> {
    let path = path.as_ref();
    parse_samples(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{draw_samples, full_distribution, mix_distinguishability};
    use crate::linalg::random_unitary;
    use crate::network::InterferometerSpec;

    fn spec() -> InterferometerSpec {
        InterferometerSpec::new(random_unitary(3, 5).unwrap(), 1)
            .unwrap()
            .with_phases(vec![0.3])
            .unwrap()
            .with_injection(vec![FockState::new(vec![1, 1]), FockState::new(vec![1, 0])])
            .unwrap()
    }

    #[test]
    fn distribution_round_trip_is_bit_exact() {
        let mut d = full_distribution(&spec(), 2, Kind::Quantum)
            .unwrap()
            .detected()
            .unwrap();
        d.meta_mut().set_tag("seed", "17");
        d.meta_mut().phase_average = Some((4, 9));
        let text = format_distribution(&d);
        let back = parse_distribution(&text).unwrap();
        assert_eq!(back.entries(), d.entries());
        assert_eq!(back.meta(), d.meta());
        assert_eq!(format_distribution(&back), text);
    }

    #[test]
    fn partial_kind_round_trips() {
        let d = mix_distinguishability(&spec(), 1, 0.918).unwrap();
        let back = parse_distribution(&format_distribution(&d)).unwrap();
        assert_eq!(back.meta().kind, Kind::Partial(0.918));
    }

    #[test]
    fn samples_round_trip() {
        let d = full_distribution(&spec(), 2, Kind::Quantum).unwrap();
        let set = draw_samples(&d, 25, 77).unwrap();
        let text = format_samples(&set);
        let back = parse_samples(&text).unwrap();
        assert_eq!(back, set);
        assert_eq!(format_samples(&back), text);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_distribution("# kind=quantum\n1 0 0.5\n").is_err());
        let ok = "# kind=uniform\n# feedback=looped\n# T=1\n# modes=E1.0 E1.1\n1 0 0.5\n0 1 0.5\n";
        assert!(parse_distribution(ok).is_ok());
        assert!(parse_distribution(&ok.replace("0 1 0.5", "0 1")).is_err());
        assert!(parse_distribution(&ok.replace("kind=uniform", "kind=bogus")).is_err());
    }
}
