use std::path::Path;

use loopsampler::{Error, Result};
use sha2::{Digest, Sha256};

/// `key=value` pairs stamped on every output file.
#[derive(Clone, Debug)]
pub struct Provenance {
    pub pairs: Vec<(String, String)>,
}

impl Provenance {
    /// The output directory and thread count do not change results, so
    /// they are left out of the recorded command line.
    pub fn new(argv: &[String], seed: u64, spec: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut kept = Vec::new();
        let mut args = argv.iter().skip(1);
        while let Some(a) = args.next() {
            if a == "--out" || a == "--threads" {
                args.next();
            } else if !a.starts_with("--out=") && !a.starts_with("--threads=") {
                kept.push(a.as_str());
            }
        }
        let hash = match spec {
            Some(p) => {
                let bytes = std::fs::read(p).map_err(|e| Error::io(p, e))?;
                let mut h = Sha256::new();
                h.update(&bytes);
                for o in overrides {
                    h.update(b"\n--set ");
                    h.update(o.as_bytes());
                }
                format!("{:x}", h.finalize())
            }
            None => "none".to_string(),
        };
        Ok(Self {
            pairs: vec![
                ("version".into(), env!("CARGO_PKG_VERSION").into()),
                ("command".into(), format!("loopsampler {}", kept.join(" "))),
                ("seed".into(), seed.to_string()),
                ("spec_hash".into(), hash),
            ],
        })
    }

    pub fn comment_lines(&self) -> Vec<String> {
        self.pairs.iter().map(|(k, v)| format!("{k}={v}")).collect()
    }
}
