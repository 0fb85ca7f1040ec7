use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::fock::{total_variation, Distribution, FockState};

/// Distributions are degenerate when closer than this in total variation.
const DEGENERATE_TV: f64 = 1e-12;

/// Two candidate samplers over one outcome space.
#[derive(Clone, Debug)]
pub struct HypothesisPair {
    name: String,
    dist_a: Distribution,
    dist_b: Distribution,
    labels: (String, String),
    degenerate: bool,
}

impl HypothesisPair {
    /// Aligns both distributions onto the union of their outcomes, padding
    /// with zero probabilities. The mode layouts must match.
    pub fn new(
        name: impl Into<String>,
        dist_a: Distribution,
        dist_b: Distribution,
        labels: (String, String),
    ) -> Result<Self> {
        if dist_a.meta().modes != dist_b.meta().modes {
            return Err(Error::Dimension(
                "hypotheses are defined over different output modes".into(),
            ));
        }
        let mut outcomes: Vec<FockState> = dist_a.entries().iter().map(|(s, _)| s.clone()).collect();
        let known: HashSet<&FockState> = outcomes.iter().collect();
        let extra: Vec<FockState> = dist_b
            .entries()
            .iter()
            .filter(|(s, _)| !known.contains(s))
            .map(|(s, _)| s.clone())
            .collect();
        outcomes.extend(extra);
        outcomes.sort_unstable_by(|x, y| y.cmp(x));
        let dist_a = reorder(&dist_a, &outcomes)?;
        let dist_b = reorder(&dist_b, &outcomes)?;
        let degenerate = total_variation(&dist_a, &dist_b) < DEGENERATE_TV;
        Ok(Self {
            name: name.into(),
            dist_a,
            dist_b,
            labels,
            degenerate,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dist_a(&self) -> &Distribution {
        &self.dist_a
    }

    pub fn dist_b(&self) -> &Distribution {
        &self.dist_b
    }

    pub fn labels(&self) -> (&str, &str) {
        (&self.labels.0, &self.labels.1)
    }

    /// Both hypotheses predict the same statistics.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// The same pair with A and B exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            name: self.name.clone(),
            dist_a: self.dist_b.clone(),
            dist_b: self.dist_a.clone(),
            labels: (self.labels.1.clone(), self.labels.0.clone()),
            degenerate: self.degenerate,
        }
    }
}

fn reorder(dist: &Distribution, outcomes: &[FockState]) -> Result<Distribution> {
    let entries = outcomes.iter().map(|s| (s.clone(), dist.probability(s))).collect();
    Distribution::new(entries, dist.meta().clone())
}
