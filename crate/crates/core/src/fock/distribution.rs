use std::collections::HashMap;
use std::fmt;

use super::state::FockState;
use crate::error::{Error, Result};
use crate::network::{Feedback, SpatioTemporalMode};

/// Photon statistics model behind a distribution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kind {
    Quantum,
    Distinguishable,
    Uniform,
    /// Partially distinguishable photons with pairwise HOM visibility `p`.
    Partial(f64),
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::Quantum => "quantum",
            Kind::Distinguishable => "distinguishable",
            Kind::Uniform => "uniform",
            Kind::Partial(_) => "partial",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Provenance of a distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionMeta {
    pub kind: Kind,
    pub feedback: Feedback,
    pub iterations: usize,
    /// Label of every mode of the outcome vectors.
    pub modes: Vec<SpatioTemporalMode>,
    /// Modes summed out by [`marginalize`], in order of removal.
    pub traced_out: Vec<SpatioTemporalMode>,
    /// Phase draws and seed when averaged over random feedback phases.
    pub phase_average: Option<(usize, u64)>,
    /// Free-form provenance written as `# key=value` header lines.
    pub tags: Vec<(String, String)>,
}

impl DistributionMeta {
    pub fn new(kind: Kind, feedback: Feedback, iterations: usize, modes: Vec<SpatioTemporalMode>) -> Self {
        Self {
            kind,
            feedback,
            iterations,
            modes,
            traced_out: Vec::new(),
            phase_average: None,
            tags: Vec::new(),
        }
    }

    pub fn tag(&self, key: &str) -> Option<&str> {
        self.tags.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn set_tag(&mut self, key: impl Into<String>, value: impl Into<String>) {
        let key = key.into();
        let value = value.into();
        match self.tags.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = value,
            None => self.tags.push((key, value)),
        }
    }
}

/// Probability of every outcome in a finite outcome space.
#[derive(Clone, Debug)]
pub struct Distribution {
    entries: Vec<(FockState, f64)>,
    index: HashMap<FockState, usize>,
    meta: DistributionMeta,
}

impl Distribution {
    /// Probabilities must be finite and non-negative and outcomes unique.
    pub fn new(entries: Vec<(FockState, f64)>, meta: DistributionMeta) -> Result<Self> {
        let modes = meta.modes.len();
        let mut index = HashMap::with_capacity(entries.len());
        for (i, (state, p)) in entries.iter().enumerate() {
            if state.modes() != modes {
                return Err(Error::Dimension(format!(
                    "outcome {state:?} does not match {modes} labelled modes"
                )));
            }
            if !p.is_finite() || *p < 0.0 {
                return Err(Error::Argument(format!("probability {p} for {state:?}")));
            }
            if index.insert(state.clone(), i).is_some() {
                return Err(Error::Argument(format!("duplicate outcome {state:?}")));
            }
        }
        Ok(Self { entries, index, meta })
    }

    /// Equal weight over the given outcomes.
    pub fn uniform(states: Vec<FockState>, meta: DistributionMeta) -> Result<Self> {
        let w = 1.0 / states.len().max(1) as f64;
        Self::new(states.into_iter().map(|s| (s, w)).collect(), meta)
    }

    pub fn entries(&self) -> &[(FockState, f64)] {
        &self.entries
    }

    pub fn meta(&self) -> &DistributionMeta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut DistributionMeta {
        &mut self.meta
    }

    pub fn with_meta(mut self, meta: DistributionMeta) -> Result<Self> {
        if meta.modes.len() != self.meta.modes.len() {
            return Err(Error::Dimension("metadata mode count mismatch".into()));
        }
        self.meta = meta;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn modes(&self) -> usize {
        self.meta.modes.len()
    }

    /// Probability of `state`; zero outside the outcome space.
    pub fn probability(&self, state: &FockState) -> f64 {
        self.index.get(state).map_or(0.0, |&i| self.entries[i].1)
    }

    pub fn contains(&self, state: &FockState) -> bool {
        self.index.contains_key(state)
    }

    pub fn total(&self) -> f64 {
        // compensated sum; outcome lists reach millions of entries
        let mut sum = 0.0;
        let mut comp = 0.0;
        for &(_, p) in &self.entries {
            let y = p - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        sum
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.total() - 1.0).abs() <= tol
    }

    /// Rescales to unit total; fails on an all-zero distribution.
    pub fn normalized(mut self) -> Result<Self> {
        let total = self.total();
        if total <= 0.0 {
            return Err(Error::State("cannot normalize a zero distribution".into()));
        }
        for e in &mut self.entries {
            e.1 /= total;
        }
        Ok(self)
    }

    /// Keeps outcomes satisfying `keep`, in order, without renormalizing.
    pub fn filter(&self, keep: impl Fn(&FockState) -> bool) -> Result<Self> {
        let entries = self.entries.iter().filter(|(s, _)| keep(s)).cloned().collect();
        Self::new(entries, self.meta.clone())
    }

    /// Indices of the modes satisfying `pred`.
    pub fn mode_indices(&self, pred: impl Fn(&SpatioTemporalMode) -> bool) -> Vec<usize> {
        self.meta
            .modes
            .iter()
            .enumerate()
            .filter(|(_, m)| pred(m))
            .map(|(i, _)| i)
            .collect()
    }

    /// Marginal over the detected outputs, tracing out every looped mode.
    pub fn detected(&self) -> Result<Self> {
        marginalize(self, &self.mode_indices(SpatioTemporalMode::is_external))
    }

    /// Marginal over the detected outputs of one iteration (1-based).
    pub fn iteration_marginal(&self, iteration: usize) -> Result<Self> {
        marginalize(
            self,
            &self.mode_indices(|m| m.is_external() && m.iteration() == iteration),
        )
    }

    /// Largest photon number in the support.
    pub fn max_photons(&self) -> usize {
        self.entries.iter().map(|(s, _)| s.photons()).max().unwrap_or(0)
    }
}

/// Sorts in descending lexicographic order of outcomes.
pub(crate) fn canonical_entries(map: HashMap<FockState, f64>) -> Vec<(FockState, f64)> {
    let mut entries: Vec<_> = map.into_iter().collect();
    entries.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    entries
}

/// Sums probabilities over every mode not in `keep`.
pub fn marginalize(dist: &Distribution, keep: &[usize]) -> Result<Distribution> {
    if keep.is_empty() {
        return Err(Error::Argument("marginal over an empty mode set".into()));
    }
    let modes = dist.modes();
    let mut seen = vec![false; modes];
    for &k in keep {
        if k >= modes {
            return Err(Error::Bounds { index: k, dim: modes });
        }
        if std::mem::replace(&mut seen[k], true) {
            return Err(Error::Argument(format!("mode {k} listed twice")));
        }
    }
    let mut acc: HashMap<FockState, f64> = HashMap::new();
    for (state, p) in &dist.entries {
        *acc.entry(state.select(keep)).or_insert(0.0) += p;
    }
    let mut meta = dist.meta.clone();
    meta.modes = keep.iter().map(|&k| dist.meta.modes[k]).collect();
    meta.traced_out
        .extend((0..modes).filter(|m| !seen[*m]).map(|m| dist.meta.modes[m]));
    let mut entries = canonical_entries(acc);
    if keep.windows(2).all(|w| w[0] < w[1]) && keep.len() == modes {
        // identity marginal keeps the original ordering
        entries = dist.entries.clone();
    }
    Distribution::new(entries, meta)
}

/// Half the L1 distance over the union of both outcome spaces.
pub fn total_variation(a: &Distribution, b: &Distribution) -> f64 {
    let mut tv = 0.0;
    for (s, p) in a.entries() {
        tv += (p - b.probability(s)).abs();
    }
    for (s, q) in b.entries() {
        if !a.contains(s) {
            tv += q;
        }
    }
    0.5 * tv
}
