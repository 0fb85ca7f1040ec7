use crate::error::{Error, Result};

/// Transmission of the external inputs, the detected outputs and the detectors.
#[derive(Clone, Debug, PartialEq)]
pub struct LossModel {
    input_efficiency: Vec<f64>,
    output_efficiency: Vec<f64>,
    detector_efficiency: f64,
}

impl LossModel {
    pub fn new(input_efficiency: Vec<f64>, output_efficiency: Vec<f64>, detector_efficiency: f64) -> Result<Self> {
        let all = input_efficiency
            .iter()
            .chain(&output_efficiency)
            .chain(std::iter::once(&detector_efficiency));
        for &eta in all {
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::InvalidSpec(format!("efficiency {eta} outside [0, 1]")));
            }
        }
        Ok(Self {
            input_efficiency,
            output_efficiency,
            detector_efficiency,
        })
    }

    pub fn ideal(inputs: usize, outputs: usize) -> Self {
        Self {
            input_efficiency: vec![1.0; inputs],
            output_efficiency: vec![1.0; outputs],
            detector_efficiency: 1.0,
        }
    }

    pub fn input_efficiency(&self) -> &[f64] {
        &self.input_efficiency
    }

    pub fn output_efficiency(&self) -> &[f64] {
        &self.output_efficiency
    }

    pub fn detector_efficiency(&self) -> f64 {
        self.detector_efficiency
    }

    /// Probability that a photon leaving detected output `mode` clicks.
    pub fn detection_probability(&self, mode: usize) -> f64 {
        self.output_efficiency[mode] * self.detector_efficiency
    }

    pub fn is_lossless(&self) -> bool {
        self.detector_efficiency == 1.0
            && self.input_efficiency.iter().all(|&e| e == 1.0)
            && self.output_efficiency.iter().all(|&e| e == 1.0)
    }
}

/// Single-photon source figures. `g2` is carried for reporting only.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SourceModel {
    indistinguishability: f64,
    g2: f64,
}

impl SourceModel {
    pub fn new(indistinguishability: f64, g2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&indistinguishability) {
            return Err(Error::InvalidSpec(format!(
                "indistinguishability {indistinguishability} outside [0, 1]"
            )));
        }
        if !(0.0..=1.0).contains(&g2) {
            return Err(Error::InvalidSpec(format!("g2 {g2} outside [0, 1]")));
        }
        Ok(Self {
            indistinguishability,
            g2,
        })
    }

    pub fn ideal() -> Self {
        Self {
            indistinguishability: 1.0,
            g2: 0.0,
        }
    }

    pub fn indistinguishability(&self) -> f64 {
        self.indistinguishability
    }

    pub fn g2(&self) -> f64 {
        self.g2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_ranges() {
        assert!(LossModel::new(vec![0.5], vec![1.1], 1.0).is_err());
        assert!(LossModel::new(vec![0.5], vec![1.0], -0.1).is_err());
        let l = LossModel::new(vec![0.5], vec![0.8], 0.7).unwrap();
        assert!((l.detection_probability(0) - 0.56).abs() < 1e-15);
        assert!(!l.is_lossless());
        assert!(LossModel::ideal(2, 2).is_lossless());
        assert!(SourceModel::new(1.2, 0.0).is_err());
        assert_eq!(SourceModel::new(0.918, 0.046).unwrap().indistinguishability(), 0.918);
    }
}
