//! Simulation and statistical validation of boson samplers with optical
//! feedback loops.
//!
//! A looped interferometer routes its last `L` outputs back into its last
//! `L` inputs one injection period later. Over `T` injections it behaves as
//! a conventional sampler on `(M-L)T + L` spatio-temporal modes whose
//! transfer matrix is block lower-triangular Toeplitz. This crate builds
//! that matrix ([`network`]), computes exact output statistics from
//! permanents ([`fock`]), discriminates sampler hypotheses with sequential
//! Bayesian updates ([`validation`]) and reconstructs interferometer
//! matrices from intensity and two-photon visibility data ([`tomography`]).

pub mod config;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod network;
pub mod tomography;
pub mod validation;

pub use error::{Error, Result};
pub use fock::{Distribution, FockState, Kind, LossModel, SampleSet, SourceModel};
pub use linalg::{ComplexMatrix, ModeMultiset};
pub use network::{BlockPartition, EffectiveSize, Feedback, InterferometerSpec};
