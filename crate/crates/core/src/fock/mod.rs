//! Fock-space output distributions of the looped sampler.

mod distribution;
mod io;
mod loss;
mod models;
mod oracle;
mod sampling;
mod simulate;
mod state;

pub use distribution::{marginalize, total_variation, Distribution, DistributionMeta, Kind};
pub use io::{
    format_distribution, format_samples, parse_distribution, parse_samples, read_distribution, read_samples,
    write_distribution, write_samples,
};
pub use loss::{apply_loss, apply_loss_with};
pub use models::{LossModel, SourceModel};
pub use oracle::{oracle_distribution, ORACLE_CAP};
pub use sampling::{draw_samples, SampleSet, Sampler};
pub use simulate::{
    event_probability, full_distribution, mix_distinguishability, model_distribution, phase_average,
    phase_average_with, random_phases, PhaseAverage, SimOptions, DEFAULT_OUTCOME_CAP,
};
pub use state::{enumerate_fock_states, fock_space_dimension, FockState};
