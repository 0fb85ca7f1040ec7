//! Interferometer tomography from single-photon moduli and two-photon
//! interference visibilities.

mod data;
mod evaluate;
mod io;
mod mesh;
mod objective;
mod reconstruct;
mod visibility;

pub use data::{heldout_measurements, synthesize_measurements, SynthOptions, TomographyData, VisibilityRecord};
pub use evaluate::{evaluate_reconstruction, ReconstructionMetrics};
pub use io::{
    format_moduli, format_result, format_visibilities, parse_tomography_data, parse_visibilities, read_tomography_data,
    write_result, write_tomography_data,
};
pub use mesh::Mesh;
pub use objective::Objective;
pub use reconstruct::{gauge_fix, reconstruct, GradientMode, ReconstructionConfig, ReconstructionResult};
pub use visibility::hom_visibility;
