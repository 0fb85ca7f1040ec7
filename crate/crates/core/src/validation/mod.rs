//! Bayesian discrimination between candidate samplers.
//!
//! Every sample multiplies the odds `chi = P(A) / P(B)` by its likelihood
//! ratio; the posterior is `P(A) = chi / (chi + 1)`. All arithmetic is done
//! on `ln chi`.

mod bands;
mod bayes;
mod io;
mod pair;
mod validators;

pub use bands::{confidence_bands, quantile_sorted};
pub use bayes::{
    bayesian_trajectory, first_crossing, kl_divergence, posterior_from_log_chi, Bands, ValidationTrajectory,
};
pub use io::{format_trajectory, parse_trajectory, write_trajectory, TrajectoryRow};
pub use pair::HypothesisPair;
pub use validators::{postselect, standard_validators, PhotonSelection, ValidatorOptions, VALIDATOR_NAMES};
