//! Bayesian information gain and fidelity gain of measurements on identical
//! copies of an unknown qubit, for isotropic priors on the Bloch ball.
//!
//! The numerical core is [`infogain::average_gain`], which integrates the
//! Kullback of every outcome over a radial rule from the prior and an angular
//! product grid. [`analytic`] holds the closed forms it is checked against,
//! and [`verify::run_suite`] runs every invariant of the crate.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod infogain;
pub mod optimize;
pub mod povm;
pub mod priors;
pub mod qmat;
pub mod quadrature;
pub mod sampling;
pub mod spin;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use infogain::{average_gain, GainReport, GainSettings};
pub use povm::{Povm, PovmElement};
pub use priors::IsotropicPrior;
pub use states::BlochVector;
