//! Classical probability model of a two-party experiment in which each side
//! picks one of two measurement settings at random.
//!
//! Quantum (per-setting) probabilities appear in this model as conditional
//! probabilities given the selected setting pair. The crate builds the finite
//! sample space, answers exact queries on it, checks locality and marginal
//! consistency conditions, evaluates CHSH combinations in absolute and
//! conditional form, decides whether a joint distribution of all four
//! observables exists, and simulates the experiment trial by trial.
//!
//! ```
//! use bellspace::{chsh, quantum, space};
//!
//! let table = quantum::singlet_table(&quantum::AngleSettings::canonical_chsh(), quantum::Convention::Photon);
//! let sample_space = space::SampleSpace::build(space::SettingDistribution::uniform(), table).unwrap();
//! let report = chsh::chsh_report(&sample_space);
//! assert!(report.s_cond.unwrap() > 2.0);
//! assert!(report.s_abs.abs() <= 1.0);
//! ```

pub mod chsh;
pub mod cli;
pub mod error;
pub mod locality;
pub mod lp;
pub mod montecarlo;
pub mod quantum;
pub mod queries;
pub mod space;

pub use error::{Error, Result};
