//! Fisher information, Cramér–Rao bounds and Monte Carlo validation for
//! estimating the efficiency of optical detectors.
//!
//! Supported detectors are on/off (with dark counts), K-outcome photon
//! counters and homodyne detectors. Probes can be Fock states, coherent
//! states, heralded single photons, or incoherent Fock mixtures.
//!
//! ```
//! use detcal::{fisher_information, DarkCount, DetectorModel, Efficiency, ProbeState};
//!
//! let eta = Efficiency::new(0.5).unwrap();
//! let f = fisher_information(&ProbeState::fock(1), &DetectorModel::onoff(DarkCount::NONE), eta).unwrap();
//! assert!((f.value().unwrap() - 4.0).abs() < 1e-12);
//! ```

pub mod analysis;
pub mod cli;
pub mod combin;
pub mod discrete;
pub mod engine;
pub mod error;
pub mod fisher;
pub mod hermite;
pub mod homodyne;
pub mod montecarlo;
pub mod quadrature;
pub mod types;

pub use engine::{fisher_information, fisher_repeated};
pub use error::{Error, Result};
pub use fisher::{crb_variance, discrete_fisher, FisherResult, Method, OutcomeDistribution};
pub use types::{DarkCount, DetectorModel, Efficiency, FockMixture, ProbeState, QuadratureGrid};
