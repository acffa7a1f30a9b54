//! Steady-state phase locking of two coupled dissipative two-level systems.
//!
//! Subsystem A is driven, subsystem B couples only to A. The crate builds
//! the rotating-frame Lindblad generator ([`model`]), finds its steady
//! state ([`steady`]), reduces it to B and evaluates the Husimi Q function
//! and the phase distribution S(φ) ([`phase`]), and runs parameter sweeps
//! and Arnold tongues ([`sweep`]). [`io`] handles configs and output files.

pub mod io;
pub mod linalg;
pub mod model;
pub mod phase;
pub mod steady;
pub mod sweep;

pub use linalg::{ComplexMatrix, DensityMatrix, C64};
pub use model::{Liouvillian, SystemParams};
pub use phase::{Baseline, PhaseDistribution, QGrid};
pub use steady::{Solver, SteadyError, UniquenessReport};
pub use sweep::{SweepParam, SweepResult, SweepSpec};
