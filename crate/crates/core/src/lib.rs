//! Exact simulation of the three-party Wigner's-friend GHZ scenario.
//!
//! Every friend measurement is modelled as a unitary record interaction on a
//! dense statevector held by the outside observer W ("Wigner"). Wigner's own
//! pointer measurements are inserted into the schedule at chosen points, which
//! defines a measurement [`perspective::Context`]. For each context the crate
//! computes the exact joint outcome distribution by branching on every
//! measurement, and the [`assignments`] module checks by exhaustive enumeration
//! that no single valuation of all six friend outcomes satisfies the four GHZ
//! parity constraints at once.
//!
//! The modules build on each other bottom-up:
//!
//! - [`statevec`]: dense complex amplitudes, unitaries, projective measurement.
//! - [`scenario`]: registers, GHZ preparation, record unitaries, the protocol schedule.
//! - [`perspective`]: Wigner's measurement contexts, exact distributions, sampling.
//! - [`assignments`]: parity constraints over the six outcome labels.
//! - [`dsl`]: the `.rfs` scenario language.
//! - [`report`] and [`cli`]: the command-line front end and its JSON report.

pub mod assignments;
pub mod cli;
pub mod dsl;
pub mod perspective;
pub mod report;
pub mod scenario;
pub mod sign;
pub mod statevec;

pub use crate::sign::Sign;

/// Absolute tolerance used for every numerical comparison in the crate.
pub const TOLERANCE: f64 = 1e-12;

/// The bundled three-party scenario file.
pub const GHZ3_RFS: &str = include_str!("../scenarios/ghz3.rfs");
