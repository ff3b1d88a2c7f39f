//! Sandpile additions combined with spin flips (SF) or anti-additions (SA)
//! on one-dimensional rings and intervals.
//!
//! * [`lattice`]: configurations, the addition and anti-addition operators
//!   in closed form, and toppling-based reference implementations.
//! * [`dynamics`]: continuous-time kinetic Monte Carlo.
//! * [`oracle`]: exact finite-state analysis for small lattices.
//! * [`observables`]: measurements, confidence intervals and closed-form
//!   predictions.
//! * [`expcli`]: experiment configs, runs and output files.

pub mod dynamics;
pub mod error;
pub mod expcli;
pub mod lattice;
pub mod observables;
pub mod oracle;

pub use error::{Error, Result};
