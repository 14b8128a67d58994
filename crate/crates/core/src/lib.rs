//! Channel models for molecular communication through a plaque-obstructed
//! cylindrical blood vessel.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] – vessel lumen with a piecewise-linear plaque narrowing.
//! * [`rheology`] – Newtonian, power-law and Herschel-Bulkley pipe-flow profiles.
//! * [`channel`] – closed-form impulse responses, Venturi traversal time and
//!   diffusion-regime diagnostics.
//! * [`pulsatile`] – periodic carotid inlet waveform.
//! * [`transport`] – Monte-Carlo Lagrangian particle transport producing
//!   empirical impulse responses.
//! * [`config`], [`table`], [`cli`] – experiment files, CSV output and the
//!   command-line front end.

pub mod channel;
pub mod cli;
pub mod config;
pub mod defaults;
pub mod error;
pub mod geometry;
pub mod pulsatile;
pub mod quadrature;
pub mod rheology;
pub mod table;
pub mod transport;

pub use error::{Error, Result};
