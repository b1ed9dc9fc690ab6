//! Structural simulator for switching between open-GOP encoded
//! representations in adaptive streaming.
//!
//! - [`gop`] builds hierarchical GOP structures with IRAP and leading
//!   picture classification.
//! - [`constraints`] checks the rules that make open-GOP switching safe.
//! - [`switching`] classifies switches and runs ABR sessions.
//! - [`quality`] holds BD-rate and the RASL quality-transition model.
//! - [`io`] reads and writes the file formats used by the CLI.

pub mod cli;
pub mod constraints;
pub mod error;
pub mod gop;
pub mod io;
pub mod quality;
pub mod switching;

pub use error::{Error, Result};
