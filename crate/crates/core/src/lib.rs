//! Privacy-preserving synthetic CV generation.
//!
//! The pipeline splits a reference corpus of parsed CVs into unlinked
//! intermediate tables ([`tables`]), sizes each synthetic CV's sections from
//! per-parameter Weibull fits ([`structgen`]), assembles content under
//! chronology and privacy rules ([`contentgen`]) and checks the result
//! against the reference distributions ([`validate`]).

pub mod config;
pub mod contentgen;
pub mod corpus;
pub mod error;
pub mod mock;
pub mod params;
pub mod render;
pub mod similarity;
pub mod structgen;
pub mod tables;
#[cfg(test)]
mod testutil;
mod text;
pub mod validate;

pub use error::{Error, Result};
