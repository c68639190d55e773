//! Exact elliptic genera of Witten phases.

pub mod cohring;
pub mod cyclo;
pub(crate) mod engine;
pub mod error;
pub mod genus;
pub mod numeric;
pub mod pseries;
pub mod theta;
pub mod verify;

pub use error::{Error, Result};
