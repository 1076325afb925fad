//! Density-matrix simulation of quantum discord under weak and projective
//! measurements on the second qubit of a two-qubit state.

pub mod channels;
pub mod discord;
pub mod error;
pub mod measure;
pub mod pathway;
pub mod qmath;
pub mod sample;
pub mod states;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
