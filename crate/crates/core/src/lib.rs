//! Riemann simple and double waves of the ideal MHD equations.

pub mod cli;
pub mod config;
pub mod double;
pub mod error;
pub mod fixtures;
pub mod gmc;
pub mod magnetosonic;
pub mod mhd;
pub mod phase;
pub mod profiles;
pub mod quad;
pub mod simple;
pub mod specfun;
pub mod verify;
pub mod wave;

pub use error::{Error, Result};
