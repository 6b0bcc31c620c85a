pub mod analysis;
pub mod channel;
pub mod codebook;
pub mod decoder;
mod error;
pub mod experiment;
pub mod lattice;
pub mod numberfield;
pub mod rng;
pub mod specfun;

pub use error::{Error, Result};
