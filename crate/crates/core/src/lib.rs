pub mod analysis;
pub mod cli;
pub mod coefficients;
pub mod controlled;
pub mod error;
pub mod increments;
pub mod io;
pub mod roughpath;
pub mod sewing;
pub mod solver;

pub use error::{Error, Result};
