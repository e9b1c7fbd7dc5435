pub mod cli;
pub mod curve;
pub mod error;
pub mod geom;
pub mod mapzoo;
pub mod modsolve;
pub mod quad;
pub mod verify;

pub use error::{Error, Result};
