pub mod cli;
pub mod compactform;
pub mod connection;
pub mod error;
pub mod hermitian;
pub mod holonomy;
pub mod linalg;
pub mod rootsys;
pub mod scalar;
pub mod submersion;

pub use error::{Error, Result};
pub use scalar::Scalar;
