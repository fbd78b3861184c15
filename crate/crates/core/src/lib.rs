pub mod cli;
pub mod distortion;
pub mod error;
pub mod folding;
pub mod linkgeom;
pub mod navigator;
pub mod presentations;
pub mod words;

pub use error::{Error, Result};
