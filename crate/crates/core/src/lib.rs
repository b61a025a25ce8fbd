//! Spreading speeds of KPP fronts in slowly varying one-dimensional media.

pub mod corrector;
pub mod eigen;
pub mod error;
pub mod fronttrack;
pub mod media;
pub mod numerics;
pub mod solver;
pub mod theory;

pub use error::{Error, Result};
