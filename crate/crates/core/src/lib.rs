//! Exact enumeration, sampling and twist statistics for 3D domino tilings of
//! cylinders `D × [0, N]` over a quadriculated disk `D`.

pub mod algebra;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod plugfloor;
pub mod region;
pub mod stats;
pub mod transfer;
pub mod twist;

pub use error::{DiskError, Error, Result};
