//! Numerics for su(2)-based probe-state design in qubit metrology.
//!
//! Builds homogeneously gapped qubit Hamiltonians, completes them into su(2)
//! algebras, prepares raised probe states and evaluates quantum Fisher
//! information and purification bounds under local dephasing.

pub mod bounds;
pub mod channels;
pub mod error;
pub mod experiments;
pub mod fixtures;
pub mod io;
pub mod linalg;
pub mod operators;
pub mod optimize;
pub mod qfi;
pub mod reproduce;
pub mod states;
pub mod su2;

pub use error::{Error, Result};
