//! Higher-form gauging measurements of transversal Clifford and non-Clifford
//! gates on CSS codes.

pub mod cli;
pub mod code;
pub mod complex;
pub mod error;
pub mod f2la;
pub mod faults;
pub mod gauging;
pub mod hfgate;
pub mod instances;
pub mod opalg;
pub mod sim;

pub use error::{Error, Result};
