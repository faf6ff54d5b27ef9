//! Builders for the worked examples: tori, the tetrahedral color code and
//! twisted higher-group gauge theory on 4-colored complexes.

pub mod torus;
pub mod cube;
pub mod colored;
pub mod color_code;
pub mod hggt;
pub mod pauli;
