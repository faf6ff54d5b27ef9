//! The [[8,3,2]] cube code.

use crate::code::CssCode;
use crate::complex::ChainComplex;
use crate::error::Result;
use crate::f2la::{BitMatrix, BitVec};

/// Qubits on the corners `q = x + 2y + 4z` of a cube. One X-check on all
/// corners; Z-checks on the faces `x=0`, `y=0`, `z=0` and `x=1`.
pub fn cube_code_832() -> Result<CssCode> {
    let face = |axis: usize, side: usize| BitVec::from_support(8, (0..8).filter(|q| (q >> axis) & 1 == side));
    let faces = [face(0, 0), face(1, 0), face(2, 0), face(0, 1)];
    let d1 = BitMatrix::from_rows(8, &[BitVec::ones(8)]);
    let d2 = BitMatrix::from_columns(8, &faces);
    let names = (0..8).map(|q| format!("q({},{},{})", q & 1, (q >> 1) & 1, q >> 2)).collect();
    CssCode::from_complex(ChainComplex::from_boundaries(d1, d2)?.with_labels(1, names)?)
}
