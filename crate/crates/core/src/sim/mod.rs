//! State backends: a dense statevector and a stabilizer tableau.

use rand::Rng;

use crate::code::CssCode;
use crate::error::Result;
use crate::f2la::{self, BitVec};
use crate::opalg::PhasedCssOperator;

pub mod statevector;
pub mod tableau;

pub use statevector::StateVector;
pub use tableau::StabTableau;

/// Outcomes closer than this to certain do not consume randomness.
pub const CERTAINTY_TOL: f64 = 1e-12;

/// Samples ±1 with `P(+1) = p_plus`, drawing one `f64` only when the outcome is uncertain.
pub fn draw_outcome<R: Rng>(p_plus: f64, rng: &mut R) -> i8 {
    if p_plus > 1.0 - CERTAINTY_TOL {
        1
    } else if p_plus < CERTAINTY_TOL {
        -1
    } else if rng.gen::<f64>() < p_plus {
        1
    } else {
        -1
    }
}

pub trait QuantumState {
    fn num_qubits(&self) -> usize;
    fn apply(&mut self, a: &PhasedCssOperator) -> Result<()>;
    fn apply_h(&mut self, q: usize) -> Result<()>;
    /// Appends `k` qubits in `|0⟩` after the existing ones.
    fn append_zeros(&mut self, k: usize) -> Result<()>;
    /// Projective measurement of a Hermitian involution.
    fn measure<R: Rng>(&mut self, a: &PhasedCssOperator, rng: &mut R) -> Result<i8>;
    /// Removes qubits `start..start+values.len()` after checking they hold `|values⟩`.
    fn discard(&mut self, start: usize, values: &BitVec) -> Result<()>;
}

/// Check outcomes from one round of codespace projection (`true` = −1).
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Syndrome {
    pub x_checks: BitVec,
    pub z_checks: BitVec,
}

impl Syndrome {
    pub fn is_trivial(&self) -> bool {
        self.x_checks.is_zero() && self.z_checks.is_zero()
    }
}

/// Measures every check of `code` placed at qubits `offset..offset+n`.
///
/// X-checks are measured first, then Z-checks, each in index order.
pub fn measure_checks<S: QuantumState, R: Rng>(state: &mut S, code: &CssCode, offset: usize, rng: &mut R) -> Result<Syndrome> {
    let total = state.num_qubits();
    let n = code.n();
    let mut xs = BitVec::zeros(code.num_x_checks());
    for (i, s) in code.x_checks().iter().enumerate() {
        let op = PhasedCssOperator::x(n, s).shift(total, offset);
        if state.measure(&op, rng)? < 0 {
            xs.set(i, true);
        }
    }
    let mut zs = BitVec::zeros(code.num_z_checks());
    for (i, s) in code.z_checks().iter().enumerate() {
        let op = PhasedCssOperator::z(n, s).shift(total, offset);
        if state.measure(&op, rng)? < 0 {
            zs.set(i, true);
        }
    }
    Ok(Syndrome { x_checks: xs, z_checks: zs })
}

/// Measures all checks and applies Pauli corrections so every check reads +1.
///
/// Returns the syndrome seen before correction.
pub fn project_codespace<S: QuantumState, R: Rng>(state: &mut S, code: &CssCode, offset: usize, rng: &mut R) -> Result<Syndrome> {
    let syn = measure_checks(state, code, offset, rng)?;
    let total = state.num_qubits();
    let n = code.n();
    if !syn.x_checks.is_zero() {
        let z = f2la::solve(&code.hx(), &syn.x_checks)?;
        state.apply(&PhasedCssOperator::z(n, &z).shift(total, offset))?;
    }
    if !syn.z_checks.is_zero() {
        let x = f2la::solve(&code.hz(), &syn.z_checks)?;
        state.apply(&PhasedCssOperator::x(n, &x).shift(total, offset))?;
    }
    Ok(syn)
}

/// Logical `|0…0⟩` (or `|+…+⟩`) of `code` on a fresh register.
pub fn logical_basis_state<S: QuantumState, R: Rng>(mut state: S, code: &CssCode, offset: usize, plus: bool, rng: &mut R) -> Result<S> {
    if plus {
        for q in offset..offset + code.n() {
            state.apply_h(q)?;
        }
    }
    project_codespace(&mut state, code, offset, rng)?;
    Ok(state)
}
