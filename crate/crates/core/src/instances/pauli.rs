//! Pauli 1-form gates (block reading) and the CZ gate from three toric-code copies.

use crate::code::{CssCode, PauliKind};
use crate::complex::ChainComplex;
use crate::error::{Error, Result};
use crate::hfgate::{derive_from_ccz, HigherFormGate, SiteKind};
use crate::instances::torus::torus_3d;
use crate::opalg::PhasedCssOperator;

/// `X_q` (or `Z_q`) sites over the code's own complex, repeated across `blocks` copies.
///
/// With a restriction `R`, grade 1 is `R`, grade 2 holds the checks of the
/// other type restricted to `R`, and grade 0 only the same-type checks supported
/// inside `R`; cocycles are then the operators of that type living on `R`.
pub fn pauli_1form(code: &CssCode, kind: PauliKind, restriction: Option<&[usize]>, blocks: usize) -> Result<HigherFormGate> {
    if !(1..=2).contains(&blocks) {
        return Err(Error::InvalidGate(format!("block count {blocks} not in 1..=2")));
    }
    let n = code.n();
    let base = match kind {
        PauliKind::X => code.complex().truncate(2),
        PauliKind::Z => code.complex().truncate(2).dual(),
    };
    let region: Vec<usize> = match restriction {
        None => (0..n).collect(),
        Some(given) => {
            let mut r = given.to_vec();
            r.sort_unstable();
            r.dedup();
            if r.len() != given.len() || r.iter().any(|&q| q >= n) {
                return Err(Error::InvalidGate("restriction has repeated or out-of-range qubits".into()));
            }
            r
        }
    };
    let gate_complex = if region.len() == n {
        base
    } else {
        let d1 = base.boundary(1);
        let inside: Vec<usize> = (0..d1.rows()).filter(|&v| d1.row(v).iter_ones().all(|q| region.binary_search(&q).is_ok())).collect();
        let d1 = d1.select_rows(&inside).select_columns(&region);
        let d2 = base.boundary(2).select_rows(&region);
        ChainComplex::new(vec![d1.rows(), region.len(), d2.cols()], vec![d1, d2])?
    };
    let total = blocks * n;
    let sites = region
        .iter()
        .map(|&q| {
            let qs: Vec<usize> = (0..blocks).map(|b| b * n + q).collect();
            match kind {
                PauliKind::X => PhasedCssOperator::x_on(total, &qs),
                PauliKind::Z => PhasedCssOperator::z_on(total, &qs),
            }
        })
        .collect();
    let embedding = region.iter().map(|&q| (0..blocks).map(|b| b * n + q).collect()).collect();
    let site_kind = match kind {
        PauliKind::X => SiteKind::PauliX,
        PauliKind::Z => SiteKind::PauliZ,
    };
    HigherFormGate::new(1, gate_complex, sites, vec![code.clone(); blocks], embedding, site_kind)
}

/// Transversal CCZ on three copies of the 3D toric code, reduced to a CZ 1-form gate.
pub fn ccz_triple_torus(l: usize) -> Result<HigherFormGate> {
    let code = CssCode::from_complex(torus_3d(l)?.truncate(2))?;
    derive_from_ccz(&code)
}
