//! The smallest 3D color code: 15 qubits on the tetrahedra of a 16-cell with one tetrahedron removed.

use crate::code::CssCode;
use crate::complex::ChainComplex;
use crate::error::{Error, Result};
use crate::f2la::{BitMatrix, BitVec};
use crate::hfgate::{derive_from_t, HigherFormGate};
use crate::instances::colored::{sixteen_cell, Color, ColoredSimplicialComplex};

#[derive(Clone, Debug)]
pub struct TetrahedralColorCode {
    pub cells: ColoredSimplicialComplex,
    /// Tetrahedron of the 16-cell carrying no qubit.
    pub removed: usize,
    /// Qubit `q` sits on tetrahedron `qubit_tets[q]`.
    pub qubit_tets: Vec<usize>,
    /// X-check `i` sits on vertex `x_vertices[i]`.
    pub x_vertices: Vec<usize>,
    /// Z-check `j` sits on edge `check_edges[j]`.
    pub check_edges: Vec<usize>,
    pub code: CssCode,
    /// Qubits receiving `T`; the rest receive `T†`.
    pub black: Vec<usize>,
    pub white: Vec<usize>,
    pub gate: HigherFormGate,
}

impl TetrahedralColorCode {
    /// Meta-check rows at X-vertex `v`: edge sets `{vw : color(w) ∈ pair}` for two color pairs.
    pub fn vertex_meta_checks(&self, i: usize) -> Vec<BitVec> {
        let v = self.x_vertices[i];
        let others: Vec<Color> = Color::ALL.into_iter().filter(|&c| c != self.cells.color(v)).collect();
        [(others[0], others[1]), (others[0], others[2])]
            .iter()
            .map(|&(a, b)| {
                BitVec::from_support(
                    self.check_edges.len(),
                    self.check_edges.iter().enumerate().filter_map(|(j, &e)| {
                        let [p, q] = self.cells.edges()[e];
                        let w = if p == v { q } else if q == v { p } else { return None };
                        let c = self.cells.color(w);
                        (c == a || c == b).then_some(j)
                    }),
                )
            })
            .collect()
    }
}

/// Builds the instance with `T` on tetrahedra that pick an odd number of minus vertices.
pub fn tetrahedral_color_code() -> Result<TetrahedralColorCode> {
    let cells = sixteen_cell();
    let removed = 0;
    let t0 = cells.tets()[removed];
    let qubit_tets: Vec<usize> = (0..cells.tets().len()).filter(|&t| t != removed).collect();
    let x_vertices: Vec<usize> = (0..cells.num_vertices()).filter(|v| !t0.contains(v)).collect();
    let check_edges: Vec<usize> = (0..cells.edges().len()).filter(|&e| !cells.edges()[e].iter().all(|v| t0.contains(v))).collect();
    let n = qubit_tets.len();
    let qubit_of = |t: usize| qubit_tets.iter().position(|&x| x == t);
    let d1 = BitMatrix::from_entries(
        x_vertices.len(),
        n,
        x_vertices.iter().enumerate().flat_map(|(i, &v)| cells.vertex_tets(v).iter().filter_map(move |&t| qubit_of(t).map(|q| (i, q)))).collect::<Vec<_>>(),
    );
    let d2 = BitMatrix::from_entries(
        n,
        check_edges.len(),
        check_edges.iter().enumerate().flat_map(|(j, &e)| cells.edge_tets(e).iter().filter_map(move |&t| qubit_of(t).map(|q| (q, j)))).collect::<Vec<_>>(),
    );
    if d2.column_support(0).len() != 4 || (0..d1.rows()).any(|i| d1.row(i).weight() != 8) {
        return Err(Error::InvalidCode("tetrahedral data fails its weight invariants".into()));
    }
    let complex = ChainComplex::from_boundaries(d1, d2)?.extend_with_cycle_space();
    let label = |t: usize| format!("t{:?}", cells.tets()[t]);
    let complex = complex.with_labels(1, qubit_tets.iter().map(|&t| label(t)).collect())?;
    let code = CssCode::from_complex(complex)?;
    // tetrahedron index m is the bitmask of its minus vertices
    let (black, white): (Vec<usize>, Vec<usize>) = (0..n).partition(|&q| qubit_tets[q].count_ones() % 2 == 1);
    let gate = derive_from_t(&code, &black, &white)?;
    Ok(TetrahedralColorCode { cells, removed, qubit_tets, x_vertices, check_edges, code, black, white, gate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Distance;

    #[test]
    fn parameters() {
        let cc = tetrahedral_color_code().unwrap();
        assert_eq!((cc.code.n(), cc.code.k()), (15, 1));
        assert_eq!(cc.code.distance(0), Distance::Finite(3));
        assert_eq!(cc.code.code_distance(0).0, Distance::Finite(7));
        assert_eq!(cc.code.num_x_checks(), 4);
        assert_eq!(cc.code.num_z_checks(), 18);
        assert_eq!((cc.black.len(), cc.white.len()), (8, 7));
    }

    #[test]
    fn two_color_meta_checks_vanish() {
        let cc = tetrahedral_color_code().unwrap();
        let d2 = cc.code.complex().boundary(2);
        for i in 0..4 {
            for m in cc.vertex_meta_checks(i) {
                assert_eq!(m.weight(), 4);
                assert!(d2.mul_vec(&m).is_zero());
            }
            // summing every edge at the vertex counts each tetrahedron three times
            let every_edge = BitVec::from_support(
                18,
                (0..18).filter(|&j| cc.cells.edges()[cc.check_edges[j]].contains(&cc.x_vertices[i])),
            );
            assert_eq!(d2.mul_vec(&every_edge), cc.code.x_checks()[i]);
        }
        // the cycle-space grade holds exactly the meta-check relations
        assert_eq!(cc.code.complex().dim(3), 18 - 10);
    }

    #[test]
    fn gate_passes_xs_conditions() {
        let cc = tetrahedral_color_code().unwrap();
        let r = cc.gate.validate_codespace_xs().unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.cocycles_preserve_codespace);
        assert!(cc.gate.is_x_conjugate());
        assert!(!cc.gate.is_strongly_transversal());
    }
}
