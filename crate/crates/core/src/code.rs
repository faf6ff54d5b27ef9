//! CSS codes from three-term chain complexes.
//!
//! `C_0` indexes X-checks, `C_1` qubits and `C_2` Z-checks. The X-check of a
//! basis element `v ∈ C_0` is `X(δ_1 v)` and the Z-check of `p ∈ C_2` is
//! `Z(∂_2 p)`.

use serde::Serialize;

use crate::complex::{ChainComplex, Distance, HomologyKind};
use crate::error::{Error, Result};
use crate::f2la::{self, BitMatrix, BitVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PauliKind {
    X,
    Z,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssCode {
    complex: ChainComplex,
    logical_x: Vec<BitVec>,
    logical_z: Vec<BitVec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LdpcProfile {
    pub max_check_weight: usize,
    pub max_qubit_degree: usize,
}

#[derive(Serialize)]
struct CodeExport {
    n: usize,
    k: usize,
    x_checks: Vec<Vec<usize>>,
    z_checks: Vec<Vec<usize>>,
    logical_x: Vec<Vec<usize>>,
    logical_z: Vec<Vec<usize>>,
}

impl CssCode {
    /// Builds the code from grades 0..=2 of `cx`; higher grades are kept as meta-checks.
    pub fn from_complex(cx: ChainComplex) -> Result<Self> {
        if cx.grades().len() < 3 {
            return Err(Error::InvalidCode(format!("need at least 3 grades, got {}", cx.grades().len())));
        }
        cx.validate().into_result()?;
        let logical_x = cx.homology_basis(1, HomologyKind::Cohomology).representatives;
        let z_raw = cx.homology_basis(1, HomologyKind::Homology).representatives;
        let k = logical_x.len();
        if z_raw.len() != k {
            return Err(Error::InvalidCode("homology and cohomology dimensions differ".into()));
        }
        // Pairing P[i][j] = x_i · z_j; replace Z basis by Z·P⁻¹ so the pairing is the identity.
        let pairing = BitMatrix::from_entries(
            k,
            k,
            (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).filter(|&(i, j)| logical_x[i].dot(&z_raw[j])).collect::<Vec<_>>(),
        );
        let n = cx.dim(1);
        let z_checks = cx.boundary(2).columns();
        let mut logical_z = Vec::with_capacity(k);
        for j in 0..k {
            let m = f2la::solve(&pairing, &BitVec::unit(k, j))
                .map_err(|_| Error::InvalidCode("logical pairing is singular".into()))?;
            let mut z = BitVec::zeros(n);
            for t in m.iter_ones() {
                z.xor_assign(&z_raw[t]);
            }
            shorten(&mut z, &z_checks);
            logical_z.push(z);
        }
        Ok(Self { complex: cx, logical_x, logical_z })
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn n(&self) -> usize {
        self.complex.dim(1)
    }

    pub fn k(&self) -> usize {
        self.logical_x.len()
    }

    pub fn num_x_checks(&self) -> usize {
        self.complex.dim(0)
    }

    pub fn num_z_checks(&self) -> usize {
        self.complex.dim(2)
    }

    /// `∂_1`: rows are X-check supports.
    pub fn hx(&self) -> BitMatrix {
        self.complex.boundary(1)
    }

    /// `δ_2 = ∂_2ᵀ`: rows are Z-check supports.
    pub fn hz(&self) -> BitMatrix {
        self.complex.coboundary(2)
    }

    pub fn x_checks(&self) -> Vec<BitVec> {
        self.complex.coboundary(1).columns()
    }

    pub fn z_checks(&self) -> Vec<BitVec> {
        self.complex.boundary(2).columns()
    }

    pub fn logical_basis(&self, kind: PauliKind) -> &[BitVec] {
        match kind {
            PauliKind::X => &self.logical_x,
            PauliKind::Z => &self.logical_z,
        }
    }

    /// X-checks violated by a Z-type error.
    pub fn x_syndrome(&self, z_error: &BitVec) -> BitVec {
        self.hx().mul_vec(z_error)
    }

    /// Z-checks violated by an X-type error.
    pub fn z_syndrome(&self, x_error: &BitVec) -> BitVec {
        self.hz().mul_vec(x_error)
    }

    /// Is `X(v)` in the X-stabilizer group?
    pub fn is_x_stabilizer(&self, v: &BitVec) -> bool {
        f2la::solve(&self.complex.coboundary(1), v).is_ok()
    }

    /// Is `Z(v)` in the Z-stabilizer group?
    pub fn is_z_stabilizer(&self, v: &BitVec) -> bool {
        f2la::solve(&self.complex.boundary(2), v).is_ok()
    }

    /// Logical X coordinates of a Z-syndrome-free X operator, read via the Z basis.
    pub fn x_logical_coords(&self, v: &BitVec) -> BitVec {
        BitVec::from_bools(&self.logical_z.iter().map(|z| z.dot(v)).collect::<Vec<_>>())
    }

    /// Logical Z coordinates of an X-syndrome-free Z operator, read via the X basis.
    pub fn z_logical_coords(&self, v: &BitVec) -> BitVec {
        BitVec::from_bools(&self.logical_x.iter().map(|x| x.dot(v)).collect::<Vec<_>>())
    }

    /// `(d_X, d_Z)`: minimum weights of nontrivial X and Z logicals.
    pub fn code_distance(&self, budget: usize) -> (Distance, Distance) {
        (
            self.complex.homology_distance(1, HomologyKind::Cohomology, budget),
            self.complex.homology_distance(1, HomologyKind::Homology, budget),
        )
    }

    pub fn distance(&self, budget: usize) -> Distance {
        let (dx, dz) = self.code_distance(budget);
        dx.min(dz)
    }

    pub fn ldpc_profile(&self) -> LdpcProfile {
        let hx = self.hx();
        let hz = self.hz();
        let max_check_weight = hx.max_row_weight().max(hz.max_row_weight());
        let max_qubit_degree = (0..self.n())
            .map(|q| hx.column_support(q).len() + hz.column_support(q).len())
            .max()
            .unwrap_or(0);
        LdpcProfile { max_check_weight, max_qubit_degree }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let sup = |v: &[BitVec]| v.iter().map(BitVec::support).collect::<Vec<_>>();
        serde_json::to_value(CodeExport {
            n: self.n(),
            k: self.k(),
            x_checks: sup(&self.x_checks()),
            z_checks: sup(&self.z_checks()),
            logical_x: sup(&self.logical_x),
            logical_z: sup(&self.logical_z),
        })
        .expect("plain data serializes")
    }
}

/// Greedy weight reduction of `v` by a fixed generator list.
pub(crate) fn shorten(v: &mut BitVec, gens: &[BitVec]) {
    loop {
        let mut improved = false;
        for g in gens {
            let cand = v.xor(g);
            if cand.weight() < v.weight() {
                *v = cand;
                improved = true;
            }
        }
        if !improved {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::torus::torus_2d;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_commutation_and_logicals(code: &CssCode) {
        for x in code.x_checks() {
            for z in code.z_checks() {
                assert!(!x.dot(&z), "X- and Z-check overlap is odd");
            }
        }
        let k = code.k();
        assert_eq!(code.logical_basis(PauliKind::X).len(), k);
        assert_eq!(code.logical_basis(PauliKind::Z).len(), k);
        for (i, x) in code.logical_basis(PauliKind::X).iter().enumerate() {
            assert!(code.z_syndrome(x).is_zero());
            for (j, z) in code.logical_basis(PauliKind::Z).iter().enumerate() {
                assert_eq!(x.dot(z), i == j);
            }
        }
        for z in code.logical_basis(PauliKind::Z) {
            assert!(code.x_syndrome(z).is_zero());
        }
    }

    #[test]
    fn torus_codes() {
        let c2 = CssCode::from_complex(torus_2d(2, 2).unwrap()).unwrap();
        assert_eq!((c2.n(), c2.k()), (8, 2));
        check_commutation_and_logicals(&c2);
        let c3 = CssCode::from_complex(torus_2d(3, 3).unwrap()).unwrap();
        assert_eq!((c3.n(), c3.k()), (18, 2));
        check_commutation_and_logicals(&c3);
        for l in [2, 3] {
            let c = CssCode::from_complex(torus_2d(l, l).unwrap()).unwrap();
            assert_eq!(c.code_distance(0), (Distance::Finite(l), Distance::Finite(l)));
            assert_eq!(c.ldpc_profile(), LdpcProfile { max_check_weight: 4, max_qubit_degree: 4 });
        }
    }

    #[test]
    fn zero_map_code() {
        let cx = ChainComplex::new(vec![0, 5, 0], vec![BitMatrix::zeros(0, 5), BitMatrix::zeros(5, 0)]).unwrap();
        let c = CssCode::from_complex(cx).unwrap();
        assert_eq!((c.n(), c.k()), (5, 5));
        assert_eq!(c.ldpc_profile(), LdpcProfile { max_check_weight: 0, max_qubit_degree: 0 });
        check_commutation_and_logicals(&c);
    }

    #[test]
    fn k_zero_code() {
        let cx = ChainComplex::new(vec![1, 1, 0], vec![BitMatrix::identity(1), BitMatrix::zeros(1, 0)]).unwrap();
        let c = CssCode::from_complex(cx).unwrap();
        assert_eq!(c.k(), 0);
        assert!(c.logical_basis(PauliKind::X).is_empty());
        assert_eq!(c.code_distance(4), (Distance::Infinite, Distance::Infinite));
    }

    #[test]
    fn rejects_short_complex() {
        let cx = ChainComplex::new(vec![1, 1], vec![BitMatrix::identity(1)]).unwrap();
        assert!(matches!(CssCode::from_complex(cx), Err(Error::InvalidCode(_))));
    }

    #[test]
    fn export_shape() {
        let c = CssCode::from_complex(torus_2d(2, 2).unwrap()).unwrap();
        let j = c.to_json();
        assert_eq!(j["n"], 8);
        assert_eq!(j["k"], 2);
        assert_eq!(j["x_checks"].as_array().unwrap().len(), 4);
        assert_eq!(j["logical_z"].as_array().unwrap().len(), 2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn random_codes_have_consistent_logicals(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (n0, n1, n2) = (rng.gen_range(0..5), rng.gen_range(1..10), rng.gen_range(0..5));
            let d2 = BitMatrix::from_entries(n1, n2, (0..n1).flat_map(|r| (0..n2).map(move |c| (r, c))).filter(|_| rng.gen_bool(0.4)).collect::<Vec<_>>());
            let ann = f2la::annihilator(n1, &d2.columns());
            let rows: Vec<BitVec> = (0..n0).map(|_| {
                let mut r = BitVec::zeros(n1);
                for a in &ann { if rng.gen_bool(0.5) { r.xor_assign(a); } }
                r
            }).collect();
            let d1 = BitMatrix::from_rows(n1, &rows);
            let code = CssCode::from_complex(ChainComplex::new(vec![n0, n1, n2], vec![d1.clone(), d2.clone()]).unwrap()).unwrap();
            prop_assert_eq!(code.k(), n1 - d1.rank() - d2.rank());
            check_commutation_and_logicals(&code);
        }
    }
}
