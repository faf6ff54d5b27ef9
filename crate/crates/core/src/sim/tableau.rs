use rand::Rng;

use super::{draw_outcome, QuantumState};
use crate::error::{Error, Result};
use crate::f2la::BitVec;
use crate::opalg::PhasedCssOperator;

/// Signed Pauli `i^r X^x Z^z` (X factors to the left).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliRow {
    pub x: BitVec,
    pub z: BitVec,
    pub r: u8,
}

impl PauliRow {
    pub fn from_operator(a: &PhasedCssOperator) -> Result<Self> {
        if !a.is_pauli() || a.global() % 2 == 1 {
            return Err(Error::Unsupported(format!("{a} is not a Pauli operator")));
        }
        Ok(Self { x: a.xpart().clone(), z: a.z_support(), r: a.global() / 2 })
    }

    pub fn to_operator(&self) -> PhasedCssOperator {
        PhasedCssOperator::pauli(self.x.len(), self.r, &self.x, &self.z)
    }

    fn anticommutes(&self, o: &PauliRow) -> bool {
        self.x.dot(&o.z) ^ self.z.dot(&o.x)
    }

    /// `self ← self · o`.
    fn mul_assign(&mut self, o: &PauliRow) {
        let swap = if self.z.dot(&o.x) { 2 } else { 0 };
        self.r = (self.r + o.r + swap) % 4;
        self.x.xor_assign(&o.x);
        self.z.xor_assign(&o.z);
    }

    pub fn is_hermitian(&self) -> bool {
        self.r as usize % 2 == self.x.and(&self.z).weight() % 2
    }
}

/// Stabilizer tableau with destabilizers; rows `0..n` destabilizers, `n..2n` stabilizers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabTableau {
    n: usize,
    rows: Vec<PauliRow>,
}

impl StabTableau {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Self {
        let mut rows = Vec::with_capacity(2 * n);
        for q in 0..n {
            rows.push(PauliRow { x: BitVec::unit(n, q), z: BitVec::zeros(n), r: 0 });
        }
        for q in 0..n {
            rows.push(PauliRow { x: BitVec::zeros(n), z: BitVec::unit(n, q), r: 0 });
        }
        Self { n, rows }
    }

    pub fn stabilizers(&self) -> Vec<PhasedCssOperator> {
        self.rows[self.n..].iter().map(PauliRow::to_operator).collect()
    }

    fn for_rows(&mut self, f: impl Fn(&mut PauliRow)) {
        for row in self.rows.iter_mut() {
            f(row);
        }
    }

    pub fn apply_x(&mut self, q: usize) {
        self.for_rows(|p| {
            if p.z.get(q) {
                p.r = (p.r + 2) % 4;
            }
        });
    }

    pub fn apply_z(&mut self, q: usize) {
        self.for_rows(|p| {
            if p.x.get(q) {
                p.r = (p.r + 2) % 4;
            }
        });
    }

    pub fn apply_s(&mut self, q: usize) {
        self.for_rows(|p| {
            if p.x.get(q) {
                p.r = (p.r + 1) % 4;
                p.z.flip(q);
            }
        });
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) {
        self.for_rows(|p| {
            let (xa, xb) = (p.x.get(a), p.x.get(b));
            if xa {
                p.z.flip(b);
            }
            if xb {
                p.z.flip(a);
            }
            if xa && xb {
                p.r = (p.r + 2) % 4;
            }
        });
    }

    pub fn apply_hadamard(&mut self, q: usize) {
        self.for_rows(|p| {
            let (x, z) = (p.x.get(q), p.z.get(q));
            if x && z {
                p.r = (p.r + 2) % 4;
            }
            p.x.set(q, z);
            p.z.set(q, x);
        });
    }

    /// Measures a Hermitian Pauli; random outcomes draw like the statevector with `p = 1/2`.
    pub fn measure_pauli<R: Rng>(&mut self, p: &PauliRow, rng: &mut R) -> Result<i8> {
        if p.x.len() != self.n {
            return Err(Error::Dimension("Pauli size does not match tableau".into()));
        }
        if !p.is_hermitian() {
            return Err(Error::InvalidGate("measured Pauli is not Hermitian".into()));
        }
        let n = self.n;
        if let Some(k) = (n..2 * n).find(|&i| self.rows[i].anticommutes(p)) {
            let pivot = self.rows[k].clone();
            for i in 0..2 * n {
                if i != k && self.rows[i].anticommutes(p) {
                    self.rows[i].mul_assign(&pivot);
                }
            }
            let eps = draw_outcome(0.5, rng);
            self.rows[k - n] = pivot;
            let mut new = p.clone();
            if eps < 0 {
                new.r = (new.r + 2) % 4;
            }
            self.rows[k] = new;
            return Ok(eps);
        }
        let mut acc = PauliRow { x: BitVec::zeros(n), z: BitVec::zeros(n), r: 0 };
        for i in 0..n {
            if self.rows[i].anticommutes(p) {
                acc.mul_assign(&self.rows[i + n]);
            }
        }
        debug_assert!(acc.x == p.x && acc.z == p.z);
        match (acc.r + 4 - p.r) % 4 {
            0 => Ok(1),
            2 => Ok(-1),
            _ => Err(Error::CheckFailed("tableau phase inconsistency".into())),
        }
    }
}

impl QuantumState for StabTableau {
    fn num_qubits(&self) -> usize {
        self.n
    }

    /// Conjugates by `X(a) D`; the global phase is not tracked.
    fn apply(&mut self, a: &PhasedCssOperator) -> Result<()> {
        if a.n() != self.n {
            return Err(Error::Dimension(format!("operator acts on {} qubits, tableau has {}", a.n(), self.n)));
        }
        for (q, &l) in a.linear().iter().enumerate() {
            match l {
                1 => self.apply_s(q),
                2 => self.apply_z(q),
                3 => {
                    self.apply_z(q);
                    self.apply_s(q);
                }
                _ => {}
            }
        }
        for &(p, q) in a.quad() {
            self.apply_cz(p, q);
        }
        for q in a.xpart().iter_ones() {
            self.apply_x(q);
        }
        Ok(())
    }

    fn apply_h(&mut self, q: usize) -> Result<()> {
        self.apply_hadamard(q);
        Ok(())
    }

    fn append_zeros(&mut self, k: usize) -> Result<()> {
        let (n, m) = (self.n, self.n + k);
        let pad = |v: &BitVec| v.concat(&BitVec::zeros(k));
        let mut rows = Vec::with_capacity(2 * m);
        for (i, row) in self.rows.iter().enumerate() {
            if i == n {
                rows.extend((n..m).map(|q| PauliRow { x: BitVec::unit(m, q), z: BitVec::zeros(m), r: 0 }));
            }
            rows.push(PauliRow { x: pad(&row.x), z: pad(&row.z), r: row.r });
        }
        if n == 0 {
            rows.extend((n..m).map(|q| PauliRow { x: BitVec::unit(m, q), z: BitVec::zeros(m), r: 0 }));
        }
        rows.extend((n..m).map(|q| PauliRow { x: BitVec::zeros(m), z: BitVec::unit(m, q), r: 0 }));
        self.n = m;
        self.rows = rows;
        Ok(())
    }

    fn measure<R: Rng>(&mut self, a: &PhasedCssOperator, rng: &mut R) -> Result<i8> {
        let p = PauliRow::from_operator(a)?;
        self.measure_pauli(&p, rng)
    }

    /// Checks that each listed qubit is deterministically in `|values⟩`.
    ///
    /// The qubits stay in the register, so `num_qubits` is unchanged.
    fn discard(&mut self, start: usize, values: &BitVec) -> Result<()> {
        let n = self.n;
        for (k, want) in (0..values.len()).map(|k| (k, values.get(k))) {
            let z = PauliRow { x: BitVec::zeros(n), z: BitVec::unit(n, start + k), r: 0 };
            if (n..2 * n).any(|i| self.rows[i].anticommutes(&z)) {
                return Err(Error::CheckFailed(format!("qubit {} is not in a Z eigenstate", start + k)));
            }
            let mut probe = self.clone();
            let eps = probe.measure_pauli(&z, &mut rand::rngs::mock::StepRng::new(0, 0))?;
            if (eps < 0) != want {
                return Err(Error::CheckFailed(format!("qubit {} holds the wrong basis state", start + k)));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::StateVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    #[test]
    fn deterministic_and_repeated_measurements() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut t = StabTableau::zero(2);
        assert_eq!(t.measure(&PhasedCssOperator::z_on(2, &[0]), &mut rng).unwrap(), 1);
        let x0 = PhasedCssOperator::x_on(2, &[0]);
        let e = t.measure(&x0, &mut rng).unwrap();
        assert_eq!(t.measure(&x0, &mut rng).unwrap(), e);
        t.apply(&PhasedCssOperator::z_on(2, &[0])).unwrap();
        assert_eq!(t.measure(&x0, &mut rng).unwrap(), -e);
        assert!(t.measure(&PhasedCssOperator::cz(2, 0, 1), &mut rng).is_err());
    }

    fn random_clifford(rng: &mut ChaCha8Rng, n: usize, sv: &mut StateVector, tab: &mut StabTableau) {
        for _ in 0..40 {
            match rng.gen_range(0..4) {
                0 => {
                    let q = rng.gen_range(0..n);
                    sv.apply_h(q);
                    tab.apply_hadamard(q);
                }
                1 => {
                    let op = PhasedCssOperator::s(n, rng.gen_range(0..n), rng.gen_range(1..4));
                    sv.apply(&op).unwrap();
                    tab.apply(&op).unwrap();
                }
                2 => {
                    let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
                    if a != b {
                        let op = PhasedCssOperator::cz(n, a, b);
                        sv.apply(&op).unwrap();
                        tab.apply(&op).unwrap();
                    }
                }
                _ => {
                    let op = PhasedCssOperator::x_on(n, &[rng.gen_range(0..n)]);
                    sv.apply(&op).unwrap();
                    tab.apply(&op).unwrap();
                }
            }
        }
    }

    fn random_pauli(rng: &mut ChaCha8Rng, n: usize) -> PhasedCssOperator {
        let x = BitVec::from_support(n, (0..n).filter(|_| rng.gen_bool(0.5)));
        let z = BitVec::from_support(n, (0..n).filter(|_| rng.gen_bool(0.5)));
        let r = (x.and(&z).weight() % 2) as u8 + 2 * rng.gen_range(0..2u8);
        PhasedCssOperator::pauli(n, r, &x, &z)
    }

    #[test]
    fn tableau_state_is_stabilized_in_statevector() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = 5;
            let mut sv = StateVector::zero(n).unwrap();
            let mut tab = StabTableau::zero(n);
            random_clifford(&mut rng, n, &mut sv, &mut tab);
            let p = random_pauli(&mut rng, n);
            let seed = rng.gen();
            let e1 = sv.measure(&p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let e2 = tab.measure(&p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert_eq!(e1, e2);
            for s in tab.stabilizers() {
                assert!((sv.expectation(&s).re - 1.0).abs() < 1e-9, "{s}");
            }
        }
    }

    #[test]
    fn sampled_distribution_matches_statevector() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 8;
        let mut sv = StateVector::zero(n).unwrap();
        let mut tab = StabTableau::zero(n);
        random_clifford(&mut rng, n, &mut sv, &mut tab);
        let p = loop {
            let p = random_pauli(&mut rng, n);
            let ev = sv.expectation(&p).re;
            if ev.abs() < 0.5 {
                break p;
            }
        };
        let p_plus = (1.0 + sv.expectation(&p).re) / 2.0;
        let shots = 10_000;
        let mut plus = 0usize;
        for s in 0..shots {
            let mut t = tab.clone();
            if t.measure(&p, &mut ChaCha8Rng::seed_from_u64(s)).unwrap() == 1 {
                plus += 1;
            }
        }
        let expected = [p_plus * shots as f64, (1.0 - p_plus) * shots as f64];
        let observed = [plus as f64, (shots as usize - plus) as f64];
        let chi2: f64 = observed.iter().zip(&expected).map(|(o, e)| (o - e).powi(2) / e).sum();
        let pval = 1.0 - ChiSquared::new(1.0).unwrap().cdf(chi2);
        assert!(pval > 0.001, "chi-square p-value {pval}");
    }

    #[test]
    fn appended_qubits_match_statevector() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1, 4] {
            let mut sv = StateVector::zero(n).unwrap();
            let mut tab = StabTableau::zero(n);
            random_clifford(&mut rng, n, &mut sv, &mut tab);
            sv.append_zeros(2).unwrap();
            tab.append_zeros(2).unwrap();
            random_clifford(&mut rng, n + 2, &mut sv, &mut tab);
            for s in tab.stabilizers() {
                assert!((sv.expectation(&s).re - 1.0).abs() < 1e-9, "{s}");
            }
        }
    }

    #[test]
    fn discard_checks_basis_value() {
        let mut t = StabTableau::zero(3);
        t.apply(&PhasedCssOperator::x_on(3, &[2])).unwrap();
        assert!(t.discard(1, &BitVec::from_support(2, [1])).is_ok());
        assert!(t.discard(1, &BitVec::from_support(2, [0])).is_err());
        t.apply_hadamard(1);
        assert!(t.discard(1, &BitVec::from_support(2, [1])).is_err());
    }
}
