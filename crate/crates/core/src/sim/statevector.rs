use num_complex::Complex64;
use rand::Rng;

use super::{draw_outcome, QuantumState};
use crate::error::{Error, Result};
use crate::f2la::BitVec;
use crate::opalg::PhasedCssOperator;

/// Default largest register a dense state will allocate.
pub const DEFAULT_QUBIT_CEILING: usize = 24;

const NORM_TOL: f64 = 1e-12;

/// Dense state; basis index bit `q` is qubit `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

fn omega_pow(k: u32) -> Complex64 {
    const R: f64 = std::f64::consts::FRAC_1_SQRT_2;
    match k % 8 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(R, R),
        2 => Complex64::new(0.0, 1.0),
        3 => Complex64::new(-R, R),
        4 => Complex64::new(-1.0, 0.0),
        5 => Complex64::new(-R, -R),
        6 => Complex64::new(0.0, -1.0),
        _ => Complex64::new(R, -R),
    }
}

/// Bit masks for fast evaluation of `ω^g i^{E(z)}`.
struct PhaseMasks {
    global: u32,
    xmask: usize,
    lin: [usize; 4],
    quad: Vec<(usize, usize)>,
}

impl PhaseMasks {
    fn new(a: &PhasedCssOperator) -> Self {
        let mut lin = [0usize; 4];
        for (q, &l) in a.linear().iter().enumerate() {
            lin[l as usize] |= 1 << q;
        }
        Self {
            global: a.global() as u32,
            xmask: a.xpart().iter_ones().map(|q| 1usize << q).sum(),
            lin,
            quad: a.quad().iter().map(|&(p, q)| (1usize << p, 1usize << q)).collect(),
        }
    }

    #[inline]
    fn omega_exponent(&self, z: usize) -> u32 {
        let mut e = (z & self.lin[1]).count_ones() + 2 * (z & self.lin[2]).count_ones() + 3 * (z & self.lin[3]).count_ones();
        for &(p, q) in &self.quad {
            if z & p != 0 && z & q != 0 {
                e += 2;
            }
        }
        self.global + 2 * e
    }
}

impl StateVector {
    pub fn zero(n: usize) -> Result<Self> {
        Self::zero_with_ceiling(n, DEFAULT_QUBIT_CEILING)
    }

    pub fn zero_with_ceiling(n: usize, ceiling: usize) -> Result<Self> {
        if n > ceiling {
            return Err(Error::Limit(format!("statevector of {n} qubits exceeds the ceiling of {ceiling}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn basis(n: usize, z: &BitVec) -> Result<Self> {
        let mut s = Self::zero(n)?;
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[Self::index(z)] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::Dimension("amplitude count must be a power of two".into()));
        }
        let n = amps.len().trailing_zeros() as usize;
        let mut s = Self { n, amps };
        s.normalize()?;
        Ok(s)
    }

    fn index(z: &BitVec) -> usize {
        z.iter_ones().map(|q| 1usize << q).sum()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, z: &BitVec) -> Complex64 {
        self.amps[Self::index(z)]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn normalize(&mut self) -> Result<()> {
        let nrm = self.norm();
        if nrm < NORM_TOL {
            return Err(Error::CheckFailed("state has zero norm".into()));
        }
        for a in self.amps.iter_mut() {
            *a /= nrm;
        }
        Ok(())
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.n, other.n, "state size mismatch");
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `A|ψ⟩` without modifying the state.
    pub fn applied(&self, a: &PhasedCssOperator) -> StateVector {
        assert_eq!(a.n(), self.n, "operator acts on {} qubits, state has {}", a.n(), self.n);
        let m = PhaseMasks::new(a);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (z, &amp) in self.amps.iter().enumerate() {
            if amp.re != 0.0 || amp.im != 0.0 {
                out[z ^ m.xmask] = omega_pow(m.omega_exponent(z)) * amp;
            }
        }
        StateVector { n: self.n, amps: out }
    }

    pub fn expectation(&self, a: &PhasedCssOperator) -> Complex64 {
        self.inner(&self.applied(a))
    }

    pub fn apply_h(&mut self, q: usize) {
        let bit = 1usize << q;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for z in 0..self.amps.len() {
            if z & bit == 0 {
                let (a, b) = (self.amps[z], self.amps[z | bit]);
                self.amps[z] = (a + b) * r;
                self.amps[z | bit] = (a - b) * r;
            }
        }
    }

    /// `(1 + εA)/2` applied and renormalized; fails on a zero-norm branch.
    pub fn project(&mut self, a: &PhasedCssOperator, eps: i8) -> Result<()> {
        let ap = self.applied(a);
        let s = eps as f64;
        for (x, y) in self.amps.iter_mut().zip(&ap.amps) {
            *x = (*x + y * s) * 0.5;
        }
        self.normalize()
    }

    /// Drops qubits `start..start+len`, which must be exactly in `|values⟩`.
    pub fn discard_block(&mut self, start: usize, values: &BitVec) -> Result<()> {
        let len = values.len();
        assert!(start + len <= self.n);
        let block_mask = ((1usize << len) - 1) << start;
        let want = Self::index(values) << start;
        let stray: f64 = self.amps.iter().enumerate().filter(|(z, _)| z & block_mask != want).map(|(_, a)| a.norm_sqr()).sum();
        if stray > 1e-10 {
            return Err(Error::CheckFailed(format!("discarded qubits are not in the expected basis state (stray weight {stray:.3e})")));
        }
        let low = (1usize << start) - 1;
        let keep_n = self.n - len;
        let mut out = vec![Complex64::new(0.0, 0.0); 1 << keep_n];
        for (k, slot) in out.iter_mut().enumerate() {
            let z = (k & low) | ((k & !low) << len) | want;
            *slot = self.amps[z];
        }
        self.n = keep_n;
        self.amps = out;
        self.normalize()
    }

    /// Tensor product `self ⊗ other` with `other` on the high qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        if self.n + other.n > DEFAULT_QUBIT_CEILING {
            return Err(Error::Limit(format!("tensor product of {} qubits exceeds the ceiling", self.n + other.n)));
        }
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for b in &other.amps {
            for a in &self.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector { n: self.n + other.n, amps })
    }

    /// Little-endian `(re, im)` f64 pairs, basis index order.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.amps.len() * 16);
        for a in &self.amps {
            out.extend_from_slice(&a.re.to_le_bytes());
            out.extend_from_slice(&a.im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<StateVector> {
        if bytes.len() % 16 != 0 {
            return Err(Error::Parse("amplitude dump length is not a multiple of 16".into()));
        }
        let f = |c: &[u8]| f64::from_le_bytes(c.try_into().expect("8 bytes"));
        let amps = bytes.chunks(16).map(|c| Complex64::new(f(&c[..8]), f(&c[8..]))).collect();
        Self::from_amplitudes(amps)
    }
}

impl QuantumState for StateVector {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn apply(&mut self, a: &PhasedCssOperator) -> Result<()> {
        if a.n() != self.n {
            return Err(Error::Dimension(format!("operator acts on {} qubits, state has {}", a.n(), self.n)));
        }
        *self = self.applied(a);
        Ok(())
    }

    fn apply_h(&mut self, q: usize) -> Result<()> {
        StateVector::apply_h(self, q);
        Ok(())
    }

    fn append_zeros(&mut self, k: usize) -> Result<()> {
        *self = self.tensor(&StateVector::zero(k)?)?;
        Ok(())
    }

    fn measure<R: Rng>(&mut self, a: &PhasedCssOperator, rng: &mut R) -> Result<i8> {
        if a.n() != self.n {
            return Err(Error::Dimension(format!("operator acts on {} qubits, state has {}", a.n(), self.n)));
        }
        if !a.is_hermitian_involution() {
            return Err(Error::InvalidGate(format!("cannot measure {a}: not a Hermitian involution")));
        }
        let ap = self.applied(a);
        let p_plus = ((1.0 + self.inner(&ap).re) / 2.0).clamp(0.0, 1.0);
        let eps = draw_outcome(p_plus, rng);
        let s = eps as f64;
        for (x, y) in self.amps.iter_mut().zip(&ap.amps) {
            *x = (*x + y * s) * 0.5;
        }
        self.normalize()?;
        Ok(eps)
    }

    fn discard(&mut self, start: usize, values: &BitVec) -> Result<()> {
        self.discard_block(start, values)
    }
}
