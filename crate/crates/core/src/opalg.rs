//! Exact algebra of X-type Paulis dressed by diagonal Clifford phases.
//!
//! An operator is stored as `ω^g · X(a) · D` with `ω = e^{iπ/4}` and
//! `D|z⟩ = i^{E(z)}|z⟩`, where `E(z) = Σ l_q z_q + 2 Σ_{p<q} Q_pq z_p z_q (mod 4)`.
//! `l_q` is the power of `S` on qubit `q` and `Q` is the set of `CZ` pairs.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::code::CssCode;
use crate::error::{Error, Result};
use crate::f2la::{self, BitVec};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PhasedCssOperator {
    n: usize,
    global: u8,
    xpart: BitVec,
    linear: Vec<u8>,
    quad: BTreeSet<(usize, usize)>,
}

/// Which of `T` or `T†` conjugates an operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TSign {
    /// `A ↦ T A T†`
    Plus,
    /// `A ↦ T† A T`
    Minus,
}

fn ordered(p: usize, q: usize) -> (usize, usize) {
    if p < q {
        (p, q)
    } else {
        (q, p)
    }
}

impl PhasedCssOperator {
    pub fn identity(n: usize) -> Self {
        Self { n, global: 0, xpart: BitVec::zeros(n), linear: vec![0; n], quad: BTreeSet::new() }
    }

    pub fn x(n: usize, support: &BitVec) -> Self {
        assert_eq!(support.len(), n);
        let mut a = Self::identity(n);
        a.xpart = support.clone();
        a
    }

    pub fn z(n: usize, support: &BitVec) -> Self {
        assert_eq!(support.len(), n);
        let mut a = Self::identity(n);
        for q in support.iter_ones() {
            a.linear[q] = 2;
        }
        a
    }

    pub fn x_on(n: usize, qubits: &[usize]) -> Self {
        Self::x(n, &BitVec::from_support(n, qubits.iter().copied()))
    }

    pub fn z_on(n: usize, qubits: &[usize]) -> Self {
        Self::z(n, &BitVec::from_support(n, qubits.iter().copied()))
    }

    pub fn s(n: usize, q: usize, power: u8) -> Self {
        let mut a = Self::identity(n);
        a.linear[q] = power % 4;
        a
    }

    pub fn cz(n: usize, p: usize, q: usize) -> Self {
        assert!(p != q && p < n && q < n, "invalid CZ pair ({p},{q})");
        let mut a = Self::identity(n);
        a.quad.insert(ordered(p, q));
        a
    }

    pub fn phase(n: usize, g: u8) -> Self {
        let mut a = Self::identity(n);
        a.global = g % 8;
        a
    }

    /// `i^r X(x) Z(z)`.
    pub fn pauli(n: usize, r: u8, x: &BitVec, z: &BitVec) -> Self {
        let mut a = Self::x(n, x).mul(&Self::z(n, z));
        a.global = (a.global + 2 * (r % 4)) % 8;
        a
    }

    pub fn from_parts(n: usize, global: u8, xpart: BitVec, linear: Vec<u8>, quad: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if xpart.len() != n || linear.len() != n {
            return Err(Error::Dimension(format!("operator parts do not match n = {n}")));
        }
        let mut out = Self { n, global: global % 8, xpart, linear: linear.into_iter().map(|l| l % 4).collect(), quad: BTreeSet::new() };
        for (p, q) in quad {
            if p == q || p >= n || q >= n {
                return Err(Error::Dimension(format!("invalid CZ pair ({p},{q})")));
            }
            out.toggle_cz(p, q);
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn global(&self) -> u8 {
        self.global
    }

    pub fn xpart(&self) -> &BitVec {
        &self.xpart
    }

    pub fn linear(&self) -> &[u8] {
        &self.linear
    }

    pub fn quad(&self) -> &BTreeSet<(usize, usize)> {
        &self.quad
    }

    pub fn has_cz(&self, p: usize, q: usize) -> bool {
        self.quad.contains(&ordered(p, q))
    }

    fn toggle_cz(&mut self, p: usize, q: usize) {
        let k = ordered(p, q);
        if !self.quad.remove(&k) {
            self.quad.insert(k);
        }
    }

    fn add_global(&mut self, g: i64) {
        self.global = (self.global as i64 + g).rem_euclid(8) as u8;
    }

    fn add_linear(&mut self, q: usize, l: i64) {
        self.linear[q] = (self.linear[q] as i64 + l).rem_euclid(4) as u8;
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    /// No X part.
    pub fn is_diagonal(&self) -> bool {
        self.xpart.is_zero()
    }

    /// A Pauli product up to phase: no CZ and only even S powers.
    pub fn is_pauli(&self) -> bool {
        self.quad.is_empty() && self.linear.iter().all(|l| l % 2 == 0)
    }

    /// Qubits acted on nontrivially.
    pub fn support(&self) -> Vec<usize> {
        let mut s: BTreeSet<usize> = self.xpart.iter_ones().collect();
        s.extend(self.linear.iter().enumerate().filter(|(_, &l)| l != 0).map(|(q, _)| q));
        for &(p, q) in &self.quad {
            s.insert(p);
            s.insert(q);
        }
        s.into_iter().collect()
    }

    /// Z-part of a Pauli operator (qubits with `S²`).
    pub fn z_support(&self) -> BitVec {
        BitVec::from_support(self.n, self.linear.iter().positions_eq(2))
    }

    /// Phase exponent `E(z)` mod 4 of the diagonal part.
    pub fn diag_exponent(&self, z: &BitVec) -> u8 {
        let mut e: u32 = self.linear.iter().enumerate().filter(|(q, _)| z.get(*q)).map(|(_, &l)| l as u32).sum();
        e += 2 * self.quad.iter().filter(|&&(p, q)| z.get(p) && z.get(q)).count() as u32;
        (e % 4) as u8
    }

    /// Returns `X(b) D X(b)` for this operator's diagonal part `D`, as `(ω-exponent, D')`.
    fn diag_conjugated_by_x(&self, b: &BitVec) -> (i64, Vec<u8>, BTreeSet<(usize, usize)>) {
        let mut g = 0i64;
        let mut linear = self.linear.clone();
        for q in b.iter_ones() {
            let l = self.linear[q] as i64;
            g += 2 * l;
            linear[q] = (-l).rem_euclid(4) as u8;
        }
        for &(p, q) in &self.quad {
            let (bp, bq) = (b.get(p), b.get(q));
            if bp {
                linear[q] = (linear[q] + 2) % 4;
            }
            if bq {
                linear[p] = (linear[p] + 2) % 4;
            }
            if bp && bq {
                g += 4;
            }
        }
        (g, linear, self.quad.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "operator size mismatch");
        // ω^{g1} X(a) D1 · ω^{g2} X(b) D2 = ω^{g1+g2} X(a⊕b) (X(b) D1 X(b)) D2
        let (g, linear, mut quad) = self.diag_conjugated_by_x(&other.xpart);
        let mut out = Self {
            n: self.n,
            global: self.global,
            xpart: self.xpart.xor(&other.xpart),
            linear,
            quad: BTreeSet::new(),
        };
        out.add_global(g + other.global as i64);
        for q in 0..self.n {
            out.add_linear(q, other.linear[q] as i64);
        }
        for pair in &other.quad {
            if !quad.remove(pair) {
                quad.insert(*pair);
            }
        }
        out.quad = quad;
        out
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension(format!("cannot multiply operators on {} and {} qubits", self.n, other.n)));
        }
        Ok(self.mul(other))
    }

    pub fn dagger(&self) -> Self {
        // (ω^g X(a) D)† = ω^{-g} X(a) (X(a) D† X(a))
        let inv = Self {
            n: self.n,
            global: 0,
            xpart: BitVec::zeros(self.n),
            linear: self.linear.iter().map(|&l| (4 - l) % 4).collect(),
            quad: self.quad.clone(),
        };
        let (g, linear, quad) = inv.diag_conjugated_by_x(&self.xpart);
        let mut out = Self { n: self.n, global: 0, xpart: self.xpart.clone(), linear, quad };
        out.add_global(g - self.global as i64);
        out
    }

    /// `A B A† B†`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).mul(&self.dagger()).mul(&other.dagger())
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::identity(self.n), |acc, _| acc.mul(self))
    }

    pub fn is_hermitian_involution(&self) -> bool {
        self.mul(self).is_identity() && *self == self.dagger()
    }

    /// `T A T†` (or `T† A T`) with `T = diag(1, ω)` on `site`.
    pub fn conjugate_by_t(&self, site: usize, sign: TSign) -> Self {
        let mut out = self.clone();
        if self.xpart.get(site) {
            // T X T† = ω X S†, T† X T = ω⁻¹ X S
            let s = match sign {
                TSign::Plus => 1,
                TSign::Minus => -1,
            };
            out.add_global(s);
            out.add_linear(site, -s);
        }
        out
    }

    /// `CCZ A CCZ` on the given triple.
    pub fn conjugate_by_ccz(&self, triple: (usize, usize, usize)) -> Result<Self> {
        let (i, j, k) = triple;
        if i == j || j == k || i == k || i >= self.n || j >= self.n || k >= self.n {
            return Err(Error::InvalidGate(format!("invalid CCZ triple ({i},{j},{k})")));
        }
        let (ai, aj, ak) = (self.xpart.get(i), self.xpart.get(j), self.xpart.get(k));
        let mut out = self.clone();
        // X(a) CCZ X(a) CCZ expanded over GF(2)
        for (flag, p, q) in [(ak, i, j), (aj, i, k), (ai, j, k)] {
            if flag {
                out.toggle_cz(p, q);
            }
        }
        for (flag, q) in [(aj && ak, i), (ai && ak, j), (ai && aj, k)] {
            if flag {
                out.add_linear(q, 2);
            }
        }
        if ai && aj && ak {
            out.add_global(4);
        }
        Ok(out)
    }

    /// `CX A CX` with control `c` and target `t`.
    pub fn conjugate_by_cx(&self, c: usize, t: usize) -> Self {
        assert!(c != t && c < self.n && t < self.n, "invalid CX ({c},{t})");
        let mut out = self.clone();
        if self.xpart.get(c) {
            out.xpart.flip(t);
        }
        // Substitute z_t → z_t ⊕ z_c in E(z).
        let lt = self.linear[t] as i64;
        out.add_linear(c, lt);
        if lt % 2 == 1 {
            out.toggle_cz(t, c);
        }
        for &(p, q) in &self.quad {
            let other = if p == t {
                q
            } else if q == t {
                p
            } else {
                continue;
            };
            if other == c {
                out.add_linear(c, 2);
            } else {
                out.toggle_cz(c, other);
            }
        }
        out
    }

    /// Places this operator on a larger register through `map[q]`.
    pub fn embed(&self, total: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.n, "qubit map length mismatch");
        let mut out = Self::identity(total);
        out.global = self.global;
        for q in self.xpart.iter_ones() {
            out.xpart.set(map[q], true);
        }
        for (q, &l) in self.linear.iter().enumerate() {
            out.linear[map[q]] = l;
        }
        for &(p, q) in &self.quad {
            out.toggle_cz(map[p], map[q]);
        }
        out
    }

    /// Places this operator at qubits `offset..offset+n` of a larger register.
    pub fn shift(&self, total: usize, offset: usize) -> Self {
        self.embed(total, &(offset..offset + self.n).collect::<Vec<_>>())
    }

    /// Restriction to qubits `offset..offset+len`; fails if anything acts outside.
    pub fn restrict(&self, offset: usize, len: usize) -> Result<Self> {
        let inside = |q: usize| q >= offset && q < offset + len;
        if !self.support().into_iter().all(inside) {
            return Err(Error::Dimension("operator acts outside the requested block".into()));
        }
        Ok(Self {
            n: len,
            global: self.global,
            xpart: self.xpart.slice(offset, len),
            linear: self.linear[offset..offset + len].to_vec(),
            quad: self.quad.iter().map(|&(p, q)| (p - offset, q - offset)).collect(),
        })
    }

    /// Identity on the codespace, including phase.
    ///
    /// Holds iff `ω^g = 1`, the X part is an X-stabilizer, and `E` vanishes
    /// mod 4 on `ker δ_2`. `E` is checked on a basis together with its polar form.
    pub fn acts_trivially_on(&self, code: &CssCode) -> bool {
        self.acts_trivially_given(code, &f2la::kernel_basis(&code.hz()))
    }

    /// [`Self::acts_trivially_on`] with a precomputed basis of `ker δ_2`.
    pub fn acts_trivially_given(&self, code: &CssCode, z_basis: &[BitVec]) -> bool {
        assert_eq!(self.n, code.n(), "operator and code sizes differ");
        self.global == 0 && code.is_x_stabilizer(&self.xpart) && self.diag_form_vanishes(z_basis)
    }

    /// `E ≡ 0 mod 4` on the span of `basis`.
    pub fn diag_form_vanishes(&self, basis: &[BitVec]) -> bool {
        if basis.iter().any(|b| self.diag_exponent(b) != 0) {
            return false;
        }
        let polar: Vec<BitVec> = basis.iter().map(|b| self.polar_vector(b)).collect();
        for i in 0..basis.len() {
            for j in (i + 1)..basis.len() {
                if polar[i].dot(&basis[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// `M w` with `β(w, w') = w'·(M w)` the polar form of `E`.
    fn polar_vector(&self, w: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.n);
        for q in w.iter_ones() {
            if self.linear[q] % 2 == 1 {
                out.flip(q);
            }
        }
        for &(p, q) in &self.quad {
            if w.get(p) {
                out.flip(q);
            }
            if w.get(q) {
                out.flip(p);
            }
        }
        out
    }

    /// Maps the codespace into itself: `U S U†` fixes the codespace for every check `S`.
    pub fn preserves_codespace(&self, code: &CssCode) -> bool {
        self.preserves_codespace_given(code, &f2la::kernel_basis(&code.hz()))
    }

    /// [`Self::preserves_codespace`] with a precomputed basis of `ker δ_2`.
    pub fn preserves_codespace_given(&self, code: &CssCode, z_basis: &[BitVec]) -> bool {
        let n = code.n();
        let support: BTreeSet<usize> = self.support().into_iter().collect();
        let touches = |s: &BitVec| s.iter_ones().any(|q| support.contains(&q));
        code.x_checks()
            .iter()
            .filter(|s| touches(s))
            .map(|s| PhasedCssOperator::x(n, s))
            .chain(code.z_checks().iter().filter(|s| touches(s)).map(|s| PhasedCssOperator::z(n, s)))
            .all(|s| self.commutator(&s).acts_trivially_given(code, z_basis))
    }

    /// Text form, e.g. `w^3 X{0,4} S{2:1} CZ{(1,3)}`; `I` for the identity.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn from_text(n: usize, s: &str) -> Result<Self> {
        let mut out = Self::identity(n);
        let bad = |msg: &str| Error::Parse(format!("{msg} in operator text {s:?}"));
        let body = |tok: &str, prefix: &str| -> Result<String> {
            tok.strip_prefix(prefix)
                .and_then(|t| t.strip_prefix('{'))
                .and_then(|t| t.strip_suffix('}'))
                .map(str::to_string)
                .ok_or_else(|| bad("malformed token"))
        };
        let idx = |t: &str| -> Result<usize> {
            let q: usize = t.trim().parse().map_err(|_| bad("bad index"))?;
            if q >= n {
                return Err(bad("qubit index out of range"));
            }
            Ok(q)
        };
        let trimmed = s.trim();
        if trimmed == "I" {
            return Ok(out);
        }
        for tok in trimmed.split_whitespace() {
            if let Some(g) = tok.strip_prefix("w^") {
                let g: u8 = g.parse().map_err(|_| bad("bad phase"))?;
                out.global = g % 8;
            } else if tok.starts_with("CZ") {
                let b = body(tok, "CZ")?;
                for pair in b.split(')').map(|p| p.trim_start_matches(',').trim()).filter(|p| !p.is_empty()) {
                    let inner = pair.strip_prefix('(').ok_or_else(|| bad("bad CZ pair"))?;
                    let (p, q) = inner.split_once(',').ok_or_else(|| bad("bad CZ pair"))?;
                    let (p, q) = (idx(p)?, idx(q)?);
                    if p == q {
                        return Err(bad("CZ on a single qubit"));
                    }
                    out.toggle_cz(p, q);
                }
            } else if tok.starts_with('X') {
                for q in body(tok, "X")?.split(',').filter(|t| !t.is_empty()) {
                    out.xpart.flip(idx(q)?);
                }
            } else if tok.starts_with('S') {
                for item in body(tok, "S")?.split(',').filter(|t| !t.is_empty()) {
                    let (q, l) = item.split_once(':').ok_or_else(|| bad("bad S entry"))?;
                    let l: u8 = l.trim().parse().map_err(|_| bad("bad S power"))?;
                    out.add_linear(idx(q)?, l as i64);
                }
            } else {
                return Err(bad("unknown token"));
            }
        }
        Ok(out)
    }
}

trait PositionsEq {
    fn positions_eq(self, v: u8) -> Vec<usize>;
}

impl<'a, I: Iterator<Item = &'a u8>> PositionsEq for I {
    fn positions_eq(self, v: u8) -> Vec<usize> {
        self.enumerate().filter(|(_, &x)| x == v).map(|(i, _)| i).collect()
    }
}

impl fmt::Display for PhasedCssOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.global != 0 {
            parts.push(format!("w^{}", self.global));
        }
        if !self.xpart.is_zero() {
            parts.push(format!("X{{{}}}", self.xpart.iter_ones().map(|q| q.to_string()).collect::<Vec<_>>().join(",")));
        }
        let s: Vec<String> = self.linear.iter().enumerate().filter(|(_, &l)| l != 0).map(|(q, l)| format!("{q}:{l}")).collect();
        if !s.is_empty() {
            parts.push(format!("S{{{}}}", s.join(",")));
        }
        if !self.quad.is_empty() {
            parts.push(format!("CZ{{{}}}", self.quad.iter().map(|(p, q)| format!("({p},{q})")).collect::<Vec<_>>().join(",")));
        }
        if parts.is_empty() {
            write!(f, "I")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

impl fmt::Debug for PhasedCssOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}q] {}", self.n, self)
    }
}

impl Serialize for PhasedCssOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Exact dense matrices over `ℤ[ω]`, used as an independent oracle.
pub mod dense {
    use std::ops::{Add, Mul, Neg};

    use num_complex::Complex64;

    use super::PhasedCssOperator;
    use crate::error::{Error, Result};

    /// `c0 + c1 ω + c2 ω² + c3 ω³` with `ω⁴ = -1`.
    #[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
    pub struct Cyclo8(pub [i64; 4]);

    impl Cyclo8 {
        pub const ZERO: Cyclo8 = Cyclo8([0; 4]);
        pub const ONE: Cyclo8 = Cyclo8([1, 0, 0, 0]);

        pub fn omega_pow(k: i64) -> Cyclo8 {
            let k = k.rem_euclid(8) as usize;
            let mut c = [0; 4];
            if k < 4 {
                c[k] = 1;
            } else {
                c[k - 4] = -1;
            }
            Cyclo8(c)
        }

        pub fn is_zero(&self) -> bool {
            self.0 == [0; 4]
        }

        pub fn to_complex(self) -> Complex64 {
            let w = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
            (0..4).map(|k| w.powi(k as i32) * self.0[k] as f64).sum()
        }

        pub fn conj(self) -> Cyclo8 {
            // ω̄ = ω⁷ = -ω³, ω̄² = -ω², ω̄³ = -ω
            let [a, b, c, d] = self.0;
            Cyclo8([a, -d, -c, -b])
        }
    }

    impl Add for Cyclo8 {
        type Output = Cyclo8;
        fn add(self, o: Cyclo8) -> Cyclo8 {
            Cyclo8([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2], self.0[3] + o.0[3]])
        }
    }

    impl Neg for Cyclo8 {
        type Output = Cyclo8;
        fn neg(self) -> Cyclo8 {
            Cyclo8(self.0.map(|x| -x))
        }
    }

    impl Mul for Cyclo8 {
        type Output = Cyclo8;
        fn mul(self, o: Cyclo8) -> Cyclo8 {
            let mut r = [0i64; 4];
            for i in 0..4 {
                for j in 0..4 {
                    let p = self.0[i] * o.0[j];
                    if i + j < 4 {
                        r[i + j] += p;
                    } else {
                        r[i + j - 4] -= p;
                    }
                }
            }
            Cyclo8(r)
        }
    }

    /// Square matrix, row-major, basis index bit `q` = qubit `q`.
    #[derive(Clone, Debug, PartialEq, Eq)]
    pub struct DenseMatrix {
        pub dim: usize,
        pub data: Vec<Cyclo8>,
    }

    impl DenseMatrix {
        pub fn identity(dim: usize) -> Self {
            let mut m = Self { dim, data: vec![Cyclo8::ZERO; dim * dim] };
            for i in 0..dim {
                m.data[i * dim + i] = Cyclo8::ONE;
            }
            m
        }

        pub fn diagonal(entries: &[Cyclo8]) -> Self {
            let dim = entries.len();
            let mut m = Self { dim, data: vec![Cyclo8::ZERO; dim * dim] };
            for (i, &e) in entries.iter().enumerate() {
                m.data[i * dim + i] = e;
            }
            m
        }

        /// Permutation matrix sending basis state `j` to `perm(j)`.
        pub fn permutation(dim: usize, perm: impl Fn(usize) -> usize) -> Self {
            let mut m = Self { dim, data: vec![Cyclo8::ZERO; dim * dim] };
            for j in 0..dim {
                m.data[perm(j) * dim + j] = Cyclo8::ONE;
            }
            m
        }

        pub fn get(&self, r: usize, c: usize) -> Cyclo8 {
            self.data[r * self.dim + c]
        }

        pub fn matmul(&self, o: &DenseMatrix) -> DenseMatrix {
            assert_eq!(self.dim, o.dim);
            let d = self.dim;
            let mut out = vec![Cyclo8::ZERO; d * d];
            for i in 0..d {
                for k in 0..d {
                    let a = self.data[i * d + k];
                    if a.is_zero() {
                        continue;
                    }
                    for j in 0..d {
                        let b = o.data[k * d + j];
                        if !b.is_zero() {
                            out[i * d + j] = out[i * d + j] + a * b;
                        }
                    }
                }
            }
            DenseMatrix { dim: d, data: out }
        }

        pub fn adjoint(&self) -> DenseMatrix {
            let d = self.dim;
            let mut out = vec![Cyclo8::ZERO; d * d];
            for i in 0..d {
                for j in 0..d {
                    out[j * d + i] = self.data[i * d + j].conj();
                }
            }
            DenseMatrix { dim: d, data: out }
        }

        pub fn scale(&self, c: Cyclo8) -> DenseMatrix {
            DenseMatrix { dim: self.dim, data: self.data.iter().map(|&x| x * c).collect() }
        }

        pub fn column(&self, j: usize) -> Vec<Cyclo8> {
            (0..self.dim).map(|i| self.get(i, j)).collect()
        }
    }

    pub const MAX_DENSE_QUBITS: usize = 12;

    /// Dense matrix of an operator assembled from its elementary factors.
    pub fn to_matrix(a: &PhasedCssOperator) -> Result<DenseMatrix> {
        let n = a.n();
        if n > MAX_DENSE_QUBITS {
            return Err(Error::Limit(format!("dense matrix limited to {MAX_DENSE_QUBITS} qubits, got {n}")));
        }
        let dim = 1usize << n;
        let mut m = DenseMatrix::identity(dim).scale(Cyclo8::omega_pow(a.global() as i64));
        let xmask: usize = a.xpart().iter_ones().map(|q| 1 << q).sum();
        m = m.matmul(&DenseMatrix::permutation(dim, |j| j ^ xmask));
        for (q, &l) in a.linear().iter().enumerate() {
            for _ in 0..l {
                m = m.matmul(&s_matrix(n, q));
            }
        }
        for &(p, q) in a.quad() {
            m = m.matmul(&cz_matrix(n, p, q));
        }
        Ok(m)
    }

    pub fn s_matrix(n: usize, q: usize) -> DenseMatrix {
        DenseMatrix::diagonal(&(0..1usize << n).map(|z| if z >> q & 1 == 1 { Cyclo8::omega_pow(2) } else { Cyclo8::ONE }).collect::<Vec<_>>())
    }

    pub fn t_matrix(n: usize, q: usize) -> DenseMatrix {
        DenseMatrix::diagonal(&(0..1usize << n).map(|z| if z >> q & 1 == 1 { Cyclo8::omega_pow(1) } else { Cyclo8::ONE }).collect::<Vec<_>>())
    }

    pub fn cz_matrix(n: usize, p: usize, q: usize) -> DenseMatrix {
        DenseMatrix::diagonal(
            &(0..1usize << n).map(|z| if (z >> p) & (z >> q) & 1 == 1 { -Cyclo8::ONE } else { Cyclo8::ONE }).collect::<Vec<_>>(),
        )
    }

    pub fn ccz_matrix(n: usize, i: usize, j: usize, k: usize) -> DenseMatrix {
        DenseMatrix::diagonal(
            &(0..1usize << n)
                .map(|z| if (z >> i) & (z >> j) & (z >> k) & 1 == 1 { -Cyclo8::ONE } else { Cyclo8::ONE })
                .collect::<Vec<_>>(),
        )
    }

    pub fn cx_matrix(n: usize, c: usize, t: usize) -> DenseMatrix {
        DenseMatrix::permutation(1 << n, |z| if z >> c & 1 == 1 { z ^ (1 << t) } else { z })
    }
}

#[cfg(test)]
mod tests {
    use super::dense::*;
    use super::*;
    use crate::complex::ChainComplex;
    use crate::instances::torus::torus_2d;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat(a: &PhasedCssOperator) -> DenseMatrix {
        to_matrix(a).unwrap()
    }

    fn random_op(rng: &mut ChaCha8Rng, n: usize) -> PhasedCssOperator {
        let quad: Vec<(usize, usize)> =
            (0..n).flat_map(|p| ((p + 1)..n).map(move |q| (p, q))).filter(|_| rng.gen_bool(0.4)).collect();
        PhasedCssOperator::from_parts(
            n,
            rng.gen_range(0..8),
            BitVec::from_support(n, (0..n).filter(|_| rng.gen_bool(0.5))),
            (0..n).map(|_| rng.gen_range(0..4)).collect(),
            quad,
        )
        .unwrap()
    }

    /// √−i X S = ω⁻¹ X S
    fn xs() -> PhasedCssOperator {
        PhasedCssOperator::x_on(1, &[0]).mul(&PhasedCssOperator::s(1, 0, 1)).mul(&PhasedCssOperator::phase(1, 7))
    }

    #[test]
    fn small_products() {
        let a = random_op(&mut ChaCha8Rng::seed_from_u64(1), 3);
        assert_eq!(a.mul(&PhasedCssOperator::identity(3)), a);
        let x0 = PhasedCssOperator::x_on(1, &[0]);
        let z0 = PhasedCssOperator::z_on(1, &[0]);
        assert_eq!(x0.mul(&z0), z0.mul(&x0).mul(&PhasedCssOperator::phase(1, 4)));
        assert!(xs().mul(&xs()).is_identity());
        assert!(matches!(x0.multiply(&PhasedCssOperator::identity(2)), Err(Error::Dimension(_))));
    }

    #[test]
    fn xs_matrix_column() {
        // (ω⁻¹ X S)|0⟩ = ω⁻¹|1⟩
        let m = mat(&xs());
        assert_eq!(m.column(0), vec![Cyclo8::ZERO, Cyclo8::omega_pow(-1)]);
        assert!(xs().is_hermitian_involution());
        assert!(!PhasedCssOperator::s(1, 0, 1).is_hermitian_involution());
        assert!(PhasedCssOperator::pauli(2, 2, &BitVec::unit(2, 0), &BitVec::unit(2, 1)).is_hermitian_involution());
    }

    #[test]
    fn commutator_cases() {
        let cz = PhasedCssOperator::cz(2, 0, 1);
        let x0 = PhasedCssOperator::x_on(2, &[0]);
        assert!(cz.commutator(&cz).is_identity());
        let c = cz.commutator(&x0);
        assert_eq!(c, PhasedCssOperator::z_on(2, &[1]));
        let oracle = mat(&cz).matmul(&mat(&x0)).matmul(&mat(&cz).adjoint()).matmul(&mat(&x0).adjoint());
        assert_eq!(mat(&c), oracle);
    }

    #[test]
    fn ccz_commutator_with_x_on_third_copy() {
        let x2 = PhasedCssOperator::x_on(3, &[2]);
        let conj = x2.conjugate_by_ccz((0, 1, 2)).unwrap();
        // CCZ X₂ CCZ X₂† = CZ₀₁
        let comm = conj.mul(&x2.dagger());
        assert_eq!(comm, PhasedCssOperator::cz(3, 0, 1));
        let ccz = ccz_matrix(3, 0, 1, 2);
        let oracle = ccz.matmul(&mat(&x2)).matmul(&ccz).matmul(&mat(&x2).adjoint());
        assert_eq!(mat(&comm), oracle);
    }

    #[test]
    fn t_conjugation_phases_match_oracle() {
        let x0 = PhasedCssOperator::x_on(1, &[0]);
        let t = t_matrix(1, 0);
        let plus = x0.conjugate_by_t(0, TSign::Plus);
        assert_eq!(mat(&plus), t.matmul(&mat(&x0)).matmul(&t.adjoint()));
        // frozen: T X T† = ω X S³
        assert_eq!((plus.global(), plus.linear()[0]), (1, 3));
        let minus = x0.conjugate_by_t(0, TSign::Minus);
        assert_eq!(mat(&minus), t.adjoint().matmul(&mat(&x0)).matmul(&t));
        assert_eq!((minus.global(), minus.linear()[0]), (7, 1));
        assert_eq!(minus, xs());
        assert!(PhasedCssOperator::identity(1).conjugate_by_t(0, TSign::Plus).is_identity());
        let z0 = PhasedCssOperator::z_on(1, &[0]);
        assert_eq!(z0.conjugate_by_t(0, TSign::Plus), z0);
    }

    #[test]
    fn ccz_conjugation_cases() {
        let x0 = PhasedCssOperator::x_on(3, &[0]);
        assert_eq!(x0.conjugate_by_ccz((0, 1, 2)).unwrap(), x0.mul(&PhasedCssOperator::cz(3, 1, 2)));
        let z0 = PhasedCssOperator::z_on(3, &[0]);
        assert_eq!(z0.conjugate_by_ccz((0, 1, 2)).unwrap(), z0);
        let x01 = PhasedCssOperator::x_on(3, &[0, 1]);
        let got = x01.conjugate_by_ccz((0, 1, 2)).unwrap();
        let ccz = ccz_matrix(3, 0, 1, 2);
        assert_eq!(mat(&got), ccz.matmul(&mat(&x01)).matmul(&ccz));
        assert!(got.has_cz(1, 2) && got.has_cz(0, 2) && got.linear()[2] == 2);
        assert!(x0.conjugate_by_ccz((0, 0, 1)).is_err());
    }

    #[test]
    fn text_round_trip() {
        let a = PhasedCssOperator::from_text(5, "w^3 X{0,4} S{2:1} CZ{(1,3)}").unwrap();
        assert_eq!(a.to_text(), "w^3 X{0,4} S{2:1} CZ{(1,3)}");
        assert_eq!(PhasedCssOperator::from_text(2, "I").unwrap(), PhasedCssOperator::identity(2));
        assert!(PhasedCssOperator::from_text(2, "X{5}").is_err());
        assert!(PhasedCssOperator::from_text(2, "Y{0}").is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let a = random_op(&mut rng, 6);
            assert_eq!(PhasedCssOperator::from_text(6, &a.to_text()).unwrap(), a);
        }
    }

    #[test]
    fn codespace_triviality_on_torus() {
        let code = CssCode::from_complex(torus_2d(2, 2).unwrap()).unwrap();
        let n = code.n();
        for s in code.x_checks() {
            assert!(PhasedCssOperator::x(n, &s).acts_trivially_on(&code));
        }
        for s in code.z_checks() {
            assert!(PhasedCssOperator::z(n, &s).acts_trivially_on(&code));
        }
        let lx = &code.logical_basis(crate::code::PauliKind::X)[0];
        assert!(!PhasedCssOperator::x(n, lx).acts_trivially_on(&code));
        assert!(PhasedCssOperator::x(n, lx).preserves_codespace(&code));
        assert!(!PhasedCssOperator::x_on(n, &[0]).preserves_codespace(&code));
        assert!(!PhasedCssOperator::phase(n, 4).acts_trivially_on(&code));
    }

    #[test]
    fn triviality_matches_dense_projection() {
        // Small repetition-like code: 3 qubits, Z-checks Z0Z1, Z1Z2, no X-checks.
        let cx = ChainComplex::new(
            vec![0, 3, 2],
            vec![crate::f2la::BitMatrix::zeros(0, 3), crate::f2la::BitMatrix::from_entries(3, 2, [(0, 0), (1, 0), (1, 1), (2, 1)])],
        )
        .unwrap();
        let code = CssCode::from_complex(cx).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..300 {
            let mut a = random_op(&mut rng, 3);
            if rng.gen_bool(0.5) {
                a = PhasedCssOperator::from_parts(3, 0, BitVec::zeros(3), a.linear().to_vec(), a.quad().iter().copied()).unwrap();
            }
            let m = mat(&a);
            // codespace = span{|000⟩, |111⟩}
            let fixes = [0usize, 7].iter().all(|&z| {
                let col = m.column(z);
                (0..8).all(|r| col[r] == if r == z { Cyclo8::ONE } else { Cyclo8::ZERO })
            });
            assert_eq!(a.acts_trivially_on(&code), fixes, "{a}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn homomorphism_against_dense(seed in any::<u64>(), n in 1usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (a, b) = (random_op(&mut rng, n), random_op(&mut rng, n));
            prop_assert_eq!(mat(&a.mul(&b)), mat(&a).matmul(&mat(&b)));
            prop_assert_eq!(mat(&a.dagger()), mat(&a).adjoint());
            prop_assert!(a.mul(&a.dagger()).is_identity());
            let commute = mat(&a).matmul(&mat(&b)) == mat(&b).matmul(&mat(&a));
            prop_assert_eq!(a.commutator(&b).is_identity(), commute);
        }

        #[test]
        fn conjugations_against_dense(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 3;
            let a = random_op(&mut rng, n);
            let q = rng.gen_range(0..n);
            let t = t_matrix(n, q);
            prop_assert_eq!(mat(&a.conjugate_by_t(q, TSign::Plus)), t.matmul(&mat(&a)).matmul(&t.adjoint()));
            prop_assert_eq!(mat(&a.conjugate_by_t(q, TSign::Minus)), t.adjoint().matmul(&mat(&a)).matmul(&t));
            let ccz = ccz_matrix(n, 0, 1, 2);
            prop_assert_eq!(mat(&a.conjugate_by_ccz((2, 0, 1)).unwrap()), ccz.matmul(&mat(&a)).matmul(&ccz));
            let (c, tg) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if c != tg {
                let cx = cx_matrix(n, c, tg);
                prop_assert_eq!(mat(&a.conjugate_by_cx(c, tg)), cx.matmul(&mat(&a)).matmul(&cx));
            }
        }

        #[test]
        fn product_is_associative(seed in any::<u64>(), n in 1usize..=6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (a, b, c) = (random_op(&mut rng, n), random_op(&mut rng, n), random_op(&mut rng, n));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }
    }
}
