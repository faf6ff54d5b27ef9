//! Higher-form transversal gates.
//!
//! A gate of form degree `h` is a gate complex together with one on-site
//! operator per basis element of `C_h`. The operators act on the qubits of
//! one or two target codes laid out back to back, and a cocycle
//! `c ∈ ker δ_{h+1}` acts as `U(c) = Π_s U_s^{c_s}`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::code::CssCode;
use crate::complex::{ChainComplex, HomologyKind};
use crate::error::{Error, Result};
use crate::f2la::{self, BitMatrix, BitVec};
use crate::opalg::{PhasedCssOperator, TSign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SiteKind {
    PauliX,
    PauliZ,
    Cz,
    Xs,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sparsity {
    pub max_site_support: usize,
    pub max_qubit_fanin: usize,
}

#[derive(Clone, Debug)]
pub struct HigherFormGate {
    h: usize,
    gate_complex: ChainComplex,
    sites: Vec<PhasedCssOperator>,
    targets: Vec<CssCode>,
    combined: CssCode,
    embedding: Vec<Vec<usize>>,
    kind: SiteKind,
    sparsity: Sparsity,
    strongly_transversal: bool,
}

/// Outcome of the `(Im δ₁⁽⁰⁾ ∘ Im δ₁⁽¹⁾) · Im δ₁⁽²⁾ = 0` test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CzReport {
    pub triples_checked: usize,
    /// `(gate generator, check of target 0, check of target 1)`.
    pub violations: Vec<(usize, usize, usize)>,
    /// Whether every cocycle basis element preserves the joint codespace symbolically.
    pub cocycles_preserve_codespace: bool,
}

impl CzReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct XsReport {
    pub triples_checked: usize,
    /// `(gate generator, check, check)` with odd triple overlap.
    pub overlap_violations: Vec<(usize, usize, usize)>,
    /// `(gate generator, check)` whose overlap region breaks the XS-count parity.
    pub parity_violations: Vec<(usize, usize)>,
    pub cocycles_preserve_codespace: bool,
}

impl XsReport {
    pub fn passed(&self) -> bool {
        self.overlap_violations.is_empty() && self.parity_violations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cleaning {
    /// `b` with `c + δ_h b` vanishing on the region.
    Witness(BitVec),
    NotCleanable,
}

#[derive(Serialize, Deserialize)]
pub struct GateExport {
    pub h: usize,
    pub kind: SiteKind,
    pub gate_complex: ChainComplex,
    pub sites: BTreeMap<usize, String>,
    pub embedding: Vec<Vec<usize>>,
}

impl HigherFormGate {
    /// Validates and assembles a gate. `embedding[s]` lists the target qubits identified with site `s`.
    pub fn new(
        h: usize,
        gate_complex: ChainComplex,
        sites: Vec<PhasedCssOperator>,
        targets: Vec<CssCode>,
        embedding: Vec<Vec<usize>>,
        kind: SiteKind,
    ) -> Result<Self> {
        gate_complex.validate().into_result()?;
        if targets.is_empty() || targets.len() > 2 {
            return Err(Error::InvalidGate(format!("expected one or two target codes, got {}", targets.len())));
        }
        if sites.len() != gate_complex.dim(h) {
            return Err(Error::InvalidGate(format!("{} site operators for {} cells of grade {h}", sites.len(), gate_complex.dim(h))));
        }
        if !embedding.is_empty() && embedding.len() != sites.len() {
            return Err(Error::InvalidGate("embedding length differs from site count".into()));
        }
        let parts: Vec<ChainComplex> = targets.iter().map(|t| t.complex().truncate(2)).collect();
        let combined = CssCode::from_complex(ChainComplex::direct_sum(&parts)?)?;
        let n = combined.n();
        for (s, op) in sites.iter().enumerate() {
            if op.n() != n {
                return Err(Error::InvalidGate(format!("site {s} acts on {} qubits, targets have {n}", op.n())));
            }
            if !op.is_hermitian_involution() {
                return Err(Error::InvalidGate(format!("site {s} operator {op} is not a Hermitian involution")));
            }
        }
        if embedding.iter().flatten().any(|&q| q >= n) {
            return Err(Error::InvalidGate("embedding refers to a qubit outside the targets".into()));
        }
        let supports: Vec<Vec<usize>> = sites.iter().map(|s| s.support()).collect();
        let mut on_qubit: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (s, sup) in supports.iter().enumerate() {
            for &q in sup {
                on_qubit[q].push(s);
            }
        }
        let mut checked = BTreeSet::new();
        for list in &on_qubit {
            for (i, &a) in list.iter().enumerate() {
                for &b in &list[i + 1..] {
                    if checked.insert((a, b)) && !sites[a].commutator(&sites[b]).is_identity() {
                        return Err(Error::InvalidGate(format!("site operators {a} and {b} do not commute")));
                    }
                }
            }
        }
        let sparsity = Sparsity {
            max_site_support: supports.iter().map(Vec::len).max().unwrap_or(0),
            max_qubit_fanin: on_qubit.iter().map(Vec::len).max().unwrap_or(0),
        };
        let mut gate = Self { h, gate_complex, sites, targets, combined, embedding, kind, sparsity, strongly_transversal: false };
        gate.strongly_transversal = gate.check_strong_transversality();
        Ok(gate)
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn gate_complex(&self) -> &ChainComplex {
        &self.gate_complex
    }

    pub fn sites(&self) -> &[PhasedCssOperator] {
        &self.sites
    }

    pub fn targets(&self) -> &[CssCode] {
        &self.targets
    }

    /// All targets as one code on the concatenated register.
    pub fn combined_code(&self) -> &CssCode {
        &self.combined
    }

    /// First qubit of target `i` in the concatenated register.
    pub fn offset(&self, i: usize) -> usize {
        self.targets[..i].iter().map(CssCode::n).sum()
    }

    pub fn num_qubits(&self) -> usize {
        self.combined.n()
    }

    pub fn embedding(&self) -> &[Vec<usize>] {
        &self.embedding
    }

    pub fn kind(&self) -> SiteKind {
        self.kind
    }

    pub fn sparsity(&self) -> Sparsity {
        self.sparsity
    }

    pub fn is_strongly_transversal(&self) -> bool {
        self.strongly_transversal
    }

    /// Every site is a single-qubit Clifford conjugate of `X`, so a layer of
    /// local rotations followed by controlled-X gates disentangles the Gauss law.
    pub fn is_x_conjugate(&self) -> bool {
        matches!(self.kind, SiteKind::PauliX | SiteKind::Xs)
    }

    /// `c ∈ ker δ_{h+1}`.
    pub fn is_cocycle(&self, c: &BitVec) -> bool {
        c.len() == self.sites.len() && self.gate_complex.coboundary(self.h + 1).mul_vec(c).is_zero()
    }

    /// `U(c)` for a cocycle `c`.
    pub fn gate_for_cocycle(&self, c: &BitVec) -> Result<PhasedCssOperator> {
        if c.len() != self.sites.len() {
            return Err(Error::Dimension(format!("cochain has length {}, gate has {} sites", c.len(), self.sites.len())));
        }
        if !self.is_cocycle(c) {
            return Err(Error::InvalidGate("cochain is not a cocycle".into()));
        }
        Ok(self.partial(c))
    }

    /// `Π_{s ∈ c} U_s` for any cochain, cocycle or not.
    pub fn partial(&self, c: &BitVec) -> PhasedCssOperator {
        c.iter_ones().fold(PhasedCssOperator::identity(self.num_qubits()), |acc, s| acc.mul(&self.sites[s]))
    }

    /// Basis of `H^h` of the gate complex.
    pub fn cohomology_reps(&self) -> Vec<BitVec> {
        self.gate_complex.homology_basis(self.h, HomologyKind::Cohomology).representatives
    }

    /// Does `U(c)` preserve the joint codespace for every `c` in a basis of `ker δ_{h+1}`?
    pub fn cocycles_preserve_codespace(&self) -> bool {
        let z_basis = f2la::kernel_basis(&self.combined.hz());
        f2la::kernel_basis(&self.gate_complex.coboundary(self.h + 1))
            .iter()
            .all(|c| self.partial(c).preserves_codespace_given(&self.combined, &z_basis))
    }

    fn check_strong_transversality(&self) -> bool {
        let Some(first) = self.sites.first() else {
            return false;
        };
        let local = |op: &PhasedCssOperator| -> Option<(u8, bool, u8)> {
            let sup = op.support();
            if sup.len() != 1 || !op.quad().is_empty() {
                return None;
            }
            Some((op.global(), op.xpart().get(sup[0]), op.linear()[sup[0]]))
        };
        let Some(shape) = local(first) else {
            return false;
        };
        if self.sites.iter().any(|s| local(s) != Some(shape)) || self.targets.len() != 1 || !shape.1 {
            return false;
        }
        // Logical action: U(ℓ_i) must carry the X-coordinates of the i-th logical qubit only.
        let code = &self.targets[0];
        let reps = self.cohomology_reps();
        reps.len() == code.k()
            && reps.iter().enumerate().all(|(i, l)| {
                let u = self.partial(l);
                code.x_logical_coords(u.xpart()) == BitVec::unit(code.k(), i)
            })
    }

    /// Site-to-qubit table `embedding[s][j]` localized to target `j`.
    fn local_embedding(&self, width: usize) -> Result<Vec<Vec<usize>>> {
        if self.embedding.len() != self.sites.len() || self.embedding.iter().any(|e| e.len() != width) {
            return Err(Error::Unsupported(format!("condition needs {width} embedded qubit(s) per site")));
        }
        Ok(self
            .embedding
            .iter()
            .map(|e| e.iter().enumerate().map(|(j, &q)| q - self.offset(j.min(self.targets.len() - 1))).collect())
            .collect())
    }

    /// Checks `(Im δ₁⁽⁰⁾ ∘ Im δ₁⁽¹⁾) · Im δ₁⁽²⁾ = 0` over all generator triples.
    pub fn validate_codespace_cz(&self) -> Result<CzReport> {
        if self.kind != SiteKind::Cz || self.targets.len() != 2 || self.h != 1 {
            return Err(Error::Unsupported("CZ condition needs a 1-form CZ gate on two targets".into()));
        }
        let n0 = self.targets[0].n();
        let gens = self.gate_complex.coboundary(1).columns();
        let xa = self.targets[0].x_checks();
        let xb: Vec<BitVec> = self.targets[1].x_checks().iter().map(|b| BitVec::zeros(n0).concat(b)).collect();
        let mut violations = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            let u = g.iter_ones().fold(PhasedCssOperator::identity(self.num_qubits()), |acc, s| acc.mul(&self.sites[s]));
            // CZ pairs with one end in each copy, oriented copy 0 → copy 1
            let pairs: Vec<(usize, usize)> = u.quad().iter().filter(|&&(p, q)| p < n0 && q >= n0).copied().collect();
            for (j, a) in xa.iter().enumerate() {
                let hit: Vec<usize> = pairs.iter().filter(|&&(p, _)| a.get(p)).map(|&(_, q)| q).collect();
                if hit.is_empty() {
                    continue;
                }
                for (k, b) in xb.iter().enumerate() {
                    if hit.iter().filter(|&&q| b.get(q)).count() % 2 == 1 {
                        violations.push((i, j, k));
                    }
                }
            }
        }
        Ok(CzReport {
            triples_checked: gens.len() * xa.len() * xb.len(),
            violations,
            cocycles_preserve_codespace: self.cocycles_preserve_codespace(),
        })
    }

    /// Checks the XS overlap condition and the XS-count parity of every overlap region.
    pub fn validate_codespace_xs(&self) -> Result<XsReport> {
        if self.kind != SiteKind::Xs || self.targets.len() != 1 || self.h != 1 {
            return Err(Error::Unsupported("XS condition needs a 1-form XS gate on one target".into()));
        }
        let emb = self.local_embedding(1)?;
        let is_xs: Vec<bool> = self.sites.iter().zip(&emb).map(|(op, e)| op.linear()[e[0]] == 1).collect();
        let gens = self.gate_complex.coboundary(1).columns();
        let checks = self.targets[0].x_checks();
        let mut overlap_violations = Vec::new();
        let mut parity_violations = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            for (j, a) in checks.iter().enumerate() {
                let region: Vec<usize> = g.iter_ones().filter(|&s| a.get(emb[s][0])).collect();
                if region.is_empty() {
                    continue;
                }
                for (k, b) in checks.iter().enumerate() {
                    if region.iter().filter(|&&s| b.get(emb[s][0])).count() % 2 == 1 {
                        overlap_violations.push((i, j, k));
                    }
                }
                let xs = region.iter().filter(|&&s| is_xs[s]).count();
                if region.len() % 2 == 1 || xs % 2 != (region.len() / 2) % 2 {
                    parity_violations.push((i, j));
                }
            }
        }
        Ok(XsReport {
            triples_checked: gens.len() * checks.len() * checks.len(),
            overlap_violations,
            parity_violations,
            cocycles_preserve_codespace: self.cocycles_preserve_codespace(),
        })
    }

    /// `b ∈ C_{h−1}` such that `c + δ_h b` vanishes on `region`, if one exists.
    pub fn cleanability_witness(&self, region: &[usize], c: &BitVec) -> Result<Cleaning> {
        if !self.is_cocycle(c) {
            return Err(Error::InvalidGate("cochain is not a cocycle".into()));
        }
        if let Some(&s) = region.iter().find(|&&s| s >= self.sites.len()) {
            return Err(Error::Dimension(format!("region site {s} out of range")));
        }
        let target = c.select(region);
        if target.is_zero() {
            return Ok(Cleaning::Witness(BitVec::zeros(self.gate_complex.dim(self.h.wrapping_sub(1)))));
        }
        if self.h == 0 {
            return Ok(Cleaning::NotCleanable);
        }
        let delta = self.gate_complex.coboundary(self.h).select_rows(region);
        Ok(match f2la::solve(&delta, &target) {
            Ok(b) => Cleaning::Witness(b),
            Err(_) => Cleaning::NotCleanable,
        })
    }

    pub fn export(&self) -> GateExport {
        GateExport {
            h: self.h,
            kind: self.kind,
            gate_complex: self.gate_complex.clone(),
            sites: self.sites.iter().enumerate().map(|(i, s)| (i, s.to_text())).collect(),
            embedding: self.embedding.clone(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.export()).expect("plain data serializes")
    }

    /// Rebuilds a gate from its interchange form and target codes.
    pub fn from_export(ex: GateExport, targets: Vec<CssCode>) -> Result<Self> {
        let n: usize = targets.iter().map(CssCode::n).sum();
        let dim = ex.gate_complex.dim(ex.h);
        if ex.sites.len() != dim || ex.sites.keys().copied().ne(0..dim) {
            return Err(Error::Parse(format!("expected sites 0..{dim}")));
        }
        let sites = ex.sites.values().map(|t| PhasedCssOperator::from_text(n, t)).collect::<Result<Vec<_>>>()?;
        Self::new(ex.h, ex.gate_complex, sites, targets, ex.embedding, ex.kind)
    }
}

/// `ω^phase · X̄(x) · Z̄(z)` in a chosen logical basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogicalPauli {
    pub phase: u8,
    pub x: BitVec,
    pub z: BitVec,
}

impl LogicalPauli {
    pub fn x(k: usize, i: usize) -> Self {
        Self { phase: 0, x: BitVec::unit(k, i), z: BitVec::zeros(k) }
    }

    pub fn z(k: usize, i: usize) -> Self {
        Self { phase: 0, x: BitVec::zeros(k), z: BitVec::unit(k, i) }
    }

    pub fn times_z(mut self, i: usize) -> Self {
        self.z.flip(i);
        self
    }
}

/// Conjugation action `P ↦ U P U†` on the logical basis `xs`, `zs`
/// (which must pair to the identity): images of `X̄_0..`, then `Z̄_0..`.
pub fn logical_action(u: &PhasedCssOperator, code: &CssCode, xs: &[BitVec], zs: &[BitVec]) -> Result<Vec<LogicalPauli>> {
    let n = code.n();
    let k = xs.len();
    if zs.len() != k || (0..k).any(|i| (0..k).any(|j| xs[i].dot(&zs[j]) != (i == j))) {
        return Err(Error::InvalidCode("logical bases do not pair to the identity".into()));
    }
    let z_basis = f2la::kernel_basis(&code.hz());
    let trivial = |op: &PhasedCssOperator| op.acts_trivially_given(code, &z_basis);
    let ud = u.dagger();
    let mut out = Vec::with_capacity(2 * k);
    let logicals = xs.iter().map(|x| PhasedCssOperator::x(n, x)).chain(zs.iter().map(|z| PhasedCssOperator::z(n, z)));
    for p in logicals {
        let w = u.mul(&p).mul(&ud);
        let a = BitVec::from_bools(&zs.iter().map(|z| z.dot(w.xpart())).collect::<Vec<_>>());
        let rep = a.iter_ones().fold(BitVec::zeros(n), |acc, i| acc.xor(&xs[i]));
        let r = PhasedCssOperator::x(n, &rep).mul(&w);
        if !code.is_x_stabilizer(r.xpart()) {
            return Err(Error::CheckFailed("image leaves the logical X span".into()));
        }
        let rd = r.dagger();
        let mut b = BitVec::zeros(k);
        for (i, x) in xs.iter().enumerate() {
            let xo = PhasedCssOperator::x(n, x);
            let c = r.mul(&xo).mul(&rd).mul(&xo);
            if trivial(&c) {
                continue;
            }
            if trivial(&c.mul(&PhasedCssOperator::phase(n, 4))) {
                b.set(i, true);
            } else {
                return Err(Error::CheckFailed("image is not a logical Pauli".into()));
            }
        }
        let zrep = b.iter_ones().fold(BitVec::zeros(n), |acc, i| acc.xor(&zs[i]));
        let q = r.mul(&PhasedCssOperator::z(n, &zrep));
        let phase = (0..8u8)
            .find(|&g| trivial(&q.mul(&PhasedCssOperator::phase(n, (8 - g) % 8))))
            .ok_or_else(|| Error::CheckFailed("image is not a logical Pauli up to phase".into()))?;
        out.push(LogicalPauli { phase, x: a, z: b });
    }
    Ok(out)
}

/// 1-form CZ gate across copies 1 and 2 obtained from transversal CCZ on three copies of `code`.
///
/// Fails unless CCZ preserves the three-copy codespace, i.e. unless
/// `Π_{q ∈ x} CZ(q, q')` acts trivially on two copies for every X-check `x`.
pub fn derive_from_ccz(code: &CssCode) -> Result<HigherFormGate> {
    let n = code.n();
    let pair = CssCode::from_complex(ChainComplex::direct_sum(&[code.complex().truncate(2), code.complex().truncate(2)])?)?;
    let z_basis = f2la::kernel_basis(&pair.hz());
    for (i, x) in code.x_checks().iter().enumerate() {
        let w = x.iter_ones().fold(PhasedCssOperator::identity(2 * n), |acc, q| acc.mul(&PhasedCssOperator::cz(2 * n, q, n + q)));
        if !w.acts_trivially_given(&pair, &z_basis) {
            return Err(Error::CheckFailed(format!("transversal CCZ does not preserve the codespace (X-check {i})")));
        }
    }
    let sites = (0..n).map(|q| PhasedCssOperator::cz(2 * n, q, n + q)).collect();
    let embedding = (0..n).map(|q| vec![q, n + q]).collect();
    HigherFormGate::new(1, code.complex().clone(), sites, vec![code.clone(), code.clone()], embedding, SiteKind::Cz)
}

/// 1-form XS gate from conjugating X-type logicals by `T` on `black` and `T†` on `white`.
pub fn derive_from_t(code: &CssCode, black: &[usize], white: &[usize]) -> Result<HigherFormGate> {
    let n = code.n();
    let mut seen = vec![0u8; n];
    for &q in black.iter().chain(white) {
        if q >= n {
            return Err(Error::InvalidGate(format!("qubit {q} out of range")));
        }
        seen[q] += 1;
    }
    if let Some(q) = seen.iter().position(|&c| c != 1) {
        return Err(Error::InvalidGate(format!("bipartition covers qubit {q} {} times", seen[q])));
    }
    let black: BTreeSet<usize> = black.iter().copied().collect();
    let sites = (0..n)
        .map(|q| {
            let sign = if black.contains(&q) { TSign::Plus } else { TSign::Minus };
            PhasedCssOperator::x_on(n, &[q]).conjugate_by_t(q, sign)
        })
        .collect();
    let embedding = (0..n).map(|q| vec![q]).collect();
    HigherFormGate::new(1, code.complex().clone(), sites, vec![code.clone()], embedding, SiteKind::Xs)
}

/// The 1-form CZ gate that any two codes on `n` qubits support through the identity embedding.
///
/// Cocycles annihilate `x ∘ y` whenever one of `x`, `y` is an X-check and the
/// other lies in the X-codespace span of its code, so `U(c)` maps X-checks to
/// Z-stabilizers. `C_0` spans the cocycles whose CZ product acts trivially.
pub fn induced_cz_gate(a: &CssCode, b: &CssCode) -> Result<HigherFormGate> {
    let n = a.n();
    if b.n() != n {
        return Err(Error::Dimension(format!("codes on {n} and {} qubits", b.n())));
    }
    let za = f2la::kernel_basis(&a.hz());
    let zb = f2la::kernel_basis(&b.hz());
    let mut products = Vec::new();
    for x in a.x_checks() {
        products.extend(zb.iter().map(|y| x.and(y)));
    }
    for y in b.x_checks() {
        products.extend(za.iter().map(|x| x.and(&y)));
    }
    let d2 = f2la::image_basis(&BitMatrix::from_columns(n, &products));
    let mut constraints = d2.clone();
    for u in &za {
        constraints.extend(zb.iter().map(|v| u.and(v)));
    }
    let trivial = f2la::annihilator(n, &constraints);
    let d1 = BitMatrix::from_columns(n, &trivial).transpose();
    let gate_complex = ChainComplex::new(vec![trivial.len(), n, d2.len()], vec![d1, BitMatrix::from_columns(n, &d2)])?;
    let sites = (0..n).map(|q| PhasedCssOperator::cz(2 * n, q, n + q)).collect();
    let embedding = (0..n).map(|q| vec![q, n + q]).collect();
    HigherFormGate::new(1, gate_complex, sites, vec![a.clone(), b.clone()], embedding, SiteKind::Cz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::cube::cube_code_832;
    use crate::instances::torus::torus_2d;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn torus_code(l: usize) -> CssCode {
        CssCode::from_complex(torus_2d(l, l).unwrap()).unwrap()
    }

    fn x_gate(code: &CssCode) -> HigherFormGate {
        let n = code.n();
        let sites = (0..n).map(|q| PhasedCssOperator::x_on(n, &[q])).collect();
        HigherFormGate::new(1, code.complex().clone(), sites, vec![code.clone()], (0..n).map(|q| vec![q]).collect(), SiteKind::PauliX).unwrap()
    }

    fn cz_on_pair(code: &CssCode, partner: impl Fn(usize) -> usize) -> HigherFormGate {
        let n = code.n();
        let sites = (0..n).map(|q| PhasedCssOperator::cz(2 * n, q, n + partner(q))).collect();
        let embedding = (0..n).map(|q| vec![q, n + partner(q)]).collect();
        HigherFormGate::new(1, code.complex().clone(), sites, vec![code.clone(), code.clone()], embedding, SiteKind::Cz).unwrap()
    }

    fn random_cocycle(g: &HigherFormGate, rng: &mut ChaCha8Rng) -> BitVec {
        let mut c = BitVec::zeros(g.sites().len());
        for b in f2la::kernel_basis(&g.gate_complex().coboundary(2)) {
            if rng.gen_bool(0.5) {
                c.xor_assign(&b);
            }
        }
        c
    }

    #[test]
    fn pauli_x_gate_on_torus() {
        let code = torus_code(2);
        let g = x_gate(&code);
        assert!(g.gate_for_cocycle(&BitVec::zeros(8)).unwrap().is_identity());
        assert!(matches!(g.gate_for_cocycle(&BitVec::unit(8, 0)), Err(Error::InvalidGate(_))));
        for l in g.cohomology_reps() {
            assert_eq!(g.gate_for_cocycle(&l).unwrap(), PhasedCssOperator::x(8, &l));
        }
        assert!(g.is_strongly_transversal());
        assert!(g.is_x_conjugate());
        assert_eq!(g.sparsity(), Sparsity { max_site_support: 1, max_qubit_fanin: 1 });
        assert!(g.cocycles_preserve_codespace());
    }

    #[test]
    fn representation_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let code = cube_code_832().unwrap();
        for g in [x_gate(&torus_code(3)), derive_from_ccz(&code).unwrap()] {
            for _ in 0..50 {
                let (a, b) = (random_cocycle(&g, &mut rng), random_cocycle(&g, &mut rng));
                let lhs = g.gate_for_cocycle(&a.xor(&b)).unwrap();
                let rhs = g.gate_for_cocycle(&a).unwrap().mul(&g.gate_for_cocycle(&b).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn ccz_derivation_on_cube_code() {
        let code = cube_code_832().unwrap();
        let g = derive_from_ccz(&code).unwrap();
        let r = g.validate_codespace_cz().unwrap();
        assert!(r.passed() && r.cocycles_preserve_codespace);
        assert_eq!(r.triples_checked, 1);
        assert!(!g.is_x_conjugate());
        assert_eq!(g.sparsity(), Sparsity { max_site_support: 2, max_qubit_fanin: 1 });
        // U(face) is a logical CZ-type operator, not a stabilizer
        let face = BitVec::from_support(8, [0, 2, 4, 6]);
        let u = g.gate_for_cocycle(&face).unwrap();
        assert!(u.preserves_codespace(g.combined_code()));
        assert!(!u.acts_trivially_on(g.combined_code()));
        assert!(g.gate_for_cocycle(&BitVec::ones(8)).unwrap().acts_trivially_on(g.combined_code()));
    }

    #[test]
    fn ccz_on_identical_torus_copies_is_rejected() {
        assert!(matches!(derive_from_ccz(&torus_code(2)), Err(Error::CheckFailed(_))));
        // the generator-level condition holds; only cohomologically nontrivial cocycles break the codespace
        let r = cz_on_pair(&torus_code(2), |q| q).validate_codespace_cz().unwrap();
        assert!(r.passed());
        assert!(!r.cocycles_preserve_codespace);
    }

    #[test]
    fn mis_embedded_cz_sites_fail() {
        let code = torus_code(3);
        // edge 0 lies in the star of vertex 0, edge 4 does not
        assert!(code.x_checks()[0].get(0) && !code.x_checks()[0].get(4));
        let swap = |q: usize| match q {
            0 => 4,
            4 => 0,
            q => q,
        };
        let r = cz_on_pair(&code, swap).validate_codespace_cz().unwrap();
        assert!(!r.passed());
        assert!(r.violations.contains(&(0, 0, 0)));
    }

    #[test]
    fn induced_gate_on_two_codes() {
        let a = torus_code(2);
        let b = CssCode::from_complex(torus_2d(2, 2).unwrap().dual()).unwrap();
        let g = induced_cz_gate(&a, &b).unwrap();
        let r = g.validate_codespace_cz().unwrap();
        assert!(r.passed() && r.cocycles_preserve_codespace);
        for l in g.cohomology_reps() {
            assert!(!g.gate_for_cocycle(&l).unwrap().acts_trivially_on(g.combined_code()));
        }
    }

    #[test]
    fn xs_conditions_on_cube_code() {
        let code = cube_code_832().unwrap();
        let all: Vec<usize> = (0..8).collect();
        let g = derive_from_t(&code, &all, &[]).unwrap();
        let r = g.validate_codespace_xs().unwrap();
        assert!(r.passed(), "{r:?}");
        let flipped = derive_from_t(&code, &all[1..], &[0]).unwrap();
        let r = flipped.validate_codespace_xs().unwrap();
        assert_eq!(r.parity_violations, vec![(0, 0)]);
        assert!(matches!(derive_from_t(&code, &all[1..], &[]), Err(Error::InvalidGate(_))));
        assert!(matches!(derive_from_t(&code, &all, &[0]), Err(Error::InvalidGate(_))));
        assert!(g.gate_for_cocycle(&BitVec::zeros(8)).unwrap().is_identity());
    }

    #[test]
    fn cleaning() {
        let g = x_gate(&torus_code(3));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let c = random_cocycle(&g, &mut rng);
            for s in 0..18 {
                match g.cleanability_witness(&[s], &c).unwrap() {
                    Cleaning::Witness(b) => {
                        let cleaned = c.xor(&g.gate_complex().coboundary(1).mul_vec(&b));
                        assert!(!cleaned.get(s));
                    }
                    Cleaning::NotCleanable => panic!("site {s} not cleanable"),
                }
            }
        }
        let l = &g.cohomology_reps()[0];
        let off: Vec<usize> = (0..18).filter(|&s| !l.get(s)).collect();
        assert_eq!(g.cleanability_witness(&off, l).unwrap(), Cleaning::Witness(BitVec::zeros(9)));
        let all: Vec<usize> = (0..18).collect();
        assert_eq!(g.cleanability_witness(&all, l).unwrap(), Cleaning::NotCleanable);
    }

    #[test]
    fn export_round_trip() {
        let code = cube_code_832().unwrap();
        let g = derive_from_ccz(&code).unwrap();
        let text = serde_json::to_string(&g.export()).unwrap();
        let back = HigherFormGate::from_export(serde_json::from_str(&text).unwrap(), vec![code.clone(), code]).unwrap();
        assert_eq!(back.sites(), g.sites());
        assert_eq!(back.to_json(), g.to_json());
        assert_eq!(g.to_json()["sites"]["3"], "CZ{(3,11)}");
    }

    #[test]
    fn non_commuting_sites_are_rejected() {
        let code = torus_code(2);
        let mut sites: Vec<PhasedCssOperator> = (0..8).map(|q| PhasedCssOperator::x_on(8, &[q])).collect();
        sites[1] = PhasedCssOperator::z_on(8, &[0]);
        let err = HigherFormGate::new(1, code.complex().clone(), sites, vec![code], vec![], SiteKind::Custom);
        assert!(matches!(err, Err(Error::InvalidGate(_))));
    }
}
