//! Higher-form gauging measurement, the gauged code and its checks.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::code::CssCode;
use crate::complex::ChainComplex;
use crate::error::{Error, Result};
use crate::f2la::{self, BitMatrix, BitVec, CosetWeight, XorBasis};
use crate::faults::FaultPattern;
use crate::hfgate::{HigherFormGate, SiteKind};
use crate::instances::hggt::Hggt;
use crate::opalg::{PhasedCssOperator, TSign};
use crate::sim::{QuantumState, StateVector};

/// Weight budget for the minimum-weight string search on large ancilla kernels.
const STRING_BUDGET: usize = 6;

#[derive(Clone, Debug)]
pub struct GaugingPlan {
    gate: HigherFormGate,
    reps: Vec<BitVec>,
    ancilla_class: BitVec,
    extended: ChainComplex,
    /// Gauged forms supplied by hand, keyed by X-check index of the combined code.
    overrides: BTreeMap<usize, PhasedCssOperator>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GaugingOutcome {
    /// `σ_i` per cohomology representative.
    pub sigma: Vec<i8>,
    /// Recorded `A_v` outcomes.
    pub eps: Vec<i8>,
    /// Hyperedge Z outcomes (`true` = −1).
    pub x: BitVec,
    pub byproduct: BitVec,
    /// `∂_h` applied to the flipped `ε` pattern.
    pub detector_syndrome: BitVec,
    pub detectors_ok: bool,
}

impl GaugingPlan {
    /// Plan over the gate's cohomology basis with hyperedges starting in `|0⟩`.
    pub fn new(gate: HigherFormGate) -> Result<Self> {
        let h = gate.h();
        let cx = gate.gate_complex();
        let extended = if cx.top() >= h + 2 { cx.clone() } else { cx.truncate(h + 1).extend_with_cycle_space() };
        let reps = gate.cohomology_reps();
        let ancilla_class = BitVec::zeros(cx.dim(h + 1));
        Ok(Self { gate, reps, ancilla_class, extended, overrides: BTreeMap::new() })
    }

    /// HGGT plan with the dressed X-checks in place of the generic gauging.
    pub fn hggt(h: &Hggt) -> Result<Self> {
        let mut plan = Self::new(h.gate.clone())?;
        let nr = h.red.vertices.len();
        for (i, &v) in h.red.vertices.iter().chain(&h.green.vertices).enumerate() {
            debug_assert!(i < nr || h.green.vertices[i - nr] == v);
            plan.overrides.insert(i, h.gauged_x_check(v)?);
        }
        Ok(plan)
    }

    /// Hyperedges start in `|ℓ⟩` instead of `|0⟩`.
    pub fn with_ancilla_class(mut self, class: BitVec) -> Result<Self> {
        let h = self.gate.h();
        if class.len() != self.num_ancillas() {
            return Err(Error::Dimension(format!("ancilla class has length {}, expected {}", class.len(), self.num_ancillas())));
        }
        if !self.extended.coboundary(h + 2).mul_vec(&class).is_zero() {
            return Err(Error::InvalidGate("ancilla class is not a cocycle".into()));
        }
        self.ancilla_class = class;
        Ok(self)
    }

    pub fn with_reps(mut self, reps: Vec<BitVec>) -> Result<Self> {
        if reps.iter().any(|c| !self.gate.is_cocycle(c)) {
            return Err(Error::InvalidGate("representative is not a cocycle".into()));
        }
        self.reps = reps;
        Ok(self)
    }

    pub fn gate(&self) -> &HigherFormGate {
        &self.gate
    }

    pub fn reps(&self) -> &[BitVec] {
        &self.reps
    }

    pub fn ancilla_class(&self) -> &BitVec {
        &self.ancilla_class
    }

    pub fn extended_complex(&self) -> &ChainComplex {
        &self.extended
    }

    pub fn num_data(&self) -> usize {
        self.gate.num_qubits()
    }

    pub fn num_ancillas(&self) -> usize {
        self.gate.gate_complex().dim(self.gate.h() + 1)
    }

    pub fn num_sites(&self) -> usize {
        self.gate.sites().len()
    }

    pub fn total_qubits(&self) -> usize {
        self.num_data() + self.num_ancillas()
    }

    /// `δ_{h+1}` of the gate complex.
    pub fn hyperedge_map(&self) -> BitMatrix {
        self.gate.gate_complex().coboundary(self.gate.h() + 1)
    }

    /// `A_v = U_v ⊗ X(δ_{h+1} v)`.
    pub fn gauss_law(&self, v: usize) -> PhasedCssOperator {
        let total = self.total_qubits();
        let anc = self.hyperedge_map().mul_vec(&BitVec::unit(self.num_sites(), v));
        self.gate.sites()[v].shift(total, 0).mul(&PhasedCssOperator::x(self.num_ancillas(), &anc).shift(total, self.num_data()))
    }

    pub fn gauss_law_product(&self, c: &BitVec) -> PhasedCssOperator {
        c.iter_ones().fold(PhasedCssOperator::identity(self.total_qubits()), |acc, v| acc.mul(&self.gauss_law(v)))
    }
}

/// Algorithm 1 on a codespace state of the data register.
pub fn run_algorithm1<S: QuantumState, R: Rng>(plan: &GaugingPlan, state: &mut S, rng: &mut R) -> Result<GaugingOutcome> {
    run_with_pattern(plan, state, rng, &FaultPattern::default())
}

pub(crate) fn run_with_pattern<S: QuantumState, R: Rng>(plan: &GaugingPlan, state: &mut S, rng: &mut R, faults: &FaultPattern) -> Result<GaugingOutcome> {
    let n = plan.num_data();
    let m = plan.num_ancillas();
    let total = n + m;
    if state.num_qubits() != n {
        return Err(Error::Dimension(format!("state has {} qubits, plan expects {n}", state.num_qubits())));
    }
    let faults = faults.normalized(plan)?;
    state.append_zeros(m)?;
    let init = plan.ancilla_class.xor(&faults.hyperedge_x);
    if !init.is_zero() {
        state.apply(&PhasedCssOperator::x(m, &init).shift(total, n))?;
    }
    for &(q, p) in &faults.vertex_errors {
        state.apply(&p.on(total, q))?;
    }
    let mut eps = Vec::with_capacity(plan.num_sites());
    for v in 0..plan.num_sites() {
        let e = state.measure(&plan.gauss_law(v), rng)?;
        eps.push(if faults.meas_flips.get(v) { -e } else { e });
    }
    let mut x = BitVec::zeros(m);
    for e in 0..m {
        if state.measure(&PhasedCssOperator::z_on(total, &[n + e]), rng)? < 0 {
            x.set(e, true);
        }
    }
    let h = plan.gate.h();
    let flips = BitVec::from_bools(&eps.iter().map(|&e| e < 0).collect::<Vec<_>>());
    let detector_syndrome = plan.gate.gate_complex().boundary(h).mul_vec(&flips);
    let sigma = plan.reps.iter().map(|l| if l.dot(&flips) { -1 } else { 1 }).collect();
    let byproduct = f2la::solve(&plan.hyperedge_map(), &x.xor(&plan.ancilla_class))
        .map_err(|_| Error::DetectedFault("hyperedge outcomes are not a coboundary".into()))?;
    if !byproduct.is_zero() {
        state.apply(&plan.gate.partial(&byproduct).shift(total, 0))?;
    }
    state.discard(n, &x)?;
    Ok(GaugingOutcome { sigma, eps, x, byproduct, detectors_ok: detector_syndrome.is_zero(), detector_syndrome })
}

/// `Π_i (1 + σ_i U(ℓ_i))/2`.
#[derive(Clone, Debug)]
pub struct ProjectorProduct {
    pub factors: Vec<(i8, PhasedCssOperator)>,
}

impl ProjectorProduct {
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        let mut out = state.clone();
        for (s, u) in &self.factors {
            out.project(u, *s)?;
        }
        Ok(out)
    }
}

pub fn expected_projector(plan: &GaugingPlan, sigma: &[i8]) -> Result<ProjectorProduct> {
    if sigma.len() != plan.reps.len() {
        return Err(Error::Dimension(format!("{} outcomes for {} representatives", sigma.len(), plan.reps.len())));
    }
    let factors = plan.reps.iter().zip(sigma).map(|(l, &s)| Ok((s, plan.gate.gate_for_cocycle(l)?))).collect::<Result<_>>()?;
    Ok(ProjectorProduct { factors })
}

/// Checks `Π_v A_v^{c_v} = U(c)` for every basis cocycle; returns how many were checked.
pub fn check_gauss_law(plan: &GaugingPlan) -> Result<usize> {
    let basis = f2la::kernel_basis(&plan.hyperedge_map());
    for c in &basis {
        let lhs = plan.gauss_law_product(c);
        let rhs = plan.gate.gate_for_cocycle(c)?.shift(plan.total_qubits(), 0);
        if lhs != rhs {
            return Err(Error::CheckFailed(format!("Gauss-law product differs from U(c) for c = {:?}", c.support())));
        }
    }
    Ok(basis.len())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Detectors {
    /// One set of `A_v` indices per cell of grade `h−1`.
    pub sets: Vec<Vec<usize>>,
    /// `∂_h`.
    pub check_matrix: BitMatrix,
}

pub fn detectors(plan: &GaugingPlan) -> Detectors {
    let check_matrix = plan.gate.gate_complex().boundary(plan.gate.h());
    let sets = (0..check_matrix.rows()).map(|b| check_matrix.row(b).support()).collect();
    Detectors { sets, check_matrix }
}

/// Which original check a gauged operator comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum CheckRef {
    X(usize),
    Z(usize),
}

#[derive(Clone, Debug)]
pub struct GaugedCode {
    pub gauss: Vec<PhasedCssOperator>,
    pub plaquettes: Vec<PhasedCssOperator>,
    pub gauged: Vec<(CheckRef, PhasedCssOperator)>,
    /// Checks whose commutator with some site is not a sign.
    pub dropped: Vec<CheckRef>,
}

impl GaugedCode {
    pub fn all(&self) -> impl Iterator<Item = &PhasedCssOperator> {
        self.gauss.iter().chain(&self.plaquettes).chain(self.gauged.iter().map(|(_, g)| g))
    }
}

/// Per-site charges of `s`: `χ_v = 1` iff `U_v S U_v† = −S`.
fn charges(gate: &HigherFormGate, s: &PhasedCssOperator) -> Option<BitVec> {
    let n = s.n();
    let minus = PhasedCssOperator::phase(n, 4);
    let sup = s.support();
    let mut chi = BitVec::zeros(gate.sites().len());
    for (v, u) in gate.sites().iter().enumerate() {
        if !u.support().iter().any(|q| sup.binary_search(q).is_ok()) {
            continue;
        }
        let k = u.mul(s).mul(&u.dagger()).mul(&s.dagger());
        if k.is_identity() {
            continue;
        }
        if k == minus {
            chi.set(v, true);
        } else {
            return None;
        }
    }
    Some(chi)
}

/// `𝒢[S] = S ⊗ Z(φ)` with `φ` a minimum-weight solution of `∂_{h+1} φ = χ`.
pub fn gauge_operator(plan: &GaugingPlan, s: &PhasedCssOperator) -> Result<PhasedCssOperator> {
    let n = plan.num_data();
    if s.n() != n {
        return Err(Error::Dimension(format!("operator acts on {} qubits, data has {n}", s.n())));
    }
    let chi = charges(&plan.gate, s).ok_or_else(|| Error::Unsupported("operator spans several charge sectors".into()))?;
    let total = plan.total_qubits();
    let lifted = s.shift(total, 0);
    if chi.is_zero() {
        return Ok(lifted);
    }
    let d = plan.gate.gate_complex().boundary(plan.gate.h() + 1);
    let phi0 = f2la::solve(&d, &chi).map_err(|_| Error::CheckFailed("charge pattern is not a boundary".into()))?;
    let phi = match f2la::coset_min_weight_in_span(&f2la::kernel_basis(&d), &phi0, STRING_BUDGET) {
        CosetWeight::Exact { witness, .. } => witness,
        CosetWeight::Unknown => phi0,
    };
    Ok(lifted.mul(&PhasedCssOperator::z(plan.num_ancillas(), &phi).shift(total, n)))
}

fn pure_z(op: &PhasedCssOperator) -> bool {
    op.is_pauli() && op.xpart().is_zero() && op.global() == 0
}

/// Builds `{A_v}`, `{B_p}` and `{𝒢[S]}` and checks that they commute, exactly or up to Z-type checks.
pub fn gauged_code(plan: &GaugingPlan) -> Result<GaugedCode> {
    let total = plan.total_qubits();
    let n = plan.num_data();
    let h = plan.gate.h();
    let gauss: Vec<PhasedCssOperator> = (0..plan.num_sites()).map(|v| plan.gauss_law(v)).collect();
    let plaquettes: Vec<PhasedCssOperator> = plan
        .extended
        .boundary(h + 2)
        .columns()
        .iter()
        .map(|b| PhasedCssOperator::z(plan.num_ancillas(), b).shift(total, n))
        .collect();
    let code: &CssCode = plan.gate.combined_code();
    let mut gauged = Vec::new();
    let mut dropped = Vec::new();
    let originals = code
        .x_checks()
        .into_iter()
        .enumerate()
        .map(|(i, x)| (CheckRef::X(i), PhasedCssOperator::x(n, &x)))
        .chain(code.z_checks().into_iter().enumerate().map(|(j, z)| (CheckRef::Z(j), PhasedCssOperator::z(n, &z))));
    for (r, s) in originals {
        if let CheckRef::X(i) = r {
            if let Some(g) = plan.overrides.get(&i) {
                gauged.push((r, g.clone()));
                continue;
            }
        }
        match gauge_operator(plan, &s) {
            Ok(g) => gauged.push((r, g)),
            Err(Error::Unsupported(_)) => dropped.push(r),
            Err(e) => return Err(e),
        }
    }
    let out = GaugedCode { gauss, plaquettes, gauged, dropped };
    let all: Vec<&PhasedCssOperator> = out.all().collect();
    let mut z_span = XorBasis::new(total);
    for op in all.iter().filter(|op| pure_z(op)) {
        z_span.push(&op.z_support());
    }
    let supports: Vec<Vec<usize>> = all.iter().map(|op| op.support()).collect();
    let mut on_qubit: Vec<Vec<usize>> = vec![Vec::new(); total];
    for (i, sup) in supports.iter().enumerate() {
        for &q in sup {
            on_qubit[q].push(i);
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for list in &on_qubit {
        for (k, &a) in list.iter().enumerate() {
            for &b in &list[k + 1..] {
                if !seen.insert((a, b)) {
                    continue;
                }
                let c = all[a].commutator(all[b]);
                if c.is_identity() || (pure_z(&c) && z_span.contains(&c.z_support())) {
                    continue;
                }
                return Err(Error::CheckFailed(format!("gauged checks {} and {} do not commute: {}", all[a], all[b], c)));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DisentangleVerdict {
    ProductState,
    NotProductState,
    NotApplicable,
}

#[derive(Clone, Debug)]
pub struct Disentangling {
    /// Per site: the data qubit controlling its CX fan-out.
    pub controls: Vec<usize>,
    /// `(control, hyperedge ancilla)` pairs of the CX layer.
    pub cx: Vec<(usize, usize)>,
    /// Sites that receive a `T` (Plus) or `T†` (Minus) pre-rotation.
    pub rotations: Vec<(usize, TSign)>,
    pub gauss_images: Vec<PhasedCssOperator>,
    pub gauged_images: Vec<(CheckRef, PhasedCssOperator)>,
    pub plaquette_images: Vec<PhasedCssOperator>,
    /// Every `A_v` maps to `X` on its control qubit.
    pub gauss_ok: bool,
    /// Every gauged Z-type check maps to a single `Z` on an ancilla, with sign.
    pub gauged_ok: bool,
    pub verdict: DisentangleVerdict,
}

/// Conjugation by `V = R·W`, with `W` the CX fan-out from each site's qubit
/// to its hyperedges and `R` undoing the site's T-type dressing.
pub fn disentangle_pauli_case(plan: &GaugingPlan) -> Result<Disentangling> {
    let gate = &plan.gate;
    if !gate.is_x_conjugate() {
        return Ok(Disentangling {
            controls: vec![],
            cx: vec![],
            rotations: vec![],
            gauss_images: vec![],
            gauged_images: vec![],
            plaquette_images: vec![],
            gauss_ok: false,
            gauged_ok: false,
            verdict: DisentangleVerdict::NotApplicable,
        });
    }
    let n = plan.num_data();
    let total = plan.total_qubits();
    let mut controls = Vec::with_capacity(plan.num_sites());
    let mut rotations = Vec::new();
    for (v, u) in gate.sites().iter().enumerate() {
        let xs = u.xpart().support();
        if xs.len() != 1 {
            return Err(Error::Unsupported(format!("site {v} is not X-type on a single qubit")));
        }
        controls.push(xs[0]);
        if gate.kind() == SiteKind::Xs {
            // √i X S† comes from T, √−i X S from T†
            let sign = if u.linear()[xs[0]] == 3 { TSign::Plus } else { TSign::Minus };
            rotations.push((xs[0], sign));
        }
    }
    let d = plan.hyperedge_map();
    let cx: Vec<(usize, usize)> = (0..plan.num_sites()).flat_map(|v| d.column_support(v).iter().map(move |&e| (v, e)).collect::<Vec<_>>()).map(|(v, e)| (controls[v], n + e)).collect();
    let conj = |op: &PhasedCssOperator| -> PhasedCssOperator {
        let mut out = op.clone();
        for &(c, t) in &cx {
            out = out.conjugate_by_cx(c, t);
        }
        for &(q, sign) in &rotations {
            let inverse = match sign {
                TSign::Plus => TSign::Minus,
                TSign::Minus => TSign::Plus,
            };
            out = out.conjugate_by_t(q, inverse);
        }
        out
    };
    let gc = gauged_code(plan)?;
    let gauss_images: Vec<PhasedCssOperator> = gc.gauss.iter().map(conj).collect();
    let gauged_images: Vec<(CheckRef, PhasedCssOperator)> = gc.gauged.iter().map(|(r, g)| (*r, conj(g))).collect();
    let plaquette_images: Vec<PhasedCssOperator> = gc.plaquettes.iter().map(conj).collect();
    let gauss_ok = gauss_images.iter().zip(&controls).all(|(img, &q)| *img == PhasedCssOperator::x_on(total, &[q]));
    let gauged_ok = gc.gauged.iter().zip(&gauged_images).all(|((_, g), (_, img))| {
        if !pure_z(g) {
            return true;
        }
        let s = img.z_support();
        pure_z(img) && s.weight() == 1 && s.lowest_one().unwrap() >= n
    });
    let verdict = if gauss_ok && product_state_group(total, gauss_images.iter().chain(gauged_images.iter().map(|(_, g)| g)).chain(&plaquette_images)) {
        DisentangleVerdict::ProductState
    } else {
        DisentangleVerdict::NotProductState
    };
    Ok(Disentangling { controls, cx, rotations, gauss_images, gauged_images, plaquette_images, gauss_ok, gauged_ok, verdict })
}

/// True iff the operators are `+`-signed X- or Z-type Paulis generating
/// `⟨X_q : q ∈ Q_X⟩ × ⟨Z_q : q ∈ Q_Z⟩` with `Q_X ⊔ Q_Z` all qubits.
fn product_state_group<'a>(n: usize, ops: impl Iterator<Item = &'a PhasedCssOperator>) -> bool {
    let mut xs = XorBasis::new(n);
    let mut zs = XorBasis::new(n);
    for op in ops {
        if !op.is_pauli() || op.global() != 0 {
            return false;
        }
        match (op.xpart().is_zero(), op.z_support().is_zero()) {
            (true, _) => {
                zs.push(&op.z_support());
            }
            (false, true) => {
                xs.push(op.xpart());
            }
            (false, false) => return false,
        }
    }
    let qx: Vec<usize> = (0..n).filter(|&q| xs.contains(&BitVec::unit(n, q))).collect();
    let qz: Vec<usize> = (0..n).filter(|&q| zs.contains(&BitVec::unit(n, q))).collect();
    qx.len() == xs.rank() && qz.len() == zs.rank() && qx.len() + qz.len() == n && qx.iter().all(|q| qz.binary_search(q).is_err())
}
