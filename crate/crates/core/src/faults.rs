//! Fault injection into the gauging measurement and the distance checks built on it.

use itertools::Itertools;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{Cheeger, Distance, HomologyKind};
use crate::error::{Error, Result};
use crate::f2la::{self, BitVec, CosetWeight, XorBasis};
use crate::gauging::{expected_projector, run_with_pattern, GaugingOutcome, GaugingPlan};
use crate::opalg::PhasedCssOperator;
use crate::sim::{measure_checks, project_codespace, QuantumState, StateVector, Syndrome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn on(self, n: usize, q: usize) -> PhasedCssOperator {
        let u = BitVec::unit(n, q);
        let z = BitVec::zeros(n);
        match self {
            Pauli::X => PhasedCssOperator::pauli(n, 0, &u, &z),
            Pauli::Y => PhasedCssOperator::pauli(n, 1, &u, &u),
            Pauli::Z => PhasedCssOperator::pauli(n, 0, &z, &u),
        }
    }
}

/// Empty bit vectors stand for "no faults of this type".
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FaultPattern {
    /// `A_v` outcome flips, over `C_h`.
    pub meas_flips: BitVec,
    /// X errors on hyperedges right after initialization, over `C_{h+1}`.
    pub hyperedge_x: BitVec,
    /// Data-qubit Paulis applied after hyperedge initialization.
    pub vertex_errors: Vec<(usize, Pauli)>,
}

impl FaultPattern {
    pub fn none(plan: &GaugingPlan) -> Self {
        Self { meas_flips: BitVec::zeros(plan.num_sites()), hyperedge_x: BitVec::zeros(plan.num_ancillas()), vertex_errors: vec![] }
    }

    pub fn weight(&self) -> usize {
        self.meas_flips.weight() + self.hyperedge_x.weight() + self.vertex_errors.len()
    }

    /// Same pattern with empty vectors padded to the plan's sizes.
    pub(crate) fn normalized(&self, plan: &GaugingPlan) -> Result<Self> {
        let pad = |v: &BitVec, len: usize, what: &str| -> Result<BitVec> {
            match v.len() {
                0 => Ok(BitVec::zeros(len)),
                l if l == len => Ok(v.clone()),
                l => Err(Error::Dimension(format!("{what} has length {l}, expected {len}"))),
            }
        };
        if let Some(&(q, _)) = self.vertex_errors.iter().find(|(q, _)| *q >= plan.num_data()) {
            return Err(Error::Dimension(format!("vertex error on qubit {q} outside the data register")));
        }
        Ok(Self {
            meas_flips: pad(&self.meas_flips, plan.num_sites(), "measurement flip pattern")?,
            hyperedge_x: pad(&self.hyperedge_x, plan.num_ancillas(), "hyperedge error pattern")?,
            vertex_errors: self.vertex_errors.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaultRun {
    /// `None` when the hyperedge outcomes admitted no byproduct.
    pub outcome: Option<GaugingOutcome>,
    /// Syndrome of the final reliable check round.
    pub final_syndrome: Option<Syndrome>,
    pub detected: bool,
}

/// Algorithm 1 with faults, followed by one reliable round of checks on the data.
pub fn run_with_faults<S: QuantumState, R: Rng>(plan: &GaugingPlan, state: &mut S, pattern: &FaultPattern, rng: &mut R) -> Result<FaultRun> {
    match run_with_pattern(plan, state, rng, pattern) {
        Ok(outcome) => {
            let syn = measure_checks(state, plan.gate().combined_code(), 0, rng)?;
            let detected = !outcome.detectors_ok || !syn.is_trivial();
            Ok(FaultRun { outcome: Some(outcome), final_syndrome: Some(syn), detected })
        }
        Err(Error::DetectedFault(_)) => Ok(FaultRun { outcome: None, final_syndrome: None, detected: true }),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MeasDistance {
    pub distance: Distance,
    pub witness: Option<BitVec>,
}

/// Minimum weight of an `A_v` flip pattern that passes every detector yet flips some `σ_i`.
pub fn meas_fault_distance(plan: &GaugingPlan, budget: usize) -> MeasDistance {
    let h = plan.gate().h();
    let dh = plan.gate().gate_complex().boundary(h);
    if plan.reps().is_empty() {
        return MeasDistance { distance: Distance::Infinite, witness: None };
    }
    let n = plan.num_sites();
    for w in 1..=budget.min(n) {
        for support in (0..n).combinations(w) {
            let p = BitVec::from_support(n, support);
            if dh.mul_vec(&p).is_zero() && plan.reps().iter().any(|l| l.dot(&p)) {
                return MeasDistance { distance: Distance::Finite(w), witness: Some(p) };
            }
        }
    }
    MeasDistance { distance: Distance::Unknown, witness: None }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CleaningReport {
    pub phi: Cheeger,
    pub trivial_checked: usize,
    pub nontrivial_checked: usize,
    /// `(c, hyperedge error)` pairs breaking the bound.
    pub violations: Vec<(BitVec, BitVec)>,
}

impl CleaningReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.phi.exact().is_some()
    }
}

fn min_in_coset(kernel: &[BitVec], c: &BitVec) -> Result<BitVec> {
    match f2la::coset_min_weight_in_span(kernel, c, c.len()) {
        CosetWeight::Exact { witness, .. } => Ok(witness),
        CosetWeight::Unknown => Err(Error::Limit("coset too large to clean exactly".into())),
    }
}

/// Checks `|δc| ≥ φ |c̃|` and `2|ℓ + δc| ≥ φ |c̃|` (ℓ a lightest nontrivial
/// hyperedge class representative) for every `c`, or for `samples` random ones
/// when `C_h` is too large to enumerate.
pub fn verify_cleaning_bound(plan: &GaugingPlan, samples: usize, seed: u64) -> Result<CleaningReport> {
    let h = plan.gate().h();
    let cx = plan.gate().gate_complex();
    let delta = cx.coboundary(h + 1);
    let phi = cx.cheeger(h, 24);
    let Some(phi_r) = phi.exact() else {
        return Ok(CleaningReport { phi, trivial_checked: 0, nontrivial_checked: 0, violations: vec![] });
    };
    let n = delta.cols();
    let m = delta.rows();
    let kernel = f2la::kernel_basis(&delta);
    let image = f2la::image_basis(&delta);
    // lightest representative of each nontrivial class of C_{h+1} / Im δ_{h+1}
    let mut span = XorBasis::from_generators(m, &image);
    let complement: Vec<BitVec> = (0..m).map(|j| BitVec::unit(m, j)).filter(|e| span.push(e)).collect();
    let mut classes = Vec::new();
    if complement.len() <= 12 {
        for k in 1u64..(1u64 << complement.len()) {
            let v = complement.iter().enumerate().filter(|(i, _)| k >> i & 1 == 1).fold(BitVec::zeros(m), |a, (_, e)| a.xor(e));
            match f2la::coset_min_weight_in_span(&image, &v, m) {
                CosetWeight::Exact { witness, .. } => classes.push(witness),
                CosetWeight::Unknown => return Err(Error::Limit("hyperedge class too large".into())),
            }
        }
    }
    let chains: Vec<BitVec> = if n <= 20 {
        (1u64..(1u64 << n)).map(|k| BitVec::from_u64(n, k)).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples).map(|_| BitVec::from_bools(&(0..n).map(|_| rng.gen::<bool>()).collect::<Vec<_>>())).collect()
    };
    let mut report = CleaningReport { phi, trivial_checked: 0, nontrivial_checked: 0, violations: vec![] };
    for c in &chains {
        let dc = delta.mul_vec(c);
        if dc.is_zero() {
            continue;
        }
        let ct = min_in_coset(&kernel, c)?;
        report.trivial_checked += 1;
        if Ratio::new(dc.weight(), 1) < phi_r * ct.weight() {
            report.violations.push((c.clone(), dc.clone()));
        }
        for l in &classes {
            let r = l.xor(&dc);
            report.nontrivial_checked += 1;
            if Ratio::new(2 * r.weight(), 1) < phi_r * ct.weight() {
                report.violations.push((c.clone(), r));
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProcedureDistance {
    /// Lightest undetected logical fault found, if any within the budget.
    pub min_weight: Option<usize>,
    pub searched_up_to: usize,
    /// `φ_h · d / 2`.
    pub bound: Option<Ratio<usize>>,
    pub patterns_checked: usize,
    pub witness: Option<FaultPattern>,
}

impl ProcedureDistance {
    pub fn respects_bound(&self) -> bool {
        match (self.min_weight, self.bound) {
            (Some(w), Some(b)) => Ratio::from_integer(w) >= b,
            (None, Some(_)) => true,
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Site {
    Vertex(usize, Pauli),
    Hyperedge(usize),
}

/// Random codespace states of the combined code used as probe inputs.
fn probe_inputs(plan: &GaugingPlan, count: usize, seed: u64) -> Result<Vec<StateVector>> {
    let n = plan.num_data();
    let code = plan.gate().combined_code();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let amps = (0..1usize << n)
                .map(|_| num_complex::Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let mut s = StateVector::from_amplitudes(amps)?;
            project_codespace(&mut s, code, 0, &mut rng)?;
            Ok(s)
        })
        .collect()
}

/// True when some probe run passes every check but ends away from `G_σ|ψ⟩`.
fn is_undetected_logical(plan: &GaugingPlan, pattern: &FaultPattern, inputs: &[StateVector], seeds: &[u64]) -> Result<bool> {
    for input in inputs {
        for &seed in seeds {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = input.clone();
            let run = run_with_faults(plan, &mut s, pattern, &mut rng)?;
            if run.detected {
                continue;
            }
            let outcome = run.outcome.expect("undetected runs have an outcome");
            let want = expected_projector(plan, &outcome.sigma)?.apply(input);
            match want {
                Ok(w) if (s.fidelity(&w) - 1.0).abs() < 1e-6 => {}
                _ => return Ok(true),
            }
        }
    }
    Ok(false)
}

/// Exhaustive search over vertex-Pauli and hyperedge-X patterns of weight ≤ `budget`.
pub fn procedure_code_distance(plan: &GaugingPlan, budget: usize, code_distance: usize) -> Result<ProcedureDistance> {
    let h = plan.gate().h();
    let phi = plan.gate().gate_complex().cheeger(h, 24).exact();
    let bound = phi.map(|p| p * code_distance / 2);
    let mut sites: Vec<Site> = (0..plan.num_data()).flat_map(|q| Pauli::ALL.map(|p| Site::Vertex(q, p))).collect();
    sites.extend((0..plan.num_ancillas()).map(Site::Hyperedge));
    let inputs = probe_inputs(plan, 2, 17)?;
    let seeds = [1, 2];
    let mut checked = 0;
    for w in 1..=budget {
        for combo in sites.iter().combinations(w) {
            // one Pauli per data qubit
            let qubits: Vec<usize> = combo.iter().filter_map(|s| if let Site::Vertex(q, _) = s { Some(*q) } else { None }).collect();
            if qubits.iter().duplicates().next().is_some() {
                continue;
            }
            let mut pattern = FaultPattern::none(plan);
            for s in &combo {
                match **s {
                    Site::Vertex(q, p) => pattern.vertex_errors.push((q, p)),
                    Site::Hyperedge(e) => pattern.hyperedge_x.set(e, true),
                }
            }
            checked += 1;
            if is_undetected_logical(plan, &pattern, &inputs, &seeds)? {
                return Ok(ProcedureDistance { min_weight: Some(w), searched_up_to: w, bound, patterns_checked: checked, witness: Some(pattern) });
            }
        }
    }
    Ok(ProcedureDistance { min_weight: None, searched_up_to: budget, bound, patterns_checked: checked, witness: None })
}

/// Measurement fault distance cross-checked against the homology distance of the gate complex.
pub fn meas_distance_matches_homology(plan: &GaugingPlan, budget: usize) -> (MeasDistance, Distance) {
    let h = plan.gate().h();
    (meas_fault_distance(plan, budget), plan.gate().gate_complex().homology_distance(h, HomologyKind::Homology, budget))
}
