//! Ten end-to-end acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach stdout.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use hfgauge::code::{CssCode, PauliKind};
use hfgauge::complex::HomologyKind;
use hfgauge::f2la::{self, BitVec};
use hfgauge::faults::{meas_fault_distance, procedure_code_distance, verify_cleaning_bound};
use hfgauge::gauging::{disentangle_pauli_case, run_algorithm1, CheckRef, GaugingPlan};
use hfgauge::hfgate::{derive_from_ccz, logical_action, HigherFormGate, LogicalPauli};
use hfgauge::instances::color_code::tetrahedral_color_code;
use hfgauge::instances::colored::{barycentric_boundary_4simplex, colored_3torus};
use hfgauge::instances::cube::cube_code_832;
use hfgauge::instances::hggt::hggt_build;
use hfgauge::instances::pauli::pauli_1form;
use hfgauge::instances::torus::torus_2d;
use hfgauge::opalg::dense::to_matrix;
use hfgauge::opalg::PhasedCssOperator;
use hfgauge::sim::{logical_basis_state, project_codespace, QuantumState, StabTableau, StateVector};

type Verdict = Result<String, String>;

fn torus_gate(lx: usize, ly: usize) -> HigherFormGate {
    let code = CssCode::from_complex(torus_2d(lx, ly).unwrap()).unwrap();
    pauli_1form(&code, PauliKind::X, None, 1).unwrap()
}

fn torus_plan(lx: usize, ly: usize) -> GaugingPlan {
    GaugingPlan::new(torus_gate(lx, ly)).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    ensure(t.elapsed() < limit, || format!("took {:.1?}, limit {limit:?}", t.elapsed()))
}

fn random_codespace_state(code: &CssCode, rng: &mut ChaCha8Rng) -> StateVector {
    let amps = (0..1usize << code.n()).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
    let mut s = StateVector::from_amplitudes(amps).unwrap();
    project_codespace(&mut s, code, 0, rng).unwrap();
    s
}

/// `Π_i (1 + σ_i U_i)/2 |ψ⟩` built from amplitudes, renormalized after each factor.
fn projected(input: &StateVector, us: &[PhasedCssOperator], sigma: &[i8]) -> Option<StateVector> {
    let mut cur = input.clone();
    for (u, &s) in us.iter().zip(sigma) {
        let moved = cur.applied(u);
        let amps = cur.amplitudes().iter().zip(moved.amplitudes()).map(|(a, b)| (a + b * s as f64) * 0.5).collect::<Vec<_>>();
        if amps.iter().map(|a| a.norm_sqr()).sum::<f64>() < 1e-18 {
            return None;
        }
        cur = StateVector::from_amplitudes(amps).ok()?;
    }
    Some(cur)
}

fn c1_theorem1() -> Verdict {
    let t = Instant::now();
    let mut cases = vec![("torus 2x2", GaugingPlan::new(torus_gate(2, 2)).unwrap()), ("torus 2x3", GaugingPlan::new(torus_gate(2, 3)).unwrap())];
    let ccz = GaugingPlan::new(derive_from_ccz(&cube_code_832().unwrap()).unwrap()).unwrap();
    ensure(ccz.total_qubits() <= 24, || format!("CZ instance uses {} qubits", ccz.total_qubits()))?;
    cases.push(("CZ on [[8,3,2]] pair", ccz));
    let mut worst: f64 = 1.0;
    for (name, plan) in &cases {
        let code = plan.gate().combined_code().clone();
        let us: Vec<_> = plan.reps().iter().map(|l| plan.gate().gate_for_cocycle(l).unwrap()).collect();
        let mut prep = ChaCha8Rng::seed_from_u64(1000);
        for seed in 0..100 {
            let input = random_codespace_state(&code, &mut prep);
            let mut s = input.clone();
            let out = run_algorithm1(plan, &mut s, &mut ChaCha8Rng::seed_from_u64(seed)).map_err(|e| format!("{name} seed {seed}: {e}"))?;
            let want = projected(&input, &us, &out.sigma).ok_or_else(|| format!("{name} seed {seed}: σ has zero probability"))?;
            let f = s.fidelity(&want);
            worst = worst.min(f);
            ensure(f >= 1.0 - 1e-9, || format!("{name} seed {seed}: fidelity {f}"))?;
        }
    }
    within(t, Duration::from_secs(300))?;
    Ok(format!("3 instances x 100 seeds, min fidelity {worst:.12}, {:.1?}", t.elapsed()))
}

fn gauss_law_exact(plan: &GaugingPlan) -> Result<usize, String> {
    let basis = f2la::kernel_basis(&plan.hyperedge_map());
    for c in &basis {
        let lhs = c.iter_ones().fold(PhasedCssOperator::identity(plan.total_qubits()), |acc, v| acc.mul(&plan.gauss_law(v)));
        let rhs = plan.gate().gate_for_cocycle(c).map_err(|e| e.to_string())?.shift(plan.total_qubits(), 0);
        ensure(lhs == rhs, || format!("product over {:?} is {lhs}, U(c) is {rhs}", c.support()))?;
    }
    Ok(basis.len())
}

fn c2_gauss_law() -> Verdict {
    let mut checked = 0;
    for lx in 2..=4 {
        for ly in 2..=4 {
            checked += gauss_law_exact(&torus_plan(lx, ly)).map_err(|e| format!("torus {lx}x{ly}: {e}"))?;
        }
    }
    let tc = tetrahedral_color_code().unwrap();
    checked += gauss_law_exact(&GaugingPlan::new(tc.gate).unwrap()).map_err(|e| format!("tetrahedral: {e}"))?;
    let h = hggt_build(&barycentric_boundary_4simplex()).unwrap();
    checked += gauss_law_exact(&GaugingPlan::hggt(&h).unwrap()).map_err(|e| format!("HGGT sphere: {e}"))?;
    Ok(format!("{checked} kernel elements, exact equality"))
}

fn c3_disentangler() -> Verdict {
    let t = Instant::now();
    let tc = tetrahedral_color_code().unwrap();
    let plan = GaugingPlan::new(tc.gate).unwrap();
    let (n, total) = (plan.num_data(), plan.total_qubits());
    let d = disentangle_pauli_case(&plan).map_err(|e| e.to_string())?;
    ensure(d.gauss_images.len() == n, || format!("{} Gauss images for {n} sites", d.gauss_images.len()))?;
    for (t, img) in d.gauss_images.iter().enumerate() {
        let want = PhasedCssOperator::x_on(total, &[t]);
        ensure(*img == want, || format!("V A_{t} V† = {img}, expected {want}"))?;
    }
    let mut edges = 0;
    for (r, img) in &d.gauged_images {
        if let CheckRef::Z(e) = r {
            let want = PhasedCssOperator::z_on(total, &[n + e]);
            ensure(*img == want, || format!("image of Z-check {e} is {img}, expected {want}"))?;
            edges += 1;
        }
    }
    ensure(edges == plan.num_ancillas(), || format!("{edges} edge images for {} edges", plan.num_ancillas()))?;
    within(t, Duration::from_secs(30))?;
    Ok(format!("{n} Gauss laws and {edges} edges map exactly, {:.1?}", t.elapsed()))
}

/// Lightest `A_v` flip pattern passing all detectors and flipping some σ, by full enumeration.
fn brute_meas_distance(plan: &GaugingPlan) -> Option<usize> {
    let dh = plan.gate().gate_complex().boundary(plan.gate().h());
    let n = plan.num_sites();
    (1u64..1 << n)
        .map(|m| BitVec::from_u64(n, m))
        .filter(|p| dh.mul_vec(p).is_zero() && plan.reps().iter().any(|l| l.dot(p)))
        .map(|p| p.weight())
        .min()
}

fn c4_meas_distance() -> Verdict {
    let t = Instant::now();
    let mut found = vec![];
    for l in [2, 3] {
        let plan = torus_plan(l, l);
        let lib = meas_fault_distance(&plan, plan.num_sites()).distance.finite();
        let hom = plan.gate().gate_complex().homology_distance(1, HomologyKind::Homology, plan.num_sites()).finite();
        let brute = brute_meas_distance(&plan);
        ensure(lib == Some(l) && hom == Some(l) && brute == Some(l), || format!("L={l}: search {lib:?}, homology {hom:?}, enumeration {brute:?}"))?;
        found.push(l);
    }
    within(t, Duration::from_secs(120))?;
    Ok(format!("distances {found:?} equal L and the homology distance, {:.1?}", t.elapsed()))
}

/// `φ_1` by enumerating every `c` and every kernel element.
fn brute_cheeger(plan: &GaugingPlan) -> Ratio<usize> {
    let delta = plan.hyperedge_map();
    let n = delta.cols();
    let all: Vec<BitVec> = (0u64..1 << n).map(|m| BitVec::from_u64(n, m)).collect();
    let kernel: Vec<&BitVec> = all.iter().filter(|v| delta.mul_vec(v).is_zero()).collect();
    all.iter()
        .filter(|c| !delta.mul_vec(c).is_zero())
        .map(|c| {
            let clean = kernel.iter().map(|k| c.xor(k).weight()).min().unwrap();
            Ratio::new(delta.mul_vec(c).weight(), clean)
        })
        .min()
        .unwrap()
}

fn c5_cleaning() -> Verdict {
    let plan = torus_plan(2, 2);
    let oracle = brute_cheeger(&plan);
    let report = verify_cleaning_bound(&plan, 0, 1).map_err(|e| e.to_string())?;
    ensure(report.phi.exact() == Some(oracle), || format!("library φ {:?}, enumeration {oracle}", report.phi))?;
    ensure(report.violations.is_empty(), || format!("{} violations, first {:?}", report.violations.len(), report.violations[0]))?;
    // every c outside ker δ, cleaned by enumeration, against the enumerated φ
    let delta = plan.hyperedge_map();
    let n = delta.cols();
    let all: Vec<BitVec> = (0u64..1 << n).map(|m| BitVec::from_u64(n, m)).collect();
    let kernel: Vec<&BitVec> = all.iter().filter(|v| delta.mul_vec(v).is_zero()).collect();
    let mut swept = 0;
    for c in all.iter().filter(|c| !delta.mul_vec(c).is_zero()) {
        let clean = kernel.iter().map(|k| c.xor(k).weight()).min().unwrap();
        ensure(Ratio::from_integer(delta.mul_vec(c).weight()) >= oracle * clean, || format!("c = {:?} breaks the bound", c.support()))?;
        swept += 1;
    }
    ensure(report.trivial_checked == swept, || format!("library checked {} c̃, enumeration has {swept}", report.trivial_checked))?;
    Ok(format!("φ1 = {oracle} (enumeration agrees), all {swept} c̃ + {} nontrivial-class pairs checked, 0 violations", report.nontrivial_checked))
}

fn c6_procedure_distance() -> Verdict {
    let t = Instant::now();
    let plan = torus_plan(2, 2);
    let d = plan.gate().combined_code().distance(8).finite().ok_or("code distance unknown")?;
    let phi = brute_cheeger(&plan);
    let bound = phi * d / 2;
    let literal = bound.ceil().to_integer().saturating_sub(1);
    // the literal budget is 0 here; weight 1 is searched as well
    let budget = literal.max(1);
    let r = procedure_code_distance(&plan, budget, d).map_err(|e| e.to_string())?;
    ensure(r.min_weight.is_none(), || format!("undetected logical fault of weight {:?}: {:?}", r.min_weight, r.witness))?;
    within(t, Duration::from_secs(600))?;
    Ok(format!("φ1·d/2 = {bound}, no undetected logical fault up to weight {budget} ({} patterns), {:.1?}", r.patterns_checked, t.elapsed()))
}

/// Logical action of `Π CZ(p, q)` on `X̄_0.., Z̄_0..`.
fn cz_action(k: usize, pairs: &[(usize, usize)]) -> Vec<LogicalPauli> {
    let mut out: Vec<LogicalPauli> = (0..k).map(|i| LogicalPauli::x(k, i)).chain((0..k).map(|i| LogicalPauli::z(k, i))).collect();
    for &(p, q) in pairs {
        out[p].z.flip(q);
        out[q].z.flip(p);
    }
    out
}

fn c7_hggt_action() -> Verdict {
    let h = hggt_build(&colored_3torus(4).unwrap()).unwrap();
    let frame = h.logical_frame().map_err(|e| e.to_string())?;
    let code = h.gate.combined_code();
    let idx = |color: usize, axis: usize| 3 * color + axis;
    for axis in 0..3 {
        let (b, c) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        // C_{b r}Z_{c g} · C_{b g}Z_{c r}
        let want = cz_action(6, &[(idx(0, b), idx(1, c)), (idx(1, b), idx(0, c))]);
        let u = h.gate.gate_for_cocycle(&frame.gate_cocycles[axis]).map_err(|e| e.to_string())?;
        let got = logical_action(&u, code, &frame.xs, &frame.zs).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("axis {axis}: got {got:?}"))?;
    }
    Ok("x, y, z membranes give the two-CZ logical maps exactly".into())
}

fn chi_square_p(a: &BTreeMap<Vec<i8>, u64>, b: &BTreeMap<Vec<i8>, u64>) -> f64 {
    let keys: Vec<_> = a.keys().chain(b.keys()).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let (na, nb) = (a.values().sum::<u64>() as f64, b.values().sum::<u64>() as f64);
    let mut stat = 0.0;
    for k in &keys {
        let (oa, ob) = (*a.get(*k).unwrap_or(&0) as f64, *b.get(*k).unwrap_or(&0) as f64);
        let col = oa + ob;
        for (o, n) in [(oa, na), (ob, nb)] {
            let e = col * n / (na + nb);
            stat += (o - e).powi(2) / e;
        }
    }
    if keys.len() < 2 {
        return 1.0;
    }
    1.0 - ChiSquared::new((keys.len() - 1) as f64).unwrap().cdf(stat)
}

fn c8_backends() -> Verdict {
    let plan = torus_plan(2, 2);
    ensure(plan.total_qubits() <= 12, || format!("{} qubits", plan.total_qubits()))?;
    let code = plan.gate().combined_code().clone();
    let us: Vec<_> = plan.reps().iter().map(|l| plan.gate().gate_for_cocycle(l).unwrap()).collect();
    let n = plan.num_data();
    let total = plan.total_qubits();
    // deterministic: |+̄+̄⟩ gives σ = +1 and detectors pass in both backends
    for seed in 0..50 {
        let mut prep = ChaCha8Rng::seed_from_u64(seed);
        let mut sv = logical_basis_state(StateVector::zero(n).unwrap(), &code, 0, true, &mut prep).unwrap();
        let mut tb = logical_basis_state(StabTableau::zero(n), &code, 0, true, &mut prep).unwrap();
        let a = run_algorithm1(&plan, &mut sv, &mut ChaCha8Rng::seed_from_u64(seed)).map_err(|e| e.to_string())?;
        let b = run_algorithm1(&plan, &mut tb, &mut ChaCha8Rng::seed_from_u64(seed)).map_err(|e| e.to_string())?;
        ensure(a.sigma == b.sigma && a.detectors_ok == b.detectors_ok && a.detector_syndrome == b.detector_syndrome, || {
            format!("seed {seed}: {:?} vs {:?}", a.sigma, b.sigma)
        })?;
        for (u, &s) in us.iter().zip(&a.sigma) {
            let ev = sv.expectation(u).re;
            let mut probe = tb.clone();
            let m = probe.measure(&u.shift(total, 0), &mut ChaCha8Rng::seed_from_u64(0)).map_err(|e| e.to_string())?;
            ensure((ev - s as f64).abs() < 1e-9 && m == s, || format!("seed {seed}: re-measured σ differs ({ev}, {m}, {s})"))?;
        }
    }
    // stochastic: |0̄0̄⟩ gives uniform σ; compare σ and hyperedge-outcome histograms
    let shots = 10_000;
    let mut hist = [BTreeMap::new(), BTreeMap::new(), BTreeMap::new(), BTreeMap::new()];
    let mut rng_sv = ChaCha8Rng::seed_from_u64(101);
    let mut rng_tb = ChaCha8Rng::seed_from_u64(202);
    let sv0 = logical_basis_state(StateVector::zero(n).unwrap(), &code, 0, false, &mut rng_sv).unwrap();
    let tb0 = logical_basis_state(StabTableau::zero(n), &code, 0, false, &mut rng_tb).unwrap();
    for _ in 0..shots {
        let a = run_algorithm1(&plan, &mut sv0.clone(), &mut rng_sv).map_err(|e| e.to_string())?;
        let b = run_algorithm1(&plan, &mut tb0.clone(), &mut rng_tb).map_err(|e| e.to_string())?;
        let xs = |x: &BitVec| (0..x.len()).map(|i| x.get(i) as i8).collect::<Vec<_>>();
        *hist[0].entry(a.sigma).or_insert(0) += 1;
        *hist[1].entry(b.sigma).or_insert(0) += 1;
        *hist[2].entry(xs(&a.x)).or_insert(0) += 1;
        *hist[3].entry(xs(&b.x)).or_insert(0) += 1;
    }
    let p_sigma = chi_square_p(&hist[0], &hist[1]);
    let p_x = chi_square_p(&hist[2], &hist[3]);
    ensure(p_sigma > 1e-3 && p_x > 1e-3, || format!("chi-square p: σ {p_sigma:.4}, x {p_x:.4}"))?;
    Ok(format!("50 deterministic seeds identical; {shots} shots, chi-square p(σ) = {p_sigma:.3}, p(x) = {p_x:.3}"))
}

fn random_operator(n: usize, rng: &mut ChaCha8Rng) -> PhasedCssOperator {
    let x = BitVec::from_u64(n, rng.gen_range(0..1u64 << n));
    let linear = (0..n).map(|_| rng.gen_range(0..4u8)).collect();
    let quad: Vec<(usize, usize)> = (0..n).flat_map(|p| (p + 1..n).map(move |q| (p, q))).filter(|_| rng.gen_bool(0.5)).collect();
    PhasedCssOperator::from_parts(n, rng.gen_range(0..8), x, linear, quad).unwrap()
}

fn c9_dense_homomorphism() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..500 {
        let n = 1 + i % 3;
        let (a, b) = (random_operator(n, &mut rng), random_operator(n, &mut rng));
        let lhs = to_matrix(&a.mul(&b)).map_err(|e| e.to_string())?;
        let rhs = to_matrix(&a).unwrap().matmul(&to_matrix(&b).unwrap());
        ensure(lhs == rhs, || format!("pair {i}: {a} · {b}"))?;
        ensure(to_matrix(&a.dagger()).unwrap() == to_matrix(&a).unwrap().adjoint(), || format!("dagger of {a}"))?;
    }
    Ok("500 pairs on 1 to 3 qubits agree exactly over Z[ω]".into())
}

fn c10_cli_determinism() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_hfgauge");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: &[&[&str]] = &[
        &["build", "--instance", "torus2d:2,2"],
        &["inspect", "--instance", "torus2d:3,3"],
        &["inspect", "--instance", "tetrahedral-cc"],
        &["gauge", "--instance", "torus2d:2,2", "--seed", "7", "--shots", "5"],
        &["gauge", "--instance", "ccz-832", "--seed", "11", "--shots", "2", "--input", "random"],
        &["gauge", "--instance", "colored-3torus:4", "--seed", "1"],
        &["verify", "--instance", "tetrahedral-cc"],
        &["verify", "--instance", "hggt-sphere"],
        &["faults", "--instance", "torus2d:2,2", "--budget", "4", "--seed", "3"],
        &["inspect", "--instance", "moebius:3"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let mut outputs = vec![];
        for rep in 0..2 {
            let out_path = dir.path().join(format!("{i}-{rep}.json"));
            let o = Command::new(bin).args(*args).output().map_err(|e| e.to_string())?;
            let f = Command::new(bin).args(*args).arg("--out").arg(&out_path).output().map_err(|e| e.to_string())?;
            let file = std::fs::read(&out_path).map_err(|e| format!("{args:?}: {e}"))?;
            ensure(o.stdout == file && o.status.code() == f.status.code(), || format!("{args:?}: --out differs from stdout"))?;
            outputs.push((o.status.code(), o.stdout));
        }
        ensure(outputs[0] == outputs[1], || format!("{args:?}: reruns differ"))?;
        ensure(!outputs[0].1.is_empty(), || format!("{args:?}: empty report"))?;
    }
    Ok(format!("{} commands byte-identical across reruns and --out", runs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("measurement equals projector product", c1_theorem1),
        ("Gauss-law identity", c2_gauss_law),
        ("disentangler identity", c3_disentangler),
        ("measurement fault distance", c4_meas_distance),
        ("Cheeger cleaning bound", c5_cleaning),
        ("procedure distance bound", c6_procedure_distance),
        ("HGGT membrane logical action", c7_hggt_action),
        ("tableau and statevector agree", c8_backends),
        ("operator algebra vs dense matrices", c9_dense_homomorphism),
        ("CLI determinism", c10_cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let verdict = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        match verdict {
            Ok(msg) => println!("criterion {:>2} PASS {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
