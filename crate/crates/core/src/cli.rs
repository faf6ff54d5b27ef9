//! Command-line front end. Every command emits one schema-versioned JSON report.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::code::{CssCode, PauliKind};
use crate::complex::{ChainComplex, Distance, HomologyKind};
use crate::error::{Error, Result};
use crate::f2la;
use crate::faults::{meas_distance_matches_homology, procedure_code_distance, verify_cleaning_bound};
use crate::gauging::{
    check_gauss_law, detectors, disentangle_pauli_case, expected_projector, gauged_code, run_algorithm1, CheckRef, DisentangleVerdict, GaugingPlan,
};
use crate::hfgate::{derive_from_ccz, logical_action, HigherFormGate, SiteKind};
use crate::instances::color_code::{tetrahedral_color_code, TetrahedralColorCode};
use crate::instances::colored::{barycentric_boundary_4simplex, colored_3torus, ColoredSimplicialComplex};
use crate::instances::cube::cube_code_832;
use crate::instances::hggt::{expected_membrane_action, hggt_build, Hggt};
use crate::instances::pauli::{ccz_triple_torus, pauli_1form};
use crate::instances::torus::{torus_2d, torus_3d};
use crate::opalg::PhasedCssOperator;
use crate::sim::statevector::DEFAULT_QUBIT_CEILING;
use crate::sim::{logical_basis_state, project_codespace, StateVector};

pub const SCHEMA: &str = "hfgauge-report/1";

/// Weight searches visiting more supports than this are reported as unknown.
const SEARCH_LIMIT: f64 = 2e7;
const CHEEGER_BITS: usize = 20;
const AXES: [&str; 3] = ["x", "y", "z"];

#[derive(Parser, Debug)]
#[command(name = "hfgauge", version, about = "Higher-form gauging measurements on CSS codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Emit the code and gate of an instance.
    Build(RunConfig),
    /// Code parameters, homology dimensions and Cheeger constant.
    Inspect(RunConfig),
    /// Run the gauging measurement on a simulated state.
    Gauge(RunConfig),
    /// Gauss law, detectors, disentangler and membrane checks.
    Verify(RunConfig),
    /// Fault distances and the cleaning bound.
    Faults(RunConfig),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Build(_) => "build",
            Command::Inspect(_) => "inspect",
            Command::Gauge(_) => "gauge",
            Command::Verify(_) => "verify",
            Command::Faults(_) => "faults",
        }
    }

    fn config(&self) -> &RunConfig {
        match self {
            Command::Build(c) | Command::Inspect(c) | Command::Gauge(c) | Command::Verify(c) | Command::Faults(c) => c,
        }
    }
}

#[derive(clap::Args, Debug, Clone)]
pub struct RunConfig {
    /// torus2d:LX,LY | torus3d:L | tetrahedral-cc | colored-3torus:L | hggt:FILE | hggt-sphere | ccz-triple:L | ccz-832 | complex:FILE
    #[arg(long)]
    pub instance: String,
    /// Required by `gauge`; other commands default to 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Weight budget for distance and fault searches.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub shots: u64,
    #[arg(long, value_enum, default_value_t = InputState::Plus)]
    pub input: InputState,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputState {
    /// Logical `|+…+⟩`.
    Plus,
    /// Logical `|0…0⟩`.
    Zero,
    /// A random codespace state.
    Random,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
}

pub enum Instance {
    Css { code: CssCode, gate: HigherFormGate },
    Tetrahedral(Box<TetrahedralColorCode>),
    Hggt(Box<Hggt>),
}

impl Instance {
    pub fn gate(&self) -> &HigherFormGate {
        match self {
            Instance::Css { gate, .. } => gate,
            Instance::Tetrahedral(t) => &t.gate,
            Instance::Hggt(h) => &h.gate,
        }
    }

    pub fn code(&self) -> &CssCode {
        match self {
            Instance::Css { code, .. } => code,
            Instance::Tetrahedral(t) => &t.code,
            Instance::Hggt(h) => h.gate.combined_code(),
        }
    }

    pub fn plan(&self) -> Result<GaugingPlan> {
        match self {
            Instance::Hggt(h) => GaugingPlan::hggt(h),
            _ => GaugingPlan::new(self.gate().clone()),
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn numbers(args: &str, count: usize, name: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = args.split(',').collect();
    if parts.len() != count {
        return Err(usage(format!("{name} expects {count} comma-separated size(s), got `{args}`")));
    }
    parts.iter().map(|p| p.trim().parse::<usize>().map_err(|_| usage(format!("{name}: `{p}` is not a size")))).collect()
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))
}

fn pauli_instance(cx: ChainComplex) -> Result<Instance> {
    let code = CssCode::from_complex(cx)?;
    let gate = pauli_1form(&code, PauliKind::X, None, 1)?;
    Ok(Instance::Css { code, gate })
}

fn hggt_instance(cells: &ColoredSimplicialComplex) -> Result<Instance> {
    Ok(Instance::Hggt(Box::new(hggt_build(cells)?)))
}

/// Resolves a registry name. Unknown names and unreadable inputs are `Error::Parse`.
pub fn load_instance(text: &str) -> Result<Instance> {
    let (name, args) = text.split_once(':').unwrap_or((text, ""));
    match name {
        "torus2d" => {
            let v = numbers(args, 2, name)?;
            pauli_instance(torus_2d(v[0], v[1])?)
        }
        "torus3d" => pauli_instance(torus_3d(numbers(args, 1, name)?[0])?.truncate(2)),
        "tetrahedral-cc" => Ok(Instance::Tetrahedral(Box::new(tetrahedral_color_code()?))),
        "colored-3torus" => hggt_instance(&colored_3torus(numbers(args, 1, name)?[0])?),
        "hggt-sphere" => hggt_instance(&barycentric_boundary_4simplex()),
        "hggt" => {
            let cells = ColoredSimplicialComplex::from_json(&read(args)?).map_err(|e| usage(format!("{args}: {e}")))?;
            hggt_instance(&cells)
        }
        "ccz-triple" => {
            let l = numbers(args, 1, name)?[0];
            let gate = ccz_triple_torus(l)?;
            Ok(Instance::Css { code: gate.targets()[0].clone(), gate })
        }
        "ccz-832" => {
            let code = cube_code_832()?;
            let gate = derive_from_ccz(&code)?;
            Ok(Instance::Css { code, gate })
        }
        "complex" => {
            let cx: ChainComplex = serde_json::from_str(&read(args)?).map_err(|e| usage(format!("{args}: {e}")))?;
            cx.validate().into_result().map_err(|e| usage(format!("{args}: {e}")))?;
            pauli_instance(cx)
        }
        _ => Err(usage(format!("unknown instance `{text}`"))),
    }
}

fn binomial_sum(n: usize, w: usize) -> f64 {
    let mut total = 0.0;
    let mut term = 1.0;
    for k in 1..=w.min(n) {
        term = term * (n - k + 1) as f64 / k as f64;
        total += term;
    }
    total
}

/// Whether `homology_distance` at grade `i` finishes: small kernels are walked
/// in full, otherwise the weight enumeration must stay under [`SEARCH_LIMIT`].
fn distance_feasible(cx: &ChainComplex, i: usize, kind: HomologyKind, budget: usize) -> bool {
    let d = match kind {
        HomologyKind::Homology => cx.boundary(i),
        HomologyKind::Cohomology => cx.boundary(i + 1),
    };
    cx.dim(i) - f2la::rank(&d) <= f2la::EXHAUSTIVE_COSET_DIM || binomial_sum(cx.dim(i), budget) <= SEARCH_LIMIT
}

fn bounded_distance(cx: &ChainComplex, kind: HomologyKind, budget: usize) -> Distance {
    if distance_feasible(cx, 1, kind, budget) {
        cx.homology_distance(1, kind, budget)
    } else if cx.homology_dim(1, kind) == 0 {
        Distance::Infinite
    } else {
        Distance::Unknown
    }
}

fn homology_dims(cx: &ChainComplex) -> Value {
    let dims = |kind| (0..=cx.top()).map(|i| cx.homology_dim(i, kind)).collect::<Vec<_>>();
    json!({ "grades": cx.grades(), "homology": dims(HomologyKind::Homology), "cohomology": dims(HomologyKind::Cohomology) })
}

fn site_kind(k: SiteKind) -> &'static str {
    match k {
        SiteKind::PauliX => "pauli_x",
        SiteKind::PauliZ => "pauli_z",
        SiteKind::Cz => "cz",
        SiteKind::Xs => "xs",
        SiteKind::Custom => "custom",
    }
}

fn cmd_build(inst: &Instance) -> Result<(bool, Value)> {
    Ok((true, json!({ "code": inst.code().to_json(), "gate": inst.gate().to_json() })))
}

fn cmd_inspect(inst: &Instance, cfg: &RunConfig) -> Result<(bool, Value)> {
    let code = inst.code();
    let cx = code.complex();
    let budget = cfg.budget as usize;
    let dx = bounded_distance(cx, HomologyKind::Cohomology, budget);
    let dz = bounded_distance(cx, HomologyKind::Homology, budget);
    let gate = inst.gate();
    let gc = gate.gate_complex();
    let cheeger = if gc.dim(gate.h()) <= 64 { gc.cheeger(gate.h(), CHEEGER_BITS) } else { crate::complex::Cheeger::Unknown };
    Ok((
        true,
        json!({
            "n": code.n(),
            "k": code.k(),
            "distance": { "x": dx, "z": dz, "min": dx.min(dz), "budget": budget },
            "ldpc": code.ldpc_profile(),
            "code_complex": homology_dims(cx),
            "gate": {
                "h": gate.h(),
                "site_kind": site_kind(gate.kind()),
                "sites": gate.sites().len(),
                "targets": gate.targets().len(),
                "complex": homology_dims(gc),
                "cheeger": cheeger,
                "cheeger_budget_bits": CHEEGER_BITS,
            },
        }),
    ))
}

fn random_codespace_state(code: &CssCode, rng: &mut ChaCha8Rng) -> Result<StateVector> {
    let amps = (0..1usize << code.n()).map(|_| num_complex::Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
    let mut s = StateVector::from_amplitudes(amps)?;
    project_codespace(&mut s, code, 0, rng)?;
    Ok(s)
}

fn cmd_gauge(inst: &Instance, cfg: &RunConfig) -> Result<(bool, Value)> {
    let seed = cfg.seed.ok_or_else(|| usage("gauge needs --seed"))?;
    let plan = inst.plan()?;
    if plan.total_qubits() > DEFAULT_QUBIT_CEILING {
        let (ok, suite) = cmd_verify(inst)?;
        return Ok((
            ok,
            json!({
                "statevector": {
                    "refused": true,
                    "reason": format!("{} data + ancilla qubits exceed the ceiling of {DEFAULT_QUBIT_CEILING}", plan.total_qubits()),
                    "alternative": "symbolic verification suite (verify)",
                },
                "verify": suite,
            }),
        ));
    }
    let code = plan.gate().combined_code().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let input = match cfg.input {
        InputState::Plus | InputState::Zero => {
            logical_basis_state(StateVector::zero(plan.num_data())?, &code, 0, cfg.input == InputState::Plus, &mut rng)?
        }
        InputState::Random => random_codespace_state(&code, &mut rng)?,
    };
    let mut shots = Vec::new();
    let mut ok = true;
    for _ in 0..cfg.shots {
        let mut s = input.clone();
        let out = run_algorithm1(&plan, &mut s, &mut rng)?;
        let fidelity = match expected_projector(&plan, &out.sigma)?.apply(&input) {
            Ok(want) => s.fidelity(&want),
            Err(_) => 0.0,
        };
        let pass = out.detectors_ok && fidelity >= 1.0 - 1e-9;
        ok &= pass;
        shots.push(json!({ "outcome": out, "fidelity": round(fidelity), "pass": pass }));
    }
    Ok((
        ok,
        json!({
            "data_qubits": plan.num_data(),
            "ancillas": plan.num_ancillas(),
            "representatives": plan.reps(),
            "input": format!("{:?}", cfg.input).to_lowercase(),
            "shots": shots,
        }),
    ))
}

/// Twelve significant digits keeps reports stable against last-bit float noise.
fn round(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

fn check(name: &str, result: Result<Value>) -> (bool, Value) {
    match result {
        Ok(v) => {
            let pass = v.get("pass").and_then(Value::as_bool).unwrap_or(true);
            (pass, json!({ "check": name, "pass": pass, "detail": v }))
        }
        Err(e) => (false, json!({ "check": name, "pass": false, "error": e.to_string() })),
    }
}

fn tetrahedral_images(plan: &GaugingPlan) -> Result<Value> {
    let d = disentangle_pauli_case(plan)?;
    let n = plan.num_data();
    let total = plan.total_qubits();
    let mut bad = Vec::new();
    for (t, img) in d.gauss_images.iter().enumerate() {
        if *img != PhasedCssOperator::x_on(total, &[t]) {
            bad.push(format!("A_{t} -> {img}"));
        }
    }
    let mut z_checked = 0;
    for (r, img) in &d.gauged_images {
        if let CheckRef::Z(j) = r {
            z_checked += 1;
            if *img != PhasedCssOperator::z_on(total, &[n + j]) {
                bad.push(format!("Z-check {j} -> {img}"));
            }
        }
    }
    Ok(json!({ "pass": bad.is_empty(), "gauss_checked": d.gauss_images.len(), "z_checked": z_checked, "mismatches": bad }))
}

fn membrane_actions(h: &Hggt) -> Result<Value> {
    if h.gate.combined_code().k() == 0 {
        return Ok(json!({ "pass": true, "skipped": "no logical qubits" }));
    }
    let frame = h.logical_frame()?;
    let code = h.gate.combined_code();
    let mut axes = Vec::new();
    let mut pass = true;
    for axis in 0..3 {
        let u = h.gate.gate_for_cocycle(&frame.gate_cocycles[axis])?;
        let got = logical_action(&u, code, &frame.xs, &frame.zs)?;
        let ok = got == expected_membrane_action(axis);
        pass &= ok;
        axes.push(json!({ "axis": AXES[axis], "pass": ok }));
    }
    Ok(json!({ "pass": pass, "axes": axes }))
}

fn cmd_verify(inst: &Instance) -> Result<(bool, Value)> {
    let plan = inst.plan()?;
    let gate = plan.gate();
    let mut checks = Vec::new();
    checks.push(check(
        "codespace_preservation",
        match gate.kind() {
            SiteKind::Cz => gate.validate_codespace_cz().map(|r| json!({ "pass": r.passed(), "report": format!("{r:?}") })),
            SiteKind::Xs => gate.validate_codespace_xs().map(|r| json!({ "pass": r.passed(), "report": format!("{r:?}") })),
            SiteKind::PauliX | SiteKind::PauliZ | SiteKind::Custom => Ok(json!({ "pass": gate.cocycles_preserve_codespace() })),
        },
    ));
    checks.push(check("gauss_law", check_gauss_law(&plan).map(|k| json!({ "kernel_elements": k }))));
    let det = detectors(&plan);
    let meta_ok = det.check_matrix.multiply(&gate.gate_complex().boundary(gate.h() + 1)).map(|m| f2la_is_zero(&m)).unwrap_or(false);
    checks.push(check("detectors", Ok(json!({ "pass": meta_ok, "count": det.sets.len() }))));
    checks.push(check(
        "gauged_code",
        gauged_code(&plan).map(|g| {
            json!({
                "gauss": g.gauss.len(),
                "plaquettes": g.plaquettes.len(),
                "gauged": g.gauged.len(),
                "dropped": g.dropped.iter().map(|r| format!("{r:?}")).collect::<Vec<_>>(),
            })
        }),
    ));
    if gate.is_x_conjugate() {
        checks.push(check(
            "disentangler",
            disentangle_pauli_case(&plan).map(|d| {
                json!({
                    "pass": d.gauss_ok && d.gauged_ok && d.verdict == DisentangleVerdict::ProductState,
                    "verdict": format!("{:?}", d.verdict),
                    "cx_gates": d.cx.len(),
                    "rotations": d.rotations.len(),
                })
            }),
        ));
    }
    match inst {
        Instance::Tetrahedral(_) => checks.push(check("disentangler_images", tetrahedral_images(&plan))),
        Instance::Hggt(h) => checks.push(check("membrane_logical_action", membrane_actions(h))),
        Instance::Css { .. } => {}
    }
    let ok = checks.iter().all(|(p, _)| *p);
    Ok((ok, json!({ "checks": checks.into_iter().map(|(_, v)| v).collect::<Vec<_>>() })))
}

fn f2la_is_zero(m: &crate::f2la::BitMatrix) -> bool {
    (0..m.cols()).all(|j| m.column_support(j).is_empty())
}

fn cmd_faults(inst: &Instance, cfg: &RunConfig) -> Result<(bool, Value)> {
    let plan = inst.plan()?;
    let budget = cfg.budget as usize;
    let seed = cfg.seed.unwrap_or(0);
    let mut checks = Vec::new();
    let h = plan.gate().h();
    let gc = plan.gate().gate_complex();
    if distance_feasible(gc, h, HomologyKind::Homology, budget) && binomial_sum(gc.dim(h), budget) <= SEARCH_LIMIT {
        let (meas, hom) = meas_distance_matches_homology(&plan, budget);
        checks.push(check(
            "measurement_fault_distance",
            Ok(json!({ "pass": meas.distance == hom && hom != Distance::Unknown, "distance": meas.distance, "homology_distance": hom, "witness": meas.witness })),
        ));
    } else {
        checks.push(check(
            "measurement_fault_distance",
            Ok(json!({ "pass": false, "distance": Distance::Unknown, "reason": format!("weight-{budget} search over {} sites exceeds the search limit", gc.dim(h)) })),
        ));
    }
    let small = gc.dim(h) <= CHEEGER_BITS;
    if small {
        checks.push(check(
            "cleaning_bound",
            verify_cleaning_bound(&plan, cfg.shots as usize, seed).map(|r| json!({ "pass": r.passed(), "report": r })),
        ));
    }
    if small && plan.total_qubits() <= DEFAULT_QUBIT_CEILING {
        let d = inst.code().distance(budget).finite();
        let phi = gc.cheeger(h, CHEEGER_BITS).exact();
        if let (Some(d), Some(phi)) = (d, phi) {
            let bound = phi * d / 2;
            let up_to = (bound.ceil().to_integer().max(1) - 1).min(budget);
            checks.push(check(
                "procedure_distance",
                procedure_code_distance(&plan, up_to, d).map(|r| json!({ "pass": r.min_weight.is_none(), "code_distance": d, "report": r })),
            ));
        }
    }
    let ok = checks.iter().all(|(p, _)| *p);
    Ok((ok, json!({ "budget": budget, "checks": checks.into_iter().map(|(_, v)| v).collect::<Vec<_>>() })))
}

/// Runs one parsed command and returns the exit code with the rendered report.
pub fn execute(command: &Command) -> (i32, String) {
    let cfg = command.config();
    let header = json!({ "schema": SCHEMA, "command": command.name(), "instance": cfg.instance, "seed": cfg.seed });
    let result = load_instance(&cfg.instance).and_then(|inst| match command {
        Command::Build(_) => cmd_build(&inst),
        Command::Inspect(c) => cmd_inspect(&inst, c),
        Command::Gauge(c) => cmd_gauge(&inst, c),
        Command::Verify(_) => cmd_verify(&inst),
        Command::Faults(c) => cmd_faults(&inst, c),
    });
    let (code, body) = match result {
        Ok((pass, report)) => (if pass { 0 } else { 1 }, json!({ "pass": pass, "report": report })),
        Err(e @ (Error::Parse(_) | Error::Io(_) | Error::Json(_))) => (2, json!({ "pass": false, "error": e.to_string() })),
        Err(e) => (1, json!({ "pass": false, "error": e.to_string() })),
    };
    let mut doc = header;
    doc.as_object_mut().expect("object").extend(body.as_object().expect("object").clone());
    (code, serde_json::to_string_pretty(&doc).expect("json renders") + "\n")
}

fn write_out(path: &Path, text: &str) -> std::io::Result<()> {
    std::fs::write(path, text)
}

/// Full CLI entry: parses `argv`, runs, writes the report, returns the exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (code, text) = execute(&cli.command);
    match &cli.command.config().out {
        Some(path) => {
            if let Err(e) = write_out(path, &text) {
                eprintln!("{}: {e}", path.display());
                return 2;
            }
        }
        None => print!("{text}"),
    }
    if code != 0 {
        let v: Value = serde_json::from_str(&text).unwrap_or(Value::Null);
        if let Some(err) = v.get("error").and_then(Value::as_str) {
            eprintln!("error: {err}");
        }
    }
    code
}
