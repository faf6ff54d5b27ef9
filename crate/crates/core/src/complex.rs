//! Chain complexes over GF(2): validation, (co)homology, distances and the
//! higher Cheeger constant.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2la::{self, coset_min_weight_in_span, BitMatrix, BitVec, XorBasis, EXHAUSTIVE_COSET_DIM};

/// Graded GF(2) spaces `C_0 .. C_top` with boundary maps.
///
/// `boundaries[k]` is `∂_{k+1}: C_{k+1} → C_k`. Maps outside the stored range
/// are zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainComplex {
    grades: Vec<usize>,
    boundaries: Vec<BitMatrix>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    labels: BTreeMap<usize, Vec<String>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HomologyKind {
    Homology,
    Cohomology,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyBasis {
    pub grade: usize,
    pub kind: HomologyKind,
    pub representatives: Vec<BitVec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "snake_case")]
pub enum Distance {
    Finite(usize),
    Infinite,
    Unknown,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            _ => None,
        }
    }

    pub fn min(self, other: Distance) -> Distance {
        match (self, other) {
            (Distance::Finite(a), Distance::Finite(b)) => Distance::Finite(a.min(b)),
            (Distance::Unknown, _) | (_, Distance::Unknown) => Distance::Unknown,
            (Distance::Infinite, d) | (d, Distance::Infinite) => d,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => write!(f, "inf"),
            Distance::Unknown => write!(f, "unknown"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "snake_case")]
pub enum Cheeger {
    Exact(Ratio<usize>),
    /// `δ_{h+1}` vanishes, so the minimum runs over an empty set.
    Infinite,
    Unknown,
}

impl Cheeger {
    pub fn exact(self) -> Option<Ratio<usize>> {
        match self {
            Cheeger::Exact(r) => Some(r),
            _ => None,
        }
    }
}

/// A failed `∂_i ∂_{i+1} = 0` check or dimension mismatch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub grade: usize,
    pub column: Option<usize>,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        match self.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidComplex(format!(
                "grade {}{}: {}",
                v.grade,
                v.column.map(|c| format!(", column {c}")).unwrap_or_default(),
                v.message
            ))),
        }
    }
}

impl ChainComplex {
    /// Builds and validates a complex.
    pub fn new(grades: Vec<usize>, boundaries: Vec<BitMatrix>) -> Result<Self> {
        let cx = Self::new_unchecked(grades, boundaries);
        cx.validate().into_result()?;
        Ok(cx)
    }

    /// Builds a complex without checking `∂∂ = 0` (dimensions are still checked by `validate`).
    pub fn new_unchecked(grades: Vec<usize>, boundaries: Vec<BitMatrix>) -> Self {
        Self { grades, boundaries, labels: BTreeMap::new() }
    }

    /// Three-term complex `C_2 → C_1 → C_0` from `∂_1` and `∂_2`.
    pub fn from_boundaries(d1: BitMatrix, d2: BitMatrix) -> Result<Self> {
        Self::new(vec![d1.rows(), d1.cols(), d2.cols()], vec![d1, d2])
    }

    pub fn with_labels(mut self, grade: usize, names: Vec<String>) -> Result<Self> {
        if grade >= self.grades.len() || names.len() != self.grades[grade] {
            return Err(Error::Dimension(format!("labels for grade {grade} do not match its dimension")));
        }
        self.labels.insert(grade, names);
        Ok(self)
    }

    pub fn label(&self, grade: usize, index: usize) -> Option<&str> {
        self.labels.get(&grade).and_then(|l| l.get(index)).map(String::as_str)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.boundaries.len() + 1 != self.grades.len() && !(self.grades.is_empty() && self.boundaries.is_empty()) {
            report.violations.push(Violation {
                grade: 0,
                column: None,
                message: format!("{} grades need {} boundary maps, got {}", self.grades.len(), self.grades.len().saturating_sub(1), self.boundaries.len()),
            });
            return report;
        }
        for (k, d) in self.boundaries.iter().enumerate() {
            if d.rows() != self.grades[k] || d.cols() != self.grades[k + 1] {
                report.violations.push(Violation {
                    grade: k + 1,
                    column: None,
                    message: format!(
                        "boundary map is {}x{}, expected {}x{}",
                        d.rows(),
                        d.cols(),
                        self.grades[k],
                        self.grades[k + 1]
                    ),
                });
            }
        }
        if !report.is_ok() {
            return report;
        }
        for k in 1..self.boundaries.len() {
            let (lo, hi) = (&self.boundaries[k - 1], &self.boundaries[k]);
            for j in 0..hi.cols() {
                if !lo.mul_vec(&hi.column(j)).is_zero() {
                    report.violations.push(Violation {
                        grade: k + 1,
                        column: Some(j),
                        message: format!("boundary of boundary is nonzero (d{} d{} != 0)", k, k + 1),
                    });
                }
            }
        }
        report
    }

    /// Highest grade present.
    pub fn top(&self) -> usize {
        self.grades.len().saturating_sub(1)
    }

    pub fn grades(&self) -> &[usize] {
        &self.grades
    }

    /// `|C_i|`, zero outside the stored range.
    pub fn dim(&self, i: usize) -> usize {
        self.grades.get(i).copied().unwrap_or(0)
    }

    fn dim_signed(&self, i: isize) -> usize {
        if i < 0 {
            0
        } else {
            self.dim(i as usize)
        }
    }

    /// `∂_i: C_i → C_{i-1}`.
    pub fn boundary(&self, i: usize) -> BitMatrix {
        if i >= 1 && i <= self.boundaries.len() {
            self.boundaries[i - 1].clone()
        } else {
            BitMatrix::zeros(self.dim_signed(i as isize - 1), self.dim(i))
        }
    }

    /// `δ_i = ∂_iᵀ: C_{i-1} → C_i`.
    pub fn coboundary(&self, i: usize) -> BitMatrix {
        self.boundary(i).transpose()
    }

    /// The map whose kernel is the cycle space at grade `i` for the given kind.
    fn cycle_map(&self, i: usize, kind: HomologyKind) -> BitMatrix {
        match kind {
            HomologyKind::Homology => self.boundary(i),
            HomologyKind::Cohomology => self.coboundary(i + 1),
        }
    }

    /// The map whose image is the boundary space at grade `i` for the given kind.
    fn image_map(&self, i: usize, kind: HomologyKind) -> BitMatrix {
        match kind {
            HomologyKind::Homology => self.boundary(i + 1),
            HomologyKind::Cohomology => self.coboundary(i),
        }
    }

    pub fn homology_dim(&self, i: usize, kind: HomologyKind) -> usize {
        let z = self.cycle_map(i, kind);
        let b = self.image_map(i, kind);
        z.cols() - z.rank() - b.rank()
    }

    /// Representatives for the (co)homology at grade `i`.
    ///
    /// Kernel vectors are taken in elimination order and kept when independent
    /// of the image; each is then shortened greedily by image generators.
    pub fn homology_basis(&self, i: usize, kind: HomologyKind) -> HomologyBasis {
        let z = self.cycle_map(i, kind);
        let b = self.image_map(i, kind);
        let n = z.cols();
        let image_gens = b.columns();
        let mut span = XorBasis::from_generators(n, &image_gens);
        let mut reps = Vec::new();
        for v in f2la::kernel_basis(&z) {
            if span.push(&v) {
                reps.push(v);
            }
        }
        for r in reps.iter_mut() {
            loop {
                let mut improved = false;
                for g in &image_gens {
                    let cand = r.xor(g);
                    if cand.weight() < r.weight() {
                        *r = cand;
                        improved = true;
                    }
                }
                if !improved {
                    break;
                }
            }
        }
        HomologyBasis { grade: i, kind, representatives: reps }
    }

    pub fn cohomology_basis(&self, i: usize) -> HomologyBasis {
        self.homology_basis(i, HomologyKind::Cohomology)
    }

    /// Is `v` a nontrivial class? (`v` must already be a cycle.)
    pub fn is_nontrivial(&self, i: usize, kind: HomologyKind, v: &BitVec) -> bool {
        let span = XorBasis::from_generators(v.len(), &self.image_map(i, kind).columns());
        !span.contains(v)
    }

    /// Minimum weight over `ker \ Im` at grade `i`.
    ///
    /// Kernels of dimension up to [`EXHAUSTIVE_COSET_DIM`] are walked in full;
    /// otherwise vectors are enumerated by weight up to `budget`.
    pub fn homology_distance(&self, i: usize, kind: HomologyKind, budget: usize) -> Distance {
        let z = self.cycle_map(i, kind);
        let b = self.image_map(i, kind);
        let n = z.cols();
        let image = f2la::image_basis(&b);
        let reps = self.homology_basis(i, kind).representatives;
        if reps.is_empty() {
            return Distance::Infinite;
        }
        let dim_ker = image.len() + reps.len();
        if dim_ker <= EXHAUSTIVE_COSET_DIM {
            let gens: Vec<BitVec> = image.iter().chain(&reps).cloned().collect();
            let rep_mask = ((1u64 << reps.len()) - 1) << image.len();
            let mut best = usize::MAX;
            let mut current = BitVec::zeros(n);
            for k in 1u64..(1u64 << dim_ker) {
                current.xor_assign(&gens[k.trailing_zeros() as usize]);
                let gray = k ^ (k >> 1);
                if gray & rep_mask != 0 {
                    best = best.min(current.weight());
                }
            }
            return Distance::Finite(best);
        }
        let span = XorBasis::from_generators(n, &image);
        for w in 1..=budget.min(n) {
            for support in itertools::Itertools::combinations(0..n, w) {
                let v = BitVec::from_support(n, support);
                if z.mul_vec(&v).is_zero() && !span.contains(&v) {
                    return Distance::Finite(w);
                }
            }
        }
        Distance::Unknown
    }

    /// The `h`-Cheeger constant: min over `c ∉ ker δ_{h+1}` of `|δ c̃| / |c̃|`,
    /// with `c̃` a minimum-weight element of `c + ker δ_{h+1}`.
    ///
    /// Classes of `C_h / ker δ_{h+1}` are enumerated exhaustively when there
    /// are at most `2^budget_bits` of them.
    pub fn cheeger(&self, h: usize, budget_bits: usize) -> Cheeger {
        let delta = self.coboundary(h + 1);
        let n = delta.cols();
        let kernel = f2la::kernel_basis(&delta);
        let r = n - kernel.len();
        if r == 0 {
            return Cheeger::Infinite;
        }
        if r > budget_bits || r > 40 || kernel.len() > 40 {
            return Cheeger::Unknown;
        }
        // Complement of the kernel spanned by unit vectors, picked in index order.
        let mut span = XorBasis::from_generators(n, &kernel);
        let complement: Vec<BitVec> = (0..n).map(|j| BitVec::unit(n, j)).filter(|e| span.push(e)).collect();
        debug_assert_eq!(complement.len(), r);
        let mut best: Option<Ratio<usize>> = None;
        let mut c = BitVec::zeros(n);
        for k in 1u64..(1u64 << r) {
            c.xor_assign(&complement[k.trailing_zeros() as usize]);
            let num = delta.mul_vec(&c).weight();
            let den = match coset_min_weight_in_span(&kernel, &c, n) {
                f2la::CosetWeight::Exact { weight, .. } => weight,
                f2la::CosetWeight::Unknown => return Cheeger::Unknown,
            };
            let ratio = Ratio::new(num, den);
            if best.map_or(true, |b| ratio < b) {
                best = Some(ratio);
            }
        }
        Cheeger::Exact(best.expect("r > 0"))
    }

    /// Appends a grade above `top` whose boundary columns are a basis of `ker ∂_top`.
    pub fn extend_with_cycle_space(&self) -> ChainComplex {
        let top = self.top();
        let kernel = f2la::kernel_basis(&self.boundary(top));
        let d = BitMatrix::from_columns(self.dim(top), &kernel);
        let mut grades = self.grades.clone();
        grades.push(kernel.len());
        let mut boundaries = self.boundaries.clone();
        boundaries.push(d);
        ChainComplex { grades, boundaries, labels: self.labels.clone() }
    }

    /// Drops all grades above `top`.
    pub fn truncate(&self, top: usize) -> ChainComplex {
        let keep = (top + 1).min(self.grades.len());
        let labels = self.labels.iter().filter(|(g, _)| **g < keep).map(|(g, l)| (*g, l.clone())).collect();
        ChainComplex {
            grades: self.grades[..keep].to_vec(),
            boundaries: self.boundaries[..keep.saturating_sub(1)].to_vec(),
            labels,
        }
    }

    /// Reversed complex: grade `i` becomes grade `top − i` and boundaries become coboundaries.
    pub fn dual(&self) -> ChainComplex {
        let top = self.top();
        let grades: Vec<usize> = self.grades.iter().rev().copied().collect();
        let boundaries = (1..=top).map(|k| self.coboundary(top - k + 1)).collect();
        let labels = self.labels.iter().map(|(g, l)| (top - g, l.clone())).collect();
        ChainComplex { grades, boundaries, labels }
    }

    /// Direct sum of complexes of equal length (block-diagonal boundaries).
    pub fn direct_sum(parts: &[ChainComplex]) -> Result<ChainComplex> {
        let Some(first) = parts.first() else {
            return Err(Error::Dimension("direct sum of no complexes".into()));
        };
        let len = first.grades.len();
        if parts.iter().any(|p| p.grades.len() != len) {
            return Err(Error::Dimension("direct sum needs complexes of equal length".into()));
        }
        let grades: Vec<usize> = (0..len).map(|i| parts.iter().map(|p| p.dim(i)).sum()).collect();
        let mut boundaries = Vec::new();
        for k in 1..len {
            let mut entries = Vec::new();
            let (mut ro, mut co) = (0, 0);
            for p in parts {
                let d = p.boundary(k);
                entries.extend(d.entries().map(|(r, c)| (r + ro, c + co)));
                ro += d.rows();
                co += d.cols();
            }
            boundaries.push(BitMatrix::from_entries(grades[k - 1], grades[k], entries));
        }
        ChainComplex::new(grades, boundaries)
    }
}
