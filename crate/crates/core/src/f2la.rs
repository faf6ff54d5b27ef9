//! Sparse and dense linear algebra over GF(2).
//!
//! [`BitVec`] is a packed dense vector; [`BitMatrix`] stores sorted column
//! supports. Elimination goes through [`XorBasis`], which always pivots on the
//! lowest set coordinate so that solutions and kernel bases are reproducible.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest coset dimension searched exhaustively by Gray-code enumeration.
pub const EXHAUSTIVE_COSET_DIM: usize = 24;

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn ones(len: usize) -> Self {
        Self::from_support(len, 0..len)
    }

    /// Builds a vector from a list of set coordinates; repeated indices cancel.
    pub fn from_support<I: IntoIterator<Item = usize>>(len: usize, support: I) -> Self {
        let mut v = Self::zeros(len);
        for i in support {
            v.flip(i);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_support(bits.len(), bits.iter().positions(|&b| b))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        if value {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Element-wise product.
    pub fn and(&self, other: &BitVec) -> BitVec {
        assert_eq!(self.len, other.len, "length mismatch in and");
        BitVec {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    /// Dot product over GF(2).
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn lowest_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + t)
                }
            })
        })
    }

    pub fn support(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    /// Restriction to a list of coordinates, in the order given.
    pub fn select(&self, coords: &[usize]) -> BitVec {
        BitVec::from_support(coords.len(), coords.iter().positions(|&c| self.get(c)))
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let n = self.len;
        BitVec::from_support(n + other.len, self.iter_ones().chain(other.iter_ones().map(|i| i + n)))
    }

    /// Copy of coordinates `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        BitVec::from_support(len, self.iter_ones().filter(|&i| i >= start && i < start + len).map(|i| i - start))
    }

    /// Compares two supports lexicographically as sorted index lists.
    pub fn cmp_support(&self, other: &BitVec) -> Ordering {
        self.iter_ones().cmp(other.iter_ones())
    }

    /// Packs the vector into a u64 (only valid for `len <= 64`).
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= 64);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn from_u64(len: usize, bits: u64) -> BitVec {
        assert!(len <= 64);
        let mut v = BitVec::zeros(len);
        if len > 0 {
            let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
            v.words[0] = bits & mask;
        }
        v
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[{}]{{", self.len)?;
        for (k, i) in self.iter_ones().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
struct BitVecRepr {
    len: usize,
    support: Vec<usize>,
}

impl Serialize for BitVec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BitVecRepr { len: self.len, support: self.support() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BitVec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = BitVecRepr::deserialize(d)?;
        let mut sorted = r.support.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != r.support.len() || sorted.last().is_some_and(|&i| i >= r.len) {
            return Err(serde::de::Error::custom("support indices must be unique and < len"));
        }
        Ok(BitVec::from_support(r.len, sorted))
    }
}

/// Column-sparse GF(2) matrix. Each column is a sorted list of row indices.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct BitMatrixRepr {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<usize>>,
}

impl<'de> Deserialize<'de> for BitMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = BitMatrixRepr::deserialize(d)?;
        BitMatrix::from_column_supports(r.rows, r.cols, r.columns).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix {}x{} {:?}", self.rows, self.cols, self.columns)
    }
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, columns: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self { rows: n, cols: n, columns: (0..n).map(|i| vec![i]).collect() }
    }

    /// Builds a matrix from explicit column supports. Duplicate entries cancel.
    pub fn from_column_supports(rows: usize, cols: usize, columns: Vec<Vec<usize>>) -> Result<Self> {
        if columns.len() != cols {
            return Err(Error::Dimension(format!("expected {cols} columns, got {}", columns.len())));
        }
        let mut out = Vec::with_capacity(cols);
        for col in columns {
            if let Some(&r) = col.iter().find(|&&r| r >= rows) {
                return Err(Error::Dimension(format!("row index {r} out of range for {rows} rows")));
            }
            out.push(BitVec::from_support(rows, col).support());
        }
        Ok(Self { rows, cols, columns: out })
    }

    pub fn from_columns(rows: usize, columns: &[BitVec]) -> Self {
        for c in columns {
            assert_eq!(c.len(), rows, "column length mismatch");
        }
        Self { rows, cols: columns.len(), columns: columns.iter().map(BitVec::support).collect() }
    }

    pub fn from_rows(cols: usize, rows: &[BitVec]) -> Self {
        Self::from_columns(cols, rows).transpose()
    }

    pub fn from_entries<I: IntoIterator<Item = (usize, usize)>>(rows: usize, cols: usize, entries: I) -> Self {
        let mut columns = vec![Vec::new(); cols];
        for (r, c) in entries {
            assert!(r < rows && c < cols, "entry ({r},{c}) out of range");
            columns[c].push(r);
        }
        Self::from_column_supports(rows, cols, columns).expect("checked above")
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column_support(&self, j: usize) -> &[usize] {
        &self.columns[j]
    }

    pub fn column(&self, j: usize) -> BitVec {
        BitVec::from_support(self.rows, self.columns[j].iter().copied())
    }

    pub fn columns(&self) -> Vec<BitVec> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn row(&self, i: usize) -> BitVec {
        BitVec::from_support(self.cols, (0..self.cols).filter(|&j| self.columns[j].binary_search(&i).is_ok()))
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.columns[c].binary_search(&r).is_ok()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.columns.iter().enumerate().flat_map(|(c, col)| col.iter().map(move |&r| (r, c)))
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn max_col_weight(&self) -> usize {
        self.columns.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_row_weight(&self) -> usize {
        let mut counts = vec![0usize; self.rows];
        for (r, _) in self.entries() {
            counts[r] += 1;
        }
        counts.into_iter().max().unwrap_or(0)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut columns = vec![Vec::new(); self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for &r in col {
                columns[r].push(c);
            }
        }
        BitMatrix { rows: self.cols, cols: self.rows, columns }
    }

    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.cols, "dimension mismatch in matrix-vector product");
        let mut out = BitVec::zeros(self.rows);
        for j in v.iter_ones() {
            for &r in &self.columns[j] {
                out.flip(r);
            }
        }
        out
    }

    pub fn multiply(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let columns = (0..other.cols).map(|j| self.mul_vec(&other.column(j))).collect::<Vec<_>>();
        Ok(BitMatrix::from_columns(self.rows, &columns))
    }

    pub fn select_columns(&self, cols: &[usize]) -> BitMatrix {
        BitMatrix { rows: self.rows, cols: cols.len(), columns: cols.iter().map(|&c| self.columns[c].clone()).collect() }
    }

    pub fn select_rows(&self, rows: &[usize]) -> BitMatrix {
        let pos: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(k, &r)| (r, k)).collect();
        let columns = self
            .columns
            .iter()
            .map(|col| {
                let mut c: Vec<usize> = col.iter().filter_map(|r| pos.get(r).copied()).collect();
                c.sort_unstable();
                c
            })
            .collect();
        BitMatrix { rows: rows.len(), cols: self.cols, columns }
    }

    pub fn rank(&self) -> usize {
        XorBasis::from_generators(self.rows, &self.columns()).rank()
    }
}

/// Incremental echelon basis over GF(2) with combination tracking.
///
/// Each stored vector has a distinct pivot (its lowest set coordinate) and
/// remembers which input generators sum to it.
#[derive(Clone, Debug)]
pub struct XorBasis {
    dim: usize,
    generators: usize,
    cap: usize,
    by_pivot: BTreeMap<usize, (BitVec, BitVec)>,
    kernel: Vec<BitVec>,
}

impl XorBasis {
    pub fn new(dim: usize) -> Self {
        Self::with_capacity(dim, 64)
    }

    pub fn with_capacity(dim: usize, generators: usize) -> Self {
        Self { dim, generators: 0, cap: generators.max(1), by_pivot: BTreeMap::new(), kernel: Vec::new() }
    }

    pub fn from_generators(dim: usize, gens: &[BitVec]) -> Self {
        let mut b = Self::with_capacity(dim, gens.len());
        for g in gens {
            b.push(g);
        }
        b
    }

    /// Adds a generator; returns true if it was independent.
    pub fn push(&mut self, v: &BitVec) -> bool {
        let idx = self.generators;
        if idx >= self.cap {
            self.cap *= 2;
            let cap = self.cap;
            for (_, combo) in self.by_pivot.values_mut() {
                *combo = BitVec::from_support(cap, combo.iter_ones());
            }
        }
        self.generators += 1;
        let (residue, mut combo) = self.reduce_with_combo(v);
        combo.flip(idx);
        match residue.lowest_one() {
            Some(p) => {
                self.by_pivot.insert(p, (residue, combo));
                true
            }
            None => {
                self.kernel.push(combo);
                false
            }
        }
    }

    fn trim(&self, combo: &BitVec) -> BitVec {
        combo.slice(0, self.generators)
    }

    fn reduce_with_combo(&self, v: &BitVec) -> (BitVec, BitVec) {
        assert_eq!(v.len(), self.dim, "vector length mismatch in reduction");
        let mut r = v.clone();
        let mut combo = BitVec::zeros(self.cap);
        for (&p, (b, c)) in &self.by_pivot {
            if r.get(p) {
                r.xor_assign(b);
                combo.xor_assign(c);
            }
        }
        (r, combo)
    }

    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut r = v.clone();
        for (&p, (b, _)) in &self.by_pivot {
            if r.get(p) {
                r.xor_assign(b);
            }
        }
        r
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Combination of generators summing to `v`, if `v` is in the span.
    pub fn express(&self, v: &BitVec) -> Option<BitVec> {
        let (r, combo) = self.reduce_with_combo(v);
        r.is_zero().then(|| self.trim(&combo))
    }

    pub fn rank(&self) -> usize {
        self.by_pivot.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.by_pivot.keys().copied().collect()
    }

    /// Echelon basis vectors in pivot order.
    pub fn basis(&self) -> Vec<BitVec> {
        self.by_pivot.values().map(|(b, _)| b.clone()).collect()
    }

    /// Relations among generators (each is a combination summing to zero).
    pub fn relations(&self) -> Vec<BitVec> {
        self.kernel.iter().map(|k| self.trim(k)).collect()
    }
}

pub fn transpose(m: &BitMatrix) -> BitMatrix {
    m.transpose()
}

pub fn multiply(a: &BitMatrix, b: &BitMatrix) -> Result<BitMatrix> {
    a.multiply(b)
}

/// Returns `y` with `M·y = x`, or [`Error::NoSolution`].
pub fn solve(m: &BitMatrix, x: &BitVec) -> Result<BitVec> {
    if x.len() != m.rows() {
        return Err(Error::Dimension(format!("rhs has length {}, matrix has {} rows", x.len(), m.rows())));
    }
    XorBasis::from_generators(m.rows(), &m.columns()).express(x).ok_or(Error::NoSolution)
}

/// Basis of `ker M`, `cols - rank` vectors long.
pub fn kernel_basis(m: &BitMatrix) -> Vec<BitVec> {
    XorBasis::from_generators(m.rows(), &m.columns()).relations()
}

/// Independent spanning set of `Im M` (echelon form).
pub fn image_basis(m: &BitMatrix) -> Vec<BitVec> {
    XorBasis::from_generators(m.rows(), &m.columns()).basis()
}

pub fn rank(m: &BitMatrix) -> usize {
    m.rank()
}

/// Result of a minimum-weight search that may be cut off by a budget.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CosetWeight {
    Exact { weight: usize, witness: BitVec },
    Unknown,
}

impl CosetWeight {
    pub fn weight(&self) -> Option<usize> {
        match self {
            CosetWeight::Exact { weight, .. } => Some(*weight),
            CosetWeight::Unknown => None,
        }
    }
}

/// Minimum Hamming weight over `{v + M·y}`.
///
/// Cosets of dimension up to [`EXHAUSTIVE_COSET_DIM`] are enumerated in full
/// by Gray code and the budget is not consulted. Larger cosets are searched by
/// increasing weight up to `budget`; if nothing is found the result is
/// `Unknown`. Ties are broken by lexicographically smallest support.
pub fn coset_min_weight(m: &BitMatrix, v: &BitVec, budget: usize) -> CosetWeight {
    assert_eq!(v.len(), m.rows(), "coset representative length mismatch");
    let basis = image_basis(m);
    coset_min_weight_in_span(&basis, v, budget)
}

/// Same as [`coset_min_weight`] with the subspace given by generators.
pub fn coset_min_weight_in_span(gens: &[BitVec], v: &BitVec, budget: usize) -> CosetWeight {
    let n = v.len();
    let basis = XorBasis::from_generators(n, gens).basis();
    if basis.len() <= EXHAUSTIVE_COSET_DIM {
        let mut current = v.clone();
        let mut best = current.clone();
        let mut best_w = best.weight();
        for i in 1u64..(1u64 << basis.len()) {
            current.xor_assign(&basis[i.trailing_zeros() as usize]);
            let w = current.weight();
            if w < best_w || (w == best_w && current.cmp_support(&best) == Ordering::Less) {
                best_w = w;
                best = current.clone();
            }
        }
        return CosetWeight::Exact { weight: best_w, witness: best };
    }
    // Weight-bounded search: e is in the coset iff H·e = H·v for H spanning the annihilator.
    let checks = annihilator(n, &basis);
    let target: Vec<bool> = checks.iter().map(|h| h.dot(v)).collect();
    for w in 0..=budget.min(n) {
        for combo in (0..n).combinations(w) {
            let e = BitVec::from_support(n, combo.iter().copied());
            if checks.iter().zip(&target).all(|(h, &t)| h.dot(&e) == t) {
                return CosetWeight::Exact { weight: w, witness: e };
            }
        }
    }
    CosetWeight::Unknown
}

/// Basis of the orthogonal complement of the span of `gens` in GF(2)^n.
pub fn annihilator(n: usize, gens: &[BitVec]) -> Vec<BitVec> {
    if gens.is_empty() {
        return (0..n).map(|i| BitVec::unit(n, i)).collect();
    }
    kernel_basis(&BitMatrix::from_rows(n, gens))
}

/// Gray-code walk over all `2^k` elements of `v + span(gens)`; `gens` must be independent.
pub fn for_each_in_coset<F: FnMut(&BitVec)>(gens: &[BitVec], v: &BitVec, mut f: F) {
    assert!(gens.len() < 63, "coset too large to enumerate");
    let mut current = v.clone();
    f(&current);
    for i in 1u64..(1u64 << gens.len()) {
        current.xor_assign(&gens[i.trailing_zeros() as usize]);
        f(&current);
    }
}
