//! Simplicial 3-complexes with 4-colored vertices.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    R,
    G,
    B,
    Y,
}

impl Color {
    pub const ALL: [Color; 4] = [Color::R, Color::G, Color::B, Color::Y];
}

/// Vertex positions on a periodic cube, used to read off windings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub coords: Vec<[i64; 3]>,
    pub period: i64,
}

impl Embedding {
    /// Shortest periodic displacement from `a` to `b`.
    pub fn displacement(&self, a: usize, b: usize) -> [i64; 3] {
        let p = self.period;
        let mut d = [0; 3];
        for k in 0..3 {
            let mut x = (self.coords[b][k] - self.coords[a][k]).rem_euclid(p);
            if x > p / 2 {
                x -= p;
            }
            d[k] = x;
        }
        d
    }

    /// Parity of crossings of the plane `x_axis = at` by the straight segment `a → b`.
    pub fn crosses(&self, a: usize, b: usize, axis: usize, at: i64) -> bool {
        let p = self.period;
        let start = self.coords[a][axis];
        let end = start + self.displacement(a, b)[axis];
        let (lo, hi) = if start < end { (start, end) } else { (end, start) };
        // planes at at + k·p strictly inside (lo, hi)
        let first = at + (lo - at).div_euclid(p) * p + p;
        let mut count = 0;
        let mut x = first;
        while x < hi {
            if x > lo {
                count += 1;
            }
            x += p;
        }
        count % 2 == 1
    }
}

#[derive(Clone, Debug)]
pub struct ColoredSimplicialComplex {
    colors: Vec<Color>,
    tets: Vec<[usize; 4]>,
    edges: Vec<[usize; 2]>,
    faces: Vec<[usize; 3]>,
    edge_index: BTreeMap<[usize; 2], usize>,
    face_index: BTreeMap<[usize; 3], usize>,
    vertex_tets: Vec<Vec<usize>>,
    edge_tets: Vec<Vec<usize>>,
    face_tets: Vec<Vec<usize>>,
    embedding: Option<Embedding>,
}

#[derive(Serialize, Deserialize)]
struct VertexRecord {
    id: u64,
    color: Color,
}

#[derive(Serialize, Deserialize)]
struct ComplexRecord {
    vertices: Vec<VertexRecord>,
    tetrahedra: Vec<[u64; 4]>,
}

impl ColoredSimplicialComplex {
    /// Every tetrahedron must carry all four colors and every triangle may lie in at most two tetrahedra.
    pub fn new(colors: Vec<Color>, tets: Vec<[usize; 4]>) -> Result<Self> {
        let nv = colors.len();
        let mut sorted_tets = Vec::with_capacity(tets.len());
        let mut seen = BTreeSet::new();
        for (i, t) in tets.iter().enumerate() {
            let mut t = *t;
            t.sort_unstable();
            if t.iter().any(|&v| v >= nv) || t.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidComplex(format!("tetrahedron {i} has invalid vertices {t:?}")));
            }
            let cs: BTreeSet<Color> = t.iter().map(|&v| colors[v]).collect();
            if cs.len() != 4 {
                return Err(Error::InvalidComplex(format!("tetrahedron {i} does not carry all four colors")));
            }
            if !seen.insert(t) {
                return Err(Error::InvalidComplex(format!("tetrahedron {t:?} listed twice")));
            }
            sorted_tets.push(t);
        }
        let mut edge_set = BTreeSet::new();
        let mut face_set = BTreeSet::new();
        for t in &sorted_tets {
            for i in 0..4 {
                for j in i + 1..4 {
                    edge_set.insert([t[i], t[j]]);
                }
                let f: Vec<usize> = (0..4).filter(|&k| k != i).map(|k| t[k]).collect();
                face_set.insert([f[0], f[1], f[2]]);
            }
        }
        let edges: Vec<[usize; 2]> = edge_set.into_iter().collect();
        let faces: Vec<[usize; 3]> = face_set.into_iter().collect();
        let edge_index: BTreeMap<_, _> = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let face_index: BTreeMap<_, _> = faces.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        let mut vertex_tets = vec![Vec::new(); nv];
        let mut edge_tets = vec![Vec::new(); edges.len()];
        let mut face_tets = vec![Vec::new(); faces.len()];
        for (ti, t) in sorted_tets.iter().enumerate() {
            for i in 0..4 {
                vertex_tets[t[i]].push(ti);
                for j in i + 1..4 {
                    edge_tets[edge_index[&[t[i], t[j]]]].push(ti);
                }
                let f: Vec<usize> = (0..4).filter(|&k| k != i).map(|k| t[k]).collect();
                face_tets[face_index[&[f[0], f[1], f[2]]]].push(ti);
            }
        }
        if let Some(f) = face_tets.iter().position(|ts| ts.len() > 2) {
            return Err(Error::InvalidComplex(format!("triangle {:?} lies in more than two tetrahedra", faces[f])));
        }
        Ok(Self { colors, tets: sorted_tets, edges, faces, edge_index, face_index, vertex_tets, edge_tets, face_tets, embedding: None })
    }

    pub fn with_embedding(mut self, embedding: Embedding) -> Result<Self> {
        if embedding.coords.len() != self.colors.len() {
            return Err(Error::Dimension("one coordinate triple per vertex required".into()));
        }
        self.embedding = Some(embedding);
        Ok(self)
    }

    /// Parses `{vertices:[{id,color}], tetrahedra:[[4 ids]]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let rec: ComplexRecord = serde_json::from_str(text)?;
        let index: BTreeMap<u64, usize> = rec.vertices.iter().enumerate().map(|(i, v)| (v.id, i)).collect();
        if index.len() != rec.vertices.len() {
            return Err(Error::Parse("duplicate vertex id".into()));
        }
        let mut tets = Vec::with_capacity(rec.tetrahedra.len());
        for t in &rec.tetrahedra {
            let mut out = [0; 4];
            for (k, id) in t.iter().enumerate() {
                out[k] = *index.get(id).ok_or_else(|| Error::Parse(format!("unknown vertex id {id}")))?;
            }
            tets.push(out);
        }
        Self::new(rec.vertices.iter().map(|v| v.color).collect(), tets)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rec = ComplexRecord {
            vertices: self.colors.iter().enumerate().map(|(i, &color)| VertexRecord { id: i as u64, color }).collect(),
            tetrahedra: self.tets.iter().map(|t| t.map(|v| v as u64)).collect(),
        };
        serde_json::to_value(rec).expect("plain data serializes")
    }

    pub fn num_vertices(&self) -> usize {
        self.colors.len()
    }

    pub fn color(&self, v: usize) -> Color {
        self.colors[v]
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn tets(&self) -> &[[usize; 4]] {
        &self.tets
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn embedding(&self) -> Option<&Embedding> {
        self.embedding.as_ref()
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&if a < b { [a, b] } else { [b, a] }).copied()
    }

    pub fn face_index(&self, mut f: [usize; 3]) -> Option<usize> {
        f.sort_unstable();
        self.face_index.get(&f).copied()
    }

    pub fn vertex_tets(&self, v: usize) -> &[usize] {
        &self.vertex_tets[v]
    }

    pub fn edge_tets(&self, e: usize) -> &[usize] {
        &self.edge_tets[e]
    }

    pub fn face_tets(&self, f: usize) -> &[usize] {
        &self.face_tets[f]
    }

    /// The two endpoint colors, sorted.
    pub fn edge_colors(&self, e: usize) -> (Color, Color) {
        let (a, b) = (self.colors[self.edges[e][0]], self.colors[self.edges[e][1]]);
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    pub fn edge_has_colors(&self, e: usize, x: Color, y: Color) -> bool {
        let c = self.edge_colors(e);
        c == (x, y) || c == (y, x)
    }

    /// A triangle takes the color its vertices miss.
    pub fn face_color(&self, f: usize) -> Color {
        let present: Vec<Color> = self.faces[f].iter().map(|&v| self.colors[v]).collect();
        Color::ALL.into_iter().find(|c| !present.contains(c)).expect("triangles have three colors")
    }

    /// Every triangle lies in exactly two tetrahedra.
    pub fn is_closed(&self) -> bool {
        self.face_tets.iter().all(|ts| ts.len() == 2)
    }

    pub fn require_closed(&self) -> Result<()> {
        match self.face_tets.iter().position(|ts| ts.len() != 2) {
            None => Ok(()),
            Some(f) => Err(Error::InvalidComplex(format!("triangle {:?} is on a boundary", self.faces[f]))),
        }
    }

    /// Euler characteristic `V − E + F − T`.
    pub fn euler_characteristic(&self) -> i64 {
        self.colors.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64 - self.tets.len() as i64
    }

    /// All simplices containing `s`.
    pub fn star(&self, s: &[usize]) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        for t in &self.tets {
            if s.iter().all(|v| t.contains(v)) {
                for sub in subsets(t) {
                    if s.iter().all(|v| sub.contains(v)) {
                        out.insert(sub);
                    }
                }
            }
        }
        out
    }

    /// Simplices of tetrahedra containing `s` that are disjoint from `s`.
    pub fn link(&self, s: &[usize]) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        for t in &self.tets {
            if s.iter().all(|v| t.contains(v)) {
                let rest: Vec<usize> = t.iter().copied().filter(|v| !s.contains(v)).collect();
                out.extend(subsets(&rest));
            }
        }
        out
    }
}

/// Nonempty subsets of a sorted vertex list, each sorted.
fn subsets(vs: &[usize]) -> Vec<Vec<usize>> {
    (1u32..(1 << vs.len())).map(|m| vs.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &v)| v).collect()).collect()
}

/// Closure of a set of simplices.
pub fn closure(set: &BTreeSet<Vec<usize>>) -> BTreeSet<Vec<usize>> {
    set.iter().flat_map(|s| subsets(s)).collect()
}

/// Boundary of the 4-dimensional cross-polytope. Vertex `2i + s` is `±e_i`
/// (`s = 1` for the minus sign) with color `i`; tetrahedron `m` picks `−e_i` when bit `i` of `m` is set.
pub fn sixteen_cell() -> ColoredSimplicialComplex {
    let colors = (0..8).map(|v| Color::ALL[v / 2]).collect();
    let tets = (0..16usize).map(|m| [0, 1, 2, 3].map(|i| 2 * i + (m >> i & 1))).collect();
    ColoredSimplicialComplex::new(colors, tets).expect("16-cell is well formed")
}

/// Barycentric subdivision of the boundary of the 4-simplex, colored by cell dimension.
pub fn barycentric_boundary_4simplex() -> ColoredSimplicialComplex {
    // vertices: nonempty proper subsets of {0..4} of size 1..=4
    let cells: Vec<u32> = (1u32..31).filter(|m| m.count_ones() <= 4).collect();
    let index: BTreeMap<u32, usize> = cells.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let colors = cells.iter().map(|m| Color::ALL[m.count_ones() as usize - 1]).collect();
    let mut tets = Vec::new();
    for &top in cells.iter().filter(|m| m.count_ones() == 4) {
        let elems: Vec<u32> = (0..5).filter(|i| top >> i & 1 == 1).collect();
        // flags v ⊂ e ⊂ f ⊂ top from orderings of the four elements
        for perm in permutations(&elems) {
            let a = 1 << perm[0];
            let b = a | 1 << perm[1];
            let c = b | 1 << perm[2];
            tets.push([index[&a], index[&b], index[&c], index[&top]]);
        }
    }
    tets.sort_unstable();
    tets.dedup();
    ColoredSimplicialComplex::new(colors, tets).expect("subdivision is well formed")
}

fn permutations(xs: &[u32]) -> Vec<Vec<u32>> {
    if xs.len() <= 1 {
        return vec![xs.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..xs.len() {
        let mut rest = xs.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Body-centered-cubic triangulation of the 3-torus of side `L`.
///
/// Lattice points `p` (index `x + Ly + L²z`) are red for even `x+y+z` and
/// green otherwise; cube centers (index `L³ + p` for the cube with lowest
/// corner `p`) are blue for even parity and yellow otherwise. Each tetrahedron
/// joins a lattice edge to the centers of two face-adjacent cubes around it.
/// Coordinates are stored scaled by 4.
pub fn colored_3torus(l: usize) -> Result<ColoredSimplicialComplex> {
    if l < 4 || l % 2 == 1 {
        return Err(Error::InvalidComplex(format!("colored 3-torus needs an even side of at least 4, got {l}")));
    }
    let n = l * l * l;
    let idx = |x: i64, y: i64, z: i64| -> usize {
        let w = |a: i64| a.rem_euclid(l as i64) as usize;
        w(x) + l * w(y) + l * l * w(z)
    };
    let mut colors = Vec::with_capacity(2 * n);
    let mut coords = Vec::with_capacity(2 * n);
    for center in [false, true] {
        for p in 0..n {
            let (x, y, z) = (p % l, (p / l) % l, p / (l * l));
            let even = (x + y + z) % 2 == 0;
            colors.push(match (center, even) {
                (false, true) => Color::R,
                (false, false) => Color::G,
                (true, true) => Color::B,
                (true, false) => Color::Y,
            });
            let off = if center { 2 } else { 0 };
            coords.push([4 * x as i64 + off, 4 * y as i64 + off, 4 * z as i64 + off]);
        }
    }
    let mut tets = Vec::with_capacity(12 * n);
    for p in 0..n {
        let (x, y, z) = ((p % l) as i64, ((p / l) % l) as i64, (p / (l * l)) as i64);
        for a in 0..3 {
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            let shift = |v: [i64; 3], k: usize, d: i64| {
                let mut v = v;
                v[k] += d;
                v
            };
            let q = shift([x, y, z], a, 1);
            let ring: Vec<usize> = [(0, 0), (1, 0), (1, 1), (0, 1)]
                .iter()
                .map(|&(db, dc)| {
                    let corner = shift(shift([x, y, z], b, -db), c, -dc);
                    n + idx(corner[0], corner[1], corner[2])
                })
                .collect();
            for i in 0..4 {
                tets.push([p, idx(q[0], q[1], q[2]), ring[i], ring[(i + 1) % 4]]);
            }
        }
    }
    ColoredSimplicialComplex::new(colors, tets)?.with_embedding(Embedding { coords, period: 4 * l as i64 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_link(cx: &ColoredSimplicialComplex, s: &[usize]) -> BTreeSet<Vec<usize>> {
        let star = cx.star(s);
        let closed_star = closure(&star);
        let mut face_set = BTreeSet::new();
        face_set.insert(s.to_vec());
        let star_of_closure: BTreeSet<Vec<usize>> = closure(&face_set).iter().flat_map(|f| cx.star(f)).collect();
        closed_star.difference(&star_of_closure).cloned().collect()
    }

    #[test]
    fn sixteen_cell_counts() {
        let c = sixteen_cell();
        assert_eq!((c.num_vertices(), c.edges().len(), c.faces().len(), c.tets().len()), (8, 24, 32, 16));
        assert!(c.is_closed());
        assert_eq!(c.euler_characteristic(), 0);
    }

    #[test]
    fn barycentric_sphere() {
        let c = barycentric_boundary_4simplex();
        assert_eq!(c.num_vertices(), 30);
        assert_eq!(c.tets().len(), 120);
        assert!(c.is_closed());
        assert_eq!(c.euler_characteristic(), 0);
    }

    #[test]
    fn colored_torus_invariants() {
        let c = colored_3torus(4).unwrap();
        assert_eq!(c.tets().len(), 768);
        assert!(c.is_closed());
        assert_eq!(c.euler_characteristic(), 0);
        assert!(colored_3torus(3).is_err());
        assert!(colored_3torus(2).is_err());
        // every lattice edge and every center-center edge lies in four tetrahedra
        for e in 0..c.edges().len() {
            let (a, b) = c.edge_colors(e);
            if (a, b) == (Color::R, Color::G) || (a, b) == (Color::B, Color::Y) {
                assert_eq!(c.edge_tets(e).len(), 4);
            }
        }
    }

    #[test]
    fn link_matches_set_theoretic_definition() {
        for cx in [sixteen_cell(), barycentric_boundary_4simplex()] {
            for v in 0..cx.num_vertices() {
                assert_eq!(cx.link(&[v]), naive_link(&cx, &[v]));
            }
            for e in cx.edges() {
                assert_eq!(cx.link(e), naive_link(&cx, e));
            }
        }
        let t = colored_3torus(4).unwrap();
        for v in [0, 5, 64, 100] {
            assert_eq!(t.link(&[v]), naive_link(&t, &[v]));
        }
    }

    #[test]
    fn rejects_bad_input() {
        let colors = vec![Color::R, Color::G, Color::B, Color::B, Color::Y];
        assert!(ColoredSimplicialComplex::new(colors.clone(), vec![[0, 1, 2, 3]]).is_err());
        assert!(ColoredSimplicialComplex::new(colors.clone(), vec![[0, 1, 2, 2]]).is_err());
        assert!(ColoredSimplicialComplex::from_json("{\"vertices\":[], \"tetrahedra\":[[1,2,3,4]]}").is_err());
        let one = ColoredSimplicialComplex::new(colors, vec![[0, 1, 2, 4]]).unwrap();
        assert!(!one.is_closed());
        assert!(one.require_closed().is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = sixteen_cell();
        let back = ColoredSimplicialComplex::from_json(&c.to_json().to_string()).unwrap();
        assert_eq!(back.tets(), c.tets());
        assert_eq!(back.colors(), c.colors());
    }

    #[test]
    fn crossings() {
        let emb = Embedding { coords: vec![[0, 0, 0], [4, 0, 0], [12, 0, 0]], period: 16 };
        assert!(emb.crosses(0, 1, 0, 1));
        assert!(!emb.crosses(0, 1, 0, 5));
        assert_eq!(emb.displacement(0, 2), [-4, 0, 0]);
        assert!(emb.crosses(2, 0, 0, 13));
        assert!(!emb.crosses(2, 0, 0, 1));
    }
}
