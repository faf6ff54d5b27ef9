//! 1-form CZ gate between the red and green surface codes of a 4-colorable 3-manifold.
//!
//! Red qubits sit on red faces (faces with no red vertex), X-checks on red
//! vertices, Z-checks on edges without a red endpoint, and meta-checks on blue
//! and yellow vertices. Green is symmetric. The gate complex has blue/yellow
//! vertices, by-edges, rg-edges and red/green vertices in grades 0..3.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::code::CssCode;
use crate::complex::ChainComplex;
use crate::error::{Error, Result};
use crate::f2la::{self, BitMatrix, BitVec};
use crate::hfgate::{HigherFormGate, LogicalPauli, SiteKind};
use crate::instances::colored::{Color, ColoredSimplicialComplex};
use crate::opalg::PhasedCssOperator;

/// Which adjacent red face anchors each link traversal, and which way it runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceChoice {
    Lowest,
    Highest,
}

#[derive(Clone, Debug)]
pub struct SurfaceLayer {
    pub color: Color,
    /// Qubit `q` sits on face `faces[q]`.
    pub faces: Vec<usize>,
    /// X-check `i` sits on vertex `vertices[i]`.
    pub vertices: Vec<usize>,
    /// Z-check `j` sits on edge `edges[j]`.
    pub edges: Vec<usize>,
    pub code: CssCode,
}

impl SurfaceLayer {
    pub fn qubit_of_face(&self, f: usize) -> Option<usize> {
        self.faces.binary_search(&f).ok()
    }
}

#[derive(Clone, Debug)]
pub struct Hggt {
    pub cells: ColoredSimplicialComplex,
    pub red: SurfaceLayer,
    pub green: SurfaceLayer,
    pub by_vertices: Vec<usize>,
    pub by_edges: Vec<usize>,
    pub rg_edges: Vec<usize>,
    pub rg_vertices: Vec<usize>,
    /// Per by-edge: link vertices in traversal order `g0, r1, g1, r2, …`.
    pub link_orders: Vec<Vec<usize>>,
    pub gate: HigherFormGate,
}

/// Membranes and strings on the combined register, indexed `3·color + axis`
/// (red = 0, green = 1), plus the by-lattice membranes normal to each axis.
#[derive(Clone, Debug)]
pub struct LogicalFrame {
    pub xs: Vec<BitVec>,
    pub zs: Vec<BitVec>,
    pub gate_cocycles: Vec<BitVec>,
}

fn third_vertex(cells: &ColoredSimplicialComplex, t: usize, skip: &[usize], avoid: Color) -> Option<usize> {
    cells.tets()[t].iter().copied().find(|v| !skip.contains(v) && cells.color(*v) != avoid)
}

fn surface_layer(cells: &ColoredSimplicialComplex, color: Color) -> Result<SurfaceLayer> {
    let faces: Vec<usize> = (0..cells.faces().len()).filter(|&f| cells.face_color(f) == color).collect();
    let vertices: Vec<usize> = (0..cells.num_vertices()).filter(|&v| cells.color(v) == color).collect();
    let edges: Vec<usize> = (0..cells.edges().len()).filter(|&e| cells.edges()[e].iter().all(|&v| cells.color(v) != color)).collect();
    let meta: Vec<usize> = (0..cells.num_vertices()).filter(|&v| matches!(cells.color(v), Color::B | Color::Y)).collect();
    let vpos: BTreeMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let fpos: BTreeMap<usize, usize> = faces.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let epos: BTreeMap<usize, usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut d1 = Vec::new();
    for (q, &f) in faces.iter().enumerate() {
        for &t in cells.face_tets(f) {
            let apex = cells.tets()[t].iter().copied().find(|v| !cells.faces()[f].contains(v)).expect("tetrahedron has an apex");
            d1.push((vpos[&apex], q));
        }
    }
    let mut d2 = BTreeSet::new();
    for (j, &e) in edges.iter().enumerate() {
        let [a, b] = cells.edges()[e];
        for &t in cells.edge_tets(e) {
            let w = third_vertex(cells, t, &[a, b], color).expect("edge has a non-matching third vertex");
            let f = cells.face_index([a, b, w]).expect("face of a tetrahedron");
            d2.insert((fpos[&f], j));
        }
    }
    let mut d3 = Vec::new();
    for (m, &v) in meta.iter().enumerate() {
        for (&e, &j) in &epos {
            if cells.edges()[e].contains(&v) {
                d3.push((j, m));
            }
        }
    }
    let complex = ChainComplex::new(
        vec![vertices.len(), faces.len(), edges.len(), meta.len()],
        vec![
            BitMatrix::from_entries(vertices.len(), faces.len(), d1),
            BitMatrix::from_entries(faces.len(), edges.len(), d2),
            BitMatrix::from_entries(edges.len(), meta.len(), d3),
        ],
    )?;
    let complex = complex.with_labels(1, faces.iter().map(|&f| format!("f{:?}", cells.faces()[f])).collect())?;
    Ok(SurfaceLayer { color, faces, vertices, edges, code: CssCode::from_complex(complex)? })
}

/// Walks the alternating link cycle of by-edge `e` from the reference green vertex.
fn link_order(cells: &ColoredSimplicialComplex, red: &SurfaceLayer, green: &SurfaceLayer, e: usize, choice: ReferenceChoice) -> Result<Vec<usize>> {
    let [a, b] = cells.edges()[e];
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &t in cells.edge_tets(e) {
        let r = cells.tets()[t].iter().copied().find(|&v| cells.color(v) == Color::R).expect("tetrahedron has a red vertex");
        let g = cells.tets()[t].iter().copied().find(|&v| cells.color(v) == Color::G).expect("tetrahedron has a green vertex");
        adj.entry(r).or_default().push(g);
        adj.entry(g).or_default().push(r);
    }
    if adj.values().any(|n| n.len() != 2) {
        return Err(Error::InvalidComplex(format!("link of edge {e} is not a cycle")));
    }
    let red_q = |g: usize| red.qubit_of_face(cells.face_index([a, b, g]).expect("red face")).expect("red qubit");
    let green_q = |r: usize| green.qubit_of_face(cells.face_index([a, b, r]).expect("green face")).expect("green qubit");
    let greens = adj.keys().copied().filter(|&v| cells.color(v) == Color::G);
    let g0 = match choice {
        ReferenceChoice::Lowest => greens.min_by_key(|&g| red_q(g)),
        ReferenceChoice::Highest => greens.max_by_key(|&g| red_q(g)),
    }
    .expect("link is nonempty");
    let mut first = adj[&g0].clone();
    first.sort_by_key(|&r| green_q(r));
    let start = if choice == ReferenceChoice::Lowest { first[0] } else { first[1] };
    let mut order = vec![g0];
    let (mut prev, mut cur) = (g0, start);
    while cur != g0 {
        order.push(cur);
        let next = if adj[&cur][0] == prev { adj[&cur][1] } else { adj[&cur][0] };
        prev = cur;
        cur = next;
    }
    if order.len() != adj.len() {
        return Err(Error::InvalidComplex(format!("link of edge {e} is disconnected")));
    }
    Ok(order)
}

pub fn hggt_build(cells: &ColoredSimplicialComplex) -> Result<Hggt> {
    hggt_build_with(cells, ReferenceChoice::Lowest)
}

pub fn hggt_build_with(cells: &ColoredSimplicialComplex, choice: ReferenceChoice) -> Result<Hggt> {
    cells.require_closed()?;
    let red = surface_layer(cells, Color::R)?;
    let green = surface_layer(cells, Color::G)?;
    let nv = cells.num_vertices();
    let by_vertices: Vec<usize> = (0..nv).filter(|&v| matches!(cells.color(v), Color::B | Color::Y)).collect();
    let rg_vertices: Vec<usize> = (0..nv).filter(|&v| matches!(cells.color(v), Color::R | Color::G)).collect();
    let by_edges: Vec<usize> = (0..cells.edges().len()).filter(|&e| cells.edge_has_colors(e, Color::B, Color::Y)).collect();
    let rg_edges: Vec<usize> = (0..cells.edges().len()).filter(|&e| cells.edge_has_colors(e, Color::R, Color::G)).collect();
    let pos = |list: &[usize], x: usize| list.binary_search(&x).expect("indexed element");
    let d1 = BitMatrix::from_entries(
        by_vertices.len(),
        by_edges.len(),
        by_edges.iter().enumerate().flat_map(|(j, &e)| cells.edges()[e].map(|v| (pos(&by_vertices, v), j))).collect::<Vec<_>>(),
    );
    let mut d2 = Vec::new();
    for (j, &e) in rg_edges.iter().enumerate() {
        let [a, b] = cells.edges()[e];
        for &t in cells.edge_tets(e) {
            let rest: Vec<usize> = cells.tets()[t].iter().copied().filter(|&v| v != a && v != b).collect();
            d2.push((pos(&by_edges, cells.edge_index(rest[0], rest[1]).expect("edge of a tetrahedron")), j));
        }
    }
    let d3 = BitMatrix::from_entries(
        rg_edges.len(),
        rg_vertices.len(),
        rg_edges.iter().enumerate().flat_map(|(j, &e)| cells.edges()[e].map(|v| (j, pos(&rg_vertices, v)))).collect::<Vec<_>>(),
    );
    let gate_complex = ChainComplex::new(
        vec![by_vertices.len(), by_edges.len(), rg_edges.len(), rg_vertices.len()],
        vec![d1, BitMatrix::from_entries(by_edges.len(), rg_edges.len(), d2), d3],
    )?;
    let nr = red.code.n();
    let n = nr + green.code.n();
    let mut link_orders = Vec::with_capacity(by_edges.len());
    let mut sites = Vec::with_capacity(by_edges.len());
    for &e in &by_edges {
        let order = link_order(cells, &red, &green, e, choice)?;
        let [a, b] = cells.edges()[e];
        let red_q = |g: usize| red.qubit_of_face(cells.face_index([a, b, g]).unwrap()).unwrap();
        let green_q = |r: usize| nr + green.qubit_of_face(cells.face_index([a, b, r]).unwrap()).unwrap();
        let mut pairs = Vec::new();
        for j in (2..order.len()).step_by(2) {
            for i in (1..j).step_by(2) {
                pairs.push((red_q(order[j]), green_q(order[i])));
            }
        }
        sites.push(PhasedCssOperator::from_parts(n, 0, BitVec::zeros(n), vec![0; n], pairs)?);
        link_orders.push(order);
    }
    let gate = HigherFormGate::new(1, gate_complex, sites, vec![red.code.clone(), green.code.clone()], vec![], SiteKind::Cz)?;
    Ok(Hggt { cells: cells.clone(), red, green, by_vertices, by_edges, rg_edges, rg_vertices, link_orders, gate })
}

impl Hggt {
    pub fn num_data(&self) -> usize {
        self.red.code.n() + self.green.code.n()
    }

    fn layer(&self, color: Color) -> Result<(&SurfaceLayer, &SurfaceLayer, usize, usize)> {
        let nr = self.red.code.n();
        match color {
            Color::R => Ok((&self.red, &self.green, 0, nr)),
            Color::G => Ok((&self.green, &self.red, nr, 0)),
            c => Err(Error::InvalidComplex(format!("no surface layer of color {c:?}"))),
        }
    }

    /// Dressed X-check at vertex `v` (red or green) on data plus one ancilla per rg-edge.
    ///
    /// For every same-link vertex `w` of the other color other than the lowest
    /// one `w0`, applies `CZ(anc(vw), f)` along the shortest path from `w` to
    /// `w0` through faces `{v, b, y}` of the other layer.
    pub fn gauged_x_check(&self, v: usize) -> Result<PhasedCssOperator> {
        let (own, other, own_off, other_off) = self.layer(self.cells.color(v))?;
        let total = self.num_data() + self.rg_edges.len();
        let i = own.vertices.binary_search(&v).map_err(|_| Error::InvalidComplex(format!("vertex {v} carries no check")))?;
        let x = own.code.x_checks()[i].clone();
        let x = PhasedCssOperator::x(own.code.n(), &x).shift(total, own_off);
        let other_color = other.color;
        // graph on other-color link vertices, edges labelled by face {v, b, y}
        let mut adj: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        let mut by_seen = BTreeSet::new();
        for &t in self.cells.vertex_tets(v) {
            let tet = self.cells.tets()[t];
            let by: Vec<usize> = tet.iter().copied().filter(|&w| matches!(self.cells.color(w), Color::B | Color::Y)).collect();
            if !by_seen.insert((by[0], by[1])) {
                continue;
            }
            let f = self.cells.face_index([v, by[0], by[1]]).expect("face of a tetrahedron");
            let q = other_off + other.qubit_of_face(f).expect("face of the other layer");
            let ws: Vec<usize> = self
                .cells
                .edge_tets(self.cells.edge_index(by[0], by[1]).unwrap())
                .iter()
                .filter(|&&s| self.cells.tets()[s].contains(&v))
                .map(|&s| self.cells.tets()[s].iter().copied().find(|&w| self.cells.color(w) == other_color).unwrap())
                .collect();
            if ws.len() != 2 {
                return Err(Error::InvalidComplex(format!("link of vertex {v} is not a surface")));
            }
            adj.entry(ws[0]).or_default().push((q, ws[1]));
            adj.entry(ws[1]).or_default().push((q, ws[0]));
        }
        let w0 = *adj.keys().next().ok_or_else(|| Error::InvalidComplex(format!("vertex {v} has an empty link")))?;
        // BFS tree rooted at w0, neighbours taken in face order
        let mut parent: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        let mut queue = VecDeque::from([w0]);
        let mut seen = BTreeSet::from([w0]);
        while let Some(w) = queue.pop_front() {
            let mut nbrs = adj[&w].clone();
            nbrs.sort();
            for (q, u) in nbrs {
                if seen.insert(u) {
                    parent.insert(u, (q, w));
                    queue.push_back(u);
                }
            }
        }
        if seen.len() != adj.len() {
            return Err(Error::InvalidComplex(format!("link of vertex {v} is disconnected")));
        }
        let mut pairs = Vec::new();
        for &w in adj.keys().filter(|&&w| w != w0) {
            let e = self.cells.edge_index(v, w).expect("rg-edge");
            let anc = self.num_data() + self.rg_edges.binary_search(&e).expect("rg-edge index");
            let mut cur = w;
            while cur != w0 {
                let (q, up) = parent[&cur];
                pairs.push((anc, q));
                cur = up;
            }
        }
        let dress = PhasedCssOperator::from_parts(total, 0, BitVec::zeros(total), vec![0; total], pairs)?;
        Ok(dress.mul(&x))
    }

    /// `U(c) X(m) U(c)† X(m)` for an X-type membrane `m` supported on one layer.
    pub fn membrane_action(&self, c: &BitVec, m: &BitVec) -> Result<PhasedCssOperator> {
        let n = self.num_data();
        let nr = self.red.code.n();
        if m.len() != n {
            return Err(Error::Dimension(format!("membrane has length {}, expected {n}", m.len())));
        }
        let on_red = m.iter_ones().all(|q| q < nr);
        let on_green = m.iter_ones().all(|q| q >= nr);
        let (layer, off) = match (on_red, on_green) {
            (true, _) => (&self.red, 0),
            (_, true) => (&self.green, nr),
            _ => return Err(Error::CheckFailed("membrane spans both layers".into())),
        };
        let local = m.slice(off, layer.code.n());
        if !layer.code.z_syndrome(&local).is_zero() {
            return Err(Error::CheckFailed("chain has odd edge incidence".into()));
        }
        let u = self.gate.gate_for_cocycle(c)?;
        let xm = PhasedCssOperator::x(n, m);
        Ok(u.mul(&xm).mul(&u.dagger()).mul(&xm))
    }

    /// Axis-aligned logical membranes and strings; needs an embedding.
    pub fn logical_frame(&self) -> Result<LogicalFrame> {
        let emb = self.cells.embedding().ok_or_else(|| Error::InvalidComplex("complex has no embedding".into()))?;
        let mut xs = Vec::new();
        let mut zs = Vec::new();
        let n = self.num_data();
        for (layer, off) in [(&self.red, 0), (&self.green, self.red.code.n())] {
            let d1 = layer.code.complex().boundary(1);
            let members: Vec<BitVec> = (0..3)
                .map(|axis| {
                    BitVec::from_support(
                        layer.code.n(),
                        (0..layer.code.n()).filter(|&q| {
                            let ends = d1.column_support(q);
                            emb.crosses(layer.vertices[ends[0]], layer.vertices[ends[1]], axis, 1)
                        }),
                    )
                })
                .collect();
            let strings = layer.code.logical_basis(crate::code::PauliKind::Z);
            if strings.len() != 3 || members.iter().any(|m| !layer.code.z_syndrome(m).is_zero()) {
                return Err(Error::CheckFailed("layer does not have three axis membranes".into()));
            }
            let pairing = BitMatrix::from_rows(3, &members.iter().map(|m| BitVec::from_bools(&strings.iter().map(|s| m.dot(s)).collect::<Vec<_>>())).collect::<Vec<_>>());
            for (a, m) in members.iter().enumerate() {
                let coef = f2la::solve(&pairing, &BitVec::unit(3, a))?;
                let z = coef.iter_ones().fold(BitVec::zeros(layer.code.n()), |acc, i| acc.xor(&strings[i]));
                xs.push(BitVec::zeros(off).concat(m).concat(&BitVec::zeros(n - off - m.len())));
                zs.push(BitVec::zeros(off).concat(&z).concat(&BitVec::zeros(n - off - z.len())));
            }
        }
        let gate_cocycles = (0..3)
            .map(|axis| {
                BitVec::from_support(
                    self.by_edges.len(),
                    self.by_edges.iter().enumerate().filter(|&(_, &e)| {
                        let [a, b] = self.cells.edges()[e];
                        emb.crosses(a, b, axis, 4)
                    }).map(|(j, _)| j),
                )
            })
            .collect();
        Ok(LogicalFrame { xs, zs, gate_cocycles })
    }
}

/// Images of `X̄_0..X̄_5, Z̄_0..Z̄_5` under the gate for the membrane normal to `axis`:
/// an X-membrane along another axis `b` picks up the Z-string of the other
/// layer along the remaining axis.
pub fn expected_membrane_action(axis: usize) -> Vec<LogicalPauli> {
    let mut out = Vec::with_capacity(12);
    for color in 0..2 {
        for b in 0..3 {
            let mut img = LogicalPauli::x(6, 3 * color + b);
            if b != axis {
                let c = 3 - axis - b;
                img = img.times_z(3 * (1 - color) + c);
            }
            out.push(img);
        }
    }
    out.extend((0..6).map(|i| LogicalPauli::z(6, i)));
    out
}
