//! Square and cubic cellulations of tori.

use crate::complex::ChainComplex;
use crate::error::{Error, Result};
use crate::f2la::BitMatrix;

/// Square-lattice torus. Vertices `(x, y)` are indexed `x + Lx·y`; edge `e`
/// in `0..LxLy` is horizontal from vertex `e`, edge `LxLy + e` vertical; face
/// `f` has lower-left corner at vertex `f`.
pub fn torus_2d(lx: usize, ly: usize) -> Result<ChainComplex> {
    if lx < 2 || ly < 2 {
        return Err(Error::InvalidComplex(format!("torus sides must be at least 2, got {lx}x{ly}")));
    }
    let n = lx * ly;
    let v = |x: usize, y: usize| (x % lx) + lx * (y % ly);
    let mut d1 = Vec::with_capacity(4 * n);
    let mut d2 = Vec::with_capacity(4 * n);
    for y in 0..ly {
        for x in 0..lx {
            let p = v(x, y);
            d1.extend([(p, p), (v(x + 1, y), p), (p, n + p), (v(x, y + 1), n + p)]);
            d2.extend([(p, p), (v(x, y + 1), p), (n + p, p), (n + v(x + 1, y), p)]);
        }
    }
    let cx = ChainComplex::new(
        vec![n, 2 * n, n],
        vec![BitMatrix::from_entries(n, 2 * n, d1), BitMatrix::from_entries(2 * n, n, d2)],
    )?;
    let names = |prefix: &str| (0..n).map(|p| format!("{prefix}({},{})", p % lx, p / lx)).collect::<Vec<_>>();
    let mut edges = names("h");
    edges.extend(names("v"));
    cx.with_labels(0, names("v"))?.with_labels(1, edges)?.with_labels(2, names("f"))
}

/// Cubic 3-torus with grades vertices, edges, faces, cubes.
///
/// Vertex `p = x + L·y + L²·z`. Edge `a·L³ + p` points from `p` along axis `a`;
/// face `a·L³ + p` is normal to axis `a` with lowest corner `p`; cube `p` has
/// lowest corner `p`.
pub fn torus_3d(l: usize) -> Result<ChainComplex> {
    if l < 2 {
        return Err(Error::InvalidComplex(format!("3-torus side must be at least 2, got {l}")));
    }
    let n = l * l * l;
    let idx = |c: [usize; 3]| (c[0] % l) + l * (c[1] % l) + l * l * (c[2] % l);
    let coords = |p: usize| [p % l, (p / l) % l, p / (l * l)];
    let step = |p: usize, a: usize| {
        let mut c = coords(p);
        c[a] += 1;
        idx(c)
    };
    let mut d1 = Vec::new();
    let mut d2 = Vec::new();
    let mut d3 = Vec::new();
    for p in 0..n {
        for a in 0..3 {
            d1.extend([(p, a * n + p), (step(p, a), a * n + p)]);
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            let f = a * n + p;
            d2.extend([(b * n + p, f), (b * n + step(p, c), f), (c * n + p, f), (c * n + step(p, b), f)]);
            d3.extend([(a * n + p, p), (a * n + step(p, a), p)]);
        }
    }
    ChainComplex::new(
        vec![n, 3 * n, 3 * n, n],
        vec![
            BitMatrix::from_entries(n, 3 * n, d1),
            BitMatrix::from_entries(3 * n, 3 * n, d2),
            BitMatrix::from_entries(3 * n, n, d3),
        ],
    )
}
