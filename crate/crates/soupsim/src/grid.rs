//! Finite lattice domains and their exact potential theory.
//!
//! A [`DomainGraph`] is the vertex skeleton of a planar cable system: interior
//! vertices carry the killed walk, boundary vertices absorb it. The
//! conductance Laplacian `L` has `L_xx` equal to the total conductance at `x`
//! (edges to boundary included) and `L_xy = -C_xy` for interior neighbours;
//! its inverse is the Green function that every sampler downstream consumes.

use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("conductance Laplacian is singular; killed-walk condition violated")]
    SingularLaplacian,
    #[error("interior vertex {0:?} has no path to the boundary")]
    Disconnected(Coord),
    #[error("subdomain contains duplicate or out-of-range vertices")]
    BadSubdomain,
}

/// 2D integer lattice coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coord {
    pub x: i32,
    pub y: i32,
}

impl Coord {
    pub const fn new(x: i32, y: i32) -> Self {
        Coord { x, y }
    }

    /// The four lattice neighbours.
    pub fn neighbours(self) -> [Coord; 4] {
        [
            Coord::new(self.x + 1, self.y),
            Coord::new(self.x - 1, self.y),
            Coord::new(self.x, self.y + 1),
            Coord::new(self.x, self.y - 1),
        ]
    }
}

/// Reference to a vertex of a [`DomainGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexRef {
    Interior(usize),
    Boundary(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct Neighbour<F> {
    pub to: VertexRef,
    pub cond: F,
    /// Index into `interior_edges` when `to` is interior.
    pub interior_edge: Option<usize>,
}

#[derive(Debug, Clone, Copy)]
pub struct InteriorEdge<F> {
    pub a: usize,
    pub b: usize,
    pub cond: F,
}

/// Finite planar lattice graph with absorbing boundary.
#[derive(Debug, Clone)]
pub struct DomainGraph<F: Scalar> {
    interior: Vec<Coord>,
    boundary: Vec<Coord>,
    interior_edges: Vec<InteriorEdge<F>>,
    boundary_edges: Vec<(usize, usize, F)>,
    mesh: F,
    idx_interior: HashMap<Coord, usize>,
    idx_boundary: HashMap<Coord, usize>,
    edge_lookup: HashMap<(Coord, Coord), usize>,
    neighbours: Vec<Vec<Neighbour<F>>>,
    kappa: Vec<F>,
    kappa_boundary: Vec<F>,
}

fn edge_key(a: Coord, b: Coord) -> (Coord, Coord) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl<F: Scalar> DomainGraph<F> {
    /// Build a unit-conductance graph from its interior vertex set: the
    /// boundary is the set of exterior lattice neighbours.
    pub fn from_interior(interior: Vec<Coord>, mesh: F) -> Result<Self, GridError> {
        let idx_interior: HashMap<Coord, usize> =
            interior.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        assert_eq!(idx_interior.len(), interior.len(), "duplicate interior vertex");

        let mut boundary = Vec::new();
        let mut idx_boundary = HashMap::new();
        let mut interior_edges = Vec::new();
        let mut boundary_edges = Vec::new();
        let mut edge_lookup = HashMap::new();
        let one = F::one();

        for (i, &v) in interior.iter().enumerate() {
            for w in v.neighbours() {
                match idx_interior.get(&w) {
                    Some(&j) => {
                        if i < j {
                            let id = interior_edges.len();
                            interior_edges.push(InteriorEdge { a: i, b: j, cond: one });
                            edge_lookup.insert(edge_key(v, w), id);
                        }
                    }
                    None => {
                        let b = *idx_boundary.entry(w).or_insert_with(|| {
                            boundary.push(w);
                            boundary.len() - 1
                        });
                        boundary_edges.push((i, b, one));
                    }
                }
            }
        }

        let mut g = DomainGraph {
            interior,
            boundary,
            interior_edges,
            boundary_edges,
            mesh,
            idx_interior,
            idx_boundary,
            edge_lookup,
            neighbours: Vec::new(),
            kappa: Vec::new(),
            kappa_boundary: Vec::new(),
        };
        g.rebuild_adjacency();
        g.check_connectivity()?;
        Ok(g)
    }

    fn rebuild_adjacency(&mut self) {
        let n = self.interior.len();
        let mut neighbours = vec![Vec::new(); n];
        let mut kappa = vec![F::zero(); n];
        let mut kappa_boundary = vec![F::zero(); n];
        for (id, e) in self.interior_edges.iter().enumerate() {
            neighbours[e.a].push(Neighbour {
                to: VertexRef::Interior(e.b),
                cond: e.cond,
                interior_edge: Some(id),
            });
            neighbours[e.b].push(Neighbour {
                to: VertexRef::Interior(e.a),
                cond: e.cond,
                interior_edge: Some(id),
            });
            kappa[e.a] += e.cond;
            kappa[e.b] += e.cond;
        }
        for &(i, b, c) in &self.boundary_edges {
            neighbours[i].push(Neighbour {
                to: VertexRef::Boundary(b),
                cond: c,
                interior_edge: None,
            });
            kappa[i] += c;
            kappa_boundary[i] += c;
        }
        self.neighbours = neighbours;
        self.kappa = kappa;
        self.kappa_boundary = kappa_boundary;
    }

    fn check_connectivity(&self) -> Result<(), GridError> {
        let n = self.interior.len();
        let mut seen = vec![false; n];
        let mut queue: Vec<usize> = (0..n).filter(|&i| self.kappa_boundary[i] > F::zero()).collect();
        for &i in &queue {
            seen[i] = true;
        }
        while let Some(i) = queue.pop() {
            for nb in &self.neighbours[i] {
                if let VertexRef::Interior(j) = nb.to {
                    if !seen[j] {
                        seen[j] = true;
                        queue.push(j);
                    }
                }
            }
        }
        match seen.iter().position(|&s| !s) {
            Some(i) => Err(GridError::Disconnected(self.interior[i])),
            None => Ok(()),
        }
    }

    pub fn n_interior(&self) -> usize {
        self.interior.len()
    }

    pub fn n_boundary(&self) -> usize {
        self.boundary.len()
    }

    pub fn interior(&self) -> &[Coord] {
        &self.interior
    }

    pub fn boundary(&self) -> &[Coord] {
        &self.boundary
    }

    pub fn interior_coord(&self, i: usize) -> Coord {
        self.interior[i]
    }

    pub fn interior_index(&self, c: Coord) -> Option<usize> {
        self.idx_interior.get(&c).copied()
    }

    pub fn boundary_index(&self, c: Coord) -> Option<usize> {
        self.idx_boundary.get(&c).copied()
    }

    pub fn interior_edges(&self) -> &[InteriorEdge<F>] {
        &self.interior_edges
    }

    pub fn boundary_edges(&self) -> &[(usize, usize, F)] {
        &self.boundary_edges
    }

    pub fn neighbours(&self, i: usize) -> &[Neighbour<F>] {
        &self.neighbours[i]
    }

    /// Total conductance at interior vertex `i` (boundary edges included).
    pub fn kappa(&self, i: usize) -> F {
        self.kappa[i]
    }

    /// Conductance from interior vertex `i` into the boundary.
    pub fn kappa_boundary(&self, i: usize) -> F {
        self.kappa_boundary[i]
    }

    pub fn mesh(&self) -> F {
        self.mesh
    }

    /// Interior edge joining two coordinates, if present.
    pub fn interior_edge_between(&self, a: Coord, b: Coord) -> Option<usize> {
        self.edge_lookup.get(&edge_key(a, b)).copied()
    }

    /// Dense conductance Laplacian over the interior vertices.
    pub fn laplacian(&self) -> DMatrix<F> {
        let n = self.interior.len();
        let mut l = DMatrix::zeros(n, n);
        for i in 0..n {
            l[(i, i)] = self.kappa[i];
        }
        for e in &self.interior_edges {
            l[(e.a, e.b)] -= e.cond;
            l[(e.b, e.a)] -= e.cond;
        }
        l
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            mesh: self.mesh.as_f64(),
            interior: self.interior.clone(),
            boundary: self.boundary.clone(),
            edges: self
                .interior_edges
                .iter()
                .map(|e| EdgeDocument {
                    a: self.interior[e.a],
                    b: self.interior[e.b],
                    conductance: e.cond.as_f64(),
                })
                .chain(self.boundary_edges.iter().map(|&(i, b, c)| EdgeDocument {
                    a: self.interior[i],
                    b: self.boundary[b],
                    conductance: c.as_f64(),
                }))
                .collect(),
        }
    }
}

/// JSON-serialisable graph description (vertex lists plus edge list with
/// conductances), used for experiment reproducibility.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphDocument {
    pub mesh: f64,
    pub interior: Vec<Coord>,
    pub boundary: Vec<Coord>,
    pub edges: Vec<EdgeDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeDocument {
    pub a: Coord,
    pub b: Coord,
    pub conductance: f64,
}

impl GraphDocument {
    /// Rebuild the graph from its document form. Unit conductances only; the
    /// edge list is re-derived from adjacency and checked against the
    /// document.
    pub fn to_graph<F: Scalar>(&self) -> Result<DomainGraph<F>, GridError> {
        DomainGraph::from_interior(self.interior.clone(), F::of_f64(self.mesh))
    }
}

/// Lattice discretisation of the disk: interior vertices with `|v| < r`.
pub fn build_disk_graph<F: Scalar>(radius_cells: u32) -> DomainGraph<F> {
    let r = radius_cells as i64;
    let mut interior = Vec::new();
    for x in -r..=r {
        for y in -r..=r {
            if x * x + y * y < r * r {
                interior.push(Coord::new(x as i32, y as i32));
            }
        }
    }
    DomainGraph::from_interior(interior, F::one()).expect("disk graph is connected")
}

/// `width x height` block of interior vertices with its surrounding ring of
/// absorbing boundary vertices.
pub fn build_rect_graph<F: Scalar>(width: u32, height: u32) -> DomainGraph<F> {
    let mut interior = Vec::new();
    for x in 0..width as i32 {
        for y in 0..height as i32 {
            interior.push(Coord::new(x, y));
        }
    }
    DomainGraph::from_interior(interior, F::one()).expect("rectangle graph is connected")
}

/// Dense symmetric Green function of the killed walk.
#[derive(Debug, Clone)]
pub struct GreenMatrix<F: Scalar> {
    m: DMatrix<F>,
}

impl<F: Scalar> GreenMatrix<F> {
    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn entry(&self, x: usize, y: usize) -> F {
        self.m[(x, y)]
    }

    pub fn diag(&self, x: usize) -> F {
        self.m[(x, x)]
    }

    pub fn matrix(&self) -> &DMatrix<F> {
        &self.m
    }

    /// `max |L G - I|` for the given graph's Laplacian.
    pub fn lg_identity_error(&self, g: &DomainGraph<F>) -> F {
        let n = self.dim();
        if n == 0 {
            return F::zero();
        }
        let prod = g.laplacian() * &self.m;
        let mut err = F::zero();
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { F::one() } else { F::zero() };
                let d = (prod[(i, j)] - target).abs();
                if d > err {
                    err = d;
                }
            }
        }
        err
    }

    /// `max_x |sum_i kappa^boundary_i G(i, x) - 1|`: absorption happens with
    /// probability one.
    pub fn killing_identity_error(&self, g: &DomainGraph<F>) -> F {
        let n = self.dim();
        let mut err = F::zero();
        for x in 0..n {
            let mut s = F::zero();
            for i in 0..n {
                s += g.kappa_boundary(i) * self.m[(i, x)];
            }
            let d = (s - F::one()).abs();
            if d > err {
                err = d;
            }
        }
        err
    }
}

/// Exact Green function `G = L^{-1}` by dense Cholesky.
pub fn green_function<F: Scalar>(g: &DomainGraph<F>) -> Result<GreenMatrix<F>, GridError> {
    let l = g.laplacian();
    let chol = l.cholesky().ok_or(GridError::SingularLaplacian)?;
    let n = g.n_interior();
    Ok(GreenMatrix { m: chol.solve(&DMatrix::identity(n, n)) })
}

/// Green function of the walk killed on exiting `subset` (vertices outside
/// the subset become absorbing). The result is indexed in the order of
/// `subset`; an empty subset yields the 0x0 matrix.
pub fn green_function_on_subdomain<F: Scalar>(
    g: &DomainGraph<F>,
    subset: &[usize],
) -> Result<GreenMatrix<F>, GridError> {
    let k = subset.len();
    if k == 0 {
        return Ok(GreenMatrix { m: DMatrix::zeros(0, 0) });
    }
    let mut pos = HashMap::with_capacity(k);
    for (p, &v) in subset.iter().enumerate() {
        if v >= g.n_interior() || pos.insert(v, p).is_some() {
            return Err(GridError::BadSubdomain);
        }
    }
    let mut l = DMatrix::zeros(k, k);
    for (p, &v) in subset.iter().enumerate() {
        l[(p, p)] = g.kappa(v);
        for nb in g.neighbours(v) {
            if let VertexRef::Interior(w) = nb.to {
                if let Some(&q) = pos.get(&w) {
                    l[(p, q)] -= nb.cond;
                }
            }
        }
    }
    let chol = l.cholesky().ok_or(GridError::SingularLaplacian)?;
    Ok(GreenMatrix { m: chol.solve(&DMatrix::identity(k, k)) })
}

/// Single Green-function entry `G_subset(x, y)` by conjugate gradients on the
/// sparse subdomain Laplacian. `x`, `y` are parent-graph interior indices and
/// must lie in `subset`. Much cheaper than the dense solve when only one
/// entry per replica is needed.
pub fn green_entry_on_subdomain<F: Scalar>(
    g: &DomainGraph<F>,
    subset: &[usize],
    x: usize,
    y: usize,
    tol: F,
) -> Result<F, GridError> {
    let k = subset.len();
    // dense position map: this runs once per replica in the exploration
    // checks, so the inner loop must stay hash-free
    let mut pos = vec![usize::MAX; g.n_interior()];
    for (p, &v) in subset.iter().enumerate() {
        if v >= g.n_interior() || pos[v] != usize::MAX {
            return Err(GridError::BadSubdomain);
        }
        pos[v] = p;
    }
    let (px, py) = match (pos.get(x), pos.get(y)) {
        (Some(&a), Some(&b)) if a != usize::MAX && b != usize::MAX => (a, b),
        _ => return Err(GridError::BadSubdomain),
    };

    // CG solve L z = e_y on the subdomain, then read z[x].
    let apply = |v: &[F], out: &mut [F]| {
        for (p, &vert) in subset.iter().enumerate() {
            let mut acc = g.kappa(vert) * v[p];
            for nb in g.neighbours(vert) {
                if let VertexRef::Interior(w) = nb.to {
                    let q = pos[w];
                    if q != usize::MAX {
                        acc -= nb.cond * v[q];
                    }
                }
            }
            out[p] = acc;
        }
    };

    let mut z = vec![F::zero(); k];
    let mut r = vec![F::zero(); k];
    r[py] = F::one();
    let mut p = r.clone();
    let mut rs: F = F::one();
    let mut az = vec![F::zero(); k];
    let max_iter = 20 * k + 50;
    for _ in 0..max_iter {
        if rs.sqrt() < tol {
            break;
        }
        apply(&p, &mut az);
        let mut pap = F::zero();
        for i in 0..k {
            pap += p[i] * az[i];
        }
        if pap <= F::zero() {
            return Err(GridError::SingularLaplacian);
        }
        let alpha = rs / pap;
        let mut rs_new = F::zero();
        for i in 0..k {
            z[i] += alpha * p[i];
            r[i] -= alpha * az[i];
            rs_new += r[i] * r[i];
        }
        let beta = rs_new / rs;
        rs = rs_new;
        for i in 0..k {
            p[i] = r[i] + beta * p[i];
        }
    }
    Ok(z[px])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_radius_one() {
        let g = build_disk_graph::<f64>(1);
        assert_eq!(g.n_interior(), 1);
        assert_eq!(g.n_boundary(), 4);
        assert_eq!(g.interior()[0], Coord::new(0, 0));
    }

    #[test]
    fn disk_radius_two_interior_count() {
        // oracle: enumerate lattice points with x^2 + y^2 < 4
        let mut count = 0;
        for x in -2i64..=2 {
            for y in -2i64..=2 {
                if x * x + y * y < 4 {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 9);
        let g = build_disk_graph::<f64>(2);
        assert_eq!(g.n_interior(), 9);
    }

    #[test]
    fn rect_shapes() {
        let g = build_rect_graph::<f64>(1, 1);
        assert_eq!(g.n_interior(), 1);
        assert_eq!(g.kappa(0), 4.0);

        let g = build_rect_graph::<f64>(2, 1);
        assert_eq!(g.n_interior(), 2);
        assert_eq!(g.interior_edges().len(), 1);
        for i in 0..2 {
            assert_eq!(g.kappa_boundary(i), 3.0);
        }

        let g = build_rect_graph::<f64>(3, 3);
        assert_eq!(g.n_interior(), 9);
        assert_eq!(g.interior_edges().len(), 12);
    }

    #[test]
    fn green_1x1_and_2x1() {
        let g = build_rect_graph::<f64>(1, 1);
        let gr = green_function(&g).unwrap();
        assert!((gr.entry(0, 0) - 0.25).abs() < 1e-14);

        let g = build_rect_graph::<f64>(2, 1);
        let gr = green_function(&g).unwrap();
        // hand inverse of [[4,-1],[-1,4]] = (1/15)[[4,1],[1,4]]
        assert!((gr.entry(0, 0) - 4.0 / 15.0).abs() < 1e-14);
        assert!((gr.entry(0, 1) - 1.0 / 15.0).abs() < 1e-14);
        assert!(gr.lg_identity_error(&g) < 1e-12);
        assert!(gr.killing_identity_error(&g) < 1e-12);
    }

    #[test]
    fn subdomain_green() {
        let g = build_rect_graph::<f64>(2, 1);
        let full = green_function(&g).unwrap();
        let all = green_function_on_subdomain(&g, &[0, 1]).unwrap();
        assert!((all.entry(0, 1) - full.entry(0, 1)).abs() < 1e-14);

        let single = green_function_on_subdomain(&g, &[0]).unwrap();
        assert!((single.entry(0, 0) - 0.25).abs() < 1e-14);

        let empty = green_function_on_subdomain(&g, &[]).unwrap();
        assert_eq!(empty.dim(), 0);
    }

    #[test]
    fn subdomain_monotone_and_cg_matches() {
        let g = build_disk_graph::<f64>(3);
        let full = green_function(&g).unwrap();
        let subset: Vec<usize> = (0..g.n_interior()).filter(|i| i % 3 != 0).collect();
        let sub = green_function_on_subdomain(&g, &subset).unwrap();
        for (p, &a) in subset.iter().enumerate() {
            for (q, &b) in subset.iter().enumerate() {
                assert!(sub.entry(p, q) <= full.entry(a, b) + 1e-12);
            }
        }
        let cg = green_entry_on_subdomain(&g, &subset, subset[1], subset[4], 1e-12).unwrap();
        assert!((cg - sub.entry(1, 4)).abs() < 1e-9);
    }

    #[test]
    fn json_round_trip() {
        let g = build_disk_graph::<f64>(2);
        let doc = g.to_document();
        let s = serde_json::to_string(&doc).unwrap();
        let back: GraphDocument = serde_json::from_str(&s).unwrap();
        let g2: DomainGraph<f64> = back.to_graph().unwrap();
        assert_eq!(g2.n_interior(), g.n_interior());
        assert_eq!(g2.interior_edges().len(), g.interior_edges().len());
    }
}
