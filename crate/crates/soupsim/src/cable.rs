//! Cable-system clusters, the soup/GFF sign coupling, and planar outer
//! boundaries traced on the dual lattice.

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gff::{FieldRole, ScalarField};
use crate::grid::{Coord, DomainGraph};
use crate::loopsoup::{LoopSoup, OccupationField};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum CableError {
    #[error("sign coupling requires intensity alpha = 1/2, got {0}")]
    WrongIntensity(f64),
    #[error("expected a field with role {0:?}")]
    WrongRole(FieldRole),
    #[error("component index {0} out of range")]
    NoSuchComponent(usize),
    #[error("boundary trace failed to close")]
    TraceDiverged,
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

#[derive(Debug, Clone)]
pub struct Component {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

/// Open-edge percolation configuration on the interior edges, with its
/// connected components.
#[derive(Debug, Clone)]
pub struct ClusterSet {
    pub open: Vec<bool>,
    pub label: Vec<usize>,
    pub components: Vec<Component>,
}

impl ClusterSet {
    /// Components of `(interior vertices, open edges)`; component order is
    /// by smallest contained vertex index, so labels are deterministic.
    pub fn from_open_edges<F: Scalar>(g: &DomainGraph<F>, open: Vec<bool>) -> Self {
        assert_eq!(open.len(), g.interior_edges().len());
        let n = g.n_interior();
        let mut dsu = Dsu::new(n);
        for (i, e) in g.interior_edges().iter().enumerate() {
            if open[i] {
                dsu.union(e.a, e.b);
            }
        }
        let mut label = vec![usize::MAX; n];
        let mut components: Vec<Component> = Vec::new();
        for v in 0..n {
            let r = dsu.find(v);
            if label[r] == usize::MAX {
                label[r] = components.len();
                components.push(Component { vertices: Vec::new(), edges: Vec::new() });
            }
            label[v] = label[r];
            components[label[v]].vertices.push(v);
        }
        for (i, e) in g.interior_edges().iter().enumerate() {
            if open[i] {
                components[label[e.a]].edges.push(i);
            }
        }
        ClusterSet { open, label, components }
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn largest_component(&self) -> usize {
        self.components.iter().map(|c| c.vertices.len()).max().unwrap_or(0)
    }

    pub fn to_json<F: Scalar>(&self, g: &DomainGraph<F>) -> String {
        let doc = ClusterDocument {
            components: self
                .components
                .iter()
                .map(|c| {
                    c.vertices
                        .iter()
                        .map(|&v| {
                            let p = g.interior_coord(v);
                            [p.x, p.y]
                        })
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("cluster document serialises")
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ClusterDocument {
    components: Vec<Vec<[i32; 2]>>,
}

/// Every loop-traversed edge is open; an untraversed edge `{x,y}` opens
/// independently with probability `1 - exp(-2 C_xy sqrt(l_x l_y))`.
///
/// The exponent matches the conditional crossing structure: given the vertex
/// local times, the traversal count of an edge is 0 with probability
/// `1 / cosh(2 C sqrt(l_x l_y))`, and the total connection probability must
/// come out at `tanh(2 C sqrt(l_x l_y))` — the value the sign-cluster
/// construction yields after integrating out the signs — which pins the
/// untraversed-edge bridge probability above. The covariance test in this
/// module and the soup/GFF consistency experiment both break (by ~20+
/// standard errors at desk scale) with any other exponent.
pub fn clusters_from_soup<F: Scalar, R: Rng>(
    soup: &LoopSoup<F>,
    occ: &OccupationField<F>,
    g: &DomainGraph<F>,
    rng: &mut R,
) -> ClusterSet {
    let mut open = vec![false; g.interior_edges().len()];
    for lp in &soup.loops {
        let l = lp.vertices.len();
        for i in 0..l {
            let a = g.interior_coord(lp.vertices[i]);
            let b = g.interior_coord(lp.vertices[(i + 1) % l]);
            let e = g.interior_edge_between(a, b).expect("loop step is an edge");
            open[e] = true;
        }
    }
    for (i, e) in g.interior_edges().iter().enumerate() {
        if open[i] {
            continue;
        }
        let lx = occ.local_time[e.a].as_f64();
        let ly = occ.local_time[e.b].as_f64();
        let p = 1.0 - (-2.0 * e.cond.as_f64() * (lx * ly).sqrt()).exp();
        if rng.gen::<f64>() < p {
            open[i] = true;
        }
    }
    ClusterSet::from_open_edges(g, open)
}

/// Edge `{x,y}` opens iff the field has one sign on both ends and an
/// independent Bernoulli `1 - exp(-2 C_xy phi_x phi_y)` succeeds.
pub fn clusters_from_gff<F: Scalar, R: Rng>(
    phi: &ScalarField<F>,
    g: &DomainGraph<F>,
    rng: &mut R,
) -> Result<ClusterSet, CableError> {
    if phi.role() != FieldRole::Gff {
        return Err(CableError::WrongRole(FieldRole::Gff));
    }
    let mut open = vec![false; g.interior_edges().len()];
    for (i, e) in g.interior_edges().iter().enumerate() {
        let prod = phi.value(e.a).as_f64() * phi.value(e.b).as_f64();
        if prod > 0.0 {
            let p = 1.0 - (-2.0 * e.cond.as_f64() * prod).exp();
            if rng.gen::<f64>() < p {
                open[i] = true;
            }
        }
    }
    Ok(ClusterSet::from_open_edges(g, open))
}

/// The sign coupling: `phi_x = s_K sqrt(2 l_x)` with one fair coin per
/// cluster. Only valid at alpha = 1/2.
pub fn gff_from_soup<F: Scalar, R: Rng>(
    occ: &OccupationField<F>,
    clusters: &ClusterSet,
    rng: &mut R,
) -> Result<ScalarField<F>, CableError> {
    if (occ.alpha - 0.5).abs() > 1e-12 {
        return Err(CableError::WrongIntensity(occ.alpha));
    }
    let signs: Vec<F> = (0..clusters.n_components())
        .map(|_| if rng.gen::<bool>() { F::one() } else { -F::one() })
        .collect();
    let two = F::of_f64(2.0);
    let values = occ
        .local_time
        .iter()
        .enumerate()
        .map(|(x, &t)| signs[clusters.label[x]] * (two * t).sqrt())
        .collect();
    Ok(ScalarField::new(values, FieldRole::Gff))
}

/// Outer boundary of one component: a closed curve on the dual lattice,
/// oriented counterclockwise with the cluster on its left. Face `(x,y)`
/// is the unit square `[x,x+1] x [y,y+1]`.
#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    /// Dual cycle as the sequence of visited faces.
    pub faces: Vec<Coord>,
    /// Cluster vertices adjacent to the trace.
    pub boundary_vertices: Vec<usize>,
    /// Interior vertices strictly inside the trace.
    pub inside: Vec<usize>,
    /// Inside vertices that are not cluster vertices: the discrete O(gamma).
    pub o_vertices: Vec<usize>,
    /// Vertical dual segments `(k, y)` joining faces `(k,y)` and `(k,y+1)`,
    /// for ray-crossing queries.
    vertical: HashSet<(i32, i32)>,
}

const DIRS: [(i32, i32); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)]; // E N W S

/// Left and right primal endpoints of the edge crossed when leaving face
/// `f` in direction `d`.
fn crossed_endpoints(f: Coord, d: usize) -> (Coord, Coord) {
    match d {
        0 => (Coord::new(f.x + 1, f.y + 1), Coord::new(f.x + 1, f.y)), // E
        1 => (Coord::new(f.x, f.y + 1), Coord::new(f.x + 1, f.y + 1)), // N
        2 => (Coord::new(f.x, f.y), Coord::new(f.x, f.y + 1)),         // W
        _ => (Coord::new(f.x + 1, f.y), Coord::new(f.x, f.y)),         // S
    }
}

impl BoundaryTrace {
    /// Even-odd test: is the primal vertex at `p` strictly inside the trace?
    pub fn surrounds(&self, p: Coord) -> bool {
        // horizontal ray towards +x at height p.y crosses the vertical dual
        // segment joining faces (k, p.y - 1) and (k, p.y) whenever k >= p.x
        let mut crossings = 0;
        for &(k, y) in &self.vertical {
            if y == p.y - 1 && k >= p.x {
                crossings += 1;
            }
        }
        crossings % 2 == 1
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn to_json(&self) -> String {
        let doc = TraceDocument {
            faces: self.faces.iter().map(|f| [f.x, f.y]).collect(),
        };
        serde_json::to_string(&doc).expect("trace document serialises")
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct TraceDocument {
    faces: Vec<[i32; 2]>,
}

fn toggle(set: &mut HashSet<(i32, i32)>, key: (i32, i32)) {
    if !set.insert(key) {
        set.remove(&key);
    }
}

/// Trace the boundary of the unbounded face of `comp`'s planar embedding.
pub fn outer_boundary<F: Scalar>(
    clusters: &ClusterSet,
    comp: usize,
    g: &DomainGraph<F>,
) -> Result<BoundaryTrace, CableError> {
    let c = clusters.components.get(comp).ok_or(CableError::NoSuchComponent(comp))?;
    let in_comp = |p: Coord| -> bool {
        g.interior_index(p).map_or(false, |i| clusters.label[i] == comp)
    };
    // a directed dual step is a wall segment iff the crossed primal edge has
    // its left endpoint in the cluster and is not an open in-cluster edge
    let valid = |f: Coord, d: usize| -> bool {
        let (l, r) = crossed_endpoints(f, d);
        if !in_comp(l) {
            return false;
        }
        if in_comp(r) {
            match g.interior_edge_between(l, r) {
                Some(e) => !clusters.open[e],
                None => true,
            }
        } else {
            true
        }
    };

    // start below the bottom-most (then left-most) cluster vertex, moving E
    let v0 = c
        .vertices
        .iter()
        .map(|&v| g.interior_coord(v))
        .min_by_key(|p| (p.y, p.x))
        .expect("component nonempty");
    let f0 = Coord::new(v0.x - 1, v0.y - 1);
    let d0 = 0usize;
    debug_assert!(valid(f0, d0));

    let mut faces = Vec::new();
    let mut vertical = HashSet::new();
    let mut boundary: HashSet<usize> = HashSet::new();
    let mut f = f0;
    let mut d = d0;
    let cap = 16 * (c.vertices.len() + 4) * (c.vertices.len() + 4);
    for step in 0.. {
        if step > cap {
            return Err(CableError::TraceDiverged);
        }
        faces.push(f);
        let (l, _) = crossed_endpoints(f, d);
        boundary.insert(g.interior_index(l).expect("cluster vertex is interior"));
        // toggle, not insert: along a slit the trace runs the same segment
        // once per direction, and a doubly-traversed segment contributes an
        // even crossing count to the ray parity
        if d == 1 {
            toggle(&mut vertical, (f.x, f.y));
        } else if d == 3 {
            toggle(&mut vertical, (f.x, f.y - 1));
        }
        let nf = Coord::new(f.x + DIRS[d].0, f.y + DIRS[d].1);
        // maximally left turn: left, straight, right, back
        let nd = [(d + 1) % 4, d, (d + 3) % 4, (d + 2) % 4]
            .into_iter()
            .find(|&nd| valid(nf, nd))
            .expect("closed wall has a successor");
        if nf == f0 && nd == d0 {
            break;
        }
        f = nf;
        d = nd;
    }

    let probe = BoundaryTrace {
        faces,
        boundary_vertices: Vec::new(),
        inside: Vec::new(),
        o_vertices: Vec::new(),
        vertical,
    };
    let mut inside = Vec::new();
    let mut o_vertices = Vec::new();
    for v in 0..g.n_interior() {
        if probe.surrounds(g.interior_coord(v)) {
            inside.push(v);
            if clusters.label[v] != comp {
                o_vertices.push(v);
            }
        }
    }
    let mut boundary_vertices: Vec<usize> = boundary.into_iter().collect();
    boundary_vertices.sort_unstable();
    Ok(BoundaryTrace { boundary_vertices, inside, o_vertices, ..probe })
}

/// Among components whose outer boundary strictly surrounds `v0` (with `v0`
/// not in the component), the one not surrounded by any other; `None` when
/// nothing surrounds `v0`.
pub fn outermost_cluster_around<F: Scalar>(
    clusters: &ClusterSet,
    g: &DomainGraph<F>,
    v0: usize,
) -> Result<Option<(usize, BoundaryTrace)>, CableError> {
    let p0 = g.interior_coord(v0);
    let mut candidates: Vec<(usize, BoundaryTrace)> = Vec::new();
    for comp in 0..clusters.n_components() {
        if clusters.label[v0] == comp {
            continue;
        }
        let cv = &clusters.components[comp].vertices;
        // bbox prefilter: a surrounding cluster must have vertices strictly
        // on all four sides
        let coords: Vec<Coord> = cv.iter().map(|&v| g.interior_coord(v)).collect();
        let strict = coords.iter().any(|c| c.x < p0.x)
            && coords.iter().any(|c| c.x > p0.x)
            && coords.iter().any(|c| c.y < p0.y)
            && coords.iter().any(|c| c.y > p0.y);
        if !strict {
            continue;
        }
        let trace = outer_boundary(clusters, comp, g)?;
        if trace.surrounds(p0) {
            candidates.push((comp, trace));
        }
    }
    if candidates.is_empty() {
        return Ok(None);
    }
    let reps: Vec<Coord> = candidates
        .iter()
        .map(|(comp, _)| g.interior_coord(clusters.components[*comp].vertices[0]))
        .collect();
    let outer = (0..candidates.len())
        .find(|&i| {
            (0..candidates.len()).all(|j| j == i || !candidates[j].1.surrounds(reps[i]))
        })
        .expect("nesting order has a maximum");
    Ok(Some(candidates.swap_remove(outer)))
}

/// Discrete exploration set: interior vertices not in `a`, not in any
/// component touching `a`, and not inside the outer boundary of such a
/// component.
pub fn explore_clusters_touching<F: Scalar>(
    clusters: &ClusterSet,
    g: &DomainGraph<F>,
    a: &HashSet<usize>,
) -> Result<Vec<usize>, CableError> {
    let mut removed = vec![false; g.n_interior()];
    for &v in a {
        removed[v] = true;
    }
    for comp in 0..clusters.n_components() {
        if !clusters.components[comp].vertices.iter().any(|v| a.contains(v)) {
            continue;
        }
        for &v in &clusters.components[comp].vertices {
            removed[v] = true;
        }
        let trace = outer_boundary(clusters, comp, g)?;
        for v in trace.inside {
            removed[v] = true;
        }
    }
    Ok((0..g.n_interior()).filter(|&v| !removed[v]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gff::{GffSampler, ScalarField};
    use crate::grid::{build_rect_graph, green_function};
    use crate::loopsoup::{occupation_field, LoopKernel, RootedLoop};
    use crate::stats::{mean_and_se, Streams};

    fn open_edges_between(g: &DomainGraph<f64>, pairs: &[(Coord, Coord)]) -> Vec<bool> {
        let mut open = vec![false; g.interior_edges().len()];
        for &(a, b) in pairs {
            open[g.interior_edge_between(a, b).expect("edge exists")] = true;
        }
        open
    }

    #[test]
    fn zero_occupation_gives_singletons() {
        let g = build_rect_graph::<f64>(3, 3);
        let soup = LoopSoup::<f64> { loops: vec![], alpha: 0.5, l_max: 2, n_interior: 9 };
        let occ = OccupationField::<f64> {
            counts: vec![0; 9],
            local_time: vec![0.0; 9],
            alpha: 0.5,
        };
        let streams = Streams::new(3);
        let mut rng = streams.stream(0, 0);
        let cs = clusters_from_soup(&soup, &occ, &g, &mut rng);
        assert_eq!(cs.n_components(), 9);
        assert!(cs.open.iter().all(|&o| !o));
    }

    #[test]
    fn untraversed_edge_opens_with_half_probability() {
        // 2 sqrt(l_x l_y) = ln 2 with l_x = l_y = ln(2)/2
        let g = build_rect_graph::<f64>(2, 1);
        let l = std::f64::consts::LN_2 / 2.0;
        let soup = LoopSoup::<f64> { loops: vec![], alpha: 0.5, l_max: 2, n_interior: 2 };
        let occ = OccupationField::<f64> {
            counts: vec![0; 2],
            local_time: vec![l, l],
            alpha: 0.5,
        };
        let streams = Streams::new(5);
        let mut rng = streams.stream(0, 0);
        let n = 100_000;
        let opens: Vec<f64> = (0..n)
            .map(|_| clusters_from_soup(&soup, &occ, &g, &mut rng).open[0] as u8 as f64)
            .collect();
        let (mean, se) = mean_and_se(&opens);
        assert!((mean - 0.5).abs() < 5.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn traversed_edge_always_open() {
        let g = build_rect_graph::<f64>(2, 1);
        let soup = LoopSoup::<f64> {
            loops: vec![RootedLoop { vertices: vec![0, 1], holding: None }],
            alpha: 0.5,
            l_max: 2,
            n_interior: 2,
        };
        let occ = OccupationField::<f64> {
            counts: vec![1; 2],
            local_time: vec![0.0; 2], // even with zero local time
            alpha: 0.5,
        };
        let streams = Streams::new(7);
        let mut rng = streams.stream(0, 0);
        for _ in 0..100 {
            let cs = clusters_from_soup(&soup, &occ, &g, &mut rng);
            assert!(cs.open[0]);
            assert_eq!(cs.n_components(), 1);
        }
    }

    #[test]
    fn gff_cluster_edge_rules() {
        let g = build_rect_graph::<f64>(2, 1);
        let streams = Streams::new(9);
        let mut rng = streams.stream(0, 0);
        // opposite signs: always closed
        let phi = ScalarField::new(vec![1.0, -1.0], FieldRole::Gff);
        for _ in 0..100 {
            assert!(!clusters_from_gff(&phi, &g, &mut rng).unwrap().open[0]);
        }
        // zero field: closed
        let zero = ScalarField::new(vec![0.0, 0.0], FieldRole::Gff);
        assert!(!clusters_from_gff(&zero, &g, &mut rng).unwrap().open[0]);
        // phi_x phi_y = ln(2)/2: open with probability 1/2
        let v = (std::f64::consts::LN_2 / 2.0).sqrt();
        let half = ScalarField::new(vec![v, v], FieldRole::Gff);
        let n = 100_000;
        let opens: Vec<f64> = (0..n)
            .map(|_| clusters_from_gff(&half, &g, &mut rng).unwrap().open[0] as u8 as f64)
            .collect();
        let (mean, se) = mean_and_se(&opens);
        assert!((mean - 0.5).abs() < 5.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn sign_coupling_basics() {
        let g = build_rect_graph::<f64>(2, 1);
        let streams = Streams::new(11);
        let mut rng = streams.stream(0, 0);
        let occ = OccupationField::<f64> {
            counts: vec![0; 2],
            local_time: vec![0.3, 0.7],
            alpha: 0.5,
        };
        let one = ClusterSet::from_open_edges(&g, vec![true]);
        let phi = gff_from_soup(&occ, &one, &mut rng).unwrap();
        // one component: both signs equal, and phi^2/2 = l exactly
        assert_eq!(phi.value(0).signum(), phi.value(1).signum());
        assert!((phi.value(0) * phi.value(0) / 2.0 - 0.3).abs() < 1e-15);
        assert!((phi.value(1) * phi.value(1) / 2.0 - 0.7).abs() < 1e-15);

        let bad = OccupationField::<f64> { alpha: 1.0, ..occ };
        assert!(gff_from_soup(&bad, &one, &mut rng).is_err());
    }

    #[test]
    fn coupled_field_has_green_covariance() {
        // discrete commuting-couplings check at desk scale: soup -> occ ->
        // clusters -> signed sqrt has the same covariance as the direct GFF
        let g = build_rect_graph::<f64>(2, 1);
        let green = green_function(&g).unwrap();
        let kern = LoopKernel::auto(&g, 1e-6).unwrap();
        let streams = Streams::new(13);
        let mut rng = streams.stream(0, 0);
        let n = 50_000;
        let mut prod = Vec::with_capacity(n);
        let mut sq = Vec::with_capacity(n);
        for _ in 0..n {
            let soup = kern.sample_soup(0.5, &mut rng);
            let occ = occupation_field(&soup, &g, &mut rng);
            let cs = clusters_from_soup(&soup, &occ, &g, &mut rng);
            let phi = gff_from_soup(&occ, &cs, &mut rng).unwrap();
            prod.push(phi.value(0) * phi.value(1));
            sq.push(phi.value(0) * phi.value(0));
        }
        let (mp, sep) = mean_and_se(&prod);
        assert!((mp - green.entry(0, 1)).abs() < 5.0 * sep, "cov {mp} se {sep}");
        let (ms, ses) = mean_and_se(&sq);
        assert!((ms - green.diag(0)).abs() < 5.0 * ses, "var {ms} se {ses}");
    }

    #[test]
    fn singleton_trace_is_dual_square() {
        let g = build_rect_graph::<f64>(3, 3);
        let cs = ClusterSet::from_open_edges(&g, vec![false; g.interior_edges().len()]);
        let v = g.interior_index(Coord::new(1, 1)).unwrap();
        let trace = outer_boundary(&cs, cs.label[v], &g).unwrap();
        assert_eq!(trace.len(), 4);
        assert_eq!(trace.boundary_vertices, vec![v]);
        assert_eq!(trace.inside, vec![v]);
        assert!(trace.o_vertices.is_empty());
        assert!(trace.surrounds(Coord::new(1, 1)));
        assert!(!trace.surrounds(Coord::new(2, 1)));
    }

    #[test]
    fn block_trace_is_dual_octagon() {
        // 2x2 block: 8 dual edges, all 4 vertices on the boundary, O empty
        let g = build_rect_graph::<f64>(4, 4);
        let b = |x, y| Coord::new(x, y);
        let open = open_edges_between(
            &g,
            &[(b(1, 1), b(2, 1)), (b(2, 1), b(2, 2)), (b(2, 2), b(1, 2)), (b(1, 2), b(1, 1))],
        );
        let cs = ClusterSet::from_open_edges(&g, open);
        let comp = cs.label[g.interior_index(b(1, 1)).unwrap()];
        let trace = outer_boundary(&cs, comp, &g).unwrap();
        assert_eq!(trace.len(), 8);
        assert_eq!(trace.boundary_vertices.len(), 4);
        assert_eq!(trace.inside.len(), 4);
        assert!(trace.o_vertices.is_empty());
    }

    fn ring_pairs(cx: i32, cy: i32) -> Vec<(Coord, Coord)> {
        // 8-vertex ring around (cx, cy)
        let p = [
            (cx - 1, cy - 1),
            (cx, cy - 1),
            (cx + 1, cy - 1),
            (cx + 1, cy),
            (cx + 1, cy + 1),
            (cx, cy + 1),
            (cx - 1, cy + 1),
            (cx - 1, cy),
        ];
        (0..8)
            .map(|i| {
                let (ax, ay) = p[i];
                let (bx, by) = p[(i + 1) % 8];
                (Coord::new(ax, ay), Coord::new(bx, by))
            })
            .collect()
    }

    #[test]
    fn ring_trace_captures_hole() {
        let g = build_rect_graph::<f64>(5, 5);
        let cs = ClusterSet::from_open_edges(&g, open_edges_between(&g, &ring_pairs(2, 2)));
        let center = g.interior_index(Coord::new(2, 2)).unwrap();
        let comp = cs.label[g.interior_index(Coord::new(1, 1)).unwrap()];
        let trace = outer_boundary(&cs, comp, &g).unwrap();
        assert_eq!(trace.boundary_vertices.len(), 8);
        assert_eq!(trace.inside.len(), 9);
        assert_eq!(trace.o_vertices, vec![center]);
        assert!(trace.surrounds(Coord::new(2, 2)));
        assert!(!trace.surrounds(Coord::new(0, 4)));
    }

    #[test]
    fn slit_ring_opens_the_pocket() {
        // ring around (2,2) with the top edge (1,3)-(2,3) closed: the ring
        // stays connected the long way round, but the trace now dips through
        // the slit and runs the same vertical dual segment in both
        // directions. The pocket joins the unbounded face, so nothing is
        // inside any more, and the doubly-walked segment must not corrupt
        // the ray parity of the comp's own vertices.
        let g = build_rect_graph::<f64>(5, 5);
        let mut pairs = ring_pairs(2, 2);
        pairs.retain(|&(a, b)| {
            !(a == Coord::new(2, 3) && b == Coord::new(1, 3))
                && !(a == Coord::new(1, 3) && b == Coord::new(2, 3))
        });
        assert_eq!(pairs.len(), 7);
        let cs = ClusterSet::from_open_edges(&g, open_edges_between(&g, &pairs));
        let comp = cs.label[g.interior_index(Coord::new(1, 1)).unwrap()];
        assert_eq!(cs.components[comp].vertices.len(), 8);
        let trace = outer_boundary(&cs, comp, &g).unwrap();
        assert!(!trace.surrounds(Coord::new(2, 2)));
        // every inside vertex is a ring vertex, and all eight are inside
        let ring: Vec<usize> = cs.components[comp].vertices.clone();
        assert_eq!(trace.inside, ring);
        assert!(trace.o_vertices.is_empty());
    }

    #[test]
    fn outermost_cluster_selection() {
        // nothing around: none
        let g = build_rect_graph::<f64>(7, 7);
        let v0 = g.interior_index(Coord::new(3, 3)).unwrap();
        let empty = ClusterSet::from_open_edges(&g, vec![false; g.interior_edges().len()]);
        assert!(outermost_cluster_around(&empty, &g, v0).unwrap().is_none());

        // one ring
        let one = ClusterSet::from_open_edges(&g, open_edges_between(&g, &ring_pairs(3, 3)));
        let hit = outermost_cluster_around(&one, &g, v0).unwrap().unwrap();
        assert_eq!(one.components[hit.0].vertices.len(), 8);

        // nested rings: inner 8-ring at radius 1, outer 24-ring frame at
        // radius 3 -> pick the frame
        let mut pairs = ring_pairs(3, 3);
        let frame: Vec<Coord> = {
            let mut f = Vec::new();
            for x in 0..7 {
                f.push(Coord::new(x, 0));
            }
            for y in 1..7 {
                f.push(Coord::new(6, y));
            }
            for x in (0..6).rev() {
                f.push(Coord::new(x, 6));
            }
            for y in (1..6).rev() {
                f.push(Coord::new(0, y));
            }
            f
        };
        for i in 0..frame.len() {
            pairs.push((frame[i], frame[(i + 1) % frame.len()]));
        }
        let nested = ClusterSet::from_open_edges(&g, open_edges_between(&g, &pairs));
        let hit = outermost_cluster_around(&nested, &g, v0).unwrap().unwrap();
        assert_eq!(nested.components[hit.0].vertices.len(), 24);
    }

    #[test]
    fn exploration_set_rules() {
        let g = build_rect_graph::<f64>(5, 5);
        let cs = ClusterSet::from_open_edges(&g, open_edges_between(&g, &ring_pairs(2, 2)));
        // A empty: everything stays
        let all = explore_clusters_touching(&cs, &g, &HashSet::new()).unwrap();
        assert_eq!(all.len(), g.n_interior());
        // A = everything: nothing stays
        let a_all: HashSet<usize> = (0..g.n_interior()).collect();
        assert!(explore_clusters_touching(&cs, &g, &a_all).unwrap().is_empty());
        // A touches the ring: ring + hole + A removed
        let a: HashSet<usize> = [g.interior_index(Coord::new(1, 1)).unwrap()].into();
        let tilde = explore_clusters_touching(&cs, &g, &a).unwrap();
        assert_eq!(tilde.len(), g.n_interior() - 9);
        assert!(!tilde.contains(&g.interior_index(Coord::new(2, 2)).unwrap()));
        assert!(tilde.contains(&g.interior_index(Coord::new(0, 4)).unwrap()));
        assert!(tilde.contains(&g.interior_index(Coord::new(4, 0)).unwrap()));
    }

    #[test]
    fn sign_clusters_refine_input_clusters() {
        // same-sign adjacency implied by construction: any open edge of the
        // input has both endpoints in one component, hence equal signs
        let g = build_rect_graph::<f64>(3, 3);
        let kern = LoopKernel::auto(&g, 1e-6).unwrap();
        let streams = Streams::new(17);
        let mut rng = streams.stream(0, 0);
        for _ in 0..200 {
            let soup = kern.sample_soup(0.5, &mut rng);
            let occ = occupation_field(&soup, &g, &mut rng);
            let cs = clusters_from_soup(&soup, &occ, &g, &mut rng);
            let phi = gff_from_soup(&occ, &cs, &mut rng).unwrap();
            for (i, e) in g.interior_edges().iter().enumerate() {
                if cs.open[i] {
                    assert!(phi.value(e.a) * phi.value(e.b) > 0.0);
                }
            }
        }
    }

    #[test]
    fn component_diameter_counts_decrease() {
        // local finiteness proxy: mean number of components with bounding-box
        // diameter >= k decreases in k
        let g = build_rect_graph::<f64>(5, 5);
        let kern = LoopKernel::auto(&g, 1e-6).unwrap();
        let streams = Streams::new(19);
        let mut rng = streams.stream(0, 0);
        let reps = 300;
        let mut totals = [0u64; 5];
        for _ in 0..reps {
            let soup = kern.sample_soup(0.5, &mut rng);
            let occ = occupation_field(&soup, &g, &mut rng);
            let cs = clusters_from_soup(&soup, &occ, &g, &mut rng);
            for comp in &cs.components {
                let xs: Vec<i32> =
                    comp.vertices.iter().map(|&v| g.interior_coord(v).x).collect();
                let ys: Vec<i32> =
                    comp.vertices.iter().map(|&v| g.interior_coord(v).y).collect();
                let diam = (xs.iter().max().unwrap() - xs.iter().min().unwrap())
                    .max(ys.iter().max().unwrap() - ys.iter().min().unwrap())
                    as usize;
                for k in 0..5 {
                    if diam >= k {
                        totals[k] += 1;
                    }
                }
            }
        }
        for k in 1..5 {
            assert!(totals[k] <= totals[k - 1]);
        }
        assert!(totals[4] < totals[0]);
    }
}
