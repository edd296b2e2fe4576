//! Boundary-to-boundary excursion processes and the cluster decomposition
//! into interior loops plus boundary excursions.

use std::collections::{HashMap, HashSet};

use rand::Rng;
use thiserror::Error;

use crate::cable::{outermost_cluster_around, BoundaryTrace, CableError, ClusterSet};
use crate::grid::{DomainGraph, VertexRef};
use crate::loopsoup::{LoopSoup, RootedLoop};
use crate::scalar::{poisson_u64, Scalar};

#[derive(Debug, Error)]
pub enum ExcError {
    #[error("vertex {0} has a neighbour outside interior + absorbing sets")]
    NotClosed(usize),
    #[error("empty interior")]
    EmptyInterior,
    #[error("intensity must be non-negative, got {0}")]
    NegativeIntensity(f64),
    #[error(transparent)]
    Cable(#[from] CableError),
    #[error("loop leaves the decomposition region")]
    LoopEscapes,
}

/// One excursion: enters from an absorbing vertex, walks through interior
/// vertices (graph interior indices), exits at an absorbing vertex.
#[derive(Debug, Clone)]
pub struct Excursion<F: Scalar> {
    pub start: usize,
    pub interior: Vec<usize>,
    pub end: usize,
    /// Holding time per interior visit, once the continuous decoration is
    /// attached.
    pub holding: Option<Vec<F>>,
}

#[derive(Debug, Clone)]
pub struct ExcursionProcess<F: Scalar> {
    pub excursions: Vec<Excursion<F>>,
    pub beta: f64,
}

enum Step {
    Interior(usize),
    Absorbing(usize),
}

/// Killed-walk domain: an interior vertex set plus an absorbing set that
/// together cover every lattice neighbour. The full graph (absorbing = its
/// boundary) and a trace subdomain (absorbing = the trace's cluster layer)
/// both reduce to this.
pub struct ExcDomain<F: Scalar> {
    /// Graph interior indices of this domain's interior vertices.
    pub interior: Vec<usize>,
    local_of: HashMap<usize, usize>,
    adj: Vec<Vec<(Step, F)>>,
    kappa: Vec<F>,
    /// Directed entry edges `(absorbing label, local target, conductance)`.
    entries: Vec<(usize, usize, F)>,
}

impl<F: Scalar> ExcDomain<F> {
    /// The whole graph: interior vertices with the graph boundary absorbing
    /// (labels are boundary indices).
    pub fn full(g: &DomainGraph<F>) -> Self {
        let interior: Vec<usize> = (0..g.n_interior()).collect();
        let local_of = interior.iter().map(|&v| (v, v)).collect();
        let mut adj = Vec::with_capacity(interior.len());
        let mut entries = Vec::new();
        for v in 0..g.n_interior() {
            let mut row = Vec::new();
            for nb in g.neighbours(v) {
                match nb.to {
                    VertexRef::Interior(w) => row.push((Step::Interior(w), nb.cond)),
                    VertexRef::Boundary(b) => {
                        row.push((Step::Absorbing(b), nb.cond));
                        entries.push((b, v, nb.cond));
                    }
                }
            }
            adj.push(row);
        }
        let kappa = (0..g.n_interior()).map(|v| g.kappa(v)).collect();
        ExcDomain { interior, local_of, adj, kappa, entries }
    }

    /// Subdomain of the graph interior: `interior` walks, `absorbing`
    /// (graph interior indices) kills. Every neighbour of an interior vertex
    /// must land in one of the two sets.
    pub fn subdomain(
        g: &DomainGraph<F>,
        interior: &[usize],
        absorbing: &HashSet<usize>,
    ) -> Result<Self, ExcError> {
        if interior.is_empty() {
            return Err(ExcError::EmptyInterior);
        }
        let local_of: HashMap<usize, usize> =
            interior.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut adj = Vec::with_capacity(interior.len());
        let mut entries = Vec::new();
        for (_, &v) in interior.iter().enumerate() {
            let mut row = Vec::new();
            for nb in g.neighbours(v) {
                match nb.to {
                    VertexRef::Interior(w) => {
                        if let Some(&lw) = local_of.get(&w) {
                            row.push((Step::Interior(lw), nb.cond));
                        } else if absorbing.contains(&w) {
                            row.push((Step::Absorbing(w), nb.cond));
                            entries.push((w, local_of[&v], nb.cond));
                        } else {
                            return Err(ExcError::NotClosed(v));
                        }
                    }
                    VertexRef::Boundary(_) => return Err(ExcError::NotClosed(v)),
                }
            }
            adj.push(row);
        }
        let kappa = interior.iter().map(|&v| g.kappa(v)).collect();
        Ok(ExcDomain { interior: interior.to_vec(), local_of, adj, kappa, entries })
    }

    pub fn n_interior(&self) -> usize {
        self.interior.len()
    }

    pub fn local_index(&self, graph_interior: usize) -> Option<usize> {
        self.local_of.get(&graph_interior).copied()
    }

    /// Total entry rate multiplier: sum of boundary-to-interior conductances.
    pub fn total_entry_rate(&self) -> F {
        self.entries
            .iter()
            .fold(F::zero(), |acc, &(_, _, c)| acc + c)
    }

    fn run_excursion<R: Rng>(&self, start: usize, first_local: usize, rng: &mut R) -> Excursion<F> {
        let mut interior = Vec::new();
        let mut holding = Vec::new();
        let mut v = first_local;
        loop {
            interior.push(self.interior[v]);
            holding.push(F::exp1(rng) / self.kappa[v]);
            let mut target = F::unit_uniform(rng) * self.kappa[v];
            let row = &self.adj[v];
            let mut pick = row.len() - 1;
            for (i, &(_, c)) in row.iter().enumerate() {
                if target < c {
                    pick = i;
                    break;
                }
                target -= c;
            }
            match row[pick].0 {
                Step::Interior(w) => v = w,
                Step::Absorbing(b) => {
                    return Excursion { start, interior, end: b, holding: Some(holding) }
                }
            }
        }
    }
}

/// Poisson process of excursions: `Poisson(beta * C_bi)` starts per directed
/// boundary-to-interior edge, then the killed walk with `Exp(1)/kappa`
/// holding times.
pub fn sample_excursions<F: Scalar, R: Rng>(
    domain: &ExcDomain<F>,
    beta: f64,
    rng: &mut R,
) -> Result<ExcursionProcess<F>, ExcError> {
    if beta < 0.0 {
        return Err(ExcError::NegativeIntensity(beta));
    }
    let mut excursions = Vec::new();
    for &(b, i, c) in &domain.entries {
        let k = poisson_u64(beta * c.as_f64(), rng);
        for _ in 0..k {
            excursions.push(domain.run_excursion(b, i, rng));
        }
    }
    Ok(ExcursionProcess { excursions, beta })
}

/// Attach `Exp(1)/kappa` holding times to excursions that lack them
/// (extracted excursions carry only the discrete skeleton).
pub fn fill_holding<F: Scalar, R: Rng>(
    excursions: &mut [Excursion<F>],
    g: &DomainGraph<F>,
    rng: &mut R,
) {
    for e in excursions {
        if e.holding.is_none() {
            e.holding =
                Some(e.interior.iter().map(|&v| F::exp1(rng) / g.kappa(v)).collect());
        }
    }
}

/// Occupation field of an excursion process over the domain interior, plus
/// the recentered version (mean of the local time is exactly beta).
#[derive(Debug, Clone)]
pub struct ExcursionOccupation<F: Scalar> {
    pub counts: Vec<u64>,
    pub local_time: Vec<F>,
    pub recentered: Vec<F>,
}

pub fn excursion_occupation<F: Scalar>(
    proc: &ExcursionProcess<F>,
    domain: &ExcDomain<F>,
) -> ExcursionOccupation<F> {
    let n = domain.n_interior();
    let mut counts = vec![0u64; n];
    let mut local_time = vec![F::zero(); n];
    for e in &proc.excursions {
        let holding = e.holding.as_ref().expect("sampled excursions carry holding times");
        for (&v, &h) in e.interior.iter().zip(holding) {
            let l = domain.local_index(v).expect("excursion stays in domain");
            counts[l] += 1;
            local_time[l] += h;
        }
    }
    let beta = F::of_f64(proc.beta);
    let recentered = local_time.iter().map(|&t| t - beta).collect();
    ExcursionOccupation { counts, local_time, recentered }
}

/// Result of decomposing a soup around the outermost cluster surrounding a
/// marked vertex.
pub struct Decomposition<F: Scalar> {
    pub component: usize,
    pub trace: BoundaryTrace,
    /// Cluster vertices adjacent to the trace (the absorbing layer B).
    pub b_vertices: Vec<usize>,
    /// Everything strictly inside the trace except B (the walking region O).
    pub o_vertices: Vec<usize>,
    /// Soup loops with every vertex in O.
    pub interior_loops: Vec<RootedLoop<F>>,
    /// Maximal O-runs of loops that touch B, with their B endpoints.
    pub excursions: Vec<Excursion<F>>,
}

/// Split the soup at the outermost cluster around `v0`: loops strictly
/// inside its outer boundary either avoid the absorbing layer B (interior
/// loops) or decompose into excursions from B through O back to B.
///
/// O is taken as all inside vertices except B — including cluster vertices
/// that are not on the trace — so that every inside loop is covered by the
/// two classes and O's lattice closure is exactly O + B.
pub fn boundary_excursion_decomposition<F: Scalar>(
    soup: &LoopSoup<F>,
    clusters: &ClusterSet,
    g: &DomainGraph<F>,
    v0: usize,
) -> Result<Option<Decomposition<F>>, ExcError> {
    let Some((component, trace)) = outermost_cluster_around(clusters, g, v0)? else {
        return Ok(None);
    };
    let b_set: HashSet<usize> = trace.boundary_vertices.iter().copied().collect();
    let o_vertices: Vec<usize> =
        trace.inside.iter().copied().filter(|v| !b_set.contains(v)).collect();
    let o_set: HashSet<usize> = o_vertices.iter().copied().collect();
    let inside_set: HashSet<usize> = trace.inside.iter().copied().collect();

    let mut interior_loops = Vec::new();
    let mut excursions = Vec::new();
    for lp in &soup.loops {
        // no open edge crosses the trace, so loops are entirely inside or
        // entirely outside
        if !inside_set.contains(&lp.vertices[0]) {
            continue;
        }
        debug_assert!(lp.vertices.iter().all(|v| inside_set.contains(v)));
        if lp.vertices.iter().all(|v| o_set.contains(v)) {
            interior_loops.push(lp.clone());
            continue;
        }
        if !lp.vertices.iter().all(|v| o_set.contains(v) || b_set.contains(v)) {
            return Err(ExcError::LoopEscapes);
        }
        // maximal cyclic runs of O vertices between B visits
        let l = lp.vertices.len();
        let b_positions: Vec<usize> =
            (0..l).filter(|&i| b_set.contains(&lp.vertices[i])).collect();
        for (j, &p) in b_positions.iter().enumerate() {
            let q = b_positions[(j + 1) % b_positions.len()];
            let gap = (q + l - p) % l;
            if gap <= 1 {
                continue; // consecutive B visits, no interior run
            }
            let interior: Vec<usize> =
                (1..gap).map(|s| lp.vertices[(p + s) % l]).collect();
            excursions.push(Excursion {
                start: lp.vertices[p],
                interior,
                end: lp.vertices[q],
                holding: None,
            });
        }
    }

    Ok(Some(Decomposition {
        component,
        trace,
        b_vertices: b_set.into_iter().collect(),
        o_vertices,
        interior_loops,
        excursions,
    }))
}
