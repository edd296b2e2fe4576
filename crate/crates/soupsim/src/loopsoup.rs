//! Random-walk loop soup at intensity alpha and its Gamma-augmented
//! occupation field.
//!
//! Loop lengths are Poisson with mean `alpha * tr(P^l) / l`; the traces and
//! root weights come from an eigendecomposition of the symmetrized transition
//! matrix, and bridges are filled by propagating the root's indicator column
//! through `P` (so the per-step weights are exact, not spectral).

use nalgebra::DMatrix;
use rand::Rng;
use thiserror::Error;

use crate::gff::{FieldRole, ScalarField};
use crate::grid::{DomainGraph, GreenMatrix, VertexRef};
use crate::scalar::{poisson_u64, Scalar};

#[derive(Debug, Error)]
pub enum LoopError {
    #[error("length cutoff must be at least 2, got {0}")]
    CutoffTooSmall(usize),
    #[error("eigendecomposition failed")]
    EigenFailure,
    #[error("no cutoff below {0} reaches the requested tail mass")]
    TailUnreachable(usize),
    #[error("intensity mismatch: soup sampled at alpha={soup}, requested {requested}")]
    IntensityMismatch { soup: f64, requested: f64 },
    #[error("malformed loop line: {0}")]
    ParseError(String),
}

/// Closed nearest-neighbour path `(v_0, ..., v_{l-1}, v_0)` over interior
/// vertex indices, `l >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedLoop<F: Scalar> {
    pub vertices: Vec<usize>,
    /// Holding time at each visit, when the continuous decoration is kept.
    pub holding: Option<Vec<F>>,
}

impl<F: Scalar> RootedLoop<F> {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Check closedness and adjacency against the graph.
    pub fn validate(&self, g: &DomainGraph<F>) -> bool {
        let l = self.vertices.len();
        if l < 2 {
            return false;
        }
        (0..l).all(|i| {
            let a = g.interior_coord(self.vertices[i]);
            let b = g.interior_coord(self.vertices[(i + 1) % l]);
            g.interior_edge_between(a, b).is_some()
        })
    }
}

#[derive(Debug, Clone)]
pub struct LoopSoup<F: Scalar> {
    pub loops: Vec<RootedLoop<F>>,
    pub alpha: f64,
    pub l_max: usize,
    pub n_interior: usize,
}

impl<F: Scalar> LoopSoup<F> {
    /// One loop per line: `length v_0 v_1 ... v_{l-1}`.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for lp in &self.loops {
            out.push_str(&lp.len().to_string());
            for &v in &lp.vertices {
                out.push(' ');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn from_lines(
        text: &str,
        alpha: f64,
        l_max: usize,
        n_interior: usize,
    ) -> Result<Self, LoopError> {
        let mut loops = Vec::new();
        for line in text.lines() {
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let l: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| LoopError::ParseError(line.to_string()))?;
            let vertices: Vec<usize> = it
                .map(|t| t.parse().map_err(|_| LoopError::ParseError(line.to_string())))
                .collect::<Result<_, _>>()?;
            if vertices.len() != l || l < 2 {
                return Err(LoopError::ParseError(line.to_string()));
            }
            loops.push(RootedLoop { vertices, holding: None });
        }
        Ok(LoopSoup { loops, alpha, l_max, n_interior })
    }
}

/// Per-vertex visit counts and Gamma-augmented continuous local times.
#[derive(Debug, Clone)]
pub struct OccupationField<F: Scalar> {
    pub counts: Vec<u64>,
    pub local_time: Vec<F>,
    pub alpha: f64,
}

/// `tr(P^length) / length` by dense matrix powers (exact; small graphs).
pub fn loop_mass<F: Scalar>(g: &DomainGraph<F>, length: usize) -> F {
    assert!(length >= 2);
    let n = g.n_interior();
    let mut p = DMatrix::<F>::zeros(n, n);
    for i in 0..n {
        for nb in g.neighbours(i) {
            if let VertexRef::Interior(j) = nb.to {
                p[(i, j)] = nb.cond / g.kappa(i);
            }
        }
    }
    let mut pk = p.clone();
    for _ in 1..length {
        pk = &pk * &p;
    }
    pk.trace() / F::of_f64(length as f64)
}

/// Spectral tables for soup sampling on one graph: eigen-pairs of the
/// symmetrized transition matrix, per-length root-weight prefix sums, traces,
/// and the sparse rows of `P` used for bridge fill-in.
pub struct LoopKernel<F: Scalar> {
    n: usize,
    l_max: usize,
    /// `rows[v]` = interior neighbours `(w, P_vw)`.
    rows: Vec<Vec<(usize, F)>>,
    /// `cum[l-2][x]` = prefix sum over `x' <= x` of `(P^l)_{x'x'}` (clamped at 0).
    cum: Vec<Vec<F>>,
    /// `traces[l-2]` = the corresponding total root mass for length `l`.
    traces: Vec<F>,
    tail_mass: f64,
    /// Bipartite classes (coordinate-sum parity): class of each vertex, its
    /// rank within the class, and the members of each class. A column
    /// `P^k e_root` is supported on a single class, so dense bridge columns
    /// are stored compactly per class.
    parity: Vec<u8>,
    class_idx: Vec<u32>,
    by_class: [Vec<u32>; 2],
}

/// A bridge column `P^k e_root`, either as explicit support (early columns
/// reach few vertices) or dense over the parity class it lives on.
enum BridgeCol<F> {
    Sparse { idx: Vec<u32>, val: Vec<F> },
    Dense { class: u8, val: Vec<F> },
}

impl<F: Scalar> BridgeCol<F> {
    fn get(&self, w: usize, class_of: &[u8], rank: &[u32]) -> F {
        match self {
            BridgeCol::Sparse { idx, val } => idx
                .iter()
                .position(|&i| i as usize == w)
                .map_or(F::zero(), |p| val[p]),
            BridgeCol::Dense { class, val } => {
                if class_of[w] == *class {
                    val[rank[w] as usize]
                } else {
                    F::zero()
                }
            }
        }
    }
}

fn transition_rows<F: Scalar>(g: &DomainGraph<F>) -> Vec<Vec<(usize, F)>> {
    (0..g.n_interior())
        .map(|i| {
            g.neighbours(i)
                .iter()
                .filter_map(|nb| match nb.to {
                    VertexRef::Interior(j) => Some((j, nb.cond / g.kappa(i))),
                    VertexRef::Boundary(_) => None,
                })
                .collect()
        })
        .collect()
}

/// Eigenvalues (|lambda|-descending) and squared eigenvector components
/// `qsq[k][x] = Q[x,k]^2` of `S_xy = C_xy / sqrt(kappa_x kappa_y)`.
fn symmetrized_eigen<F: Scalar>(g: &DomainGraph<F>) -> (Vec<F>, Vec<Vec<F>>) {
    let n = g.n_interior();
    let mut s = DMatrix::<F>::zeros(n, n);
    for e in g.interior_edges() {
        let v = e.cond / (g.kappa(e.a) * g.kappa(e.b)).sqrt();
        s[(e.a, e.b)] = v;
        s[(e.b, e.a)] = v;
    }
    let eig = s.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .abs()
            .partial_cmp(&eig.eigenvalues[a].abs())
            .unwrap()
    });
    let eigvals: Vec<F> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let qsq: Vec<Vec<F>> = order
        .iter()
        .map(|&k| {
            let col = eig.eigenvectors.column(k);
            (0..n).map(|x| col[x] * col[x]).collect()
        })
        .collect();
    (eigvals, qsq)
}

impl<F: Scalar> LoopKernel<F> {
    pub fn new(g: &DomainGraph<F>, l_max: usize) -> Result<Self, LoopError> {
        if l_max < 2 {
            return Err(LoopError::CutoffTooSmall(l_max));
        }
        let (eigvals, qsq) = symmetrized_eigen(g);
        Ok(Self::from_eigen(g, l_max, &eigvals, &qsq))
    }

    /// Smallest cutoff whose truncated tail loop mass is below `tail_tol`.
    pub fn auto(g: &DomainGraph<F>, tail_tol: f64) -> Result<Self, LoopError> {
        let (eigvals, qsq) = symmetrized_eigen(g);
        let cap = 1_000_000usize;
        let mut remaining: Vec<f64> = eigvals
            .iter()
            .map(|&lam| -(1.0 - lam.as_f64()).ln())
            .collect();
        let mut pow: Vec<f64> = vec![1.0; eigvals.len()];
        let mut l_max = 2;
        for l in 1..=cap {
            let mut total = 0.0;
            for (k, r) in remaining.iter_mut().enumerate() {
                pow[k] *= eigvals[k].as_f64();
                *r -= pow[k] / l as f64;
                total += *r;
            }
            if l >= 2 && total < tail_tol {
                l_max = l;
                return Ok(Self::from_eigen(g, l_max, &eigvals, &qsq));
            }
        }
        let _ = l_max;
        Err(LoopError::TailUnreachable(cap))
    }

    fn from_eigen(g: &DomainGraph<F>, l_max: usize, eigvals: &[F], qsq: &[Vec<F>]) -> Self {
        let n = g.n_interior();
        let m = eigvals.len();
        let trunc = F::of_f64(1e-18);

        // per-length diagonal of P^l: d_l[x] = sum_k Q[x,k]^2 lambda_k^l,
        // truncating eigenvalues once their power falls below the leading
        // one's by 1e-18
        let mut pow: Vec<F> = eigvals.to_vec(); // lambda^1
        let mut active = m;
        let mut cum = Vec::with_capacity(l_max.saturating_sub(1));
        let mut traces = Vec::with_capacity(l_max.saturating_sub(1));
        for _l in 2..=l_max {
            for k in 0..active {
                pow[k] *= eigvals[k];
            }
            if active > 0 {
                let floor = pow[0].abs() * trunc;
                while active > 1 && pow[active - 1].abs() < floor {
                    active -= 1;
                }
            }
            let mut d = vec![F::zero(); n];
            for k in 0..active {
                let p = pow[k];
                for (x, dv) in d.iter_mut().enumerate() {
                    *dv += p * qsq[k][x];
                }
            }
            let mut run = F::zero();
            let prefix: Vec<F> = d
                .iter()
                .map(|&v| {
                    run += v.max(F::zero());
                    run
                })
                .collect();
            traces.push(run);
            cum.push(prefix);
        }

        // exact tail: sum_k [ -ln(1 - lambda_k) - sum_{l<=L} lambda_k^l / l ]
        let mut tail_mass = 0.0;
        for &lam in eigvals {
            let lam = lam.as_f64();
            let mut rem = -(1.0 - lam).ln();
            let mut p = 1.0;
            for l in 1..=l_max {
                p *= lam;
                rem -= p / l as f64;
            }
            tail_mass += rem;
        }

        let parity: Vec<u8> = (0..n)
            .map(|v| {
                let c = g.interior_coord(v);
                ((c.x + c.y).rem_euclid(2)) as u8
            })
            .collect();
        let mut class_idx = vec![0u32; n];
        let mut by_class: [Vec<u32>; 2] = [Vec::new(), Vec::new()];
        for v in 0..n {
            let p = parity[v] as usize;
            class_idx[v] = by_class[p].len() as u32;
            by_class[p].push(v as u32);
        }

        LoopKernel {
            n,
            l_max,
            rows: transition_rows(g),
            cum,
            traces,
            tail_mass: tail_mass.max(0.0),
            parity,
            class_idx,
            by_class,
        }
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    /// Loop mass omitted by the cutoff, `sum_{l > L} tr(P^l)/l`.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// `tr(P^length)` from the spectral table.
    pub fn trace(&self, length: usize) -> F {
        self.traces[length - 2]
    }

    fn sample_root<R: Rng>(&self, length: usize, rng: &mut R) -> usize {
        let prefix = &self.cum[length - 2];
        let total = *prefix.last().unwrap();
        let target = F::unit_uniform(rng) * total;
        prefix.partition_point(|&p| p <= target).min(self.n - 1)
    }

    /// Fill the bridge given root and length: columns `u_j = P^j e_root`
    /// give the exact conditional step weights `P_vw * u_{l-1-i}[w]`.
    ///
    /// Early columns are kept as explicit supports (a column only reaches the
    /// ball of radius `j` around the root); once the support covers a good
    /// fraction of its parity class the column switches to dense storage over
    /// that class alone, since the other class is identically zero.
    fn sample_bridge<R: Rng>(&self, root: usize, length: usize, rng: &mut R) -> Vec<usize> {
        if length == 2 {
            // u_1 = P e_root, so the single free step has weight P_vw * P_wroot
            let row = &self.rows[root];
            let total = row
                .iter()
                .fold(F::zero(), |acc, &(w, p)| acc + p * self.p_entry(w, root));
            let mut target = F::unit_uniform(rng) * total;
            let mut chosen = row[0].0;
            for &(w, p) in row {
                let wgt = p * self.p_entry(w, root);
                if target < wgt {
                    chosen = w;
                    break;
                }
                target -= wgt;
                chosen = w;
            }
            return vec![root, chosen];
        }

        let sparse_limit = (self.n / 8).max(16);
        let mut cols: Vec<BridgeCol<F>> = Vec::with_capacity(length);
        cols.push(BridgeCol::Sparse { idx: vec![root as u32], val: vec![F::one()] });
        // dense scratch of the previous column, maintained alongside `cols`
        let mut prev_dense = vec![F::zero(); self.n];
        prev_dense[root] = F::one();
        let mut prev_touched: Vec<u32> = vec![root as u32];
        let mut prev_is_sparse = true;
        let mut seen = vec![false; self.n];
        for k in 1..length {
            let class = ((self.parity[root] as usize + k) % 2) as u8;
            let next = if prev_is_sparse && prev_touched.len() < sparse_limit {
                // candidate support: neighbours of the previous support
                let mut idx: Vec<u32> = Vec::with_capacity(4 * prev_touched.len());
                for &y in &prev_touched {
                    for &(w, _) in &self.rows[y as usize] {
                        if !seen[w] {
                            seen[w] = true;
                            idx.push(w as u32);
                        }
                    }
                }
                for &w in &idx {
                    seen[w as usize] = false;
                }
                let val: Vec<F> = idx
                    .iter()
                    .map(|&w| {
                        self.rows[w as usize]
                            .iter()
                            .fold(F::zero(), |acc, &(y, p)| acc + p * prev_dense[y])
                    })
                    .collect();
                BridgeCol::Sparse { idx, val }
            } else {
                let members = &self.by_class[class as usize];
                let val: Vec<F> = members
                    .iter()
                    .map(|&w| {
                        self.rows[w as usize]
                            .iter()
                            .fold(F::zero(), |acc, &(y, p)| acc + p * prev_dense[y])
                    })
                    .collect();
                BridgeCol::Dense { class, val }
            };
            // refresh the scratch to hold the new column
            for &y in &prev_touched {
                prev_dense[y as usize] = F::zero();
            }
            match &next {
                BridgeCol::Sparse { idx, val } => {
                    prev_touched.clear();
                    prev_touched.extend_from_slice(idx);
                    for (i, &w) in idx.iter().enumerate() {
                        prev_dense[w as usize] = val[i];
                    }
                    prev_is_sparse = true;
                }
                BridgeCol::Dense { class, val } => {
                    let members = &self.by_class[*class as usize];
                    prev_touched.clear();
                    prev_touched.extend_from_slice(members);
                    for (i, &w) in members.iter().enumerate() {
                        prev_dense[w as usize] = val[i];
                    }
                    prev_is_sparse = false;
                }
            }
            cols.push(next);
        }

        let mut seq = Vec::with_capacity(length);
        seq.push(root);
        let mut v = root;
        for i in 0..length - 1 {
            let back = &cols[length - 1 - i];
            let row = &self.rows[v];
            let total = row.iter().fold(F::zero(), |acc, &(w, p)| {
                acc + p * back.get(w, &self.parity, &self.class_idx)
            });
            debug_assert!(total > F::zero(), "stranded bridge");
            let mut target = F::unit_uniform(rng) * total;
            let mut chosen = row[0].0;
            for &(w, p) in row {
                let wgt = p * back.get(w, &self.parity, &self.class_idx);
                if target < wgt {
                    chosen = w;
                    break;
                }
                target -= wgt;
                chosen = w;
            }
            seq.push(chosen);
            v = chosen;
        }
        seq
    }

    /// `P_{w,root}` looked up from the adjacency rows.
    fn p_entry(&self, w: usize, target: usize) -> F {
        self.rows[w]
            .iter()
            .find(|&&(y, _)| y == target)
            .map_or(F::zero(), |&(_, p)| p)
    }

    /// Draw one soup: independent Poisson counts per length, then roots and
    /// bridges.
    pub fn sample_soup<R: Rng>(&self, alpha: f64, rng: &mut R) -> LoopSoup<F> {
        let mut loops = Vec::new();
        for l in 2..=self.l_max {
            let tr = self.trace(l).as_f64();
            if tr <= 0.0 {
                continue;
            }
            let k = poisson_u64(alpha * tr / l as f64, rng);
            for _ in 0..k {
                let root = self.sample_root(l, rng);
                let vertices = self.sample_bridge(root, l, rng);
                loops.push(RootedLoop { vertices, holding: None });
            }
        }
        LoopSoup { loops, alpha, l_max: self.l_max, n_interior: self.n }
    }
}

/// Convenience one-shot sampler (experiments reuse a [`LoopKernel`] instead).
pub fn sample_loop_soup<F: Scalar, R: Rng>(
    g: &DomainGraph<F>,
    alpha: f64,
    l_max: usize,
    rng: &mut R,
) -> Result<LoopSoup<F>, LoopError> {
    Ok(LoopKernel::new(g, l_max)?.sample_soup(alpha, rng))
}

/// Augment visit counts with continuous holding times:
/// `l_x ~ Gamma(N_x + alpha, 1) / kappa_x` independently given the counts.
pub fn occupation_field<F: Scalar, R: Rng>(
    soup: &LoopSoup<F>,
    g: &DomainGraph<F>,
    rng: &mut R,
) -> OccupationField<F> {
    let mut counts = vec![0u64; g.n_interior()];
    for lp in &soup.loops {
        for &v in &lp.vertices {
            counts[v] += 1;
        }
    }
    let alpha = F::of_f64(soup.alpha);
    let local_time = counts
        .iter()
        .enumerate()
        .map(|(x, &n)| F::gamma(F::of_f64(n as f64) + alpha, F::one(), rng) / g.kappa(x))
        .collect();
    OccupationField { counts, local_time, alpha: soup.alpha }
}

/// `l_x - alpha G(x,x)`, the exact discrete recentering.
pub fn recentered_occupation<F: Scalar>(
    occ: &OccupationField<F>,
    green: &GreenMatrix<F>,
    alpha: f64,
) -> Result<ScalarField<F>, LoopError> {
    if (occ.alpha - alpha).abs() > 1e-12 {
        return Err(LoopError::IntensityMismatch { soup: occ.alpha, requested: alpha });
    }
    let a = F::of_f64(alpha);
    let values = occ
        .local_time
        .iter()
        .enumerate()
        .map(|(x, &t)| t - a * green.diag(x))
        .collect();
    Ok(ScalarField::new(values, FieldRole::Occupation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gff::{wick_square, GffSampler};
    use crate::grid::{build_rect_graph, green_function};
    use crate::stats::{chi2_gof, gamma_ks, ks_two_sample, mean_and_se, Streams};
    use std::collections::HashMap;

    #[test]
    fn loop_mass_oracles() {
        let g1 = build_rect_graph::<f64>(1, 1);
        assert_eq!(loop_mass(&g1, 2), 0.0);
        assert_eq!(loop_mass(&g1, 5), 0.0);
        // (2,1): P = [[0,1/4],[1/4,0]]
        let g2 = build_rect_graph::<f64>(2, 1);
        assert!((loop_mass(&g2, 2) - 1.0 / 16.0).abs() < 1e-15);
        assert!((loop_mass(&g2, 4) - 1.0 / 512.0).abs() < 1e-15);
        assert_eq!(loop_mass(&g2, 3), 0.0);
    }

    #[test]
    fn kernel_traces_match_dense_powers() {
        let g = build_rect_graph::<f64>(3, 3);
        let kern = LoopKernel::new(&g, 12).unwrap();
        for l in 2..=12 {
            let dense = loop_mass(&g, l) * l as f64;
            assert!(
                (kern.trace(l) - dense).abs() < 1e-12,
                "l={l}: spectral {} vs dense {dense}",
                kern.trace(l)
            );
        }
    }

    #[test]
    fn auto_cutoff_tail_below_tolerance() {
        let g = build_rect_graph::<f64>(4, 4);
        let kern = LoopKernel::auto(&g, 1e-6).unwrap();
        assert!(kern.tail_mass() < 1e-6);
        // one step shorter must exceed the tolerance
        let shorter = LoopKernel::new(&g, kern.l_max() - 1).unwrap();
        assert!(shorter.tail_mass() >= 1e-6);
    }

    #[test]
    fn single_cell_soup_empty() {
        let g = build_rect_graph::<f64>(1, 1);
        let streams = Streams::new(7);
        let mut rng = streams.stream(0, 0);
        let soup = sample_loop_soup(&g, 0.5, 16, &mut rng).unwrap();
        assert!(soup.loops.is_empty());
    }

    #[test]
    fn cutoff_validation() {
        let g = build_rect_graph::<f64>(2, 1);
        let streams = Streams::new(7);
        let mut rng = streams.stream(0, 1);
        assert!(sample_loop_soup(&g, 0.5, 1, &mut rng).is_err());
    }

    #[test]
    fn poisson_count_mean_and_variance() {
        // (2,1), alpha=1/2, L=2: K ~ Poisson(1/32)
        let g = build_rect_graph::<f64>(2, 1);
        let kern = LoopKernel::new(&g, 2).unwrap();
        let streams = Streams::new(19);
        let mut rng = streams.stream(0, 0);
        let n = 100_000;
        let counts: Vec<f64> =
            (0..n).map(|_| kern.sample_soup(0.5, &mut rng).loops.len() as f64).collect();
        let (mean, se) = mean_and_se(&counts);
        assert!((mean - 1.0 / 32.0).abs() < 5.0 * se, "mean {mean} se {se}");
        let sq: Vec<f64> = counts.iter().map(|&c| (c - mean) * (c - mean)).collect();
        let (var, sev) = mean_and_se(&sq);
        assert!((var - 1.0 / 32.0).abs() < 5.0 * sev, "var {var} se {sev}");
    }

    #[test]
    fn sampled_loops_valid() {
        let g = build_rect_graph::<f64>(3, 3);
        let kern = LoopKernel::new(&g, 20).unwrap();
        let streams = Streams::new(23);
        let mut rng = streams.stream(0, 0);
        let mut seen = 0;
        for _ in 0..200 {
            let soup = kern.sample_soup(1.0, &mut rng);
            for lp in &soup.loops {
                assert!(lp.validate(&g));
                seen += 1;
            }
        }
        assert!(seen > 100);
    }

    #[test]
    fn bridge_matches_enumeration() {
        // (2,1), length 4: the only closed 4-paths are abab rooted at a or b,
        // equal weight
        let g = build_rect_graph::<f64>(2, 1);
        let kern = LoopKernel::new(&g, 4).unwrap();
        let streams = Streams::new(29);
        let mut rng = streams.stream(0, 0);
        let mut tallies: HashMap<Vec<usize>, u64> = HashMap::new();
        let mut total = 0u64;
        while total < 20_000 {
            let soup = kern.sample_soup(100.0, &mut rng);
            for lp in soup.loops {
                if lp.len() == 4 {
                    *tallies.entry(lp.vertices).or_insert(0) += 1;
                    total += 1;
                }
            }
        }
        assert_eq!(tallies.len(), 2, "unexpected loop shapes: {tallies:?}");
        let observed: Vec<u64> = tallies.values().copied().collect();
        let expected = vec![total as f64 / 2.0; 2];
        let (_, p) = chi2_gof(&observed, &expected).unwrap();
        assert!(p > 0.001, "p = {p}");
    }

    #[test]
    fn occupation_single_cell() {
        // no loops: l ~ Gamma(alpha)/4; mean alpha*G_xx
        let g = build_rect_graph::<f64>(1, 1);
        let streams = Streams::new(31);
        let mut rng = streams.stream(0, 0);
        for &(alpha, target) in &[(0.5, 0.125), (0.01, 0.01 * 0.25)] {
            let xs: Vec<f64> = (0..100_000)
                .map(|_| {
                    let soup =
                        LoopSoup::<f64> { loops: vec![], alpha, l_max: 2, n_interior: 1 };
                    occupation_field(&soup, &g, &mut rng).local_time[0]
                })
                .collect();
            let (mean, se) = mean_and_se(&xs);
            assert!((mean - target).abs() < 5.0 * se, "alpha {alpha}: mean {mean} se {se}");
            let (_, p) = gamma_ks(&xs, alpha, 0.25).unwrap();
            assert!(p > 0.001, "alpha {alpha}: KS p = {p}");
        }
    }

    #[test]
    fn recentering_and_le_jan() {
        // (2,1), alpha = 1/2: recentred occupation is centered, and l_x
        // matches phi_x^2/2 in law (two-sample KS) with the right joint
        // second moment
        let g = build_rect_graph::<f64>(2, 1);
        let green = green_function(&g).unwrap();
        let kern = LoopKernel::auto(&g, 1e-6).unwrap();
        let gff = GffSampler::new(&green).unwrap();
        let streams = Streams::new(37);
        let mut rng = streams.stream(0, 0);
        let n = 30_000;
        let mut occ0 = Vec::with_capacity(n);
        let mut rec0 = Vec::with_capacity(n);
        let mut cross = Vec::with_capacity(n);
        let mut half_sq = Vec::with_capacity(n);
        for _ in 0..n {
            let soup = kern.sample_soup(0.5, &mut rng);
            let occ = occupation_field(&soup, &g, &mut rng);
            let rec = recentered_occupation(&occ, &green, 0.5).unwrap();
            occ0.push(occ.local_time[0]);
            rec0.push(rec.value(0));
            cross.push(occ.local_time[0] * occ.local_time[1]);
            let phi = gff.sample(&mut rng);
            half_sq.push(phi.value(0) * phi.value(0) / 2.0);
        }
        let (mean, se) = mean_and_se(&rec0);
        assert!(mean.abs() < 5.0 * se, "recentred mean {mean} se {se}");
        let (_, p) = ks_two_sample(&occ0, &half_sq).unwrap();
        assert!(p > 0.001, "Le Jan KS p = {p}");
        // E[l_x l_y] = (G_xx G_yy + 2 G_xy^2) / 4
        let target = (green.diag(0) * green.diag(1)
            + 2.0 * green.entry(0, 1) * green.entry(0, 1))
            / 4.0;
        let (mc, sec) = mean_and_se(&cross);
        assert!((mc - target).abs() < 5.0 * sec, "cross {mc} target {target} se {sec}");
    }

    #[test]
    fn line_format_round_trip() {
        let g = build_rect_graph::<f64>(3, 3);
        let kern = LoopKernel::new(&g, 16).unwrap();
        let streams = Streams::new(41);
        let mut rng = streams.stream(0, 0);
        let soup = kern.sample_soup(2.0, &mut rng);
        let text = soup.to_lines();
        let back = LoopSoup::<f64>::from_lines(&text, soup.alpha, soup.l_max, soup.n_interior)
            .unwrap();
        assert_eq!(back.loops.len(), soup.loops.len());
        for (a, b) in back.loops.iter().zip(&soup.loops) {
            assert_eq!(a.vertices, b.vertices);
        }
    }
}
