//! Experiment drivers behind `soupsim check <id>`.
//!
//! Every driver runs a full sampling experiment and returns a [`StatReport`]
//! whose rows carry the pass/fail gates; the acceptance suite and the CLI
//! both go through [`run_check`]. Replicas draw their generators from
//! counter-keyed [`Streams`], so results are bit-identical across thread
//! counts.

use std::collections::HashSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::cable::{
    clusters_from_gff, clusters_from_soup, explore_clusters_touching, gff_from_soup,
    outermost_cluster_around, CableError, ClusterSet,
};
use crate::config::{ExperimentConfig, GraphSpec};
use crate::excursions::{
    boundary_excursion_decomposition, fill_holding, sample_excursions, ExcDomain, ExcError,
    Excursion,
};
use crate::gff::{shifted_square, wick_square, GffError, GffSampler};
use crate::grid::{
    build_disk_graph, build_rect_graph, green_entry_on_subdomain, green_function,
    green_function_on_subdomain, Coord, DomainGraph, GridError,
};
use crate::loopsoup::{occupation_field, LoopError, LoopKernel, OccupationField};
use crate::stats::{
    chi2_gof, correlation_test, ks_two_sample, mean_and_se, normal_two_sided_p, ReportRow,
    StatReport, StatsError, Streams,
};

#[derive(Debug, Error)]
pub enum ExpError {
    #[error("unknown check id `{0}`")]
    UnknownCheck(String),
    #[error("check `{0}` requires a disk graph")]
    NeedsDisk(&'static str),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Gff(#[from] GffError),
    #[error(transparent)]
    Soup(#[from] LoopError),
    #[error(transparent)]
    Cable(#[from] CableError),
    #[error(transparent)]
    Excursion(#[from] ExcError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// The check ids accepted by `soupsim check`.
pub const CHECK_IDS: [&str; 10] = [
    "green",
    "gff-cov",
    "lejan",
    "lupu-consistency",
    "prop-p1",
    "lemma-lt",
    "dynkin",
    "flagship",
    "interior-soup",
    "independence",
];

pub fn run_check(id: &str, cfg: &ExperimentConfig) -> Result<StatReport, ExpError> {
    match id {
        "green" => green_check(cfg),
        "gff-cov" => gff_cov_check(cfg),
        "lejan" => lejan_check(cfg),
        "lupu-consistency" => lupu_consistency_check(cfg),
        "prop-p1" => prop_p1_check(cfg),
        "lemma-lt" => lemma_lt_check(cfg),
        "dynkin" => dynkin_check(cfg),
        "flagship" => flagship_check(cfg),
        "interior-soup" => interior_soup_check(cfg),
        "independence" => independence_check(cfg),
        other => Err(ExpError::UnknownCheck(other.to_string())),
    }
}

// purpose-tag bases, one block of 100 per check so streams never collide
const P_GFF_COV: u32 = 100;
const P_LEJAN: u32 = 200;
const P_ORACLE: u32 = 300;
const P_LUPU: u32 = 400;
const P_PROP: u32 = 500;
const P_LEMMA: u32 = 600;
const P_DYNKIN: u32 = 700;
const P_FLAG: u32 = 800;
const P_FLAG2: u32 = 900;
const P_INTERIOR: u32 = 1000;
const P_INDEP: u32 = 1100;

fn row(
    functional: &str,
    parameter: f64,
    n_effective: u64,
    statistic: f64,
    p_value: f64,
    estimate: f64,
    std_error: f64,
    pass: bool,
) -> ReportRow {
    ReportRow {
        functional: functional.to_string(),
        parameter,
        n_effective,
        statistic,
        p_value,
        estimate,
        std_error,
        pass,
    }
}

/// z statistic of a sample mean against a target (se taken from the sample).
fn z_of(samples: &[f64], target: f64) -> (f64, f64, f64) {
    let (mean, se) = mean_and_se(samples);
    let z = if se > 0.0 { (mean - target) / se } else if mean == target { 0.0 } else { f64::INFINITY };
    (z, mean, se)
}

// ---------------------------------------------------------------------------
// green: exact identities of the Green function
// ---------------------------------------------------------------------------

/// `L G = I` and the killing identity on disks of increasing radius. These
/// are deterministic, so the gate is a hard numerical tolerance.
pub fn green_check(_cfg: &ExperimentConfig) -> Result<StatReport, ExpError> {
    let mut report = StatReport::new("green");
    for radius in [1u32, 2, 4, 8, 16] {
        let g = build_disk_graph::<f64>(radius);
        let green = green_function(&g)?;
        let e1 = green.lg_identity_error(&g);
        let e2 = green.killing_identity_error(&g);
        let n = g.n_interior() as u64;
        report.push(row("lg_identity_err", radius as f64, n, e1, 1.0, e1, 0.0, e1 < 1e-10));
        report.push(row("killing_identity_err", radius as f64, n, e2, 1.0, e2, 0.0, e2 < 1e-10));
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// gff-cov: empirical covariance of the sampled field
// ---------------------------------------------------------------------------

/// Sample covariance of every entry of `E[phi_x phi_y]` against `G`.
pub fn gff_cov_check(cfg: &ExperimentConfig) -> Result<StatReport, ExpError> {
    let g = cfg.graph.build::<f64>();
    let green = green_function(&g)?;
    let sampler = GffSampler::new(&green)?;
    let streams = Streams::new(cfg.seed);
    let fields: Vec<Vec<f64>> = (0..cfg.replicas as u64)
        .into_par_iter()
        .map(|r| sampler.sample(&mut streams.stream(r, P_GFF_COV)).values().to_vec())
        .collect();
    let mut report = StatReport::new("gff-cov");
    report.push(pair_moment_row("cov_max_abs_z", &fields, |i, j| green.entry(i, j)));
    report.push(mean_zero_row("mean_max_abs_z", &fields));
    Ok(report)
}

/// Worst z over all (i<=j) of `mean(v_i v_j)` vs a target matrix.
fn pair_moment_row(
    name: &str,
    samples: &[Vec<f64>],
    target: impl Fn(usize, usize) -> f64,
) -> ReportRow {
    let n = samples.len() as f64;
    let dim = samples[0].len();
    let mut m1 = vec![0.0; dim * (dim + 1) / 2];
    let mut m2 = vec![0.0; dim * (dim + 1) / 2];
    for v in samples {
        let mut k = 0;
        for i in 0..dim {
            for j in i..dim {
                let p = v[i] * v[j];
                m1[k] += p;
                m2[k] += p * p;
                k += 1;
            }
        }
    }
    let mut worst = (0.0f64, 0.0, 0.0); // (|z|, estimate, se)
    let mut k = 0;
    for i in 0..dim {
        for j in i..dim {
            let mean = m1[k] / n;
            let var = (m2[k] / n - mean * mean).max(0.0) * n / (n - 1.0);
            let se = (var / n).sqrt();
            let z = if se > 0.0 { (mean - target(i, j)) / se } else { 0.0 };
            if z.abs() >= worst.0 {
                worst = (z.abs(), mean, se);
            }
            k += 1;
        }
    }
    row(name, 0.0, samples.len() as u64, worst.0, normal_two_sided_p(worst.0), worst.1, worst.2, worst.0 < 5.0)
}

/// Worst per-coordinate z of the sample mean against zero.
fn mean_zero_row(name: &str, samples: &[Vec<f64>]) -> ReportRow {
    let dim = samples[0].len();
    let mut worst = (0.0f64, 0.0, 0.0);
    let mut col = vec![0.0; samples.len()];
    for i in 0..dim {
        for (r, v) in samples.iter().enumerate() {
            col[r] = v[i];
        }
        let (z, mean, se) = z_of(&col, 0.0);
        if z.abs() >= worst.0 {
            worst = (z.abs(), mean, se);
        }
    }
    row(name, 0.0, samples.len() as u64, worst.0, normal_two_sided_p(worst.0), worst.1, worst.2, worst.0 < 5.0)
}

// ---------------------------------------------------------------------------
// lejan: occupation field vs half the squared field at alpha = 1/2
// ---------------------------------------------------------------------------

/// Le Jan's isomorphism (alpha = 1/2 only): per-vertex KS of the occupation
/// local time against `phi^2/2`, plus every joint second moment against
/// `(G_xx G_yy + 2 G_xy^2)/4`.
pub fn lejan_check(cfg: &ExperimentConfig) -> Result<StatReport, ExpError> {
    let streams = Streams::new(cfg.seed);
    let alpha = cfg.alpha();
    let mut report = StatReport::new("lejan");
    for (tag, g) in [
        ("rect2x1", build_rect_graph::<f64>(2, 1)),
        ("disk4", build_disk_graph::<f64>(4)),
    ] {
        let green = green_function(&g)?;
        let sampler = GffSampler::new(&green)?;
        let kern = LoopKernel::auto(&g, cfg.tail_tol)?;
        let base = P_LEJAN + if tag == "rect2x1" { 0 } else { 10 };
        let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..cfg.replicas as u64)
            .into_par_iter()
            .map(|r| {
                let soup = kern.sample_soup(alpha, &mut streams.stream(r, base));
                let occ = occupation_field(&soup, &g, &mut streams.stream(r, base + 1));
                let phi = sampler.sample(&mut streams.stream(r, base + 2));
                let lt: Vec<f64> = occ.local_time.clone();
                let half_sq: Vec<f64> = phi.values().iter().map(|&v| v * v / 2.0).collect();
                (lt, half_sq)
            })
            .collect();
        let dim = g.n_interior();
        let mut min_p = 1.0f64;
        let mut worst_d = 0.0;
        let mut col_a = vec![0.0; pairs.len()];
        let mut col_b = vec![0.0; pairs.len()];
        for x in 0..dim {
            for (r, (a, b)) in pairs.iter().enumerate() {
                col_a[r] = a[x];
                col_b[r] = b[x];
            }
            let (d, p) = ks_two_sample(&col_a, &col_b)?;
            if p < min_p {
                min_p = p;
                worst_d = d;
            }
        }
        report.push(row(
            &format!("lt_ks_min_p_{tag}"),
            dim as f64,
            pairs.len() as u64,
            worst_d,
            min_p,
            worst_d,
            0.0,
            min_p > 1e-3,
        ));
        let lts: Vec<Vec<f64>> = pairs.iter().map(|(a, _)| a.clone()).collect();
        let mut moment = pair_moment_row("", &lts, |i, j| {
            (green.diag(i) * green.diag(j) + 2.0 * green.entry(i, j) * green.entry(i, j)) / 4.0
        });
        moment.functional = format!("joint_moment_max_abs_z_{tag}");
        report.push(moment);
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// loop sampler oracle (used by the acceptance suite directly)
// ---------------------------------------------------------------------------

/// Exact small-graph oracles for the loop sampler: the mean number of
/// length-2 loops on the two-vertex segment is `tr(P^2)/4 = 1/32` at
/// alpha = 1/2, and on the 2x2 square both the root of a length-4 loop and
/// its bridge pattern are uniform by symmetry.
pub fn loop_oracle_check(cfg: &ExperimentConfig) -> Result<StatReport, ExpError> {
    let streams = Streams::new(cfg.seed);
    let mut report = StatReport::new("loop-oracle");

    // two-vertex segment: P_12 = 1/4, so tr(P^2) = 1/8 and the length-2
    // loop count is Poisson(alpha * tr(P^2) / 2) = Poisson(1/32)
    let g2 = build_rect_graph::<f64>(2, 1);
    let kern2 = LoopKernel::new(&g2, 2)?;
    let counts: Vec<f64> = (0..cfg.replicas as u64)
        .into_par_iter()
        .map(|r| kern2.sample_soup(0.5, &mut streams.stream(r, P_ORACLE)).loops.len() as f64)
        .collect();
    let (z, mean, se) = z_of(&counts, 1.0 / 32.0);
    report.push(row(
        "len2_count_mean_z",
        0.5,
        counts.len() as u64,
        z,
        normal_two_sided_p(z),
        mean,
        se,
        z.abs() < 5.0,
    ));

    // 2x2 square (a 4-cycle): every rooted closed 4-walk has probability
    // (1/4)^4. The middle vertex is either the root again or the diagonal,
    // and the first/last neighbours are free, so the 8 shapes
    // (first, middle, last) are uniform, as is the root over the 4 vertices.
    // A boosted intensity only multiplies the Poisson counts, not the
    // per-loop law.
    let g4 = build_rect_graph::<f64>(2, 2);
    let kern4 = LoopKernel::new(&g4, 4)?;
    let target: u64 = 20_000;
    let mut root_counts = vec![0u64; 4];
    let mut pattern_counts = vec![0u64; 8];
    let mut collected = 0u64;
    let mut replica = 0u64;
    while collected < target && replica < 200_000 {
        let soup = kern4.sample_soup(64.0, &mut streams.stream(replica, P_ORACLE + 1));
        for lp in &soup.loops {
            if lp.vertices.len() != 4 {
                continue;
            }
            let root = lp.vertices[0];
            root_counts[root] += 1;
            pattern_counts[pattern_index(&g4, &lp.vertices)] += 1;
            collected += 1;
        }
        replica += 1;
    }
    let total = pattern_counts.iter().sum::<u64>() as f64;
    let (stat_r, p_r) = chi2_gof(&root_counts, &vec![total / 4.0; 4])?;
    let (stat_p, p_p) = chi2_gof(&pattern_counts, &vec![total / 8.0; 8])?;
    report.push(row("root_chi2_p", 4.0, total as u64, stat_r, p_r, stat_r, 0.0, p_r > 1e-3));
    report.push(row("bridge_chi2_p", 8.0, total as u64, stat_p, p_p, stat_p, 0.0, p_p > 1e-3));
    Ok(report)
}

/// Shape index of a rooted closed 4-walk on the 4-cycle: which neighbour of
/// the root was left first, whether the middle vertex is the root or the
/// diagonal, and which neighbour the walk came back through.
fn pattern_index(g: &DomainGraph<f64>, walk: &[usize]) -> usize {
    let root = walk[0];
    let mut nbrs: Vec<usize> = g
        .neighbours(root)
        .iter()
        .filter_map(|nb| match nb.to {
            crate::grid::VertexRef::Interior(w) => Some(w),
            _ => None,
        })
        .collect();
    nbrs.sort_unstable();
    let first = usize::from(walk[1] != nbrs[0]);
    let via_diagonal = usize::from(walk[2] != root);
    let back = usize::from(walk[3] != nbrs[0]);
    first * 4 + via_diagonal * 2 + back
}

// ---------------------------------------------------------------------------
// lupu-consistency: cluster functionals agree between the two couplings
// ---------------------------------------------------------------------------

/// Clusters built from the soup (traversed edges plus the conditional
/// bridges) must match clusters built from the field by the sign rule, in
/// law. Compared functionals: component count, largest component and the
/// indicator that some cluster surrounds the centre.
pub fn lupu_consistency_check(cfg: &ExperimentConfig) -> Result<StatReport, ExpError> {
    let streams = Streams::new(cfg.seed);
    let alpha = cfg.alpha();
    let mut report = StatReport::new("lupu-consistency");
    for radius in [4u32, 8] {
        let g = build_disk_graph::<f64>(radius);
        let green = green_function(&g)?;
        let sampler = GffSampler::new(&green)?;
        let kern = LoopKernel::auto(&g, cfg.tail_tol)?;
        let v0 = g.interior_index(Coord::new(0, 0)).expect("disk has a centre");
        let base = P_LUPU + 10 * (radius == 8) as u32;
        let rows: Vec<Result<[f64; 6], ExpError>> = (0..cfg.replicas as u64)
            .into_par_iter()
            .map(|r| {
                let soup = kern.sample_soup(alpha, &mut streams.stream(r, base));
                let occ = occupation_field(&soup, &g, &mut streams.stream(r, base + 1));
                let cs = clusters_from_soup(&soup, &occ, &g, &mut streams.stream(r, base + 2));
                let phi = sampler.sample(&mut streams.stream(r, base + 3));
                let cg = clusters_from_gff(&phi, &g, &mut streams.stream(r, base + 4))?;
                let ss = outermost_cluster_around(&cs, &g, v0)?.is_some() as u64 as f64;
                let sg = outermost_cluster_around(&cg, &g, v0)?.is_some() as u64 as f64;
                Ok([
                    cs.n_components() as f64,
                    cs.largest_component() as f64,
                    ss,
                    cg.n_components() as f64,
                    cg.largest_component() as f64,
                    sg,
                ])
            })
            .collect();
        let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
        let n = rows.len() as u64;
        for (k, name) in [(0usize, "ncomp_ks_p"), (1, "largest_ks_p")] {
            let a: Vec<f64> = rows.iter().map(|v| v[k]).collect();
            let b: Vec<f64> = rows.iter().map(|v| v[k + 3]).collect();
            let (d, p) = ks_two_sample(&a, &b)?;
            report.push(row(&format!("{name}_r{radius}"), radius as f64, n, d, p, d, 0.0, p > 1e-3));
        }
        let a: Vec<f64> = rows.iter().map(|v| v[2]).collect();
        let b: Vec<f64> = rows.iter().map(|v| v[5]).collect();
        let diff: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        let (z, mean, se) = z_of(&diff, 0.0);
        report.push(row(
            &format!("surround_diff_z_r{radius}"),
            radius as f64,
            n,
            z,
            normal_two_sided_p(z),
            mean,
            se,
            z.abs() < 5.0,
        ));
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// prop-p1: the field built on top of the soup is a GFF
// ---------------------------------------------------------------------------

/// `phi_x = s_K sqrt(2 l_x)` with one fair coin per cluster must have
/// covariance exactly `G`; every entry is gated at 5 standard errors.
pub fn prop_p1_check(cfg: &ExperimentConfig) -> Result<StatReport, ExpError> {
    let g = cfg.graph.build::<f64>();
    let green = green_function(&g)?;
    let kern = LoopKernel::auto(&g, cfg.tail_tol)?;
    let streams = Streams::new(cfg.seed);
    let alpha = cfg.alpha();
    let fields: Vec<Result<Vec<f64>, ExpError>> = (0..cfg.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let soup = kern.sample_soup(alpha, &mut streams.stream(r, P_PROP));
            let occ = occupation_field(&soup, &g, &mut streams.stream(r, P_PROP + 1));
            let cs = clusters_from_soup(&soup, &occ, &g, &mut streams.stream(r, P_PROP + 2));
            let phi = gff_from_soup(&occ, &cs, &mut streams.stream(r, P_PROP + 3))?;
            Ok(phi.values().to_vec())
        })
        .collect();
    let fields = fields.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut report = StatReport::new("prop-p1");
    report.push(pair_moment_row("coupled_cov_max_abs_z", &fields, |i, j| green.entry(i, j)));
    report.push(mean_zero_row("coupled_mean_max_abs_z", &fields));
    Ok(report)
}

// ---------------------------------------------------------------------------
// lemma-lt: spatial Markov property of the exploration
// ---------------------------------------------------------------------------

/// Explore the clusters touching a far set `A`; on the unexplored domain the
/// coupled field should again look like a GFF there. Paired gates: for
/// probes x, y in the unexplored set, `E[phi_x phi_y - G_unexplored(x, y)]`
/// and `E[phi_x]` are both zero.
pub fn lemma_lt_check(cfg: &ExperimentConfig) -> Result<StatReport, ExpError> {
    let g = build_disk_graph::<f64>(8);
    let kern = LoopKernel::auto(&g, cfg.tail_tol)?;
    let streams = Streams::new(cfg.seed);
    let idx = |x: i32, y: i32| g.interior_index(Coord::new(x, y)).expect("probe is interior");
    let px = idx(5, 0);
    let py = idx(6, 0);
    let alpha = cfg.alpha();
    let a_sets: Vec<HashSet<usize>> = vec![
        [idx(-7, 0)].into_iter().collect(),
        [idx(-7, -1), idx(-7, 0), idx(-7, 1)].into_iter().collect(),
        [idx(-7, -1), idx(-7, 0), idx(-7, 1), idx(-6, -1), idx(-6, 0), idx(-6, 1)]
            .into_iter()
            .collect(),
    ];
    type Obs = [Option<(f64, f64)>; 3];
    let obs: Vec<Result<Obs, ExpError>> = (0..cfg.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let soup = kern.sample_soup(alpha, &mut streams.stream(r, P_LEMMA));
            let occ = occupation_field(&soup, &g, &mut streams.stream(r, P_LEMMA + 1));
            let cs = clusters_from_soup(&soup, &occ, &g, &mut streams.stream(r, P_LEMMA + 2));
            let phi = gff_from_soup(&occ, &cs, &mut streams.stream(r, P_LEMMA + 3))?;
            let mut out: Obs = [None, None, None];
            for (k, a) in a_sets.iter().enumerate() {
                let unexplored = explore_clusters_touching(&cs, &g, a)?;
                let in_u = |v: usize| unexplored.binary_search(&v).is_ok();
                if in_u(px) && in_u(py) {
                    let gxy = green_entry_on_subdomain(&g, &unexplored, px, py, 1e-10)?;
                    out[k] = Some((phi.value(px) * phi.value(py) - gxy, phi.value(px)));
                }
            }
            Ok(out)
        })
        .collect();
    let obs = obs.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut report = StatReport::new("lemma-lt");
    for k in 0..3 {
        let kept: Vec<(f64, f64)> = obs.iter().filter_map(|o| o[k]).collect();
        let n = kept.len() as u64;
        let diffs: Vec<f64> = kept.iter().map(|&(d, _)| d).collect();
        let means: Vec<f64> = kept.iter().map(|&(_, m)| m).collect();
        let (zd, md, sd) = z_of(&diffs, 0.0);
        let (zm, mm, sm) = z_of(&means, 0.0);
        let size = a_sets[k].len() as f64;
        report.push(row(
            &format!("pair_minus_green_z_a{}", k + 1),
            size,
            n,
            zd,
            normal_two_sided_p(zd),
            md,
            sd,
            zd.abs() < 5.0,
        ));
        report.push(row(
            &format!("field_mean_z_a{}", k + 1),
            size,
            n,
            zm,
            normal_two_sided_p(zm),
            mm,
            sm,
            zm.abs() < 5.0,
        ));
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// dynkin: shifted-square isomorphism
// ---------------------------------------------------------------------------

/// `½:(phi+u)²:` must agree in law, vertex by vertex, with
/// `½:phi'²: + (T_x - u²/2)` where `T` is the boundary excursion occupation
/// at intensity `u²/2`; both sides are centred with variance
/// `½G_xx² + u²G_xx`.
pub fn dynkin_check(cfg: &ExperimentConfig) -> Result<StatReport, ExpError> {
    let g = cfg.graph.build::<f64>();
    let green = green_function(&g)?;
    let sampler = GffSampler::new(&green)?;
    let domain = ExcDomain::full(&g);
    let streams = Streams::new(cfg.seed);
    let mut report = StatReport::new("dynkin");
    for (ui, &u) in [0.5f64, 1.0, 2.0].iter().enumerate() {
        let beta = u * u / 2.0;
        let base = P_DYNKIN + 10 * ui as u32;
        let sides: Vec<Result<(Vec<f64>, Vec<f64>), ExpError>> = (0..cfg.replicas as u64)
            .into_par_iter()
            .map(|r| {
                let phi = sampler.sample(&mut streams.stream(r, base));
                let lhs: Vec<f64> = shifted_square(&phi, u, &green)?
                    .values()
                    .iter()
                    .map(|&v| v / 2.0)
                    .collect();
                let phi2 = sampler.sample(&mut streams.stream(r, base + 1));
                let wick = wick_square(&phi2, &green)?;
                let proc = sample_excursions(&domain, beta, &mut streams.stream(r, base + 2))?;
                let occ = crate::excursions::excursion_occupation(&proc, &domain);
                let rhs: Vec<f64> = wick
                    .values()
                    .iter()
                    .zip(&occ.recentered)
                    .map(|(&w, &t)| w / 2.0 + t)
                    .collect();
                Ok((lhs, rhs))
            })
            .collect();
        let sides = sides.into_iter().collect::<Result<Vec<_>, _>>()?;
        let n = sides.len();
        let dim = g.n_interior();
        let mut min_p = 1.0f64;
        let mut worst_d = 0.0;
        let mut worst_mean_z = 0.0f64;
        let mut worst_var_z = 0.0f64;
        let mut col_a = vec![0.0; n];
        let mut col_b = vec![0.0; n];
        for x in 0..dim {
            for (r, (a, b)) in sides.iter().enumerate() {
                col_a[r] = a[x];
                col_b[r] = b[x];
            }
            let (d, p) = ks_two_sample(&col_a, &col_b)?;
            if p < min_p {
                min_p = p;
                worst_d = d;
            }
            let gx = green.diag(x);
            let var_target = 0.5 * gx * gx + u * u * gx;
            for col in [&col_a, &col_b] {
                let (z, _, _) = z_of(col, 0.0);
                worst_mean_z = worst_mean_z.max(z.abs());
                worst_var_z = worst_var_z.max(variance_z(col, var_target).abs());
            }
        }
        report.push(row("ks_min_p", u, n as u64, worst_d, min_p, worst_d, 0.0, min_p > 1e-3));
        report.push(row(
            "mean_max_abs_z",
            u,
            n as u64,
            worst_mean_z,
            normal_two_sided_p(worst_mean_z),
            worst_mean_z,
            0.0,
            worst_mean_z < 5.0,
        ));
        report.push(row(
            "var_max_abs_z",
            u,
            n as u64,
            worst_var_z,
            normal_two_sided_p(worst_var_z),
            worst_var_z,
            0.0,
            worst_var_z < 5.0,
        ));
    }
    Ok(report)
}

/// z of a sample variance against a target, with the standard error taken
/// from the empirical fourth moment.
fn variance_z(samples: &[f64], target: f64) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m4 = 0.0;
    for &x in samples {
        let d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m4 /= n;
    let se = ((m4 - m2 * m2).max(0.0) / n).sqrt();
    if se > 0.0 {
        (m2 - target) / se
    } else {
        0.0
    }
}

// ---------------------------------------------------------------------------
// flagship: extracted boundary excursions are a beta = 1/4 process
// ---------------------------------------------------------------------------

const FLAG_FUNCTIONALS: [&str; 4] = ["total_lt", "near_lt", "max_len", "count"];
const BETA_STAR: f64 = 0.25;

/// Entry rate per directed boundary edge realizing one unit of excursion
/// intensity. The classical excursion measure is normalized so that a
/// Poisson process of intensity beta satisfies one-sided restriction with
/// exponent beta; in the half-plane that measure is the limit of (pi /
/// epsilon) times the entry law at height epsilon, and its occupation
/// density is pi per unit intensity. A unit-conductance lattice edge
/// realizes the 1/epsilon factor with epsilon = one lattice spacing but not
/// the pi (the per-edge-rate process has occupation density exactly 1 per
/// vertex per unit rate, by the killing identity). Comparison processes for
/// a nominal intensity beta are therefore sampled at rate pi * beta. The
/// same factor falls out of the isomorphism calibration: a mean shift u
/// corresponds to per-edge rate u^2/2 discretely and to intensity
/// u^2/(2 pi) in the restriction normalization.
const EXC_RATE_PER_BETA: f64 = std::f64::consts::PI;

struct FlagshipData {
    n_raw: u64,
    /// `ext[f]` = extracted functional f per effective replica.
    ext: [Vec<f64>; 4],
    /// `samp[b][f]` = the same functional from a freshly sampled
    /// intensity-`betas[b]` excursion process on the same domain.
    samp: Vec<[Vec<f64>; 4]>,
}

/// Functionals of an excursion collection on a realized domain: total local
/// time, local time on O-vertices adjacent to B, longest interior length and
/// the number of excursions.
fn excursion_functionals(excs: &[Excursion<f64>], near: &HashSet<usize>) -> [f64; 4] {
    let mut total = 0.0;
    let mut near_lt = 0.0;
    let mut max_len = 0usize;
    for e in excs {
        let holding = e.holding.as_ref().expect("holding times attached");
        for (&v, &t) in e.interior.iter().zip(holding) {
            total += t;
            if near.contains(&v) {
                near_lt += t;
            }
        }
        max_len = max_len.max(e.interior.len());
    }
    [total, near_lt, max_len as f64, excs.len() as f64]
}

#[allow(clippy::too_many_arguments)]
fn flagship_radius(
    radius: u32,
    alpha: f64,
    betas: &[f64],
    target_eff: usize,
    cap_raw: usize,
    tail_tol: f64,
    streams: &Streams,
    base: u32,
) -> Result<FlagshipData, ExpError> {
    let g = build_disk_graph::<f64>(radius);
    let kern = LoopKernel::auto(&g, tail_tol)?;
    let v0 = g.interior_index(Coord::new(0, 0)).expect("disk has a centre");
    let mut data = FlagshipData {
        n_raw: 0,
        ext: Default::default(),
        samp: betas.iter().map(|_| <[Vec<f64>; 4]>::default()).collect(),
    };
    let batch = 2048usize;
    let mut raw = 0usize;
    while data.ext[0].len() < target_eff && raw < cap_raw {
        let hi = (raw + batch).min(cap_raw);
        let out: Vec<Result<Option<([f64; 4], Vec<[f64; 4]>)>, ExpError>> = (raw as u64..hi as u64)
            .into_par_iter()
            .map(|r| flagship_replica(&g, &kern, v0, alpha, betas, streams, r, base))
            .collect();
        for item in out {
            if let Some((ext, samp)) = item? {
                for f in 0..4 {
                    data.ext[f].push(ext[f]);
                }
                for (b, s) in samp.iter().enumerate() {
                    for f in 0..4 {
                        data.samp[b][f].push(s[f]);
                    }
                }
            }
        }
        raw = hi;
    }
    data.n_raw = raw as u64;
    Ok(data)
}

fn flagship_replica(
    g: &DomainGraph<f64>,
    kern: &LoopKernel<f64>,
    v0: usize,
    alpha: f64,
    betas: &[f64],
    streams: &Streams,
    r: u64,
    base: u32,
) -> Result<Option<([f64; 4], Vec<[f64; 4]>)>, ExpError> {
    let soup = kern.sample_soup(alpha, &mut streams.stream(r, base));
    let occ = occupation_field(&soup, g, &mut streams.stream(r, base + 1));
    let cs = clusters_from_soup(&soup, &occ, g, &mut streams.stream(r, base + 2));
    let Some(mut dec) = boundary_excursion_decomposition(&soup, &cs, g, v0)? else {
        return Ok(None);
    };
    if dec.o_vertices.is_empty() {
        return Ok(None);
    }
    let b_set: HashSet<usize> = dec.b_vertices.iter().copied().collect();
    let domain = match ExcDomain::subdomain(g, &dec.o_vertices, &b_set) {
        Ok(d) => d,
        // O touching the graph boundary cannot host the killed comparison
        // walk; skip the replica rather than mis-measure it
        Err(ExcError::NotClosed(_)) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let near: HashSet<usize> = dec
        .o_vertices
        .iter()
        .copied()
        .filter(|&v| {
            g.neighbours(v).iter().any(|nb| match nb.to {
                crate::grid::VertexRef::Interior(w) => b_set.contains(&w),
                _ => false,
            })
        })
        .collect();
    fill_holding(&mut dec.excursions, g, &mut streams.stream(r, base + 3));
    let ext = excursion_functionals(&dec.excursions, &near);
    let mut samp = Vec::with_capacity(betas.len());
    for (bi, &beta) in betas.iter().enumerate() {
        let proc = sample_excursions(
            &domain,
            EXC_RATE_PER_BETA * beta,
            &mut streams.stream(r, base + 10 + bi as u32),
        )?;
        samp.push(excursion_functionals(&proc.excursions, &near));
    }
    Ok(Some((ext, samp)))
}

/// Paired comparison of extracted vs sampled functionals: z of the mean
/// difference, and the ratio of means with a delta-method standard error.
fn paired_ratio(ext: &[f64], samp: &[f64]) -> (f64, f64, f64) {
    let n = ext.len() as f64;
    let diffs: Vec<f64> = ext.iter().zip(samp).map(|(a, b)| a - b).collect();
    let (z, _, _) = z_of(&diffs, 0.0);
    let me = ext.iter().sum::<f64>() / n;
    let ms = samp.iter().sum::<f64>() / n;
    let mut ve = 0.0;
    let mut vs = 0.0;
    let mut cov = 0.0;
    for (&a, &b) in ext.iter().zip(samp) {
        ve += (a - me) * (a - me);
        vs += (b - ms) * (b - ms);
        cov += (a - me) * (b - ms);
    }
    ve /= n - 1.0;
    vs /= n - 1.0;
    cov /= n - 1.0;
    let ratio = me / ms;
    let var_ratio =
        (ve / (ms * ms) + me * me * vs / (ms * ms * ms * ms) - 2.0 * me * cov / (ms * ms * ms)) / n;
    (z, ratio, var_ratio.max(0.0).sqrt())
}

/// The flagship decomposition experiment: around the outermost cluster
/// surrounding the centre, the extracted boundary excursions must match a
/// freshly sampled intensity-1/4 excursion process on the same realized
/// domain, and beat the rival intensities on every functional. The deviation
/// of the total-local-time ratio from 1 must not grow when the radius
/// doubles.
pub fn flagship_check(cfg: &ExperimentConfig) -> Result<StatReport, ExpError> {
    let GraphSpec::Disk { radius } = cfg.graph else {
        return Err(ExpError::NeedsDisk("flagship"));
    };
    let mut betas = cfg.beta_candidates.clone();
    if !betas.iter().any(|&b| (b - BETA_STAR).abs() < 1e-12) {
        betas.push(BETA_STAR);
    }
    betas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let star = betas.iter().position(|&b| (b - BETA_STAR).abs() < 1e-12).unwrap();
    let streams = Streams::new(cfg.seed);

    let alpha = cfg.alpha();
    // a surrounding cluster with nonempty interior shows up in well under 1%
    // of raw replicas at these radii, so the raw cap must sit far above the
    // effective target
    let base = flagship_radius(
        radius,
        alpha,
        &betas,
        cfg.replicas,
        cfg.replicas.saturating_mul(300),
        cfg.tail_tol,
        &streams,
        P_FLAG,
    )?;
    let n_eff = base.ext[0].len();
    let mut report = StatReport::new("flagship");
    report.push(row(
        "effective_replicas",
        radius as f64,
        n_eff as u64,
        base.n_raw as f64,
        1.0,
        n_eff as f64 / base.n_raw as f64,
        0.0,
        n_eff >= cfg.replicas,
    ));

    // deviation |ratio - 1| of each (functional, beta) cell
    let mut dev = vec![[0.0f64; 4]; betas.len()];
    let mut cells = vec![[(0.0f64, 0.0f64, 0.0f64); 4]; betas.len()];
    for (b, per_beta) in base.samp.iter().enumerate() {
        for f in 0..4 {
            let (z, ratio, se) = paired_ratio(&base.ext[f], &per_beta[f]);
            dev[b][f] = (ratio - 1.0).abs();
            cells[b][f] = (z, ratio, se);
        }
    }
    let mut dev_star_se = 0.0;
    for (b, &beta) in betas.iter().enumerate() {
        for f in 0..4 {
            let (z, ratio, se) = cells[b][f];
            let pass = if b == star {
                let window = if f == 0 { ratio > 0.85 && ratio < 1.15 } else { true };
                window && (0..betas.len()).all(|o| o == star || dev[star][f] <= dev[o][f])
            } else {
                let rejected = if f == 0 { z.abs() > 3.0 } else { true };
                rejected && dev[star][f] < dev[b][f]
            };
            if b == star && f == 0 {
                dev_star_se = se;
            }
            report.push(row(
                FLAG_FUNCTIONALS[f],
                beta,
                n_eff as u64,
                z,
                normal_two_sided_p(z),
                ratio,
                se,
                pass,
            ));
        }
    }

    // doubled radius: the total-local-time deviation must not grow
    let target2 = (cfg.replicas / 20).max(200);
    let big = flagship_radius(
        2 * radius,
        alpha,
        &[BETA_STAR],
        target2,
        target2.saturating_mul(300),
        cfg.tail_tol,
        &streams,
        P_FLAG2,
    )?;
    let n2 = big.ext[0].len();
    let (_, ratio2, se2) = paired_ratio(&big.ext[0], &big.samp[0][0]);
    let dev1 = dev[star][0];
    let dev2 = (ratio2 - 1.0).abs();
    let combined = (dev_star_se * dev_star_se + se2 * se2).sqrt();
    report.push(row(
        "dev_total_lt",
        radius as f64,
        n_eff as u64,
        0.0,
        1.0,
        dev1,
        dev_star_se,
        true,
    ));
    report.push(row(
        "dev_total_lt",
        (2 * radius) as f64,
        n2 as u64,
        if combined > 0.0 { (dev2 - dev1) / combined } else { 0.0 },
        1.0,
        dev2,
        se2,
        n2 >= target2 && dev2 <= dev1 + 3.0 * combined,
    ));
    Ok(report)
}

// ---------------------------------------------------------------------------
// interior-soup: loops inside the cluster boundary form a restricted soup
// ---------------------------------------------------------------------------

/// Conditionally on the outermost cluster around the centre, the soup loops
/// staying in O must look like an independent soup restricted to O. Paired
/// against a fresh full-graph soup filtered to O, plus the exact mean
/// `alpha * sum_x G_O(x,x)` for the occupation.
pub fn interior_soup_check(cfg: &ExperimentConfig) -> Result<StatReport, ExpError> {
    let GraphSpec::Disk { radius } = cfg.graph else {
        return Err(ExpError::NeedsDisk("interior-soup"));
    };
    let g = build_disk_graph::<f64>(radius);
    let kern = LoopKernel::auto(&g, cfg.tail_tol)?;
    let v0 = g.interior_index(Coord::new(0, 0)).expect("disk has a centre");
    let streams = Streams::new(cfg.seed);
    let alpha = cfg.alpha();
    type Obs = ([f64; 4], [f64; 4], f64);
    let obs: Vec<Result<Option<Obs>, ExpError>> = (0..cfg.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let soup = kern.sample_soup(alpha, &mut streams.stream(r, P_INTERIOR));
            let occ = occupation_field(&soup, &g, &mut streams.stream(r, P_INTERIOR + 1));
            let cs = clusters_from_soup(&soup, &occ, &g, &mut streams.stream(r, P_INTERIOR + 2));
            let Some(dec) = boundary_excursion_decomposition(&soup, &cs, &g, v0)? else {
                return Ok(None);
            };
            if dec.o_vertices.is_empty() {
                return Ok(None);
            }
            let o_set: HashSet<usize> = dec.o_vertices.iter().copied().collect();
            let inner = loop_functionals(
                &dec.interior_loops,
                &g,
                &dec.o_vertices,
                alpha,
                &mut streams.stream(r, P_INTERIOR + 3),
            );
            let fresh = kern.sample_soup(alpha, &mut streams.stream(r, P_INTERIOR + 4));
            let kept: Vec<_> = fresh
                .loops
                .iter()
                .filter(|lp| lp.vertices.iter().all(|v| o_set.contains(v)))
                .cloned()
                .collect();
            let comparison = loop_functionals(
                &kept,
                &g,
                &dec.o_vertices,
                alpha,
                &mut streams.stream(r, P_INTERIOR + 5),
            );
            let go = green_function_on_subdomain(&g, &dec.o_vertices)?;
            let diag_sum: f64 = (0..dec.o_vertices.len()).map(|i| go.diag(i)).sum();
            Ok(Some((inner, comparison, alpha * diag_sum)))
        })
        .collect();
    let obs: Vec<Obs> = obs
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    let n = obs.len() as u64;
    let mut report = StatReport::new("interior-soup");
    for (f, name) in ["count_len2", "count_long", "visits", "occ_total"].iter().enumerate() {
        let diffs: Vec<f64> = obs.iter().map(|(a, b, _)| a[f] - b[f]).collect();
        let (z, mean, se) = z_of(&diffs, 0.0);
        report.push(row(
            &format!("{name}_paired_z"),
            radius as f64,
            n,
            z,
            normal_two_sided_p(z),
            mean,
            se,
            z.abs() < 5.0,
        ));
    }
    let diffs: Vec<f64> = obs.iter().map(|(a, _, t)| a[3] - t).collect();
    let (z, mean, se) = z_of(&diffs, 0.0);
    report.push(row(
        "occ_vs_green_z",
        radius as f64,
        n,
        z,
        normal_two_sided_p(z),
        mean,
        se,
        z.abs() < 5.0,
    ));
    Ok(report)
}

/// Functionals of a loop collection over the vertex set `o`: number of
/// length-2 loops, number of longer loops, total visits to `o` and the
/// continuous occupation total (visit counts decorated with the usual
/// `Gamma(N + alpha, 1)/kappa` local times).
fn loop_functionals<R: rand::Rng>(
    loops: &[crate::loopsoup::RootedLoop<f64>],
    g: &DomainGraph<f64>,
    o: &[usize],
    alpha: f64,
    rng: &mut R,
) -> [f64; 4] {
    let mut len2 = 0.0;
    let mut long = 0.0;
    let mut counts: std::collections::HashMap<usize, u64> =
        o.iter().map(|&v| (v, 0u64)).collect();
    let mut visits = 0.0;
    for lp in loops {
        if lp.vertices.len() == 2 {
            len2 += 1.0;
        } else {
            long += 1.0;
        }
        for &v in &lp.vertices {
            *counts.get_mut(&v).expect("loop stays in O") += 1;
            visits += 1.0;
        }
    }
    let mut occ_total = 0.0;
    for &v in o {
        let n = counts[&v] as f64;
        occ_total += <f64 as crate::scalar::Scalar>::gamma(n + alpha, 1.0, rng) / g.kappa(v);
    }
    [len2, long, visits, occ_total]
}

// ---------------------------------------------------------------------------
// independence: disjoint clusters decouple, and the interior forgets shape
// ---------------------------------------------------------------------------

/// Two gates: (i) when disjoint clusters surround two distant marked
/// vertices, their interior occupation totals are uncorrelated; (ii) the
/// extracted excursion functionals, normalized by the domain size, are
/// uncorrelated with the domain size itself.
pub fn independence_check(cfg: &ExperimentConfig) -> Result<StatReport, ExpError> {
    let GraphSpec::Disk { radius } = cfg.graph else {
        return Err(ExpError::NeedsDisk("independence"));
    };
    let g = build_disk_graph::<f64>(radius);
    let kern = LoopKernel::auto(&g, cfg.tail_tol)?;
    // markers three quarters of a diameter apart: far enough that the two
    // surrounding clusters are distinct rather than one cluster wrapping both
    let off = ((3 * radius) / 8).max(1) as i32;
    let idx = |x: i32, y: i32| g.interior_index(Coord::new(x, y)).expect("marker is interior");
    let (v1, v2, v0) = (idx(-off, 0), idx(off, 0), idx(0, 0));
    let streams = Streams::new(cfg.seed);
    let alpha = cfg.alpha();

    // both conditioning events are rare (two disjoint surrounding clusters in
    // one replica especially so), so sample in batches until the targets are
    // met or the raw cap runs out
    let cross_target = 20usize;
    let proxy_target = (cfg.replicas / 200).max(100);
    let cap = cfg.replicas.saturating_mul(40);
    let batch = 4096usize;
    let mut raw = 0usize;
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    let mut proxies: Vec<(f64, f64, f64)> = Vec::new();
    type Obs = (Option<(f64, f64)>, Option<(f64, f64, f64)>);
    while raw < cap && (pairs.len() < cross_target || proxies.len() < proxy_target) {
        let hi = (raw + batch).min(cap);
        let out: Vec<Result<Obs, ExpError>> = (raw as u64..hi as u64)
            .into_par_iter()
            .map(|r| {
                let soup = kern.sample_soup(alpha, &mut streams.stream(r, P_INDEP));
                let occ = occupation_field(&soup, &g, &mut streams.stream(r, P_INDEP + 1));
                let cs = clusters_from_soup(&soup, &occ, &g, &mut streams.stream(r, P_INDEP + 2));
                let pair = cross_cluster_pair(&cs, &g, &occ, v1, v2)?;
                let proxy = match boundary_excursion_decomposition(&soup, &cs, &g, v0)? {
                    Some(mut dec) if !dec.o_vertices.is_empty() => {
                        fill_holding(&mut dec.excursions, &g, &mut streams.stream(r, P_INDEP + 3));
                        let total: f64 = dec
                            .excursions
                            .iter()
                            .flat_map(|e| e.holding.as_ref().unwrap())
                            .sum();
                        let area = dec.o_vertices.len() as f64;
                        // boundary length as the number of boundary-to-interior
                        // edges, the unit-conductance entry rate of the domain
                        let o_set: HashSet<usize> = dec.o_vertices.iter().copied().collect();
                        let blen: usize = dec
                            .b_vertices
                            .iter()
                            .map(|&b| {
                                g.neighbours(b)
                                    .iter()
                                    .filter(|nb| match nb.to {
                                        crate::grid::VertexRef::Interior(w) => o_set.contains(&w),
                                        _ => false,
                                    })
                                    .count()
                            })
                            .sum();
                        Some((total / area, dec.excursions.len() as f64 / blen.max(1) as f64, area))
                    }
                    _ => None,
                };
                Ok((pair, proxy))
            })
            .collect();
        for item in out {
            let (pair, proxy) = item?;
            if let Some(p) = pair {
                pairs.push(p);
            }
            if let Some(q) = proxy {
                proxies.push(q);
            }
        }
        raw = hi;
    }

    let mut report = StatReport::new("independence");
    let xs: Vec<f64> = pairs.iter().map(|&(x, _)| x).collect();
    let ys: Vec<f64> = pairs.iter().map(|&(_, y)| y).collect();
    let mut cross = corr_row("cross_cluster_corr", radius as f64, &xs, &ys);
    // a correlation from a handful of joint events says nothing; demand a
    // minimal sample before calling the gate
    cross.pass = cross.pass && pairs.len() >= 10;
    report.push(cross);
    let lt: Vec<f64> = proxies.iter().map(|&(t, _, _)| t).collect();
    let cnt: Vec<f64> = proxies.iter().map(|&(_, c, _)| c).collect();
    let area: Vec<f64> = proxies.iter().map(|&(_, _, a)| a).collect();
    report.push(corr_row("proxy_lt_corr", radius as f64, &lt, &area));
    report.push(corr_row("proxy_count_corr", radius as f64, &cnt, &area));
    Ok(report)
}

/// Interior occupation totals of the two surrounded regions, when disjoint
/// clusters surround both markers and the regions do not overlap.
fn cross_cluster_pair(
    cs: &ClusterSet,
    g: &DomainGraph<f64>,
    occ: &OccupationField<f64>,
    v1: usize,
    v2: usize,
) -> Result<Option<(f64, f64)>, ExpError> {
    let Some((c1, t1)) = outermost_cluster_around(cs, g, v1)? else { return Ok(None) };
    let Some((c2, t2)) = outermost_cluster_around(cs, g, v2)? else { return Ok(None) };
    if c1 == c2 {
        return Ok(None);
    }
    let in1: HashSet<usize> = t1.inside.iter().copied().collect();
    if t2.inside.iter().any(|v| in1.contains(v)) {
        return Ok(None);
    }
    let b1: HashSet<usize> = t1.boundary_vertices.iter().copied().collect();
    let b2: HashSet<usize> = t2.boundary_vertices.iter().copied().collect();
    let sum = |trace: &crate::cable::BoundaryTrace, b: &HashSet<usize>| -> f64 {
        trace
            .inside
            .iter()
            .filter(|v| !b.contains(v))
            .map(|&v| occ.local_time[v])
            .sum()
    };
    Ok(Some((sum(&t1, &b1), sum(&t2, &b2))))
}

fn corr_row(name: &str, parameter: f64, xs: &[f64], ys: &[f64]) -> ReportRow {
    match correlation_test(xs, ys) {
        Ok((r, z, p)) => {
            let se = 1.0 / ((xs.len() as f64 - 3.0).max(1.0)).sqrt();
            row(name, parameter, xs.len() as u64, z, p, r, se, z.abs() < 5.0)
        }
        Err(_) => row(name, parameter, xs.len() as u64, f64::NAN, f64::NAN, f64::NAN, f64::NAN, false),
    }
}

// ---------------------------------------------------------------------------
