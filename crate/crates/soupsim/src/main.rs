//! Experiment runner: verification checks, constants, parameter conversion
//! and artifact dumps. Exit code 0 means every statistical gate passed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use soupsim::cable::{clusters_from_soup, gff_from_soup};
use soupsim::config::{ExperimentConfig, GraphSpec};
use soupsim::constants;
use soupsim::excursions::boundary_excursion_decomposition;
use soupsim::experiments::{run_check, CHECK_IDS};
use soupsim::grid::{green_function, Coord};
use soupsim::loopsoup::{occupation_field, LoopKernel};
use soupsim::stats::Streams;

#[derive(Parser)]
#[command(
    name = "soupsim",
    about = "Lattice loop soups, free fields, cluster couplings and excursion decompositions",
    version
)]
struct Cli {
    /// TOML configuration file; flags below override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for all random streams.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Replica count for statistical gates.
    #[arg(long, global = true)]
    replicas: Option<usize>,
    /// Directory for report and artifact files.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Disk radius (replaces the configured graph with a disk).
    #[arg(long, global = true)]
    radius: Option<u32>,
    /// Central charge c in (0, 1]; the soup intensity is alpha = c/2.
    #[arg(long, global = true)]
    c: Option<f64>,
    /// Worker threads (results are identical for any value).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one verification experiment; exit 0 iff all its gates pass.
    Check {
        /// One of: green, gff-cov, lejan, lupu-consistency, prop-p1,
        /// lemma-lt, dynkin, flagship, interior-soup, independence.
        id: String,
    },
    /// Print the closed-form constants with their quadrature cross-checks.
    Constants,
    /// Convert central charge c to the SLE parameter kappa (or back).
    Kappa {
        value: f64,
        /// Treat the value as kappa and convert back to c.
        #[arg(long)]
        inverse: bool,
    },
    /// Sample one soup and dump the derived artifacts to --out-dir.
    Sample,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            ExperimentConfig::from_toml(&text).map_err(|e| e.to_string())?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(replicas) = cli.replicas {
        cfg.replicas = replicas;
    }
    if let Some(radius) = cli.radius {
        cfg.graph = GraphSpec::Disk { radius };
    }
    if let Some(c) = cli.c {
        cfg.c = c;
    }
    if let Some(dir) = &cli.out_dir {
        cfg.out_dir = Some(dir.clone());
    }
    if let Some(threads) = cli.threads {
        cfg.threads = Some(threads);
    }
    cfg.validate().map_err(|e| e.to_string())?;
    if let Some(threads) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| format!("thread pool: {e}"))?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool, String> {
    match &cli.cmd {
        Cmd::Check { id } => {
            let id = id.clone();
            let cfg = load_config(&cli)?;
            cmd_check(&id, &cfg)
        }
        Cmd::Constants => {
            cmd_constants();
            Ok(true)
        }
        Cmd::Kappa { value, inverse } => cmd_kappa(*value, *inverse),
        Cmd::Sample => {
            let cfg = load_config(&cli)?;
            cmd_sample(&cfg)?;
            Ok(true)
        }
    }
}

fn cmd_check(id: &str, cfg: &ExperimentConfig) -> Result<bool, String> {
    if !CHECK_IDS.contains(&id) {
        return Err(format!(
            "unknown check id `{id}`; expected one of {}",
            CHECK_IDS.join(", ")
        ));
    }
    println!("{}", cfg.header());
    let report = run_check(id, cfg).map_err(|e| e.to_string())?;
    for r in &report.rows {
        println!(
            "{} {:<28} param={:<8} n={:<8} stat={:<12.6} p={:<10.3e} est={:<12.6} se={:.3e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.functional,
            r.parameter,
            r.n_effective,
            r.statistic,
            r.p_value,
            r.estimate,
            r.std_error,
        );
    }
    let all = report.all_pass();
    println!("{}: {}", report.experiment, if all { "PASS" } else { "FAIL" });
    if let Some(dir) = &cfg.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
        std::fs::write(dir.join(format!("{id}.csv")), report.to_csv())
            .map_err(|e| e.to_string())?;
        std::fs::write(dir.join(format!("{id}.json")), report.to_json())
            .map_err(|e| e.to_string())?;
    }
    Ok(all)
}

fn cmd_constants() {
    let quad = constants::excursion_mass_quadrature(2000);
    let target = (9.0f64 / 8.0).ln();
    println!("excursion_mass_quadrature = {quad:.9} (target ln(9/8) = {target:.9}, err = {:.3e})", (quad - target).abs());
    let avoid = constants::avoidance_probability(2000);
    println!("avoidance_probability     = {avoid:.9} (target 8/9 = {:.9}, err = {:.3e})", 8.0 / 9.0, (avoid - 8.0 / 9.0).abs());
    println!("lambda                    = {:.12} (sqrt(pi/8))", constants::lambda());
    println!("beta                      = {} (exactly 1/4)", constants::beta_flagship());
    println!("k                         = {:.12} (1/(2 pi))", constants::k_constant());
    println!("kappa(c = 1)              = {}", constants::kappa_of_c(1.0).unwrap());
    println!("kappa(c = 1/2)            = {}", constants::kappa_of_c(0.5).unwrap());
}

fn cmd_kappa(value: f64, inverse: bool) -> Result<bool, String> {
    if inverse {
        let c = constants::c_of_kappa(value).map_err(|e| e.to_string())?;
        println!("kappa = {value} -> c = {c}");
    } else {
        let kappa = constants::kappa_of_c(value).map_err(|e| e.to_string())?;
        println!("c = {value} -> kappa = {kappa} (alpha = c/2 = {})", value / 2.0);
    }
    Ok(true)
}

fn cmd_sample(cfg: &ExperimentConfig) -> Result<(), String> {
    let dir = cfg
        .out_dir
        .clone()
        .ok_or_else(|| "sample requires --out-dir".to_string())?;
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    println!("{}", cfg.header());

    let g = cfg.graph.build::<f64>();
    let green = green_function(&g).map_err(|e| e.to_string())?;
    let kern = LoopKernel::auto(&g, cfg.tail_tol).map_err(|e| e.to_string())?;
    let streams = Streams::new(cfg.seed);
    let soup = kern.sample_soup(cfg.alpha(), &mut streams.stream(0, 1));
    let occ = occupation_field(&soup, &g, &mut streams.stream(0, 2));
    let clusters = clusters_from_soup(&soup, &occ, &g, &mut streams.stream(0, 3));

    let write = |name: &str, body: String| -> Result<(), String> {
        std::fs::write(dir.join(name), body).map_err(|e| e.to_string())
    };
    write(
        "graph.json",
        serde_json::to_string(&g.to_document()).map_err(|e| e.to_string())?,
    )?;
    write("soup.txt", soup.to_lines())?;
    let mut occ_csv = String::from("x,y,count,local_time\n");
    for v in 0..g.n_interior() {
        let p = g.interior_coord(v);
        occ_csv.push_str(&format!("{},{},{},{}\n", p.x, p.y, occ.counts[v], occ.local_time[v]));
    }
    write("occupation.csv", occ_csv)?;
    write("clusters.json", clusters.to_json(&g))?;
    if (cfg.alpha() - 0.5).abs() < 1e-12 {
        let phi = gff_from_soup(&occ, &clusters, &mut streams.stream(0, 4))
            .map_err(|e| e.to_string())?;
        write("field.csv", phi.to_csv(&g))?;
    }
    if let Some(v0) = g.interior_index(Coord::new(0, 0)) {
        if let Some(dec) = boundary_excursion_decomposition(&soup, &clusters, &g, v0)
            .map_err(|e| e.to_string())?
        {
            write("trace.json", dec.trace.to_json())?;
        }
    }
    println!(
        "wrote artifacts for {} loops, {} clusters to {}",
        soup.loops.len(),
        clusters.n_components(),
        dir.display()
    );
    println!("diagnostics: green dim = {}, loop tail mass = {:.3e}", green.dim(), kern.tail_mass());
    Ok(())
}
