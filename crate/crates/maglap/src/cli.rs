//! Command-line driver: single solves, optimization campaigns, disk-union
//! curves, the disconnected-minimizer combiner, and benchmark reproduction.
//!
//! All commands are deterministic given their flags and seeds. Outputs are
//! CSV for curves and scans, JSON for domains and run records. Exit codes:
//! 0 success, 2 validation error, 3 numerical failure, 4 benchmark
//! tolerance failure.

use crate::diskspec;
use crate::disksopt::{self, MinimizerCurve};
use crate::error::{Error, Result};
use crate::geometry::FourierDomain;
use crate::mfs::{self, MfsParams};
use crate::optimizer::{self, DescentConfig};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use std::io::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "maglap",
    about = "Eigenvalues and eigenvalue-minimizing shapes of the planar magnetic Dirichlet Laplacian"
)]
pub struct Cli {
    /// JSON config file with solver/descent parameter sections; command
    /// line flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Eigenvalues of a disk by root search on the transcendental equation.
    DiskSpectrum(DiskSpectrumArgs),
    /// Eigenvalues of a Fourier-parametrized domain by the MFS.
    Solve(SolveArgs),
    /// Minimize lambda_n over unit-area domains by gradient descent.
    Optimize(OptimizeArgs),
    /// Auxiliary and envelope curves of the disjoint-disks problem.
    DiskUnions(DiskUnionsArgs),
    /// Disconnected-minimizer combination from tabulated curves.
    WolfKeller(WolfKellerArgs),
    /// Reproduce the reference benchmarks and report pass/fail.
    Benchmark(BenchmarkArgs),
}

#[derive(Args)]
pub struct DiskSpectrumArgs {
    #[arg(long)]
    pub b: f64,
    /// How many eigenvalues to compute.
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    /// Disk radius; defaults to the unit-area disk.
    #[arg(long, default_value_t = diskspec::UNIT_AREA_RADIUS)]
    pub radius: f64,
    /// Write a CSV (n, l, k, lambda) instead of printing.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct SolveArgs {
    /// JSON file with the Fourier domain {"N", "cx", "cy"}.
    #[arg(long)]
    pub domain: PathBuf,
    #[arg(long)]
    pub b: f64,
    /// How many eigenvalues to compute.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long)]
    pub m_boundary: Option<usize>,
    #[arg(long)]
    pub m_interior: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Refine scan minima with a second operator of this resolution.
    #[arg(long)]
    pub refine: Option<usize>,
    /// Write results as JSON instead of printing.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct OptimizeArgs {
    /// Index of the eigenvalue to minimize.
    #[arg(long)]
    pub n: usize,
    /// Field strength; repeat for a continuation sweep.
    #[arg(long, required = true)]
    pub b: Vec<f64>,
    /// Number of random starts (single field strength only).
    #[arg(long, default_value_t = 5)]
    pub starts: usize,
    /// Perturbation amplitude of the random starts.
    #[arg(long, default_value_t = 0.15)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Start from this domain file instead of perturbed circles.
    #[arg(long)]
    pub domain: Option<PathBuf>,
    /// Write all run records as JSON.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write a (b, objective, status, iterations) CSV for sweeps.
    #[arg(long)]
    pub sweep_csv: Option<PathBuf>,
}

#[derive(Args)]
pub struct DiskUnionsArgs {
    #[arg(long)]
    pub n: usize,
    /// Cap on the number of disks (defaults to n, the unbounded cap).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub b_start: f64,
    #[arg(long, default_value_t = 80.0)]
    pub b_end: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b_step: f64,
    /// Output CSV (b, aux_1..aux_n, envelope, argmin_k).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct WolfKellerArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub b: f64,
    /// Curve CSVs (b, value) for indices 1..n-1, in order. Missing
    /// indices are filled with disk-union envelopes.
    #[arg(long)]
    pub curve: Vec<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct BenchmarkArgs {
    /// Boundary resolution of the refinement operator.
    #[arg(long, default_value_t = 300)]
    pub m_boundary: usize,
}

// optional config file sections; every field falls back to the default
#[derive(Default, Deserialize)]
struct FileConfig {
    #[serde(default)]
    mfs: Option<MfsParams>,
    #[serde(default)]
    descent: Option<DescentConfig>,
}

fn load_config(path: Option<&Path>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => Ok(serde_json::from_str(&std::fs::read_to_string(p)?)?),
    }
}

fn load_domain(path: &Path) -> Result<FourierDomain> {
    let d: FourierDomain = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    if d.cx.len() != 2 * d.n_harmonics || d.cy.len() != 2 * d.n_harmonics {
        return Err(Error::Invalid(format!(
            "domain file {}: coefficient vectors must have length 2N",
            path.display()
        )));
    }
    Ok(d)
}

fn write_or_print(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => {
            std::fs::write(p, content)?;
            Ok(())
        }
        None => {
            print!("{content}");
            std::io::stdout().flush()?;
            Ok(())
        }
    }
}

/// Parse arguments, dispatch, and return the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Invalid(_) | Error::Inadmissible(_) | Error::Io(_) | Error::Serde(_) => 2,
                Error::Domain(_) | Error::Numerical(_) | Error::MissedEigenvalues(_) => 3,
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let cfg = load_config(cli.config.as_deref())?;
    match &cli.command {
        Command::DiskSpectrum(a) => cmd_disk_spectrum(a),
        Command::Solve(a) => cmd_solve(a, &cfg),
        Command::Optimize(a) => cmd_optimize(a, &cfg),
        Command::DiskUnions(a) => cmd_disk_unions(a),
        Command::WolfKeller(a) => cmd_wolf_keller(a),
        Command::Benchmark(a) => cmd_benchmark(a),
    }
}

fn cmd_disk_spectrum(a: &DiskSpectrumArgs) -> Result<i32> {
    if !(a.b > 0.0) || !(a.radius > 0.0) || a.n == 0 {
        return Err(Error::Invalid("need b > 0, radius > 0, n >= 1".into()));
    }
    let spectrum = diskspec::disk_spectrum(a.n, a.b, a.radius)?;
    let mut out = String::from("n,l,k,lambda\n");
    for (i, e) in spectrum.iter().enumerate() {
        out.push_str(&format!("{},{},{},{:.14e}\n", i + 1, e.l, e.k, e.lambda));
    }
    write_or_print(a.output.as_deref(), &out)?;
    Ok(0)
}

fn cmd_solve(a: &SolveArgs, cfg: &FileConfig) -> Result<i32> {
    let domain = load_domain(&a.domain)?;
    let mut params = cfg.mfs.clone().unwrap_or_default();
    if let Some(m) = a.m_boundary {
        params.m_boundary = m;
    }
    if let Some(m) = a.m_interior {
        params.m_interior = m;
    }
    if let Some(d) = a.delta {
        params.delta = d;
    }
    if let Some(s) = a.seed {
        params.seed = s;
    }
    let refine = a.refine.map(|m| MfsParams {
        m_boundary: m,
        ..params.clone()
    });
    let result = mfs::solve(&domain, a.b, a.n, &params, refine.as_ref())?;
    let rows: Vec<serde_json::Value> = result
        .pairs
        .iter()
        .map(|p| {
            serde_json::json!({
                "lambda": p.lambda,
                "sigma": p.sigma,
                "multiplicity": p.multiplicity,
                "near_landau": p.near_landau,
            })
        })
        .collect();
    let doc = serde_json::json!({ "b": a.b, "eigenvalues": rows });
    write_or_print(
        a.output.as_deref(),
        &format!("{}\n", serde_json::to_string_pretty(&doc)?),
    )?;
    Ok(0)
}

fn cmd_optimize(a: &OptimizeArgs, cfg: &FileConfig) -> Result<i32> {
    let mut descent = cfg.descent.clone().unwrap_or_default();
    if let Some(m) = a.max_iters {
        descent.max_iters = m;
    }
    let records = if a.b.len() == 1 {
        let b = a.b[0];
        match &a.domain {
            Some(path) => vec![optimizer::descend(&load_domain(path)?, a.n, b, &descent)?],
            None => optimizer::multi_start(a.n, b, a.starts, a.amplitude, a.seed, &descent)?,
        }
    } else {
        let start = match &a.domain {
            Some(path) => load_domain(path)?,
            None => optimizer::perturbed_circle(descent.n_harmonics, a.amplitude, a.seed),
        };
        optimizer::continuation_sweep(&start, a.n, &a.b, &descent)?
    };
    for r in &records {
        println!(
            "b={:<8} J={:.10} status={:?} iters={} ({:.1}s)",
            r.b, r.objective, r.status, r.iterations, r.seconds
        );
    }
    if let Some(path) = &a.sweep_csv {
        let mut csv = String::from("b,objective,status,iterations\n");
        for r in &records {
            csv.push_str(&format!(
                "{},{:.12e},{:?},{}\n",
                r.b, r.objective, r.status, r.iterations
            ));
        }
        std::fs::write(path, csv)?;
    }
    if let Some(path) = &a.output {
        std::fs::write(path, serde_json::to_string_pretty(&records)?)?;
    }
    Ok(0)
}

fn cmd_disk_unions(a: &DiskUnionsArgs) -> Result<i32> {
    if a.n == 0 || !(a.b_step > 0.0) || a.b_end < a.b_start {
        return Err(Error::Invalid("need n >= 1 and a forward b grid".into()));
    }
    let mut grid = Vec::new();
    let mut b = a.b_start;
    while b <= a.b_end + 1e-9 {
        grid.push(b);
        b += a.b_step;
    }
    let points = disksopt::union_curve(a.n, &grid)?;
    let k_cap = a.k.unwrap_or(a.n).min(a.n);
    let mut out = String::from("b");
    for k in 1..=a.n {
        out.push_str(&format!(",aux_{k}"));
    }
    out.push_str(",envelope,argmin_k\n");
    for p in &points {
        out.push_str(&format!("{}", p.b));
        for v in &p.aux {
            out.push_str(&format!(",{:.12e}", v));
        }
        // envelope restricted to the requested cap
        let (mut env, mut argk) = (f64::INFINITY, 1);
        for k in 1..=k_cap {
            if p.aux[k - 1] < env {
                env = p.aux[k - 1];
                argk = k;
            }
        }
        out.push_str(&format!(",{:.12e},{}\n", env, argk));
    }
    write_or_print(a.output.as_deref(), &out)?;
    Ok(0)
}

fn read_curve(path: &Path) -> Result<MinimizerCurve> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    let mut b = Vec::new();
    let mut value = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        if rec.len() < 2 {
            return Err(Error::Invalid(format!(
                "{}: curve rows need (b, value)",
                path.display()
            )));
        }
        b.push(rec[0].trim().parse::<f64>().map_err(|e| Error::Invalid(e.to_string()))?);
        value.push(rec[1].trim().parse::<f64>().map_err(|e| Error::Invalid(e.to_string()))?);
    }
    Ok(MinimizerCurve { b, value })
}

fn cmd_wolf_keller(a: &WolfKellerArgs) -> Result<i32> {
    if a.n < 2 {
        return Err(Error::Invalid("combination needs n >= 2".into()));
    }
    let mut curves = Vec::new();
    for i in 1..a.n {
        if let Some(path) = a.curve.get(i - 1) {
            curves.push(read_curve(path)?);
        } else {
            // fall back to the disk-union envelope on the standard grid
            let grid: Vec<f64> = (1..)
                .map(|j| 0.2 * j as f64)
                .take_while(|&s| s <= a.b + 0.2)
                .collect();
            curves.push(MinimizerCurve::from_disk_unions(i, &grid)?);
        }
    }
    let split = disksopt::wolf_keller_combine(&curves, a.n, a.b)?;
    let doc = serde_json::to_string_pretty(&split)?;
    write_or_print(a.output.as_deref(), &format!("{doc}\n"))?;
    Ok(0)
}

#[derive(Deserialize)]
struct DiskReference {
    entries: Vec<DiskReferenceEntry>,
}

#[derive(Deserialize)]
struct DiskReferenceEntry {
    b: f64,
    eigenvalues: Vec<f64>,
}

#[derive(Deserialize)]
struct DomainReference {
    b: f64,
    eigenvalues: Vec<f64>,
}

/// The shipped reference domain used by the second benchmark suite.
pub fn omega_test_fixture() -> FourierDomain {
    serde_json::from_str(include_str!("../fixtures/omega_test.json"))
        .expect("fixture parses")
}

/// Reference disk eigenvalues shipped with the crate.
pub fn disk_reference_fixture() -> Vec<(f64, Vec<f64>)> {
    let r: DiskReference = serde_json::from_str(include_str!("../fixtures/disk_reference.json"))
        .expect("fixture parses");
    r.entries.into_iter().map(|e| (e.b, e.eigenvalues)).collect()
}

/// Reference eigenvalues of the test domain shipped with the crate.
pub fn omega_test_reference_fixture() -> (f64, Vec<f64>) {
    let r: DomainReference =
        serde_json::from_str(include_str!("../fixtures/omega_test_reference.json"))
            .expect("fixture parses");
    (r.b, r.eigenvalues)
}

fn significant_digits(got: f64, want: f64) -> f64 {
    let rel = ((got - want) / want).abs();
    if rel == 0.0 {
        16.0
    } else {
        -rel.log10()
    }
}

fn cmd_benchmark(a: &BenchmarkArgs) -> Result<i32> {
    let mut failed = false;
    let disk = FourierDomain::circle(4, diskspec::UNIT_AREA_RADIUS);

    // suite 1: MFS vs root search on the unit-area disk
    println!("disk suite: MFS (m_B={}, delta=0.08) vs root search", a.m_boundary);
    let coarse = MfsParams {
        m_boundary: 120,
        m_interior: 60,
        delta: 0.08,
        ..MfsParams::default()
    };
    let refine = MfsParams {
        m_boundary: a.m_boundary,
        m_interior: 100,
        ..coarse.clone()
    };
    for (b, reference) in disk_reference_fixture() {
        let t0 = std::time::Instant::now();
        let result = mfs::solve(&disk, b, reference.len(), &coarse, Some(&refine))?;
        let mut lambdas = Vec::new();
        for p in &result.pairs {
            for _ in 0..p.multiplicity {
                lambdas.push(p.lambda);
            }
        }
        for (i, (&got, &want)) in lambdas.iter().zip(reference.iter()).enumerate() {
            let digits = significant_digits(got, want);
            let ok = digits >= 10.0;
            failed |= !ok;
            println!(
                "  b={b:<6} lambda_{}: {got:.14} vs {want:.14} ({digits:.1} digits) {}",
                i + 1,
                if ok { "ok" } else { "FAIL" }
            );
        }
        println!("  b={b:<6} solved in {:.1}s", t0.elapsed().as_secs_f64());
    }

    // suite 2: MFS on the non-circular test domain
    println!("test-domain suite: MFS (m_B=300, delta=0.1)");
    let (b, reference) = omega_test_reference_fixture();
    let domain = omega_test_fixture();
    let coarse2 = MfsParams {
        m_boundary: 140,
        m_interior: 60,
        delta: 0.1,
        ..MfsParams::default()
    };
    let refine2 = MfsParams {
        m_boundary: 300,
        m_interior: 100,
        ..coarse2.clone()
    };
    let result = mfs::solve(&domain, b, reference.len(), &coarse2, Some(&refine2))?;
    let mut lambdas = Vec::new();
    for p in &result.pairs {
        for _ in 0..p.multiplicity {
            lambdas.push(p.lambda);
        }
    }
    for (i, (&got, &want)) in lambdas.iter().zip(reference.iter()).enumerate() {
        let digits = significant_digits(got, want);
        // the reference is printed to 10 digits; demand at least 7
        let ok = digits >= 7.0;
        failed |= !ok;
        println!(
            "  lambda_{}: {got:.10} vs {want:.8} ({digits:.1} digits) {}",
            i + 1,
            if ok { "ok" } else { "FAIL" }
        );
    }

    if failed {
        println!("benchmark: FAIL");
        Ok(4)
    } else {
        println!("benchmark: ok");
        Ok(0)
    }
}
