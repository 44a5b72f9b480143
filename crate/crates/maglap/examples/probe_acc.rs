use maglap::cli::omega_test_fixture;
use maglap::mfs::{self, MfsParams};

fn main() {
    let d = omega_test_fixture();
    let coarse = MfsParams { m_boundary: 140, m_interior: 60, delta: 0.1, ..MfsParams::default() };
    let t0 = std::time::Instant::now();
    let (_, op) = mfs::build_operator(&d, 6.0, &coarse).unwrap();
    println!("build coarse: {:.2}s", t0.elapsed().as_secs_f64());
    let t0 = std::time::Instant::now();
    let s = op.sigma(8.0).unwrap();
    println!("coarse sigma eval: {:.3}s (sigma {s:.2e})", t0.elapsed().as_secs_f64());
    let fine = MfsParams { m_boundary: 300, m_interior: 100, ..coarse.clone() };
    let t0 = std::time::Instant::now();
    let (_, opf) = mfs::build_operator(&d, 6.0, &fine).unwrap();
    println!("build fine: {:.2}s", t0.elapsed().as_secs_f64());
    let t0 = std::time::Instant::now();
    let s = opf.sigma(8.0).unwrap();
    println!("fine sigma eval: {:.3}s (sigma {s:.2e})", t0.elapsed().as_secs_f64());
    let t0 = std::time::Instant::now();
    let r = mfs::solve(&d, 6.0, 4, &coarse, None).unwrap();
    println!("coarse solve: {:.2}s, scan pts {}", t0.elapsed().as_secs_f64(), r.scan.lambdas.len());
    for p in &r.pairs { println!("  lambda {:.10} sigma {:.1e} mult {}", p.lambda, p.sigma, p.multiplicity); }
}
