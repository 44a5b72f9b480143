//! Gradient descent on Fourier coefficients minimizing the scale-invariant
//! objective J(c) = |Omega_c| lambda_n(Omega_c, B / |Omega_c|).
//!
//! Each iteration normalizes the domain to unit area, computes the first
//! n+1 eigenvalues, detects whether lambda_n sits in a cluster of nearby
//! eigenvalues (in which case a common descent direction for the whole
//! cluster replaces the plain gradient), and line-searches the step width.
//! Steps producing self-intersecting boundaries or curvature spikes beyond
//! what the source distance can resolve are rejected; when no admissible
//! improving step remains the run stops with a status saying why.

use crate::error::{Error, Result};
use crate::geometry::FourierDomain;
use crate::mfs::{self, build_operator, EigenPair, MfsParams};
use crate::shapegrad::{cluster_direction, objective_gradient, QuadConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Configuration of the descent.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DescentConfig {
    /// Harmonics of the optimization space (domains are padded to this).
    pub n_harmonics: usize,
    /// Largest step width tried by the line search.
    pub beta_max: f64,
    /// Stop when the relative objective improvement falls below this
    /// twice in a row.
    pub eps_obj: f64,
    pub max_iters: usize,
    /// Eigenvalues closer than this are treated as one cluster.
    pub eps_lambda: f64,
    /// Curvature above 1 / (curvature_cap_factor * delta) marks a forming
    /// cusp; such candidate domains are rejected.
    pub curvature_cap_factor: f64,
    pub admissibility_samples: usize,
    /// Re-derive the spectrum from a full scan every this many accepted
    /// steps (between full scans, eigenvalues are tracked locally).
    pub rescan_every: usize,
    pub mfs: MfsParams,
    pub quad: QuadConfig,
}

impl Default for DescentConfig {
    fn default() -> Self {
        DescentConfig {
            n_harmonics: 10,
            beta_max: 0.5,
            eps_obj: 1e-6,
            max_iters: 200,
            eps_lambda: 0.5,
            curvature_cap_factor: 2.0,
            admissibility_samples: 512,
            rescan_every: 10,
            mfs: MfsParams {
                m_boundary: 96,
                m_interior: 36,
                delta: 0.12,
                accept_sigma: 1e-3,
                refine_rel: 1e-8,
                ..MfsParams::default()
            },
            quad: QuadConfig {
                boundary_points: 256,
                interior_points: 2048,
                seed: 2,
            },
        }
    }
}

/// Why a descent run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    /// Relative improvement fell below `eps_obj`.
    Converged,
    /// Iteration budget exhausted.
    MaxIterations,
    /// Every remaining improving step was geometrically inadmissible
    /// (self-intersection or a forming cusp); the minimizing sequence is
    /// likely to leave the class of admissible domains.
    InadmissibleStep,
    /// No improving direction or step was found.
    Stalled,
}

/// Outcome of one descent run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub status: RunStatus,
    pub n: usize,
    pub b: f64,
    pub iterations: usize,
    /// Final objective J = lambda_n of the unit-area domain.
    pub objective: f64,
    /// Objective after each accepted step (element 0 is the start).
    pub history: Vec<f64>,
    /// Final unit-area domain.
    pub domain: FourierDomain,
    /// Final eigenvalues lambda_1 .. lambda_{n+1}.
    pub spectrum: Vec<f64>,
    /// Size of the eigenvalue cluster at the last iteration.
    pub cluster_size: usize,
    pub seconds: f64,
}

/// The objective and spectral data of one domain evaluation.
pub struct Objective {
    /// lambda_n of the unit-area domain.
    pub j: f64,
    /// Unit-area version of the evaluated domain.
    pub domain: FourierDomain,
    /// lambda_1 .. lambda_{n+1}, sorted, repeated with multiplicity.
    pub eigenvalues: Vec<f64>,
    /// For each entry of `eigenvalues`, the index into `pairs`.
    pub pair_index: Vec<usize>,
    pub pairs: Vec<EigenPair>,
}

// Locate eigenvalues near the hinted positions by small local scans;
// falls back to None when the hints fail to account for enough of them.
fn solve_with_hints(
    op: &mfs::Operator,
    hints: &[f64],
    n_needed: usize,
    params: &MfsParams,
) -> Result<Option<Vec<EigenPair>>> {
    let b = op.b;
    // windows around hints, merged when overlapping
    let mut windows: Vec<(f64, f64)> = Vec::new();
    for &h in hints {
        let w = (0.03 * h).max(0.35);
        let lo = (h - w).max(b * (1.0 + 1e-7));
        let hi = h + w;
        match windows.last_mut() {
            Some(last) if lo <= last.1 => last.1 = hi,
            _ => windows.push((lo, hi)),
        }
    }
    let mut pairs: Vec<EigenPair> = Vec::new();
    for (lo, hi) in windows {
        let k = 14usize;
        let grid: Vec<f64> = (0..=k)
            .map(|i| lo + (hi - lo) * i as f64 / k as f64)
            .collect();
        let mut sig = Vec::with_capacity(grid.len());
        for &lam in &grid {
            sig.push(op.sigma(lam)?);
        }
        for i in 1..k {
            if sig[i] < sig[i - 1] && sig[i] <= sig[i + 1] {
                if let Some(p) = mfs::refine_minimum(op, grid[i - 1], grid[i + 1], params)? {
                    pairs.push(p);
                }
            }
        }
    }
    pairs.sort_by(|p, q| p.lambda.total_cmp(&q.lambda));
    pairs.dedup_by(|p, q| (p.lambda - q.lambda).abs() < 1e-8 * p.lambda);
    let count: usize = pairs.iter().map(|p| p.multiplicity).sum();
    if count >= n_needed {
        Ok(Some(pairs))
    } else {
        Ok(None)
    }
}

/// Evaluate the objective for minimizing lambda_n at field strength B.
///
/// The domain is area-normalized first; `hints` (eigenvalue positions of a
/// nearby domain) make the spectral solve local and much cheaper.
pub fn evaluate_objective(
    domain: &FourierDomain,
    n: usize,
    b: f64,
    cfg: &DescentConfig,
    hints: Option<&[f64]>,
) -> Result<Objective> {
    if n == 0 {
        return Err(Error::Invalid("eigenvalue index is 1-based".into()));
    }
    let normalized = domain.normalize_area()?;
    let (_, op) = build_operator(&normalized, b, &cfg.mfs)?;
    let pairs = match hints {
        Some(h) if h.len() >= n + 1 => {
            match solve_with_hints(&op, h, n + 1, &cfg.mfs)? {
                Some(p) => p,
                None => mfs::solve(&normalized, b, n + 1, &cfg.mfs, None)?.pairs,
            }
        }
        _ => mfs::solve(&normalized, b, n + 1, &cfg.mfs, None)?.pairs,
    };
    let mut eigenvalues = Vec::new();
    let mut pair_index = Vec::new();
    for (i, p) in pairs.iter().enumerate() {
        for _ in 0..p.multiplicity {
            eigenvalues.push(p.lambda);
            pair_index.push(i);
        }
    }
    if eigenvalues.len() < n + 1 {
        return Err(Error::MissedEigenvalues(format!(
            "found {} eigenvalues, need {}",
            eigenvalues.len(),
            n + 1
        )));
    }
    eigenvalues.truncate(n + 1);
    pair_index.truncate(n + 1);
    Ok(Objective {
        j: eigenvalues[n - 1],
        domain: normalized,
        eigenvalues,
        pair_index,
        pairs,
    })
}

// indices (1-based) of the cluster containing lambda_n, chained downward
fn cluster_indices(eigenvalues: &[f64], n: usize, eps: f64) -> Vec<usize> {
    let mut idx = vec![n];
    let mut k = n;
    while k > 1 && eigenvalues[k - 1] - eigenvalues[k - 2] < eps {
        k -= 1;
        idx.push(k);
    }
    idx.reverse();
    idx
}

fn coeffs_of(domain: &FourierDomain) -> Vec<f64> {
    let mut c = Vec::with_capacity(2 * domain.cx.len());
    c.extend_from_slice(&domain.cx);
    c.extend_from_slice(&domain.cy);
    c
}

fn domain_from_coeffs(n_harmonics: usize, c: &[f64]) -> FourierDomain {
    let m = 2 * n_harmonics;
    FourierDomain {
        n_harmonics,
        cx: c[..m].to_vec(),
        cy: c[m..].to_vec(),
    }
}

// pad or truncate a domain to the configured number of harmonics
fn pad_domain(domain: &FourierDomain, n_harmonics: usize) -> FourierDomain {
    let mut cx = vec![0.0; 2 * n_harmonics];
    let mut cy = vec![0.0; 2 * n_harmonics];
    let n0 = domain.n_harmonics;
    for j in 0..n_harmonics.min(n0) {
        cx[j] = domain.cx[j];
        cy[j] = domain.cy[j];
        cx[n_harmonics + j] = domain.cx[n0 + j];
        cy[n_harmonics + j] = domain.cy[n0 + j];
    }
    FourierDomain { n_harmonics, cx, cy }
}

// admissibility including the curvature cap tied to the source distance
fn admissible(domain: &FourierDomain, cfg: &DescentConfig) -> bool {
    let normalized = match domain.normalize_area() {
        Ok(d) => d,
        Err(_) => return false,
    };
    if !normalized.is_admissible(cfg.admissibility_samples) {
        return false;
    }
    let kappa_cap = 1.0 / (cfg.curvature_cap_factor * cfg.mfs.delta);
    for i in 0..cfg.admissibility_samples {
        let phi = 2.0 * std::f64::consts::PI * i as f64 / cfg.admissibility_samples as f64;
        if normalized.curvature(phi).abs() > kappa_cap {
            return false;
        }
    }
    true
}

/// Minimize lambda_n over unit-area domains by gradient descent starting
/// from `initial`.
pub fn descend(
    initial: &FourierDomain,
    n: usize,
    b: f64,
    cfg: &DescentConfig,
) -> Result<RunRecord> {
    let t0 = std::time::Instant::now();
    let start = pad_domain(initial, cfg.n_harmonics);
    if !admissible(&start, cfg) {
        return Err(Error::Inadmissible(
            "initial domain fails the admissibility checks".into(),
        ));
    }
    let mut current = evaluate_objective(&start, n, b, cfg, None)?;
    let mut history = vec![current.j];
    let mut beta_max = cfg.beta_max;
    let mut status = RunStatus::MaxIterations;
    let mut small_improvements = 0usize;
    let mut inadmissible_strikes = 0usize;
    let mut cluster_size = 1usize;
    let mut iterations = 0usize;
    let mut since_rescan = 0usize;

    for _ in 0..cfg.max_iters {
        iterations += 1;
        // descent direction from the cluster of lambda_n
        let cluster = cluster_indices(&current.eigenvalues, n, cfg.eps_lambda);
        cluster_size = cluster.len();
        let mut grads = Vec::new();
        let mut seen = Vec::new();
        for &k in &cluster {
            let pi = current.pair_index[k - 1];
            if seen.contains(&pi) {
                continue;
            }
            seen.push(pi);
            grads.push(objective_gradient(
                &current.pairs[pi],
                &current.domain,
                &cfg.quad,
            )?);
        }
        let direction = match cluster_direction(&grads) {
            Some(d) => d,
            None => {
                status = RunStatus::Stalled;
                break;
            }
        };
        let c0 = coeffs_of(&current.domain);

        // line search: geometric grid in beta, tracking admissibility
        let mut best: Option<(f64, Objective)> = None;
        let mut any_admissible = false;
        let mut beta = beta_max;
        for _ in 0..8 {
            let c_try: Vec<f64> = c0
                .iter()
                .zip(direction.iter())
                .map(|(a, d)| a - beta * d)
                .collect();
            let cand = domain_from_coeffs(cfg.n_harmonics, &c_try);
            if admissible(&cand, cfg) {
                any_admissible = true;
                if let Ok(obj) =
                    evaluate_objective(&cand, n, b, cfg, Some(&current.eigenvalues))
                {
                    if obj.j < current.j
                        && best.as_ref().map_or(true, |(_, o)| obj.j < o.j)
                    {
                        best = Some((beta, obj));
                    }
                }
            }
            beta *= 0.5;
        }
        // parabolic refinement around the best grid point
        if let Some((beta_star, _)) = best.as_ref().map(|(b_, _)| (*b_, ())) {
            for factor in [0.7071, 1.4142, 0.8409] {
                let beta = beta_star * factor;
                if beta > beta_max {
                    continue;
                }
                let c_try: Vec<f64> = c0
                    .iter()
                    .zip(direction.iter())
                    .map(|(a, d)| a - beta * d)
                    .collect();
                let cand = domain_from_coeffs(cfg.n_harmonics, &c_try);
                if !admissible(&cand, cfg) {
                    continue;
                }
                if let Ok(obj) =
                    evaluate_objective(&cand, n, b, cfg, Some(&current.eigenvalues))
                {
                    if best.as_ref().map_or(true, |(_, o)| obj.j < o.j) {
                        best = Some((beta, obj));
                    }
                }
            }
        }

        match best {
            Some((_, obj)) => {
                let improvement = (current.j - obj.j) / current.j;
                current = obj;
                since_rescan += 1;
                if since_rescan >= cfg.rescan_every {
                    // resync the tracked spectrum with a full scan
                    current = evaluate_objective(&current.domain, n, b, cfg, None)?;
                    since_rescan = 0;
                }
                history.push(current.j);
                inadmissible_strikes = 0;
                if improvement < cfg.eps_obj {
                    small_improvements += 1;
                    if small_improvements >= 2 {
                        status = RunStatus::Converged;
                        break;
                    }
                } else {
                    small_improvements = 0;
                }
            }
            None => {
                if !any_admissible {
                    inadmissible_strikes += 1;
                    if inadmissible_strikes >= 2 {
                        status = RunStatus::InadmissibleStep;
                        break;
                    }
                }
                beta_max *= 0.5;
                if beta_max < 1e-4 * cfg.beta_max {
                    status = if inadmissible_strikes > 0 {
                        RunStatus::InadmissibleStep
                    } else {
                        RunStatus::Converged
                    };
                    break;
                }
            }
        }
    }

    // final verification scan
    current = evaluate_objective(&current.domain, n, b, cfg, None)?;
    Ok(RunRecord {
        status,
        n,
        b,
        iterations,
        objective: current.j,
        history,
        domain: current.domain,
        spectrum: current.eigenvalues,
        cluster_size,
        seconds: t0.elapsed().as_secs_f64(),
    })
}

/// A unit-area circle with seeded random perturbations in every harmonic,
/// used as a descent starting point.
pub fn perturbed_circle(n_harmonics: usize, amplitude: f64, seed: u64) -> FourierDomain {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = FourierDomain::circle(n_harmonics, crate::diskspec::UNIT_AREA_RADIUS);
    for j in 2..n_harmonics {
        let damp = amplitude / (j * j) as f64;
        d.cx[j] += rng.gen_range(-damp..damp);
        d.cy[j] += rng.gen_range(-damp..damp);
        d.cx[n_harmonics + j] += rng.gen_range(-damp..damp);
        d.cy[n_harmonics + j] += rng.gen_range(-damp..damp);
    }
    d.normalize_area().expect("perturbed circle stays valid")
}

/// Run `starts` descents from different perturbed circles and return the
/// records sorted by final objective (best first).
pub fn multi_start(
    n: usize,
    b: f64,
    starts: usize,
    amplitude: f64,
    seed: u64,
    cfg: &DescentConfig,
) -> Result<Vec<RunRecord>> {
    let mut records = Vec::with_capacity(starts);
    for i in 0..starts {
        let start = perturbed_circle(cfg.n_harmonics, amplitude, seed + i as u64);
        records.push(descend(&start, n, b, cfg)?);
    }
    records.sort_by(|p, q| p.objective.total_cmp(&q.objective));
    Ok(records)
}

/// Track a local minimizer along a grid of field strengths: each descent
/// starts from the previous minimizer.
pub fn continuation_sweep(
    initial: &FourierDomain,
    n: usize,
    b_grid: &[f64],
    cfg: &DescentConfig,
) -> Result<Vec<RunRecord>> {
    let mut out = Vec::with_capacity(b_grid.len());
    let mut start = pad_domain(initial, cfg.n_harmonics);
    for &b in b_grid {
        let rec = descend(&start, n, b, cfg)?;
        start = rec.domain.clone();
        out.push(rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diskspec;
    use crate::geometry::omega_test;
    use approx::assert_relative_eq;

    fn quick_cfg() -> DescentConfig {
        DescentConfig {
            n_harmonics: 7,
            quad: QuadConfig {
                boundary_points: 192,
                interior_points: 1600,
                seed: 2,
            },
            ..DescentConfig::default()
        }
    }

    #[test]
    fn objective_on_circle_matches_disk_eigenvalue() {
        // any circle normalizes to the unit-area disk
        let cfg = quick_cfg();
        let d = FourierDomain::circle(7, 0.83);
        let obj = evaluate_objective(&d, 1, 6.0, &cfg, None).unwrap();
        let want = diskspec::unit_disk_eigenvalue(1, 6.0).unwrap();
        assert_relative_eq!(obj.j, want, max_relative = 1e-8);
        assert_eq!(obj.eigenvalues.len(), 2);
        assert_relative_eq!(
            obj.eigenvalues[1],
            diskspec::unit_disk_eigenvalue(2, 6.0).unwrap(),
            max_relative = 1e-8
        );
    }

    #[test]
    fn hints_reproduce_full_scan() {
        let cfg = quick_cfg();
        let d = omega_test();
        let full = evaluate_objective(&d, 2, 6.0, &cfg, None).unwrap();
        let hinted =
            evaluate_objective(&d, 2, 6.0, &cfg, Some(&full.eigenvalues)).unwrap();
        for (a, b) in full.eigenvalues.iter().zip(hinted.eigenvalues.iter()) {
            assert_relative_eq!(a, b, max_relative = 1e-7);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        // central differences of J(c) through the full pipeline
        let mut cfg = DescentConfig {
            n_harmonics: 7,
            ..DescentConfig::default()
        };
        // the differences below need eigenvalues far tighter than h
        cfg.mfs.refine_rel = 1e-12;
        let d = omega_test().normalize_area().unwrap();
        let obj = evaluate_objective(&d, 1, 6.0, &cfg, None).unwrap();
        let g = objective_gradient(&obj.pairs[0], &obj.domain, &cfg.quad).unwrap();
        let c0 = coeffs_of(&obj.domain);
        let h = 1e-4;
        // a cx harmonic, a cy harmonic and a sine coefficient
        for i in [1usize, 2 * 7 + 1, 7 + 4] {
            let mut cp = c0.clone();
            cp[i] += h;
            let jp = evaluate_objective(
                &domain_from_coeffs(7, &cp),
                1,
                6.0,
                &cfg,
                Some(&obj.eigenvalues),
            )
            .unwrap()
            .j;
            let mut cm = c0.clone();
            cm[i] -= h;
            let jm = evaluate_objective(
                &domain_from_coeffs(7, &cm),
                1,
                6.0,
                &cfg,
                Some(&obj.eigenvalues),
            )
            .unwrap()
            .j;
            let fd = (jp - jm) / (2.0 * h);
            assert_relative_eq!(g[i], fd, max_relative = 2e-3, epsilon = 1e-4);
        }
    }

    #[test]
    fn cluster_chaining() {
        let ev = [10.0, 10.2, 10.3, 12.0, 12.4];
        assert_eq!(cluster_indices(&ev, 3, 0.5), vec![1, 2, 3]);
        assert_eq!(cluster_indices(&ev, 4, 0.5), vec![4]);
        assert_eq!(cluster_indices(&ev, 5, 0.5), vec![4, 5]);
        assert_eq!(cluster_indices(&ev, 1, 0.5), vec![1]);
    }

    #[test]
    fn descent_decreases_objective() {
        let cfg = DescentConfig {
            max_iters: 4,
            ..quick_cfg()
        };
        let start = perturbed_circle(7, 0.15, 5);
        let rec = descend(&start, 1, 10.0, &cfg).unwrap();
        assert!(rec.history.len() >= 2, "no accepted step");
        for w in rec.history.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-9), "objective went up: {w:?}");
        }
        let disk = diskspec::unit_disk_eigenvalue(1, 10.0).unwrap();
        assert!(rec.objective >= disk * 0.999);
        assert!(rec.objective < rec.history[0]);
    }
}
