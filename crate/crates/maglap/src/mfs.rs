//! Method of fundamental solutions for the magnetic Dirichlet Laplacian,
//! with the subspace angle technique for locating eigenvalues.
//!
//! Trial functions are superpositions of scaled fundamental solutions
//!
//! ```text
//! G(x, y) = exp( i (B/2)(x1 y2 - x2 y1) - (B/4)|x - y|^2 )
//!           * U( 1/2 - lambda/(2B), 1, (B/2)|x - y|^2 )
//! ```
//!
//! centred at source points y outside the domain. For each trial lambda the
//! subspace angle sigma(lambda) in [0, 1] measures how close the span of the
//! trial functions comes to satisfying the boundary condition while staying
//! nontrivial inside; eigenvalues are the sharp local minima of sigma.
//! Interior sample points are part of the construction precisely to filter
//! out spurious minima at the Landau levels (2k+1)B, where the fundamental
//! solution degenerates.

use crate::error::{Error, Result};
use crate::geometry::{domain_quadrature, FourierDomain, PointLayout, Spacing};
use crate::specfun::{tricomi_u, tricomi_u_prime};
use ndarray::{s, Array1, Array2};
use ndarray_linalg::{c64, Diag, SolveTriangular, QR, SVD, UPLO};
use serde::{Deserialize, Serialize};

/// Parameters of the eigensolver.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MfsParams {
    /// Number of boundary collocation points (and of source points).
    pub m_boundary: usize,
    /// Number of interior sample points.
    pub m_interior: usize,
    /// Distance of the source points from the boundary.
    pub delta: f64,
    pub spacing: Spacing,
    /// Seed for the interior point sampler.
    pub seed: u64,
    /// A refined minimum only counts as an eigenvalue if sigma falls below
    /// this threshold.
    pub accept_sigma: f64,
    /// Bracket width, relative to lambda, to which minima are refined.
    pub refine_rel: f64,
    /// Relative distance to a Landau level below which an eigenvalue is
    /// flagged as suspicious.
    pub landau_tol: f64,
    /// Growth ratio of the scan grid in (lambda - B).
    pub grid_ratio: f64,
    /// Cap on the scan step; `None` means min(2, B/10).
    pub max_step: Option<f64>,
}

impl Default for MfsParams {
    fn default() -> Self {
        MfsParams {
            m_boundary: 300,
            m_interior: 100,
            delta: 0.1,
            spacing: Spacing::EqualParameter,
            seed: 1,
            accept_sigma: 1e-4,
            refine_rel: 1e-10,
            landau_tol: 1e-6,
            grid_ratio: 1.3,
            max_step: None,
        }
    }
}

/// Scaled fundamental solution G(x, y) at spectral parameter lambda.
pub fn kernel(x: [f64; 2], y: [f64; 2], lambda: f64, b: f64) -> Result<c64> {
    let dx = x[0] - y[0];
    let dy = x[1] - y[1];
    let z = 0.5 * b * (dx * dx + dy * dy);
    let a = 0.5 - lambda / (2.0 * b);
    let u = tricomi_u(a, 1, z)?;
    let theta = 0.5 * b * (x[0] * y[1] - x[1] * y[0]);
    Ok(c64::new(0.0, theta).exp() * (-0.5 * z).exp() * u)
}

/// Gradient of the kernel with respect to x.
pub fn kernel_grad(x: [f64; 2], y: [f64; 2], lambda: f64, b: f64) -> Result<[c64; 2]> {
    let dx = x[0] - y[0];
    let dy = x[1] - y[1];
    let z = 0.5 * b * (dx * dx + dy * dy);
    let a = 0.5 - lambda / (2.0 * b);
    let u = tricomi_u(a, 1, z)?;
    let up = tricomi_u_prime(a, 1, z)?;
    let theta = 0.5 * b * (x[0] * y[1] - x[1] * y[0]);
    let env = c64::new(0.0, theta).exp() * (-0.5 * z).exp();
    // d theta/dx = (B/2)(y2, -y1), d z/dx = B (x - y)
    let gx = c64::new(-0.5 * b * dx * u + b * dx * up, 0.5 * b * y[1] * u);
    let gy = c64::new(-0.5 * b * dy * u + b * dy * up, -0.5 * b * y[0] * u);
    Ok([env * gx, env * gy])
}

/// Assembled geometry with the lambda-independent parts of the collocation
/// matrix precomputed, so that scanning in lambda only re-evaluates U.
pub struct Operator {
    pub m_boundary: usize,
    pub b: f64,
    /// Source points (columns of the matrix).
    pub sources: Vec<[f64; 2]>,
    z: Array2<f64>,
    prefactor: Array2<c64>,
}

impl Operator {
    pub fn new(layout: &PointLayout, b: f64) -> Result<Self> {
        if !(b > 0.0) {
            return Err(Error::Domain(format!("need B > 0, got {b}")));
        }
        let rows: Vec<[f64; 2]> = layout
            .collocation
            .iter()
            .chain(layout.interior.iter())
            .cloned()
            .collect();
        let m = layout.sources.len();
        let mp = rows.len();
        let mut z = Array2::zeros((mp, m));
        let mut prefactor = Array2::zeros((mp, m));
        for (i, x) in rows.iter().enumerate() {
            for (j, y) in layout.sources.iter().enumerate() {
                let dx = x[0] - y[0];
                let dy = x[1] - y[1];
                let zz = 0.5 * b * (dx * dx + dy * dy);
                let theta = 0.5 * b * (x[0] * y[1] - x[1] * y[0]);
                z[[i, j]] = zz;
                prefactor[[i, j]] = c64::new(0.0, theta).exp() * (-0.5 * zz).exp();
            }
        }
        Ok(Operator {
            m_boundary: layout.collocation.len(),
            b,
            sources: layout.sources.clone(),
            z,
            prefactor,
        })
    }

    /// The collocation matrix A(lambda) (boundary rows first, then
    /// interior rows).
    pub fn matrix(&self, lambda: f64) -> Result<Array2<c64>> {
        let a = 0.5 - lambda / (2.0 * self.b);
        let (mp, m) = self.z.dim();
        let mut out = Array2::zeros((mp, m));
        for i in 0..mp {
            for j in 0..m {
                out[[i, j]] = self.prefactor[[i, j]] * tricomi_u(a, 1, self.z[[i, j]])?;
            }
        }
        Ok(out)
    }

    /// Subspace angle sigma(lambda) in [0, 1].
    pub fn sigma(&self, lambda: f64) -> Result<f64> {
        Ok(self.sigma_detailed(lambda)?.sigma)
    }

    /// Sigma together with the boundary singular spectrum and the
    /// coefficient vector of the minimizing trial function.
    pub fn sigma_detailed(&self, lambda: f64) -> Result<SigmaDetail> {
        let a = self.matrix(lambda)?;
        let (q, r) = a
            .qr()
            .map_err(|e| Error::Numerical(format!("QR factorization failed: {e}")))?;
        let qb = q.slice(s![..self.m_boundary, ..]).to_owned();
        let (_, sv, vt) = qb
            .svd(false, true)
            .map_err(|e| Error::Numerical(format!("SVD failed: {e}")))?;
        let vt = vt.expect("right singular vectors requested");
        let m = sv.len();
        let sigma = sv[m - 1];
        // smallest right singular vector of Q_B
        let c: Array1<c64> = vt.row(m - 1).mapv(|v| v.conj());
        // back out the source coefficients: alpha = R^{-1} c
        let alpha = r
            .solve_triangular(UPLO::Upper, Diag::NonUnit, &c)
            .map_err(|e| Error::Numerical(format!("triangular solve failed: {e}")))?;
        Ok(SigmaDetail {
            sigma,
            singular_values: sv.to_vec(),
            alpha: alpha.to_vec(),
        })
    }
}

pub struct SigmaDetail {
    pub sigma: f64,
    /// All singular values of the boundary block, descending.
    pub singular_values: Vec<f64>,
    pub alpha: Vec<c64>,
}

/// One computed eigenpair. `alpha` are the source coefficients of the
/// eigenfunction approximation u(x) = sum_j alpha_j G(x, y_j).
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub lambda: f64,
    pub sigma: f64,
    /// Number of boundary singular values under the acceptance threshold
    /// at the minimum (detects degenerate eigenvalues).
    pub multiplicity: usize,
    /// True when lambda sits suspiciously close to a Landau level (2k+1)B.
    pub near_landau: bool,
    pub b: f64,
    pub alpha: Vec<c64>,
    pub sources: Vec<[f64; 2]>,
}

impl EigenPair {
    /// Evaluate the eigenfunction approximation.
    pub fn eval(&self, x: [f64; 2]) -> Result<c64> {
        let mut s = c64::new(0.0, 0.0);
        for (a, y) in self.alpha.iter().zip(self.sources.iter()) {
            s += a * kernel(x, *y, self.lambda, self.b)?;
        }
        Ok(s)
    }

    /// Evaluate the eigenfunction approximation and its gradient.
    pub fn eval_grad(&self, x: [f64; 2]) -> Result<(c64, [c64; 2])> {
        let mut s = c64::new(0.0, 0.0);
        let mut g = [c64::new(0.0, 0.0); 2];
        for (a, y) in self.alpha.iter().zip(self.sources.iter()) {
            s += a * kernel(x, *y, self.lambda, self.b)?;
            let kg = kernel_grad(x, *y, self.lambda, self.b)?;
            g[0] += a * kg[0];
            g[1] += a * kg[1];
        }
        Ok((s, g))
    }

    /// Rescale the coefficients so that the L^2 norm over `domain`
    /// (approximated with `quad_points` quasi-random nodes) becomes 1.
    /// Returns the norm prior to scaling.
    pub fn normalize_l2(
        &mut self,
        domain: &FourierDomain,
        quad_points: usize,
        seed: u64,
    ) -> Result<f64> {
        let quad = domain_quadrature(domain, quad_points, seed)?;
        let norm = quad
            .integrate(|p| Ok(self.eval(p)?.norm_sqr()))?
            .sqrt();
        if !(norm > 0.0) {
            return Err(Error::Numerical("eigenfunction has zero norm".into()));
        }
        for a in self.alpha.iter_mut() {
            *a /= norm;
        }
        Ok(norm)
    }
}

/// The sigma values computed during a scan, for diagnostics and export.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SigmaScan {
    pub lambdas: Vec<f64>,
    pub sigmas: Vec<f64>,
}

/// Result of an eigenvalue search on an interval.
pub struct SolveResult {
    pub pairs: Vec<EigenPair>,
    pub scan: SigmaScan,
}

fn scan_grid(b: f64, lo: f64, hi: f64, ratio: f64, h_max: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut e = (lo - b).max(1e-7 * b);
    let e_hi = hi - b;
    while e < e_hi {
        grid.push(b + e);
        e = (e * ratio).min(e + h_max);
    }
    grid.push(hi);
    grid
}

/// Golden-section minimization on [a, b] down to bracket width `tol`.
fn golden_min<F: FnMut(f64) -> Result<f64>>(
    f: &mut F,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    if f1 <= f2 {
        Ok((x1, f1))
    } else {
        Ok((x2, f2))
    }
}

/// Find all eigenvalues in `(lo, hi]` by scanning sigma on a graded grid
/// and refining its local minima.
///
/// When `refine_op` is given, the (typically coarser) `op` is only used to
/// locate the minima and the refinement runs on `refine_op`; this is the
/// cheap way to get benchmark-quality eigenvalues.
pub fn eigenvalues_in(
    op: &Operator,
    range: (f64, f64),
    params: &MfsParams,
    refine_op: Option<&Operator>,
) -> Result<SolveResult> {
    let b = op.b;
    let (lo, hi) = range;
    if !(hi > lo) || lo < b * (1.0 - 1e-12) {
        return Err(Error::Invalid(format!(
            "invalid scan range ({lo}, {hi}] for B = {b}; eigenvalues lie above B"
        )));
    }
    let h_max = params.max_step.unwrap_or_else(|| (b / 10.0).min(2.0));
    let grid = scan_grid(b, lo.max(b), hi, params.grid_ratio, h_max);
    let mut sigmas = Vec::with_capacity(grid.len());
    for &lam in &grid {
        sigmas.push(op.sigma(lam)?);
    }
    let fine = refine_op.unwrap_or(op);
    let mut pairs: Vec<EigenPair> = Vec::new();
    for i in 1..grid.len().saturating_sub(1) {
        if sigmas[i] < sigmas[i - 1] && sigmas[i] <= sigmas[i + 1] {
            let pair = refine_minimum(fine, grid[i - 1], grid[i + 1], params)?;
            if let Some(p) = pair {
                pairs.push(p);
            }
        }
    }
    // merge refinements that converged to the same eigenvalue
    pairs.sort_by(|p, q| p.lambda.total_cmp(&q.lambda));
    let mut merged: Vec<EigenPair> = Vec::new();
    for p in pairs {
        match merged.last_mut() {
            Some(last) if (p.lambda - last.lambda).abs() < 1e-8 * p.lambda.abs() => {
                if p.sigma < last.sigma {
                    let mult = last.multiplicity.max(p.multiplicity);
                    *last = p;
                    last.multiplicity = mult;
                }
            }
            _ => merged.push(p),
        }
    }
    Ok(SolveResult {
        pairs: merged,
        scan: SigmaScan {
            lambdas: grid,
            sigmas,
        },
    })
}

/// Refine a bracketed sigma minimum; returns None if the refined minimum
/// does not pass the acceptance threshold.
pub fn refine_minimum(
    op: &Operator,
    lo: f64,
    hi: f64,
    params: &MfsParams,
) -> Result<Option<EigenPair>> {
    let tol = params.refine_rel * 0.5 * (lo + hi);
    let mut f = |lam: f64| op.sigma(lam);
    let (lam, _) = golden_min(&mut f, lo, hi, tol)?;
    let detail = op.sigma_detailed(lam)?;
    if detail.sigma > params.accept_sigma {
        return Ok(None);
    }
    let multiplicity = detail
        .singular_values
        .iter()
        .filter(|&&s| s <= params.accept_sigma)
        .count()
        .max(1);
    let k = ((lam / op.b - 1.0) / 2.0).round();
    let near_landau = k >= 0.0 && (lam - (2.0 * k + 1.0) * op.b).abs() < params.landau_tol * op.b;
    Ok(Some(EigenPair {
        lambda: lam,
        sigma: detail.sigma,
        multiplicity,
        near_landau,
        b: op.b,
        alpha: detail.alpha,
        sources: op.sources.clone(),
    }))
}

/// Build the layout and operator for a domain with the given parameters.
pub fn build_operator(
    domain: &FourierDomain,
    b: f64,
    params: &MfsParams,
) -> Result<(PointLayout, Operator)> {
    let layout = domain.layout(
        params.m_boundary,
        params.m_interior,
        params.delta,
        params.spacing,
        params.seed,
    )?;
    let op = Operator::new(&layout, b)?;
    Ok((layout, op))
}

/// Find the lowest `n` eigenvalues of a domain, growing the scan window
/// until enough are located.
pub fn solve(
    domain: &FourierDomain,
    b: f64,
    n: usize,
    params: &MfsParams,
    refine_params: Option<&MfsParams>,
) -> Result<SolveResult> {
    let (_, op) = build_operator(domain, b, params)?;
    let area = domain.area();
    // Weyl-type window: lambda_n is close to the zero-field value plus B
    let mut hi = b + (4.0 * std::f64::consts::PI * (n as f64 + 1.0) + 4.0) / area;
    // locate with the cheap operator at relaxed tolerance; refine last
    let locate_params = MfsParams {
        refine_rel: params.refine_rel.max(3e-5),
        ..params.clone()
    };
    let mut lo = b;
    let mut pairs: Vec<EigenPair> = Vec::new();
    let mut scan = SigmaScan {
        lambdas: Vec::new(),
        sigmas: Vec::new(),
    };
    for _ in 0..8 {
        // scan only the window not yet covered (with a small overlap)
        let seg_lo = if lo > b { b.max(lo - 0.02 * (lo - b)) } else { b };
        let seg = eigenvalues_in(&op, (seg_lo, hi), &locate_params, None)?;
        for p in seg.pairs {
            if pairs
                .iter()
                .all(|q: &EigenPair| (q.lambda - p.lambda).abs() > 1e-8 * p.lambda.abs())
            {
                pairs.push(p);
            }
        }
        pairs.sort_by(|p, q| p.lambda.total_cmp(&q.lambda));
        scan.lambdas.extend_from_slice(&seg.scan.lambdas);
        scan.sigmas.extend_from_slice(&seg.scan.sigmas);
        let mut result = SolveResult {
            pairs: pairs.clone(),
            scan: scan.clone(),
        };
        let count: usize = result.pairs.iter().map(|p| p.multiplicity).sum();
        if count < n {
            lo = hi;
            hi = b + (hi - b) * 1.6;
            continue;
        }
        if let Some(rp) = refine_params {
            // one tight pass per located eigenvalue with the fine operator
            let fine = build_operator(domain, b, rp)?.1;
            let mut refined = Vec::with_capacity(result.pairs.len());
            for p in &result.pairs {
                let w = 1e-4 * p.lambda.abs().max(1.0);
                match refine_minimum(&fine, p.lambda - w, p.lambda + w, params)? {
                    Some(q) => refined.push(q),
                    None => refined.push(p.clone()),
                }
            }
            result.pairs = refined;
        } else if params.refine_rel < locate_params.refine_rel {
            let mut refined = Vec::with_capacity(result.pairs.len());
            for p in &result.pairs {
                let w = 1e-4 * p.lambda.abs().max(1.0);
                match refine_minimum(&op, p.lambda - w, p.lambda + w, params)? {
                    Some(q) => refined.push(q),
                    None => refined.push(p.clone()),
                }
            }
            result.pairs = refined;
        }
        return Ok(result);
    }
    Err(Error::MissedEigenvalues(format!(
        "could not locate {n} eigenvalues below lambda = {hi}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_disk() -> FourierDomain {
        FourierDomain::circle(3, crate::diskspec::UNIT_AREA_RADIUS)
    }

    fn quick_params() -> MfsParams {
        MfsParams {
            m_boundary: 120,
            m_interior: 40,
            delta: 0.08,
            ..MfsParams::default()
        }
    }

    #[test]
    fn kernel_satisfies_pde() {
        // (-i grad + A)^2 G = lambda G away from the source, with
        // A = (B/2)(-x2, x1); checked by centred finite differences.
        let b = 6.0;
        let lambda = 17.3;
        let y = [0.9, -0.4];
        let x = [0.2, 0.3];
        let h = 1e-4;
        let f = |p: [f64; 2]| kernel(p, y, lambda, b).unwrap();
        let lap = (f([x[0] + h, x[1]]) + f([x[0] - h, x[1]]) + f([x[0], x[1] + h])
            + f([x[0], x[1] - h])
            - 4.0 * f(x))
            / (h * h);
        let gx = (f([x[0] + h, x[1]]) - f([x[0] - h, x[1]])) / (2.0 * h);
        let gy = (f([x[0], x[1] + h]) - f([x[0], x[1] - h])) / (2.0 * h);
        let a_field = [-0.5 * b * x[1], 0.5 * b * x[0]];
        let asq = a_field[0] * a_field[0] + a_field[1] * a_field[1];
        let i = c64::new(0.0, 1.0);
        let lhs = -lap - 2.0 * i * (a_field[0] * gx + a_field[1] * gy) + asq * f(x);
        let rhs = lambda * f(x);
        assert!(
            (lhs - rhs).norm() < 1e-5 * rhs.norm().max(1.0),
            "PDE residual {} vs scale {}",
            (lhs - rhs).norm(),
            rhs.norm()
        );
    }

    #[test]
    fn kernel_grad_matches_finite_differences() {
        let b = 9.0;
        let lambda = 23.0;
        let y = [-0.3, 0.8];
        let x = [0.5, 0.1];
        let h = 1e-6;
        let g = kernel_grad(x, y, lambda, b).unwrap();
        let fd0 = (kernel([x[0] + h, x[1]], y, lambda, b).unwrap()
            - kernel([x[0] - h, x[1]], y, lambda, b).unwrap())
            / (2.0 * h);
        let fd1 = (kernel([x[0], x[1] + h], y, lambda, b).unwrap()
            - kernel([x[0], x[1] - h], y, lambda, b).unwrap())
            / (2.0 * h);
        assert!((g[0] - fd0).norm() < 1e-7 * g[0].norm().max(1.0));
        assert!((g[1] - fd1).norm() < 1e-7 * g[1].norm().max(1.0));
    }

    #[test]
    fn sigma_is_bounded_and_dips_at_eigenvalues() {
        let d = unit_disk();
        let p = quick_params();
        let layout = d
            .layout(p.m_boundary, p.m_interior, p.delta, p.spacing, p.seed)
            .unwrap();
        let op = Operator::new(&layout, 6.0).unwrap();
        for lam in [10.0, 17.0, 18.78985322628746, 30.0, 41.07719366592705] {
            let s = op.sigma(lam).unwrap();
            assert!((0.0..=1.0 + 1e-12).contains(&s), "sigma = {s} at {lam}");
        }
        assert!(op.sigma(18.78985322628746).unwrap() < 1e-6);
        assert!(op.sigma(41.07719366592705).unwrap() < 1e-6);
        assert!(op.sigma(17.0).unwrap() > 1e-2);
    }

    #[test]
    fn disk_eigenvalues_recovered() {
        let d = unit_disk();
        let p = quick_params();
        let (_, op) = build_operator(&d, 6.0, &p).unwrap();
        let res = eigenvalues_in(&op, (6.0, 60.0), &p, None).unwrap();
        let want = [18.78985322628746, 41.07719366592705, 53.07719366592705];
        assert_eq!(res.pairs.len(), want.len());
        for (pair, w) in res.pairs.iter().zip(want.iter()) {
            assert_relative_eq!(pair.lambda, *w, max_relative = 1e-8);
            assert!(!pair.near_landau);
            assert_eq!(pair.multiplicity, 1);
        }
    }

    #[test]
    fn gauge_invariance_under_translation() {
        // translating the whole configuration multiplies the matrix by
        // diagonal phase factors on both sides; sigma must not move
        let d = unit_disk();
        let p = quick_params();
        let layout = d
            .layout(p.m_boundary, p.m_interior, p.delta, p.spacing, p.seed)
            .unwrap();
        let mut shifted = layout.clone();
        for pt in shifted
            .collocation
            .iter_mut()
            .chain(shifted.sources.iter_mut())
            .chain(shifted.interior.iter_mut())
        {
            pt[0] += 1.7;
            pt[1] -= 2.3;
        }
        let op = Operator::new(&layout, 6.0).unwrap();
        let op2 = Operator::new(&shifted, 6.0).unwrap();
        for lam in [12.0, 18.78985322628746, 25.0] {
            let s1 = op.sigma(lam).unwrap();
            let s2 = op2.sigma(lam).unwrap();
            assert_relative_eq!(s1, s2, max_relative = 1e-8, epsilon = 1e-10);
        }
    }

    #[test]
    fn rotation_invariance_of_eigenvalues() {
        let d = crate::geometry::omega_test();
        let p = quick_params();
        let (_, op) = build_operator(&d, 6.0, &p).unwrap();
        let lam1 = eigenvalues_in(&op, (6.0, 10.0), &p, None)
            .unwrap()
            .pairs[0]
            .lambda;
        let rot = d.rotated(1.1);
        let (_, op_rot) = build_operator(&rot, 6.0, &p).unwrap();
        let lam1_rot = eigenvalues_in(&op_rot, (6.0, 10.0), &p, None)
            .unwrap()
            .pairs[0]
            .lambda;
        assert_relative_eq!(lam1, lam1_rot, max_relative = 1e-7);
    }

    #[test]
    fn eigenfunction_vanishes_on_boundary_and_normalizes() {
        let d = unit_disk();
        let p = quick_params();
        let (_, op) = build_operator(&d, 6.0, &p).unwrap();
        let res = eigenvalues_in(&op, (6.0, 25.0), &p, None).unwrap();
        let mut pair = res.pairs[0].clone();
        let norm = pair.normalize_l2(&d, 3000, 11).unwrap();
        assert!(norm > 0.0);
        // boundary smallness relative to an interior value
        let interior = pair.eval([0.05, -0.1]).unwrap().norm();
        for k in 0..12 {
            let phi = 2.0 * std::f64::consts::PI * (k as f64 + 0.37) / 12.0;
            let bp = d.point(phi);
            let bv = pair.eval(bp).unwrap().norm();
            assert!(
                bv < 1e-5 * interior,
                "boundary value {bv} vs interior {interior}"
            );
        }
        // normalized: integral of |u|^2 is 1, checked with an
        // independently-seeded rule
        let q = crate::geometry::interior_quadrature(&d, 4000, 23).unwrap();
        let total = q.integrate(|pt| Ok(pair.eval(pt).unwrap().norm_sqr())).unwrap();
        assert_relative_eq!(total, 1.0, max_relative = 2e-2);
    }
}
