//! Hadamard shape gradients of the scale-invariant objective
//! J(c) = |Omega_c| lambda_n(Omega_c, B / |Omega_c|).
//!
//! For a unit-area domain and a simple eigenvalue with L^2-normalized
//! eigenfunction u the partial derivative along the i-th coefficient is
//!
//! ```text
//! dJ/dc_i = integral over the boundary of
//!     [ (lambda - B dlambda/dB) - |du/dn|^2 ] (V_i . n) dsigma
//! ```
//!
//! where V_i is the deformation field of the i-th Fourier coefficient and
//! dlambda/dB comes from a Hellmann-Feynman formula. All integrals are
//! evaluated with the trapezoid rule in the curve parameter (boundary) and
//! quasi-Monte-Carlo nodes (interior); the eigenfunction normalization is
//! folded in so callers can pass unnormalized MFS eigenpairs.

use crate::error::{Error, Result};
use crate::geometry::{domain_quadrature, FourierDomain};
use crate::mfs::EigenPair;
use ndarray::{Array1, Array2};
use ndarray_linalg::Solve;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Quadrature sizes for the gradient integrals.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Trapezoid points on the boundary.
    pub boundary_points: usize,
    /// Quasi-Monte-Carlo nodes in the interior.
    pub interior_points: usize,
    pub seed: u64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            boundary_points: 256,
            interior_points: 20_000,
            seed: 2,
        }
    }
}

// One sweep over the interior nodes: squared L^2 norm of u and the
// Hellmann-Feynman derivative dlambda/dB.
fn interior_integrals(
    pair: &EigenPair,
    domain: &FourierDomain,
    quad: &QuadConfig,
) -> Result<(f64, f64)> {
    let b = pair.b;
    let nodes = domain_quadrature(domain, quad.interior_points, quad.seed)?;
    let mut norm2 = 0.0;
    let mut potential = 0.0;
    let mut kinetic = 0.0;
    for (p, w) in nodes.points.iter().zip(nodes.weights.iter()) {
        let (u, g) = pair.eval_grad(*p)?;
        let usq = u.norm_sqr();
        norm2 += w * usq;
        potential += w * 0.25 * b * b * (p[0] * p[0] + p[1] * p[1]) * usq;
        kinetic += w * (g[0].norm_sqr() + g[1].norm_sqr());
    }
    if !(norm2 > 0.0) {
        return Err(Error::Numerical("eigenfunction has zero norm".into()));
    }
    let dldb = (pair.lambda + (potential - kinetic) / norm2) / b;
    Ok((norm2, dldb))
}

/// Derivative of lambda with respect to the field strength B at fixed
/// domain, via the Hellmann-Feynman formula
/// dlambda/dB = (lambda + int B^2 |x|^2/4 |u|^2 - |grad u|^2) / B.
pub fn dlambda_db(pair: &EigenPair, domain: &FourierDomain, quad: &QuadConfig) -> Result<f64> {
    Ok(interior_integrals(pair, domain, quad)?.1)
}

/// |du/dn|^2 at the boundary points gamma(phi) for the L^2-normalized
/// eigenfunction (the normalization of `pair` itself does not matter).
pub fn normal_derivative_sq(
    pair: &EigenPair,
    domain: &FourierDomain,
    phis: &[f64],
    quad: &QuadConfig,
) -> Result<Vec<f64>> {
    let (norm2, _) = interior_integrals(pair, domain, quad)?;
    let mut out = Vec::with_capacity(phis.len());
    for &phi in phis {
        let x = domain.point(phi);
        let n = domain.outward_normal(phi);
        let (_, g) = pair.eval_grad(x)?;
        let dudn = g[0] * n[0] + g[1] * n[1];
        out.push(dudn.norm_sqr() / norm2);
    }
    Ok(out)
}

/// Gradient of J(c) with respect to the 4N Fourier coefficients
/// (cx block first, then cy block). `domain` must have unit area and
/// `pair.lambda` must be a simple eigenvalue on it.
pub fn objective_gradient(
    pair: &EigenPair,
    domain: &FourierDomain,
    quad: &QuadConfig,
) -> Result<Vec<f64>> {
    if (domain.area() - 1.0).abs() > 1e-8 {
        return Err(Error::Invalid(format!(
            "objective gradient requires a unit-area domain, got area {}",
            domain.area()
        )));
    }
    let (norm2, dldb) = interior_integrals(pair, domain, quad)?;
    let b = pair.b;
    let factor = pair.lambda - b * dldb;
    let n = domain.n_harmonics;
    let m = quad.boundary_points;
    let dphi = 2.0 * PI / m as f64;
    let mut grad = vec![0.0; 4 * n];
    for k in 0..m {
        let phi = dphi * k as f64;
        let x = domain.point(phi);
        let [tx, ty] = domain.tangent(phi);
        let speed = (tx * tx + ty * ty).sqrt();
        let nrm = [ty / speed, -tx / speed];
        let (_, g) = pair.eval_grad(x)?;
        let dudn = g[0] * nrm[0] + g[1] * nrm[1];
        let q = dudn.norm_sqr() / norm2;
        let common = (factor - q) * speed * dphi;
        let f = domain.basis(phi);
        for i in 0..2 * n {
            grad[i] += common * f[i] * nrm[0];
            grad[2 * n + i] += common * f[i] * nrm[1];
        }
    }
    Ok(grad)
}

/// Search direction for a cluster of eigenvalues: the unit vector d
/// maximizing min_k <g_k, d> over the given gradients. This is the
/// normalized minimum-norm point of their convex hull; returns None when
/// the hull contains the origin (no common descent direction).
pub fn cluster_direction(grads: &[Vec<f64>]) -> Option<Vec<f64>> {
    let j = grads.len();
    assert!(j >= 1, "need at least one gradient");
    assert!(j <= 16, "cluster too large for subset enumeration");
    let dim = grads[0].len();
    // Gram matrix
    let mut gram = Array2::zeros((j, j));
    for a in 0..j {
        for b in 0..j {
            gram[[a, b]] = dot(&grads[a], &grads[b]);
        }
    }
    // minimum-norm point of the convex hull: enumerate support subsets and
    // solve the equality-constrained quadratic program on each
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << j) {
        let idx: Vec<usize> = (0..j).filter(|i| mask & (1 << i) != 0).collect();
        let s = idx.len();
        // minimize mu^T G mu with sum mu = 1:
        // [2G 1; 1^T 0] [mu; nu] = [0; 1]
        let mut kkt = Array2::zeros((s + 1, s + 1));
        for (p, &a) in idx.iter().enumerate() {
            for (q, &b) in idx.iter().enumerate() {
                kkt[[p, q]] = 2.0 * gram[[a, b]];
            }
            kkt[[p, s]] = 1.0;
            kkt[[s, p]] = 1.0;
        }
        let mut rhs = Array1::zeros(s + 1);
        rhs[s] = 1.0;
        let sol = match kkt.solve(&rhs) {
            Ok(v) => v,
            Err(_) => continue, // singular subset (collinear gradients)
        };
        let mu = &sol.as_slice().unwrap()[..s];
        if mu.iter().any(|&v| v < -1e-12) {
            continue;
        }
        let mut p = vec![0.0; dim];
        for (w, &a) in mu.iter().zip(idx.iter()) {
            for d in 0..dim {
                p[d] += w * grads[a][d];
            }
        }
        let nsq = dot(&p, &p);
        if best.as_ref().map_or(true, |(bn, _)| nsq < *bn) {
            best = Some((nsq, p));
        }
    }
    let (nsq, p) = best?;
    let scale = {
        let gmax = grads
            .iter()
            .map(|g| dot(g, g))
            .fold(0.0f64, f64::max)
            .max(f64::MIN_POSITIVE);
        gmax
    };
    if nsq < 1e-20 * scale {
        return None;
    }
    let norm = nsq.sqrt();
    Some(p.into_iter().map(|v| v / norm).collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diskspec;
    use crate::geometry::Spacing;
    use crate::mfs::{build_operator, eigenvalues_in, MfsParams};
    use approx::assert_relative_eq;

    fn disk_ground_state(b: f64) -> (FourierDomain, EigenPair) {
        let d = FourierDomain::circle(3, diskspec::UNIT_AREA_RADIUS);
        let p = MfsParams {
            m_boundary: 140,
            m_interior: 50,
            delta: 0.08,
            ..MfsParams::default()
        };
        let (_, op) = build_operator(&d, b, &p).unwrap();
        let lam1 = diskspec::unit_disk_eigenvalue(1, b).unwrap();
        let res = eigenvalues_in(&op, (b.max(lam1 - 2.0), lam1 + 2.0), &p, None).unwrap();
        (d, res.pairs[0].clone())
    }

    #[test]
    fn hellmann_feynman_matches_difference_quotient() {
        // oracle: the exact disk eigenvalue curve B -> lambda_1(D, B)
        let b = 6.0;
        let (d, pair) = disk_ground_state(b);
        let quad = QuadConfig {
            interior_points: 20_000,
            ..QuadConfig::default()
        };
        let dldb = dlambda_db(&pair, &d, &quad).unwrap();
        let h = 1e-4;
        let fd = (diskspec::unit_disk_eigenvalue(1, b + h).unwrap()
            - diskspec::unit_disk_eigenvalue(1, b - h).unwrap())
            / (2.0 * h);
        assert_relative_eq!(dldb, fd, max_relative = 2e-4);
    }

    #[test]
    fn hadamard_formula_for_dilating_disk() {
        // Dilation field V = x on a centred disk of radius R:
        // d/dt lambda((1+t) D_R, B) = -R * closed integral |du/dn|^2 dsigma,
        // with the oracle from the exact radius derivative.
        let b = 6.0;
        let r = diskspec::UNIT_AREA_RADIUS;
        let (d, pair) = disk_ground_state(b);
        let quad = QuadConfig::default();
        let m = 128;
        let phis: Vec<f64> = (0..m).map(|i| 2.0 * PI * i as f64 / m as f64).collect();
        let q = normal_derivative_sq(&pair, &d, &phis, &quad).unwrap();
        let integral: f64 = q.iter().sum::<f64>() / m as f64 * 2.0 * PI * r;
        let hadamard = -r * integral;
        let h = 1e-5;
        let fd = (diskspec::disk_spectrum(1, b, r * (1.0 + h)).unwrap()[0].lambda
            - diskspec::disk_spectrum(1, b, r * (1.0 - h)).unwrap()[0].lambda)
            / (2.0 * h);
        assert_relative_eq!(hadamard, fd, max_relative = 2e-3);
    }

    #[test]
    fn gradient_vanishes_along_symmetries() {
        // J is invariant under translations and dilations; the gradient
        // must be orthogonal to those directions.
        let b = 6.0;
        let (d, pair) = disk_ground_state(b);
        let quad = QuadConfig::default();
        let g = objective_gradient(&pair, &d, &quad).unwrap();
        let n = d.n_harmonics;
        // entries of dJ/dc scale like lambda for order-one coefficients
        let scale = pair.lambda;
        // translation directions: constant coefficient of cx and cy
        assert!(g[0].abs() < 1e-5 * scale, "d/dx translation: {}", g[0]);
        assert!(g[2 * n].abs() < 1e-5 * scale, "d/dy translation: {}", g[2 * n]);
        // dilation direction: c itself
        let mut c = Vec::with_capacity(4 * n);
        c.extend_from_slice(&d.cx);
        c.extend_from_slice(&d.cy);
        let along: f64 = g.iter().zip(c.iter()).map(|(a, b)| a * b).sum();
        assert!(along.abs() < 1e-5 * scale, "dilation component: {along}");
        // the disk is a critical point of lambda_1: the whole gradient is
        // small compared to the eigenvalue scale
        let gnorm: f64 = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(gnorm < 1e-3 * scale, "gradient norm {gnorm}");
    }

    #[test]
    fn cluster_direction_simple_cases() {
        // single gradient: its own normalization
        let g = vec![vec![3.0, 4.0]];
        let d = cluster_direction(&g).unwrap();
        assert_relative_eq!(d[0], 0.6, max_relative = 1e-12);
        assert_relative_eq!(d[1], 0.8, max_relative = 1e-12);

        // two symmetric gradients: the bisector
        let g = vec![vec![1.0, 1.0], vec![1.0, -1.0]];
        let d = cluster_direction(&g).unwrap();
        assert_relative_eq!(d[0], 1.0, max_relative = 1e-10);
        assert!(d[1].abs() < 1e-10);

        // opposing gradients: no common descent direction
        let g = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
        assert!(cluster_direction(&g).is_none());

        // the max-min value is attained and better than either endpoint
        let g1 = vec![2.0, 0.0, 0.0];
        let g2 = vec![0.0, 1.0, 0.0];
        let d = cluster_direction(&[g1.clone(), g2.clone()]).unwrap();
        let m_opt = dot(&g1, &d).min(dot(&g2, &d));
        for trial in [vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]] {
            let m_trial = dot(&g1, &trial).min(dot(&g2, &trial));
            assert!(m_opt >= m_trial - 1e-12);
        }
        // unit norm
        assert_relative_eq!(dot(&d, &d), 1.0, max_relative = 1e-12);
    }
}
