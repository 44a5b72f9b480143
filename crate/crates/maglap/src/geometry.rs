//! Star-shaped-free boundary parametrization by truncated Fourier series,
//! admissibility checks, and the point layouts used by the eigensolver.
//!
//! A domain is described by its boundary curve
//!
//! ```text
//! gamma(phi) = ( cx . f(phi), cy . f(phi) ),   phi in [0, 2 pi),
//! f(phi) = (1, cos phi, ..., cos((N-1) phi), 0, sin phi, ..., sin((N-1) phi))
//! ```
//!
//! oriented anticlockwise. The basis deliberately keeps a zero slot at
//! index N so that the cosine and sine blocks have equal length and a
//! coefficient vector can be indexed uniformly.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A planar domain bounded by a truncated Fourier curve.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FourierDomain {
    /// Number of harmonics N (coefficient vectors have length 2N).
    #[serde(rename = "N")]
    pub n_harmonics: usize,
    pub cx: Vec<f64>,
    pub cy: Vec<f64>,
}

/// How collocation points are spread along the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Spacing {
    /// Equally spaced in the curve parameter phi.
    EqualParameter,
    /// Equally spaced in arc length.
    ArcLength,
}

/// Collocation, source and interior points for one domain.
#[derive(Clone, Debug)]
pub struct PointLayout {
    /// Boundary collocation points.
    pub collocation: Vec<[f64; 2]>,
    /// Parameter values of the collocation points.
    pub angles: Vec<f64>,
    /// Outward unit normals at the collocation points.
    pub normals: Vec<[f64; 2]>,
    /// Source points, offset distance `delta` outside the boundary.
    pub sources: Vec<[f64; 2]>,
    /// Random interior points.
    pub interior: Vec<[f64; 2]>,
    pub delta: f64,
}

impl FourierDomain {
    pub fn new(n_harmonics: usize, cx: Vec<f64>, cy: Vec<f64>) -> Result<Self> {
        if n_harmonics == 0 {
            return Err(Error::Invalid("need at least one harmonic".into()));
        }
        if cx.len() != 2 * n_harmonics || cy.len() != 2 * n_harmonics {
            return Err(Error::Invalid(format!(
                "coefficient vectors must have length 2N = {}, got {} and {}",
                2 * n_harmonics,
                cx.len(),
                cy.len()
            )));
        }
        Ok(FourierDomain { n_harmonics, cx, cy })
    }

    /// Anticlockwise circle of the given radius centred at the origin.
    pub fn circle(n_harmonics: usize, radius: f64) -> Self {
        let mut cx = vec![0.0; 2 * n_harmonics];
        let mut cy = vec![0.0; 2 * n_harmonics];
        cx[1] = radius;
        cy[n_harmonics + 1] = radius;
        FourierDomain { n_harmonics, cx, cy }
    }

    /// The basis vector f(phi).
    pub fn basis(&self, phi: f64) -> Vec<f64> {
        let n = self.n_harmonics;
        let mut f = vec![0.0; 2 * n];
        for j in 0..n {
            f[j] = (j as f64 * phi).cos();
        }
        for j in 1..n {
            f[n + j] = (j as f64 * phi).sin();
        }
        f
    }

    /// Boundary point gamma(phi).
    pub fn point(&self, phi: f64) -> [f64; 2] {
        let n = self.n_harmonics;
        let mut x = self.cx[0];
        let mut y = self.cy[0];
        for j in 1..n {
            let (s, c) = (j as f64 * phi).sin_cos();
            x += self.cx[j] * c + self.cx[n + j] * s;
            y += self.cy[j] * c + self.cy[n + j] * s;
        }
        [x, y]
    }

    /// Derivative gamma'(phi).
    pub fn tangent(&self, phi: f64) -> [f64; 2] {
        let n = self.n_harmonics;
        let mut x = 0.0;
        let mut y = 0.0;
        for j in 1..n {
            let jf = j as f64;
            let (s, c) = (jf * phi).sin_cos();
            x += jf * (-self.cx[j] * s + self.cx[n + j] * c);
            y += jf * (-self.cy[j] * s + self.cy[n + j] * c);
        }
        [x, y]
    }

    /// Second derivative gamma''(phi).
    pub fn second_derivative(&self, phi: f64) -> [f64; 2] {
        let n = self.n_harmonics;
        let mut x = 0.0;
        let mut y = 0.0;
        for j in 1..n {
            let jf = j as f64;
            let (s, c) = (jf * phi).sin_cos();
            x -= jf * jf * (self.cx[j] * c + self.cx[n + j] * s);
            y -= jf * jf * (self.cy[j] * c + self.cy[n + j] * s);
        }
        [x, y]
    }

    /// Signed curvature at phi.
    pub fn curvature(&self, phi: f64) -> f64 {
        let [tx, ty] = self.tangent(phi);
        let [sx, sy] = self.second_derivative(phi);
        let speed2 = tx * tx + ty * ty;
        (tx * sy - ty * sx) / speed2.powf(1.5)
    }

    /// Outward unit normal at phi (assumes anticlockwise orientation).
    pub fn outward_normal(&self, phi: f64) -> [f64; 2] {
        let [tx, ty] = self.tangent(phi);
        let norm = (tx * tx + ty * ty).sqrt();
        [ty / norm, -tx / norm]
    }

    /// Signed enclosed area, in closed form from the coefficients:
    /// area = pi * sum_j j (a_xj b_yj - b_xj a_yj).
    pub fn area(&self) -> f64 {
        let n = self.n_harmonics;
        let mut s = 0.0;
        for j in 1..n {
            s += j as f64 * (self.cx[j] * self.cy[n + j] - self.cx[n + j] * self.cy[j]);
        }
        PI * s
    }

    /// Winding number of the boundary curve around `p`, by summing wrapped
    /// angle increments over a uniform parameter grid.
    pub fn winding_number(&self, p: [f64; 2], quad_points: usize) -> i32 {
        let m = quad_points.max(8);
        let mut total = 0.0;
        let [x0, y0] = self.point(0.0);
        let mut prev = (y0 - p[1]).atan2(x0 - p[0]);
        for i in 1..=m {
            let phi = 2.0 * PI * i as f64 / m as f64;
            let [x, y] = self.point(phi);
            let ang = (y - p[1]).atan2(x - p[0]);
            let mut d = ang - prev;
            while d > PI {
                d -= 2.0 * PI;
            }
            while d < -PI {
                d += 2.0 * PI;
            }
            total += d;
            prev = ang;
        }
        (total / (2.0 * PI)).round() as i32
    }

    /// Whether `p` lies inside the domain.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.winding_number(p, 512) != 0
    }

    /// Minimal distance from `p` to a polyline sampling of the boundary.
    pub fn boundary_distance(&self, p: [f64; 2], samples: usize) -> f64 {
        let mut best = f64::INFINITY;
        let mut prev = self.point(0.0);
        for i in 1..=samples {
            let phi = 2.0 * PI * i as f64 / samples as f64;
            let cur = self.point(phi);
            best = best.min(segment_distance(p, prev, cur));
            prev = cur;
        }
        best
    }

    /// Check that the curve bounds a valid domain: positive area
    /// (anticlockwise orientation), non-degenerate tangent, and no
    /// self-intersections of the sampled polyline.
    pub fn admissibility(&self, samples: usize) -> std::result::Result<(), String> {
        let m = samples.max(64);
        if !(self.area() > 0.0) {
            return Err(format!(
                "signed area {} is not positive (clockwise or degenerate curve)",
                self.area()
            ));
        }
        // degenerate tangent: speed too small relative to the curve scale
        let scale = self.area().sqrt();
        let pts: Vec<[f64; 2]> = (0..m)
            .map(|i| self.point(2.0 * PI * i as f64 / m as f64))
            .collect();
        for i in 0..m {
            let phi = 2.0 * PI * i as f64 / m as f64;
            let [tx, ty] = self.tangent(phi);
            if (tx * tx + ty * ty).sqrt() < 1e-6 * scale {
                return Err(format!("degenerate tangent near phi = {phi:.4}"));
            }
        }
        // polyline self-intersection, skipping adjacent segments
        for i in 0..m {
            let a0 = pts[i];
            let a1 = pts[(i + 1) % m];
            for j in (i + 2)..m {
                if i == 0 && j == m - 1 {
                    continue;
                }
                let b0 = pts[j];
                let b1 = pts[(j + 1) % m];
                if segments_intersect(a0, a1, b0, b1) {
                    return Err(format!(
                        "boundary self-intersects (segments {i} and {j} of {m})"
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn is_admissible(&self, samples: usize) -> bool {
        self.admissibility(samples).is_ok()
    }

    /// Rescale the coefficients so the enclosed area becomes 1.
    pub fn normalize_area(&self) -> Result<FourierDomain> {
        let a = self.area();
        if !(a > 0.0) {
            return Err(Error::Inadmissible(format!(
                "cannot normalize area {a} (not positive)"
            )));
        }
        let s = 1.0 / a.sqrt();
        let mut d = self.clone();
        for v in d.cx.iter_mut().chain(d.cy.iter_mut()) {
            *v *= s;
        }
        Ok(d)
    }

    /// Rigid rotation by `angle` about the origin.
    pub fn rotated(&self, angle: f64) -> FourierDomain {
        let (s, c) = angle.sin_cos();
        let mut d = self.clone();
        for i in 0..self.cx.len() {
            d.cx[i] = c * self.cx[i] - s * self.cy[i];
            d.cy[i] = s * self.cx[i] + c * self.cy[i];
        }
        d
    }

    /// Rigid translation.
    pub fn translated(&self, dx: f64, dy: f64) -> FourierDomain {
        let mut d = self.clone();
        d.cx[0] += dx;
        d.cy[0] += dy;
        d
    }

    /// Parameter values for `m` collocation points with the given spacing.
    pub fn collocation_angles(&self, m: usize, spacing: Spacing) -> Vec<f64> {
        match spacing {
            Spacing::EqualParameter => (0..m).map(|i| 2.0 * PI * i as f64 / m as f64).collect(),
            Spacing::ArcLength => {
                // invert the cumulative arc length on a fine grid
                let fine = (16 * m).max(2048);
                let mut cum = Vec::with_capacity(fine + 1);
                cum.push(0.0);
                let h = 2.0 * PI / fine as f64;
                let mut acc = 0.0;
                let mut prev = speed(self, 0.0);
                for i in 1..=fine {
                    let cur = speed(self, h * i as f64);
                    acc += 0.5 * (prev + cur) * h;
                    cum.push(acc);
                    prev = cur;
                }
                let total = acc;
                let mut out = Vec::with_capacity(m);
                let mut idx = 0usize;
                for k in 0..m {
                    let target = total * k as f64 / m as f64;
                    while idx + 1 < cum.len() && cum[idx + 1] < target {
                        idx += 1;
                    }
                    let t = if cum[idx + 1] > cum[idx] {
                        (target - cum[idx]) / (cum[idx + 1] - cum[idx])
                    } else {
                        0.0
                    };
                    out.push(h * (idx as f64 + t));
                }
                out
            }
        }
    }

    /// Build collocation, source and interior points.
    ///
    /// Sources sit a distance `delta` outside the boundary along the
    /// outward normal; the construction fails if any of them lands inside
    /// the domain (which happens when `delta` exceeds a concave feature's
    /// reach). Interior points are drawn from a seeded generator by
    /// rejection sampling.
    pub fn layout(
        &self,
        m_boundary: usize,
        m_interior: usize,
        delta: f64,
        spacing: Spacing,
        seed: u64,
    ) -> Result<PointLayout> {
        if m_boundary < 8 {
            return Err(Error::Invalid("need at least 8 collocation points".into()));
        }
        if !(delta > 0.0) {
            return Err(Error::Invalid(format!("need delta > 0, got {delta}")));
        }
        let angles = self.collocation_angles(m_boundary, spacing);
        let mut collocation = Vec::with_capacity(m_boundary);
        let mut normals = Vec::with_capacity(m_boundary);
        let mut sources = Vec::with_capacity(m_boundary);
        for &phi in &angles {
            let p = self.point(phi);
            let nrm = self.outward_normal(phi);
            if !nrm[0].is_finite() || !nrm[1].is_finite() {
                return Err(Error::Inadmissible(format!(
                    "degenerate tangent at phi = {phi:.4}"
                )));
            }
            let src = [p[0] + delta * nrm[0], p[1] + delta * nrm[1]];
            if self.winding_number(src, 1024) != 0 {
                return Err(Error::Inadmissible(format!(
                    "source point at phi = {phi:.4} falls inside the domain; \
                     reduce delta ({delta})"
                )));
            }
            collocation.push(p);
            normals.push(nrm);
            sources.push(src);
        }
        // bounding box for rejection sampling
        let (lo, hi) = self.bounding_box(512);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let margin = 1e-3 * self.area().abs().sqrt();
        let mut interior = Vec::with_capacity(m_interior);
        let mut attempts = 0usize;
        while interior.len() < m_interior {
            attempts += 1;
            if attempts > 10_000 * (m_interior + 1) {
                return Err(Error::Numerical(
                    "interior point sampling failed; domain may be degenerate".into(),
                ));
            }
            let p = [
                rng.gen_range(lo[0]..hi[0]),
                rng.gen_range(lo[1]..hi[1]),
            ];
            if self.contains(p) && self.boundary_distance(p, 256) > margin {
                interior.push(p);
            }
        }
        Ok(PointLayout {
            collocation,
            angles,
            normals,
            sources,
            interior,
            delta,
        })
    }

    /// Axis-aligned bounding box of the sampled boundary.
    pub fn bounding_box(&self, samples: usize) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for i in 0..samples {
            let p = self.point(2.0 * PI * i as f64 / samples as f64);
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        (lo, hi)
    }
}

/// The asymmetric test domain used throughout the examples and benchmarks:
/// x = cos phi + 0.05 cos 2 phi + 0.1 sin 4 phi,
/// y = sin phi - 0.05 cos 6 phi - 0.05 sin 4 phi.
/// It encloses area pi.
pub fn omega_test() -> FourierDomain {
    let n = 7;
    let mut cx = vec![0.0; 2 * n];
    let mut cy = vec![0.0; 2 * n];
    cx[1] = 1.0;
    cx[2] = 0.05;
    cx[n + 4] = 0.1;
    cy[n + 1] = 1.0;
    cy[6] = -0.05;
    cy[n + 4] = -0.05;
    FourierDomain { n_harmonics: n, cx, cy }
}

fn speed(d: &FourierDomain, phi: f64) -> f64 {
    let [tx, ty] = d.tangent(phi);
    (tx * tx + ty * ty).sqrt()
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let q = [a[0] + t * ab[0], a[1] + t * ab[1]];
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

fn segments_intersect(a0: [f64; 2], a1: [f64; 2], b0: [f64; 2], b1: [f64; 2]) -> bool {
    let d1 = cross(b0, b1, a0);
    let d2 = cross(b0, b1, a1);
    let d3 = cross(a0, a1, b0);
    let d4 = cross(a0, a1, b1);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Quadrature nodes and weights for integrals over the interior of a
/// domain: `sum_k weights[k] * f(points[k])` approximates the integral.
pub struct InteriorQuadrature {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl InteriorQuadrature {
    /// Apply the rule to a function of the node.
    pub fn integrate<F: FnMut([f64; 2]) -> Result<f64>>(&self, mut f: F) -> Result<f64> {
        let mut s = 0.0;
        for (p, w) in self.points.iter().zip(self.weights.iter()) {
            s += w * f(*p)?;
        }
        Ok(s)
    }
}

// Gauss-Legendre nodes and weights on [0, 1].
fn gauss_legendre_01(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // Legendre P_n and derivative by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        // recompute derivative at the converged node for the weight
        let mut p0 = 1.0;
        let mut p1 = x;
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = 0.5 * (x + 1.0);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Centroid of the enclosed region, from boundary integrals.
pub fn centroid(domain: &FourierDomain) -> [f64; 2] {
    let m = 1024;
    let a = domain.area();
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..m {
        let phi = 2.0 * PI * i as f64 / m as f64;
        let [x, y] = domain.point(phi);
        let [tx, ty] = domain.tangent(phi);
        cx += x * x * ty;
        cy -= y * y * tx;
    }
    let h = 2.0 * PI / m as f64;
    [cx * h / (2.0 * a), cy * h / (2.0 * a)]
}

/// Tensor quadrature on the polar-like map (rho, phi) -> c + rho (gamma(phi) - c)
/// about the centroid c: Gauss-Legendre radially, trapezoid angularly.
/// Both directions see smooth integrands, so this converges far faster than
/// rejection sampling. Returns None when the domain is not star-shaped with
/// respect to its centroid (the map would fold over).
pub fn star_quadrature(
    domain: &FourierDomain,
    n_radial: usize,
    n_angular: usize,
) -> Option<InteriorQuadrature> {
    let c = centroid(domain);
    let scale2 = domain.area().abs();
    // jacobian factor rho * (d x d') with d(phi) = gamma(phi) - c must stay
    // positive: probe on a fine grid first
    let probe = (4 * n_angular).max(512);
    for i in 0..probe {
        let phi = 2.0 * PI * i as f64 / probe as f64;
        let [x, y] = domain.point(phi);
        let [tx, ty] = domain.tangent(phi);
        let d = [x - c[0], y - c[1]];
        if d[0] * ty - d[1] * tx < 1e-6 * scale2 {
            return None;
        }
    }
    let (rho, wr) = gauss_legendre_01(n_radial);
    let dphi = 2.0 * PI / n_angular as f64;
    let mut points = Vec::with_capacity(n_radial * n_angular);
    let mut weights = Vec::with_capacity(n_radial * n_angular);
    for j in 0..n_angular {
        let phi = dphi * j as f64;
        let [x, y] = domain.point(phi);
        let [tx, ty] = domain.tangent(phi);
        let d = [x - c[0], y - c[1]];
        let jac_phi = d[0] * ty - d[1] * tx;
        for i in 0..n_radial {
            points.push([c[0] + rho[i] * d[0], c[1] + rho[i] * d[1]]);
            weights.push(wr[i] * rho[i] * jac_phi * dphi);
        }
    }
    Some(InteriorQuadrature { points, weights })
}

/// Interior quadrature with `target_points` nodes: the star-shaped tensor
/// rule when the geometry allows it, quasi-Monte-Carlo rejection sampling
/// otherwise.
pub fn domain_quadrature(
    domain: &FourierDomain,
    target_points: usize,
    seed: u64,
) -> Result<InteriorQuadrature> {
    let n_radial = (((target_points as f64) / 8.0).sqrt().ceil() as usize).max(8);
    let n_angular = (target_points / n_radial).max(32);
    if let Some(q) = star_quadrature(domain, n_radial, n_angular) {
        return Ok(q);
    }
    interior_quadrature(domain, target_points, seed)
}

/// Quasi-Monte-Carlo nodes: a low-discrepancy sequence over the bounding
/// box (with a seeded random shift) filtered by membership; every accepted
/// node carries the same weight `bbox_area / count_drawn`. Works for any
/// admissible domain, converges slower than [`star_quadrature`].
pub fn interior_quadrature(
    domain: &FourierDomain,
    target_points: usize,
    seed: u64,
) -> Result<InteriorQuadrature> {
    let (lo, hi) = domain.bounding_box(512);
    let bbox_area = (hi[0] - lo[0]) * (hi[1] - lo[1]);
    if !(bbox_area > 0.0) {
        return Err(Error::Inadmissible("degenerate bounding box".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift = [rng.gen::<f64>(), rng.gen::<f64>()];
    // additive recurrence with the plastic-constant ratios
    const G1: f64 = 0.754_877_666_246_692_9;
    const G2: f64 = 0.569_840_290_998_053_2;
    let frac_inside = domain.area() / bbox_area;
    let total = ((target_points as f64 / frac_inside).ceil() as usize).max(target_points);
    let mut points = Vec::with_capacity(target_points + 16);
    let mut drawn = 0usize;
    let mut k = 0usize;
    while points.len() < target_points {
        drawn += 1;
        k += 1;
        if drawn > 50 * total + 1000 {
            return Err(Error::Numerical(
                "quadrature sampling failed to fill the domain".into(),
            ));
        }
        let u = (shift[0] + G1 * k as f64).fract();
        let v = (shift[1] + G2 * k as f64).fract();
        let p = [lo[0] + u * (hi[0] - lo[0]), lo[1] + v * (hi[1] - lo[1])];
        if domain.contains(p) {
            points.push(p);
        }
    }
    let w = bbox_area / drawn as f64;
    let weights = vec![w; points.len()];
    Ok(InteriorQuadrature { points, weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // numerical area oracle: (1/2) closed integral (x y' - y x') d phi
    fn area_quadrature(d: &FourierDomain, m: usize) -> f64 {
        let mut s = 0.0;
        for i in 0..m {
            let phi = 2.0 * PI * i as f64 / m as f64;
            let [x, y] = d.point(phi);
            let [tx, ty] = d.tangent(phi);
            s += x * ty - y * tx;
        }
        0.5 * s * 2.0 * PI / m as f64
    }

    #[test]
    fn closed_form_area_matches_quadrature() {
        let d = omega_test();
        assert_relative_eq!(d.area(), area_quadrature(&d, 4096), max_relative = 1e-12);
        assert_relative_eq!(d.area(), PI, max_relative = 1e-14);
        let c = FourierDomain::circle(5, 0.7);
        assert_relative_eq!(c.area(), PI * 0.49, max_relative = 1e-14);
        assert_relative_eq!(c.area(), area_quadrature(&c, 4096), max_relative = 1e-12);
    }

    #[test]
    fn omega_test_boundary_points() {
        let d = omega_test();
        let p0 = d.point(0.0);
        assert_relative_eq!(p0[0], 1.05, max_relative = 1e-15);
        assert_relative_eq!(p0[1], -0.05, max_relative = 1e-12);
    }

    #[test]
    fn winding_number_inside_outside() {
        let d = omega_test();
        assert_eq!(d.winding_number([0.0, 0.0], 512), 1);
        assert_eq!(d.winding_number([0.3, -0.2], 512), 1);
        assert_eq!(d.winding_number([2.0, 0.0], 512), 0);
        assert_eq!(d.winding_number([0.0, -1.5], 512), 0);
        assert!(d.contains([0.1, 0.4]));
        assert!(!d.contains([-1.4, 1.2]));
    }

    #[test]
    fn circle_normals_point_radially_outward() {
        let c = FourierDomain::circle(4, 2.0);
        for i in 0..16 {
            let phi = 2.0 * PI * i as f64 / 16.0;
            let n = c.outward_normal(phi);
            assert_relative_eq!(n[0], phi.cos(), epsilon = 1e-14);
            assert_relative_eq!(n[1], phi.sin(), epsilon = 1e-14);
        }
    }

    #[test]
    fn admissibility_checks() {
        assert!(omega_test().is_admissible(512));
        assert!(FourierDomain::circle(3, 1.0).is_admissible(512));

        // clockwise circle: negative area
        let mut cw = FourierDomain::circle(3, 1.0);
        cw.cy[4] = -1.0;
        assert!(!cw.is_admissible(512));

        // limacon with an inner loop: self-intersecting
        let n = 3;
        let mut cx = vec![0.0; 2 * n];
        let mut cy = vec![0.0; 2 * n];
        cx[0] = 0.75;
        cx[1] = 1.0;
        cx[2] = 0.75;
        cy[n + 1] = 1.0;
        cy[n + 2] = 0.75;
        let limacon = FourierDomain { n_harmonics: n, cx, cy };
        let err = limacon.admissibility(512).unwrap_err();
        assert!(err.contains("self-intersect"), "{err}");
    }

    #[test]
    fn normalize_area_scales_to_one() {
        let d = omega_test().normalize_area().unwrap();
        assert_relative_eq!(d.area(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn rotation_preserves_area_and_admissibility() {
        let d = omega_test().rotated(0.83);
        assert_relative_eq!(d.area(), PI, max_relative = 1e-13);
        assert!(d.is_admissible(512));
        let p = d.point(1.3);
        let q = omega_test().point(1.3);
        let (s, c) = 0.83f64.sin_cos();
        assert_relative_eq!(p[0], c * q[0] - s * q[1], epsilon = 1e-13);
        assert_relative_eq!(p[1], s * q[0] + c * q[1], epsilon = 1e-13);
    }

    #[test]
    fn json_round_trip() {
        let d = omega_test();
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.contains("\"N\":7"));
        let back: FourierDomain = serde_json::from_str(&s).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn layout_geometry() {
        let d = omega_test();
        let lay = d
            .layout(64, 20, 0.1, Spacing::EqualParameter, 42)
            .unwrap();
        assert_eq!(lay.collocation.len(), 64);
        assert_eq!(lay.sources.len(), 64);
        assert_eq!(lay.interior.len(), 20);
        for s in &lay.sources {
            assert!(!d.contains(*s), "source {s:?} inside domain");
        }
        for p in &lay.interior {
            assert!(d.contains(*p), "interior point {p:?} outside domain");
        }
        // determinism
        let lay2 = d.layout(64, 20, 0.1, Spacing::EqualParameter, 42).unwrap();
        assert_eq!(lay.interior, lay2.interior);
        let lay3 = d.layout(64, 20, 0.1, Spacing::EqualParameter, 43).unwrap();
        assert_ne!(lay.interior, lay3.interior);
    }

    #[test]
    fn arc_length_spacing_equalizes_segments() {
        // an eccentric ellipse: parameter spacing is far from uniform in
        // arc length, the ArcLength option fixes that
        let mut d = FourierDomain::circle(3, 1.0);
        d.cx[1] = 3.0;
        let angles = d.collocation_angles(128, Spacing::ArcLength);
        let mut lens = Vec::new();
        for i in 0..128 {
            let a = d.point(angles[i]);
            let b = d.point(angles[(i + 1) % 128]);
            lens.push(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
        }
        let max = lens.iter().cloned().fold(0.0, f64::max);
        let min = lens.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min < 1.05, "max/min = {}", max / min);
    }

    #[test]
    fn interior_quadrature_integrates_area() {
        let d = omega_test();
        let q = interior_quadrature(&d, 4000, 7).unwrap();
        let approx_area: f64 = q.weights.iter().sum();
        assert_relative_eq!(approx_area, d.area(), max_relative = 5e-3);
        // integrate x^2 + y^2 over the unit disk: pi/2
        let c = FourierDomain::circle(3, 1.0);
        let q = interior_quadrature(&c, 8000, 3).unwrap();
        let val = q.integrate(|p| Ok(p[0] * p[0] + p[1] * p[1])).unwrap();
        assert_relative_eq!(val, PI / 2.0, max_relative = 5e-3);

        // the star-shaped tensor rule is far more accurate
        let q = star_quadrature(&c, 24, 96).unwrap();
        let val = q.integrate(|p| Ok(p[0] * p[0] + p[1] * p[1])).unwrap();
        assert_relative_eq!(val, PI / 2.0, max_relative = 1e-10);
        let q = star_quadrature(&d, 24, 96).unwrap();
        let a: f64 = q.weights.iter().sum();
        assert_relative_eq!(a, d.area(), max_relative = 1e-10);

        // a non-star-shaped domain falls back to sampling
        let q = domain_quadrature(&d, 4000, 5).unwrap();
        let a: f64 = q.weights.iter().sum();
        assert_relative_eq!(a, d.area(), max_relative = 1e-8);
    }
}
