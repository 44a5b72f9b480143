//! Spectrum of the magnetic Dirichlet Laplacian on a disk.
//!
//! Separation in polar coordinates reduces the eigenvalue problem on a disk
//! of radius R to a one-dimensional root search: lambda is an eigenvalue in
//! the angular momentum sector l exactly when
//!
//! ```text
//! M( (l + |l| + 1 - lambda/B) / 2, |l| + 1, B R^2 / 2 ) = 0
//! ```
//!
//! where M is Kummer's function. For l <= 0 the first argument does not
//! depend on l, and eigenvalues in the sectors +l and -l are related by
//! lambda(+l) = lambda(-l) + 2 l B.

use crate::error::{Error, Result};
use crate::specfun::kummer_m;

/// One eigenvalue of the disk problem with its quantum numbers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskEigenvalue {
    pub lambda: f64,
    /// Angular momentum of the eigenfunction.
    pub l: i32,
    /// Radial index (1-based): which root in the sector `l`.
    pub k: u32,
}

/// Left-hand side of the disk eigenvalue equation.
pub fn residual(lambda: f64, l: i32, b: f64, radius: f64) -> Result<f64> {
    if !(b > 0.0) || !(radius > 0.0) {
        return Err(Error::Domain(format!(
            "residual: need B > 0 and R > 0, got B = {b}, R = {radius}"
        )));
    }
    let labs = l.unsigned_abs() as f64;
    let a = 0.5 * (l as f64 + labs + 1.0 - lambda / b);
    kummer_m(a, labs + 1.0, 0.5 * b * radius * radius)
}

// Roots of the residual in the sector l = -m (m >= 0), in (B, lambda_max],
// found by sign-change bracketing on a grid plus bisection.
fn sector_roots(m: u32, b: f64, radius: f64, lambda_max: f64) -> Result<Vec<f64>> {
    let mut roots = Vec::new();
    if lambda_max <= b {
        return Ok(roots);
    }
    // Consecutive radial roots are ~2B apart at high flux and no closer
    // than the Bessel-zero spacing ~24/R^2 in the weak-field regime, so
    // this step isolates them in either case. Eigenvalues can sit
    // arbitrarily close above B at high flux, so the residual is first
    // pinned just above the Landau level.
    let step = (b / 8.0).max(1.5 / (radius * radius));
    let mut lo = b * (1.0 + 1e-13);
    let mut flo = residual(lo, -(m as i32), b, radius)?;
    while lo < lambda_max {
        let hi = (lo + step).min(lambda_max);
        let fhi = residual(hi, -(m as i32), b, radius)?;
        if flo == 0.0 {
            roots.push(lo);
        } else if flo * fhi < 0.0 {
            roots.push(bisect(lo, hi, flo, -(m as i32), b, radius)?);
        }
        lo = hi;
        flo = fhi;
    }
    Ok(roots)
}

fn bisect(mut lo: f64, mut hi: f64, flo: f64, l: i32, b: f64, radius: f64) -> Result<f64> {
    let mut slo = flo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= 1e-15 * mid {
            return Ok(mid);
        }
        let fm = residual(mid, l, b, radius)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == slo {
            lo = mid;
            slo = fm.signum();
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The `n` smallest eigenvalues of the disk of radius `radius`, sorted
/// ascending, with angular momenta and radial indices.
pub fn disk_spectrum(n: usize, b: f64, radius: f64) -> Result<Vec<DiskEigenvalue>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if !(b > 0.0) || !(radius > 0.0) {
        return Err(Error::Domain(format!(
            "disk_spectrum: need B > 0 and R > 0, got B = {b}, R = {radius}"
        )));
    }
    // Weyl-type initial cap, grown on demand.
    let area = std::f64::consts::PI * radius * radius;
    let mut cap = b + 4.5 * (n as f64 + 1.0) / area + 8.0 / area;
    loop {
        let mut found: Vec<DiskEigenvalue> = Vec::new();
        let mut m = 0u32;
        loop {
            let neg = sector_roots(m, b, radius, cap)?;
            // The lowest root in sector -m increases with m; once a sector
            // contributes nothing below the cap, no later sector will.
            if neg.is_empty() {
                break;
            }
            for (i, &lam) in neg.iter().enumerate() {
                found.push(DiskEigenvalue {
                    lambda: lam,
                    l: -(m as i32),
                    k: (i + 1) as u32,
                });
                if m > 0 {
                    let lam_pos = lam + 2.0 * m as f64 * b;
                    if lam_pos <= cap {
                        found.push(DiskEigenvalue {
                            lambda: lam_pos,
                            l: m as i32,
                            k: (i + 1) as u32,
                        });
                    }
                }
            }
            m += 1;
        }
        if found.len() >= n {
            found.sort_by(|p, q| p.lambda.total_cmp(&q.lambda));
            found.truncate(n);
            return Ok(found);
        }
        cap = b + (cap - b) * 1.6;
    }
}

/// Radius of the disk with unit area.
pub const UNIT_AREA_RADIUS: f64 = 0.564_189_583_547_756_3;

/// n-th eigenvalue (1-based) of the unit-area disk.
pub fn unit_disk_eigenvalue(n: usize, b: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Invalid("eigenvalue index is 1-based".into()));
    }
    Ok(disk_spectrum(n, b, UNIT_AREA_RADIUS)?[n - 1].lambda)
}

/// n-th eigenvalue of a disk of given area, via the scaling identity
/// lambda_n(t Omega, B) = lambda_n(Omega, t^2 B) / t^2.
pub fn scaled_disk_eigenvalue(n: usize, area: f64, b: f64) -> Result<f64> {
    if !(area > 0.0) {
        return Err(Error::Domain(format!("need area > 0, got {area}")));
    }
    Ok(unit_disk_eigenvalue(n, area * b)? / area)
}
