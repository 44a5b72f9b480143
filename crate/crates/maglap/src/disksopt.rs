//! Minimization of lambda_n over disjoint unions of disks.
//!
//! The spectrum of a union of disks is the merged spectrum of its parts, so
//! the n-th eigenvalue of k disks with areas t_j (summing to 1) is a min-max
//! over partitions (n_1, ..., n_k) of n:
//!
//!   max_j lambda_{n_j}(D, t_j B) / t_j
//!
//! with D the unit-area disk. The fixed-count auxiliary value
//! aux_lambda(n, k, B) minimizes this over descending partitions into
//! exactly k positive parts and over the open area simplex; the envelope
//! lambda_over_disk_unions takes the minimum over disk counts, capped at n
//! since extra disks collapse. wolf_keller_combine applies the same
//! two-part split to tabulated minimizer curves of arbitrary domains.

use crate::diskspec;
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Optimal configuration of a disjoint-disks min-max problem.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DisksMinMaxResult {
    /// The minimal n-th eigenvalue.
    pub value: f64,
    /// How many of the lowest n eigenvalues each disk carries (descending).
    pub partition: Vec<usize>,
    /// Disk areas, summing to 1.
    pub measures: Vec<f64>,
    /// Number of non-collapsed disks.
    pub k_effective: usize,
}

/// All partitions of `n` into exactly `k` positive parts, each written in
/// descending order.
pub fn partitions(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn recurse(rest: usize, slots: usize, cap: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 0 {
            if rest == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        // each remaining slot needs at least 1
        let hi = cap.min(rest + 1 - slots);
        for p in (1..=hi).rev() {
            prefix.push(p);
            recurse(rest - p, slots - 1, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if k >= 1 && k <= n {
        recurse(n, k, n, &mut Vec::new(), &mut out);
    }
    out
}

// lambda_{n_j}(D, t B) / t, the contribution of a disk of area t
fn term(nj: usize, t: f64, b: f64) -> Result<f64> {
    Ok(diskspec::unit_disk_eigenvalue(nj, t * b)? / t)
}

fn max_term(parts: &[usize], t: &[f64], b: f64) -> Result<f64> {
    let mut m = 0.0f64;
    for (&nj, &tj) in parts.iter().zip(t) {
        m = m.max(term(nj, tj, b)?);
    }
    Ok(m)
}

// golden-section minimization of f over [lo, hi] to absolute tolerance
fn golden<F: FnMut(f64) -> Result<f64>>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 < f2 { (x1, f1) } else { (x2, f2) })
}

// minimize max(g1(t), g2(s - t)) over t in (0, s): prescan plus golden;
// `fine` additionally polishes via bisection of the term difference
fn pair_min(n1: usize, n2: usize, s: f64, b: f64, floor: f64, fine: bool) -> Result<(f64, f64)> {
    let m = if fine { 64usize } else { 10 };
    let mut best = (f64::INFINITY, 0.5 * s);
    for i in 1..m {
        let t = s * i as f64 / m as f64;
        let v = term(n1, t, b)?.max(term(n2, s - t, b)?).max(floor);
        if v < best.0 {
            best = (v, t);
        }
    }
    let h = s / m as f64;
    let lo = (best.1 - h).max(1e-6 * s);
    let hi = (best.1 + h).min(s - 1e-6 * s);
    let tol = if fine { 1e-7 * s } else { 3e-4 * s };
    let (t, v) = golden(
        |t| Ok(term(n1, t, b)?.max(term(n2, s - t, b)?).max(floor)),
        lo,
        hi,
        tol,
    )?;
    if !fine {
        return Ok((t, v));
    }
    // at an interior optimum the two terms cross; bisecting their
    // difference is far more accurate than the golden bracket
    let (mut a, mut c) = ((t - 1e-6 * s).max(lo), (t + 1e-6 * s).min(hi));
    let d = |t: f64| -> Result<f64> { Ok(term(n1, t, b)? - term(n2, s - t, b)?) };
    let da = d(a)?;
    let dc = d(c)?;
    if da * dc < 0.0 {
        for _ in 0..45 {
            let mid = 0.5 * (a + c);
            if d(mid)? * da > 0.0 {
                a = mid;
            } else {
                c = mid;
            }
        }
        let t = 0.5 * (a + c);
        let v = term(n1, t, b)?.max(term(n2, s - t, b)?).max(floor);
        return Ok((t, v));
    }
    Ok((t, v))
}

// damped multiplicative equalization of the terms on the simplex
fn equalize(parts: &[usize], t: &mut [f64], b: f64) -> Result<f64> {
    let k = parts.len();
    let mut g = vec![0.0; k];
    let mut best = f64::INFINITY;
    let mut best_t = t.to_vec();
    for _ in 0..200 {
        for j in 0..k {
            g[j] = term(parts[j], t[j], b)?;
        }
        let vmax = g.iter().cloned().fold(f64::MIN, f64::max);
        let vmin = g.iter().cloned().fold(f64::MAX, f64::min);
        if vmax < best {
            best = vmax;
            best_t.copy_from_slice(t);
        }
        if (vmax - vmin) / vmax < 1e-14 {
            break;
        }
        let mean: f64 = t.iter().zip(&g).map(|(ti, gi)| ti * gi).sum();
        let mut sum = 0.0;
        for j in 0..k {
            // terms decrease with area: give underperformers more
            t[j] *= (g[j] / mean).powf(0.7);
            sum += t[j];
        }
        for tj in t.iter_mut() {
            *tj /= sum;
        }
    }
    t.copy_from_slice(&best_t);
    Ok(best)
}

// minimize max_j term(parts[j], t_j) over the simplex for a fixed partition
fn solve_partition(
    parts: &[usize],
    b: f64,
    restarts: usize,
    seed: u64,
    hint: Option<&[f64]>,
) -> Result<(f64, Vec<f64>)> {
    let k = parts.len();
    if k == 1 {
        return Ok((term(parts[0], 1.0, b)?, vec![1.0]));
    }
    if k == 2 {
        let (t, v) = pair_min(parts[0], parts[1], 1.0, b, 0.0, true)?;
        return Ok((v, vec![t, 1.0 - t]));
    }
    // candidate start points: uniform, caller hint, random simplex draws
    let mut starts: Vec<Vec<f64>> = vec![vec![1.0 / k as f64; k]];
    if let Some(h) = hint {
        starts.push(h.to_vec());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts {
        let draws: Vec<f64> = (0..k).map(|_| -f64::ln(rng.gen_range(1e-12..1.0))).collect();
        let sum: f64 = draws.iter().sum();
        starts.push(draws.iter().map(|d| d / sum).collect());
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mut t in starts {
        // coarse pairwise coordinate descent; only the winner gets polished
        let mut val = max_term(parts, &t, b)?;
        for _ in 0..3 {
            let before = val;
            for i in 0..k {
                for j in (i + 1)..k {
                    let s = t[i] + t[j];
                    let floor = {
                        let mut m = 0.0f64;
                        for (l, &nj) in parts.iter().enumerate() {
                            if l != i && l != j {
                                m = m.max(term(nj, t[l], b)?);
                            }
                        }
                        m
                    };
                    let (ti, _) = pair_min(parts[i], parts[j], s, b, floor, false)?;
                    t[i] = ti;
                    t[j] = s - ti;
                }
            }
            val = max_term(parts, &t, b)?;
            if before - val < 1e-5 * val {
                break;
            }
        }
        if best.as_ref().map_or(true, |(bv, _)| val < *bv) {
            best = Some((val, t));
        }
    }
    let (val, mut t) = best.expect("at least the uniform start ran");
    let polished = equalize(parts, &mut t, b)?;
    Ok((polished.min(val), t))
}

// perturbation certificate: nudging each area must not beat the value
fn certify(parts: &[usize], t: &[f64], b: f64, value: f64, tol: f64) -> Result<bool> {
    let k = parts.len();
    if k == 1 {
        return Ok(true);
    }
    for i in 0..k {
        for sign in [-1.0, 1.0] {
            let mut p = t.to_vec();
            p[i] = (p[i] + sign * 1e-4).clamp(1e-8, 1.0);
            let sum: f64 = p.iter().sum();
            for pj in p.iter_mut() {
                *pj /= sum;
            }
            if max_term(parts, &p, b)? < value - tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The auxiliary value of the disjoint-disks problem for exactly `k` disks,
/// minimized over descending partitions of `n` and disk areas.
pub fn aux_lambda(n: usize, k: usize, b: f64, tol: f64) -> Result<DisksMinMaxResult> {
    aux_lambda_hinted(n, k, b, tol, None)
}

/// Like [`aux_lambda`], with a warm-start hint (typically the result at a
/// nearby field strength) that speeds up curve sweeps.
pub fn aux_lambda_hinted(
    n: usize,
    k: usize,
    b: f64,
    tol: f64,
    hint: Option<&DisksMinMaxResult>,
) -> Result<DisksMinMaxResult> {
    if k == 0 || k > n {
        return Err(Error::Invalid(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    if !(b > 0.0) {
        return Err(Error::Invalid("field strength must be positive".into()));
    }
    let mut best: Option<DisksMinMaxResult> = None;
    for parts in partitions(n, k) {
        let hint_t = hint
            .filter(|h| h.partition == parts)
            .map(|h| h.measures.as_slice());
        // a matching hint puts us in the right basin already: the
        // equalization polish alone recovers the optimum
        let (mut value, mut t) = match hint_t {
            Some(h) if k > 2 => {
                let mut t = h.to_vec();
                let v = equalize(&parts, &mut t, b)?;
                (v, t)
            }
            _ => solve_partition(&parts, b, 6, 17, hint_t)?,
        };
        // certificate: a small perturbation must not do better
        if !certify(&parts, &t, b, value, tol)? {
            let (v2, t2) = solve_partition(&parts, b, 16, 18, Some(&t))?;
            if v2 < value {
                value = v2;
                t = t2;
            }
        }
        if best.as_ref().map_or(true, |r| value < r.value) {
            best = Some(DisksMinMaxResult {
                value,
                partition: parts,
                measures: t,
                k_effective: k,
            });
        }
    }
    Ok(best.expect("every (n, k) with k <= n has a partition"))
}

/// The minimal n-th eigenvalue over unions of at most `k_cap` disjoint
/// disks of total area 1; `None` means unbounded, which the collapsing
/// argument reduces to `n` disks.
pub fn lambda_over_disk_unions(n: usize, k_cap: Option<usize>, b: f64) -> Result<DisksMinMaxResult> {
    let k_max = k_cap.unwrap_or(n).min(n);
    if k_max == 0 {
        return Err(Error::Invalid("need at least one disk".into()));
    }
    let mut best: Option<DisksMinMaxResult> = None;
    for k in 1..=k_max {
        let r = aux_lambda(n, k, b, 1e-9)?;
        if best.as_ref().map_or(true, |br| r.value < br.value) {
            best = Some(r);
        }
    }
    Ok(best.unwrap())
}

/// One row of the auxiliary-curve table for a field strength.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnionCurvePoint {
    pub b: f64,
    /// aux[k-1] is the fixed-count value for k disks.
    pub aux: Vec<f64>,
    /// Envelope over all disk counts.
    pub envelope: f64,
    /// Disk count achieving the envelope.
    pub argmin_k: usize,
}

/// Tabulate all auxiliary curves and the unbounded envelope of the
/// disjoint-disks problem over a grid of field strengths. Results at one
/// field warm-start the next.
pub fn union_curve(n: usize, b_grid: &[f64]) -> Result<Vec<UnionCurvePoint>> {
    let mut out = Vec::with_capacity(b_grid.len());
    let mut prev: Vec<Option<DisksMinMaxResult>> = vec![None; n];
    for &b in b_grid {
        let mut aux = Vec::with_capacity(n);
        let mut envelope = f64::INFINITY;
        let mut argmin_k = 1;
        for k in 1..=n {
            let r = aux_lambda_hinted(n, k, b, 1e-9, prev[k - 1].as_ref())?;
            if r.value < envelope {
                envelope = r.value;
                argmin_k = k;
            }
            aux.push(r.value);
            prev[k - 1] = Some(r);
        }
        out.push(UnionCurvePoint { b, aux, envelope, argmin_k });
    }
    Ok(out)
}

/// Brute-force certificate: the smallest max-term over a uniform grid on
/// the simplex with roughly `points` nodes (exact for the returned grid).
pub fn simplex_grid_min(parts: &[usize], b: f64, points: usize) -> Result<f64> {
    let k = parts.len();
    // resolution m such that the number of compositions is about `points`
    let mut m = 2usize;
    while compositions(m + 1, k) <= points {
        m += 1;
    }
    let mut best = f64::INFINITY;
    let mut idx = vec![1usize; k];
    idx[k - 1] = m - (k - 1);
    loop {
        let t: Vec<f64> = idx.iter().map(|&i| i as f64 / m as f64).collect();
        best = best.min(max_term(parts, &t, b)?);
        // next composition of m into k positive parts
        let mut j = k - 2;
        loop {
            let used: usize = idx[..=j].iter().sum::<usize>() + (k - 1 - j);
            if used < m {
                idx[j] += 1;
                let head: usize = idx[..=j].iter().sum();
                for l in (j + 1)..(k - 1) {
                    idx[l] = 1;
                }
                idx[k - 1] = m - head - (k - 2 - j);
                break;
            }
            if j == 0 {
                return Ok(best);
            }
            j -= 1;
        }
    }
}

fn compositions(m: usize, k: usize) -> usize {
    // number of compositions of m into k positive parts: C(m-1, k-1)
    let mut c = 1usize;
    for i in 0..(k - 1) {
        c = c * (m - 1 - i) / (i + 1);
    }
    c
}

/// A minimizer curve lambda_i^*(B), tabulated on an increasing grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinimizerCurve {
    pub b: Vec<f64>,
    pub value: Vec<f64>,
}

impl MinimizerCurve {
    /// Linear interpolation; out-of-range arguments are an error.
    pub fn interp(&self, b: f64) -> Result<f64> {
        let n = self.b.len();
        if n < 2 || b < self.b[0] || b > self.b[n - 1] {
            return Err(Error::Invalid(format!(
                "field strength {b} outside tabulated range [{}, {}]",
                self.b.first().copied().unwrap_or(f64::NAN),
                self.b.last().copied().unwrap_or(f64::NAN)
            )));
        }
        let i = match self.b.binary_search_by(|x| x.total_cmp(&b)) {
            Ok(i) => return Ok(self.value[i]),
            Err(i) => i.clamp(1, n - 1),
        };
        let (b0, b1) = (self.b[i - 1], self.b[i]);
        let w = (b - b0) / (b1 - b0);
        Ok(self.value[i - 1] * (1.0 - w) + self.value[i] * w)
    }

    /// Build the disk-union envelope curve for index `n` on a grid.
    pub fn from_disk_unions(n: usize, b_grid: &[f64]) -> Result<MinimizerCurve> {
        let mut value = Vec::with_capacity(b_grid.len());
        for &b in b_grid {
            value.push(lambda_over_disk_unions(n, None, b)?.value);
        }
        Ok(MinimizerCurve { b: b_grid.to_vec(), value })
    }
}

/// Result of the two-part disconnected-minimizer combination.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WolfKellerSplit {
    pub value: f64,
    /// Index split: the first part carries i eigenvalues, the second n - i.
    pub i_star: usize,
    /// Area of the first part.
    pub t_star: f64,
}

/// Combine tabulated minimizer curves lambda_i^*(.) into the disconnected
/// candidate value for lambda_n^*(B):
///
///   min over i <= n/2, t in (0,1) of
///     max { lambda_i^*(tB)/t, lambda_{n-i}^*((1-t)B)/(1-t) }.
///
/// `curves[i-1]` must tabulate lambda_i^* for i = 1, ..., n-1 over ranges
/// covering the scaled arguments.
pub fn wolf_keller_combine(curves: &[MinimizerCurve], n: usize, b: f64) -> Result<WolfKellerSplit> {
    if curves.len() < n - 1 {
        return Err(Error::Invalid(format!(
            "need curves for indices 1..{} to combine at n={n}",
            n - 1
        )));
    }
    let mut best: Option<WolfKellerSplit> = None;
    for i in 1..=(n / 2) {
        let (ci, cj) = (&curves[i - 1], &curves[n - i - 1]);
        // admissible t keeps both scaled arguments inside the tables
        let lo = (ci.b[0] / b).max(1.0 - cj.b[cj.b.len() - 1] / b).max(1e-6);
        let hi = (ci.b[ci.b.len() - 1] / b).min(1.0 - cj.b[0] / b).min(1.0 - 1e-6);
        if lo >= hi {
            return Err(Error::Invalid(format!(
                "curves for split i={i} do not cover field strength {b}"
            )));
        }
        let f = |t: f64| -> Result<f64> {
            Ok((ci.interp(t * b)? / t).max(cj.interp((1.0 - t) * b)? / (1.0 - t)))
        };
        let m = 256;
        let mut pre = (f64::INFINITY, 0.5 * (lo + hi));
        for l in 0..=m {
            let t = lo + (hi - lo) * l as f64 / m as f64;
            let v = f(t)?;
            if v < pre.0 {
                pre = (v, t);
            }
        }
        let h = (hi - lo) / m as f64;
        let (t, v) = golden(f, (pre.1 - h).max(lo), (pre.1 + h).min(hi), 1e-10)?;
        if best.as_ref().map_or(true, |w| v < w.value) {
            best = Some(WolfKellerSplit { value: v, i_star: i, t_star: t });
        }
    }
    best.ok_or_else(|| Error::Invalid("combination needs n >= 2".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn partition_tables() {
        assert_eq!(partitions(4, 2), vec![vec![3, 1], vec![2, 2]]);
        assert_eq!(
            partitions(6, 3),
            vec![vec![4, 1, 1], vec![3, 2, 1], vec![2, 2, 2]]
        );
        assert_eq!(partitions(5, 5), vec![vec![1, 1, 1, 1, 1]]);
        assert_eq!(partitions(5, 3), vec![vec![3, 1, 1], vec![2, 2, 1]]);
        assert_eq!(partitions(6, 4), vec![vec![3, 1, 1, 1], vec![2, 2, 1, 1]]);
    }

    #[test]
    fn equal_disks_value_at_transition_flux() {
        // at B = 4 pi, both one disk and two equal disks give 12 pi
        let b = 4.0 * PI;
        let one = aux_lambda(2, 1, b, 1e-9).unwrap();
        let two = aux_lambda(2, 2, b, 1e-9).unwrap();
        assert_relative_eq!(one.value, 12.0 * PI, max_relative = 1e-8);
        assert_relative_eq!(two.value, 12.0 * PI, max_relative = 1e-8);
        assert_relative_eq!(two.measures[0], 0.5, epsilon = 1e-5);
        let expect = 2.0 * diskspec::unit_disk_eigenvalue(1, b / 2.0).unwrap();
        assert_relative_eq!(two.value, expect, max_relative = 1e-10);
    }

    #[test]
    fn three_equal_disks_at_six_pi() {
        let b = 6.0 * PI;
        let three = aux_lambda(3, 3, b, 1e-9).unwrap();
        assert_relative_eq!(three.value, 18.0 * PI, max_relative = 1e-8);
        let one = aux_lambda(3, 1, b, 1e-9).unwrap();
        assert_relative_eq!(one.value, 18.0 * PI, max_relative = 1e-8);
    }

    #[test]
    fn grid_certificate_never_beats_solver() {
        for (n, k, b) in [(3usize, 2usize, 10.0f64), (5, 2, 30.0), (6, 3, 40.0)] {
            let r = aux_lambda(n, k, b, 1e-9).unwrap();
            for parts in partitions(n, k) {
                let grid = simplex_grid_min(&parts, b, 200).unwrap();
                assert!(
                    grid >= r.value - 1e-6 * r.value,
                    "grid {grid} beats solver {} for n={n} k={k}",
                    r.value
                );
            }
        }
    }

    #[test]
    fn envelope_is_minimum_over_disk_counts() {
        let (n, b) = (4usize, 18.0);
        let aux: Vec<f64> = (1..=n)
            .map(|k| aux_lambda(n, k, b, 1e-9).unwrap().value)
            .collect();
        let unbounded = lambda_over_disk_unions(n, None, b).unwrap();
        let best = aux.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_relative_eq!(unbounded.value, best, max_relative = 1e-9);
        // capping above n changes nothing (extra disks collapse)
        let capped = lambda_over_disk_unions(n, Some(9), b).unwrap();
        assert_relative_eq!(capped.value, best, max_relative = 1e-9);
    }

    #[test]
    fn two_equal_disks_below_transition() {
        let b = 9.0; // below 4 pi
        let r = lambda_over_disk_unions(2, None, b).unwrap();
        assert_eq!(r.k_effective, 2);
        let expect = 2.0 * diskspec::unit_disk_eigenvalue(1, b / 2.0).unwrap();
        assert_relative_eq!(r.value, expect, max_relative = 1e-9);
    }

    #[test]
    fn wolf_keller_recovers_two_disks() {
        let b = 9.0;
        let grid: Vec<f64> = (0..=60).map(|i| 1.0 + 0.2 * i as f64).collect();
        let disk = MinimizerCurve {
            b: grid.clone(),
            value: grid
                .iter()
                .map(|&s| diskspec::unit_disk_eigenvalue(1, s).unwrap())
                .collect(),
        };
        let split = wolf_keller_combine(&[disk], 2, b).unwrap();
        assert_relative_eq!(split.t_star, 0.5, epsilon = 1e-3);
        let expect = 2.0 * diskspec::unit_disk_eigenvalue(1, b / 2.0).unwrap();
        // tabulation is piecewise linear, so allow interpolation error
        assert_relative_eq!(split.value, expect, max_relative = 1e-4);
        assert_eq!(split.i_star, 1);
    }
}
