//! Self-intersections of base curves: exact double points of one curve and
//! the singular parameter of a one-parameter family.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curve::{cyclic_distance, wrap};
use crate::critical::{family_point, FamilyParams};
use crate::error::{Error, Result};
use crate::fourier::{periodic_grid, PERIOD};
use crate::framed::{closure_report, coincidence_residual, HopfSeries, Vec3};
use crate::quat::QuatPath;

/// Coarse scan resolution in each of `t0`, `t1`.
pub const SCAN_GRID: usize = 512;

/// Gauss-Newton acceptance threshold on `|γ(t1) − γ(t0)|`.
pub const DOUBLE_POINT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoublePointKind {
    BaseOnly,
    /// The frame coincides as well.
    Framed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublePoint {
    pub t0: f64,
    pub t1: f64,
    pub kind: DoublePointKind,
    /// Magnitude of the two coincidence integrals at `(t0, t1)`.
    pub residual: f64,
}

/// Groups double points by the spatial point where they occur; a triple
/// point contributes three pairs to one group.
pub fn coincidence_points(q: &QuatPath, dps: &[DoublePoint]) -> Vec<Vec3> {
    let hs = HopfSeries::new(q);
    let mut pts: Vec<Vec3> = Vec::new();
    for d in dps {
        let p = hs.gamma_at(d.t0);
        if !pts.iter().any(|x| (x - p).norm() < 1e-8) {
            pts.push(p);
        }
    }
    pts
}

/// Smallest `n ∈ 2..=16` with `γ(t + 2/n) = γ(t)`, i.e. the curve is an
/// `n`-fold cover.
pub fn covering_multiplicity(hs: &HopfSeries) -> Option<usize> {
    let ts = periodic_grid(64);
    let scale = ts.iter().map(|&t| hs.gamma_at(t).norm()).fold(1.0, f64::max);
    (2..=16).find(|&n| {
        let shift = PERIOD / n as f64;
        ts.iter().all(|&t| (hs.gamma_at(t + shift) - hs.gamma_at(t)).norm() <= 1e-9 * scale)
    })
}

fn gauss_newton(hs: &HopfSeries, mut t0: f64, mut t1: f64) -> Option<(f64, f64, f64)> {
    let mut r = hs.gamma_at(t1) - hs.gamma_at(t0);
    for _ in 0..40 {
        if r.norm() < 1e-14 {
            break;
        }
        let a = -hs.tangent_at(t0);
        let b = hs.tangent_at(t1);
        let jtj = Matrix2::new(a.dot(&a), a.dot(&b), a.dot(&b), b.dot(&b));
        let jtr = Vector2::new(a.dot(&r), b.dot(&r));
        let step = jtj.lu().solve(&jtr)?;
        if !step.iter().all(|x| x.is_finite()) {
            return None;
        }
        t0 -= step[0];
        t1 -= step[1];
        let next = hs.gamma_at(t1) - hs.gamma_at(t0);
        if next.norm() >= r.norm() && step.norm() < 1e-15 {
            r = next;
            break;
        }
        r = next;
    }
    Some((t0, t1, r.norm()))
}

/// All `t0 < t1` with `γ(t0) = γ(t1)` for a closed `q`.
///
/// A coarse periodic scan of `|γ(t1) − γ(t0)|` seeds Gauss-Newton on the
/// exact centerline; multiply covered curves raise
/// [`Error::ContinuumCoincidence`].
pub fn find_base_double_points(q: &QuatPath) -> Result<Vec<DoublePoint>> {
    let report = closure_report(q);
    if !report.is_closed(1e-10) {
        return Err(Error::NotClosed {
            equinorm: report.equinorm_residual,
            orthogonality: report.orthogonality_residual,
        });
    }
    q.require_nonvanishing()?;
    let hs = HopfSeries::new(q);
    find_double_points_of(&hs, SCAN_GRID)
}

pub(crate) fn find_double_points_of(hs: &HopfSeries, m: usize) -> Result<Vec<DoublePoint>> {
    if covering_multiplicity(hs).is_some() {
        return Err(Error::ContinuumCoincidence);
    }
    let ts = periodic_grid(m);
    let pts: Vec<Vec3> = ts.iter().map(|&t| hs.gamma_at(t)).collect();
    let vmax = ts.iter().map(|&t| hs.speed_at(t)).fold(0.0, f64::max);
    let h = PERIOD / m as f64;
    let threshold = 2.0 * vmax * h;

    let mut found: Vec<DoublePoint> = Vec::new();
    for (i, j) in candidate_pairs(&pts, threshold) {
        let Some((a, b, res)) = gauss_newton(hs, ts[i], ts[j]) else { continue };
        if res > DOUBLE_POINT_TOL {
            continue;
        }
        let (a, b) = (wrap(a, PERIOD), wrap(b, PERIOD));
        let (t0, t1) = if a < b { (a, b) } else { (b, a) };
        if cyclic_distance(t0, t1, PERIOD) < 1e-6 {
            continue;
        }
        if found.iter().any(|d| (d.t0 - t0).abs() < 1e-7 && (d.t1 - t1).abs() < 1e-7) {
            continue;
        }
        let (re, cx) = coincidence_residual(&hs.source, t0, t1)?;
        let kind = if (hs.frame_at(t0) - hs.frame_at(t1)).norm() < 1e-8 {
            DoublePointKind::Framed
        } else {
            DoublePointKind::BaseOnly
        };
        found.push(DoublePoint { t0, t1, kind, residual: re.hypot(cx.norm()) });
    }
    found.sort_by(|a, b| a.t0.total_cmp(&b.t0).then(a.t1.total_cmp(&b.t1)));
    Ok(found)
}

/// Index pairs `i < j` that are strict local minima of the distance matrix
/// away from the diagonal band and below `threshold`.
fn candidate_pairs(pts: &[Vec3], threshold: f64) -> Vec<(usize, usize)> {
    let m = pts.len();
    let band = |i: usize, j: usize| {
        let g = i.abs_diff(j);
        g.min(m - g) < 3
    };
    let dist = |i: usize, j: usize| (pts[i] - pts[j]).norm();
    (0..m)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..m).filter_map(move |j| {
                if band(i, j) {
                    return None;
                }
                let d = dist(i, j);
                if d > threshold {
                    return None;
                }
                for di in [-1i64, 0, 1] {
                    for dj in [-1i64, 0, 1] {
                        if di == 0 && dj == 0 {
                            continue;
                        }
                        let a = (i as i64 + di).rem_euclid(m as i64) as usize;
                        let b = (j as i64 + dj).rem_euclid(m as i64) as usize;
                        if a == b || band(a, b) {
                            return None;
                        }
                        if dist(a, b) < d {
                            return None;
                        }
                    }
                }
                Some((i, j))
            })
        })
        .collect()
}

/// Minimum off-diagonal distance of the centerline samples and where it occurs.
fn closest_approach(hs: &HopfSeries, m: usize) -> (f64, f64, f64) {
    let ts = periodic_grid(m);
    let pts: Vec<Vec3> = ts.iter().map(|&t| hs.gamma_at(t)).collect();
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..m {
        for j in i + 1..m {
            let g = j - i;
            if g.min(m - g) < 3 {
                continue;
            }
            let d = (pts[i] - pts[j]).norm();
            if d < best.0 {
                best = (d, ts[i], ts[j]);
            }
        }
    }
    best
}

/// A parameter `u` where the family's base curve self-intersects.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularValue {
    pub u: f64,
    pub t0: f64,
    pub t1: f64,
    pub residual: f64,
}

/// Newton on `(u, t0, t1)` for `γ_u(t1) − γ_u(t0) = 0`, confined to
/// `|u − u_seed| ≤ radius`; the `u`-derivative is a central difference.
fn refine_singular(h: i32, k: i32, mut u: f64, mut t0: f64, mut t1: f64, radius: f64) -> Option<SingularValue> {
    let seed = u;
    let series = |u: f64| family_point(&FamilyParams::new(h, k, u)).ok().map(|q| HopfSeries::new(q.q()));
    let resid = |hs: &HopfSeries, t0: f64, t1: f64| hs.gamma_at(t1) - hs.gamma_at(t0);
    let du = 1e-6;
    for _ in 0..50 {
        let hs = series(u)?;
        let r = resid(&hs, t0, t1);
        if r.norm() < 1e-14 {
            break;
        }
        let (lo, hi) = ((u - du).max(0.0), (u + du).min(1.0));
        let dr_du = (resid(&series(hi)?, t0, t1) - resid(&series(lo)?, t0, t1)) / (hi - lo);
        let j = Matrix3::from_columns(&[dr_du, -hs.tangent_at(t0), hs.tangent_at(t1)]);
        let step: Vector3<f64> = j.lu().solve(&r)?;
        u -= step[0];
        t0 -= step[1];
        t1 -= step[2];
        if !(0.0 < u && u < 1.0) || (u - seed).abs() > radius {
            return None;
        }
        if step.norm() < 1e-15 {
            break;
        }
    }
    // the endpoints are covered circles, not crossings
    if !(radius < u && u < 1.0 - radius) {
        return None;
    }
    let hs = series(u)?;
    let residual = resid(&hs, t0, t1).norm();
    let (a, b) = (wrap(t0, PERIOD), wrap(t1, PERIOD));
    if residual > 1e-12 || cyclic_distance(a, b, PERIOD) < 1e-6 {
        return None;
    }
    Some(SingularValue { u, t0: a.min(b), t1: a.max(b), residual })
}

/// Values `u ∈ (0, 1)` at which `γ_u` of the family `(h, k)` is not embedded,
/// located by a scan in `u` with step `1/steps` and polished by Newton.
pub fn detect_singular_u(h: i32, k: i32, steps: usize) -> Result<Vec<SingularValue>> {
    FamilyParams::new(h, k, 0.5).validate()?;
    let m = 128;
    let scan: Vec<(f64, (f64, f64, f64))> = (1..steps)
        .into_par_iter()
        .map(|i| {
            let u = i as f64 / steps as f64;
            let q = family_point(&FamilyParams::new(h, k, u))?;
            Ok((u, closest_approach(&HopfSeries::new(q.q()), m)))
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<SingularValue> = Vec::new();
    for w in scan.windows(3) {
        let (d0, d1, d2) = (w[0].1 .0, w[1].1 .0, w[2].1 .0);
        if !(d1 <= d0 && d1 <= d2) {
            continue;
        }
        let (u, (_, t0, t1)) = w[1];
        if let Some(sv) = refine_singular(h, k, u, t0, t1, (5.0 / steps as f64).max(0.02)) {
            if !out.iter().any(|o| (o.u - sv.u).abs() < 1e-9) {
                out.push(sv);
            }
        }
    }
    out.sort_by(|a, b| a.u.total_cmp(&b.u));
    Ok(out)
}
