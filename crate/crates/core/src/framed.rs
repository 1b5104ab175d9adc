//! The frame-Hopf map from quaternionic paths to framed space curves, the
//! curvature/twist/stretch invariants, closure diagnostics and the
//! inflatable-rod view.
//!
//! For `q = (z, w)` the map is
//!
//! ```text
//! γ′ = (|z|² − |w|², 2 Im(z w̄), 2 Re(z w̄))
//! V  = (2 Im(zw), Re(z² + w²), Im(w² − z²)) / (|z|² + |w|²)
//! ```
//!
//! Every component of `γ′` and of `|q|²·V` is a trigonometric polynomial, so
//! the curve, its tangent and its frame are kept as exact Fourier data and
//! only sampled on demand.

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{uniform_grid, AffineFourier, FourierSeries, Parity, PERIOD};
use crate::quat::QuatPath;

pub type Vec3 = Vector3<f64>;

/// Default number of samples on `[0, 2]` (endpoint inclusive).
pub const DEFAULT_GRID: usize = 1024;

/// Exact Fourier description of `H(q)`.
#[derive(Debug, Clone)]
pub struct HopfSeries {
    pub source: QuatPath,
    /// Components of `γ′`.
    pub tangent: [FourierSeries; 3],
    /// Components of `γ`, normalized so that `γ(0) = 0`.
    pub gamma: [AffineFourier; 3],
    /// Components of `|q|²·V`.
    pub frame_numerator: [FourierSeries; 3],
    /// `‖γ′‖ = |q|²`.
    pub speed: FourierSeries,
}

fn re3(s: &[FourierSeries; 3], t: f64) -> Vec3 {
    Vec3::new(s[0].eval(t).re, s[1].eval(t).re, s[2].eval(t).re)
}

impl HopfSeries {
    pub fn new(q: &QuatPath) -> Self {
        let (z, w) = (&q.z, &q.w);
        let zz = z.abs_sq();
        let ww = w.abs_sq();
        let z_wbar = z * &w.conj();
        let tangent = [&zz - &ww, z_wbar.im_part().scale_re(2.0), z_wbar.re_part().scale_re(2.0)];
        let zero = Complex64::new(0.0, 0.0);
        let gamma = [
            tangent[0].antiderivative(zero),
            tangent[1].antiderivative(zero),
            tangent[2].antiderivative(zero),
        ];
        let z2 = z * z;
        let w2 = w * w;
        let frame_numerator = [(z * w).im_part().scale_re(2.0), (&z2 + &w2).re_part(), (&w2 - &z2).im_part()];
        Self {
            source: q.clone(),
            tangent,
            gamma,
            frame_numerator,
            speed: &zz + &ww,
        }
    }

    pub fn gamma_at(&self, t: f64) -> Vec3 {
        Vec3::new(self.gamma[0].eval(t).re, self.gamma[1].eval(t).re, self.gamma[2].eval(t).re)
    }

    /// `γ′(t)`.
    pub fn tangent_at(&self, t: f64) -> Vec3 {
        re3(&self.tangent, t)
    }

    pub fn speed_at(&self, t: f64) -> f64 {
        self.speed.eval(t).re
    }

    /// Unit frame vector `V(t)`, renormalized to absorb rounding.
    pub fn frame_at(&self, t: f64) -> Vec3 {
        re3(&self.frame_numerator, t).normalize()
    }

    /// `V′(t)` from the quotient rule on `V = N/|q|²`.
    pub fn frame_derivative_at(&self, t: f64) -> Vec3 {
        let n = re3(&self.frame_numerator, t);
        let dn = Vec3::new(
            self.frame_numerator[0].derivative().eval(t).re,
            self.frame_numerator[1].derivative().eval(t).re,
            self.frame_numerator[2].derivative().eval(t).re,
        );
        let s = self.speed_at(t);
        let ds = self.speed.derivative().eval(t).re;
        (dn * s - n * ds) / (s * s)
    }

    /// `γ(2) − γ(0)`: zero exactly when the base curve closes.
    pub fn closure_gap(&self) -> Vec3 {
        self.gamma_at(PERIOD) - self.gamma_at(0.0)
    }
}

/// A framed curve sampled on an endpoint-inclusive uniform grid of `[0, 2]`.
#[derive(Debug, Clone)]
pub struct FramedCurve {
    pub t: Vec<f64>,
    pub gamma: Vec<Vec3>,
    pub frame: Vec<Vec3>,
    pub speed: Vec<f64>,
    pub exact: HopfSeries,
}

impl FramedCurve {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn gamma_exact(&self) -> &[AffineFourier; 3] {
        &self.exact.gamma
    }

    pub fn source(&self) -> &QuatPath {
        &self.exact.source
    }
}

/// The frame-Hopf map `H(q)` sampled on `grid_size` points.
pub fn hopf(q: &QuatPath, grid_size: usize) -> Result<FramedCurve> {
    q.require_nonvanishing()?;
    let exact = HopfSeries::new(q);
    let t = uniform_grid(grid_size);
    let gamma = t.iter().map(|&s| exact.gamma_at(s)).collect();
    let frame = t.iter().map(|&s| exact.frame_at(s)).collect();
    let speed = t.iter().map(|&s| exact.speed_at(s)).collect();
    Ok(FramedCurve { t, gamma, frame, speed, exact })
}

/// Sampled Darboux curvatures, twist rate and relative stretch rate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvariantTrace {
    pub t: Vec<f64>,
    pub kappa1: Vec<f64>,
    pub kappa2: Vec<f64>,
    pub tw: Vec<f64>,
    pub st: Vec<f64>,
}

impl InvariantTrace {
    /// Curvature of the base curve, `κ = √(κ₁² + κ₂²)`.
    pub fn kappa(&self) -> Vec<f64> {
        self.kappa1.iter().zip(&self.kappa2).map(|(a, b)| a.hypot(*b)).collect()
    }
}

/// Pointwise invariants at a single parameter value.
pub fn invariants_at(q: &QuatPath, dq: &QuatPath, t: f64) -> [f64; 4] {
    let (z, w) = q.eval(t);
    let (dz, dw) = dq.eval(t);
    let n = z.norm_sqr() + w.norm_sqr();
    let n2 = n * n;
    // ⟨(z′,w′), (−w̄, z̄)⟩ and ⟨(z′,w′), (z, w)⟩ in ℂ²
    let a = -dz * w + dw * z;
    let b = dz * z.conj() + dw * w.conj();
    // κ₂ here follows ⟨D_s²γ, D_sγ × V⟩; see the module tests for the check.
    [-2.0 * a.im / n2, 2.0 * a.re / n2, -2.0 * b.im / n2, 2.0 * b.re / n2]
}

/// `κ₁, κ₂, tw, st` on the endpoint-inclusive grid, evaluated from the exact
/// series.
pub fn invariants(q: &QuatPath, grid_size: usize) -> Result<InvariantTrace> {
    q.require_nonvanishing()?;
    let dq = q.derivative();
    let t = uniform_grid(grid_size);
    let mut tr = InvariantTrace {
        t: t.clone(),
        kappa1: Vec::with_capacity(grid_size),
        kappa2: Vec::with_capacity(grid_size),
        tw: Vec::with_capacity(grid_size),
        st: Vec::with_capacity(grid_size),
    };
    for &s in &t {
        let [k1, k2, tw, st] = invariants_at(q, &dq, s);
        tr.kappa1.push(k1);
        tr.kappa2.push(k2);
        tr.tw.push(tw);
        tr.st.push(st);
    }
    Ok(tr)
}

/// Closure diagnostics: a framed curve closes iff `q` has pure parity and
/// `z`, `w` are L²-equinorm and orthogonal. The length of `γ` is `‖q‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub parity: Parity,
    pub equinorm_residual: f64,
    pub orthogonality_residual: f64,
    pub length: f64,
}

impl ClosureReport {
    pub fn is_closed(&self, tol: f64) -> bool {
        self.parity.is_pure() && self.equinorm_residual <= tol && self.orthogonality_residual <= tol
    }
}

pub fn closure_report(q: &QuatPath) -> ClosureReport {
    let zz = q.z.norm_sq();
    let ww = q.w.norm_sq();
    ClosureReport {
        parity: q.parity(),
        equinorm_residual: (zz - ww).abs(),
        orthogonality_residual: q.z.inner_l2(&q.w).norm(),
        length: zz + ww,
    }
}

/// The two coincidence integrals `∫|z|² − |w|²` and `∫ z w̄` over `[t0, t1]`.
/// Both vanish iff `γ(t0) = γ(t1)`.
pub fn coincidence_residual(q: &QuatPath, t0: f64, t1: f64) -> Result<(f64, Complex64)> {
    if !(0.0 <= t0 && t0 < t1 && t1 <= PERIOD) {
        return Err(Error::BadInterval { t0, t1 });
    }
    let zero = Complex64::new(0.0, 0.0);
    let diff = (&q.z.abs_sq() - &q.w.abs_sq()).antiderivative(zero);
    let cross = (&q.z * &q.w.conj()).antiderivative(zero);
    Ok((diff.increment(t0, t1).re, cross.increment(t0, t1)))
}

/// Arclength-parameterized framed curve with radius function `r = ‖γ′‖`.
#[derive(Debug, Clone)]
pub struct InflatableRod {
    /// Uniform arclength samples.
    pub s: Vec<f64>,
    /// Original parameter at each arclength sample.
    pub t: Vec<f64>,
    pub gamma: Vec<Vec3>,
    pub frame: Vec<Vec3>,
    pub radius: Vec<f64>,
    /// Trapezoid value of `∫_I r dt` over the original parameter.
    pub radius_integral: f64,
}

/// Reparameterizes by arclength, carrying the speed along as radius.
pub fn to_inflatable(fc: &FramedCurve) -> Result<InflatableRod> {
    let min_speed = fc.speed.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_speed > 1e-14) {
        return Err(Error::DegenerateSpeed { min_speed });
    }
    let ex = &fc.exact;
    let arclength = ex.speed.antiderivative(Complex64::new(0.0, 0.0));
    let s_of = |t: f64| arclength.eval(t).re;
    let total = s_of(PERIOD);
    let n = fc.len();
    let mut rod = InflatableRod {
        s: Vec::with_capacity(n),
        t: Vec::with_capacity(n),
        gamma: Vec::with_capacity(n),
        frame: Vec::with_capacity(n),
        radius: Vec::with_capacity(n),
        radius_integral: trapezoid(&fc.t, &fc.speed),
    };
    for j in 0..n {
        let target = total * j as f64 / (n - 1) as f64;
        let t = invert_monotone(&s_of, |t| ex.speed_at(t), target, 0.0, PERIOD);
        rod.s.push(target);
        rod.t.push(t);
        rod.gamma.push(ex.gamma_at(t));
        rod.frame.push(ex.frame_at(t));
        rod.radius.push(ex.speed_at(t));
    }
    Ok(rod)
}

/// Solves `f(t) = target` for increasing `f` on `[lo, hi]` by safeguarded Newton.
fn invert_monotone(f: &impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, target: f64, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a), f(b));
    if target <= fa {
        return a;
    }
    if target >= fb {
        return b;
    }
    let mut t = a + (b - a) * (target - fa) / (fb - fa);
    for _ in 0..100 {
        let r = f(t) - target;
        if r.abs() <= 1e-15 * fb.abs().max(1.0) {
            break;
        }
        if r < 0.0 {
            a = t;
        } else {
            b = t;
        }
        let next = t - r / df(t);
        t = if next > a && next < b { next } else { 0.5 * (a + b) };
        if b - a < 1e-16 {
            break;
        }
    }
    t
}

pub(crate) fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unitary::c64;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn e(k: i32) -> FourierSeries {
        FourierSeries::mono(k, c64(1.0, 0.0))
    }

    fn anticlosed_example() -> QuatPath {
        QuatPath::new(e(1).scale_re(FRAC_1_SQRT_2), e(-1).scale_re(FRAC_1_SQRT_2))
    }

    #[test]
    fn straight_line() {
        let q = QuatPath::new(e(0), FourierSeries::zero());
        let fc = hopf(&q, 64).unwrap();
        for (i, &t) in fc.t.iter().enumerate() {
            assert!((fc.gamma[i] - Vec3::new(t, 0.0, 0.0)).norm() < 1e-14);
            assert!((fc.frame[i] - Vec3::new(0.0, 1.0, 0.0)).norm() < 1e-14);
        }
        let tr = invariants(&q, 64).unwrap();
        for v in [&tr.kappa1, &tr.kappa2, &tr.tw, &tr.st] {
            assert!(v.iter().all(|x| x.abs() < 1e-15));
        }
    }

    #[test]
    fn anticlosed_path_gives_closed_framed_curve() {
        let fc = hopf(&anticlosed_example(), DEFAULT_GRID).unwrap();
        let n = fc.len() - 1;
        assert!((fc.gamma[n] - fc.gamma[0]).norm() < 1e-12);
        assert!((fc.frame[n] - fc.frame[0]).norm() < 1e-12);
        assert_eq!(fc.gamma[0], Vec3::zeros());
    }

    #[test]
    fn frame_is_unit_and_normal() {
        let q = QuatPath::new(
            FourierSeries::from_terms([(1, c64(0.4, 0.1)), (-3, c64(-0.2, 0.7))]),
            FourierSeries::from_terms([(3, c64(0.9, 0.0)), (-1, c64(0.1, -0.3))]),
        );
        let fc = hopf(&q, 512).unwrap();
        for i in 0..fc.len() {
            let tangent = fc.exact.tangent_at(fc.t[i]);
            assert!((fc.frame[i].norm() - 1.0).abs() < 1e-12);
            assert!(fc.frame[i].dot(&tangent).abs() < 1e-9);
            assert!((fc.speed[i] - q.norm_sq_at(fc.t[i])).abs() < 1e-12);
            assert!((tangent.norm() - fc.speed[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn closure_report_examples() {
        let r = closure_report(&anticlosed_example());
        assert_eq!(r.parity, Parity::Odd);
        assert!(r.equinorm_residual < 1e-15 && r.orthogonality_residual < 1e-15);
        assert!((r.length - 2.0).abs() < 1e-15);

        let r = closure_report(&QuatPath::new(e(0), FourierSeries::zero()));
        assert_eq!(r.parity, Parity::Even);
        assert!((r.equinorm_residual - 2.0).abs() < 1e-15);
        assert!((r.length - 2.0).abs() < 1e-15);

        // ‖e(2)/√2‖² = ‖e(4)/√2‖² = 1 and ⟨e(2), e(4)⟩ = 0
        let q = QuatPath::new(e(2).scale_re(FRAC_1_SQRT_2), e(4).scale_re(FRAC_1_SQRT_2));
        let r = closure_report(&q);
        assert_eq!(r.parity, Parity::Even);
        assert_eq!(r.equinorm_residual, 0.0);
        assert_eq!(r.orthogonality_residual, 0.0);
        assert!((r.length - 2.0).abs() < 1e-15);
    }

    #[test]
    fn coincidence_examples() {
        let (a, b) = coincidence_residual(&anticlosed_example(), 0.0, 2.0).unwrap();
        assert!(a.abs() < 1e-15 && b.norm() < 1e-15);
        let (a, b) = coincidence_residual(&QuatPath::new(e(0), FourierSeries::zero()), 0.0, 1.0).unwrap();
        assert!((a - 1.0).abs() < 1e-15 && b.norm() < 1e-15);
        assert!(matches!(coincidence_residual(&anticlosed_example(), 1.0, 1.0), Err(Error::BadInterval { .. })));
        assert!(coincidence_residual(&anticlosed_example(), -0.1, 1.0).is_err());
    }

    #[test]
    fn double_cover() {
        let q = QuatPath::new(
            FourierSeries::from_terms([(1, c64(0.4, 0.1)), (-3, c64(-0.2, 0.7))]),
            FourierSeries::from_terms([(3, c64(0.9, 0.0))]),
        );
        let a = hopf(&q, 256).unwrap();
        let b = hopf(&q.neg(), 256).unwrap();
        for i in 0..a.len() {
            assert!((a.gamma[i] - b.gamma[i]).norm() < 1e-12);
            assert!((a.frame[i] - b.frame[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn invariants_match_geometric_definitions() {
        // Finite-difference oracle on the sampled geometry (independent of the
        // complex formulas).
        let q = QuatPath::new(
            FourierSeries::from_terms([(1, c64(0.4, 0.1)), (-3, c64(-0.2, 0.7)), (3, c64(0.1, 0.0))]),
            FourierSeries::from_terms([(3, c64(0.9, 0.0)), (-1, c64(0.1, -0.3))]),
        );
        let ex = HopfSeries::new(&q);
        let dq = q.derivative();
        let h = 1e-5;
        for &t in &[0.13, 0.71, 1.4, 1.93] {
            let unit_t = |s: f64| ex.tangent_at(s).normalize();
            let speed = ex.speed_at(t);
            let tangent = unit_t(t);
            let frame = ex.frame_at(t);
            let ds_tangent = (unit_t(t + h) - unit_t(t - h)) / (2.0 * h) / speed;
            let ds_frame = (ex.frame_at(t + h) - ex.frame_at(t - h)) / (2.0 * h) / speed;
            let binormal = tangent.cross(&frame);
            let dspeed = (ex.speed_at(t + h) - ex.speed_at(t - h)) / (2.0 * h);
            let expected = [ds_tangent.dot(&frame), ds_tangent.dot(&binormal), ds_frame.dot(&binormal), dspeed / (speed * speed)];
            let got = invariants_at(&q, &dq, t);
            for (g, x) in got.iter().zip(expected) {
                assert!((g - x).abs() < 1e-6 * (1.0 + x.abs()), "{got:?} vs {expected:?}");
            }
            let fd_frame = (ex.frame_at(t + h) - ex.frame_at(t - h)) / (2.0 * h);
            assert!((ex.frame_derivative_at(t) - fd_frame).norm() < 1e-6);
        }
    }

    #[test]
    fn constant_modulus_has_no_stretch() {
        let q = anticlosed_example();
        let tr = invariants(&q, 256).unwrap();
        assert!(tr.st.iter().all(|s| s.abs() < 1e-13));
        // once-covered circle of length 2 has curvature π
        assert!(tr.kappa().iter().all(|k| (k - PI).abs() < 1e-12));
    }

    #[test]
    fn inflatable_view_of_arclength_curve() {
        let fc = hopf(&anticlosed_example(), 257).unwrap();
        let rod = to_inflatable(&fc).unwrap();
        assert!(rod.radius.iter().all(|r| (r - 1.0).abs() < 1e-13));
        for i in 0..rod.s.len() {
            assert!((rod.t[i] - fc.t[i]).abs() < 1e-12);
            assert!((rod.gamma[i] - fc.gamma[i]).norm() < 1e-12);
        }
        assert!((rod.radius_integral - 2.0).abs() < 1e-12);
    }

    #[test]
    fn inflatable_arclength_grid_is_uniform() {
        let q = QuatPath::new(
            FourierSeries::from_terms([(3, c64(0.3, 0.0)), (-3, c64(0.6, 0.0))]),
            FourierSeries::from_terms([(1, c64(FRAC_1_SQRT_2, 0.0))]),
        );
        let fc = hopf(&q, 1025).unwrap();
        let rod = to_inflatable(&fc).unwrap();
        let step = rod.s[1] - rod.s[0];
        for w in rod.gamma.windows(2) {
            // chord ≈ arclength step for a fine grid
            assert!(((w[1] - w[0]).norm() - step).abs() < 1e-4 * step);
        }
    }
}
