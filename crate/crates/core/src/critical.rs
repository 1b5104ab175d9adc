//! The closed-form critical set, its `U(2)` normal form, energy levels and the
//! one-parameter families `q_u = q(c, d, u, √(1−u²), 1, 0)` with their
//! predicted knot types.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::FourierSeries;
use crate::framed::{hopf, FramedCurve, Vec3};
use crate::quat::QuatPath;
use crate::unitary::{c64, hermitian_eigen};
use crate::variational::{fit_lambda, StiefelPoint};

/// Complex numbers as `{"re": .., "im": ..}`.
mod complex_map {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Repr {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(c: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        Repr { re: c.re, im: c.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let r = Repr::deserialize(d)?;
        Ok(Complex64::new(r.re, r.im))
    }
}

/// Tolerance for the unit-norm conditions on `ξ` and `ζ`.
pub const PARAM_TOL: f64 = 1e-10;

/// Below this magnitude a coefficient counts as zero in the normal form.
pub const PHASE_TOL: f64 = 1e-9;

/// Parameters of `q(c, d, ξ₁, ξ₂, ζ₁, ζ₂) = (ξ₁e(c) + ξ₂e(−c), ζ₁e(d) + ζ₂e(−d))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalParams {
    pub c: i32,
    pub d: i32,
    #[serde(with = "complex_map")]
    pub xi1: Complex64,
    #[serde(with = "complex_map")]
    pub xi2: Complex64,
    #[serde(with = "complex_map")]
    pub zeta1: Complex64,
    #[serde(with = "complex_map")]
    pub zeta2: Complex64,
}

impl CriticalParams {
    pub fn new(c: i32, d: i32, xi: [Complex64; 2], zeta: [Complex64; 2]) -> Self {
        Self { c, d, xi1: xi[0], xi2: xi[1], zeta1: zeta[0], zeta2: zeta[1] }
    }

    /// Real-coefficient shorthand.
    pub fn real(c: i32, d: i32, xi1: f64, xi2: f64, zeta1: f64, zeta2: f64) -> Self {
        Self::new(c, d, [c64(xi1, 0.0), c64(xi2, 0.0)], [c64(zeta1, 0.0), c64(zeta2, 0.0)])
    }

    /// The isolated critical point `q(c, c, 1, 0, 0, 1)`.
    pub fn isolated(c: i32) -> Self {
        Self::real(c, c, 1.0, 0.0, 0.0, 1.0)
    }

    /// Rescales `(ξ₁, ξ₂)` and `(ζ₁, ζ₂)` to unit vectors.
    pub fn normalized(&self) -> Self {
        let nx = (self.xi1.norm_sqr() + self.xi2.norm_sqr()).sqrt();
        let nz = (self.zeta1.norm_sqr() + self.zeta2.norm_sqr()).sqrt();
        Self {
            xi1: self.xi1 / nx,
            xi2: self.xi2 / nx,
            zeta1: self.zeta1 / nz,
            zeta2: self.zeta2 / nz,
            ..*self
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.c != other.c || self.d != other.d {
            return f64::INFINITY;
        }
        [
            self.xi1 - other.xi1,
            self.xi2 - other.xi2,
            self.zeta1 - other.zeta1,
            self.zeta2 - other.zeta2,
        ]
        .iter()
        .map(|x| x.norm())
        .fold(0.0, f64::max)
    }

    /// Membership in the cross-section returned by [`normal_form`]: either the
    /// isolated pattern `(c, c, 1, 0, 0, 1)` with `c > 0`, or `c > d ≥ 0`,
    /// `c ≡ d mod 2`, unit `ξ` and `ζ`, `ξ₁` real and nonnegative (or `ξ₁ = 0`
    /// and `ξ₂` real positive), likewise for `ζ`, and `ζ = (1, 0)` when `d = 0`.
    pub fn is_normal_form(&self, tol: f64) -> bool {
        if self.c == self.d {
            return self.c > 0 && self.max_abs_diff(&Self::isolated(self.c)) <= tol;
        }
        let unit = |a: Complex64, b: Complex64| (a.norm_sqr() + b.norm_sqr() - 1.0).abs() <= tol;
        let phased = |a: Complex64, b: Complex64| {
            if a.norm() > PHASE_TOL {
                a.im.abs() <= tol && a.re > 0.0
            } else {
                b.im.abs() <= tol && b.re >= 0.0
            }
        };
        let zeta_ok = if self.d == 0 {
            (self.zeta1 - 1.0).norm() <= tol && self.zeta2.norm() <= tol
        } else {
            unit(self.zeta1, self.zeta2) && phased(self.zeta1, self.zeta2)
        };
        self.c > self.d
            && self.d >= 0
            && (self.c - self.d) % 2 == 0
            && unit(self.xi1, self.xi2)
            && phased(self.xi1, self.xi2)
            && zeta_ok
    }

    /// Random element of the normal-form cross-section with `c ≤ max_freq`.
    pub fn random_normal_form<R: Rng + ?Sized>(rng: &mut R, max_freq: i32) -> Self {
        let mut pairs = Vec::new();
        for c in 1..=max_freq {
            for d in (0..=c).filter(|d| (c - d) % 2 == 0) {
                pairs.push((c, d));
            }
        }
        let (c, d) = pairs[rng.random_range(0..pairs.len())];
        if c == d {
            return Self::isolated(c);
        }
        let unit_pair = |rng: &mut R| {
            let g: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            let a = c64(g[0], g[1]) / n;
            let b = c64(g[2], g[3]) / n;
            [c64(a.norm(), 0.0), b * (a.conj() / a.norm())]
        };
        let xi = unit_pair(rng);
        let zeta = if d == 0 { [c64(1.0, 0.0), c64(0.0, 0.0)] } else { unit_pair(rng) };
        Self::new(c, d, xi, zeta)
    }
}

fn two_term(k: i32, a: Complex64, b: Complex64) -> FourierSeries {
    FourierSeries::from_terms([(k, a), (-k, b)])
}

fn check_parity(c: i32, d: i32) -> Result<()> {
    if (c - d).rem_euclid(2) != 0 || (c == 0 && d == 0) {
        Err(Error::BadParity { c, d })
    } else {
        Ok(())
    }
}

/// `q(c, d, ξ, ζ)` with the coefficients exactly as given (no rescaling).
pub fn unscaled_path(p: &CriticalParams) -> QuatPath {
    QuatPath::new(two_term(p.c, p.xi1, p.xi2), two_term(p.d, p.zeta1, p.zeta2))
}

/// `q(c, d, ξ, ζ)/√2`, checked to lie on the Stiefel manifold.
///
/// The Stiefel conditions are tested on the actual Gram matrix, which covers
/// the orthonormality requirements for `c = ±d` and the collapse of `e(±0)`.
pub fn make_critical(p: &CriticalParams) -> Result<StiefelPoint> {
    check_parity(p.c, p.d)?;
    let q = unscaled_path(p).scale_re(FRAC_1_SQRT_2);
    let g = q.gram();
    let zz = g[(0, 0)].re;
    let ww = g[(1, 1)].re;
    let zw = g[(0, 1)].norm();
    if (zz - 1.0).abs() > PARAM_TOL || (ww - 1.0).abs() > PARAM_TOL || zw > PARAM_TOL {
        return Err(Error::NotInStiefel(format!(
            "parameters ({}, {}) give ‖z‖² = {zz}, ‖w‖² = {ww}, |⟨z,w⟩| = {zw:e}",
            p.c, p.d
        )));
    }
    StiefelPoint::new(q)
}

/// Energy `π²(c² + d²)` of the critical points with frequencies `(c, d)`.
pub fn energy_level(c: i32, d: i32) -> Result<f64> {
    check_parity(c, d)?;
    Ok(PI * PI * f64::from(c * c + d * d))
}

/// One row of the energy spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub c: i32,
    pub d: i32,
    pub energy: f64,
    /// `c = d`: the level carries an isolated critical point.
    pub isolated: bool,
}

/// All levels with `c_max ≥ c ≥ d ≥ 0`, sorted by energy then `(c, d)`.
pub fn spectrum(c_max: i32) -> Vec<SpectrumEntry> {
    let mut out = Vec::new();
    for c in 1..=c_max.max(0) {
        for d in (0..=c).filter(|d| (c - d) % 2 == 0) {
            let energy = PI * PI * f64::from(c * c + d * d);
            out.push(SpectrumEntry { c, d, energy, isolated: c == d });
        }
    }
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy).then((a.c, a.d).cmp(&(b.c, b.d))));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalClass {
    /// `c = ±d`: the orbit of an isolated multiply covered circle.
    Isolated,
    /// `c ≠ ±d`.
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalForm {
    pub params: CriticalParams,
    pub class: CriticalClass,
    /// `ξ₁` (or `ζ₁`) vanished and the phase was fixed on the second coefficient.
    pub tie_break: bool,
}

fn rounded_frequency(mu: f64, residual: f64) -> Result<i32> {
    let c = 2.0 * (-mu).max(0.0).sqrt() / PI;
    let r = c.round();
    if (c - r).abs() > 1e-6 {
        return Err(Error::NotCritical { residual: residual.max((c - r).abs()) });
    }
    Ok(r as i32)
}

/// Fixes the phase of a coefficient pair so the first (or, if it vanishes,
/// the second) entry is real and nonnegative.
fn fix_phase(a: Complex64, b: Complex64) -> ([Complex64; 2], bool) {
    let (pivot, tie) = if a.norm() > PHASE_TOL { (a, false) } else { (b, true) };
    if pivot.norm() == 0.0 {
        return ([a, b], tie);
    }
    let rot = pivot.conj() / pivot.norm();
    let (a, b) = (a * rot, b * rot);
    if tie {
        ([c64(0.0, 0.0), c64(b.re, 0.0)], true)
    } else {
        ([c64(a.re, 0.0), b], false)
    }
}

/// The unique representative of the `U(2)` orbit of a critical point.
///
/// Diagonalizes the fitted `Λ = U·diag(μ)·Uᴴ`, reads the frequencies from
/// `μ = −(πc/2)²`, orders them `c > d ≥ 0` and fixes the remaining diagonal
/// phases on `ξ` and on `ζ`.
pub fn normal_form(q: &StiefelPoint) -> Result<NormalForm> {
    let (fit, residual) = fit_lambda(q);
    let scale = q.q().second_derivative().norm().max(1.0);
    if residual > 1e-8 * scale {
        return Err(Error::NotCritical { residual });
    }
    let ([m0, m1], u) = hermitian_eigen(&fit.matrix());
    let c = rounded_frequency(m0, residual)?;
    let d = rounded_frequency(m1, residual)?;
    if c == d {
        return Ok(NormalForm {
            params: CriticalParams::isolated(c),
            class: CriticalClass::Isolated,
            tie_break: false,
        });
    }
    let p = q.q().mul_matrix(&u.map(|x| x.conj()));
    let z = [p.z.coeff(c) * SQRT_2, p.z.coeff(-c) * SQRT_2];
    let w = if d == 0 {
        [p.w.coeff(0) * SQRT_2, c64(0.0, 0.0)]
    } else {
        [p.w.coeff(d) * SQRT_2, p.w.coeff(-d) * SQRT_2]
    };
    let (xi, tie_xi) = fix_phase(z[0], z[1]);
    let (zeta, tie_zeta) = fix_phase(w[0], w[1]);
    Ok(NormalForm {
        params: CriticalParams::new(c, d, xi, zeta),
        class: CriticalClass::Generic,
        tie_break: tie_xi || tie_zeta,
    })
}

/// `(h, k, u)` of the family `q_u = q(h+k, h−k, u, √(1−u²), 1, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub h: i32,
    pub k: i32,
    pub u: f64,
}

impl FamilyParams {
    pub fn new(h: i32, k: i32, u: f64) -> Self {
        Self { h, k, u }
    }

    pub fn c(&self) -> i32 {
        self.h + self.k
    }

    pub fn d(&self) -> i32 {
        self.h - self.k
    }

    pub fn validate(&self) -> Result<()> {
        if self.h == 0 || self.k == 0 || self.h + self.k == 0 {
            return Err(Error::DegenerateFamily { h: self.h, k: self.k });
        }
        if !(0.0..=1.0).contains(&self.u) {
            return Err(Error::Invalid(format!("family parameter u = {} outside [0, 1]", self.u)));
        }
        Ok(())
    }

    pub fn critical_params(&self) -> CriticalParams {
        let u = self.u;
        CriticalParams::real(self.c(), self.d(), u, (1.0 - u * u).max(0.0).sqrt(), 1.0, 0.0)
    }

    pub fn singular_u(&self) -> f64 {
        singular_u(self.h, self.k)
    }

    pub fn gcd_ok(&self) -> bool {
        gcd(self.h, self.c()) == 1 && gcd(self.k, self.c()) == 1
    }
}

/// The Stiefel point `q_u` of a family member.
pub fn family_point(fp: &FamilyParams) -> Result<StiefelPoint> {
    fp.validate()?;
    make_critical(&fp.critical_params())
}

/// Closed-form centerline of the unscaled `q(c, d, u, √(1−u²), 1, 0)` up to
/// translation, in the variables `h, k`.
pub fn closed_form_gamma(fp: &FamilyParams, t: f64) -> Vec3 {
    let (h, k, u) = (f64::from(fp.h), f64::from(fp.k), fp.u);
    let v = (1.0 - u * u).max(0.0).sqrt();
    let c = |l: f64| (l * PI * t).cos();
    let s = |l: f64| (l * PI * t).sin();
    Vec3::new(
        u * v / (h + k) * s(h + k),
        -u / k * c(k) + v / h * c(h),
        u / k * s(k) + v / h * s(h),
    ) * (2.0 / PI)
}

/// Closed-form frame `V_u(t)`.
pub fn closed_form_frame(fp: &FamilyParams, t: f64) -> Vec3 {
    let (h, k, u) = (f64::from(fp.h), f64::from(fp.k), fp.u);
    let v = (1.0 - u * u).max(0.0).sqrt();
    let c = |l: f64| (l * PI * t).cos();
    let s = |l: f64| (l * PI * t).sin();
    let n2 = 2.0 + 2.0 * u * v * c(h + k);
    Vec3::new(
        u * s(h) - v * s(k),
        c(h) * c(k) + u * v,
        (1.0 - u * u) * s(h) * c(k) - u * u * c(h) * s(k),
    ) * (2.0 / n2)
}

/// Largest deviation of `hopf(q_u)` from the closed forms on the sample grid.
/// The Stiefel scaling halves the curve, so `γ = (γ_closed(t) − γ_closed(0))/2`.
pub fn closed_form_deviation(fp: &FamilyParams, fc: &FramedCurve) -> (f64, f64) {
    let origin = closed_form_gamma(fp, 0.0);
    let mut dg: f64 = 0.0;
    let mut dv: f64 = 0.0;
    for ((&t, g), v) in fc.t.iter().zip(&fc.gamma).zip(&fc.frame) {
        let expect = (closed_form_gamma(fp, t) - origin) * 0.5;
        dg = dg.max((g - expect).norm());
        dv = dv.max((v - closed_form_frame(fp, t)).norm());
    }
    (dg, dv)
}

/// A family member as a Stiefel point and its framed curve, cross-checked
/// against the closed form to `1e-8`.
pub fn family(fp: &FamilyParams, grid_size: usize) -> Result<(StiefelPoint, FramedCurve)> {
    let q = family_point(fp)?;
    let fc = hopf(q.q(), grid_size)?;
    let (dg, dv) = closed_form_deviation(fp, &fc);
    if dg > 1e-8 || dv > 1e-8 {
        return Err(Error::ClosedFormMismatch(format!("centerline {dg:e}, frame {dv:e}")));
    }
    Ok((q, fc))
}

/// The unique `u ∈ (0, 1)` at which the family's base curve self-intersects.
pub fn singular_u(h: i32, k: i32) -> f64 {
    let (h, k) = (f64::from(h), f64::from(k));
    (k * k / (h * h + k * k)).sqrt()
}

pub fn gcd(a: i32, b: i32) -> i32 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i32
}

/// Knot type predicted for a family member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KnotPrediction {
    /// A `cover`-times covered round circle whose pushoff links it `link` times.
    Circle { cover: u32, link: i32 },
    /// `T(p, q)` with the signs of the `(h, h+k)` / `(−k, h+k)` formulas.
    Torus { p: i32, q: i32 },
    Nonembedded { u: f64 },
}

impl KnotPrediction {
    /// `T(|p|, |q|)` sorted, or `None` for an unknot or circle.
    pub fn canonical(&self) -> Option<(u32, u32)> {
        match *self {
            KnotPrediction::Torus { p, q } => {
                let (a, b) = (p.unsigned_abs().min(q.unsigned_abs()), p.unsigned_abs().max(q.unsigned_abs()));
                (a >= 2).then_some((a, b))
            }
            _ => None,
        }
    }

    pub fn is_unknot(&self) -> bool {
        match self {
            KnotPrediction::Torus { .. } => self.canonical().is_none(),
            KnotPrediction::Circle { cover, .. } => *cover == 1,
            KnotPrediction::Nonembedded { .. } => false,
        }
    }

    /// `+1` for `pq > 0`, `−1` otherwise; only meaningful for nontrivial torus knots.
    pub fn chirality(&self) -> Option<i32> {
        match *self {
            KnotPrediction::Torus { p, q } if self.canonical().is_some() => Some(if p * q > 0 { 1 } else { -1 }),
            _ => None,
        }
    }
}

impl fmt::Display for KnotPrediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            KnotPrediction::Circle { cover, link } => write!(f, "circle(cover={cover},link={link})"),
            KnotPrediction::Torus { p, q } => match self.canonical() {
                Some((a, b)) => write!(f, "torus({p},{q}) = T({a},{b})"),
                None => write!(f, "torus({p},{q}) = unknot"),
            },
            KnotPrediction::Nonembedded { u } => write!(f, "nonembedded(u={u})"),
        }
    }
}

/// Case analysis of the family: circles at the endpoints, `T(h, h+k)` below
/// the singular value, `T(−k, h+k)` above it.
pub fn predicted_knot(fp: &FamilyParams) -> Result<KnotPrediction> {
    fp.validate()?;
    if !fp.gcd_ok() {
        return Err(Error::GcdViolation { h: fp.h, k: fp.k });
    }
    let us = fp.singular_u();
    let u = fp.u;
    Ok(if u == 0.0 {
        KnotPrediction::Circle { cover: fp.h.unsigned_abs(), link: fp.k }
    } else if u == 1.0 {
        KnotPrediction::Circle { cover: fp.k.unsigned_abs(), link: -fp.h }
    } else if (u - us).abs() <= 1e-12 {
        KnotPrediction::Nonembedded { u: us }
    } else if u < us {
        KnotPrediction::Torus { p: fp.h, q: fp.c() }
    } else {
        KnotPrediction::Torus { p: -fp.k, q: fp.c() }
    })
}
