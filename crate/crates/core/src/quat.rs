//! Quaternionic paths `q = z + w𝐣` stored as a pair of Fourier series.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{periodic_grid, FourierSeries, Parity};
use crate::unitary::Mat2;

/// Grid used for the nonvanishing check.
pub const NONVANISHING_GRID: usize = 4096;

/// Threshold below which `|q(t)|²` counts as vanishing.
pub const VANISHING_TOL: f64 = 1e-14;

/// A path in `ℍ ≅ ℂ²`, `q = z + w𝐣 ↔ (z, w)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct QuatPath {
    pub z: FourierSeries,
    pub w: FourierSeries,
}

impl QuatPath {
    pub fn new(z: FourierSeries, w: FourierSeries) -> Self {
        Self { z, w }
    }

    /// Joint parity of the frequencies of `z` and `w`.
    pub fn parity(&self) -> Parity {
        match (self.z.is_zero(), self.w.is_zero()) {
            (true, _) => self.w.parity(),
            (_, true) => self.z.parity(),
            _ => {
                let (a, b) = (self.z.parity(), self.w.parity());
                if a == b {
                    a
                } else {
                    Parity::Mixed
                }
            }
        }
    }

    pub fn require_pure(&self) -> Result<Parity> {
        match self.parity() {
            Parity::Mixed => Err(Error::MixedParity),
            p => Ok(p),
        }
    }

    pub fn max_frequency(&self) -> i32 {
        self.z.max_frequency().max(self.w.max_frequency())
    }

    pub fn eval(&self, t: f64) -> (Complex64, Complex64) {
        (self.z.eval(t), self.w.eval(t))
    }

    /// `|q(t)|² = |z(t)|² + |w(t)|²`.
    pub fn norm_sq_at(&self, t: f64) -> f64 {
        let (z, w) = self.eval(t);
        z.norm_sqr() + w.norm_sqr()
    }

    /// `|q|²` as a real-valued Fourier series; this is the speed `‖γ′‖`.
    pub fn speed_series(&self) -> FourierSeries {
        &self.z.abs_sq() + &self.w.abs_sq()
    }

    /// Minimum of `|q|²` over a periodic grid of `n` samples.
    pub fn min_norm_sq(&self, n: usize) -> f64 {
        periodic_grid(n).into_iter().map(|t| self.norm_sq_at(t)).fold(f64::INFINITY, f64::min)
    }

    /// Checks membership in `𝒫ℍ*` on the standard grid.
    pub fn require_nonvanishing(&self) -> Result<()> {
        let m = self.min_norm_sq(NONVANISHING_GRID);
        if m > VANISHING_TOL {
            Ok(())
        } else {
            Err(Error::DegenerateQuaternion { min_norm_sq: m })
        }
    }

    pub fn derivative(&self) -> QuatPath {
        QuatPath::new(self.z.derivative(), self.w.derivative())
    }

    pub fn second_derivative(&self) -> QuatPath {
        QuatPath::new(self.z.derivative_n(2), self.w.derivative_n(2))
    }

    pub fn scale(&self, s: Complex64) -> QuatPath {
        QuatPath::new(self.z.scale(s), self.w.scale(s))
    }

    pub fn scale_re(&self, s: f64) -> QuatPath {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn add(&self, other: &QuatPath) -> QuatPath {
        QuatPath::new(&self.z + &other.z, &self.w + &other.w)
    }

    pub fn sub(&self, other: &QuatPath) -> QuatPath {
        QuatPath::new(&self.z - &other.z, &self.w - &other.w)
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &QuatPath) -> QuatPath {
        self.add(&other.scale_re(s))
    }

    pub fn neg(&self) -> QuatPath {
        QuatPath::new(-&self.z, -&self.w)
    }

    /// Right action of a 2×2 complex matrix on the row `(z, w)`:
    /// `(z, w)·A = (A₁₁z + A₂₁w, A₁₂z + A₂₂w)`.
    pub fn mul_matrix(&self, a: &Mat2) -> QuatPath {
        QuatPath::new(
            &self.z.scale(a[(0, 0)]) + &self.w.scale(a[(1, 0)]),
            &self.z.scale(a[(0, 1)]) + &self.w.scale(a[(1, 1)]),
        )
    }

    /// Complexified L² product `⟨z₁,z₂⟩ + ⟨w₁,w₂⟩`.
    pub fn inner_l2(&self, other: &QuatPath) -> Complex64 {
        self.z.inner_l2(&other.z) + self.w.inner_l2(&other.w)
    }

    /// The real Riemannian metric `Re⟨·,·⟩_{L²}`.
    pub fn metric(&self, other: &QuatPath) -> f64 {
        self.inner_l2(other).re
    }

    pub fn norm_sq(&self) -> f64 {
        self.z.norm_sq() + self.w.norm_sq()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Hermitian Gram matrix `G_ij = ⟨q_i, q_j⟩` of the two coordinates.
    pub fn gram(&self) -> Mat2 {
        let zw = self.z.inner_l2(&self.w);
        Mat2::new(
            Complex64::new(self.z.norm_sq(), 0.0),
            zw,
            zw.conj(),
            Complex64::new(self.w.norm_sq(), 0.0),
        )
    }

    pub fn chop(&self, eps: f64) -> QuatPath {
        QuatPath::new(self.z.chop(eps), self.w.chop(eps))
    }

    /// Largest coefficient difference, a cheap distance for tests.
    pub fn max_coeff_diff(&self, other: &QuatPath) -> f64 {
        let d = self.sub(other);
        d.z.max_abs_coeff().max(d.w.max_abs_coeff())
    }
}
