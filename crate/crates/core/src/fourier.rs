//! Exact arithmetic on finite Fourier series over the interval `I = [0, 2]`.
//!
//! The basis functions are `e(k)(t) = exp(iπkt/2)` for integer `k`. Even
//! frequencies give functions that close smoothly on `I`; odd frequencies give
//! *anticlosed* functions, whose derivatives of every order negate between
//! `t = 0` and `t = 2`.
//!
//! The L² inner product uses the raw measure `∫₀² · dt`, so `‖e(k)‖² = 2`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Length of the parameter interval.
pub const PERIOD: f64 = 2.0;

/// Default threshold for [`FourierSeries::chop`].
pub const CHOP_EPS: f64 = 1e-13;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Frequency parity of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    /// Every frequency even: the function closes smoothly on `[0, 2]`.
    Even,
    /// Every frequency odd: the function is anticlosed.
    Odd,
    /// Both parities present.
    Mixed,
}

impl Parity {
    fn of(k: i32) -> Parity {
        if k.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Parity of a product of functions with parities `self` and `other`.
    pub fn product(self, other: Parity) -> Parity {
        match (self, other) {
            (Parity::Mixed, _) | (_, Parity::Mixed) => Parity::Mixed,
            (a, b) if a == b => Parity::Even,
            _ => Parity::Odd,
        }
    }

    pub fn is_pure(self) -> bool {
        self != Parity::Mixed
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::Mixed => "mixed",
        })
    }
}

/// Value of `e(k)(t)`.
#[inline]
pub fn basis(k: i32, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, 0.5 * PI * f64::from(k) * t)
}

/// Derivative multiplier of `e(k)`: `e(k)' = (iπk/2)·e(k)`.
#[inline]
pub fn derivative_factor(k: i32) -> Complex64 {
    I * (0.5 * PI * f64::from(k))
}

/// `∫₀² e(m) dt`, exactly.
#[inline]
pub fn basis_integral(m: i32) -> Complex64 {
    if m == 0 {
        Complex64::new(PERIOD, 0.0)
    } else if m % 2 == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        // (e^{iπm} - 1) / (iπm/2) with e^{iπm} = -1
        Complex64::new(0.0, 4.0 / (PI * f64::from(m)))
    }
}

/// A finite linear combination `Σ c_k e(k)` with nonzero coefficients only.
#[derive(Clone, Default, PartialEq)]
pub struct FourierSeries {
    coeffs: BTreeMap<i32, Complex64>,
}

impl FourierSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `c·e(k)`.
    pub fn mono(k: i32, c: Complex64) -> Self {
        Self::from_terms([(k, c)])
    }

    pub fn constant(c: Complex64) -> Self {
        Self::mono(0, c)
    }

    /// Builds a series from `(frequency, coefficient)` pairs. Repeated
    /// frequencies are summed; exact zeros are pruned.
    pub fn from_terms<It: IntoIterator<Item = (i32, Complex64)>>(terms: It) -> Self {
        let mut coeffs = BTreeMap::new();
        for (k, c) in terms {
            *coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Self { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient at frequency `k` (zero when absent).
    pub fn coeff(&self, k: i32) -> Complex64 {
        self.coeffs.get(&k).copied().unwrap_or_default()
    }

    /// Stored terms in increasing frequency.
    pub fn terms(&self) -> impl Iterator<Item = (i32, Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn frequencies(&self) -> impl Iterator<Item = i32> + '_ {
        self.coeffs.keys().copied()
    }

    /// Largest `|k|` present, 0 for the zero series.
    pub fn max_frequency(&self) -> i32 {
        self.coeffs.keys().map(|k| k.abs()).max().unwrap_or(0)
    }

    /// Parity of the stored frequencies. The zero series reports `Even`.
    pub fn parity(&self) -> Parity {
        let mut it = self.coeffs.keys().map(|&k| Parity::of(k));
        let Some(first) = it.next() else {
            return Parity::Even;
        };
        if it.all(|p| p == first) {
            first
        } else {
            Parity::Mixed
        }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.coeffs.iter().map(|(&k, &c)| c * basis(k, t)).sum()
    }

    pub fn eval_many(&self, ts: &[f64]) -> Vec<Complex64> {
        ts.iter().map(|&t| self.eval(t)).collect()
    }

    /// Pointwise complex conjugate: `conj(Σ c_k e(k)) = Σ conj(c_k) e(-k)`.
    pub fn conj(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&k, c)| (-k, c.conj())).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.terms().map(|(k, c)| (k, c * s)))
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn derivative(&self) -> Self {
        Self::from_terms(self.terms().map(|(k, c)| (k, c * derivative_factor(k))))
    }

    /// `n`-th derivative.
    pub fn derivative_n(&self, n: u32) -> Self {
        (0..n).fold(self.clone(), |acc, _| acc.derivative())
    }

    /// The antiderivative taking the value `value_at_0` at `t = 0`. The DC
    /// mode integrates to the linear term.
    pub fn antiderivative(&self, value_at_0: Complex64) -> AffineFourier {
        let series =
            Self::from_terms(self.terms().filter(|&(k, _)| k != 0).map(|(k, c)| (k, c / derivative_factor(k))));
        let constant = value_at_0 - series.eval(0.0);
        AffineFourier {
            series,
            linear: self.coeff(0),
            constant,
        }
    }

    /// Real part as a series (the function `Re f(t)`).
    pub fn re_part(&self) -> Self {
        (self + &self.conj()).scale_re(0.5)
    }

    /// Imaginary part as a series (the function `Im f(t)`).
    pub fn im_part(&self) -> Self {
        (self - &self.conj()).scale(Complex64::new(0.0, -0.5))
    }

    /// Pointwise squared modulus `|f(t)|²`.
    pub fn abs_sq(&self) -> Self {
        self * &self.conj()
    }

    /// `∫₀² f dt`, exactly.
    pub fn integral(&self) -> Complex64 {
        self.terms().map(|(k, c)| c * basis_integral(k)).sum()
    }

    /// Hermitian L² product `∫₀² a·conj(b) dt`.
    ///
    /// Modes of equal parity are orthogonal with `⟨e(k), e(k)⟩ = 2`; modes of
    /// opposite parity are not, and their cross terms are included.
    pub fn inner_l2(&self, other: &Self) -> Complex64 {
        let (pa, pb) = (self.parity(), other.parity());
        if pa.is_pure() && pa == pb {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, a) in self.terms() {
                if let Some(b) = other.coeffs.get(&k) {
                    acc += a * b.conj();
                }
            }
            acc * PERIOD
        } else {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, a) in self.terms() {
                for (k, b) in other.terms() {
                    acc += a * b.conj() * basis_integral(j - k);
                }
            }
            acc
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner_l2(self).re
    }

    /// Drops coefficients with modulus at most `eps`.
    pub fn chop(&self, eps: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().filter(|(_, c)| c.norm() > eps).map(|(&k, &c)| (k, c)).collect(),
        }
    }

    /// Largest coefficient modulus.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl fmt::Debug for FourierSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.coeffs.iter()).finish()
    }
}

impl Add for &FourierSeries {
    type Output = FourierSeries;
    fn add(self, rhs: &FourierSeries) -> FourierSeries {
        FourierSeries::from_terms(self.terms().chain(rhs.terms()))
    }
}

impl Sub for &FourierSeries {
    type Output = FourierSeries;
    fn sub(self, rhs: &FourierSeries) -> FourierSeries {
        FourierSeries::from_terms(self.terms().chain(rhs.terms().map(|(k, c)| (k, -c))))
    }
}

impl Neg for &FourierSeries {
    type Output = FourierSeries;
    fn neg(self) -> FourierSeries {
        FourierSeries {
            coeffs: self.coeffs.iter().map(|(&k, &c)| (k, -c)).collect(),
        }
    }
}

impl Mul for &FourierSeries {
    type Output = FourierSeries;
    fn mul(self, rhs: &FourierSeries) -> FourierSeries {
        FourierSeries::from_terms(
            self.terms()
                .flat_map(|(j, a)| rhs.terms().map(move |(k, b)| (j + k, a * b))),
        )
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for FourierSeries {
            type Output = FourierSeries;
            fn $m(self, rhs: FourierSeries) -> FourierSeries {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[derive(Serialize, Deserialize)]
struct Term {
    k: i32,
    re: f64,
    im: f64,
}

impl Serialize for FourierSeries {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<Term> = self.terms().map(|(k, c)| Term { k, re: c.re, im: c.im }).collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FourierSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let terms = Vec::<Term>::deserialize(d)?;
        if terms.windows(2).any(|w| w[0].k >= w[1].k) {
            return Err(serde::de::Error::custom("frequencies must be strictly increasing"));
        }
        Ok(FourierSeries::from_terms(terms.into_iter().map(|t| (t.k, Complex64::new(t.re, t.im)))))
    }
}

/// `series(t) + linear·t + constant`, the shape of an antiderivative.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFourier {
    pub series: FourierSeries,
    pub linear: Complex64,
    pub constant: Complex64,
}

impl AffineFourier {
    pub fn eval(&self, t: f64) -> Complex64 {
        self.series.eval(t) + self.linear * t + self.constant
    }

    /// True when the antiderivative closes up over a full period.
    pub fn is_periodic(&self) -> bool {
        self.linear == Complex64::new(0.0, 0.0)
    }

    /// `F(t1) - F(t0)`, i.e. the definite integral of the integrand.
    pub fn increment(&self, t0: f64, t1: f64) -> Complex64 {
        self.eval(t1) - self.eval(t0)
    }

    /// Derivative, i.e. the original integrand.
    pub fn derivative(&self) -> FourierSeries {
        &self.series.derivative() + &FourierSeries::constant(self.linear)
    }
}

/// Endpoint-inclusive uniform grid of `n` samples on `[0, 2]`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    assert!(n >= 2, "grid needs at least two samples");
    (0..n).map(|i| PERIOD * i as f64 / (n - 1) as f64).collect()
}

/// Periodic (endpoint-exclusive) grid of `n` samples on `[0, 2)`.
pub fn periodic_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| PERIOD * i as f64 / n as f64).collect()
}
