//! Closed space curves with exact evaluation, used by the diagram code.

use crate::fourier::PERIOD;
use crate::framed::{HopfSeries, Vec3};

/// A smooth closed curve parameterized on `[0, period)`.
pub trait ClosedCurve: Sync {
    fn point(&self, t: f64) -> Vec3;
    fn velocity(&self, t: f64) -> Vec3;
    fn period(&self) -> f64 {
        PERIOD
    }
}

impl ClosedCurve for HopfSeries {
    fn point(&self, t: f64) -> Vec3 {
        self.gamma_at(t)
    }

    fn velocity(&self, t: f64) -> Vec3 {
        self.tangent_at(t)
    }
}

/// `γ + εV` for the centerline and frame of a framed curve.
pub struct Pushoff<'a> {
    pub base: &'a HopfSeries,
    pub epsilon: f64,
}

impl ClosedCurve for Pushoff<'_> {
    fn point(&self, t: f64) -> Vec3 {
        self.base.gamma_at(t) + self.base.frame_at(t) * self.epsilon
    }

    fn velocity(&self, t: f64) -> Vec3 {
        self.base.tangent_at(t) + self.base.frame_derivative_at(t) * self.epsilon
    }
}

/// One sheet of a multiply covered curve: `curve` on `[0, period)`.
pub struct Sheet<'a> {
    pub curve: &'a dyn ClosedCurve,
    pub period: f64,
}

impl ClosedCurve for Sheet<'_> {
    fn point(&self, t: f64) -> Vec3 {
        self.curve.point(t)
    }

    fn velocity(&self, t: f64) -> Vec3 {
        self.curve.velocity(t)
    }

    fn period(&self) -> f64 {
        self.period
    }
}

/// A curve given by closures, mostly for tests and synthetic inputs.
pub struct FnCurve<F, G> {
    pub f: F,
    pub df: G,
    pub period: f64,
}

impl<F, G> ClosedCurve for FnCurve<F, G>
where
    F: Fn(f64) -> Vec3 + Sync,
    G: Fn(f64) -> Vec3 + Sync,
{
    fn point(&self, t: f64) -> Vec3 {
        (self.f)(t)
    }

    fn velocity(&self, t: f64) -> Vec3 {
        (self.df)(t)
    }

    fn period(&self) -> f64 {
        self.period
    }
}

/// Reduces `t` into `[0, period)`.
pub fn wrap(t: f64, period: f64) -> f64 {
    let r = t.rem_euclid(period);
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Distance between two parameters on the circle of length `period`.
pub fn cyclic_distance(a: f64, b: f64, period: f64) -> f64 {
    let d = wrap(a - b, period);
    d.min(period - d)
}
