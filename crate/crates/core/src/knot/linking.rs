//! Linking number of a framed curve with its pushoff.

use serde::{Deserialize, Serialize};

use super::curve::{ClosedCurve, Pushoff, Sheet};
use super::double_points::covering_multiplicity;
use super::diagram::{project, Direction};
use crate::error::{Error, Result};
use crate::framed::{closure_report, FramedCurve};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkingReport {
    pub linking: i64,
    /// Number of times the centerline traverses its image.
    pub cover: usize,
    /// Signed count of crossings with the first component on top.
    pub over_ab: i64,
    pub over_ba: i64,
    pub crossings: usize,
    pub projection_direction: [f64; 3],
}

/// Linking number of two disjoint closed curves from the signed crossings of
/// one over the other.
pub fn linking_number(a: &dyn ClosedCurve, b: &dyn ClosedCurve, direction: Direction) -> Result<LinkingReport> {
    let attempts = match direction {
        Direction::Fixed(_) => 1,
        Direction::Auto { .. } => 8,
    };
    for i in 0..attempts {
        let dir = match direction {
            Direction::Auto { seed } => Direction::Auto { seed: seed.wrapping_add(i) },
            d => d,
        };
        let dg = match project(&[a, b], dir, true) {
            Ok(dg) => dg,
            Err(Error::NonGenericProjection { .. }) => return Err(Error::ComponentsIntersect),
            Err(e) => return Err(e),
        };
        let (mut over_ab, mut over_ba) = (0i64, 0i64);
        for c in &dg.crossings {
            if c.over.component == 0 {
                over_ab += c.sign as i64;
            } else {
                over_ba += c.sign as i64;
            }
        }
        if over_ab == over_ba {
            return Ok(LinkingReport {
                linking: over_ab,
                cover: 1,
                over_ab,
                over_ba,
                crossings: dg.crossings.len(),
                projection_direction: dg.projection_direction,
            });
        }
    }
    Err(Error::NonGenericProjection { attempts: attempts as usize })
}

/// `Lk(γ, γ + εV)`. A multiply covered centerline is linked once around
/// its image.
pub fn linking(fc: &FramedCurve, epsilon: f64, direction: Direction) -> Result<LinkingReport> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::Invalid(format!("pushoff distance must be positive, got {epsilon}")));
    }
    let report = closure_report(fc.source());
    if !report.is_closed(1e-10) {
        return Err(Error::NotClosed {
            equinorm: report.equinorm_residual,
            orthogonality: report.orthogonality_residual,
        });
    }
    let pushoff = Pushoff { base: &fc.exact, epsilon };
    match covering_multiplicity(&fc.exact) {
        None => linking_number(&fc.exact, &pushoff, direction),
        Some(n) => {
            let sheet = Sheet { curve: &fc.exact, period: fc.exact.period() / n as f64 };
            let mut r = linking_number(&sheet, &pushoff, direction)?;
            r.cover = n;
            Ok(r)
        }
    }
}
