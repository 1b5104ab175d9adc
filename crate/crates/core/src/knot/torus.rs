//! Torus-knot Alexander polynomials and identification.

use serde::{Deserialize, Serialize};

use super::laurent::LaurentPoly;
use crate::critical::gcd;
use crate::error::Result;

/// Search bound on `q` in [`identify_torus`].
pub const MAX_TORUS_Q: u32 = 13;

/// `Δ_{T(p,q)} = (t^{pq} − 1)(t − 1) / ((t^p − 1)(t^q − 1))`, normalized.
pub fn torus_alexander(p: u32, q: u32) -> Result<LaurentPoly> {
    let tm1 = |n: u32| LaurentPoly::from_pairs([(n as i32, 1), (0, -1)]);
    let num = tm1(p * q).mul(&tm1(1))?;
    let den = tm1(p).mul(&tm1(q))?;
    Ok(num.div_exact(&den)?.normalized())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusMatch {
    pub p: u32,
    pub q: u32,
    /// The Alexander polynomial cannot tell `T(p,q)` from its mirror.
    pub chirality_unknown: bool,
}

/// The torus knot `T(p, q)`, `2 ≤ p < q ≤ 13`, `gcd(p, q) = 1`, whose
/// Alexander polynomial equals `poly` up to units.
pub fn identify_torus(poly: &LaurentPoly) -> Option<TorusMatch> {
    let target = poly.normalized();
    // T(p,q) has span (p−1)(q−1)
    let span = target.span() as u32;
    for p in 2..MAX_TORUS_Q {
        for q in p + 1..=MAX_TORUS_Q {
            if gcd(p as i32, q as i32) != 1 || (p - 1) * (q - 1) != span {
                continue;
            }
            if torus_alexander(p, q).ok().as_ref() == Some(&target) {
                return Some(TorusMatch { p, q, chirality_unknown: true });
            }
        }
    }
    None
}
