//! Integer Laurent polynomials in `t` with overflow-checked arithmetic.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// `Σ coeffs[i]·t^(low + i)`; trailing and leading zeros are trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    low: i32,
    coeffs: Vec<i128>,
}

fn ovf<T>(x: Option<T>) -> Result<T> {
    x.ok_or(Error::Overflow)
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self { low: 0, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    pub fn monomial(exp: i32, c: i128) -> Self {
        Self { low: exp, coeffs: vec![c] }.trimmed()
    }

    /// From `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_pairs<I: IntoIterator<Item = (i32, i128)>>(pairs: I) -> Self {
        let pairs: Vec<_> = pairs.into_iter().collect();
        let Some(lo) = pairs.iter().map(|p| p.0).min() else {
            return Self::zero();
        };
        let hi = pairs.iter().map(|p| p.0).max().unwrap_or(lo);
        let mut coeffs = vec![0i128; (hi - lo + 1) as usize];
        for (e, c) in pairs {
            coeffs[(e - lo) as usize] += c;
        }
        Self { low: lo, coeffs }.trimmed()
    }

    /// Dense coefficients from exponent `low` upwards.
    pub fn from_coeffs(low: i32, coeffs: Vec<i128>) -> Self {
        Self { low, coeffs }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|&&c| c == 0).count();
        if lead == self.coeffs.len() {
            return Self { low: 0, coeffs: Vec::new() };
        }
        self.coeffs.drain(..lead);
        self.low += lead as i32;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn low(&self) -> i32 {
        self.low
    }

    pub fn high(&self) -> i32 {
        self.low + self.coeffs.len() as i32 - 1
    }

    /// `high − low`; zero for monomials and for the zero polynomial.
    pub fn span(&self) -> i32 {
        if self.is_zero() {
            0
        } else {
            self.high() - self.low
        }
    }

    pub fn coeff(&self, exp: i32) -> i128 {
        let i = exp - self.low;
        if i < 0 {
            0
        } else {
            self.coeffs.get(i as usize).copied().unwrap_or(0)
        }
    }

    pub fn pairs(&self) -> Vec<(i32, i128)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (self.low + i as i32, c))
            .collect()
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.combine(o, 1)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.combine(o, -1)
    }

    fn combine(&self, o: &Self, sign: i128) -> Result<Self> {
        if o.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return o.scale(sign);
        }
        let lo = self.low.min(o.low);
        let hi = self.high().max(o.high());
        let mut c = vec![0i128; (hi - lo + 1) as usize];
        for (i, &a) in self.coeffs.iter().enumerate() {
            c[(self.low - lo) as usize + i] = a;
        }
        for (i, &b) in o.coeffs.iter().enumerate() {
            let slot = &mut c[(o.low - lo) as usize + i];
            *slot = ovf(slot.checked_add(ovf(b.checked_mul(sign))?))?;
        }
        Ok(Self { low: lo, coeffs: c }.trimmed())
    }

    pub fn scale(&self, s: i128) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(|&c| ovf(c.checked_mul(s))).collect::<Result<_>>()?;
        Ok(Self { low: self.low, coeffs }.trimmed())
    }

    pub fn neg(&self) -> Self {
        Self { low: self.low, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i32) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self { low: self.low + k, coeffs: self.coeffs.clone() }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.is_zero() || o.is_zero() {
            return Ok(Self::zero());
        }
        let mut c = vec![0i128; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                c[i + j] = ovf(c[i + j].checked_add(ovf(a.checked_mul(b))?))?;
            }
        }
        Ok(Self { low: self.low + o.low, coeffs: c }.trimmed())
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        let mut out = Self::one();
        for _ in 0..n {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Exact quotient `self / d`; fails with [`Error::Invalid`] if `d` does not
    /// divide `self` in `ℤ[t, t⁻¹]`.
    pub fn div_exact(&self, d: &Self) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::Invalid("division by the zero polynomial".into()));
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let mut rem = self.coeffs.clone();
        let n = d.coeffs.len();
        if rem.len() < n {
            return Err(Error::Invalid("inexact polynomial division".into()));
        }
        let lead = *d.coeffs.last().unwrap();
        let qlen = rem.len() - n + 1;
        let mut q = vec![0i128; qlen];
        for i in (0..qlen).rev() {
            let top = rem[i + n - 1];
            if top == 0 {
                continue;
            }
            if top % lead != 0 {
                return Err(Error::Invalid("inexact polynomial division".into()));
            }
            let f = top / lead;
            q[i] = f;
            for (j, &b) in d.coeffs.iter().enumerate() {
                rem[i + j] = ovf(rem[i + j].checked_sub(ovf(f.checked_mul(b))?))?;
            }
        }
        if rem.iter().any(|&r| r != 0) {
            return Err(Error::Invalid("inexact polynomial division".into()));
        }
        Ok(Self { low: self.low - d.low, coeffs: q }.trimmed())
    }

    /// Value at an integer point `t = ±1`, or any nonzero integer for
    /// nonnegative exponents.
    pub fn eval_int(&self, t: i128) -> Result<i128> {
        if self.low < 0 && t.abs() != 1 {
            return Err(Error::Invalid("negative exponents at |t| ≠ 1".into()));
        }
        let mut acc: i128 = 0;
        for (e, c) in self.pairs() {
            let p = if t.abs() == 1 {
                if t == -1 && e.rem_euclid(2) == 1 {
                    -1
                } else {
                    1
                }
            } else {
                ovf(t.checked_pow(e as u32))?
            };
            acc = ovf(acc.checked_add(ovf(c.checked_mul(p))?))?;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.pairs().iter().map(|&(e, c)| c as f64 * t.powi(e)).sum()
    }

    /// Representative of `±t^k·self` centred on exponent zero with a positive
    /// lowest coefficient. An odd span is centred with one extra exponent on
    /// the positive side.
    pub fn normalized(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let target_low = -(self.span() / 2);
        let shifted = self.shift(target_low - self.low);
        if shifted.coeffs[0] < 0 {
            shifted.neg()
        } else {
            shifted
        }
    }

    /// Equality up to multiplication by units `±t^k`.
    pub fn equiv(&self, o: &Self) -> bool {
        self.normalized() == o.normalized()
    }

    /// `Δ(t) = Δ(t⁻¹)` after normalization.
    pub fn is_symmetric(&self) -> bool {
        let n = self.normalized();
        let mirrored = Self::from_pairs(n.pairs().into_iter().map(|(e, c)| (-e, c)));
        mirrored == n
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.pairs() {
            let neg = c < 0;
            let a = c.unsigned_abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (e, a) {
                (0, _) => write!(f, "{a}")?,
                (1, 1) => write!(f, "t")?,
                (1, _) => write!(f, "{a}t")?,
                (_, 1) => write!(f, "t^{e}")?,
                _ => write!(f, "{a}t^{e}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<(i32, i64)> = self
            .pairs()
            .into_iter()
            .map(|(e, c)| i64::try_from(c).map(|c| (e, c)))
            .collect::<std::result::Result<_, _>>()
            .map_err(serde::ser::Error::custom)?;
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<(i32, i64)>::deserialize(d)?;
        Ok(Self::from_pairs(pairs.into_iter().map(|(e, c)| (e, i128::from(c)))))
    }
}

/// Determinant of a square matrix over `ℤ[t, t⁻¹]` by fraction-free
/// (Bareiss) elimination with row pivoting.
pub fn determinant(mut m: Vec<Vec<LaurentPoly>>) -> Result<LaurentPoly> {
    let n = m.len();
    if n == 0 {
        return Ok(LaurentPoly::one());
    }
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::Invalid("determinant of a non-square matrix".into()));
    }
    let mut sign = 1i128;
    let mut prev = LaurentPoly::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return Ok(LaurentPoly::zero());
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[k][k].mul(&m[i][j])?.sub(&m[i][k].mul(&m[k][j])?)?;
                m[i][j] = num.div_exact(&prev)?;
            }
            m[i][k] = LaurentPoly::zero();
        }
        prev = m[k][k].clone();
    }
    m[n - 1][n - 1].scale(sign)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(pairs: &[(i32, i128)]) -> LaurentPoly {
        LaurentPoly::from_pairs(pairs.iter().copied())
    }

    #[test]
    fn arithmetic() {
        let a = p(&[(1, 1), (0, -1), (-1, 1)]);
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq, p(&[(-2, 1), (-1, -2), (0, 3), (1, -2), (2, 1)]));
        assert_eq!(sq.div_exact(&a).unwrap(), a);
        assert!(sq.div_exact(&p(&[(0, 2), (1, 1)])).is_err());
        assert_eq!(a.eval_int(-1).unwrap(), -3);
        assert_eq!(a.sub(&a).unwrap(), LaurentPoly::zero());
    }

    #[test]
    fn normalization() {
        let a = p(&[(3, -1), (4, 1), (5, -1)]);
        assert_eq!(a.normalized(), p(&[(-1, 1), (0, -1), (1, 1)]));
        assert!(a.is_symmetric());
        assert!(a.equiv(&p(&[(-1, 1), (0, -1), (1, 1)])));
        assert!(!p(&[(0, 1), (1, 2)]).is_symmetric());
    }

    #[test]
    fn display() {
        assert_eq!(p(&[(1, 1), (0, -1), (-1, 1)]).to_string(), "t^-1 - 1 + t");
        assert_eq!(p(&[(0, 3), (2, -2)]).to_string(), "3 - 2t^2");
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let t = p(&[(1, 1)]);
        let one = LaurentPoly::one();
        let omt = one.sub(&t).unwrap();
        // trefoil Alexander matrix with one row and column removed
        let m = vec![vec![omt.clone(), t.clone()], vec![one.neg(), omt.clone()]];
        let d = determinant(m).unwrap();
        assert!(d.equiv(&p(&[(-1, 1), (0, -1), (1, 1)])));
        let m = vec![vec![omt.clone(), t.neg()], vec![one.neg(), omt.clone()]];
        assert!(determinant(m).unwrap().equiv(&p(&[(-1, 1), (0, -3), (1, 1)])));

        let m = vec![
            vec![LaurentPoly::zero(), one.clone(), t.clone()],
            vec![one.clone(), LaurentPoly::zero(), one.clone()],
            vec![t.clone(), one.clone(), LaurentPoly::zero()],
        ];
        // 0·(0−1) − 1·(0 − t) + t·(1 − 0) = 2t
        assert_eq!(determinant(m).unwrap(), p(&[(1, 2)]));
    }

    #[test]
    fn serde_pairs() {
        let a = p(&[(-1, 1), (0, -1), (1, 1)]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "[[-1,1],[0,-1],[1,1]]");
        assert_eq!(serde_json::from_str::<LaurentPoly>(&s).unwrap(), a);
    }
}
