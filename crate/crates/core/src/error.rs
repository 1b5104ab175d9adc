use thiserror::Error;

/// Errors raised by the rod laboratory.
///
/// Variants fall into two groups: invalid input (a parameter set or path that
/// violates a precondition) and numerical failure (an algorithm that could not
/// produce a trustworthy answer). [`Error::is_validation`] tells them apart.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("quaternionic path vanishes: min |q|^2 = {min_norm_sq:e}")]
    DegenerateQuaternion { min_norm_sq: f64 },

    #[error("bad interval [{t0}, {t1}]: need 0 <= t0 < t1 <= 2")]
    BadInterval { t0: f64, t1: f64 },

    #[error("framed curve has non-positive speed (min {min_speed:e})")]
    DegenerateSpeed { min_speed: f64 },

    #[error("operation requires a pure-parity (closed or anticlosed) path")]
    MixedParity,

    #[error("path is not a closed framed curve (equinorm residual {equinorm:e}, orthogonality residual {orthogonality:e})")]
    NotClosed { equinorm: f64, orthogonality: f64 },

    #[error("Gram matrix is rank deficient (min eigenvalue {min_eigenvalue:e})")]
    RankDeficient { min_eigenvalue: f64 },

    #[error("point is not on the Stiefel manifold: {0}")]
    NotInStiefel(String),

    #[error("gradient flow did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("point is not critical (fit residual {residual:e})")]
    NotCritical { residual: f64 },

    #[error("frequencies ({c}, {d}) must be congruent mod 2 and not both zero")]
    BadParity { c: i32, d: i32 },

    #[error("degenerate family parameters (h, k) = ({h}, {k})")]
    DegenerateFamily { h: i32, k: i32 },

    #[error("torus-knot prediction requires gcd(h, h+k) = gcd(k, h+k) = 1, got (h, k) = ({h}, {k})")]
    GcdViolation { h: i32, k: i32 },

    #[error("base curve is multiply covered: coincidences form a continuum")]
    ContinuumCoincidence,

    #[error("base curve is not embedded: {0}")]
    NotEmbedded(String),

    #[error("no generic projection found after {attempts} attempts")]
    NonGenericProjection { attempts: usize },

    #[error("diagram has {components} components, expected a knot")]
    NotAKnot { components: usize },

    #[error("curve and its pushoff intersect")]
    ComponentsIntersect,

    #[error("integer overflow in Laurent determinant")]
    Overflow,

    #[error("closed-form cross-check failed: {0}")]
    ClosedFormMismatch(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// True when the error reflects bad input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::BadInterval { .. }
                | Error::MixedParity
                | Error::NotClosed { .. }
                | Error::NotInStiefel(_)
                | Error::NotCritical { .. }
                | Error::BadParity { .. }
                | Error::DegenerateFamily { .. }
                | Error::GcdViolation { .. }
                | Error::NotEmbedded(_)
                | Error::NotAKnot { .. }
                | Error::Invalid(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
