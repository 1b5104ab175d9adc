//! Elastic energy `E = 4∫|q′|² dt`, its L² gradient `−8q″`,
//! the geometry of the Stiefel manifold of Hermitian-orthonormal 2-frames
//! and a projected gradient flow on it.
//!
//! Normalization: the L² product uses the raw measure on `[0, 2]`, a Stiefel
//! point has `‖z‖² = ‖w‖² = 1` and `⟨z, w⟩ = 0`, so the framed curve has
//! length 2 and the critical energies are `π²(c² + d²)`.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{FourierSeries, Parity};
use crate::quat::QuatPath;
use crate::unitary::{c64, inv_sqrt_hermitian, Mat2};

/// Tolerance on the Stiefel constraints.
pub const STIEFEL_TOL: f64 = 1e-10;

/// `E(q) = 4∫₀²|q′|² dt`, computed from the Fourier coefficients.
pub fn energy(q: &QuatPath) -> f64 {
    4.0 * q.derivative().norm_sq()
}

/// `E(a) − E(b)`, accurate even when the two energies agree to many digits.
pub fn energy_difference(a: &QuatPath, b: &QuatPath) -> f64 {
    4.0 * a.sub(b).derivative().metric(&a.add(b).derivative())
}

/// L² gradient `−8q″` on closed or anticlosed paths.
pub fn gradient(q: &QuatPath) -> Result<QuatPath> {
    q.require_pure()?;
    Ok(q.second_derivative().scale_re(-8.0))
}

/// A point of `St₂°(𝒱)`: equinorm, orthogonal, pure parity, nonvanishing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QuatPath", into = "QuatPath")]
pub struct StiefelPoint {
    q: QuatPath,
}

impl StiefelPoint {
    pub fn new(q: QuatPath) -> Result<Self> {
        let p = Self::new_unchecked_open(q)?;
        p.q.require_nonvanishing().map_err(|e| Error::NotInStiefel(e.to_string()))?;
        Ok(p)
    }

    /// Checks the algebraic Stiefel constraints but not nonvanishing.
    pub(crate) fn new_unchecked_open(q: QuatPath) -> Result<Self> {
        if q.parity() == Parity::Mixed {
            return Err(Error::MixedParity);
        }
        let zz = q.z.norm_sq();
        let ww = q.w.norm_sq();
        let zw = q.z.inner_l2(&q.w).norm();
        if (zz - 1.0).abs() > STIEFEL_TOL || (ww - 1.0).abs() > STIEFEL_TOL || zw > STIEFEL_TOL {
            return Err(Error::NotInStiefel(format!("‖z‖² = {zz}, ‖w‖² = {ww}, |⟨z,w⟩| = {zw:e}")));
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> &QuatPath {
        &self.q
    }

    pub fn into_inner(self) -> QuatPath {
        self.q
    }

    pub fn parity(&self) -> Parity {
        self.q.parity()
    }

    /// Right action of a unitary matrix; stays on the manifold.
    pub fn act(&self, a: &Mat2) -> StiefelPoint {
        StiefelPoint { q: self.q.mul_matrix(a) }
    }

    /// Random point with the given parity and frequencies in `[-max_freq, max_freq]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, parity: Parity, max_freq: i32) -> Result<Self> {
        let want = match parity {
            Parity::Even => 0,
            Parity::Odd => 1,
            Parity::Mixed => return Err(Error::MixedParity),
        };
        let freqs: Vec<i32> = (-max_freq..=max_freq).filter(|k| k.rem_euclid(2) == want).collect();
        if freqs.len() < 2 {
            return Err(Error::Invalid(format!("need at least two frequencies, max_freq = {max_freq}")));
        }
        let mut draw = || {
            FourierSeries::from_terms(freqs.iter().map(|&k| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                (k, c64(re, im))
            }))
        };
        let z = draw();
        let w = draw();
        retract(&QuatPath::new(z, w))
    }
}

impl TryFrom<QuatPath> for StiefelPoint {
    type Error = Error;
    fn try_from(q: QuatPath) -> Result<Self> {
        StiefelPoint::new(q)
    }
}

impl From<StiefelPoint> for QuatPath {
    fn from(p: StiefelPoint) -> Self {
        p.q
    }
}

/// Hermitian coefficient matrix `[[λ₁, λ₃ − iλ₄], [λ₃ + iλ₄, λ₂]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermitianPair {
    pub lambda: [f64; 4],
}

impl HermitianPair {
    pub fn matrix(&self) -> Mat2 {
        let [l1, l2, l3, l4] = self.lambda;
        Mat2::new(c64(l1, 0.0), c64(l3, -l4), c64(l3, l4), c64(l2, 0.0))
    }

    /// `Λ·(z, w)ᵀ` as a path.
    pub fn apply(&self, q: &QuatPath) -> QuatPath {
        // column action equals the row action by the transpose
        q.mul_matrix(&self.matrix().transpose())
    }
}

fn normal_vectors(q: &QuatPath) -> [QuatPath; 4] {
    let i = c64(0.0, 1.0);
    let zero = FourierSeries::zero();
    [
        QuatPath::new(q.z.clone(), zero.clone()),
        QuatPath::new(zero, q.w.clone()),
        QuatPath::new(q.w.clone(), q.z.clone()),
        QuatPath::new(q.w.scale(-i), q.z.scale(i)),
    ]
}

/// Orthonormal basis of the normal space to `St₂` at `q` with respect to
/// `Re⟨·,·⟩_{L²}`: `(z,0), (0,w), (w,z), (−iw, iz)`, each scaled to unit norm.
pub fn normal_frame(q: &StiefelPoint) -> [QuatPath; 4] {
    normal_vectors(&q.q).map(|n| {
        let s = n.norm();
        n.scale_re(1.0 / s)
    })
}

/// Least-squares decomposition of `x` along the (not necessarily
/// orthonormal) vectors `basis`.
fn decompose(basis: &[QuatPath; 4], x: &QuatPath) -> Vector4<f64> {
    let g = Matrix4::from_fn(|i, j| basis[i].metric(&basis[j]));
    let b = Vector4::from_fn(|i, _| x.metric(&basis[i]));
    g.lu().solve(&b).unwrap_or_else(Vector4::zeros)
}

/// Orthogonal projection onto `T_q St₂`.
pub fn project_tangent(q: &StiefelPoint, x: &QuatPath) -> QuatPath {
    let basis = normal_vectors(&q.q);
    let coef = decompose(&basis, x);
    basis.iter().zip(coef.iter()).fold(x.clone(), |acc, (n, &a)| acc.axpy(-a, n))
}

/// The tangent-space equations at `q` evaluated on `x`:
/// `Re⟨z,X_z⟩, Re⟨w,X_w⟩, ⟨z,X_w⟩ + ⟨X_z,w⟩`.
pub fn tangent_equations(q: &StiefelPoint, x: &QuatPath) -> (f64, f64, Complex64) {
    let q = &q.q;
    (q.z.inner_l2(&x.z).re, q.w.inner_l2(&x.w).re, q.z.inner_l2(&x.w) + x.z.inner_l2(&q.w))
}

/// Polar retraction `q ↦ q·G^{-1/2}`, the nearest Stiefel point.
pub fn retract(q: &QuatPath) -> Result<StiefelPoint> {
    q.require_pure()?;
    let (s, lmin) = inv_sqrt_hermitian(&q.gram());
    if !(lmin >= 1e-12) {
        return Err(Error::RankDeficient { min_eigenvalue: lmin });
    }
    // (q·A) has Gram Aᵀ G Ā, so A = conj(G^{-1/2}).
    let a = s.map(|x| x.conj());
    StiefelPoint::new_unchecked_open(q.mul_matrix(&a))
}

/// Fits the Hermitian `Λ` minimizing `‖q″ − Λq‖_{L²}` and returns the residual.
pub fn fit_lambda(q: &StiefelPoint) -> (HermitianPair, f64) {
    let basis = normal_vectors(&q.q);
    let qpp = q.q.second_derivative();
    let coef = decompose(&basis, &qpp);
    let fit = HermitianPair { lambda: [coef[0], coef[1], coef[2], coef[3]] };
    let residual = qpp.sub(&fit.apply(&q.q)).norm();
    (fit, residual)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowParams {
    pub step: f64,
    pub grad_tol: f64,
    pub max_iter: usize,
}

impl Default for FlowParams {
    fn default() -> Self {
        Self { step: 1e-3, grad_tol: 1e-8, max_iter: 200_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStatus {
    Converged,
    MaxIterations,
    /// Backtracking shrank the step below machine resolution.
    Stalled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowSample {
    pub iteration: usize,
    pub energy: f64,
    pub residual: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowResult {
    pub trajectory: Vec<FlowSample>,
    pub limit: StiefelPoint,
    pub residual: f64,
    pub fitted: HermitianPair,
    pub fit_residual: f64,
    pub status: FlowStatus,
    /// The limit left the nonvanishing stratum (`min |q|² < 1e-8`).
    pub degenerate: bool,
}

impl FlowResult {
    pub fn converged(&self) -> bool {
        self.status == FlowStatus::Converged
    }

    pub fn final_energy(&self) -> f64 {
        energy(self.limit.q())
    }

    /// Turns a non-converged run into [`Error::NoConvergence`].
    pub fn require_converged(self) -> Result<FlowResult> {
        if self.converged() {
            Ok(self)
        } else {
            Err(Error::NoConvergence { iterations: self.trajectory.len(), residual: self.residual })
        }
    }
}

/// `L(a) − L(b)` for the Lagrangian `L = E − Σ μᵢ·½Re⟨q, Bᵢq⟩`, where `Bᵢq`
/// are the normal vectors and `μ` the normal coordinates of the gradient.
/// On the manifold `L = E`; off it the first-order constraint drift cancels.
fn lagrangian_difference(a: &QuatPath, b: &QuatPath, mu: &Vector4<f64>) -> f64 {
    let diff = a.sub(b);
    let normals = normal_vectors(&a.add(b));
    let drift: f64 = normals.iter().zip(mu.iter()).map(|(n, m)| m * 0.5 * diff.metric(n)).sum();
    energy_difference(a, b) - drift
}

/// Projected gradient descent `q ← retract(q − step·P_T grad E)`; a step is
/// halved whenever the energy would increase and doubled back (up to
/// `params.step`) after acceptance.
///
/// Acceptance compares the constraint-corrected energy of
/// [`lagrangian_difference`], which resolves decreases far below the rounding
/// level of `E` itself. The recorded trajectory is the running sum of these
/// differences and tracks `energy` of the iterates to about `1e-12`.
pub fn flow(q0: &StiefelPoint, params: &FlowParams) -> Result<FlowResult> {
    if !(params.step > 0.0) {
        return Err(Error::Invalid(format!("step must be positive, got {}", params.step)));
    }
    let mut q = q0.clone();
    let mut step = params.step;
    let mut e = energy(q.q());
    let mut trajectory = Vec::new();
    let mut status = FlowStatus::MaxIterations;
    let mut residual = f64::INFINITY;

    for iteration in 0..=params.max_iter {
        let grad = gradient(q.q())?;
        let basis = normal_vectors(q.q());
        let mu = decompose(&basis, &grad);
        let g = basis.iter().zip(mu.iter()).fold(grad, |acc, (n, &a)| acc.axpy(-a, n));
        residual = g.norm();
        trajectory.push(FlowSample { iteration, energy: e, residual, step });
        if residual < params.grad_tol {
            status = FlowStatus::Converged;
            break;
        }
        if iteration == params.max_iter {
            break;
        }
        loop {
            let candidate = retract(&q.q().axpy(-step, &g))?;
            let de = lagrangian_difference(candidate.q(), q.q(), &mu);
            if de <= 0.0 {
                q = candidate;
                e += de;
                step = (2.0 * step).min(params.step);
                break;
            }
            step *= 0.5;
            if step < 1e-20 {
                status = FlowStatus::Stalled;
                break;
            }
        }
        if status == FlowStatus::Stalled {
            break;
        }
    }

    let (fitted, fit_residual) = fit_lambda(&q);
    let degenerate = q.q().min_norm_sq(crate::quat::NONVANISHING_GRID) < 1e-8;
    log::debug!("flow finished: {status:?} after {} samples, residual {residual:e}", trajectory.len());
    Ok(FlowResult { trajectory, limit: q, residual, fitted, fit_residual, status, degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unitary::{random_u2, u2_lie_basis};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn e(k: i32) -> FourierSeries {
        FourierSeries::mono(k, c64(1.0, 0.0))
    }

    fn pair(a: i32, b: i32) -> QuatPath {
        QuatPath::new(e(a).scale_re(FRAC_1_SQRT_2), e(b).scale_re(FRAC_1_SQRT_2))
    }

    /// Trapezoid quadrature of 4|q′|² on a periodic grid.
    fn energy_quadrature(q: &QuatPath, n: usize) -> f64 {
        let dq = q.derivative();
        (0..n).map(|i| 4.0 * dq.norm_sq_at(2.0 * i as f64 / n as f64)).sum::<f64>() * 2.0 / n as f64
    }

    #[test]
    fn energy_examples() {
        assert_eq!(energy(&QuatPath::new(e(0), FourierSeries::zero())), 0.0);
        let q = pair(1, -1);
        assert!((energy(&q) - 2.0 * PI * PI).abs() < 1e-12);
        assert!((energy_quadrature(&q, 4096) - 2.0 * PI * PI).abs() < 1e-10);
    }

    #[test]
    fn gradient_examples() {
        let q = pair(2, -2);
        let g = gradient(&q).unwrap();
        assert!(g.max_coeff_diff(&q.scale_re(8.0 * PI * PI)) < 1e-12);
        assert!(gradient(&QuatPath::new(e(0), FourierSeries::zero())).unwrap().z.is_zero());
        assert_eq!(gradient(&QuatPath::new(e(1), e(2))), Err(Error::MixedParity));
    }

    #[test]
    fn normal_frame_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q = StiefelPoint::random(&mut rng, Parity::Odd, 5).unwrap();
        let n = normal_frame(&q);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((n[i].metric(&n[j]) - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn normal_component_of_gradient() {
        let q = StiefelPoint::new(pair(2, 4)).unwrap();
        let g = gradient(q.q()).unwrap();
        // ⟨(z,0), −8q″⟩ = −8⟨z, z″⟩ = 8‖z′‖² = 8π²
        let zpart = QuatPath::new(q.q().z.clone(), FourierSeries::zero());
        assert!((zpart.metric(&g) - 8.0 * PI * PI).abs() < 1e-10);
        assert!(project_tangent(&q, &g).norm() < 1e-9);
    }

    #[test]
    fn projection_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q = StiefelPoint::random(&mut rng, Parity::Even, 4).unwrap();
        let zpart = QuatPath::new(q.q().z.clone(), FourierSeries::zero());
        assert!(project_tangent(&q, &zpart).norm() < 1e-12);

        let other = StiefelPoint::random(&mut rng, Parity::Even, 4).unwrap();
        let x = project_tangent(&q, other.q());
        let (a, b, c) = tangent_equations(&q, &x);
        assert!(a.abs() < 1e-10 && b.abs() < 1e-10 && c.norm() < 1e-10);
        let again = project_tangent(&q, &x);
        assert!(again.sub(&x).norm() < 1e-12);
    }

    #[test]
    fn retract_examples() {
        let q = pair(1, 3);
        let r = retract(&q).unwrap();
        assert!(r.q().max_coeff_diff(&q) < 1e-12);

        let q = QuatPath::new(e(2).scale_re(2.0), e(4));
        let r = retract(&q).unwrap();
        assert!(r.q().max_coeff_diff(&pair(2, 4)) < 1e-12);

        let degenerate = QuatPath::new(e(1), e(1));
        assert!(matches!(retract(&degenerate), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn retraction_is_lipschitz_near_the_manifold() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let q = StiefelPoint::random(&mut rng, Parity::Odd, 5).unwrap();
            let noise = StiefelPoint::random(&mut rng, Parity::Odd, 5).unwrap();
            let dir = noise.q().scale_re(1.0 / noise.q().norm());
            let perturbed = q.q().axpy(1e-3, &dir);
            let r = retract(&perturbed).unwrap();
            assert!(r.q().sub(&perturbed).norm() < 2e-3);
        }
    }

    #[test]
    fn fit_lambda_examples() {
        let q = StiefelPoint::new(pair(2, 4)).unwrap();
        let (fit, res) = fit_lambda(&q);
        let expect = [-PI * PI, -4.0 * PI * PI, 0.0, 0.0];
        for (a, b) in fit.lambda.iter().zip(expect) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!(res < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let generic = StiefelPoint::random(&mut rng, Parity::Odd, 5).unwrap();
        assert!(fit_lambda(&generic).1 > 1e-8);
    }

    #[test]
    fn energy_is_u2_invariant_and_gradient_is_orthogonal_to_orbits() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let q = StiefelPoint::random(&mut rng, Parity::Odd, 5).unwrap();
            let a = random_u2(&mut rng);
            assert!((energy(q.act(&a).q()) - energy(q.q())).abs() < 1e-10);
            let g = gradient(q.q()).unwrap();
            for xi in u2_lie_basis() {
                assert!(g.metric(&q.q().mul_matrix(&xi)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn flow_stays_put_at_critical_points() {
        let q = StiefelPoint::new(pair(1, -1)).unwrap();
        let r = flow(&q, &FlowParams::default()).unwrap();
        assert!(r.converged());
        assert_eq!(r.trajectory.len(), 1);
    }

    #[test]
    fn flow_descends_to_a_critical_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let q = StiefelPoint::random(&mut rng, Parity::Odd, 5).unwrap();
        let r = flow(&q, &FlowParams::default()).unwrap();
        assert!(r.converged(), "{:?}", r.status);
        assert!(r.trajectory.windows(2).all(|w| w[1].energy <= w[0].energy));
        assert!(r.fit_residual < 1e-5);
        assert!((r.trajectory.last().unwrap().energy - r.final_energy()).abs() < 1e-9);
    }

    #[test]
    fn flow_rejects_bad_step() {
        let q = StiefelPoint::new(pair(1, -1)).unwrap();
        let p = FlowParams { step: 0.0, ..FlowParams::default() };
        assert!(flow(&q, &p).is_err());
    }
}
