//! Small complex 2×2 linear algebra: the `U(2)` action on quaternionic paths,
//! Hermitian eigendecomposition and inverse square roots.

use nalgebra::{Matrix2, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type Mat2 = Matrix2<Complex64>;

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Haar-random element of `U(2)`, written `e^{iθ}[[u, v], [-v̄, ū]]`.
pub fn random_u2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let g: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let u = c64(g[0] / n, g[1] / n);
    let v = c64(g[2] / n, g[3] / n);
    let phase = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    Mat2::new(u, v, -v.conj(), u.conj()) * phase
}

/// Basis of the Lie algebra `u(2)`: `iI, iσ_z, iσ_x, iσ_y`.
pub fn u2_lie_basis() -> [Mat2; 4] {
    let i = c64(0.0, 1.0);
    let o = c64(0.0, 0.0);
    let one = c64(1.0, 0.0);
    [
        Mat2::new(i, o, o, i),
        Mat2::new(i, o, o, -i),
        Mat2::new(o, i, i, o),
        Mat2::new(o, one, -one, o),
    ]
}

/// Eigendecomposition of a Hermitian matrix: eigenvalues in ascending order
/// and a unitary whose columns are the matching eigenvectors.
pub fn hermitian_eigen(m: &Mat2) -> ([f64; 2], Mat2) {
    let herm = (m + m.adjoint()) * c64(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let (l0, l1) = (eig.eigenvalues[0], eig.eigenvalues[1]);
    let v = eig.eigenvectors;
    if l0 <= l1 {
        ([l0, l1], v)
    } else {
        let swapped = Mat2::from_columns(&[v.column(1).into_owned(), v.column(0).into_owned()]);
        ([l1, l0], swapped)
    }
}

/// `H^{-1/2}` for a Hermitian positive-definite `H`, together with the smallest
/// eigenvalue.
pub fn inv_sqrt_hermitian(h: &Mat2) -> (Mat2, f64) {
    let ([l0, l1], v) = hermitian_eigen(h);
    let d = Mat2::new(c64(1.0 / l0.sqrt(), 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0 / l1.sqrt(), 0.0));
    (v * d * v.adjoint(), l0)
}

pub fn is_unitary(a: &Mat2, tol: f64) -> bool {
    (a.adjoint() * a - Mat2::identity()).norm() <= tol
}
