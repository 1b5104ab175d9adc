//! Framed elastic rods in quaternionic Fourier coordinates.
//!
//! A framed closed curve of length 2 is encoded by a pair `(z, w)` of finite
//! Fourier series on `[0, 2]`; the frame-Hopf map recovers the centerline and
//! normal frame. On top of that the crate provides the energy, a projected
//! gradient flow on the Stiefel manifold, the closed-form critical sets and
//! knot-theoretic classification of critical centerlines.

// `!(x > tol)` comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod critical;
pub mod error;
pub mod export;
pub mod fourier;
pub mod framed;
pub mod knot;
pub mod quat;
pub mod unitary;
pub mod variational;

pub use critical::{
    family, make_critical, normal_form, predicted_knot, singular_u, spectrum, CriticalParams, FamilyParams, KnotPrediction,
    NormalForm,
};
pub use error::{Error, Result};
pub use fourier::{AffineFourier, FourierSeries, Parity};
pub use framed::{closure_report, hopf, invariants, ClosureReport, FramedCurve, InvariantTrace};
pub use knot::{alexander, classify_family, classify_path, diagram, linking, Classification, Direction, KnotDiagram, LaurentPoly};
pub use quat::QuatPath;
pub use variational::{energy, flow, gradient, retract, FlowParams, FlowResult, HermitianPair, StiefelPoint};
