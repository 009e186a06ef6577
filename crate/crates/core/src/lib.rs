//! Exact and floating-point verification of the finite computations behind a
//! family of blow-up metrics for the boundary Yamabe-type problem.
//!
//! The crate is organized in layers:
//!
//! * [`exact`] — arbitrary-precision rationals, quadratic surds and univariate
//!   polynomials over them; every sign certificate bottoms out here.
//! * [`quad`] — adaptive Gauss–Legendre quadrature on finite and semi-infinite
//!   intervals, plus exact Beta values at integer and half-integer arguments.
//! * [`weyl`] — construction of multilinear forms with Weyl-tensor symmetries
//!   and their exact contractions.
//! * [`moments`] — even-moment integrals over spheres and the tensor-moment
//!   reductions they imply, each with a Monte-Carlo oracle.
//! * [`bubble`] — the standard half-space bubble, its companion functions and
//!   the conformal equivalence onto the ball.
//! * [`perturb`] — the trace-free perturbation field, the metric `exp(h)`,
//!   scalar-curvature order checks and the glued bump-series sampler.
//! * [`energy`] — the auxiliary energy at the origin, its closed form, the
//!   ξ-Hessian and the I/J polynomial calculus.
//! * [`certify`] — per-dimension exact sign certificates and the checkpoint
//!   polynomial suites.
//! * [`suites`] — named cross-check bundles shared by the CLI and the
//!   acceptance tests.

pub mod bubble;
pub mod certify;
pub mod energy;
pub mod exact;
pub mod moments;
pub mod perturb;
pub mod quad;
pub mod suites;
pub mod weyl;

pub use exact::{Rational, RatPoly, Sign, Surd, SurdPoly};
