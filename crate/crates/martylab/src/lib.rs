//! Numerical laboratory for Marty-type differential inequalities.
//!
//! The crate builds, for arbitrary `k0 >= 2`, `alpha > 1` and `C > 0`, explicit
//! sequences `f_n = a_n (z^n - 1) e^{p_n}` of holomorphic functions on the disk
//! `|z| < 2` that satisfy the pointwise bound `|f^(k0)| / (1 + |f|^alpha) <= C`
//! while blowing up along the unit circle, and verifies both facts on dense
//! grids. Everything runs in extended precision (MPFR, default 256 bits) with
//! log-domain evaluation so that the astronomically large scale factors `a_n`
//! and `e^{p_n}` never overflow.
//!
//! Module map:
//! - [`numerics`]: extended-precision reals/complexes and the log-domain form.
//! - [`poly`]: dense univariate and sparse multivariate polynomial algebra.
//! - [`expcalc`]: derivative calculus for products `g * e^p` (two independent
//!   routes to the bracket polynomials `B_k` with `h^(k) = e^p B_k`).
//! - [`hermite`]: confluent Hermite interpolation over complex nodes.
//! - [`sweep`]: grid and golden-section search machinery (rayon-parallel when
//!   the `parallel` feature is on, sequential otherwise).
//! - [`construct`]: the counterexample pipeline.
//! - [`verify`]: Marty quotients, spherical derivatives, vanishing checks,
//!   non-normality witnesses and exemplar families.
//! - [`artifact`]: JSON/CSV persistence with full-precision decimal strings.

pub mod artifact;
pub mod construct;
pub mod error;
pub mod expcalc;
pub mod hermite;
pub mod numerics;
pub mod poly;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use numerics::{BigComplex, BigReal, LogComplex, Precision};
pub use poly::{MultiPoly, Poly, Var};
