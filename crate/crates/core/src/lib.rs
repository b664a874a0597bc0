//! Weighted exponential sums over polynomial phases.
//!
//! The crate is organised bottom-up:
//!
//! * [`fixedpoint`]: exact 256-bit fractions modulo one and coefficient literals;
//! * [`arith`]: sieved arithmetic functions (τ, μ, μ², ν, τ₃, ω, log p) and
//!   exact Dirichlet convolution / inversion;
//! * [`expsum`]: `Σ w(n) e(f(n))` by direct and finite-difference engines;
//! * [`diophantine`]: continued fractions, Dirichlet approximation and
//!   major/minor arc classification;
//! * [`decomposition`]: the generalized Vaughan identity and the four-sum
//!   decompositions of the τ- and μ²-weighted sums;
//! * [`bounds`]: bound envelopes and empirical ratio scans;
//! * [`smallfrac`]: `h`-indexed sum families, the existence criterion for
//!   small `‖α_n‖`, and searches for small `‖f(n)‖`.

pub mod accum;
pub mod arith;
pub mod bounds;
pub mod decomposition;
pub mod diophantine;
pub mod error;
pub mod expsum;
pub mod fixedpoint;
pub mod report;
pub mod smallfrac;

pub use arith::{FuncKind, FuncTable};
pub use bounds::{gamma_R, ScanRow, TheoremWeight};
pub use decomposition::{DecompParams, DecompReport, VaughanPlan};
pub use diophantine::{Arc, ArcClass, ContinuedFraction, RationalApprox};
pub use error::{Error, Result};
pub use expsum::{Engine, Polynomial, SumRange, SumResult, Unit, Weight};
pub use fixedpoint::{coeff_parse, nearest_int_distance, Coefficient, Frac256, NamedConstant};
pub use smallfrac::{CriterionReport, Hit, SearchVariant};
