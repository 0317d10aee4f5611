//! Exact kernels for the overlap structure of Duffin–Schaeffer approximation
//! sets.
//!
//! Every measure, threshold and product in this crate is an exact
//! [`Rational`]. Logarithms only appear in diagnostic quantities and are
//! carried as [`Real`] enclosures with a guaranteed error bound.
//!
//! The crate is organised bottom-up:
//!
//! - [`arith`]: factorization, totients, Mertens-type prime products, coprime
//!   counting, harmonic sieve sums and the rational ladder `ê_k ≈ e^k`.
//! - [`circle`]: canonical finite unions of half-open intervals on ℝ/ℤ and the
//!   approximation sets `E_n`.
//! - [`overlap`]: the `r, s, t` pair decomposition, overlap ratios `P_k(m, n)`
//!   and the Pollington–Vaughan product.
//! - [`schedule`]: ψ functions, the doubly exponential blocks, `K(h)`, the
//!   per-block choice of `k(h)` and the starred function ψ*.
//! - [`harness`]: the Borel–Cantelli ratio, divergence tables and the batch
//!   experiment runner behind the `dsx` binary.

pub mod arith;
pub mod circle;
pub mod error;
pub mod harness;
pub mod overlap;
pub mod real;
pub mod schedule;

pub use arith::Rational;
pub use circle::CircleIntervalSet;
pub use error::{Error, Result};
pub use overlap::{OverlapRecord, PairDecomposition, ThresholdClass};
pub use real::Real;
pub use schedule::{BlockReport, PsiFunction, PsiSource};
