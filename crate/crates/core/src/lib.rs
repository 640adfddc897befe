//! Cosine families on finite-dimensional complex matrix algebras.
//!
//! The crate evaluates generated cosine families `C(t) = cos(tB)` and scalar
//! families `cos(at)`, computes principal square roots `√(I−x)` by the binomial
//! series, recovers `C(s)` from `C(2s)` by halving, and checks the zero-two
//! type laws numerically:
//!
//! * `limsup_{t→∞} ‖C(t) − I‖ < 2` forces `C ≡ I`,
//! * the scalar dichotomy `limsup |c(t) − 1| ∈ {0, 2, ∞}` at `t → 0` and `t → ∞`,
//! * `limsup_{n→∞} ‖C(n) − I‖ < 3/2` for cosine sequences, with the witness
//!   `cos(2πn/3)` showing the constant is sharp,
//! * `limsup_{n→∞} ‖Tⁿ − I‖ < 1` for power semigroups.

pub mod cosine;
pub mod discrete;
pub mod error;
pub mod laws;
pub mod linalg;
pub mod random;
pub mod semigroup;
pub mod sqrt_halving;

pub use error::{CoslawError, Result};
