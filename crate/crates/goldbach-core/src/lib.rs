//! Numerics laboratory for the ternary Goldbach problem with a
//! restricted (small) third prime.
//!
//! The object of study is the representation count
//!
//! ```text
//! R(N, y, U) = # { N = p1 + p2 + p3 :
//!                  N-2y < p1 <= N-y,  y < p2 <= 2y,  p3 <= U }
//! ```
//!
//! together with its log-weighted companion, examined through the
//! Hardy-Littlewood circle method at desk scale: windowed prime
//! exponential sums, a Farey dissection into major and minor arcs, the
//! singular series in both its truncated-sum and Euler-product forms,
//! and an exact discrete form of the circle integral on M-th roots of
//! unity. Every fast path is paired with an independent slow oracle.

pub mod arcs;
pub mod arith;
pub mod circle;
pub mod count;
pub mod error;
pub mod expsum;
pub mod primes;
pub mod singular;
pub mod util;
pub mod verify;

pub use error::{Error, Result};
