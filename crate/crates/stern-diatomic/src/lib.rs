//! Exact arithmetic for Stern's diatomic sequence and its record envelope.
//!
//! The sequence `a(n)` is defined by `a(0) = 0`, `a(1) = 1`,
//! `a(2n) = a(n)`, `a(2n+1) = a(n) + a(n+1)`. Its maximum over the interval
//! `2^(n-2) <= m <= 2^(n-1)` is the Fibonacci number `F_n`, first attained at
//! `m_n = (2^n - (-1)^n)/3`. Connecting `(0,0)` and the points `(m_n, F_n)`
//! yields a continuous piecewise-linear envelope `h` with `a(m) <= h(m)`
//! everywhere, and `a(m)/m^(log2 phi)` has limit superior
//! `phi^(log2 3)/sqrt(5) = 0.95885419082...`.
//!
//! Everything structural is computed in exact arithmetic: sequence values and
//! record points as big integers, the envelope, its per-piece slopes, and the
//! gap functions `h(4x±1) - h(2x±1) - h(x)` as reduced rationals. Floating
//! point appears only where a quantity is genuinely transcendental (ratios,
//! the limit constant, the power-law comparison), and there it is computed at
//! a configurable precision, re-run at twice that precision, and required to
//! agree — see [`hp`].
//!
//! The `examples/` directory of this crate demonstrates each capability; the
//! `stern` binary exposes the same operations as subcommands.

pub mod cli;
pub mod envelope;
pub mod error;
pub mod hp;
pub mod sequence;
pub mod verify;

/// Arbitrary-precision non-negative integer: indices and sequence values.
pub type Nat = num_bigint::BigUint;

/// Exact rational in lowest terms: envelope values, slopes, gaps.
pub type Rat = num_rational::BigRational;

pub use error::{Error, Result};
pub use hp::HpFloat;
pub use sequence::{
    fibonacci, record_index, record_point, stern, stern_naive, stern_pair, stern_range,
    NaiveEvaluator, RecordPoint,
};
