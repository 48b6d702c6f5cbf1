//! Distribution of the maximum self-overlap of random words.
//!
//! For a word `x_1..x_n` drawn letter by letter from an i.i.d. law on a
//! finite alphabet, `S_n` is the length of its longest proper border (the
//! largest `k < n` with `x_1..x_k == x_{n-k+1}..x_n`) and `T_n = n - S_n` its
//! smallest period. This crate computes the law of `S_n`
//!
//! * exactly, by exhaustive enumeration in rational or floating arithmetic
//!   ([`exact_dist`]),
//! * through the decomposition `P(S_n >= k) = m_2^k + a_{k,n}` and
//!   `P(S_n = k) = m_2^k - b_{k,n}` with `m_q` the letter power sums,
//! * in the limit `n -> infinity`, as truncated series carrying rigorous tail
//!   bounds ([`limit_series`], [`zero_words`]),
//! * by seeded Monte Carlo simulation ([`montecarlo`]),
//!
//! and checks the convergence-rate and correction-term bounds that go with
//! them ([`bounds`]).

pub mod alphabet;
pub mod border;
pub mod bounds;
pub mod census;
pub mod error;
pub mod exact_dist;
pub mod limit_series;
pub mod montecarlo;
pub mod output;
pub mod scalar;
pub mod verify;
pub mod zero_words;

pub use alphabet::{make_theta, AlphabetSpec, Theta};
pub use border::{BorderProfile, Word};
pub use census::Budget;
pub use error::{Error, Result};
pub use scalar::{Mode, Scalar};
