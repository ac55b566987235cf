//! Exact weighted binary-Goldbach sums and the arithmetic around them.
//!
//! The crate computes, for every even `n` up to a bound `N`,
//!
//! * `J(n)`  = sum over prime pairs `p1 + p2 = n` of `ln p1 ln p2`,
//! * `R(n)`  = the same sum weighted by `r(p1 - 1)`, the number of
//!   representations of `p1 - 1` as a sum of two squares,
//! * `T(n)`  = the same sum weighted by `tau(p1 - 1)`,
//!
//! together with their conjectural main terms (truncated Euler products),
//! the divisor-range split of `R(n)` into `S1 + S2 + S3`, and empirical
//! meters for the divisor statistics that control the error terms.
//!
//! Module map:
//!
//! * [`sieve`]: prime tables, smallest-prime-factor tables, factorization.
//! * [`arith`]: the character mod 4, `r`, `tau`, `lambda`, `f_n(d)`.
//! * [`series`]: Euler products, constants and main terms.
//! * [`conv`]: weighted representation sums (direct and FFT paths).
//! * [`hooley`]: divisor-statistic and progression meters.
//! * [`experiment`]: error aggregates, exceptional sets, scaling studies.
//! * [`cli`]: run configuration, file formats and subcommands.
//!
//! Data-parallel loops go through [`exec::Exec`]; with the `parallel`
//! feature disabled every loop runs sequentially and produces bitwise the
//! same output.

pub mod arith;
pub mod cli;
pub mod conv;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod hooley;
pub mod numeric;
pub mod series;
pub mod sieve;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Exec;
