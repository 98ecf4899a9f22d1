//! # chartax — character sums, pretentious distances, and an order taxonomy
//!
//! Desk-scale computational machinery for sums of unit-disc multiplicative
//! functions braided with Dirichlet characters:
//!
//! - [`primes`] — segmented smallest-prime-factor sieve, prime-reciprocal
//!   sums over windows `(D, x]`, factorization.
//! - [`characters`] — the full character group mod `D` via the CRT
//!   decomposition of `(Z/DZ)*`, with exact rational phases, orders,
//!   products, and prime sums.
//! - [`multiplicative`] — unit-disc multiplicative functions with an
//!   explicit prime support set; progression and twisted partial sums.
//! - [`distance`] — pretentious distance functionals `Σ |1 − g(p)χ(p)p^{it}|²/p`,
//!   twist minimization, and the Halász-type mean-value bound.
//! - [`dichotomy`] — the Fejér kernel and the full inequality chain behind
//!   the support-mass / character-order dichotomy, plus the sharp
//!   power-residue extremal construction.
//! - [`taxonomy`] — support density β, the order bound r with β ≥ 1/r + ε,
//!   exceptional-character location, the progression decomposition, and
//!   its error envelope.
//! - [`sieve`] — Selberg upper-bound weights, a maximal-gap large-sieve
//!   check, Pólya–Vinogradov maxima, and smooth-number counts in
//!   progressions with brute-force oracles.
//! - [`verify`] — the acceptance suite: every quantitative claim above as
//!   a pass/fail criterion with pinned tolerances.
//!
//! All prime-indexed accumulations use deterministic pairwise summation, so
//! any result is bit-reproducible for a fixed input regardless of thread
//! count. Randomized objects (support sets, unimodular functions) draw from
//! a seeded ChaCha stream recorded in report output.

pub mod characters;
pub mod dichotomy;
pub mod distance;
mod error;
pub mod multiplicative;
pub mod numeric;
pub mod primes;
pub mod report;
pub mod sieve;
pub mod taxonomy;
pub mod verify;

pub use error::{Error, Result};
pub use primes::PrimeTable;
