//! Self-similar tilings of fractal blow-ups.
//!
//! An IFS of similitudes `f_i(x) = s^{a_i} O_i x + q_i` with a common
//! ratio `s` and integer exponents `a_i` (gcd 1) induces, for every
//! level `k`, a canonical tiling `T_k` of the blown-up attractor
//! `s^{-k} A` indexed by the word set `Omega_k`, and for every address
//! string `theta` a tiling `pi(theta)` of the fractal blow-up
//! `f_{-theta|k}(A)` as `k` grows. This crate builds those tilings,
//! implements the operators relating them (amalgamation and shrinking,
//! the shift maps), and audits their structure numerically: pairwise
//! non-overlap, self-similarity, quasiperiodicity, rigidity, and a
//! compact metric for comparing tilings.
//!
//! Everything heavy parallelizes through the `parallel` feature
//! (enabled by default); disabling it swaps in sequential loops with
//! identical results.

pub mod algebra;
pub mod error;
pub mod geometry;
pub mod io;
pub mod par;
pub mod render;
pub mod symbolic;
pub mod tiling;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{
    attractor, blowup_isometry, neg_word_map, polygon_symmetries, rotation2, word_map,
    AttractorGeom, AttractorModel, IfsSpec, Polygon, Polynomial, Pt, Similitude, MATCH_TOL,
};
pub use symbolic::{
    cylinder_partition_check, e_minus, e_weight, labelled_addresses, omega_level, omega_member,
    omega_step, AbsoluteAddress, EventuallyPeriodic, Letter, PowerVector, Word,
    DEFAULT_MAX_LEVEL,
};
pub use tiling::{canonical_tiling, nesting_check, pi_family, pi_prefix, Provenance, Tile, Tiling};
