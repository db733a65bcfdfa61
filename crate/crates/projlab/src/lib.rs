//! Numerical laboratory for projection constants of spaces of multivariate
//! polynomials.
//!
//! The crate computes, estimates, and cross-validates projection constants,
//! polynomial projection constants, unconditional basis constants, and Bohr
//! radii. Every closed formula is paired with an independent route (exact
//! enumeration, brute-force optimization, quadrature, or Monte Carlo) so the
//! two can be checked against each other.

pub mod boolean;
pub mod characteristics;
pub mod closedforms;
pub mod indexsets;
pub mod montecarlo;
pub mod projbohr;
pub mod quad;
pub mod spaces;
pub mod special;

/// Default seed for anything stochastic (optimizer restarts, Monte Carlo).
/// Fixed so that runs are deterministic unless the caller overrides it.
pub const DEFAULT_SEED: u64 = 7;
