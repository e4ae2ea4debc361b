//! Elimination-ideal minimal solvers for partially calibrated two-view geometry.
//!
//! The offline half ([`polycore`], [`groebner`], [`elimderive`], [`templates`])
//! works in exact rational arithmetic; the online half ([`solvers`], [`synth`])
//! is plain `f64` linear algebra.

pub mod groebner;
pub mod polycore;
pub mod elimderive;
pub mod solvers;
pub mod synth;
pub mod templates;
