//! Ordinal notations with hyperexponentials and hyperlogarithms, a tableau
//! prover for the provability logic GL, ω-bouquet models and explicit d-maps
//! from ordinal Icard spaces onto bouquets.
//!
//! Values are immutable and `Send + Sync`. Sampled checks take a caller RNG.

pub mod bouquet;
pub mod dmap;
pub mod error;
pub mod gl;
pub mod ordinal;
pub mod par;
pub mod topology;

pub use error::{Error, Result};
pub use ordinal::OrdTerm;
