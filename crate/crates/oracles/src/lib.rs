//! Independent brute-force models for cross-checking `icard`.
//!
//! Nothing here depends on `icard`; values cross the boundary as text in the
//! `icard` input grammars.

pub mod cnf;
pub mod kripke;
pub mod modal;
