//! Exact closed forms for finite sums of integer powers times harmonic
//! numbers and products of two harmonic numbers.
//!
//! The [`sums::Engine`] synthesizes canonical [`symexpr::ClosedForm`]s, the
//! [`oracle`] checks them against brute-force summation, and [`cli`] backs
//! the `harmsum` executable.

pub mod cli;
pub mod exact;
pub mod oracle;
pub mod sums;
pub mod symexpr;
