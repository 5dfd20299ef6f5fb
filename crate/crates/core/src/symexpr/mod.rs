//! Symbolic algebra for closed forms.

pub mod form;
pub mod parse;
pub mod poly;
pub mod ratfunc;
pub mod raw;
pub mod render;

use thiserror::Error;

pub use form::{ClosedForm, HarmonicMonomial};
pub use parse::{parse_form, FormParseError};
pub use poly::Polynomial;
pub use ratfunc::RationalFunction;
pub use raw::{normalize, RawExpr};
pub use render::{form_from_json, render, Format};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymError {
    #[error("product would create a harmonic monomial of degree {degree} (limit 2)")]
    DegreeOverflow { degree: usize },
    #[error("coefficient denominator vanishes at n = {n}")]
    PoleAtN { n: u64 },
    #[error("harmonic shift {0} is not supported (expected 0 or 1)")]
    UnsupportedShift(u8),
    #[error("harmonic order {0} is too large")]
    OrderTooLarge(i64),
}
