//! Exact polynomial arithmetic over partitioned variable registries.

mod multipoly;
mod parse;
mod registry;
mod univariate;

pub use multipoly::{Monomial, MultiPoly};
pub use parse::{identifiers, parse_poly};
pub(crate) use registry::same as same_registry;
pub use registry::{Block, Registry};
pub use univariate::UniPoly;

use std::sync::Arc;

use crate::error::Result;
use crate::scalar::Rational;

/// Parses a literal over a fresh registry holding exactly its identifiers
/// (natural order) in the t-block.
pub fn parse_poly_auto(text: &str) -> Result<(MultiPoly<Rational>, Arc<Registry>)> {
    let names = identifiers(text)?;
    let reg = Registry::new::<String>(&names, &[], &[], false);
    Ok((parse_poly(text, &reg)?, reg))
}
