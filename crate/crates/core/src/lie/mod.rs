//! Stratified nilpotent Lie algebras, exact brackets and the Campbell-Hausdorff
//! product, and algebras generated by polynomial vector fields.

mod algebra;
mod bch;
mod document;
mod element;
mod vector_field;

pub use algebra::{PropertyCheck, StratifiedAlgebra, StructureConstant, VerificationReport};
pub use bch::bch_product;
pub(crate) use bch::bch_unchecked;
pub use document::{
    parse_algebra, AlgebraDocument, BracketEntry, FieldEntry, Literal, ParsedAlgebra,
};
pub(crate) use element::bracket_unchecked;
pub use element::{bracket, dilate, AlgebraElement};
pub use vector_field::{
    algebra_from_vector_fields, infer_dilation, ClosureOptions, FieldAlgebra, FieldAlgebraSummary,
    PolyVectorField,
};
