//! hflab: a laboratory for hereditarily finite set theory and finite
//! category theory.
//!
//! The crate provides canonical interned set terms with the Ackermann order
//! and codec, toy universes with axiom checking, ordered-pair and quotient
//! encodings (Kuratowski, leveled, and star pairs), the k-class/k-entity
//! hierarchy over an inductively generated membership operator, finite
//! categories with size classification, presheaves with a brute-force Yoneda
//! check, and subobject quotients with well-powering validation, all scaled
//! to what exhaustive verification can actually decide.

pub mod budget;
pub mod cat;
pub mod error;
pub mod hierarchy;
pub mod multirel;
pub mod presheaf;
pub mod session;
pub mod set;
pub mod subobj;
pub mod term;
pub mod encode;
pub mod universe;

pub use budget::Budget;
pub use error::Error;
pub use set::SetTerm;
pub use universe::UniverseSpec;
