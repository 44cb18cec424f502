//! Finite truncated simplicial and bisimplicial sets, with exhaustive
//! Kan-condition checking, a recursive partial-horn filler, and the
//! construction that turns fillers of a diagonal map into fillers of each
//! column map.
//!
//! Everything is desk-scale and exact: simplices are dense integer ids,
//! operators are table lookups, and every "pass" verdict means "up to the
//! stated dimension".

pub mod bisimplicial;
pub mod error;
pub mod groups;
pub mod kan;
pub mod ordinal;
pub mod simplicial;
pub mod theorem;

pub use bisimplicial::{BiSimplex, BisimplicialMap, TruncatedBisimplicialSet};
pub use error::{Error, Result};
pub use kan::{CompatibleFamily, FillCertificate, FillOutcome, HornFiller};
pub use ordinal::{OrdinalMap, SimplicialOperator, Token};
pub use simplicial::{Simplex, SimplicialMap, TruncatedSimplicialSet};
