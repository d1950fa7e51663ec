//! Exact finite-scale dimension laboratory for sets of reals defined by
//! binary digit patterns, and for their iterated sumsets.
//!
//! A set is a union of components, each prescribing for every binary
//! digit either a forced zero or a free choice. The crate counts, exactly
//! or with certified brackets, how many dyadic cells meet the set and its
//! l-fold sums at each scale, builds the block constructions with
//! prescribed Hausdorff and box dimensions of sums, and checks the
//! Plünnecke–Ruzsa estimates on finite instances.

pub mod analysis;
pub mod automaton;
pub mod bigcount;
pub mod cli;
pub mod constructions;
pub mod dyadic;
pub mod engine;
pub mod error;
pub mod oracle;
pub mod pattern;
pub mod plunnecke;

pub use automaton::{CountMode, DistinctCountResult, EngineConfig};
pub use bigcount::BigCount;
pub use dyadic::{BinaryWord, CellCountBracket, IntervalCover};
pub use error::{Error, Result};
pub use pattern::{DigitPattern, SetSpec, Symbol};
