//! The construction language: scale sequences, blocks, schedules,
//! pasting and interleaving, and the admissibility conditions on targets.

pub mod blocks;
pub mod combine;
pub mod examples;
pub mod scales;
pub mod targets;

pub use blocks::{block_params, block_params_clamped, make_block, star_floor, zero_run_end, BlockKind, BlockParams, DVariant};
pub use combine::{interleave, paste, PastingPlan};
pub use examples::{build_example, build_with, schedule, ExampleName, Leading, ScheduleTable};
pub use scales::{make_scale_sequence, ScalePolicy, ScaleSequence};
pub use targets::{parse_rational, validate_targets, AdmissibilityReport, DimensionTargets, Violation, Q};
