//! Exhaustive search and structural checks used to cross-examine the solver.

pub mod brute;
pub mod intervals;
mod paths;
pub mod uncross;

pub use brute::{brute_force, OracleConfig, OracleOutcome, OracleReport};
pub use intervals::{check_interval_structure, check_scheme_bridge, check_side_bridge, IntervalViolation};
pub use uncross::{check_uncrossed, count_crossings, uncross, CrossVector, UncrossError, UncrossViolation, Uncrossed};
