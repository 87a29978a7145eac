//! Files, fixtures, generators and drawings around `eulerflow-core`.

pub mod bench;
pub mod fixtures;
pub mod format;
pub mod generate;
pub mod parallel;
pub mod viz;
