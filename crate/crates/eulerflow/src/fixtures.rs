//! Checked-in instances. See `fixtures/README.md` for how each file maps to
//! its drawing.

use crate::format::{parse_instance, InstanceFile};

pub const FIGURE1_JSON: &str = include_str!("../fixtures/figure1.json");
pub const FIGURE1_DOUBLED_JSON: &str = include_str!("../fixtures/figure1_doubled.json");

/// Four diamond gadgets on a cycle with eight unit demands: it has a
/// half-integral multiflow but no integral one.
pub fn figure1() -> InstanceFile {
    parse_instance(FIGURE1_JSON).expect("figure1.json is valid")
}

/// [`figure1`] with every capacity and request doubled.
pub fn figure1_doubled() -> InstanceFile {
    parse_instance(FIGURE1_DOUBLED_JSON).expect("figure1_doubled.json is valid")
}
