//! Reference tournaments with a separate leaf layer of node slots.

mod marin;
mod marin_vs;

pub use marin::MarinTree;
pub use marin_vs::MarinVsTree;
