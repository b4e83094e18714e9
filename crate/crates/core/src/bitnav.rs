//! Bit-position helpers and the global (internal-tree) navigation rules.
//!
//! Every tournament in this crate stores its internal nodes in an implicit
//! array where node `n` has parent `n >> 1` and sister `n ^ 1`. Node 0 never
//! takes part in a comparison: it is the parent of the root and therefore the
//! loop sentinel of every bottom-up climb.
//!
//! Bit positions are 1-indexed: the lowest bit is position 1.

use std::num::NonZeroUsize;

/// Index into a node-slot array.
pub type NodeIndex = usize;

/// Largest number of keys any structure accepts. Doubled indices (`i + N`)
/// must stay representable in the `u32` node slots.
pub const MAX_KEYS: usize = 1 << 31;

/// Position (1-indexed) of the least significant set bit.
#[inline]
pub fn lssb_position(x: NonZeroUsize) -> u32 {
    x.trailing_zeros() + 1
}

/// Position (1-indexed) of the most significant set bit, i.e. the bit width
/// of `x`.
#[inline]
pub fn mssb_position(x: NonZeroUsize) -> u32 {
    usize::BITS - x.leading_zeros()
}

/// Sister of a node: the other child of the same parent.
///
/// `global_sister(1)` is 0, which callers must never read as a real node.
#[inline]
pub const fn global_sister(n: NodeIndex) -> NodeIndex {
    n ^ 1
}

/// Parent of a node. The root's parent is 0.
#[inline]
pub const fn global_parent(n: NodeIndex) -> NodeIndex {
    n >> 1
}
