//! Complete-binary-tree tournament priority queues.
//!
//! Four layouts share the [`TournamentQueue`] interface:
//!
//! - [`MarinTree`]: the reference fixed-size CBT, `2N` node slots.
//! - [`MarinVsTree`]: the reference variable-size CBT, `2N` node slots plus
//!   an `N`-entry host-leaf map.
//! - [`ReducedTournament`]: fixed size, the key array doubles as the leaf
//!   level, `N` node slots.
//! - [`SuperTournament`]: variable size, the key array doubles as the leaf
//!   level, `capacity + 2` node slots.
//!
//! All of them are min-queues over `f64` priorities with a strict
//! "smaller wins" rule: on equal priorities the key already holding the
//! node keeps it.

pub mod baseline;
pub mod bench;
pub mod bitnav;
pub mod pqcore;
pub mod reduced;
pub mod supercbt;

pub use baseline::{MarinTree, MarinVsTree};
pub use pqcore::{AnyQueue, EventId, PqError, StructureKind, TournamentQueue};
pub use reduced::ReducedTournament;
pub use supercbt::{sort_in_place, SuperTournament};
