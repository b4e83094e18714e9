//! The interface shared by every tournament structure, plus the linear-scan
//! oracle and the differential driver used to check them against each other.

mod differential;
mod oracle;

use std::fmt;
use std::str::FromStr;

pub use differential::{
    differential_run, generate_and_run, initial_priorities, run_script, Divergence, Op, ParseOpError, ScriptConfig,
};
pub(crate) use oracle::check_slot;
pub use oracle::{OracleEntry, OracleQueue};

use crate::baseline::{MarinTree, MarinVsTree};
use crate::reduced::ReducedTournament;
use crate::supercbt::SuperTournament;

/// Event identifier carried alongside every key.
pub type EventId = u64;

/// Priority written over dismissed keys by the fixed-size structures.
///
/// The largest finite `f64`, so hold increments added to real keys never
/// produce non-finite values. User priorities must stay strictly below it.
pub const SENTINEL: f64 = f64::MAX;

/// Id stored next to the padding key of an odd-sized ReducedCBT.
pub const JOKER_ID: EventId = EventId::MAX;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PqError {
    #[error("no keys given")]
    Empty,
    #[error("{count} keys exceed the supported maximum")]
    TooManyKeys { count: usize },
    #[error("{priorities} priorities but {ids} ids")]
    LengthMismatch { priorities: usize, ids: usize },
    #[error("key index {index} out of range (active keys: {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("key index {0} is not active")]
    Inactive(usize),
    #[error("priority {0} is not usable (NaN, or not below the sentinel)")]
    InvalidPriority(f64),
    #[error("every key has already been dismissed")]
    Exhausted,
    #[error("capacity {capacity} reached")]
    CapacityExceeded { capacity: usize },
    #[error("capacity {capacity} is smaller than the {count} keys given")]
    CapacityTooSmall { capacity: usize, count: usize },
    #[error("a single key has no sister")]
    SingleKey,
    #[error("{0} is not supported by this structure")]
    Unsupported(&'static str),
}

/// Observer for key comparisons made during an update.
///
/// `()` ignores them; the uninstrumented code paths monomorphize to nothing.
pub trait Probe {
    fn comparison(&mut self);
}

impl Probe for () {
    #[inline(always)]
    fn comparison(&mut self) {}
}

/// Counts key comparisons.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct ComparisonCount(pub u64);

impl Probe for ComparisonCount {
    #[inline(always)]
    fn comparison(&mut self) {
        self.0 += 1;
    }
}

/// The four tournament layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StructureKind {
    /// Fixed-size reference CBT with 2N node slots.
    Marin,
    /// Variable-size reference CBT with a host-leaf map.
    MarinVs,
    /// Fixed-size CBT using the key array as its leaves.
    Reduced,
    /// Variable-size CBT using the key array as its leaves.
    Super,
}

impl StructureKind {
    pub const ALL: [StructureKind; 4] =
        [StructureKind::Marin, StructureKind::MarinVs, StructureKind::Reduced, StructureKind::Super];

    /// Name used on the command line and in CSV output.
    pub fn name(self) -> &'static str {
        match self {
            StructureKind::Marin => "marin",
            StructureKind::MarinVs => "marin-vs",
            StructureKind::Reduced => "reduced",
            StructureKind::Super => "super",
        }
    }

    /// Whether removal physically shrinks the structure.
    pub fn shrinks(self) -> bool {
        matches!(self, StructureKind::MarinVs | StructureKind::Super)
    }
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StructureKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StructureKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown structure `{s}` (expected marin, marin-vs, reduced or super)"))
    }
}

/// A min-priority queue over an array of keys, driven by key index.
///
/// Fixed-size structures (Marin, ReducedCBT) implement `remove` by writing
/// [`SENTINEL`] over the key; their `len` never changes and a dismissed key
/// stays active. Only SuperCBT supports `insert`.
pub trait TournamentQueue {
    fn kind(&self) -> StructureKind;

    /// Number of active keys.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every active key index is below this bound.
    fn index_bound(&self) -> usize;

    fn is_active(&self, index: usize) -> bool;

    fn priority(&self, index: usize) -> f64;

    fn id(&self, index: usize) -> EventId;

    /// Index and priority of the current winner.
    fn peek_min(&self) -> Option<(usize, f64)>;

    /// Assign a new priority to an active key and restore the tree,
    /// reporting every key comparison to `probe`.
    fn update_key_probed<P: Probe>(&mut self, index: usize, priority: f64, probe: &mut P) -> Result<(), PqError>;

    /// Dismiss an active key, returning its id.
    fn remove_probed<P: Probe>(&mut self, index: usize, probe: &mut P) -> Result<EventId, PqError>;

    /// Add a key, returning the index it was placed at.
    fn insert(&mut self, priority: f64, id: EventId) -> Result<usize, PqError> {
        let _ = (priority, id);
        Err(PqError::Unsupported("insert"))
    }

    fn supports_insert(&self) -> bool {
        false
    }

    /// Auxiliary integer slots held by the structure (node slots plus any
    /// index maps); the caller's key and id arrays are not counted.
    fn storage_slots(&self) -> usize;

    /// White-box check that every node slot in use registers a key of its
    /// subtree with that subtree's minimum priority.
    fn check_winners(&self) -> Result<(), String>;

    fn update_key(&mut self, index: usize, priority: f64) -> Result<(), PqError> {
        self.update_key_probed(index, priority, &mut ())
    }

    fn remove(&mut self, index: usize) -> Result<EventId, PqError> {
        self.remove_probed(index, &mut ())
    }

    /// Dismiss the current winner.
    fn remove_min(&mut self) -> Result<EventId, PqError> {
        self.remove_min_probed(&mut ())
    }

    fn remove_min_probed<P: Probe>(&mut self, probe: &mut P) -> Result<EventId, PqError> {
        let (index, _) = self.peek_min().ok_or(PqError::Empty)?;
        self.remove_probed(index, probe)
    }
}

/// Rejects NaN and, for structures that use the sentinel, anything not
/// strictly below it.
pub(crate) fn check_priority(priority: f64, below_sentinel: bool) -> Result<(), PqError> {
    if priority.is_nan() || (below_sentinel && priority >= SENTINEL) {
        Err(PqError::InvalidPriority(priority))
    } else {
        Ok(())
    }
}

pub(crate) fn check_lengths(priorities: &[f64], ids: &[EventId]) -> Result<(), PqError> {
    if priorities.len() != ids.len() {
        return Err(PqError::LengthMismatch { priorities: priorities.len(), ids: ids.len() });
    }
    if priorities.is_empty() {
        return Err(PqError::Empty);
    }
    if priorities.len() > crate::bitnav::MAX_KEYS {
        return Err(PqError::TooManyKeys { count: priorities.len() });
    }
    Ok(())
}

/// One of the four structures behind a single type, for drivers that pick
/// the layout at run time.
#[derive(Debug, Clone)]
pub enum AnyQueue {
    Marin(MarinTree),
    MarinVs(MarinVsTree),
    Reduced(ReducedTournament),
    Super(SuperTournament),
}

impl AnyQueue {
    /// Build `kind` over the given keys. SuperCBT gets `capacity` slots
    /// (at least the key count) so it can grow.
    pub fn build(kind: StructureKind, priorities: &[f64], ids: &[EventId], capacity: usize) -> Result<Self, PqError> {
        Ok(match kind {
            StructureKind::Marin => AnyQueue::Marin(MarinTree::build(priorities, ids)?),
            StructureKind::MarinVs => AnyQueue::MarinVs(MarinVsTree::build(priorities, ids)?),
            StructureKind::Reduced => AnyQueue::Reduced(ReducedTournament::build(priorities, ids)?),
            StructureKind::Super => {
                AnyQueue::Super(SuperTournament::with_capacity(capacity.max(priorities.len()), priorities, ids)?)
            }
        })
    }
}

macro_rules! delegate {
    ($self:ident, $q:ident => $e:expr) => {
        match $self {
            AnyQueue::Marin($q) => $e,
            AnyQueue::MarinVs($q) => $e,
            AnyQueue::Reduced($q) => $e,
            AnyQueue::Super($q) => $e,
        }
    };
}

impl TournamentQueue for AnyQueue {
    fn kind(&self) -> StructureKind {
        delegate!(self, q => TournamentQueue::kind(q))
    }
    fn len(&self) -> usize {
        delegate!(self, q => TournamentQueue::len(q))
    }
    fn index_bound(&self) -> usize {
        delegate!(self, q => TournamentQueue::index_bound(q))
    }
    fn is_active(&self, index: usize) -> bool {
        delegate!(self, q => TournamentQueue::is_active(q, index))
    }
    fn priority(&self, index: usize) -> f64 {
        delegate!(self, q => TournamentQueue::priority(q, index))
    }
    fn id(&self, index: usize) -> EventId {
        delegate!(self, q => TournamentQueue::id(q, index))
    }
    fn peek_min(&self) -> Option<(usize, f64)> {
        delegate!(self, q => TournamentQueue::peek_min(q))
    }
    fn update_key_probed<P: Probe>(&mut self, index: usize, priority: f64, probe: &mut P) -> Result<(), PqError> {
        delegate!(self, q => TournamentQueue::update_key_probed(q, index, priority, probe))
    }
    fn remove_probed<P: Probe>(&mut self, index: usize, probe: &mut P) -> Result<EventId, PqError> {
        delegate!(self, q => TournamentQueue::remove_probed(q, index, probe))
    }
    fn insert(&mut self, priority: f64, id: EventId) -> Result<usize, PqError> {
        delegate!(self, q => TournamentQueue::insert(q, priority, id))
    }
    fn supports_insert(&self) -> bool {
        delegate!(self, q => TournamentQueue::supports_insert(q))
    }
    fn storage_slots(&self) -> usize {
        delegate!(self, q => TournamentQueue::storage_slots(q))
    }
    fn check_winners(&self) -> Result<(), String> {
        delegate!(self, q => TournamentQueue::check_winners(q))
    }
}

/// Strict "smaller wins" selection: the challenger replaces the incumbent
/// only when strictly smaller.
#[inline(always)]
pub(crate) fn challenger_wins<P: Probe>(challenger: f64, incumbent: f64, probe: &mut P) -> bool {
    probe.comparison();
    challenger < incumbent
}
