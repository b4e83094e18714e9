//! ReducedCBT: a fixed-size tournament whose leaves are the key array itself.
//!
//! Key `i` has sister key `i ^ 1` and first parent node `(i + N) / 2`; above
//! that the usual `n ^ 1` / `n >> 1` rules apply. This only works when `N` is
//! even, so an odd key count is padded with one joker key carrying
//! [`SENTINEL`]. The internal nodes take `N` integer slots instead of the `2N`
//! of a tree with separate leaf nodes.
//!
//! Dismissing a key overwrites its priority with the sentinel; the tree never
//! shrinks.

use crate::pqcore::{
    challenger_wins, check_lengths, check_priority, EventId, PqError, Probe, StructureKind, TournamentQueue, JOKER_ID,
    SENTINEL,
};

/// Sister key of key `i` in an even-sized ReducedCBT.
#[inline]
pub const fn local_sister(i: usize) -> usize {
    i ^ 1
}

/// First internal node above key `i` in a ReducedCBT of `n_keys` keys.
#[inline]
pub const fn local_parent(i: usize, n_keys: usize) -> usize {
    (i + n_keys) >> 1
}

#[derive(Debug, Clone)]
pub struct ReducedTournament {
    /// Winner registry; slot 0 is never written and only read as a dead value
    /// on the last step of a climb.
    nodes: Vec<u32>,
    keys: Vec<f64>,
    ids: Vec<EventId>,
    /// Keys supplied by the caller, excluding the joker.
    user_keys: usize,
}

impl ReducedTournament {
    pub fn build(priorities: &[f64], ids: &[EventId]) -> Result<Self, PqError> {
        check_lengths(priorities, ids)?;
        for &p in priorities {
            check_priority(p, true)?;
        }
        let user_keys = priorities.len();
        let mut keys = priorities.to_vec();
        let mut ids = ids.to_vec();
        if user_keys % 2 == 1 {
            keys.push(SENTINEL);
            ids.push(JOKER_ID);
        }
        let n = keys.len();
        let mut nodes = vec![0u32; n];
        for i in (0..n).step_by(2) {
            let winner = if keys[i + 1] < keys[i] { i + 1 } else { i };
            nodes[local_parent(i, n)] = winner as u32;
        }
        for p in (1..n / 2).rev() {
            let (a, b) = (nodes[2 * p], nodes[2 * p + 1]);
            nodes[p] = if keys[b as usize] < keys[a as usize] { b } else { a };
        }
        Ok(ReducedTournament { nodes, keys, ids, user_keys })
    }

    /// Key count after padding (always even).
    pub fn n_keys(&self) -> usize {
        self.keys.len()
    }

    pub fn nodes(&self) -> &[u32] {
        &self.nodes
    }

    pub fn keys(&self) -> &[f64] {
        &self.keys
    }

    pub fn ids(&self) -> &[EventId] {
        &self.ids
    }

    pub fn peek_min(&self) -> (usize, f64) {
        let w = self.nodes[1] as usize;
        (w, self.keys[w])
    }

    /// Set the priority of key `i` and run a full update from it.
    pub fn update(&mut self, i: usize, priority: f64) -> Result<(), PqError> {
        self.update_probed(i, priority, &mut ())
    }

    pub fn update_probed<P: Probe>(&mut self, i: usize, priority: f64, probe: &mut P) -> Result<(), PqError> {
        if i >= self.user_keys {
            return Err(PqError::IndexOutOfRange { index: i, len: self.user_keys });
        }
        check_priority(priority, true)?;
        self.keys[i] = priority;
        self.climb(i, probe);
        Ok(())
    }

    /// Replace the winner's priority with the sentinel and restore the tree.
    pub fn delete_min_sentinel(&mut self) -> Result<EventId, PqError> {
        self.delete_min_sentinel_probed(&mut ())
    }

    pub fn delete_min_sentinel_probed<P: Probe>(&mut self, probe: &mut P) -> Result<EventId, PqError> {
        let (w, priority) = self.peek_min();
        if priority >= SENTINEL {
            return Err(PqError::Exhausted);
        }
        self.keys[w] = SENTINEL;
        self.climb(w, probe);
        Ok(self.ids[w])
    }

    // The full-update loop. `winner` starts as the key that changed.
    #[inline]
    fn climb<P: Probe>(&mut self, mut winner: usize, probe: &mut P) {
        let n = self.keys.len();
        let mut sister = local_sister(winner);
        let mut parent = local_parent(winner, n);
        while parent != 0 {
            if challenger_wins(self.keys[sister], self.keys[winner], probe) {
                winner = sister;
            }
            self.nodes[parent] = winner as u32;
            sister = self.nodes[parent ^ 1] as usize;
            parent >>= 1;
        }
    }
}

impl TournamentQueue for ReducedTournament {
    fn kind(&self) -> StructureKind {
        StructureKind::Reduced
    }

    fn len(&self) -> usize {
        self.user_keys
    }

    fn index_bound(&self) -> usize {
        self.user_keys
    }

    fn is_active(&self, index: usize) -> bool {
        index < self.user_keys
    }

    fn priority(&self, index: usize) -> f64 {
        self.keys[index]
    }

    fn id(&self, index: usize) -> EventId {
        self.ids[index]
    }

    fn peek_min(&self) -> Option<(usize, f64)> {
        Some(ReducedTournament::peek_min(self))
    }

    fn update_key_probed<P: Probe>(&mut self, index: usize, priority: f64, probe: &mut P) -> Result<(), PqError> {
        self.update_probed(index, priority, probe)
    }

    fn remove_probed<P: Probe>(&mut self, index: usize, probe: &mut P) -> Result<EventId, PqError> {
        if index >= self.user_keys {
            return Err(PqError::IndexOutOfRange { index, len: self.user_keys });
        }
        if self.keys[index] >= SENTINEL {
            return Err(PqError::Exhausted);
        }
        self.keys[index] = SENTINEL;
        self.climb(index, probe);
        Ok(self.ids[index])
    }

    fn remove_min_probed<P: Probe>(&mut self, probe: &mut P) -> Result<EventId, PqError> {
        self.delete_min_sentinel_probed(probe)
    }

    fn storage_slots(&self) -> usize {
        self.nodes.len()
    }

    fn check_winners(&self) -> Result<(), String> {
        let n = self.keys.len();
        for p in (1..n).rev() {
            let children = if 2 * p >= n {
                [2 * p - n, 2 * p + 1 - n]
            } else {
                [self.nodes[2 * p] as usize, self.nodes[2 * p + 1] as usize]
            };
            crate::pqcore::check_slot(p, self.nodes[p] as usize, children, &self.keys)?;
        }
        Ok(())
    }
}
