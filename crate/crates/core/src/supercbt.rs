//! SuperCBT: a tournament over the key array that can shrink and grow.
//!
//! With `max_index` the last active key index, keys above `max_index / 2`
//! are right leaves and hang directly below node `i`; their sister is `i`
//! shifted right past its lowest set bit. A left leaf `i` climbs to
//! `(2i + 1) << k`, with `k` the number of doublings that keep it within
//! `max_index`, and pairs with the right leaf of that index. When the active
//! count is odd one left leaf has no partner and sits alone below the
//! pass-through node `max_index + 1`.
//!
//! Removing the last key changes the pairing of at most three keys, all of
//! them on paths the removal already repairs, so the structure stays valid
//! without a rebuild. Growing is the mirror image.

use std::num::NonZeroUsize;

use crate::bitnav::{lssb_position, mssb_position, MAX_KEYS};
use crate::pqcore::{
    challenger_wins, check_lengths, check_priority, check_slot, EventId, PqError, Probe, StructureKind, TournamentQueue,
};

/// How a left leaf decides that the right leaf it computed does not exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SisterGuard {
    /// `sister > max_index`.
    #[default]
    Strict,
    /// `sister >= max_index`. Breaks the pairing: the last key names a sister
    /// that does not name it back. Kept so the verification suites can show
    /// they catch it.
    Inclusive,
}

/// First parent node and sister key of key `i` while keys `0..=max_index`
/// are active. A sisterless key gets itself as sister.
pub fn find_parent_and_sister(i: usize, max_index: usize) -> Result<(usize, usize), PqError> {
    find_parent_and_sister_with_guard(i, max_index, SisterGuard::Strict)
}

pub fn find_parent_and_sister_with_guard(
    i: usize,
    max_index: usize,
    guard: SisterGuard,
) -> Result<(usize, usize), PqError> {
    if max_index == 0 {
        return Err(PqError::SingleKey);
    }
    if i > max_index {
        return Err(PqError::IndexOutOfRange { index: i, len: max_index + 1 });
    }
    if i > max_index / 2 {
        let lssb = lssb_position(NonZeroUsize::new(i).expect("right leaves are positive"));
        return Ok((i, i >> lssb));
    }
    let parent = 2 * i + 1;
    let Some(ratio) = NonZeroUsize::new(max_index / parent) else {
        // Only the lone left leaf of an odd active count gets here.
        return Ok((parent, i));
    };
    let parent = parent << (mssb_position(ratio) - 1);
    let sister = match guard {
        SisterGuard::Strict if parent > max_index => i,
        SisterGuard::Inclusive if parent >= max_index => i,
        _ => parent,
    };
    Ok((parent, sister))
}

/// Same result as [`find_parent_and_sister`] for valid input, without the
/// division: the shift is the bit-width difference, less one if that
/// overshoots `max_index`.
#[inline(always)]
fn parent_and_sister(i: usize, max_index: usize) -> (usize, usize) {
    debug_assert!(max_index >= 1 && i <= max_index);
    if i > max_index >> 1 {
        return (i, i >> (i.trailing_zeros() + 1));
    }
    let base = 2 * i + 1;
    if base > max_index {
        return (base, i);
    }
    let mut parent = base << (base.leading_zeros() - max_index.leading_zeros());
    if parent > max_index {
        parent >>= 1;
    }
    (parent, parent)
}

/// Why a pairing table is not a valid tournament bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingViolation {
    pub max_index: usize,
    pub key: usize,
    pub reason: String,
}

impl std::fmt::Display for PairingViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "max_index {}, key {}: {}", self.max_index, self.key, self.reason)
    }
}

/// Brute-force check of the pairing for one active size: the sister relation
/// is an involution, sisters share their parent, right leaves are exactly
/// the keys above `max_index / 2`, and every bottom node is claimed by
/// exactly one pair or one lone key.
pub fn check_pairing(max_index: usize, guard: SisterGuard) -> Result<(), PairingViolation> {
    let fail = |key: usize, reason: String| Err(PairingViolation { max_index, key, reason });
    let table: Vec<(usize, usize)> =
        (0..=max_index).map(|i| find_parent_and_sister_with_guard(i, max_index, guard).expect("valid input")).collect();
    let bottom_end = if max_index.is_multiple_of(2) { max_index + 1 } else { max_index };
    let bottom_start = max_index / 2 + 1;
    let mut claimed_by = vec![usize::MAX; bottom_end + 1];
    for (i, &(parent, sister)) in table.iter().enumerate() {
        if (parent == i) != (i > max_index / 2) {
            return fail(i, format!("parent {parent} disagrees with the right-leaf rule"));
        }
        if sister != i {
            let (back_parent, back_sister) = table[sister];
            if back_sister != i {
                return fail(i, format!("sister {sister} names {back_sister} as its sister"));
            }
            if back_parent != parent {
                return fail(i, format!("sister {sister} has parent {back_parent}, not {parent}"));
            }
        }
        if !(bottom_start..=bottom_end).contains(&parent) {
            return fail(i, format!("parent {parent} outside bottom nodes {bottom_start}..={bottom_end}"));
        }
        // A pair is identified by its smaller member.
        let group = i.min(sister);
        match claimed_by[parent] {
            usize::MAX => claimed_by[parent] = group,
            g if g == group => {}
            g => return fail(i, format!("parent {parent} already claimed by the group of key {g}")),
        }
    }
    if let Some(p) = (bottom_start..=bottom_end).find(|&p| claimed_by[p] == usize::MAX) {
        return fail(max_index, format!("bottom node {p} is not claimed"));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SuperTournament {
    /// `capacity + 2` winner slots; slot 0 is never part of the tree.
    nodes: Vec<u32>,
    /// Active keys are `0..count`; dismissed keys stay behind the active
    /// range in the order they left.
    keys: Vec<f64>,
    ids: Vec<EventId>,
    count: usize,
    capacity: usize,
}

impl SuperTournament {
    pub fn build(priorities: &[f64], ids: &[EventId]) -> Result<Self, PqError> {
        Self::with_capacity(priorities.len(), priorities, ids)
    }

    pub fn with_capacity(capacity: usize, priorities: &[f64], ids: &[EventId]) -> Result<Self, PqError> {
        Self::from_parts(capacity, priorities.to_vec(), ids.to_vec())
    }

    /// Build over owned key and id arrays without copying them.
    pub fn from_parts(capacity: usize, keys: Vec<f64>, ids: Vec<EventId>) -> Result<Self, PqError> {
        check_lengths(&keys, &ids)?;
        if capacity < keys.len() {
            return Err(PqError::CapacityTooSmall { capacity, count: keys.len() });
        }
        if capacity > MAX_KEYS {
            return Err(PqError::TooManyKeys { count: capacity });
        }
        for &p in &keys {
            check_priority(p, false)?;
        }
        let count = keys.len();
        let mut t = SuperTournament { nodes: vec![0; capacity + 2], keys, ids, count, capacity };
        t.rebuild();
        Ok(t)
    }

    fn rebuild(&mut self) {
        if self.count <= 1 {
            self.nodes[1] = 0;
            return;
        }
        let m = self.count - 1;
        for i in m / 2 + 1..=m {
            let s = i >> (i.trailing_zeros() + 1);
            self.nodes[i] = if self.keys[i] < self.keys[s] { i } else { s } as u32;
        }
        if m.is_multiple_of(2) {
            self.nodes[m + 1] = (m / 2) as u32;
        }
        for p in (1..=m / 2).rev() {
            let (a, b) = (self.nodes[2 * p], self.nodes[2 * p + 1]);
            self.nodes[p] = if self.keys[b as usize] < self.keys[a as usize] { b } else { a };
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Last active key index, `None` when empty.
    pub fn max_index(&self) -> Option<usize> {
        self.count.checked_sub(1)
    }

    pub fn nodes(&self) -> &[u32] {
        &self.nodes
    }

    /// The whole key array, dismissed tail included.
    pub fn keys(&self) -> &[f64] {
        &self.keys
    }

    pub fn ids(&self) -> &[EventId] {
        &self.ids
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<EventId>) {
        (self.keys, self.ids)
    }

    pub fn peek_min(&self) -> Option<(usize, f64)> {
        let w = match self.count {
            0 => return None,
            1 => 0,
            _ => self.nodes[1] as usize,
        };
        Some((w, self.keys[w]))
    }

    pub fn update(&mut self, i: usize, priority: f64) -> Result<(), PqError> {
        self.update_probed(i, priority, &mut ())
    }

    pub fn update_probed<P: Probe>(&mut self, i: usize, priority: f64, probe: &mut P) -> Result<(), PqError> {
        if i >= self.count {
            return Err(PqError::IndexOutOfRange { index: i, len: self.count });
        }
        check_priority(priority, false)?;
        self.keys[i] = priority;
        self.refresh(i, probe);
        Ok(())
    }

    // Full update from key `i`.
    #[inline]
    fn refresh<P: Probe>(&mut self, i: usize, probe: &mut P) {
        if self.count == 1 {
            self.nodes[1] = 0;
            return;
        }
        let (mut parent, sister) = parent_and_sister(i, self.count - 1);
        let mut winner = i;
        if sister != i && challenger_wins(self.keys[sister], self.keys[winner], probe) {
            winner = sister;
        }
        self.nodes[parent] = winner as u32;
        while parent > 1 {
            let s = self.nodes[parent ^ 1] as usize;
            parent >>= 1;
            if challenger_wins(self.keys[s], self.keys[winner], probe) {
                winner = s;
            }
            self.nodes[parent] = winner as u32;
        }
    }

    /// Remove key `i`, returning its id. The removed key and id end up at the
    /// old last position, just past the new active range.
    pub fn remove(&mut self, i: usize) -> Result<EventId, PqError> {
        self.remove_probed(i, &mut ())
    }

    pub fn remove_probed<P: Probe>(&mut self, i: usize, probe: &mut P) -> Result<EventId, PqError> {
        if i >= self.count {
            return Err(PqError::IndexOutOfRange { index: i, len: self.count });
        }
        let removed = self.ids[i];
        if self.count == 1 {
            self.count = 0;
            return Ok(removed);
        }
        let last = self.count - 1;
        let last_sister = last >> (last.trailing_zeros() + 1);
        let mut target = i;
        let mut refresh_sister = false;

        // The last key always hangs below node `last`. If it won there, hand
        // its registrations to its sister (no comparisons needed) and move
        // its key into the sister's slot so the registered values stay put.
        if self.nodes[last] as usize == last {
            let mut p = last;
            while p != 0 && self.nodes[p] as usize == last {
                self.nodes[p] = last_sister as u32;
                p >>= 1;
            }
            if i == last {
                refresh_sister = true;
            } else {
                self.swap_keys(last_sister, last);
                if target == last_sister {
                    target = last;
                }
            }
        }
        if target != last {
            self.swap_keys(target, last);
        }
        self.count -= 1;

        if self.count == 1 {
            self.nodes[1] = 0;
        } else {
            if target != last {
                self.refresh(target, probe);
            }
            if refresh_sister {
                self.refresh(last_sister, probe);
            }
        }
        Ok(removed)
    }

    /// Append a key at index `len()`.
    pub fn insert(&mut self, priority: f64, id: EventId) -> Result<usize, PqError> {
        self.insert_probed(priority, id, &mut ())
    }

    pub fn insert_probed<P: Probe>(&mut self, priority: f64, id: EventId, probe: &mut P) -> Result<usize, PqError> {
        if self.count == self.capacity {
            return Err(PqError::CapacityExceeded { capacity: self.capacity });
        }
        check_priority(priority, false)?;
        let pos = self.count;
        if pos < self.keys.len() {
            self.keys[pos] = priority;
            self.ids[pos] = id;
        } else {
            self.keys.push(priority);
            self.ids.push(id);
        }
        self.count += 1;
        if self.count == 1 {
            self.nodes[1] = 0;
            return Ok(pos);
        }
        // Growing from an odd max_index turns key pos / 2 from a right leaf
        // into the lone left leaf; its old node becomes internal, so seed
        // the pass-through slot before climbing.
        if (pos - 1) % 2 == 1 {
            let lone = pos / 2;
            self.nodes[2 * lone + 1] = lone as u32;
        }
        self.refresh(pos, probe);
        Ok(pos)
    }

    fn swap_keys(&mut self, a: usize, b: usize) {
        self.keys.swap(a, b);
        self.ids.swap(a, b);
    }
}

/// Sort keys by repeatedly removing the winner. The arrays come back in
/// non-increasing priority order: the smallest key, removed first, ends up
/// last. Equal keys come out in no particular order.
pub fn sort_in_place(keys: Vec<f64>, ids: Vec<EventId>) -> Result<(Vec<f64>, Vec<EventId>), PqError> {
    let mut t = SuperTournament::from_parts(keys.len(), keys, ids)?;
    while t.len() > 1 {
        let (w, _) = t.peek_min().expect("non-empty");
        t.remove(w)?;
    }
    Ok(t.into_parts())
}

impl TournamentQueue for SuperTournament {
    fn kind(&self) -> StructureKind {
        StructureKind::Super
    }

    fn len(&self) -> usize {
        self.count
    }

    fn index_bound(&self) -> usize {
        self.count
    }

    fn is_active(&self, index: usize) -> bool {
        index < self.count
    }

    fn priority(&self, index: usize) -> f64 {
        self.keys[index]
    }

    fn id(&self, index: usize) -> EventId {
        self.ids[index]
    }

    fn peek_min(&self) -> Option<(usize, f64)> {
        SuperTournament::peek_min(self)
    }

    fn update_key_probed<P: Probe>(&mut self, index: usize, priority: f64, probe: &mut P) -> Result<(), PqError> {
        self.update_probed(index, priority, probe)
    }

    fn remove_probed<P: Probe>(&mut self, index: usize, probe: &mut P) -> Result<EventId, PqError> {
        SuperTournament::remove_probed(self, index, probe)
    }

    fn insert(&mut self, priority: f64, id: EventId) -> Result<usize, PqError> {
        SuperTournament::insert(self, priority, id)
    }

    fn supports_insert(&self) -> bool {
        true
    }

    fn storage_slots(&self) -> usize {
        self.nodes.len()
    }

    fn check_winners(&self) -> Result<(), String> {
        if self.count <= 1 {
            return if self.count == 1 && self.nodes[1] != 0 {
                Err(format!("single key, but slot 1 holds {}", self.nodes[1]))
            } else {
                Ok(())
            };
        }
        let m = self.count - 1;
        let keys = &self.keys[..self.count];
        for i in m / 2 + 1..=m {
            let s = i >> (i.trailing_zeros() + 1);
            check_slot(i, self.nodes[i] as usize, [s, i], keys)?;
        }
        if m.is_multiple_of(2) {
            let lone = m / 2;
            check_slot(m + 1, self.nodes[m + 1] as usize, [lone, lone], keys)?;
        }
        for p in (1..=m / 2).rev() {
            let children = [self.nodes[2 * p] as usize, self.nodes[2 * p + 1] as usize];
            check_slot(p, self.nodes[p] as usize, children, keys)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pqcore::ComparisonCount;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ids(n: usize) -> Vec<EventId> {
        (0..n as EventId).collect()
    }

    fn tree(keys: &[f64]) -> SuperTournament {
        SuperTournament::build(keys, &ids(keys.len())).unwrap()
    }

    fn fps(i: usize, m: usize) -> (usize, usize) {
        find_parent_and_sister(i, m).unwrap()
    }

    /// Pairing by search: the right leaf of a left key `i` is the largest
    /// `(2i + 1) * 2^k` not above `max_index`.
    fn brute_force_pairs(m: usize) -> Vec<(usize, usize)> {
        (0..=m)
            .map(|i| {
                if i > m / 2 {
                    let mut s = i;
                    while s % 2 == 0 {
                        s /= 2;
                    }
                    (i, (s - 1) / 2)
                } else {
                    let mut p = 2 * i + 1;
                    if p > m {
                        return (p, i);
                    }
                    while p * 2 <= m {
                        p *= 2;
                    }
                    (p, p)
                }
            })
            .collect()
    }

    #[test]
    fn worked_examples() {
        assert_eq!(fps(10, 11), (10, 2));
        assert_eq!(fps(1, 11), (6, 6));
        assert_eq!(fps(5, 10), (11, 5));
        assert_eq!(fps(0, 11), (8, 8));
        assert_eq!(find_parent_and_sister(0, 0), Err(PqError::SingleKey));
        assert!(find_parent_and_sister(12, 11).is_err());
    }

    #[test]
    fn twelve_leaf_pairing() {
        let mut pairs: Vec<(usize, usize, usize)> = (0..12)
            .filter(|&i| i <= 5)
            .map(|i| {
                let (p, s) = fps(i, 11);
                assert_eq!(fps(s, 11), (p, i));
                (i, s, p)
            })
            .collect();
        pairs.sort_by_key(|&(_, _, p)| p);
        assert_eq!(pairs, vec![(1, 6, 6), (3, 7, 7), (0, 8, 8), (4, 9, 9), (2, 10, 10), (5, 11, 11)]);
    }

    #[test]
    fn reference_formula_matches_search_and_fast_path() {
        for m in 1..=4096 {
            let expected = brute_force_pairs(m);
            for (i, &e) in expected.iter().enumerate() {
                assert_eq!(fps(i, m), e, "i = {i}, max_index = {m}");
                assert_eq!(parent_and_sister(i, m), e, "i = {i}, max_index = {m}");
            }
        }
    }

    #[test]
    fn pairing_is_valid_for_small_sizes() {
        for m in 1..=1024 {
            check_pairing(m, SisterGuard::Strict).unwrap();
        }
    }

    #[test]
    fn inclusive_guard_breaks_pairing() {
        let err = check_pairing(11, SisterGuard::Inclusive).unwrap_err();
        assert_eq!(err.max_index, 11);
        // The last key is always a right leaf whose partner computes itself
        // as exactly max_index, so the inclusive guard fails at every size.
        for m in 1..=64 {
            assert!(check_pairing(m, SisterGuard::Inclusive).is_err(), "max_index {m}");
        }
        assert_eq!(find_parent_and_sister_with_guard(5, 11, SisterGuard::Inclusive).unwrap(), (11, 5));
    }

    #[test]
    fn growth_flips_one_key_exactly_when_max_index_was_odd() {
        for m in 1..=512usize {
            let before = brute_force_pairs(m);
            let after = brute_force_pairs(m + 1);
            let changed: Vec<usize> = (0..=m).filter(|&i| before[i] != after[i]).collect();
            let lone_after = (m + 1) % 2 == 0;
            if m % 2 == 1 {
                // Key (m+1)/2 turns into the lone left leaf; its old partner
                // moves to the new key.
                let flipped = m.div_ceil(2);
                assert!(flipped <= m.div_ceil(2) && flipped > m / 2);
                assert_eq!(after[flipped], (m + 2, flipped));
                assert!(lone_after);
                assert_eq!(changed.len(), 2, "max_index {m}: {changed:?}");
                assert!(changed.contains(&flipped));
            } else {
                // The old lone key pairs with the new one.
                assert_eq!(changed, vec![m / 2], "max_index {m}");
                assert_eq!(after[m / 2], (m + 1, m + 1));
            }
        }
    }

    #[test]
    fn build_examples() {
        let t = tree(&[3.0, 1.0, 2.0, 4.0]);
        assert_eq!(&t.nodes()[..4], &[0, 1, 2, 1]);
        assert_eq!(t.peek_min(), Some((1, 1.0)));
        t.check_winners().unwrap();

        let t = tree(&[5.0]);
        assert_eq!(t.max_index(), Some(0));
        assert_eq!(t.nodes()[1], 0);
        assert_eq!(t.peek_min(), Some((0, 5.0)));

        let t = tree(&[2.0; 12]);
        let (w, p) = t.peek_min().unwrap();
        assert!(w < 12 && p == 2.0);
        t.check_winners().unwrap();

        assert_eq!(SuperTournament::build(&[], &[]).unwrap_err(), PqError::Empty);
        assert!(SuperTournament::with_capacity(1, &[1.0, 2.0], &[0, 1]).is_err());
    }

    #[test]
    fn update_examples() {
        let mut t = tree(&[3.0, 1.0, 2.0, 4.0]);
        t.update(1, 9.0).unwrap();
        assert_eq!(t.nodes()[1], 2);
        assert_eq!(t.peek_min(), Some((2, 2.0)));

        let mut t = tree(&[5.0]);
        t.update(0, 4.0).unwrap();
        assert_eq!(t.nodes()[1], 0);
        assert_eq!(t.peek_min(), Some((0, 4.0)));

        // Key 5 is alone at 11 active keys: slot 11 is its pass-through and
        // the climb goes on through its sibling slot 10.
        let keys: Vec<f64> = (0..11).map(|k| 10.0 + k as f64).collect();
        let mut t = tree(&keys);
        let mut count = ComparisonCount::default();
        t.update_probed(5, 0.5, &mut count).unwrap();
        assert_eq!(t.nodes()[11], 5);
        assert_eq!(t.nodes()[5], 5);
        assert_eq!(t.nodes()[1], 5);
        // No sister comparison; one comparison for each of 11 -> 5 -> 2 -> 1.
        assert_eq!(count.0, 3);
        t.check_winners().unwrap();
        assert!(t.update(11, 1.0).is_err());
    }

    #[test]
    fn remove_example_trace() {
        let mut t = tree(&[3.0, 1.0, 2.0, 4.0]);
        assert_eq!(t.remove(1).unwrap(), 1);
        assert_eq!(t.len(), 3);
        assert_eq!(&t.keys()[..3], &[3.0, 4.0, 2.0]);
        assert_eq!(t.keys()[3], 1.0);
        assert_eq!(t.ids()[3], 1);
        assert_eq!(t.peek_min(), Some((2, 2.0)));
        // Pair (0, 2) at node 2, lone key 1 at node 3.
        assert_eq!(&t.nodes()[1..4], &[2, 2, 1]);
        t.check_winners().unwrap();
    }

    #[test]
    fn remove_last_key_only_shrinks() {
        // Last key loses at its node: nothing to re-register.
        let mut t = tree(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let nodes_before = t.nodes().to_vec();
        assert_eq!(t.remove(4).unwrap(), 4);
        assert_eq!(t.len(), 4);
        assert_eq!(&t.nodes()[1..4], &nodes_before[1..4]);
        t.check_winners().unwrap();

        // Last key is the winner: its registrations move to its sister.
        let mut t = tree(&[5.0, 4.0, 3.0, 2.0, 1.0]);
        assert_eq!(t.remove(4).unwrap(), 4);
        t.check_winners().unwrap();
        assert_eq!(t.peek_min(), Some((3, 2.0)));
    }

    #[test]
    fn remove_down_to_empty() {
        let mut t = tree(&[2.0, 1.0]);
        assert_eq!(t.remove(0).unwrap(), 0);
        assert_eq!(t.peek_min(), Some((0, 1.0)));
        assert_eq!(t.remove(0).unwrap(), 1);
        assert!(t.is_empty());
        assert_eq!(t.peek_min(), None);
        assert!(t.remove(0).is_err());
        assert_eq!(t.insert(7.0, 9).unwrap(), 0);
        assert_eq!(t.peek_min(), Some((0, 7.0)));
    }

    #[test]
    fn insert_examples() {
        let mut t = SuperTournament::with_capacity(2, &[5.0], &[0]).unwrap();
        t.insert(1.0, 1).unwrap();
        assert_eq!(t.nodes()[1], 1);
        assert_eq!(t.peek_min(), Some((1, 1.0)));
        assert_eq!(t.insert(0.0, 2), Err(PqError::CapacityExceeded { capacity: 2 }));

        let keys: Vec<f64> = (0..11).map(|k| 10.0 + k as f64).collect();
        let mut t = SuperTournament::with_capacity(16, &keys, &ids(11)).unwrap();
        assert_eq!(t.insert(0.5, 11).unwrap(), 11);
        assert_eq!(t.nodes()[11], 11);
        assert_eq!(fps(5, 11), (11, 11));
        t.check_winners().unwrap();

        assert_eq!(t.insert(0.25, 12).unwrap(), 12);
        assert_eq!(fps(6, 12), (13, 6));
        assert_eq!(fps(12, 12), (12, 1));
        assert_eq!(t.nodes()[13], 6);
        assert_eq!(t.nodes()[12], 12);
        assert_eq!(t.peek_min(), Some((12, 0.25)));
        t.check_winners().unwrap();
    }

    #[test]
    fn repeated_winner_removal_sorts() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let keys: Vec<f64> = (0..12).map(|_| rng.random::<f64>()).collect();
        let mut t = tree(&keys);
        let mut out = Vec::new();
        while let Some((w, p)) = t.peek_min() {
            assert_eq!(t.remove(w).unwrap(), t.ids()[t.len()]);
            out.push(p);
            t.check_winners().unwrap();
        }
        let mut expected = keys.clone();
        expected.sort_by(f64::total_cmp);
        assert_eq!(out, expected);
    }

    #[test]
    fn sort_in_place_examples() {
        let (keys, ids) = sort_in_place(vec![3.0, 1.0, 2.0], vec![0, 1, 2]).unwrap();
        assert_eq!(keys, vec![3.0, 2.0, 1.0]);
        assert_eq!(ids, vec![0, 2, 1]);

        let desc = vec![9.0, 7.0, 5.0, 3.0, 1.0];
        let (keys, _) = sort_in_place(desc.clone(), ids_vec(5)).unwrap();
        assert_eq!(keys, desc);
    }

    fn ids_vec(n: usize) -> Vec<EventId> {
        ids(n)
    }

    #[test]
    fn storage_is_capacity_plus_two() {
        assert_eq!(tree(&[1.0; 12]).storage_slots(), 14);
        let t = SuperTournament::with_capacity(100, &[1.0; 12], &ids(12)).unwrap();
        assert_eq!(t.storage_slots(), 102);
    }

    #[derive(Debug, Clone)]
    enum Step {
        Update(usize, u8),
        Remove(usize),
        Insert(u8),
    }

    fn step() -> impl Strategy<Value = Step> {
        prop_oneof![
            (any::<usize>(), any::<u8>()).prop_map(|(i, p)| Step::Update(i, p)),
            any::<usize>().prop_map(Step::Remove),
            any::<u8>().prop_map(Step::Insert),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        // Small priority alphabet so ties are frequent.
        #[test]
        fn random_ops_keep_tree_valid(
            initial in proptest::collection::vec(0u8..16, 1..40),
            steps in proptest::collection::vec(step(), 0..120),
        ) {
            let keys: Vec<f64> = initial.iter().map(|&k| k as f64).collect();
            let mut t = SuperTournament::with_capacity(48, &keys, &ids(keys.len())).unwrap();
            let mut next_id = keys.len() as EventId;
            for s in steps {
                match s {
                    Step::Update(i, p) if !t.is_empty() => {
                        t.update(i % t.len(), (p % 16) as f64).unwrap();
                    }
                    Step::Remove(i) if !t.is_empty() => {
                        let i = i % t.len();
                        let id = t.ids()[i];
                        prop_assert_eq!(t.remove(i).unwrap(), id);
                        prop_assert_eq!(t.ids()[t.len()], id);
                        // No registration of a dismissed index survives.
                        if let Some(m) = t.max_index() {
                            for slot in 1..=m + 1 {
                                prop_assert!(t.nodes()[slot] as usize <= m, "slot {} holds {}", slot, t.nodes()[slot]);
                            }
                        }
                    }
                    Step::Insert(p) if t.len() < t.capacity() => {
                        t.insert((p % 16) as f64, next_id).unwrap();
                        next_id += 1;
                    }
                    _ => {}
                }
                prop_assert!(t.check_winners().is_ok(), "{:?}", t.check_winners());
                if t.max_index().is_some() {
                    let min = t.keys()[..t.len()].iter().cloned().fold(f64::INFINITY, f64::min);
                    prop_assert_eq!(t.peek_min().unwrap().1, min);
                }
            }
        }
    }
}
