use crate::pqcore::{
    challenger_wins, check_lengths, check_priority, check_slot, EventId, PqError, Probe, StructureKind, TournamentQueue,
};

const NO_LEAF: u32 = u32::MAX;

/// Variable-size CBT with `2N` node slots and an `N`-entry host-leaf map.
///
/// With `m` active keys the leaves are nodes `m..2m`. Removing a key retires
/// the last leaf pair: its registered winner is raised into the pair's parent
/// (which becomes a leaf) and the loser's key and id move into the slot of
/// the removed key. Key slots are never compacted, so active indices become
/// sparse; `host_leaf` is the only record of where a key lives.
#[derive(Debug, Clone)]
pub struct MarinVsTree {
    nodes: Vec<u32>,
    host_leaf: Vec<u32>,
    keys: Vec<f64>,
    ids: Vec<EventId>,
    active: usize,
}

impl MarinVsTree {
    pub fn build(priorities: &[f64], ids: &[EventId]) -> Result<Self, PqError> {
        check_lengths(priorities, ids)?;
        for &p in priorities {
            check_priority(p, false)?;
        }
        let n = priorities.len();
        let mut nodes = vec![0u32; 2 * n];
        let mut host_leaf = vec![0u32; n];
        for i in 0..n {
            nodes[i + n] = i as u32;
            host_leaf[i] = (i + n) as u32;
        }
        let keys = priorities.to_vec();
        for p in (1..n).rev() {
            let (a, b) = (nodes[2 * p], nodes[2 * p + 1]);
            nodes[p] = if keys[b as usize] < keys[a as usize] { b } else { a };
        }
        Ok(MarinVsTree { nodes, host_leaf, keys, ids: ids.to_vec(), active: n })
    }

    pub fn capacity(&self) -> usize {
        self.keys.len()
    }

    pub fn len(&self) -> usize {
        self.active
    }

    pub fn is_empty(&self) -> bool {
        self.active == 0
    }

    /// Node index of the last occupied leaf.
    pub fn last_leaf(&self) -> Option<usize> {
        (self.active > 0).then(|| 2 * self.active - 1)
    }

    pub fn host_leaf(&self, i: usize) -> Option<usize> {
        match self.host_leaf.get(i) {
            Some(&leaf) if leaf != NO_LEAF => Some(leaf as usize),
            _ => None,
        }
    }

    pub fn nodes(&self) -> &[u32] {
        &self.nodes
    }

    pub fn peek_min(&self) -> Option<(usize, f64)> {
        (self.active > 0).then(|| {
            let w = self.nodes[1] as usize;
            (w, self.keys[w])
        })
    }

    fn check_active(&self, i: usize) -> Result<(), PqError> {
        if i >= self.keys.len() {
            Err(PqError::IndexOutOfRange { index: i, len: self.keys.len() })
        } else if self.host_leaf[i] == NO_LEAF {
            Err(PqError::Inactive(i))
        } else {
            Ok(())
        }
    }

    pub fn update(&mut self, i: usize, priority: f64) -> Result<(), PqError> {
        self.update_probed(i, priority, &mut ())
    }

    pub fn update_probed<P: Probe>(&mut self, i: usize, priority: f64, probe: &mut P) -> Result<(), PqError> {
        self.check_active(i)?;
        check_priority(priority, false)?;
        self.keys[i] = priority;
        self.climb(i, probe);
        Ok(())
    }

    #[inline]
    fn climb<P: Probe>(&mut self, mut winner: usize, probe: &mut P) {
        let mut node = self.host_leaf[winner] as usize;
        while node > 1 {
            let sister = self.nodes[node ^ 1] as usize;
            node >>= 1;
            if challenger_wins(self.keys[sister], self.keys[winner], probe) {
                winner = sister;
            }
            self.nodes[node] = winner as u32;
        }
    }

    pub fn remove(&mut self, i: usize) -> Result<EventId, PqError> {
        self.remove_probed(i, &mut ())
    }

    pub fn remove_probed<P: Probe>(&mut self, i: usize, probe: &mut P) -> Result<EventId, PqError> {
        self.check_active(i)?;
        let removed = self.ids[i];
        if self.active == 1 {
            self.host_leaf[i] = NO_LEAF;
            self.active = 0;
            return Ok(removed);
        }
        let m = self.active;
        let parent = m - 1;
        let (left, right) = (self.nodes[2 * m - 2] as usize, self.nodes[2 * m - 1] as usize);
        // The pair's registered winner; no comparison needed.
        let winner = self.nodes[parent] as usize;
        let loser = if winner == left { right } else { left };

        if i == left || i == right {
            let other = if i == left { right } else { left };
            self.raise(other, parent);
            self.host_leaf[i] = NO_LEAF;
            self.active -= 1;
            // `i` may have been registered above the raised leaf.
            self.climb(other, probe);
        } else {
            self.raise(winner, parent);
            self.keys[i] = self.keys[loser];
            self.ids[i] = self.ids[loser];
            self.host_leaf[loser] = NO_LEAF;
            self.active -= 1;
            self.climb(i, probe);
        }
        Ok(removed)
    }

    fn raise(&mut self, key: usize, node: usize) {
        self.nodes[node] = key as u32;
        self.host_leaf[key] = node as u32;
    }
}

impl TournamentQueue for MarinVsTree {
    fn kind(&self) -> StructureKind {
        StructureKind::MarinVs
    }

    fn len(&self) -> usize {
        self.active
    }

    fn index_bound(&self) -> usize {
        self.keys.len()
    }

    fn is_active(&self, index: usize) -> bool {
        self.host_leaf(index).is_some()
    }

    fn priority(&self, index: usize) -> f64 {
        self.keys[index]
    }

    fn id(&self, index: usize) -> EventId {
        self.ids[index]
    }

    fn peek_min(&self) -> Option<(usize, f64)> {
        MarinVsTree::peek_min(self)
    }

    fn update_key_probed<P: Probe>(&mut self, index: usize, priority: f64, probe: &mut P) -> Result<(), PqError> {
        self.update_probed(index, priority, probe)
    }

    fn remove_probed<P: Probe>(&mut self, index: usize, probe: &mut P) -> Result<EventId, PqError> {
        MarinVsTree::remove_probed(self, index, probe)
    }

    fn storage_slots(&self) -> usize {
        self.nodes.len() + self.host_leaf.len()
    }

    fn check_winners(&self) -> Result<(), String> {
        let m = self.active;
        let hosted = self.host_leaf.iter().filter(|&&l| l != NO_LEAF).count();
        if hosted != m {
            return Err(format!("{hosted} keys have a host leaf, {m} are active"));
        }
        if m == 0 {
            return Ok(());
        }
        for leaf in m..2 * m {
            let key = self.nodes[leaf] as usize;
            if self.host_leaf.get(key) != Some(&(leaf as u32)) {
                return Err(format!("leaf {leaf} holds key {key} whose host leaf is {:?}", self.host_leaf.get(key)));
            }
        }
        for p in (1..m).rev() {
            let children = [self.nodes[2 * p] as usize, self.nodes[2 * p + 1] as usize];
            check_slot(p, self.nodes[p] as usize, children, &self.keys)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline::MarinTree;
    use crate::pqcore::ComparisonCount;

    fn ids(n: usize) -> Vec<EventId> {
        (0..n as EventId).collect()
    }

    fn tree(keys: &[f64]) -> MarinVsTree {
        MarinVsTree::build(keys, &ids(keys.len())).unwrap()
    }

    #[test]
    fn fresh_tree_matches_marin() {
        let keys: Vec<f64> = (0..12).map(|k| ((k * 5) % 7) as f64).collect();
        let mut vs = tree(&keys);
        let mut marin = MarinTree::build(&keys, &ids(12)).unwrap();
        for i in 0..12 {
            assert_eq!(vs.host_leaf(i), Some(i + 12));
        }
        for (step, i) in [3, 7, 0, 11, 5].into_iter().enumerate() {
            let p = step as f64 - 1.5;
            let (mut a, mut b) = (ComparisonCount::default(), ComparisonCount::default());
            vs.update_probed(i, p, &mut a).unwrap();
            marin.update_probed(i, p, &mut b).unwrap();
            assert_eq!(vs.nodes(), marin.nodes());
            assert_eq!(a, b);
        }
    }

    #[test]
    fn removing_key_five_of_twelve() {
        let keys: Vec<f64> = (0..12).map(|k| 100.0 - k as f64).collect();
        let mut t = tree(&keys);
        let mut count = ComparisonCount::default();
        t.clone().update_probed(11, 50.0, &mut count).unwrap();
        assert_eq!(count.0, 4);
        // Last pair: leaves 22 and 23 holding keys 10 and 11; 11 wins.
        assert_eq!(t.nodes()[11], 11);
        assert_eq!(t.remove(5).unwrap(), 5);
        assert_eq!(t.len(), 11);
        assert_eq!(t.last_leaf(), Some(21));
        assert_eq!(t.host_leaf(11), Some(11));
        // The loser's key and id now live in slot 5.
        assert_eq!(t.host_leaf(10), None);
        assert_eq!(t.priority(5), 90.0);
        assert_eq!(t.id(5), 10);
        t.check_winners().unwrap();

        // Exactly one key sits one level higher, and its update is one
        // comparison cheaper.
        let raised: Vec<usize> = (0..12).filter(|&i| t.host_leaf(i).is_some_and(|l| l < 12)).collect();
        assert_eq!(raised, vec![11]);
        let mut count = ComparisonCount::default();
        t.update_probed(11, 50.0, &mut count).unwrap();
        assert_eq!(count.0, 3);
        t.check_winners().unwrap();
    }

    #[test]
    fn removing_from_the_last_pair() {
        let keys: Vec<f64> = (0..6).map(|k| k as f64).collect();
        for i in [4, 5] {
            let mut t = tree(&keys);
            let before = keys.clone();
            assert_eq!(t.remove(i).unwrap(), i as EventId);
            let other = 9 - i;
            assert_eq!(t.host_leaf(other), Some(5));
            assert_eq!(t.host_leaf(i), None);
            // No key data moved.
            for (k, &p) in before.iter().enumerate() {
                assert_eq!(t.priority(k), p);
            }
            t.check_winners().unwrap();
        }
    }

    #[test]
    fn winner_removal_sorts_and_empties() {
        let keys = [5.0, 3.0, 8.0, 1.0, 9.0, 2.0, 7.0];
        let mut t = tree(&keys);
        let mut out = Vec::new();
        while let Some((w, p)) = t.peek_min() {
            t.remove(w).unwrap();
            out.push(p);
            t.check_winners().unwrap();
        }
        assert_eq!(out, vec![1.0, 2.0, 3.0, 5.0, 7.0, 8.0, 9.0]);
        assert!(t.is_empty());
        assert_eq!(t.remove(0), Err(PqError::Inactive(0)));
    }

    #[test]
    fn storage_is_3n() {
        assert_eq!(tree(&[1.0; 12]).storage_slots(), 36);
    }
}
