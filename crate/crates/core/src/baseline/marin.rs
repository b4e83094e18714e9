use crate::pqcore::{
    challenger_wins, check_lengths, check_priority, check_slot, EventId, PqError, Probe, StructureKind,
    TournamentQueue, SENTINEL,
};

/// Fixed-size CBT with `2N` node slots: internal nodes `1..N`, and leaf
/// `i + N` permanently holding key index `i`. Any `N >= 1` works.
#[derive(Debug, Clone)]
pub struct MarinTree {
    nodes: Vec<u32>,
    keys: Vec<f64>,
    ids: Vec<EventId>,
}

impl MarinTree {
    pub fn build(priorities: &[f64], ids: &[EventId]) -> Result<Self, PqError> {
        check_lengths(priorities, ids)?;
        for &p in priorities {
            check_priority(p, true)?;
        }
        let n = priorities.len();
        let mut nodes = vec![0u32; 2 * n];
        for i in 0..n {
            nodes[i + n] = i as u32;
        }
        let keys = priorities.to_vec();
        for p in (1..n).rev() {
            let (a, b) = (nodes[2 * p], nodes[2 * p + 1]);
            nodes[p] = if keys[b as usize] < keys[a as usize] { b } else { a };
        }
        Ok(MarinTree { nodes, keys, ids: ids.to_vec() })
    }

    pub fn n_keys(&self) -> usize {
        self.keys.len()
    }

    pub fn nodes(&self) -> &[u32] {
        &self.nodes
    }

    pub fn keys(&self) -> &[f64] {
        &self.keys
    }

    pub fn peek_min(&self) -> (usize, f64) {
        let w = self.nodes[1] as usize;
        (w, self.keys[w])
    }

    pub fn update(&mut self, i: usize, priority: f64) -> Result<(), PqError> {
        self.update_probed(i, priority, &mut ())
    }

    pub fn update_probed<P: Probe>(&mut self, i: usize, priority: f64, probe: &mut P) -> Result<(), PqError> {
        if i >= self.keys.len() {
            return Err(PqError::IndexOutOfRange { index: i, len: self.keys.len() });
        }
        check_priority(priority, true)?;
        self.keys[i] = priority;
        self.climb(i, probe);
        Ok(())
    }

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

    #[inline]
    fn climb<P: Probe>(&mut self, mut winner: usize, probe: &mut P) {
        let mut node = winner + self.keys.len();
        while node > 1 {
            let sister = self.nodes[node ^ 1] as usize;
            node >>= 1;
            if challenger_wins(self.keys[sister], self.keys[winner], probe) {
                winner = sister;
            }
            self.nodes[node] = winner as u32;
        }
    }
}

impl TournamentQueue for MarinTree {
    fn kind(&self) -> StructureKind {
        StructureKind::Marin
    }

    fn len(&self) -> usize {
        self.keys.len()
    }

    fn index_bound(&self) -> usize {
        self.keys.len()
    }

    fn is_active(&self, index: usize) -> bool {
        index < self.keys.len()
    }

    fn priority(&self, index: usize) -> f64 {
        self.keys[index]
    }

    fn id(&self, index: usize) -> EventId {
        self.ids[index]
    }

    fn peek_min(&self) -> Option<(usize, f64)> {
        Some(MarinTree::peek_min(self))
    }

    fn update_key_probed<P: Probe>(&mut self, index: usize, priority: f64, probe: &mut P) -> Result<(), PqError> {
        self.update_probed(index, priority, probe)
    }

    fn remove_probed<P: Probe>(&mut self, index: usize, probe: &mut P) -> Result<EventId, PqError> {
        if index >= self.keys.len() {
            return Err(PqError::IndexOutOfRange { index, len: self.keys.len() });
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
        for i in 0..n {
            if self.nodes[i + n] as usize != i {
                return Err(format!("leaf {} holds {}, expected {i}", i + n, self.nodes[i + n]));
            }
        }
        for p in (1..n).rev() {
            let children = [self.nodes[2 * p] as usize, self.nodes[2 * p + 1] as usize];
            check_slot(p, self.nodes[p] as usize, children, &self.keys)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pqcore::ComparisonCount;

    fn tree(keys: &[f64]) -> MarinTree {
        let ids: Vec<EventId> = (0..keys.len() as EventId).collect();
        MarinTree::build(keys, &ids).unwrap()
    }

    #[test]
    fn eleven_leaves_layout() {
        let t = tree(&[1.0; 11]);
        assert_eq!(t.nodes().len(), 22);
        // Key 1 sits at leaf 12, whose parent is node 6.
        assert_eq!(t.nodes()[12], 1);
        assert_eq!(12 >> 1, 6);
        t.check_winners().unwrap();
    }

    #[test]
    fn build_update_delete() {
        let mut t = tree(&[3.0, 1.0, 2.0, 4.0]);
        assert_eq!(t.nodes()[1], 1);
        t.update(1, 9.0).unwrap();
        assert_eq!(t.peek_min(), (2, 2.0));
        assert_eq!(t.delete_min_sentinel().unwrap(), 2);
        assert_eq!(t.peek_min(), (0, 3.0));
        t.check_winners().unwrap();

        let mut t = tree(&[5.0]);
        assert_eq!(t.peek_min(), (0, 5.0));
        t.update(0, 1.0).unwrap();
        assert_eq!(t.delete_min_sentinel().unwrap(), 0);
        assert_eq!(t.delete_min_sentinel().unwrap_err(), PqError::Exhausted);
    }

    #[test]
    fn comparison_count_is_floor_log2_of_leaf() {
        for n in 1..=70 {
            let mut t = tree(&vec![1.0; n]);
            for i in 0..n {
                let mut count = ComparisonCount::default();
                t.update_probed(i, i as f64, &mut count).unwrap();
                assert_eq!(count.0, (i + n).ilog2() as u64);
            }
        }
    }

    #[test]
    fn storage_is_2n() {
        assert_eq!(tree(&[1.0; 12]).storage_slots(), 24);
    }
}
