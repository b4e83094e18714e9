use super::{EventId, SENTINEL};

/// Linear-scan reference queue, addressed by event id.
///
/// Structures relocate keys between indices on removal, each in its own way,
/// so the oracle tracks keys by the id that travels with them.
#[derive(Debug, Clone, Default)]
pub struct OracleQueue {
    entries: Vec<OracleEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEntry {
    pub priority: f64,
    pub id: EventId,
    pub active: bool,
}

impl OracleQueue {
    /// Keys with ids `0..priorities.len()`.
    pub fn new(priorities: &[f64]) -> Self {
        let entries = priorities
            .iter()
            .enumerate()
            .map(|(id, &priority)| OracleEntry { priority, id: id as EventId, active: true })
            .collect();
        OracleQueue { entries }
    }

    pub fn entries(&self) -> &[OracleEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.iter().filter(|e| e.active).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn priority_of(&self, id: EventId) -> Option<f64> {
        self.entry(id).filter(|e| e.active).map(|e| e.priority)
    }

    pub fn set(&mut self, id: EventId, priority: f64) {
        self.entry_mut(id).priority = priority;
    }

    /// Physical removal.
    pub fn remove(&mut self, id: EventId) {
        self.entry_mut(id).active = false;
    }

    /// Removal as the fixed-size structures do it.
    pub fn dismiss(&mut self, id: EventId) {
        self.entry_mut(id).priority = SENTINEL;
    }

    pub fn insert(&mut self, id: EventId, priority: f64) {
        assert_eq!(id as usize, self.entries.len(), "oracle ids must stay dense");
        self.entries.push(OracleEntry { priority, id, active: true });
    }

    /// Minimum active entry, first one winning ties.
    pub fn peek_min(&self) -> Option<(EventId, f64)> {
        let mut best: Option<&OracleEntry> = None;
        for e in self.entries.iter().filter(|e| e.active) {
            match best {
                Some(b) if e.priority >= b.priority => {}
                _ => best = Some(e),
            }
        }
        best.map(|e| (e.id, e.priority))
    }

    fn entry(&self, id: EventId) -> Option<&OracleEntry> {
        self.entries.get(id as usize)
    }

    fn entry_mut(&mut self, id: EventId) -> &mut OracleEntry {
        &mut self.entries[id as usize]
    }
}

/// Checks one winner slot given the two candidates below it (key indices
/// either read from the child slots or taken from the leaf pair). Applied to
/// every slot from the bottom up this certifies the whole tree.
pub(crate) fn check_slot(slot: usize, stored: usize, candidates: [usize; 2], keys: &[f64]) -> Result<(), String> {
    if !candidates.contains(&stored) {
        return Err(format!("slot {slot} holds key {stored}, expected one of {candidates:?}"));
    }
    let best = keys[candidates[0]].min(keys[candidates[1]]);
    if keys[stored] != best {
        return Err(format!(
            "slot {slot} holds key {stored} with priority {}, subtree minimum is {best}",
            keys[stored]
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peek_min_scans_active_entries() {
        let mut o = OracleQueue::new(&[3.0, 1.0, 2.0, 1.0]);
        assert_eq!(o.peek_min(), Some((1, 1.0)));
        o.remove(1);
        assert_eq!(o.peek_min(), Some((3, 1.0)));
        o.dismiss(3);
        assert_eq!(o.peek_min(), Some((2, 2.0)));
        o.insert(4, 0.5);
        assert_eq!(o.peek_min(), Some((4, 0.5)));
        assert_eq!(o.len(), 4);
        assert_eq!(o.priority_of(1), None);
    }

    #[test]
    fn slot_check() {
        let keys = [2.0, 1.0, 1.0];
        assert!(check_slot(1, 1, [0, 1], &keys).is_ok());
        assert!(check_slot(1, 0, [0, 1], &keys).is_err());
        assert!(check_slot(1, 2, [0, 1], &keys).is_err());
        // Ties: either holder is fine.
        assert!(check_slot(1, 2, [1, 2], &keys).is_ok());
        assert!(check_slot(1, 1, [1, 2], &keys).is_ok());
    }
}
