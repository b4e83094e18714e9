use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AnyQueue, EventId, OracleQueue, StructureKind, TournamentQueue, SENTINEL};

/// One scripted operation. Text form, one per line:
/// `U <index> <priority>`, `R <index>`, `I <priority> <id>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Op {
    Update { index: usize, priority: f64 },
    Remove { index: usize },
    Insert { priority: f64, id: EventId },
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Op::Update { index, priority } => write!(f, "U {index} {priority}"),
            Op::Remove { index } => write!(f, "R {index}"),
            Op::Insert { priority, id } => write!(f, "I {priority} {id}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bad script line `{line}`: {reason}")]
pub struct ParseOpError {
    pub line: String,
    pub reason: &'static str,
}

impl FromStr for Op {
    type Err = ParseOpError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason| ParseOpError { line: s.to_string(), reason };
        let mut fields = s.split_ascii_whitespace();
        let tag = fields.next().ok_or_else(|| err("empty line"))?;
        let mut next = || fields.next().ok_or_else(|| err("missing field"));
        let op = match tag {
            "U" => Op::Update {
                index: next()?.parse().map_err(|_| err("bad index"))?,
                priority: next()?.parse().map_err(|_| err("bad priority"))?,
            },
            "R" => Op::Remove { index: next()?.parse().map_err(|_| err("bad index"))? },
            "I" => Op::Insert {
                priority: next()?.parse().map_err(|_| err("bad priority"))?,
                id: next()?.parse().map_err(|_| err("bad id"))?,
            },
            _ => return Err(err("unknown operation")),
        };
        if fields.next().is_some() {
            return Err(err("trailing fields"));
        }
        Ok(op)
    }
}

/// First point where a structure and the oracle disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct Divergence {
    pub kind: StructureKind,
    /// `None` when the initial state already disagrees.
    pub op_index: Option<usize>,
    pub op: Option<Op>,
    pub detail: String,
    pub structure_state: String,
    pub oracle_state: String,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.op_index, self.op) {
            (Some(i), Some(op)) => write!(f, "{}: after op #{i} `{op}`: {}", self.kind, self.detail)?,
            _ => write!(f, "{}: initial state: {}", self.kind, self.detail)?,
        }
        write!(f, "\n  structure: {}\n  oracle:    {}", self.structure_state, self.oracle_state)
    }
}

impl std::error::Error for Divergence {}

/// Parameters of a generated script.
#[derive(Debug, Clone, Copy)]
pub struct ScriptConfig {
    pub keys: usize,
    pub ops: usize,
    pub seed: u64,
    /// Run the full white-box check every this many ops (0 = only at the end).
    pub full_check_every: usize,
}

impl ScriptConfig {
    pub fn new(keys: usize, ops: usize, seed: u64) -> Self {
        ScriptConfig { keys, ops, seed, full_check_every: 128 }
    }
}

// Coarse grid so ties come up often.
fn draw_priority(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(0..4096u32) as f64 / 16.0
}

/// Initial priorities for a script, derived from the seed alone.
pub fn initial_priorities(keys: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..keys).map(|_| draw_priority(&mut rng)).collect()
}

struct Lockstep {
    queue: AnyQueue,
    oracle: OracleQueue,
    full_check_every: usize,
}

impl Lockstep {
    fn new(kind: StructureKind, initial: &[f64], full_check_every: usize) -> Result<Self, Divergence> {
        let ids: Vec<EventId> = (0..initial.len() as EventId).collect();
        let queue = AnyQueue::build(kind, initial, &ids, initial.len()).map_err(|e| Divergence {
            kind,
            op_index: None,
            op: None,
            detail: format!("build failed: {e}"),
            structure_state: String::new(),
            oracle_state: String::new(),
        })?;
        let step = Lockstep { queue, oracle: OracleQueue::new(initial), full_check_every };
        step.compare(None, None, true)?;
        Ok(step)
    }

    fn diverged(&self, at: Option<(usize, Op)>, detail: String) -> Divergence {
        let q = &self.queue;
        let structure_state = format!(
            "len {}, min {:?}, winners {:?}",
            q.len(),
            q.peek_min(),
            q.check_winners().err().unwrap_or_else(|| "consistent".into())
        );
        let oracle_state = format!("len {}, min {:?}", self.oracle.len(), self.oracle.peek_min());
        Divergence {
            kind: q.kind(),
            op_index: at.map(|a| a.0),
            op: at.map(|a| a.1),
            detail,
            structure_state,
            oracle_state,
        }
    }

    fn apply(&mut self, index: usize, op: Op) -> Result<(), Divergence> {
        let at = Some((index, op));
        let q = &mut self.queue;
        let outcome = match op {
            Op::Update { index: i, priority } => {
                if !q.is_active(i) {
                    return Err(self.diverged(at, format!("key {i} is not active")));
                }
                let id = q.id(i);
                q.update_key(i, priority).map(|_| self.oracle.set(id, priority))
            }
            Op::Remove { index: i } => {
                if !q.is_active(i) {
                    return Err(self.diverged(at, format!("key {i} is not active")));
                }
                let id = q.id(i);
                match q.remove(i) {
                    Ok(got) if got != id => {
                        return Err(self.diverged(at, format!("removed id {got}, expected {id}")));
                    }
                    Ok(_) if q.kind().shrinks() => {
                        self.oracle.remove(id);
                        Ok(())
                    }
                    Ok(_) => {
                        self.oracle.dismiss(id);
                        Ok(())
                    }
                    Err(e) => Err(e),
                }
            }
            Op::Insert { priority, id } => q.insert(priority, id).map(|_| self.oracle.insert(id, priority)),
        };
        if let Err(e) = outcome {
            return Err(self.diverged(at, format!("structure rejected the op: {e}")));
        }
        let full = self.full_check_every != 0 && (index + 1).is_multiple_of(self.full_check_every);
        self.compare(Some(index), Some(op), full)
    }

    fn compare(&self, index: Option<usize>, op: Option<Op>, full: bool) -> Result<(), Divergence> {
        let at = index.zip(op);
        let got = self.queue.peek_min().map(|(_, p)| p);
        let want = self.oracle.peek_min().map(|(_, p)| p);
        if got != want {
            return Err(self.diverged(at, format!("minimum priority {got:?}, oracle says {want:?}")));
        }
        if self.queue.len() != self.oracle.len() {
            return Err(self.diverged(at, "active counts differ".into()));
        }
        if full {
            self.full_check(at)?;
        }
        Ok(())
    }

    // Every active key carries the priority the oracle has for its id.
    fn full_check(&self, at: Option<(usize, Op)>) -> Result<(), Divergence> {
        let q = &self.queue;
        let mut seen = 0;
        for i in (0..q.index_bound()).filter(|&i| q.is_active(i)) {
            seen += 1;
            let id = q.id(i);
            if self.oracle.priority_of(id) != Some(q.priority(i)) {
                return Err(self.diverged(
                    at,
                    format!(
                        "key {i} (id {id}) has priority {}, oracle has {:?}",
                        q.priority(i),
                        self.oracle.priority_of(id)
                    ),
                ));
            }
        }
        if seen != self.oracle.len() {
            return Err(self.diverged(at, format!("{seen} active indices, oracle has {}", self.oracle.len())));
        }
        q.check_winners().map_err(|e| self.diverged(at, e))
    }

    fn finish(&self, last: Option<(usize, Op)>) -> Result<(), Divergence> {
        self.full_check(last)
    }
}

/// Replay `script` on `kind` built over `initial` (ids `0..n`), checking
/// the winner's priority against the oracle after every op.
pub fn run_script(kind: StructureKind, initial: &[f64], script: &[Op]) -> Result<(), Divergence> {
    run_script_with(kind, initial, script, 128)
}

fn run_script_with(
    kind: StructureKind,
    initial: &[f64],
    script: &[Op],
    full_check_every: usize,
) -> Result<(), Divergence> {
    let mut step = Lockstep::new(kind, initial, full_check_every)?;
    for (i, &op) in script.iter().enumerate() {
        step.apply(i, op)?;
    }
    step.finish(script.iter().copied().enumerate().next_back())
}

/// [`run_script`] with the initial keys regenerated from `seed`.
pub fn differential_run(kind: StructureKind, keys: usize, script: &[Op], seed: u64) -> Result<(), Divergence> {
    run_script(kind, &initial_priorities(keys, seed), script)
}

/// Generate a random script valid for `kind` and run it in lockstep with the
/// oracle. Returns the script, which together with the seed's initial keys
/// replays the run exactly.
///
/// Fixed-size structures get updates and sentinel removals. Marin_VS shrinks
/// roughly to a single key over the script. SuperCBT alternates between
/// shrinking to one key and growing back to capacity.
#[allow(clippy::result_large_err)]
pub fn generate_and_run(kind: StructureKind, config: &ScriptConfig) -> Result<Vec<Op>, (Vec<Op>, Divergence)> {
    let initial = initial_priorities(config.keys, config.seed);
    let mut step = Lockstep::new(kind, &initial, config.full_check_every).map_err(|d| (Vec::new(), d))?;
    // Independent stream so the initial keys do not depend on the script length.
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);
    let capacity = config.keys;
    let mut shrinking = true;
    let drain_rate = (config.keys as f64 / config.ops.max(1) as f64).min(0.2);
    let mut script = Vec::with_capacity(config.ops);

    for n in 0..config.ops {
        let q = &step.queue;
        let len = q.len();
        if kind == StructureKind::Super {
            if len <= 1 {
                shrinking = false;
            } else if len >= capacity {
                shrinking = true;
            }
        }
        let roll: f64 = rng.random();
        let op = match kind {
            StructureKind::Marin | StructureKind::Reduced => {
                let i = pick_active(q, &mut rng);
                if roll < 0.15 && q.priority(i) < SENTINEL {
                    Op::Remove { index: i }
                } else {
                    Op::Update { index: i, priority: draw_priority(&mut rng) }
                }
            }
            StructureKind::MarinVs => {
                let i = pick_active(q, &mut rng);
                if roll < drain_rate && len > 1 {
                    Op::Remove { index: i }
                } else {
                    Op::Update { index: i, priority: draw_priority(&mut rng) }
                }
            }
            StructureKind::Super => {
                let (remove_p, insert_p) = if shrinking { (0.3, 0.05) } else { (0.05, 0.3) };
                if len <= 1 || (roll >= remove_p && roll < remove_p + insert_p && len < capacity) {
                    Op::Insert { priority: draw_priority(&mut rng), id: step.oracle.entries().len() as EventId }
                } else {
                    let i = pick_active(q, &mut rng);
                    if roll < remove_p {
                        Op::Remove { index: i }
                    } else {
                        Op::Update { index: i, priority: draw_priority(&mut rng) }
                    }
                }
            }
        };
        script.push(op);
        if let Err(d) = step.apply(n, op) {
            return Err((script, d));
        }
    }
    let last = script.iter().copied().enumerate().next_back();
    match step.finish(last) {
        Ok(()) => Ok(script),
        Err(d) => Err((script, d)),
    }
}

fn pick_active(q: &AnyQueue, rng: &mut ChaCha8Rng) -> usize {
    loop {
        let i = rng.random_range(0..q.index_bound());
        if q.is_active(i) {
            return i;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn op_text_form() {
        assert_eq!(Op::Update { index: 3, priority: 0.5 }.to_string(), "U 3 0.5");
        assert_eq!(Op::Remove { index: 7 }.to_string(), "R 7");
        assert_eq!(Op::Insert { priority: 2.0, id: 9 }.to_string(), "I 2 9");
        assert_eq!("R 7".parse::<Op>().unwrap(), Op::Remove { index: 7 });
        assert!("R".parse::<Op>().is_err());
        assert!("X 1".parse::<Op>().is_err());
        assert!("R 1 2".parse::<Op>().is_err());
        assert!("U 1 abc".parse::<Op>().is_err());
    }

    proptest! {
        #[test]
        fn op_text_round_trips(index in 0usize..1 << 20, priority in -1e300f64..1e300, id: u64) {
            for op in [Op::Update { index, priority }, Op::Remove { index }, Op::Insert { priority, id }] {
                prop_assert_eq!(op.to_string().parse::<Op>().unwrap(), op);
            }
        }
    }

    #[test]
    fn empty_script_passes() {
        for kind in StructureKind::ALL {
            differential_run(kind, 16, &[], 3).unwrap();
        }
    }

    #[test]
    fn generated_scripts_pass_and_replay() {
        for kind in StructureKind::ALL {
            let config = ScriptConfig::new(37, 3000, 11);
            let script = generate_and_run(kind, &config).unwrap_or_else(|(_, d)| panic!("{d}"));
            assert_eq!(script.len(), 3000);
            differential_run(kind, 37, &script, 11).unwrap();
        }
    }

    #[test]
    fn super_script_reaches_one_key_and_regrows() {
        let config = ScriptConfig::new(24, 2000, 5);
        let script = generate_and_run(StructureKind::Super, &config).unwrap();
        let mut len = 24i64;
        let (mut low, mut high_after_low) = (len, 0);
        for op in &script {
            match op {
                Op::Remove { .. } => len -= 1,
                Op::Insert { .. } => len += 1,
                _ => {}
            }
            low = low.min(len);
            if low == 1 {
                high_after_low = high_after_low.max(len);
            }
        }
        assert_eq!(low, 1);
        assert_eq!(high_after_low, 24);
    }

    #[test]
    fn a_wrong_answer_is_reported() {
        // Removing the same key twice from a fixed-size structure is refused.
        let script = [Op::Remove { index: 0 }, Op::Remove { index: 0 }];
        let err = differential_run(StructureKind::Reduced, 4, &script, 1).unwrap_err();
        assert_eq!(err.op_index, Some(1));
        assert!(err.to_string().contains("R 0"));
    }
}
