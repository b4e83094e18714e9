//! Hold-model and shrink-to-sort benchmarks.
//!
//! A hold takes the current winner, adds a random increment from one of the
//! [`PriorityDistribution`]s to its priority and restores the tree; the queue
//! size never changes. Only the restore is timed. The sort benchmark then
//! starts from the post-hold state and discards the winner until two keys
//! remain, timing the whole loop. Scores are reported relative to the Marin
//! reference structure.

mod clock;
mod distribution;
mod report;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use clock::{Clock, TimerChoice};
pub use distribution::PriorityDistribution;
pub use report::{scale_to_reference, write_csv, BenchMeta, CSV_HEADER};

use crate::baseline::{MarinTree, MarinVsTree};
use crate::pqcore::{ComparisonCount, EventId, PqError, StructureKind, TournamentQueue};
use crate::reduced::ReducedTournament;
use crate::supercbt::SuperTournament;

/// Generator used for every benchmark stream, recorded in the CSV metadata.
pub const RNG_NAME: &str = "ChaCha8Rng(seed, stream=repeat)";

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("uniform variate {0} is outside the open interval (0, 1)")]
    UniformOutOfRange(f64),
    #[error("timer unavailable: {0}")]
    TimerUnavailable(String),
    #[error("{metric} benchmark needs at least {min} keys, got {n}")]
    TooFewKeys { metric: Metric, n: usize, min: usize },
    #[error("repeat count must be positive")]
    NoRepeats,
    #[error("no {reference} row for n = {n}, {distribution}, {metric}")]
    MissingReference { reference: StructureKind, n: usize, distribution: PriorityDistribution, metric: Metric },
    #[error("shrink loop left {left} keys, expected 2")]
    ShrinkIncomplete { left: usize },
    #[error(transparent)]
    Queue(#[from] PqError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    /// Ticks per hold operation.
    Hold,
    /// Ticks for the whole shrink loop.
    Sort,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Hold => "hold",
            Metric::Sort => "sort",
        }
    }

    pub fn min_keys(self) -> usize {
        match self {
            Metric::Hold => 2,
            Metric::Sort => 3,
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One row of benchmark output.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub structure: StructureKind,
    pub n: usize,
    pub distribution: PriorityDistribution,
    pub metric: Metric,
    pub mean: f64,
    /// Standard deviation over repeats divided by the mean.
    pub rel_dev: f64,
    /// Filled in by [`scale_to_reference`].
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct BenchConfig {
    pub warmup_ops: usize,
    pub timed_ops: usize,
    pub repeats: usize,
    pub seed: u64,
    pub clock: Clock,
}

impl BenchConfig {
    /// Full-scale protocol: 10^6 warmup holds, 10^6 timed holds, 10 repeats.
    pub fn full_scale(seed: u64, clock: Clock) -> Self {
        BenchConfig { warmup_ops: 1_000_000, timed_ops: 1_000_000, repeats: 10, seed, clock }
    }
}

/// One hold on `queue`: the winner's priority grows by a drawn increment.
/// Returns the ticks spent restoring the tree.
#[inline]
pub fn hold<Q: TournamentQueue>(
    queue: &mut Q,
    distribution: PriorityDistribution,
    rng: &mut ChaCha8Rng,
    clock: &Clock,
) -> Result<u64, PqError> {
    let (winner, priority) = queue.peek_min().ok_or(PqError::Empty)?;
    let next = priority + distribution.draw(rng);
    let start = clock.now();
    queue.update_key(winner, next)?;
    Ok(clock.now().wrapping_sub(start))
}

/// Same as [`hold`] but counts comparisons instead of timing.
pub fn hold_counted<Q: TournamentQueue>(
    queue: &mut Q,
    distribution: PriorityDistribution,
    rng: &mut ChaCha8Rng,
) -> Result<u64, PqError> {
    let (winner, priority) = queue.peek_min().ok_or(PqError::Empty)?;
    let mut count = ComparisonCount::default();
    queue.update_key_probed(winner, priority + distribution.draw(rng), &mut count)?;
    Ok(count.0)
}

/// Discard the winner `steps` times, reporting each discarded priority.
pub fn shrink<Q: TournamentQueue>(queue: &mut Q, steps: usize, mut emitted: impl FnMut(f64)) -> Result<(), PqError> {
    for _ in 0..steps {
        let (winner, priority) = queue.peek_min().ok_or(PqError::Empty)?;
        emitted(priority);
        queue.remove(winner)?;
    }
    Ok(())
}

/// Stream for one repeat.
pub fn repeat_rng(seed: u64, repeat: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(repeat as u64);
    rng
}

/// Initial keys: `n` increments drawn from time zero.
pub fn initial_keys(n: usize, distribution: PriorityDistribution, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<EventId>) {
    let keys = (0..n).map(|_| distribution.draw(rng)).collect();
    (keys, (0..n as EventId).collect())
}

fn build<Q: BenchQueue>(n: usize, distribution: PriorityDistribution, rng: &mut ChaCha8Rng) -> Result<Q, PqError> {
    let (keys, ids) = initial_keys(n, distribution, rng);
    Q::build_from(&keys, &ids)
}

/// Structures the harness can construct.
pub trait BenchQueue: TournamentQueue + Sized {
    fn build_from(priorities: &[f64], ids: &[EventId]) -> Result<Self, PqError>;
}

impl BenchQueue for MarinTree {
    fn build_from(priorities: &[f64], ids: &[EventId]) -> Result<Self, PqError> {
        MarinTree::build(priorities, ids)
    }
}

impl BenchQueue for MarinVsTree {
    fn build_from(priorities: &[f64], ids: &[EventId]) -> Result<Self, PqError> {
        MarinVsTree::build(priorities, ids)
    }
}

impl BenchQueue for ReducedTournament {
    fn build_from(priorities: &[f64], ids: &[EventId]) -> Result<Self, PqError> {
        ReducedTournament::build(priorities, ids)
    }
}

impl BenchQueue for SuperTournament {
    fn build_from(priorities: &[f64], ids: &[EventId]) -> Result<Self, PqError> {
        SuperTournament::build(priorities, ids)
    }
}

struct RepeatScores {
    hold: Vec<f64>,
    sort: Vec<f64>,
}

fn run_repeats<Q: BenchQueue>(
    n: usize,
    distribution: PriorityDistribution,
    config: &BenchConfig,
    with_sort: bool,
) -> Result<RepeatScores, BenchError> {
    let clock = config.clock;
    let mut scores = RepeatScores { hold: Vec::new(), sort: Vec::new() };
    for repeat in 0..config.repeats {
        let mut rng = repeat_rng(config.seed, repeat);
        let mut queue: Q = build(n, distribution, &mut rng)?;
        for _ in 0..config.warmup_ops {
            hold(&mut queue, distribution, &mut rng, &clock)?;
        }
        let mut ticks = 0u64;
        for _ in 0..config.timed_ops {
            ticks += hold(&mut queue, distribution, &mut rng, &clock)?;
        }
        scores.hold.push(ticks as f64 / config.timed_ops.max(1) as f64);

        if with_sort {
            let start = clock.now();
            shrink(&mut queue, n - 2, |_| {})?;
            let ticks = clock.now().wrapping_sub(start);
            if queue.kind().shrinks() && queue.len() != 2 {
                return Err(BenchError::ShrinkIncomplete { left: queue.len() });
            }
            scores.sort.push(ticks as f64);
        }
    }
    Ok(scores)
}

fn dispatch(
    kind: StructureKind,
    n: usize,
    distribution: PriorityDistribution,
    config: &BenchConfig,
    with_sort: bool,
) -> Result<RepeatScores, BenchError> {
    if config.repeats == 0 {
        return Err(BenchError::NoRepeats);
    }
    let metric = if with_sort { Metric::Sort } else { Metric::Hold };
    if n < metric.min_keys() {
        return Err(BenchError::TooFewKeys { metric, n, min: metric.min_keys() });
    }
    match kind {
        StructureKind::Marin => run_repeats::<MarinTree>(n, distribution, config, with_sort),
        StructureKind::MarinVs => run_repeats::<MarinVsTree>(n, distribution, config, with_sort),
        StructureKind::Reduced => run_repeats::<ReducedTournament>(n, distribution, config, with_sort),
        StructureKind::Super => run_repeats::<SuperTournament>(n, distribution, config, with_sort),
    }
}

fn record(
    structure: StructureKind,
    n: usize,
    distribution: PriorityDistribution,
    metric: Metric,
    samples: &[f64],
) -> BenchRecord {
    let (mean, rel_dev) = mean_and_rel_dev(samples);
    BenchRecord { structure, n, distribution, metric, mean, rel_dev, ratio: None }
}

/// Mean and sample standard deviation over mean (0 for a single sample or a
/// zero mean).
pub fn mean_and_rel_dev(samples: &[f64]) -> (f64, f64) {
    let k = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / k;
    if samples.len() < 2 || mean == 0.0 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, var.sqrt() / mean)
}

/// Hold benchmark: per repeat, build over `n` drawn keys, run the warmup
/// holds, then time `timed_ops` holds.
pub fn run_hold_benchmark(
    kind: StructureKind,
    n: usize,
    distribution: PriorityDistribution,
    config: &BenchConfig,
) -> Result<BenchRecord, BenchError> {
    let scores = dispatch(kind, n, distribution, config, false)?;
    Ok(record(kind, n, distribution, Metric::Hold, &scores.hold))
}

/// Sort benchmark: the hold protocol runs first (untimed by this record) and
/// its final state is shrunk by `n - 2` winner removals.
pub fn run_sort_benchmark(
    kind: StructureKind,
    n: usize,
    distribution: PriorityDistribution,
    config: &BenchConfig,
) -> Result<BenchRecord, BenchError> {
    Ok(run_hold_and_sort(kind, n, distribution, config)?.1)
}

/// Both records from the same runs, the sort starting from each repeat's
/// post-hold state.
pub fn run_hold_and_sort(
    kind: StructureKind,
    n: usize,
    distribution: PriorityDistribution,
    config: &BenchConfig,
) -> Result<(BenchRecord, BenchRecord), BenchError> {
    let scores = dispatch(kind, n, distribution, config, true)?;
    Ok((
        record(kind, n, distribution, Metric::Hold, &scores.hold),
        record(kind, n, distribution, Metric::Sort, &scores.sort),
    ))
}
