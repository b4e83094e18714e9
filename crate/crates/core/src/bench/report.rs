use std::collections::HashMap;
use std::io::Write;

use super::{BenchError, BenchRecord, Metric, PriorityDistribution, RNG_NAME};
use crate::pqcore::StructureKind;

pub const CSV_HEADER: &str = "structure,n,distribution,metric,mean,rel_dev,ratio";

const REFERENCE: StructureKind = StructureKind::Marin;

/// Fill in each record's ratio to the Marin record of the same
/// (n, distribution, metric) group.
pub fn scale_to_reference(records: &mut [BenchRecord]) -> Result<(), BenchError> {
    let reference: HashMap<(usize, PriorityDistribution, Metric), f64> = records
        .iter()
        .filter(|r| r.structure == REFERENCE)
        .map(|r| ((r.n, r.distribution, r.metric), r.mean))
        .collect();
    for r in records.iter_mut() {
        let Some(&base) = reference.get(&(r.n, r.distribution, r.metric)) else {
            return Err(BenchError::MissingReference {
                reference: REFERENCE,
                n: r.n,
                distribution: r.distribution,
                metric: r.metric,
            });
        };
        r.ratio = Some(if r.structure == REFERENCE { 1.0 } else { r.mean / base });
    }
    Ok(())
}

/// Run parameters written as a `#` comment line ahead of the CSV header.
#[derive(Debug, Clone)]
pub struct BenchMeta {
    pub seed: u64,
    pub warmup_ops: usize,
    pub timed_ops: usize,
    pub repeats: usize,
    pub timer: String,
}

impl BenchMeta {
    fn line(&self) -> String {
        format!(
            "# seed={} warmup={} timed={} repeats={} timer={} rng={}",
            self.seed, self.warmup_ops, self.timed_ops, self.repeats, self.timer, RNG_NAME
        )
    }
}

/// Write records ordered by structure, then n, then distribution, then
/// metric. Missing ratios are written as empty fields.
pub fn write_csv<W: Write>(records: &[BenchRecord], meta: &BenchMeta, mut out: W) -> Result<(), BenchError> {
    writeln!(out, "{}", meta.line())?;
    let mut sorted: Vec<&BenchRecord> = records.iter().collect();
    sorted.sort_by_key(|r| (r.structure, r.n, r.distribution, r.metric));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in sorted {
        w.write_record([
            r.structure.name().to_string(),
            r.n.to_string(),
            r.distribution.name().to_string(),
            r.metric.name().to_string(),
            r.mean.to_string(),
            r.rel_dev.to_string(),
            r.ratio.map(|x| x.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
