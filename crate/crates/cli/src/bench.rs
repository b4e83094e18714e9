use cbt_core::bench::{
    run_hold_and_sort, run_hold_benchmark, scale_to_reference, write_csv, BenchConfig, BenchError, BenchMeta, Clock,
    Metric,
};

use crate::output::write_output;
use crate::{BenchArgs, Failure};

fn validate(args: &BenchArgs, metrics: &[Metric]) -> Result<(), Failure> {
    let config = |msg: String| Err(Failure::Config(msg));
    if args.ops == 0 {
        return config("--ops must be positive".into());
    }
    if args.repeats == 0 {
        return config("--repeats must be positive".into());
    }
    for (flag, empty) in [
        ("--structure", args.structures.is_empty()),
        ("--n", args.sizes.is_empty()),
        ("--dist", args.distributions.is_empty()),
        ("--metric", metrics.is_empty()),
    ] {
        if empty {
            return config(format!("{flag} needs at least one value"));
        }
    }
    let min = metrics.iter().map(|m| m.min_keys()).max().unwrap_or(2);
    if let Some(&n) = args.sizes.iter().find(|&&n| n < min) {
        let why = if metrics.contains(&Metric::Sort) {
            "the sort benchmark needs at least 3 keys"
        } else {
            "at least 2 keys are needed"
        };
        return config(format!("--n {n} is too small: {why}"));
    }
    Ok(())
}

pub fn run(args: BenchArgs) -> Result<(), Failure> {
    let mut metrics: Vec<Metric> = Vec::new();
    for m in &args.metrics {
        let m = if m == "sort" { Metric::Sort } else { Metric::Hold };
        if !metrics.contains(&m) {
            metrics.push(m);
        }
    }
    validate(&args, &metrics)?;
    let clock = Clock::new(args.timer).map_err(|e| Failure::Config(e.to_string()))?;
    let config =
        BenchConfig { warmup_ops: args.warmup, timed_ops: args.ops, repeats: args.repeats, seed: args.seed, clock };
    let failed = |e: BenchError| Failure::Config(e.to_string());

    let mut records = Vec::new();
    for &kind in &args.structures {
        for &n in &args.sizes {
            for &dist in &args.distributions {
                eprintln!("bench {kind} n={n} {dist}");
                if metrics.contains(&Metric::Sort) {
                    let (hold, sort) = run_hold_and_sort(kind, n, dist, &config).map_err(failed)?;
                    if metrics.contains(&Metric::Hold) {
                        records.push(hold);
                    }
                    records.push(sort);
                } else {
                    records.push(run_hold_benchmark(kind, n, dist, &config).map_err(failed)?);
                }
            }
        }
    }
    // A ratio needs the reference row; without it the column stays empty.
    if scale_to_reference(&mut records).is_err() {
        eprintln!("note: marin not among the structures, ratio column left empty");
    }
    let meta = BenchMeta {
        seed: args.seed,
        warmup_ops: args.warmup,
        timed_ops: args.ops,
        repeats: args.repeats,
        timer: clock.name().to_string(),
    };
    write_output(args.out.as_deref(), |out| {
        write_csv(&records, &meta, out).map_err(|e| match e {
            BenchError::Io(e) => e,
            other => std::io::Error::other(other.to_string()),
        })
    })
}
