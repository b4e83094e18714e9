use cbt_core::bench::{initial_keys, repeat_rng, PriorityDistribution};
use cbt_core::pqcore::{generate_and_run, ComparisonCount, ScriptConfig};
use cbt_core::supercbt::{check_pairing, SisterGuard};
use cbt_core::{MarinTree, ReducedTournament, StructureKind, SuperTournament, TournamentQueue};
use rand::Rng;

use crate::{Failure, VerifyArgs};

enum Outcome {
    Pass(String),
    Fail(String),
    Skipped(String),
}

fn pairing(args: &VerifyArgs) -> Outcome {
    if args.max_n <= 1 {
        return Outcome::Skipped("no pairs below 2 active keys".into());
    }
    let guard = if args.inclusive_sister_guard { SisterGuard::Inclusive } else { SisterGuard::Strict };
    for max_index in 1..args.max_n {
        if let Err(v) = check_pairing(max_index, guard) {
            return Outcome::Fail(v.to_string());
        }
    }
    Outcome::Pass(format!("active sizes 2..={}", args.max_n))
}

fn differential(args: &VerifyArgs, kind: StructureKind) -> Outcome {
    if args.keys < 2 {
        return Outcome::Skipped("needs at least 2 keys".into());
    }
    let config = ScriptConfig::new(args.keys, args.ops, args.seed);
    match generate_and_run(kind, &config) {
        Ok(script) => Outcome::Pass(format!("{} ops on {} keys", script.len(), args.keys)),
        Err((_, d)) => Outcome::Fail(d.to_string()),
    }
}

// Every full update of key `i` in a fixed-size tree of `n` leaves costs
// floor(log2(i + n)) comparisons, whatever the priorities. `leaves` maps a
// key count to the tree's leaf count.
fn fixed_size_counts<Q: TournamentQueue>(
    name: &str,
    build: impl Fn(&[f64], &[u64]) -> Q,
    leaves: impl Fn(usize) -> usize,
    args: &VerifyArgs,
) -> Outcome {
    let top = args.max_n.clamp(16, 1 << 16);
    let mut sizes: Vec<usize> = (4..=16).map(|k| 1usize << k).filter(|&n| n <= top).collect();
    sizes.extend([17, 100, 1000]);
    let mut rng = repeat_rng(args.seed, 0);
    for n in sizes {
        for dist in PriorityDistribution::ALL {
            let (keys, ids) = initial_keys(n, dist, &mut rng);
            let mut q = build(&keys, &ids);
            let picks: Vec<usize> =
                if n <= 4096 { (0..n).collect() } else { (0..4096).map(|_| rng.random_range(0..n)).collect() };
            for i in picks {
                let mut count = ComparisonCount::default();
                let p = dist.draw(&mut rng) * 8.0;
                if let Err(e) = q.update_key_probed(i, p, &mut count) {
                    return Outcome::Fail(format!("{name} n={n} update {i}: {e}"));
                }
                let expected = (i + leaves(n)).ilog2() as u64;
                if count.0 != expected {
                    return Outcome::Fail(format!(
                        "{name} n={n} key {i}: {} comparisons, expected {expected}",
                        count.0
                    ));
                }
            }
        }
    }
    Outcome::Pass(format!("{name} counts equal floor(log2(i + n))"))
}

// Updates get cheaper as a SuperCBT shrinks.
fn shrinking_counts(args: &VerifyArgs) -> Outcome {
    let n = 4096;
    let mut rng = repeat_rng(args.seed, 0);
    let (keys, ids) = initial_keys(n, PriorityDistribution::Exponential, &mut rng);
    let mut q = match SuperTournament::build(&keys, &ids) {
        Ok(q) => q,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let mut per_step = Vec::with_capacity(n);
    while q.len() > 2 {
        let (w, _) = q.peek_min().expect("non-empty");
        if let Err(e) = q.remove(w) {
            return Outcome::Fail(e.to_string());
        }
        let i = rng.random_range(0..q.len());
        let mut count = ComparisonCount::default();
        let p = q.keys()[i] + PriorityDistribution::Exponential.draw(&mut rng);
        if let Err(e) = q.update_probed(i, p, &mut count) {
            return Outcome::Fail(e.to_string());
        }
        per_step.push(count.0 as f64);
    }
    let half = per_step.len() / 2;
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let (first, second) = (mean(&per_step[..half]), mean(&per_step[half..]));
    let detail = format!("super mean comparisons {first:.3} then {second:.3}");
    if second < first {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

pub fn run(args: VerifyArgs) -> Result<(), Failure> {
    let mut suites: Vec<(String, Outcome)> = vec![("pairing".into(), pairing(&args))];
    for kind in StructureKind::ALL {
        suites.push((format!("differential {kind}"), differential(&args, kind)));
    }
    suites.push((
        "comparisons marin".into(),
        fixed_size_counts("marin", |k, i| MarinTree::build(k, i).expect("valid keys"), |n| n, &args),
    ));
    suites.push((
        "comparisons reduced".into(),
        fixed_size_counts("reduced", |k, i| ReducedTournament::build(k, i).expect("valid keys"), |n| n + n % 2, &args),
    ));
    suites.push(("comparisons super".into(), shrinking_counts(&args)));

    let mut failed = false;
    for (name, outcome) in &suites {
        match outcome {
            Outcome::Pass(d) => println!("PASS    {name}: {d}"),
            Outcome::Skipped(d) => println!("SKIPPED {name}: {d}"),
            Outcome::Fail(d) => {
                failed = true;
                println!("FAIL    {name}: {d}");
            }
        }
    }
    if failed {
        println!(
            "replay: cbt verify --seed {} --max-n {} --keys {} --ops {}",
            args.seed, args.max_n, args.keys, args.ops
        );
        return Err(Failure::Verification);
    }
    Ok(())
}
