use std::fs;

use cbt_core::sort_in_place;

use crate::output::write_output;
use crate::{Failure, SortArgs};

struct Row<'a> {
    id: &'a str,
    priority_text: &'a str,
}

fn parse(text: &str) -> Result<(Vec<Row<'_>>, Vec<f64>), Failure> {
    let mut rows = Vec::new();
    let mut priorities = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let bad = |what: &str| Failure::Config(format!("line {}: {what}: `{line}`", n + 1));
        let (id, priority_text) = line.rsplit_once(',').ok_or_else(|| bad("expected `id,priority`"))?;
        let priority: f64 = priority_text.trim().parse().map_err(|_| bad("malformed priority"))?;
        if priority.is_nan() {
            return Err(bad("priority is NaN"));
        }
        rows.push(Row { id, priority_text });
        priorities.push(priority);
    }
    Ok((rows, priorities))
}

pub fn run(args: SortArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.input).map_err(|e| Failure::Io(format!("{}: {e}", args.input.display())))?;
    let (rows, priorities) = parse(&text)?;
    let order: Vec<usize> = if rows.is_empty() {
        Vec::new()
    } else {
        let ids = (0..rows.len() as u64).collect();
        let (_, ids) = sort_in_place(priorities, ids).map_err(|e| Failure::Config(e.to_string()))?;
        ids.into_iter().map(|i| i as usize).collect()
    };
    write_output(args.out.as_deref(), |out| {
        let mut emit = |i: usize| writeln!(out, "{},{}", rows[i].id, rows[i].priority_text);
        if args.ascending {
            order.iter().rev().try_for_each(|&i| emit(i))
        } else {
            order.iter().try_for_each(|&i| emit(i))
        }
    })
}
