use cbt_core::pqcore::{differential_run, generate_and_run, Op, ScriptConfig};
use cbt_core::supercbt::{check_pairing, find_parent_and_sister_with_guard, SisterGuard};
use cbt_core::{AnyQueue, StructureKind, TournamentQueue};

#[test]
fn many_small_scripts_agree_with_the_oracle() {
    for kind in StructureKind::ALL {
        for keys in [2, 3, 5, 8, 13, 64] {
            for seed in 0..8 {
                let config = ScriptConfig { full_check_every: 1, ..ScriptConfig::new(keys, 400, seed) };
                if let Err((_, d)) = generate_and_run(kind, &config) {
                    panic!("keys {keys} seed {seed}: {d}");
                }
            }
        }
    }
}

#[test]
fn generated_scripts_replay_from_their_text_form() {
    for kind in StructureKind::ALL {
        let script = generate_and_run(kind, &ScriptConfig::new(40, 2_000, 11)).unwrap();
        let text: Vec<String> = script.iter().map(Op::to_string).collect();
        let parsed: Vec<Op> = text.iter().map(|l| l.parse().unwrap()).collect();
        assert_eq!(parsed, script);
        differential_run(kind, 40, &parsed, 11).unwrap();
    }
}

#[test]
fn corrupted_script_is_reported() {
    // Updating a key that a fixed-size structure does not have.
    let script = [Op::Update { index: 9, priority: 1.0 }];
    assert!(differential_run(StructureKind::Reduced, 4, &script, 0).is_err());
}

#[test]
fn inclusive_guard_breaks_pairing_where_strict_holds() {
    for max_index in 1..=256 {
        assert!(check_pairing(max_index, SisterGuard::Strict).is_ok(), "strict at {max_index}");
        assert!(check_pairing(max_index, SisterGuard::Inclusive).is_err(), "inclusive at {max_index}");
    }
    // 12 active keys: key 0's partner would be node 11, which is itself a key.
    assert_eq!(find_parent_and_sister_with_guard(0, 11, SisterGuard::Strict).unwrap(), (8, 8));
    assert_eq!(find_parent_and_sister_with_guard(0, 11, SisterGuard::Inclusive).unwrap(), (8, 8));
    assert!(check_pairing(11, SisterGuard::Inclusive).is_err());
}

#[test]
fn any_queue_behaves_alike_across_layouts() {
    let priorities = [5.0, 3.0, 9.0, 3.0, 7.0, 1.0, 8.0];
    let ids: Vec<u64> = (0..7).collect();
    for kind in StructureKind::ALL {
        let mut q = AnyQueue::build(kind, &priorities, &ids, 7).unwrap();
        assert_eq!(q.kind(), kind);
        assert_eq!(q.peek_min(), Some((5, 1.0)));
        q.update_key(5, 10.0).unwrap();
        // Tie between keys 1 and 3: the first registered winner keeps it.
        let (w, p) = q.peek_min().unwrap();
        assert_eq!(p, 3.0);
        assert!(w == 1 || w == 3);
        q.check_winners().unwrap();
    }
}
