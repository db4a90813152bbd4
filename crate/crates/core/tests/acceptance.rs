//! End-to-end acceptance checks, one PASS/FAIL line each.

mod common;

use std::collections::{BTreeSet, VecDeque};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tlfe::baseline::run_baseline;
use tlfe::bench::{run_bench, to_jsonl, BenchConfig, Method};
use tlfe::commit::{commit_states, verify_witness, CommitReport};
use tlfe::env::{load_map, Cell, GridMap, KnownSet, MapGenConfig};
use tlfe::planner::{run_episode, EpisodeResult, PlannerConfig, Termination, Verdict};
use tlfe::product::{ProductGraph, ProductState};
use tlfe::scltl::{compile_dfa, is_good_prefix, StateId, TotalDfa};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn commit_fixture() -> Outcome {
    let dfa = common::compile(common::PHI0, &["a", "b", "c"]);
    let report = commit_states(&dfa);
    let set = dfa.alphabet();
    let after = |names: &[&str]| dfa.next(dfa.initial(), set.letter(names).unwrap());
    let on_b = after(&["b"]);
    ensure(report.commit_set == BTreeSet::from([on_b]), || {
        format!("commit set {:?}, expected {{{on_b}}}", report.commit_set)
    })?;
    ensure(verify_witness(&dfa, on_b, &report.witnesses[&on_b]), || "witness rejected".into())?;
    let others: Vec<StateId> =
        dfa.states().filter(|&s| s != on_b && !dfa.is_trash(s) && !dfa.is_accepting(s)).collect();
    ensure(others.len() == 2, || format!("expected two other undecided states, found {others:?}"))?;
    let witness: Vec<Vec<String>> = report.witnesses[&on_b].iter().map(|&l| set.letter_names(l)).collect();
    Ok(format!("commit set {{{on_b}}}, witness {witness:?}"))
}

fn compiler_oracle() -> Outcome {
    let mut runner = TestRunner::deterministic();
    let formulas = common::formula(3);
    let words = common::word(8, 8);
    let set = common::observations(3);
    let mut pairs = 0;
    for _ in 0..250 {
        let f = formulas.new_tree(&mut runner).unwrap().current();
        let dfa = compile_dfa(&f, &set).map_err(|e| e.to_string())?;
        for _ in 0..8 {
            let w = words.new_tree(&mut runner).unwrap().current();
            ensure(dfa.accepts(&w) == is_good_prefix(&f, &w), || {
                format!("disagree on {} with {w:?}", f.display(&set))
            })?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs agree"))
}

/// Commit states by enumerating every word up to `max_len` letters.
fn enumerated_commits(dfa: &TotalDfa, max_len: usize) -> BTreeSet<StateId> {
    let mut out = BTreeSet::new();
    let mut layer: Vec<Vec<StateId>> = vec![dfa.states().collect()];
    for len in 0..=max_len {
        let mut next = BTreeSet::new();
        for f in &layer {
            if dfa.is_accepting(f[dfa.initial()]) {
                out.extend(
                    dfa.states().filter(|&s| !dfa.is_accepting(s) && !dfa.is_trash(s) && !dfa.is_accepting(f[s])),
                );
            }
            if len < max_len {
                for l in dfa.alphabet().letters() {
                    next.insert(f.iter().map(|&s| dfa.next(s, l)).collect::<Vec<_>>());
                }
            }
        }
        layer = next.into_iter().collect();
    }
    out
}

fn commit_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..200 {
        let set = common::observations(1 + i % 2);
        let n = rng.gen_range(1..=5);
        let dfa = common::random_dfa(&mut rng, &set, n);
        let report = commit_states(&dfa);
        let found = enumerated_commits(&dfa, 12);
        ensure(found.is_subset(&report.commit_set), || format!("automaton {i}: missed {found:?}"))?;
        for (&s, w) in &report.witnesses {
            ensure(verify_witness(&dfa, s, w), || format!("automaton {i}: bad witness for {s}"))?;
        }
        ensure(report.witnesses.len() == report.commit_set.len(), || format!("automaton {i}: missing witness"))?;
    }
    Ok("200 automata".into())
}

fn table_reproduction() -> Outcome {
    let cfg = BenchConfig { n_maps: 100, ..BenchConfig::default() };
    let out = run_bench(&cfg).map_err(|e| e.to_string())?;
    let row = |n: usize, m: Method| out.summary.iter().find(|r| r.n_blocks == n && r.method == m).unwrap();
    let (o0, b0, o5, b5) =
        (row(0, Method::Ours), row(0, Method::Baseline), row(5, Method::Ours), row(5, Method::Baseline));
    let line = format!(
        "n=0 ours {:.2}% {:.2} steps, baseline {:.2}% {:.2} steps; n=5 ours {:.2}%, baseline {:.2}%",
        o0.satisfaction_rate,
        o0.avg_steps,
        b0.satisfaction_rate,
        b0.avg_steps,
        o5.satisfaction_rate,
        b5.satisfaction_rate
    );
    let ok = o0.satisfied == o0.runs
        && b0.satisfied == b0.runs
        && o0.avg_steps < b0.avg_steps
        && o5.satisfied == o5.runs
        && b5.satisfaction_rate <= 60.0;
    if ok {
        Ok(line)
    } else {
        Err(line)
    }
}

fn two_regions() -> GridMap {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/two_regions.map");
    load_map(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// The connected one-way region containing `c`.
fn region_of(map: &GridMap, c: Cell) -> Vec<Cell> {
    let mut seen = vec![c];
    let mut queue = VecDeque::from([c]);
    while let Some(x) = queue.pop_front() {
        for y in map.neighbours(x) {
            if map.is_one_way(y) && !seen.contains(&y) {
                seen.push(y);
                queue.push_back(y);
            }
        }
    }
    seen
}

fn scenario() -> Outcome {
    let map = two_regions();
    let dfa = common::rescue();
    let commits = commit_states(&dfa);
    let ours = run_episode(&map, &dfa, &commits, &PlannerConfig::default()).map_err(|e| e.to_string())?;
    ensure(ours.is_satisfied(), || "ours did not satisfy the task".into())?;
    for t in 1..ours.trajectory.len() {
        let (prev, here) = (ours.trajectory[t - 1], ours.trajectory[t]);
        if map.is_one_way(here) && !map.is_one_way(prev) {
            let known: Vec<usize> = ours.known_at(t - 1).collect();
            let exit_seen = region_of(&map, here)
                .into_iter()
                .any(|c| map.label_name(c) == Some("s") && known.contains(&map.index(c)));
            ensure(exit_seen, || format!("entered region at step {t} before seeing its exit"))?;
        }
    }
    let base = run_baseline(&map, &dfa, &PlannerConfig::default()).map_err(|e| e.to_string())?;
    let end = *base.trajectory.last().unwrap();
    ensure(base.verdict == Verdict::Unsatisfiable, || "baseline satisfied the task".into())?;
    ensure(map.is_one_way(end), || format!("baseline stopped outside the region at {end:?}"))?;
    Ok(format!(
        "ours satisfied in {} steps; baseline stuck at ({}, {}) after {} steps",
        ours.steps, end.col, end.row, base.steps
    ))
}

fn check_theorem(map: &GridMap, dfa: &TotalDfa, res: &EpisodeResult, full_check: bool) -> Result<(), String> {
    let (accepting, hit_trash) = res.replay(dfa);
    ensure(!res.is_satisfied() || accepting, || "satisfied without acceptance".into())?;
    if res.termination != Termination::ViolatedAtStart {
        ensure(!hit_trash, || "trajectory reached the trash state".into())?;
    }
    if full_check && res.verdict == Verdict::Unsatisfiable {
        let end = ProductState { cell: *res.trajectory.last().unwrap(), dfa: *res.dfa_states.last().unwrap() };
        let mut g = ProductGraph::with_root(map, dfa, end);
        g.expand(map, &KnownSet::full(map), dfa);
        ensure(!g.accepting_reachable(dfa, end).unwrap(), || "a satisfying continuation was missed".into())?;
        for p in g.states().iter().filter(|p| !dfa.is_trash(p.dfa)) {
            ensure(res.known.is_known(map, p.cell), || format!("safely reachable cell {:?} left unknown", p.cell))?;
        }
    }
    Ok(())
}

fn theorem_suite() -> Outcome {
    let rescue = common::rescue();
    let commits = commit_states(&rescue);
    let cfg = PlannerConfig::default();
    let mut episodes = 0;
    let mut unsat = 0;
    for n in [0, 5] {
        for i in 0..100 {
            let map = MapGenConfig::new(20, n).generate(i).map_err(|e| e.to_string())?;
            for res in [run_episode(&map, &rescue, &commits, &cfg), run_baseline(&map, &rescue, &cfg)] {
                let res = res.map_err(|e| e.to_string())?;
                check_theorem(&map, &rescue, &res, false).map_err(|e| format!("n = {n}, map {i}: {e}"))?;
                episodes += 1;
            }
        }
    }
    let mut runner = TestRunner::deterministic();
    let formulas = common::formula(2);
    for seed in 0..500 {
        let map = common::random_map(seed, 2);
        let f = formulas.new_tree(&mut runner).unwrap().current();
        let dfa = compile_dfa(&f, map.alphabet()).map_err(|e| e.to_string())?;
        let commits: CommitReport = commit_states(&dfa);
        let res = run_episode(&map, &dfa, &commits, &cfg).map_err(|e| e.to_string())?;
        check_theorem(&map, &dfa, &res, true).map_err(|e| format!("random map {seed}: {e}"))?;
        unsat += usize::from(res.verdict == Verdict::Unsatisfiable);
        episodes += 1;
    }
    Ok(format!("{episodes} episodes, {unsat} unsatisfiable random instances checked for coverage"))
}

fn determinism() -> Outcome {
    let cfg = BenchConfig { n_maps: 10, base_seed: 42, ..BenchConfig::default() };
    let a = to_jsonl(&run_bench(&cfg).map_err(|e| e.to_string())?);
    let b = to_jsonl(&run_bench(&cfg).map_err(|e| e.to_string())?);
    ensure(a.as_bytes() == b.as_bytes(), || "bench outputs differ".into())?;
    Ok(format!("{} identical bytes", a.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("commit-state fixture", commit_fixture, Duration::from_secs(1)),
        ("compiler oracle equivalence", compiler_oracle, Duration::from_secs(30)),
        ("commit oracle equivalence", commit_oracle, Duration::from_secs(60)),
        ("benchmark table", table_reproduction, Duration::from_secs(600)),
        ("rescue scenario", scenario, Duration::from_secs(10)),
        ("soundness, safety and completeness", theorem_suite, Duration::from_secs(600)),
        ("determinism", determinism, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let outcome = outcome.and_then(|msg| {
            if took <= limit {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {took:?}, limit {limit:?}"))
            }
        });
        match outcome {
            Ok(msg) => println!("PASS {} {name}: {msg} ({:.2?})", i + 1, took),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name}: {msg} ({:.2?})", i + 1, took);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
