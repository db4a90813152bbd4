mod common;

use std::collections::{HashMap, HashSet, VecDeque};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tlfe::env::{Action, Cell, GridMap, KnownSet};
use tlfe::product::{ProductGraph, ProductState};
use tlfe::scltl::{compile_dfa, Formula, TotalDfa};

fn letter_of(map: &GridMap, dfa: &TotalDfa, c: Cell) -> tlfe::scltl::Letter {
    let names: Vec<&str> = map.label_name(c).into_iter().collect();
    dfa.alphabet().letter(&names).unwrap()
}

/// Product states reachable from the root over known cells, found by a plain search that
/// treats trash as a sink.
fn reachable(map: &GridMap, known: &KnownSet, dfa: &TotalDfa, root: ProductState) -> HashSet<ProductState> {
    let mut seen = HashSet::from([root]);
    let mut queue = VecDeque::from([root]);
    while let Some(p) = queue.pop_front() {
        if dfa.is_trash(p.dfa) {
            continue;
        }
        for a in Action::ALL {
            if let Some(c) = map.step(p.cell, a).filter(|&c| known.is_known(map, c)) {
                let q = ProductState { cell: c, dfa: dfa.next(p.dfa, letter_of(map, dfa, c)) };
                if seen.insert(q) {
                    queue.push_back(q);
                }
            }
        }
    }
    seen
}

/// Shortest weights by Bellman-Ford relaxation over the reachable set, moves only, never
/// entering trash.
fn bellman_ford(
    map: &GridMap,
    dfa: &TotalDfa,
    states: &HashSet<ProductState>,
    src: ProductState,
) -> HashMap<ProductState, u64> {
    let mut dist = HashMap::new();
    if dfa.is_trash(src.dfa) {
        return dist;
    }
    dist.insert(src, 0u64);
    for _ in 0..states.len() {
        let mut changed = false;
        for &p in states {
            let Some(&d) = dist.get(&p) else { continue };
            for a in Action::MOVES {
                let Some(c) = map.step(p.cell, a) else { continue };
                let q = ProductState { cell: c, dfa: dfa.next(p.dfa, letter_of(map, dfa, c)) };
                if !states.contains(&q) || dfa.is_trash(q.dfa) {
                    continue;
                }
                let cand = d + u64::from(map.step_cost(p.cell));
                if dist.get(&q).is_none_or(|&old| cand < old) {
                    dist.insert(q, cand);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

fn setup(seed: u64, f: &Formula) -> (GridMap, TotalDfa, KnownSet) {
    let mut map = common::random_map(seed, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let cells: Vec<Cell> = map.cells().collect();
    for c in cells {
        map.set_step_cost(c, rng.gen_range(1..=4));
    }
    let dfa = compile_dfa(f, map.alphabet()).unwrap();
    let mut known = KnownSet::empty(&map);
    known.sense(&map, map.start(), rng.gen_range(1..=3));
    (map, dfa, known)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn edges_follow_the_map_and_the_automaton(seed in any::<u64>(), f in common::formula(2)) {
        let (map, dfa, known) = setup(seed, &f);
        let mut g = ProductGraph::new(&map, &dfa);
        g.expand(&map, &known, &dfa);
        prop_assert!(g.len() <= known.len() * dfa.num_states());
        for id in 0..g.len() {
            let p = g.state(id);
            prop_assert!(known.is_known(&map, p.cell));
            if dfa.is_trash(p.dfa) {
                prop_assert!(g.edges(id).is_empty());
            }
            for e in g.edges(id) {
                let q = g.state(e.to);
                prop_assert_eq!(map.step(p.cell, e.action), Some(q.cell));
                prop_assert_eq!(q.dfa, dfa.next(p.dfa, letter_of(&map, &dfa, q.cell)));
                prop_assert_eq!(e.weight, map.step_cost(p.cell));
            }
        }
        let expected = reachable(&map, &known, &dfa, g.root());
        let nodes: HashSet<ProductState> = g.states().iter().copied().collect();
        prop_assert_eq!(nodes, expected);
    }

    #[test]
    fn expansion_is_monotone_and_idempotent(seed in any::<u64>(), f in common::formula(2), h in 1usize..3) {
        let (map, dfa, mut known) = setup(seed, &f);
        let mut g = ProductGraph::new(&map, &dfa);
        g.expand(&map, &known, &dfa);
        let mut x = map.start();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut accepted = g.accepting_reachable(&dfa, g.root()).unwrap();
        for _ in 0..6 {
            let before: Vec<ProductState> = g.states().to_vec();
            let edges = g.edge_count();
            g.expand(&map, &known, &dfa);
            prop_assert_eq!(g.states(), &before[..]);
            prop_assert_eq!(g.edge_count(), edges);

            let moves: Vec<Cell> = map.neighbours(x).filter(|&c| known.is_known(&map, c)).collect();
            if let Some(&c) = moves.get(rng.gen_range(0..moves.len().max(1))) {
                x = c;
            }
            known.sense(&map, x, h);
            g.expand(&map, &known, &dfa);
            prop_assert_eq!(&g.states()[..before.len()], &before[..]);
            prop_assert!(g.edge_count() >= edges);
            let now = g.accepting_reachable(&dfa, g.root()).unwrap();
            prop_assert!(now || !accepted);
            accepted = now;
        }
    }

    #[test]
    fn dijkstra_matches_bellman_ford(seed in any::<u64>(), f in common::formula(2)) {
        let (map, dfa, known) = setup(seed, &f);
        let mut g = ProductGraph::new(&map, &dfa);
        g.expand(&map, &known, &dfa);
        let states: HashSet<ProductState> = g.states().iter().copied().collect();
        let oracle = bellman_ford(&map, &dfa, &states, g.root());
        let sp = g.min_weight_paths(&dfa, g.root()).unwrap();
        for id in 0..g.len() {
            let p = g.state(id);
            prop_assert_eq!(sp.weight(id), oracle.get(&p).copied(), "{:?}", p);
            if let Some(path) = sp.path_to(id) {
                let mut at = g.node(g.root()).unwrap();
                let mut total = 0u64;
                for (action, next) in path {
                    prop_assert!(!dfa.is_trash(g.state(next).dfa));
                    prop_assert_ne!(action, Action::Stay);
                    let e = g.edges(at).iter().find(|e| e.action == action).unwrap();
                    prop_assert_eq!(e.to, next);
                    total += u64::from(e.weight);
                    at = next;
                }
                prop_assert_eq!(at, id);
                prop_assert_eq!(Some(total), sp.weight(id));
            }
        }
        let accept = oracle.keys().any(|p| dfa.is_accepting(p.dfa));
        prop_assert_eq!(g.accepting_reachable(&dfa, g.root()).unwrap(), accept);
    }
}

#[test]
fn queries_reject_unknown_nodes() {
    let map = tlfe::env::load_map("map 2 1\nstart 0 0\nlegend A=a\n.A\n").unwrap();
    let dfa = common::compile("F a", &["a"]);
    let mut g = ProductGraph::new(&map, &dfa);
    g.expand(&map, &KnownSet::full(&map), &dfa);
    let ghost = ProductState { cell: Cell::new(1, 0), dfa: dfa.initial() };
    assert!(g.accepting_reachable(&dfa, ghost).is_err());
    assert!(g.min_weight_paths(&dfa, ghost).is_err());
    assert!(g.accepting_reachable(&dfa, g.root()).unwrap());
}
