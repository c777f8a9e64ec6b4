use proptest::prelude::*;

use ramsey_core::catalog::{build_family, free_trees, FamilySpec};
use ramsey_core::objective::{evaluate_delta, DeltaCache, FlipState, ObjectiveContext};
use ramsey_core::reference::objective_literal;
use ramsey_core::search::{run_search, SearchMode, SearchOptions};
use ramsey_core::tabu::{tabu_minimize, TabuParams};
use ramsey_core::{
    canonical_form, complement_coloring, edge_pair, num_pairs, Coloring, Permutation, SmallGraph,
};

/// Small connected-or-not patterns with at least one edge.
fn pattern() -> impl Strategy<Value = SmallGraph> {
    (2usize..=5)
        .prop_flat_map(|n| (Just(n), any::<u16>()))
        .prop_map(|(n, bits)| {
            let l = num_pairs(n);
            let mut b = (bits as u128) & ((1u128 << l) - 1);
            if b == 0 {
                b = 1;
            }
            SmallGraph::from_edge_bits(n, b).unwrap()
        })
}

fn coloring(n: usize) -> impl Strategy<Value = Coloring> {
    let l = num_pairs(n);
    any::<u128>().prop_map(move |b| {
        Coloring::new(n, if l == 128 { b } else { b & ((1u128 << l) - 1) }).unwrap()
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|p| Permutation::new(p).unwrap())
}

fn sized_coloring(lo: usize, hi: usize) -> impl Strategy<Value = (usize, Coloring, Permutation)> {
    (lo..=hi).prop_flat_map(|n| (Just(n), coloring(n), permutation(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_ignores_labels((n, e, p) in sized_coloring(1, 16)) {
        let g = e.red_graph();
        let h = g.permuted(&p).unwrap();
        prop_assert_eq!(canonical_form(&g), canonical_form(&h));
        prop_assert_eq!(canonical_form(&g).order(), n);
    }

    #[test]
    fn color_interchange((n, e, _) in sized_coloring(2, 9), g in pattern(), h in pattern()) {
        let a = ObjectiveContext::new(n, &g, &h).unwrap().evaluate(&e).unwrap();
        let b = ObjectiveContext::new(n, &h, &g).unwrap().evaluate(&complement_coloring(&e)).unwrap();
        prop_assert_eq!((a.red, a.blue), (b.blue, b.red));
    }

    #[test]
    fn relabelling_invariance((n, e, p) in sized_coloring(2, 10), g in pattern(), h in pattern()) {
        let ctx = ObjectiveContext::new(n, &g, &h).unwrap();
        prop_assert_eq!(ctx.evaluate(&e).unwrap(), ctx.evaluate(&e.permuted(&p).unwrap()).unwrap());
    }

    #[test]
    fn lookup_matches_literal_formula((n, e, _) in sized_coloring(2, 7), g in pattern(), h in pattern()) {
        let v = ObjectiveContext::new(n, &g, &h).unwrap().evaluate(&e).unwrap();
        let (r, b) = objective_literal(&e, &g, &h).unwrap();
        prop_assert_eq!((v.red, v.blue), (r, b));
    }

    #[test]
    fn delta_matches_full(
        (n, e, _) in sized_coloring(2, 12),
        g in pattern(),
        h in pattern(),
        flips in proptest::collection::vec(any::<usize>(), 1..30),
    ) {
        let ctx = ObjectiveContext::new(n, &g, &h).unwrap();
        let mut cache = DeltaCache::new(&e, &ctx).unwrap();
        let mut state = FlipState::new(&ctx, &e).unwrap();
        let mut cur = e;
        for f in flips {
            let k = f % num_pairs(n);
            let gain = state.gains()[k];
            let before = ctx.evaluate(&cur).unwrap().total as i64;
            let v = evaluate_delta(&cur, edge_pair(k, n).unwrap(), &ctx, &mut cache).unwrap();
            cur = cur.with_flipped(k);
            state.flip(k);
            let full = ctx.evaluate(&cur).unwrap();
            prop_assert_eq!(v, full);
            prop_assert_eq!(state.value(), full);
            prop_assert_eq!(before + gain, full.total as i64);
        }
    }

    #[test]
    fn arrow_monotonicity(n in 2usize..=6, g in pattern(), h in pattern()) {
        let opts = SearchOptions { mode: SearchMode::FirstZero, ..Default::default() };
        let lo = run_search(n, &g, &h, &opts).unwrap();
        let hi = run_search(n + 1, &g, &h, &opts).unwrap();
        if lo.min > 0 {
            prop_assert!(hi.min > 0);
        }
    }

    #[test]
    fn tabu_values_reverify(n in 4usize..=8, seed in any::<u64>(), g in pattern(), h in pattern()) {
        let params = TabuParams { iterations: 300, restarts: 2, seed, ..Default::default() };
        let out = tabu_minimize(n, &g, &h, &params).unwrap();
        let ctx = ObjectiveContext::new(n, &g, &h).unwrap();
        prop_assert_eq!(ctx.evaluate(&out.best).unwrap(), out.value);
        prop_assert_eq!(tabu_minimize(n, &g, &h, &params).unwrap(), out);
    }
}

#[test]
fn arrow_monotonicity_on_order_six_trees() {
    let trees = free_trees(6).unwrap();
    let opts = SearchOptions {
        mode: SearchMode::FirstZero,
        ..Default::default()
    };
    for a in trees.iter() {
        for b in trees.iter().filter(|b| b.index >= a.index) {
            let (g, h) = (a.representative, b.representative);
            let mins: Vec<u64> = (5..=9)
                .map(|n| run_search(n, &g, &h, &opts).unwrap().min)
                .collect();
            let first_positive = mins.iter().position(|&m| m > 0).unwrap_or(mins.len());
            assert!(
                mins[first_positive..].iter().all(|&m| m > 0),
                "{} {}: {mins:?}",
                a.label(),
                b.label()
            );
        }
    }
}

#[test]
fn family_specs_round_trip() {
    for s in ["P6", "K1,5", "S4:1,1", "S2:3,1", "T7.3", "G4:1-2,2-3,3-4"] {
        let spec: FamilySpec = s.parse().unwrap();
        assert_eq!(spec.to_string(), s);
        assert_eq!(build_family(&spec).unwrap().order(), spec.order());
    }
}
