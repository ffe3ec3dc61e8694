use proptest::prelude::*;
use rand::Rng;

use dicomo_core::degmodel::{parse_degree_file, stats, write_degree_file, BiDegreeSequence};
use dicomo_core::graphalg::{
    bfs_distances, count_simple_paths, diameter_exact, diameter_exact_with, exact_path_expectation,
    expected_path_bound, pair_distances, INF,
};
use dicomo_core::graphgen::{
    lazy_explore, pair_uniform, parse_edge_list, sample_simple, write_edge_list, Digraph,
    ExplorationOutcome, GraphGenError, HalfEdgeStatus, StopRule, UNPAIRED,
};
use dicomo_core::rng::stream;
use dicomo_core::Direction;

/// A valid sequence built from owner lists of tails and heads.
fn sequence() -> impl Strategy<Value = BiDegreeSequence> {
    (1usize..16).prop_flat_map(|n| {
        (0usize..30).prop_flat_map(move |m| {
            (
                prop::collection::vec(0..n, m),
                prop::collection::vec(0..n, m),
            )
                .prop_map(move |(tails, heads)| {
                    let mut pairs = vec![(0u32, 0u32); n];
                    for t in tails {
                        pairs[t].1 += 1;
                    }
                    for h in heads {
                        pairs[h].0 += 1;
                    }
                    BiDegreeSequence::new(pairs).unwrap()
                })
        })
    })
}

fn edge_graph() -> impl Strategy<Value = Digraph> {
    (1usize..20).prop_flat_map(|n| {
        prop::collection::vec((0..n as u32, 0..n as u32), 0..3 * n)
            .prop_map(move |edges| Digraph::from_edges(n, &edges))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pairing_preserves_degrees(seq in sequence(), seed in any::<u64>()) {
        let g = pair_uniform(&seq, &mut stream(seed));
        prop_assert_eq!(g.degree_pairs(), seq.pairs().to_vec());
        prop_assert_eq!(g.m() as u64, seq.m());
        let mut heads = g.head_of_tail().to_vec();
        heads.sort_unstable();
        prop_assert_eq!(heads, (0..g.m() as u32).collect::<Vec<_>>());
    }

    #[test]
    fn simple_samples_are_simple(seq in sequence(), seed in any::<u64>()) {
        if let Ok(s) = sample_simple(&seq, &mut stream(seed), 50) {
            prop_assert!(s.graph.is_simple());
            prop_assert_eq!(s.graph.degree_pairs(), seq.pairs().to_vec());
            prop_assert!(s.attempts >= 1);
        }
    }

    #[test]
    fn adjacency_is_transpose_consistent(g in edge_graph()) {
        let mut forward = Vec::new();
        let mut backward = Vec::new();
        for v in 0..g.n() {
            forward.extend(g.out_neighbors(v).iter().map(|&w| (v as u32, w)));
            backward.extend(g.in_neighbors(v).iter().map(|&u| (u, v as u32)));
        }
        forward.sort_unstable();
        backward.sort_unstable();
        prop_assert_eq!(forward, backward);
        let inverse = g.tail_of_head();
        for (t, &h) in g.head_of_tail().iter().enumerate() {
            prop_assert_eq!(inverse[h as usize], t as u32);
            prop_assert_eq!(g.head_source(h), g.tail_owner(t as u32));
        }
    }

    #[test]
    fn edge_list_round_trip(g in edge_graph(), seed in any::<Option<u64>>()) {
        let text = write_edge_list(&g, seed);
        let (back, header) = parse_edge_list(&text).unwrap();
        prop_assert_eq!(back.edges(), g.edges());
        prop_assert_eq!(header.seed, seed);
        prop_assert_eq!(header.simple, Some(g.simple_flag()));
    }

    #[test]
    fn degree_file_round_trip(seq in sequence()) {
        prop_assert_eq!(parse_degree_file(&write_degree_file(&seq)).unwrap(), seq);
    }

    #[test]
    fn diameter_is_the_largest_finite_distance(g in edge_graph()) {
        let report = diameter_exact_with(&g, true);
        let mut best = 0;
        let mut finite = 0u64;
        for u in 0..g.n() {
            let d = bfs_distances(&g, u, Direction::Out).unwrap();
            let ecc = d.iter().filter(|&&x| x != INF).max().copied().unwrap_or(0);
            prop_assert_eq!(report.eccentricities.as_ref().unwrap()[u], ecc);
            best = best.max(ecc);
            finite += d.iter().filter(|&&x| x != INF).count() as u64 - 1;
        }
        prop_assert_eq!(report.diameter, best);
        prop_assert_eq!(report.finite_pairs, finite);
        let (a, b) = report.argmax;
        if report.diameter > 0 {
            prop_assert_eq!(pair_distances(&g, &[(a, b)])[0], Some(report.diameter));
        }
    }

    #[test]
    fn distances_agree_across_directions(g in edge_graph()) {
        for u in 0..g.n() {
            let out = bfs_distances(&g, u, Direction::Out).unwrap();
            for (v, &d) in out.iter().enumerate() {
                let back = bfs_distances(&g, v, Direction::In).unwrap();
                prop_assert_eq!(back[u], d);
            }
        }
    }

    #[test]
    fn adding_an_edge_never_lengthens_a_distance(g in edge_graph(), seed in any::<u64>()) {
        let mut rng = stream(seed);
        let n = g.n() as u32;
        let mut edges = g.edges();
        edges.push((rng.random_range(0..n), rng.random_range(0..n)));
        let h = Digraph::from_edges(g.n(), &edges);
        for u in 0..g.n() {
            let before = bfs_distances(&g, u, Direction::Out).unwrap();
            let after = bfs_distances(&h, u, Direction::Out).unwrap();
            prop_assert!(before.iter().zip(&after).all(|(b, a)| a <= b));
        }
    }

    #[test]
    fn lazy_exploration_is_a_partial_matching(seq in sequence(), seed in any::<u64>(), omega in 1u64..8) {
        prop_assume!(seq.m() > 0);
        let mut rng = stream(seed);
        let start = rng.random_range(0..seq.m() as u32);
        let dir = if seed % 2 == 0 { Direction::Out } else { Direction::In };
        let st = lazy_explore(&seq, start, dir, &StopRule::new(20, omega), &mut rng, None).unwrap();
        for (t, &h) in st.head_of_tail().iter().enumerate() {
            if h == UNPAIRED {
                prop_assert_ne!(st.tail_status()[t], HalfEdgeStatus::Paired);
            } else {
                prop_assert_eq!(st.tail_of_head()[h as usize], t as u32);
                prop_assert_eq!(st.tail_status()[t], HalfEdgeStatus::Paired);
                prop_assert_eq!(st.head_status()[h as usize], HalfEdgeStatus::Paired);
            }
        }
        prop_assert_eq!(st.level_sizes()[0], 1);
        let out = st.outcome().unwrap();
        prop_assert_eq!(st.level_sizes().len() as u32, out.depth() + 1);
        match out {
            ExplorationOutcome::Died { depth } => prop_assert_eq!(st.level_sizes()[depth as usize], 0),
            ExplorationOutcome::Expanded { depth } => prop_assert!(st.level_sizes()[depth as usize] >= omega),
            _ => {}
        }
    }

    #[test]
    fn resumed_exploration_keeps_prior_pairings(seq in sequence(), seed in any::<u64>()) {
        prop_assume!(seq.m() >= 2);
        let mut rng = stream(seed);
        let m = seq.m() as u32;
        let first = lazy_explore(&seq, rng.random_range(0..m), Direction::Out, &StopRule::new(2, 4), &mut rng, None).unwrap();
        let prior: Vec<(u32, u32)> = first.pairs();
        let start = rng.random_range(0..m);
        match lazy_explore(&seq, start, Direction::In, &StopRule::new(3, 4), &mut rng, Some(&first)) {
            Ok(second) => {
                let now = second.pairs();
                for p in &prior {
                    prop_assert!(now.contains(p));
                }
                // half-edges of vertices touched by the prior are paired or fatal
                for v in 0..seq.n() as u32 {
                    let tails = first.layout().tails(v as usize);
                    let heads = first.layout().heads(v as usize);
                    let touched = tails.clone().any(|t| first.tail_status()[t as usize] != HalfEdgeStatus::Undiscovered)
                        || heads.clone().any(|h| first.head_status()[h as usize] != HalfEdgeStatus::Undiscovered);
                    if touched {
                        for t in tails {
                            prop_assert!(matches!(second.tail_status()[t as usize], HalfEdgeStatus::Paired | HalfEdgeStatus::Fatal));
                        }
                        for h in heads {
                            prop_assert!(matches!(second.head_status()[h as usize], HalfEdgeStatus::Paired | HalfEdgeStatus::Fatal));
                        }
                    }
                }
                // the run that hit a fatal tail paired it and stopped; its owner was touched before
                if let Some(ExplorationOutcome::HitFatal { half_edge, .. }) = second.outcome() {
                    prop_assert_eq!(second.tail_status()[half_edge as usize], HalfEdgeStatus::Paired);
                    let v = first.layout().tail_owner[half_edge as usize] as usize;
                    let touched = first.layout().tails(v).any(|t| first.tail_status()[t as usize] != HalfEdgeStatus::Undiscovered)
                        || first.layout().heads(v).any(|h| first.head_status()[h as usize] != HalfEdgeStatus::Undiscovered);
                    prop_assert!(touched);
                }
            }
            Err(e) => prop_assert!(matches!(
                e,
                GraphGenError::StartAlreadyPaired(s) | GraphGenError::StartInsidePrior(s) if s == start
            )),
        }
    }

    #[test]
    fn path_counts_obey_the_exact_mean_for_one_step(seq in sequence()) {
        // k = 1: each (tail, head) pair is matched with probability 1/m
        prop_assume!(seq.m() >= 1);
        let m = seq.m();
        prop_assert_eq!(
            exact_path_expectation(&[], m, 1, 1, 0, 1).unwrap(),
            num_rational::Ratio::new(1, m as i128)
        );
        let st = stats(&seq).unwrap();
        let b = expected_path_bound(&st, 1, 1, 0, 1, 1).unwrap();
        prop_assert!((b - 1.0 / m as f64).abs() < 1e-12);
    }

    #[test]
    fn path_counts_shrink_with_fewer_intermediates(g in edge_graph()) {
        prop_assume!(g.m() > 0 && g.n() <= 12);
        let tails: Vec<u32> = (g.out_offsets()[0]..g.out_offsets()[1]).collect();
        let last = g.n() - 1;
        let heads: Vec<u32> = (g.in_offsets()[last]..g.in_offsets()[last + 1]).collect();
        let all: Vec<u32> = (1..last as u32).collect();
        let fewer: Vec<u32> = all.iter().copied().filter(|v| v % 2 == 1).collect();
        let a = count_simple_paths(&g, &tails, &heads, &all, 5).unwrap();
        let b = count_simple_paths(&g, &tails, &heads, &fewer, 5).unwrap();
        prop_assert_eq!(a[0], b[0]);
        prop_assert!(a.iter().zip(&b).all(|(x, y)| x >= y));
    }
}

#[test]
fn edgeless_graph_has_zero_diameter() {
    let r = diameter_exact(&Digraph::from_edges(5, &[]));
    assert_eq!((r.diameter, r.argmax, r.finite_pairs), (0, (0, 0), 0));
}
