mod common;

use std::fs::File;
use std::io::BufReader;

use common::*;
use ksets_core::io::read_edge_list;
use ksets_core::{
    cohesion_matrix, cohesion_sets, geodesic_distance, graph_cohesion, is_cluster, modularity,
    run_hierarchical, run_hierarchical_forced, CohesionMatrix, Graph, MergePolicy, Partition,
    SquareMatrix,
};
use proptest::prelude::*;

fn karate() -> Graph {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/karate.edges");
    read_edge_list(BufReader::new(File::open(path).unwrap()), None)
        .unwrap()
        .graph
}

/// Replays the events and checks Q after each natural merge against the
/// point-level oracle.
fn q_trace(g: &CohesionMatrix, tree: &ksets_core::MergeTree) -> Vec<f64> {
    let n = g.n();
    let mut sets: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
    let q = |sets: &[(usize, Vec<usize>)]| -> f64 {
        sets.iter()
            .map(|(_, s)| {
                s.iter()
                    .flat_map(|&x| s.iter().map(move |&y| g.get(x, y)))
                    .sum::<f64>()
            })
            .sum()
    };
    let mut out = vec![q(&sets)];
    for e in tree.natural_events() {
        let a = sets.iter().position(|s| s.0 == e.left).unwrap();
        let mut left = sets.remove(a);
        let b = sets.iter().position(|s| s.0 == e.right).unwrap();
        let right = sets.remove(b);
        left.1.extend(right.1);
        sets.push((e.merged, left.1));
        out.push(q(&sets));
    }
    out
}

#[test]
fn line4_golden() {
    let g = cohesion_matrix(&line4());
    let tree = run_hierarchical(&g, MergePolicy::GreedyMax);
    assert_eq!(tree.events.len(), 1);
    let e = &tree.events[0];
    assert_eq!((e.left, e.right, e.merged), (0, 1, 4));
    assert!((e.cohesion - 0.375).abs() < 1e-12);
    let q = modularity(&g, &tree.partition()).unwrap();
    assert!((q - 7.25).abs() < 1e-9);
    let text = tree.to_text();
    assert!(text.starts_with("merge 0 1 -> 4 gamma=0.375\n"), "{text}");
    assert!(text.contains("final 4: 0 1"));
}

#[test]
fn modularity_examples() {
    let g = cohesion_matrix(&line4());
    let p = Partition::from_index_sets(4, &[&[0, 1], &[2, 3]]).unwrap();
    assert!((modularity(&g, &p).unwrap() - 7.0).abs() < 1e-12);
    let p = Partition::from_index_sets(4, &[&[0, 1, 2, 3]]).unwrap();
    assert!(modularity(&g, &p).unwrap().abs() < 1e-12);
    let p = Partition::from_index_sets(3, &[&[0, 1, 2]]).unwrap();
    assert!(modularity(&g, &p).is_err());
}

#[test]
fn uniform_metric_never_merges() {
    let m = SquareMatrix::from_fn(3, |i, j| if i == j { 0.0 } else { 2.0 });
    let g = cohesion_matrix(&ksets_core::DistanceMatrix::metric(m).unwrap());
    let tree = run_hierarchical(&g, MergePolicy::GreedyMax);
    assert!(tree.events.is_empty());
    assert_eq!(tree.final_sets.len(), 3);
}

#[test]
fn greedy_matches_naive_oracle() {
    for seed in 0..60u64 {
        let n = 2 + seed as usize % 24;
        let g = cohesion_matrix(&pool_metric(seed, n));
        let tree = run_hierarchical(&g, MergePolicy::GreedyMax);
        let (events, finals) = hierarchical_oracle(g.matrix());
        assert_eq!(tree.events.len(), events.len(), "seed {seed}");
        for (e, o) in tree.events.iter().zip(&events) {
            assert_eq!((e.left, e.right, e.merged), (o.0, o.1, o.2), "seed {seed}");
            assert!(close(e.cohesion, o.3, g.max_abs() * (n * n) as f64));
        }
        let mut got: Vec<(usize, Vec<usize>)> = tree
            .final_sets
            .iter()
            .map(|(id, s)| (*id, s.members().to_vec()))
            .collect();
        let mut want = finals;
        got.sort();
        want.sort();
        assert_eq!(got, want, "seed {seed}");
    }
}

fn check_merge_run(g: &CohesionMatrix, policy: MergePolicy) -> Result<(), TestCaseError> {
    let n = g.n();
    let tree = run_hierarchical(g, policy);
    let tol = TOL * g.max_abs().max(1.0) * (n * n) as f64;
    for (_, s) in &tree.final_sets {
        prop_assert!(is_cluster(g, s).unwrap());
    }
    for e in tree.natural_events() {
        prop_assert!(e.cohesion > 0.0);
    }
    // stopped because no cohesive pair is left
    for (i, (_, a)) in tree.final_sets.iter().enumerate() {
        for (_, b) in &tree.final_sets[i + 1..] {
            prop_assert!(cohesion_sets(g, a, b).unwrap() <= tol);
        }
    }
    let trace = q_trace(g, &tree);
    for w in trace.windows(2) {
        prop_assert!(w[1] >= w[0] - tol);
    }
    let q = modularity(g, &tree.partition()).unwrap();
    prop_assert!(close(
        q,
        *trace.last().unwrap(),
        g.max_abs() * (n * n) as f64
    ));
    Ok(())
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn merge_run_greedy(seed in any::<u64>(), n in 1usize..30) {
        check_merge_run(&cohesion_matrix(&pool_metric(seed, n)), MergePolicy::GreedyMax)?;
    }

    #[test]
    fn merge_run_first_found(seed in any::<u64>(), n in 1usize..30) {
        check_merge_run(&cohesion_matrix(&pool_metric(seed, n)), MergePolicy::FirstFound)?;
    }

    #[test]
    fn merge_run_graph_cohesion(seed in any::<u64>(), n in 2usize..25) {
        let mut rng = TestRng::new(seed);
        let extra = rng.below(2 * n);
        let graph = random_connected_graph(n, extra, &mut rng);
        check_merge_run(&graph_cohesion(&graph.adjacency_matrix()).unwrap(), MergePolicy::GreedyMax)?;
    }

    #[test]
    fn forced_merges_reduce_set_count(seed in any::<u64>(), n in 2usize..20, extra in 0usize..4) {
        let g = cohesion_matrix(&pool_metric(seed, n));
        let tree = run_hierarchical_forced(&g, MergePolicy::GreedyMax, extra);
        let k = tree.final_sets.len();
        prop_assert_eq!(tree.forced_sets.len(), k - extra.min(k - 1));
        prop_assert_eq!(tree.forced_events().count(), extra.min(k - 1));
        let covered: usize = tree.forced_sets.iter().map(|(_, s)| s.len()).sum();
        prop_assert_eq!(covered, n);
    }
}

#[test]
fn karate_greedy_run_properties() {
    let graph = karate();
    assert_eq!((graph.n(), graph.edge_count()), (34, 78));
    let d = geodesic_distance(&graph).unwrap();
    assert_eq!(d.get(0, 33), 2.0);
    let g = cohesion_matrix(&d);
    let tree = run_hierarchical_forced(&g, MergePolicy::GreedyMax, 1);
    for (_, s) in &tree.final_sets {
        assert!(is_cluster(&g, s).unwrap());
    }
    // three incohesive sets: instructor's, administrator's, and node 8 alone
    assert_eq!(tree.final_sets.len(), 3);
    let p = tree.partition();
    assert_ne!(p.label_of(0), p.label_of(33));
    assert_eq!(p.sets()[p.label_of(8)].members(), &[8]);
    let forced: Vec<_> = tree.forced_events().collect();
    assert_eq!(forced.len(), 1);
    assert!(forced[0].cohesion <= 0.0);
    let fp = tree.forced_partition();
    assert_eq!(fp.k(), 2);
    assert_eq!(fp.label_of(8), fp.label_of(0));
}
