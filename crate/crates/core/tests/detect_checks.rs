// SPDX-License-Identifier: Apache-2.0

use planted::detect::{
    component_count_test, dary_height_messages, dary_test, k_path_test, longest_path, star_test, Decision,
    DEFAULT_PATH_BUDGET,
};
use planted::oracle::{count_copies, Budget};
use planted::rng::rng_from_seed;
use planted::{sample_er, Graph, PlantSpec};
use proptest::prelude::*;
use rand::Rng;

/// Longest simple path by exhaustive search from every vertex.
fn brute_longest(g: &Graph) -> usize {
    fn rec(g: &Graph, u: usize, on: &mut [bool], len: usize, best: &mut usize) {
        *best = (*best).max(len);
        for &w in g.neighbors(u) {
            let w = w as usize;
            if !on[w] {
                on[w] = true;
                rec(g, w, on, len + 1, best);
                on[w] = false;
            }
        }
    }
    let mut best = 0;
    let mut on = vec![false; g.n()];
    for s in 0..g.n() {
        on[s] = true;
        rec(g, s, &mut on, 1, &mut best);
        on[s] = false;
    }
    best
}

fn random_forest(rng: &mut impl Rng, n: usize, keep: f64) -> Graph {
    let edges: Vec<(usize, usize)> = (1..n)
        .filter_map(|v| {
            let parent = rng.random_range(0..v);
            rng.random_bool(keep).then_some((parent, v))
        })
        .collect();
    Graph::from_edges(n, edges).unwrap()
}

fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

fn is_simple_path(g: &Graph, p: &[usize]) -> bool {
    let mut s = p.to_vec();
    s.sort_unstable();
    s.dedup();
    s.len() == p.len() && p.windows(2).all(|w| g.has_edge(w[0], w[1]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn longest_path_on_trees_is_exact(seed in any::<u64>(), n in 1usize..=12) {
        let mut rng = rng_from_seed(seed);
        let g = random_forest(&mut rng, n, 0.9);
        let lp = longest_path(&g, DEFAULT_PATH_BUDGET);
        prop_assert!(lp.exact);
        prop_assert_eq!(lp.length, brute_longest(&g));
        prop_assert!(is_simple_path(&g, &lp.path));
    }

    #[test]
    fn longest_path_on_small_graphs(seed in any::<u64>(), n in 1usize..=10, p in 0.05f64..0.6) {
        let mut rng = rng_from_seed(seed);
        let g = random_graph(&mut rng, n, p);
        let lp = longest_path(&g, DEFAULT_PATH_BUDGET);
        prop_assert!(lp.exact);
        prop_assert_eq!(lp.length, brute_longest(&g));
        prop_assert_eq!(lp.path.len(), lp.length);
        prop_assert!(is_simple_path(&g, &lp.path));
    }

    #[test]
    fn component_counts_fit_in_n(seed in any::<u64>(), n in 1usize..300, lambda in 0.0f64..3.0, k in 1usize..50) {
        prop_assume!(lambda <= n as f64);
        let g = sample_er(n, lambda, seed).unwrap();
        let r = component_count_test(&g, k).unwrap();
        let (a1, a2, a3) = (r.stat("A1").unwrap(), r.stat("A2").unwrap(), r.stat("A3").unwrap());
        prop_assert!(a1 + 2.0 * a2 + 3.0 * a3 <= n as f64);
        let k_hat = r.stat("k_hat").unwrap();
        prop_assert_eq!(r.decision == Decision::H1, k_hat >= r.stat("threshold").unwrap());
    }

    #[test]
    fn star_test_ignores_labels(seed in any::<u64>(), k in 1usize..8) {
        let g = sample_er(80, 3.0, seed).unwrap();
        let mut perm: Vec<usize> = (0..80).collect();
        let mut rng = rng_from_seed(seed ^ 1);
        for i in (1..80).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let a = star_test(&g, k).unwrap();
        let b = star_test(&g.relabel(&perm).unwrap(), k).unwrap();
        prop_assert_eq!(a.decision, b.decision);
        prop_assert_eq!(a.stat("max_degree"), b.stat("max_degree"));
    }

    #[test]
    fn dary_heights_grow_with_rounds(seed in any::<u64>(), d in 1usize..4, h in 0usize..5) {
        let g = sample_er(60, 3.0, seed).unwrap();
        let a = dary_height_messages(&g, d, h).unwrap();
        let b = dary_height_messages(&g, d, h + 1).unwrap();
        prop_assert!(a.heights.iter().zip(&b.heights).all(|(x, y)| y >= x));
    }
}

/// Message-passing heights against the embedding oracle on 500 small
/// graphs whose relevant neighborhoods are acyclic.
#[test]
fn dary_messages_match_oracle() {
    let mut rng = rng_from_seed(2024);
    let mut checked = 0;
    let mut attempts = 0;
    while checked < 500 {
        attempts += 1;
        assert!(attempts < 100_000);
        let n = rng.random_range(2..=10);
        let d = rng.random_range(1..=3);
        let h_max = rng.random_range(1..=3);
        let g = if attempts % 2 == 0 {
            random_forest(&mut rng, n, 0.85)
        } else {
            random_graph(&mut rng, n, 0.25)
        };
        let r = dary_height_messages(&g, d, h_max).unwrap();
        if !r.exact {
            continue;
        }
        let max_height = r.heights.iter().copied().max().unwrap_or(0) as usize;
        for h in 0..=h_max {
            let spec = PlantSpec::DaryTree { d, h };
            let present = count_copies(&g, spec, &mut Budget::default()).unwrap().copies > 0;
            assert_eq!(max_height >= h, present, "n={n} D={d} h={h} edges={:?}", g.edges().collect::<Vec<_>>());
        }
        checked += 1;
    }
}

#[test]
fn detector_examples() {
    let star5 = PlantSpec::Star { k: 5 }.template();
    let r = star_test(&star5, 5).unwrap();
    assert_eq!((r.decision, r.stat("max_degree")), (Decision::H1, Some(5.0)));
    let r = star_test(&Graph::path(10, 10), 3).unwrap();
    assert_eq!((r.decision, r.stat("max_degree")), (Decision::H0, Some(2.0)));

    let r = component_count_test(&Graph::empty(50), 4).unwrap();
    assert_eq!(r.decision, Decision::H0);
    assert_eq!(r.stat("fallback"), Some(1.0));
    let one_edge = Graph::from_edges(100, [(0, 1)]).unwrap();
    let r = component_count_test(&one_edge, 10).unwrap();
    assert_eq!((r.stat("A1"), r.stat("A2"), r.stat("k_hat")), (Some(98.0), Some(1.0), Some(2.0)));
    assert_eq!(r.decision, Decision::H0);

    assert_eq!(k_path_test(&Graph::path(9, 9), 9).unwrap().decision, Decision::H1);
    assert_eq!(dary_test(&Graph::empty(4), 2, 1).unwrap().decision, Decision::H0);
}

#[test]
fn detectors_are_deterministic() {
    let g = sample_er(5000, 1.5, 8).unwrap();
    assert_eq!(k_path_test(&g, 20).unwrap(), k_path_test(&g, 20).unwrap());
    assert_eq!(component_count_test(&g, 20).unwrap(), component_count_test(&g, 20).unwrap());
    assert_eq!(dary_test(&g, 2, 3).unwrap(), dary_test(&g, 2, 3).unwrap());
}
