// SPDX-License-Identifier: Apache-2.0

use planted::graph::connected_components;
use planted::{plant, sample_er, Error, Graph, PlantSpec};
use proptest::prelude::*;

fn spec_strategy() -> impl Strategy<Value = PlantSpec> {
    prop_oneof![
        (2usize..12).prop_map(|k| PlantSpec::Line { k }),
        (1usize..10).prop_map(|k| PlantSpec::Star { k }),
        (1usize..4, 0usize..3).prop_map(|(d, h)| PlantSpec::DaryTree { d, h }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn planting_keeps_base_and_template(
        seed in any::<u64>(),
        lambda in 0.0f64..4.0,
        spec in spec_strategy(),
    ) {
        let n = 60;
        let base = sample_er(n, lambda, seed).unwrap();
        let inst = plant(&base, spec, seed ^ 0xabc).unwrap();
        let truth = inst.truth.as_ref().unwrap();
        prop_assert_eq!(truth.vertices.len(), spec.vertex_count());
        let mut distinct = truth.vertices.clone();
        distinct.sort_unstable();
        distinct.dedup();
        prop_assert_eq!(distinct.len(), truth.vertices.len());
        for (u, v) in base.edges() {
            prop_assert!(inst.graph.has_edge(u, v));
        }
        for &(u, v) in &truth.edges {
            prop_assert!(inst.graph.has_edge(u, v));
        }
        // the template's edges, mapped through the recorded order
        for (a, b) in spec.template_edges() {
            prop_assert!(inst.graph.has_edge(truth.vertices[a], truth.vertices[b]));
        }
        let added: Vec<(usize, usize)> = truth.edges.iter().copied().filter(|&(u, v)| !base.has_edge(u, v)).collect();
        prop_assert_eq!(inst.graph.without_edges(&added), base);
    }

    #[test]
    fn adjacency_is_consistent(seed in any::<u64>(), n in 0usize..200, lambda in 0.0f64..5.0) {
        prop_assume!(lambda <= n as f64);
        let g = sample_er(n, lambda, seed).unwrap();
        let degree_sum: usize = (0..n).map(|v| g.degree(v)).sum();
        prop_assert_eq!(degree_sum, 2 * g.edge_count());
        for (u, v) in g.edges() {
            prop_assert!(u < v);
            prop_assert!(g.neighbors(u).contains(&(v as u32)));
            prop_assert!(g.neighbors(v).contains(&(u as u32)));
        }
        for v in 0..n {
            prop_assert!(g.neighbors(v).windows(2).all(|w| w[0] < w[1]));
        }
        prop_assert_eq!(sample_er(n, lambda, seed).unwrap(), g);
    }

    #[test]
    fn components_partition_the_graph(seed in any::<u64>(), n in 1usize..150, lambda in 0.0f64..3.0) {
        prop_assume!(lambda <= n as f64);
        let g = sample_er(n, lambda, seed).unwrap();
        let comps = connected_components(&g);
        let mut seen = vec![false; n];
        let mut edges = 0;
        for c in &comps {
            for &v in &c.vertices {
                prop_assert!(!seen[v]);
                seen[v] = true;
            }
            let induced = g.edges().filter(|&(u, v)| c.vertices.contains(&u) && c.vertices.contains(&v)).count();
            prop_assert_eq!(induced, c.edge_count);
            prop_assert_eq!(c.acyclic, c.edge_count + 1 == c.vertices.len());
            edges += c.edge_count;
        }
        prop_assert!(seen.iter().all(|&s| s));
        prop_assert_eq!(edges, g.edge_count());
    }
}

#[test]
fn er_pair_frequencies() {
    let (n, lambda, seeds) = (1000usize, 3.0, 1000u64);
    let p = lambda / n as f64;
    let mut degree_hits = vec![0u64; n];
    let mut total = 0u64;
    let watched = [(0, 1), (0, 999), (17, 400), (500, 501), (998, 999)];
    let mut watched_hits = [0u64; 5];
    for seed in 0..seeds {
        let g = sample_er(n, lambda, seed).unwrap();
        total += g.edge_count() as u64;
        for v in 0..n {
            degree_hits[v] += g.degree(v) as u64;
        }
        for (i, &(u, v)) in watched.iter().enumerate() {
            watched_hits[i] += u64::from(g.has_edge(u, v));
        }
    }
    let pairs = (n * (n - 1) / 2) as f64 * seeds as f64;
    let sd = (pairs * p * (1.0 - p)).sqrt();
    assert!((total as f64 - pairs * p).abs() <= 5.0 * sd, "total {total}");
    // each vertex sees n - 1 pairs per sample
    let trials = (n - 1) as f64 * seeds as f64;
    let sd = (trials * p * (1.0 - p)).sqrt();
    for (v, &hits) in degree_hits.iter().enumerate() {
        assert!((hits as f64 - trials * p).abs() <= 5.0 * sd, "vertex {v}: {hits}");
    }
    let sd = (seeds as f64 * p * (1.0 - p)).sqrt();
    for (i, &hits) in watched_hits.iter().enumerate() {
        assert!((hits as f64 - seeds as f64 * p).abs() <= 5.0 * sd, "pair {:?}: {hits}", watched[i]);
    }
}

#[test]
fn er_edge_count_at_scale() {
    let (n, lambda) = (100_000usize, 2.0);
    let p = lambda / n as f64;
    let pairs = (n * (n - 1) / 2) as f64;
    let (mean, sd) = (pairs * p, (pairs * p * (1.0 - p)).sqrt());
    let counts: Vec<f64> = (0..100).map(|s| sample_er(n, lambda, s).unwrap().edge_count() as f64).collect();
    for &c in &counts {
        assert!((c - mean).abs() <= 5.0 * sd, "{c}");
    }
    let avg = counts.iter().sum::<f64>() / counts.len() as f64;
    assert!((avg - mean).abs() <= 4.0 * sd / 10.0, "{avg}");
}

#[test]
fn er_parameter_errors() {
    assert!(matches!(sample_er(10, 20.0, 1), Err(Error::InvalidProbability { .. })));
    assert!(matches!(sample_er(10, -1.0, 1), Err(Error::InvalidParameter(_))));
    assert_eq!(sample_er(5, 0.0, 1).unwrap().edge_count(), 0);
    assert_eq!(sample_er(4, 4.0, 1).unwrap(), Graph::complete(4));
}

#[test]
fn plant_examples() {
    let inst = plant(&Graph::empty(8), PlantSpec::DaryTree { d: 2, h: 2 }, 11).unwrap();
    let mut degrees: Vec<usize> = (0..8).map(|v| inst.graph.degree(v)).collect();
    degrees.sort_unstable();
    assert_eq!(degrees, vec![0, 1, 1, 1, 1, 2, 3, 3]);
    let inst = plant(&Graph::complete(4), PlantSpec::Star { k: 3 }, 2).unwrap();
    assert_eq!(inst.graph, Graph::complete(4));
    assert_eq!(inst.truth.unwrap().vertices.len(), 4);
    assert!(plant(&Graph::empty(3), PlantSpec::Line { k: 4 }, 0).is_err());
}
