use plci_core::experiment::{bench_graph, bench_program, query_pairs, run_bench, BenchConfig};
use plci_core::{GroundAtom, GroundingOptions, Instance};

#[test]
fn edge_count_matches_binomial_mean() {
    let total: usize = (0..1000).map(|seed| bench_graph(seed, 25, 0).len()).sum();
    let mean = total as f64 / 1000.0;
    assert!((mean - 60.0).abs() <= 3.0, "mean edge count {mean}");
}

#[test]
fn graphs_are_forward_and_reproducible() {
    assert!(bench_graph(3, 1, 0).is_empty());
    for g in 0..20 {
        let edges = bench_graph(3, 4, g);
        assert!(edges.iter().all(|&(i, j)| i < j && j <= 4));
        assert_eq!(edges, bench_graph(3, 4, g));
    }
}

#[test]
fn pairs_are_distinct_even_numbers() {
    for size in [4, 5, 30, 100] {
        for (a, b) in query_pairs(11, size, 10) {
            assert!(a != b && a % 2 == 0 && b % 2 == 0 && a <= size && b <= size);
        }
    }
    assert!(query_pairs(11, 3, 10).is_empty());
}

#[test]
fn ground_graph_mirrors_edges() {
    let (program, db) = bench_program(3, &[(1, 2)]).unwrap();
    let inst = Instance::new(&program, &db, GroundingOptions::default()).unwrap();
    let p = |i: u64| GroundAtom::new("p", [i]);
    assert_eq!(inst.graph().len(), 3);
    assert_eq!(inst.graph().edge_count(), 1);
    assert!(inst.graph().parents(&p(2)).contains(&p(1)));
    assert!(inst.graph().parents(&p(3)).is_empty());
    assert!(inst.fact_defined().iter().all(|&f| f));
}

#[test]
fn one_size_gives_a_hundred_records() {
    let cfg = BenchConfig {
        sizes: vec![5],
        ..BenchConfig::default()
    };
    assert_eq!(run_bench(&cfg).unwrap().len(), 100);
}
