use plci_core::dsep::{d_connected, d_connected_set, naive_d_connected, Dag, ObservationSet};
use plci_core::fragment::is_singly_connected;
use plci_core::synth::random_dag;
use plci_core::Deadline;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dag_strategy(max: usize) -> impl Strategy<Value = Dag> {
    (1..=max, any::<u64>(), 0.1f64..0.7)
        .prop_map(|(n, seed, density)| random_dag(n, density, &mut ChaCha8Rng::seed_from_u64(seed)))
}

fn subset(n: usize, mask: u32) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Counts simple undirected paths between `a` and `b`, stopping at 2.
fn path_count(dag: &Dag, a: usize, b: usize) -> usize {
    fn go(dag: &Dag, cur: usize, b: usize, seen: &mut Vec<bool>, count: &mut usize) {
        if cur == b {
            *count += 1;
            return;
        }
        seen[cur] = true;
        for &next in dag.parents(cur).iter().chain(dag.children(cur)) {
            if !seen[next] && *count < 2 {
                go(dag, next, b, seen, count);
            }
        }
        seen[cur] = false;
    }
    let mut count = 0;
    go(dag, a, b, &mut vec![false; dag.len()], &mut count);
    count
}

#[test]
fn sprinkler_queries() {
    let dag = Dag::from_edges(&[
        ("season", "rain"),
        ("rain", "wet"),
        ("sprinkler", "wet"),
        ("wet", "slippery"),
    ]);
    let id = |s: &str| dag.node(s).unwrap();
    let ask = |obs: &[&str]| {
        let obs: Vec<usize> = obs.iter().map(|s| id(s)).collect();
        d_connected(
            &dag,
            id("season"),
            id("sprinkler"),
            &ObservationSet::new(&dag, &obs),
            &Deadline::none(),
        )
        .unwrap()
    };
    let v = ask(&["slippery"]);
    assert!(!v.separated);
    assert_eq!(
        v.witness.unwrap().tokens(&dag),
        ["season", "->", "rain", "->", "wet", "<-", "sprinkler"]
    );
    assert!(ask(&[]).separated);
    assert!(ask(&["slippery", "rain"]).separated);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reachability_matches_path_enumeration(dag in dag_strategy(10), mask in any::<u32>()) {
        let n = dag.len();
        let obs = subset(n, mask);
        let set = ObservationSet::new(&dag, &obs);
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                let v = d_connected(&dag, x, y, &set, &Deadline::none()).unwrap();
                let naive = naive_d_connected(&dag, x, y, &obs, 14).unwrap();
                prop_assert_eq!(!v.separated, naive, "{} {} {:?}", x, y, obs);
                if let Some(w) = &v.witness {
                    prop_assert!(w.is_valid(&dag, &set));
                    prop_assert_eq!(w.nodes.first(), Some(&x));
                    prop_assert_eq!(w.nodes.last(), Some(&y));
                }
            }
        }
    }

    #[test]
    fn verdicts_are_symmetric(dag in dag_strategy(12), mask in any::<u32>()) {
        let n = dag.len();
        let set = ObservationSet::new(&dag, &subset(n, mask));
        for x in 0..n {
            let from_x = d_connected_set(&dag, x, &set, &Deadline::none()).unwrap();
            for (y, &reached) in from_x.iter().enumerate() {
                if x != y {
                    let back = d_connected(&dag, y, x, &set, &Deadline::none()).unwrap();
                    prop_assert_eq!(reached, !back.separated);
                }
            }
        }
    }

    #[test]
    fn isolated_observations_change_nothing(dag in dag_strategy(9), mask in any::<u32>()) {
        let n = dag.len();
        let mut bigger = dag.clone();
        let lone = bigger.add_node("lone".to_string());
        let obs = subset(n, mask);
        let mut with_lone = obs.clone();
        with_lone.push(lone);
        let a = ObservationSet::new(&dag, &obs);
        let b = ObservationSet::new(&bigger, &with_lone);
        for x in 0..n {
            for y in 0..n {
                if x != y {
                    let va = d_connected(&dag, x, y, &a, &Deadline::none()).unwrap();
                    let vb = d_connected(&bigger, x, y, &b, &Deadline::none()).unwrap();
                    prop_assert_eq!(va.separated, vb.separated);
                }
            }
        }
    }

    #[test]
    fn singly_connected_iff_unique_paths(dag in dag_strategy(12)) {
        let n = dag.len();
        let unique = (0..n).all(|a| (a + 1..n).all(|b| path_count(&dag, a, b) <= 1));
        match is_singly_connected(&dag) {
            Ok(()) => prop_assert!(unique),
            Err(cycle) => {
                prop_assert!(!unique);
                prop_assert_eq!(cycle.first(), cycle.last());
                prop_assert!(cycle.len() >= 4);
                for w in cycle.windows(2) {
                    prop_assert!(dag.has_edge(w[0], w[1]) || dag.has_edge(w[1], w[0]));
                }
            }
        }
    }
}
