//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use plci_core::dsep::{d_connected, naive_d_connected, ObservationSet};
use plci_core::experiment::{run_bench, summarize, BenchConfig, Mode};
use plci_core::oracle::{sweep, DEFAULT_GUARD, DEFAULT_MAX_Z};
use plci_core::synth::{random_dag, random_instance, Polarity};
use plci_core::{Deadline, FragmentReport, Oracle, ParameterAssignment};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{atom, fixture, instance, storage, storage_params, trimmed_storage};

type Outcome = Result<String, String>;

fn within(start: Instant, limit: Duration, detail: String) -> Outcome {
    let took = start.elapsed();
    if took <= limit {
        Ok(format!("{detail}, {took:.2?}"))
    } else {
        Err(format!("{detail}, took {took:.2?} (limit {limit:?})"))
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden_storage() -> Outcome {
    let start = Instant::now();
    let inst = storage();
    let g = inst.graph();
    check(g.len() == 27, || format!("{} ground variables", g.len()))?;
    let opens_leaks = g
        .edges()
        .keys()
        .filter(|(a, b)| &*g.atom(*a).predicate == "opens" && &*g.atom(*b).predicate == "leaks")
        .count();
    check(opens_leaks == 10, || {
        format!("{opens_leaks} opens->leaks edges")
    })?;
    let expected: BTreeSet<_> = ["smokes(john,r4)", "smokes(mary,r4)", "leaks(t5)"]
        .iter()
        .map(|s| atom(s))
        .collect();
    let parents = g.parents(&atom("fire(r4)"));
    check(parents == expected, || {
        format!("fire(r4) parents {parents:?}")
    })?;
    within(
        start,
        Duration::from_secs(1),
        "27 variables, 10 opens->leaks edges, fire(r4) parents exact".into(),
    )
}

fn sprinkler() -> Outcome {
    let inst = instance(&fixture("sprinkler.plp"), "");
    let start = Instant::now();
    let dag = inst.dag();
    let id = |s: &str| inst.node(&atom(s)).unwrap();
    let ask = |obs: &[&str]| {
        let obs: Vec<usize> = obs.iter().map(|s| id(s)).collect();
        d_connected(
            dag,
            id("season"),
            id("sprinkler"),
            &ObservationSet::new(dag, &obs),
            &Deadline::none(),
        )
        .unwrap()
    };
    let v = ask(&["slippery"]);
    let witness = v
        .witness
        .as_ref()
        .map(|w| w.render(dag))
        .unwrap_or_default();
    check(!v.separated, || {
        "season, sprinkler separated given slippery".into()
    })?;
    check(witness == "season -> rain -> wet <- sprinkler", || {
        format!("witness {witness}")
    })?;
    check(ask(&[]).separated, || "connected given {}".into())?;
    check(ask(&["slippery", "rain"]).separated, || {
        "connected given slippery, rain".into()
    })?;
    within(
        start,
        Duration::from_millis(10),
        format!("witness {witness}"),
    )
}

fn subsets_up_to(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize <= k)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

fn dsep_equivalence() -> Outcome {
    let start = Instant::now();
    let mut queries = 0u64;
    for g in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(g);
        let n = rng.random_range(2..=9);
        let density = rng.random_range(0.15..0.6);
        let dag = random_dag(n, density, &mut rng);
        for obs in subsets_up_to(n, 3) {
            let set = ObservationSet::new(&dag, &obs);
            for x in 0..n {
                for y in 0..n {
                    if x == y {
                        continue;
                    }
                    queries += 1;
                    let fast = !d_connected(&dag, x, y, &set, &Deadline::none())
                        .unwrap()
                        .separated;
                    let slow = naive_d_connected(&dag, x, y, &obs, 14).unwrap();
                    check(fast == slow, || {
                        format!("graph {g}: {x} vs {y} given {obs:?}")
                    })?;
                }
            }
        }
    }
    within(
        start,
        Duration::from_secs(120),
        format!("200 graphs, {queries} queries, 0 mismatches"),
    )
}

fn soundness_instances() -> Vec<plci_core::synth::SynthInstance> {
    (0..50)
        .map(|i| random_instance(1000 + i, Polarity::Mixed, 16))
        .collect()
}

fn soundness() -> Outcome {
    let start = Instant::now();
    let mut triples = 0;
    for (i, s) in soundness_instances().iter().enumerate() {
        let o = Oracle::for_instance(&s.instance, &s.params, DEFAULT_GUARD, &Deadline::none())
            .map_err(|e| format!("instance {i}: {e}"))?;
        let r = sweep(s.instance.dag(), &o, DEFAULT_MAX_Z, &Deadline::none())
            .map_err(|e| e.to_string())?;
        triples += r.triples;
        check(r.unsound.is_empty(), || {
            format!(
                "instance {i}: {} unsound, first {}",
                r.unsound.len(),
                r.unsound[0].render(o.vars())
            )
        })?;
    }
    within(
        start,
        Duration::from_secs(300),
        format!("50 instances, {triples} triples, 0 violations"),
    )
}

fn completeness() -> Outcome {
    let start = Instant::now();
    let mut certified = 0;
    let mut triples = 0;
    let mut seed = 5000;
    while certified < 50 {
        seed += 1;
        check(seed < 50_000, || {
            format!("only {certified} certified instances found")
        })?;
        let s = random_instance(seed, Polarity::Positive, 16);
        let report = FragmentReport::check(&s.instance, &s.params);
        if !report.complete_oracle() {
            continue;
        }
        let o = Oracle::for_instance(&s.instance, &s.params, DEFAULT_GUARD, &Deadline::none())
            .map_err(|e| e.to_string())?;
        if !o.improper().is_empty() {
            continue;
        }
        certified += 1;
        let r = sweep(s.instance.dag(), &o, DEFAULT_MAX_Z, &Deadline::none())
            .map_err(|e| e.to_string())?;
        triples += r.triples;
        check(r.unfaithful.is_empty() && r.unsound.is_empty(), || {
            format!("seed {seed}: {} unfaithful triples", r.unfaithful.len())
        })?;
    }

    let xor = instance(&fixture("xor.plp"), "");
    let params = ParameterAssignment::from_program(xor.program());
    let o = Oracle::for_instance(&xor, &params, DEFAULT_GUARD, &Deadline::none())
        .map_err(|e| e.to_string())?;
    let (a, c) = (xor.node(&atom("a")).unwrap(), xor.node(&atom("c")).unwrap());
    let r = sweep(xor.dag(), &o, 1, &Deadline::none()).map_err(|e| e.to_string())?;
    let marginal = r
        .unfaithful
        .iter()
        .any(|t| t.a.min(t.b) == a.min(c) && t.a.max(t.b) == a.max(c) && t.z.is_empty());
    check(marginal, || {
        "xor program: a, c not reported unfaithful".into()
    })?;
    within(
        start,
        Duration::from_secs(300),
        format!("{certified} certified instances, {triples} triples, 0 violations; xor unfaithful"),
    )
}

fn benchmark_shape() -> Outcome {
    let start = Instant::now();
    let cfg = BenchConfig::default();
    let records = run_bench(&cfg).map_err(|e| e.to_string())?;
    for &size in &cfg.sizes {
        let n = records.iter().filter(|r| r.size == size).count();
        check(n == 100, || format!("S={size}: {n} dsep queries"))?;
    }
    let timeouts = records.iter().filter(|r| r.timeout).count();
    check(timeouts == 0, || format!("{timeouts} dsep timeouts"))?;
    let summary = summarize(&records);
    let mut worst = 0;
    for row in summary.iter().filter(|r| r.size == 100) {
        worst = worst.max(row.median_us);
        check(row.median_us < 50_000, || {
            format!("S=100 {} median {} us", row.regime, row.median_us)
        })?;
    }

    let oracle_cfg = BenchConfig {
        sizes: vec![25],
        mode: Mode::Oracle,
        ..BenchConfig::default()
    };
    let records = run_bench(&oracle_cfg).map_err(|e| e.to_string())?;
    let blocked = records
        .iter()
        .filter(|r| r.verdict == "guard-exceeded" || r.timeout)
        .count();
    check(blocked * 10 >= records.len() * 9, || {
        format!(
            "S=25 oracle: only {blocked}/{} guard-exceeded or timed out",
            records.len()
        )
    })?;
    Ok(format!(
        "all dsep queries answered, S=100 worst median {worst} us; S=25 oracle blocked {blocked}/{}; {:.2?}",
        records.len(),
        start.elapsed()
    ))
}

fn markov() -> Outcome {
    let start = Instant::now();
    let mut nodes = 0;
    for (i, s) in soundness_instances().iter().enumerate() {
        let o = Oracle::for_instance(&s.instance, &s.params, DEFAULT_GUARD, &Deadline::none())
            .map_err(|e| e.to_string())?;
        let v = o
            .markov_violations(s.instance.dag())
            .map_err(|e| e.to_string())?;
        nodes += s.instance.dag().len();
        check(v.is_empty(), || {
            format!("instance {i}: {} violating nodes", v.len())
        })?;
    }
    within(
        start,
        Duration::from_secs(300),
        format!("50 instances, {nodes} nodes, 0 violations"),
    )
}

fn derived_probability() -> Outcome {
    let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let mut terms = Vec::new();
    for (employees, expected) in [
        (&["john"][..], q(2, 25)),
        (&["john", "mary"][..], q(96, 625)),
    ] {
        let inst = trimmed_storage(employees);
        let params = storage_params(inst.program());
        terms.push(inst.error_term_count());
        let o = Oracle::for_instance(&inst, &params, DEFAULT_GUARD, &Deadline::none())
            .map_err(|e| e.to_string())?;
        let p = o.probability(inst.node(&atom("leaks(t1)")).unwrap());
        check(p == expected, || {
            format!("{employees:?}: leaks(t1) = {p}, expected {expected}")
        })?;
    }
    Ok(format!(
        "leaks(t1) = 2/25 with one employee ({} error terms), 96/625 with two ({} error terms)",
        terms[0], terms[1]
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("golden storage instance", golden_storage),
        ("sprinkler regression", sprinkler),
        ("d-separation engine equivalence", dsep_equivalence),
        ("soundness", soundness),
        ("completeness on the fragment", completeness),
        ("benchmark shape", benchmark_shape),
        ("Markov property", markov),
        ("derived probability check", derived_probability),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
