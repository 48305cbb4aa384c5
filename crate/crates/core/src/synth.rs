//! Seeded generators of small random graphs and program instances, used by
//! the property and acceptance suites and by the benchmarks.
//!
//! Programs use unary random predicates `r0, r1, ...` over a domain `1..=k`
//! with facts `n/1` and a random forward edge relation `e/2` (`X < Y`), so
//! every ground graph is acyclic. Clause templates:
//!
//! * fact: `r_i(X) :- n(X)`
//! * unary link: `r_i(X) :- r_j(X), n(X)` with `j < i`
//! * edge link: `r_i(Y) :- r_j(X), e(X,Y)` with `j <= i`
//! * two causes: `r_i(X) :- r_j(X), r_l(X), n(X)` with `j, l < i`
//! * either direction: `r_i(Y) :- r_j(X), n(X), n(Y), (e(X,Y); e(Y,X))` with `j < i`
//!
//! Causes are negated at random in [`Polarity::Mixed`] programs. Some
//! programs also get a small stratified internal part (`hub/1`, `leaf/1`)
//! used as an extra condition literal.

use std::fmt::Write as _;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dsep::Dag;
use crate::grounding::{GroundingOptions, Instance};
use crate::syntax::{parse_database, parse_program, ParameterAssignment};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    /// Causes may be negated.
    Mixed,
    /// No negated causes; sources always get a fact clause.
    Positive,
}

/// A generated program with its database, already grounded.
#[derive(Clone, Debug)]
pub struct SynthInstance {
    pub program_text: String,
    pub database_text: String,
    pub instance: Instance,
    pub params: ParameterAssignment,
}

/// Random DAG on `nodes` nodes named `v0, v1, ...`; every pair `i < j` is
/// an edge `vi -> vj` with probability `density`.
pub fn random_dag(nodes: usize, density: f64, rng: &mut impl Rng) -> Dag {
    let mut dag = Dag::new((0..nodes).map(|i| format!("v{i}")));
    for i in 0..nodes {
        for j in i + 1..nodes {
            if rng.random_bool(density) {
                dag.add_edge(i, j);
            }
        }
    }
    dag
}

const PROBS: [&str; 4] = ["1/5", "2/5", "3/5", "4/5"];

fn prob(rng: &mut impl Rng) -> &'static str {
    PROBS[rng.random_range(0..PROBS.len())]
}

fn lit(rng: &mut impl Rng, polarity: Polarity, atom: String) -> String {
    if polarity == Polarity::Mixed && rng.random_bool(0.4) {
        format!("\\+{atom}")
    } else {
        atom
    }
}

fn guard(rng: &mut impl Rng, internal: bool, var: &str) -> String {
    if internal && rng.random_bool(0.3) {
        let p = ["hub", "leaf"].choose(rng).unwrap();
        format!("n({var}), {p}({var})")
    } else {
        format!("n({var})")
    }
}

/// Program and database text for one attempt.
pub fn random_texts(rng: &mut impl Rng, polarity: Polarity) -> (String, String) {
    let k = rng.random_range(2..=3usize);
    let preds = rng.random_range(1..=3usize);
    let internal = rng.random_bool(0.3);

    let mut db = String::new();
    for i in 1..=k {
        write!(db, "n({i}). ").unwrap();
    }
    for j in 2..=k {
        match polarity {
            Polarity::Mixed => {
                for i in 1..j {
                    if rng.random_bool(0.5) {
                        write!(db, "e({i},{j}). ").unwrap();
                    }
                }
            }
            Polarity::Positive => {
                if rng.random_bool(0.6) {
                    let i = rng.random_range(1..j);
                    write!(db, "e({i},{j}). ").unwrap();
                }
            }
        }
    }

    let mut prog = String::from("external n/1.\nexternal e/2.\n");
    for i in 0..preds {
        writeln!(prog, "random r{i}/1.").unwrap();
    }
    for i in 0..preds {
        if polarity == Polarity::Positive || rng.random_bool(0.85) {
            let g = guard(rng, internal, "X");
            writeln!(prog, "{} :: r{i}(X) :- {g}.", prob(rng)).unwrap();
        }
    }
    let links = rng.random_range(0..=3usize);
    for _ in 0..links {
        let i = rng.random_range(0..preds);
        let template = rng.random_range(0..4u8);
        let clause = match template {
            0 if i >= 1 => {
                let j = rng.random_range(0..i);
                let c = lit(rng, polarity, format!("r{j}(X)"));
                let g = guard(rng, internal, "X");
                format!("r{i}(X) :- {c}, {g}")
            }
            2 if i >= 2 => {
                let j = rng.random_range(0..i);
                let mut l = rng.random_range(0..i - 1);
                if l >= j {
                    l += 1;
                }
                let c1 = lit(rng, polarity, format!("r{j}(X)"));
                let c2 = lit(rng, polarity, format!("r{l}(X)"));
                format!("r{i}(X) :- {c1}, {c2}, n(X)")
            }
            3 if i >= 1 => {
                let j = rng.random_range(0..i);
                let c = lit(rng, polarity, format!("r{j}(X)"));
                format!("r{i}(Y) :- {c}, n(X), n(Y), (e(X,Y); e(Y,X))")
            }
            _ => {
                let j = rng.random_range(0..=i);
                let c = lit(rng, polarity, format!("r{j}(X)"));
                format!("r{i}(Y) :- {c}, e(X,Y)")
            }
        };
        writeln!(prog, "{} :: {clause}.", prob(rng)).unwrap();
    }
    if internal {
        prog.push_str("hub(X) :- e(X,Y).\nleaf(X) :- n(X), \\+hub(X).\n");
    }
    (prog, db)
}

/// First attempt, in a fixed sequence derived from `seed`, whose grounding
/// has between 1 and `max_terms` error terms.
pub fn random_instance(seed: u64, polarity: Polarity, max_terms: usize) -> SynthInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let (program_text, database_text) = random_texts(&mut rng, polarity);
        let program = parse_program(&program_text).expect("generated program parses");
        let db = parse_database(&database_text, &program).expect("generated database parses");
        let instance = Instance::new(&program, &db, GroundingOptions::default())
            .expect("generated instance grounds");
        let terms = instance.error_term_count();
        if terms == 0 || terms > max_terms {
            continue;
        }
        assert!(instance.is_acyclic(), "generated program is acyclic");
        let params = ParameterAssignment::from_program(&program);
        return SynthInstance {
            program_text,
            database_text,
            instance,
            params,
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_reproducible_and_bounded() {
        for seed in 0..30 {
            let a = random_instance(seed, Polarity::Mixed, 16);
            let b = random_instance(seed, Polarity::Mixed, 16);
            assert_eq!(a.program_text, b.program_text);
            assert!(a.instance.error_term_count() <= 16);
            assert!(a.params.is_total(a.instance.program()));
        }
    }

    #[test]
    fn positive_instances_have_no_negated_causes() {
        for seed in 0..30 {
            let s = random_instance(seed, Polarity::Positive, 16);
            assert!(s.instance.program().is_positive(), "{}", s.program_text);
        }
    }

    #[test]
    fn random_dags_are_forward() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let dag = random_dag(9, 0.4, &mut rng);
        assert!(dag.edges().all(|(a, b)| a < b));
    }
}
