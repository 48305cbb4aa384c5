mod common;

use std::collections::BTreeSet;

use common::{atom, storage, storage_params, trimmed_storage};
use num_rational::BigRational;
use plci_core::dsep::{d_connected, d_separated_sets};
use plci_core::fragment::{is_positive, is_singly_connected, sources_are_facts};
use plci_core::logic::check_constraints;
use plci_core::oracle::DEFAULT_GUARD;
use plci_core::syntax::{parse_database, parse_query};
use plci_core::{Deadline, Error, GroundingOptions, Instance, Oracle};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn ground_variables_under_sort_pruning() {
    let inst = storage();
    let vars = inst.ground_variables();
    assert_eq!(vars.len(), 27);
    let count = |p: &str| vars.iter().filter(|a| &*a.predicate == p).count();
    assert_eq!(count("opens"), 10);
    assert_eq!(count("leaks"), 5);
    assert_eq!(count("smokes"), 8);
    assert_eq!(count("fire"), 4);
}

#[test]
fn opens_to_leaks_edges() {
    let inst = storage();
    let g = inst.graph();
    let n = g
        .edges()
        .keys()
        .filter(|(a, b)| &*g.atom(*a).predicate == "opens" && &*g.atom(*b).predicate == "leaks")
        .count();
    assert_eq!(n, 10);
    for e in ["john", "mary"] {
        for t in 1..=5 {
            let from = g.node(&atom(&format!("opens({e},t{t})"))).unwrap();
            let to = g.node(&atom(&format!("leaks(t{t})"))).unwrap();
            assert!(g.dag().has_edge(from, to));
        }
    }
}

#[test]
fn fire_parents() {
    let inst = storage();
    let expected: BTreeSet<_> = ["smokes(john,r4)", "smokes(mary,r4)", "leaks(t5)"]
        .iter()
        .map(|s| atom(s))
        .collect();
    assert_eq!(inst.graph().parents(&atom("fire(r4)")), expected);
    let r1 = inst.graph().parents(&atom("fire(r1)"));
    assert!(r1.contains(&atom("leaks(t2)")));
    assert!(!r1.contains(&atom("leaks(t3)")));
}

#[test]
fn error_terms_and_equations() {
    let inst = storage();
    let eqs = inst.equations(&storage_params(inst.program())).unwrap();
    let per_clause = |c: u32| eqs.error_terms.iter().filter(|u| u.clause.0 == c).count();
    assert_eq!(per_clause(1), 10);
    assert_eq!(per_clause(2), 10);
    assert_eq!(per_clause(3), 8);
    assert_eq!(per_clause(4), 14);
    assert_eq!(eqs.error_terms.len(), 42);

    let leaks = eqs.var(&atom("leaks(t1)")).unwrap();
    let eq = eqs.equations.iter().find(|e| e.target == leaks).unwrap();
    assert_eq!(eq.disjuncts.len(), 2);
    for d in &eq.disjuncts {
        assert_eq!(d.lits.len(), 1);
        assert_eq!(eqs.error_terms[d.u].probability, q(1, 10));
    }
}

#[test]
fn solving_a_single_leak() {
    let inst = storage();
    let eqs = inst.equations(&storage_params(inst.program())).unwrap();
    let mut u = vec![false; eqs.error_terms.len()];
    for (i, term) in eqs.error_terms.iter().enumerate() {
        let john_t1 = term.subst.iter().any(|(_, c)| c.as_str() == "john")
            && term.subst.iter().any(|(_, c)| c.as_str() == "t1");
        if term.clause.0 <= 2 && john_t1 {
            u[i] = true;
        }
    }
    let x = eqs.solve(&u);
    assert!(x[eqs.var(&atom("opens(john,t1)")).unwrap()]);
    assert!(x[eqs.var(&atom("leaks(t1)")).unwrap()]);
    for (i, v) in eqs.vars.iter().enumerate() {
        if &*v.predicate == "fire" {
            assert!(!x[i], "{v}");
        }
    }
}

#[test]
fn layered_order() {
    let inst = storage();
    let order = inst.topological_order().unwrap();
    assert_eq!(order.len(), 27);
    let rank = |p: &str| -> Vec<usize> {
        order
            .iter()
            .enumerate()
            .filter(|(_, &v)| &*inst.graph().atom(v).predicate == p)
            .map(|(i, _)| i)
            .collect()
    };
    let (opens, leaks, fire) = (rank("opens"), rank("leaks"), rank("fire"));
    assert!(opens.iter().max() < leaks.iter().min());
    assert!(leaks.iter().max() < fire.iter().min());
}

#[test]
fn dot_has_one_line_per_node_and_edge() {
    let inst = storage();
    let dot = inst.graph().emit_dot();
    let edges = dot.lines().filter(|l| l.contains("->")).count();
    let nodes = dot
        .lines()
        .filter(|l| l.trim_end().ends_with("\";"))
        .count();
    assert_eq!(nodes, 27);
    assert_eq!(edges, inst.graph().edges().len());
}

#[test]
fn constraints_hold_and_violations_are_rejected() {
    let inst = storage();
    assert!(check_constraints(inst.model(), inst.program()).ok);

    let program = inst.program().clone();
    let mut text = common::fixture("storage.db");
    text.push_str("stores(t1,water).\n");
    let db = parse_database(&text, &program).unwrap();
    let err = Instance::new(&program, &db, GroundingOptions::default()).unwrap_err();
    assert!(matches!(err, Error::ConstraintViolation { .. }), "{err}");
}

#[test]
fn dsep_queries() {
    let inst = storage();
    let deadline = Deadline::none();
    let query = |text: &str| {
        let q = parse_query(text, inst.program()).unwrap();
        let (x, y, z) = inst.query_nodes(&q).unwrap();
        d_connected(inst.dag(), x, y, &inst.observe(&z), &deadline).unwrap()
    };
    assert!(query("indep(smokes(john,r1), opens(mary,t2), [])").separated);
    let v = query("indep(smokes(john,r1), opens(mary,t2), [fire(r1)])");
    assert!(!v.separated);
    let w = v.witness.unwrap();
    assert_eq!(
        w.render(inst.dag()),
        "smokes(john,r1) -> fire(r1) <- leaks(t2) <- opens(mary,t2)"
    );

    let node = |s: &str| inst.node(&atom(s)).unwrap();
    let obs = inst.observe(&[node("fire(r1)")]);
    assert!(obs.is_activated(node("opens(john,t2)")));

    let a = [node("smokes(john,r1)")];
    let b = [node("opens(mary,t1)"), node("opens(mary,t2)")];
    assert!(d_separated_sets(inst.dag(), &a, &b, &inst.observe(&[]), &deadline).unwrap());
}

#[test]
fn fragment_membership() {
    let inst = storage();
    assert!(is_positive(inst.program()).is_ok());
    assert!(sources_are_facts(&inst).is_ok());
    let cycle = is_singly_connected(inst.dag()).unwrap_err();
    assert_eq!(cycle.first(), cycle.last());
    assert!(cycle.len() >= 4);
}

#[test]
fn trimmed_storage_probabilities() {
    let one = trimmed_storage(&["john"]);
    let params = storage_params(one.program());
    let o = Oracle::for_instance(&one, &params, DEFAULT_GUARD, &Deadline::none()).unwrap();
    let leaks = one.node(&atom("leaks(t1)")).unwrap();
    assert_eq!(o.probability(leaks), q(2, 25));

    let both = trimmed_storage(&["john", "mary"]);
    let o = Oracle::for_instance(&both, &params, DEFAULT_GUARD, &Deadline::none()).unwrap();
    let leaks = both.node(&atom("leaks(t1)")).unwrap();
    assert_eq!(o.probability(leaks), q(96, 625));
    assert_eq!(o.joint(&[leaks]).unwrap().total(), q(1, 1));

    let smokes = both.node(&atom("smokes(john,r1)")).unwrap();
    let opens = both.node(&atom("opens(mary,t1)")).unwrap();
    let fire = both.node(&atom("fire(r1)")).unwrap();
    assert!(o.ci_check(smokes, opens, &[]).unwrap().independent);
    assert!(!o.ci_check(smokes, opens, &[fire]).unwrap().independent);
}

#[test]
fn full_storage_exceeds_the_default_guard() {
    let inst = storage();
    let err = Oracle::for_instance(
        &inst,
        &storage_params(inst.program()),
        DEFAULT_GUARD,
        &Deadline::none(),
    )
    .unwrap_err();
    assert!(
        matches!(err, Error::GuardExceeded { required: 42, .. }),
        "{err}"
    );
}
