//! Membership test for the class of instances on which d-separation is
//! complete: positive program, singly connected ground graph, every source
//! defined by a ground probabilistic fact, and all parameters strictly
//! between 0 and 1.
//!
//! Certification is per database. Whether the ground graph stays singly
//! connected for every database is not decided here.

use std::collections::VecDeque;

use serde_json::{json, Value};

use crate::dsep::Dag;
use crate::grounding::Instance;
use crate::syntax::{format_probability, ClauseId, ParameterAssignment, ProgramStructure};

/// Undirected cycle as node ids, first node repeated at the end.
pub type Cycle = Vec<usize>;

/// First random clause with a negated cause.
pub fn is_positive(program: &ProgramStructure) -> Result<(), ClauseId> {
    match program.random_part.iter().find(|rc| !rc.is_positive()) {
        Some(rc) => Err(rc.id),
        None => Ok(()),
    }
}

/// Union-find over the underlying undirected graph. The first edge closing
/// a cycle yields the witness: that edge plus the tree path between its
/// endpoints.
pub fn is_singly_connected(dag: &Dag) -> Result<(), Cycle> {
    let n = dag.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut forest: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (a, b) in dag.edges() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            let mut cycle = tree_path(&forest, b, a);
            cycle.push(b);
            return Err(cycle);
        }
        parent[ra] = rb;
        forest[a].push(b);
        forest[b].push(a);
    }
    Ok(())
}

fn tree_path(forest: &[Vec<usize>], from: usize, to: usize) -> Vec<usize> {
    let mut prev = vec![usize::MAX; forest.len()];
    prev[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &w in &forest[v] {
            if prev[w] == usize::MAX {
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = prev[cur];
        path.push(cur);
    }
    path.reverse();
    path
}

/// First source (in-degree 0) not defined by a ground probabilistic fact.
pub fn sources_are_facts(inst: &Instance) -> Result<(), usize> {
    let facts = inst.fact_defined();
    let dag = inst.dag();
    match (0..dag.len()).find(|&v| dag.parents(v).is_empty() && !facts[v]) {
        Some(v) => Err(v),
        None => Ok(()),
    }
}

/// First clause whose probability is 0, 1 or missing.
pub fn params_interior(
    program: &ProgramStructure,
    params: &ParameterAssignment,
) -> Result<(), ClauseId> {
    for rc in &program.random_part {
        match params.get(rc.id) {
            Some(p) if *p > num_traits::zero() && *p < num_traits::one() => {}
            _ => return Err(rc.id),
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FragmentReport {
    pub positive: Result<(), ClauseId>,
    pub singly_connected: Result<(), Cycle>,
    pub sources_are_facts: Result<(), usize>,
    pub params_interior: Result<(), ClauseId>,
    /// 0 < π(G) < 1 for every ground variable; `None` when not checked.
    pub proper: Option<bool>,
}

impl FragmentReport {
    pub fn check(inst: &Instance, params: &ParameterAssignment) -> Self {
        FragmentReport {
            positive: is_positive(inst.program()),
            singly_connected: is_singly_connected(inst.dag()),
            sources_are_facts: sources_are_facts(inst),
            params_interior: params_interior(inst.program(), params),
            proper: None,
        }
    }

    /// All four structural conditions hold.
    pub fn complete_oracle(&self) -> bool {
        self.positive.is_ok()
            && self.singly_connected.is_ok()
            && self.sources_are_facts.is_ok()
            && self.params_interior.is_ok()
    }

    pub fn to_json(&self, inst: &Instance, params: &ParameterAssignment) -> Value {
        let name = |i: usize| inst.graph().atom(i).to_string();
        json!({
            "positive": self.positive.is_ok(),
            "negative_clause": self.positive.as_ref().err().map(|c| c.to_string()),
            "singly_connected": self.singly_connected.is_ok(),
            "cycle": self.singly_connected.as_ref().err().map(|c| c.iter().map(|&i| name(i)).collect::<Vec<_>>()),
            "sources_are_facts": self.sources_are_facts.is_ok(),
            "non_fact_source": self.sources_are_facts.as_ref().err().map(|&i| name(i)),
            "params_interior": self.params_interior.is_ok(),
            "boundary_clause": self.params_interior.as_ref().err().map(|c| describe_param(*c, params)),
            "proper": self.proper,
            "complete_oracle": self.complete_oracle(),
        })
    }

    pub fn render(&self, inst: &Instance, params: &ParameterAssignment) -> String {
        let name = |i: usize| inst.graph().atom(i).to_string();
        let mut out = String::new();
        let mark = |ok: bool| if ok { "yes" } else { "no" };
        out.push_str(&format!("positive: {}", mark(self.positive.is_ok())));
        if let Err(c) = &self.positive {
            out.push_str(&format!(" (negated cause in {c})"));
        }
        out.push_str(&format!(
            "\nsingly connected: {}",
            mark(self.singly_connected.is_ok())
        ));
        if let Err(cycle) = &self.singly_connected {
            let names: Vec<String> = cycle.iter().map(|&i| name(i)).collect();
            out.push_str(&format!(" (cycle {})", names.join(" - ")));
        }
        out.push_str(&format!(
            "\nsources are facts: {}",
            mark(self.sources_are_facts.is_ok())
        ));
        if let Err(v) = &self.sources_are_facts {
            out.push_str(&format!(" ({} has no fact)", name(*v)));
        }
        out.push_str(&format!(
            "\nparameters interior: {}",
            mark(self.params_interior.is_ok())
        ));
        if let Err(c) = &self.params_interior {
            out.push_str(&format!(" ({})", describe_param(*c, params)));
        }
        out.push_str(&format!(
            "\nproper: {}",
            match self.proper {
                Some(p) => mark(p),
                None => "unchecked",
            }
        ));
        out.push_str(&format!("\ncomplete: {}\n", mark(self.complete_oracle())));
        out
    }
}

fn describe_param(c: ClauseId, params: &ParameterAssignment) -> String {
    match params.get(c) {
        Some(p) => format!("{c} = {}", format_probability(p)),
        None => format!("{c} unset"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grounding::GroundingOptions;
    use crate::syntax::{parse_database, parse_program};

    fn instance(program: &str, db: &str) -> Instance {
        let p = parse_program(program).unwrap();
        let db = parse_database(db, &p).unwrap();
        Instance::new(&p, &db, GroundingOptions::default()).unwrap()
    }

    const CHAIN: &str =
        "random p/1.\n0.5 :: p(X) :- n(X).\n0.5 :: p(Y) :- p(X), n(X), n(Y), e(X,Y).";

    #[test]
    fn path_graph_is_in_fragment() {
        let inst = instance(CHAIN, "n(1). n(2). n(3). e(1,2). e(2,3).");
        let params = ParameterAssignment::from_program(inst.program());
        let r = FragmentReport::check(&inst, &params);
        assert!(r.complete_oracle(), "{}", r.render(&inst, &params));
    }

    #[test]
    fn diamond_is_not_singly_connected() {
        let inst = instance(
            CHAIN,
            "n(1). n(2). n(3). n(4). e(1,2). e(1,3). e(2,4). e(3,4).",
        );
        let cycle = is_singly_connected(inst.dag()).unwrap_err();
        assert_eq!(cycle.len(), 5);
        assert_eq!(cycle.first(), cycle.last());
        for w in cycle.windows(2) {
            let dag = inst.dag();
            assert!(dag.has_edge(w[0], w[1]) || dag.has_edge(w[1], w[0]));
        }
    }

    #[test]
    fn negated_cause_breaks_positivity() {
        let p = parse_program(
            "random a/1. random b/1.\n0.5 :: b(X) :- n(X).\n0.5 :: a(X) :- n(X), \\+b(X).",
        )
        .unwrap();
        assert_eq!(is_positive(&p), Err(ClauseId(2)));
        assert_eq!(is_positive(&parse_program("").unwrap()), Ok(()));
    }

    #[test]
    fn source_without_fact() {
        let inst = instance("random a/0. random b/0.\n0.5 :: b :- a.", "");
        assert_eq!(sources_are_facts(&inst), Err(0));
    }

    #[test]
    fn boundary_parameters() {
        let p = parse_program("random a/0.\n1 :: a.").unwrap();
        assert_eq!(
            params_interior(&p, &ParameterAssignment::from_program(&p)),
            Err(ClauseId(1))
        );
        let p = parse_program("random a/0.\n0 :: a.").unwrap();
        assert!(params_interior(&p, &ParameterAssignment::from_program(&p)).is_err());
    }

    #[test]
    fn empty_graph_is_singly_connected() {
        assert!(is_singly_connected(&Dag::default()).is_ok());
    }
}
