use std::collections::{BTreeMap, HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::error::{Error, Result};
use crate::syntax::{ProgramStructure, Symbol};

/// Ordered partition of the internal predicates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratification {
    pub strata: Vec<Vec<Symbol>>,
    pub level: BTreeMap<Symbol, usize>,
}

/// Computes the minimal stratification of the internal part.
///
/// Positive dependencies keep a predicate at or above the level of what it
/// depends on; negative ones force a strictly higher level. A negative
/// dependency inside a strongly connected component is reported with a
/// witness cycle `p -> q -> ... -> p`, read as "depends on".
pub fn stratify(program: &ProgramStructure) -> Result<Stratification> {
    // edges head -> body predicate, labelled with "negative"
    let mut graph: DiGraph<Symbol, bool> = DiGraph::new();
    let mut nodes: HashMap<Symbol, NodeIndex> = HashMap::new();
    for p in program.decls.internal.keys() {
        nodes.insert(p.clone(), graph.add_node(p.clone()));
    }
    for clause in &program.internal_part {
        let head = nodes[&clause.head.predicate];
        for lit in &clause.body {
            if let Some(&dep) = nodes.get(&lit.atom.predicate) {
                graph.add_edge(head, dep, !lit.positive);
            }
        }
    }

    // tarjan_scc yields components in reverse topological order, i.e.
    // dependencies before dependants
    let sccs = tarjan_scc(&graph);
    let mut component = vec![0usize; graph.node_count()];
    for (i, scc) in sccs.iter().enumerate() {
        for n in scc {
            component[n.index()] = i;
        }
    }
    for e in graph.edge_indices() {
        let (h, d) = graph.edge_endpoints(e).unwrap();
        if graph[e] && component[h.index()] == component[d.index()] {
            let mut cycle = vec![graph[h].to_string()];
            cycle.extend(path(&graph, d, h).into_iter().map(|n| graph[n].to_string()));
            return Err(Error::NotStratified { cycle });
        }
    }

    let mut comp_level = vec![0usize; sccs.len()];
    for (i, scc) in sccs.iter().enumerate() {
        let mut level = 0;
        for &n in scc {
            for e in graph.edges(n) {
                use petgraph::visit::EdgeRef;
                let dep = component[e.target().index()];
                if dep != i {
                    level = level.max(comp_level[dep] + usize::from(*e.weight()));
                }
            }
        }
        comp_level[i] = level;
    }

    let mut level = BTreeMap::new();
    for n in graph.node_indices() {
        level.insert(graph[n].clone(), comp_level[component[n.index()]]);
    }
    let height = level.values().map(|l| l + 1).max().unwrap_or(0);
    let mut strata = vec![Vec::new(); height];
    for (p, l) in &level {
        strata[*l].push(p.clone());
    }
    Ok(Stratification { strata, level })
}

/// Shortest path `from ->* to` as nodes, `from` included.
fn path(graph: &DiGraph<Symbol, bool>, from: NodeIndex, to: NodeIndex) -> Vec<NodeIndex> {
    let mut prev: HashMap<NodeIndex, NodeIndex> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen = vec![false; graph.node_count()];
    seen[from.index()] = true;
    while let Some(n) = queue.pop_front() {
        if n == to {
            break;
        }
        for m in graph.neighbors(n) {
            if !seen[m.index()] {
                seen[m.index()] = true;
                prev.insert(m, n);
                queue.push_back(m);
            }
        }
    }
    let mut out = vec![to];
    let mut cur = to;
    while cur != from {
        cur = prev[&cur];
        out.push(cur);
    }
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn names(s: &Stratification) -> Vec<Vec<String>> {
        s.strata
            .iter()
            .map(|st| st.iter().map(|p| p.to_string()).collect())
            .collect()
    }

    #[test]
    fn single_stratum_without_negation() {
        let p = parse_program(
            "connected(R,R) :- room(R).\nconnected(R,R1) :- room(R), room(R1), room(R2), passage(R2,R1), connected(R,R2).",
        )
        .unwrap();
        assert_eq!(names(&stratify(&p).unwrap()), vec![vec!["connected"]]);
    }

    #[test]
    fn negation_forces_higher_stratum() {
        let p = parse_program("a(X) :- e(X), \\+ b(X).\nb(X) :- e(X).").unwrap();
        assert_eq!(names(&stratify(&p).unwrap()), vec![vec!["b"], vec!["a"]]);
    }

    #[test]
    fn cycle_through_negation() {
        let p = parse_program("a(X) :- e(X), \\+ b(X).\nb(X) :- e(X), a(X).").unwrap();
        match stratify(&p).unwrap_err() {
            Error::NotStratified { cycle } => assert_eq!(cycle, ["a", "b", "a"]),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn empty_internal_part() {
        let p = parse_program("").unwrap();
        assert!(stratify(&p).unwrap().strata.is_empty());
    }
}
