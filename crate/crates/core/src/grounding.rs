//! Ground variables, the ground graph and the Boolean equation system of a
//! program structure over an external database.
//!
//! Every substitution satisfying a random clause's condition in the
//! Herbrand model contributes one error term, one disjunct to the equation
//! of its instantiated effect, and an edge from each instantiated cause to
//! that effect.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use serde_json::{json, Value};

use crate::dsep::{Dag, ObservationSet};
use crate::error::{Error, Result};
use crate::logic::{self, Compiler, HerbrandModel, Solver};
use crate::syntax::{
    CIQuery, ClauseId, Constant, ExternalDatabase, GroundAtom, ParameterAssignment, Probability,
    ProgramStructure, Symbol,
};

/// Upper bound on the ground variable set when all groundings are requested.
pub const MAX_ALL_GROUNDINGS: usize = 1 << 20;

static GROUNDINGS: AtomicU64 = AtomicU64::new(0);

/// Number of groundings performed by this process so far.
pub fn grounding_count() -> u64 {
    GROUNDINGS.load(Ordering::Relaxed)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GroundingOptions {
    /// Keep every instantiation of every random predicate over the active
    /// domain, not only those some clause can produce or consume.
    pub all_groundings: bool,
}

/// One substitution satisfying a clause condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instantiation {
    pub clause: ClauseId,
    /// Keyed by the clause's variables in first-occurrence order.
    pub subst: Vec<(Symbol, Constant)>,
    pub effect: usize,
    /// Instantiated causes as (node, positive), duplicates removed.
    pub causes: Vec<(usize, bool)>,
}

/// `u(clause, subst)` with its probability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorTerm {
    pub clause: ClauseId,
    pub subst: Vec<(Symbol, Constant)>,
    pub probability: Probability,
}

impl fmt::Display for ErrorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u({}, {{", self.clause)?;
        for (i, (v, c)) in self.subst.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}={c}")?;
        }
        f.write_str("})")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disjunct {
    /// (node, positive)
    pub lits: Vec<(usize, bool)>,
    /// Index into [`EquationSystem::error_terms`].
    pub u: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundEquation {
    pub target: usize,
    /// Empty means constant false.
    pub disjuncts: Vec<Disjunct>,
}

/// One equation per ground variable, over mutually independent error terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationSystem {
    pub vars: Vec<GroundAtom>,
    pub equations: Vec<GroundEquation>,
    pub error_terms: Vec<ErrorTerm>,
    /// A topological order of `vars`.
    pub order: Vec<usize>,
}

impl EquationSystem {
    /// Values of all ground variables under one valuation of the error terms.
    pub fn solve(&self, u: &[bool]) -> Vec<bool> {
        assert_eq!(u.len(), self.error_terms.len());
        let mut val = vec![false; self.vars.len()];
        for &v in &self.order {
            val[v] = self.equations[v]
                .disjuncts
                .iter()
                .any(|d| u[d.u] && d.lits.iter().all(|&(n, pos)| val[n] == pos));
        }
        val
    }

    pub fn var(&self, atom: &GroundAtom) -> Option<usize> {
        self.vars.binary_search(atom).ok()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.equations
                .iter()
                .map(|eq| {
                    json!({
                        "var": self.vars[eq.target].to_string(),
                        "disjuncts": eq.disjuncts.iter().map(|d| {
                            let u = &self.error_terms[d.u];
                            let subst: serde_json::Map<String, Value> = u
                                .subst
                                .iter()
                                .map(|(v, c)| (v.to_string(), Value::from(c.as_str())))
                                .collect();
                            json!({
                                "lits": d.lits.iter().map(|&(n, pos)| self.lit_text(n, pos)).collect::<Vec<_>>(),
                                "u": {
                                    "clause": u.clause.0,
                                    "subst": subst,
                                    "p": format!("{}/{}", u.probability.numer(), u.probability.denom()),
                                }
                            })
                        }).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )
    }

    fn lit_text(&self, n: usize, pos: bool) -> String {
        if pos {
            self.vars[n].to_string()
        } else {
            format!("\\+{}", self.vars[n])
        }
    }
}

impl fmt::Display for EquationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for eq in &self.equations {
            write!(f, "{} :=", self.vars[eq.target])?;
            if eq.disjuncts.is_empty() {
                f.write_str(" false")?;
            }
            for (i, d) in eq.disjuncts.iter().enumerate() {
                if i > 0 {
                    f.write_str(" |")?;
                }
                for (n, pos) in &d.lits {
                    write!(f, " {} &", self.lit_text(*n, *pos))?;
                }
                write!(f, " u{}", d.u)?;
            }
            writeln!(f)?;
        }
        for (i, u) in self.error_terms.iter().enumerate() {
            writeln!(
                f,
                "u{i} = {u} : {}/{}",
                u.probability.numer(),
                u.probability.denom()
            )?;
        }
        Ok(())
    }
}

/// Directed graph over ground variables with the clauses inducing each edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundGraph {
    nodes: Vec<GroundAtom>,
    dag: Dag,
    provenance: BTreeMap<(usize, usize), BTreeSet<ClauseId>>,
}

impl GroundGraph {
    fn new(nodes: Vec<GroundAtom>) -> Self {
        let dag = Dag::new(nodes.iter().map(|a| a.to_string()));
        GroundGraph {
            nodes,
            dag,
            provenance: BTreeMap::new(),
        }
    }

    fn add_edge(&mut self, a: usize, b: usize, clause: ClauseId) {
        self.dag.add_edge(a, b);
        self.provenance.entry((a, b)).or_default().insert(clause);
    }

    /// Ground variables in sorted order; node ids index this slice.
    pub fn nodes(&self) -> &[GroundAtom] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.provenance.len()
    }

    pub fn node(&self, atom: &GroundAtom) -> Option<usize> {
        self.nodes.binary_search(atom).ok()
    }

    pub fn atom(&self, i: usize) -> &GroundAtom {
        &self.nodes[i]
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    /// Edges in sorted order with their inducing clauses.
    pub fn edges(&self) -> &BTreeMap<(usize, usize), BTreeSet<ClauseId>> {
        &self.provenance
    }

    pub fn parents(&self, atom: &GroundAtom) -> BTreeSet<GroundAtom> {
        self.node(atom)
            .map(|i| {
                self.dag
                    .parents(i)
                    .iter()
                    .map(|&p| self.nodes[p].clone())
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Layered topological order (sources first, each layer sorted), or the
    /// shortest directed cycle, first node repeated at the end.
    pub fn check_acyclic(&self) -> std::result::Result<Vec<usize>, Vec<usize>> {
        let n = self.len();
        let mut indegree: Vec<usize> = (0..n).map(|i| self.dag.parents(i).len()).collect();
        let mut layer: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while !layer.is_empty() {
            let mut next = Vec::new();
            for &v in &layer {
                for &c in self.dag.children(v) {
                    indegree[c] -= 1;
                    if indegree[c] == 0 {
                        next.push(c);
                    }
                }
            }
            order.append(&mut layer);
            next.sort_unstable();
            layer = next;
        }
        if order.len() == n {
            return Ok(order);
        }
        let mut best: Option<Vec<usize>> = None;
        for s in (0..n).filter(|&i| indegree[i] > 0) {
            if let Some(c) = self.cycle_through(s) {
                if best.as_ref().is_none_or(|b| c.len() < b.len()) {
                    best = Some(c);
                }
            }
        }
        Err(best.expect("a graph without topological order has a cycle"))
    }

    fn cycle_through(&self, s: usize) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &c in self.dag.children(v) {
                if c == s {
                    let mut path = vec![s, v];
                    let mut cur = v;
                    while cur != s {
                        cur = prev[cur];
                        path.push(cur);
                    }
                    path.reverse();
                    return Some(path);
                }
                if prev[c] == usize::MAX {
                    prev[c] = v;
                    queue.push_back(c);
                }
            }
        }
        None
    }

    /// Graphviz rendering: sorted node lines, edges labelled with clauses.
    pub fn emit_dot(&self) -> String {
        let mut out = String::from("digraph ground {\n");
        for a in &self.nodes {
            out.push_str(&format!("  \"{a}\";\n"));
        }
        for ((a, b), clauses) in &self.provenance {
            let label: Vec<String> = clauses.iter().map(|c| c.to_string()).collect();
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                self.nodes[*a],
                self.nodes[*b],
                label.join(",")
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// A program structure grounded once against one database. Queries,
/// equation systems and reports are all derived from this value.
#[derive(Clone, Debug)]
pub struct Instance {
    program: ProgramStructure,
    db: ExternalDatabase,
    model: HerbrandModel,
    graph: GroundGraph,
    instantiations: Vec<Instantiation>,
    order: std::result::Result<Vec<usize>, Vec<usize>>,
}

impl Instance {
    /// Evaluates the internal part, rejects databases that violate a
    /// constraint, and grounds the random part.
    pub fn new(
        program: &ProgramStructure,
        db: &ExternalDatabase,
        options: GroundingOptions,
    ) -> Result<Self> {
        let model = logic::evaluate(program, db)?;
        let report = logic::check_constraints(&model, program);
        if let Some(first) = report.violations.first() {
            return Err(Error::ConstraintViolation {
                count: report.violations.len(),
                first: first.to_string(),
            });
        }
        Self::from_model(program, db, model, options)
    }

    /// Grounds against an already evaluated model without checking
    /// constraints.
    pub fn from_model(
        program: &ProgramStructure,
        db: &ExternalDatabase,
        model: HerbrandModel,
        options: GroundingOptions,
    ) -> Result<Self> {
        let n = GROUNDINGS.fetch_add(1, Ordering::Relaxed) + 1;
        let raw = satisfying_substitutions(program, &model);

        let mut atoms: BTreeSet<GroundAtom> = BTreeSet::new();
        for (_, _, effect, causes) in &raw {
            atoms.insert(effect.clone());
            atoms.extend(causes.iter().map(|(a, _)| a.clone()));
        }
        if options.all_groundings {
            atoms.extend(all_groundings(program, &model)?);
        }
        let mut graph = GroundGraph::new(atoms.into_iter().collect());
        let mut instantiations = Vec::with_capacity(raw.len());
        for (clause, subst, effect, causes) in raw {
            let effect = graph.node(&effect).expect("effect is a node");
            let mut cs: Vec<(usize, bool)> = Vec::new();
            for (a, pos) in causes {
                let c = graph.node(&a).expect("cause is a node");
                if !cs.contains(&(c, pos)) {
                    cs.push((c, pos));
                }
                graph.add_edge(c, effect, clause);
            }
            instantiations.push(Instantiation {
                clause,
                subst,
                effect,
                causes: cs,
            });
        }
        let order = graph.check_acyclic();
        log::debug!(
            "grounding #{n}: {} ground variables, {} edges, {} error terms",
            graph.len(),
            graph.edge_count(),
            instantiations.len()
        );
        Ok(Instance {
            program: program.clone(),
            db: db.clone(),
            model,
            graph,
            instantiations,
            order,
        })
    }

    pub fn program(&self) -> &ProgramStructure {
        &self.program
    }

    pub fn database(&self) -> &ExternalDatabase {
        &self.db
    }

    pub fn model(&self) -> &HerbrandModel {
        &self.model
    }

    pub fn graph(&self) -> &GroundGraph {
        &self.graph
    }

    pub fn dag(&self) -> &Dag {
        self.graph.dag()
    }

    /// Satisfying substitutions ordered by clause, then substitution.
    pub fn instantiations(&self) -> &[Instantiation] {
        &self.instantiations
    }

    pub fn error_term_count(&self) -> usize {
        self.instantiations.len()
    }

    pub fn ground_variables(&self) -> &[GroundAtom] {
        self.graph.nodes()
    }

    /// Topological order, or the cyclic error with a shortest cycle.
    pub fn topological_order(&self) -> Result<&[usize]> {
        match &self.order {
            Ok(o) => Ok(o),
            Err(cycle) => Err(Error::Cyclic {
                cycle: cycle
                    .iter()
                    .map(|&i| self.graph.atom(i).to_string())
                    .collect(),
            }),
        }
    }

    pub fn is_acyclic(&self) -> bool {
        self.order.is_ok()
    }

    pub fn node(&self, atom: &GroundAtom) -> Result<usize> {
        self.graph
            .node(atom)
            .ok_or_else(|| Error::UnknownNode(atom.to_string()))
    }

    /// Node ids of a query's endpoints and observations.
    pub fn query_nodes(&self, q: &CIQuery) -> Result<(usize, usize, Vec<usize>)> {
        let obs = q
            .observations
            .iter()
            .map(|z| self.node(z))
            .collect::<Result<Vec<_>>>()?;
        Ok((self.node(&q.a)?, self.node(&q.b)?, obs))
    }

    pub fn observe(&self, nodes: &[usize]) -> ObservationSet {
        ObservationSet::new(self.dag(), nodes)
    }

    /// Nodes defined by at least one instantiation of a clause without
    /// causes, i.e. by a ground probabilistic fact.
    pub fn fact_defined(&self) -> Vec<bool> {
        let mut out = vec![false; self.graph.len()];
        for inst in &self.instantiations {
            if inst.causes.is_empty() {
                out[inst.effect] = true;
            }
        }
        out
    }

    /// The equation system under a choice of parameters.
    pub fn equations(&self, params: &ParameterAssignment) -> Result<EquationSystem> {
        let order = self.topological_order()?.to_vec();
        let mut equations: Vec<GroundEquation> = (0..self.graph.len())
            .map(|target| GroundEquation {
                target,
                disjuncts: Vec::new(),
            })
            .collect();
        let mut error_terms = Vec::with_capacity(self.instantiations.len());
        for (u, inst) in self.instantiations.iter().enumerate() {
            let p = params
                .get(inst.clause)
                .ok_or_else(|| Error::MissingParameter(inst.clause.to_string()))?;
            error_terms.push(ErrorTerm {
                clause: inst.clause,
                subst: inst.subst.clone(),
                probability: p.clone(),
            });
            equations[inst.effect].disjuncts.push(Disjunct {
                lits: inst.causes.clone(),
                u,
            });
        }
        Ok(EquationSystem {
            vars: self.graph.nodes().to_vec(),
            equations,
            error_terms,
            order,
        })
    }
}

type RawInstantiation = (
    ClauseId,
    Vec<(Symbol, Constant)>,
    GroundAtom,
    Vec<(GroundAtom, bool)>,
);

fn satisfying_substitutions(
    program: &ProgramStructure,
    model: &HerbrandModel,
) -> Vec<RawInstantiation> {
    let universe = model.universe();
    let mut out = Vec::new();
    for rc in &program.random_part {
        let vars = rc.variables();
        let nvars = vars.len();
        let mut compiler = Compiler::new(universe, vars.clone());
        let cond = compiler.formula(&rc.condition);
        let keep = if nvars == 64 {
            u64::MAX
        } else {
            (1u64 << nvars) - 1
        };
        let solutions: BTreeSet<Vec<Constant>> = Solver::new(model)
            .solutions(&cond, nvars, keep)
            .into_iter()
            .map(|b| {
                b.into_iter()
                    .map(|id| {
                        universe
                            .name(id.expect("range restriction binds all variables"))
                            .clone()
                    })
                    .collect()
            })
            .collect();
        for consts in solutions {
            let subst: BTreeMap<Symbol, Constant> =
                vars.iter().cloned().zip(consts.iter().cloned()).collect();
            let effect = rc.effect.instantiate(&subst).expect("ground effect");
            let causes = rc
                .causes
                .iter()
                .map(|c| {
                    (
                        c.atom.instantiate(&subst).expect("ground cause"),
                        c.positive,
                    )
                })
                .collect();
            out.push((
                rc.id,
                vars.iter().cloned().zip(consts).collect(),
                effect,
                causes,
            ));
        }
    }
    out
}

fn all_groundings(program: &ProgramStructure, model: &HerbrandModel) -> Result<Vec<GroundAtom>> {
    let mut domain: Vec<Constant> = model.universe().constants().to_vec();
    domain.sort();
    let mut out = Vec::new();
    for (p, &arity) in &program.decls.random {
        let size = (domain.len() as u128).pow(arity as u32);
        if size + out.len() as u128 > MAX_ALL_GROUNDINGS as u128 {
            return Err(Error::SizeGuard {
                what: "ground variable set",
                size: usize::try_from(size).unwrap_or(usize::MAX),
                limit: MAX_ALL_GROUNDINGS,
            });
        }
        if arity > 0 && domain.is_empty() {
            continue;
        }
        let mut idx = vec![0usize; arity];
        loop {
            out.push(GroundAtom {
                predicate: p.clone(),
                args: idx.iter().map(|&i| domain[i].clone()).collect(),
            });
            // odometer over domain^arity
            let mut k = arity;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < domain.len() {
                    break;
                }
                idx[k] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    Ok(out)
}

/// Ground variables of `program` over `db`.
pub fn ground_variables(
    program: &ProgramStructure,
    db: &ExternalDatabase,
    options: GroundingOptions,
) -> Result<Vec<GroundAtom>> {
    Ok(Instance::new(program, db, options)?
        .ground_variables()
        .to_vec())
}

pub fn ground_graph(
    program: &ProgramStructure,
    db: &ExternalDatabase,
    options: GroundingOptions,
) -> Result<GroundGraph> {
    Ok(Instance::new(program, db, options)?.graph)
}

pub fn ground_equations(
    program: &ProgramStructure,
    db: &ExternalDatabase,
    params: &ParameterAssignment,
    options: GroundingOptions,
) -> Result<EquationSystem> {
    Instance::new(program, db, options)?.equations(params)
}
