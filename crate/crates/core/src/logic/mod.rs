//! Stratified bottom-up evaluation of the internal part and integrity
//! constraint checking.

mod join;
mod model;
mod stratify;

use std::collections::BTreeMap;
use std::fmt;

pub(crate) use join::{Binding, CFormula, Compiler, Solver};
pub use model::{HerbrandModel, Relation, Universe};
pub use stratify::{stratify, Stratification};

use crate::error::Result;
use crate::syntax::{
    Constant, Constraint, ExternalDatabase, InternalClause, ProgramStructure, Symbol,
};

struct CompiledRule {
    head: Symbol,
    head_args: Vec<join::CTerm>,
    body: CFormula,
    nvars: usize,
    /// Body literal ids of positive atoms over predicates of the same stratum.
    recursive: Vec<(usize, Symbol)>,
}

fn compile_rule(clause: &InternalClause, universe: &Universe, stratum: &[Symbol]) -> CompiledRule {
    let vars = clause.variables();
    let nvars = vars.len();
    let mut c = Compiler::new(universe, vars);
    let head_args = c.atom_terms(&clause.head);
    let body = c.body(&clause.body);
    let recursive = clause
        .body
        .iter()
        .enumerate()
        .filter(|(_, l)| l.positive && stratum.contains(&l.atom.predicate))
        .map(|(i, l)| (i, l.atom.predicate.clone()))
        .collect();
    CompiledRule {
        head: clause.head.predicate.clone(),
        head_args,
        body,
        nvars,
        recursive,
    }
}

fn head_tuple(rule: &CompiledRule, b: &Binding) -> Box<[u32]> {
    rule.head_args
        .iter()
        .map(|t| match t {
            join::CTerm::Const(c) => *c,
            join::CTerm::Var(v) => b[*v].expect("range-restricted head"),
        })
        .collect()
}

fn fire(rule: &CompiledRule, solver: &Solver<'_>, out: &mut Vec<(Symbol, Box<[u32]>)>) {
    let mut b = vec![None; rule.nvars];
    solver.solve(&rule.body, &mut b, &mut |b| {
        out.push((rule.head.clone(), head_tuple(rule, b)));
    });
}

fn base_model(db: &ExternalDatabase) -> HerbrandModel {
    let mut model = HerbrandModel::new(Universe::new(db.constants.iter().cloned()));
    for fact in &db.facts {
        model.insert(fact);
    }
    model
}

/// Computes the minimal model of the internal part over `db` with
/// semi-naive iteration, one stratum at a time.
pub fn evaluate(program: &ProgramStructure, db: &ExternalDatabase) -> Result<HerbrandModel> {
    let strat = stratify(program)?;
    let mut model = base_model(db);
    for stratum in &strat.strata {
        let rules: Vec<CompiledRule> = program
            .internal_part
            .iter()
            .filter(|c| stratum.contains(&c.head.predicate))
            .map(|c| compile_rule(c, &model.universe, stratum))
            .collect();

        let mut derived = Vec::new();
        {
            let solver = Solver::new(&model);
            for rule in &rules {
                fire(rule, &solver, &mut derived);
            }
        }
        let mut delta = absorb(&mut model, derived);
        while !delta.is_empty() {
            let mut derived = Vec::new();
            for rule in &rules {
                for (lit, pred) in &rule.recursive {
                    let Some(rel) = delta.get(pred) else {
                        continue;
                    };
                    let solver = Solver::with_delta(&model, *lit, rel);
                    fire(rule, &solver, &mut derived);
                }
            }
            delta = absorb(&mut model, derived);
        }
    }
    Ok(model)
}

/// Inserts new tuples; returns those that were not yet in the model.
fn absorb(
    model: &mut HerbrandModel,
    derived: Vec<(Symbol, Box<[u32]>)>,
) -> BTreeMap<Symbol, Relation> {
    let mut delta: BTreeMap<Symbol, Relation> = BTreeMap::new();
    for (p, t) in derived {
        if model.insert_ids(&p, t.clone()) {
            delta.entry(p).or_default().insert(t);
        }
    }
    delta
}

/// Plain fixpoint iteration: every rule against the full model until
/// nothing changes. Reference implementation for [`evaluate`].
pub fn evaluate_naive(program: &ProgramStructure, db: &ExternalDatabase) -> Result<HerbrandModel> {
    let strat = stratify(program)?;
    let mut model = base_model(db);
    for stratum in &strat.strata {
        let rules: Vec<CompiledRule> = program
            .internal_part
            .iter()
            .filter(|c| stratum.contains(&c.head.predicate))
            .map(|c| compile_rule(c, &model.universe, stratum))
            .collect();
        loop {
            let mut derived = Vec::new();
            let solver = Solver::new(&model);
            for rule in &rules {
                fire(rule, &solver, &mut derived);
            }
            if absorb(&mut model, derived).is_empty() {
                break;
            }
        }
    }
    Ok(model)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Index into the program's constraint list.
    pub constraint: usize,
    pub line: usize,
    pub substitution: BTreeMap<Symbol, Constant>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "constraint on line {} with {{", self.line)?;
        for (i, (v, c)) in self.substitution.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} -> {c}")?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

fn constraint_violations(
    index: usize,
    constraint: &Constraint,
    model: &HerbrandModel,
) -> Vec<Violation> {
    let vars = constraint.variables();
    let n = vars.len();
    let mut c = Compiler::new(&model.universe, vars.clone());
    let body = c.body(&constraint.body);
    let keep = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut out: Vec<Violation> = Solver::new(model)
        .solutions(&body, n, keep)
        .into_iter()
        .map(|b| Violation {
            constraint: index,
            line: constraint.line,
            substitution: vars
                .iter()
                .zip(&b)
                .map(|(v, id)| (v.clone(), model.universe.name(id.expect("bound")).clone()))
                .collect(),
        })
        .collect();
    out.sort_by(|a, b| a.substitution.cmp(&b.substitution));
    out
}

/// Every grounding of a constraint body that holds in the model.
pub fn check_constraints(model: &HerbrandModel, program: &ProgramStructure) -> ConstraintReport {
    let violations: Vec<Violation> = program
        .constraints
        .iter()
        .enumerate()
        .flat_map(|(i, c)| constraint_violations(i, c, model))
        .collect();
    ConstraintReport {
        ok: violations.is_empty(),
        violations,
    }
}
