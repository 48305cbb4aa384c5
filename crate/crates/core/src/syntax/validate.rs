//! Turns parsed statements into validated program structures, databases
//! and queries.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::ast::*;
use super::parser::{DeclKind, Parser, Statement};
use crate::error::{Error, Result};

/// Clause variables are tracked in 64-bit masks during evaluation.
pub const MAX_CLAUSE_VARS: usize = 64;

pub fn parse_program(text: &str) -> Result<ProgramStructure> {
    let statements = Parser::new(text)?.statements()?;
    build_program(statements)
}

fn build_program(statements: Vec<Statement>) -> Result<ProgramStructure> {
    let mut arities = Arities::default();
    let mut random: BTreeMap<Symbol, usize> = BTreeMap::new();
    let mut declared_external: BTreeMap<Symbol, usize> = BTreeMap::new();
    let mut internal: BTreeMap<Symbol, usize> = BTreeMap::new();

    for st in &statements {
        match st {
            Statement::Decl {
                kind,
                predicate,
                arity,
                line,
            } => {
                let p: Symbol = Arc::from(predicate.as_str());
                arities.record(&p, *arity, *line)?;
                match kind {
                    DeclKind::Random => random.insert(p, *arity),
                    DeclKind::External => declared_external.insert(p, *arity),
                };
            }
            Statement::Rule { head, line, .. } => {
                if random.contains_key(&head.predicate) || is_declared_later(&statements, head) {
                    return Err(Error::invalid(
                        *line,
                        format!(
                            "random predicate {}/{} used as head of an internal clause",
                            head.predicate,
                            head.arity()
                        ),
                    ));
                }
                internal.insert(head.predicate.clone(), head.arity());
            }
            _ => {}
        }
    }
    for p in declared_external.keys() {
        if random.contains_key(p) || internal.contains_key(p) {
            return Err(Error::invalid(
                0,
                format!("predicate {p} declared external but also random or internal"),
            ));
        }
    }

    let mut program = ProgramStructure::default();
    let mut next_id = 1u32;
    for st in statements {
        match st {
            Statement::Decl { .. } => {}
            Statement::Random {
                probability,
                head,
                body,
                line,
            } => {
                arities.atom(&head, line)?;
                arities.formula(&body, line)?;
                if !random.contains_key(&head.predicate) {
                    let msg = if internal.contains_key(&head.predicate) {
                        format!("internal predicate {} used as effect", head.predicate)
                    } else if declared_external.contains_key(&head.predicate) {
                        format!("external predicate {} used as effect", head.predicate)
                    } else {
                        format!(
                            "undeclared random predicate {}/{} used as effect",
                            head.predicate,
                            head.arity()
                        )
                    };
                    return Err(Error::invalid(line, msg));
                }
                if let Some(p) = &probability {
                    if !in_unit_interval(p) {
                        return Err(Error::invalid(line, "probability outside [0, 1]"));
                    }
                }
                let mut causes: Vec<Literal> = Vec::new();
                let mut condition = Vec::new();
                for item in body.conjuncts() {
                    match item {
                        Formula::Lit(l) if random.contains_key(&l.atom.predicate) => {
                            if causes.iter().any(|c| c.atom == l.atom) {
                                return Err(Error::invalid(
                                    line,
                                    format!("duplicate cause {}", l.atom),
                                ));
                            }
                            causes.push(l.clone());
                        }
                        other => {
                            if let Some(l) = other
                                .literals()
                                .into_iter()
                                .find(|l| random.contains_key(&l.atom.predicate))
                            {
                                return Err(Error::invalid(
                                    line,
                                    format!("random atom {} inside a condition", l.atom),
                                ));
                            }
                            condition.push(other.clone());
                        }
                    }
                }
                let clause = RandomClause {
                    id: ClauseId(next_id),
                    effect: head,
                    causes,
                    condition: Formula::And(condition),
                    probability,
                    line,
                };
                next_id += 1;
                let vars = clause.variables();
                check_range_restriction(&vars, &clause.condition.bound_vars(), line)?;
                program.random_part.push(clause);
            }
            Statement::Rule { head, body, line } => {
                arities.atom(&head, line)?;
                arities.formula(&body, line)?;
                let body = literal_body(&body, &random, line)?;
                let clause = InternalClause { head, body, line };
                let bound = Formula::And(clause.body.iter().cloned().map(Formula::Lit).collect())
                    .bound_vars();
                check_range_restriction(&clause.variables(), &bound, line)?;
                program.internal_part.push(clause);
            }
            Statement::Constraint { body, line } => {
                arities.formula(&body, line)?;
                let body = literal_body(&body, &random, line)?;
                let c = Constraint { body, line };
                let bound =
                    Formula::And(c.body.iter().cloned().map(Formula::Lit).collect()).bound_vars();
                check_range_restriction(&c.variables(), &bound, line)?;
                program.constraints.push(c);
            }
        }
    }

    let mut external = BTreeMap::new();
    for (p, n) in &arities.map {
        if !random.contains_key(p) && !internal.contains_key(p) {
            external.insert(p.clone(), *n);
        }
    }
    let used: BTreeSet<Symbol> = arities.used.clone();
    program.decls = Vocabulary {
        random,
        external,
        internal,
        declared_external: declared_external
            .into_keys()
            .filter(|p| !used.contains(p))
            .collect(),
    };
    Ok(program)
}

/// A `random p/N.` may follow the clauses that use `p`.
fn is_declared_later(statements: &[Statement], head: &Atom) -> bool {
    statements.iter().any(|s| {
        matches!(s, Statement::Decl { kind: DeclKind::Random, predicate, .. } if **predicate == *head.predicate)
    })
}

fn literal_body(
    body: &Formula,
    random: &BTreeMap<Symbol, usize>,
    line: usize,
) -> Result<Vec<Literal>> {
    body.conjuncts()
        .into_iter()
        .map(|f| match f {
            Formula::Lit(l) if random.contains_key(&l.atom.predicate) => Err(Error::invalid(
                line,
                format!("random atom {} inside a condition", l.atom),
            )),
            Formula::Lit(l) => Ok(l.clone()),
            Formula::Or(_) => Err(Error::invalid(
                line,
                "disjunction is only allowed in random clause conditions",
            )),
            Formula::And(_) => unreachable!("conjuncts are flattened"),
        })
        .collect()
}

fn check_range_restriction(vars: &[Symbol], bound: &BTreeSet<Symbol>, line: usize) -> Result<()> {
    if vars.len() > MAX_CLAUSE_VARS {
        return Err(Error::invalid(
            line,
            format!(
                "clause has {} variables, limit is {MAX_CLAUSE_VARS}",
                vars.len()
            ),
        ));
    }
    match vars.iter().find(|v| !bound.contains(*v)) {
        Some(v) => Err(Error::invalid(
            line,
            format!(
                "range restriction violated: variable {v} does not occur in a positive logical literal of the condition"
            ),
        )),
        None => Ok(()),
    }
}

#[derive(Default)]
struct Arities {
    map: BTreeMap<Symbol, usize>,
    /// Predicates occurring in some clause, as opposed to declarations only.
    used: BTreeSet<Symbol>,
}

impl Arities {
    fn record(&mut self, p: &Symbol, n: usize, line: usize) -> Result<()> {
        match self.map.get(p) {
            Some(&m) if m != n => Err(Error::invalid(
                line,
                format!("arity clash: {p} used with arity {n} and {m}"),
            )),
            _ => {
                self.map.insert(p.clone(), n);
                Ok(())
            }
        }
    }

    fn atom(&mut self, a: &Atom, line: usize) -> Result<()> {
        if a.is_builtin() {
            return Ok(());
        }
        self.used.insert(a.predicate.clone());
        self.record(&a.predicate, a.arity(), line)
    }

    fn formula(&mut self, f: &Formula, line: usize) -> Result<()> {
        let mut res = Ok(());
        f.walk(&mut |l| {
            if res.is_ok() {
                res = self.atom(&l.atom, line);
            }
        });
        res
    }
}

/// Parses ground facts over the program's external predicates.
pub fn parse_database(text: &str, program: &ProgramStructure) -> Result<ExternalDatabase> {
    let statements = Parser::new(text)?.statements()?;
    let mut db = ExternalDatabase {
        facts: BTreeSet::new(),
        constants: program.constants(),
    };
    for st in statements {
        let (head, line) = match st {
            Statement::Rule { head, body, line } if body == Formula::truth() => (head, line),
            Statement::Rule { line, .. }
            | Statement::Random { line, .. }
            | Statement::Constraint { line, .. }
            | Statement::Decl { line, .. } => {
                return Err(Error::invalid(
                    line,
                    "a database contains ground facts only",
                ))
            }
        };
        let fact = head
            .to_ground()
            .ok_or_else(|| Error::invalid(line, format!("non-ground fact {head}")))?;
        match program.decls.external.get(&fact.predicate) {
            None => {
                return Err(Error::invalid(
                    line,
                    format!(
                        "predicate {}/{} is not declared external",
                        fact.predicate,
                        fact.args.len()
                    ),
                ))
            }
            Some(&n) if n != fact.args.len() => {
                return Err(Error::invalid(
                    line,
                    format!(
                        "arity clash: {} has arity {n}, fact has {}",
                        fact.predicate,
                        fact.args.len()
                    ),
                ))
            }
            Some(_) => {}
        }
        db.constants.extend(fact.args.iter().cloned());
        db.facts.insert(fact);
    }
    Ok(db)
}

/// Builds a database from already-ground facts, validating them like
/// [`parse_database`].
pub fn database_from_facts(
    facts: impl IntoIterator<Item = GroundAtom>,
    program: &ProgramStructure,
) -> Result<ExternalDatabase> {
    let mut db = ExternalDatabase {
        facts: BTreeSet::new(),
        constants: program.constants(),
    };
    for fact in facts {
        if program.decls.external.get(&fact.predicate) != Some(&fact.args.len()) {
            return Err(Error::invalid(
                0,
                format!("fact {fact} does not match an external predicate"),
            ));
        }
        db.constants.extend(fact.args.iter().cloned());
        db.facts.insert(fact);
    }
    Ok(db)
}

/// Parses `indep(A, B, [Z1, ..., Zn])` against the program's vocabulary.
pub fn parse_query(text: &str, program: &ProgramStructure) -> Result<CIQuery> {
    let (a, b, zs) = Parser::new(text)?.query()?;
    let ground = |atom: Atom| -> Result<GroundAtom> {
        let g = atom
            .to_ground()
            .ok_or_else(|| Error::invalid(1, format!("non-ground atom {atom} in query")))?;
        match program.decls.arity(&g.predicate) {
            None => Err(Error::invalid(
                1,
                format!("unknown predicate {} in query", g.predicate),
            )),
            Some(n) if n != g.args.len() => Err(Error::invalid(
                1,
                format!("arity clash: {} has arity {n}", g.predicate),
            )),
            Some(_) if !program.decls.is_random(&g.predicate) => {
                Err(Error::invalid(1, format!("atom {g} is not random")))
            }
            Some(_) => Ok(g),
        }
    };
    let a = ground(a)?;
    let b = ground(b)?;
    let mut observations = Vec::new();
    for z in zs {
        let z = ground(z)?;
        if !observations.contains(&z) {
            observations.push(z);
        }
    }
    Ok(CIQuery { a, b, observations })
}

/// Parses a `.params` file: `<id> = <p>` lines where `<id>` is a clause
/// ordinal (`2`) or clause id (`rc2`), plus an optional `default = <p>`.
///
/// Probabilities written in the program are kept unless overridden; the
/// default fills the clauses that are still unspecified.
pub fn parse_params(text: &str, program: &ProgramStructure) -> Result<ParameterAssignment> {
    let mut params = ParameterAssignment::from_program(program);
    let mut default = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split(['%', '#']).next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::invalid(line, "expected `<clause> = <probability>`"))?;
        let key = key.trim();
        let p = parse_probability(value)
            .filter(in_unit_interval)
            .ok_or_else(|| Error::invalid(line, format!("bad probability `{}`", value.trim())))?;
        if key == "default" {
            default = Some(p);
            continue;
        }
        let ordinal: u32 = key
            .strip_prefix("rc")
            .or_else(|| key.strip_prefix("RC"))
            .unwrap_or(key)
            .parse()
            .map_err(|_| Error::invalid(line, format!("unknown clause `{key}`")))?;
        let id = ClauseId(ordinal);
        if program.clause(id).is_none() {
            return Err(Error::invalid(line, format!("no random clause {id}")));
        }
        params.set(id, p);
    }
    if let Some(p) = default {
        for rc in &program.random_part {
            params.0.entry(rc.id).or_insert_with(|| p.clone());
        }
    }
    Ok(params)
}
