//! Compiled conditions and a backtracking join over a Herbrand model.
//!
//! Variables are numbered slots; a binding is a vector of optional constant
//! ids. Conjunctions are scheduled greedily: ground filters first, then the
//! positive literal with the most bound arguments, then equality bindings,
//! and finally disjunctions that bind their remaining variables in every
//! alternative.

use std::collections::BTreeSet;

use super::model::{HerbrandModel, Relation, Universe};
use crate::syntax::{Atom, Builtin, Formula, Literal, Symbol, Term};

/// Constant outside the active domain; matches nothing.
const ABSENT: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub(crate) enum CTerm {
    Const(u32),
    Var(usize),
}

#[derive(Clone, Debug)]
pub(crate) struct CLit {
    pub pred: Symbol,
    pub args: Vec<CTerm>,
    pub builtin: Option<Builtin>,
    pub positive: bool,
    /// Position in the compiled body, used to target the delta relation.
    pub id: usize,
}

#[derive(Clone, Debug)]
pub(crate) enum CFormula {
    Lit(CLit, u64),
    And(Vec<CFormula>, u64, u64),
    Or(Vec<CFormula>, u64, u64),
}

impl CFormula {
    fn vars(&self) -> u64 {
        match self {
            CFormula::Lit(_, v) => *v,
            CFormula::And(_, v, _) | CFormula::Or(_, v, _) => *v,
        }
    }

    fn binds(&self) -> u64 {
        match self {
            CFormula::Lit(l, v) if l.positive && l.builtin.is_none() => *v,
            CFormula::Lit(..) => 0,
            CFormula::And(_, _, b) | CFormula::Or(_, _, b) => *b,
        }
    }
}

/// Maps clause variables to slots and constants to ids.
pub(crate) struct Compiler<'u> {
    universe: &'u Universe,
    vars: Vec<Symbol>,
    next_id: usize,
}

impl<'u> Compiler<'u> {
    pub fn new(universe: &'u Universe, vars: Vec<Symbol>) -> Self {
        Compiler {
            universe,
            vars,
            next_id: 0,
        }
    }

    pub fn slot(&self, v: &Symbol) -> usize {
        self.vars
            .iter()
            .position(|x| x == v)
            .expect("variable declared in clause variable list")
    }

    pub fn term(&self, t: &Term) -> CTerm {
        match t {
            Term::Const(c) => CTerm::Const(self.universe.id(c).unwrap_or(ABSENT)),
            Term::Var(v) => CTerm::Var(self.slot(v)),
        }
    }

    pub fn atom_terms(&self, a: &Atom) -> Vec<CTerm> {
        a.args.iter().map(|t| self.term(t)).collect()
    }

    fn mask(args: &[CTerm]) -> u64 {
        args.iter().fold(0, |m, t| match t {
            CTerm::Var(i) => m | (1 << i),
            CTerm::Const(_) => m,
        })
    }

    pub fn literal(&mut self, l: &Literal) -> CFormula {
        let args = self.atom_terms(&l.atom);
        let mask = Self::mask(&args);
        let id = self.next_id;
        self.next_id += 1;
        CFormula::Lit(
            CLit {
                pred: l.atom.predicate.clone(),
                args,
                builtin: l.atom.builtin,
                positive: l.positive,
                id,
            },
            mask,
        )
    }

    pub fn formula(&mut self, f: &Formula) -> CFormula {
        match f {
            Formula::Lit(l) => self.literal(l),
            Formula::And(xs) => {
                let items: Vec<_> = xs.iter().map(|x| self.formula(x)).collect();
                let vars = items.iter().fold(0, |m, x| m | x.vars());
                let binds = items.iter().fold(0, |m, x| m | x.binds());
                CFormula::And(items, vars, binds)
            }
            Formula::Or(xs) => {
                let items: Vec<_> = xs.iter().map(|x| self.formula(x)).collect();
                let vars = items.iter().fold(0, |m, x| m | x.vars());
                let binds = items
                    .iter()
                    .map(|x| x.binds())
                    .reduce(|a, b| a & b)
                    .unwrap_or(0);
                CFormula::Or(items, vars, binds)
            }
        }
    }

    pub fn body(&mut self, lits: &[Literal]) -> CFormula {
        let f = Formula::And(lits.iter().cloned().map(Formula::Lit).collect());
        self.formula(&f)
    }
}

pub(crate) type Binding = Vec<Option<u32>>;

fn bound_mask(b: &Binding) -> u64 {
    b.iter()
        .enumerate()
        .fold(0, |m, (i, v)| if v.is_some() { m | (1 << i) } else { m })
}

fn value(t: &CTerm, b: &Binding) -> Option<u32> {
    match t {
        CTerm::Const(c) => Some(*c),
        CTerm::Var(i) => b[*i],
    }
}

/// Join over a model, optionally reading one literal from a delta relation.
pub(crate) struct Solver<'m> {
    model: &'m HerbrandModel,
    delta: Option<(usize, &'m Relation)>,
}

impl<'m> Solver<'m> {
    pub fn new(model: &'m HerbrandModel) -> Self {
        Solver { model, delta: None }
    }

    pub fn with_delta(model: &'m HerbrandModel, literal: usize, delta: &'m Relation) -> Self {
        Solver {
            model,
            delta: Some((literal, delta)),
        }
    }

    fn relation(&self, l: &CLit) -> Option<&'m Relation> {
        match self.delta {
            Some((id, rel)) if id == l.id => Some(rel),
            _ => self.model.relation(&l.pred),
        }
    }

    /// Truth of a formula whose variables are all bound.
    pub fn holds(&self, f: &CFormula, b: &Binding) -> bool {
        match f {
            CFormula::Lit(l, _) => {
                let vals: Vec<u32> = l
                    .args
                    .iter()
                    .map(|t| value(t, b).expect("filter evaluated on bound variables"))
                    .collect();
                let truth = match l.builtin {
                    Some(Builtin::Equals) => vals[0] == vals[1],
                    Some(Builtin::NotEquals) => vals[0] != vals[1],
                    None => self.relation(l).is_some_and(|r| r.contains(&vals)),
                };
                truth == l.positive
            }
            CFormula::And(xs, ..) => xs.iter().all(|x| self.holds(x, b)),
            CFormula::Or(xs, ..) => xs.iter().any(|x| self.holds(x, b)),
        }
    }

    /// Calls `emit` for every extension of `binding` satisfying `f`. The
    /// same extension may be emitted more than once.
    pub fn solve(&self, f: &CFormula, binding: &mut Binding, emit: &mut dyn FnMut(&Binding)) {
        let items: Vec<&CFormula> = match f {
            CFormula::And(xs, ..) => xs.iter().collect(),
            other => vec![other],
        };
        let mut used = vec![false; items.len()];
        self.conj(&items, &mut used, binding, emit);
    }

    /// All satisfying bindings of `f`, deduplicated, restricted to `keep`.
    pub fn solutions(&self, f: &CFormula, nvars: usize, keep: u64) -> BTreeSet<Vec<Option<u32>>> {
        let mut out = BTreeSet::new();
        let mut b = vec![None; nvars];
        self.solve(f, &mut b, &mut |b| {
            out.insert(
                b.iter()
                    .enumerate()
                    .map(|(i, v)| if keep & (1 << i) != 0 { *v } else { None })
                    .collect(),
            );
        });
        out
    }

    fn conj(
        &self,
        items: &[&CFormula],
        used: &mut Vec<bool>,
        b: &mut Binding,
        emit: &mut dyn FnMut(&Binding),
    ) {
        let bound = bound_mask(b);
        let mut pick: Option<(usize, u32)> = None;
        for (i, item) in items.iter().enumerate() {
            if used[i] {
                continue;
            }
            let free = item.vars() & !bound;
            let rank = if free == 0 {
                u32::MAX
            } else {
                match item {
                    CFormula::Lit(l, _) if l.positive && l.builtin.is_none() => {
                        1000 + l.args.iter().filter(|t| value(t, b).is_some()).count() as u32
                    }
                    CFormula::Lit(l, _)
                        if l.positive
                            && l.builtin == Some(Builtin::Equals)
                            && free.count_ones() == 1 =>
                    {
                        500
                    }
                    CFormula::And(..) | CFormula::Or(..) if free & !item.binds() == 0 => 100,
                    _ => 0,
                }
            };
            if rank > 0 && pick.is_none_or(|(_, r)| rank > r) {
                pick = Some((i, rank));
            }
        }
        let Some((i, rank)) = pick else {
            if used.iter().all(|u| *u) {
                emit(b);
            } else {
                debug_assert!(false, "unsafe condition: no schedulable item");
            }
            return;
        };
        used[i] = true;
        let item = items[i];
        if rank == u32::MAX {
            if self.holds(item, b) {
                self.conj(items, used, b, emit);
            }
        } else {
            match item {
                CFormula::Lit(l, _) if l.builtin.is_none() => {
                    if let Some(rel) = self.relation(l) {
                        for t in rel.iter() {
                            let mut assigned: Vec<usize> = Vec::new();
                            let mut ok = true;
                            for (arg, &c) in l.args.iter().zip(t) {
                                match arg {
                                    CTerm::Const(k) => ok = *k == c,
                                    CTerm::Var(v) => match b[*v] {
                                        Some(x) => ok = x == c,
                                        None => {
                                            b[*v] = Some(c);
                                            assigned.push(*v);
                                        }
                                    },
                                }
                                if !ok {
                                    break;
                                }
                            }
                            if ok {
                                self.conj(items, used, b, emit);
                            }
                            for v in assigned {
                                b[v] = None;
                            }
                        }
                    }
                }
                CFormula::Lit(l, _) => {
                    // positive `=` with exactly one side bound
                    let (lhs, rhs) = (&l.args[0], &l.args[1]);
                    let (slot, val) = match (value(lhs, b), value(rhs, b)) {
                        (Some(x), None) => (rhs, x),
                        (None, Some(x)) => (lhs, x),
                        _ => unreachable!("equality binding with one free side"),
                    };
                    let CTerm::Var(v) = slot else { unreachable!() };
                    b[*v] = Some(val);
                    self.conj(items, used, b, emit);
                    b[*v] = None;
                }
                CFormula::And(..) | CFormula::Or(..) => {
                    let alts: Vec<&CFormula> = match item {
                        CFormula::Or(xs, ..) => xs.iter().collect(),
                        other => vec![other],
                    };
                    let free = item.vars() & !bound;
                    let mut extensions = BTreeSet::new();
                    for alt in alts {
                        let mut scratch = b.clone();
                        self.solve(alt, &mut scratch, &mut |nb| {
                            extensions.insert(
                                nb.iter()
                                    .enumerate()
                                    .filter(|(i, _)| free & (1 << i) != 0)
                                    .map(|(i, v)| (i, v.expect("disjunct binds its variables")))
                                    .collect::<Vec<_>>(),
                            );
                        });
                    }
                    for ext in extensions {
                        for &(v, c) in &ext {
                            b[v] = Some(c);
                        }
                        self.conj(items, used, b, emit);
                        for &(v, _) in &ext {
                            b[v] = None;
                        }
                    }
                }
            }
        }
        used[i] = false;
    }
}
