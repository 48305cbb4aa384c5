use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Symbol = Arc<str>;

/// Exact probability in `[0, 1]`.
pub type Probability = BigRational;

/// A constant of the active domain.
///
/// Ordering is numeric between numerals and lexicographic otherwise, with
/// numerals sorting first, so `p(2)` precedes `p(10)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constant(Symbol);

impl Constant {
    pub fn new(name: impl AsRef<str>) -> Self {
        Constant(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn numeral(&self) -> Option<u128> {
        self.0.parse().ok()
    }
}

impl From<u64> for Constant {
    fn from(n: u64) -> Self {
        Constant::new(n.to_string())
    }
}

impl Ord for Constant {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.numeral(), other.numeral()) {
            (Some(a), Some(b)) => a.cmp(&b).then_with(|| self.0.cmp(&other.0)),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for Constant {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(Constant),
    Var(Symbol),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(Arc::from(name))
    }

    pub fn constant(name: &str) -> Self {
        Term::Const(Constant::new(name))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => c.fmt(f),
            Term::Var(v) => f.write_str(v),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Builtin {
    Equals,
    NotEquals,
}

impl Builtin {
    pub fn symbol(self) -> &'static str {
        match self {
            Builtin::Equals => "=",
            Builtin::NotEquals => "\\=",
        }
    }
}

/// `r(t1, ..., tn)` or a builtin comparison `t1 = t2` / `t1 \= t2`.
///
/// Builtin atoms always carry exactly two arguments and use the operator
/// symbol as their predicate name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: Symbol,
    pub args: Vec<Term>,
    pub builtin: Option<Builtin>,
}

impl Atom {
    pub fn new(predicate: &str, args: Vec<Term>) -> Self {
        Atom {
            predicate: Arc::from(predicate),
            args,
            builtin: None,
        }
    }

    pub fn builtin(op: Builtin, lhs: Term, rhs: Term) -> Self {
        Atom {
            predicate: Arc::from(op.symbol()),
            args: vec![lhs, rhs],
            builtin: Some(op),
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_builtin(&self) -> bool {
        self.builtin.is_some()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| !t.is_var())
    }

    /// Appends variables not yet in `out`, in order of first occurrence.
    pub fn collect_vars(&self, out: &mut Vec<Symbol>) {
        for t in &self.args {
            if let Term::Var(v) = t {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        }
    }

    pub fn to_ground(&self) -> Option<GroundAtom> {
        if self.is_builtin() {
            return None;
        }
        let args = self
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => Some(c.clone()),
                Term::Var(_) => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(GroundAtom {
            predicate: self.predicate.clone(),
            args,
        })
    }

    /// Instantiates the atom under `subst`; unbound variables yield `None`.
    pub fn instantiate(&self, subst: &BTreeMap<Symbol, Constant>) -> Option<GroundAtom> {
        let args = self
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => Some(c.clone()),
                Term::Var(v) => subst.get(v).cloned(),
            })
            .collect::<Option<Vec<_>>>()?;
        Some(GroundAtom {
            predicate: self.predicate.clone(),
            args,
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(op) = self.builtin {
            return write!(f, "{} {} {}", self.args[0], op.symbol(), self.args[1]);
        }
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                a.fmt(f)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal {
            atom,
            positive: true,
        }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal {
            atom,
            positive: false,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("\\+ ")?;
        }
        self.atom.fmt(f)
    }
}

/// Condition of a random clause: literals under conjunction and disjunction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Lit(Literal),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn truth() -> Self {
        Formula::And(Vec::new())
    }

    pub fn literals(&self) -> Vec<&Literal> {
        let mut out = Vec::new();
        self.walk(&mut |l| out.push(l));
        out
    }

    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Literal)) {
        match self {
            Formula::Lit(l) => f(l),
            Formula::And(xs) | Formula::Or(xs) => xs.iter().for_each(|x| x.walk(f)),
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<Symbol>) {
        self.walk(&mut |l| l.atom.collect_vars(out));
    }

    /// Variables bound by positive non-builtin literals: union over
    /// conjunctions, intersection over disjunctions.
    pub fn bound_vars(&self) -> BTreeSet<Symbol> {
        match self {
            Formula::Lit(l) if l.positive && !l.atom.is_builtin() => {
                let mut v = Vec::new();
                l.atom.collect_vars(&mut v);
                v.into_iter().collect()
            }
            Formula::Lit(_) => BTreeSet::new(),
            Formula::And(xs) => xs.iter().flat_map(|x| x.bound_vars()).collect(),
            Formula::Or(xs) => {
                let mut it = xs.iter().map(|x| x.bound_vars());
                let first = it.next().unwrap_or_default();
                it.fold(first, |acc, s| acc.intersection(&s).cloned().collect())
            }
        }
    }

    /// Top-level conjuncts, flattening nested conjunctions.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        match self {
            Formula::And(xs) => xs.iter().flat_map(|x| x.conjuncts()).collect(),
            other => vec![other],
        }
    }

    fn fmt_nested(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Lit(l) => write!(f, "{l}"),
            Formula::And(xs) => {
                if xs.is_empty() {
                    return f.write_str("true");
                }
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    x.fmt_nested(f)?;
                }
                Ok(())
            }
            Formula::Or(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    x.fmt_nested(f)?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_nested(f)
    }
}

/// Stable identifier of a random clause: its 1-based ordinal in the file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClauseId(pub u32);

impl fmt::Display for ClauseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rc{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomClause {
    pub id: ClauseId,
    pub effect: Atom,
    /// Random literals, compared as a set but kept in source order.
    pub causes: Vec<Literal>,
    /// Logical condition; always a top-level conjunction.
    pub condition: Formula,
    pub probability: Option<Probability>,
    pub line: usize,
}

impl RandomClause {
    /// Clause variables in first-occurrence order over effect, causes and
    /// condition. Substitutions of this clause are keyed by this order.
    pub fn variables(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.effect.collect_vars(&mut out);
        for c in &self.causes {
            c.atom.collect_vars(&mut out);
        }
        self.condition.collect_vars(&mut out);
        out
    }

    pub fn is_positive(&self) -> bool {
        self.causes.iter().all(|c| c.positive)
    }
}

impl fmt::Display for RandomClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.probability {
            Some(p) => write!(f, "{} :: {}", format_probability(p), self.effect)?,
            None => write!(f, "_ :: {}", self.effect)?,
        }
        let conds = self.condition.conjuncts();
        let conds: Vec<_> = conds
            .into_iter()
            .filter(|c| !matches!(c, Formula::And(xs) if xs.is_empty()))
            .collect();
        if !self.causes.is_empty() || !conds.is_empty() {
            f.write_str(" :- ")?;
            let mut first = true;
            for c in &self.causes {
                if !first {
                    f.write_str(", ")?;
                }
                first = false;
                c.fmt(f)?;
            }
            for c in conds {
                if !first {
                    f.write_str(", ")?;
                }
                first = false;
                c.fmt(f)?;
            }
        }
        f.write_str(".")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InternalClause {
    pub head: Atom,
    pub body: Vec<Literal>,
    pub line: usize,
}

impl InternalClause {
    pub fn variables(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.head.collect_vars(&mut out);
        for l in &self.body {
            l.atom.collect_vars(&mut out);
        }
        out
    }
}

impl fmt::Display for InternalClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.head.fmt(f)?;
        write_body(f, &self.body)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub body: Vec<Literal>,
    pub line: usize,
}

impl Constraint {
    pub fn variables(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        for l in &self.body {
            l.atom.collect_vars(&mut out);
        }
        out
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_body(f, &self.body)
    }
}

fn write_body(f: &mut fmt::Formatter<'_>, body: &[Literal]) -> fmt::Result {
    if !body.is_empty() {
        f.write_str(" :- ")?;
        for (i, l) in body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}")?;
        }
    }
    f.write_str(".")
}

/// Predicate vocabularies; the three maps are pairwise disjoint.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub random: BTreeMap<Symbol, usize>,
    pub external: BTreeMap<Symbol, usize>,
    pub internal: BTreeMap<Symbol, usize>,
    /// External predicates declared with `external p/N.` that no clause uses.
    pub declared_external: BTreeSet<Symbol>,
}

impl Vocabulary {
    pub fn is_random(&self, p: &str) -> bool {
        self.random.contains_key(p)
    }

    pub fn is_internal(&self, p: &str) -> bool {
        self.internal.contains_key(p)
    }

    pub fn is_external(&self, p: &str) -> bool {
        self.external.contains_key(p)
    }

    pub fn arity(&self, p: &str) -> Option<usize> {
        self.random
            .get(p)
            .or_else(|| self.external.get(p))
            .or_else(|| self.internal.get(p))
            .copied()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProgramStructure {
    pub decls: Vocabulary,
    pub random_part: Vec<RandomClause>,
    pub internal_part: Vec<InternalClause>,
    pub constraints: Vec<Constraint>,
}

impl ProgramStructure {
    pub fn clause(&self, id: ClauseId) -> Option<&RandomClause> {
        self.random_part.iter().find(|c| c.id == id)
    }

    pub fn is_positive(&self) -> bool {
        self.random_part.iter().all(RandomClause::is_positive)
    }

    /// Every constant mentioned anywhere in the program.
    pub fn constants(&self) -> BTreeSet<Constant> {
        let mut out = BTreeSet::new();
        let mut add = |a: &Atom| {
            for t in &a.args {
                if let Term::Const(c) = t {
                    out.insert(c.clone());
                }
            }
        };
        for rc in &self.random_part {
            add(&rc.effect);
            rc.causes.iter().for_each(|l| add(&l.atom));
            rc.condition.walk(&mut |l| add(&l.atom));
        }
        for ic in &self.internal_part {
            add(&ic.head);
            ic.body.iter().for_each(|l| add(&l.atom));
        }
        for c in &self.constraints {
            c.body.iter().for_each(|l| add(&l.atom));
        }
        out
    }
}

/// Canonical text: declarations, then one clause per line.
impl fmt::Display for ProgramStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, n) in &self.decls.random {
            writeln!(f, "random {p}/{n}.")?;
        }
        for p in &self.decls.declared_external {
            writeln!(f, "external {p}/{}.", self.decls.external[p])?;
        }
        for rc in &self.random_part {
            writeln!(f, "{rc}")?;
        }
        for ic in &self.internal_part {
            writeln!(f, "{ic}")?;
        }
        for c in &self.constraints {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub predicate: Symbol,
    pub args: Vec<Constant>,
}

impl GroundAtom {
    pub fn new<C: Into<Constant>>(predicate: &str, args: impl IntoIterator<Item = C>) -> Self {
        GroundAtom {
            predicate: Arc::from(predicate),
            args: args.into_iter().map(Into::into).collect(),
        }
    }
}

impl From<&str> for Constant {
    fn from(s: &str) -> Self {
        Constant::new(s)
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                a.fmt(f)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExternalDatabase {
    pub facts: BTreeSet<GroundAtom>,
    /// Active domain: constants of the program and of the facts.
    pub constants: BTreeSet<Constant>,
}

impl ExternalDatabase {
    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn count(&self, predicate: &str) -> usize {
        self.facts
            .iter()
            .filter(|f| &*f.predicate == predicate)
            .count()
    }
}

impl fmt::Display for ExternalDatabase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for fact in &self.facts {
            writeln!(f, "{fact}.")?;
        }
        Ok(())
    }
}

/// Is `a` independent of `b` given `observations`?
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CIQuery {
    pub a: GroundAtom,
    pub b: GroundAtom,
    pub observations: Vec<GroundAtom>,
}

impl fmt::Display for CIQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "indep({}, {}, [", self.a, self.b)?;
        for (i, z) in self.observations.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            z.fmt(f)?;
        }
        f.write_str("])")
    }
}

/// Probability per random clause.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParameterAssignment(pub BTreeMap<ClauseId, Probability>);

impl ParameterAssignment {
    /// The probabilities written in the program itself.
    pub fn from_program(program: &ProgramStructure) -> Self {
        ParameterAssignment(
            program
                .random_part
                .iter()
                .filter_map(|rc| rc.probability.clone().map(|p| (rc.id, p)))
                .collect(),
        )
    }

    /// Same probability for every clause.
    pub fn uniform(program: &ProgramStructure, p: Probability) -> Self {
        ParameterAssignment(
            program
                .random_part
                .iter()
                .map(|rc| (rc.id, p.clone()))
                .collect(),
        )
    }

    pub fn get(&self, id: ClauseId) -> Option<&Probability> {
        self.0.get(&id)
    }

    pub fn set(&mut self, id: ClauseId, p: Probability) {
        self.0.insert(id, p);
    }

    pub fn is_total(&self, program: &ProgramStructure) -> bool {
        program
            .random_part
            .iter()
            .all(|rc| self.0.contains_key(&rc.id))
    }
}

/// Decimal when the denominator has only factors 2 and 5, `n/d` otherwise.
pub fn format_probability(p: &Probability) -> String {
    let p = p.reduced();
    if p.denom().is_one() {
        return p.numer().to_string();
    }
    let mut d = p.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let ten = BigInt::from(10);
    let (mut twos, mut fives) = (0u32, 0u32);
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", p.numer(), p.denom());
    }
    let digits = twos.max(fives);
    let scaled = p.numer() * ten.pow(digits) / p.denom();
    let s = scaled.to_string();
    let (neg, s) = match s.strip_prefix('-') {
        Some(rest) => ("-", rest.to_string()),
        None => ("", s),
    };
    let s = format!("{:0>width$}", s, width = digits as usize + 1);
    let (int, frac) = s.split_at(s.len() - digits as usize);
    format!("{neg}{int}.{frac}")
}

/// Parses `0.05`, `1`, or `3/7` into an exact rational.
pub fn parse_probability(text: &str) -> Option<Probability> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (int, frac) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let numer: BigInt = digits.parse().ok()?;
    let denom = BigInt::from(10).pow(frac.len() as u32);
    Some(BigRational::new(numer, denom))
}

pub fn in_unit_interval(p: &Probability) -> bool {
    *p >= BigRational::zero() && *p <= BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Probability {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn probabilities_parse_exactly() {
        assert_eq!(parse_probability("0.05"), Some(q(1, 20)));
        assert_eq!(parse_probability("0.8"), Some(q(4, 5)));
        assert_eq!(parse_probability("1"), Some(q(1, 1)));
        assert_eq!(parse_probability("2/6"), Some(q(1, 3)));
        assert_eq!(parse_probability(".5"), Some(q(1, 2)));
        assert_eq!(parse_probability("x"), None);
        assert_eq!(parse_probability("1/0"), None);
    }

    #[test]
    fn probabilities_format_canonically() {
        assert_eq!(format_probability(&q(1, 20)), "0.05");
        assert_eq!(format_probability(&q(96, 625)), "0.1536");
        assert_eq!(format_probability(&q(1, 3)), "1/3");
        assert_eq!(format_probability(&q(1, 1)), "1");
        assert_eq!(format_probability(&q(0, 1)), "0");
    }

    #[test]
    fn constants_order_numerically() {
        let mut cs = [Constant::new("10"), Constant::new("b"), Constant::new("2")];
        cs.sort();
        let names: Vec<_> = cs.iter().map(Constant::as_str).collect();
        assert_eq!(names, ["2", "10", "b"]);
    }

    #[test]
    fn bound_vars_intersect_disjunctions() {
        let x = || Term::var("X");
        let y = || Term::var("Y");
        let f = Formula::And(vec![
            Formula::Lit(Literal::pos(Atom::new("a", vec![x()]))),
            Formula::Or(vec![
                Formula::Lit(Literal::pos(Atom::new("b", vec![x(), y()]))),
                Formula::Lit(Literal::pos(Atom::new("c", vec![y()]))),
            ]),
        ]);
        let bound: Vec<_> = f.bound_vars().into_iter().collect();
        assert_eq!(bound, vec![Arc::from("X"), Arc::from("Y")]);
    }
}
