//! Exact inference by enumerating every valuation of the error terms.
//!
//! Each error term `u` with probability `a/d` contributes a factor `a` when
//! true and `d - a` when false, so every valuation has an integer weight over
//! the common denominator `D = Π d`. [`Oracle::new`] solves the equation
//! system once per valuation and aggregates weights per world (assignment of
//! all ground variables). All later questions are answered from that world
//! table with exact integer arithmetic; `u128` is used while `D² < 2¹²⁶`,
//! arbitrary precision otherwise.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::deadline::Deadline;
use crate::dsep::{d_connected_set, Dag, ObservationSet};
use crate::error::{Error, Result};
use crate::grounding::{EquationSystem, Instance};
use crate::syntax::{GroundAtom, ParameterAssignment};

/// Default limit on the number of error terms.
pub const DEFAULT_GUARD: usize = 22;
/// Worlds are stored as 128-bit masks.
pub const MAX_WORLD_VARS: usize = 128;
/// Default bound on the size of conditioning sets in sweeps.
pub const DEFAULT_MAX_Z: usize = 3;

trait Weight: Clone + Ord + Zero + One + Add<Output = Self> + Mul<Output = Self> {
    fn from_big(x: &BigUint) -> Self;
    fn to_big(&self) -> BigInt;
}

impl Weight for u128 {
    fn from_big(x: &BigUint) -> Self {
        x.to_u128().expect("checked to fit")
    }

    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Weight for BigUint {
    fn from_big(x: &BigUint) -> Self {
        x.clone()
    }

    fn to_big(&self) -> BigInt {
        BigInt::from(self.clone())
    }
}

#[derive(Clone, Debug)]
struct Table<W> {
    denom: W,
    /// Worlds with positive weight, sorted by mask.
    worlds: Vec<(u128, W)>,
}

#[derive(Clone, Debug)]
enum Tables {
    Small(Table<u128>),
    Big(Table<BigUint>),
}

macro_rules! with_table {
    ($self:expr, $t:ident => $body:expr) => {
        match &$self.tables {
            Tables::Small($t) => $body,
            Tables::Big($t) => $body,
        }
    };
}

/// One disjunct: (error term, positive mask, negative mask).
type Term = (usize, u128, u128);

/// Compiled equation: var := OR over its disjuncts.
struct Compiled {
    order: Vec<(usize, Vec<Term>)>,
}

impl Compiled {
    fn new(eqs: &EquationSystem) -> Self {
        let order = eqs
            .order
            .iter()
            .map(|&v| {
                let ds = eqs.equations[v]
                    .disjuncts
                    .iter()
                    .map(|d| {
                        let (mut pos, mut neg) = (0u128, 0u128);
                        for &(n, p) in &d.lits {
                            if p {
                                pos |= 1 << n;
                            } else {
                                neg |= 1 << n;
                            }
                        }
                        (d.u, pos, neg)
                    })
                    .collect();
                (v, ds)
            })
            .collect();
        Compiled { order }
    }

    fn world(&self, u: u64) -> u128 {
        let mut w = 0u128;
        for (v, ds) in &self.order {
            if ds
                .iter()
                .any(|&(i, pos, neg)| u >> i & 1 == 1 && w & pos == pos && w & neg == 0)
            {
                w |= 1 << v;
            }
        }
        w
    }
}

fn factors(eqs: &EquationSystem) -> (Vec<BigUint>, Vec<BigUint>, BigUint) {
    let mut yes = Vec::new();
    let mut no = Vec::new();
    let mut denom = BigUint::one();
    for u in &eqs.error_terms {
        let p = u.probability.reduced();
        let a = p.numer().to_biguint().expect("probability is non-negative");
        let d = p.denom().to_biguint().expect("positive denominator");
        no.push(&d - &a);
        yes.push(a);
        denom *= d;
    }
    (yes, no, denom)
}

/// Product weights of all valuations of the given error terms, indexed by
/// the valuation bits.
fn half_weights<W: Weight>(yes: &[W], no: &[W]) -> Vec<W> {
    let mut out = vec![W::one()];
    for (y, n) in yes.iter().zip(no) {
        let mut next = Vec::with_capacity(out.len() * 2);
        next.extend(out.iter().map(|w| w.clone() * n.clone()));
        next.extend(out.iter().map(|w| w.clone() * y.clone()));
        out = next;
    }
    out
}

fn enumerate<W: Weight>(
    eqs: &EquationSystem,
    compiled: &Compiled,
    deadline: &Deadline,
) -> Result<Table<W>> {
    let (yes, no, denom) = factors(eqs);
    let yes: Vec<W> = yes.iter().map(W::from_big).collect();
    let no: Vec<W> = no.iter().map(W::from_big).collect();
    let n = yes.len();
    let k = n / 2;
    let lo = half_weights(&yes[..k], &no[..k]);
    let hi = half_weights(&yes[k..], &no[k..]);
    let mut acc: HashMap<u128, W> = HashMap::new();
    for h in 0..hi.len() as u64 {
        deadline.check()?;
        if hi[h as usize].is_zero() {
            continue;
        }
        for l in 0..lo.len() as u64 {
            let w = lo[l as usize].clone() * hi[h as usize].clone();
            if w.is_zero() {
                continue;
            }
            let world = compiled.world(h << k | l);
            let e = acc.entry(world).or_insert_with(W::zero);
            *e = e.clone() + w;
        }
    }
    let mut worlds: Vec<(u128, W)> = acc.into_iter().collect();
    worlds.sort_by_key(|(m, _)| *m);
    Ok(Table {
        denom: W::from_big(&denom),
        worlds,
    })
}

fn marginal<W: Weight>(t: &Table<W>, vars: &[usize]) -> HashMap<u64, BigRational> {
    let mut acc: HashMap<u64, W> = HashMap::new();
    for (m, w) in &t.worlds {
        let e = acc.entry(key(*m, vars)).or_insert_with(W::zero);
        *e = e.clone() + w.clone();
    }
    acc.into_iter()
        .map(|(k, w)| (k, ratio(&w, &t.denom)))
        .collect()
}

fn key(world: u128, vars: &[usize]) -> u64 {
    vars.iter()
        .enumerate()
        .fold(0, |k, (i, &v)| k | (((world >> v) & 1) as u64) << i)
}

fn bits(key: u64, len: usize) -> Vec<bool> {
    (0..len).map(|i| key >> i & 1 == 1).collect()
}

fn ratio<W: Weight>(num: &W, den: &W) -> BigRational {
    BigRational::new(num.to_big(), den.to_big())
}

/// Exact marginal distribution of a tuple of variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointTable {
    pub vars: Vec<GroundAtom>,
    /// Every assignment of `vars`, including those of probability zero.
    pub probabilities: BTreeMap<Vec<bool>, BigRational>,
}

impl JointTable {
    pub fn total(&self) -> BigRational {
        self.probabilities
            .values()
            .fold(BigRational::zero(), |a, b| a + b)
    }
}

/// A value combination breaking the product rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub a: Vec<bool>,
    pub b: Vec<bool>,
    pub z: Vec<bool>,
    /// π(A = a, B = b | Z = z)
    pub lhs: BigRational,
    /// π(A = a | Z = z) · π(B = b | Z = z)
    pub rhs: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CIVerdict {
    pub independent: bool,
    pub counterexample: Option<Counterexample>,
    /// Observation contexts of probability zero, where the conditional is
    /// undefined.
    pub skipped_contexts: u64,
}

impl fmt::Display for CIVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.independent {
            "independent"
        } else {
            "dependent"
        })
    }
}

/// Text form of a rational: `num/den (decimal)`.
pub fn format_rational(r: &BigRational) -> String {
    let approx = r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN);
    format!("{}/{} ({approx:.6})", r.numer(), r.denom())
}

fn rational_text(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl CIVerdict {
    pub fn to_json(&self) -> Value {
        let cx = self.counterexample.as_ref().map(|c| {
            json!({
                "a": c.a, "b": c.b, "z": c.z,
                "lhs": rational_text(&c.lhs),
                "rhs": rational_text(&c.rhs),
            })
        });
        json!({
            "independent": self.independent,
            "counterexample": cx,
            "skipped_contexts": self.skipped_contexts,
        })
    }
}

/// World table of one equation system.
#[derive(Clone, Debug)]
pub struct Oracle {
    vars: Vec<GroundAtom>,
    error_terms: usize,
    tables: Tables,
}

impl Oracle {
    /// Enumerates all `2^n` valuations of the `n` error terms. Fails when
    /// `n > guard`, when there are more than 128 ground variables, or when
    /// the deadline passes.
    pub fn new(eqs: &EquationSystem, guard: usize, deadline: &Deadline) -> Result<Self> {
        let n = eqs.error_terms.len();
        if n > guard || n > 63 {
            return Err(Error::GuardExceeded {
                required: n,
                guard: guard.min(63),
            });
        }
        if eqs.vars.len() > MAX_WORLD_VARS {
            return Err(Error::SizeGuard {
                what: "ground graph",
                size: eqs.vars.len(),
                limit: MAX_WORLD_VARS,
            });
        }
        let compiled = Compiled::new(eqs);
        let (_, _, denom) = factors(eqs);
        let tables = if denom.bits() < 63 {
            Tables::Small(enumerate(eqs, &compiled, deadline)?)
        } else {
            Tables::Big(enumerate(eqs, &compiled, deadline)?)
        };
        Ok(Oracle {
            vars: eqs.vars.clone(),
            error_terms: n,
            tables,
        })
    }

    /// Builds the equation system of an already grounded instance and
    /// enumerates it.
    pub fn for_instance(
        inst: &Instance,
        params: &ParameterAssignment,
        guard: usize,
        deadline: &Deadline,
    ) -> Result<Self> {
        Self::new(&inst.equations(params)?, guard, deadline)
    }

    pub fn vars(&self) -> &[GroundAtom] {
        &self.vars
    }

    pub fn error_terms(&self) -> usize {
        self.error_terms
    }

    /// Number of distinct worlds of positive probability.
    pub fn world_count(&self) -> usize {
        with_table!(self, t => t.worlds.len())
    }

    /// Every world of positive probability with its probability.
    pub fn worlds(&self) -> Vec<(Vec<bool>, BigRational)> {
        let n = self.vars.len();
        with_table!(self, t => t
            .worlds
            .iter()
            .map(|(m, w)| ((0..n).map(|i| m >> i & 1 == 1).collect(), ratio(w, &t.denom)))
            .collect())
    }

    /// π(all listed variables take the listed values).
    pub fn probability_of(&self, assignment: &[(usize, bool)]) -> BigRational {
        let (mut care, mut want) = (0u128, 0u128);
        for &(v, b) in assignment {
            care |= 1 << v;
            if b {
                want |= 1 << v;
            }
        }
        with_table!(self, t => {
            let sum = t
                .worlds
                .iter()
                .filter(|(m, _)| m & care == want)
                .fold(Zero::zero(), |a, (_, w)| a + w);
            ratio(&sum, &t.denom)
        })
    }

    /// π(v = true).
    pub fn probability(&self, v: usize) -> BigRational {
        self.probability_of(&[(v, true)])
    }

    pub fn joint(&self, vars: &[usize]) -> Result<JointTable> {
        if vars.len() > 20 {
            return Err(Error::SizeGuard {
                what: "joint table",
                size: vars.len(),
                limit: 20,
            });
        }
        let mut probabilities = BTreeMap::new();
        let marginal = with_table!(self, t => marginal(t, vars));
        for k in 0..1u64 << vars.len() {
            let p = marginal.get(&k).cloned().unwrap_or_else(BigRational::zero);
            probabilities.insert(bits(k, vars.len()), p);
        }
        Ok(JointTable {
            vars: vars.iter().map(|&v| self.vars[v].clone()).collect(),
            probabilities,
        })
    }

    /// Checks π(a, b | z) = π(a | z) · π(b | z) for every joint value of the
    /// sets `a`, `b` and every context `z` of positive probability.
    /// Assignments are visited with `true` before `false`.
    pub fn ci_sets(&self, a: &[usize], b: &[usize], z: &[usize]) -> Result<CIVerdict> {
        for s in [a, b, z] {
            if s.len() > 63 {
                return Err(Error::SizeGuard {
                    what: "independence query",
                    size: s.len(),
                    limit: 63,
                });
            }
        }
        Ok(with_table!(self, t => ci_table(t, a, b, z)))
    }

    pub fn ci_check(&self, a: usize, b: usize, z: &[usize]) -> Result<CIVerdict> {
        self.ci_sets(&[a], &[b], z)
    }

    /// π(child | parent) > π(child), compared exactly.
    pub fn positive_correlation(&self, parent: usize, child: usize) -> bool {
        let both = self.probability_of(&[(parent, true), (child, true)]);
        let p = self.probability(parent);
        let c = self.probability(child);
        both > p * c
    }

    /// Variables with π(G) ∈ {0, 1}.
    pub fn improper(&self) -> Vec<usize> {
        let one = BigRational::one();
        (0..self.vars.len())
            .filter(|&v| {
                let p = self.probability(v);
                p.is_zero() || p == one
            })
            .collect()
    }

    /// Nodes violating the local Markov condition: not independent of
    /// their non-descendants given their parents.
    pub fn markov_violations(&self, dag: &Dag) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for x in 0..dag.len() {
            let desc = dag.descendants(x);
            let parents = dag.parents(x).to_vec();
            let rest: Vec<usize> = (0..dag.len())
                .filter(|&n| !desc[n] && !parents.contains(&n))
                .collect();
            if rest.is_empty() {
                continue;
            }
            if !self.ci_sets(&[x], &rest, &parents)?.independent {
                out.push(x);
            }
        }
        Ok(out)
    }
}

fn ci_table<W: Weight>(t: &Table<W>, a: &[usize], b: &[usize], z: &[usize]) -> CIVerdict {
    // weights per context, then per (a, b) inside it
    let mut ctx: BTreeMap<u64, BTreeMap<(u64, u64), W>> = BTreeMap::new();
    for (m, w) in &t.worlds {
        let e = ctx
            .entry(key(*m, z))
            .or_default()
            .entry((key(*m, a), key(*m, b)))
            .or_insert_with(W::zero);
        *e = e.clone() + w.clone();
    }
    let total_contexts: u64 = if z.len() >= 64 {
        u64::MAX
    } else {
        1 << z.len()
    };
    let skipped = total_contexts - ctx.len() as u64;

    for (&zk, cells) in ctx.iter().rev() {
        let mut wa: BTreeMap<u64, W> = BTreeMap::new();
        let mut wb: BTreeMap<u64, W> = BTreeMap::new();
        let mut wz = W::zero();
        for (&(ak, bk), w) in cells {
            let e = wa.entry(ak).or_insert_with(W::zero);
            *e = e.clone() + w.clone();
            let e = wb.entry(bk).or_insert_with(W::zero);
            *e = e.clone() + w.clone();
            wz = wz + w.clone();
        }
        // combinations outside wa × wb have zero on both sides
        for (&ak, wak) in wa.iter().rev() {
            for (&bk, wbk) in wb.iter().rev() {
                let wab = cells.get(&(ak, bk)).cloned().unwrap_or_else(W::zero);
                let lhs = wab.clone() * wz.clone();
                let rhs = wak.clone() * wbk.clone();
                if lhs != rhs {
                    let wz2 = wz.clone() * wz.clone();
                    return CIVerdict {
                        independent: false,
                        counterexample: Some(Counterexample {
                            a: bits(ak, a.len()),
                            b: bits(bk, b.len()),
                            z: bits(zk, z.len()),
                            lhs: ratio(&wab, &wz),
                            rhs: ratio(&rhs, &wz2),
                        }),
                        skipped_contexts: skipped,
                    };
                }
            }
        }
    }
    CIVerdict {
        independent: true,
        counterexample: None,
        skipped_contexts: skipped,
    }
}

/// A checked triple `(a, b, z)` by node id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triple {
    pub a: usize,
    pub b: usize,
    pub z: Vec<usize>,
}

impl Triple {
    pub fn render(&self, vars: &[GroundAtom]) -> String {
        let z: Vec<String> = self.z.iter().map(|&i| vars[i].to_string()).collect();
        format!(
            "indep({}, {}, [{}])",
            vars[self.a],
            vars[self.b],
            z.join(", ")
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub triples: usize,
    pub separated: usize,
    /// d-separated but dependent.
    pub unsound: Vec<Triple>,
    /// d-connected but independent.
    pub unfaithful: Vec<Triple>,
}

impl SweepReport {
    pub fn to_json(&self, vars: &[GroundAtom], which: Sweep) -> Value {
        let list = match which {
            Sweep::Soundness => &self.unsound,
            Sweep::Faithfulness => &self.unfaithful,
        };
        json!({
            "triples": self.triples,
            "separated": self.separated,
            "violations": list.iter().map(|t| t.render(vars)).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sweep {
    Soundness,
    Faithfulness,
}

fn subsets_up_to(items: &[usize], max: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(
        items: &[usize],
        start: usize,
        max: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        out.push(cur.clone());
        if cur.len() == max {
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, i + 1, max, cur, out);
            cur.pop();
        }
    }
    rec(items, 0, max, &mut Vec::new(), out);
}

/// Compares d-separation with the oracle on every unordered pair `{a, b}`
/// and every conditioning set `z` of at most `max_z` other nodes.
pub fn sweep(dag: &Dag, oracle: &Oracle, max_z: usize, deadline: &Deadline) -> Result<SweepReport> {
    let n = dag.len();
    let mut report = SweepReport::default();
    let all: Vec<usize> = (0..n).collect();
    let mut zs = Vec::new();
    subsets_up_to(&all, max_z, &mut zs);
    for z in zs {
        let obs = ObservationSet::new(dag, &z);
        for a in (0..n).filter(|v| !z.contains(v)) {
            let reach = d_connected_set(dag, a, &obs, deadline)?;
            for b in (a + 1..n).filter(|v| !z.contains(v)) {
                deadline.check()?;
                let separated = !reach[b];
                let independent = oracle.ci_check(a, b, &z)?.independent;
                report.triples += 1;
                let t = || Triple { a, b, z: z.clone() };
                if separated {
                    report.separated += 1;
                    if !independent {
                        report.unsound.push(t());
                    }
                } else if independent {
                    report.unfaithful.push(t());
                }
            }
        }
    }
    Ok(report)
}

/// Triples that d-separation declares independent but the distribution
/// does not treat as such. Empty whenever d-separation is sound.
pub fn soundness_sweep(
    inst: &Instance,
    params: &ParameterAssignment,
    guard: usize,
    max_z: usize,
    deadline: &Deadline,
) -> Result<SweepReport> {
    let oracle = Oracle::for_instance(inst, params, guard, deadline)?;
    sweep(inst.dag(), &oracle, max_z, deadline)
}

/// Same enumeration as [`soundness_sweep`]; the interesting list is
/// [`SweepReport::unfaithful`].
pub fn faithfulness_sweep(
    inst: &Instance,
    params: &ParameterAssignment,
    guard: usize,
    max_z: usize,
    deadline: &Deadline,
) -> Result<SweepReport> {
    soundness_sweep(inst, params, guard, max_z, deadline)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grounding::GroundingOptions;
    use crate::syntax::{parse_database, parse_program};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn oracle(program: &str, db: &str) -> (Instance, Oracle) {
        let p = parse_program(program).unwrap();
        let db = parse_database(db, &p).unwrap();
        let inst = Instance::new(&p, &db, GroundingOptions::default()).unwrap();
        let o = Oracle::for_instance(
            &inst,
            &ParameterAssignment::from_program(&p),
            DEFAULT_GUARD,
            &Deadline::none(),
        )
        .unwrap();
        (inst, o)
    }

    const CHAIN: &str = "random a/0. random b/0.\n0.5 :: a.\n0.5 :: b :- a.";

    #[test]
    fn single_fact() {
        let (_, o) = oracle("random p/0.\n1/2 :: p.", "");
        assert_eq!(o.probability(0), q(1, 2));
        let j = o.joint(&[0]).unwrap();
        assert_eq!(j.total(), q(1, 1));
    }

    #[test]
    fn independent_facts_factorise() {
        let (_, o) = oracle("random a/0. random b/0.\n1/3 :: a.\n1/4 :: b.", "");
        let j = o.joint(&[0, 1]).unwrap();
        assert_eq!(j.probabilities[&vec![true, true]], q(1, 12));
        assert_eq!(j.probabilities[&vec![false, false]], q(6, 12));
        assert!(o.ci_check(0, 1, &[]).unwrap().independent);
    }

    #[test]
    fn chain_is_dependent_with_counterexample() {
        let (_, o) = oracle(CHAIN, "");
        let v = o.ci_check(0, 1, &[]).unwrap();
        assert!(!v.independent);
        let c = v.counterexample.unwrap();
        assert_eq!((c.a, c.b), (vec![true], vec![true]));
        assert_eq!(c.lhs, q(1, 4));
        assert_eq!(c.rhs, q(1, 8));
        assert!(o.positive_correlation(0, 1));
    }

    #[test]
    fn zero_probability_contexts_are_skipped() {
        let (_, o) = oracle(
            "random a/0. random b/0. random c/0.\n0.5 :: a.\n0.5 :: b.\n0 :: c.",
            "",
        );
        let v = o.ci_check(0, 1, &[2]).unwrap();
        assert!(v.independent);
        assert_eq!(v.skipped_contexts, 1);
        assert_eq!(o.improper(), [2]);
    }

    #[test]
    fn xor_is_unfaithful() {
        let (inst, o) = oracle(
            "random a/0. random b/0. random c/0.\n\
             0.5 :: a.\n0.5 :: b.\n\
             0.5 :: c :- a, \\+b.\n0.5 :: c :- \\+a, b.",
            "",
        );
        let (a, c) = (0, 2);
        assert!(o.ci_check(a, c, &[]).unwrap().independent);
        let report = sweep(inst.dag(), &o, 1, &Deadline::none()).unwrap();
        assert!(report.unsound.is_empty());
        assert!(report.unfaithful.contains(&Triple { a, b: c, z: vec![] }));
    }

    #[test]
    fn guard_is_enforced() {
        let p = parse_program("random p/1.\n0.5 :: p(X) :- n(X).").unwrap();
        let db = parse_database("n(1). n(2). n(3).", &p).unwrap();
        let inst = Instance::new(&p, &db, GroundingOptions::default()).unwrap();
        let err = Oracle::for_instance(
            &inst,
            &ParameterAssignment::from_program(&p),
            2,
            &Deadline::none(),
        )
        .unwrap_err();
        assert_eq!(
            err,
            Error::GuardExceeded {
                required: 3,
                guard: 2
            }
        );
    }

    #[test]
    fn large_denominators_use_big_integers() {
        let program = "random p/1.\n1/1000003 :: p(X) :- n(X).";
        let (_, o) = oracle(program, "n(1). n(2). n(3). n(4). n(5).");
        assert!(matches!(o.tables, Tables::Big(_)));
        assert_eq!(o.probability(0), q(1, 1000003));
        assert!(o.ci_check(0, 1, &[2]).unwrap().independent);
    }

    #[test]
    fn markov_holds_on_chain() {
        let (inst, o) = oracle(
            "random p/1.\n0.5 :: p(X) :- n(X).\n0.5 :: p(Y) :- p(X), e(X,Y), n(X), n(Y).",
            "n(1). n(2). n(3). e(1,2). e(2,3).",
        );
        assert!(o.markov_violations(inst.dag()).unwrap().is_empty());
        assert!(o.improper().is_empty());
    }
}
