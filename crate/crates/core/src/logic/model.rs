use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::syntax::{Constant, GroundAtom, Symbol};

/// Interned active domain.
#[derive(Clone, Debug, Default)]
pub struct Universe {
    names: Vec<Constant>,
    index: HashMap<Constant, u32>,
}

impl Universe {
    pub fn new(constants: impl IntoIterator<Item = Constant>) -> Self {
        let mut u = Universe::default();
        for c in constants {
            u.intern(c);
        }
        u
    }

    fn intern(&mut self, c: Constant) -> u32 {
        if let Some(&i) = self.index.get(&c) {
            return i;
        }
        let i = self.names.len() as u32;
        self.index.insert(c.clone(), i);
        self.names.push(c);
        i
    }

    pub fn id(&self, c: &Constant) -> Option<u32> {
        self.index.get(c).copied()
    }

    pub fn name(&self, id: u32) -> &Constant {
        &self.names[id as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn constants(&self) -> &[Constant] {
        &self.names
    }
}

/// Tuples of one predicate in insertion order with a membership index.
#[derive(Clone, Debug, Default)]
pub struct Relation {
    tuples: Vec<Box<[u32]>>,
    set: HashSet<Box<[u32]>>,
}

impl Relation {
    pub fn insert(&mut self, t: Box<[u32]>) -> bool {
        if self.set.contains(&t) {
            return false;
        }
        self.set.insert(t.clone());
        self.tuples.push(t);
        true
    }

    pub fn contains(&self, t: &[u32]) -> bool {
        self.set.contains(t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.tuples.iter().map(|t| &**t)
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

/// The set of ground logical atoms derived from a database by the internal
/// part of a program.
#[derive(Clone, Debug, Default)]
pub struct HerbrandModel {
    pub(crate) universe: Universe,
    pub(crate) relations: BTreeMap<Symbol, Relation>,
}

impl HerbrandModel {
    pub(crate) fn new(universe: Universe) -> Self {
        HerbrandModel {
            universe,
            relations: BTreeMap::new(),
        }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub(crate) fn relation(&self, p: &str) -> Option<&Relation> {
        self.relations.get(p)
    }

    pub(crate) fn insert_ids(&mut self, p: &Symbol, t: Box<[u32]>) -> bool {
        self.relations.entry(p.clone()).or_default().insert(t)
    }

    pub fn insert(&mut self, atom: &GroundAtom) -> bool {
        let ids: Option<Vec<u32>> = atom.args.iter().map(|c| self.universe.id(c)).collect();
        match ids {
            Some(ids) => self.insert_ids(&atom.predicate, ids.into_boxed_slice()),
            None => panic!("constant of {atom} outside the active domain"),
        }
    }

    pub fn contains(&self, atom: &GroundAtom) -> bool {
        let Some(rel) = self.relations.get(&atom.predicate) else {
            return false;
        };
        let ids: Option<Vec<u32>> = atom.args.iter().map(|c| self.universe.id(c)).collect();
        ids.is_some_and(|ids| rel.contains(&ids))
    }

    pub fn len(&self) -> usize {
        self.relations.values().map(Relation::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn count(&self, predicate: &str) -> usize {
        self.relations.get(predicate).map_or(0, Relation::len)
    }

    fn decode(&self, p: &Symbol, t: &[u32]) -> GroundAtom {
        GroundAtom {
            predicate: p.clone(),
            args: t.iter().map(|&i| self.universe.name(i).clone()).collect(),
        }
    }

    /// Atoms of one predicate, sorted.
    pub fn atoms_of(&self, predicate: &str) -> BTreeSet<GroundAtom> {
        self.relations
            .get_key_value(predicate)
            .map(|(p, rel)| rel.iter().map(|t| self.decode(p, t)).collect())
            .unwrap_or_default()
    }

    /// All atoms, sorted.
    pub fn atoms(&self) -> BTreeSet<GroundAtom> {
        self.relations
            .iter()
            .flat_map(|(p, rel)| rel.iter().map(move |t| self.decode(p, t)))
            .collect()
    }
}

impl PartialEq for HerbrandModel {
    fn eq(&self, other: &Self) -> bool {
        self.atoms() == other.atoms()
    }
}

impl fmt::Display for HerbrandModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in self.atoms() {
            writeln!(f, "{a}.")?;
        }
        Ok(())
    }
}
