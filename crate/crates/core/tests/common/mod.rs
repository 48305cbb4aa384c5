#![allow(dead_code)]

use std::path::PathBuf;

use plci_core::syntax::{parse_database, parse_params, parse_program};
use plci_core::{GroundAtom, GroundingOptions, Instance, ParameterAssignment, ProgramStructure};

pub fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name]
        .iter()
        .collect();
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn instance(program: &str, db: &str) -> Instance {
    let p = parse_program(program).unwrap();
    let db = parse_database(db, &p).unwrap();
    Instance::new(&p, &db, GroundingOptions::default()).unwrap()
}

pub fn storage() -> Instance {
    instance(&fixture("storage.plp"), &fixture("storage.db"))
}

pub fn storage_params(program: &ProgramStructure) -> ParameterAssignment {
    parse_params(&fixture("storage.params"), program).unwrap()
}

/// Storage database cut down to tank t1 and room r1.
pub fn trimmed_storage(employees: &[&str]) -> Instance {
    let mut db = String::from("room(r1). tank(t1). in(t1,r1). liquid(gasoline). liquid(water).\n");
    db.push_str("stores(t1,gasoline). flammable(gasoline).\n");
    for e in employees {
        db.push_str(&format!("employee({e}).\n"));
    }
    instance(&fixture("storage.plp"), &db)
}

pub fn atom(text: &str) -> GroundAtom {
    let (pred, rest) = text.split_once('(').unwrap_or((text, ")"));
    let args: Vec<&str> = rest
        .trim_end_matches(')')
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    GroundAtom::new(pred, args)
}
