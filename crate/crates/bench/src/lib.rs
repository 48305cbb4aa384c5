//! Inputs shared by the criterion benchmarks.

use plci_core::experiment::{bench_graph, bench_program};
use plci_core::syntax::{parse_database, parse_params, parse_program};
use plci_core::{GroundingOptions, Instance, ParameterAssignment};

pub const STORAGE_PROGRAM: &str = include_str!("../../core/fixtures/storage.plp");
pub const STORAGE_DATABASE: &str = include_str!("../../core/fixtures/storage.db");
pub const STORAGE_PARAMS: &str = include_str!("../../core/fixtures/storage.params");

/// Grounded benchmark program on graph 0 of the given size.
pub fn random_graph_instance(seed: u64, size: usize) -> Instance {
    let edges = bench_graph(seed, size, 0);
    let (program, db) = bench_program(size, &edges).expect("benchmark program");
    Instance::new(&program, &db, GroundingOptions::default()).expect("benchmark grounds")
}

/// Benchmark program on the path `1 -> 2 -> ... -> size`.
pub fn path_instance(size: usize) -> (Instance, ParameterAssignment) {
    let edges: Vec<(usize, usize)> = (1..size).map(|i| (i, i + 1)).collect();
    let (program, db) = bench_program(size, &edges).expect("benchmark program");
    let params = ParameterAssignment::from_program(&program);
    let inst = Instance::new(&program, &db, GroundingOptions::default()).expect("path grounds");
    (inst, params)
}

pub fn storage() -> (Instance, ParameterAssignment) {
    let program = parse_program(STORAGE_PROGRAM).expect("storage program");
    let db = parse_database(STORAGE_DATABASE, &program).expect("storage database");
    let params = parse_params(STORAGE_PARAMS, &program).expect("storage params");
    let inst = Instance::new(&program, &db, GroundingOptions::default()).expect("storage grounds");
    (inst, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_load() {
        assert_eq!(storage().0.ground_variables().len(), 27);
        assert_eq!(path_instance(6).0.error_term_count(), 11);
        assert_eq!(random_graph_instance(0, 20).ground_variables().len(), 20);
    }
}
