//! Conditional-independence reasoning for probabilistic logic program
//! structures.
//!
//! A program structure (random clauses, internal Datalog clauses and
//! integrity constraints) is grounded against an external database into a
//! ground graph over Boolean random variables. Independence queries are
//! answered by d-separation in that graph, and the answers can be checked
//! against brute-force exact inference over the induced system of Boolean
//! equations.
//!
//! The pipeline, bottom-up:
//!
//! * [`syntax`] parses programs, databases, parameter files and queries.
//! * [`logic`] stratifies and evaluates the internal part into a Herbrand
//!   model and checks constraints.
//! * [`grounding`] builds the ground graph and equation system.
//! * [`dsep`] decides d-separation.
//! * [`oracle`] does exact inference with rational arithmetic.
//! * [`fragment`] certifies membership in the class of instances for which
//!   d-separation is complete.
//! * [`experiment`] generates and runs the random-DAG benchmark workload.
//! * [`synth`] generates small random instances for testing.

pub mod dsep;
pub mod error;
pub mod experiment;
pub mod fragment;
pub mod grounding;
pub mod logic;
pub mod oracle;
pub mod syntax;
pub mod synth;

mod deadline;

pub use deadline::Deadline;
pub use dsep::{DSepVerdict, Dag, ObservationSet, Witness};
pub use error::{Error, Result};
pub use fragment::FragmentReport;
pub use grounding::{
    EquationSystem, ErrorTerm, GroundEquation, GroundGraph, GroundingOptions, Instance,
};
pub use logic::{ConstraintReport, HerbrandModel, Stratification};
pub use oracle::{CIVerdict, JointTable, Oracle};
pub use syntax::{
    Atom, CIQuery, ClauseId, Constant, ExternalDatabase, Formula, GroundAtom, Literal,
    ParameterAssignment, Probability, ProgramStructure, RandomClause, Term,
};
