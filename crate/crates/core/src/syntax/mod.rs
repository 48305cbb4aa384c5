//! Textual front end: program structures, external databases, parameter
//! files and independence queries.
//!
//! Concrete syntax is Prolog-flavoured:
//!
//! ```text
//! random opens/2.                          % random predicate declaration
//! 0.8 :: opens(E,T) :- employee(E), tank(T).
//! _ :: leaks(T) :- employee(E), tank(T), opens(E,T).
//! connected(R,R) :- room(R).               % internal clause
//! :- stores(T,L1), stores(T,L2), L1 \= L2. % integrity constraint
//! ```
//!
//! Random atoms at the top level of a random clause body are its causes;
//! everything else is the condition, which may use `;` inside parentheses.
//! Predicates that are neither declared random nor defined by an internal
//! clause are external.

mod ast;
mod lexer;
mod parser;
mod validate;

pub use ast::*;
pub use validate::{
    database_from_facts, parse_database, parse_params, parse_program, parse_query, MAX_CLAUSE_VARS,
};
