//! Identification minors of finite functions.
//!
//! A function `f: A^n → B` is stored as a dense [`FunctionTable`]. Its
//! identification minors `f_I` arise by identifying the arguments in a
//! 2-element set `I`; `f` has a *unique identification minor* when all of
//! them are equivalent. This crate computes minors, equivalence, invariance
//! groups and factorizations through the order-of-first-occurrence map, builds
//! the known sporadic examples of arity `|A| + 1`, and searches whole function
//! spaces for tables that fit none of the known classes.
//!
//! Symbols are 0-based in memory and in JSON files. Human-facing renderings of
//! tuples, sets, pairs and permutations are 1-based.

mod action;
pub mod analysis;
pub mod construct;
pub mod decomp;
pub mod ftable;
pub mod io;
pub mod symmetry;
pub mod tuples;

pub use ftable::{FunctionTable, PartialFunctionTable, Table, TableError};
pub use tuples::{Alphabet, IndexMap, IndexPair, Permutation, Symbol, SymbolSet, Tuple};
