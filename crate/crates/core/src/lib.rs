//! Exact enumeration of distance-hereditary graph subclasses through grammars
//! on their clique-star split-decomposition trees, with brute-force graph
//! oracles that cross-check every grammar.

#![allow(clippy::needless_range_loop)]

pub mod classes;
pub mod glt;
pub mod grammar;
pub mod graphs;
pub mod oracle;
pub mod series;
