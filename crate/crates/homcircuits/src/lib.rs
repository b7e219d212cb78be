//! Symmetric algebraic circuits for bipartite homomorphism polynomials.
//!
//! Patterns are bipartite multigraphs `F` with a fixed bipartition `A ⊎ B`.
//! The homomorphism polynomial `hom_{F,n,m}` sums, over all side-respecting
//! maps `h: A ⊎ B -> [n] ⊎ [m]`, the monomial `Π_{ab∈E(F)} x_{h(a),h(b)}`.
//!
//! The crate compiles such polynomials into circuits (formulas from
//! elimination trees, skew circuits from path decompositions, general
//! circuits from tree decompositions), analyses the `Sym_n × Sym_m` action
//! on those circuits, and implements reductions between homomorphism
//! polynomials. Everything is exact over `ℚ` and checked against
//! brute-force oracles.
//!
//! Module map:
//! - [`exactnum`]: rationals, sparse polynomials, identity testing
//! - [`pattern`]: bipartite multigraphs and the labelled-pattern algebra
//! - [`width`]: exact treewidth, pathwidth, treedepth with certificates
//! - [`circuit`]: the circuit IR, shapes, evaluation, serialization
//! - [`symmetry`]: automorphisms, rigidification, orbits, supports
//! - [`compile`]: circuit constructions from decompositions
//! - [`oracle`]: brute-force reference semantics
//! - [`reduce`]: gadgets, CFI graphs, interpolation and extraction
//! - [`cli`]: command-line front end and the check suites

pub mod circuit;
pub mod cli;
pub mod compile;
pub mod error;
pub mod exactnum;
pub mod oracle;
pub mod pattern;
pub mod reduce;
pub mod symmetry;
pub mod width;

pub use error::{Error, Result};
pub use exactnum::{Assignment, Rational, SparsePolynomial};
