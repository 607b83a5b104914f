//! Packing colorings of the square grid as SAT problems.
//!
//! The crate covers the whole workflow for deciding instances `D(r, k, c)`
//! (does the ℓ1-diamond of radius `r` admit a packing `k`-coloring with the
//! center colored `c`?):
//!
//! * [`grid`]: diamonds, distances, dihedral symmetry, coloring checks.
//! * [`cnf`]: literals, clauses, formulas, variable maps, DIMACS/iCNF.
//! * [`encoder`]: the direct and plus encodings, ALOD clauses, layered
//!   symmetry breaking and chessboard fixing.
//! * [`splitter`]: the PTR cube generator and tautology checks.
//! * [`solver`] and [`engine`]: an embedded CDCL solver with DRAT output,
//!   cube runs and an adapter for external solvers.
//! * [`proof`]: re-encoding, implication and tautology proofs, a forward
//!   RUP/RAT checker and bound certificates.

pub mod cnf;
pub mod encoder;
pub mod engine;
pub mod grid;
pub mod proof;
pub mod solver;
pub mod splitter;

pub use cnf::{Clause, Formula, InstanceDescriptor, Lit, Var, VarMap};
pub use grid::{Coloring, Diamond, Vertex};
