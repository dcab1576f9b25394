//! Exact machinery for correspondences on branched coverings of the line.
//!
//! The crate is organized in six layers, each usable on its own:
//!
//! * [`permgroups`]: permutations, stabilizer chains, orbits, cosets.
//! * [`graphs`]: a catalog of vertex-transitive graphs and the integer
//!   certificate (`k`, `r+`, `r-`) for their adjacency matrices.
//! * [`coverings`]: monodromy presentations of coverings of the line,
//!   genus bookkeeping, Galois closures, and class counting.
//! * [`prym`]: triples pairing a certified matrix with a covering, the
//!   induced correspondence, its fixed points and dimension split.
//! * [`splitting`]: block decompositions, two-step towers, simplicity
//!   tests, and the degree-9 conversions between the two rank-3 models
//!   on nine vertices.
//! * [`cli`]: thin command layer producing deterministic reports.
//!
//! All arithmetic is exact (integers, big integers, quadratic surds);
//! no floating point is used anywhere.

pub mod cli;
pub mod coverings;
pub mod families;
pub mod graphs;
pub mod input;
pub mod permgroups;
pub mod prym;
pub mod report;
pub mod splitting;
