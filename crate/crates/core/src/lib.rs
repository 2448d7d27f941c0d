//! Exact combinatorics of simple polytopes and their moment-angle complexes.
//!
//! The library works throughout with the boundary complex `K = ∂P*` of a
//! simple `n`-polytope `P` with `m` facets: vertices of `K` are the facets
//! of `P`, maximal faces of `K` are the vertices of `P`.  Everything is
//! computed exactly — integer polynomials for `f`/`h`-vectors, `GF(2)` and
//! arbitrary-precision integer linear algebra for torus-assignment
//! certificates, and multigraded Koszul complexes for bigraded Betti
//! numbers and cohomology rings.
//!
//! Module map:
//!
//! - [`complex`] — abstract simplicial complexes on `[m]`, face queries,
//!   `f`/`h`-vectors, minimal non-faces, chromatic numbers, links, joins.
//! - [`families`] — the polytope families: weighted odd-gon presentations
//!   of `n`-polytopes with `n+3` facets, cyclic-polytope duals, simplex
//!   skeletons, doubling, connected sums, flips and table diagrams.
//! - [`linalg`] — exact linear algebra over `GF(2)` and `Z` (rank,
//!   determinant, Smith normal form, basis-extension tests).
//! - [`buchstaber`] — the real Buchstaber invariant `s_R(K)` by exact
//!   search, certified values and bound sandwiches for the integral `s(K)`.
//! - [`betti`] — bigraded Betti numbers of the moment-angle complex via
//!   the multigraded Koszul complex, plus the odd-gon closed forms and the
//!   explicit minimal resolution.
//! - [`cohomology`] — the bigraded cohomology ring for the odd-gon
//!   families: cocycle representatives, products, reduction modulo
//!   coboundaries, integral torsion.
//!
//! Vertex labels are 1-based everywhere, matching the usual facet
//! numbering `F_1, …, F_m`.

pub mod betti;
pub mod buchstaber;
pub mod cohomology;
pub mod complex;
pub mod families;
pub mod linalg;
pub mod poly;

pub use complex::{FVector, HPolynomial, SimplicialComplex};
pub use families::{FlipRecord, PolygonPresentation, TableDiagram};

/// Errors shared by all modules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Invalid input (bad labels, violated invariants, malformed data).
    Input(String),
    /// Input exceeds a desk-scale cap and was refused.
    DeskScale(String),
    /// An internal cross-check failed; indicates a bug or inconsistent data.
    Internal(String),
}

impl std::fmt::Display for Error {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Error::Input(msg) => write!(f, "input error: {msg}"),
            Error::DeskScale(msg) => write!(f, "desk-scale refusal: {msg}"),
            Error::Internal(msg) => write!(f, "internal consistency failure: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

/// Shorthand used by fallible operations across the crate.
pub type Result<T> = std::result::Result<T, Error>;
