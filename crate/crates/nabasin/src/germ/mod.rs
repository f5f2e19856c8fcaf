//! Exact arithmetic on truncated polynomial self-maps of C^k and the
//! enumeration and ordering of the solver's multi-index families.

pub mod index;
pub mod map;
pub mod poly;

pub use index::{
    count_up_to, enumerate_indices, graded_indices, indices_up_to, phi_ordering, IndexFamily,
    MultiIndex, OrderedIndexSet,
};
pub use map::{GermMap, GermMapJson, TermJson};
pub use poly::{Polynomial, COEFF_ZERO_TOL};
