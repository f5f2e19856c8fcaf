//! Truncated polynomial-germ algebra over C^k, non-autonomous germ
//! conjugation solvers, the polynomial automorphism families they target
//! (generalized Hénon products, triangular maps, weak shifts and their
//! high-degree perturbations), and a dynamics engine computing filtration
//! regions, basin/escape classification and Green's functions with certified
//! Cauchy tails.

pub mod conjugation;
pub mod dynamics;
pub mod error;
pub mod germ;
pub mod linalg;
pub mod maps;
pub mod scenario;
pub mod suite;

pub use error::{Error, Result};
pub use num_complex::Complex64;
