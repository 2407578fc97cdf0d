//! Exact arithmetic for Weyl algebras in characteristic `p` and for deciding
//! whether an endomorphism lifts to the length-two Witt vectors.
//!
//! The layers, bottom up:
//!
//! - [`scalars`]: `F_{p^m}` and `W₂(F_{p^m})`
//! - [`weyl`]: normal-ordered elements of `Aₙ(k)` and `Aₙ(W₂(k))`
//! - [`poly`], [`matrix`], [`center`]: commutative polynomials, Jacobians, Poisson brackets
//! - [`endo`]: endomorphisms, the obstruction matrix `C`
//! - [`cohomology`]: the ψ map, de Rham forms, explicit lifts
//! - [`diffeq`]: the `γ_i` / `f_i` differential equations
//! - [`trivialization`]: the matrix model `z_i ↦ ν_i + y_i` and trace identities
//! - [`parser`], [`specfile`], [`pipeline`], [`corpus`]: input, reports, batch runs

pub mod center;
pub mod cohomology;
pub mod corpus;
pub mod diffeq;
pub mod endo;
pub mod error;
pub mod matrix;
pub mod monomial;
pub mod parser;
pub mod pipeline;
pub mod poly;
pub mod scalars;
pub mod specfile;
pub mod trivialization;
pub mod weyl;

pub use endo::{Endo, ObstructionReport};
pub use error::{Error, Result};
pub use matrix::PolyMatrix;
pub use monomial::MultiIndex;
pub use poly::{Poly, VarTag};
pub use scalars::{Field, Fq, ScalarRing, Witt2, Witt2Ring};
pub use weyl::{Algebra, WeylElem, WeylK, WeylW2};
