//! Verification and exploration toolkit for the plane curves
//!
//! ```text
//! C_n :  L(x)^{q+1} + L(y)^{q+1} + c = 0,
//! L(x) = a_0 x + a_1 x^{q^2} + ... + a_{n-1} x^{q^{2(n-1)}} + x^{q^{2n}},
//! ```
//!
//! defined over towers GF(q) ⊂ GF(q²) ⊂ GF(q^{2(n+1)}) with a_0, c nonzero.
//! These are elementary abelian p-covers of Hermitian curves. The toolkit
//! computes and cross-checks their invariants: genus and p-rank, the singular
//! locus of both plane models, the full linear automorphism group with its
//! exact-sequence structure, the outer Galois points, Frobenius
//! nonclassicality, rational point counts, Weierstrass gap data at affine
//! points, and the plane-arc parameters of the rational point set.
//!
//! Everything is exact arithmetic over explicitly constructed finite fields;
//! no floating point, no probabilistic identity testing.

pub mod arcs;
pub mod autgrp;
pub mod cli;
pub mod curve;
pub mod error;
pub mod frobenius;
pub mod galois;
pub mod gf;
pub mod localgeom;
pub mod poly;

pub use error::{Error, Result};
