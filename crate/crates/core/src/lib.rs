//! ZXW diagrams: construction, tensor evaluation, rewrite rules, controlled
//! matrices, Hamiltonians and their exponentials.

pub mod circuit;
pub mod controlled;
pub mod diagram;
pub mod error;
pub mod eval;
pub mod expm;
pub mod generators;
pub mod hamiltonian;
pub mod io;
pub mod matrix;
pub mod random;
pub mod rules;

pub use diagram::{compose_par, compose_seq, Builder, Diagram, Label, NodeKind, Port, TimePhase};
pub use error::{Error, Result};
pub use eval::{eval, eval_at, eval_with, equal_up_to_scalar, ContractionOrder, EvalOptions, ScalarEquivalence};
pub use matrix::DenseMatrix;

pub use num_complex::Complex64 as C64;
