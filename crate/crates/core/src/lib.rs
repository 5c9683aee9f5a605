//! Exact Harder-Narasimhan invariants for quiver representations.
//!
//! The crate computes HN filtrations and types of finite quiver
//! representations over small prime fields, the skyscraper and rank
//! invariants, and stability-based classifiers and decomposition-recovery
//! algorithms for three families of persistence modules: zigzag (type A),
//! grid/rectangle-decomposable, and nestfree ladder modules. Everything is
//! exact: slopes live in `Q(sqrt 2)` and brute-force oracles validate every
//! structural shortcut at desk scale.

pub mod error;
pub mod feas;
pub mod gen;
pub mod grid;
pub mod hn;
pub mod ladder;
pub mod matrix;
pub mod quiver;
pub mod rep;
pub mod scalar;
pub mod verify;
pub mod zigzag;

pub use error::{Error, Limits, Result};
pub use hn::{CentralCharge, HnFiltration, HnType};
pub use matrix::{FieldSpec, Matrix};
pub use quiver::{build_grid, build_ladder, build_type_a, Orientation, Quiver, VertexSet};
pub use rep::{Representation, Subrepresentation};
pub use scalar::{parse_scalar, rat, Rational, Scalar};
