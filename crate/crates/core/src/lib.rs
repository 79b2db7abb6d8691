//! Graded fermionic Fock space over four mode sectors, exact normal ordering
//! of creation/annihilation expressions, plane-wave field matrix elements and
//! exterior calculus on the twelve-dimensional light-cone chart.

pub mod error;
pub mod extgeo;
pub mod fields;
pub mod fock;
pub mod grading;
pub mod opalg;
pub mod sampling;
pub mod selftest;

pub use error::{Error, Result};
pub use fock::{
    Complex64, FockState, GenKind, Generator, ModeIndex, Sector, SectorConfig, StateVector,
    DEFAULT_ORACLE_CEILING,
};
pub use opalg::{normal_order, parse, vev, NormalForm, OperatorExpr};
