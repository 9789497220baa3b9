//! Exact and numerical verification toolkit for octonions, orthogonal
//! complex structures on `R⁶`, the twistor space of `S⁶`, and the mapping
//! degrees, Chern numbers and homotopy-group formulas that go with them.

pub mod char_class;
pub mod cstruct;
pub mod degree;
pub mod homotopy;
pub mod io;
pub mod linalg;
pub mod octonion;
pub mod scalar;
pub mod sphere;
pub mod subalgebra;
pub mod suite;
pub mod twistor;

pub use octonion::{Octonion, OctonionError, UnitOctonion};
pub use scalar::{Mode, Rational, Scalar};
