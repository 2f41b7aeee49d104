//! Exact computations with path algebras of acyclic quivers, their
//! representations, the preprojective component, and the three graded
//! algebras that all describe the preprojective algebra.

pub mod algebra;
pub mod error;
pub mod field;
pub mod fill;
pub mod iso;
pub mod knit;
pub mod matrix;
pub mod mesh;
pub mod quiver;
pub mod rep;

pub use error::{Error, Result};
pub use field::{Field, Scalar};
pub use matrix::Matrix;
pub use quiver::{parse_quiver, Quiver};
