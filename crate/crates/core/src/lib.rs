//! Exact local computations on Carnot manifolds.
//!
//! Graded nilpotent tangent groups from H-frame data, privileged, Carnot and
//! ε-Carnot coordinates, Carnot differentials and Pansu derivatives, and the
//! charts and operations of the tangent groupoid.

pub mod carnot_map;
pub mod carnot_structure;
pub mod cli;
pub mod coords;
pub mod error;
pub mod fixtures;
pub mod groupoid;
pub mod io;
pub mod linalg;
pub mod nilgroup;
pub mod report;
pub mod scalar;
pub mod weights;
pub mod wpoly;

pub use error::{Error, Result};
pub use scalar::Q;
