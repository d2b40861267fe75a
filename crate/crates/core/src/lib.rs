//! Directional Chebyshev constants, transfinite-diameter estimates and
//! numerical extremal functions for discretized compact sets in `C^d`.

pub mod error;
pub mod fekete;
pub mod index;
mod linalg;
pub mod lp;
pub mod minimax;
pub mod ortho;
pub mod pluripotential;
pub mod sets;

pub use error::{Error, Result};
pub use index::{Direction, MultiIndex};
pub use minimax::{ChebyshevResult, MinimaxOptions, Polynomial};
pub use num_complex::Complex64;
pub use sets::{PointCloud, SetModel};
