//! Continuous K-g-frames over Hilbert C*-modules, modelled on `A = M_d`
//! acting on the standard modules `A^n`.

pub mod algebra;
pub mod constructions;
pub mod eigen;
pub mod error;
pub mod frame;
pub mod harness;
pub mod matrix;
pub mod module;
pub mod serde_float;
pub mod svd;

pub use algebra::{AlgElem, DEFAULT_TOL};
pub use error::{Error, Result};
pub use frame::{FrameBounds, FrameReport, GFrameFamily, MeasureSpace};
pub use matrix::{c64, CMatrix, C64};
pub use module::{AdjOp, ModuleVec, Submodule};
