//! Numerical kernels for rearrangement inequalities and Cwikel-type estimates.
//!
//! * [`step`] and [`majorization`]: decreasing rearrangements and their order.
//! * [`lattice`]: `M_f g(-i grad)` on periodic grids, cell norms.
//! * [`cwikel`]: dyadic splittings and the submajorization checks built on them.
//! * [`logconvex`]: the logarithmic triangle inequality for weak `L_1`.
//! * [`moyal`]: quantized symbols on the Moyal plane.
//! * [`magnetic`]: Landau-level projections and the magnetic Laplacian.

pub mod cwikel;
pub mod error;
pub mod fourier;
pub mod invariants;
pub mod lattice;
pub mod linalg;
pub mod logconvex;
pub mod magnetic;
pub mod majorization;
pub mod moyal;
pub mod quadrature;
pub mod step;

pub use error::{Error, Result};
pub use linalg::{DenseOperator, C64};
pub use majorization::MajorizationVerdict;
pub use step::StepFunction;
