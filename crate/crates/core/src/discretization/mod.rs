//! Tensor grids with interior masks, the discrete Grushin stiffness
//! operator, nodal quadrature and the weighted norms built on it.

mod field_io;
mod grid;
mod norms;
mod operator;

pub use field_io::{read_field, write_field, FieldFile};
pub use grid::{build_grid, Grid, ScalarField, MIN_ARM_FRACTION};
pub use norms::{norm_energy, norm_lpk, norm_s12, weighted_integral, weighted_sum};
pub use operator::{assemble_grushin, LinearOperator, SparseOperator};
