//! Linear differential operators with analytic, possibly singular,
//! coefficients.

mod expr;
mod grid;
mod normal;
mod op;
mod smooth;
mod weak;

pub use expr::Expr;
pub use grid::{apply_grid, central_weights, fd_weights, stencil_radius, FdOptions, Grid, SampledField};
pub use normal::{sinhc, AtomKind, CompiledForm, NormalForm, POLE_TOL};
pub use op::{
    sample_in_cone, weyl_expr, DiffOp, DiffOpJson, DualPoly, Factorization, FactorizationReport, MultiIndex,
    RegKind,
};
pub use smooth::{bump_profile, bump_profile_jet, ExprFn, FnSmooth, SmoothFn, TensorBump};
pub use weak::{composite_gauss, distr_support_scan, weak_apply, DensityPiece, PiecewiseDensity, ScanResult};
