//! Mean-field reduction of the full map to `x_eff[t+1] = sum_s d_s x_eff^(s-1)`,
//! its fixed points and the collapse error.

mod chebyshev;
mod effective;
mod fixed_points;

pub use chebyshev::{
    chebyshev_fit_1d, chebyshev_fit_2d, default_fit_interval, fit_dynamics, ChebyshevFit,
    CouplingFit,
};
pub use effective::{
    assemble_effective_parameters, build_effective, build_effective_with, effective_step,
    EffectiveSystem,
};
pub use fixed_points::{
    collapse_error, fixed_points, fixed_points_of, project_onto_manifold, CollapseError,
    FixedPoint, FixedPointReport, IMAG_TOL, ROOT_TOL,
};
