//! Numerical laboratory for rearrangement inequalities and the subcritical
//! Yamabe problem on products `N = M × R^n`.
//!
//! * [`domain`]: the discrete product geometry, fields, norms and the
//!   discrete gradient.
//! * [`rearrange`]: Steiner symmetrization with respect to `M`,
//!   polarization and the greedy polarization sequence.
//! * [`functional`]: Yamabe energy, `Q_s`, the Euler–Lagrange residual and
//!   the sphere constants.
//! * [`solver`]: radial minimization of `Q_s`, the shooting oracle and
//!   continuation in `s`.
//! * [`io`] and [`verify`]: field files, solver configuration and the
//!   seeded invariant battery.

pub mod domain;
pub mod error;
pub mod functional;
pub mod io;
pub mod rearrange;
pub mod solver;
pub mod verify;

pub use domain::{
    conformal_exponents, dirichlet_energy, grad_lp_norm, lp_distance, lp_norm, mass_profile,
    total_volume, ConformalExponents, EuclideanFactor, Field, GraphEdge, Line1D, ManifoldFactor,
    ProductGrid, RadialGrid, RadialLayout,
};
pub use error::{Error, Result};
pub use functional::{
    el_residual, energy, laplacian, sphere_volume, yamabe_quotient, yamabe_sphere_constant,
    QuotientValue,
};
pub use rearrange::{
    greedy_polarization_sequence, greedy_polarization_step, is_nonincreasing_in_radius, mirror,
    polarize, polarizer_candidates, steiner_symmetrize, GreedyRecord, GreedyStatus, GreedyStep,
    GreedyTrace, Polarizer,
};
pub use solver::{
    continuation, minimize_subcritical, shoot_radial, ContinuationEntry, ContinuationReport,
    RadialProblem, ShootingReport, SolveReport, SolverOptions,
};
