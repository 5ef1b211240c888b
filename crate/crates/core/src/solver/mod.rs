//! Minimization of the subcritical quotient `Q_s` over functions that are
//! constant along `M` and radial in `R^n`.
//!
//! [`minimize_subcritical`] runs a normalized, preconditioned gradient flow
//! on a vertex-centered radial grid; [`shoot_radial`] integrates the
//! Euler–Lagrange ODE independently and serves as its oracle;
//! [`continuation`] sweeps `s` towards the critical exponent.

mod continuation;
mod flow;
mod shooting;

use std::sync::Arc;

use crate::domain::{
    ConformalExponents, EuclideanFactor, Field, ManifoldFactor, ProductGrid, RadialGrid,
};
use crate::error::{Error, Result};

pub use continuation::{continuation, ContinuationEntry, ContinuationReport};
pub use flow::{minimize_subcritical, SolveReport, SolverOptions};
pub use shooting::{default_shooting_guess, shoot_radial, ShootingReport};

pub(crate) use flow::run_flow;

/// Minimum number of radial intervals accepted by [`RadialProblem::new`].
pub const MIN_INTERVALS: usize = 16;

/// Homogeneous `M` of volume `V_M` and constant curvature `S > 0`, times a
/// uniform radial mesh `r_k = k·Δr`, `k = 0..=K`, with `f(r_max) = 0`.
#[derive(Clone, Debug)]
pub struct RadialProblem {
    ce: ConformalExponents,
    volume: f64,
    curvature: f64,
    r_max: f64,
    intervals: usize,
    grid: Arc<ProductGrid>,
}

impl RadialProblem {
    pub fn new(
        ce: ConformalExponents,
        volume: f64,
        curvature: f64,
        r_max: f64,
        intervals: usize,
    ) -> Result<Self> {
        if !(curvature.is_finite() && curvature > 0.0) {
            return Err(Error::Domain(format!(
                "the radial problem needs positive scalar curvature, got {curvature}"
            )));
        }
        if intervals < MIN_INTERVALS {
            return Err(Error::Domain(format!(
                "the radial mesh needs at least {MIN_INTERVALS} intervals, got {intervals}"
            )));
        }
        let manifold = ManifoldFactor::homogeneous(volume, curvature)?;
        let radial = RadialGrid::vertex_centered(ce.n(), r_max, intervals)?;
        let grid = ProductGrid::new(manifold, EuclideanFactor::Radial(radial));
        Ok(Self {
            ce,
            volume,
            curvature,
            r_max,
            intervals,
            grid,
        })
    }

    pub fn exponents(&self) -> &ConformalExponents {
        &self.ce
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn curvature(&self) -> f64 {
        self.curvature
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn spacing(&self) -> f64 {
        self.r_max / self.intervals as f64
    }

    pub fn grid(&self) -> &Arc<ProductGrid> {
        &self.grid
    }

    /// Node radii `r_k`, `k = 0..=K`.
    pub fn radii(&self) -> &[f64] {
        self.grid
            .euclid()
            .as_radial()
            .expect("radial problems live on radial grids")
            .nodes()
    }

    /// Same problem on a mesh with a different number of intervals.
    pub fn with_intervals(&self, intervals: usize) -> Result<Self> {
        Self::new(self.ce, self.volume, self.curvature, self.r_max, intervals)
    }

    /// Wraps node values as a [`Field`] on the problem grid.
    pub fn field(&self, profile: &[f64]) -> Result<Field> {
        Field::new(self.grid.clone(), profile.to_vec())
    }
}

/// Weighted `L²` distance between two node profiles on the problem grid.
pub fn profile_distance(prob: &RadialProblem, a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    crate::domain::weighted_norm(prob.grid(), &diff, 2.0)
}
