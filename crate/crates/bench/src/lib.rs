//! Fixtures shared by the criterion benches in `benches/`.

use std::f64::consts::PI;

use yamalab_core::verify::{random_field_on, trial_rng};
use yamalab_core::{
    conformal_exponents, EuclideanFactor, Field, GraphEdge, ManifoldFactor, ProductGrid,
    RadialProblem,
};

/// Seeded field on a path graph with `nodes` nodes times a line of
/// half-extent `half_extent`.
pub fn line_field(nodes: usize, half_extent: usize, seed: u64) -> Field {
    let manifold = if nodes == 1 {
        ManifoldFactor::homogeneous(1.0, 1.0).unwrap()
    } else {
        ManifoldFactor::weighted_graph(
            vec![1.0; nodes],
            vec![1.0; nodes],
            (1..nodes)
                .map(|b| GraphEdge { a: b - 1, b, conductance: 1.0 })
                .collect(),
        )
        .unwrap()
    };
    let grid = ProductGrid::new(manifold, EuclideanFactor::line(half_extent, 0.5).unwrap());
    random_field_on(&grid, &mut trial_rng(seed, 0)).unwrap()
}

/// Round `S² × R` with `intervals` radial intervals on `[0, 12]`.
pub fn radial_problem(intervals: usize) -> RadialProblem {
    let ce = conformal_exponents(2, 1).unwrap();
    RadialProblem::new(ce, 4.0 * PI, 2.0, 12.0, intervals).unwrap()
}
