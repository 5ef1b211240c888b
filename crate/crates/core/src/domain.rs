//! Discrete geometry of the product `N = M × R^n`.
//!
//! The closed factor `M` is modelled either as a single homogeneous node
//! (volume and constant scalar curvature) or as a weighted graph whose
//! nodes carry quadrature volumes and curvature samples. The Euclidean
//! factor is either a symmetric 1-D lattice, used by the rearrangement
//! operations, or a radial shell grid, used by the solver.
//!
//! All quadratures run in a fixed index order so that results are
//! bit-reproducible.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Dimensions of the two factors and the conformal constants of the product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConformalExponents {
    m: u32,
    n: u32,
    d: u32,
    a: f64,
    p: f64,
}

impl ConformalExponents {
    pub fn new(m: u32, n: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::Dimension(format!(
                "the closed factor needs dimension m >= 2, got m = {m}"
            )));
        }
        if n < 1 {
            return Err(Error::Dimension(format!(
                "the Euclidean factor needs dimension n >= 1, got n = {n}"
            )));
        }
        let d = m + n;
        let df = f64::from(d);
        Ok(Self {
            m,
            n,
            d,
            a: 4.0 * (df - 1.0) / (df - 2.0),
            p: 2.0 * df / (df - 2.0),
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Total dimension `m + n`.
    pub fn d(&self) -> u32 {
        self.d
    }

    /// Coefficient of the Dirichlet term, `4(d-1)/(d-2)`.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Critical Sobolev exponent, `2d/(d-2)`.
    pub fn p(&self) -> f64 {
        self.p
    }
}

pub fn conformal_exponents(m: u32, n: u32) -> Result<ConformalExponents> {
    ConformalExponents::new(m, n)
}

/// `Γ(k/2)` for a positive integer `k`.
pub(crate) fn gamma_half(k: u32) -> f64 {
    assert!(k >= 1);
    let (mut x, mut g) = if k.is_multiple_of(2) { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    let target = f64::from(k) / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: u32) -> f64 {
    PI.powf(f64::from(n) / 2.0) / gamma_half(n + 2)
}

/// Area of the unit sphere `S^{n-1} ⊂ R^n` (equals 2 for `n = 1`).
pub fn unit_sphere_area(n: u32) -> f64 {
    f64::from(n) * unit_ball_volume(n)
}

/// A single homogeneous node standing for a closed manifold of constant
/// scalar curvature.
#[derive(Clone, Debug, PartialEq)]
pub struct Homogeneous {
    volume: f64,
    scalar_curvature: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphEdge {
    pub a: usize,
    pub b: usize,
    pub conductance: f64,
}

/// Weighted-graph model of `M`: quadrature volumes, curvature samples and
/// conductances for the M-direction differences.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    node_weights: Vec<f64>,
    scalar_curvature: Vec<f64>,
    edges: Vec<GraphEdge>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ManifoldFactor {
    Homogeneous(Homogeneous),
    WeightedGraph(WeightedGraph),
}

impl ManifoldFactor {
    pub fn homogeneous(volume: f64, scalar_curvature: f64) -> Result<Self> {
        if !(volume.is_finite() && volume > 0.0) {
            return Err(Error::Domain(format!("volume must be positive, got {volume}")));
        }
        if !scalar_curvature.is_finite() {
            return Err(Error::Domain("scalar curvature must be finite".into()));
        }
        Ok(ManifoldFactor::Homogeneous(Homogeneous {
            volume,
            scalar_curvature,
        }))
    }

    pub fn weighted_graph(
        node_weights: Vec<f64>,
        scalar_curvature: Vec<f64>,
        edges: Vec<GraphEdge>,
    ) -> Result<Self> {
        if node_weights.is_empty() {
            return Err(Error::Domain("graph needs at least one node".into()));
        }
        if node_weights.len() != scalar_curvature.len() {
            return Err(Error::Domain(format!(
                "{} node weights but {} curvature values",
                node_weights.len(),
                scalar_curvature.len()
            )));
        }
        if let Some(w) = node_weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::Domain(format!("node weight must be positive, got {w}")));
        }
        if scalar_curvature.iter().any(|s| !s.is_finite()) {
            return Err(Error::Domain("scalar curvature must be finite".into()));
        }
        let count = node_weights.len();
        for e in &edges {
            if e.a >= count || e.b >= count {
                return Err(Error::Domain(format!(
                    "edge ({}, {}) references a node outside 0..{count}",
                    e.a, e.b
                )));
            }
            if e.a == e.b {
                return Err(Error::Domain(format!("self-loop at node {}", e.a)));
            }
            if !(e.conductance.is_finite() && e.conductance > 0.0) {
                return Err(Error::Domain(format!(
                    "conductance must be positive, got {}",
                    e.conductance
                )));
            }
        }
        Ok(ManifoldFactor::WeightedGraph(WeightedGraph {
            node_weights,
            scalar_curvature,
            edges,
        }))
    }

    pub fn node_count(&self) -> usize {
        match self {
            ManifoldFactor::Homogeneous(_) => 1,
            ManifoldFactor::WeightedGraph(g) => g.node_weights.len(),
        }
    }

    pub fn node_weight(&self, i: usize) -> f64 {
        match self {
            ManifoldFactor::Homogeneous(h) => h.volume,
            ManifoldFactor::WeightedGraph(g) => g.node_weights[i],
        }
    }

    pub fn curvature(&self, i: usize) -> f64 {
        match self {
            ManifoldFactor::Homogeneous(h) => h.scalar_curvature,
            ManifoldFactor::WeightedGraph(g) => g.scalar_curvature[i],
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            ManifoldFactor::Homogeneous(h) => h.volume,
            ManifoldFactor::WeightedGraph(g) => g.node_weights.iter().sum(),
        }
    }

    pub fn edges(&self) -> &[GraphEdge] {
        match self {
            ManifoldFactor::Homogeneous(_) => &[],
            ManifoldFactor::WeightedGraph(g) => &g.edges,
        }
    }

    pub fn node_weights(&self) -> Vec<f64> {
        (0..self.node_count()).map(|i| self.node_weight(i)).collect()
    }

    pub fn curvatures(&self) -> Vec<f64> {
        (0..self.node_count()).map(|i| self.curvature(i)).collect()
    }
}

/// Symmetric lattice `y_j = j·h`, `j ∈ [-J, J]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Line1D {
    half_extent: usize,
    spacing: f64,
}

impl Line1D {
    pub fn half_extent(&self) -> usize {
        self.half_extent
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn cell_count(&self) -> usize {
        2 * self.half_extent + 1
    }

    /// Lattice coordinate `j` of storage cell `k`.
    pub fn lattice_index(&self, k: usize) -> i64 {
        k as i64 - self.half_extent as i64
    }

    /// Storage cell of lattice coordinate `j`, if it lies in the grid.
    pub fn cell_of(&self, j: i64) -> Option<usize> {
        let k = j + self.half_extent as i64;
        (0..self.cell_count() as i64).contains(&k).then_some(k as usize)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadialLayout {
    /// `K` shells `[k·Δr, (k+1)·Δr]`, values at shell midpoints.
    CellCentered,
    /// `K + 1` nodes `r_k = k·Δr`; node `k` owns the dual shell
    /// `[r_k - Δr/2, r_k + Δr/2] ∩ [0, r_max]`.
    VertexCentered,
}

/// Radial shell grid on `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialGrid {
    dim: u32,
    r_max: f64,
    intervals: usize,
    layout: RadialLayout,
    boundaries: Vec<f64>,
    nodes: Vec<f64>,
    shell_volumes: Vec<f64>,
}

impl RadialGrid {
    pub fn new(dim: u32, r_max: f64, intervals: usize, layout: RadialLayout) -> Result<Self> {
        if dim < 1 {
            return Err(Error::Dimension("radial grid needs n >= 1".into()));
        }
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::Domain(format!("r_max must be positive, got {r_max}")));
        }
        if intervals < 1 {
            return Err(Error::Domain("radial grid needs at least one interval".into()));
        }
        let dr = r_max / intervals as f64;
        let (boundaries, nodes): (Vec<f64>, Vec<f64>) = match layout {
            RadialLayout::CellCentered => (
                (0..=intervals).map(|k| k as f64 * dr).collect(),
                (0..intervals).map(|k| (k as f64 + 0.5) * dr).collect(),
            ),
            RadialLayout::VertexCentered => {
                let mut b = Vec::with_capacity(intervals + 2);
                b.push(0.0);
                b.extend((0..intervals).map(|k| (k as f64 + 0.5) * dr));
                b.push(r_max);
                (b, (0..=intervals).map(|k| k as f64 * dr).collect())
            }
        };
        let omega = unit_ball_volume(dim);
        let n = dim as i32;
        let shell_volumes = boundaries
            .windows(2)
            .map(|w| omega * (w[1].powi(n) - w[0].powi(n)))
            .collect();
        Ok(Self {
            dim,
            r_max,
            intervals,
            layout,
            boundaries,
            nodes,
            shell_volumes,
        })
    }

    pub fn cell_centered(dim: u32, r_max: f64, cells: usize) -> Result<Self> {
        Self::new(dim, r_max, cells, RadialLayout::CellCentered)
    }

    pub fn vertex_centered(dim: u32, r_max: f64, intervals: usize) -> Result<Self> {
        Self::new(dim, r_max, intervals, RadialLayout::VertexCentered)
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn layout(&self) -> RadialLayout {
        self.layout
    }

    pub fn spacing(&self) -> f64 {
        self.r_max / self.intervals as f64
    }

    /// Shell boundaries, `cell_count() + 1` entries from 0 to `r_max`.
    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// Radius carrying each cell's value.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn shell_volumes(&self) -> &[f64] {
        &self.shell_volumes
    }

    pub fn cell_count(&self) -> usize {
        self.nodes.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum EuclideanFactor {
    Line(Line1D),
    Radial(RadialGrid),
}

impl EuclideanFactor {
    pub fn line(half_extent: usize, spacing: f64) -> Result<Self> {
        if half_extent < 1 {
            return Err(Error::Domain("line grid needs J >= 1".into()));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::Domain(format!("spacing must be positive, got {spacing}")));
        }
        Ok(EuclideanFactor::Line(Line1D {
            half_extent,
            spacing,
        }))
    }

    pub fn radial(dim: u32, r_max: f64, cells: usize) -> Result<Self> {
        RadialGrid::cell_centered(dim, r_max, cells).map(EuclideanFactor::Radial)
    }

    pub fn cell_count(&self) -> usize {
        match self {
            EuclideanFactor::Line(l) => l.cell_count(),
            EuclideanFactor::Radial(r) => r.cell_count(),
        }
    }

    pub fn cell_volume(&self, k: usize) -> f64 {
        match self {
            EuclideanFactor::Line(l) => l.spacing,
            EuclideanFactor::Radial(r) => r.shell_volumes[k],
        }
    }

    pub fn volume(&self) -> f64 {
        (0..self.cell_count()).map(|k| self.cell_volume(k)).sum()
    }

    /// Distance of cell `k` from the origin of `R^n`.
    pub fn radius(&self, k: usize) -> f64 {
        match self {
            EuclideanFactor::Line(l) => (l.lattice_index(k) as f64 * l.spacing).abs(),
            EuclideanFactor::Radial(r) => r.nodes[k],
        }
    }

    pub fn as_line(&self) -> Option<&Line1D> {
        match self {
            EuclideanFactor::Line(l) => Some(l),
            EuclideanFactor::Radial(_) => None,
        }
    }

    pub fn as_radial(&self) -> Option<&RadialGrid> {
        match self {
            EuclideanFactor::Radial(r) => Some(r),
            EuclideanFactor::Line(_) => None,
        }
    }

    /// Difference edges of one fiber: `(k, k', measure, length)`.
    ///
    /// Only interior edges are listed; fields are compactly supported, so
    /// the edges leaving the grid carry a zero difference.
    fn edges(&self) -> Vec<(usize, usize, f64, f64)> {
        match self {
            EuclideanFactor::Line(l) => (0..l.cell_count() - 1)
                .map(|k| (k, k + 1, l.spacing, l.spacing))
                .collect(),
            EuclideanFactor::Radial(r) => {
                let sigma = unit_sphere_area(r.dim);
                (0..r.cell_count() - 1)
                    .map(|k| {
                        let len = r.nodes[k + 1] - r.nodes[k];
                        let area = sigma * r.boundaries[k + 1].powi(r.dim as i32 - 1);
                        (k, k + 1, area * len, len)
                    })
                    .collect()
            }
        }
    }
}

pub fn total_volume(manifold: &ManifoldFactor, euclid: &EuclideanFactor) -> f64 {
    manifold.volume() * euclid.volume()
}

/// One term `measure · |(u_a - u_b) / length|^s` of the discrete gradient norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct DiffEdge {
    pub a: usize,
    pub b: usize,
    pub measure: f64,
    pub length: f64,
}

impl DiffEdge {
    /// Coefficient of `(u_a - u_b)^2` in the Dirichlet energy.
    pub fn stiffness(&self) -> f64 {
        self.measure / (self.length * self.length)
    }
}

/// The product grid: quadrature weights per site and the difference edges
/// of both directions, flattened as `site = node * cells + cell`.
#[derive(Debug, PartialEq)]
pub struct ProductGrid {
    manifold: ManifoldFactor,
    euclid: EuclideanFactor,
    weights: Vec<f64>,
    edges: Vec<DiffEdge>,
}

impl ProductGrid {
    pub fn new(manifold: ManifoldFactor, euclid: EuclideanFactor) -> Arc<Self> {
        let nodes = manifold.node_count();
        let cells = euclid.cell_count();
        let mut weights = Vec::with_capacity(nodes * cells);
        for i in 0..nodes {
            let w = manifold.node_weight(i);
            weights.extend((0..cells).map(|k| w * euclid.cell_volume(k)));
        }
        let mut edges = Vec::new();
        let fiber_edges = euclid.edges();
        for i in 0..nodes {
            let w = manifold.node_weight(i);
            edges.extend(fiber_edges.iter().map(|&(k, l, measure, length)| DiffEdge {
                a: i * cells + k,
                b: i * cells + l,
                measure: w * measure,
                length,
            }));
        }
        for e in manifold.edges() {
            edges.extend((0..cells).map(|k| DiffEdge {
                a: e.a * cells + k,
                b: e.b * cells + k,
                measure: e.conductance * euclid.cell_volume(k),
                length: 1.0,
            }));
        }
        Arc::new(Self {
            manifold,
            euclid,
            weights,
            edges,
        })
    }

    pub fn manifold(&self) -> &ManifoldFactor {
        &self.manifold
    }

    pub fn euclid(&self) -> &EuclideanFactor {
        &self.euclid
    }

    pub fn node_count(&self) -> usize {
        self.manifold.node_count()
    }

    pub fn cell_count(&self) -> usize {
        self.euclid.cell_count()
    }

    /// Number of sites, `nodes × cells`.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn index(&self, node: usize, cell: usize) -> usize {
        node * self.cell_count() + cell
    }

    /// Quadrature weight `w_i · vol_k` of every site.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Scalar curvature sample of every site.
    pub fn site_curvatures(&self) -> Vec<f64> {
        let cells = self.cell_count();
        (0..self.len())
            .map(|idx| self.manifold.curvature(idx / cells))
            .collect()
    }

    pub fn total_volume(&self) -> f64 {
        total_volume(&self.manifold, &self.euclid)
    }

    pub(crate) fn edges(&self) -> impl Iterator<Item = DiffEdge> + '_ {
        self.edges.iter().copied()
    }
}

/// Nonnegative function values on a [`ProductGrid`], stored fiber by fiber.
#[derive(Clone, Debug)]
pub struct Field {
    grid: Arc<ProductGrid>,
    values: Vec<f64>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid)
            && self.values == other.values
    }
}

impl Field {
    pub fn new(grid: Arc<ProductGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Domain(format!(
                "field has {} values, grid has {} sites",
                values.len(),
                grid.len()
            )));
        }
        if let Some((idx, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::Domain(format!(
                "field values must be finite and nonnegative, site {idx} holds {v}"
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Arc<ProductGrid>, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let cells = grid.cell_count();
        let values = (0..grid.len()).map(|idx| f(idx / cells, idx % cells)).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: Arc<ProductGrid>) -> Self {
        let values = vec![0.0; grid.len()];
        Self { grid, values }
    }

    /// Builds a field from values already known to be valid.
    pub(crate) fn from_trusted(grid: Arc<ProductGrid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        debug_assert!(values.iter().all(|v| v.is_finite() && *v >= 0.0));
        Self { grid, values }
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.grid.clone(), values)
    }

    pub fn grid(&self) -> &Arc<ProductGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn value(&self, node: usize, cell: usize) -> f64 {
        self.values[self.grid.index(node, cell)]
    }

    pub fn fiber(&self, node: usize) -> &[f64] {
        let cells = self.grid.cell_count();
        &self.values[node * cells..(node + 1) * cells]
    }

    pub fn fibers(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.grid.cell_count())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    /// Whether the outermost cells vanish on every fiber (both ends of a
    /// line grid, the outer shell of a radial grid).
    pub fn has_zero_boundary(&self) -> bool {
        let last = self.grid.cell_count() - 1;
        let radial = self.grid.euclid().as_radial().is_some();
        self.fibers()
            .all(|f| f[last] == 0.0 && (radial || f[0] == 0.0))
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        self.with_values(self.values.iter().map(|v| c * v).collect())
    }
}

#[inline]
pub(crate) fn pow_s(x: f64, s: f64) -> f64 {
    if s == 2.0 {
        x * x
    } else if s == 1.0 {
        x
    } else {
        x.powf(s)
    }
}

pub(crate) fn check_exponent(s: f64) -> Result<()> {
    if s.is_finite() && s >= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("exponent s must satisfy s >= 1, got {s}")))
    }
}

/// Weighted `s`-norm of a signed array on `grid`.
pub(crate) fn weighted_norm(grid: &ProductGrid, values: &[f64], s: f64) -> f64 {
    let sum: f64 = grid
        .weights()
        .iter()
        .zip(values)
        .map(|(w, v)| w * pow_s(v.abs(), s))
        .sum();
    if s == 1.0 {
        sum
    } else if s == 2.0 {
        sum.sqrt()
    } else {
        sum.powf(1.0 / s)
    }
}

/// `(Σ w_i vol_k u_ik^s)^{1/s}`.
pub fn lp_norm(u: &Field, s: f64) -> Result<f64> {
    check_exponent(s)?;
    Ok(weighted_norm(&u.grid, &u.values, s))
}

/// `‖u - v‖_s` for two fields on the same grid.
pub fn lp_distance(u: &Field, v: &Field, s: f64) -> Result<f64> {
    check_exponent(s)?;
    same_grid(u, v)?;
    let diff: Vec<f64> = u.values.iter().zip(&v.values).map(|(a, b)| a - b).collect();
    Ok(weighted_norm(&u.grid, &diff, s))
}

pub(crate) fn same_grid(u: &Field, v: &Field) -> Result<()> {
    if Arc::ptr_eq(&u.grid, &v.grid) || u.grid == v.grid {
        Ok(())
    } else {
        Err(Error::Domain("fields live on different grids".into()))
    }
}

/// `s`-th power of the discrete gradient norm of a raw value array.
pub(crate) fn gradient_power_sum(grid: &ProductGrid, values: &[f64], s: f64) -> f64 {
    grid.edges()
        .map(|e| e.measure * pow_s(((values[e.a] - values[e.b]) / e.length).abs(), s))
        .sum()
}

/// `s`-norm of the discrete gradient.
///
/// Every difference edge of the product grid is one quadrature site:
/// Euclidean edges `(u_{k+1} - u_k)/h` with measure `w_i·h`, M-direction
/// edges `u_i - u_j` with measure `c_ij·vol_k`, radial edges with the shell
/// interface area times the node spacing. For `s = 2` this is the usual
/// Dirichlet energy.
pub fn grad_lp_norm(u: &Field, s: f64) -> Result<f64> {
    check_exponent(s)?;
    let sum = gradient_power_sum(&u.grid, &u.values, s);
    Ok(if s == 1.0 { sum } else { sum.powf(1.0 / s) })
}

/// `‖∇u‖_2^2`.
pub fn dirichlet_energy(u: &Field) -> f64 {
    gradient_power_sum(&u.grid, &u.values, 2.0)
}

/// Fraction of `∫ u^s` carried by the sites with `|y| ≤ t`, for each `t`.
pub fn mass_profile(u: &Field, s: f64, radii: &[f64]) -> Result<Vec<f64>> {
    check_exponent(s)?;
    if radii.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain("radii must be strictly increasing".into()));
    }
    let grid = &u.grid;
    let cells = grid.cell_count();
    let euclid = grid.euclid();
    let dens: Vec<f64> = grid
        .weights()
        .iter()
        .zip(&u.values)
        .map(|(w, v)| w * pow_s(*v, s))
        .collect();
    let total: f64 = dens.iter().sum();
    if total <= 0.0 {
        return Err(Error::Domain("mass profile of the zero field".into()));
    }
    Ok(radii
        .iter()
        .map(|&t| {
            let inside: f64 = dens
                .iter()
                .enumerate()
                .filter(|(idx, _)| euclid.radius(idx % cells) <= t)
                .map(|(_, d)| d)
                .sum();
            inside / total
        })
        .collect())
}
