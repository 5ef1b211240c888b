//! Steiner symmetrization with respect to `M`, polarization by half-lines
//! containing the origin, and the greedy iterated-polarization sequence.
//!
//! Everything here acts fiber by fiber on [`Line1D`] grids: for every node
//! of `M` the values along the Euclidean axis are rearranged, and the same
//! polarizer is applied to every fiber.

use crate::domain::{lp_distance, EuclideanFactor, Field, Line1D};
use crate::error::{Error, Result};

fn line_of(u: &Field) -> Result<&Line1D> {
    u.grid().euclid().as_line().ok_or_else(|| {
        Error::UnsupportedGrid("rearrangements act on 1-D lattice grids only".into())
    })
}

/// Storage cells in placement order: `j = 0, +1, -1, +2, -2, ...`.
fn center_out_cells(line: &Line1D) -> Vec<usize> {
    let j_max = line.half_extent() as i64;
    let mut order = Vec::with_capacity(line.cell_count());
    order.push(line.cell_of(0).unwrap());
    for j in 1..=j_max {
        order.push(line.cell_of(j).unwrap());
        order.push(line.cell_of(-j).unwrap());
    }
    order
}

/// Fiberwise symmetric-decreasing rearrangement.
///
/// Each fiber is sorted in descending order (stable) and laid out from the
/// center outwards, positive side first at every rank.
pub fn steiner_symmetrize(u: &Field) -> Result<Field> {
    let line = line_of(u)?;
    let order = center_out_cells(line);
    let mut out = Vec::with_capacity(u.values().len());
    let mut sorted = Vec::with_capacity(line.cell_count());
    let mut placed = vec![0.0; line.cell_count()];
    for fiber in u.fibers() {
        sorted.clear();
        sorted.extend_from_slice(fiber);
        sorted.sort_by(|a, b| b.total_cmp(a));
        for (&cell, &v) in order.iter().zip(&sorted) {
            placed[cell] = v;
        }
        out.extend_from_slice(&placed);
    }
    Ok(Field::from_trusted(u.grid().clone(), out))
}

/// Reflection `y ↦ -y` of every fiber.
pub fn mirror(u: &Field) -> Result<Field> {
    line_of(u)?;
    let mut out = Vec::with_capacity(u.values().len());
    for fiber in u.fibers() {
        out.extend(fiber.iter().rev());
    }
    Ok(Field::from_trusted(u.grid().clone(), out))
}

/// Whether every fiber is nonincreasing in `|y|`: `u(y) ≥ u(y')` whenever
/// `|y| < |y'|`. These are exactly the fields fixed by every lattice
/// polarizer; the symmetrization and its mirror are two of them.
pub fn is_nonincreasing_in_radius(u: &Field) -> Result<bool> {
    let line = line_of(u)?;
    let j_max = line.half_extent() as i64;
    Ok(u.fibers().all(|f| {
        let at = |j: i64| f[line.cell_of(j).unwrap()];
        let mut inner_min = at(0);
        for r in 1..=j_max {
            let (a, b) = (at(r), at(-r));
            if a.max(b) > inner_min {
                return false;
            }
            inner_min = a.min(b);
        }
        true
    }))
}

/// A half-line `H` of `R` containing the origin, bounded by a center `c`
/// on the half-lattice `(h/2)·Z`.
///
/// Stored as the integer `2c/h`; `H = {y < c}` for `c > 0` and
/// `H = {y > c}` for `c < 0`. Reflection `y ↦ 2c - y` maps lattice index
/// `j` to `2c/h - j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Polarizer {
    half_steps: i64,
}

impl Polarizer {
    pub fn new(half_steps: i64) -> Result<Self> {
        if half_steps == 0 {
            return Err(Error::Domain(
                "a polarizer through the origin does not contain it".into(),
            ));
        }
        Ok(Self { half_steps })
    }

    /// Polarizer with center `c` on a lattice of spacing `h`; `c` must be a
    /// nonzero multiple of `h/2`.
    pub fn from_center(center: f64, spacing: f64) -> Result<Self> {
        let q = 2.0 * center / spacing;
        let r = q.round();
        if !q.is_finite() || (q - r).abs() > 1e-9 * r.abs().max(1.0) {
            return Err(Error::Domain(format!(
                "center {center} is not a multiple of h/2 = {}",
                spacing / 2.0
            )));
        }
        Self::new(r as i64)
    }

    pub fn half_steps(&self) -> i64 {
        self.half_steps
    }

    pub fn center(&self, spacing: f64) -> f64 {
        self.half_steps as f64 * spacing / 2.0
    }

    /// Whether lattice index `j` lies in the open half-line `H`.
    pub fn contains(&self, j: i64) -> bool {
        if self.half_steps > 0 {
            2 * j < self.half_steps
        } else {
            2 * j > self.half_steps
        }
    }

    pub fn reflect(&self, j: i64) -> i64 {
        self.half_steps - j
    }
}

/// Two-point rearrangement across `H`: at each pair `(y, ȳ)` with `y ∈ H`
/// the larger value moves to `y`, the smaller to `ȳ`.
///
/// Values outside the grid are zero. A value in `H` whose mirror point is
/// off-grid stays where it is; a nonzero value in the complement whose
/// mirror point is off-grid would leave the grid and is an error.
pub fn polarize(u: &Field, h: Polarizer) -> Result<Field> {
    let line = line_of(u)?;
    let cells = line.cell_count();
    let mut out = u.values().to_vec();
    for (node, fiber) in u.fibers().enumerate() {
        let dst = &mut out[node * cells..(node + 1) * cells];
        for (k, &v) in fiber.iter().enumerate() {
            let j = line.lattice_index(k);
            let jb = h.reflect(j);
            if jb == j {
                continue;
            }
            match line.cell_of(jb) {
                Some(kb) => {
                    if h.contains(j) {
                        let w = fiber[kb];
                        dst[k] = v.max(w);
                        dst[kb] = v.min(w);
                    }
                }
                None => {
                    if !h.contains(j) && v != 0.0 {
                        return Err(Error::ReflectionOutOfDomain {
                            node,
                            cell: k,
                            target: jb,
                        });
                    }
                }
            }
        }
    }
    Ok(Field::from_trusted(u.grid().clone(), out))
}

/// All lattice polarizers with `0 < |c| ≤ J·h`, by increasing `|c|`,
/// positive center first.
pub fn polarizer_candidates(euclid: &EuclideanFactor) -> Result<Vec<Polarizer>> {
    let line = euclid.as_line().ok_or_else(|| {
        Error::UnsupportedGrid("polarizer candidates exist on 1-D lattice grids only".into())
    })?;
    let max = 2 * line.half_extent() as i64;
    Ok((1..=max)
        .flat_map(|m| [Polarizer { half_steps: m }, Polarizer { half_steps: -m }])
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreedyStep {
    pub field: Field,
    pub polarizer: Option<Polarizer>,
    /// Best available `L¹` improvement over all candidates.
    pub alpha: f64,
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("kappa must lie in (0, 1], got {kappa}")))
    }
}

/// One greedy step towards `target`.
///
/// Every candidate polarizer is evaluated; `alpha` is the largest decrease
/// of `‖u - target‖_1`, and the first candidate (in candidate order) whose
/// decrease reaches `kappa·alpha` is applied. When no candidate improves,
/// `u` is returned unchanged with no polarizer.
pub fn greedy_polarization_step(u: &Field, target: &Field, kappa: f64) -> Result<GreedyStep> {
    check_kappa(kappa)?;
    let candidates = polarizer_candidates(u.grid().euclid())?;
    let before = lp_distance(u, target, 1.0)?;
    let mut evaluated = Vec::with_capacity(candidates.len());
    for h in candidates {
        let moved = polarize(u, h)?;
        let gain = before - lp_distance(&moved, target, 1.0)?;
        evaluated.push((h, moved, gain));
    }
    let alpha = evaluated
        .iter()
        .map(|(_, _, g)| *g)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(alpha > 0.0) {
        return Ok(GreedyStep {
            field: u.clone(),
            polarizer: None,
            alpha: alpha.max(0.0),
        });
    }
    let (h, field, _) = evaluated
        .into_iter()
        .find(|(_, _, g)| *g >= kappa * alpha)
        .expect("the maximizer itself qualifies");
    Ok(GreedyStep {
        field,
        polarizer: Some(h),
        alpha,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GreedyStatus {
    ReachedTarget,
    ReachedMirror,
    Stalled,
    MaxIter,
}

impl GreedyStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            GreedyStatus::ReachedTarget => "ReachedTarget",
            GreedyStatus::ReachedMirror => "ReachedMirror",
            GreedyStatus::Stalled => "Stalled",
            GreedyStatus::MaxIter => "MaxIter",
        }
    }

    pub fn converged(&self) -> bool {
        matches!(self, GreedyStatus::ReachedTarget | GreedyStatus::ReachedMirror)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreedyRecord {
    pub polarizer: Polarizer,
    pub alpha: f64,
    /// `‖u_m - u*‖_1` after the step.
    pub distance: f64,
    /// `min(‖u_m - u*‖_1, ‖u_m - mirror(u*)‖_1)` after the step.
    pub pair_distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreedyTrace {
    pub initial_distance: f64,
    pub initial_pair_distance: f64,
    pub steps: Vec<GreedyRecord>,
    pub status: GreedyStatus,
}

/// Iterates [`greedy_polarization_step`] against `steiner_symmetrize(u)`
/// until the field equals the target or its mirror, no candidate improves,
/// or `max_iter` steps were taken.
pub fn greedy_polarization_sequence(
    u: &Field,
    kappa: f64,
    max_iter: usize,
) -> Result<(Field, GreedyTrace)> {
    check_kappa(kappa)?;
    let target = steiner_symmetrize(u)?;
    let mirrored = mirror(&target)?;
    let distances = |f: &Field| -> Result<(f64, f64)> {
        let d = lp_distance(f, &target, 1.0)?;
        let dm = lp_distance(f, &mirrored, 1.0)?;
        Ok((d, d.min(dm)))
    };
    let (initial_distance, initial_pair_distance) = distances(u)?;
    let mut current = u.clone();
    let mut steps = Vec::new();
    let status = loop {
        if current == target {
            break GreedyStatus::ReachedTarget;
        }
        if current == mirrored {
            break GreedyStatus::ReachedMirror;
        }
        if steps.len() >= max_iter {
            break GreedyStatus::MaxIter;
        }
        let step = greedy_polarization_step(&current, &target, kappa)?;
        let Some(polarizer) = step.polarizer else {
            break GreedyStatus::Stalled;
        };
        current = step.field;
        let (distance, pair_distance) = distances(&current)?;
        steps.push(GreedyRecord {
            polarizer,
            alpha: step.alpha,
            distance,
            pair_distance,
        });
    };
    Ok((
        current,
        GreedyTrace {
            initial_distance,
            initial_pair_distance,
            steps,
            status,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{EuclideanFactor, ManifoldFactor, ProductGrid};
    use std::sync::Arc;

    fn grid(j: usize) -> Arc<ProductGrid> {
        ProductGrid::new(
            ManifoldFactor::homogeneous(1.0, 1.0).unwrap(),
            EuclideanFactor::line(j, 1.0).unwrap(),
        )
    }

    fn field(values: &[f64]) -> Field {
        Field::new(grid(values.len() / 2), values.to_vec()).unwrap()
    }

    #[test]
    fn symmetrize_places_center_out() {
        let u = field(&[3.0, 0.0, 1.0, 0.0, 2.0]);
        let s = steiner_symmetrize(&u).unwrap();
        assert_eq!(s.values(), &[0.0, 1.0, 3.0, 2.0, 0.0]);
        assert_eq!(steiner_symmetrize(&s).unwrap(), s);
        let c = field(&[2.5; 7]);
        assert_eq!(steiner_symmetrize(&c).unwrap(), c);
    }

    #[test]
    fn symmetrize_rejects_radial() {
        let g = ProductGrid::new(
            ManifoldFactor::homogeneous(1.0, 1.0).unwrap(),
            EuclideanFactor::radial(2, 1.0, 4).unwrap(),
        );
        let u = Field::zeros(g);
        assert!(matches!(steiner_symmetrize(&u), Err(Error::UnsupportedGrid(_))));
        assert!(matches!(mirror(&u), Err(Error::UnsupportedGrid(_))));
        assert!(matches!(
            polarizer_candidates(u.grid().euclid()),
            Err(Error::UnsupportedGrid(_))
        ));
    }

    #[test]
    fn polarize_examples() {
        let h = Polarizer::from_center(0.5, 1.0).unwrap();
        let u = field(&[0.0, 1.0, 0.0, 4.0, 0.0]);
        assert_eq!(polarize(&u, h).unwrap().values(), &[0.0, 1.0, 4.0, 0.0, 0.0]);
        let v = field(&[0.0, 1.0, 5.0, 2.0, 0.0]);
        assert_eq!(polarize(&v, h).unwrap(), v);
    }

    #[test]
    fn symmetric_decreasing_is_fixed_by_every_candidate() {
        let u = field(&[0.0, 1.0, 2.0, 4.0, 3.0, 1.0, 0.0]);
        let s = steiner_symmetrize(&u).unwrap();
        for h in polarizer_candidates(s.grid().euclid()).unwrap() {
            assert_eq!(polarize(&s, h).unwrap(), s, "{h:?}");
        }
    }

    #[test]
    fn polarizer_geometry() {
        let h = Polarizer::from_center(1.0, 1.0).unwrap();
        assert_eq!(h.half_steps(), 2);
        assert!(h.contains(0) && !h.contains(1) && !h.contains(2));
        assert_eq!(h.reflect(-1), 3);
        let g = Polarizer::from_center(-0.5, 1.0).unwrap();
        assert!(g.contains(0) && !g.contains(-1));
        assert!(Polarizer::from_center(0.3, 1.0).is_err());
        assert!(Polarizer::from_center(0.0, 1.0).is_err());
    }

    #[test]
    fn candidate_enumeration() {
        let c = polarizer_candidates(&EuclideanFactor::line(1, 1.0).unwrap()).unwrap();
        let centers: Vec<f64> = c.iter().map(|h| h.center(1.0)).collect();
        assert_eq!(centers, vec![0.5, -0.5, 1.0, -1.0]);
        assert_eq!(polarizer_candidates(&EuclideanFactor::line(2, 1.0).unwrap()).unwrap().len(), 8);
    }

    #[test]
    fn greedy_step_examples() {
        let u = field(&[0.0, 1.0, 0.0, 4.0, 0.0]);
        let target = field(&[0.0, 1.0, 4.0, 0.0, 0.0]);

        let same = greedy_polarization_step(&target, &target, 1.0).unwrap();
        assert_eq!(same.polarizer, None);
        assert_eq!(same.alpha, 0.0);
        assert_eq!(same.field, target);

        let step = greedy_polarization_step(&u, &target, 1.0).unwrap();
        assert_eq!(step.field, target);
        assert_eq!(step.polarizer.unwrap().center(1.0), 0.5);
        assert_eq!(step.alpha, 8.0);
        // with positive-side-first ties the rearrangement is the mirror of
        // that target, and the same move lands on the mirror
        let star = steiner_symmetrize(&u).unwrap();
        assert_eq!(star.values(), &[0.0, 0.0, 4.0, 1.0, 0.0]);
        let step = greedy_polarization_step(&u, &star, 1.0).unwrap();
        assert_eq!(step.field, mirror(&star).unwrap());
        assert_eq!(step.polarizer.unwrap().center(1.0), 0.5);
        assert_eq!(step.alpha, 6.0);
        assert!(greedy_polarization_step(&u, &target, 0.0).is_err());
        assert!(greedy_polarization_step(&u, &target, 1.5).is_err());
    }

    #[test]
    fn greedy_sequence_terminal_states() {
        let s = field(&[0.0, 1.0, 3.0, 2.0, 0.0]);
        let (f, trace) = greedy_polarization_sequence(&s, 1.0, 100).unwrap();
        assert_eq!(f, s);
        assert_eq!(trace.status, GreedyStatus::ReachedTarget);
        assert!(trace.steps.is_empty());

        let m = field(&[0.0, 2.0, 3.0, 1.0, 0.0]);
        assert_eq!(mirror(&s).unwrap(), m);
        // fixed by every lattice polarizer
        for h in polarizer_candidates(m.grid().euclid()).unwrap() {
            assert_eq!(polarize(&m, h).unwrap(), m);
        }
        let (_, trace) = greedy_polarization_sequence(&m, 1.0, 100).unwrap();
        assert_eq!(trace.status, GreedyStatus::ReachedMirror);
        assert!(trace.steps.is_empty());

        let u = field(&[0.0, 1.0, 0.0, 4.0, 0.0]);
        let (f, trace) = greedy_polarization_sequence(&u, 1.0, 100).unwrap();
        assert_eq!(trace.status, GreedyStatus::ReachedMirror);
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(f.values(), &[0.0, 1.0, 4.0, 0.0, 0.0]);

        let u = field(&[0.0, 4.0, 0.0, 1.0, 0.0]);
        let (f, trace) = greedy_polarization_sequence(&u, 1.0, 100).unwrap();
        assert_eq!(trace.status, GreedyStatus::ReachedTarget);
        assert_eq!(f, steiner_symmetrize(&u).unwrap());

        let (_, trace) = greedy_polarization_sequence(&u, 1.0, 0).unwrap();
        assert_eq!(trace.status, GreedyStatus::MaxIter);
    }

    #[test]
    fn side_permuted_arrangement_stalls() {
        // unimodal in |y| but with the larger second-rank value on the
        // negative side and the larger third-rank value on the positive side
        let u = field(&[0.0, 1.0, 5.0, 7.0, 4.0, 2.0, 0.0]);
        assert!(is_nonincreasing_in_radius(&u).unwrap());
        let (_, trace) = greedy_polarization_sequence(&u, 1.0, 100).unwrap();
        assert_eq!(trace.status, GreedyStatus::Stalled);
    }

    #[test]
    fn mirror_examples() {
        let u = field(&[0.0, 1.0, 3.0, 2.0, 0.0]);
        assert_eq!(mirror(&u).unwrap().values(), &[0.0, 2.0, 3.0, 1.0, 0.0]);
        assert_eq!(mirror(&mirror(&u).unwrap()).unwrap(), u);
        let sym = field(&[0.0, 1.0, 3.0, 1.0, 0.0]);
        assert_eq!(mirror(&sym).unwrap(), sym);
    }

    #[test]
    fn radius_monotonicity_check() {
        assert!(is_nonincreasing_in_radius(&field(&[0.0, 1.0, 3.0, 2.0, 0.0])).unwrap());
        assert!(!is_nonincreasing_in_radius(&field(&[0.0, 3.0, 1.0, 2.0, 0.0])).unwrap());
    }
}
