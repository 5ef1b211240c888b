//! Seeded invariant battery for the rearrangement and functional modules.
//!
//! Random fields come from a ChaCha8 generator seeded with `seed`; trial
//! `t` uses stream `t`, so every trial is reproducible on its own and the
//! report does not depend on how trials are scheduled across threads.
//!
//! Generated fields live on a [`Line1D`](crate::domain::Line1D) grid with
//! `J ∈ [2, 16]` and `h ∈ {0.5, 1}`, over either a homogeneous `M` or a
//! connected weighted graph with 2 to 6 nodes. Interior values are uniform
//! on `[0, 1)`, with about a fifth set to zero and a fifth copied from an
//! earlier value so that ties are common. Boundary cells are zero.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{
    conformal_exponents, grad_lp_norm, lp_distance, lp_norm, ConformalExponents, EuclideanFactor,
    Field, GraphEdge, ManifoldFactor, ProductGrid,
};
use crate::error::Result;
use crate::functional::{el_residual, laplacian, yamabe_quotient};
use crate::rearrange::{
    greedy_polarization_sequence, polarize, polarizer_candidates, steiner_symmetrize, Polarizer,
};

/// Relative tolerance for the inequality and norm checks.
pub const REL_TOL: f64 = 1e-12;

/// Rounding floor for relative polarization gaps.
pub const GAP_FLOOR: f64 = 1e-13;

/// Generator for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn random_manifold(rng: &mut impl Rng) -> Result<ManifoldFactor> {
    if rng.random_bool(0.5) {
        return ManifoldFactor::homogeneous(rng.random_range(0.5..5.0), rng.random_range(0.1..3.0));
    }
    let nodes = rng.random_range(2..=6usize);
    let weights = (0..nodes).map(|_| rng.random_range(0.2..2.0)).collect();
    let curvature = (0..nodes).map(|_| rng.random_range(0.1..3.0)).collect();
    let mut edges: Vec<GraphEdge> = (1..nodes)
        .map(|b| GraphEdge {
            a: b - 1,
            b,
            conductance: rng.random_range(0.1..2.0),
        })
        .collect();
    for a in 0..nodes {
        for b in a + 2..nodes {
            if rng.random_bool(0.3) {
                edges.push(GraphEdge {
                    a,
                    b,
                    conductance: rng.random_range(0.1..2.0),
                });
            }
        }
    }
    ManifoldFactor::weighted_graph(weights, curvature, edges)
}

pub fn random_grid(rng: &mut impl Rng) -> Result<Arc<ProductGrid>> {
    let manifold = random_manifold(rng)?;
    let j = rng.random_range(2..=16usize);
    let h = if rng.random_bool(0.5) { 1.0 } else { 0.5 };
    Ok(ProductGrid::new(manifold, EuclideanFactor::line(j, h)?))
}

/// Random nonnegative field with zero boundary that is not identically 0.
pub fn random_field_on(grid: &Arc<ProductGrid>, rng: &mut impl Rng) -> Result<Field> {
    let cells = grid.cell_count();
    let mut values = vec![0.0; grid.len()];
    for i in 0..grid.node_count() {
        for k in 1..cells - 1 {
            let r: f64 = rng.random();
            let idx = grid.index(i, k);
            values[idx] = if r < 0.2 {
                0.0
            } else if r < 0.4 && idx > 0 {
                values[rng.random_range(0..idx)]
            } else {
                rng.random()
            };
        }
    }
    if values.iter().all(|v| *v == 0.0) {
        values[grid.index(0, cells / 2)] = 1.0;
    }
    Field::new(grid.clone(), values)
}

pub fn random_field(rng: &mut impl Rng) -> Result<Field> {
    let grid = random_grid(rng)?;
    random_field_on(&grid, rng)
}

/// One lobe `height·(1 - ((y - center)/width)²)³₊` of a [`bump_field`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lobe {
    pub center: f64,
    pub width: f64,
    pub height: f64,
}

impl Lobe {
    fn eval(&self, y: f64) -> f64 {
        let t = (y - self.center) / self.width;
        if t.abs() < 1.0 {
            self.height * (1.0 - t * t).powi(3)
        } else {
            0.0
        }
    }
}

/// Sum of compactly supported lobes sampled on `M × [-8, 8]`, constant
/// along `M`.
pub fn bump_field(manifold: ManifoldFactor, spacing: f64, lobes: &[Lobe]) -> Result<Field> {
    let j = (8.0 / spacing).round() as usize;
    let grid = ProductGrid::new(manifold, EuclideanFactor::line(j, spacing)?);
    Field::from_fn(grid, |_, k| {
        let y = (k as f64 - j as f64) * spacing;
        lobes.iter().map(|l| l.eval(y)).sum()
    })
}

/// Relative polarization gap `(‖∇u‖₂ - ‖∇u^H‖₂) / ‖∇u‖₂`.
pub fn polarization_gap(u: &Field, h: Polarizer) -> Result<f64> {
    let g = grad_lp_norm(u, 2.0)?;
    let gh = grad_lp_norm(&polarize(u, h)?, 2.0)?;
    Ok((g - gh) / g)
}

/// Reference two-lobe bump for the refinement check.
pub const REFERENCE_BUMP: [Lobe; 2] = [
    Lobe {
        center: -0.5,
        width: 1.5,
        height: 1.0,
    },
    Lobe {
        center: 1.0,
        width: 1.0,
        height: 0.5,
    },
];

/// Center of the reference half-line `{y < c}`.
pub const REFERENCE_CENTER: f64 = 0.5;

/// Coarsest spacing of the reference refinement.
pub const REFERENCE_SPACING: f64 = 0.125;

/// Gaps of the same bump and half-line at spacings `h`, `h/2`, `h/4`.
pub fn refinement_gaps(
    manifold: &ManifoldFactor,
    spacing: f64,
    lobes: &[Lobe],
    center: f64,
) -> Result<[f64; 3]> {
    let mut gaps = [0.0; 3];
    for (level, gap) in gaps.iter_mut().enumerate() {
        let h = spacing / f64::from(1u32 << level);
        let u = bump_field(manifold.clone(), h, lobes)?;
        *gap = polarization_gap(&u, Polarizer::from_center(center, h)?)?;
    }
    Ok(gaps)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyResult {
    pub name: &'static str,
    /// The statement the property checks.
    pub anchor: &'static str,
    pub trials: usize,
    pub failures: usize,
    /// Largest violation seen, relative unless the check is exact.
    pub worst_violation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: usize,
    pub properties: Vec<PropertyResult>,
    pub pass: bool,
}

struct Property {
    name: &'static str,
    anchor: &'static str,
}

const PROPERTIES: &[Property] = &[
    Property {
        name: "polarize preserves fiber multisets",
        anchor: "||u||_s = ||u^H||_s",
    },
    Property {
        name: "symmetrize preserves fiber multisets",
        anchor: "||u||_s = ||u^*||_s",
    },
    Property {
        name: "polarize preserves L^s norms (s = 1, 2, 4)",
        anchor: "||u||_s = ||u^H||_s",
    },
    Property {
        name: "symmetrize preserves L^s norms (s = 1, 2, 4)",
        anchor: "||u||_s = ||u^*||_s",
    },
    Property {
        name: "polarization does not increase gradient norms (s = 1, 2, 3)",
        anchor: "||grad u^H||_s = ||grad u||_s",
    },
    Property {
        name: "reference polarization gap shrinks under h -> h/2 -> h/4",
        anchor: "||grad u^H||_s = ||grad u||_s",
    },
    Property {
        name: "Polya-Szego (s = 1, 2, 3)",
        anchor: "||grad u^*||_s <= ||grad u||_s",
    },
    Property {
        name: "symmetrization is non-expansive (s = 1, 2)",
        anchor: "||u^* - v^*||_s <= ||u - v||_s",
    },
    Property {
        name: "polarization is non-expansive (s = 1, 2)",
        anchor: "||u^H - v^H||_s <= ||u - v||_s",
    },
    Property {
        name: "quotient does not increase under symmetrization (s = 3, 4, p)",
        anchor: "Q_s(u^*) <= Q_s(u)",
    },
    Property {
        name: "symmetrization is idempotent",
        anchor: "(u^*)^* = u^*",
    },
    Property {
        name: "symmetrization is monotone",
        anchor: "A subset B => A^* subset B^*",
    },
    Property {
        name: "symmetric-decreasing fields are fixed by H0 polarizers",
        anchor: "(u^*)_H = u^*",
    },
    Property {
        name: "greedy distance to {u^*, mirror(u^*)} is nonincreasing (kappa = 1, 0.5)",
        anchor: "||u^H - u^*||_s < ||u - u^*||_s",
    },
    Property {
        name: "greedy distance to u^* strictly decreases while alpha > 0 (kappa = 1, 0.5)",
        anchor: "||u^H - u^*||_s < ||u - u^*||_s",
    },
    Property {
        name: "summation by parts <Lap u, u> = ||grad u||_2^2",
        anchor: "a Lap u + S u = lambda u^(s-1)",
    },
    Property {
        name: "Q_s is scale invariant",
        anchor: "Q_s(c u) = Q_s(u)",
    },
    Property {
        name: "constant fields solve the equation exactly when normalized",
        anchor: "a Lap u + S u = lambda u^(s-1)",
    },
    Property {
        name: "Laplacian of a constant vanishes",
        anchor: "a Lap u + S u = lambda u^(s-1)",
    },
];

/// Outcome of one property in one trial: `(failed, violation)`.
type Outcome = (bool, f64);

fn rel_excess(lhs: f64, rhs: f64) -> f64 {
    if lhs <= rhs {
        0.0
    } else {
        (lhs - rhs) / rhs.abs().max(f64::MIN_POSITIVE)
    }
}

fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// `lhs <= rhs·(1 + REL_TOL)` for every pair.
fn le_all(pairs: impl IntoIterator<Item = (f64, f64)>) -> Outcome {
    let worst = pairs
        .into_iter()
        .map(|(l, r)| rel_excess(l, r))
        .fold(0.0, f64::max);
    (worst > REL_TOL, worst)
}

fn close_all(pairs: impl IntoIterator<Item = (f64, f64)>, tol: f64) -> Outcome {
    let worst = pairs
        .into_iter()
        .map(|(a, b)| rel_diff(a, b))
        .fold(0.0, f64::max);
    (worst > tol, worst)
}

fn sorted_bits(vals: &[f64]) -> Vec<u64> {
    let mut v: Vec<u64> = vals.iter().map(|x| x.to_bits()).collect();
    v.sort_unstable();
    v
}

fn same_multisets(u: &Field, v: &Field) -> Outcome {
    let ok = u
        .fibers()
        .zip(v.fibers())
        .all(|(a, b)| sorted_bits(a) == sorted_bits(b));
    (!ok, if ok { 0.0 } else { 1.0 })
}

fn exact(ok: bool) -> Outcome {
    (!ok, if ok { 0.0 } else { 1.0 })
}

fn trial(seed: u64, t: u64) -> Result<Vec<Outcome>> {
    let mut rng = trial_rng(seed, t);
    let grid = random_grid(&mut rng)?;
    let u = random_field_on(&grid, &mut rng)?;
    let v = random_field_on(&grid, &mut rng)?;
    let ce: ConformalExponents = conformal_exponents(rng.random_range(2..=3), 1)?;
    let candidates = polarizer_candidates(grid.euclid())?;
    let h = candidates[rng.random_range(0..candidates.len())];
    let uh = polarize(&u, h)?;
    let vh = polarize(&v, h)?;
    let us = steiner_symmetrize(&u)?;
    let vs = steiner_symmetrize(&v)?;
    let mut out = Vec::with_capacity(PROPERTIES.len());

    out.push(same_multisets(&u, &uh));
    out.push(same_multisets(&u, &us));
    let norms = |w: &Field| -> Result<Vec<(f64, f64)>> {
        [1.0, 2.0, 4.0]
            .iter()
            .map(|&s| Ok((lp_norm(&u, s)?, lp_norm(w, s)?)))
            .collect()
    };
    out.push(close_all(norms(&uh)?, REL_TOL));
    out.push(close_all(norms(&us)?, REL_TOL));
    let grads = |w: &Field| -> Result<Vec<(f64, f64)>> {
        [1.0, 2.0, 3.0]
            .iter()
            .map(|&s| Ok((grad_lp_norm(w, s)?, grad_lp_norm(&u, s)?)))
            .collect()
    };
    out.push(le_all(grads(&uh)?));

    let gaps = refinement_gaps(grid.manifold(), REFERENCE_SPACING, &REFERENCE_BUMP, REFERENCE_CENTER)?;
    // gaps are already relative; below the floor they are rounding noise
    let worst = (gaps[1] - gaps[0]).max(gaps[2] - gaps[1]).max(0.0);
    out.push((worst > GAP_FLOOR, worst));

    out.push(le_all(grads(&us)?));
    let dist = |a: &Field, b: &Field, s: f64| lp_distance(a, b, s);
    out.push(le_all([
        (dist(&us, &vs, 1.0)?, dist(&u, &v, 1.0)?),
        (dist(&us, &vs, 2.0)?, dist(&u, &v, 2.0)?),
    ]));
    out.push(le_all([
        (dist(&uh, &vh, 1.0)?, dist(&u, &v, 1.0)?),
        (dist(&uh, &vh, 2.0)?, dist(&u, &v, 2.0)?),
    ]));
    let quotients = [3.0, 4.0, ce.p()]
        .iter()
        .map(|&s| {
            Ok((
                yamabe_quotient(&us, s, &ce)?.value,
                yamabe_quotient(&u, s, &ce)?.value,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    out.push(le_all(quotients));

    out.push(exact(steiner_symmetrize(&us)? == us));
    let w = Field::new(
        grid.clone(),
        u.values().iter().zip(v.values()).map(|(a, b)| a + b).collect(),
    )?;
    let ws = steiner_symmetrize(&w)?;
    out.push(exact(us.values().iter().zip(ws.values()).all(|(a, b)| a <= b)));
    let fixed = candidates
        .iter()
        .map(|&g| Ok(polarize(&us, g)? == us))
        .collect::<Result<Vec<bool>>>()?;
    out.push(exact(fixed.into_iter().all(|x| x)));

    let j = grid.euclid().as_line().expect("line grid").half_extent();
    let max_iter = 10 * (2 * j + 1).pow(2);
    let mut pair_worst: f64 = 0.0;
    let mut strict_ok = true;
    for kappa in [1.0, 0.5] {
        let (_, tr) = greedy_polarization_sequence(&u, kappa, max_iter)?;
        let mut prev_pair = tr.initial_pair_distance;
        let mut prev = tr.initial_distance;
        for rec in &tr.steps {
            pair_worst = pair_worst.max(rel_excess(rec.pair_distance, prev_pair));
            strict_ok &= !(rec.alpha > 0.0) || rec.distance < prev;
            prev_pair = rec.pair_distance;
            prev = rec.distance;
        }
    }
    out.push((pair_worst > REL_TOL, pair_worst));
    out.push(exact(strict_ok));

    let lap = laplacian(&u);
    let pairing: f64 = lap
        .iter()
        .zip(u.values())
        .zip(grid.weights())
        .map(|((l, x), w)| l * x * w)
        .sum();
    let g2 = grad_lp_norm(&u, 2.0)?;
    out.push(close_all([(pairing, g2 * g2)], REL_TOL));

    let c = rng.random_range(0.01..100.0);
    let scaled = u.scaled(c)?;
    let scale_pairs = [3.0, 4.0, ce.p()]
        .iter()
        .map(|&s| {
            Ok((
                yamabe_quotient(&u, s, &ce)?.value,
                yamabe_quotient(&scaled, s, &ce)?.value,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    out.push(close_all(scale_pairs, 1e-13));

    // Constants on a homogeneous factor solve the equation iff normalized.
    let s = rng.random_range(2.5..ce.p());
    let homog = ManifoldFactor::homogeneous(rng.random_range(0.5..5.0), rng.random_range(0.1..3.0))?;
    let flat = ProductGrid::new(homog, grid.euclid().clone());
    let one = Field::from_fn(flat, |_, _| 1.0)?;
    let unit = one.scaled(1.0 / lp_norm(&one, s)?)?;
    let off = unit.scaled(2.0)?;
    let res_unit = el_residual(&unit, s, yamabe_quotient(&unit, s, &ce)?.value, &ce);
    let res_off = el_residual(&off, s, yamabe_quotient(&off, s, &ce)?.value, &ce);
    let scale = lp_norm(&off, 2.0)?;
    out.push((
        !(res_unit <= 1e-12 * scale && res_off > 1e-6 * scale),
        res_unit / scale,
    ));

    let konst = Field::from_fn(grid.clone(), |_, _| c)?;
    let lap_max = laplacian(&konst).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    out.push((lap_max > 1e-12 * c, lap_max / c));

    debug_assert_eq!(out.len(), PROPERTIES.len());
    Ok(out)
}

/// Runs `trials` seeded trials of every property. Trials run in parallel
/// and are folded in trial order.
pub fn run_verify(seed: u64, trials: usize) -> Result<VerifyReport> {
    let outcomes: Vec<Vec<Outcome>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| trial(seed, t))
        .collect::<Result<_>>()?;
    let mut properties: Vec<PropertyResult> = PROPERTIES
        .iter()
        .map(|p| PropertyResult {
            name: p.name,
            anchor: p.anchor,
            trials,
            failures: 0,
            worst_violation: 0.0,
        })
        .collect();
    for row in &outcomes {
        for (prop, &(failed, violation)) in properties.iter_mut().zip(row) {
            prop.failures += usize::from(failed);
            prop.worst_violation = prop.worst_violation.max(violation);
        }
    }
    let pass = properties.iter().all(|p| p.failures == 0);
    Ok(VerifyReport {
        seed,
        trials,
        properties,
        pass,
    })
}
