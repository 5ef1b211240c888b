use serde::Serialize;

use super::RadialProblem;
use crate::domain::{gradient_power_sum, pow_s, weighted_norm};
use crate::error::{Error, Result};
use crate::functional::{check_quotient_exponent, curvature_term, el_defect};

/// Relative change of `Q_s` below which the flow counts as stationary.
const STATIONARY_CHANGE: f64 = 1e-12;

/// Slack, in relative units of `Q_s`, within which a step counts as not
/// raising the quotient once descent is below floating-point resolution.
const ROUNDING_SLACK: f64 = 64.0 * f64::EPSILON;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Target for the weighted `L²` Euler–Lagrange residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Step halvings tried before a step is declared flat.
    pub max_backtracks: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 5000,
            max_backtracks: 40,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub s: f64,
    pub lambda_s: f64,
    /// Node values `f_k`, `k = 0..=K`, normalized to `‖u‖_s = 1`.
    pub profile: Vec<f64>,
    pub radii: Vec<f64>,
    pub iterations: usize,
    pub final_residual: f64,
    pub final_quotient: f64,
    pub norm_check: f64,
    /// Fraction of `∫u^s` carried by the outer tenth of the domain.
    pub boundary_mass: f64,
    /// `Q_s` of the initial iterate followed by every accepted iterate.
    pub quotient_trace: Vec<f64>,
    /// Accepted steps whose change of `Q_s` was below floating-point
    /// resolution (taken to drive the residual below `tol`).
    pub flat_steps: usize,
}

/// Quotient evaluator for node arrays on the problem grid.
struct Evaluator<'a> {
    prob: &'a RadialProblem,
    s: f64,
    a: f64,
}

impl Evaluator<'_> {
    fn energy(&self, v: &[f64]) -> f64 {
        let grid = self.prob.grid();
        self.a * gradient_power_sum(grid, v, 2.0) + curvature_term(grid, v)
    }

    fn norm(&self, v: &[f64]) -> f64 {
        weighted_norm(self.prob.grid(), v, self.s)
    }

    fn quotient(&self, v: &[f64]) -> f64 {
        let n = self.norm(v);
        self.energy(v) / (n * n)
    }

    /// `λ(u) = energy(u) / ‖u‖_s^s`.
    fn multiplier(&self, v: &[f64]) -> f64 {
        self.energy(v) / self.norm(v).powf(self.s)
    }

    /// Euler–Lagrange defect on the free nodes (the Dirichlet node is 0).
    fn defect(&self, v: &[f64], lambda: f64) -> Vec<f64> {
        let mut d = el_defect(self.prob.grid(), v, self.s, lambda, self.a);
        *d.last_mut().unwrap() = 0.0;
        d
    }

    fn residual(&self, defect: &[f64]) -> f64 {
        weighted_norm(self.prob.grid(), defect, 2.0)
    }

    fn normalize(&self, v: &mut [f64]) -> Result<()> {
        let n = self.norm(v);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Domain("iterate collapsed to zero".into()));
        }
        v.iter_mut().for_each(|x| *x /= n);
        Ok(())
    }
}

/// Tridiagonal `a·Δ + S` on the free nodes `0..K`, used to precondition
/// the flow direction.
struct Preconditioner {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl Preconditioner {
    fn new(prob: &RadialProblem, a: f64) -> Self {
        let grid = prob.grid();
        let free = grid.len() - 1;
        let w = grid.weights();
        let mut diag = vec![prob.curvature(); free];
        let mut lower = vec![0.0; free];
        let mut upper = vec![0.0; free];
        for e in grid.edges() {
            let st = a * e.stiffness();
            let (i, j) = (e.a.min(e.b), e.a.max(e.b));
            diag[i] += st / w[i];
            if j < free {
                diag[j] += st / w[j];
                upper[i] = -st / w[i];
                lower[j] = -st / w[j];
            }
        }
        Self { lower, diag, upper }
    }

    /// Thomas algorithm; the matrix is strictly diagonally dominant.
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        c[0] = self.upper[0] / self.diag[0];
        d[0] = rhs[0] / self.diag[0];
        for i in 1..n {
            let m = self.diag[i] - self.lower[i] * c[i - 1];
            c[i] = self.upper[i] / m;
            d[i] = (rhs[i] - self.lower[i] * d[i - 1]) / m;
        }
        let mut x = vec![0.0; n + 1];
        x[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = d[i] - c[i] * x[i + 1];
        }
        x
    }
}

fn initial_profile(prob: &RadialProblem, init: Option<&[f64]>) -> Result<Vec<f64>> {
    let nodes = prob.radii();
    let mut v: Vec<f64> = match init {
        Some(init) => {
            if init.len() != nodes.len() {
                return Err(Error::Domain(format!(
                    "initial profile has {} values, the mesh has {} nodes",
                    init.len(),
                    nodes.len()
                )));
            }
            if init.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(Error::Domain("initial profile must be nonnegative".into()));
            }
            init.to_vec()
        }
        None => nodes.iter().map(|r| (-r * r / 2.0).exp()).collect(),
    };
    *v.last_mut().unwrap() = 0.0;
    if v.iter().all(|x| *x == 0.0) {
        return Err(Error::Domain("initial profile vanishes identically".into()));
    }
    Ok(v)
}

/// Normalized preconditioned gradient flow for `2 < s ≤ p`.
///
/// Each step moves along `-(a·Δ + S)⁻¹ (a·Δu + S·u - λ(u)·u^{s-1})`, clips
/// negative values, and rescales to `‖u‖_s = 1`. The step length is halved
/// until `Q_s` strictly decreases. A full step that changes `Q_s` only at
/// rounding level is taken as it is and counted in
/// [`SolveReport::flat_steps`].
pub(crate) fn run_flow(
    prob: &RadialProblem,
    s: f64,
    opts: &SolverOptions,
    init: Option<&[f64]>,
) -> Result<SolveReport> {
    check_quotient_exponent(s, prob.exponents())?;
    let ev = Evaluator {
        prob,
        s,
        a: prob.exponents().a(),
    };
    let pre = Preconditioner::new(prob, ev.a);

    let mut f = initial_profile(prob, init)?;
    ev.normalize(&mut f)?;
    let mut q = ev.quotient(&f);
    let mut trace = vec![q];
    let mut last_change = f64::INFINITY;
    let mut flat_steps = 0;
    let mut residual = f64::INFINITY;

    let step_to = |f: &[f64], dir: &[f64], tau: f64| -> Result<(Vec<f64>, f64)> {
        let mut g: Vec<f64> = f
            .iter()
            .zip(dir)
            .map(|(x, d)| (x - tau * d).max(0.0))
            .collect();
        *g.last_mut().unwrap() = 0.0;
        ev.normalize(&mut g)?;
        let qg = ev.quotient(&g);
        Ok((g, qg))
    };

    for iter in 0..=opts.max_iter {
        let lambda = ev.multiplier(&f);
        let defect = ev.defect(&f, lambda);
        residual = ev.residual(&defect);
        if residual < opts.tol && last_change < STATIONARY_CHANGE {
            return Ok(finish(prob, &ev, f, iter, trace, flat_steps));
        }
        if iter == opts.max_iter {
            break;
        }
        let dir = pre.solve(&defect[..defect.len() - 1]);

        let (full, q_full) = step_to(&f, &dir, 1.0)?;
        let (g, qg) = if q_full < q {
            (full, q_full)
        } else if q_full <= q * (1.0 + ROUNDING_SLACK) {
            flat_steps += 1;
            (full, q_full)
        } else {
            let mut accepted = None;
            let mut tau = 0.5;
            for _ in 0..opts.max_backtracks {
                let (g, qg) = step_to(&f, &dir, tau)?;
                if qg < q {
                    accepted = Some((g, qg));
                    break;
                }
                tau *= 0.5;
            }
            match accepted {
                Some(step) => step,
                None => break,
            }
        };
        last_change = (q - qg).abs() / q;
        f = g;
        q = qg;
        trace.push(q);
    }
    Err(Error::NonConvergence {
        iterations: trace.len() - 1,
        residual,
    })
}

fn finish(
    prob: &RadialProblem,
    ev: &Evaluator<'_>,
    profile: Vec<f64>,
    iterations: usize,
    quotient_trace: Vec<f64>,
    flat_steps: usize,
) -> SolveReport {
    let q = ev.quotient(&profile);
    let lambda = ev.multiplier(&profile);
    let final_residual = ev.residual(&ev.defect(&profile, lambda));
    let radii = prob.radii().to_vec();
    let w = prob.grid().weights();
    let cut = 0.9 * prob.r_max();
    let dens: Vec<f64> = w.iter().zip(&profile).map(|(w, v)| w * pow_s(*v, ev.s)).collect();
    let total: f64 = dens.iter().sum();
    let outer: f64 = dens
        .iter()
        .zip(&radii)
        .filter(|(_, r)| **r > cut)
        .map(|(d, _)| d)
        .sum();
    SolveReport {
        s: ev.s,
        lambda_s: q,
        norm_check: ev.norm(&profile),
        profile,
        radii,
        iterations,
        final_residual,
        final_quotient: q,
        boundary_mass: outer / total,
        quotient_trace,
        flat_steps,
    }
}

/// Minimizes `Q_s` for a subcritical exponent `2 < s < p`.
pub fn minimize_subcritical(
    prob: &RadialProblem,
    s: f64,
    opts: &SolverOptions,
    init: Option<&[f64]>,
) -> Result<SolveReport> {
    let p = prob.exponents().p();
    if !(s > 2.0 && s < p) {
        return Err(Error::Domain(format!(
            "subcritical exponent must satisfy 2 < s < p = {p}, got {s}"
        )));
    }
    run_flow(prob, s, opts, init)
}
