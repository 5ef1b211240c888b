//! Shooting oracle for the radial Euler–Lagrange equation
//! `-a·(f'' + (n-1)/r·f') + S·f = f^{s-1}`, `f'(0) = 0`.
//!
//! The central value `f(0)` of the decaying ground state separates the
//! data whose solution crosses zero from the data whose solution turns
//! back up; it is found by bisection on that dichotomy. Energy and `L^s`
//! integrals are carried along as extra ODE components.

use serde::Serialize;

use super::RadialProblem;
use crate::domain::unit_sphere_area;
use crate::error::{Error, Result};

const BRACKET_RTOL: f64 = 1e-12;
const RTOL: f64 = 1e-11;
const ATOL: f64 = 1e-13;
const SWEEP_DOUBLINGS: i32 = 60;
const MAX_STEPS: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShootingReport {
    pub s: f64,
    /// Central value of the ground state with unit multiplier.
    pub f0: f64,
    /// `Q_s` of the shot profile.
    pub lambda: f64,
    /// Multiplier after rescaling to unit norm, `‖f‖_s^{s-2}`.
    pub equation_lambda: f64,
    /// Shot profile at the problem's node radii, rescaled to `‖f‖_s = 1`.
    pub profile: Vec<f64>,
    pub radii: Vec<f64>,
    pub bisections: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Fate {
    Crossed,
    Diverged,
    Undecided,
}

struct Run {
    fate: Fate,
    samples: Vec<f64>,
    energy: f64,
    mass: f64,
}

type State = [f64; 4];

struct Ode {
    a: f64,
    curvature: f64,
    s: f64,
    n: f64,
    dim: i32,
    measure: f64,
}

impl Ode {
    fn rhs(&self, r: f64, y: &State) -> State {
        let (f, g) = (y[0], y[1]);
        let nl = f.abs().powf(self.s - 2.0) * f;
        let source = (self.curvature * f - nl) / self.a;
        let gp = if r == 0.0 {
            source / self.n
        } else {
            source - (self.n - 1.0) / r * g
        };
        let jac = self.measure * r.powi(self.dim - 1);
        [
            g,
            gp,
            jac * (self.a * g * g + self.curvature * f * f),
            jac * f.abs().powf(self.s),
        ]
    }

    /// One Dormand–Prince 5(4) step; returns the new state and the scaled
    /// error estimate on `(f, f')`.
    fn step(&self, r: f64, y: &State, h: f64, scale: f64) -> (State, f64) {
        const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
        const A: [[f64; 6]; 6] = [
            [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
            [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
            [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
            [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
            [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
        ];
        const E: [f64; 7] = [
            71.0 / 57600.0,
            0.0,
            -71.0 / 16695.0,
            71.0 / 1920.0,
            -17253.0 / 339200.0,
            22.0 / 525.0,
            -1.0 / 40.0,
        ];
        let mut k = [[0.0; 4]; 7];
        k[0] = self.rhs(r, y);
        for stage in 0..6 {
            let mut yi = *y;
            for (j, kj) in k.iter().enumerate().take(stage + 1) {
                let c = A[stage][j];
                if c != 0.0 {
                    for (v, kv) in yi.iter_mut().zip(kj) {
                        *v += h * c * kv;
                    }
                }
            }
            k[stage + 1] = self.rhs(r + C[stage] * h, &yi);
        }
        // the last stage is evaluated at the 5th-order solution
        let mut y_new = *y;
        for (j, kj) in k.iter().enumerate().take(6) {
            for (v, kv) in y_new.iter_mut().zip(kj) {
                *v += h * A[5][j] * kv;
            }
        }
        let mut err = 0.0;
        for comp in 0..2 {
            let e: f64 = h * k.iter().zip(&E).map(|(kj, ej)| ej * kj[comp]).sum::<f64>();
            let sc = ATOL * scale + RTOL * y[comp].abs().max(y_new[comp].abs());
            err += (e / sc).powi(2);
        }
        (y_new, (err / 2.0).sqrt())
    }

    /// Integrates from `r = 0` with `f(0) = f0`, sampling `f` at
    /// `samples` (ascending), accumulating the integrals up to `quad_end`
    /// or until the tail is negligible, and classifying the orbit by
    /// `class_end`.
    fn run(&self, f0: f64, samples: &[f64], quad_end: f64, class_end: f64) -> Result<Run> {
        let mut r = 0.0;
        let mut y: State = [f0, 0.0, 0.0, 0.0];
        let mut h = (class_end * 1e-4).min(1e-3);
        let mut out = Vec::with_capacity(samples.len());
        let mut next_sample = 0;
        let mut frozen: Option<(f64, f64)> = None;
        while next_sample < samples.len() && samples[next_sample] <= 0.0 {
            out.push(f0);
            next_sample += 1;
        }
        for _ in 0..MAX_STEPS {
            let mut stop = class_end;
            if let Some(&t) = samples.get(next_sample) {
                stop = stop.min(t);
            }
            if frozen.is_none() {
                stop = stop.min(quad_end);
            }
            let clamped = h >= stop - r;
            let hh = if clamped { stop - r } else { h };
            let (y_new, err) = self.step(r, &y, hh, f0);
            if !(err <= 1.0) {
                let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).max(0.2) } else { 0.2 };
                h = hh * fac;
                continue;
            }
            r = if clamped { stop } else { r + hh };
            y = y_new;
            if !clamped {
                h = hh * (0.9 * err.max(1e-10).powf(-0.2)).min(5.0);
            }
            if y[0] < 0.0 {
                return Ok(self.finish(Fate::Crossed, out, frozen, &y));
            }
            if y[1] > 0.0 {
                return Ok(self.finish(Fate::Diverged, out, frozen, &y));
            }
            if frozen.is_none() && (r >= quad_end || y[0] < 1e-9 * f0) {
                frozen = Some((y[2], y[3]));
            }
            while next_sample < samples.len() && samples[next_sample] <= r {
                out.push(y[0]);
                next_sample += 1;
            }
            if r >= class_end {
                return Ok(self.finish(Fate::Undecided, out, frozen, &y));
            }
        }
        Err(Error::BracketFailure(format!(
            "integration from f(0) = {f0} did not finish within {MAX_STEPS} steps"
        )))
    }

    fn finish(&self, fate: Fate, samples: Vec<f64>, frozen: Option<(f64, f64)>, y: &State) -> Run {
        let (energy, mass) = frozen.unwrap_or((y[2], y[3]));
        Run {
            fate,
            samples,
            energy,
            mass,
        }
    }
}

/// Central value of the one-dimensional ground state,
/// `(S·s/2)^{1/(s-2)}`; a good starting point for the bracket sweep.
pub fn default_shooting_guess(prob: &RadialProblem, s: f64) -> f64 {
    (prob.curvature() * s / 2.0).powf(1.0 / (s - 2.0))
}

/// Ground state of the radial Euler–Lagrange equation by shooting.
///
/// `f0` seeds a doubling/halving sweep that brackets the ground-state
/// central value; the bracket is then bisected to relative width `1e-12`.
/// The returned profile is sampled at the problem's node radii and
/// rescaled to unit `L^s` norm, which multiplies the equation's multiplier
/// by `c^{2-s}`.
pub fn shoot_radial(prob: &RadialProblem, s: f64, f0: f64) -> Result<ShootingReport> {
    let ce = prob.exponents();
    if !(s > 2.0 && s <= ce.p() * (1.0 + 4.0 * f64::EPSILON)) {
        return Err(Error::Domain(format!(
            "shooting exponent must satisfy 2 < s <= p = {}, got {s}",
            ce.p()
        )));
    }
    if !(f0.is_finite() && f0 > 0.0) {
        return Err(Error::Domain(format!("initial value must be positive, got {f0}")));
    }
    let ode = Ode {
        a: ce.a(),
        curvature: prob.curvature(),
        s,
        n: f64::from(ce.n()),
        dim: ce.n() as i32,
        measure: prob.volume() * unit_sphere_area(ce.n()),
    };
    let quad_end = 2.0 * prob.r_max();
    let class_end = 10.0 * prob.r_max();
    let fate = |x: f64| -> Result<Fate> { Ok(ode.run(x, &[], quad_end, class_end)?.fate) };

    // sweep for a (diverged, crossed) pair of central values
    let first = fate(f0)?;
    let (mut lo, mut hi) = match first {
        Fate::Undecided => (f0, f0),
        Fate::Diverged => {
            let mut prev = f0;
            let mut found = None;
            for k in 1..=SWEEP_DOUBLINGS {
                let x = f0 * 2f64.powi(k);
                match fate(x)? {
                    Fate::Diverged => prev = x,
                    Fate::Crossed => {
                        found = Some((prev, x));
                        break;
                    }
                    Fate::Undecided => {
                        found = Some((x, x));
                        break;
                    }
                }
            }
            found.ok_or_else(|| {
                Error::BracketFailure(format!("every orbit from f(0) >= {f0} turns back up"))
            })?
        }
        Fate::Crossed => {
            let mut prev = f0;
            let mut found = None;
            for k in 1..=SWEEP_DOUBLINGS {
                let x = f0 * 2f64.powi(-k);
                match fate(x)? {
                    Fate::Crossed => prev = x,
                    Fate::Diverged => {
                        found = Some((x, prev));
                        break;
                    }
                    Fate::Undecided => {
                        found = Some((x, x));
                        break;
                    }
                }
            }
            found.ok_or_else(|| {
                Error::BracketFailure(format!("every orbit from f(0) <= {f0} crosses zero"))
            })?
        }
    };

    let mut bisections = 0;
    while hi - lo > BRACKET_RTOL * hi {
        let mid = 0.5 * (lo + hi);
        bisections += 1;
        match fate(mid)? {
            Fate::Diverged => lo = mid,
            Fate::Crossed => hi = mid,
            Fate::Undecided => {
                lo = mid;
                hi = mid;
            }
        }
    }
    let center = 0.5 * (lo + hi);
    let radii = prob.radii().to_vec();
    let run = ode.run(center, &radii, quad_end, class_end)?;
    if run.mass <= 0.0 {
        return Err(Error::BracketFailure("shot profile carries no mass".into()));
    }
    let norm = run.mass.powf(1.0 / s);
    let mut profile: Vec<f64> = run.samples.iter().map(|f| f.max(0.0) / norm).collect();
    profile.resize(radii.len(), 0.0);
    Ok(ShootingReport {
        s,
        f0: center,
        lambda: run.energy / (norm * norm),
        equation_lambda: norm.powf(s - 2.0),
        profile,
        radii,
        bisections,
    })
}
