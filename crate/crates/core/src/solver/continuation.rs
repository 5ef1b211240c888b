use serde::Serialize;

use super::{run_flow, RadialProblem, SolveReport, SolverOptions};
use crate::error::{Error, Result};
use crate::functional::yamabe_sphere_constant;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuationEntry {
    pub s: f64,
    /// `λ_s`, or `None` when the flow did not converge.
    pub lambda_s: Option<f64>,
    pub residual: f64,
    pub iterations: usize,
    /// `λ_s < Y_d`; false for entries without a value.
    pub subcritical: bool,
    /// Exponent whose minimizer seeded this run.
    pub warm_start_from: Option<f64>,
    pub error: Option<String>,
    #[serde(skip)]
    pub report: Option<SolveReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuationReport {
    pub d: u32,
    /// `Y_d` of the round sphere of the product's dimension.
    pub sphere_constant: f64,
    pub entries: Vec<ContinuationEntry>,
}

/// Runs the flow for each `s` in ascending order, seeding every run with
/// the last converged minimizer. Exponents equal to `p` are run as they
/// are. A run that fails to converge is recorded and the sweep goes on.
pub fn continuation(
    prob: &RadialProblem,
    s_list: &[f64],
    opts: &SolverOptions,
) -> Result<ContinuationReport> {
    let ce = prob.exponents();
    let p = ce.p();
    if s_list.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain("exponents must be strictly ascending".into()));
    }
    if let Some(bad) = s_list
        .iter()
        .find(|s| !(**s > 2.0 && **s <= p * (1.0 + 4.0 * f64::EPSILON)))
    {
        return Err(Error::Domain(format!(
            "continuation exponents must lie in (2, {p}], got {bad}"
        )));
    }
    let sphere_constant = yamabe_sphere_constant(ce.d())?;
    let mut entries = Vec::with_capacity(s_list.len());
    let mut seed: Option<(f64, Vec<f64>)> = None;
    for &s in s_list {
        let init = seed.as_ref().map(|(_, profile)| profile.as_slice());
        let warm_start_from = seed.as_ref().map(|(from, _)| *from);
        match run_flow(prob, s, opts, init) {
            Ok(report) => {
                entries.push(ContinuationEntry {
                    s,
                    lambda_s: Some(report.lambda_s),
                    residual: report.final_residual,
                    iterations: report.iterations,
                    subcritical: report.lambda_s < sphere_constant,
                    warm_start_from,
                    error: None,
                    report: None,
                });
                seed = Some((s, report.profile.clone()));
                entries.last_mut().unwrap().report = Some(report);
            }
            Err(err @ Error::NonConvergence { iterations, residual }) => {
                entries.push(ContinuationEntry {
                    s,
                    lambda_s: None,
                    residual,
                    iterations,
                    subcritical: false,
                    warm_start_from,
                    error: Some(err.to_string()),
                    report: None,
                });
            }
            Err(other) => return Err(other),
        }
    }
    Ok(ContinuationReport {
        d: ce.d(),
        sphere_constant,
        entries,
    })
}
