//! `yamalab` command-line front end.
//!
//! Exit codes: 0 on success, 1 on domain, format or io errors, 2 when a
//! verification fails or a greedy sequence ends without reaching the
//! symmetrization or its mirror, 64 on usage errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use yamalab_core::io::{load_field, save_field, RunConfig};
use yamalab_core::verify::{random_field, run_verify, trial_rng};
use yamalab_core::{
    conformal_exponents, continuation, greedy_polarization_sequence, mass_profile,
    minimize_subcritical, polarize, sphere_volume, steiner_symmetrize, yamabe_quotient,
    yamabe_sphere_constant, EuclideanFactor, Field, GreedyTrace, Polarizer,
};

const EXIT_ERROR: u8 = 1;
const EXIT_FAILED: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "yamalab", version, about = "Rearrangement and Yamabe quotient toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args)]
struct Output {
    /// Output format for tables printed to stdout and written traces.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Conformal constants a, p and the sphere constant Y_d.
    Constants {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Fiberwise Steiner symmetrization of a field.
    Symmetrize {
        #[arg(long = "in")]
        input: PathBuf,
        /// Field file to write; the values are printed when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        fmt: Output,
    },
    /// Two-point rearrangement across the half-line with the given center.
    Polarize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        center: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        fmt: Output,
    },
    /// Greedy polarization sequence towards the symmetrization.
    PolarizeSeq {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        /// Per-step trace file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Field file for the final iterate.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        fmt: Output,
    },
    /// Yamabe quotient Q_s of a field.
    Quotient {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        s: f64,
        /// Dimension of the compact factor.
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[command(flatten)]
        fmt: Output,
    },
    /// Radial minimizer of Q_s from a JSON config.
    Minimize {
        /// Config document.
        #[arg(long = "in", alias = "config")]
        input: PathBuf,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Field file for the minimizer.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Quotient trace file.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        fmt: Output,
    },
    /// Warm-started sweep of lambda_s over ascending exponents.
    LambdaCurve {
        #[arg(long = "in", alias = "config")]
        input: PathBuf,
        /// Comma-separated exponents.
        #[arg(long, value_delimiter = ',')]
        s_list: Option<Vec<f64>>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        #[command(flatten)]
        fmt: Output,
    },
    /// Fraction of the s-mass inside |y| <= t.
    MassProfile {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        s: f64,
        /// Comma-separated radii; ten even steps to the grid edge by default.
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        #[command(flatten)]
        fmt: Output,
    },
    /// Seeded invariant battery.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[command(flatten)]
        fmt: Output,
    },
    /// Seeded random test field.
    RandomField {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Rows of named columns, printed as CSV or as a JSON array of objects.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn render(&self, format: Format) -> anyhow::Result<String> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(cell))?;
                }
                Ok(String::from_utf8(w.into_inner()?)?)
            }
            Format::Json => {
                let objs: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        Value::Object(
                            self.columns
                                .iter()
                                .map(|c| c.to_string())
                                .zip(row.iter().cloned())
                                .collect(),
                        )
                    })
                    .collect();
                Ok(serde_json::to_string_pretty(&objs)? + "\n")
            }
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn num(x: f64) -> Value {
    // non-finite values have no JSON number form
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(x.to_string()), Value::Number)
}

fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

struct Outcome {
    stdout: String,
    code: u8,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, code: 0 }
    }
}

fn load(path: &Path) -> anyhow::Result<Field> {
    load_field(path).with_context(|| format!("loading {}", path.display()))
}

fn field_table(u: &Field) -> Table {
    let mut t = Table::new(&["m_index", "cell_index", "value"]);
    for (node, fiber) in u.fibers().enumerate() {
        for (cell, &v) in fiber.iter().enumerate() {
            t.push(vec![json!(node), json!(cell), num(v)]);
        }
    }
    t
}

/// Writes `u` to `out` when given and returns what goes to stdout.
fn emit_field(u: &Field, out: Option<&Path>, format: Format) -> anyhow::Result<String> {
    match out {
        Some(path) => {
            save_field(u, path)?;
            Ok(String::new())
        }
        None => field_table(u).render(format),
    }
}

fn trace_table(u: &Field, trace: &GreedyTrace) -> Table {
    let spacing = u.grid().euclid().as_line().map_or(1.0, |l| l.spacing());
    let mut t = Table::new(&[
        "step",
        "half_steps",
        "center",
        "alpha",
        "distance",
        "pair_distance",
    ]);
    t.push(vec![
        json!(0),
        Value::Null,
        Value::Null,
        Value::Null,
        num(trace.initial_distance),
        num(trace.initial_pair_distance),
    ]);
    for (i, r) in trace.steps.iter().enumerate() {
        t.push(vec![
            json!(i + 1),
            json!(r.polarizer.half_steps()),
            num(r.polarizer.center(spacing)),
            num(r.alpha),
            num(r.distance),
            num(r.pair_distance),
        ]);
    }
    t
}

fn euclid_dim(e: &EuclideanFactor) -> u32 {
    match e {
        EuclideanFactor::Line(_) => 1,
        EuclideanFactor::Radial(r) => r.dim(),
    }
}

fn run(cmd: Command) -> anyhow::Result<Outcome> {
    match cmd {
        Command::Constants { m, n, out } => {
            let ce = conformal_exponents(m, n)?;
            let mut t = Table::new(&["m", "n", "d", "a", "p", "sphere_volume", "sphere_constant"]);
            t.push(vec![
                json!(m),
                json!(n),
                json!(ce.d()),
                num(ce.a()),
                num(ce.p()),
                num(sphere_volume(ce.d())?),
                num(yamabe_sphere_constant(ce.d())?),
            ]);
            Ok(Outcome::ok(t.render(out.format)?))
        }
        Command::Symmetrize { input, out, fmt } => {
            let u = steiner_symmetrize(&load(&input)?)?;
            Ok(Outcome::ok(emit_field(&u, out.as_deref(), fmt.format)?))
        }
        Command::Polarize {
            input,
            center,
            out,
            fmt,
        } => {
            let u = load(&input)?;
            let Some(line) = u.grid().euclid().as_line() else {
                bail!("polarize needs a line grid");
            };
            let h = Polarizer::from_center(center, line.spacing())?;
            let uh = polarize(&u, h)?;
            Ok(Outcome::ok(emit_field(&uh, out.as_deref(), fmt.format)?))
        }
        Command::PolarizeSeq {
            input,
            kappa,
            max_iter,
            trace,
            out,
            fmt,
        } => {
            let u = load(&input)?;
            let (last, tr) = greedy_polarization_sequence(&u, kappa, max_iter)?;
            if let Some(path) = trace {
                let text = trace_table(&u, &tr).render(fmt.format)?;
                std::fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(path) = out {
                save_field(&last, &path)?;
            }
            let mut t = Table::new(&["status", "steps", "initial_distance", "final_distance"]);
            t.push(vec![
                json!(tr.status.as_str()),
                json!(tr.steps.len()),
                num(tr.initial_distance),
                num(tr.steps.last().map_or(tr.initial_distance, |r| r.distance)),
            ]);
            Ok(Outcome {
                stdout: t.render(fmt.format)?,
                code: if tr.status.converged() { 0 } else { EXIT_FAILED },
            })
        }
        Command::Quotient { input, s, m, fmt } => {
            let u = load(&input)?;
            let ce = conformal_exponents(m, euclid_dim(u.grid().euclid()))?;
            let q = yamabe_quotient(&u, s, &ce)?;
            let mut t = Table::new(&["s", "numerator", "denominator", "value"]);
            t.push(vec![num(q.s), num(q.numerator), num(q.denominator), num(q.value)]);
            Ok(Outcome::ok(t.render(fmt.format)?))
        }
        Command::Minimize {
            input,
            s,
            tol,
            max_iter,
            out,
            trace,
            fmt,
        } => {
            let cfg = RunConfig::load(&input)?;
            let prob = cfg.problem()?;
            let mut opts = cfg.options();
            opts.tol = tol.unwrap_or(opts.tol);
            opts.max_iter = max_iter.unwrap_or(opts.max_iter);
            let Some(s) = s.or(cfg.solver.s) else {
                bail!("no exponent: pass --s or set solver.s in the config");
            };
            let rep = minimize_subcritical(&prob, s, &opts, None)?;
            if let Some(path) = out {
                save_field(&prob.field(&rep.profile)?, &path)?;
            }
            if let Some(path) = trace {
                let mut t = Table::new(&["iterate", "quotient"]);
                for (i, q) in rep.quotient_trace.iter().enumerate() {
                    t.push(vec![json!(i), num(*q)]);
                }
                std::fs::write(&path, t.render(fmt.format)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let mut t = Table::new(&[
                "s",
                "lambda_s",
                "iterations",
                "final_residual",
                "norm_check",
                "boundary_mass",
                "flat_steps",
                "center_value",
            ]);
            t.push(vec![
                num(rep.s),
                num(rep.lambda_s),
                json!(rep.iterations),
                num(rep.final_residual),
                num(rep.norm_check),
                num(rep.boundary_mass),
                json!(rep.flat_steps),
                num(rep.profile[0]),
            ]);
            Ok(Outcome::ok(t.render(fmt.format)?))
        }
        Command::LambdaCurve {
            input,
            s_list,
            tol,
            max_iter,
            fmt,
        } => {
            let cfg = RunConfig::load(&input)?;
            let prob = cfg.problem()?;
            let mut opts = cfg.options();
            opts.tol = tol.unwrap_or(opts.tol);
            opts.max_iter = max_iter.unwrap_or(opts.max_iter);
            let Some(s_list) = s_list.or_else(|| cfg.solver.s_list.clone()) else {
                bail!("no exponents: pass --s-list or set solver.s_list in the config");
            };
            let rep = continuation(&prob, &s_list, &opts)?;
            let mut t = Table::new(&[
                "s",
                "lambda_s",
                "sphere_constant",
                "subcritical",
                "residual",
                "iterations",
                "warm_start_from",
                "error",
            ]);
            for e in &rep.entries {
                t.push(vec![
                    num(e.s),
                    opt_num(e.lambda_s),
                    num(rep.sphere_constant),
                    json!(e.subcritical),
                    num(e.residual),
                    json!(e.iterations),
                    opt_num(e.warm_start_from),
                    e.error.clone().map_or(Value::Null, Value::String),
                ]);
            }
            Ok(Outcome::ok(t.render(fmt.format)?))
        }
        Command::MassProfile {
            input,
            s,
            radii,
            fmt,
        } => {
            let u = load(&input)?;
            let radii = radii.unwrap_or_else(|| {
                let e = u.grid().euclid();
                let edge = (0..e.cell_count()).map(|k| e.radius(k)).fold(0.0, f64::max);
                (1..=10).map(|i| edge * i as f64 / 10.0).collect()
            });
            let frac = mass_profile(&u, s, &radii)?;
            let mut t = Table::new(&["radius", "fraction"]);
            for (r, f) in radii.iter().zip(&frac) {
                t.push(vec![num(*r), num(*f)]);
            }
            Ok(Outcome::ok(t.render(fmt.format)?))
        }
        Command::Verify { seed, trials, fmt } => {
            let rep = run_verify(seed, trials)?;
            let stdout = match fmt.format {
                Format::Json => serde_json::to_string_pretty(&rep)? + "\n",
                Format::Csv => {
                    let mut t = Table::new(&[
                        "property",
                        "anchor",
                        "trials",
                        "failures",
                        "worst_violation",
                    ]);
                    for p in &rep.properties {
                        t.push(vec![
                            json!(p.name),
                            json!(p.anchor),
                            json!(p.trials),
                            json!(p.failures),
                            num(p.worst_violation),
                        ]);
                    }
                    t.render(Format::Csv)?
                }
            };
            Ok(Outcome {
                stdout,
                code: if rep.pass { 0 } else { EXIT_FAILED },
            })
        }
        Command::RandomField { seed, out } => {
            let u = random_field(&mut trial_rng(seed, 0))?;
            save_field(&u, &out)?;
            Ok(Outcome::ok(String::new()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
