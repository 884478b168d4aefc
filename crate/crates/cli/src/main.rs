//! `certilab` command line. JSON reports go to stdout, diagnostics to
//! stderr. Exit codes: 64 usage, 65 bad data, 70 internal failure;
//! `certify` also returns 1 (not unique) and 2 (indeterminate).

mod selftest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use certilab::certify::{certify_general, certify_specialized, recover, CertifyMethod, Verdict, DEFAULT_EPS};
use certilab::linalg::{image_to_matrix, max_abs, norm2, read_signal_str, signal_to_csv_string, DenseMatrix};
use certilab::objectives::{objective_value, Analysis, ObjectiveName, ObjectiveSpec, ACT_TOL};
use certilab::phase::{run_phase_experiment, PhaseConfig};
use certilab::sensing::{gaussian_matrix, tomo_matrix, Mask, MeasurementKind, TomoGeometry, DEFAULT_PERTURB_SCALE};
use certilab::signals::{gen_gradient_sparse_2d, gen_signal, SignalSpec, Structure, ValueClass};
use certilab::solver::FEAS_TOL;
use certilab::statdim::{default_tol_tau, minimize_closed_form, minimize_j, ClosedFormProfile, DEFAULT_SAMPLES};
use certilab::Error;

const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_SOFTWARE: u8 = 70;

#[derive(Parser)]
#[command(name = "certilab", version, about = "Uniqueness certificates and phase transitions for l1 and TV recovery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    EpsilonLp,
    Duality,
    Specialized,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the signal is the unique minimiser given its measurements.
    Certify {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        signal: PathBuf,
        /// f1, f2, f3, f4-1d, f5-1d, f6-1d, f4-2d, f5-2d or f6-2d.
        #[arg(long)]
        objective: String,
        #[arg(long, value_enum, default_value = "epsilon-lp")]
        method: MethodArg,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        #[arg(long, default_value_t = FEAS_TOL)]
        feas_tol: f64,
    },
    /// Solve the recovery problem for `A x = b`.
    Recover {
        #[arg(long)]
        matrix: PathBuf,
        /// Right-hand side, one value per line.
        #[arg(long, required_unless_present = "signal")]
        rhs: Option<PathBuf>,
        /// Ground truth; `b = A x` is formed from it and the error reported.
        #[arg(long)]
        signal: Option<PathBuf>,
        #[arg(long)]
        objective: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = FEAS_TOL)]
        feas_tol: f64,
    },
    /// Estimate the statistical dimension of the descent cone at a signal.
    Statdim {
        #[arg(long)]
        objective: String,
        #[arg(long)]
        signal: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Exact expectation (f1, f2, f3 only).
        #[arg(long)]
        closed_form: bool,
        /// Bisection tolerance on tau; defaults to 1e-3 ||x||.
        #[arg(long)]
        tol_tau: Option<f64>,
    },
    /// Draw a sparse or gradient-sparse test signal.
    GenSignal {
        /// sparse, gradient-sparse-1d or gradient-sparse-2d.
        #[arg(long)]
        structure: String,
        /// Length, or image side for 2D.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rho: f64,
        /// real, nonnegative or binary.
        #[arg(long, default_value = "real")]
        class: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a Gaussian or parallel-beam measurement matrix.
    GenMatrix {
        /// gaussian, tomo-binary, tomo-perturbed or tomo-real.
        #[arg(long)]
        kind: String,
        /// Columns of a Gaussian matrix.
        #[arg(long)]
        n: Option<usize>,
        /// Image side for tomography.
        #[arg(long = "N")]
        side: Option<usize>,
        /// Rows of a Gaussian matrix.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        angles: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_PERTURB_SCALE)]
        perturb_scale: f64,
        /// Zero the columns of pixels outside the inscribed circle.
        #[arg(long)]
        circle: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep a (rho, m) grid and write the phase diagram.
    Phase {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        pgm: Option<PathBuf>,
        /// Second PGM with the statdim curve burned in.
        #[arg(long)]
        overlay: Option<PathBuf>,
        /// Override `n` from the config, e.g. 64 for full-size images.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Cross-check the certificate methods and estimators against each other.
    Selftest {
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(e.into())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok((report, code)) => {
            println!("{}", serde_json::to_string_pretty(&report).expect("JSON values serialise"));
            ExitCode::from(code)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::NumericalFailure(_) => EXIT_SOFTWARE,
                _ => EXIT_DATA,
            })
        }
    }
}

fn objective_spec(name: &str, n: usize) -> Result<ObjectiveSpec, Failure> {
    let name: ObjectiveName = name.parse().map_err(|e: Error| usage(e.to_string()))?;
    Ok(ObjectiveSpec::from_name(name, n)?)
}

fn read_signal(path: &Path) -> Result<Vec<f64>, Failure> {
    Ok(read_signal_str(&std::fs::read_to_string(path)?)?)
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn run(cmd: Command) -> Result<(Value, u8), Failure> {
    match cmd {
        Command::Certify { matrix, signal, objective, method, eps, feas_tol } => {
            let a = DenseMatrix::read_csv(&matrix)?;
            let x = read_signal(&signal)?;
            let spec = objective_spec(&objective, x.len())?;
            let res = match method {
                MethodArg::EpsilonLp => certify_general(&a, &spec, &x, CertifyMethod::EpsilonLp, eps, feas_tol)?,
                MethodArg::Duality => certify_general(&a, &spec, &x, CertifyMethod::ExactDuality, eps, feas_tol)?,
                MethodArg::Specialized => certify_specialized(&a, &spec, &x, eps, feas_tol)?,
            };
            let witness = match &res.witness {
                Some(w) => json!({
                    "alpha_inf": max_abs(&w.alpha),
                    "t_star": w.t_star,
                    "mu_min": w.mu.iter().cloned().reduce(f64::min),
                    "y_norm": norm2(&w.y),
                    "violation": res.witness_violation(&a, &spec, &x)?,
                }),
                None => Value::Null,
            };
            let report = json!({
                "verdict": res.verdict,
                "condition_i": res.condition_i,
                "method": res.method,
                "t_star": res.t_star.map(finite_or_null),
                "witness": witness,
                "diagnostic": res.diagnostic,
                "m": a.rows(),
                "n": a.cols(),
            });
            let code = match res.verdict {
                Verdict::Unique => 0,
                Verdict::NotUnique => 1,
                Verdict::Indeterminate => 2,
            };
            Ok((report, code))
        }
        Command::Recover { matrix, rhs, signal, objective, out, feas_tol } => {
            let a = DenseMatrix::read_csv(&matrix)?;
            let truth = signal.as_deref().map(read_signal).transpose()?;
            let b = match (&rhs, &truth) {
                (Some(path), _) => read_signal(path)?,
                (None, Some(x)) => {
                    if x.len() != a.cols() {
                        return Err(Error::InvalidDimension(format!(
                            "signal has {} entries, A has {} columns",
                            x.len(),
                            a.cols()
                        ))
                        .into());
                    }
                    a.matvec(x)
                }
                (None, None) => return Err(usage("one of --rhs or --signal is required")),
            };
            let spec = objective_spec(&objective, a.cols())?;
            let xh = recover(&a, &b, &spec, feas_tol)?;
            if let Some(path) = &out {
                write_signal(path, &xh, &objective)?;
            }
            let error = truth.map(|x| xh.iter().zip(&x).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max));
            let residual = a.matvec(&xh).iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            Ok((
                json!({
                    "n": xh.len(),
                    "objective_value": finite_or_null(objective_value(&spec, &xh, ACT_TOL).to_f64()),
                    "residual_inf": residual,
                    "error_inf": error,
                    "out": out,
                }),
                0,
            ))
        }
        Command::Statdim { objective, signal, samples, seed, closed_form, tol_tau } => {
            let x = read_signal(&signal)?;
            let spec = objective_spec(&objective, x.len())?;
            let tol = tol_tau.unwrap_or_else(|| default_tol_tau(&x));
            let est = if closed_form {
                if !(spec.case.is_sparse() && spec.is_identity()) {
                    return Err(usage("--closed-form needs f1, f2 or f3"));
                }
                minimize_closed_form(&ClosedFormProfile::from_signal(&spec, &x)?, tol.min(1e-10))?
            } else {
                if samples == 0 {
                    return Err(usage("--samples must be positive"));
                }
                minimize_j(&spec, &x, samples, seed, tol)?
            };
            Ok((serde_json::to_value(&est).map_err(|e| Error::NumericalFailure(e.to_string()))?, 0))
        }
        Command::GenSignal { structure, n, rho, class, seed, out } => {
            let structure: Structure = structure.parse().map_err(|e: Error| usage(e.to_string()))?;
            let class: ValueClass = class.parse().map_err(|e: Error| usage(e.to_string()))?;
            let spec = SignalSpec { n, rho, class, structure, seed };
            let (x, achieved) = if structure == Structure::GradientSparse2d {
                let img = gen_gradient_sparse_2d(&spec, None)?;
                image_to_matrix(&img.pixels, n, n).write_csv(&out)?;
                (img.pixels, img.achieved_rho)
            } else {
                let x = gen_signal(&spec)?;
                std::fs::write(&out, signal_to_csv_string(&x))?;
                let nnz = match structure {
                    Structure::Sparse => x.iter().filter(|v| **v != 0.0).count() as f64 / n as f64,
                    _ => x.windows(2).filter(|w| w[1] != w[0]).count() as f64 / (n - 1) as f64,
                };
                (x, nnz)
            };
            Ok((
                json!({
                    "structure": structure,
                    "class": class,
                    "len": x.len(),
                    "rho": rho,
                    "achieved_rho": achieved,
                    "seed": seed,
                    "out": out,
                }),
                0,
            ))
        }
        Command::GenMatrix { kind, n, side, m, angles, seed, perturb_scale, circle, out } => {
            let kind: MeasurementKind = kind.parse().map_err(|e: Error| usage(e.to_string()))?;
            let a = match kind.tomo_variant() {
                None => {
                    let (m, n) = m.zip(n).ok_or_else(|| usage("gaussian matrices need --m and --n"))?;
                    gaussian_matrix(m, n, seed)?
                }
                Some(variant) => {
                    let side = side.ok_or_else(|| usage("tomographic matrices need --N"))?;
                    let angles = angles.ok_or_else(|| usage("tomographic matrices need --angles"))?;
                    let mask = if circle { Mask::Circle } else { Mask::Rectangle };
                    tomo_matrix(&TomoGeometry::standard(side, angles, mask), variant, perturb_scale, seed)?
                }
            };
            a.write_csv(&out)?;
            Ok((json!({ "kind": kind, "rows": a.rows(), "cols": a.cols(), "seed": seed, "out": out }), 0))
        }
        Command::Phase { config, out, pgm, overlay, n } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg: PhaseConfig =
                serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", config.display())))?;
            if let Some(n) = n {
                cfg.n = n;
            }
            let diagram = run_phase_experiment(&cfg)?;
            diagram.write_csv(&out)?;
            if let Some(p) = &pgm {
                diagram.write_pgm(p, overlay.as_deref())?;
            } else if overlay.is_some() {
                return Err(usage("--overlay needs --pgm"));
            }
            let mut rows = Vec::new();
            eprintln!("{:>6} {:>10} {:>10}", "rho", "crossing", "statdim");
            for (ri, &rho) in cfg.rho_grid.iter().enumerate() {
                let crossing = diagram.transition(ri);
                let j = diagram.statdim.get(ri).map(|p| p.j_star);
                eprintln!(
                    "{rho:>6.3} {:>10} {:>10}",
                    crossing.map_or("-".into(), |c| format!("{c:.1}")),
                    j.map_or("-".into(), |j| format!("{j:.1}"))
                );
                rows.push(json!({ "rho": rho, "crossing": crossing, "statdim": j }));
            }
            Ok((
                json!({
                    "cells": diagram.cells.len(),
                    "transitions": rows,
                    "wall_time_s": diagram.wall_time_s,
                    "csv": out,
                    "pgm": pgm,
                    "overlay": overlay,
                }),
                0,
            ))
        }
        Command::Selftest { quick, seed } => {
            let report = selftest::run(quick, seed);
            let code = if report.passed { 0 } else { EXIT_SOFTWARE };
            Ok((serde_json::to_value(&report).map_err(|e| Error::NumericalFailure(e.to_string()))?, code))
        }
    }
}

/// 2D objectives write an image file, everything else one value per line.
fn write_signal(path: &Path, x: &[f64], objective: &str) -> Result<(), Failure> {
    let name: ObjectiveName = objective.parse().map_err(|e: Error| usage(e.to_string()))?;
    if name.analysis == Analysis::Grad2d {
        let side = (x.len() as f64).sqrt().round() as usize;
        image_to_matrix(x, side, side).write_csv(path)?;
    } else {
        std::fs::write(path, signal_to_csv_string(x))?;
    }
    Ok(())
}
