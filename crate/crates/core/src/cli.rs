//! Command-line front end.
//!
//! Exit codes: 0 success, 1 domain or input error (JSON on stderr),
//! 2 invariant-suite failure, 64 usage error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::composite::{ab_rank, is_product, ppt_test, separable_ball_test, BipartiteDims, PRODUCT_TOL};
use crate::error::{Error, Result};
use crate::flows::{format_float, FlowSpecJson, Trajectory};
use crate::linalg::MatrixJson;
use crate::qubit::{integrate_bloch, norm, QubitField, Vec3};
use crate::selftest;
use crate::state::{
    purity, purity_bounds, r_squared, rank_of, spectrum_class, validate_state_tol, von_neumann_entropy, DensityMatrix,
    POSITIVITY_TOL, RANK_TOL, TRACE_TOL,
};
use crate::su_basis::gellmann_basis;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_INVARIANT: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "qgeom", version, about = "Geometry of finite-level quantum state spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Orthonormal su(n) basis with structure constants.
    Basis {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank, spectrum, purity, r² and entropy of a state.
    Classify {
        state: PathBuf,
        #[command(flatten)]
        tol: StateTol,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate a flow and write the trajectory as CSV.
    Flow {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        state: PathBuf,
        /// Sample the closed-form propagator instead of RK4.
        #[arg(long)]
        closed_form: bool,
        #[command(flatten)]
        tol: StateTol,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Kähler and bracket invariants on random orbits.
    KahlerCheck {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bloch-ball trajectory of L<j>, Ytilde<j> or Y<j>.
    QubitDemo {
        #[arg(long)]
        field: QubitField,
        /// Start point x1,x2,x3.
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        start: Vec3,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bipartite product, rank and separability tests.
    Entangle {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        dims: BipartiteDims,
        #[arg(long, value_delimiter = ',', default_value = "ball,ppt,product,abrank")]
        tests: Vec<EntangleTest>,
        #[arg(long, default_value_t = PRODUCT_TOL)]
        product_tol: f64,
        #[command(flatten)]
        tol: StateTol,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full acceptance suite; deterministic JSON report.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct StateTol {
    #[arg(long, default_value_t = TRACE_TOL)]
    pub trace_tol: f64,
    #[arg(long, default_value_t = POSITIVITY_TOL)]
    pub pos_tol: f64,
    #[arg(long, default_value_t = RANK_TOL)]
    pub rank_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntangleTest {
    Ball,
    Ppt,
    Product,
    Abrank,
}

fn parse_vec3(s: &str) -> std::result::Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected x1,x2,x3, got {s:?}"));
    }
    let mut x = [0.0; 3];
    for (v, p) in x.iter_mut().zip(parts) {
        *v = p.trim().parse().map_err(|_| format!("not a number: {p:?}"))?;
    }
    Ok(x)
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Ok,
    InvariantFailure(Vec<String>),
}

/// Parses `args` and runs the command, returning the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    crate::par::init_from_env();
    match dispatch(cli.command, stdout) {
        Ok(Outcome::Ok) => EXIT_OK,
        Ok(Outcome::InvariantFailure(failed)) => {
            let _ = writeln!(stderr, "{}", json!({ "error": "invariant_failure", "failed": failed }));
            EXIT_INVARIANT
        }
        Err(e) => {
            let _ = writeln!(stderr, "{}", error_json(&e));
            EXIT_DOMAIN
        }
    }
}

pub fn error_json(e: &Error) -> Value {
    json!({ "error": e.kind(), "message": e.to_string() })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_reader(io::BufReader::new(file))?)
}

fn read_state(path: &Path, tol: &StateTol) -> Result<DensityMatrix> {
    let m: MatrixJson = read_json(path)?;
    validate_state_tol(&m.to_hermitian()?, tol.trace_tol, tol.pos_tol)
}

fn emit(out: &Option<PathBuf>, stdout: &mut dyn Write, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            write(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => {
            write(stdout)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn emit_json(out: &Option<PathBuf>, stdout: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    emit(out, stdout, |w| {
        writeln!(w, "{text}")?;
        Ok(())
    })
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<Outcome> {
    match command {
        Command::Basis { n, out } => {
            let basis = gellmann_basis(n)?;
            emit_json(&out, stdout, &basis.to_json())?;
            Ok(Outcome::Ok)
        }
        Command::Classify { state, tol, out } => {
            let rho = read_state(&state, &tol)?;
            let class = spectrum_class(&rho);
            let rank = rank_of(&rho, tol.rank_tol);
            let report = json!({
                "config": { "command": "classify", "state": state, "tolerances": tol },
                "n": rho.dim(),
                "rank": rank,
                "spectrum_class": class,
                "purity": purity(&rho),
                "r2": r_squared(&rho),
                "entropy": von_neumann_entropy(&rho),
                "purity_bounds": purity_bounds(rho.dim(), rank)?,
            });
            emit_json(&out, stdout, &report)?;
            Ok(Outcome::Ok)
        }
        Command::Flow { spec, state, closed_form, tol, out } => {
            let rho = read_state(&state, &tol)?;
            let spec: FlowSpecJson = read_json(&spec)?;
            let spec = spec.resolve(rho.dim())?;
            let basis = gellmann_basis(rho.dim())?;
            let traj = if closed_form {
                let grid = rk4_grid(spec.t_final, spec.dt, spec.record_every);
                let mut traj = Trajectory::default();
                for t in grid {
                    let s = spec.propagate(&rho, t)?;
                    traj.times.push(t);
                    traj.states.push(validate_state_tol(&s, 1e-8, 1e-8)?);
                    traj.trace_corrections.push(0.0);
                }
                traj
            } else {
                match spec.integrate(&rho) {
                    Ok(t) => t,
                    Err(aborted) => {
                        emit(&out, stdout, |w| aborted.partial.write_csv(&basis, w))?;
                        return Err(aborted.error);
                    }
                }
            };
            emit(&out, stdout, |w| traj.write_csv(&basis, w))?;
            Ok(Outcome::Ok)
        }
        Command::KahlerCheck { n, samples, seed, out } => {
            let report = selftest::kahler_check(n, samples, seed)?;
            let wrapped = json!({
                "config": { "command": "kahler-check", "n": n, "samples": samples, "seed": seed },
                "report": report,
            });
            emit_json(&out, stdout, &wrapped)?;
            Ok(if report.passed { Outcome::Ok } else { Outcome::InvariantFailure(report.failed) })
        }
        Command::QubitDemo { field, start, t, dt, out } => {
            if norm(start) > 1.0 + 1e-10 {
                return Err(Error::NotState(norm(start)));
            }
            let traj = integrate_bloch(|x| field.eval(x), start, t, dt)?;
            emit(&out, stdout, |w| {
                let mut csv = csv::Writer::from_writer(w);
                csv.write_record(["t", "x1", "x2", "x3", "r"])?;
                for (tt, x) in &traj {
                    csv.write_record([*tt, x[0], x[1], x[2], norm(*x)].iter().map(|v| format_float(*v)))?;
                }
                csv.flush()?;
                Ok(())
            })?;
            Ok(Outcome::Ok)
        }
        Command::Entangle { state, dims, tests, product_tol, tol, out } => {
            let rho = read_state(&state, &tol)?;
            dims.check(rho.dim())?;
            let mut results = serde_json::Map::new();
            for test in &tests {
                let value = match test {
                    EntangleTest::Ball => serde_json::to_value(separable_ball_test(&rho, dims)?)?,
                    EntangleTest::Ppt => serde_json::to_value(ppt_test(&rho, dims)?)?,
                    EntangleTest::Product => json!({
                        "product": is_product(&rho, dims, product_tol)?,
                        "gap": crate::composite::product_gap(&rho, dims)?,
                    }),
                    EntangleTest::Abrank => match ab_rank(&rho, dims) {
                        Ok(r) => serde_json::to_value(r)?,
                        Err(e @ Error::NotProduct(_)) => error_json(&e),
                        Err(e) => return Err(e),
                    },
                };
                results.insert(serde_json::to_value(test)?.as_str().unwrap_or_default().to_string(), value);
            }
            let report = json!({
                "config": { "command": "entangle", "state": state, "dims": dims, "tests": tests,
                            "product_tol": product_tol, "tolerances": tol },
                "results": results,
            });
            emit_json(&out, stdout, &report)?;
            Ok(Outcome::Ok)
        }
        Command::Selftest { seed, out } => {
            let report = selftest::run(seed);
            emit(&out, stdout, |w| {
                writeln!(w, "{}", report.to_json())?;
                Ok(())
            })?;
            Ok(if report.passed { Outcome::Ok } else { Outcome::InvariantFailure(report.failed) })
        }
    }
}

/// Times recorded by RK4 with the same grid and stride.
fn rk4_grid(t_final: f64, dt: f64, every: usize) -> Vec<f64> {
    let full = (t_final / dt * (1.0 + 1e-12)).floor() as usize;
    let rem = t_final - full as f64 * dt;
    let total = full + usize::from(rem > 1e-12 * dt.max(1.0));
    let mut out = vec![0.0];
    for step in 1..=total {
        if step % every == 0 || step == total {
            out.push(if step <= full { step as f64 * dt } else { t_final });
        }
    }
    out
}
