//! Command-line verbs. Every verb writes plain text or CSV; floats are
//! written with Rust's shortest round-trip formatting so output does not
//! depend on the locale and repeats bit for bit.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use thiserror::Error;
use tscalc::verify::{run_all, VerifyConfig};
use tscalc::{
    exp_ts, lambda_fn, laplace, lerch_verify, null_check, ExponentArg, LatticeSpec,
    MonomialTable, QuadratureConfig, TimeScale, TransformOptions, TransformResult,
};

use crate::bind::BoundExpr;
use crate::expr::{format_complex, parse_complex, parse_expr};

#[derive(Debug, Error)]
pub enum Failure {
    /// Bad flags, files or expressions, or a computation that could not run.
    #[error("{0}")]
    Input(String),
    /// A checked property did not hold.
    #[error("{0}")]
    Property(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Property(_) => 1,
        }
    }
}

impl From<tscalc::Error> for Failure {
    fn from(e: tscalc::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

#[derive(Debug, Parser)]
#[command(name = "tscalc", version, about = "Calculus on time scales")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Time-scale description file.
    #[arg(long)]
    pub ts: PathBuf,
    /// Base point; defaults to the start of the window.
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Transform {
    /// Function to transform, in the expression language.
    #[arg(long, allow_hyphen_values = true)]
    pub f: String,
    /// Declared growth rate: |f(t)| <= C e_growth(t, s).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub growth: f64,
    /// Declared constant C; estimated from samples when absent.
    #[arg(long)]
    pub bound: Option<f64>,
    /// Evaluate outside the convergence region (truncated, never converged).
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate e_z(t, s), or e_f(t, s) for a varying exponent.
    Exp {
        #[command(flatten)]
        common: Common,
        /// Constant exponent `a+bi`.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "f")]
        z: Option<String>,
        /// Varying exponent as an expression.
        #[arg(long, allow_hyphen_values = true)]
        f: Option<String>,
        /// Grid `start:stop:count`; points off the time scale move up to the
        /// next point.
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Laplace transform over a list of z or a rectangle.
    Laplace {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        transform: Transform,
        /// Comma-separated list of `a+bi`.
        #[arg(long, allow_hyphen_values = true, required_unless_present = "re")]
        z: Option<String>,
        /// Real-part grid `start:stop:count`, used with --im.
        #[arg(long, allow_hyphen_values = true, requires = "im", conflicts_with = "z")]
        re: Option<String>,
        /// Imaginary-part grid `start:stop:count`.
        #[arg(long, allow_hyphen_values = true, requires = "re")]
        im: Option<String>,
    },
    /// Tabulate h_0(t, s), ..., h_n(t, s).
    Monomial {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Tabulate Lambda(x; t, s) over grids of x and t.
    Lambda {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Decide whether all partial integrals of f vanish on [s, t_max].
    NullCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long)]
        t_max: f64,
        #[arg(long, default_value_t = tscalc::lerch::DEFAULT_TOL)]
        tol: f64,
    },
    /// Compare the modulated-transform lattice with the null check.
    Lerch {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        transform: Transform,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        alpha: String,
        /// Comma-separated increasing values.
        #[arg(long, default_value = "1,2,3")]
        varsigma: String,
        #[arg(long, default_value_t = 2)]
        n_max: u32,
        #[arg(long)]
        t_max: f64,
        #[arg(long, default_value_t = tscalc::lerch::DEFAULT_TOL)]
        tol: f64,
    },
    /// Run the built-in property suite.
    Verify {
        #[arg(long, default_value_t = VerifyConfig::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = VerifyConfig::default().lerch_trials)]
        lerch_trials: usize,
    },
}

/// `start:stop:count`, evenly spaced and inclusive.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::Input(format!("grid `{text}` is not `start:stop:count`"));
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(bad());
    };
    let a: f64 = a.parse().map_err(|_| bad())?;
    let b: f64 = b.parse().map_err(|_| bad())?;
    let n: usize = n.parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|k| if k == n - 1 { b } else { a + (b - a) * k as f64 / (n - 1) as f64 }).collect())
}

/// A grid, or a single number.
fn parse_values(text: &str) -> Result<Vec<f64>, Failure> {
    if text.contains(':') {
        return parse_grid(text);
    }
    text.split(',')
        .map(|w| {
            w.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Failure::Input(format!("`{w}` is not a finite number")))
        })
        .collect()
}

fn complex_flag(text: &str) -> Result<Complex64, Failure> {
    parse_complex(text).ok_or_else(|| Failure::Input(format!("`{text}` is not a complex number `a+bi`")))
}

fn fmt(v: f64) -> String {
    format!("{v:?}")
}

struct Session {
    ts: TimeScale,
    s: f64,
    cfg: QuadratureConfig,
    out: Option<PathBuf>,
}

impl Session {
    fn open(common: &Common) -> Result<Session, Failure> {
        let text = fs::read_to_string(&common.ts)
            .map_err(|e| Failure::Input(format!("{}: {e}", common.ts.display())))?;
        let ts: TimeScale =
            text.parse().map_err(|e| Failure::Input(format!("{}: {e}", common.ts.display())))?;
        let s = ts.point(common.s.unwrap_or(ts.window_start()))?.value();
        let cfg = QuadratureConfig { abs_tol: common.abs_tol, rel_tol: common.rel_tol, ..QuadratureConfig::default() };
        cfg.validate()?;
        Ok(Session { ts, s, cfg, out: common.out.clone() })
    }

    fn csv(&self) -> Result<csv::Writer<Box<dyn Write>>, Failure> {
        let sink: Box<dyn Write> = match &self.out {
            Some(path) => Box::new(fs::File::create(path)?),
            None => Box::new(io::stdout().lock()),
        };
        Ok(csv::Writer::from_writer(sink))
    }

    fn bind(&self, text: &str) -> Result<BoundExpr, Failure> {
        let expr = parse_expr(text).map_err(|e| Failure::Input(format!("`{text}`: {e}")))?;
        Ok(BoundExpr::new(expr, &self.ts, self.s)?)
    }

    /// Grid values moved onto the time scale, without repeats.
    fn points(&self, grid: &str) -> Result<Vec<f64>, Failure> {
        let mut out: Vec<f64> = Vec::new();
        for v in parse_values(grid)? {
            let p = if self.ts.contains(v) {
                self.ts.point(v)?.value()
            } else {
                self.ts
                    .snap_up(v)
                    .ok_or_else(|| Failure::Input(format!("no point of the time scale at or above {v}")))?
            };
            if out.last() != Some(&p) {
                out.push(p);
            }
        }
        Ok(out)
    }

    fn options(&self, t: &Transform) -> TransformOptions {
        TransformOptions { growth: t.growth, force: t.force, min_truncation: None, bound: t.bound }
    }
}

fn check_evaluation(f: &BoundExpr) -> Outcome {
    match f.failure() {
        Some(message) => Err(Failure::Input(format!("cannot evaluate `{}`: {message}", f.expr()))),
        None => Ok(()),
    }
}

pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Exp { common, z, f, t } => {
            let session = Session::open(&common)?;
            let bound = match &f {
                Some(f) => Some(session.bind(f)?),
                None => None,
            };
            let arg = match (z, &bound) {
                (Some(z), None) => ExponentArg::Constant(complex_flag(&z)?),
                (None, Some(f)) => ExponentArg::Varying(f),
                _ => return Err(Failure::Input("give exactly one of --z and --f".into())),
            };
            let mut w = session.csv()?;
            w.write_record(["t", "re", "im"])?;
            for t in session.points(&t)? {
                let v = exp_ts(&session.ts, &arg, t, session.s, &session.cfg)?;
                w.write_record([fmt(t), fmt(v.re), fmt(v.im)])?;
            }
            w.flush()?;
            if let Some(f) = &bound {
                check_evaluation(f)?;
            }
            Ok(())
        }
        Command::Laplace { common, transform, z, re, im } => {
            let session = Session::open(&common)?;
            let f = session.bind(&transform.f)?;
            let zs: Vec<Complex64> = match (z, re, im) {
                (Some(list), _, _) => list.split(',').map(complex_flag).collect::<Result<_, _>>()?,
                (None, Some(re), Some(im)) => {
                    let (re, im) = (parse_grid(&re)?, parse_grid(&im)?);
                    re.iter().flat_map(|a| im.iter().map(move |b| Complex64::new(*a, *b))).collect()
                }
                _ => return Err(Failure::Input("give --z or both --re and --im".into())),
            };
            let opts = session.options(&transform);
            let mut rows = Vec::with_capacity(zs.len());
            for z in zs {
                let r = laplace(&session.ts, &f, session.s, z, &opts, &session.cfg)?;
                rows.push((z, r));
            }
            check_evaluation(&f)?;
            let mut w = session.csv()?;
            w.write_record(["z_re", "z_im", "re", "im", "converged"])?;
            for (z, r) in rows {
                w.write_record([fmt(z.re), fmt(z.im), fmt(r.value.re), fmt(r.value.im), r.converged.to_string()])?;
            }
            w.flush()?;
            Ok(())
        }
        Command::Monomial { common, n, t } => {
            let session = Session::open(&common)?;
            let table = MonomialTable::new(&session.ts, session.s, n)?;
            let mut w = session.csv()?;
            let mut header = vec!["t".to_string()];
            header.extend((0..=n).map(|k| format!("h{k}")));
            w.write_record(&header)?;
            for t in session.points(&t)? {
                let mut row = vec![fmt(t)];
                row.extend(table.values(t)?.into_iter().map(fmt));
                w.write_record(&row)?;
            }
            w.flush()?;
            Ok(())
        }
        Command::Lambda { common, x, t } => {
            let session = Session::open(&common)?;
            let xs = parse_values(&x)?;
            let mut w = session.csv()?;
            w.write_record(["t", "x", "lambda"])?;
            for t in session.points(&t)? {
                for &x in &xs {
                    let v = lambda_fn(&session.ts, x, t, session.s, &session.cfg)?;
                    w.write_record([fmt(t), fmt(x), fmt(v)])?;
                }
            }
            w.flush()?;
            Ok(())
        }
        Command::NullCheck { common, f, t_max, tol } => {
            let session = Session::open(&common)?;
            let f = session.bind(&f)?;
            let r = null_check(&session.ts, &f, session.s, t_max, tol, &session.cfg)?;
            check_evaluation(&f)?;
            let mut out = io::stdout().lock();
            writeln!(out, "verdict={}", r.verdict)?;
            writeln!(out, "max_cumulative={}", fmt(r.max_cumulative))?;
            writeln!(out, "worst_node={}", fmt(r.worst_node))?;
            writeln!(out, "nodes_checked={}", r.nodes_checked)?;
            writeln!(out, "tol={}", fmt(r.tol))?;
            Ok(())
        }
        Command::Lerch { common, transform, alpha, varsigma, n_max, t_max, tol } => {
            let session = Session::open(&common)?;
            let f = session.bind(&transform.f)?;
            let spec = LatticeSpec { alpha: complex_flag(&alpha)?, varsigma: parse_values(&varsigma)?, n_max };
            let opts = session.options(&transform);
            let v = lerch_verify(&session.ts, &f, session.s, &spec, t_max, tol, &opts, &session.cfg)?;
            check_evaluation(&f)?;
            let mut out = io::stdout().lock();
            writeln!(out, "verdict={}", v.null_report.verdict)?;
            writeln!(out, "max_cumulative={}", fmt(v.null_report.max_cumulative))?;
            writeln!(out, "worst_node={}", fmt(v.null_report.worst_node))?;
            writeln!(out, "alpha={}", format_complex(spec.alpha))?;
            writeln!(out, "hypothesis_max={}", fmt(v.hypothesis_max))?;
            writeln!(out, "relative_max={}", fmt(v.relative_max))?;
            writeln!(out, "hypothesis_holds={}", v.hypothesis_holds)?;
            match v.witness {
                Some((n, k)) => writeln!(out, "witness={n},{k}")?,
                None => writeln!(out, "witness=none")?,
            }
            writeln!(out, "falsification={}", v.falsification)?;
            let mut w = match session.out {
                Some(_) => session.csv()?,
                None => {
                    writeln!(out)?;
                    drop(out);
                    session.csv()?
                }
            };
            write_lattice(&mut w, &v.cells)?;
            if v.falsification {
                return Err(Failure::Property(
                    "every lattice cell vanished although the function is not null".into(),
                ));
            }
            Ok(())
        }
        Command::Verify { seed, lerch_trials } => {
            let reports = run_all(&VerifyConfig { seed, lerch_trials });
            let mut out = io::stdout().lock();
            let mut failed = 0;
            for r in &reports {
                let mark = if r.passed { "pass" } else { "FAIL" };
                writeln!(out, "{mark:<5} {:<12} {:<48} {}", r.module, r.name, r.detail)?;
                failed += usize::from(!r.passed);
            }
            writeln!(out, "{} of {} properties passed", reports.len() - failed, reports.len())?;
            if failed > 0 {
                return Err(Failure::Property(format!("{failed} properties failed")));
            }
            Ok(())
        }
    }
}

fn write_lattice(
    w: &mut csv::Writer<Box<dyn Write>>,
    cells: &[Vec<tscalc::Result<TransformResult>>],
) -> Outcome {
    w.write_record(["n", "k", "re", "im", "converged", "tail_estimate"])?;
    for (n, row) in cells.iter().enumerate() {
        for (k, cell) in row.iter().enumerate() {
            let (re, im, converged, tail) = match cell {
                Ok(r) => (r.value.re, r.value.im, r.converged, r.tail_estimate),
                Err(_) => (f64::NAN, f64::NAN, false, f64::NAN),
            };
            w.write_record([n.to_string(), k.to_string(), fmt(re), fmt(im), converged.to_string(), fmt(tail)])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("-1:1:1").unwrap(), vec![-1.0]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert_eq!(parse_values("1,2.5").unwrap(), vec![1.0, 2.5]);
    }
}
