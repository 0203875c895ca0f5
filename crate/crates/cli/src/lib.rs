//! Command implementations behind the `numrad` binary.
//!
//! Every command writes its report to the supplied writer and returns
//! [`Outcome`]; `main` maps that to the process exit code (0 clean,
//! 1 inequality violation, 2 usage or input error).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use numrad_core::bounds::{
    find_bound, list_bounds, Arity, BoundResult, Evaluator, Mode, SLACK_TOL,
};
use numrad_core::chains::BoundParams;
use numrad_core::harness::{default_deck, run_suite, EnsembleKind, EnsembleSpec, SuiteReport};
use numrad_core::linalg::{operator_norm, ComplexMatrix};
use numrad_core::numrange::{numerical_radius, range_boundary, DEFAULT_GRID, DEFAULT_THETA_TOL};

/// On-disk matrix: `{"rows":n,"cols":n,"data":[[re,im],...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let data = self
            .data
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        Ok(ComplexMatrix::new(self.rows, self.cols, data)?)
    }
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: MatrixFile =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    file.to_matrix()
        .with_context(|| format!("invalid matrix in {}", path.display()))
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> Result<()> {
    let text = serde_json::to_string(&MatrixFile::from_matrix(m))?;
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_square(path: &Path) -> Result<ComplexMatrix> {
    let m = read_matrix(path)?;
    m.ensure_square()
        .with_context(|| format!("{} must hold a square matrix", path.display()))?;
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamsRow {
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub r: f64,
}

/// One evaluated bound, as emitted by `numrad bounds`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub bound_id: String,
    pub params: ParamsRow,
    pub omega_target: f64,
    pub rhs_links: Vec<f64>,
    pub slack: f64,
    pub tightness: f64,
    /// Lower bound on `omega_target`, for the two-sided rows.
    pub lower: Option<f64>,
    pub mode: Mode,
}

impl From<&BoundResult> for ReportRow {
    fn from(r: &BoundResult) -> Self {
        let p = r.params;
        Self {
            bound_id: r.id.clone(),
            params: ParamsRow {
                alpha: p.alpha,
                beta: p.beta,
                p: p.p,
                r: p.r,
            },
            omega_target: r.omega_target,
            rhs_links: r.chain.values(),
            slack: r.slack,
            tightness: r.tightness(),
            lower: r.lower,
            mode: r.mode,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Alpha,
    Beta,
    P,
    R,
}

#[derive(Debug, Parser)]
#[command(
    name = "numrad",
    version,
    about = "Numerical radius and numerical-radius inequalities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct ParamArgs {
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
}

impl ParamArgs {
    fn to_params(&self) -> Result<BoundParams> {
        Ok(BoundParams::new(self.alpha, self.beta, self.p, self.r, 1)?)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Numerical radius, maximizing angle and the norm sandwich.
    Radius {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_THETA_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Evaluate catalogue bounds on one operator (and a second for product bounds).
    Bounds {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        second: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
        /// Include observe-mode rows.
        #[arg(long)]
        all: bool,
        /// Treat observe-mode rows as assertions too.
        #[arg(long)]
        strict: bool,
        /// Restrict to these bound ids.
        #[arg(long = "id")]
        ids: Vec<String>,
        #[arg(long, default_value_t = SLACK_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the whole catalogue over random operators from one ensemble.
    Verify {
        #[arg(long)]
        ensemble: String,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = SLACK_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Tabulate one bound as a parameter varies, as CSV.
    Sweep {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        second: Option<PathBuf>,
        #[arg(long)]
        bound: String,
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        steps: usize,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Support points of the numerical range boundary, as CSV.
    Range {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 360)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Clean,
    Violation,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Clean => 0,
            Outcome::Violation => 1,
        }
    }
}

/// CSV float: 17 significant digits, round-trip exact.
pub fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<Outcome> {
    match cli.command {
        Command::Radius {
            input,
            grid,
            tol,
            format,
        } => cmd_radius(&input, grid, tol, format, out),
        Command::Bounds {
            input,
            second,
            params,
            all,
            strict,
            ids,
            tol,
            format,
        } => {
            let opts = BoundsOptions {
                all,
                strict,
                ids: &ids,
                tol,
                format,
            };
            cmd_bounds(&input, second.as_deref(), &params.to_params()?, &opts, out)
        }
        Command::Verify {
            ensemble,
            dim,
            trials,
            seed,
            tol,
            scale,
            format,
        } => cmd_verify(&ensemble, dim, trials, seed, tol, scale, format, out),
        Command::Sweep {
            input,
            second,
            bound,
            param,
            from,
            to,
            steps,
            out: path,
            params,
        } => {
            let base = params.to_params()?;
            let csv = cmd_sweep(
                &input,
                second.as_deref(),
                &bound,
                param,
                from,
                to,
                steps,
                &base,
            )?;
            emit(path.as_deref(), &csv, out)?;
            Ok(Outcome::Clean)
        }
        Command::Range {
            input,
            points,
            out: path,
        } => {
            let csv = cmd_range(&input, points)?;
            emit(path.as_deref(), &csv, out)?;
            Ok(Outcome::Clean)
        }
    }
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

#[derive(Serialize)]
struct RadiusReport {
    omega: f64,
    theta_star: f64,
    norm: f64,
    lower: f64,
    upper: f64,
    sandwich_holds: bool,
    grid: usize,
    tol: f64,
}

pub fn cmd_radius(
    input: &Path,
    grid: usize,
    tol: f64,
    format: Format,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let t = read_square(input)?;
    let r = numerical_radius(&t, grid, tol)?;
    let norm = operator_norm(&t);
    let eps = 1e-10 * (1.0 + norm);
    let rep = RadiusReport {
        omega: r.omega,
        theta_star: r.theta_star,
        norm,
        lower: 0.5 * norm,
        upper: norm,
        sandwich_holds: 0.5 * norm <= r.omega + eps && r.omega <= norm + eps,
        grid: r.grid_size,
        tol: r.refined_tol,
    };
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&rep)?)?,
        Format::Text => {
            writeln!(out, "omega      {}", csv_float(rep.omega))?;
            writeln!(out, "theta_star {}", csv_float(rep.theta_star))?;
            writeln!(out, "norm       {}", csv_float(rep.norm))?;
            writeln!(
                out,
                "sandwich   {} <= {} <= {} ({})",
                csv_float(rep.lower),
                csv_float(rep.omega),
                csv_float(rep.upper),
                if rep.sandwich_holds {
                    "holds"
                } else {
                    "VIOLATED"
                }
            )?;
        }
    }
    Ok(if rep.sandwich_holds {
        Outcome::Clean
    } else {
        Outcome::Violation
    })
}

pub struct BoundsOptions<'a> {
    /// Include observe-mode rows in the default selection.
    pub all: bool,
    /// Observe-mode rows count towards the exit code.
    pub strict: bool,
    /// Explicit selection; empty means the default set.
    pub ids: &'a [String],
    pub tol: f64,
    pub format: Format,
}

pub fn cmd_bounds(
    input: &Path,
    second: Option<&Path>,
    params: &BoundParams,
    opts: &BoundsOptions<'_>,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let BoundsOptions {
        all,
        strict,
        ids,
        tol,
        format,
    } = *opts;
    if tol.is_nan() || tol <= 0.0 {
        bail!("--tol must be positive");
    }
    let t = read_square(input)?;
    let s = second.map(read_square).transpose()?;
    if let Some(s) = &s {
        if s.rows() != t.rows() {
            bail!(
                "operators have different sizes ({} and {})",
                t.rows(),
                s.rows()
            );
        }
    }

    let selected: Vec<&str> = if ids.is_empty() {
        list_bounds()
            .iter()
            .filter(|b| all || b.mode == Mode::Assert)
            .filter(|b| b.arity == Arity::OneOperator || s.is_some())
            .map(|b| b.id)
            .collect()
    } else {
        let mut v = Vec::new();
        for id in ids {
            let spec = find_bound(id)?;
            if spec.arity == Arity::TwoOperator && s.is_none() {
                bail!("bound {id} needs a second operator (--second)");
            }
            v.push(spec.id);
        }
        v
    };

    let evaluator = Evaluator::new(&t, s.as_ref())?;
    let results = selected
        .iter()
        .map(|id| evaluator.evaluate(id, params))
        .collect::<Result<Vec<_>, _>>()?;
    let violated = results
        .iter()
        .any(|r| (strict || r.mode == Mode::Assert) && !r.satisfied(tol));
    let rows: Vec<ReportRow> = results.iter().map(ReportRow::from).collect();

    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?,
        Format::Text => {
            for (row, res) in rows.iter().zip(&results) {
                let verdict = match (row.mode, res.satisfied(tol)) {
                    (Mode::Observe, true) => "observe",
                    (Mode::Observe, false) => "observe-violated",
                    (Mode::Assert, true) => "ok",
                    (Mode::Assert, false) => "VIOLATED",
                };
                let links: Vec<String> =
                    row.rhs_links.iter().map(|&v| format!("{v:.12e}")).collect();
                writeln!(
                    out,
                    "{:<17} {:<16} target={:.12e} rhs=[{}] slack={:.6e} tightness={:.9}",
                    row.bound_id,
                    verdict,
                    row.omega_target,
                    links.join(", "),
                    row.slack,
                    row.tightness
                )?;
                if let Some(lower) = row.lower {
                    writeln!(out, "{:<17} {:<16} lower={:.12e}", "", "", lower)?;
                }
            }
        }
    }
    Ok(if violated {
        Outcome::Violation
    } else {
        Outcome::Clean
    })
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_verify(
    ensemble: &str,
    dim: usize,
    trials: usize,
    seed: u64,
    tol: f64,
    scale: f64,
    format: Format,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let kind: EnsembleKind = ensemble.parse()?;
    let spec = EnsembleSpec {
        kind,
        dim,
        seed,
        scale,
    };
    spec.validate()?;
    if trials == 0 {
        bail!("--trials must be at least 1");
    }
    if tol.is_nan() || tol <= 0.0 {
        bail!("--tol must be positive");
    }
    let report = run_suite(&[spec], trials, &default_deck(), tol)?;
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?,
        Format::Text => write_suite_text(&spec, tol, &report, out)?,
    }
    Ok(if report.passed() {
        Outcome::Clean
    } else {
        Outcome::Violation
    })
}

fn write_suite_text(
    spec: &EnsembleSpec,
    tol: f64,
    report: &SuiteReport,
    out: &mut dyn Write,
) -> Result<()> {
    writeln!(
        out,
        "ensemble {} dim {} seed {} scale {} tol {:e}",
        spec.kind, spec.dim, spec.seed, spec.scale, tol
    )?;
    writeln!(
        out,
        "trials {} evaluations {}",
        report.trials, report.evaluations
    )?;
    writeln!(out, "violations {}", report.violations.len())?;
    for v in &report.violations {
        writeln!(
            out,
            "  {} seed={} slack={:.6e}",
            v.bound_id,
            v.seed.unwrap_or_default(),
            v.slack
        )?;
    }
    writeln!(out, "sharpness_hits {}", report.sharpness_hits)?;
    writeln!(out, "tightness (bound mean min)")?;
    for (id, t) in &report.tightness {
        writeln!(out, "  {:<17} {:.9} {:.9}", id, t.mean, t.min)?;
    }
    writeln!(out, "observe (bound violated/evaluated fraction)")?;
    for (id, o) in &report.observe_stats {
        writeln!(
            out,
            "  {:<17} {}/{} {:.6}",
            id, o.violations, o.evaluations, o.fraction
        )?;
    }
    writeln!(
        out,
        "result {}",
        if report.passed() { "PASS" } else { "FAIL" }
    )?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_sweep(
    input: &Path,
    second: Option<&Path>,
    bound: &str,
    param: SweepParam,
    from: f64,
    to: f64,
    steps: usize,
    base: &BoundParams,
) -> Result<String> {
    if steps < 2 {
        bail!("--steps must be at least 2");
    }
    if from.is_nan() || to.is_nan() || from >= to {
        bail!("--from must be below --to");
    }
    let (lo, hi) = match param {
        SweepParam::Alpha | SweepParam::Beta => (0.0, 1.0),
        SweepParam::P | SweepParam::R => (1.0, f64::INFINITY),
    };
    if from < lo || to > hi {
        bail!("sweep range [{from}, {to}] leaves the admissible range [{lo}, {hi}]");
    }
    let spec = find_bound(bound)?;
    let t = read_square(input)?;
    let s = match (spec.arity, second) {
        (Arity::TwoOperator, None) => bail!("bound {bound} needs a second operator (--second)"),
        (Arity::TwoOperator, Some(p)) => Some(read_square(p)?),
        (Arity::OneOperator, _) => None,
    };
    let evaluator = Evaluator::new(&t, s.as_ref())?;
    let mut csv = String::from("param_value,omega_target,rhs_first,slack\n");
    for k in 0..steps {
        let value = if k + 1 == steps {
            to
        } else {
            from + (to - from) * k as f64 / (steps - 1) as f64
        };
        let mut params = *base;
        match param {
            SweepParam::Alpha => params.alpha = value,
            SweepParam::Beta => params.beta = value,
            SweepParam::P => params.p = value,
            SweepParam::R => params.r = value,
        }
        let r = evaluator.evaluate(spec.id, &params)?;
        csv.push_str(&format!(
            "{},{},{},{}\n",
            csv_float(value),
            csv_float(r.omega_target),
            csv_float(r.chain.first()),
            csv_float(r.slack)
        ));
    }
    Ok(csv)
}

pub fn cmd_range(input: &Path, points: usize) -> Result<String> {
    let t = read_square(input)?;
    let mut csv = String::from("theta,re,im\n");
    for p in range_boundary(&t, points)? {
        csv.push_str(&format!(
            "{},{},{}\n",
            csv_float(p.theta),
            csv_float(p.z.re),
            csv_float(p.z.im)
        ));
    }
    Ok(csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_floats_round_trip() {
        for x in [0.1, -1.0 / 3.0, 5e-324, f64::MAX, 1e22, 0.0] {
            assert_eq!(csv_float(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(csv_float(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn matrix_file_validation() {
        let bad_len = MatrixFile {
            rows: 2,
            cols: 2,
            data: vec![[1.0, 0.0]],
        };
        assert!(bad_len.to_matrix().is_err());
        let bad_val = MatrixFile {
            rows: 1,
            cols: 1,
            data: vec![[f64::NAN, 0.0]],
        };
        assert!(bad_val.to_matrix().is_err());
        let ok = MatrixFile {
            rows: 1,
            cols: 2,
            data: vec![[1.0, 2.0], [3.0, -4.0]],
        };
        let m = ok.to_matrix().unwrap();
        assert_eq!(m[(0, 1)], Complex64::new(3.0, -4.0));
        assert_eq!(MatrixFile::from_matrix(&m), ok);
    }

    #[test]
    fn sweep_rejects_bad_ranges_before_reading() {
        let base = BoundParams::default();
        let missing = Path::new("/nonexistent");
        let err = |param, from, to, steps| {
            cmd_sweep(missing, None, "B_3_3", param, from, to, steps, &base)
                .unwrap_err()
                .to_string()
        };
        assert!(err(SweepParam::Beta, 0.0, 1.0, 1).contains("steps"));
        assert!(err(SweepParam::Beta, 1.0, 0.0, 3).contains("below"));
        assert!(err(SweepParam::R, 0.5, 2.0, 3).contains("admissible"));
    }

    #[test]
    fn cli_parses_defaults() {
        let cli = Cli::try_parse_from(["numrad", "bounds", "--input", "m.json"]).unwrap();
        match cli.command {
            Command::Bounds {
                params,
                all,
                strict,
                tol,
                format,
                ..
            } => {
                let p = params.to_params().unwrap();
                assert_eq!((p.alpha, p.beta, p.p, p.r), (0.5, 1.0 / 3.0, 1.0, 1.0));
                assert!(!all && !strict);
                assert_eq!(tol, SLACK_TOL);
                assert_eq!(format, Format::Text);
            }
            other => panic!("parsed {other:?}"),
        }
    }
}
