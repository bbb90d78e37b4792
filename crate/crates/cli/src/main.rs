//! `nlw-duffing`: classification, threshold curve, phase diagram, field
//! snapshots and verification reports for the cubic wave equation.

mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nlw_duffing::duffing::{energy, OdeConfig, PhasePoint};
use nlw_duffing::lifespan::{boundary_tplus, e_infinity, lifespan, t_plus, total_lifespan_by_energy, x_critical, QuadConfig};
use nlw_duffing::norms::{kappa, NormConfig};
use nlw_duffing::penrose::{physical_time_from_conformal, Field, FieldConfig};
use nlw_duffing::threshold::{GridSpec, Threshold, ThresholdConfig};
use nlw_duffing::verify::{run_suite, Comparison, Suite, VerifyConfig};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::{emit, Format, Num, Sink};

#[derive(Parser, Debug)]
#[command(name = "nlw-duffing", version, about, allow_negative_numbers = true)]
struct Cli {
    /// Multiplies every numerical tolerance by this factor.
    #[arg(long, global = true, default_value = "1", value_parser = positive)]
    tol: f64,

    /// Sampling grid `X0:X1:N` (for `evolve`, the radial grid).
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_grid)]
    grid: Option<Grid>,

    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,

    /// Output file; standard output if omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Forward and backward behaviour, lifespan and blow-up times of `(X, Y)`.
    Classify {
        #[arg(value_parser = finite)]
        x: f64,
        #[arg(value_parser = finite)]
        y: f64,
    },
    /// `E_∞`, `X_C`, `β(0)` and `κ_ν` for `ν = 0, 0.1, …, 0.4`.
    Constants,
    /// `β(X)` and `−β(−X)` on the grid (default `-3:3:61`).
    BetaCurve,
    /// Nine-cell classification on the square grid (default `-3:3:61`).
    PhaseDiagram,
    /// Snapshots of `u` and `∂ₜu` at the given times on the radial grid
    /// (default `0:10:101`).
    Evolve {
        #[arg(value_parser = finite)]
        x: f64,
        #[arg(value_parser = finite)]
        y: f64,
        /// Comma-separated list of times.
        #[arg(long, value_delimiter = ',', value_parser = finite, default_value = "0")]
        times: Vec<f64>,
    },
    /// Runs a verification suite; exits with 1 if any check fails.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
struct Grid {
    start: f64,
    end: f64,
    n: usize,
}

impl Grid {
    fn points(&self) -> Vec<f64> {
        nlw_duffing::threshold::uniform_grid(self.start, self.end, self.n)
    }
}

fn finite(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a finite number")),
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match finite(s)? {
        v if v > 0.0 => Ok(v),
        _ => Err(format!("`{s}` must be positive")),
    }
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("`{s}` is not of the form X0:X1:N"));
    }
    let (start, end) = (finite(parts[0])?, finite(parts[1])?);
    let n: usize = parts[2].trim().parse().map_err(|_| format!("`{}` is not a point count", parts[2]))?;
    if n == 0 || (n > 1 && end.partial_cmp(&start) != Some(std::cmp::Ordering::Greater)) {
        return Err(format!("`{s}` needs N ≥ 1 and X1 > X0"));
    }
    Ok(Grid { start, end, n })
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse::<Suite>().map_err(|_| {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.as_str()).collect();
        format!("unknown suite `{s}` (expected one of {})", names.join(", "))
    })
}

struct Context {
    tol: f64,
    grid: Option<Grid>,
    format: Format,
}

impl Context {
    fn quad(&self) -> QuadConfig<f64> {
        QuadConfig::default().scaled(self.tol)
    }

    fn threshold(&self) -> ThresholdConfig<f64> {
        ThresholdConfig { quad: self.quad(), ..ThresholdConfig::default() }
    }

    fn field(&self) -> FieldConfig<f64> {
        FieldConfig::default().scaled(self.tol)
    }

    fn norm(&self) -> NormConfig<f64> {
        NormConfig::default().scaled(self.tol)
    }

    fn meta(&self, command: &str, parameters: Value) -> Value {
        let ode = OdeConfig::<f64>::default().scaled(self.tol);
        json!({
            "tool": "nlw-duffing",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "tol_scale": self.tol,
            "grid": self.grid,
            "parameters": parameters,
            "tolerances": {
                "ode_tol": ode.ode_tol,
                "quad_rel_tol": self.quad().rel_tol,
                "norm_rel_tol": self.norm().rel_tol,
                "threshold_band": self.threshold().threshold_band,
            },
        })
    }

    fn grid_or(&self, start: f64, end: f64, n: usize) -> Grid {
        self.grid.unwrap_or(Grid { start, end, n })
    }
}

#[derive(Serialize)]
struct ClassifyRecord {
    x: Num,
    y: Num,
    energy: Num,
    t_minus: Num,
    t_plus: Num,
    forward: &'static str,
    backward: &'static str,
    cell: String,
    blowup_time_forward: Num,
    blowup_time_backward: Num,
}

#[derive(Serialize)]
struct ConstantRecord {
    name: String,
    value: Num,
    /// `|F(value) − π|` for the root-defined constants.
    residual: Num,
    tolerance: Num,
}

#[derive(Serialize)]
struct BetaRecord {
    x: Num,
    beta: Num,
    beta_reflected: Num,
}

#[derive(Serialize)]
struct CellRecord {
    x: Num,
    y: Num,
    forward: &'static str,
    backward: &'static str,
    cell: String,
}

#[derive(Serialize)]
struct FieldRecord {
    t: Num,
    r: Num,
    u: Num,
    ut: Num,
    in_domain: bool,
}

#[derive(Serialize)]
struct CheckRecord {
    suite: &'static str,
    name: String,
    measured: Num,
    expected: Num,
    tolerance: Num,
    comparison: &'static str,
    passed: bool,
    residual: Num,
}

fn classify(ctx: &Context, sink: &mut Sink, x: f64, y: f64) -> Result<(), CliError> {
    let th = Threshold::new(ctx.threshold())?;
    let p = PhasePoint::new(x, y);
    let c = th.classify_bidirectional(p)?;
    let ls = lifespan(p, &ctx.quad());
    let rec = ClassifyRecord {
        x: x.into(),
        y: y.into(),
        energy: energy(p).into(),
        t_minus: ls.t_minus.into(),
        t_plus: ls.t_plus.into(),
        forward: c.forward.as_str(),
        backward: c.backward.as_str(),
        cell: c.cell(),
        blowup_time_forward: physical_time_from_conformal(ls.t_plus).into(),
        blowup_time_backward: (-physical_time_from_conformal(-ls.t_minus)).into(),
    };
    emit(sink, ctx.format, ctx.meta("classify", json!({ "x": x, "y": y })), &[rec])
}

fn constants(ctx: &Context, sink: &mut Sink) -> Result<(), CliError> {
    let q = ctx.quad();
    let e_inf = e_infinity(&q)?;
    let x_c = x_critical(&q)?;
    let beta0 = Threshold::new(ctx.threshold())?.beta(0.0)?;
    let pi = std::f64::consts::PI;
    let mut rows = vec![
        ConstantRecord {
            name: "E_infinity".into(),
            value: e_inf.into(),
            residual: (total_lifespan_by_energy(e_inf, &q) - pi).abs().into(),
            tolerance: q.rel_tol.into(),
        },
        ConstantRecord {
            name: "X_C".into(),
            value: x_c.into(),
            residual: (boundary_tplus(x_c, &q) - pi).abs().into(),
            tolerance: q.rel_tol.into(),
        },
        ConstantRecord {
            name: "beta(0)".into(),
            value: beta0.into(),
            residual: (t_plus(PhasePoint::new(0.0, beta0), &q) - pi).abs().into(),
            tolerance: q.rel_tol.into(),
        },
    ];
    let n = ctx.norm();
    for k in 0..5 {
        let nu = 0.1 * k as f64;
        rows.push(ConstantRecord {
            name: format!("kappa({nu:.1})"),
            value: kappa(nu, &n)?.into(),
            residual: Num(f64::NAN),
            tolerance: n.rel_tol.into(),
        });
    }
    emit(sink, ctx.format, ctx.meta("constants", json!({})), &rows)
}

fn beta_curve(ctx: &Context, sink: &mut Sink) -> Result<(), CliError> {
    let g = ctx.grid_or(-3.0, 3.0, 61);
    let th = Threshold::new(ctx.threshold())?;
    let xs = g.points();
    let rows = xs
        .iter()
        .map(|&x| Ok(BetaRecord { x: x.into(), beta: th.beta(x)?.into(), beta_reflected: (-th.beta(-x)?).into() }))
        .collect::<Result<Vec<_>, CliError>>()?;
    emit(sink, ctx.format, ctx.meta("beta-curve", json!({ "x_c": th.x_c() })), &rows)
}

fn phase_diagram(ctx: &Context, sink: &mut Sink) -> Result<(), CliError> {
    let g = ctx.grid_or(-3.0, 3.0, 61);
    let th = Threshold::new(ctx.threshold())?;
    let d = th.phase_diagram(&GridSpec::square(g.start, g.end, g.n))?;
    let mut rows = Vec::with_capacity(d.xs.len() * d.ys.len());
    for (iy, &y) in d.ys.iter().enumerate() {
        for (ix, &x) in d.xs.iter().enumerate() {
            let c = d.cells[iy][ix];
            rows.push(CellRecord { x: x.into(), y: y.into(), forward: c.forward.as_str(), backward: c.backward.as_str(), cell: c.cell() });
        }
    }
    emit(sink, ctx.format, ctx.meta("phase-diagram", json!({})), &rows)
}

fn evolve(ctx: &Context, sink: &mut Sink, x: f64, y: f64, times: &[f64]) -> Result<(), CliError> {
    let g = ctx.grid_or(0.0, 10.0, 101);
    if g.start < 0.0 {
        return Err(CliError::Numeric("radial grid must be nonnegative".into()));
    }
    let field = Field::new(PhasePoint::new(x, y), &ctx.field())?;
    let forward = field.blowup_time();
    let backward = -physical_time_from_conformal(-field.lifespan().t_minus);
    for &t in times {
        if t >= forward || t <= backward {
            return Err(CliError::Other(format!(
                "t = {t} is outside the lifespan of ({x}, {y}): the solution exists for {backward} < t < {forward}"
            )));
        }
    }
    let rs = g.points();
    let mut rows = Vec::with_capacity(rs.len() * times.len());
    for &t in times {
        let snap = field.sample(t, &rs);
        for (i, &r) in rs.iter().enumerate() {
            rows.push(FieldRecord {
                t: t.into(),
                r: r.into(),
                u: snap.u[i].into(),
                ut: snap.ut[i].into(),
                in_domain: snap.in_domain[i],
            });
        }
    }
    let params = json!({ "x": x, "y": y, "times": times, "blowup_time_forward": Num(forward), "blowup_time_backward": Num(backward) });
    emit(sink, ctx.format, ctx.meta("evolve", params), &rows)
}

fn verify(ctx: &Context, sink: &mut Sink, suite: Suite) -> Result<(), CliError> {
    let cfg = VerifyConfig::default().scaled(ctx.tol);
    let report = run_suite(suite, &cfg)?;
    let rows: Vec<CheckRecord> = report
        .checks
        .iter()
        .map(|c| CheckRecord {
            suite: suite.as_str(),
            name: c.name.clone(),
            measured: c.measured.into(),
            expected: c.expected.into(),
            tolerance: c.tolerance.into(),
            comparison: match c.comparison {
                Comparison::Relative => "relative",
                Comparison::Absolute => "absolute",
                Comparison::AtMost => "at_most",
            },
            passed: c.passed,
            residual: Num(c.residual.unwrap_or(f64::NAN)),
        })
        .collect();
    let fits: Vec<Value> = report
        .fits
        .iter()
        .map(|(name, f)| {
            json!({
                "name": name,
                "coefficient": Num(f.coefficient),
                "exponent_or_slope": Num(f.exponent_or_slope),
                "residual": Num(f.residual),
                "window": [Num(f.window.0), Num(f.window.1)],
                "reference": f.reference.map(Num),
            })
        })
        .collect();
    emit(sink, ctx.format, ctx.meta("verify", json!({ "suite": suite.as_str(), "fits": fits })), &rows)?;
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    eprintln!("{}: {}/{} checks passed", suite.as_str(), report.checks.len() - failed.len(), report.checks.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(failed.join(", ")))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = Context { tol: cli.tol, grid: cli.grid, format: cli.format };
    let mut sink = Sink::open(cli.out.as_deref())?;
    match cli.command {
        Command::Classify { x, y } => classify(&ctx, &mut sink, x, y),
        Command::Constants => constants(&ctx, &mut sink),
        Command::BetaCurve => beta_curve(&ctx, &mut sink),
        Command::PhaseDiagram => phase_diagram(&ctx, &mut sink),
        Command::Evolve { x, y, times } => evolve(&ctx, &mut sink, x, y, &times),
        Command::Verify { suite } => verify(&ctx, &mut sink, suite),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nlw-duffing: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
