mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use polargap::backlund::backlund_density;
use polargap::catalog;
use polargap::onegap::soliton_distance;
use polargap::spectral::{band_edges, max_deviation, scan_max, PeriodicOperator};
use polargap::{run_verify, Branch, CheckKind, Error, Family, Lattice, Tolerances, VerifyConfig};

use output::{fmt_f64, num, nums, pretty, write_out, Format, Table};

#[derive(Parser)]
#[command(name = "polargap")]
#[command(about = "Finite-gap elliptic densities of the polar operator: construction, sampling and verification")]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct RootArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    e1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    e2: f64,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    e3: f64,
}

impl RootArgs {
    fn lattice(&self, tol: &Tolerances) -> Result<Lattice, Error> {
        Ok(Lattice::from_roots(self.e1, self.e2, self.e3)?.with_pole_radius(tol.pole_radius))
    }

    fn json(&self) -> Value {
        json!({ "e1": num(self.e1), "e2": num(self.e2), "e3": num(self.e3) })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Onegap,
    OnegapCusp,
    TwogapPm,
    TwogapAlpha,
    BacklundOnegap,
    BacklundTwogapPm,
    BacklundTwogapAlpha,
    Soliton,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Onegap => Family::Onegap,
            FamilyArg::OnegapCusp => Family::OnegapCusp,
            FamilyArg::TwogapPm => Family::TwogapPm,
            FamilyArg::TwogapAlpha => Family::TwogapAlpha,
            FamilyArg::BacklundOnegap => Family::BacklundOnegap,
            FamilyArg::BacklundTwogapPm => Family::BacklundTwogapPm,
            FamilyArg::BacklundTwogapAlpha => Family::BacklundTwogapAlpha,
            FamilyArg::Soliton => Family::Soliton,
        }
    }
}

fn parse_branch(s: &str) -> Result<Branch, String> {
    match s {
        "1" | "2" | "3" => Ok(Branch::Alpha(s.parse().unwrap())),
        "plus" | "+" => Ok(Branch::Plus),
        "minus" | "-" => Ok(Branch::Minus),
        "none" => Ok(Branch::None),
        _ => Err(format!("expected 1, 2, 3, plus or minus, got {s:?}")),
    }
}

#[derive(Args, Clone)]
struct DensityArgs {
    #[command(flatten)]
    roots: RootArgs,
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// 1, 2, 3, plus or minus (ignored for the soliton)
    #[arg(long, value_parser = parse_branch, default_value = "3")]
    branch: Branch,
}

impl DensityArgs {
    fn branch(&self) -> Branch {
        match self.family {
            FamilyArg::Soliton => Branch::None,
            _ => self.branch,
        }
    }

    fn build(&self, tol: &Tolerances) -> Result<polargap::Density, Error> {
        let l = self.roots.lattice(tol)?;
        catalog::build(self.family.into(), self.branch(), &l)
    }

    fn json(&self) -> Value {
        json!({
            "roots": self.roots.json(),
            "family": Family::from(self.family).name(),
            "branch": self.branch().to_string(),
        })
    }
}

#[derive(Args, Clone)]
struct OutArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Lattice constants for the given roots
    Lattice {
        #[command(flatten)]
        roots: RootArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct, sample or measure a density
    Density {
        #[command(subcommand)]
        action: DensityCommand,
    },
    /// Band edges of the Schrodinger or string operator of a smooth density
    Spectrum {
        #[command(flatten)]
        density: DensityArgs,
        #[arg(long, value_enum, default_value = "string")]
        operator: OperatorArg,
        /// Upper end of the lambda scan (default: past the last predicted edge)
        #[arg(long)]
        lambda_max: Option<f64>,
        /// Writes the sampled discriminant
        #[command(flatten)]
        out: OutArgs,
    },
    /// Backlund partner of a smooth density, measured through the potential
    Backlund {
        #[command(flatten)]
        density: DensityArgs,
        /// Points of the partner table written to --out
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Degeneration limits
    Limit {
        #[command(subcommand)]
        action: LimitCommand,
    },
    /// Run the full verification suite
    Verify {
        #[command(flatten)]
        roots: RootArgs,
        /// Multiply the amplitude of the smooth one-gap density (mutation test)
        #[arg(long)]
        perturb_a3: Option<f64>,
        /// Skip band-structure checks
        #[arg(long)]
        no_spectral: bool,
        /// JSON report
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DensityCommand {
    /// Parametric table (x(y), R(y), y) on a uniform y grid; works for every density
    Gen {
        #[command(flatten)]
        density: DensityArgs,
        /// Defaults to 0
        #[arg(long, allow_negative_numbers = true)]
        y_min: Option<f64>,
        /// Defaults to one y-period
        #[arg(long, allow_negative_numbers = true)]
        y_max: Option<f64>,
        #[arg(long, default_value_t = 201)]
        n: usize,
        /// Skip points this close to a pole, in units of the y-period
        #[arg(long, default_value_t = 1e-3)]
        pole_window: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Table (x, r(x), y(x)) on a uniform x grid by inverting x(y)
    Sample {
        #[command(flatten)]
        density: DensityArgs,
        /// Defaults to 0
        #[arg(long, allow_negative_numbers = true)]
        x_min: Option<f64>,
        /// Defaults to one x-period
        #[arg(long, allow_negative_numbers = true)]
        x_max: Option<f64>,
        #[arg(long, default_value_t = 201)]
        n: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Periods, smoothness class and predicted band edges
    Period {
        #[command(flatten)]
        density: DensityArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LimitCommand {
    /// Distance between the cusp density and tanh^2 as the lower gap closes
    Soliton {
        #[arg(long, default_value_t = 1.0 / 3.0)]
        gamma: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001")]
        deltas: Vec<f64>,
        #[arg(long, default_value_t = 0.5)]
        y_min: f64,
        #[arg(long, default_value_t = 3.0)]
        y_max: f64,
        #[arg(long, default_value_t = 201)]
        n: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OperatorArg {
    Schrodinger,
    String,
    StringInY,
}

/// Why the run stopped.
enum Failure {
    /// Bad input: exit 2.
    Config(String),
    /// A check or computation failed: exit 1.
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonRealRoots(..)
            | Error::UnorderedRoots(..)
            | Error::NonZeroSum(_)
            | Error::InvalidBranch(_)
            | Error::ZeroEalpha { .. }
            | Error::NegativeG2(_)
            | Error::DegenerateBranch(_)
            | Error::ZeroDenominatorConstant
            | Error::InvalidOperator(_)
            | Error::NotMonotone(_) => Failure::Config(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(format!("{e:#}"))
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = match Tolerances::from_env() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(cli.command, &tol) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command, tol: &Tolerances) -> Outcome {
    match cmd {
        Command::Lattice { roots, out } => lattice(roots, out, tol),
        Command::Density { action } => match action {
            DensityCommand::Gen { density, y_min, y_max, n, pole_window, out } => {
                gen(&density, y_min, y_max, n, pole_window, &out, tol)
            }
            DensityCommand::Sample { density, x_min, x_max, n, out } => sample(&density, x_min, x_max, n, &out, tol),
            DensityCommand::Period { density, out } => period(&density, out, tol),
        },
        Command::Spectrum { density, operator, lambda_max, out } => spectrum(&density, operator, lambda_max, &out, tol),
        Command::Backlund { density, n, out } => backlund(&density, n, &out, tol),
        Command::Limit { action: LimitCommand::Soliton { gamma, deltas, y_min, y_max, n, out } } => {
            soliton(gamma, &deltas, y_min, y_max, n, &out)
        }
        Command::Verify { roots, perturb_a3, no_spectral, out } => verify(roots, perturb_a3, !no_spectral, out, tol),
    }
}

fn emit(out: &OutArgs, table: &Table, meta: Value) -> Result<(), Failure> {
    let body = table.render(out.format, meta);
    match &out.out {
        Some(p) => write_out(p, &body)?,
        None => print!("{body}"),
    }
    Ok(())
}

fn check_grid(lo: f64, hi: f64, n: usize) -> Result<(), Failure> {
    if n < 2 {
        return Err(Failure::Config(format!("grid needs at least 2 points, got {n}")));
    }
    if !(lo < hi) {
        return Err(Failure::Config(format!("grid bounds must satisfy min < max, got [{lo}, {hi}]")));
    }
    Ok(())
}

fn lattice(roots: RootArgs, out: Option<PathBuf>, tol: &Tolerances) -> Outcome {
    let l = roots.lattice(tol)?;
    let v = json!({
        "roots": roots.json(),
        "g2": num(l.g2),
        "g3": num(l.g3),
        "omega": num(l.omega),
        "omega_prime_abs": num(l.omega_p),
        "eta": num(l.eta),
        "eta_prime_im": num(l.eta_p),
        "legendre_residual": num(l.legendre_residual()),
    });
    match out {
        Some(p) => write_out(&p, &pretty(&v))?,
        None => {
            println!("g2      {}", fmt_f64(l.g2));
            println!("g3      {}", fmt_f64(l.g3));
            println!("omega   {}", fmt_f64(l.omega));
            println!("|omega'| {}", fmt_f64(l.omega_p));
            println!("eta     {}", fmt_f64(l.eta));
            println!("Im eta' {}", fmt_f64(l.eta_p));
            println!("Legendre residual {:.3e}", l.legendre_residual());
        }
    }
    Ok(true)
}

fn gen(
    args: &DensityArgs,
    y_min: Option<f64>,
    y_max: Option<f64>,
    n: usize,
    window: f64,
    out: &OutArgs,
    tol: &Tolerances,
) -> Outcome {
    let d = args.build(tol)?;
    let lo = y_min.unwrap_or(0.0);
    let hi = y_max.unwrap_or(if d.is_periodic() { d.period_y } else { 3.0 });
    check_grid(lo, hi, n)?;
    let rows = d.sample_y(lo, hi, n, window)?;
    let table = Table {
        columns: vec!["y", "x", "r"],
        rows: rows.into_iter().map(|(x, r, y)| vec![y, x, r]).collect(),
    };
    emit(out, &table, json!({ "density": args.json() }))?;
    Ok(true)
}

fn sample(args: &DensityArgs, x_min: Option<f64>, x_max: Option<f64>, n: usize, out: &OutArgs, tol: &Tolerances) -> Outcome {
    let d = args.build(tol)?;
    let lo = x_min.unwrap_or(0.0);
    let hi = x_max.unwrap_or(if d.is_periodic() { d.period_x.abs() } else { 3.0 });
    check_grid(lo, hi, n)?;
    let rows = d.sample(lo, hi, n, tol)?;
    let table = Table {
        columns: vec!["x", "r", "y"],
        rows: rows.into_iter().map(|(x, r, y)| vec![x, r, y]).collect(),
    };
    emit(out, &table, json!({ "density": args.json() }))?;
    Ok(true)
}

fn period(args: &DensityArgs, out: Option<PathBuf>, tol: &Tolerances) -> Outcome {
    let d = args.build(tol)?;
    let v = json!({
        "density": args.json(),
        "smoothness": d.smoothness,
        "period_x": num(d.period_x),
        "period_y": num(d.period_y),
        "band_edges": nums(&d.band_edges),
        "x_period_residual": num(d.x_period_residual().unwrap_or(f64::NAN)),
    });
    match out {
        Some(p) => write_out(&p, &pretty(&v))?,
        None => {
            println!("smoothness {:?}", d.smoothness);
            println!("period_x   {}", fmt_f64(d.period_x));
            println!("period_y   {}", fmt_f64(d.period_y));
            let edges: Vec<String> = d.band_edges.iter().map(|&e| fmt_f64(e)).collect();
            println!("edges      [{}]", edges.join(", "));
        }
    }
    Ok(true)
}

fn spectrum(args: &DensityArgs, op: OperatorArg, lambda_max: Option<f64>, out: &OutArgs, tol: &Tolerances) -> Outcome {
    let d = args.build(tol)?;
    let operator = match op {
        OperatorArg::Schrodinger => {
            PeriodicOperator::admissible(&d)?;
            PeriodicOperator::schrodinger(d.liouville(), *tol)
        }
        OperatorArg::String => PeriodicOperator::string(&d, *tol)?,
        OperatorArg::StringInY => PeriodicOperator::string_in_y(&d, *tol)?,
    };
    let lmax = lambda_max.unwrap_or_else(|| scan_max(&d.band_edges));
    let bs = band_edges(&operator, lmax, d.band_edges.len())?;
    let dev = max_deviation(&bs.edges, &d.band_edges);
    let pass = dev <= tol.edge;
    for (k, (e, p)) in bs.edges.iter().zip(&d.band_edges).enumerate() {
        println!("edge {k}: {}  predicted {}  sign {:+}", fmt_f64(*e), fmt_f64(*p), bs.edge_signs[k]);
    }
    println!("max deviation {dev:.3e} (tol {:.1e}) {}", tol.edge, if pass { "PASS" } else { "FAIL" });
    if out.out.is_some() {
        let table = Table {
            columns: vec!["lambda", "discriminant"],
            rows: bs.discriminant_samples.iter().map(|&(l, v)| vec![l, v]).collect(),
        };
        emit(
            out,
            &table,
            json!({ "density": args.json(), "edges": nums(&bs.edges), "predicted": nums(&d.band_edges) }),
        )?;
    }
    Ok(pass)
}

fn backlund(args: &DensityArgs, n: usize, out: &OutArgs, tol: &Tolerances) -> Outcome {
    let d = args.build(tol)?;
    let pair = backlund_density(&d, tol)?;
    let alpha: Vec<String> = pair.alpha.iter().map(|&a| fmt_f64(a)).collect();
    println!("b                 {}", fmt_f64(pair.b));
    println!("product variation {:.3e}", pair.product_variation);
    println!("alpha             [{}]", alpha.join(", "));
    println!("partner period_x  {}", fmt_f64(pair.target.period_x));
    if out.out.is_some() {
        check_grid(0.0, d.period_y, n)?;
        let rows = pair.target.sample_y(0.0, d.period_y, n, 0.0)?;
        let table = Table {
            columns: vec!["y", "x", "r"],
            rows: rows.into_iter().map(|(x, r, y)| vec![y, x, r]).collect(),
        };
        emit(
            out,
            &table,
            json!({ "density": args.json(), "b": num(pair.b), "alpha": nums(&pair.alpha) }),
        )?;
    }
    Ok(true)
}

fn soliton(gamma: f64, deltas: &[f64], y_min: f64, y_max: f64, n: usize, out: &OutArgs) -> Outcome {
    check_grid(y_min, y_max, n)?;
    if !(gamma > 0.0) || deltas.iter().any(|d| !(*d > 0.0)) {
        return Err(Failure::Config("gamma and every delta must be positive".into()));
    }
    let mut rows = Vec::new();
    for &delta in deltas {
        let dist = soliton_distance(gamma, delta, y_min, y_max, n)?;
        println!("delta {}  sup distance {}", fmt_f64(delta), fmt_f64(dist));
        rows.push(vec![delta, dist]);
    }
    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| b[0].total_cmp(&a[0]));
    let converging = sorted.windows(2).all(|w| w[1][1] < w[0][1]);
    if out.out.is_some() {
        let table = Table { columns: vec!["delta", "distance"], rows };
        emit(out, &table, json!({ "gamma": num(gamma) }))?;
    }
    Ok(converging)
}

fn verify(roots: RootArgs, perturb_a3: Option<f64>, spectral: bool, out: Option<PathBuf>, tol: &Tolerances) -> Outcome {
    let cfg = VerifyConfig {
        roots: [roots.e1, roots.e2, roots.e3],
        tol: *tol,
        perturb_a3,
        spectral,
    };
    let report = run_verify(&cfg)?;
    for c in &report.checks {
        let status = match (c.kind, c.pass) {
            (CheckKind::Skipped, _) => "SKIP",
            (CheckKind::Finding, true) => "note",
            (CheckKind::Finding, false) => "DIFF",
            (CheckKind::Check, true) => "pass",
            (CheckKind::Check, false) => "FAIL",
        };
        println!("{status} {:<44} measured {:>24} expected {:>24}", c.name, fmt_f64(c.measured), fmt_f64(c.expected));
    }
    let failed = report.failures().count();
    println!("{} records, {failed} failed: {}", report.checks.len(), if report.pass { "PASS" } else { "FAIL" });
    if let Some(p) = out {
        let checks: Vec<Value> = report
            .checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "paper_ref": c.paper_ref,
                    "measured": num(c.measured),
                    "expected": num(c.expected),
                    "tol": num(c.tol),
                    "pass": c.pass,
                    "kind": c.kind,
                    "detail": c.detail,
                })
            })
            .collect();
        let v = json!({
            "config": {
                "roots": roots.json(),
                "perturb_a3": perturb_a3.map(num),
                "spectral": spectral,
                "tolerances": output::renumber(serde_json::to_value(tol).expect("tolerances serialize")),
            },
            "checks": checks,
            "pass": report.pass,
        });
        write_out(&p, &pretty(&v))?;
    }
    Ok(report.pass)
}
