//! `cmgc`: analytic and simulated giant-component fractions for
//! configuration-model random graphs.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use cmgc::branching;
use cmgc::orders::{self, OrderRelation};
use cmgc::sim;
use cmgc::{json as dist_json, DegreeDistribution, Error, MixingDistribution};

#[derive(Parser)]
#[command(name = "cmgc", version, about = "Giant components of configuration-model graphs")]
struct Cli {
    /// Output file (default: stdout)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Base seed for randomized commands
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Numerical tolerance for fixed-point solves
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Distribution spec sources shared by single-spec commands: an inline
/// JSON string or a file.
#[derive(Args)]
struct SpecArgs {
    /// Inline distribution spec (JSON)
    spec: Option<String>,
    /// Read the distribution spec from a file
    #[arg(long)]
    dist_file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the limiting giant-component fraction
    Zeta {
        #[command(flatten)]
        spec: SpecArgs,
        /// Thin the distribution with retention probability r before solving
        #[arg(long)]
        thin: Option<f64>,
    },
    /// Emit the mean/variance/extinction table for the convex-order counterexample pair
    Counterexample,
    /// Giant-component fractions over a parameter grid
    Sweep {
        /// Distribution family to sweep
        #[arg(long, value_enum)]
        family: Family,
        /// Mean degrees, comma separated
        #[arg(long, value_delimiter = ',')]
        lambdas: Option<Vec<f64>>,
        /// Grid values (alpha, 1/sigma^2, or n), comma separated
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
    },
    /// Closed-form upper bounds next to the exact fraction
    Bounds {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Decide a stochastic-order relation between two distributions
    Order {
        /// Inline distribution specs (JSON): P, then Q
        specs: Vec<String>,
        /// Read distribution specs from files (after any inline specs)
        #[arg(long, action = clap::ArgAction::Append)]
        dist_file: Vec<PathBuf>,
        /// One of st, cx, cv, icx, icv, lt
        #[arg(long)]
        relation: String,
    },
    /// Sample configuration-model graphs and measure the largest component
    Simulate {
        #[command(flatten)]
        spec: SpecArgs,
        /// Number of nodes per replicate
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        /// Number of replicates
        #[arg(long, default_value_t = 20)]
        reps: usize,
        /// Thin the distribution with retention probability r before sampling
        #[arg(long)]
        thin: Option<f64>,
        /// Write the edge list of the last replicate to a file
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Critical mean degree lambda_cr of the thinned-Poisson criterion
    LambdaCr,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    #[value(alias = "pareto_mpoi")]
    ParetoMpoi,
    #[value(alias = "lognormal_mpoi")]
    LognormalMpoi,
    Binomial,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => {
            let result = match &cli.out {
                Some(path) => fs::write(path, output),
                None => std::io::stdout().write_all(output.as_bytes()),
            };
            if let Err(e) = result {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match &e {
                CliError::Core(c) if !c.is_parse() => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

enum CliError {
    Core(Error),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => e.fmt(f),
            CliError::Io(msg) => msg.fmt(f),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn load_specs(inline: &[String], files: &[PathBuf]) -> CliResult<Vec<DegreeDistribution>> {
    let mut specs = Vec::new();
    for s in inline {
        specs.push(dist_json::from_str(s)?);
    }
    for path in files {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        specs.push(dist_json::from_str(&text)?);
    }
    Ok(specs)
}

fn load_one(spec: &SpecArgs) -> CliResult<DegreeDistribution> {
    let inline: Vec<String> = spec.spec.iter().cloned().collect();
    let files: Vec<PathBuf> = spec.dist_file.iter().cloned().collect();
    let mut specs = load_specs(&inline, &files)?;
    if specs.len() != 1 {
        return Err(CliError::Core(Error::Parse(format!(
            "expected exactly one distribution spec, got {}",
            specs.len()
        ))));
    }
    Ok(specs.remove(0))
}

/// Format with 6 significant digits, plain decimal notation.
fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).clamp(0, 17) as usize;
    format!("{x:.decimals$}")
}

/// Key/value CSV rendering of a flat JSON report: a header row of field
/// names and one row of values (nested arrays/objects are skipped).
fn report_to_csv(v: &Value) -> String {
    let obj = v.as_object().expect("reports are objects");
    let mut names = Vec::new();
    let mut values = Vec::new();
    for (k, val) in obj {
        let rendered = match val {
            Value::Number(n) => n
                .as_f64()
                .map(sig6)
                .unwrap_or_else(|| n.to_string()),
            Value::Bool(b) => b.to_string(),
            Value::String(s) => s.clone(),
            Value::Null => String::new(),
            Value::Array(_) | Value::Object(_) => continue,
        };
        names.push(k.clone());
        values.push(rendered);
    }
    format!("{}\n{}\n", names.join(","), values.join(","))
}

fn render_report(v: &Value, format: Format) -> String {
    match format {
        Format::Json => format!("{v}\n"),
        Format::Csv => report_to_csv(v),
    }
}

fn logspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| {
            let t = i as f64 / (points - 1) as f64;
            (lo.ln() + t * (hi.ln() - lo.ln())).exp()
        })
        .collect()
}

fn sweep_distribution(family: Family, lambda: f64, param: f64) -> cmgc::Result<Option<DegreeDistribution>> {
    match family {
        Family::ParetoMpoi => {
            let alpha = param;
            if alpha <= 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "pareto sweep needs alpha > 1, got {alpha}"
                )));
            }
            let scale = lambda * (1.0 - 1.0 / alpha);
            Ok(Some(DegreeDistribution::mixed_poisson(
                MixingDistribution::pareto(alpha, scale)?,
            )))
        }
        Family::LognormalMpoi => {
            let inv_s2 = param;
            if inv_s2 <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "lognormal sweep needs 1/sigma^2 > 0, got {inv_s2}"
                )));
            }
            let s2 = 1.0 / inv_s2;
            let b = lambda.ln() - s2 / 2.0;
            Ok(Some(DegreeDistribution::mixed_poisson(
                MixingDistribution::lognormal(b, s2)?,
            )))
        }
        Family::Binomial => {
            if param < 3.0 || param.fract() != 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "binomial sweep needs integer n >= 3, got {param}"
                )));
            }
            let n = param as u32;
            // p = lambda / n only defines a law when lambda <= n
            if lambda > n as f64 {
                return Ok(None);
            }
            Ok(Some(DegreeDistribution::binomial(n, lambda / n as f64)?))
        }
    }
}

fn run(cli: &Cli) -> CliResult<String> {
    let tol = cli.tol.unwrap_or(branching::DEFAULT_TOL);
    match &cli.command {
        Command::Zeta { spec, thin } => {
            let mut d = load_one(spec)?;
            if let Some(r) = thin {
                d = d.thinned(*r)?;
            }
            let report = branching::zeta_cm(&d, tol)?;
            let mut v = serde_json::to_value(&report).expect("serializable");
            v.as_object_mut()
                .unwrap()
                .insert("dist".into(), dist_json::to_value(&d));
            Ok(render_report(&v, cli.format.unwrap_or(Format::Json)))
        }
        Command::Counterexample => {
            let p = cmgc::counterexample_p();
            let q = cmgc::counterexample_q();
            let p_circ = p.downshifted_size_biased()?;
            let q_circ = q.downshifted_size_biased()?;
            let cols = [&p, &q, &p_circ, &q_circ];
            let eta = |pm: &cmgc::FinitePmf| -> CliResult<f64> {
                let d = DegreeDistribution::Finite(pm.clone());
                Ok(branching::extinction_probability(&d, tol)?.eta)
            };
            let means: Vec<f64> = cols.iter().map(|c| c.mean()).collect();
            let vars: Vec<f64> = cols.iter().map(|c| c.variance()).collect();
            let mut etas = Vec::new();
            for c in cols {
                etas.push(eta(c)?);
            }
            let zeta_p = branching::zeta_cm(&DegreeDistribution::Finite(p), tol)?.zeta_cm;
            let zeta_q = branching::zeta_cm(&DegreeDistribution::Finite(q), tol)?.zeta_cm;
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let row = |name: &str, vals: &[f64]| {
                        let cells: Vec<String> =
                            vals.iter().map(|v| format!("{v:.3}")).collect();
                        format!("{name},{}", cells.join(","))
                    };
                    Ok(format!(
                        "statistic,p,q,p_circ,q_circ\n{}\n{}\n{}\n{}\n",
                        row("mean", &means),
                        row("variance", &vars),
                        row("eta", &etas),
                        format_args!("zeta_cm,{zeta_p:.3},{zeta_q:.3},,"),
                    ))
                }
                Format::Json => Ok(format!(
                    "{}\n",
                    json!({
                        "columns": ["p", "q", "p_circ", "q_circ"],
                        "mean": means,
                        "variance": vars,
                        "eta": etas,
                        "zeta_cm": {"p": zeta_p, "q": zeta_q},
                    })
                )),
            }
        }
        Command::Sweep { family, lambdas, grid } => {
            let lambdas = lambdas
                .clone()
                .unwrap_or_else(|| vec![0.9, 1.5, 2.0, 3.0, 5.0]);
            let grid = match grid {
                Some(g) => g.clone(),
                // approximations of the figure grids (exact values unpublished)
                None => match family {
                    Family::ParetoMpoi => logspace(1.01, 100.0, 60),
                    Family::LognormalMpoi => logspace(0.01, 100.0, 60),
                    Family::Binomial => (3..=100).map(|n| n as f64).collect(),
                },
            };
            if lambdas.iter().any(|&l| !(l > 0.0)) {
                return Err(CliError::Core(Error::InvalidParameter(
                    "lambdas must be positive".into(),
                )));
            }
            if grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CliError::Core(Error::InvalidParameter(
                    "grid must be strictly increasing".into(),
                )));
            }
            let family_name = match family {
                Family::ParetoMpoi => "pareto_mpoi",
                Family::LognormalMpoi => "lognormal_mpoi",
                Family::Binomial => "binomial",
            };
            let mut cells = Vec::new();
            for &lambda in &lambdas {
                for &param in &grid {
                    cells.push((lambda, param));
                }
            }
            // validate all cells up front so errors exit before any output
            for &(lambda, param) in &cells {
                sweep_distribution(*family, lambda, param)?;
            }
            let rows: Vec<(f64, f64, Option<f64>)> = cells
                .par_iter()
                .map(|&(lambda, param)| {
                    let z = match sweep_distribution(*family, lambda, param).expect("validated") {
                        Some(d) => Some(branching::zeta_cm(&d, tol)?.zeta_cm),
                        None => None,
                    };
                    Ok((lambda, param, z))
                })
                .collect::<cmgc::Result<_>>()?;
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut out = String::from("family,lambda,param,zeta_cm\n");
                    for (lambda, param, z) in rows {
                        if let Some(z) = z {
                            out.push_str(&format!(
                                "{family_name},{},{},{}\n",
                                sig6(lambda),
                                sig6(param),
                                sig6(z)
                            ));
                        }
                    }
                    Ok(out)
                }
                Format::Json => {
                    let items: Vec<Value> = rows
                        .into_iter()
                        .filter_map(|(lambda, param, z)| {
                            z.map(|z| {
                                json!({
                                    "family": family_name,
                                    "lambda": lambda,
                                    "param": param,
                                    "zeta_cm": z,
                                })
                            })
                        })
                        .collect();
                    Ok(format!("{}\n", Value::Array(items)))
                }
            }
        }
        Command::Bounds { spec } => {
            let d = load_one(spec)?;
            let report = branching::bounds_report(&d, tol)?;
            let mut v = serde_json::to_value(&report).expect("serializable");
            v.as_object_mut()
                .unwrap()
                .insert("dist".into(), dist_json::to_value(&d));
            Ok(render_report(&v, cli.format.unwrap_or(Format::Json)))
        }
        Command::Order { specs, dist_file, relation } => {
            let relation: OrderRelation = relation.parse()?;
            let loaded = load_specs(specs, dist_file)?;
            if loaded.len() != 2 {
                return Err(CliError::Core(Error::Parse(format!(
                    "order needs exactly two distribution specs, got {}",
                    loaded.len()
                ))));
            }
            // parametric laws are compared through a truncation
            let p = loaded[0].truncate(1e-10)?;
            let q = loaded[1].truncate(1e-10)?;
            let verdict = orders::check_order(&p, &q, relation);
            let mut v = serde_json::to_value(&verdict).expect("serializable");
            let obj = v.as_object_mut().unwrap();
            obj.insert("dist_p".into(), dist_json::to_value(&loaded[0]));
            obj.insert("dist_q".into(), dist_json::to_value(&loaded[1]));
            Ok(render_report(&v, cli.format.unwrap_or(Format::Json)))
        }
        Command::Simulate { spec, n, reps, thin, dump } => {
            let mut d = load_one(spec)?;
            if let Some(r) = thin {
                d = d.thinned(*r)?;
            }
            let stats = sim::simulate_zeta(&d, *n, *reps, cli.seed)?;
            if let Some(path) = dump {
                let g = sim::last_replicate_graph(&d, *n, *reps, cli.seed)?;
                let mut buf = Vec::new();
                sim::write_edge_list(&g, &mut buf)
                    .map_err(|e| CliError::Io(format!("edge list: {e}")))?;
                fs::write(path, buf)
                    .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            }
            let mut v = serde_json::to_value(&stats).expect("serializable");
            v.as_object_mut()
                .unwrap()
                .insert("dist".into(), dist_json::to_value(&d));
            Ok(render_report(&v, cli.format.unwrap_or(Format::Json)))
        }
        Command::LambdaCr => {
            let lam = branching::lambda_cr(cli.tol.unwrap_or(1e-8))?;
            let v = json!({ "lambda_cr": lam });
            Ok(render_report(&v, cli.format.unwrap_or(Format::Json)))
        }
    }
}
