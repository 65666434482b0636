use clap::{Args, Parser, Subcommand, ValueEnum};
use conebessel::algebra::{AlgebraDescriptor, Element};
use conebessel::cone::k_integral_mc;
use conebessel::series::{
    coeffs2, coeffs3, elem_sym, k_series_with, roots_from_symmetric, Flavor, KMethod, SeriesParams, Solution,
    SymmetricPoint, Variant,
};
use conebessel::verify::{registered_names, run_suite_with, Suite};
use conebessel::{json, Error};
use serde::Serialize;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "conebessel", version, about = "Bessel functions on symmetric cones of rank 2 and 3")]
struct Cli {
    /// Print JSON on stdout instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for Monte Carlo runs; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one J-solution.
    EvalJ {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        j: u8,
        /// Use the t_r^{-nu} J_{-nu} partner.
        #[arg(long)]
        partner: bool,
        #[arg(long, value_enum, default_value_t = FlavorArg::Oscillatory)]
        flavor: FlavorArg,
        /// Evaluate the literal printed sum instead of the verified construction.
        #[arg(long)]
        printed: bool,
        #[command(flatten)]
        order: Order,
        #[command(flatten)]
        point: Point,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// K-function from the J-series combination.
    EvalKSeries {
        #[arg(long)]
        rank: usize,
        #[command(flatten)]
        order: Order,
        #[command(flatten)]
        point: Point,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
    },
    /// K-integral by Monte Carlo at the diagonal element with the given eigenvalues.
    EvalKMc {
        #[arg(long)]
        rank: usize,
        #[command(flatten)]
        order: Order,
        #[command(flatten)]
        point: Point,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Coefficients of the K-function in the J-basis.
    Coeffs {
        #[arg(long, default_value_t = 3)]
        rank: usize,
        #[command(flatten)]
        order: Order,
    },
    /// Run identity checks.
    Verify {
        /// "all" or a comma-separated list of check names.
        #[arg(long, default_value = "all")]
        suite: String,
        #[command(flatten)]
        seed: SeedArg,
        /// List the registered checks and exit.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Args)]
struct Order {
    #[arg(long, allow_hyphen_values = true)]
    nu: f64,
    #[arg(long, default_value_t = 1.0)]
    d: f64,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Point {
    /// Elementary symmetric coordinates t_1,...,t_r.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    t: Option<Vec<f64>>,
    /// Eigenvalues x_1,...,x_r.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Option<Vec<f64>>,
}

#[derive(Args)]
struct SeedArg {
    #[arg(long, env = "CONEBESSEL_SEED", default_value_t = 42)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    Oscillatory,
    Modified,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Series,
    Continuation,
}

impl Point {
    fn symmetric(&self, rank: usize) -> Result<SymmetricPoint, Error> {
        let p = match (&self.t, &self.x) {
            (Some(t), None) => SymmetricPoint { t: t.clone() },
            (None, Some(x)) => elem_sym(x),
            _ => return Err(Error::Usage("give exactly one of --t and --x".into())),
        };
        if p.rank() != rank {
            return Err(Error::Usage(format!("expected {rank} coordinates, got {}", p.rank())));
        }
        Ok(p)
    }

    fn eigenvalues(&self, rank: usize) -> Result<Vec<f64>, Error> {
        match &self.x {
            Some(x) if x.len() == rank => Ok(x.clone()),
            Some(x) => Err(Error::Usage(format!("expected {rank} eigenvalues, got {}", x.len()))),
            None => roots_from_symmetric(&self.symmetric(rank)?),
        }
    }
}

fn params(order: &Order, tol: Option<f64>) -> SeriesParams {
    let mut p = SeriesParams::new(order.nu, order.d);
    if let Some(t) = tol {
        p.tol = t;
    }
    p
}

fn emit<T: Serialize>(as_json: bool, value: &T) {
    if as_json {
        println!("{}", json::to_string(value));
    } else {
        println!("{}", json::to_string_pretty(value));
    }
}

enum Failure {
    Compute(Error),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

#[derive(Serialize)]
struct Coefficients {
    rank: usize,
    nu: f64,
    d: f64,
    a: Vec<f64>,
    b: Vec<f64>,
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Usage("--threads must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::EvalJ { rank, j, partner, flavor, printed, order, point, tol } => {
            let flavor = match flavor {
                FlavorArg::Oscillatory => Flavor::Oscillatory,
                FlavorArg::Modified => Flavor::Modified,
            };
            let variant = if printed { Variant::Printed } else { Variant::Verified };
            let s = Solution::new(rank, j, partner)?.with_flavor(flavor).with_variant(variant);
            emit(cli.json, &s.eval(&params(&order, tol), &point.symmetric(rank)?)?);
        }
        Command::EvalKSeries { rank, order, point, tol, method } => {
            let method = match method {
                MethodArg::Auto => KMethod::Auto,
                MethodArg::Series => KMethod::Series,
                MethodArg::Continuation => KMethod::Continuation,
            };
            emit(cli.json, &k_series_with(rank, &params(&order, tol), &point.symmetric(rank)?, method)?);
        }
        Command::EvalKMc { rank, order, point, samples, seed } => {
            let desc = AlgebraDescriptor::new(rank, order.d)?;
            let x = Element::diag(desc, &point.eigenvalues(rank)?)?;
            emit(cli.json, &k_integral_mc(desc, order.nu, &x, samples, seed.seed)?);
        }
        Command::Coeffs { rank, order } => {
            let c = match rank {
                2 => {
                    let c = coeffs2(order.nu, order.d)?;
                    Coefficients { rank, nu: order.nu, d: order.d, a: vec![c[0], c[1]], b: vec![c[2], c[3]] }
                }
                3 => {
                    let c = coeffs3(order.nu, order.d)?;
                    Coefficients { rank, nu: order.nu, d: order.d, a: c.a.to_vec(), b: c.b.to_vec() }
                }
                _ => return Err(Error::Usage(format!("coefficients exist for rank 2 and 3, got {rank}")).into()),
            };
            emit(cli.json, &c);
        }
        Command::Verify { suite, seed, list } => {
            if list {
                let names = registered_names();
                if cli.json {
                    println!("{}", json::to_string(&names));
                } else {
                    names.iter().for_each(|n| println!("{n}"));
                }
                return Ok(());
            }
            let suite = Suite::parse(&suite);
            let names = match &suite {
                Suite::All => registered_names(),
                Suite::Named(v) => v.clone(),
            };
            let human = !cli.json;
            let report = run_suite_with(&suite, seed.seed, &names, |r| {
                if human {
                    let mark = if r.passed { "PASS" } else { "FAIL" };
                    let extra = r.error.as_deref().map(|e| format!("  ({e})")).unwrap_or_default();
                    println!(
                        "{mark} {:<36} observed {:>10.3e}  bound {:>8.1e}  {:>7.2}s{extra}",
                        r.name,
                        r.observed,
                        r.bound,
                        r.wall_time.as_secs_f64()
                    );
                }
            })?;
            if cli.json {
                println!("{}", json::to_string(&report));
            } else {
                println!("{} passed, {} failed", report.summary.pass, report.summary.fail);
            }
            if !report.all_passed() {
                return Err(Failure::Checks);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(3),
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Usage(_) | Error::UnknownCheck { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
