use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use iterlim::entropy::{self, ProbabilityDistribution};
use iterlim::limits::fmt_sci;
use iterlim::quad::GridFunction;
use iterlim::{LimitProblem, TaylorSeries};

/// Discrepancy accepted by `quadcheck`.
const QUADCHECK_TOL: f64 = 1e-5;

/// Indeterminate limits by iterated integration.
#[derive(Debug, Parser)]
#[command(name = "iterlim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare the L'Hôpital limit with the iterated-integration estimate at one point.
    Limit {
        f: PathBuf,
        g: PathBuf,
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 1_000_000)]
        n_max: usize,
    },
    /// Tabulate ratios, errors and the uniform bound over a grid as CSV.
    Converge {
        f: PathBuf,
        g: PathBuf,
        #[arg(long, default_value_t = 10)]
        grid_points: usize,
        #[arg(long, default_value_t = 50)]
        n_max: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Integrated Tsallis entropies against the Shannon limit as CSV.
    Entropy {
        dist: PathBuf,
        /// Comma-separated q values.
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        n_max: usize,
        #[arg(long, default_value_t = 1.0)]
        k_b: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Cross-check the quadrature route against the series route.
    Quadcheck {
        f: PathBuf,
        g: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        /// Quadrature samples per side of the center.
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// Evaluation points, symmetric about the center.
        #[arg(long, default_value_t = 10)]
        grid_points: usize,
    },
}

#[derive(Debug, Args)]
struct Output {
    /// Output path, `-` for standard output.
    #[arg(long, default_value = "-")]
    output: String,
}

impl Output {
    fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(if self.output == "-" {
            Box::new(BufWriter::new(io::stdout().lock()))
        } else {
            let file = File::create(&self.output)
                .with_context(|| format!("cannot create {}", self.output))?;
            Box::new(BufWriter::new(file))
        })
    }
}

fn read_series(path: &Path) -> Result<TaylorSeries> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    text.parse()
        .with_context(|| format!("{}: bad series file", path.display()))
}

fn load_problem(f: &Path, g: &Path) -> Result<LimitProblem> {
    Ok(LimitProblem::with_default_tol(
        read_series(f)?,
        read_series(g)?,
    )?)
}

fn check_n_max(n_max: usize) -> Result<()> {
    if n_max < 1 {
        bail!("--n-max must be at least 1");
    }
    Ok(())
}

fn check_grid_points(grid_points: usize) -> Result<()> {
    if grid_points < 2 {
        bail!("--grid-points must be at least 2");
    }
    Ok(())
}

fn cmd_limit(f: &Path, g: &Path, x: f64, tol: f64, n_max: usize) -> Result<ExitCode> {
    check_n_max(n_max)?;
    if tol.is_nan() || tol <= 0.0 {
        bail!("--tol must be positive");
    }
    let problem = load_problem(f, g)?;
    let out = problem.limit_via_iteration(x, tol, n_max)?;
    println!(
        "L_hopital={} iterated={} n_used={} converged={}",
        problem.lhopital_limit(),
        out.estimate,
        out.n_used,
        out.converged
    );
    Ok(if out.converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn cmd_converge(
    f: &Path,
    g: &Path,
    grid_points: usize,
    n_max: usize,
    out: &Output,
) -> Result<ExitCode> {
    check_n_max(n_max)?;
    check_grid_points(grid_points)?;
    let report = load_problem(f, g)?.run_convergence(grid_points, n_max)?;
    let mut w = out.writer()?;
    report.write_csv(&mut w)?;
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_entropy(dist: &Path, q: &[f64], n_max: usize, k_b: f64, out: &Output) -> Result<ExitCode> {
    check_n_max(n_max)?;
    let text =
        fs::read_to_string(dist).with_context(|| format!("cannot read {}", dist.display()))?;
    let d = ProbabilityDistribution::parse(&text, k_b)
        .with_context(|| format!("{}: bad distribution file", dist.display()))?
        .without_zeros();
    let report = entropy::q_independence_report(&d, q, n_max)?;
    let mut w = out.writer()?;
    entropy::write_entropy_csv(&report, &mut w)?;
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_quadcheck(
    f: &Path,
    g: &Path,
    h: f64,
    samples: usize,
    n: usize,
    grid_points: usize,
) -> Result<ExitCode> {
    check_grid_points(grid_points)?;
    let problem = load_problem(f, g)?;
    let fu = GridFunction::from_series(problem.numerator(), samples, h)?;
    let gu = GridFunction::from_series(problem.denominator(), samples, h)?;
    let fi = fu.iterated_integral(n)?;
    let gi = gu.iterated_integral(n)?;

    // Evaluation points sit on quadrature nodes at i/m of the half-width.
    let m = grid_points.div_ceil(2);
    let mut indices = Vec::with_capacity(2 * m);
    for k in 1..=m {
        let i = ((samples * k) as f64 / m as f64).round() as isize;
        if i > 0 {
            indices.extend([-i, i]);
        }
    }
    if indices.is_empty() {
        bail!("--samples too small for {grid_points} evaluation points");
    }
    let mut worst: f64 = 0.0;
    for i in indices {
        let numeric = fi.value(i)? / gi.value(i)?;
        let series = problem.iterated_ratio(fu.x(i), n)?;
        worst = worst.max((numeric - series).abs());
    }
    println!("max_discrepancy={}", fmt_sci(worst));
    Ok(if worst <= QUADCHECK_TOL {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Limit {
            f,
            g,
            x,
            tol,
            n_max,
        } => cmd_limit(&f, &g, x, tol, n_max),
        Command::Converge {
            f,
            g,
            grid_points,
            n_max,
            out,
        } => cmd_converge(&f, &g, grid_points, n_max, &out),
        Command::Entropy {
            dist,
            q,
            n_max,
            k_b,
            out,
        } => cmd_entropy(&dist, &q, n_max, k_b, &out),
        Command::Quadcheck {
            f,
            g,
            h,
            samples,
            n,
            grid_points,
        } => cmd_quadcheck(&f, &g, h, samples, n, grid_points),
    }
}

fn main() -> ExitCode {
    // Usage errors are input errors: exit 1, not clap's default 2.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
