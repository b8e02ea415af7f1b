use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use martlab_cli::commands::{self, CmdError};
use martlab_cli::config::{Params, UsageError};
use martlab_cli::report::{write_csv, write_json, RunReport};
use martlab_cli::suite::{self, Suite};

#[derive(Parser, Debug)]
#[command(
    name = "martlab",
    version,
    about = "Sharp martingale inequalities: constants, special functions, scans and simulations"
)]
struct Cli {
    /// RNG seed shared by all randomized steps.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker thread cap.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    output: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// key=value file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Add a deliberately mismatched majorization scan that must fail.
    #[arg(long, global = true)]
    negative_control: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Named constants at p and K.
    Constants(Inputs),
    /// One special-function value.
    Eval(Inputs),
    /// Majorization and smoothness scans of a special function.
    Verify(Inputs),
    /// Monte Carlo experiments: lp, davis, llogl, weak, exit.
    Simulate(Inputs),
    /// Riesz-transform checks on circle, torus, sphere or Gauss space.
    Riesz(Inputs),
    /// Check suites.
    Suite {
        #[arg(value_parser = ["fast", "full"])]
        name: String,
    },
}

#[derive(Args, Debug, Default)]
struct Inputs {
    #[arg(long)]
    function: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long = "K", alias = "k")]
    k: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    y: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    z: Option<f64>,
    #[arg(long)]
    dim: Option<String>,
    #[arg(long)]
    points: Option<String>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    check: Option<String>,
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long)]
    paths: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    potential: Option<String>,
    #[arg(long)]
    domain: Option<String>,
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    degree: Option<String>,
    #[arg(long = "N")]
    n: Option<String>,
    #[arg(long)]
    direction: Option<String>,
}

impl Inputs {
    fn pairs(&self) -> Vec<(&'static str, Option<String>)> {
        let f = |v: Option<f64>| v.map(|x| x.to_string());
        vec![
            ("function", self.function.clone()),
            ("p", f(self.p)),
            ("k", f(self.k)),
            ("x", f(self.x)),
            ("y", f(self.y)),
            ("t", f(self.t)),
            ("a", f(self.a)),
            ("b", f(self.b)),
            ("z", f(self.z)),
            ("dim", self.dim.clone()),
            ("points", self.points.clone()),
            ("radius", f(self.radius)),
            ("check", self.check.clone()),
            ("experiment", self.experiment.clone()),
            ("paths", self.paths.clone()),
            ("dt", f(self.dt)),
            ("potential", self.potential.clone()),
            ("domain", self.domain.clone()),
            ("grid", self.grid.clone()),
            ("trials", self.trials.clone()),
            ("degree", self.degree.clone()),
            ("n", self.n.clone()),
            ("direction", self.direction.clone()),
        ]
    }
}

fn build_params(cli: &Cli) -> Result<Params, UsageError> {
    let mut params = match &cli.config {
        Some(path) => Params::from_file(path)?,
        None => Params::new(),
    };
    params.merge_flags([
        ("seed", cli.seed.map(|v| v.to_string())),
        ("threads", cli.threads.map(|v| v.to_string())),
        ("output", cli.output.map(|v| format!("{v:?}").to_lowercase())),
        ("out", cli.out.as_ref().map(|v| v.display().to_string())),
        ("negative_control", cli.negative_control.then(|| "true".to_string())),
    ])?;
    let inputs = match &cli.command {
        Command::Constants(i) | Command::Eval(i) | Command::Verify(i) | Command::Simulate(i) | Command::Riesz(i) => {
            Some(i)
        }
        Command::Suite { .. } => None,
    };
    if let Some(i) = inputs {
        params.merge_flags(i.pairs())?;
    }
    Ok(params)
}

fn dispatch(cli: &Cli, params: &Params) -> commands::Rows {
    match &cli.command {
        Command::Constants(_) => commands::constants(params),
        Command::Eval(_) => commands::eval(params),
        Command::Verify(_) => commands::verify(params),
        Command::Simulate(_) => commands::simulate(params),
        Command::Riesz(_) => commands::riesz(params),
        Command::Suite { name } => {
            let s = Suite::parse(name).ok_or_else(|| CmdError::Usage(UsageError(format!("unknown suite '{name}'"))))?;
            suite::run(s, params)
        }
    }
}

fn write_report(report: &RunReport, params: &Params) -> io::Result<()> {
    let format = params.str_or("output", "csv").to_string();
    let sink: Box<dyn Write> = match params.str("out") {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    };
    match format.as_str() {
        "json" => {
            let mut sink = sink;
            write_json(report, &mut sink)?;
            writeln!(sink)
        }
        _ => write_csv(report, sink),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let params = match build_params(&cli) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if !matches!(params.str_or("output", "csv"), "csv" | "json") {
        eprintln!("error: output must be csv or json");
        return ExitCode::from(2);
    }
    let threads = match params.usize_or("threads", 0) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let start = Instant::now();
    let rows = match dispatch(&cli, &params) {
        Ok(rows) => rows,
        Err(CmdError::Usage(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(CmdError::Module(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let report = RunReport::new(params.echo(), rows, start.elapsed().as_secs_f64());
    if let Err(e) = write_report(&report, &params) {
        eprintln!("error: writing report: {e}");
        return ExitCode::from(1);
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
