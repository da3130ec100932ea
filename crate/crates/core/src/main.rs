use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chernflow::analysis::Quantity;
use chernflow::report::{error_exit_code, parse_point, run, Command, Format, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "chernflow", version, about = "Chern-Ricci flow on Hopf manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Curvature tensor of omega_lambda at a point, with oracle deviation
    Tensor(Opts),
    /// Minimum bisectional curvature and sign verdict
    MinBisec(Opts),
    /// Curvature trace along the exact flow (CSV by default)
    Flow(Opts),
    /// Empirical sign-change time inside [T0/n, (2T0+1)/(2n)]
    Threshold(Opts),
    /// Curvature minima over a lambda grid
    ScanLambda(Opts),
    /// Run the full verification suite
    Verify(Opts),
}

#[derive(Args, Debug)]
struct Opts {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "T0")]
    t0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda_max: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Point literal, e.g. "1, 0.5-2i"
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    #[arg(long, default_value_t = 32)]
    starts: usize,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// hsc or hbc
    #[arg(long, default_value = "hbc")]
    quantity: String,
    #[arg(long, default_value_t = 1e-4)]
    resolution: f64,
    /// Allow flow end times beyond 0.999 T_max
    #[arg(long)]
    near_tmax: bool,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    format: Option<String>,
}

fn config(command: Command, o: Opts) -> chernflow::Result<RunConfig> {
    Ok(RunConfig {
        command,
        n: o.n,
        t0: o.t0,
        lambda: o.lambda,
        lambda_min: o.lambda_min,
        lambda_max: o.lambda_max,
        t: o.t,
        t_end: o.t_end,
        steps: o.steps,
        z: o.z.as_deref().map(parse_point).transpose()?,
        starts: o.starts,
        samples: o.samples,
        seed: o.seed,
        quantity: o.quantity.parse::<Quantity>()?,
        resolution: o.resolution,
        near_tmax: o.near_tmax,
        out: o.out,
        format: o.format.as_deref().map(str::parse::<Format>).transpose()?,
    })
}

fn configure_threads() {
    let Ok(v) = std::env::var("CHERNFLOW_THREADS") else { return };
    match v.trim().parse::<usize>() {
        Ok(k) if k > 0 => {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        }
        _ => eprintln!("warning: ignoring CHERNFLOW_THREADS={v:?}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let (command, opts) = match cli.command {
        Cmd::Tensor(o) => (Command::Tensor, o),
        Cmd::MinBisec(o) => (Command::MinBisec, o),
        Cmd::Flow(o) => (Command::Flow, o),
        Cmd::Threshold(o) => (Command::Threshold, o),
        Cmd::ScanLambda(o) => (Command::ScanLambda, o),
        Cmd::Verify(o) => (Command::Verify, o),
    };
    let cfg = match config(command, opts) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(error_exit_code(&e) as u8);
        }
    };
    let text = match (command, cfg.format) {
        (Command::Verify, None) => Ok(report.verify_text().unwrap_or_default()),
        _ => report.render(),
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {path}: {e}");
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(report.exit_code() as u8)
}
