//! `msl`: run the library's experiments from the command line.

mod commands;
mod output;
mod params;

use clap::{Parser, Subcommand};

use output::{render, write, CliError, Output};
use params::{Format, Params};

#[derive(Parser)]
#[command(name = "msl", version, about = "Convex-body functionals, nodal densities and sharp sampling constructions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    params: Params,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Unit-ball volumes and the constants A_d.
    Constants,
    /// Mean width of a body.
    MeanWidth,
    /// Lower density and regularity profile of an arrangement.
    Density,
    /// Randomized cosine-product construction on a body.
    Construct,
    /// Construction on the unit ball against 2 (A_d - delta).
    VerifyBall,
    /// Construction on a quarter-turn symmetric planar body.
    #[command(name = "verify-2d")]
    Verify2d,
    /// A_d W(K) minus the density of a certified cosine product.
    BoundMargin,
    /// Both sides of the Jensen bound along one line.
    Jensen,
    /// Ronkin average of log(1/|f|) over a ball.
    Ronkin,
    /// Crofton estimate of an arrangement's measure in a ball.
    Crofton,
    /// Norm-ratio sweep across the density threshold.
    SamplingSweep,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::MeanWidth => "mean-width",
            Command::Density => "density",
            Command::Construct => "construct",
            Command::VerifyBall => "verify-ball",
            Command::Verify2d => "verify-2d",
            Command::BoundMargin => "bound-margin",
            Command::Jensen => "jensen",
            Command::Ronkin => "ronkin",
            Command::Crofton => "crofton",
            Command::SamplingSweep => "sampling-sweep",
        }
    }

    fn run(self, p: &Params) -> Result<Output, CliError> {
        match self {
            Command::Constants => commands::constants(p),
            Command::MeanWidth => commands::mean_width_cmd(p),
            Command::Density => commands::density(p),
            Command::Construct => commands::construct(p),
            Command::VerifyBall => commands::verify_ball(p),
            Command::Verify2d => commands::verify_2d(p),
            Command::BoundMargin => commands::bound_margin(p),
            Command::Jensen => commands::jensen(p),
            Command::Ronkin => commands::ronkin(p),
            Command::Crofton => commands::crofton(p),
            Command::SamplingSweep => commands::sampling_sweep(p),
        }
    }
}

fn load(flags: &Params) -> Result<Params, CliError> {
    let config = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))?
        }
        None => Params::default(),
    };
    Params::merge(config, flags).map_err(CliError::Validation)
}

fn threads(p: &Params) -> Result<Option<usize>, CliError> {
    if let Some(t) = p.threads {
        return Ok(Some(t));
    }
    match std::env::var("MSL_THREADS") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| CliError::Validation(format!("MSL_THREADS={v:?} is not a count"))),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let p = load(&cli.params)?;
    if let Some(n) = threads(&p)? {
        if n == 0 {
            return Err(CliError::Validation("thread budget must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(e.to_string()))?;
    }
    let out = cli.command.run(&p)?;
    let text = render(cli.command.name(), p.echo(), &out, p.format.unwrap_or(Format::Json));
    write(p.out.as_deref(), &text)
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let err = CliError::Validation(e.to_string().trim().to_string());
            eprintln!("{}", serde_json::to_string_pretty(&err.to_json()).expect("json"));
            std::process::exit(2);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("{}", serde_json::to_string_pretty(&e.to_json()).expect("json"));
        std::process::exit(e.exit_code());
    }
}
