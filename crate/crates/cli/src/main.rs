use std::io::Write;
use std::process::ExitCode;

use brauer4::census::{self, CensusSpec, FamilyKind};
use brauer4::commands::{self, Outcome};
use brauer4::config::{CliError, Format, RunConfig, Status};
use brauer4::emit;
use brauer4::input::load_surface;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Arithmetic of quartic del Pezzo surfaces with Brauer group of order 4.
///
/// SURFACE is inline JSON (starting with `{`), a path to a JSON file, or
/// `example:<name>`; run `brauer4 examples` for the built-in names.
#[derive(Parser, Debug)]
#[command(name = "brauer4", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug)]
struct Opts {
    /// Sampling precision (p-adic digits) at odd places.
    #[arg(long, global = true, default_value_t = RunConfig::default().precision_max)]
    precision_max: u32,
    /// Sample points per place when computing invariant images.
    #[arg(long, global = true, default_value_t = RunConfig::default().samples)]
    samples: usize,
    /// Height bound for rational point search.
    #[arg(long, global = true, default_value_t = RunConfig::default().height)]
    height: u64,
    /// Seed for every randomised step.
    #[arg(long, global = true, default_value_t = RunConfig::default().seed)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
    /// Worker threads for search, census and example verification.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OutFormat {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validity, local solubility, invariant images, verdict and witness.
    Analyze { surface: String },
    /// Degenerate members of the pencil and the order-4 test.
    Classify { surface: String },
    /// Local solubility at every place.
    Solubility { surface: String },
    /// Invariant images, or local invariants at a rational point.
    Invariants {
        surface: String,
        /// A point `u:v:x:y:z` or `[u,v,x,y,z]`.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Rational points up to the height bound.
    Search { surface: String },
    /// A family census as JSON lines.
    Census {
        /// `Y` or `S`.
        #[arg(long)]
        family: FamilyKind,
        #[arg(long, default_value_t = 3)]
        p_min: u64,
        #[arg(long, default_value_t = 100)]
        p_max: u64,
        /// Surfaces per prime for the S family.
        #[arg(long, default_value_t = 3)]
        per_prime: usize,
    },
    /// Checks the built-in examples against their known conclusions.
    VerifyPaper,
    /// Lists the built-in examples.
    Examples,
}

fn config(o: &Opts) -> RunConfig {
    RunConfig {
        precision_max: o.precision_max,
        samples: o.samples,
        height: o.height,
        seed: o.seed,
        format: match o.format {
            OutFormat::Json => Format::Json,
            OutFormat::Table => Format::Table,
        },
        jobs: o.jobs,
        ..RunConfig::default()
    }
}

fn run(cli: Cli) -> Result<(String, ExitCode), CliError> {
    let cfg = config(&cli.opts);
    cfg.validate()?;
    let finish = |o: Outcome| (emit(&o.value, cfg.format), o.status.exit_code());
    Ok(match cli.command {
        Command::Analyze { surface } => finish(commands::analyze(&load_surface(&surface)?, &cfg)?),
        Command::Classify { surface } => finish(commands::classify(&load_surface(&surface)?)?),
        Command::Solubility { surface } => finish(commands::solubility(&load_surface(&surface)?, &cfg)?),
        Command::Invariants { surface, point } => {
            let s = load_surface(&surface)?;
            let pt = point.as_deref().map(commands::parse_point).transpose()?;
            finish(commands::invariants(&s, pt.as_ref(), &cfg)?)
        }
        Command::Search { surface } => finish(commands::search(&load_surface(&surface)?, &cfg)?),
        Command::Census { family, p_min, p_max, per_prime } => {
            let c = census::run(&CensusSpec { family, p_min, p_max, per_prime }, &cfg)?;
            let text = match cfg.format {
                Format::Json => c.json_lines(),
                Format::Table => c.table(),
            };
            (text, c.status().exit_code())
        }
        Command::VerifyPaper => finish(commands::verify_examples(&cfg)?),
        Command::Examples => finish(Outcome { value: commands::example_list(), status: Status::Ok }),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((text, code)) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(2);
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
