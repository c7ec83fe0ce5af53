//! Command-line front end: `sweep`, `topology`, and `compare`.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use coopsim::config::{build_topology, interuser_fading, parse_scenario_file, parse_snr_range};
use coopsim::coop_link::{MrcMode, PowerAllocation};
use coopsim::engine::{run_sweep, write_csv, BerRecord, SweepConfig};
use coopsim::error::Error;
use coopsim::topology::TopologySpec;

#[derive(Parser)]
#[command(
    name = "coopsim",
    version,
    about = "BER simulator for coded amplify-and-forward cooperative links"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one BER-vs-SNR sweep and emit CSV
    Sweep(SweepArgs),
    /// Print the distance/gain table for a relay placement
    Topology(TopologyArgs),
    /// Run a named list of scenarios from a config file and emit CSV
    Compare(CompareArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum TopologyKind {
    Equilateral,
    IsoscelesDest,
    IsoscelesSrc,
    Linear,
    Scalene,
}

impl TopologyKind {
    fn as_str(self) -> &'static str {
        match self {
            TopologyKind::Equilateral => "equilateral",
            TopologyKind::IsoscelesDest => "isosceles-dest",
            TopologyKind::IsoscelesSrc => "isosceles-src",
            TopologyKind::Linear => "linear",
            TopologyKind::Scalene => "scalene",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum InterUser {
    Rayleigh,
    Rician,
}

#[derive(Clone, Copy, ValueEnum)]
enum MrcFlag {
    Lasthop,
    Cascade,
}

#[derive(Args)]
struct GeometryArgs {
    /// Relay placement family
    #[arg(long, value_enum, default_value_t = TopologyKind::Equilateral)]
    topology: TopologyKind,
    /// Apex angle in radians for the isosceles variants, in (0, pi/3)
    #[arg(long)]
    theta: Option<f64>,
    /// Relay position fraction along the S-D axis, in (0, 1)
    #[arg(long)]
    rho: Option<f64>,
    /// Offset of the relay's parallel line (scalene), in units of d_sd
    #[arg(long)]
    f: Option<f64>,
    /// Path-loss exponent
    #[arg(long, default_value_t = 4.0)]
    alpha: f64,
    /// Exchange the source and relay positions
    #[arg(long)]
    swap_roles: bool,
}

impl GeometryArgs {
    fn spec(&self) -> Result<TopologySpec, Error> {
        build_topology(self.topology.as_str(), self.theta, self.rho, self.f)
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    geometry: GeometryArgs,
    /// Source fraction of the total transmit power, in (0, 1)
    #[arg(long, default_value_t = 0.5)]
    psrc: f64,
    /// Convolutional coding on (default)
    #[arg(long, overrides_with = "uncoded")]
    coded: bool,
    /// Hard-slicer baseline without coding
    #[arg(long)]
    uncoded: bool,
    /// Inter-user (S-R) channel model
    #[arg(long, value_enum, default_value_t = InterUser::Rayleigh)]
    interuser: InterUser,
    /// Rician K-factor of the inter-user channel
    #[arg(long, default_value_t = 15.0)]
    k: f64,
    /// SNR grid as start:step:stop in dB
    #[arg(long, default_value = "0:2:30")]
    snr: String,
    /// Minimum frames per SNR point
    #[arg(long, default_value_t = 1000)]
    frames: u64,
    /// Frame cap per SNR point
    #[arg(long, default_value_t = 20_000)]
    max_frames: u64,
    /// Keep simulating until this many bit errors (past the minimum frames)
    #[arg(long, default_value_t = 100)]
    min_errors: u64,
    /// Master seed for the per-frame substreams
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Relayed-branch combiner weighting
    #[arg(long, value_enum, default_value_t = MrcFlag::Lasthop)]
    mrc: MrcFlag,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SweepArgs {
    fn config(&self) -> Result<SweepConfig, Error> {
        let config = SweepConfig {
            snr_grid_db: parse_snr_range(&self.snr)?,
            min_frames: self.frames,
            max_frames: self.max_frames,
            min_bit_errors: self.min_errors,
            master_seed: self.seed,
            topology: self.geometry.spec()?,
            alpha: self.geometry.alpha,
            fading_sr: Some(interuser_fading(
                match self.interuser {
                    InterUser::Rayleigh => "rayleigh",
                    InterUser::Rician => "rician",
                },
                Some(self.k),
            )?),
            power: PowerAllocation::from_source_fraction(self.psrc)
                .map_err(|e| Error::Config(e.to_string()))?,
            coded: !self.uncoded,
            mrc_mode: match self.mrc {
                MrcFlag::Lasthop => MrcMode::LastHop,
                MrcFlag::Cascade => MrcMode::Cascade,
            },
            swap_roles: self.geometry.swap_roles,
            ..SweepConfig::default()
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct TopologyArgs {
    #[command(flatten)]
    geometry: GeometryArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// Scenario file, one [section] per scenario
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit_csv(records: &[BerRecord], out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => write_csv(fs::File::create(path)?, records),
        None => write_csv(std::io::stdout().lock(), records),
    }
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Error> {
    let records = run_sweep(&args.config()?)?;
    emit_csv(&records, args.out.as_ref())
}

fn cmd_topology(args: &TopologyArgs) -> Result<(), Error> {
    let spec = args.geometry.spec()?;
    let mut distances = spec.distances()?;
    if args.geometry.swap_roles {
        distances = distances.swap_source_relay()?;
    }
    let gains = distances.gains(args.geometry.alpha)?;

    let mut out = std::io::stdout().lock();
    let label = match spec {
        TopologySpec::Equilateral => "equilateral".to_string(),
        TopologySpec::IsoscelesNearDest { theta } => format!("isosceles-dest (theta={theta})"),
        TopologySpec::IsoscelesNearSource { phi } => format!("isosceles-src (theta={phi})"),
        TopologySpec::Linear { rho } => format!("linear (rho={rho})"),
        TopologySpec::Scalene { f, rho } => format!("scalene (f={f}, rho={rho})"),
    };
    writeln!(out, "topology    {label}")?;
    writeln!(out, "alpha       {}", args.geometry.alpha)?;
    writeln!(out, "swap-roles  {}", args.geometry.swap_roles)?;
    writeln!(out, "hop   distance    gain")?;
    writeln!(out, "s-d   {:<10.6}  {:.6}", gains.d_sd, gains.g_sd)?;
    writeln!(out, "s-r   {:<10.6}  {:.6}", gains.d_sr, gains.g_sr)?;
    writeln!(out, "r-d   {:<10.6}  {:.6}", gains.d_rd, gains.g_rd)?;
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> Result<(), Error> {
    let text = fs::read_to_string(&args.config)?;
    let sweeps = parse_scenario_file(&text)?;
    let mut records = Vec::new();
    for sweep in &sweeps {
        records.extend(run_sweep(&sweep.config)?);
    }
    emit_csv(&records, args.out.as_ref())
}

fn run(cli: Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Sweep(args) => cmd_sweep(args),
        Command::Topology(args) => cmd_topology(args),
        Command::Compare(args) => cmd_compare(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1, // bad flags are configuration errors
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ (Error::InvalidInput(_) | Error::Config(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
