use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use anyhow::{bail, Context};
use cc_miso::dump::{write_channels, write_transcript};
use cc_miso::harness::{estimate_dof, find_crossover, run_sweep, trial_gains, SweepSpec};
use cc_miso::plot::emit_plot;
use cc_miso::table::{emit_csv, write_csv};
use cc_miso::db_to_linear;
use cc_miso_core::delivery::{run_delivery_complex, run_delivery_finite, verify_delivery, DemandVector, Library};
use cc_miso_core::rates::dof;
use cc_miso_core::{BeamSolver, Scheme, SystemConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;

#[derive(Parser)]
#[command(name = "cc-miso", version, about = "Coded caching over a multi-antenna downlink")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo sweep of the symmetric rate over an SNR grid.
    Sweep(SweepArgs),
    /// Run one delivery at symbol level and check every user's file.
    Verify(VerifyArgs),
    /// Estimate the high-SNR slope of one scheme.
    Dof(DofArgs),
}

#[derive(Args, Clone)]
struct SystemArgs {
    /// Users
    #[arg(long = "K", default_value_t = 3)]
    users: usize,
    /// Transmit antennas
    #[arg(long = "L", default_value_t = 2)]
    antennas: usize,
    /// Files in the library
    #[arg(long = "N", default_value_t = 3)]
    files: usize,
    /// Cache size in files, integer or fraction such as 3/2
    #[arg(long = "M", default_value = "1")]
    cache: Ratio<u64>,
    /// File size in bits (default: smallest valid size of at least 1024)
    #[arg(long = "F")]
    file_bits: Option<u64>,
}

impl SystemArgs {
    fn config(&self) -> anyhow::Result<SystemConfig> {
        let cfg = SystemConfig::new(self.users, self.antennas, self.files, self.cache)?;
        Ok(match self.file_bits {
            Some(f) => cfg.with_file_bits(f)?,
            None => cfg,
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverKind {
    Sdr,
    Grid,
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Max-min multicast beamformer
    #[arg(long, value_enum, default_value_t = SolverKind::Sdr)]
    solver: SolverKind,
    /// Same as `--solver grid`
    #[arg(long)]
    oracle: bool,
    /// Angular step of the grid search in radians
    #[arg(long, default_value_t = 1e-3)]
    grid_step: f64,
}

impl SolverArgs {
    fn solver(&self) -> BeamSolver {
        match (self.oracle, self.solver) {
            (true, _) | (_, SolverKind::Grid) => BeamSolver::Grid { step: self.grid_step },
            (false, SolverKind::Sdr) => BeamSolver::default(),
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// SNR grid in dB, `start:step:stop` or a comma-separated list
    #[arg(long, default_value = "10:1:30")]
    snr_db: String,
    #[arg(long, default_value_t = 2000)]
    trials: u64,
    /// Schemes to evaluate: 1 max-min multicast, 2 zero-forcing complex, 3 zero-forcing finite
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    schemes: Vec<u8>,
    #[command(flatten)]
    solver: SolverArgs,
    /// Base seed; trial i uses seed + i
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Write the channel of every trial as CSV
    #[arg(long)]
    channel_dump: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmKind {
    Complex,
    Finite,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Seed of the channel, the demands and the file contents
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = AlgorithmKind::Complex)]
    algorithm: AlgorithmKind,
    #[arg(long, default_value_t = 20.0)]
    snr_db: f64,
    /// Write the transcript to this file
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args)]
struct DofArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long, default_value_t = 2)]
    scheme: u8,
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value_t = 60.0)]
    lo_db: f64,
    #[arg(long, default_value_t = 80.0)]
    hi_db: f64,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn parse_grid(text: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let (start, step, stop): (f64, f64, f64) = (parts[0].parse()?, parts[1].parse()?, parts[2].parse()?);
        if step <= 0.0 || stop < start {
            bail!("SNR range {text} is empty");
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| start + i as f64 * step).collect());
    }
    text.split(',').map(|s| s.trim().parse::<f64>().with_context(|| format!("bad SNR value {s}"))).collect()
}

fn scheme(n: u8) -> anyhow::Result<Scheme> {
    Scheme::from_number(n).with_context(|| format!("unknown scheme {n}; expected 1, 2 or 3"))
}

fn sweep(args: SweepArgs) -> anyhow::Result<()> {
    let cfg = args.system.config()?;
    let schemes = args.schemes.iter().map(|&n| scheme(n)).collect::<anyhow::Result<Vec<_>>>()?;
    let spec = SweepSpec {
        cfg: cfg.clone(),
        snr_db: parse_grid(&args.snr_db)?,
        trials: args.trials,
        base_seed: args.seed,
        schemes: schemes.clone(),
        solver: args.solver.solver(),
    };
    let result = run_sweep(&spec)?;
    if result.redraws > 0 {
        log::info!("{} degenerate channel draws replaced", result.redraws);
    }
    match &args.csv {
        Some(path) => emit_csv(&result, path).with_context(|| format!("writing {}", path.display()))?,
        None => write_csv(&result, std::io::stdout().lock())?,
    }
    if let Some(path) = &args.plot {
        emit_plot(&result, path).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &args.channel_dump {
        let mut channels = Vec::with_capacity(args.trials as usize);
        for trial in 0..args.trials {
            let (gains, _) = trial_gains(&cfg, args.seed, trial, &schemes, spec.solver)?;
            channels.push((trial, gains.channel));
        }
        let refs: Vec<_> = channels.iter().map(|(t, h)| (*t, h)).collect();
        write_channels(&refs, BufWriter::new(File::create(path)?))?;
    }
    for (i, &a) in schemes.iter().enumerate() {
        for &b in &schemes[i + 1..] {
            if let Some(x) = find_crossover(&result, a, b)? {
                eprintln!("schemes {} and {} cross at {x:.2} dB", a.number(), b.number());
            }
        }
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> anyhow::Result<()> {
    let cfg = args.system.config()?.with_snr(db_to_linear(args.snr_db))?;
    let (gains, _) = trial_gains(&cfg, args.seed, 0, &[Scheme::ZeroForcingComplex], BeamSolver::default())?;
    let demand = DemandVector::random(cfg.users(), cfg.files(), args.seed);
    let library = Library::synthetic(&cfg, args.seed)?;
    let outcome = match args.algorithm {
        AlgorithmKind::Complex => run_delivery_complex(&cfg, &gains.channel, &demand, &library)?,
        AlgorithmKind::Finite => run_delivery_finite(&cfg, &gains.channel, &demand, &library)?,
    };
    if let Some(path) = &args.dump {
        write_transcript(&cfg, &outcome.transcript, BufWriter::new(File::create(path)?))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let report = verify_delivery(&cfg, &library, &outcome.transcript, &outcome.decoded)?;
    println!(
        "{} delivery, demand {}: {} users recovered their files from {} blocks ({} mini-files), max block power {:.6} (snr {:.6}), max symbol error {:.2e}",
        report.algorithm,
        demand,
        report.users,
        report.blocks_checked,
        report.minifiles_checked,
        report.max_block_power,
        cfg.snr(),
        report.max_symbol_error
    );
    Ok(())
}

fn dof_command(args: DofArgs) -> anyhow::Result<()> {
    let cfg = args.system.config()?;
    let scheme = scheme(args.scheme)?;
    let estimate = estimate_dof(&cfg, scheme, args.lo_db, args.hi_db, args.trials, args.seed, args.solver.solver())?;
    let exact = dof(scheme, cfg.users() as u64, cfg.antennas() as u64, cfg.files() as u64, cfg.cache())?;
    println!("{estimate}; closed form {exact}");
    Ok(())
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Sweep(args) => sweep(args),
        Command::Verify(args) => verify(args),
        Command::Dof(args) => dof_command(args),
    }
}
