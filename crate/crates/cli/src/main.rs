use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;

use faultlab::harness::Profile;
use faultlab::{
    read_records, run_experiment, summarize, EncodingContext, Error, ExperimentConfig, LimbChain, RecordWriter,
};

#[derive(Parser)]
#[command(name = "faultlab", version, about = "Single-bit fault injection for a CKKS client pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a TOML config and write one CSV row per trial.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Seed grid preset (ci: 4×4, paper: 100×25); overrides the config.
        #[arg(long)]
        profile: Option<String>,
        /// Output CSV; overrides `out` in the config. `-` writes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads, 0 for all cores.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Skip the summary table.
        #[arg(long)]
        quiet: bool,
    },
    /// Print category shares and robust-bit counts of a results CSV.
    Summarize {
        #[arg(long = "in")]
        results: PathBuf,
    },
    /// Predicted decode error of flipping bit `bit` of coefficient `coeff`.
    Predict {
        #[arg(long = "N")]
        ring_degree: usize,
        /// Scaling factor, as `2^k` or a power of two.
        #[arg(long = "delta", value_parser = parse_delta)]
        delta_log2: u32,
        #[arg(long)]
        coeff: usize,
        #[arg(long)]
        bit: u32,
        /// Defaults to N/2.
        #[arg(long)]
        slots: Option<usize>,
        /// With `--limbs`, also report the CRT error of a flip in `--limb`.
        #[arg(long = "q0-bits", default_value_t = 60)]
        q0_bits: u32,
        #[arg(long)]
        limbs: Option<usize>,
        #[arg(long, default_value_t = 0)]
        limb: usize,
    },
}

fn parse_delta(s: &str) -> Result<u32, String> {
    if let Some(k) = s.strip_prefix("2^") {
        return k.parse().map_err(|_| format!("bad exponent in {s:?}"));
    }
    match s.parse::<u128>() {
        Ok(v) if v.is_power_of_two() => Ok(v.trailing_zeros()),
        _ => Err(format!("{s:?} is not a power of two")),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Argument(_) | Error::Parameter(_) | Error::Capacity(_) => 2,
        Error::Trial { .. } => 3,
        _ => 1,
    }
}

fn run(
    config: PathBuf,
    profile: Option<String>,
    out: Option<PathBuf>,
    workers: usize,
    quiet: bool,
) -> Result<(), Error> {
    let mut cfg = ExperimentConfig::from_file(&config)?;
    if let Some(p) = profile {
        cfg.apply_profile(p.parse::<Profile>()?);
    }
    if out.is_some() {
        cfg.out = out;
    }
    let sink: Box<dyn Write> = match &cfg.out {
        Some(p) if p.as_os_str() != "-" => Box::new(BufWriter::new(File::create(p)?)),
        _ => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let mut writer = RecordWriter::new(sink);
    let mut records = Vec::new();
    let stats = run_experiment(&cfg, workers, |r| {
        writer.write(r)?;
        if !quiet {
            records.push(r.clone());
        }
        Ok(())
    })?;
    writer.flush()?;
    if !quiet {
        eprintln!("{}", summarize(&records));
        eprintln!(
            "{} seed pairs, {} trials, {} audited",
            stats.seed_pairs, stats.trials, stats.audits
        );
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn predict(
    ring_degree: usize,
    delta_log2: u32,
    coeff: usize,
    bit: u32,
    slots: Option<usize>,
    q0_bits: u32,
    limbs: Option<usize>,
    limb: usize,
) -> Result<(), Error> {
    let enc = EncodingContext::new(ring_degree, slots.unwrap_or(ring_degree / 2), delta_log2)?;
    if coeff >= ring_degree {
        return Err(Error::Argument(format!("coefficient {coeff} out of range for N = {ring_degree}")));
    }
    println!("gap {}", enc.gap());
    println!("read_by_decoder {}", enc.is_used(coeff));
    println!("predicted_l2 {:e}", enc.predict_l2_norm(coeff, bit));
    if let Some(l) = limbs {
        let chain = LimbChain::build_chain(q0_bits, l, ring_degree)?;
        let err = chain.predict_rns_error(&(BigInt::from(1u8) << bit), limb)?;
        println!("rns_error_bits {}", err.bits());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            profile,
            out,
            workers,
            quiet,
        } => run(config, profile, out, workers, quiet),
        Command::Summarize { results } => File::open(&results)
            .map_err(Error::from)
            .and_then(read_records)
            .map(|rs| println!("{}", summarize(&rs))),
        Command::Predict {
            ring_degree,
            delta_log2,
            coeff,
            bit,
            slots,
            q0_bits,
            limbs,
            limb,
        } => predict(ring_degree, delta_log2, coeff, bit, slots, q0_bits, limbs, limb),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("faultlab: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
