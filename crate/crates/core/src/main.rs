use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use irsma::bundle::{read_cdf, read_summary, report_table, write_bundle};
use irsma::config::{apply_overrides, parse_config};
use irsma::montecarlo::{run_campaign, run_campaign_with_workers, SimConfig};
use irsma::{Error, Result};

/// Monte-Carlo comparison of TDMA, FDMA and NOMA with and without an IRS.
#[derive(Debug, Parser)]
#[command(name = "irsma", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a campaign and write the results bundle.
    Run {
        /// Configuration file (`key = value` lines); defaults apply when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory.
        #[arg(long, default_value = "results")]
        out: PathBuf,
        #[arg(long)]
        drops: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of users K.
        #[arg(long)]
        users: Option<usize>,
        /// Comma-separated scheme list, e.g. `tdma_irs,noma_irs`.
        #[arg(long)]
        schemes: Option<String>,
        /// Override any config key; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Print the percentile table of a results directory.
    Report {
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Print the stored CDF of one scheme as CSV.
    Cdf {
        #[arg(long, default_value = "results")]
        out: PathBuf,
        scheme: String,
    },
}

fn load_config(
    path: Option<&PathBuf>,
    drops: Option<usize>,
    seed: Option<u64>,
    users: Option<usize>,
    schemes: Option<&str>,
    set: &[String],
) -> Result<SimConfig> {
    let cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io { path: p.clone(), source: e })?;
            parse_config(&text)?
        }
        None => SimConfig::default(),
    };
    let drops = drops.map(|v| v.to_string());
    let seed = seed.map(|v| v.to_string());
    let users = users.map(|v| v.to_string());
    let mut overrides: Vec<(&str, &str)> = Vec::new();
    for (k, v) in [("drops", &drops), ("seed", &seed), ("users", &users)] {
        if let Some(v) = v {
            overrides.push((k, v));
        }
    }
    if let Some(s) = schemes {
        overrides.push(("schemes", s));
    }
    for kv in set {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config {
            line: None,
            key: kv.clone(),
            message: "expected KEY=VALUE".into(),
        })?;
        overrides.push((k, v));
    }
    apply_overrides(cfg, overrides)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, out, drops, seed, users, schemes, set, workers } => {
            let cfg = load_config(config.as_ref(), drops, seed, users, schemes.as_deref(), &set)?;
            let result = if workers == 0 {
                run_campaign(&cfg)?
            } else {
                run_campaign_with_workers(&cfg, workers)?
            };
            let summary = write_bundle(&result, &out)?;
            print!("{}", report_table(&summary));
            eprintln!("results written to {}", out.display());
        }
        Command::Report { out } => print!("{}", report_table(&read_summary(&out)?)),
        Command::Cdf { out, scheme } => print!("{}", read_cdf(&out, &scheme)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}
