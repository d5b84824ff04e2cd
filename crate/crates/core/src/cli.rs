//! Command-line front end: single runs, sweeps and the frame tool.
//!
//! Exit codes: 0 success, 2 configuration or malformed input, 3 the protocol
//! did not complete, 4 frame parity or length error.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::codec::{decode, encode, CodecError, Frame, Packet};
use crate::config::ScenarioConfig;
use crate::experiments::{run_aggregation_sweep, run_sweep, SweepSpec};
use crate::report::{write_clusters, write_events, write_rows, ResultRow};
use crate::scenario::run_scenario;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_INCOMPLETE: u8 = 3;
pub const EXIT_FRAME: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "swarmlink",
    version,
    about = "Deterministic microrobot swarm simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and write events.csv, metrics.csv, clusters.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Replaces the seed from the config file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        quiet: bool,
    },
    /// Run the cross product of swarm sizes and seeds into one CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated swarm sizes.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        sweep_n: Vec<usize>,
        /// Comma-separated seeds.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        sweep_seeds: Vec<u64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        quiet: bool,
    },
    /// Encode four decimal fields or decode an 8-digit hex frame.
    Frame {
        #[command(subcommand)]
        mode: FrameMode,
    },
}

#[derive(Debug, Subcommand)]
pub enum FrameMode {
    Encode {
        pkg_id: String,
        sender: String,
        receiver: String,
        payload: String,
    },
    Decode {
        hex: String,
    },
}

/// Parses `args` and runs the command, writing diagnostics to `err`.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    match cli.command {
        Command::Run {
            config,
            out: dir,
            seed,
            quiet,
        } => cmd_run(&config, &dir, seed, quiet, out, err),
        Command::Sweep {
            config,
            sweep_n,
            sweep_seeds,
            out: dir,
            quiet,
        } => cmd_sweep(&config, sweep_n, sweep_seeds, &dir, quiet, out, err),
        Command::Frame { mode } => cmd_frame(mode, out, err),
    }
}

pub fn main() -> ExitCode {
    let mut out = io::stdout().lock();
    let mut err = io::stderr().lock();
    ExitCode::from(main_with(std::env::args_os(), &mut out, &mut err))
}

fn load(path: &Path, err: &mut dyn Write) -> Option<ScenarioConfig> {
    match ScenarioConfig::load(path).and_then(|c| c.validate().map(|()| c)) {
        Ok(c) => Some(c),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            None
        }
    }
}

fn create(dir: &Path, name: &str) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn cmd_run(
    config: &Path,
    dir: &Path,
    seed: Option<u64>,
    quiet: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> u8 {
    let Some(mut cfg) = load(config, err) else {
        return EXIT_CONFIG;
    };
    if let Some(s) = seed {
        cfg = cfg.with_seed(s);
    }
    let run = match run_scenario(&cfg) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    let rows: Vec<ResultRow> = run
        .metrics
        .iter()
        .map(|(metric, value)| ResultRow {
            scenario: run.protocol.to_string(),
            n: run.n,
            seed: run.seed,
            metric: metric.clone(),
            value: value.clone(),
        })
        .collect();
    let written = (|| -> Result<(), Box<dyn std::error::Error>> {
        fs::create_dir_all(dir)?;
        write_events(create(dir, "events.csv")?, run.protocol, &run.events)?;
        write_rows(create(dir, "metrics.csv")?, &rows)?;
        write_clusters(create(dir, "clusters.csv")?, &run.clusters)?;
        fs::write(dir.join("resolved_config"), cfg.to_toml())?;
        Ok(())
    })();
    if let Err(e) = written {
        let _ = writeln!(err, "error: writing {}: {e}", dir.display());
        return EXIT_CONFIG;
    }
    if !quiet {
        for r in &rows {
            let _ = writeln!(out, "{} = {}", r.metric, r.value);
        }
    }
    match run.incomplete {
        Some(reason) => {
            let _ = writeln!(err, "incomplete run: {reason}");
            EXIT_INCOMPLETE
        }
        None => EXIT_OK,
    }
}

fn cmd_sweep(
    config: &Path,
    n_values: Vec<usize>,
    seeds: Vec<u64>,
    dir: &Path,
    quiet: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> u8 {
    let Some(cfg) = load(config, err) else {
        return EXIT_CONFIG;
    };
    let aggregation = cfg.protocol.name() == "aggregation";
    let spec = SweepSpec::new(cfg, n_values, seeds);
    let result = if aggregation {
        run_aggregation_sweep(&spec)
    } else {
        run_sweep(&spec)
    };
    let result = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    let written = fs::create_dir_all(dir)
        .map_err(|e| e.to_string())
        .and_then(|()| create(dir, "sweep.csv").map_err(|e| e.to_string()))
        .and_then(|f| result.write_csv(f).map_err(|e| e.to_string()));
    if let Err(e) = written {
        let _ = writeln!(err, "error: writing {}: {e}", dir.display());
        return EXIT_CONFIG;
    }
    let cells = spec.n_values.len() * spec.seeds.len();
    let failed = result
        .failures()
        .map(|r| (r.n, r.seed))
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    if !quiet {
        let _ = writeln!(
            out,
            "{cells} cells, {failed} failed, {} rows",
            result.rows.len()
        );
    }
    if failed == cells {
        let _ = writeln!(err, "every cell failed");
        return EXIT_INCOMPLETE;
    }
    EXIT_OK
}

fn field<T: std::str::FromStr>(name: &str, text: &str) -> Result<T, String> {
    text.parse()
        .map_err(|_| format!("{name} must be a decimal integer, got {text:?}"))
}

fn cmd_frame(mode: FrameMode, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    match mode {
        FrameMode::Encode {
            pkg_id,
            sender,
            receiver,
            payload,
        } => {
            let parsed = (|| -> Result<Packet, String> {
                Ok(Packet {
                    pkg_id: field("pkg_id", &pkg_id)?,
                    sender: field("sender", &sender)?,
                    receiver: field("receiver", &receiver)?,
                    payload: field("payload", &payload)?,
                })
            })();
            let frame = parsed.and_then(|p| encode(&p).map_err(|e| e.to_string()));
            match frame {
                Ok(f) => {
                    let _ = writeln!(out, "{}", f.to_hex());
                    EXIT_OK
                }
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    EXIT_CONFIG
                }
            }
        }
        FrameMode::Decode { hex } => match Frame::from_hex(&hex).and_then(decode) {
            Ok(p) => {
                let _ = writeln!(
                    out,
                    "pkg_id={} sender={} receiver={} payload={}",
                    p.pkg_id, p.sender, p.receiver, p.payload
                );
                EXIT_OK
            }
            Err(e @ (CodecError::Parity { .. } | CodecError::Length(_))) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_FRAME
            }
            // well-formed hex of the wrong width is a length error
            Err(e @ CodecError::Hex(_))
                if !hex.is_empty() && hex.chars().all(|c| c.is_ascii_hexdigit()) =>
            {
                let _ = writeln!(err, "error: {e}");
                EXIT_FRAME
            }
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_CONFIG
            }
        },
    }
}
