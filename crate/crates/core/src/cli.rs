//! Command-line front end: `layout`, `threshold`, `sensitivity`, `magic`, `verify-cnot`.
//!
//! Exit status is 0 on success, 1 when a verification fails and 2 on usage errors.
//! Sweep flags mirror [`ExperimentConfig`] fields; values from `--config` are read first
//! and flags given on the command line override them.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::cnot_verify::{omit_one_cnot, verify_circuit, CnotSetup};
use crate::error::{Error, Result};
use crate::experiments::{estimate_crossing, fmt_g6, sensitivity_sweep, threshold_sweep, write_csv, ExperimentConfig, Setup, SweepParam};
use crate::hardware::HardwareParams;
use crate::layout::{build_layout, Scheme};
use crate::resources::{Filling, MagicReport};

#[derive(Debug, Parser)]
#[command(name = "vqubits", version, about = "Surface-code memory experiments and resource estimates for transmon + cavity hardware")]
pub struct Cli {
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a patch layout as JSON.
    Layout {
        #[arg(long, default_value = "compact")]
        scheme: String,
        #[arg(long, default_value_t = 3)]
        d: usize,
        /// Cavity mode holding the patch.
        #[arg(long, default_value_t = 0)]
        z: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Logical error rate over a grid of distances and physical error rates.
    Threshold {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Physical error rates: `a,b,c`, `lo:hi:logN` or `lo:hi:linN`.
        #[arg(long)]
        p: Option<String>,
        /// Bootstrap resamples for the crossing estimate (0 skips it).
        #[arg(long, default_value_t = 1000)]
        bootstrap: usize,
    },
    /// Sweep one noise parameter around an operating point.
    Sensitivity {
        #[command(flatten)]
        sweep: SweepArgs,
        /// One of p_2q_tt, p_2q_tm, p_loadstore, t1_cavity, t1_transmon, dur_loadstore, k.
        #[arg(long)]
        param: String,
        /// Values of the swept parameter (same syntax as `--p`).
        #[arg(long)]
        values: String,
        /// Error rate of the operating point.
        #[arg(long)]
        operating_p: Option<f64>,
    },
    /// T-state throughput and qubit-cost table.
    Magic {
        #[arg(long, default_value_t = 100.0)]
        budget: f64,
        #[arg(long, default_value_t = 5)]
        d: usize,
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// Count whole protocol copies only.
        #[arg(long)]
        integer: bool,
        /// Emit JSON instead of a text table.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tableau check of the transversal logical CNOT.
    VerifyCnot {
        #[arg(long, default_value = "natural")]
        scheme: String,
        /// Distances, e.g. `3,5`.
        #[arg(long, default_value = "3")]
        d: String,
        /// Drop this transmon-mode CNOT to see the check fail.
        #[arg(long)]
        omit: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Flags shared by the sweep subcommands.
#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON experiment config; other flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// JSON hardware reference parameters.
    #[arg(long)]
    pub hardware: Option<PathBuf>,
    /// Setup, e.g. `baseline`, `natural-all-at-once`, `compact-interleaved`.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Distances, e.g. `3,5,7`.
    #[arg(long)]
    pub d: Option<String>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Cavity depth.
    #[arg(long)]
    pub k: Option<usize>,
    /// Noisy rounds per trial (default d).
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Pin a parameter, e.g. `--set p_2q_tm=0.01`; repeatable.
    #[arg(long = "set", value_name = "NAME=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl SweepArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path).map_err(to_usage)?,
            None => ExperimentConfig::default(),
        };
        if let Some(path) = &self.hardware {
            c.reference = HardwareParams::from_json_file(path).map_err(to_usage)?;
        }
        if let Some(s) = &self.scheme {
            c.setup = s.parse()?;
        }
        if let Some(d) = &self.d {
            c.distances = parse_list(d)?;
        }
        if let Some(t) = self.trials {
            c.trials_per_point = t;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(k) = self.k {
            c.k = k;
        }
        if self.rounds.is_some() {
            c.rounds = self.rounds;
        }
        if self.workers.is_some() {
            c.workers = self.workers;
        }
        for kv in &self.overrides {
            let (name, value) = kv.split_once('=').ok_or_else(|| Error::usage(format!("--set expects NAME=VALUE, got `{kv}`")))?;
            let param: SweepParam = name.parse()?;
            c.overrides.insert(param.name().to_string(), parse_f64(value)?);
        }
        c.validate()?;
        Ok(c)
    }
}

fn to_usage(e: Error) -> Error {
    match e {
        Error::Io(io) => Error::usage(format!("cannot read config: {io}")),
        other => other,
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::usage(format!("`{s}` is not a number")))
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',').map(|x| x.trim().parse().map_err(|_| Error::usage(format!("cannot parse `{x}` in `{s}`")))).collect()
}

/// Parses `a,b,c`, `lo:hi:logN` (geometric) or `lo:hi:linN` (arithmetic).
pub fn parse_values(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [_] => parse_list(s),
        [lo, hi, grid] => {
            let (lo, hi) = (parse_f64(lo)?, parse_f64(hi)?);
            let (log, n) = if let Some(n) = grid.strip_prefix("log") {
                (true, n)
            } else if let Some(n) = grid.strip_prefix("lin") {
                (false, n)
            } else {
                return Err(Error::usage(format!("range `{s}` must end in logN or linN")));
            };
            let n: usize = n.parse().map_err(|_| Error::usage(format!("bad point count in `{s}`")))?;
            if n == 0 {
                return Err(Error::usage("a range needs at least one point"));
            }
            if log && !(lo > 0.0 && hi > 0.0) {
                return Err(Error::usage("log ranges need positive endpoints"));
            }
            if n == 1 {
                return Ok(vec![lo]);
            }
            Ok((0..n)
                .map(|i| {
                    let t = i as f64 / (n - 1) as f64;
                    if i == n - 1 {
                        hi
                    } else if log {
                        lo * (hi / lo).powf(t)
                    } else {
                        lo + (hi - lo) * t
                    }
                })
                .collect())
        }
        _ => Err(Error::usage(format!("cannot parse value list `{s}`"))),
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Error::usage(format!("cannot write {}: {e}", p.display())))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Layout { scheme, d, z, out } => {
            let l = build_layout(scheme.parse::<Scheme>()?, d, z)?;
            let mut w = output(&out)?;
            writeln!(w, "{}", l.to_json()?)?;
        }
        Command::Threshold { sweep, p, bootstrap } => {
            let mut c = sweep.config()?;
            if let Some(p) = p {
                c.p_values = parse_values(&p)?;
            }
            c.validate()?;
            let rows = threshold_sweep(&c)?;
            write_csv(&rows, output(&sweep.out)?)?;
            if bootstrap > 0 && c.distances.len() > 1 {
                match estimate_crossing(&rows, &[], bootstrap, c.seed) {
                    Ok(x) => eprintln!("{}: crossing {} (95% CI {} .. {})", c.setup, fmt_g6(x.estimate), fmt_g6(x.ci_low), fmt_g6(x.ci_high)),
                    Err(e) => eprintln!("{}: {e}", c.setup),
                }
            }
        }
        Command::Sensitivity { sweep, param, values, operating_p } => {
            let mut c = sweep.config()?;
            if sweep.scheme.is_none() && sweep.config.is_none() {
                c.setup = Setup::ALL[4];
            }
            if let Some(p) = operating_p {
                c.operating_p = p;
            }
            let rows = sensitivity_sweep(&c, param.parse()?, &parse_values(&values)?)?;
            write_csv(&rows, output(&sweep.out)?)?;
        }
        Command::Magic { budget, d, k, integer, json, out } => {
            let r = MagicReport::new(budget, d, k, if integer { Filling::Integer } else { Filling::Fractional })?;
            let mut w = output(&out)?;
            if json {
                writeln!(w, "{}", serde_json::to_string_pretty(&r)?)?;
            } else {
                write!(w, "{r}")?;
            }
        }
        Command::VerifyCnot { scheme, d, omit, out } => {
            let scheme: Scheme = scheme.parse()?;
            let mut w = output(&out)?;
            let mut failed = Vec::new();
            for d in parse_list::<usize>(&d)? {
                let setup = CnotSetup::new(scheme, d)?;
                let mut circuit = setup.circuit()?;
                if let Some(i) = omit {
                    circuit = omit_one_cnot(&circuit, i)?;
                }
                let report = verify_circuit(&setup, &circuit)?;
                write!(w, "{report}")?;
                if !report.passed() {
                    failed.push(d);
                }
            }
            w.flush()?;
            if !failed.is_empty() {
                return Err(Error::Verification(format!("transversal CNOT check failed for d = {failed:?}")));
            }
        }
    }
    Ok(())
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Verification(_) => 1,
        _ => 2,
    }
}

/// Parses `argv`, runs the subcommand and returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if cli.verbose {
        env_logger::Builder::new().filter_level(log::LevelFilter::Info).init();
    } else {
        let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    }
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_ranges() {
        assert_eq!(parse_values("1,2.5").unwrap(), vec![1.0, 2.5]);
        let v = parse_values("1e-3:1e-2:log8").unwrap();
        assert_eq!(v.len(), 8);
        assert_eq!((v[0], v[7]), (1e-3, 1e-2));
        assert!((v[1] / v[0] - v[2] / v[1]).abs() < 1e-12);
        assert_eq!(parse_values("0:1:lin3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_values("0:1:log3").is_err());
        assert!(parse_values("1:2:geo3").is_err());
        assert!(parse_values("a,b").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["vqubits", "magic", "--budget", "100"]), 0);
        assert_eq!(run(["vqubits", "verify-cnot", "--d", "3", "--scheme", "natural"]), 0);
        assert_eq!(run(["vqubits", "verify-cnot", "--d", "3", "--omit", "0"]), 1);
        assert_eq!(run(["vqubits", "frobnicate"]), 2);
        assert_eq!(run(["vqubits", "layout", "--d", "4"]), 2);
        assert_eq!(run(["vqubits", "threshold", "--p", "1:2:geo3"]), 2);
        assert_eq!(run(["vqubits", "sensitivity", "--param", "p_magic", "--values", "1"]), 2);
    }
}
