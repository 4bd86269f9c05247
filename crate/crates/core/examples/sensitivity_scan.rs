//! Sweeps one noise channel of Compact, Interleaved around p = 2e-3.
//!
//! ```text
//! cargo run --release --example sensitivity_scan -- p_loadstore 1e-3,2e-3,4e-3,8e-3 3,5 20000
//! ```

use vqubits::cli::parse_values;
use vqubits::experiments::{sensitivity_sweep, write_csv, ExperimentConfig, SweepParam};

fn main() -> vqubits::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let param: SweepParam = arg(0, "p_2q_tt").parse()?;
    let config = ExperimentConfig {
        setup: "compact-interleaved".parse()?,
        distances: parse_values(&arg(2, "3"))?.into_iter().map(|d| d as usize).collect(),
        trials_per_point: arg(3, "5000").parse().unwrap_or(5000),
        seed: 3,
        ..Default::default()
    };
    let rows = sensitivity_sweep(&config, param, &parse_values(&arg(1, "1e-3:8e-3:log4"))?)?;
    write_csv(&rows, std::io::stdout())
}
