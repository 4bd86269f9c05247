//! Threshold scan of one memory setup, printed as CSV with the crossing estimate.
//!
//! ```text
//! cargo run --release --example threshold_sweep -- compact-interleaved 2e-4:2e-3:log5 3,5,7 20000
//! ```

use vqubits::cli::parse_values;
use vqubits::experiments::{estimate_crossing, threshold_sweep, write_csv, ExperimentConfig};

fn main() -> vqubits::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let config = ExperimentConfig {
        setup: arg(0, "baseline").parse()?,
        p_values: parse_values(&arg(1, "2e-3:1.2e-2:log4"))?,
        distances: parse_values(&arg(2, "3,5"))?.into_iter().map(|d| d as usize).collect(),
        trials_per_point: arg(3, "5000").parse().unwrap_or(5000),
        seed: 7,
        ..Default::default()
    };
    let rows = threshold_sweep(&config)?;
    write_csv(&rows, std::io::stdout())?;
    match estimate_crossing(&rows, &[], 200, 1) {
        Ok(c) => eprintln!("crossing {:.4e} (95% CI {:.4e} .. {:.4e}) from pairs {:?}", c.estimate, c.ci_low, c.ci_high, c.pairs),
        Err(e) => eprintln!("{e}"),
    }
    Ok(())
}
