//! One noisy shot: detection events per sector and the matching correction.
//!
//! ```text
//! cargo run --example decode_trial -- compact-all-at-once 5 4e-3 1
//! ```

use vqubits::decoder::{build_matching_graph, extract_events, logical_failure};
use vqubits::experiments::Setup;
use vqubits::hardware::{params_from_p, HardwareParams};
use vqubits::layout::{build_layout, Basis};
use vqubits::montecarlo::simulate_trial;
use vqubits::schedule::syndrome_circuit;

fn main() -> vqubits::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let setup: Setup = args.first().map_or("baseline", String::as_str).parse()?;
    let d: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let p: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(4e-3);
    let seed: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1);

    let hw = params_from_p(p, &HardwareParams::default())?;
    let l = build_layout(setup.scheme, d, 0)?;
    let circ = syndrome_circuit(&l, &hw, setup.variant, d)?;
    let (record, residual) = simulate_trial(&circ, &l, &hw, seed)?;
    for basis in [Basis::Z, Basis::X] {
        let g = build_matching_graph(&l, &circ, &hw, basis)?;
        let events = extract_events(&record, &l, basis);
        let ids: Vec<usize> = events.iter().map(|e| g.detectors.id(e.round, g.detectors.local[e.plaquette].expect("sector check"))).collect();
        let fix = g.decoder().decode(&ids)?;
        let failed = logical_failure(&residual, &fix.data, l.sector_logical_support(basis), basis);
        println!("{basis:?} checks: {} events, correction on data {:?}, logical {}", events.len(), fix.data, if failed { "FAILED" } else { "preserved" });
        for e in events.iter().take(8) {
            println!("  plaquette {} round {}", e.plaquette, e.round);
        }
    }
    Ok(())
}
