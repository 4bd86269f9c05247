//! Builds and audits the syndrome-extraction circuit of every setup.
//!
//! ```text
//! cargo run --example syndrome_schedule -- 5
//! ```

use vqubits::experiments::Setup;
use vqubits::hardware::HardwareParams;
use vqubits::layout::{build_layout, Scheme};
use vqubits::montecarlo::verify_stabilizer_measurements;
use vqubits::schedule::{audit_circuit, compact_slot, natural_slot, syndrome_circuit, OpKind};

fn main() -> vqubits::Result<()> {
    let d: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let hw = HardwareParams::default();
    let compact = build_layout(Scheme::Compact, d, 0)?;
    println!("slot per round: natural {:.2} us, compact {:.2} us", natural_slot(&hw) * 1e6, compact_slot(&compact, &hw)? * 1e6);
    println!("{:<22} {:>7} {:>10} {:>6} {:>6} {:>6} {:>6}", "setup", "moments", "time (us)", "cnot", "cnotTM", "load", "store");
    for setup in Setup::ALL {
        let l = build_layout(setup.scheme, d, 0)?;
        let c = syndrome_circuit(&l, &hw, setup.variant, d)?;
        audit_circuit(&c, &l)?;
        verify_stabilizer_measurements(&c, &l)?;
        println!(
            "{:<22} {:>7} {:>10.2} {:>6} {:>6} {:>6} {:>6}",
            setup.to_string(),
            c.moments.len(),
            c.total_duration * 1e6,
            c.count(OpKind::CnotTT),
            c.count(OpKind::CnotTM),
            c.count(OpKind::Load),
            c.count(OpKind::Store)
        );
    }
    Ok(())
}
