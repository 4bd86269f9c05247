//! T-state factory throughput, qubit costs and logical-operation latencies.
//!
//! ```text
//! cargo run --example magic_states -- 100
//! ```

use vqubits::resources::{cnot_latency, stack_capacity, CnotKind, Filling, MagicReport, FIFTEEN_TO_ONE};

fn main() -> vqubits::Result<()> {
    let budget: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100.0);
    print!("{}", MagicReport::new(budget, 5, 10, Filling::Fractional)?);
    let whole = MagicReport::new(budget, 5, 10, Filling::Integer)?;
    println!("whole copies only: {:.3}x vs Fast, {:.3}x vs Small", whole.speedup_vs_fast, whole.speedup_vs_small);
    println!(
        "15-to-1 circuit: {} initializations, {} measurements, {} CNOTs",
        FIFTEEN_TO_ONE.initializations, FIFTEEN_TO_ONE.measurements, FIFTEEN_TO_ONE.cnots
    );
    for kind in [CnotKind::LatticeSurgery, CnotKind::TransversalSameStack, CnotKind::TransversalWithMove { back: false }, CnotKind::TransversalWithMove { back: true }] {
        println!("{kind:?}: {} timesteps", cnot_latency(kind));
    }
    println!("logical qubits per k=10 stack with a free move mode: {}", stack_capacity(10, true));
    Ok(())
}
