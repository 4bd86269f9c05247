//! Tableau check of the transversal CNOT between two patches in one stack, and of a
//! circuit with one transmon-mode CNOT removed.
//!
//! ```text
//! cargo run --example transversal_cnot -- natural 5
//! ```

use vqubits::cnot_verify::{omit_one_cnot, verify_circuit, CnotSetup};
use vqubits::layout::Scheme;
use vqubits::schedule::OpKind;

fn main() -> vqubits::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let scheme: Scheme = args.first().map_or("natural", String::as_str).parse()?;
    let d: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(3);

    let setup = CnotSetup::new(scheme, d)?;
    let circuit = setup.circuit()?;
    println!("{} moments, {} transmon-mode CNOTs", circuit.moments.len(), circuit.count(OpKind::CnotTM));
    print!("{}", verify_circuit(&setup, &circuit)?.ensure()?);

    let broken = verify_circuit(&setup, &omit_one_cnot(&circuit, 0)?)?;
    println!("with CNOT 0 removed: {}", if broken.passed() { "passed (unexpected)" } else { "rejected" });
    for m in broken.mismatches.iter().take(3) {
        println!("  {} -> {}", m.generator, m.image);
    }
    Ok(())
}
