//! Decodes every one- and two-fault pattern of a distance-3 memory with matching and
//! with exhaustive maximum-likelihood search, and counts where they disagree.
//!
//! ```text
//! cargo run --release --example decoder_vs_oracle -- natural-interleaved
//! ```

use vqubits::decoder::{MatchingGraph, Oracle};
use vqubits::dem::build_error_model;
use vqubits::experiments::Setup;
use vqubits::hardware::{params_from_p, HardwareParams};
use vqubits::layout::{build_layout, Basis};
use vqubits::montecarlo::CompiledCircuit;
use vqubits::schedule::syndrome_circuit;

fn main() -> vqubits::Result<()> {
    let setup: Setup = std::env::args().nth(1).unwrap_or_else(|| "baseline".into()).parse()?;
    let hw = params_from_p(1e-3, &HardwareParams::default())?;
    let l = build_layout(setup.scheme, 3, 0)?;
    let circ = syndrome_circuit(&l, &hw, setup.variant, 3)?;
    let model = build_error_model(&CompiledCircuit::new(&circ, &l, &hw)?, &l)?;
    for basis in [Basis::Z, Basis::X] {
        let s = model.sector(basis);
        let g = MatchingGraph::from_model(s);
        let mut dec = g.decoder();
        let oracle = Oracle::new(s);
        let (mut pairs, mut both_wrong, mut mwpm_only, mut oracle_only) = (0, 0, 0, 0);
        for i in 0..s.mechanisms.len() {
            for j in i + 1..s.mechanisms.len() {
                let (a, b) = (&s.mechanisms[i], &s.mechanisms[j]);
                let mut t: Vec<u32> = a.dets.iter().chain(&b.dets).copied().collect();
                t.sort_unstable();
                t.dedup_by(|x, y| x == y);
                let target: Vec<u32> = t.into_iter().filter(|x| a.dets.contains(x) != b.dets.contains(x)).collect();
                let actual = a.logical ^ b.logical;
                let ml_ok = oracle.solve(&target, 3).logical() == Some(actual);
                let ev: Vec<usize> = target.iter().map(|&x| x as usize).collect();
                let mwpm_ok = dec.decode_logical(&ev)? == actual;
                pairs += 1;
                match (ml_ok, mwpm_ok) {
                    (false, false) => both_wrong += 1,
                    (true, false) => mwpm_only += 1,
                    (false, true) => oracle_only += 1,
                    _ => {}
                }
            }
        }
        println!(
            "{setup} {basis:?} checks: {} mechanisms, {} graph edges, {pairs} pairs; both wrong {both_wrong}, matching only {mwpm_only}, oracle only {oracle_only}",
            s.mechanisms.len(),
            g.edges.len()
        );
    }
    Ok(())
}
