//! Layout → circuit → noise → decoder, checked end to end.

use vqubits::decoder::{extract_events, MatchingGraph};
use vqubits::dem::build_error_model;
use vqubits::experiments::Setup;
use vqubits::hardware::{params_from_p, HardwareParams};
use vqubits::layout::{build_layout, Basis};
use vqubits::montecarlo::{trial_rng, verify_stabilizer_measurements, CompiledCircuit};
use vqubits::schedule::{audit_circuit, syndrome_circuit};

fn toggled(graph: &MatchingGraph, edges: &[usize]) -> Vec<usize> {
    let mut hits = vec![false; graph.num_detectors()];
    for &e in edges {
        let edge = &graph.edges[e];
        hits[edge.u] ^= true;
        if let Some(v) = edge.v {
            hits[v] ^= true;
        }
    }
    (0..hits.len()).filter(|&i| hits[i]).collect()
}

#[test]
fn every_setup_builds_and_measures_its_stabilizers() {
    let hw = params_from_p(2e-3, &HardwareParams::default()).unwrap();
    for setup in Setup::ALL {
        for d in [3, 5, 7] {
            let l = build_layout(setup.scheme, d, 0).unwrap();
            let c = syndrome_circuit(&l, &hw, setup.variant, 2).unwrap();
            audit_circuit(&c, &l).unwrap();
            verify_stabilizer_measurements(&c, &l).unwrap();
        }
    }
}

#[test]
fn corrections_annihilate_sampled_events() {
    let hw = params_from_p(5e-3, &HardwareParams::default()).unwrap();
    for setup in Setup::ALL {
        let l = build_layout(setup.scheme, 5, 0).unwrap();
        let circ = syndrome_circuit(&l, &hw, setup.variant, 5).unwrap();
        let c = CompiledCircuit::new(&circ, &l, &hw).unwrap();
        let model = build_error_model(&c, &l).unwrap();
        for basis in [Basis::Z, Basis::X] {
            let g = MatchingGraph::from_model(model.sector(basis));
            let mut dec = g.decoder();
            for trial in 0..40 {
                let (rec, _) = c.simulate(&mut trial_rng(17, trial));
                let mut ev: Vec<usize> = extract_events(&rec, &l, basis)
                    .into_iter()
                    .map(|e| g.detectors.id(e.round, g.detectors.local[e.plaquette].unwrap()))
                    .collect();
                ev.sort_unstable();
                let fix = dec.decode(&ev).unwrap();
                assert_eq!(toggled(&g, &fix.edges), ev, "{setup} {basis:?} trial {trial}");
                let w: i64 = fix.edges.iter().map(|&e| g.integer_weight(e)).sum();
                assert_eq!(dec.matching_weight(&ev).unwrap(), w);
                // Sending every event to its own boundary is a valid alternative when each
                // detector has a boundary edge; it can never beat the optimum.
                let alt: Option<i64> = ev.iter().map(|&u| g.edges.iter().position(|e| e.u == u && e.v.is_none()).map(|e| g.integer_weight(e))).sum();
                if let Some(alt) = alt {
                    assert!(w <= alt);
                }
            }
        }
    }
}

#[test]
fn single_faults_never_fail_at_distance_three() {
    let hw = params_from_p(1e-3, &HardwareParams::default()).unwrap();
    for setup in Setup::ALL {
        let l = build_layout(setup.scheme, 3, 0).unwrap();
        let circ = syndrome_circuit(&l, &hw, setup.variant, 3).unwrap();
        let c = CompiledCircuit::new(&circ, &l, &hw).unwrap();
        let model = build_error_model(&c, &l).unwrap();
        for basis in [Basis::Z, Basis::X] {
            let s = model.sector(basis);
            assert!(s.undetectable_logical.is_empty());
            let g = MatchingGraph::from_model(s);
            let mut dec = g.decoder();
            for m in &s.mechanisms {
                let ev: Vec<usize> = m.dets.iter().map(|&x| x as usize).collect();
                assert_eq!(dec.decode_logical(&ev).unwrap(), m.logical, "{setup} {basis:?} {:?}", m.dets);
            }
        }
    }
}
