//! Property tests across modules.

use proptest::prelude::*;

use vqubits::experiments::{PointSimulator, ResultRow, Setup, SweepParam};
use vqubits::hardware::{params_from_p, HardwareParams, QubitAddress};
use vqubits::layout::build_layout;
use vqubits::montecarlo::CompiledCircuit;
use vqubits::pauli::{Gate, PauliFrame, PauliOp};
use vqubits::resources::{rate_per_patches, space_per_unit_rate, speedup, Filling, PROTOCOLS};
use vqubits::schedule::syndrome_circuit;
use vqubits::tableau::{CliffordTableau, PauliString};

const N: usize = 6;

fn op(i: u8) -> PauliOp {
    [PauliOp::I, PauliOp::X, PauliOp::Y, PauliOp::Z][i as usize % 4]
}

fn gate_strategy() -> impl Strategy<Value = (u8, usize, usize)> {
    (0u8..3, 0..N, 0..N - 1).prop_map(|(g, a, b)| (g, a, if b >= a { b + 1 } else { b }))
}

proptest! {
    #[test]
    fn frame_matches_tableau(paulis in prop::collection::vec(0u8..4, N), gates in prop::collection::vec(gate_strategy(), 0..40)) {
        let mut frame = PauliFrame::new(N);
        for (q, &p) in paulis.iter().enumerate() {
            frame.apply_pauli(q, op(p)).unwrap();
        }
        let start = PauliString::from_ops(N, paulis.iter().enumerate().map(|(q, &p)| (q, op(p))));
        let mut t = CliffordTableau::identity(N);
        for &(g, a, b) in &gates {
            match g {
                0 => {
                    frame.apply_gate(Gate::H, &[a]).unwrap();
                    t.h(a).unwrap();
                }
                1 => {
                    frame.apply_gate(Gate::Cnot, &[a, b]).unwrap();
                    t.cnot(a, b).unwrap();
                }
                _ => {
                    frame.apply_gate(Gate::Swap, &[a, b]).unwrap();
                    t.swap(a, b).unwrap();
                }
            }
        }
        prop_assert!(t.is_symplectic());
        let image = t.conjugate(&start);
        for q in 0..N {
            prop_assert_eq!(frame.get(q), image.get(q));
        }
    }

    #[test]
    fn speedup_is_transitive(a in 0usize..4, b in 0usize..4, c in 0usize..4, budget in 1.0f64..1e4) {
        let (a, b, c) = (&PROTOCOLS[a], &PROTOCOLS[b], &PROTOCOLS[c]);
        let f = Filling::Fractional;
        let lhs = speedup(a, b, budget, f).unwrap() * speedup(b, c, budget, f).unwrap();
        prop_assert!((lhs - speedup(a, c, budget, f).unwrap()).abs() < 1e-9 * lhs);
    }

    #[test]
    fn rate_is_linear_and_inverts_space(i in 0usize..4, budget in 1.0f64..1e4, s in 0.1f64..10.0) {
        let p = &PROTOCOLS[i];
        let r = rate_per_patches(p, budget, Filling::Fractional).unwrap();
        let rs = rate_per_patches(p, budget * s, Filling::Fractional).unwrap();
        prop_assert!((rs - s * r).abs() < 1e-9 * rs);
        prop_assert!((space_per_unit_rate(p) * r - budget).abs() < 1e-9 * budget);
    }

    #[test]
    fn params_from_p_is_monotone(a in 1e-5f64..2e-2, b in 1e-5f64..2e-2) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let r = HardwareParams::default();
        let (x, y) = (params_from_p(lo, &r).unwrap(), params_from_p(hi, &r).unwrap());
        prop_assert!(x.p_2q_tt <= y.p_2q_tt && x.p_2q_tm <= y.p_2q_tm && x.p_1q <= y.p_1q);
        prop_assert!(x.p_loadstore <= y.p_loadstore && x.p_meas <= y.p_meas);
        prop_assert!(x.t1_transmon >= y.t1_transmon && x.t1_cavity >= y.t1_cavity);
    }

    #[test]
    fn stderr_matches_binomial(failures in 0u64..1000, extra in 0u64..10_000) {
        let trials = failures + extra + 1;
        let row = ResultRow::new(Setup::BASELINE, 3, 10, SweepParam::P, 1e-3, trials, failures, 0);
        let r = failures as f64 / trials as f64;
        prop_assert_eq!(row.logical_error_rate, r);
        prop_assert!((row.stderr - (r * (1.0 - r) / trials as f64).sqrt()).abs() < 1e-15);
    }
}

fn compiled(setup: Setup, d: usize) -> (usize, CompiledCircuit) {
    let l = build_layout(setup.scheme, d, 0).unwrap();
    let hw = params_from_p(1e-3, &HardwareParams::default()).unwrap();
    let c = syndrome_circuit(&l, &hw, setup.variant, 2).unwrap();
    let cc = CompiledCircuit::new(&c, &l, &hw).unwrap();
    (c.moments.len(), cc)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// A Y fault's syndrome is the XOR of the X and Z faults' syndromes.
    #[test]
    fn syndromes_are_linear(s in 0usize..5, moment in 0usize..20, site in 0usize..1000) {
        let (moments, c) = compiled(Setup::ALL[s], 3);
        let moment = moment % (moments + 1);
        let a: QubitAddress = c.sites.sites[site % c.sites.len()];
        let run = |p: PauliOp| c.inject(&[(moment, a, p)]).unwrap();
        let (ry, fy) = run(PauliOp::Y);
        let (rx, fx) = run(PauliOp::X);
        let (rz, fz) = run(PauliOp::Z);
        for ((y, x), z) in ry.outcomes.iter().zip(&rx.outcomes).zip(&rz.outcomes) {
            let xor: Vec<bool> = x.iter().zip(z).map(|(a, b)| a ^ b).collect();
            prop_assert_eq!(y, &xor);
        }
        let mut both = fx.clone();
        both.compose(&fz).unwrap();
        prop_assert_eq!(fy, both);
    }
}

#[test]
fn stderr_halves_when_trials_quadruple() {
    let hw = params_from_p(4e-3, &HardwareParams::default()).unwrap();
    let sim = PointSimulator::new(Setup::BASELINE, 3, &hw, 3).unwrap();
    let n = 4000;
    let small = ResultRow::new(Setup::BASELINE, 3, 10, SweepParam::P, 4e-3, n, sim.run(5, n, Some(1)).unwrap(), 5);
    let large = ResultRow::new(Setup::BASELINE, 3, 10, SweepParam::P, 4e-3, 4 * n, sim.run(6, 4 * n, Some(1)).unwrap(), 6);
    let ratio = small.stderr / large.stderr;
    assert!((1.6..2.4).contains(&ratio), "stderr ratio {ratio}");
}
