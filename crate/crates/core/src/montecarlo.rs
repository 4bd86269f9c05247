//! Pauli-frame sampling of noisy syndrome circuits.
//!
//! A [`Circuit`] is compiled once into a flat instruction list over dense site indices.
//! Gate noise follows each gate; idle decay accumulated by a site between two gates is
//! folded into a single depolarizing channel applied right before the next gate touches
//! it. Composing channels that each put `λᵢ/3` on X, Y and Z gives another channel of the
//! same form, with `1 − 4λ/3 = Π(1 − 4λᵢ/3)`, so the fold is exact.
//!
//! Liveness: data are always live wherever they sit. An ancilla transmon is live from its
//! first gate until its measurement; an emptied transmon or mode is clean and does not
//! decay. Load and store move the frame bits and leave the source clean.

use std::collections::HashMap;

use rand::{Rng, RngCore};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardware::{HardwareParams, QubitAddress};
use crate::layout::PatchLayout;
use crate::pauli::{get_bit, PauliFrame, PauliOp};
use crate::schedule::{Circuit, OpKind};

/// Dense numbering of the hardware locations a circuit touches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteIndex {
    pub sites: Vec<QubitAddress>,
    map: HashMap<QubitAddress, usize>,
}

impl SiteIndex {
    /// Layout sites first, then any further operands of `circuit` in order of appearance.
    pub fn new(layout: &PatchLayout, circuit: &Circuit) -> Self {
        let mut idx = Self { sites: Vec::new(), map: HashMap::new() };
        for a in layout.sites() {
            idx.insert(a);
        }
        for op in circuit.ops() {
            for &a in &op.operands {
                idx.insert(a);
            }
        }
        idx
    }

    fn insert(&mut self, a: QubitAddress) -> usize {
        if let Some(&i) = self.map.get(&a) {
            return i;
        }
        self.sites.push(a);
        self.map.insert(a, self.sites.len() - 1);
        self.sites.len() - 1
    }

    pub fn get(&self, a: &QubitAddress) -> Option<usize> {
        self.map.get(a).copied()
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
}

fn threshold(p: f64) -> u64 {
    if p <= 0.0 {
        0
    } else if p >= 1.0 {
        u64::MAX
    } else {
        (p * 18446744073709551616.0) as u64
    }
}

/// Compiled instruction. Noise variants carry their probability and a `u64` threshold
/// for fast Bernoulli draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Instr {
    H(u32),
    Cnot(u32, u32),
    /// `dst ← src`, `src ← clean`.
    Move { src: u32, dst: u32 },
    /// Records the X bit of `q` into `slot`, then resets `q`.
    Measure { q: u32, slot: u32 },
    Reset(u32),
    /// X, Y, Z each with probability `p/3`.
    Depol1 { q: u32, p: f64, thr: u64 },
    /// Each of the 15 non-identity two-qubit Paulis with probability `p/15`.
    Depol2 { a: u32, b: u32, p: f64, thr: u64 },
    /// Classical flip of a recorded outcome.
    MeasFlip { slot: u32, p: f64, thr: u64 },
}

/// Flat, noise-annotated form of a circuit on one layout.
#[derive(Debug, Clone)]
pub struct CompiledCircuit {
    pub(crate) instrs: Vec<Instr>,
    pub sites: SiteIndex,
    /// Instruction index at which each moment starts.
    pub(crate) moment_start: Vec<usize>,
    /// Site of each data qubit at the end of the circuit.
    pub(crate) data_sites: Vec<usize>,
    pub rounds: usize,
    pub num_plaquettes: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Live {
    Clean,
    Busy,
}

impl CompiledCircuit {
    /// Compiles `circuit` with the noise of `hw`.
    pub fn new(circuit: &Circuit, layout: &PatchLayout, hw: &HardwareParams) -> Result<Self> {
        hw.validate()?;
        let sites = SiteIndex::new(layout, circuit);
        let n = sites.len();
        let mut live = vec![Live::Clean; n];
        let mut is_mode = vec![false; n];
        for (i, a) in sites.sites.iter().enumerate() {
            is_mode[i] = a.is_mode();
        }
        let mut data_at: Vec<Option<usize>> = vec![None; n];
        for (q, home) in layout.data_qubits.iter().enumerate() {
            let s = sites.get(home).expect("layout site");
            live[s] = Live::Busy;
            data_at[s] = Some(q);
        }
        // Pending idle fidelity `Π(1 − 4λ/3)` per site.
        let mut pending = vec![1.0f64; n];
        let mut instrs = Vec::new();
        let mut moment_start = Vec::with_capacity(circuit.moments.len());
        let np = circuit.num_plaquettes;

        let flush = |s: usize, pending: &mut [f64], instrs: &mut Vec<Instr>| {
            let f = pending[s];
            if f < 1.0 {
                let p = (0.75 * (1.0 - f)).clamp(0.0, 0.75);
                if p > 0.0 {
                    instrs.push(Instr::Depol1 { q: s as u32, p, thr: threshold(p) });
                }
            }
            pending[s] = 1.0;
        };
        let push1 = |instrs: &mut Vec<Instr>, q: usize, p: f64| {
            if p > 0.0 {
                instrs.push(Instr::Depol1 { q: q as u32, p, thr: threshold(p) });
            }
        };

        let mut engaged = vec![0.0f64; n];
        let mut touched: Vec<usize> = Vec::new();
        for (mi, moment) in circuit.moments.iter().enumerate() {
            moment_start.push(instrs.len());
            for &s in &touched {
                engaged[s] = 0.0;
            }
            touched.clear();
            for op in &moment.ops {
                if op.kind == OpKind::Idle {
                    continue;
                }
                let mut ix = Vec::with_capacity(op.operands.len());
                for a in &op.operands {
                    let s = sites.get(a).ok_or_else(|| Error::usage(format!("moment {mi}: unknown qubit {a}")))?;
                    ix.push(s);
                }
                for &s in &ix {
                    flush(s, &mut pending, &mut instrs);
                    engaged[s] = engaged[s].max(op.duration);
                    touched.push(s);
                }
                match op.kind {
                    OpKind::H => {
                        instrs.push(Instr::H(ix[0] as u32));
                        push1(&mut instrs, ix[0], hw.p_1q);
                        live[ix[0]] = Live::Busy;
                    }
                    OpKind::CnotTT | OpKind::CnotTM => {
                        let p = if op.kind == OpKind::CnotTT { hw.p_2q_tt } else { hw.p_2q_tm };
                        instrs.push(Instr::Cnot(ix[0] as u32, ix[1] as u32));
                        if p > 0.0 {
                            instrs.push(Instr::Depol2 { a: ix[0] as u32, b: ix[1] as u32, p, thr: threshold(p) });
                        }
                        live[ix[0]] = Live::Busy;
                        live[ix[1]] = Live::Busy;
                    }
                    OpKind::Load | OpKind::Store => {
                        let (t, m) = if op.operands[0].is_transmon() { (ix[0], ix[1]) } else { (ix[1], ix[0]) };
                        let (src, dst) = if op.kind == OpKind::Load { (m, t) } else { (t, m) };
                        instrs.push(Instr::Move { src: src as u32, dst: dst as u32 });
                        push1(&mut instrs, dst, hw.p_loadstore);
                        live[dst] = live[src];
                        live[src] = Live::Clean;
                        data_at[dst] = data_at[src].take();
                    }
                    OpKind::Measure => {
                        let tag = op.tag.ok_or_else(|| Error::usage("measurement without plaquette tag"))?;
                        let slot = (tag.round * np + tag.plaquette) as u32;
                        instrs.push(Instr::Measure { q: ix[0] as u32, slot });
                        if hw.p_meas > 0.0 {
                            instrs.push(Instr::MeasFlip { slot, p: hw.p_meas, thr: threshold(hw.p_meas) });
                        }
                        live[ix[0]] = Live::Clean;
                    }
                    OpKind::Reset => {
                        instrs.push(Instr::Reset(ix[0] as u32));
                        live[ix[0]] = Live::Clean;
                    }
                    OpKind::Idle => unreachable!(),
                }
            }
            let dt_moment = moment.duration;
            for s in 0..n {
                if live[s] == Live::Busy {
                    let dt = (dt_moment - engaged[s]).max(0.0);
                    if dt > 0.0 {
                        let lam = if is_mode[s] { hw.cavity_idle(dt) } else { hw.transmon_idle(dt) };
                        pending[s] *= 1.0 - 4.0 * lam / 3.0;
                    }
                }
            }
        }
        for s in 0..n {
            if live[s] == Live::Busy {
                flush(s, &mut pending, &mut instrs);
            }
        }
        let mut data_sites = vec![usize::MAX; layout.num_data()];
        for (s, q) in data_at.iter().enumerate() {
            if let Some(q) = *q {
                data_sites[q] = s;
            }
        }
        Ok(Self { instrs, sites, moment_start, data_sites, rounds: circuit.rounds, num_plaquettes: np })
    }

    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn num_measurements(&self) -> usize {
        self.rounds * self.num_plaquettes
    }

    pub fn num_instructions(&self) -> usize {
        self.instrs.len()
    }

    /// Number of noise locations with non-zero probability.
    pub fn num_noise_locations(&self) -> usize {
        self.instrs
            .iter()
            .filter(|i| matches!(i, Instr::Depol1 { .. } | Instr::Depol2 { .. } | Instr::MeasFlip { .. }))
            .count()
    }

    /// Runs one shot into `scratch`; `noisy = false` skips all noise instructions.
    /// `inject = (instruction, site, pauli)` applies a Pauli just before that instruction.
    pub(crate) fn run<R: RngCore>(&self, scratch: &mut Scratch, rng: &mut R, noisy: bool, inject: Option<(usize, usize, PauliOp)>) {
        scratch.frame.clear();
        scratch.meas.fill(0);
        let frame = &mut scratch.frame;
        let meas = &mut scratch.meas;
        let inject_at = inject.map(|(i, _, _)| i);
        for (i, ins) in self.instrs.iter().enumerate() {
            if inject_at == Some(i) {
                let (_, q, op) = inject.expect("set");
                frame.apply_pauli_unchecked(q, op);
            }
            match *ins {
                Instr::H(q) => frame.h(q as usize),
                Instr::Cnot(c, t) => frame.cnot(c as usize, t as usize),
                Instr::Move { src, dst } => {
                    frame.swap(src as usize, dst as usize);
                    frame.reset_qubit(src as usize);
                }
                Instr::Measure { q, slot } => {
                    if frame.x(q as usize) {
                        meas[slot as usize >> 6] ^= 1 << (slot & 63);
                    }
                    frame.reset_qubit(q as usize);
                }
                Instr::Reset(q) => frame.reset_qubit(q as usize),
                Instr::Depol1 { q, thr, .. } => {
                    if noisy && rng.next_u64() < thr {
                        let op = PauliOp::NON_IDENTITY[rng.random_range(0..3)];
                        frame.apply_pauli_unchecked(q as usize, op);
                    }
                }
                Instr::Depol2 { a, b, thr, .. } => {
                    if noisy && rng.next_u64() < thr {
                        let k: usize = rng.random_range(1..16);
                        frame.apply_pauli_unchecked(a as usize, PauliOp::ALL[k >> 2]);
                        frame.apply_pauli_unchecked(b as usize, PauliOp::ALL[k & 3]);
                    }
                }
                Instr::MeasFlip { slot, thr, .. } => {
                    if noisy && rng.next_u64() < thr {
                        meas[slot as usize >> 6] ^= 1 << (slot & 63);
                    }
                }
            }
        }
        if inject_at == Some(self.instrs.len()) {
            let (_, q, op) = inject.expect("set");
            frame.apply_pauli_unchecked(q, op);
        }
    }

    pub(crate) fn scratch(&self) -> Scratch {
        Scratch { frame: PauliFrame::new(self.num_sites()), meas: vec![0; self.num_measurements().div_ceil(64).max(1)] }
    }

    /// Residual on data qubits after a run, indexed like the layout.
    pub(crate) fn residual(&self, scratch: &Scratch) -> PauliFrame {
        let mut r = PauliFrame::new(self.data_sites.len());
        for (q, &s) in self.data_sites.iter().enumerate() {
            r.apply_pauli_unchecked(q, scratch.frame.get(s));
        }
        r
    }

    pub(crate) fn record(&self, scratch: &Scratch, residual: &PauliFrame) -> SyndromeRecord {
        let np = self.num_plaquettes;
        let outcomes = (0..self.rounds)
            .map(|r| (0..np).map(|k| get_bit(&scratch.meas, r * np + k)).collect())
            .collect();
        let nd = residual.len();
        SyndromeRecord {
            rounds: self.rounds,
            num_plaquettes: np,
            outcomes,
            final_x: (0..nd).map(|q| residual.x(q)).collect(),
            final_z: (0..nd).map(|q| residual.z(q)).collect(),
        }
    }
}

/// Reusable per-worker buffers.
#[derive(Debug, Clone)]
pub(crate) struct Scratch {
    pub(crate) frame: PauliFrame,
    pub(crate) meas: Vec<u64>,
}

/// Measured outcomes of one shot plus a perfect final readout of the data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeRecord {
    pub rounds: usize,
    pub num_plaquettes: usize,
    /// `outcomes[round][plaquette]`.
    pub outcomes: Vec<Vec<bool>>,
    /// X component of the final data error, as a Z-basis readout would see it.
    pub final_x: Vec<bool>,
    /// Z component of the final data error, as an X-basis readout would see it.
    pub final_z: Vec<bool>,
}

/// Per-trial generator: stream `trial` of a ChaCha8 keyed by `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// One noisy shot of `circuit`, reproducible from `seed`.
pub fn simulate_trial(circuit: &Circuit, layout: &PatchLayout, hw: &HardwareParams, seed: u64) -> Result<(SyndromeRecord, PauliFrame)> {
    let c = CompiledCircuit::new(circuit, layout, hw)?;
    Ok(c.simulate(&mut trial_rng(seed, 0)))
}

/// Noiseless run with a single Pauli applied at the start of moment `error.0`.
pub fn inject_deterministic(circuit: &Circuit, layout: &PatchLayout, error: Option<(usize, QubitAddress, PauliOp)>) -> Result<(SyndromeRecord, PauliFrame)> {
    let c = CompiledCircuit::new(circuit, layout, &HardwareParams::default())?;
    let errs: Vec<_> = error.into_iter().collect();
    c.inject(&errs)
}

impl CompiledCircuit {
    pub fn simulate<R: RngCore>(&self, rng: &mut R) -> (SyndromeRecord, PauliFrame) {
        let mut s = self.scratch();
        self.run(&mut s, rng, true, None);
        let res = self.residual(&s);
        (self.record(&s, &res), res)
    }

    /// Noiseless run with Paulis applied at moment starts (`moment == moments` means the end).
    pub fn inject(&self, errors: &[(usize, QubitAddress, PauliOp)]) -> Result<(SyndromeRecord, PauliFrame)> {
        let mut resolved = Vec::with_capacity(errors.len());
        for &(m, a, op) in errors {
            if m > self.moment_start.len() {
                return Err(Error::usage(format!("moment {m} out of range")));
            }
            let q = self.sites.get(&a).ok_or_else(|| Error::usage(format!("unknown qubit {a}")))?;
            let at = self.moment_start.get(m).copied().unwrap_or(self.instrs.len());
            resolved.push((at, q, op));
        }
        let mut s = self.scratch();
        let mut rng = trial_rng(0, 0);
        let mut total_meas = vec![0u64; s.meas.len()];
        let mut total_frame = PauliFrame::new(self.num_sites());
        if resolved.is_empty() {
            self.run(&mut s, &mut rng, false, None);
            let res = self.residual(&s);
            return Ok((self.record(&s, &res), res));
        }
        // Noiseless propagation is linear, so multi-error runs are XORs of single ones.
        for e in resolved {
            self.run(&mut s, &mut rng, false, Some(e));
            for (a, b) in total_meas.iter_mut().zip(&s.meas) {
                *a ^= b;
            }
            total_frame.compose(&s.frame)?;
        }
        s.meas = total_meas;
        s.frame = total_frame;
        let res = self.residual(&s);
        Ok((self.record(&s, &res), res))
    }
}

/// Checks that every measurement in `circuit` reads out its plaquette's stabilizer.
///
/// The measured observable `Z_anc` is pulled back through the noiseless circuit. Past a
/// reset (or a move source, or the start for non-data sites) a Z component is dropped and
/// an X component means the outcome would be random. What reaches the start must be
/// exactly the plaquette operator on the data.
pub fn verify_stabilizer_measurements(circuit: &Circuit, layout: &PatchLayout) -> Result<()> {
    let hw = crate::hardware::params_from_p(0.0, &HardwareParams::default())?;
    let c = CompiledCircuit::new(circuit, layout, &hw)?;
    let home: Vec<usize> = layout.data_qubits.iter().map(|a| c.sites.get(a).expect("site")).collect();
    let np = c.num_plaquettes;
    for (i, ins) in c.instrs.iter().enumerate() {
        let Instr::Measure { q, slot } = *ins else { continue };
        let (round, k) = (slot as usize / np, slot as usize % np);
        let mut o = PauliFrame::new(c.num_sites());
        o.flip_z(q as usize);
        let clean = |o: &mut PauliFrame, s: usize, what: &str| -> Result<()> {
            if o.x(s) {
                return Err(Error::Verification(format!(
                    "plaquette {k} round {round}: outcome depends on the random X component of {} at {what}",
                    c.sites.sites[s]
                )));
            }
            o.reset_qubit(s);
            Ok(())
        };
        for j in (0..i).rev() {
            match c.instrs[j] {
                Instr::H(a) => o.h(a as usize),
                Instr::Cnot(a, b) => o.cnot(a as usize, b as usize),
                Instr::Move { src, dst } => {
                    clean(&mut o, src as usize, "a move source")?;
                    o.swap(src as usize, dst as usize);
                }
                Instr::Measure { q, .. } | Instr::Reset(q) => clean(&mut o, q as usize, "a reset")?,
                _ => {}
            }
        }
        for s in 0..c.num_sites() {
            if !home.contains(&s) {
                clean(&mut o, s, "the start")?;
            }
        }
        let p = &layout.plaquettes[k];
        for (qd, &s) in home.iter().enumerate() {
            let inside = p.data_index.contains(&qd);
            let (want_x, want_z) = match p.basis {
                crate::layout::Basis::X => (inside, false),
                crate::layout::Basis::Z => (false, inside),
            };
            if o.x(s) != want_x || o.z(s) != want_z {
                return Err(Error::Verification(format!(
                    "plaquette {k} round {round}: measured operator differs from the stabilizer on data {qd}"
                )));
            }
        }
    }
    Ok(())
}
