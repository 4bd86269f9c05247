//! Detector error model of a compiled circuit, split by check sector.
//!
//! Detector `(t, a)` of a sector compares outcome `t` of its `a`-th plaquette with outcome
//! `t − 1` (outcome `−1` is 0). Detector `(rounds, a)` compares the last outcome with the
//! parity of a perfect final readout of the data. Z checks see the X part of data errors
//! (logical: parity on row 0); X checks see the Z part (logical: parity on column 0).
//!
//! Every noise instruction is split into unit faults (X or Z on one qubit, or a flipped
//! outcome), each pushed through the rest of the circuit, 64 faults per sweep in bit
//! lanes. A channel outcome is the XOR of its unit effects. Outcomes of one channel with
//! the same sector effect are summed; identical effects from different channels are
//! combined as independent events, `p = p₁ + p₂ − 2p₁p₂`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::layout::{Basis, PatchLayout};
use crate::montecarlo::{CompiledCircuit, Instr};
use crate::pauli::PauliOp;

/// Detector numbering for one sector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Detectors {
    /// Basis of the checks in this sector.
    pub basis: Basis,
    /// Global plaquette index of each local check.
    pub plaquettes: Vec<usize>,
    /// Local check index of each global plaquette (None for the other basis).
    pub local: Vec<Option<usize>>,
    /// Local checks containing each data qubit.
    pub checks_of_data: Vec<Vec<usize>>,
    /// Data of each local check.
    pub data_of_check: Vec<Vec<usize>>,
    pub rounds: usize,
}

impl Detectors {
    pub fn new(layout: &PatchLayout, basis: Basis, rounds: usize) -> Self {
        let plaquettes = layout.plaquettes_of(basis);
        let mut local = vec![None; layout.plaquettes.len()];
        let mut checks_of_data = vec![Vec::new(); layout.num_data()];
        let mut data_of_check = Vec::with_capacity(plaquettes.len());
        for (a, &k) in plaquettes.iter().enumerate() {
            local[k] = Some(a);
            for &q in &layout.plaquettes[k].data_index {
                checks_of_data[q].push(a);
            }
            data_of_check.push(layout.plaquettes[k].data_index.clone());
        }
        Self { basis, plaquettes, local, checks_of_data, data_of_check, rounds }
    }

    pub fn per_layer(&self) -> usize {
        self.plaquettes.len()
    }

    pub fn len(&self) -> usize {
        (self.rounds + 1) * self.per_layer()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn id(&self, round: usize, check: usize) -> usize {
        round * self.per_layer() + check
    }

    /// `(round, global plaquette)` of a detector.
    pub fn site(&self, det: usize) -> (usize, usize) {
        (det / self.per_layer(), self.plaquettes[det % self.per_layer()])
    }
}

/// One independent error mechanism as seen by one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct Mechanism {
    /// Sorted detector ids.
    pub dets: Vec<u32>,
    /// Whether the mechanism flips the sector's logical observable.
    pub logical: bool,
    pub p: f64,
    /// Data qubits whose final error bit (in this sector's basis) it flips.
    pub footprint: Vec<u32>,
}

/// Error mechanisms of one sector.
#[derive(Debug, Clone)]
pub struct SectorModel {
    pub detectors: Detectors,
    pub mechanisms: Vec<Mechanism>,
    /// Mechanisms that flip the logical without triggering any detector.
    pub undetectable_logical: Vec<Mechanism>,
    pub d: usize,
}

impl SectorModel {
    pub fn basis(&self) -> Basis {
        self.detectors.basis
    }
}

/// Both sectors of a circuit's error model.
#[derive(Debug, Clone)]
pub struct ErrorModel {
    /// Z checks, X errors.
    pub z_checks: SectorModel,
    /// X checks, Z errors.
    pub x_checks: SectorModel,
}

impl ErrorModel {
    pub fn sector(&self, checks: Basis) -> &SectorModel {
        match checks {
            Basis::Z => &self.z_checks,
            Basis::X => &self.x_checks,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct UnitEffect {
    meas: Vec<u32>,
    fx: Vec<u32>,
    fz: Vec<u32>,
}

/// Unit fault: Pauli `x`/`z` component on `site`, inserted before instruction `at`.
#[derive(Debug, Clone, Copy)]
struct Unit {
    at: usize,
    site: usize,
    x: bool,
}

fn propagate_units(c: &CompiledCircuit, units: &[Unit]) -> Vec<UnitEffect> {
    let n = c.num_sites();
    let mut out = vec![UnitEffect::default(); units.len()];
    let mut xl = vec![0u64; n];
    let mut zl = vec![0u64; n];
    for (b, batch) in units.chunks(64).enumerate() {
        xl.fill(0);
        zl.fill(0);
        let base = b * 64;
        let mut next = 0;
        let start = batch[0].at;
        for j in start..=c.instrs.len() {
            while next < batch.len() && batch[next].at == j {
                let u = batch[next];
                if u.x {
                    xl[u.site] ^= 1 << next;
                } else {
                    zl[u.site] ^= 1 << next;
                }
                next += 1;
            }
            let Some(ins) = c.instrs.get(j) else { break };
            match *ins {
                Instr::H(q) => {
                    let q = q as usize;
                    std::mem::swap(&mut xl[q], &mut zl[q]);
                }
                Instr::Cnot(a, t) => {
                    let (a, t) = (a as usize, t as usize);
                    xl[t] ^= xl[a];
                    zl[a] ^= zl[t];
                }
                Instr::Move { src, dst } => {
                    let (s, d) = (src as usize, dst as usize);
                    xl[d] = xl[s];
                    zl[d] = zl[s];
                    xl[s] = 0;
                    zl[s] = 0;
                }
                Instr::Measure { q, slot } => {
                    let q = q as usize;
                    let mut m = xl[q];
                    while m != 0 {
                        let lane = m.trailing_zeros() as usize;
                        out[base + lane].meas.push(slot);
                        m &= m - 1;
                    }
                    xl[q] = 0;
                    zl[q] = 0;
                }
                Instr::Reset(q) => {
                    xl[q as usize] = 0;
                    zl[q as usize] = 0;
                }
                _ => {}
            }
        }
        for (q, &s) in c.data_sites.iter().enumerate() {
            let mut m = xl[s];
            while m != 0 {
                out[base + m.trailing_zeros() as usize].fx.push(q as u32);
                m &= m - 1;
            }
            let mut m = zl[s];
            while m != 0 {
                out[base + m.trailing_zeros() as usize].fz.push(q as u32);
                m &= m - 1;
            }
        }
    }
    out
}

/// Symmetric difference of two sorted lists.
pub(crate) fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Sector view of a fault: detectors, logical flip, footprint.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
struct SectorEffect {
    dets: Vec<u32>,
    logical: bool,
    footprint: Vec<u32>,
}

impl SectorEffect {
    fn xor(&self, o: &SectorEffect) -> SectorEffect {
        SectorEffect {
            dets: xor_sorted(&self.dets, &o.dets),
            logical: self.logical ^ o.logical,
            footprint: xor_sorted(&self.footprint, &o.footprint),
        }
    }

    fn is_trivial(&self) -> bool {
        self.dets.is_empty() && !self.logical
    }
}

struct Projector<'a> {
    det: &'a Detectors,
    logical: Vec<bool>,
    np: usize,
}

impl Projector<'_> {
    fn project(&self, e: &UnitEffect) -> SectorEffect {
        let mut toggles: Vec<u32> = Vec::new();
        let per = self.det.per_layer();
        for &slot in &e.meas {
            let (round, k) = (slot as usize / self.np, slot as usize % self.np);
            if let Some(a) = self.det.local[k] {
                toggles.push((round * per + a) as u32);
                toggles.push(((round + 1) * per + a) as u32);
            }
        }
        let fin = match self.det.basis {
            Basis::Z => &e.fx,
            Basis::X => &e.fz,
        };
        let mut logical = false;
        for &q in fin {
            logical ^= self.logical[q as usize];
            for &a in &self.det.checks_of_data[q as usize] {
                toggles.push((self.det.rounds * per + a) as u32);
            }
        }
        toggles.sort_unstable();
        let mut dets = Vec::with_capacity(toggles.len());
        let mut i = 0;
        while i < toggles.len() {
            let mut j = i;
            while j < toggles.len() && toggles[j] == toggles[i] {
                j += 1;
            }
            if (j - i) % 2 == 1 {
                dets.push(toggles[i]);
            }
            i = j;
        }
        SectorEffect { dets, logical, footprint: fin.clone() }
    }
}

/// Builds the per-sector error model of a compiled circuit.
///
/// Fails if the circuit has no noise at all, since the matching graph would be empty.
pub fn build_error_model(c: &CompiledCircuit, layout: &PatchLayout) -> Result<ErrorModel> {
    let mut units = Vec::new();
    // (instruction, first unit index) for gate-noise channels.
    let mut channels: Vec<(usize, usize)> = Vec::new();
    for (i, ins) in c.instrs.iter().enumerate() {
        match *ins {
            Instr::Depol1 { q, .. } => {
                channels.push((i, units.len()));
                for x in [true, false] {
                    units.push(Unit { at: i + 1, site: q as usize, x });
                }
            }
            Instr::Depol2 { a, b, .. } => {
                channels.push((i, units.len()));
                for s in [a, b] {
                    for x in [true, false] {
                        units.push(Unit { at: i + 1, site: s as usize, x });
                    }
                }
            }
            Instr::MeasFlip { .. } => channels.push((i, usize::MAX)),
            _ => {}
        }
    }
    if channels.is_empty() {
        return Err(Error::usage("circuit has no noise; the error model is empty"));
    }
    let effects = propagate_units(c, &units);

    let mut sectors = Vec::with_capacity(2);
    for basis in [Basis::Z, Basis::X] {
        let det = Detectors::new(layout, basis, c.rounds);
        let mut logical = vec![false; layout.num_data()];
        for &q in layout.sector_logical_support(basis) {
            logical[q] = true;
        }
        let proj = Projector { det: &det, logical, np: c.num_plaquettes };
        let unit_proj: Vec<SectorEffect> = effects.iter().map(|e| proj.project(e)).collect();

        let mut merged: HashMap<(Vec<u32>, bool), (f64, Vec<u32>)> = HashMap::new();
        let mut order: Vec<(Vec<u32>, bool)> = Vec::new();
        for &(i, u0) in &channels {
            let mut outcomes: Vec<(SectorEffect, f64)> = Vec::new();
            match c.instrs[i] {
                Instr::Depol1 { p, .. } => {
                    let (ex, ez) = (&unit_proj[u0], &unit_proj[u0 + 1]);
                    outcomes.push((ex.clone(), p / 3.0));
                    outcomes.push((ez.clone(), p / 3.0));
                    outcomes.push((ex.xor(ez), p / 3.0));
                }
                Instr::Depol2 { p, .. } => {
                    let u = &unit_proj[u0..u0 + 4];
                    for k in 1..16usize {
                        let (pa, pb) = (PauliOp::ALL[k >> 2], PauliOp::ALL[k & 3]);
                        let mut e = SectorEffect::default();
                        for (bit, unit) in [(pa.xbit(), &u[0]), (pa.zbit(), &u[1]), (pb.xbit(), &u[2]), (pb.zbit(), &u[3])] {
                            if bit {
                                e = e.xor(unit);
                            }
                        }
                        outcomes.push((e, p / 15.0));
                    }
                }
                Instr::MeasFlip { slot, p, .. } => {
                    let e = proj.project(&UnitEffect { meas: vec![slot], ..Default::default() });
                    outcomes.push((e, p));
                }
                _ => unreachable!(),
            }
            // Outcomes of one channel are exclusive: sum those with equal effect.
            let mut local: Vec<(SectorEffect, f64)> = Vec::new();
            for (e, p) in outcomes {
                if e.is_trivial() {
                    continue;
                }
                match local.iter_mut().find(|(f, _)| f.dets == e.dets && f.logical == e.logical) {
                    Some(slot) => slot.1 += p,
                    None => local.push((e, p)),
                }
            }
            for (e, p) in local {
                let key = (e.dets.clone(), e.logical);
                match merged.get_mut(&key) {
                    Some(entry) => entry.0 = entry.0 + p - 2.0 * entry.0 * p,
                    None => {
                        merged.insert(key.clone(), (p, e.footprint));
                        order.push(key);
                    }
                }
            }
        }
        let mut mechanisms = Vec::new();
        let mut undetectable_logical = Vec::new();
        for key in order {
            let (p, footprint) = merged.remove(&key).expect("present");
            let m = Mechanism { dets: key.0, logical: key.1, p, footprint };
            if m.dets.is_empty() {
                undetectable_logical.push(m);
            } else {
                mechanisms.push(m);
            }
        }
        sectors.push(SectorModel { detectors: det, mechanisms, undetectable_logical, d: layout.d });
    }
    let x_checks = sectors.pop().expect("two sectors");
    let z_checks = sectors.pop().expect("two sectors");
    Ok(ErrorModel { z_checks, x_checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardware::{params_from_p, HardwareParams};
    use crate::layout::{build_layout, Scheme};
    use crate::schedule::{syndrome_circuit, Variant};

    fn model(scheme: Scheme, variant: Variant, d: usize, p: f64) -> (PatchLayout, CompiledCircuit, ErrorModel) {
        let l = build_layout(scheme, d, 0).unwrap();
        let hw = params_from_p(p, &HardwareParams::default()).unwrap();
        let circ = syndrome_circuit(&l, &hw, variant, d).unwrap();
        let c = CompiledCircuit::new(&circ, &l, &hw).unwrap();
        let m = build_error_model(&c, &l).unwrap();
        (l, c, m)
    }

    #[test]
    fn xor_sorted_is_symmetric_difference() {
        assert_eq!(xor_sorted(&[1, 3, 5], &[3, 4]), vec![1, 4, 5]);
        assert_eq!(xor_sorted(&[], &[2]), vec![2]);
        assert!(xor_sorted(&[7], &[7]).is_empty());
    }

    #[test]
    fn noiseless_model_is_an_error() {
        let l = build_layout(Scheme::Baseline2D, 3, 0).unwrap();
        let hw = params_from_p(0.0, &HardwareParams::default()).unwrap();
        let circ = syndrome_circuit(&l, &hw, Variant::AllAtOnce, 3).unwrap();
        let c = CompiledCircuit::new(&circ, &l, &hw).unwrap();
        assert!(matches!(build_error_model(&c, &l), Err(Error::Usage(_))));
    }

    #[test]
    fn no_single_fault_is_an_undetectable_logical() {
        for (scheme, variant) in [
            (Scheme::Baseline2D, Variant::AllAtOnce),
            (Scheme::Natural, Variant::Interleaved),
            (Scheme::Compact, Variant::AllAtOnce),
            (Scheme::Compact, Variant::Interleaved),
        ] {
            let (_, _, m) = model(scheme, variant, 3, 1e-3);
            for s in [&m.z_checks, &m.x_checks] {
                assert!(s.undetectable_logical.is_empty(), "{scheme:?} {variant:?}");
                assert!(!s.mechanisms.is_empty());
                assert!(s.mechanisms.iter().all(|m| m.p > 0.0 && m.p < 0.5));
            }
        }
    }

    #[test]
    fn effects_match_direct_injection() {
        // Spot-check the lane propagation against the frame simulator.
        let (l, c, _) = model(Scheme::Compact, Variant::AllAtOnce, 3, 1e-3);
        let mut units = Vec::new();
        for (i, ins) in c.instrs.iter().enumerate() {
            if let Instr::Cnot(a, _) = *ins {
                units.push(Unit { at: i + 1, site: a as usize, x: i % 2 == 0 });
            }
        }
        let fx = propagate_units(&c, &units);
        let mut s = c.scratch();
        for (u, e) in units.iter().zip(&fx) {
            let mut rng = crate::montecarlo::trial_rng(0, 0);
            let op = if u.x { PauliOp::X } else { PauliOp::Z };
            c.run(&mut s, &mut rng, false, Some((u.at, u.site, op)));
            let res = c.residual(&s);
            let meas: Vec<u32> = (0..c.num_measurements() as u32).filter(|&k| crate::pauli::get_bit(&s.meas, k as usize)).collect();
            let mut got = e.meas.clone();
            got.sort_unstable();
            assert_eq!(got, meas);
            assert_eq!(e.fx, res.x_support().iter().map(|&q| q as u32).collect::<Vec<_>>());
        }
        assert!(units.len() > 20 && l.d == 3);
    }
}
