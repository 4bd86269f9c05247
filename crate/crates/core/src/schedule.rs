//! Timed syndrome-extraction circuits for every embedding, plus the transversal CNOT.
//!
//! A circuit is a list of moments; each moment holds operations on disjoint hardware and
//! lasts as long as its slowest operation. Measurement and reset of an ancilla are one
//! fused `Measure` operation; the ancilla is back in `|0⟩` afterwards.
//!
//! CNOT orders within a plaquette (steps 0..3):
//!
//! | check | standard (Baseline2D, Natural) | Compact          |
//! |-------|--------------------------------|------------------|
//! | X     | UL, UR, LL, LR                 | UL, UR, LR, LL*  |
//! | Z     | UL, LL, UR, LR                 | UL, LL, LR, UR*  |
//!
//! `*` is the host corner in Compact, whose CNOT runs between the ancilla transmon and
//! the cavity beneath it. The last two CNOTs of an X check always form a horizontal pair
//! and those of a Z check a vertical pair, so hook errors run perpendicular to the
//! logical operator they could otherwise extend.
//!
//! Compact groups start at steps A:0, C:2, B:4, D:6 and repeat every 8 steps, which gives
//! the pair sequence A0D2, A1D3, A2C0, A3C1, B0C2, B1C3, B2D0, B3D1 in steady state.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardware::{HardwareParams, QubitAddress};
use crate::layout::{Basis, Corner, Group, PatchLayout, Scheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OpKind {
    Reset,
    H,
    /// Transmon–transmon CNOT, operands `[control, target]`.
    CnotTT,
    /// Transmon–own-cavity CNOT, operands `[control, target]`.
    CnotTM,
    /// Operands `[transmon, mode]`; moves the mode's state into the transmon.
    Load,
    /// Operands `[transmon, mode]`; moves the transmon's state into the mode.
    Store,
    /// Fused measure-and-reset in the Z basis.
    Measure,
    Idle,
}

/// Which plaquette and round an operation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpTag {
    pub plaquette: usize,
    pub round: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Operation {
    pub kind: OpKind,
    pub operands: Vec<QubitAddress>,
    pub duration: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tag: Option<OpTag>,
}

impl Operation {
    pub fn new(kind: OpKind, operands: Vec<QubitAddress>, duration: f64) -> Self {
        Self { kind, operands, duration, tag: None }
    }

    fn tagged(mut self, plaquette: usize, round: usize) -> Self {
        self.tag = Some(OpTag { plaquette, round });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Moment {
    pub ops: Vec<Operation>,
    pub duration: f64,
}

impl Moment {
    pub fn new(ops: Vec<Operation>) -> Self {
        let duration = ops.iter().map(|o| o.duration).fold(0.0, f64::max);
        Self { ops, duration }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    AllAtOnce,
    Interleaved,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::AllAtOnce => "all-at-once",
            Variant::Interleaved => "interleaved",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "all-at-once" | "allatonce" | "aao" => Ok(Variant::AllAtOnce),
            "interleaved" | "int" => Ok(Variant::Interleaved),
            _ => Err(Error::usage(format!("unknown variant `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub moments: Vec<Moment>,
    pub total_duration: f64,
    /// Extraction rounds; every plaquette is measured once per round.
    pub rounds: usize,
    pub num_plaquettes: usize,
}

impl Circuit {
    pub fn new(moments: Vec<Moment>, rounds: usize, num_plaquettes: usize) -> Self {
        let total_duration = moments.iter().map(|m| m.duration).sum();
        Self { moments, total_duration, rounds, num_plaquettes }
    }

    pub fn ops(&self) -> impl Iterator<Item = &Operation> {
        self.moments.iter().flat_map(|m| &m.ops)
    }

    pub fn count(&self, kind: OpKind) -> usize {
        self.ops().filter(|o| o.kind == kind).count()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

const STANDARD_X: [Corner; 4] = [Corner::UL, Corner::UR, Corner::LL, Corner::LR];
const STANDARD_Z: [Corner; 4] = [Corner::UL, Corner::LL, Corner::UR, Corner::LR];
const COMPACT_X: [Corner; 4] = [Corner::UL, Corner::UR, Corner::LR, Corner::LL];
const COMPACT_Z: [Corner; 4] = [Corner::UL, Corner::LL, Corner::LR, Corner::UR];

/// CNOT order of a plaquette of `basis` under `scheme`.
pub fn cnot_order(scheme: Scheme, basis: Basis) -> [Corner; 4] {
    match (scheme, basis) {
        (Scheme::Compact, Basis::X) => COMPACT_X,
        (Scheme::Compact, Basis::Z) => COMPACT_Z,
        (_, Basis::X) => STANDARD_X,
        (_, Basis::Z) => STANDARD_Z,
    }
}

/// First CNOT step of a Compact group within a round.
pub fn group_offset(g: Group) -> usize {
    match g {
        Group::A => 0,
        Group::C => 2,
        Group::B => 4,
        Group::D => 6,
    }
}

/// Steps between consecutive Compact rounds in a back-to-back schedule.
pub const COMPACT_PERIOD: usize = 8;
/// CNOT steps in one self-contained Compact round.
pub const COMPACT_ROUND_STEPS: usize = 10;

/// One standard extraction round on the data transmons, appended to `moments`.
fn push_standard_round(moments: &mut Vec<Moment>, layout: &PatchLayout, hw: &HardwareParams, round: usize) {
    let x_anc: Vec<(usize, QubitAddress)> = layout
        .plaquettes
        .iter()
        .enumerate()
        .filter(|(_, p)| p.basis == Basis::X)
        .map(|(k, p)| (k, p.ancilla))
        .collect();
    let hadamards = || {
        Moment::new(x_anc.iter().map(|&(k, a)| Operation::new(OpKind::H, vec![a], hw.dur_1q).tagged(k, round)).collect())
    };
    moments.push(hadamards());
    for step in 0..4 {
        let mut ops = Vec::new();
        for (k, p) in layout.plaquettes.iter().enumerate() {
            let corner = cnot_order(layout.scheme, p.basis)[step];
            if let Some(q) = p.at(corner) {
                let dt = layout.data_transmons[q];
                let operands = match p.basis {
                    Basis::X => vec![p.ancilla, dt],
                    Basis::Z => vec![dt, p.ancilla],
                };
                ops.push(Operation::new(OpKind::CnotTT, operands, hw.dur_2q_tt).tagged(k, round));
            }
        }
        moments.push(Moment::new(ops));
    }
    moments.push(hadamards());
    moments.push(Moment::new(
        layout
            .plaquettes
            .iter()
            .enumerate()
            .map(|(k, p)| Operation::new(OpKind::Measure, vec![p.ancilla], hw.dur_meas_reset).tagged(k, round))
            .collect(),
    ));
}

fn load_layer(layout: &PatchLayout, hw: &HardwareParams, z: usize, kind: OpKind) -> Moment {
    Moment::new(
        layout
            .data_transmons
            .iter()
            .map(|&t| Operation::new(kind, vec![t, t.mode(z)], hw.dur_loadstore))
            .collect(),
    )
}

fn idle_layer(qubits: &[QubitAddress], dt: f64) -> Option<Moment> {
    (dt > 0.0).then(|| Moment::new(vec![Operation::new(OpKind::Idle, qubits.to_vec(), dt)]))
}

/// One round of standard extraction on a Baseline2D patch.
pub fn baseline_round(layout: &PatchLayout, hw: &HardwareParams) -> Result<Circuit> {
    baseline_rounds(layout, hw, 1)
}

/// `rounds` back-to-back standard rounds on a Baseline2D patch.
pub fn baseline_rounds(layout: &PatchLayout, hw: &HardwareParams, rounds: usize) -> Result<Circuit> {
    if layout.scheme != Scheme::Baseline2D {
        return Err(Error::usage(format!("baseline schedule needs a Baseline2D layout, got {:?}", layout.scheme)));
    }
    let mut moments = Vec::with_capacity(7 * rounds);
    for r in 0..rounds {
        push_standard_round(&mut moments, layout, hw, r);
    }
    Ok(Circuit::new(moments, rounds, layout.plaquettes.len()))
}

fn check_mode(layout: &PatchLayout, hw: &HardwareParams) -> Result<()> {
    if layout.z >= hw.cavity_depth {
        return Err(Error::usage(format!("mode {} does not exist in a depth-{} cavity", layout.z, hw.cavity_depth)));
    }
    Ok(())
}

/// Duration of one Natural Interleaved visit: load, one round, store.
pub fn natural_slot(hw: &HardwareParams) -> f64 {
    2.0 * hw.dur_loadstore + 2.0 * hw.dur_1q + 4.0 * hw.dur_2q_tt + hw.dur_meas_reset
}

/// Natural embedding: standard rounds on the transmon layer, data fetched from mode `z`.
///
/// All-at-once loads once, runs `rounds` rounds and stores. Interleaved does
/// load/round/store per round and then waits `(k − 1)` visit slots in the cavity while the
/// other modes of the stack are served.
pub fn natural_round(layout: &PatchLayout, hw: &HardwareParams, variant: Variant, rounds: usize) -> Result<Circuit> {
    if layout.scheme != Scheme::Natural {
        return Err(Error::usage(format!("natural schedule needs a Natural layout, got {:?}", layout.scheme)));
    }
    check_mode(layout, hw)?;
    let z = layout.z;
    let mut moments = Vec::new();
    match variant {
        Variant::AllAtOnce => {
            moments.push(load_layer(layout, hw, z, OpKind::Load));
            for r in 0..rounds {
                push_standard_round(&mut moments, layout, hw, r);
            }
            moments.push(load_layer(layout, hw, z, OpKind::Store));
        }
        Variant::Interleaved => {
            let wait = (hw.cavity_depth - 1) as f64 * natural_slot(hw);
            for r in 0..rounds {
                moments.push(load_layer(layout, hw, z, OpKind::Load));
                push_standard_round(&mut moments, layout, hw, r);
                moments.push(load_layer(layout, hw, z, OpKind::Store));
                moments.extend(idle_layer(&layout.data_qubits, wait));
            }
        }
    }
    Ok(Circuit::new(moments, rounds, layout.plaquettes.len()))
}

/// Gap between CNOT steps: `[post-H and Store, Measure, Load and pre-H]`.
#[derive(Default)]
struct Gap([Vec<Operation>; 3]);

/// Compact embedding: pipelined groups with data loaded only while a neighbouring
/// ancilla needs it.
///
/// All-at-once runs `rounds` rounds back to back with period 8. Interleaved runs
/// self-contained 10-step rounds, each followed by a `(k − 1)`-slot cavity wait.
pub fn compact_round(layout: &PatchLayout, hw: &HardwareParams, variant: Variant, rounds: usize) -> Result<Circuit> {
    if layout.scheme != Scheme::Compact {
        return Err(Error::usage(format!("compact schedule needs a Compact layout, got {:?}", layout.scheme)));
    }
    if layout.plaquettes.iter().any(|p| p.group.is_none()) {
        return Err(Error::usage("compact schedule needs group labels on every plaquette"));
    }
    check_mode(layout, hw)?;
    match variant {
        Variant::AllAtOnce => {
            let offsets: Vec<usize> = (0..rounds).map(|r| COMPACT_PERIOD * r).collect();
            let moments = compact_block(layout, hw, &offsets, 0)?;
            Ok(Circuit::new(moments, rounds, layout.plaquettes.len()))
        }
        Variant::Interleaved => {
            let mut moments = Vec::new();
            let slot = compact_slot(layout, hw)?;
            let wait = (hw.cavity_depth - 1) as f64 * slot;
            for r in 0..rounds {
                moments.extend(compact_block(layout, hw, &[0], r)?);
                moments.extend(idle_layer(&layout.data_qubits, wait));
            }
            Ok(Circuit::new(moments, rounds, layout.plaquettes.len()))
        }
    }
}

/// Duration of one self-contained Compact round.
pub fn compact_slot(layout: &PatchLayout, hw: &HardwareParams) -> Result<f64> {
    Ok(compact_block(layout, hw, &[0], 0)?.iter().map(|m| m.duration).sum())
}

/// Moments for Compact rounds starting at the given step offsets; round labels begin at
/// `first_round`.
fn compact_block(layout: &PatchLayout, hw: &HardwareParams, offsets: &[usize], first_round: usize) -> Result<Vec<Moment>> {
    let nsteps = offsets.last().map_or(0, |o| o + COMPACT_ROUND_STEPS);
    let mut steps: Vec<Vec<Operation>> = vec![Vec::new(); nsteps];
    let mut gaps: Vec<Gap> = (0..=nsteps).map(|_| Gap::default()).collect();

    // Per data qubit: steps where it is needed on its transmon, and windows where the
    // transmon is busy as a hosted ancilla.
    let nd = layout.num_data();
    let mut tt_steps: Vec<Vec<usize>> = vec![Vec::new(); nd];
    let mut host_windows: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nd];

    for (ri, &off) in offsets.iter().enumerate() {
        let round = first_round + ri;
        for (k, p) in layout.plaquettes.iter().enumerate() {
            let base = off + group_offset(p.group.expect("checked"));
            let order = cnot_order(Scheme::Compact, p.basis);
            if p.basis == Basis::X {
                gaps[base].0[2].push(Operation::new(OpKind::H, vec![p.ancilla], hw.dur_1q).tagged(k, round));
                gaps[base + 4].0[0].push(Operation::new(OpKind::H, vec![p.ancilla], hw.dur_1q).tagged(k, round));
            }
            gaps[base + 4].0[1].push(Operation::new(OpKind::Measure, vec![p.ancilla], hw.dur_meas_reset).tagged(k, round));
            if let Some(h) = p.host {
                host_windows[h].push((base, base + 3));
            }
            for (idx, &corner) in order.iter().enumerate() {
                let Some(q) = p.at(corner) else { continue };
                let s = base + idx;
                let op = if p.host == Some(q) {
                    let m = layout.data_qubits[q];
                    let operands = match p.basis {
                        Basis::X => vec![p.ancilla, m],
                        Basis::Z => vec![m, p.ancilla],
                    };
                    Operation::new(OpKind::CnotTM, operands, hw.dur_2q_tm)
                } else {
                    tt_steps[q].push(s);
                    let t = layout.data_transmons[q];
                    let operands = match p.basis {
                        Basis::X => vec![p.ancilla, t],
                        Basis::Z => vec![t, p.ancilla],
                    };
                    Operation::new(OpKind::CnotTT, operands, hw.dur_2q_tt)
                };
                steps[s].push(op.tagged(k, round));
            }
        }
    }

    for q in 0..nd {
        let mut accesses = tt_steps[q].clone();
        accesses.sort_unstable();
        let windows = &host_windows[q];
        if let Some(&s) = accesses.iter().find(|&&s| windows.iter().any(|&(a, b)| a <= s && s <= b)) {
            return Err(Error::Verification(format!(
                "data {q} is needed on its transmon at step {s} while that transmon hosts an ancilla"
            )));
        }
        let t = layout.data_transmons[q];
        let m = layout.data_qubits[q];
        let mut run: Option<(usize, usize)> = None;
        let close = |run: (usize, usize), gaps: &mut [Gap]| {
            gaps[run.0].0[2].push(Operation::new(OpKind::Load, vec![t, m], hw.dur_loadstore));
            gaps[run.1 + 1].0[0].push(Operation::new(OpKind::Store, vec![t, m], hw.dur_loadstore));
        };
        for &s in &accesses {
            run = match run {
                Some((a, b)) if !windows.iter().any(|&(w, _)| b < w && w <= s) => Some((a, s)),
                Some(r) => {
                    close(r, &mut gaps);
                    Some((s, s))
                }
                None => Some((s, s)),
            };
        }
        if let Some(r) = run {
            close(r, &mut gaps);
        }
    }

    let mut moments = Vec::new();
    for (s, gap) in gaps.into_iter().enumerate() {
        for phase in gap.0 {
            if !phase.is_empty() {
                moments.push(Moment::new(phase));
            }
        }
        if s < nsteps && !steps[s].is_empty() {
            moments.push(Moment::new(std::mem::take(&mut steps[s])));
        }
    }
    Ok(moments)
}

/// Syndrome-extraction circuit for any scheme; `variant` is ignored for Baseline2D.
pub fn syndrome_circuit(layout: &PatchLayout, hw: &HardwareParams, variant: Variant, rounds: usize) -> Result<Circuit> {
    match layout.scheme {
        Scheme::Baseline2D => baseline_rounds(layout, hw, rounds),
        Scheme::Natural => natural_round(layout, hw, variant, rounds),
        Scheme::Compact => compact_round(layout, hw, variant, rounds),
    }
}

/// Where the control patch of a transversal CNOT starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlMode {
    /// Stored in this mode of the same stack; loaded first and stored back afterwards.
    Stored(usize),
    /// Already on the transmon layer.
    Loaded,
}

/// Transversal CNOT from the control patch to the patch stored in mode `zt`: one
/// transmon-to-cavity CNOT per data qubit.
pub fn transversal_cnot_circuit(layout: &PatchLayout, hw: &HardwareParams, control: ControlMode, zt: usize) -> Result<Circuit> {
    if !layout.scheme.uses_memory() {
        return Err(Error::usage("transversal CNOT needs a memory embedding"));
    }
    if zt >= hw.cavity_depth {
        return Err(Error::usage(format!("target mode {zt} does not exist in a depth-{} cavity", hw.cavity_depth)));
    }
    if let ControlMode::Stored(zc) = control {
        if zc == zt {
            return Err(Error::usage("control and target modes must differ"));
        }
        if zc >= hw.cavity_depth {
            return Err(Error::usage(format!("control mode {zc} does not exist in a depth-{} cavity", hw.cavity_depth)));
        }
    }
    let mut moments = Vec::new();
    if let ControlMode::Stored(zc) = control {
        moments.push(load_layer(layout, hw, zc, OpKind::Load));
    }
    moments.push(Moment::new(
        layout
            .data_transmons
            .iter()
            .map(|&t| Operation::new(OpKind::CnotTM, vec![t, t.mode(zt)], hw.dur_2q_tm))
            .collect(),
    ));
    if let ControlMode::Stored(zc) = control {
        moments.push(load_layer(layout, hw, zc, OpKind::Store));
    }
    Ok(Circuit::new(moments, 0, 0))
}

/// Result of [`audit_circuit`].
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AuditReport {
    pub moments: usize,
    pub loads_per_data: Vec<usize>,
    pub stores_per_data: Vec<usize>,
    pub measurements: usize,
    /// Transmon-to-cavity CNOTs per (plaquette, round).
    pub cnot_tm_per_check: BTreeMap<(usize, usize), usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Occupant {
    Empty,
    Data(usize),
    Ancilla,
}

/// Checks resource constraints of a syndrome circuit against its layout.
///
/// Every moment must use each transmon and each cavity at most once; transmon–transmon
/// CNOTs must be grid neighbours; cavity operations must stay under their own transmon;
/// data must sit on its transmon when gated there and be stored back by the end.
pub fn audit_circuit(circuit: &Circuit, layout: &PatchLayout) -> Result<AuditReport> {
    let fail = |m: usize, msg: String| Err(Error::Verification(format!("moment {m}: {msg}")));
    let nd = layout.num_data();
    let mut report = AuditReport {
        moments: circuit.moments.len(),
        loads_per_data: vec![0; nd],
        stores_per_data: vec![0; nd],
        ..Default::default()
    };
    let mut occ: HashMap<QubitAddress, Occupant> = HashMap::new();
    for site in layout.sites() {
        occ.insert(site, Occupant::Empty);
    }
    for (q, &home) in layout.data_qubits.iter().enumerate() {
        occ.insert(home, Occupant::Data(q));
    }

    for (mi, moment) in circuit.moments.iter().enumerate() {
        let mut transmons = std::collections::HashSet::new();
        let mut cavities = std::collections::HashSet::new();
        let mut longest = 0.0f64;
        for op in &moment.ops {
            longest = longest.max(op.duration);
            if op.kind == OpKind::Idle {
                continue;
            }
            for &a in &op.operands {
                let fresh = match a {
                    QubitAddress::Transmon { .. } => transmons.insert(a),
                    QubitAddress::CavityMode { x, y, .. } => cavities.insert((x, y)),
                };
                if !fresh {
                    return fail(mi, format!("{a} used twice"));
                }
                if !occ.contains_key(&a) {
                    return fail(mi, format!("{a} is not part of the layout"));
                }
            }
            let ops = &op.operands;
            let state = |a: &QubitAddress| occ[a];
            match op.kind {
                OpKind::CnotTT => {
                    if !(ops[0].is_transmon() && ops[1].is_transmon()) {
                        return fail(mi, "CNOT_tt on a cavity mode".into());
                    }
                    let ((ax, ay), (bx, by)) = (ops[0].xy(), ops[1].xy());
                    if (ax - bx).abs() + (ay - by).abs() != 1 {
                        return fail(mi, format!("CNOT_tt between non-neighbours {} and {}", ops[0], ops[1]));
                    }
                    if let Some(tag) = op.tag {
                        let anc = layout.plaquettes[tag.plaquette].ancilla;
                        let data_t = if ops[0] == anc { ops[1] } else { ops[0] };
                        if !matches!(state(&data_t), Occupant::Data(q) if layout.data_transmons[q] == data_t) {
                            return fail(mi, format!("CNOT_tt on {data_t}, which does not hold its data"));
                        }
                        if let Occupant::Data(q) = state(&anc) {
                            return fail(mi, format!("ancilla {anc} still holds data {q}"));
                        }
                        occ.insert(anc, Occupant::Ancilla);
                    }
                }
                OpKind::CnotTM | OpKind::Load | OpKind::Store => {
                    let (t, m) = match (ops[0].is_transmon(), ops[1].is_transmon()) {
                        (true, false) => (ops[0], ops[1]),
                        (false, true) => (ops[1], ops[0]),
                        _ => return fail(mi, format!("{:?} needs one transmon and one mode", op.kind)),
                    };
                    if t.xy() != m.xy() {
                        return fail(mi, format!("{t} cannot reach {m}"));
                    }
                    match op.kind {
                        OpKind::Load => {
                            let Occupant::Data(q) = state(&m) else {
                                return fail(mi, format!("load from {m}, which holds no data"));
                            };
                            if state(&t) != Occupant::Empty {
                                return fail(mi, format!("load into busy {t}"));
                            }
                            occ.insert(t, Occupant::Data(q));
                            occ.insert(m, Occupant::Empty);
                            report.loads_per_data[q] += 1;
                        }
                        OpKind::Store => {
                            let Occupant::Data(q) = state(&t) else {
                                return fail(mi, format!("store from {t}, which holds no data"));
                            };
                            if state(&m) != Occupant::Empty {
                                return fail(mi, format!("store into occupied {m}"));
                            }
                            occ.insert(m, Occupant::Data(q));
                            occ.insert(t, Occupant::Empty);
                            report.stores_per_data[q] += 1;
                        }
                        _ => {
                            if !matches!(state(&m), Occupant::Data(_)) {
                                return fail(mi, format!("CNOT_tm on {m}, which holds no data"));
                            }
                            if let Some(tag) = op.tag {
                                if let Occupant::Data(q) = state(&t) {
                                    return fail(mi, format!("ancilla {t} still holds data {q}"));
                                }
                                occ.insert(t, Occupant::Ancilla);
                                *report.cnot_tm_per_check.entry((tag.plaquette, tag.round)).or_default() += 1;
                            }
                        }
                    }
                }
                OpKind::H => {
                    if op.tag.is_some() {
                        if let Occupant::Data(q) = state(&ops[0]) {
                            return fail(mi, format!("ancilla {} still holds data {q}", ops[0]));
                        }
                        occ.insert(ops[0], Occupant::Ancilla);
                    }
                }
                OpKind::Measure => {
                    if let Occupant::Data(q) = state(&ops[0]) {
                        return fail(mi, format!("measurement would destroy data {q}"));
                    }
                    occ.insert(ops[0], Occupant::Empty);
                    report.measurements += 1;
                }
                OpKind::Reset | OpKind::Idle => {}
            }
        }
        if (moment.duration - longest).abs() > 1e-15 {
            return fail(mi, "moment duration differs from its longest operation".into());
        }
    }
    for (q, &home) in layout.data_qubits.iter().enumerate() {
        if occ[&home] != Occupant::Data(q) {
            return Err(Error::Verification(format!("data {q} is not back at {home} at the end")));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::build_layout;

    fn hw() -> HardwareParams {
        HardwareParams::default()
    }

    #[test]
    fn baseline_round_shape() {
        let l = build_layout(Scheme::Baseline2D, 3, 0).unwrap();
        let c = baseline_round(&l, &hw()).unwrap();
        assert_eq!(c.moments.len(), 7);
        assert_eq!(c.count(OpKind::Measure), 8);
        let expect = 2.0 * 50e-9 + 4.0 * 200e-9 + 300e-9;
        assert!((c.total_duration - expect).abs() < 1e-15);
        audit_circuit(&c, &l).unwrap();
        let n = build_layout(Scheme::Natural, 3, 0).unwrap();
        assert!(matches!(baseline_round(&n, &hw()), Err(Error::Usage(_))));
    }

    #[test]
    fn natural_load_store_counts() {
        let l = build_layout(Scheme::Natural, 3, 2).unwrap();
        let a = natural_round(&l, &hw(), Variant::AllAtOnce, 3).unwrap();
        let ra = audit_circuit(&a, &l).unwrap();
        assert!(ra.loads_per_data.iter().all(|&n| n == 1));
        assert!(ra.stores_per_data.iter().all(|&n| n == 1));
        let i = natural_round(&l, &hw(), Variant::Interleaved, 3).unwrap();
        let ri = audit_circuit(&i, &l).unwrap();
        assert!(ri.loads_per_data.iter().all(|&n| n == 3));
        assert!(ri.stores_per_data.iter().all(|&n| n == 3));
        assert_eq!(a.count(OpKind::Load) * 3, i.count(OpKind::Load));
    }

    #[test]
    fn natural_interleaved_wait() {
        let l = build_layout(Scheme::Natural, 3, 0).unwrap();
        let c = natural_round(&l, &hw(), Variant::Interleaved, 1).unwrap();
        let idle = c.moments.iter().find(|m| m.ops.iter().any(|o| o.kind == OpKind::Idle)).unwrap();
        assert!((idle.duration - 9.0 * natural_slot(&hw())).abs() < 1e-15);
        let bad = build_layout(Scheme::Natural, 3, 10).unwrap();
        assert!(matches!(natural_round(&bad, &hw(), Variant::AllAtOnce, 1), Err(Error::Usage(_))));
    }

    #[test]
    fn compact_schedule_passes_audit() {
        for d in [3, 5, 7] {
            let l = build_layout(Scheme::Compact, d, 0).unwrap();
            for variant in [Variant::AllAtOnce, Variant::Interleaved] {
                let c = compact_round(&l, &hw(), variant, d).unwrap();
                let r = audit_circuit(&c, &l).unwrap();
                assert_eq!(r.measurements, d * (d * d - 1));
                for (k, p) in l.plaquettes.iter().enumerate() {
                    for round in 0..d {
                        let n = r.cnot_tm_per_check.get(&(k, round)).copied().unwrap_or(0);
                        assert_eq!(n, p.host.is_some() as usize);
                    }
                }
            }
        }
    }

    #[test]
    fn compact_steady_state_pairs() {
        let l = build_layout(Scheme::Compact, 5, 0).unwrap();
        // Group active at each step of the period, as (group, CNOT index) pairs.
        let mut seen = Vec::new();
        for s in 8..16 {
            let mut here = Vec::new();
            for g in [Group::A, Group::B, Group::C, Group::D] {
                for r in 0..3 {
                    let base = COMPACT_PERIOD * r + group_offset(g);
                    if (base..base + 4).contains(&s) {
                        here.push(format!("{g:?}{}", s - base));
                    }
                }
            }
            seen.push(here.join(""));
        }
        assert_eq!(seen, ["A0D2", "A1D3", "A2C0", "A3C1", "B0C2", "B1C3", "B2D0", "B3D1"]);
        assert!(l.plaquettes.iter().all(|p| p.group.is_some()));
    }

    #[test]
    fn transversal_cnot_shape() {
        let l = build_layout(Scheme::Natural, 3, 0).unwrap();
        let c = transversal_cnot_circuit(&l, &hw(), ControlMode::Loaded, 1).unwrap();
        assert_eq!(c.moments.len(), 1);
        assert_eq!(c.count(OpKind::CnotTM), 9);
        assert!(transversal_cnot_circuit(&l, &hw(), ControlMode::Stored(1), 1).is_err());
        let s = transversal_cnot_circuit(&l, &hw(), ControlMode::Stored(0), 1).unwrap();
        assert_eq!(s.moments.len(), 3);
    }

    #[test]
    fn durations_are_deterministic() {
        let l = build_layout(Scheme::Compact, 5, 0).unwrap();
        let a = compact_round(&l, &hw(), Variant::Interleaved, 5).unwrap();
        let b = compact_round(&l, &hw(), Variant::Interleaved, 5).unwrap();
        assert_eq!(a, b);
        let sum: f64 = a.moments.iter().map(|m| m.duration).sum();
        assert_eq!(a.total_duration, sum);
    }
}
