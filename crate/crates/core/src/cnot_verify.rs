//! Clifford-level check that the transversal CNOT between two patches of one stack
//! implements a logical CNOT and maps stabilizers to stabilizers.
//!
//! Both patches share the transmon layer; the control lives in mode `zc`, the target in
//! mode `zt`. Conjugating the four logical generators and every stabilizer generator
//! through the circuit is complete for a Clifford map, so no sampling is needed.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hardware::{HardwareParams, QubitAddress};
use crate::layout::{build_layout, Basis, PatchLayout, Scheme};
use crate::pauli::PauliOp;
use crate::schedule::{transversal_cnot_circuit, Circuit, ControlMode, OpKind};
use crate::tableau::{apply_circuit, CliffordTableau, PauliString};

/// Mode holding the control patch.
pub const CONTROL_MODE: usize = 0;
/// Mode holding the target patch.
pub const TARGET_MODE: usize = 1;

/// One expected map `input → expected`, with what was actually obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Relation {
    pub name: String,
    pub holds: bool,
    pub image: String,
    pub expected: String,
}

/// A stabilizer generator whose image left the stabilizer group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mismatch {
    pub generator: String,
    pub image: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CnotReport {
    pub scheme: String,
    pub d: usize,
    pub relations: Vec<Relation>,
    pub stabilizers_preserved: bool,
    pub mismatches: Vec<Mismatch>,
}

impl CnotReport {
    pub fn passed(&self) -> bool {
        self.stabilizers_preserved && self.relations.iter().all(|r| r.holds)
    }

    /// `Err(Verification)` carrying the report text when any check failed.
    pub fn ensure(self) -> Result<Self> {
        if self.passed() {
            Ok(self)
        } else {
            Err(Error::Verification(self.to_string()))
        }
    }
}

impl fmt::Display for CnotReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "transversal CNOT, {} d={}: {}", self.scheme, self.d, if self.passed() { "PASS" } else { "FAIL" })?;
        for r in &self.relations {
            write!(f, "  {:<18} {}", r.name, if r.holds { "ok" } else { "FAILED" })?;
            if !r.holds {
                write!(f, "  got {} expected {}", r.image, r.expected)?;
            }
            writeln!(f)?;
        }
        writeln!(f, "  stabilizers        {}", if self.stabilizers_preserved { "preserved" } else { "NOT preserved" })?;
        for m in &self.mismatches {
            writeln!(f, "    {} -> {}", m.generator, m.image)?;
        }
        Ok(())
    }
}

/// The two patches and the qubit numbering of the tableau.
pub struct CnotSetup {
    pub control: PatchLayout,
    pub target: PatchLayout,
    pub index: BTreeMap<QubitAddress, usize>,
}

impl CnotSetup {
    pub fn new(scheme: Scheme, d: usize) -> Result<Self> {
        if !scheme.uses_memory() {
            return Err(Error::usage("transversal CNOT needs a Natural or Compact layout"));
        }
        let control = build_layout(scheme, d, CONTROL_MODE)?;
        let target = build_layout(scheme, d, TARGET_MODE)?;
        let mut index = BTreeMap::new();
        for a in control.sites().into_iter().chain(target.sites()) {
            let n = index.len();
            index.entry(a).or_insert(n);
        }
        Ok(Self { control, target, index })
    }

    pub fn hardware(&self) -> HardwareParams {
        HardwareParams { cavity_depth: TARGET_MODE.max(CONTROL_MODE) + 1, ..HardwareParams::default() }
    }

    /// The circuit under test: load control, CNOT_tm into the target mode, store.
    pub fn circuit(&self) -> Result<Circuit> {
        transversal_cnot_circuit(&self.control, &self.hardware(), ControlMode::Stored(CONTROL_MODE), TARGET_MODE)
    }

    fn n(&self) -> usize {
        self.index.len()
    }

    fn string(&self, ops: impl IntoIterator<Item = (QubitAddress, PauliOp)>) -> PauliString {
        PauliString::from_ops(self.n(), ops.into_iter().map(|(a, op)| (self.index[&a], op)))
    }

    fn logical(&self, patch: &PatchLayout, basis: Basis) -> PauliString {
        let (support, op) = match basis {
            Basis::X => (&patch.logical_x_support, PauliOp::X),
            Basis::Z => (&patch.logical_z_support, PauliOp::Z),
        };
        self.string(support.iter().map(|&q| (patch.data_qubits[q], op)))
    }

    fn stabilizers(&self) -> Vec<(String, PauliString)> {
        let mut out = Vec::new();
        for (name, patch) in [("c", &self.control), ("t", &self.target)] {
            for (k, pl) in patch.plaquettes.iter().enumerate() {
                let op = match pl.basis {
                    Basis::X => PauliOp::X,
                    Basis::Z => PauliOp::Z,
                };
                let s = self.string(pl.data_index.iter().map(|&q| (patch.data_qubits[q], op)));
                out.push((format!("{name}.{:?}{}@{:?}", pl.basis, k, pl.corner), s));
            }
        }
        out
    }

    /// Tableau of `circuit` over this setup's qubits.
    pub fn tableau(&self, circuit: &Circuit) -> Result<CliffordTableau> {
        let mut t = CliffordTableau::identity(self.n());
        apply_circuit(&mut t, circuit, |a| self.index.get(a).copied())?;
        Ok(t)
    }
}

/// Whether `p` lies in the group generated by `gens`, sign included.
fn in_group(p: &PauliString, gens: &[PauliString]) -> bool {
    let n = p.len();
    // Gaussian elimination over GF(2) on (x | z), remembering which generators each
    // reduced row combines.
    let width = 2 * n;
    let bits = |s: &PauliString| -> Vec<bool> { (0..n).map(|q| s.x(q)).chain((0..n).map(|q| s.z(q))).collect() };
    let mut rows: Vec<(Vec<bool>, Vec<usize>)> = gens.iter().enumerate().map(|(i, g)| (bits(g), vec![i])).collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for col in 0..width {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i].0[col]) else { continue };
        rows.swap(r, pr);
        for i in 0..rows.len() {
            if i != r && rows[i].0[col] {
                let (src_bits, src_set) = rows[r].clone();
                for (a, b) in rows[i].0.iter_mut().zip(&src_bits) {
                    *a ^= b;
                }
                rows[i].1 = sym_diff(&rows[i].1, &src_set);
            }
        }
        pivots.push((col, r));
        r += 1;
    }
    let mut target = bits(p);
    let mut used: Vec<usize> = Vec::new();
    for &(col, row) in &pivots {
        if target[col] {
            for (a, b) in target.iter_mut().zip(&rows[row].0) {
                *a ^= b;
            }
            used = sym_diff(&used, &rows[row].1);
        }
    }
    if target.iter().any(|&b| b) {
        return false;
    }
    let mut prod = PauliString::identity(n);
    for &g in &used {
        prod.mul_assign(&gens[g]);
    }
    prod == *p
}

fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().filter(|x| !b.contains(x)).chain(b.iter().filter(|x| !a.contains(x))).copied().collect();
    out.sort_unstable();
    out
}

/// Checks an arbitrary two-patch circuit against the logical CNOT relations.
pub fn verify_circuit(setup: &CnotSetup, circuit: &Circuit) -> Result<CnotReport> {
    let t = setup.tableau(circuit)?;
    let (xc, zc) = (setup.logical(&setup.control, Basis::X), setup.logical(&setup.control, Basis::Z));
    let (xt, zt) = (setup.logical(&setup.target, Basis::X), setup.logical(&setup.target, Basis::Z));
    let prod = |a: &PauliString, b: &PauliString| {
        let mut p = a.clone();
        p.mul_assign(b);
        p
    };
    let cases = [
        ("X_c -> X_c X_t", &xc, prod(&xc, &xt)),
        ("Z_c -> Z_c", &zc, zc.clone()),
        ("X_t -> X_t", &xt, xt.clone()),
        ("Z_t -> Z_c Z_t", &zt, prod(&zc, &zt)),
    ];
    let stabs = setup.stabilizers();
    let gens: Vec<PauliString> = stabs.iter().map(|s| s.1.clone()).collect();
    let relations = cases
        .into_iter()
        .map(|(name, input, expected)| {
            let image = t.conjugate(input);
            // Equal up to multiplication by stabilizers.
            let holds = in_group(&prod(&image, &expected), &gens);
            Relation { name: name.into(), holds, image: image.to_string(), expected: expected.to_string() }
        })
        .collect();
    let mut mismatches = Vec::new();
    for (name, g) in &stabs {
        let image = t.conjugate(g);
        let commutes = gens.iter().all(|h| image.commutes_with(h));
        if !commutes || !in_group(&image, &gens) {
            mismatches.push(Mismatch { generator: name.clone(), image: image.to_string() });
        }
    }
    Ok(CnotReport {
        scheme: setup.control.scheme.name().into(),
        d: setup.control.d,
        relations,
        stabilizers_preserved: mismatches.is_empty(),
        mismatches,
    })
}

/// Verifies the transversal CNOT of `scheme` at distance `d`.
pub fn verify_transversal_cnot(scheme: Scheme, d: usize) -> Result<CnotReport> {
    let setup = CnotSetup::new(scheme, d)?;
    verify_circuit(&setup, &setup.circuit()?)
}

/// The transversal CNOT with the `which`-th CNOT_tm removed.
pub fn omit_one_cnot(circuit: &Circuit, which: usize) -> Result<Circuit> {
    let mut c = circuit.clone();
    let mut seen = 0;
    for m in &mut c.moments {
        if let Some(pos) = m.ops.iter().position(|o| {
            let hit = o.kind == OpKind::CnotTM && seen == which;
            if o.kind == OpKind::CnotTM {
                seen += 1;
            }
            hit
        }) {
            m.ops.remove(pos);
            return Ok(c);
        }
    }
    Err(Error::usage(format!("circuit has only {seen} transmon-mode CNOTs")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_and_compact_pass() {
        for scheme in [Scheme::Natural, Scheme::Compact] {
            for d in [3, 5] {
                let r = verify_transversal_cnot(scheme, d).unwrap();
                assert!(r.passed(), "{r}");
            }
        }
    }

    #[test]
    fn baseline_rejected() {
        assert!(matches!(verify_transversal_cnot(Scheme::Baseline2D, 3), Err(Error::Usage(_))));
    }

    #[test]
    fn every_single_omission_is_caught() {
        let s = CnotSetup::new(Scheme::Natural, 3).unwrap();
        let c = s.circuit().unwrap();
        for i in 0..9 {
            let r = verify_circuit(&s, &omit_one_cnot(&c, i).unwrap()).unwrap();
            assert!(!r.passed(), "omitting CNOT {i} went unnoticed");
            assert!(matches!(r.clone().ensure(), Err(Error::Verification(_))));
        }
        assert!(omit_one_cnot(&c, 9).is_err());
    }

    #[test]
    fn applying_twice_is_identity_on_logicals() {
        let s = CnotSetup::new(Scheme::Compact, 3).unwrap();
        let c = s.circuit().unwrap();
        let mut twice = c.clone();
        twice.moments.extend(c.moments.iter().cloned());
        let t = s.tableau(&twice).unwrap();
        for patch in [&s.control, &s.target] {
            for b in [Basis::X, Basis::Z] {
                let l = s.logical(patch, b);
                assert_eq!(t.conjugate(&l), l);
            }
        }
    }

    #[test]
    fn group_membership() {
        let n = 3;
        let zz = PauliString::from_ops(n, [(0, PauliOp::Z), (1, PauliOp::Z)]);
        let z12 = PauliString::from_ops(n, [(1, PauliOp::Z), (2, PauliOp::Z)]);
        let z02 = PauliString::from_ops(n, [(0, PauliOp::Z), (2, PauliOp::Z)]);
        assert!(in_group(&z02, &[zz.clone(), z12.clone()]));
        assert!(!in_group(&PauliString::from_ops(n, [(0, PauliOp::Z)]), &[zz.clone(), z12.clone()]));
        let mut neg = z02.clone();
        neg.sign = true;
        assert!(!in_group(&neg, &[zz, z12]));
    }

    #[test]
    fn measurement_is_rejected() {
        let s = CnotSetup::new(Scheme::Natural, 3).unwrap();
        let hw = HardwareParams::default();
        let c = crate::schedule::syndrome_circuit(&s.control, &hw, crate::schedule::Variant::AllAtOnce, 1).unwrap();
        assert!(matches!(s.tableau(&c), Err(Error::UnsupportedOp(_))));
    }
}
