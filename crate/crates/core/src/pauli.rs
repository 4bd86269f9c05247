//! Single-qubit Pauli algebra and bit-packed Pauli frames.
//!
//! A [`PauliFrame`] stores the X and Z components of an n-qubit Pauli error as two
//! packed bit vectors. Global phase is discarded: only the error support matters for
//! syndrome statistics, so composition reduces to XOR on both bit planes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the four single-qubit Paulis, phase-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

impl PauliOp {
    pub const ALL: [PauliOp; 4] = [PauliOp::I, PauliOp::X, PauliOp::Y, PauliOp::Z];
    pub const NON_IDENTITY: [PauliOp; 3] = [PauliOp::X, PauliOp::Y, PauliOp::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliOp::I,
            (true, false) => PauliOp::X,
            (true, true) => PauliOp::Y,
            (false, true) => PauliOp::Z,
        }
    }

    pub fn xbit(self) -> bool {
        matches!(self, PauliOp::X | PauliOp::Y)
    }

    pub fn zbit(self) -> bool {
        matches!(self, PauliOp::Z | PauliOp::Y)
    }

    /// Product up to phase.
    pub fn compose(self, other: PauliOp) -> PauliOp {
        PauliOp::from_bits(self.xbit() ^ other.xbit(), self.zbit() ^ other.zbit())
    }

    pub fn commutes_with(self, other: PauliOp) -> bool {
        !((self.xbit() & other.zbit()) ^ (self.zbit() & other.xbit()))
    }
}

/// Gate kinds understood by frame propagation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    Identity,
    H,
    /// Operands are `[control, target]`.
    Cnot,
    /// Perfect state exchange; used for cavity loads and stores.
    Swap,
}

impl Gate {
    pub fn arity(self) -> usize {
        match self {
            Gate::Identity | Gate::H => 1,
            Gate::Cnot | Gate::Swap => 2,
        }
    }
}

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
pub(crate) fn get_bit(words: &[u64], i: usize) -> bool {
    (words[i >> 6] >> (i & 63)) & 1 == 1
}

#[inline]
pub(crate) fn flip_bit(words: &mut [u64], i: usize) {
    words[i >> 6] ^= 1 << (i & 63);
}

#[inline]
pub(crate) fn set_bit(words: &mut [u64], i: usize, value: bool) {
    let mask = 1u64 << (i & 63);
    if value {
        words[i >> 6] |= mask;
    } else {
        words[i >> 6] &= !mask;
    }
}

/// Phase-free n-qubit Pauli error, bit-packed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliFrame {
    n: usize,
    xbits: Vec<u64>,
    zbits: Vec<u64>,
}

impl PauliFrame {
    pub fn new(n: usize) -> Self {
        let w = words_for(n);
        Self { n, xbits: vec![0; w], zbits: vec![0; w] }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_identity(&self) -> bool {
        self.xbits.iter().chain(&self.zbits).all(|&w| w == 0)
    }

    pub fn clear(&mut self) {
        self.xbits.fill(0);
        self.zbits.fill(0);
    }

    #[inline]
    pub fn x(&self, q: usize) -> bool {
        get_bit(&self.xbits, q)
    }

    #[inline]
    pub fn z(&self, q: usize) -> bool {
        get_bit(&self.zbits, q)
    }

    pub fn get(&self, q: usize) -> PauliOp {
        PauliOp::from_bits(self.x(q), self.z(q))
    }

    pub fn xbits(&self) -> &[u64] {
        &self.xbits
    }

    pub fn zbits(&self) -> &[u64] {
        &self.zbits
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::usage(format!("qubit {q} out of range for {}-qubit frame", self.n)));
        }
        Ok(())
    }

    /// Multiplies a single-qubit Pauli into the frame.
    pub fn apply_pauli(&mut self, q: usize, op: PauliOp) -> Result<()> {
        self.check(q)?;
        self.apply_pauli_unchecked(q, op);
        Ok(())
    }

    #[inline]
    pub(crate) fn apply_pauli_unchecked(&mut self, q: usize, op: PauliOp) {
        if op.xbit() {
            flip_bit(&mut self.xbits, q);
        }
        if op.zbit() {
            flip_bit(&mut self.zbits, q);
        }
    }

    #[inline]
    pub(crate) fn flip_z(&mut self, q: usize) {
        flip_bit(&mut self.zbits, q);
    }

    pub(crate) fn reset_qubit(&mut self, q: usize) {
        set_bit(&mut self.xbits, q, false);
        set_bit(&mut self.zbits, q, false);
    }

    /// XOR composition with another frame of the same size.
    pub fn compose(&mut self, other: &PauliFrame) -> Result<()> {
        if other.n != self.n {
            return Err(Error::usage(format!(
                "cannot compose {}-qubit frame with {}-qubit frame",
                self.n, other.n
            )));
        }
        for (a, b) in self.xbits.iter_mut().zip(&other.xbits) {
            *a ^= b;
        }
        for (a, b) in self.zbits.iter_mut().zip(&other.zbits) {
            *a ^= b;
        }
        Ok(())
    }

    /// Conjugates the frame by `gate` acting on `qubits`.
    pub fn apply_gate(&mut self, gate: Gate, qubits: &[usize]) -> Result<()> {
        if qubits.len() != gate.arity() {
            return Err(Error::usage(format!(
                "{gate:?} takes {} operands, got {}",
                gate.arity(),
                qubits.len()
            )));
        }
        for &q in qubits {
            self.check(q)?;
        }
        if gate.arity() == 2 && qubits[0] == qubits[1] {
            return Err(Error::usage(format!("{gate:?} operands must differ")));
        }
        match gate {
            Gate::Identity => {}
            Gate::H => self.h(qubits[0]),
            Gate::Cnot => self.cnot(qubits[0], qubits[1]),
            Gate::Swap => self.swap(qubits[0], qubits[1]),
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn h(&mut self, q: usize) {
        let x = self.x(q);
        let z = self.z(q);
        if x != z {
            flip_bit(&mut self.xbits, q);
            flip_bit(&mut self.zbits, q);
        }
    }

    #[inline]
    pub(crate) fn cnot(&mut self, c: usize, t: usize) {
        if self.x(c) {
            flip_bit(&mut self.xbits, t);
        }
        if self.z(t) {
            flip_bit(&mut self.zbits, c);
        }
    }

    #[inline]
    pub(crate) fn swap(&mut self, a: usize, b: usize) {
        let (xa, za) = (self.x(a), self.z(a));
        let (xb, zb) = (self.x(b), self.z(b));
        set_bit(&mut self.xbits, a, xb);
        set_bit(&mut self.zbits, a, zb);
        set_bit(&mut self.xbits, b, xa);
        set_bit(&mut self.zbits, b, za);
    }

    /// Indices whose X bit is set.
    pub fn x_support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.x(q)).collect()
    }

    pub fn z_support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.z(q)).collect()
    }
}

/// Applies `gate` to a copy of `frame`.
pub fn frame_apply_gate(frame: &PauliFrame, gate: Gate, qubits: &[usize]) -> Result<PauliFrame> {
    let mut out = frame.clone();
    out.apply_gate(gate, qubits)?;
    Ok(out)
}
