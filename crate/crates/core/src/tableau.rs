//! Stabilizer tableau with sign tracking, used to check what a Clifford circuit does
//! to logical operators and stabilizer generators.
//!
//! Row `i` holds the image of `X_i` and row `n + i` the image of `Z_i` under the
//! circuit applied so far (Heisenberg picture, `U P U†`). Gate updates follow the
//! Aaronson–Gottesman rules.

use std::fmt;

use crate::error::{Error, Result};
use crate::hardware::QubitAddress;
use crate::pauli::{flip_bit, get_bit, words_for, PauliOp};
use crate::schedule::{Circuit, OpKind};

/// Hermitian Pauli string with a sign: `(-1)^sign · ⊗ σ(x_q, z_q)` where `σ(1,1) = Y`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    pub sign: bool,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        Self { n, x: vec![0; w], z: vec![0; w], sign: false }
    }

    /// Builds a string from `(qubit, pauli)` pairs; repeated qubits compose up to phase.
    pub fn from_ops(n: usize, ops: impl IntoIterator<Item = (usize, PauliOp)>) -> Self {
        let mut s = Self::identity(n);
        for (q, op) in ops {
            assert!(q < n, "qubit {q} out of range");
            if op.xbit() {
                flip_bit(&mut s.x, q);
            }
            if op.zbit() {
                flip_bit(&mut s.z, q);
            }
        }
        s
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn x(&self, q: usize) -> bool {
        get_bit(&self.x, q)
    }

    pub fn z(&self, q: usize) -> bool {
        get_bit(&self.z, q)
    }

    pub fn get(&self, q: usize) -> PauliOp {
        PauliOp::from_bits(self.x(q), self.z(q))
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.x(q) || self.z(q)).collect()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let mut parity = 0u32;
        for i in 0..self.x.len() {
            parity ^= ((self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i])).count_ones() & 1;
        }
        parity == 0
    }

    /// Equality of the Pauli part, ignoring sign.
    pub fn same_support_ops(&self, other: &PauliString) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    /// In-place `self ← self · other`, tracking the sign.
    ///
    /// Panics if the product is anti-Hermitian, i.e. the operands anticommute.
    pub fn mul_assign(&mut self, other: &PauliString) {
        let e = self.mul_phase_exponent(other);
        assert!(e % 2 == 0, "product of anticommuting Paulis is not Hermitian");
        self.sign ^= other.sign ^ (e == 2);
        for i in 0..self.x.len() {
            self.x[i] ^= other.x[i];
            self.z[i] ^= other.z[i];
        }
    }

    /// Exponent `e` (mod 4) such that `σ(self)·σ(other) = i^e σ(self ⊕ other)`, signs excluded.
    fn mul_phase_exponent(&self, other: &PauliString) -> u32 {
        let mut e: i64 = 0;
        for q in 0..self.n {
            e += g(self.x(q), self.z(q), other.x(q), other.z(q)) as i64;
        }
        e.rem_euclid(4) as u32
    }
}

/// Exponent of `i` picked up by `σ(x1,z1)·σ(x2,z2)`.
fn g(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
    let (x1, z1, x2, z2) = (x1 as i32, z1 as i32, x2 as i32, z2 as i32);
    match (x1, z1) {
        (0, 0) => 0,
        (1, 1) => z2 - x2,
        (1, 0) => z2 * (2 * x2 - 1),
        _ => x2 * (1 - 2 * z2),
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.sign { '-' } else { '+' })?;
        for q in 0..self.n {
            let c = match self.get(q) {
                PauliOp::I => '_',
                PauliOp::X => 'X',
                PauliOp::Y => 'Y',
                PauliOp::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliffordTableau {
    n: usize,
    rows: Vec<PauliString>,
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        let mut rows = Vec::with_capacity(2 * n);
        for q in 0..n {
            rows.push(PauliString::from_ops(n, [(q, PauliOp::X)]));
        }
        for q in 0..n {
            rows.push(PauliString::from_ops(n, [(q, PauliOp::Z)]));
        }
        Self { n, rows }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Image of `X_q`.
    pub fn x_image(&self, q: usize) -> &PauliString {
        &self.rows[q]
    }

    /// Image of `Z_q`.
    pub fn z_image(&self, q: usize) -> &PauliString {
        &self.rows[self.n + q]
    }

    fn check(&self, qs: &[usize]) -> Result<()> {
        for &q in qs {
            if q >= self.n {
                return Err(Error::usage(format!("qubit {q} out of range for {}-qubit tableau", self.n)));
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::usage("two-qubit gate operands must differ"));
        }
        Ok(())
    }

    pub fn h(&mut self, a: usize) -> Result<()> {
        self.check(&[a])?;
        let (w, m) = (a >> 6, 1u64 << (a & 63));
        for r in &mut self.rows {
            let xa = r.x[w] & m != 0;
            let za = r.z[w] & m != 0;
            r.sign ^= xa & za;
            if xa != za {
                r.x[w] ^= m;
                r.z[w] ^= m;
            }
        }
        Ok(())
    }

    pub fn s(&mut self, a: usize) -> Result<()> {
        self.check(&[a])?;
        let (w, m) = (a >> 6, 1u64 << (a & 63));
        for r in &mut self.rows {
            let xa = r.x[w] & m != 0;
            let za = r.z[w] & m != 0;
            r.sign ^= xa & za;
            if xa {
                r.z[w] ^= m;
            }
        }
        Ok(())
    }

    pub fn cnot(&mut self, c: usize, t: usize) -> Result<()> {
        self.check(&[c, t])?;
        for r in &mut self.rows {
            let (xc, zc, xt, zt) = (r.x(c), r.z(c), r.x(t), r.z(t));
            r.sign ^= xc & zt & (xt == zc);
            if xc {
                flip_bit(&mut r.x, t);
            }
            if zt {
                flip_bit(&mut r.z, c);
            }
        }
        Ok(())
    }

    pub fn swap(&mut self, a: usize, b: usize) -> Result<()> {
        self.check(&[a, b])?;
        for r in &mut self.rows {
            let (xa, za, xb, zb) = (r.x(a), r.z(a), r.x(b), r.z(b));
            if xa != xb {
                flip_bit(&mut r.x, a);
                flip_bit(&mut r.x, b);
            }
            if za != zb {
                flip_bit(&mut r.z, a);
                flip_bit(&mut r.z, b);
            }
        }
        Ok(())
    }

    /// `U P U†` for an arbitrary Pauli string `P`.
    pub fn conjugate(&self, p: &PauliString) -> PauliString {
        assert_eq!(p.n, self.n);
        let mut acc = PauliString::identity(self.n);
        // P = sign · Π_q i^{x_q z_q} X_q^{x_q} Z_q^{z_q}
        let mut extra_i = 0u32;
        for q in 0..self.n {
            let (x, z) = (p.x(q), p.z(q));
            if x && z {
                extra_i += 1;
            }
            if x {
                acc.mul_assign_unchecked(&self.rows[q], &mut extra_i);
            }
            if z {
                acc.mul_assign_unchecked(&self.rows[self.n + q], &mut extra_i);
            }
        }
        let e = extra_i % 4;
        debug_assert!(e % 2 == 0);
        acc.sign ^= p.sign ^ (e == 2);
        acc
    }

    /// Checks that rows `i` and `n+i` anticommute and all other pairs commute.
    pub fn is_symplectic(&self) -> bool {
        for i in 0..2 * self.n {
            for j in (i + 1)..2 * self.n {
                let expect_anti = j == i + self.n;
                if self.rows[i].commutes_with(&self.rows[j]) == expect_anti {
                    return false;
                }
            }
        }
        true
    }
}

impl PauliString {
    /// Product that may pass through anti-Hermitian intermediates; the `i` exponent is
    /// accumulated into `extra_i` instead of being folded into the sign.
    fn mul_assign_unchecked(&mut self, other: &PauliString, extra_i: &mut u32) {
        let e = self.mul_phase_exponent(other);
        *extra_i += e;
        self.sign ^= other.sign;
        for i in 0..self.x.len() {
            self.x[i] ^= other.x[i];
            self.z[i] ^= other.z[i];
        }
    }
}

/// Appends a noiseless scheduled circuit to `t`, with `index` mapping addresses to tableau
/// qubits.
///
/// Load and Store act as SWAP between transmon and mode. Reset and Idle act as identity,
/// which is exact when the reset qubit is already in `|0⟩`. Measurement is rejected.
pub fn apply_circuit(t: &mut CliffordTableau, circuit: &Circuit, index: impl Fn(&QubitAddress) -> Option<usize>) -> Result<()> {
    let idx = |a: &QubitAddress| index(a).ok_or_else(|| Error::usage(format!("qubit {a} has no tableau index")));
    for op in circuit.ops() {
        match op.kind {
            OpKind::H => t.h(idx(&op.operands[0])?)?,
            OpKind::CnotTT | OpKind::CnotTM => t.cnot(idx(&op.operands[0])?, idx(&op.operands[1])?)?,
            OpKind::Load | OpKind::Store => t.swap(idx(&op.operands[0])?, idx(&op.operands[1])?)?,
            OpKind::Reset | OpKind::Idle => {}
            OpKind::Measure => {
                return Err(Error::UnsupportedOp("measurement cannot be applied to a Clifford tableau".into()));
            }
        }
    }
    Ok(())
}
