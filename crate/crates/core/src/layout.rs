//! Rotated surface-code patches for the three embeddings.
//!
//! Data qubit `(i, j)`, `0 ≤ i, j < d`, has dense index `j·d + i`. A plaquette is named
//! by its lower-left corner `(x, y)` with `x, y ∈ [−1, d−1]`; its corners are
//! LL `(x, y)`, LR `(x+1, y)`, UL `(x, y+1)` and UR `(x+1, y+1)`, and it checks X iff
//! `x + y` is even. Boundary half-plaquettes keep X checks on the bottom and top rows and
//! Z checks on the left and right columns.
//!
//! Hardware coordinates live on the 45°-rotated grid, where every data/ancilla pair of a
//! plaquette is a nearest-neighbour pair:
//!
//! ```text
//! data (i, j)       → (i + j,       i − j + d − 1)
//! ancilla (x, y)    → (x + y + 1,   x − y + d − 1)
//! ```
//!
//! Compact halves the first coordinate (`u → ⌊u/2⌋`). That collapses every Z ancilla onto
//! its UR data transmon and every X ancilla onto its LL data transmon; the bottom X and
//! right Z half-plaquettes have no such corner and keep a dedicated transmon.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardware::QubitAddress;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    Baseline2D,
    Natural,
    Compact,
}

impl Scheme {
    pub fn uses_memory(self) -> bool {
        !matches!(self, Scheme::Baseline2D)
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Baseline2D => "baseline",
            Scheme::Natural => "natural",
            Scheme::Compact => "compact",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "baseline" | "baseline2d" | "2d" => Ok(Scheme::Baseline2D),
            "natural" => Ok(Scheme::Natural),
            "compact" => Ok(Scheme::Compact),
            _ => Err(Error::usage(format!("unknown scheme `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    X,
    Z,
}

/// Compact schedule group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Group {
    A,
    B,
    C,
    D,
}

/// Corner slots of a plaquette, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Corner {
    LL = 0,
    LR = 1,
    UL = 2,
    UR = 3,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::LL, Corner::LR, Corner::UL, Corner::UR];

    fn offset(self) -> (i32, i32) {
        match self {
            Corner::LL => (0, 0),
            Corner::LR => (1, 0),
            Corner::UL => (0, 1),
            Corner::UR => (1, 1),
        }
    }
}

/// One stabilizer check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plaquette {
    pub basis: Basis,
    /// Lower-left corner `(x, y)` in data coordinates.
    pub corner: (i32, i32),
    pub ancilla: QubitAddress,
    /// Data home addresses in LL, LR, UL, UR order (present corners only).
    pub data: Vec<QubitAddress>,
    /// Dense data indices, parallel to `data`.
    pub data_index: Vec<usize>,
    /// Dense data index per corner slot.
    pub corners: [Option<usize>; 4],
    pub group: Option<Group>,
    /// Compact only: the data qubit whose transmon doubles as this ancilla.
    pub host: Option<usize>,
}

impl Plaquette {
    pub fn is_boundary(&self) -> bool {
        self.data.len() == 2
    }

    pub fn at(&self, c: Corner) -> Option<usize> {
        self.corners[c as usize]
    }
}

/// Placement, checks and logical operators of one patch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchLayout {
    pub scheme: Scheme,
    pub d: usize,
    /// Cavity mode holding this patch (memory schemes).
    pub z: usize,
    /// Home address of each data qubit: a transmon for Baseline2D, a cavity mode otherwise.
    pub data_qubits: Vec<QubitAddress>,
    /// Transmon each data qubit uses for gates (equal to the home address for Baseline2D).
    pub data_transmons: Vec<QubitAddress>,
    /// Distinct transmons acting as ancillas, in plaquette order.
    pub ancilla_transmons: Vec<QubitAddress>,
    pub plaquettes: Vec<Plaquette>,
    /// Logical X: X on column `i = 0`.
    pub logical_x_support: Vec<usize>,
    /// Logical Z: Z on row `j = 0`.
    pub logical_z_support: Vec<usize>,
    pub transmon_count: usize,
    pub cavity_count: usize,
}

fn data_coords(d: i32, i: i32, j: i32) -> (i32, i32) {
    (i + j, i - j + d - 1)
}

fn ancilla_coords(d: i32, x: i32, y: i32) -> (i32, i32) {
    (x + y + 1, x - y + d - 1)
}

fn plaquette_exists(d: i32, x: i32, y: i32) -> bool {
    let bulk_x = (0..d - 1).contains(&x);
    let bulk_y = (0..d - 1).contains(&y);
    let even = (x + y).rem_euclid(2) == 0;
    if bulk_x && bulk_y {
        return true;
    }
    if bulk_x && y == -1 {
        return even;
    }
    if bulk_x && y == d - 1 {
        return even;
    }
    if bulk_y && x == -1 {
        return !even;
    }
    if bulk_y && x == d - 1 {
        return !even;
    }
    false
}

/// Builds the patch for `scheme` at odd distance `d ≥ 3`, stored in cavity mode `z`.
pub fn build_layout(scheme: Scheme, d: usize, z: usize) -> Result<PatchLayout> {
    if d < 3 || d % 2 == 0 {
        return Err(Error::usage(format!("distance must be odd and at least 3, got {d}")));
    }
    let di = d as i32;
    let compact = matches!(scheme, Scheme::Compact);
    let squash = |(u, v): (i32, i32)| if compact { (u.div_euclid(2), v) } else { (u, v) };

    let mut data_qubits = Vec::with_capacity(d * d);
    let mut data_transmons = Vec::with_capacity(d * d);
    for j in 0..di {
        for i in 0..di {
            let (x, y) = squash(data_coords(di, i, j));
            let t = QubitAddress::Transmon { x, y };
            data_transmons.push(t);
            data_qubits.push(if scheme.uses_memory() { t.mode(z) } else { t });
        }
    }

    let mut plaquettes = Vec::with_capacity(d * d - 1);
    for y in -1..di {
        for x in -1..di {
            if !plaquette_exists(di, x, y) {
                continue;
            }
            let basis = if (x + y).rem_euclid(2) == 0 { Basis::X } else { Basis::Z };
            let mut corners = [None; 4];
            for c in Corner::ALL {
                let (dx, dy) = c.offset();
                let (i, j) = (x + dx, y + dy);
                if (0..di).contains(&i) && (0..di).contains(&j) {
                    corners[c as usize] = Some((j * di + i) as usize);
                }
            }
            let data_index: Vec<usize> = corners.iter().flatten().copied().collect();
            let data = data_index.iter().map(|&q| data_qubits[q]).collect();
            let (ax, ay) = squash(ancilla_coords(di, x, y));
            let ancilla = QubitAddress::Transmon { x: ax, y: ay };
            let (group, host) = if compact {
                let group = match (basis, x.rem_euclid(2) == 0) {
                    (Basis::Z, true) => Group::A,
                    (Basis::Z, false) => Group::B,
                    (Basis::X, true) => Group::C,
                    (Basis::X, false) => Group::D,
                };
                let slot = if basis == Basis::Z { Corner::UR } else { Corner::LL };
                let host = corners[slot as usize];
                if let Some(h) = host {
                    debug_assert_eq!(data_transmons[h], ancilla);
                }
                (Some(group), host)
            } else {
                (None, None)
            };
            plaquettes.push(Plaquette { basis, corner: (x, y), ancilla, data, data_index, corners, group, host });
        }
    }

    let ancilla_transmons: Vec<QubitAddress> = plaquettes.iter().map(|p| p.ancilla).collect();
    let mut transmons: BTreeSet<QubitAddress> = data_transmons.iter().copied().collect();
    transmons.extend(ancilla_transmons.iter().copied());

    let logical_x_support = (0..d).map(|j| j * d).collect();
    let logical_z_support = (0..d).collect();

    Ok(PatchLayout {
        scheme,
        d,
        z,
        data_qubits,
        data_transmons,
        ancilla_transmons,
        plaquettes,
        logical_x_support,
        logical_z_support,
        transmon_count: transmons.len(),
        cavity_count: if scheme.uses_memory() { d * d } else { 0 },
    })
}

/// Supports (dense data indices) of logical X and logical Z.
pub fn logical_operators(layout: &PatchLayout) -> (Vec<usize>, Vec<usize>) {
    (layout.logical_x_support.clone(), layout.logical_z_support.clone())
}

impl PatchLayout {
    pub fn num_data(&self) -> usize {
        self.data_qubits.len()
    }

    pub fn data_coord(&self, q: usize) -> (usize, usize) {
        (q % self.d, q / self.d)
    }

    pub fn data_at(&self, i: usize, j: usize) -> usize {
        j * self.d + i
    }

    /// Indices of the plaquettes of `basis`, in layout order.
    pub fn plaquettes_of(&self, basis: Basis) -> Vec<usize> {
        (0..self.plaquettes.len()).filter(|&k| self.plaquettes[k].basis == basis).collect()
    }

    /// Logical support whose parity a `detects`-basis check sector protects:
    /// Z checks see X errors, which flip logical Z (row 0); X checks pair with logical X.
    pub fn sector_logical_support(&self, detects: Basis) -> &[usize] {
        match detects {
            Basis::Z => &self.logical_z_support,
            Basis::X => &self.logical_x_support,
        }
    }

    /// Whether a data qubit lies in the bulk (not on the patch edge).
    pub fn is_bulk_data(&self, q: usize) -> bool {
        let (i, j) = self.data_coord(q);
        i > 0 && j > 0 && i + 1 < self.d && j + 1 < self.d
    }

    /// Every hardware location the patch touches: data homes, data transmons, ancillas.
    pub fn sites(&self) -> Vec<QubitAddress> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let all = self.data_qubits.iter().chain(&self.data_transmons).chain(&self.ancilla_transmons);
        for &a in all {
            if seen.insert(a) {
                out.push(a);
            }
        }
        out
    }

    /// Map from data transmon to data index.
    pub fn data_by_transmon(&self) -> HashMap<QubitAddress, usize> {
        self.data_transmons.iter().enumerate().map(|(q, &t)| (t, q)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
