//! Hardware parameters for the transmon + cavity grid and the conversion of
//! durations into idle Pauli-error probabilities.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-qubit gate error at which the default coherence times are quoted.
pub const P_REF: f64 = 2e-3;

/// Coherence times, gate durations, gate error probabilities and cavity depth.
///
/// Durations and coherence times are in seconds. A non-finite coherence time means
/// the corresponding location never decays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HardwareParams {
    pub t1_transmon: f64,
    pub t1_cavity: f64,
    pub dur_1q: f64,
    pub dur_2q_tt: f64,
    pub dur_2q_tm: f64,
    pub dur_loadstore: f64,
    pub dur_meas_reset: f64,
    pub p_2q_tt: f64,
    pub p_2q_tm: f64,
    pub p_1q: f64,
    pub p_loadstore: f64,
    pub p_meas: f64,
    pub cavity_depth: usize,
}

impl Default for HardwareParams {
    fn default() -> Self {
        Self {
            t1_transmon: 100e-6,
            t1_cavity: 1e-3,
            dur_1q: 50e-9,
            dur_2q_tt: 200e-9,
            dur_2q_tm: 200e-9,
            dur_loadstore: 150e-9,
            dur_meas_reset: 300e-9,
            p_2q_tt: P_REF,
            p_2q_tm: P_REF,
            p_1q: P_REF,
            p_loadstore: P_REF,
            p_meas: P_REF,
            cavity_depth: 10,
        }
    }
}

impl HardwareParams {
    pub fn validate(&self) -> Result<()> {
        let durations = [
            ("dur_1q", self.dur_1q),
            ("dur_2q_tt", self.dur_2q_tt),
            ("dur_2q_tm", self.dur_2q_tm),
            ("dur_loadstore", self.dur_loadstore),
            ("dur_meas_reset", self.dur_meas_reset),
        ];
        for (name, v) in durations {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::usage(format!("{name} must be a finite non-negative duration, got {v}")));
            }
        }
        for (name, v) in [("t1_transmon", self.t1_transmon), ("t1_cavity", self.t1_cavity)] {
            if !(v > 0.0) {
                return Err(Error::usage(format!("{name} must be positive, got {v}")));
            }
        }
        let probs = [
            ("p_2q_tt", self.p_2q_tt),
            ("p_2q_tm", self.p_2q_tm),
            ("p_1q", self.p_1q),
            ("p_loadstore", self.p_loadstore),
            ("p_meas", self.p_meas),
        ];
        for (name, v) in probs {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::usage(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        if self.cavity_depth < 1 {
            return Err(Error::usage("cavity_depth must be at least 1"));
        }
        Ok(())
    }

    /// Parses a flat JSON object; missing keys keep their defaults.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let p: HardwareParams = serde_json::from_str(s)?;
        p.validate()?;
        Ok(p)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// Idle probability for a transmon over `dt`.
    pub fn transmon_idle(&self, dt: f64) -> f64 {
        idle_prob_lenient(dt, self.t1_transmon)
    }

    pub fn cavity_idle(&self, dt: f64) -> f64 {
        idle_prob_lenient(dt, self.t1_cavity)
    }
}

/// Where a physical qubit lives: a transmon on the grid or a mode of the cavity under it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QubitAddress {
    Transmon { x: i32, y: i32 },
    CavityMode { x: i32, y: i32, z: usize },
}

impl QubitAddress {
    pub fn is_transmon(self) -> bool {
        matches!(self, QubitAddress::Transmon { .. })
    }

    pub fn is_mode(self) -> bool {
        matches!(self, QubitAddress::CavityMode { .. })
    }

    pub fn xy(self) -> (i32, i32) {
        match self {
            QubitAddress::Transmon { x, y } | QubitAddress::CavityMode { x, y, .. } => (x, y),
        }
    }

    /// The transmon sitting on top of this location (itself for a transmon).
    pub fn transmon(self) -> QubitAddress {
        let (x, y) = self.xy();
        QubitAddress::Transmon { x, y }
    }

    pub fn mode(self, z: usize) -> QubitAddress {
        let (x, y) = self.xy();
        QubitAddress::CavityMode { x, y, z }
    }
}

impl std::fmt::Display for QubitAddress {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QubitAddress::Transmon { x, y } => write!(f, "T({x},{y})"),
            QubitAddress::CavityMode { x, y, z } => write!(f, "M({x},{y};{z})"),
        }
    }
}

/// Probability `1 − exp(−dt/t1)` that a qubit decays while idling for `dt`.
pub fn idle_error_prob(dt: f64, t1: f64) -> Result<f64> {
    if !(t1 > 0.0) {
        return Err(Error::usage(format!("t1 must be positive, got {t1}")));
    }
    if !(dt >= 0.0) {
        return Err(Error::usage(format!("dt must be non-negative, got {dt}")));
    }
    Ok(idle_prob_lenient(dt, t1))
}

fn idle_prob_lenient(dt: f64, t1: f64) -> f64 {
    if dt <= 0.0 || t1.is_infinite() {
        return 0.0;
    }
    (-(-dt / t1).exp_m1()).clamp(0.0, 1.0)
}

/// Derives a full parameter set from one physical error rate `p`.
///
/// Every gate, load/store and measurement probability is set to `p`, and coherence
/// times scale as `T1_ref · P_REF / p`. At `p = 0` coherence is infinite.
pub fn params_from_p(p: f64, reference: &HardwareParams) -> Result<HardwareParams> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::usage(format!("p must lie in [0, 1], got {p}")));
    }
    let scale = if p == 0.0 { f64::INFINITY } else { P_REF / p };
    Ok(HardwareParams {
        t1_transmon: reference.t1_transmon * scale,
        t1_cavity: reference.t1_cavity * scale,
        p_2q_tt: p,
        p_2q_tm: p,
        p_1q: p,
        p_loadstore: p,
        p_meas: p,
        ..reference.clone()
    })
}
