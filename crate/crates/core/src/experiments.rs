//! Memory-experiment sweeps: threshold scans over `p`, single-parameter sensitivity
//! scans, crossing-point estimation and CSV output.
//!
//! A point builds its layout, circuit, compiled sampler and both matching graphs once,
//! then runs trials in fixed-size chunks on a rayon pool. Trial `i` of a point always
//! draws from stream `i` of a generator keyed by the point seed, so failure counts do not
//! depend on the worker count or on chunk scheduling.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::ops::Range;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoder::{Decoder, MatchingGraph};
use crate::dem::build_error_model;
use crate::error::{Error, Result};
use crate::hardware::{params_from_p, HardwareParams};
use crate::layout::{build_layout, Basis, PatchLayout, Scheme};
use crate::montecarlo::{trial_rng, CompiledCircuit, Scratch};
use crate::pauli::get_bit;
use crate::schedule::{syndrome_circuit, Variant};

/// Trials handed to one task; results never depend on it.
const CHUNK: u64 = 512;

/// One of the five studied memory setups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Setup {
    pub scheme: Scheme,
    pub variant: Variant,
}

impl Setup {
    pub const BASELINE: Setup = Setup { scheme: Scheme::Baseline2D, variant: Variant::AllAtOnce };

    pub const ALL: [Setup; 5] = [
        Setup::BASELINE,
        Setup { scheme: Scheme::Natural, variant: Variant::AllAtOnce },
        Setup { scheme: Scheme::Natural, variant: Variant::Interleaved },
        Setup { scheme: Scheme::Compact, variant: Variant::AllAtOnce },
        Setup { scheme: Scheme::Compact, variant: Variant::Interleaved },
    ];

    pub fn new(scheme: Scheme, variant: Variant) -> Self {
        // The 2D baseline has a single schedule.
        if scheme == Scheme::Baseline2D {
            return Setup::BASELINE;
        }
        Setup { scheme, variant }
    }

    /// Variant column value; the baseline has none.
    pub fn variant_name(&self) -> &'static str {
        if self.scheme == Scheme::Baseline2D {
            "none"
        } else {
            self.variant.name()
        }
    }

    fn index(&self) -> u64 {
        Setup::ALL.iter().position(|s| s == self).expect("normalized setup") as u64
    }
}

impl fmt::Display for Setup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scheme == Scheme::Baseline2D {
            f.write_str("baseline")
        } else {
            write!(f, "{}-{}", self.scheme.name(), self.variant.name())
        }
    }
}

impl FromStr for Setup {
    type Err = Error;

    /// Accepts `baseline`, `natural-interleaved`, `compact-all-at-once`, `compact-aao`, ...
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase().replace('_', "-");
        if let Ok(scheme @ Scheme::Baseline2D) = s.parse::<Scheme>() {
            return Ok(Setup::new(scheme, Variant::AllAtOnce));
        }
        let (scheme, variant) = s
            .split_once('-')
            .ok_or_else(|| Error::usage(format!("setup `{s}` needs a variant, e.g. `{s}-interleaved`")))?;
        Ok(Setup::new(scheme.parse()?, variant.parse()?))
    }
}

impl TryFrom<String> for Setup {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Setup> for String {
    fn from(s: Setup) -> String {
        s.to_string()
    }
}

/// A swept quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    /// Physical error rate; sets every channel and scales coherence times.
    P,
    P2qTt,
    P2qTm,
    PLoadstore,
    T1Cavity,
    T1Transmon,
    DurLoadstore,
    /// Cavity depth; regenerates the schedule.
    K,
}

impl SweepParam {
    pub const SENSITIVITY: [SweepParam; 7] = [
        SweepParam::P2qTt,
        SweepParam::P2qTm,
        SweepParam::PLoadstore,
        SweepParam::T1Cavity,
        SweepParam::T1Transmon,
        SweepParam::DurLoadstore,
        SweepParam::K,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::P => "p",
            SweepParam::P2qTt => "p_2q_tt",
            SweepParam::P2qTm => "p_2q_tm",
            SweepParam::PLoadstore => "p_loadstore",
            SweepParam::T1Cavity => "t1_cavity",
            SweepParam::T1Transmon => "t1_transmon",
            SweepParam::DurLoadstore => "dur_loadstore",
            SweepParam::K => "k",
        }
    }

    /// Pins this parameter in `hw`.
    pub fn apply(self, hw: &mut HardwareParams, value: f64) -> Result<()> {
        match self {
            SweepParam::P => *hw = params_from_p(value, hw)?,
            SweepParam::P2qTt => hw.p_2q_tt = value,
            SweepParam::P2qTm => hw.p_2q_tm = value,
            SweepParam::PLoadstore => hw.p_loadstore = value,
            SweepParam::T1Cavity => hw.t1_cavity = value,
            SweepParam::T1Transmon => hw.t1_transmon = value,
            SweepParam::DurLoadstore => hw.dur_loadstore = value,
            SweepParam::K => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(Error::usage(format!("cavity depth must be a positive integer, got {value}")));
                }
                hw.cavity_depth = value as usize;
            }
        }
        hw.validate()
    }
}

impl FromStr for SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let all = [SweepParam::P].into_iter().chain(SweepParam::SENSITIVITY);
        let key = s.trim().to_ascii_lowercase();
        let key = if key == "cavity_depth" { "k".to_string() } else { key };
        all.into_iter().find(|p| p.name() == key).ok_or_else(|| {
            Error::usage(format!(
                "unknown parameter `{s}` (expected one of p, p_2q_tt, p_2q_tm, p_loadstore, t1_cavity, t1_transmon, dur_loadstore, k)"
            ))
        })
    }
}

fn default_setup() -> Setup {
    Setup::BASELINE
}

/// Everything that determines a sweep's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_setup")]
    pub setup: Setup,
    /// Odd code distances.
    pub distances: Vec<usize>,
    /// Physical error rates for a threshold sweep.
    pub p_values: Vec<f64>,
    pub trials_per_point: u64,
    /// Cavity depth.
    pub k: usize,
    pub seed: u64,
    /// Noisy rounds per trial; `None` means `d`.
    pub rounds: Option<usize>,
    /// Error rate of the sensitivity operating point.
    pub operating_p: f64,
    /// Parameters pinned after `p` scaling, keyed by [`SweepParam::name`].
    pub overrides: BTreeMap<String, f64>,
    /// Parameters for `p = P_REF`; coherence times scale from these.
    pub reference: HardwareParams,
    /// Worker threads; `None` uses rayon's default.
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            setup: Setup::BASELINE,
            distances: vec![3, 5, 7],
            p_values: vec![1e-3, 2e-3, 4e-3, 8e-3],
            trials_per_point: 100_000,
            k: 10,
            seed: 0,
            rounds: None,
            operating_p: 2e-3,
            overrides: BTreeMap::new(),
            reference: HardwareParams::default(),
            workers: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials_per_point == 0 {
            return Err(Error::usage("trials_per_point must be at least 1"));
        }
        if self.distances.is_empty() {
            return Err(Error::usage("at least one distance is required"));
        }
        if let Some(d) = self.distances.iter().find(|&&d| d < 3 || d % 2 == 0) {
            return Err(Error::usage(format!("distances must be odd and at least 3, got {d}")));
        }
        if let Some(p) = self.p_values.iter().find(|&&p| !(p > 0.0 && p <= 1.0)) {
            return Err(Error::usage(format!("p values must lie in (0, 1], got {p}")));
        }
        if self.k == 0 {
            return Err(Error::usage("cavity depth k must be at least 1"));
        }
        if self.rounds == Some(0) {
            return Err(Error::usage("rounds must be at least 1"));
        }
        if self.workers == Some(0) {
            return Err(Error::usage("workers must be at least 1"));
        }
        for name in self.overrides.keys() {
            if name.parse::<SweepParam>()? == SweepParam::P {
                return Err(Error::usage("`p` cannot be pinned as an override"));
            }
        }
        self.reference.validate()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s).map_err(|e| Error::usage(format!("bad experiment config: {e}")))?;
        Ok(c)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// Hardware parameters for one sweep point.
    pub fn hardware(&self, param: SweepParam, value: f64) -> Result<HardwareParams> {
        let p = if param == SweepParam::P { value } else { self.operating_p };
        let mut hw = params_from_p(p, &self.reference)?;
        hw.cavity_depth = self.k;
        for (name, &v) in &self.overrides {
            name.parse::<SweepParam>()?.apply(&mut hw, v)?;
        }
        if param != SweepParam::P {
            param.apply(&mut hw, value)?;
        }
        hw.validate()?;
        Ok(hw)
    }

    pub fn rounds_for(&self, d: usize) -> usize {
        self.rounds.unwrap_or(d)
    }
}

/// Outcome of one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scheme: String,
    pub variant: String,
    pub d: usize,
    pub k: usize,
    pub param_name: String,
    pub param_value: f64,
    pub trials: u64,
    pub failures: u64,
    pub logical_error_rate: f64,
    pub stderr: f64,
    pub seed: u64,
}

impl ResultRow {
    pub fn new(setup: Setup, d: usize, k: usize, param: SweepParam, value: f64, trials: u64, failures: u64, seed: u64) -> Self {
        let (rate, stderr) = binomial_rate(failures, trials);
        Self {
            scheme: setup.scheme.name().to_string(),
            variant: setup.variant_name().to_string(),
            d,
            k,
            param_name: param.name().to_string(),
            param_value: value,
            trials,
            failures,
            logical_error_rate: rate,
            stderr,
            seed,
        }
    }

    /// Combines two batches of the same point.
    pub fn merge(&self, other: &ResultRow) -> Result<ResultRow> {
        let same = self.scheme == other.scheme
            && self.variant == other.variant
            && self.d == other.d
            && self.k == other.k
            && self.param_name == other.param_name
            && self.param_value == other.param_value;
        if !same {
            return Err(Error::usage("cannot merge rows of different points"));
        }
        let trials = self.trials + other.trials;
        let failures = self.failures + other.failures;
        let (rate, stderr) = binomial_rate(failures, trials);
        Ok(ResultRow { trials, failures, logical_error_rate: rate, stderr, ..self.clone() })
    }
}

fn binomial_rate(failures: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 0.0);
    }
    let r = failures as f64 / trials as f64;
    (r, (r * (1.0 - r) / trials as f64).sqrt())
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one sweep point, derived from the master seed and the point's coordinates.
pub fn point_seed(master: u64, setup: Setup, d: usize, k: usize, param: SweepParam, value: f64) -> u64 {
    let tag = param.name().bytes().fold(0u64, |h, b| splitmix(h ^ b as u64));
    [setup.index(), d as u64, k as u64, tag, value.to_bits()].into_iter().fold(splitmix(master), |h, x| splitmix(h ^ x))
}

/// One sector's decoding context.
struct SectorCtx {
    graph: MatchingGraph,
    support: Vec<usize>,
}

/// Sampler plus decoders for one (setup, d, hardware) point.
pub struct PointSimulator {
    pub layout: PatchLayout,
    pub compiled: CompiledCircuit,
    sectors: Vec<SectorCtx>,
}

impl PointSimulator {
    pub fn new(setup: Setup, d: usize, hw: &HardwareParams, rounds: usize) -> Result<Self> {
        let layout = build_layout(setup.scheme, d, 0)?;
        let circuit = syndrome_circuit(&layout, hw, setup.variant, rounds)?;
        let compiled = CompiledCircuit::new(&circuit, &layout, hw)?;
        let sectors = match build_error_model(&compiled, &layout) {
            Ok(model) => [Basis::Z, Basis::X]
                .into_iter()
                .map(|b| SectorCtx {
                    graph: MatchingGraph::from_model(model.sector(b)),
                    support: layout.sector_logical_support(b).to_vec(),
                })
                .collect(),
            // Noiseless: nothing can fail.
            Err(Error::Usage(_)) if compiled.num_noise_locations() == 0 => Vec::new(),
            Err(e) => return Err(e),
        };
        Ok(Self { layout, compiled, sectors })
    }

    pub fn graph(&self, sector: Basis) -> Option<&MatchingGraph> {
        let i = match sector {
            Basis::Z => 0,
            Basis::X => 1,
        };
        self.sectors.get(i).map(|s| &s.graph)
    }

    fn trial(&self, scratch: &mut Scratch, decoders: &mut [Decoder<'_>], events: &mut Vec<usize>, seed: u64, trial: u64) -> Result<bool> {
        let mut rng = trial_rng(seed, trial);
        self.compiled.run(scratch, &mut rng, true, None);
        let np = self.compiled.num_plaquettes;
        let rounds = self.compiled.rounds;
        let data_sites = &self.compiled.data_sites;
        let mut failed = false;
        for (ctx, dec) in self.sectors.iter().zip(decoders.iter_mut()) {
            let det = &ctx.graph.detectors;
            let bit = |q: usize| match det.basis {
                Basis::Z => scratch.frame.x(data_sites[q]),
                Basis::X => scratch.frame.z(data_sites[q]),
            };
            events.clear();
            for (a, &k) in det.plaquettes.iter().enumerate() {
                let mut prev = false;
                for t in 0..rounds {
                    let m = get_bit(&scratch.meas, t * np + k);
                    if m != prev {
                        events.push(det.id(t, a));
                    }
                    prev = m;
                }
                let virt = det.data_of_check[a].iter().fold(false, |acc, &q| acc ^ bit(q));
                if virt != prev {
                    events.push(det.id(rounds, a));
                }
            }
            let actual = ctx.support.iter().fold(false, |acc, &q| acc ^ bit(q));
            let predicted = dec.decode_logical(events)?;
            failed |= actual != predicted;
        }
        Ok(failed)
    }

    /// Failures among trials `range` of a point seeded by `seed`, on the current thread.
    pub fn count_failures(&self, seed: u64, range: Range<u64>) -> Result<u64> {
        if self.sectors.is_empty() {
            return Ok(0);
        }
        let mut scratch = self.compiled.scratch();
        let mut decoders: Vec<Decoder<'_>> = self.sectors.iter().map(|s| s.graph.decoder()).collect();
        let mut events = Vec::new();
        let mut failures = 0;
        for t in range {
            failures += self.trial(&mut scratch, &mut decoders, &mut events, seed, t)? as u64;
        }
        Ok(failures)
    }

    /// Failures among `trials` trials, split across `workers` threads.
    pub fn run(&self, seed: u64, trials: u64, workers: Option<usize>) -> Result<u64> {
        let chunks: Vec<Range<u64>> = (0..trials.div_ceil(CHUNK)).map(|c| c * CHUNK..((c + 1) * CHUNK).min(trials)).collect();
        let work = || chunks.par_iter().map(|r| self.count_failures(seed, r.clone())).try_reduce(|| 0, |a, b| Ok(a + b));
        match workers {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::usage(format!("cannot start {n} workers: {e}")))?
                .install(work),
            None => work(),
        }
    }
}

/// Runs one point of a sweep.
pub fn run_point(config: &ExperimentConfig, d: usize, param: SweepParam, value: f64) -> Result<ResultRow> {
    config.validate()?;
    let hw = config.hardware(param, value)?;
    let seed = point_seed(config.seed, config.setup, d, hw.cavity_depth, param, value);
    let sim = PointSimulator::new(config.setup, d, &hw, config.rounds_for(d))?;
    let failures = sim.run(seed, config.trials_per_point, config.workers)?;
    log::info!("{} d={d} {}={value}: {failures}/{}", config.setup, param.name(), config.trials_per_point);
    Ok(ResultRow::new(config.setup, d, hw.cavity_depth, param, value, config.trials_per_point, failures, seed))
}

/// Rows for every (distance, p) pair, in config order.
pub fn threshold_sweep(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    if config.p_values.is_empty() {
        return Err(Error::usage("threshold sweep needs at least one p value"));
    }
    let mut rows = Vec::new();
    for &d in &config.distances {
        for &p in &config.p_values {
            rows.push(run_point(config, d, SweepParam::P, p)?);
        }
    }
    Ok(rows)
}

/// Rows for every (distance, value) pair with only `param` moved off the operating point.
pub fn sensitivity_sweep(config: &ExperimentConfig, param: SweepParam, values: &[f64]) -> Result<Vec<ResultRow>> {
    config.validate()?;
    if param == SweepParam::P {
        return Err(Error::usage("use a threshold sweep to vary p"));
    }
    let mut rows = Vec::new();
    for &d in &config.distances {
        for &v in values {
            rows.push(run_point(config, d, param, v)?);
        }
    }
    Ok(rows)
}

/// Formats like C's `%g` with 6 significant digits.
pub fn fmt_g6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    let sci = format!("{x:.5e}");
    // Rounding can bump the exponent (9.999996 -> 1.00000e1).
    let exp = sci.split_once('e').and_then(|(_, e)| e.parse::<i32>().ok()).unwrap_or(exp);
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-4..6).contains(&exp) {
        trim(format!("{x:.*}", (5 - exp).max(0) as usize))
    } else {
        let (m, e) = sci.split_once('e').expect("scientific");
        let sign = if e.starts_with('-') { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(m.to_string()), e.trim_start_matches('-').parse::<i32>().unwrap_or(0))
    }
}

/// Writes rows as CSV with a single header line.
pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scheme", "variant", "d", "k", "param_name", "param_value", "trials", "failures", "logical_error_rate", "stderr", "seed"])
        .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.scheme.clone(),
            r.variant.clone(),
            r.d.to_string(),
            r.k.to_string(),
            r.param_name.clone(),
            fmt_g6(r.param_value),
            r.trials.to_string(),
            r.failures.to_string(),
            fmt_g6(r.logical_error_rate),
            fmt_g6(r.stderr),
            r.seed.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads rows written by [`write_csv`].
pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::usage(format!("csv: {other:?}")),
    }
}

/// Threshold estimate from the crossings of all distance pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingEstimate {
    /// Median of the pairwise crossings.
    pub estimate: f64,
    /// 95% bootstrap interval.
    pub ci_low: f64,
    pub ci_high: f64,
    /// `(d1, d2, crossing)` for each pair that crossed.
    pub pairs: Vec<(usize, usize, f64)>,
    /// Bootstrap resamples in which a crossing was found.
    pub resamples: usize,
}

type Curve = Vec<(f64, u64, u64)>;

fn curves(rows: &[ResultRow]) -> Result<BTreeMap<usize, Curve>> {
    let mut by_d: BTreeMap<usize, Curve> = BTreeMap::new();
    let names: BTreeSet<(&str, &str, &str, usize)> =
        rows.iter().map(|r| (r.scheme.as_str(), r.variant.as_str(), r.param_name.as_str(), r.k)).collect();
    if names.len() > 1 {
        return Err(Error::usage("crossing estimation needs rows from a single setup and swept parameter"));
    }
    for r in rows {
        by_d.entry(r.d).or_default().push((r.param_value, r.failures, r.trials));
    }
    for c in by_d.values_mut() {
        c.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    Ok(by_d)
}

fn log_rate(failures: u64, trials: u64) -> f64 {
    // Zero counts sit at half a failure so the logarithm stays finite.
    (failures.max(1) as f64 * if failures == 0 { 0.5 } else { 1.0 } / trials as f64).ln()
}

/// Crossing of two curves by log-log interpolation at the first sign change of
/// `ln r1 − ln r2` over their common parameter values.
fn pair_crossing(a: &Curve, b: &Curve) -> Option<f64> {
    let common: Vec<(f64, f64)> = a
        .iter()
        .filter_map(|&(p, f, t)| b.iter().find(|x| x.0 == p).map(|&(_, g, u)| (p, log_rate(f, t) - log_rate(g, u))))
        .collect();
    common.windows(2).find_map(|w| {
        let ((p0, d0), (p1, d1)) = (w[0], w[1]);
        if (d0 > 0.0 && d1 < 0.0) || (d0 < 0.0 && d1 > 0.0) {
            let t = d0 / (d0 - d1);
            Some((p0.ln() + t * (p1.ln() - p0.ln())).exp())
        } else {
            None
        }
    })
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn crossings(by_d: &BTreeMap<usize, Curve>, pairs: &[(usize, usize)]) -> Vec<(usize, usize, f64)> {
    pairs
        .iter()
        .filter_map(|&(d1, d2)| Some((d1, d2, pair_crossing(by_d.get(&d1)?, by_d.get(&d2)?)?)))
        .collect()
}

/// Estimates the threshold of one setup's sweep.
///
/// `pairs` selects distance pairs; empty means all pairs. The interval comes from
/// `bootstrap` resamples of every point's failure count, seeded by `seed`.
pub fn estimate_crossing(rows: &[ResultRow], pairs: &[(usize, usize)], bootstrap: usize, seed: u64) -> Result<CrossingEstimate> {
    let by_d = curves(rows)?;
    let ds: Vec<usize> = by_d.keys().copied().collect();
    let pairs: Vec<(usize, usize)> = if pairs.is_empty() {
        ds.iter().enumerate().flat_map(|(i, &a)| ds[i + 1..].iter().map(move |&b| (a, b))).collect()
    } else {
        pairs.to_vec()
    };
    if pairs.is_empty() {
        return Err(Error::NoCrossing("need curves for at least two distances".into()));
    }
    let found = crossings(&by_d, &pairs);
    if found.is_empty() {
        return Err(Error::NoCrossing(format!("no sign change of the rate difference for pairs {pairs:?}")));
    }
    let estimate = median(&mut found.iter().map(|c| c.2).collect::<Vec<_>>());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(bootstrap);
    for _ in 0..bootstrap {
        let mut resampled = by_d.clone();
        for curve in resampled.values_mut() {
            for pt in curve.iter_mut() {
                let r = (pt.1 as f64 / pt.2 as f64).clamp(0.0, 1.0);
                pt.1 = Binomial::new(pt.2, r).expect("valid binomial").sample(&mut rng);
            }
        }
        let c = crossings(&resampled, &pairs);
        if !c.is_empty() {
            samples.push(median(&mut c.iter().map(|x| x.2).collect::<Vec<_>>()));
        }
    }
    let (ci_low, ci_high) = if samples.is_empty() {
        (estimate, estimate)
    } else {
        samples.sort_by(f64::total_cmp);
        let q = |f: f64| samples[((samples.len() - 1) as f64 * f).round() as usize];
        (q(0.025), q(0.975))
    };
    Ok(CrossingEstimate { estimate, ci_low, ci_high, pairs: found, resamples: samples.len() })
}
