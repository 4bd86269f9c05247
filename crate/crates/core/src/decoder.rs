//! Detection events, the space-time matching graph, MWPM decoding and a brute-force
//! maximum-likelihood oracle.
//!
//! The graph keeps one edge per detector pair (or detector plus boundary) reachable by a
//! single mechanism of the sector's error model. Mechanisms that trigger three or four
//! detectors are split into two existing edges when possible and dropped otherwise; the
//! oracle sees them intact. Matching runs on `fusion_blossom`, which needs even integer
//! weights, so `ln((1 − p)/p)` is scaled by [`WEIGHT_SCALE`] and rounded to an even value.
//! Every boundary edge ends in its own virtual vertex.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use fusion_blossom::mwpm_solver::{PrimalDualSolver, SolverSerial};
use fusion_blossom::util::{SolverInitializer, SyndromePattern, Weight};
use serde::{Deserialize, Serialize};

use crate::dem::{build_error_model, xor_sorted, Detectors, Mechanism, SectorModel};
use crate::error::{Error, Result};
use crate::hardware::HardwareParams;
use crate::layout::{Basis, PatchLayout};
use crate::montecarlo::{CompiledCircuit, SyndromeRecord};
use crate::pauli::PauliFrame;
use crate::schedule::Circuit;

/// Integer weight units per unit of log-likelihood ratio.
pub const WEIGHT_SCALE: f64 = 1000.0;
const P_MAX: f64 = 0.5 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DetectionEvent {
    pub plaquette: usize,
    pub round: usize,
}

/// Detection events of one sector; the last round is the virtual one derived from the
/// final data readout.
pub fn extract_events(record: &SyndromeRecord, layout: &PatchLayout, sector: Basis) -> Vec<DetectionEvent> {
    let det = Detectors::new(layout, sector, record.rounds);
    let final_bits = match sector {
        Basis::Z => &record.final_x,
        Basis::X => &record.final_z,
    };
    let mut out = Vec::new();
    for (a, &k) in det.plaquettes.iter().enumerate() {
        let mut prev = false;
        for (t, row) in record.outcomes.iter().enumerate() {
            if row[k] != prev {
                out.push(DetectionEvent { plaquette: k, round: t });
            }
            prev = row[k];
        }
        let virt = det.data_of_check[a].iter().fold(false, |acc, &q| acc ^ final_bits[q]);
        if virt != prev {
            out.push(DetectionEvent { plaquette: k, round: record.rounds });
        }
    }
    out.sort_by_key(|e| (e.round, e.plaquette));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    /// Two checks in the same detector layer.
    Space,
    /// One check in consecutive layers (measurement error).
    Time,
    /// Two checks in different layers.
    SpaceTime,
    /// One check and the patch boundary.
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingEdge {
    pub u: usize,
    /// `None` for the boundary.
    pub v: Option<usize>,
    pub p: f64,
    pub weight: f64,
    pub logical: bool,
    /// Data qubits corrected by this edge.
    pub footprint: Vec<usize>,
    pub kind: EdgeKind,
}

/// Sparse matching graph of one sector.
#[derive(Debug, Clone)]
pub struct MatchingGraph {
    pub detectors: Detectors,
    pub edges: Vec<MatchingEdge>,
    /// Mechanisms with 3+ detectors that were split into two edges.
    pub decomposed: usize,
    /// Mechanisms with 3+ detectors that could not be split.
    pub dropped: usize,
    /// Mechanisms sharing an edge with a more likely mechanism of opposite logical effect.
    pub logical_conflicts: usize,
    /// Edges whose probability had to be clamped below 1/2.
    pub clamped: usize,
    initializer: SolverInitializer,
    paths: PathTable,
}

/// Shortest-path metric of the graph restricted to detectors, plus the nearest boundary.
#[derive(Debug, Clone)]
struct PathTable {
    n: usize,
    /// `dist[u * n + v]` in integer weight units; `Weight::MAX` if unreachable.
    dist: Vec<Weight>,
    parity: Vec<bool>,
    boundary: Vec<Weight>,
    boundary_parity: Vec<bool>,
}

fn edge_key(dets: &[u32]) -> (u32, u32) {
    match dets {
        [a] => (*a, u32::MAX),
        [a, b] => (*a, *b),
        _ => unreachable!("graphlike edges have one or two detectors"),
    }
}

fn llr(p: f64) -> f64 {
    ((1.0 - p) / p).ln()
}

fn combine(p: f64, q: f64) -> f64 {
    p + q - 2.0 * p * q
}

impl MatchingGraph {
    /// Builds the graph of one sector from its error model.
    pub fn from_model(model: &SectorModel) -> Self {
        struct Acc {
            p: f64,
            logical: bool,
            footprint: Vec<u32>,
        }
        let mut acc: HashMap<(u32, u32), Acc> = HashMap::new();
        let mut order: Vec<(u32, u32)> = Vec::new();
        let mut conflicts = 0;
        for m in model.mechanisms.iter().filter(|m| m.dets.len() <= 2) {
            let key = edge_key(&m.dets);
            match acc.get_mut(&key) {
                None => {
                    acc.insert(key, Acc { p: m.p, logical: m.logical, footprint: m.footprint.clone() });
                    order.push(key);
                }
                Some(a) if a.logical == m.logical => a.p = combine(a.p, m.p),
                Some(a) => {
                    conflicts += 1;
                    if m.p > a.p {
                        *a = Acc { p: m.p, logical: m.logical, footprint: m.footprint.clone() };
                    }
                }
            }
        }
        let base: HashMap<(u32, u32), (f64, bool)> = acc.iter().map(|(k, a)| (*k, (a.p, a.logical))).collect();
        let (mut decomposed, mut dropped) = (0, 0);
        for m in model.mechanisms.iter().filter(|m| m.dets.len() > 2) {
            match split_hyperedge(m, &base) {
                Some((k1, k2)) => {
                    decomposed += 1;
                    for k in [k1, k2] {
                        let a = acc.get_mut(&k).expect("split into existing edges");
                        a.p = combine(a.p, m.p);
                    }
                }
                None => dropped += 1,
            }
        }

        let det = model.detectors.clone();
        let n = det.len();
        let per = det.per_layer();
        let mut edges = Vec::with_capacity(order.len());
        let mut weighted = Vec::with_capacity(order.len());
        let mut virtuals = Vec::new();
        let mut clamped = 0;
        for key in order {
            let a = &acc[&key];
            let mut p = a.p;
            if p > P_MAX {
                log::warn!("edge probability {p} clamped below 1/2");
                clamped += 1;
                p = P_MAX;
            }
            let weight = llr(p).max(0.0);
            let iw = (2.0 * (weight * WEIGHT_SCALE / 2.0).round()).max(2.0) as Weight;
            let u = key.0 as usize;
            let (v, kind, fb_v) = if key.1 == u32::MAX {
                let virt = n + virtuals.len();
                virtuals.push(virt);
                (None, EdgeKind::Boundary, virt)
            } else {
                let v = key.1 as usize;
                let kind = if u / per == v / per {
                    EdgeKind::Space
                } else if u % per == v % per {
                    EdgeKind::Time
                } else {
                    EdgeKind::SpaceTime
                };
                (Some(v), kind, v)
            };
            weighted.push((u, fb_v, iw));
            edges.push(MatchingEdge {
                u,
                v,
                p,
                weight,
                logical: a.logical,
                footprint: a.footprint.iter().map(|&q| q as usize).collect(),
                kind,
            });
        }
        let initializer = SolverInitializer::new(n + virtuals.len(), weighted, virtuals);
        let paths = PathTable::new(n, &initializer, &edges);
        Self { detectors: det, edges, decomposed, dropped, logical_conflicts: conflicts, clamped, initializer, paths }
    }

    pub fn num_detectors(&self) -> usize {
        self.detectors.len()
    }

    /// Edge between two detectors, or between a detector and the boundary.
    pub fn find_edge(&self, u: usize, v: Option<usize>) -> Option<&MatchingEdge> {
        let (u, v) = match v {
            Some(v) if v < u => (v, Some(u)),
            _ => (u, v),
        };
        self.edges.iter().find(|e| e.u == u && e.v == v)
    }

    /// Integer weight of an edge as handed to the matcher.
    pub fn integer_weight(&self, edge: usize) -> i64 {
        self.initializer.weighted_edges[edge].2 as i64
    }

    pub fn decoder(&self) -> Decoder<'_> {
        Decoder { graph: self, solver: SolverSerial::new(&self.initializer), defects: Vec::new() }
    }
}

impl PathTable {
    /// Dijkstra from every detector over the matcher's integer weights; virtual
    /// vertices are endpoints only.
    fn new(n: usize, init: &SolverInitializer, edges: &[MatchingEdge]) -> Self {
        let nv = init.vertex_num;
        let mut adj: Vec<Vec<(usize, Weight, bool)>> = vec![Vec::new(); nv];
        for (&(u, v, w), e) in init.weighted_edges.iter().zip(edges) {
            adj[u].push((v, w, e.logical));
            adj[v].push((u, w, e.logical));
        }
        let mut t = PathTable {
            n,
            dist: vec![Weight::MAX; n * n],
            parity: vec![false; n * n],
            boundary: vec![Weight::MAX; n],
            boundary_parity: vec![false; n],
        };
        let mut dist = vec![Weight::MAX; nv];
        let mut par = vec![false; nv];
        let mut heap = BinaryHeap::new();
        for src in 0..n {
            dist.fill(Weight::MAX);
            dist[src] = 0;
            par[src] = false;
            heap.push(Reverse((0, src)));
            while let Some(Reverse((dv, v))) = heap.pop() {
                if dv > dist[v] || v >= n {
                    continue;
                }
                for &(u, w, l) in &adj[v] {
                    let du = dv + w;
                    if du < dist[u] {
                        dist[u] = du;
                        par[u] = par[v] ^ l;
                        heap.push(Reverse((du, u)));
                    }
                }
            }
            t.dist[src * n..(src + 1) * n].copy_from_slice(&dist[..n]);
            t.parity[src * n..(src + 1) * n].copy_from_slice(&par[..n]);
            if let Some(b) = (n..nv).min_by_key(|&b| (dist[b], b)) {
                t.boundary[src] = dist[b];
                t.boundary_parity[src] = par[b];
            }
        }
        t
    }

    fn pair(&self, u: usize, v: usize) -> (Weight, bool) {
        (self.dist[u * self.n + v], self.parity[u * self.n + v])
    }

    /// Pairing `u` with `v` can only help if it beats sending both to the boundary.
    fn linked(&self, u: usize, v: usize) -> bool {
        let d = self.dist[u * self.n + v];
        d != Weight::MAX && d < self.boundary[u].saturating_add(self.boundary[v])
    }
}

/// Largest cluster solved by the subset recursion instead of the blossom solver.
const DP_MAX: usize = 12;

/// Exact minimum-weight matching of a small cluster where every defect may also go to
/// the boundary. Returns (weight, logical parity).
fn match_cluster(t: &PathTable, c: &[usize]) -> (Weight, bool) {
    let s = c.len();
    let full = (1usize << s) - 1;
    let mut best = vec![(Weight::MAX, false); 1 << s];
    best[0] = (0, false);
    for mask in 1..=full {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let (bw, bp) = best[rest];
        let mut cand = (bw.saturating_add(t.boundary[c[i]]), bp ^ t.boundary_parity[c[i]]);
        let mut others = rest;
        while others != 0 {
            let j = others.trailing_zeros() as usize;
            others &= others - 1;
            let (dw, dp) = t.pair(c[i], c[j]);
            let (rw, rp) = best[rest & !(1 << j)];
            let w = dw.saturating_add(rw);
            if w < cand.0 {
                cand = (w, dp ^ rp);
            }
        }
        best[mask] = cand;
    }
    best[full]
}

/// Splits a 3- or 4-detector mechanism into two edges already in the graph, preferring a
/// split with the right logical effect, then the most likely one.
fn split_hyperedge(m: &Mechanism, base: &HashMap<(u32, u32), (f64, bool)>) -> Option<((u32, u32), (u32, u32))> {
    let d = &m.dets;
    let parts: Vec<(Vec<u32>, Vec<u32>)> = match d.len() {
        3 => (0..3)
            .map(|i| {
                let rest: Vec<u32> = (0..3).filter(|&j| j != i).map(|j| d[j]).collect();
                (vec![d[i]], rest)
            })
            .collect(),
        4 => vec![
            (vec![d[0], d[1]], vec![d[2], d[3]]),
            (vec![d[0], d[2]], vec![d[1], d[3]]),
            (vec![d[0], d[3]], vec![d[1], d[2]]),
        ],
        _ => return None,
    };
    let mut best: Option<(bool, f64, (u32, u32), (u32, u32))> = None;
    for (a, b) in parts {
        let (ka, kb) = (edge_key(&a), edge_key(&b));
        let (Some(&(pa, la)), Some(&(pb, lb))) = (base.get(&ka), base.get(&kb)) else { continue };
        let right = (la ^ lb) == m.logical;
        let score = (right, pa * pb);
        if best.is_none_or(|(r, s, _, _)| score > (r, s)) {
            best = Some((right, pa * pb, ka, kb));
        }
    }
    best.map(|(_, _, a, b)| (a, b))
}

/// Builds the matching graph of `sector` for a circuit under `hw`.
pub fn build_matching_graph(layout: &PatchLayout, circuit: &Circuit, hw: &HardwareParams, sector: Basis) -> Result<MatchingGraph> {
    let c = CompiledCircuit::new(circuit, layout, hw)?;
    let model = build_error_model(&c, layout)?;
    Ok(MatchingGraph::from_model(model.sector(sector)))
}

/// Output of one decode.
#[derive(Debug, Clone, PartialEq)]
pub struct Correction {
    pub edges: Vec<usize>,
    /// Data qubits to flip, sorted.
    pub data: Vec<usize>,
    pub logical: bool,
    /// Sum of edge weights (log-likelihood units).
    pub weight: f64,
}

/// Reusable MWPM solver bound to one graph.
pub struct Decoder<'g> {
    graph: &'g MatchingGraph,
    solver: SolverSerial,
    defects: Vec<usize>,
}

impl Decoder<'_> {
    fn check(&self, events: &[usize]) -> Result<()> {
        let n = self.graph.num_detectors();
        match events.iter().find(|&&e| e >= n) {
            Some(&bad) => Err(Error::usage(format!("detection event {bad} outside the {n}-detector graph"))),
            None => Ok(()),
        }
    }

    fn load(&mut self, events: &[usize]) {
        self.defects.clear();
        self.defects.extend_from_slice(events);
        self.solver.solve(&SyndromePattern::new_vertices(std::mem::take(&mut self.defects)));
    }

    /// Full correction for a list of detector ids.
    pub fn decode(&mut self, events: &[usize]) -> Result<Correction> {
        self.check(events)?;
        let edges = if events.is_empty() {
            Vec::new()
        } else {
            self.load(events);
            let sub = self.solver.subgraph();
            self.solver.clear();
            sub
        };
        let mut data: Vec<u32> = Vec::new();
        let mut logical = false;
        let mut weight = 0.0;
        for &e in &edges {
            let edge = &self.graph.edges[e];
            logical ^= edge.logical;
            weight += edge.weight;
            let fp: Vec<u32> = edge.footprint.iter().map(|&q| q as u32).collect();
            data = xor_sorted(&data, &fp);
        }
        Ok(Correction { edges, data: data.into_iter().map(|q| q as usize).collect(), logical, weight })
    }

    /// Splits events into clusters that cannot interact in an optimal matching.
    fn clusters(&self, events: &[usize]) -> Vec<Vec<usize>> {
        let t = &self.graph.paths;
        let m = events.len();
        let mut parent: Vec<usize> = (0..m).collect();
        fn root(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for i in 0..m {
            for j in i + 1..m {
                if t.linked(events[i], events[j]) {
                    let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in 0..m {
            let r = root(&mut parent, i);
            groups.entry(r).or_default().push(events[i]);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort_unstable();
        out
    }

    /// Predicted logical flip only.
    ///
    /// Clusters of up to `DP_MAX` defects are matched exactly over the shortest-path
    /// metric; larger ones go to the blossom solver.
    pub fn decode_logical(&mut self, events: &[usize]) -> Result<bool> {
        self.check(events)?;
        let mut logical = false;
        for c in self.clusters(events) {
            logical ^= if c.len() <= DP_MAX {
                match_cluster(&self.graph.paths, &c).1
            } else {
                self.load(&c);
                let sub = self.solver.subgraph();
                self.solver.clear();
                sub.iter().fold(false, |acc, &e| acc ^ self.graph.edges[e].logical)
            };
        }
        Ok(logical)
    }

    /// Integer weight of the optimal matching via the cluster route.
    pub fn matching_weight(&mut self, events: &[usize]) -> Result<i64> {
        self.check(events)?;
        let mut total = 0i64;
        for c in self.clusters(events) {
            total += if c.len() <= DP_MAX {
                match_cluster(&self.graph.paths, &c).0 as i64
            } else {
                self.load(&c);
                let sub = self.solver.subgraph();
                self.solver.clear();
                sub.iter().map(|&e| self.graph.integer_weight(e)).sum()
            };
        }
        Ok(total)
    }
}

/// One-shot decode.
pub fn decode(graph: &MatchingGraph, events: &[usize]) -> Result<Correction> {
    graph.decoder().decode(events)
}

/// Whether residual ⊕ correction anticommutes with the sector's logical operator.
///
/// `residual` is indexed by data qubit; for Z checks its X bits count, for X checks its
/// Z bits.
pub fn logical_failure(residual: &PauliFrame, correction: &[usize], logical_support: &[usize], sector: Basis) -> bool {
    let bit = |q: usize| match sector {
        Basis::Z => residual.x(q),
        Basis::X => residual.z(q),
    };
    let mut parity = false;
    for &q in logical_support {
        parity ^= bit(q);
        parity ^= correction.iter().filter(|&&c| c == q).count() % 2 == 1;
    }
    parity
}

/// Best explanation found by [`brute_force_decode`] for each logical class.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// `best[l]` = lowest-weight fault set with logical effect `l`, as (weight, mechanisms).
    pub best: [Option<(f64, Vec<usize>)>; 2],
}

impl OracleResult {
    /// Logical effect of the most likely explanation (ties resolve to no flip).
    pub fn logical(&self) -> Option<bool> {
        match (&self.best[0], &self.best[1]) {
            (None, None) => None,
            (Some(_), None) => Some(false),
            (None, Some(_)) => Some(true),
            (Some((w0, _)), Some((w1, _))) => Some(w1 < w0),
        }
    }

    /// Whether both logical classes have explanations within `eps` of each other.
    pub fn is_tie(&self, eps: f64) -> bool {
        matches!((&self.best[0], &self.best[1]), (Some((a, _)), Some((b, _))) if (a - b).abs() <= eps)
    }

    pub fn weight(&self, logical: bool) -> Option<f64> {
        self.best[logical as usize].as_ref().map(|b| b.0)
    }
}

/// Exhaustive search over sets of at most `max_weight` mechanisms whose combined
/// detectors equal `events`, keeping the most probable set per logical class.
///
/// Limited to distance 3 with at most 3 rounds.
pub fn brute_force_decode(model: &SectorModel, events: &[usize], max_weight: usize) -> Result<OracleResult> {
    if model.d != 3 || model.detectors.rounds > 3 {
        return Err(Error::usage(format!(
            "brute-force decoding is limited to d = 3 and at most 3 rounds (got d = {}, {} rounds)",
            model.d, model.detectors.rounds
        )));
    }
    if !(1..=3).contains(&max_weight) {
        return Err(Error::usage("brute-force weight must be 1, 2 or 3"));
    }
    let oracle = Oracle::new(model);
    let mut target: Vec<u32> = events.iter().map(|&e| e as u32).collect();
    target.sort_unstable();
    target.dedup();
    Ok(oracle.solve(&target, max_weight))
}

/// Reusable index for repeated oracle queries on one model.
pub struct Oracle<'m> {
    model: &'m SectorModel,
    weights: Vec<f64>,
    by_det: HashMap<u32, Vec<usize>>,
    by_sig: HashMap<Vec<u32>, Vec<usize>>,
}

impl<'m> Oracle<'m> {
    pub fn new(model: &'m SectorModel) -> Self {
        let mut by_det: HashMap<u32, Vec<usize>> = HashMap::new();
        let mut by_sig: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
        for (i, m) in model.mechanisms.iter().enumerate() {
            for &d in &m.dets {
                by_det.entry(d).or_default().push(i);
            }
            by_sig.entry(m.dets.clone()).or_default().push(i);
        }
        let weights = model.mechanisms.iter().map(|m| llr(m.p.min(P_MAX))).collect();
        Self { model, weights, by_det, by_sig }
    }

    pub fn solve(&self, target: &[u32], max_weight: usize) -> OracleResult {
        let mut best = [None, None];
        let mut used = Vec::with_capacity(max_weight);
        self.search(target.to_vec(), max_weight, &mut used, 0.0, false, &mut best);
        OracleResult { best }
    }

    fn record(best: &mut [Option<(f64, Vec<usize>)>; 2], w: f64, logical: bool, set: &[usize]) {
        let slot = &mut best[logical as usize];
        if slot.as_ref().is_none_or(|(bw, _)| w < *bw) {
            let mut s = set.to_vec();
            s.sort_unstable();
            *slot = Some((w, s));
        }
    }

    fn search(&self, rest: Vec<u32>, k: usize, used: &mut Vec<usize>, w: f64, logical: bool, best: &mut [Option<(f64, Vec<usize>)>; 2]) {
        if rest.is_empty() {
            Self::record(best, w, logical, used);
            return;
        }
        if k == 0 {
            return;
        }
        let mechs = &self.model.mechanisms;
        if k == 1 {
            if let Some(list) = self.by_sig.get(&rest) {
                for &m in list {
                    if !used.contains(&m) {
                        used.push(m);
                        Self::record(best, w + self.weights[m], logical ^ mechs[m].logical, used);
                        used.pop();
                    }
                }
            }
            return;
        }
        let Some(list) = self.by_det.get(&rest[0]) else { return };
        for &m in list {
            if used.contains(&m) {
                continue;
            }
            used.push(m);
            let next = xor_sorted(&rest, &mechs[m].dets);
            self.search(next, k - 1, used, w + self.weights[m], logical ^ mechs[m].logical, best);
            used.pop();
        }
    }
}
