//! Component analysis of epoch graphs: LCC and traffic-matrix
//! connectivity fractions, union graphs over waiting windows, and
//! threshold indicator traces. Connectivity is unweighted reachability;
//! weights only feed strength metrics.

use std::collections::HashMap;

use crate::groundgrid::TrafficMatrix;
use crate::service::EpochGraph;

/// Disjoint-set forest with union by size and path halving.
#[derive(Debug, Clone)]
pub struct Dsu {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            self.parent[x as usize] = self.parent[self.parent[x as usize] as usize];
            x = self.parent[x as usize];
        }
        x
    }

    /// Merges the sets holding `a` and `b`; false if already together.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        true
    }

    pub fn connected(&mut self, a: u32, b: u32) -> bool {
        self.find(a) == self.find(b)
    }

    /// Size of the largest set.
    pub fn largest(&self) -> usize {
        (0..self.parent.len())
            .filter(|&i| self.parent[i] == i as u32)
            .map(|i| self.size[i] as usize)
            .max()
            .unwrap_or(0)
    }
}

fn dsu_over(n: usize, pairs: impl Iterator<Item = (u32, u32)>) -> Dsu {
    let mut dsu = Dsu::new(n);
    for (i, j) in pairs {
        debug_assert!((i as usize) < n && (j as usize) < n);
        dsu.union(i, j);
    }
    dsu
}

/// Fraction of unordered city pairs whose stations share a component;
/// cities on the same station always count as connected. Fewer than two
/// cities yields the vacuous 1.
fn city_fraction_of(dsu: &mut Dsu, tm: &TrafficMatrix) -> f64 {
    let n = tm.n_cities();
    if n < 2 {
        return 1.0;
    }
    let mut members: HashMap<u32, usize> = HashMap::new();
    for &gs in &tm.station_of_city {
        *members.entry(dsu.find(gs)).or_default() += 1;
    }
    let connected: usize = members.values().map(|&m| m * (m - 1) / 2).sum();
    connected as f64 / tm.pair_count() as f64
}

/// |largest component| / n over an `n_nodes`-vertex graph; isolated nodes
/// are singleton components.
pub fn lcc_fraction(graph: &EpochGraph, n_nodes: usize) -> f64 {
    if n_nodes == 0 {
        return 0.0;
    }
    let dsu = dsu_over(n_nodes, graph.edges().iter().map(|e| (e.0, e.1)));
    dsu.largest() as f64 / n_nodes as f64
}

/// Traffic-matrix connectivity fraction of a single epoch graph.
pub fn city_fraction(graph: &EpochGraph, tm: &TrafficMatrix, n_stations: usize) -> f64 {
    if tm.n_cities() < 2 {
        return 1.0;
    }
    if n_stations == 0 {
        return 0.0;
    }
    let mut dsu = dsu_over(n_stations, graph.edges().iter().map(|e| (e.0, e.1)));
    city_fraction_of(&mut dsu, tm)
}

/// Per-epoch connectivity and strength series over one full run. The
/// three vectors advance together, one entry per epoch.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConnectivityTrace {
    /// LCC node fraction per epoch.
    pub lcc: Vec<f64>,
    /// Traffic-matrix city-pair fraction per epoch.
    pub city: Vec<f64>,
    /// Active-link strength S_k per epoch, pairs/s.
    pub strength: Vec<f64>,
}

impl ConnectivityTrace {
    pub fn with_capacity(epochs: usize) -> Self {
        ConnectivityTrace {
            lcc: Vec::with_capacity(epochs),
            city: Vec::with_capacity(epochs),
            strength: Vec::with_capacity(epochs),
        }
    }

    pub fn len(&self) -> usize {
        self.lcc.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lcc.is_empty()
    }
}

/// Union graph over a waiting window starting at `start`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnionWindow {
    /// First epoch of the window.
    pub start: usize,
    /// Window length, s.
    pub window: f64,
    /// Pair set union with per-pair maximum weights.
    pub graph: EpochGraph,
}

/// Merges the epochs `start ..= start + window/dt` (truncated at the
/// trace end): pair set is the union, pair weight the window maximum.
pub fn union_graph(trace: &[EpochGraph], start: usize, window: f64, dt: f64) -> UnionWindow {
    let extent = ((window / dt) + 1e-9).floor() as usize;
    let end = (start + extent).min(trace.len().saturating_sub(1));
    let raw = trace[start..=end].iter().flat_map(|g| g.edges().iter().copied());
    UnionWindow { start, window, graph: EpochGraph::from_edges(raw) }
}

/// Boolean indicator trace: `values[k] >= theta` (closed at equality).
pub fn threshold_trace(values: &[f64], theta: f64) -> Vec<bool> {
    values.iter().map(|&v| v >= theta).collect()
}

/// Incrementally maintained union over a sliding epoch window. Only the
/// pair set is tracked (reachability needs no weights), so epochs can be
/// pushed and popped in O(edges).
#[derive(Debug, Clone, Default)]
pub struct SlidingUnion {
    counts: HashMap<(u32, u32), u32>,
}

impl SlidingUnion {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, graph: &EpochGraph) {
        for &(i, j, _) in graph.edges() {
            *self.counts.entry((i, j)).or_default() += 1;
        }
    }

    /// Removes one epoch's contribution; the epoch must have been pushed.
    pub fn pop(&mut self, graph: &EpochGraph) {
        for &(i, j, _) in graph.edges() {
            match self.counts.get_mut(&(i, j)) {
                Some(c) if *c > 1 => *c -= 1,
                Some(_) => {
                    self.counts.remove(&(i, j));
                }
                None => debug_assert!(false, "pop of pair never pushed"),
            }
        }
    }

    pub fn pair_count(&self) -> usize {
        self.counts.len()
    }

    pub fn lcc_fraction(&self, n_nodes: usize) -> f64 {
        if n_nodes == 0 {
            return 0.0;
        }
        let dsu = dsu_over(n_nodes, self.counts.keys().copied());
        dsu.largest() as f64 / n_nodes as f64
    }

    pub fn city_fraction(&self, tm: &TrafficMatrix, n_stations: usize) -> f64 {
        if tm.n_cities() < 2 {
            return 1.0;
        }
        if n_stations == 0 {
            return 0.0;
        }
        let mut dsu = dsu_over(n_stations, self.counts.keys().copied());
        city_fraction_of(&mut dsu, tm)
    }
}
