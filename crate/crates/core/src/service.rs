//! Per-satellite service policies and per-epoch graph assembly.
//!
//! At each epoch a satellite serves the `T` nearest visible stations.
//! Under BPC (`T = 2`) it links the two into a single pair. Under MPC it
//! treats the nearest station as the hub, links hub-to-spoke, and closes
//! a ring over the spokes ordered by bearing from the hub. Edge weights
//! are entangled-pair rates; pairs below the rate floor are dropped.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::groundgrid::{bearing, GroundStation};
use crate::linkmodel::{feasible, pair_rate, OpticalParams};
use crate::orbital::{topocentric, SatState, Topocentric};
use crate::vec3;

/// How a satellite spends its optical terminals each epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServicePolicy {
    /// Bipartite pair creation: two terminals, one entangled pair.
    Bpc,
    /// Multipartite creation: hub plus spokes plus ring, 3..=7 terminals.
    Mpc { terminals: u8 },
}

impl ServicePolicy {
    /// Terminals consumed per served satellite.
    pub fn terminals(&self) -> u8 {
        match self {
            ServicePolicy::Bpc => 2,
            ServicePolicy::Mpc { terminals } => *terminals,
        }
    }
}

impl FromStr for ServicePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "bpc" {
            return Ok(ServicePolicy::Bpc);
        }
        if let Some(n) = s.strip_prefix("mpc") {
            let terminals: u8 = n
                .parse()
                .map_err(|_| Error::config("policy", format!("bad terminal count in {s:?}")))?;
            if !(3..=7).contains(&terminals) {
                return Err(Error::config(
                    "policy",
                    format!("mpc terminals must lie in 3..=7; use \"bpc\" for 2 (got {s:?})"),
                ));
            }
            return Ok(ServicePolicy::Mpc { terminals });
        }
        Err(Error::config("policy", format!("expected \"bpc\" or \"mpcN\", got {s:?}")))
    }
}

impl fmt::Display for ServicePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ServicePolicy::Bpc => write!(f, "bpc"),
            ServicePolicy::Mpc { terminals } => write!(f, "mpc{terminals}"),
        }
    }
}

/// An undirected weighted graph over station ids for one epoch. Edges are
/// normalized (`i < j`), sorted, and unique; parallel contributions keep
/// the maximum weight.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochGraph {
    edges: Vec<(u32, u32, f64)>,
}

impl EpochGraph {
    pub fn empty() -> Self {
        EpochGraph { edges: Vec::new() }
    }

    /// Normalizes, sorts, and max-merges raw edge contributions.
    pub fn from_edges(raw: impl IntoIterator<Item = (u32, u32, f64)>) -> Self {
        let mut edges: Vec<(u32, u32, f64)> = raw
            .into_iter()
            .filter(|(i, j, _)| i != j)
            .map(|(i, j, w)| if i < j { (i, j, w) } else { (j, i, w) })
            .collect();
        edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
        edges.dedup_by(|next, kept| {
            if (kept.0, kept.1) == (next.0, next.1) {
                kept.2 = kept.2.max(next.2);
                true
            } else {
                false
            }
        });
        EpochGraph { edges }
    }

    pub fn edges(&self) -> &[(u32, u32, f64)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Mean active edge weight of an epoch graph; 0 when no edge is active.
pub fn epoch_link_strength(graph: &EpochGraph) -> f64 {
    if graph.is_empty() {
        return 0.0;
    }
    graph.edges.iter().map(|e| e.2).sum::<f64>() / graph.edge_count() as f64
}

/// Stations that see the satellite at zenith angle `<= max_zenith`
/// (closed bound), with their viewing geometry.
pub fn visible_set(
    stations: &[GroundStation],
    sat: &SatState,
    max_zenith: f64,
) -> Result<Vec<(u32, Topocentric)>> {
    let r = vec3::norm(sat.pos_ecef);
    // cheap angular prefilter: a station at zenith z sees the satellite at
    // central angle z - asin(R sin z / r); anything farther cannot qualify
    let cos_beta_max = if r > crate::constants::R_EARTH + 1.0 {
        let beta = max_zenith - (crate::constants::R_EARTH * max_zenith.sin() / r).asin();
        (beta + 1e-9).cos()
    } else {
        1.0 // degenerate orbit: keep the exact test only
    };
    let inv_r = 1.0 / r;
    let mut out = Vec::new();
    for s in stations {
        let cos_beta = vec3::dot(s.pos_ecef, sat.pos_ecef) * inv_r / crate::constants::R_EARTH;
        if r > crate::constants::R_EARTH + 1.0 && cos_beta < cos_beta_max {
            continue;
        }
        let topo = topocentric(s.lat, s.lon, sat.pos_ecef)?;
        if topo.zenith <= max_zenith {
            out.push((s.gs_id, topo));
        }
    }
    Ok(out)
}

/// The up-to-`terminals` nearest visible stations, ordered by
/// (slant range, station id); the first entry is the hub.
pub fn service_subset(visible: &[(u32, Topocentric)], terminals: u8) -> Vec<(u32, Topocentric)> {
    let mut subset = visible.to_vec();
    subset.sort_by(|a, b| a.1.slant_range.total_cmp(&b.1.slant_range).then(a.0.cmp(&b.0)));
    subset.truncate(terminals as usize);
    subset
}

/// Edges a single satellite contributes this epoch. `stations` must be
/// indexed by station id. BPC with two served stations yields one pair;
/// MPC yields hub-spoke edges plus a ring over the spokes sorted by
/// bearing from the hub (ties toward the lower id). Pairs below the rate
/// floor are dropped.
pub fn induce_edges(
    params: &OpticalParams,
    stations: &[GroundStation],
    subset: &[(u32, Topocentric)],
    policy: ServicePolicy,
) -> Result<Vec<(u32, u32, f64)>> {
    if subset.len() < 2 {
        return Ok(Vec::new());
    }
    let mut edges = Vec::new();
    let mut push = |a: &(u32, Topocentric), b: &(u32, Topocentric)| -> Result<()> {
        let rate = pair_rate(params, a.1.slant_range, a.1.zenith, b.1.slant_range, b.1.zenith)?;
        if feasible(params, rate) {
            edges.push((a.0, b.0, rate));
        }
        Ok(())
    };
    match policy {
        ServicePolicy::Bpc => push(&subset[0], &subset[1])?,
        ServicePolicy::Mpc { .. } => {
            let hub = &subset[0];
            let hub_station = &stations[hub.0 as usize];
            debug_assert_eq!(hub_station.gs_id, hub.0);
            for spoke in &subset[1..] {
                push(hub, spoke)?;
            }
            let mut ring: Vec<&(u32, Topocentric)> = subset[1..].iter().collect();
            ring.sort_by(|a, b| {
                let sa = &stations[a.0 as usize];
                let sb = &stations[b.0 as usize];
                bearing(hub_station.lat, hub_station.lon, sa.lat, sa.lon)
                    .total_cmp(&bearing(hub_station.lat, hub_station.lon, sb.lat, sb.lon))
                    .then(a.0.cmp(&b.0))
            });
            match ring.len() {
                0 | 1 => {}
                2 => push(ring[0], ring[1])?,
                m => {
                    for k in 0..m {
                        push(ring[k], ring[(k + 1) % m])?;
                    }
                }
            }
        }
    }
    Ok(edges)
}

/// Assembles the epoch graph: every satellite serves its subset
/// independently; overlapping pairs keep the strongest contribution.
pub fn build_epoch_graph(
    params: &OpticalParams,
    stations: &[GroundStation],
    sats: &[SatState],
    policy: ServicePolicy,
    max_zenith: f64,
) -> Result<EpochGraph> {
    let mut raw = Vec::new();
    for sat in sats {
        let visible = visible_set(stations, sat, max_zenith)?;
        let subset = service_subset(&visible, policy.terminals());
        raw.extend(induce_edges(params, stations, &subset, policy)?);
    }
    Ok(EpochGraph::from_edges(raw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::R_EARTH;
    use crate::orbital::latlon_to_ecef;
    use proptest::prelude::*;

    const DEG: f64 = std::f64::consts::PI / 180.0;

    fn station(id: u32, lat: f64, lon: f64) -> GroundStation {
        GroundStation { gs_id: id, lat, lon, pos_ecef: latlon_to_ecef(lat, lon) }
    }

    fn sat_over(lat: f64, lon: f64, altitude: f64) -> SatState {
        let up = latlon_to_ecef(lat, lon);
        let scale = (R_EARTH + altitude) / R_EARTH;
        let pos = [up[0] * scale, up[1] * scale, up[2] * scale];
        SatState { sat_id: 0, pos_eci: pos, pos_ecef: pos }
    }

    /// Builds a station slice from `(id, lat_deg, lon_deg)` triples; ids
    /// must be dense since the slice is indexed by id.
    fn fan(spec: &[(u32, f64, f64)]) -> Vec<GroundStation> {
        let mut v: Vec<GroundStation> =
            spec.iter().map(|&(id, lat, lon)| station(id, lat * DEG, lon * DEG)).collect();
        v.sort_by_key(|s| s.gs_id);
        v
    }

    #[test]
    fn policy_parsing() {
        assert_eq!("bpc".parse::<ServicePolicy>().unwrap(), ServicePolicy::Bpc);
        assert_eq!(ServicePolicy::Bpc.terminals(), 2);
        for t in 3..=7u8 {
            let p: ServicePolicy = format!("mpc{t}").parse().unwrap();
            assert_eq!(p, ServicePolicy::Mpc { terminals: t });
            assert_eq!(p.terminals(), t);
            assert_eq!(p.to_string(), format!("mpc{t}"));
        }
        for bad in ["mpc2", "mpc8", "mpc", "bpc2", "", "tdma"] {
            assert!(bad.parse::<ServicePolicy>().is_err(), "{bad}");
        }
    }

    #[test]
    fn visibility_bound_is_closed() {
        let stations = vec![station(0, 0.0, 0.0), station(1, 0.0, 20.0 * DEG)];
        let sat = sat_over(0.0, 6.0 * DEG, 700e3);
        let z = topocentric(0.0, 0.0, sat.pos_ecef).unwrap().zenith;
        let seen = visible_set(&stations, &sat, z).unwrap();
        assert_eq!(seen.iter().map(|v| v.0).collect::<Vec<_>>(), vec![0]);
        let seen = visible_set(&stations, &sat, z - 1e-12).unwrap();
        assert!(seen.is_empty());
    }

    #[test]
    fn prefilter_matches_exhaustive_scan() {
        let stations: Vec<GroundStation> =
            (0..180).map(|k| station(k, (k as f64 - 90.0) * DEG, (2.0 * k as f64) * DEG)).collect();
        let sat = sat_over(12.0 * DEG, 40.0 * DEG, 500e3);
        let fast = visible_set(&stations, &sat, 57.0 * DEG).unwrap();
        let slow: Vec<(u32, Topocentric)> = stations
            .iter()
            .filter_map(|s| {
                let t = topocentric(s.lat, s.lon, sat.pos_ecef).unwrap();
                (t.zenith <= 57.0 * DEG).then_some((s.gs_id, t))
            })
            .collect();
        assert_eq!(fast.len(), slow.len());
        for (f, s) in fast.iter().zip(&slow) {
            assert_eq!(f.0, s.0);
            assert_eq!(f.1, s.1);
        }
    }

    #[test]
    fn subset_orders_by_slant_then_id() {
        // ids deliberately scrambled relative to distance
        let stations = fan(&[(3, 0.0, 1.0), (0, 0.0, 4.0), (2, 0.0, 2.0), (1, 0.0, 3.0)]);
        let sat = sat_over(0.0, 0.0, 700e3);
        let vis = visible_set(&stations, &sat, 89.0 * DEG).unwrap();
        let subset = service_subset(&vis, 3);
        assert_eq!(subset.iter().map(|s| s.0).collect::<Vec<_>>(), vec![3, 2, 1]);
        // symmetric east/west stations tie exactly; lower id wins
        let stations = fan(&[(1, 0.0, 2.0), (0, 0.0, -2.0), (2, 0.0, 1.0)]);
        let vis = visible_set(&stations, &sat, 89.0 * DEG).unwrap();
        let subset = service_subset(&vis, 2);
        assert_eq!(subset.iter().map(|s| s.0).collect::<Vec<_>>(), vec![2, 0]);
    }

    #[test]
    fn mpc_edge_counts_by_served_size() {
        let params = OpticalParams::default();
        let sat = sat_over(0.0, 0.0, 700e3);
        // hub at the subsatellite point plus k spokes within view
        let lons = [0.0, 1.5, -1.5, 3.0, -3.0, 4.5, -4.5];
        for (served, want) in [(1, 0), (2, 1), (3, 3), (4, 6), (7, 12)] {
            let stations: Vec<GroundStation> = lons[..served]
                .iter()
                .enumerate()
                .map(|(i, &l)| station(i as u32, 0.0, l * DEG))
                .collect();
            let vis = visible_set(&stations, &sat, 57.0 * DEG).unwrap();
            let subset = service_subset(&vis, 7);
            assert_eq!(subset.len(), served);
            let edges =
                induce_edges(&params, &stations, &subset, ServicePolicy::Mpc { terminals: 7 })
                    .unwrap();
            assert_eq!(edges.len(), want, "served={served}");
            assert!(edges.len() <= 2 * (7 - 1));
        }
    }

    #[test]
    fn bpc_yields_single_nearest_pair() {
        let params = OpticalParams::default();
        let stations = fan(&[(0, 0.0, -1.0), (1, 0.0, 1.5), (2, 0.0, 3.0)]);
        let sat = sat_over(0.0, 0.0, 700e3);
        let vis = visible_set(&stations, &sat, 57.0 * DEG).unwrap();
        let subset = service_subset(&vis, 2);
        let edges = induce_edges(&params, &stations, &subset, ServicePolicy::Bpc).unwrap();
        assert_eq!(edges.len(), 1);
        assert_eq!((edges[0].0, edges[0].1), (0, 1));
    }

    #[test]
    fn ring_follows_bearing_about_hub() {
        let params = OpticalParams::default();
        // hub at origin; spokes due north, east, south, west with ids
        // chosen so bearing order differs from id order
        let stations = fan(&[
            (0, 0.0, 0.0),  // hub
            (1, 0.0, -2.0), // west  (bearing 3 pi / 2)
            (2, 2.0, 0.0),  // north (bearing 0)
            (3, -2.0, 0.0), // south (bearing pi)
            (4, 0.0, 2.0),  // east  (bearing pi / 2)
        ]);
        let sat = sat_over(0.0, 0.0, 700e3);
        let vis = visible_set(&stations, &sat, 57.0 * DEG).unwrap();
        let subset = service_subset(&vis, 5);
        assert_eq!(subset[0].0, 0);
        let edges =
            induce_edges(&params, &stations, &subset, ServicePolicy::Mpc { terminals: 5 }).unwrap();
        let pairs: Vec<(u32, u32)> = edges.iter().map(|e| (e.0, e.1)).collect();
        for spoke in 1..=4 {
            assert!(pairs.contains(&(0, spoke)), "missing spoke {spoke}");
        }
        // ring order N, E, S, W = 2, 4, 3, 1
        for ring in [(2, 4), (4, 3), (3, 1), (1, 2)] {
            assert!(pairs.contains(&ring), "missing ring edge {ring:?}");
        }
        assert_eq!(pairs.len(), 8);
    }

    #[test]
    fn equal_bearings_order_by_id() {
        let params = OpticalParams::default();
        // two spokes due north at different ranges: the id tie-break must
        // win over slant order, which a 4-spoke ring makes observable
        let stations = fan(&[
            (0, 0.0, 0.0),
            (1, 3.0, 0.0),  // far north
            (2, 1.5, 0.0),  // near north
            (3, 0.0, 2.0),  // east
            (4, -2.0, 0.0), // south
        ]);
        let sat = sat_over(0.0, 0.0, 700e3);
        let vis = visible_set(&stations, &sat, 57.0 * DEG).unwrap();
        let subset = service_subset(&vis, 5);
        let edges =
            induce_edges(&params, &stations, &subset, ServicePolicy::Mpc { terminals: 5 }).unwrap();
        let pairs: Vec<(u32, u32)> = edges.iter().map(|e| (e.0, e.1)).collect();
        // ring order: north ties resolve 1 before 2, then east, then south
        for ring in [(1, 2), (2, 3), (3, 4), (4, 1)] {
            assert!(pairs.contains(&ring), "missing ring edge {ring:?} in {pairs:?}");
        }
    }

    #[test]
    fn rate_floor_drops_pairs() {
        let params = OpticalParams { rate_floor: 1e12, ..OpticalParams::default() };
        let stations = fan(&[(0, 0.0, 0.0), (1, 0.0, 1.5), (2, 0.0, -1.5)]);
        let sat = sat_over(0.0, 0.0, 700e3);
        let vis = visible_set(&stations, &sat, 57.0 * DEG).unwrap();
        for policy in [ServicePolicy::Bpc, ServicePolicy::Mpc { terminals: 3 }] {
            let subset = service_subset(&vis, policy.terminals());
            let edges = induce_edges(&params, &stations, &subset, policy).unwrap();
            assert!(edges.is_empty(), "{policy}");
        }
    }

    #[test]
    fn graph_normalizes_and_max_merges() {
        let g = EpochGraph::from_edges([
            (1, 0, 5.0),
            (0, 1, 7.0),
            (2, 1, 1.0),
            (3, 3, 9.0), // self edge dropped
        ]);
        assert_eq!(g.edges(), &[(0, 1, 7.0), (1, 2, 1.0)]);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(epoch_link_strength(&g), 4.0);
        assert_eq!(epoch_link_strength(&EpochGraph::empty()), 0.0);
    }

    #[test]
    fn graph_is_input_order_invariant() {
        let edges =
            vec![(4, 2, 1.0), (0, 1, 3.0), (1, 0, 2.0), (2, 4, 7.0), (3, 1, 0.5), (1, 3, 0.5)];
        let g1 = EpochGraph::from_edges(edges.clone());
        let mut rev = edges.clone();
        rev.reverse();
        let g2 = EpochGraph::from_edges(rev);
        assert_eq!(g1, g2);
        assert_eq!(g1.edges(), &[(0, 1, 3.0), (1, 3, 0.5), (2, 4, 7.0)]);
    }

    #[test]
    fn epoch_graph_from_constellation_geometry() {
        let params = OpticalParams::default();
        let stations = fan(&[(0, 0.0, 0.0), (1, 0.0, 1.5), (2, 1.5, 0.0)]);
        let sat = sat_over(0.5 * DEG, 0.5 * DEG, 700e3);
        let g = build_epoch_graph(
            &params,
            &stations,
            &[sat],
            ServicePolicy::Mpc { terminals: 3 },
            57.0 * DEG,
        )
        .unwrap();
        // hub + 2 spokes: 2 spokes + 1 ring pair
        assert_eq!(g.edge_count(), 3);
        for (i, j, w) in g.edges() {
            assert!(i < j);
            assert!(*w >= params.rate_floor && *w <= params.source_rate);
        }
    }

    proptest! {
        #[test]
        fn prop_mpc_bound_and_normalization(
            lats in proptest::collection::vec(-3.0..3.0f64, 0..10),
            lons in proptest::collection::vec(-3.0..3.0f64, 0..10),
            t in 3..=7u8,
        ) {
            let params = OpticalParams::default();
            let n = lats.len().min(lons.len());
            let stations: Vec<GroundStation> = (0..n)
                .map(|i| station(i as u32, lats[i] * DEG, lons[i] * DEG))
                .collect();
            let sat = sat_over(0.0, 0.0, 700e3);
            let g = build_epoch_graph(
                &params,
                &stations,
                &[sat],
                ServicePolicy::Mpc { terminals: t },
                57.0 * DEG,
            )
            .unwrap();
            prop_assert!(g.edge_count() <= 2 * (t as usize - 1));
            let mut prev: Option<(u32, u32)> = None;
            for &(i, j, w) in g.edges() {
                prop_assert!(i < j);
                prop_assert!((j as usize) < stations.len());
                prop_assert!(w >= params.rate_floor);
                prop_assert!(w <= params.source_rate);
                if let Some(p) = prev {
                    prop_assert!(p < (i, j));
                }
                prev = Some((i, j));
            }
        }
    }
}
