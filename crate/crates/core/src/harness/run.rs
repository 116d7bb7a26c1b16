//! Scenario execution: one pass over the epoch grid feeding instantaneous
//! metrics, sliding union windows, and the summary statistics, plus the
//! parallel sweep driver.

use std::collections::VecDeque;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::connectivity::{
    city_fraction, lcc_fraction, threshold_trace, ConnectivityTrace, SlidingUnion,
};
use crate::error::{Error, Result};
use crate::groundgrid::{
    generate_lattice, map_cities, City, GroundStation, LandMask, TrafficMatrix,
};
use crate::orbital::propagate_constellation;
use crate::service::{build_epoch_graph, epoch_link_strength, EpochGraph};
use crate::stats::{
    autocorr_summary, extract_down_runs, forward_waits, wait_summary, AutocorrEstimate, WaitStats,
};

use super::config::{resolve_cities, resolve_mask, ScenarioConfig};
use super::export;
use super::sweep::{enumerate_sweep, Scenario};

/// Ground-truth tables shared by every scenario of a sweep.
#[derive(Debug, Clone, Copy)]
pub struct Inputs<'a> {
    pub mask: &'a LandMask,
    pub cities: &'a [City],
}

/// Waiting statistics for one connectivity threshold, from the
/// instantaneous city-fraction trace.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdStats {
    pub theta: f64,
    pub wait: WaitStats,
    /// Event-level integrated autocorrelation time of down-run durations;
    /// NaN when inestimable.
    pub tau_int: f64,
    /// Effective event count; 0 when no events, NaN when inestimable.
    pub n_eff: f64,
    /// Standard error of the mean down duration, s; NaN when inestimable.
    pub sem: f64,
}

/// Windowed availability for one (window, threshold) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowStats {
    /// Window length W, s.
    pub window: f64,
    pub theta: f64,
    /// Fraction of window starts whose union graph meets the threshold.
    pub up_fraction: f64,
    /// Every window start met the threshold.
    pub qualified: bool,
    /// Trace-average link strength, pairs/s; NaN unless qualified.
    pub sbar_conditioned: f64,
}

/// Everything one scenario produces.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultBundle {
    pub scenario_id: String,
    pub stations: Vec<GroundStation>,
    pub n_cities: usize,
    pub trace: ConnectivityTrace,
    pub thresholds: Vec<ThresholdStats>,
    pub windows: Vec<WindowStats>,
    /// Plain trace average of S_k, pairs/s.
    pub sbar: f64,
    /// Autocorrelation of the strength trace; None when inestimable.
    pub strength_autocorr: Option<AutocorrEstimate>,
    /// Autocorrelation of the LCC-fraction trace; None when inestimable.
    pub lcc_autocorr: Option<AutocorrEstimate>,
}

/// Sliding union over one waiting window, with per-threshold hit counts.
struct WindowState {
    window: f64,
    /// Additional epochs merged past the start: floor(W/dt).
    extent: usize,
    union: SlidingUnion,
    hits: Vec<u64>,
    evals: u64,
}

impl WindowState {
    fn new(window: f64, dt: f64, n_thresholds: usize) -> Self {
        let extent = ((window / dt) + 1e-9).floor() as usize;
        WindowState {
            window,
            extent,
            union: SlidingUnion::new(),
            hits: vec![0; n_thresholds],
            evals: 0,
        }
    }

    fn evaluate(&mut self, tm: &TrafficMatrix, n_stations: usize, thresholds: &[f64]) {
        let fraction = self.union.city_fraction(tm, n_stations);
        for (hit, &theta) in self.hits.iter_mut().zip(thresholds) {
            if fraction >= theta {
                *hit += 1;
            }
        }
        self.evals += 1;
    }
}

/// Runs one scenario end to end.
pub fn run_scenario(scenario: &Scenario, inputs: &Inputs) -> Result<ResultBundle> {
    run_scenario_sink(scenario, inputs, &mut |_, _| Ok(()))
}

/// Like [`run_scenario`], but hands every epoch graph to `sink` before
/// folding it into the metrics (used to stream edge tables).
pub fn run_scenario_sink(
    scenario: &Scenario,
    inputs: &Inputs,
    sink: &mut dyn FnMut(usize, &EpochGraph) -> Result<()>,
) -> Result<ResultBundle> {
    scenario.validate()?;
    let stations = generate_lattice(&scenario.lattice, inputs.mask)?;
    if stations.is_empty() {
        return Err(Error::Geometry("lattice produced no ground stations".into()));
    }
    let traffic = map_cities(inputs.cities, &stations)?;
    let n_stations = stations.len();
    let k_total = scenario.clock.steps();
    let dt = scenario.clock.dt;

    let mut windows: Vec<WindowState> = scenario
        .windows
        .iter()
        .map(|&w| WindowState::new(w, dt, scenario.thresholds.len()))
        .collect();
    let max_extent = windows.iter().map(|w| w.extent).max().unwrap_or(0);

    // Epoch graphs are folded and dropped; only the last max-window span
    // stays resident so sliding unions can retire their oldest epoch.
    let mut trace = ConnectivityTrace::with_capacity(k_total);
    let mut ring: VecDeque<EpochGraph> = VecDeque::new();
    let mut base = 0usize;

    for (k, elapsed) in scenario.clock.epochs() {
        let sats = propagate_constellation(&scenario.constellation, elapsed)?;
        let graph = build_epoch_graph(
            &scenario.optical,
            &stations,
            &sats,
            scenario.policy,
            scenario.max_zenith,
        )?;
        sink(k, &graph)?;

        trace.lcc.push(lcc_fraction(&graph, n_stations));
        trace.city.push(city_fraction(&graph, &traffic, n_stations));
        trace.strength.push(epoch_link_strength(&graph));

        for w in &mut windows {
            w.union.push(&graph);
        }
        ring.push_back(graph);
        for w in &mut windows {
            // The window starting at k - extent is now fully merged:
            // score it, then retire its first epoch from the union.
            if k >= w.extent {
                let start = k - w.extent;
                w.evaluate(&traffic, n_stations, &scenario.thresholds);
                w.union.pop(&ring[start - base]);
            }
        }
        while base + max_extent < k + 1 {
            ring.pop_front();
            base += 1;
        }
    }
    // Remaining starts truncate at the horizon.
    for w in &mut windows {
        for start in k_total.saturating_sub(w.extent)..k_total {
            w.evaluate(&traffic, n_stations, &scenario.thresholds);
            w.union.pop(&ring[start - base]);
        }
        debug_assert_eq!(w.evals, k_total as u64);
    }

    let sbar = trace.strength.iter().sum::<f64>() / k_total as f64;
    let window_stats = windows
        .iter()
        .flat_map(|w| {
            scenario.thresholds.iter().zip(&w.hits).map(|(&theta, &hits)| {
                let qualified = hits == k_total as u64;
                WindowStats {
                    window: w.window,
                    theta,
                    up_fraction: hits as f64 / k_total as f64,
                    qualified,
                    sbar_conditioned: if qualified { sbar } else { f64::NAN },
                }
            })
        })
        .collect();

    let threshold_stats = scenario
        .thresholds
        .iter()
        .map(|&theta| {
            let up = threshold_trace(&trace.city, theta);
            let runs = extract_down_runs(&up, dt);
            let waits = forward_waits(&up, dt);
            let wait = wait_summary(&runs, &waits);
            let (tau_int, n_eff, sem) = event_autocorr(&runs.durations());
            ThresholdStats { theta, wait, tau_int, n_eff, sem }
        })
        .collect();

    Ok(ResultBundle {
        scenario_id: scenario.id.clone(),
        stations,
        n_cities: traffic.n_cities(),
        strength_autocorr: autocorr_summary(&trace.strength).ok(),
        lcc_autocorr: autocorr_summary(&trace.lcc).ok(),
        trace,
        thresholds: threshold_stats,
        windows: window_stats,
        sbar,
    })
}

/// Event-level autocorrelation of down-run durations. No events is a
/// trivially empty sample (N_eff 0); an inestimable series (too few
/// events or zero variance) yields NaN rather than a guessed tau.
fn event_autocorr(durations: &[f64]) -> (f64, f64, f64) {
    if durations.is_empty() {
        return (f64::NAN, 0.0, f64::NAN);
    }
    match autocorr_summary(durations) {
        Ok(est) => (est.tau_int, est.n_eff, est.sem),
        Err(_) => (f64::NAN, f64::NAN, f64::NAN),
    }
}

/// Which per-scenario tables to write. `stats.csv`, `windows.csv`, and
/// the sweep-level `long.csv` belong to `Stats`; `trace.csv` to `Traces`;
/// `edges.csv` to `Edges`. The manifest and `stations.csv` always write.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Emit {
    Stats,
    Traces,
    Edges,
    All,
}

impl Emit {
    pub fn stats(self) -> bool {
        matches!(self, Emit::Stats | Emit::All)
    }

    pub fn traces(self) -> bool {
        matches!(self, Emit::Traces | Emit::All)
    }

    pub fn edges(self) -> bool {
        matches!(self, Emit::Edges | Emit::All)
    }
}

impl FromStr for Emit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stats" => Ok(Emit::Stats),
            "traces" => Ok(Emit::Traces),
            "edges" => Ok(Emit::Edges),
            "all" => Ok(Emit::All),
            other => Err(Error::config(
                "emit",
                format!("unknown selector {other:?}; use edges, traces, stats, or all"),
            )),
        }
    }
}

/// Sweep execution options.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Worker threads; 0 lets the pool pick.
    pub workers: usize,
    /// Substring filter on scenario ids.
    pub filter: Option<String>,
    pub emit: Emit,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { workers: 0, filter: None, emit: Emit::Stats }
    }
}

/// What a sweep executed.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub scenario_ids: Vec<String>,
    pub warnings: Vec<String>,
}

/// Enumerates, executes, and exports a sweep under `out_dir`. Scenarios
/// run in parallel; every output byte is independent of the worker count.
pub fn run_sweep(
    config: &ScenarioConfig,
    out_dir: &Path,
    opts: &RunOptions,
) -> Result<SweepOutcome> {
    let plan = enumerate_sweep(config)?;
    let scenarios: Vec<&Scenario> = plan
        .scenarios
        .iter()
        .filter(|s| opts.filter.as_deref().is_none_or(|f| s.id.contains(f)))
        .collect();
    let mask = resolve_mask(&config.lattice.mask)?;
    let cities = resolve_cities(&config.lattice.cities)?;
    let inputs = Inputs { mask: &mask, cities: &cities };

    fs::create_dir_all(out_dir)
        .map_err(|source| Error::Path { path: out_dir.to_path_buf(), source })?;
    export::write_manifest(config, &out_dir.join("manifest.toml"))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    let bundles: Vec<ResultBundle> = pool.install(|| {
        scenarios
            .par_iter()
            .map(|scenario| {
                run_and_export(scenario, &inputs, out_dir, opts.emit)
                    .map_err(|e| Error::Scenario { id: scenario.id.clone(), source: Box::new(e) })
            })
            .collect::<Result<_>>()
    })?;

    if opts.emit.stats() {
        export::write_long_csv(&bundles, &out_dir.join("long.csv"))?;
    }
    Ok(SweepOutcome {
        scenario_ids: bundles.into_iter().map(|b| b.scenario_id).collect(),
        warnings: plan.warnings,
    })
}

fn run_and_export(
    scenario: &Scenario,
    inputs: &Inputs,
    out_dir: &Path,
    emit: Emit,
) -> Result<ResultBundle> {
    let dir = out_dir.join(&scenario.id);
    fs::create_dir_all(&dir).map_err(|source| Error::Path { path: dir.clone(), source })?;
    let bundle = if emit.edges() {
        let path = dir.join("edges.csv");
        let io_err = |source| Error::Path { path: path.clone(), source };
        let mut w = export::file_writer(&path)?;
        writeln!(w, "epoch,i,j,rate").map_err(io_err)?;
        let bundle = run_scenario_sink(scenario, inputs, &mut |k, graph| {
            for &(i, j, rate) in graph.edges() {
                writeln!(w, "{k},{i},{j},{rate}").map_err(io_err)?;
            }
            Ok(())
        })?;
        w.flush().map_err(io_err)?;
        bundle
    } else {
        run_scenario(scenario, inputs)?
    };
    export::export_bundle(&bundle, &scenario.clock, &dir, emit)?;
    Ok(bundle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::union_graph;
    use crate::groundgrid::{builtin_cities, LatticeSpec};
    use crate::linkmodel::OpticalParams;
    use crate::orbital::{ConstellationSpec, EpochClock};
    use crate::service::ServicePolicy;

    const DEG: f64 = std::f64::consts::PI / 180.0;

    fn land() -> LandMask {
        LandMask::uniform(6.0, true)
    }

    fn scenario(policy: ServicePolicy, windows: Vec<f64>) -> Scenario {
        Scenario {
            id: "test".into(),
            clock: EpochClock::new(0.0, 30.0, 240.0).unwrap(),
            lattice: LatticeSpec {
                d_eq: 1.0e6,
                alpha: 0.0,
                ns_step: 30.0 * DEG,
                snap_radius: 0.0,
                spacing_floor: 5.0e4,
            },
            constellation: ConstellationSpec::single_shell(
                600e3,
                53.0 * DEG,
                4,
                4,
                policy.terminals(),
            )
            .unwrap(),
            optical: OpticalParams::default(),
            policy,
            max_zenith: 60.0 * DEG,
            thresholds: vec![0.01, 0.5],
            windows,
        }
    }

    // Far-apart endpoints that map to distinct lattice stations, so no
    // city pair is auto-connected by sharing a station.
    fn sparse_cities() -> Vec<crate::groundgrid::City> {
        [("nyc", 40.7, -74.0), ("syd", -33.9, 151.2), ("cpt", -33.9, 18.4), ("tok", 35.7, 139.7)]
            .into_iter()
            .map(|(name, lat, lon)| crate::groundgrid::City {
                name: name.into(),
                lat: lat * DEG,
                lon: lon * DEG,
            })
            .collect()
    }

    #[test]
    fn zero_satellites_yield_empty_censored_run() {
        let mut sc = scenario(ServicePolicy::Bpc, vec![0.0, 60.0]);
        sc.constellation = ConstellationSpec { shells: vec![], polar_fraction: 0.0, terminals: 2 };
        let mask = land();
        let cities = sparse_cities();
        let inputs = Inputs { mask: &mask, cities: &cities };
        let bundle = run_scenario(&sc, &inputs).unwrap();

        let k = sc.clock.steps();
        assert!(bundle.trace.city.iter().all(|&v| v == 0.0));
        assert!(bundle.trace.strength.iter().all(|&v| v == 0.0));
        assert_eq!(bundle.sbar, 0.0);
        for ts in &bundle.thresholds {
            assert_eq!(ts.wait.m, 0, "no completed down runs, only the censored tail");
            assert_eq!(ts.wait.censored, k, "every epoch waits forever");
            assert!(ts.wait.fwd_mean.is_infinite());
            assert!(ts.wait.essentially_continuous());
        }
        for ws in &bundle.windows {
            assert_eq!(ws.up_fraction, 0.0);
            assert!(!ws.qualified);
            assert!(ws.sbar_conditioned.is_nan());
        }
    }

    #[test]
    fn all_water_mask_is_an_error() {
        let sc = scenario(ServicePolicy::Bpc, vec![0.0]);
        let mask = LandMask::uniform(6.0, false);
        let inputs = Inputs { mask: &mask, cities: builtin_cities() };
        let err = run_scenario(&sc, &inputs).unwrap_err();
        assert!(err.to_string().contains("no ground stations"), "{err}");
    }

    #[test]
    fn reruns_are_identical() {
        let sc = scenario(ServicePolicy::Mpc { terminals: 3 }, vec![0.0, 60.0, 1e6]);
        let mask = land();
        let inputs = Inputs { mask: &mask, cities: builtin_cities() };
        let a = run_scenario(&sc, &inputs).unwrap();
        let b = run_scenario(&sc, &inputs).unwrap();
        // Debug strings compare NaN fields as equal text.
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
        assert!(a.trace.strength.iter().any(|&s| s > 0.0), "scenario should produce edges");
    }

    #[test]
    fn sliding_windows_match_direct_unions() {
        let sc = scenario(ServicePolicy::Mpc { terminals: 3 }, vec![0.0, 60.0, 90.0, 1e6]);
        let mask = land();
        let inputs = Inputs { mask: &mask, cities: builtin_cities() };

        let mut graphs = Vec::new();
        let bundle = run_scenario_sink(&sc, &inputs, &mut |_, g| {
            graphs.push(g.clone());
            Ok(())
        })
        .unwrap();

        let stations = generate_lattice(&sc.lattice, &mask).unwrap();
        let traffic = map_cities(builtin_cities(), &stations).unwrap();
        let k_total = graphs.len();
        assert_eq!(k_total, sc.clock.steps());

        for ws in &bundle.windows {
            let hits = (0..k_total)
                .filter(|&start| {
                    let uw = union_graph(&graphs, start, ws.window, sc.clock.dt);
                    city_fraction(&uw.graph, &traffic, stations.len()) >= ws.theta
                })
                .count();
            assert_eq!(
                ws.up_fraction,
                hits as f64 / k_total as f64,
                "W={} theta={}",
                ws.window,
                ws.theta
            );
            assert_eq!(ws.qualified, hits == k_total);
        }
    }

    #[test]
    fn zero_window_reduces_to_instantaneous_trace() {
        let sc = scenario(ServicePolicy::Mpc { terminals: 3 }, vec![0.0]);
        let mask = land();
        let inputs = Inputs { mask: &mask, cities: builtin_cities() };
        let bundle = run_scenario(&sc, &inputs).unwrap();
        for ws in &bundle.windows {
            let direct = bundle.trace.city.iter().filter(|&&v| v >= ws.theta).count();
            assert_eq!(ws.up_fraction, direct as f64 / bundle.trace.len() as f64);
        }
    }

    #[test]
    fn threshold_stats_match_manual_fold() {
        let sc = scenario(ServicePolicy::Bpc, vec![0.0]);
        let mask = land();
        let inputs = Inputs { mask: &mask, cities: builtin_cities() };
        let bundle = run_scenario(&sc, &inputs).unwrap();
        let dt = sc.clock.dt;
        for ts in &bundle.thresholds {
            let up = threshold_trace(&bundle.trace.city, ts.theta);
            let runs = extract_down_runs(&up, dt);
            let expect = wait_summary(&runs, &forward_waits(&up, dt));
            assert_eq!(format!("{:?}", ts.wait), format!("{expect:?}"));
        }
    }

    #[test]
    fn sink_sees_every_epoch_in_order() {
        let sc = scenario(ServicePolicy::Bpc, vec![0.0]);
        let mask = land();
        let inputs = Inputs { mask: &mask, cities: builtin_cities() };
        let mut seen = Vec::new();
        run_scenario_sink(&sc, &inputs, &mut |k, _| {
            seen.push(k);
            Ok(())
        })
        .unwrap();
        assert_eq!(seen, (0..sc.clock.steps()).collect::<Vec<_>>());
    }

    #[test]
    fn sink_errors_abort_the_run() {
        let sc = scenario(ServicePolicy::Bpc, vec![0.0]);
        let mask = land();
        let inputs = Inputs { mask: &mask, cities: builtin_cities() };
        let err = run_scenario_sink(&sc, &inputs, &mut |k, _| {
            if k == 2 {
                return Err(Error::Domain("sink failure".into()));
            }
            Ok(())
        })
        .unwrap_err();
        assert!(err.to_string().contains("sink failure"));
    }
}
