//! Delimited-table and manifest writers. Floats print in shortest
//! round-trip form; non-finite values print as `NaN`, `inf`, `-inf`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::connectivity::ConnectivityTrace;
use crate::error::{Error, Result};
use crate::groundgrid::write_stations;
use crate::orbital::EpochClock;

use super::config::ScenarioConfig;
use super::run::{Emit, ResultBundle, ThresholdStats, WindowStats};

pub(crate) fn file_writer(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::Path { path: path.to_path_buf(), source })
}

fn write_file(path: &Path, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    let io = || -> std::io::Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        body(&mut w)?;
        w.flush()
    };
    io().map_err(|source| Error::Path { path: path.to_path_buf(), source })
}

/// Serializes the validated config verbatim; loading the file back yields
/// an identical config, which is what makes a run reproducible.
pub fn write_manifest(config: &ScenarioConfig, path: &Path) -> Result<()> {
    let text = config.to_toml()?;
    std::fs::write(path, text).map_err(|source| Error::Path { path: path.to_path_buf(), source })
}

/// Writes every table one scenario owns into `dir`.
pub fn export_bundle(
    bundle: &ResultBundle,
    clock: &EpochClock,
    dir: &Path,
    emit: Emit,
) -> Result<()> {
    write_stations_csv(bundle, &dir.join("stations.csv"))?;
    if emit.traces() {
        write_trace_csv(&bundle.trace, clock, &dir.join("trace.csv"))?;
    }
    if emit.stats() {
        write_stats_csv(&bundle.thresholds, &dir.join("stats.csv"))?;
        write_windows_csv(&bundle.windows, &dir.join("windows.csv"))?;
    }
    Ok(())
}

fn write_stations_csv(bundle: &ResultBundle, path: &Path) -> Result<()> {
    let mut w = file_writer(path)?;
    write_stations(&mut w, &bundle.stations)?;
    w.flush().map_err(|source| Error::Path { path: path.to_path_buf(), source })
}

fn write_trace_csv(trace: &ConnectivityTrace, clock: &EpochClock, path: &Path) -> Result<()> {
    write_file(path, |w| {
        writeln!(w, "epoch,t,lcc,city,strength")?;
        for k in 0..trace.len() {
            writeln!(
                w,
                "{k},{},{},{},{}",
                clock.t_at(k),
                trace.lcc[k],
                trace.city[k],
                trace.strength[k]
            )?;
        }
        Ok(())
    })
}

fn write_stats_csv(rows: &[ThresholdStats], path: &Path) -> Result<()> {
    write_file(path, |w| {
        writeln!(
            w,
            "theta,m,mean,std,p10,p50,p90,fwd_mean,censored,inspection_wait,tau_int,n_eff,sem"
        )?;
        for r in rows {
            let s = &r.wait;
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.theta,
                s.m,
                s.mean,
                s.std,
                s.p10,
                s.p50,
                s.p90,
                s.fwd_mean,
                s.censored,
                s.inspection_wait,
                r.tau_int,
                r.n_eff,
                r.sem
            )?;
        }
        Ok(())
    })
}

fn write_windows_csv(rows: &[WindowStats], path: &Path) -> Result<()> {
    write_file(path, |w| {
        writeln!(w, "window_s,theta,up_fraction,qualified,sbar_conditioned")?;
        for r in rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.window, r.theta, r.up_fraction, r.qualified as u8, r.sbar_conditioned
            )?;
        }
        Ok(())
    })
}

/// Plot-ready long-format table over the whole sweep, keyed by
/// (scenario, metric, theta, window); inapplicable keys stay empty.
pub fn write_long_csv(bundles: &[ResultBundle], path: &Path) -> Result<()> {
    write_file(path, |w| {
        writeln!(w, "scenario,metric,theta,window,value")?;
        let mut row = |id: &str,
                       metric: &str,
                       theta: Option<f64>,
                       window: Option<f64>,
                       value: f64|
         -> std::io::Result<()> {
            let theta = theta.map(|v| v.to_string()).unwrap_or_default();
            let window = window.map(|v| v.to_string()).unwrap_or_default();
            writeln!(w, "{id},{metric},{theta},{window},{value}")
        };
        for b in bundles {
            let id = &b.scenario_id;
            row(id, "sbar", None, None, b.sbar)?;
            for (name, est) in [("strength", &b.strength_autocorr), ("lcc", &b.lcc_autocorr)] {
                let (tau, n_eff, sem) = match est {
                    Some(e) => (e.tau_int, e.n_eff, e.sem),
                    None => (f64::NAN, f64::NAN, f64::NAN),
                };
                row(id, &format!("tau_int_{name}"), None, None, tau)?;
                row(id, &format!("n_eff_{name}"), None, None, n_eff)?;
                row(id, &format!("sem_{name}"), None, None, sem)?;
            }
            for t in &b.thresholds {
                let th = Some(t.theta);
                row(id, "wait_mean", th, None, t.wait.mean)?;
                row(id, "wait_std", th, None, t.wait.std)?;
                row(id, "wait_p10", th, None, t.wait.p10)?;
                row(id, "wait_p50", th, None, t.wait.p50)?;
                row(id, "wait_p90", th, None, t.wait.p90)?;
                row(id, "fwd_mean", th, None, t.wait.fwd_mean)?;
                row(id, "inspection_wait", th, None, t.wait.inspection_wait)?;
                row(id, "wait_events", th, None, t.wait.m as f64)?;
                row(id, "wait_censored", th, None, t.wait.censored as f64)?;
                row(id, "tau_int_wait", th, None, t.tau_int)?;
                row(id, "n_eff_wait", th, None, t.n_eff)?;
                row(id, "sem_wait", th, None, t.sem)?;
            }
            for ws in &b.windows {
                let th = Some(ws.theta);
                let win = Some(ws.window);
                row(id, "up_fraction", th, win, ws.up_fraction)?;
                row(id, "qualified", th, win, ws.qualified as u8 as f64)?;
                row(id, "sbar_conditioned", th, win, ws.sbar_conditioned)?;
            }
        }
        Ok(())
    })
}
