//! Browser bindings: JSON-in/JSON-out wrappers around the simulator for
//! the static demo page. Every export returns a JSON string; failures
//! come back as `{"error": "..."}` so the page can render them.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use qbackbone::constants::R_EARTH;
use qbackbone::error::Result;
use qbackbone::groundgrid::{builtin_cities, generate_lattice, LandMask, LatticeSpec};
use qbackbone::harness::{run_scenario, Inputs, Scenario};
use qbackbone::linkmodel::{downlink_efficiency, pair_rate, OpticalParams};
use qbackbone::orbital::{footprint_diameter, ConstellationSpec, EpochClock};
use qbackbone::service::ServicePolicy;
use qbackbone::Error;

const DEG: f64 = std::f64::consts::PI / 180.0;

#[derive(Serialize)]
struct ErrorOut {
    error: String,
}

fn to_json<T: Serialize>(value: Result<T>) -> String {
    let out = match value {
        Ok(v) => serde_json::to_string(&v),
        Err(e) => serde_json::to_string(&ErrorOut { error: e.to_string() }),
    };
    out.unwrap_or_else(|e| format!("{{\"error\":\"serialization: {e}\"}}"))
}

#[derive(Serialize)]
struct LatticeOut {
    count: usize,
    lat_deg: Vec<f64>,
    lon_deg: Vec<f64>,
}

/// Ground lattice over the bundled land mask for an anisotropy exponent.
#[wasm_bindgen]
pub fn lattice_json(alpha: f64, d_eq_km: f64, ns_step_deg: f64) -> String {
    to_json(build_lattice(alpha, d_eq_km, ns_step_deg))
}

fn build_lattice(alpha: f64, d_eq_km: f64, ns_step_deg: f64) -> Result<LatticeOut> {
    let spec = LatticeSpec {
        d_eq: d_eq_km * 1e3,
        alpha,
        ns_step: ns_step_deg * DEG,
        ..LatticeSpec::default()
    };
    spec.validate()?;
    if spec.d_eq < 2e5 {
        return Err(Error::config("d_eq", "keep spacing >= 200 km for the browser demo"));
    }
    let stations = generate_lattice(&spec, LandMask::builtin())?;
    Ok(LatticeOut {
        count: stations.len(),
        lat_deg: stations.iter().map(|s| s.lat / DEG).collect(),
        lon_deg: stations.iter().map(|s| s.lon / DEG).collect(),
    })
}

#[derive(Serialize)]
struct LinkBudgetOut {
    zenith_deg: Vec<f64>,
    slant_km: Vec<f64>,
    eta_down: Vec<f64>,
    /// Symmetric dual-downlink pair rate, pairs/s.
    pair_rate: Vec<f64>,
    footprint_elev_deg: Vec<f64>,
    footprint_km: Vec<f64>,
}

/// Downlink efficiency and symmetric pair rate versus zenith angle, plus
/// the coverage footprint versus minimum elevation, at one altitude.
#[wasm_bindgen]
pub fn link_budget_json(altitude_km: f64, max_zenith_deg: f64) -> String {
    to_json(build_link_budget(altitude_km, max_zenith_deg))
}

fn build_link_budget(altitude_km: f64, max_zenith_deg: f64) -> Result<LinkBudgetOut> {
    if !(100.0..=36_000.0).contains(&altitude_km) {
        return Err(Error::config("altitude_km", "must lie in [100, 36000]"));
    }
    if !(5.0..=89.0).contains(&max_zenith_deg) {
        return Err(Error::config("max_zenith_deg", "must lie in [5, 89]"));
    }
    let h = altitude_km * 1e3;
    let params = OpticalParams::default();
    let n = 240;
    let mut out = LinkBudgetOut {
        zenith_deg: Vec::with_capacity(n + 1),
        slant_km: Vec::with_capacity(n + 1),
        eta_down: Vec::with_capacity(n + 1),
        pair_rate: Vec::with_capacity(n + 1),
        footprint_elev_deg: Vec::new(),
        footprint_km: Vec::new(),
    };
    for i in 0..=n {
        let z_deg = max_zenith_deg * i as f64 / n as f64;
        let z = z_deg * DEG;
        // Law-of-cosines slant range from ground to the satellite shell.
        let r = R_EARTH + h;
        let d = (r * r - (R_EARTH * z.sin()).powi(2)).sqrt() - R_EARTH * z.cos();
        out.zenith_deg.push(z_deg);
        out.slant_km.push(d / 1e3);
        out.eta_down.push(downlink_efficiency(&params, d, z)?);
        out.pair_rate.push(pair_rate(&params, d, z, d, z)?);
    }
    for e in 5..=85 {
        let elev = e as f64 * DEG;
        out.footprint_elev_deg.push(e as f64);
        out.footprint_km.push(footprint_diameter(h, elev)? / 1e3);
    }
    Ok(out)
}

#[derive(Serialize)]
struct WaitRow {
    theta: f64,
    events: usize,
    mean_s: f64,
    p50_s: f64,
    p90_s: f64,
    fwd_mean_s: f64,
    censored: usize,
}

#[derive(Serialize)]
struct MiniSimOut {
    stations: usize,
    satellites: u32,
    t: Vec<f64>,
    lcc: Vec<f64>,
    city: Vec<f64>,
    strength: Vec<f64>,
    sbar: f64,
    waits: Vec<WaitRow>,
}

/// A small end-to-end run on the bundled mask and city list: coarse
/// global lattice, one shell, instantaneous connectivity trace plus
/// waiting-time summaries.
#[wasm_bindgen]
pub fn mini_sim_json(
    policy: &str,
    planes: u32,
    sats_per_plane: u32,
    altitude_km: f64,
    minutes: f64,
) -> String {
    to_json(build_mini_sim(policy, planes, sats_per_plane, altitude_km, minutes))
}

fn build_mini_sim(
    policy: &str,
    planes: u32,
    sats_per_plane: u32,
    altitude_km: f64,
    minutes: f64,
) -> Result<MiniSimOut> {
    let policy: ServicePolicy = policy.parse()?;
    if !(1..=60).contains(&planes) || !(1..=60).contains(&sats_per_plane) {
        return Err(Error::config("planes", "plane and per-plane counts must lie in 1..=60"));
    }
    if !(300.0..=2_000.0).contains(&altitude_km) {
        return Err(Error::config("altitude_km", "must lie in [300, 2000]"));
    }
    if !(1.0..=180.0).contains(&minutes) {
        return Err(Error::config("minutes", "must lie in [1, 180]"));
    }
    let dt = 10.0;
    let horizon = (minutes * 60.0 / dt).round().max(1.0) * dt;
    let scenario = Scenario {
        id: "browser".into(),
        clock: EpochClock::new(0.0, dt, horizon)?,
        lattice: LatticeSpec {
            d_eq: 1.2e6,
            alpha: 1.0,
            ns_step: 10.0 * DEG,
            ..LatticeSpec::default()
        },
        constellation: ConstellationSpec::single_shell(
            altitude_km * 1e3,
            53.0 * DEG,
            planes,
            sats_per_plane,
            policy.terminals(),
        )?,
        optical: OpticalParams::default(),
        policy,
        max_zenith: 60.0 * DEG,
        thresholds: vec![0.5, 0.7, 0.9],
        windows: vec![dt],
    };
    let inputs = Inputs { mask: LandMask::builtin(), cities: builtin_cities() };
    let bundle = run_scenario(&scenario, &inputs)?;
    let clock = &scenario.clock;
    Ok(MiniSimOut {
        stations: bundle.stations.len(),
        satellites: scenario.constellation.sat_count(),
        t: (0..bundle.trace.len()).map(|k| clock.t_at(k)).collect(),
        lcc: bundle.trace.lcc.clone(),
        city: bundle.trace.city.clone(),
        strength: bundle.trace.strength.clone(),
        sbar: bundle.sbar,
        waits: bundle
            .thresholds
            .iter()
            .map(|t| WaitRow {
                theta: t.theta,
                events: t.wait.m,
                mean_s: t.wait.mean,
                p50_s: t.wait.p50,
                p90_s: t.wait.p90,
                fwd_mean_s: t.wait.fwd_mean,
                censored: t.wait.censored,
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> serde_json::Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn lattice_payload_is_well_formed() {
        let v = parse(&lattice_json(1.0, 800.0, 7.2));
        let count = v["count"].as_u64().unwrap() as usize;
        assert!(count > 100, "expected a populated lattice, got {count}");
        assert_eq!(v["lat_deg"].as_array().unwrap().len(), count);
        assert_eq!(v["lon_deg"].as_array().unwrap().len(), count);
    }

    #[test]
    fn lattice_rejects_tiny_spacing() {
        let v = parse(&lattice_json(1.0, 50.0, 7.2));
        assert!(v["error"].as_str().unwrap().contains("200 km"));
    }

    #[test]
    fn link_budget_decreases_with_zenith() {
        let v = parse(&link_budget_json(700.0, 70.0));
        let rates: Vec<f64> =
            v["pair_rate"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        assert!(rates.windows(2).all(|p| p[1] <= p[0]), "rate must fall with zenith");
        assert!(rates[0] > 0.0);
        let fp = v["footprint_km"].as_array().unwrap();
        assert_eq!(fp.len(), 81);
    }

    #[test]
    fn mini_sim_round_trips() {
        let v = parse(&mini_sim_json("mpc3", 6, 4, 700.0, 5.0));
        assert!(v.get("error").is_none(), "{v}");
        let n = v["t"].as_array().unwrap().len();
        assert_eq!(n, 30, "5 minutes at 10 s steps");
        assert_eq!(v["city"].as_array().unwrap().len(), n);
        assert_eq!(v["waits"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn mini_sim_validates_inputs() {
        let v = parse(&mini_sim_json("mpc9", 6, 4, 700.0, 5.0));
        assert!(v["error"].as_str().is_some());
        let v = parse(&mini_sim_json("bpc", 6, 4, 100.0, 5.0));
        assert!(v["error"].as_str().unwrap().contains("altitude"));
    }
}
