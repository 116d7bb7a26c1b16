//! Declarative run configuration. Files use TOML sections mirroring the
//! pipeline stages; angles are degrees in files and radians in memory.

use std::borrow::Cow;
use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groundgrid::{builtin_cities, read_cities, City, LandMask, LatticeSpec};
use crate::linkmodel::OpticalParams;
use crate::orbital::EpochClock;
use crate::service::ServicePolicy;

/// m; the lowest altitude any sweep may request.
const ALT_FLOOR: f64 = 285e3;
/// m; LEO ceiling for sweeps.
const ALT_CEIL: f64 = 2_000e3;

/// Epoch grid. Times in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClockSection {
    pub t_start: f64,
    pub dt: f64,
    pub horizon: f64,
}

impl Default for ClockSection {
    fn default() -> Self {
        ClockSection { t_start: 0.0, dt: 1.0, horizon: 14_400.0 }
    }
}

impl ClockSection {
    pub fn to_clock(&self) -> EpochClock {
        EpochClock { t_start: self.t_start, dt: self.dt, horizon: self.horizon }
    }

    fn validate(&self) -> Result<()> {
        if !self.t_start.is_finite() {
            return Err(Error::config("clock.t_start", "must be finite"));
        }
        self.to_clock().validate()
    }
}

/// Ground lattice. `alphas` is a sweep list; lengths in meters, the row
/// step in degrees. `mask` and `cities` accept `builtin`, `all_land` /
/// `all_water` (mask only), or a file path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeSection {
    pub d_eq: f64,
    pub alphas: Vec<f64>,
    pub ns_step_deg: f64,
    pub snap_radius: f64,
    pub spacing_floor: f64,
    pub mask: String,
    pub cities: String,
}

impl Default for LatticeSection {
    fn default() -> Self {
        LatticeSection {
            d_eq: 4.0e5,
            alphas: vec![1.0],
            ns_step_deg: 3.6,
            snap_radius: 1.0e5,
            spacing_floor: 5.0e4,
            mask: "builtin".into(),
            cities: "builtin".into(),
        }
    }
}

impl LatticeSection {
    pub fn to_spec(&self, alpha: f64) -> LatticeSpec {
        LatticeSpec {
            d_eq: self.d_eq,
            alpha,
            ns_step: self.ns_step_deg.to_radians(),
            snap_radius: self.snap_radius,
            spacing_floor: self.spacing_floor,
        }
    }

    fn validate(&self) -> Result<()> {
        non_empty("lattice.alphas", &self.alphas)?;
        for &alpha in &self.alphas {
            if !(-1.0..=1.5).contains(&alpha) {
                return Err(Error::config("lattice.alphas", "every alpha must lie in [-1, 1.5]"));
            }
        }
        self.to_spec(self.alphas[0]).validate()
    }
}

/// Constellation sweep axes plus shared shell geometry. Altitudes in
/// meters, inclinations in degrees, `phase_stagger` the Walker factor F.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstellationSection {
    pub altitudes: Vec<f64>,
    pub plane_counts: Vec<u32>,
    pub sats_per_plane: Vec<u32>,
    pub polar_fractions: Vec<f64>,
    pub inclination_deg: f64,
    pub polar_inclination_deg: f64,
    pub phase_stagger: f64,
    pub policies: Vec<String>,
}

impl Default for ConstellationSection {
    fn default() -> Self {
        ConstellationSection {
            altitudes: vec![700e3],
            plane_counts: vec![36],
            sats_per_plane: vec![20],
            polar_fractions: vec![0.1],
            inclination_deg: 53.0,
            polar_inclination_deg: 98.0,
            phase_stagger: 0.0,
            policies: vec!["mpc7".into()],
        }
    }
}

impl ConstellationSection {
    fn validate(&self) -> Result<()> {
        non_empty("constellation.altitudes", &self.altitudes)?;
        non_empty("constellation.plane_counts", &self.plane_counts)?;
        non_empty("constellation.sats_per_plane", &self.sats_per_plane)?;
        non_empty("constellation.polar_fractions", &self.polar_fractions)?;
        non_empty("constellation.policies", &self.policies)?;
        for &alt in &self.altitudes {
            if !(alt >= ALT_FLOOR) || !alt.is_finite() {
                return Err(Error::config(
                    "constellation.altitudes",
                    format!("{} km is below the sweep floor of {} km", alt / 1e3, ALT_FLOOR / 1e3),
                ));
            }
            if alt > ALT_CEIL {
                return Err(Error::config(
                    "constellation.altitudes",
                    format!("{} km is above the sweep ceiling of {} km", alt / 1e3, ALT_CEIL / 1e3),
                ));
            }
        }
        for &p in &self.plane_counts {
            if !(1..=720).contains(&p) {
                return Err(Error::config("constellation.plane_counts", "must lie in 1..=720"));
            }
        }
        for &s in &self.sats_per_plane {
            if !(1..=120).contains(&s) {
                return Err(Error::config("constellation.sats_per_plane", "must lie in 1..=120"));
            }
        }
        for &f in &self.polar_fractions {
            if !(0.0..=0.5).contains(&f) {
                return Err(Error::config("constellation.polar_fractions", "must lie in [0, 0.5]"));
            }
        }
        let min_planes = self.plane_counts.iter().copied().min().unwrap_or(0);
        if self.polar_fractions.iter().any(|&f| f > 0.0) && min_planes < 2 {
            return Err(Error::config(
                "constellation.plane_counts",
                "a positive polar fraction needs at least two planes to split",
            ));
        }
        for (key, v) in [
            ("constellation.inclination_deg", self.inclination_deg),
            ("constellation.polar_inclination_deg", self.polar_inclination_deg),
        ] {
            if !(v > 0.0 && v <= 180.0) {
                return Err(Error::config(key, "must lie in (0, 180] degrees"));
            }
        }
        if !self.phase_stagger.is_finite() || self.phase_stagger < 0.0 {
            return Err(Error::config("constellation.phase_stagger", "must be finite and >= 0"));
        }
        for s in &self.policies {
            parse_policy(s)?;
        }
        Ok(())
    }
}

/// Optical budget in SI units; see the link-model parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OpticalSection {
    pub aperture_radius: f64,
    pub beam_waist: f64,
    pub wavelength: f64,
    pub eta_zenith: f64,
    pub source_rate: f64,
    pub rate_floor: f64,
}

impl Default for OpticalSection {
    fn default() -> Self {
        let p = OpticalParams::default();
        OpticalSection {
            aperture_radius: p.aperture_radius,
            beam_waist: p.beam_waist,
            wavelength: p.wavelength,
            eta_zenith: p.eta_zenith,
            source_rate: p.source_rate,
            rate_floor: p.rate_floor,
        }
    }
}

impl OpticalSection {
    pub fn to_params(&self) -> OpticalParams {
        OpticalParams {
            aperture_radius: self.aperture_radius,
            beam_waist: self.beam_waist,
            wavelength: self.wavelength,
            eta_zenith: self.eta_zenith,
            source_rate: self.source_rate,
            rate_floor: self.rate_floor,
        }
    }
}

/// Geometric visibility constraint, degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VisibilitySection {
    pub max_zenith_deg: f64,
}

impl Default for VisibilitySection {
    fn default() -> Self {
        VisibilitySection { max_zenith_deg: 57.0 }
    }
}

/// Connectivity thresholds and waiting windows (seconds).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricsSection {
    pub thresholds: Vec<f64>,
    pub windows: Vec<f64>,
}

impl Default for MetricsSection {
    fn default() -> Self {
        MetricsSection {
            thresholds: vec![0.5, 0.7, 0.9],
            windows: vec![1.0, 10.0, 60.0, 3_600.0, 14_400.0],
        }
    }
}

impl MetricsSection {
    fn validate(&self) -> Result<()> {
        non_empty("metrics.thresholds", &self.thresholds)?;
        non_empty("metrics.windows", &self.windows)?;
        for &theta in &self.thresholds {
            if !(theta > 0.0 && theta <= 1.0) {
                return Err(Error::config("metrics.thresholds", "must lie in (0, 1]"));
            }
        }
        for &w in &self.windows {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::config("metrics.windows", "must be finite and >= 0"));
            }
        }
        Ok(())
    }
}

/// Optional default output directory; the CLI `--out` flag overrides it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

/// A full declarative run description: every value an executed sweep
/// depends on, with defaults for anything omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub clock: ClockSection,
    pub lattice: LatticeSection,
    pub constellation: ConstellationSection,
    pub optical: OpticalSection,
    pub visibility: VisibilitySection,
    pub metrics: MetricsSection,
    pub output: OutputSection,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.clock.validate()?;
        self.lattice.validate()?;
        self.constellation.validate()?;
        self.optical.to_params().validate()?;
        let z = self.visibility.max_zenith_deg;
        if !(z > 0.0 && z < 90.0) {
            return Err(Error::config("visibility.max_zenith_deg", "must lie in (0, 90) degrees"));
        }
        self.metrics.validate()
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self)
            .map_err(|e| Error::Parse { what: "config".into(), reason: e.to_string() })
    }
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| Error::Path { path: path.to_path_buf(), source })?;
    parse_config(&text, &path.display().to_string())
}

/// Parses config text; `origin` names the source in diagnostics.
pub fn parse_config(text: &str, origin: &str) -> Result<ScenarioConfig> {
    let config: ScenarioConfig = toml::from_str(text)
        .map_err(|e| Error::Parse { what: origin.to_string(), reason: e.to_string() })?;
    config.validate()?;
    Ok(config)
}

/// Resolves a mask token: `builtin`, `all_land`, `all_water`, or a path.
pub fn resolve_mask(token: &str) -> Result<Cow<'static, LandMask>> {
    match token {
        "builtin" => Ok(Cow::Borrowed(LandMask::builtin())),
        "all_land" => Ok(Cow::Owned(LandMask::uniform(6.0, true))),
        "all_water" => Ok(Cow::Owned(LandMask::uniform(6.0, false))),
        path => {
            let file = open(path)?;
            Ok(Cow::Owned(LandMask::parse(file)?))
        }
    }
}

/// Resolves a city-table token: `builtin` or a path.
pub fn resolve_cities(token: &str) -> Result<Cow<'static, [City]>> {
    match token {
        "builtin" => Ok(Cow::Borrowed(builtin_cities())),
        path => {
            let file = open(path)?;
            Ok(Cow::Owned(read_cities(file)?))
        }
    }
}

fn open(path: &str) -> Result<std::io::BufReader<File>> {
    File::open(path)
        .map(std::io::BufReader::new)
        .map_err(|source| Error::Path { path: PathBuf::from(path), source })
}

/// Parses a policy string, attributing failures to the config key.
pub(crate) fn parse_policy(s: &str) -> Result<ServicePolicy> {
    s.parse::<ServicePolicy>().map_err(|e| {
        let reason = match e {
            Error::Config { reason, .. } => reason,
            other => other.to_string(),
        };
        Error::config("constellation.policies", reason)
    })
}

fn non_empty<T>(key: &str, values: &[T]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::config(key, "sweep list must not be empty"));
    }
    Ok(())
}
