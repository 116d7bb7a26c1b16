//! Circular two-body orbit propagation on a spherical Earth, frame
//! conversion, topocentric geometry, and coverage footprints.

use crate::constants::{MU_EARTH, OMEGA_EARTH, R_EARTH};
use crate::error::{Error, Result};
use crate::vec3::{self, Vec3};

/// Uniform epoch grid. Epoch `k` maps to `t_start + k * dt` for
/// `k = 0 .. steps()`; the horizon must be an integer multiple of `dt`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EpochClock {
    /// Reference epoch, s. The Earth rotation angle is zero here.
    pub t_start: f64,
    /// Step length, s.
    pub dt: f64,
    /// Total simulated span, s.
    pub horizon: f64,
}

impl EpochClock {
    pub fn new(t_start: f64, dt: f64, horizon: f64) -> Result<Self> {
        let clock = EpochClock { t_start, dt, horizon };
        clock.validate()?;
        Ok(clock)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::config("clock.dt", "must be finite and > 0"));
        }
        if !(self.horizon >= self.dt) || !self.horizon.is_finite() {
            return Err(Error::config("clock.horizon", "must be finite and >= dt"));
        }
        let steps = self.horizon / self.dt;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
            return Err(Error::config("clock.horizon", "must be an integer multiple of dt"));
        }
        Ok(())
    }

    /// Number of epochs K.
    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    /// Seconds since `t_start` at epoch `k`.
    pub fn elapsed(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    /// Absolute time at epoch `k`.
    pub fn t_at(&self, k: usize) -> f64 {
        self.t_start + self.elapsed(k)
    }

    /// Iterator over `(k, seconds since t_start)`.
    pub fn epochs(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        (0..self.steps()).map(|k| (k, self.elapsed(k)))
    }
}

/// One orbital shell: `planes` circular orbits at a common altitude and
/// inclination, RAAN spread uniformly, `sats_per_plane` satellites per
/// plane with uniform in-plane phase plus a Walker-style stagger between
/// adjacent planes.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ShellSpec {
    /// Altitude above the spherical Earth, m.
    pub altitude: f64,
    /// Inclination, rad.
    pub inclination: f64,
    pub planes: u32,
    pub sats_per_plane: u32,
    /// Walker phasing factor F; adjacent planes are phase-shifted by
    /// `2 pi F / (P * S)`.
    pub phase_stagger: f64,
    /// Right ascension of ascending node per plane, rad (length `planes`).
    pub raan_offsets: Vec<f64>,
}

impl ShellSpec {
    /// Shell with RAANs spread uniformly over `[0, 2 pi)`.
    pub fn uniform(altitude: f64, inclination: f64, planes: u32, sats_per_plane: u32) -> Self {
        let raan_offsets =
            (0..planes).map(|p| 2.0 * std::f64::consts::PI * p as f64 / planes as f64).collect();
        ShellSpec {
            altitude,
            inclination,
            planes,
            sats_per_plane,
            phase_stagger: 0.0,
            raan_offsets,
        }
    }

    pub fn sat_count(&self) -> u32 {
        self.planes * self.sats_per_plane
    }

    pub fn validate(&self) -> Result<()> {
        if self.planes == 0 || self.sats_per_plane == 0 {
            return Err(Error::Geometry("shell with zero planes or zero satellites".into()));
        }
        if self.raan_offsets.len() != self.planes as usize {
            return Err(Error::Geometry(format!(
                "shell declares {} planes but {} RAAN offsets",
                self.planes,
                self.raan_offsets.len()
            )));
        }
        if !(self.altitude > 0.0) {
            return Err(Error::Domain("shell altitude must be positive".into()));
        }
        Ok(())
    }
}

/// A constellation: a primary shell plus an optional secondary polar
/// shell. `polar_fraction` records the share of the plane budget moved to
/// the polar shell; the total satellite budget is preserved.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConstellationSpec {
    pub shells: Vec<ShellSpec>,
    pub polar_fraction: f64,
    /// Optical terminals per satellite (2..=7).
    pub terminals: u8,
}

impl ConstellationSpec {
    pub fn single_shell(
        altitude: f64,
        inclination: f64,
        planes: u32,
        sats_per_plane: u32,
        terminals: u8,
    ) -> Result<Self> {
        let spec = ConstellationSpec {
            shells: vec![ShellSpec::uniform(altitude, inclination, planes, sats_per_plane)],
            polar_fraction: 0.0,
            terminals,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Splits a `planes x sats_per_plane` budget between a primary shell
    /// and a polar shell. The polar shell receives
    /// `round(polar_fraction * planes)` planes (at least one when the
    /// fraction is positive), so the satellite total stays `planes *
    /// sats_per_plane`.
    pub fn dual_shell(
        altitude: f64,
        primary_inclination: f64,
        polar_inclination: f64,
        planes: u32,
        sats_per_plane: u32,
        polar_fraction: f64,
        terminals: u8,
    ) -> Result<Self> {
        if !(0.0..=0.5).contains(&polar_fraction) {
            return Err(Error::config("polar_fraction", "must lie in [0, 0.5]"));
        }
        if polar_fraction == 0.0 {
            let mut spec = Self::single_shell(
                altitude,
                primary_inclination,
                planes,
                sats_per_plane,
                terminals,
            )?;
            spec.polar_fraction = 0.0;
            return Ok(spec);
        }
        if planes < 2 {
            return Err(Error::Geometry("dual shell split needs at least two planes".into()));
        }
        let polar_planes = ((polar_fraction * planes as f64).round() as u32).clamp(1, planes - 1);
        let spec = ConstellationSpec {
            shells: vec![
                ShellSpec::uniform(
                    altitude,
                    primary_inclination,
                    planes - polar_planes,
                    sats_per_plane,
                ),
                ShellSpec::uniform(altitude, polar_inclination, polar_planes, sats_per_plane),
            ],
            polar_fraction,
            terminals,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn sat_count(&self) -> u32 {
        self.shells.iter().map(ShellSpec::sat_count).sum()
    }

    /// Total optical terminals across the constellation.
    pub fn terminal_count(&self) -> u32 {
        self.sat_count() * self.terminals as u32
    }

    pub fn validate(&self) -> Result<()> {
        // An empty shell list is a degenerate but valid constellation: zero
        // satellites, so propagation yields no states and every epoch graph
        // is empty.
        for shell in &self.shells {
            shell.validate()?;
        }
        if !(2..=7).contains(&self.terminals) {
            return Err(Error::config("terminals", "must lie in 2..=7"));
        }
        Ok(())
    }
}

/// Satellite state at one epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SatState {
    pub sat_id: u32,
    pub pos_eci: Vec3,
    pub pos_ecef: Vec3,
}

/// Topocentric view of a satellite from a ground point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Topocentric {
    /// Elevation above the local horizon, rad.
    pub elevation: f64,
    /// Azimuth clockwise from north, rad, in `[0, 2 pi)`.
    pub azimuth: f64,
    /// Zenith angle `pi/2 - elevation`, rad.
    pub zenith: f64,
    /// Euclidean station-satellite distance, m; doubles as the effective
    /// slant path of the optical model.
    pub slant_range: f64,
}

/// Mean motion `sqrt(mu / a^3)` for a circular orbit at `altitude`, rad/s.
pub fn mean_motion(altitude: f64) -> Result<f64> {
    let a = R_EARTH + altitude;
    if !(a > 0.0) || !altitude.is_finite() {
        return Err(Error::Domain(format!("semi-major axis {a} must be positive")));
    }
    Ok((MU_EARTH / (a * a * a)).sqrt())
}

/// Orbital period at `altitude`, s.
pub fn orbital_period(altitude: f64) -> Result<f64> {
    Ok(2.0 * std::f64::consts::PI / mean_motion(altitude)?)
}

/// ECI position of satellite `sat` in plane `plane` of `shell`,
/// `elapsed` seconds after the reference epoch.
pub fn propagate_eci(shell: &ShellSpec, plane: u32, sat: u32, elapsed: f64) -> Result<Vec3> {
    shell.validate()?;
    if plane >= shell.planes || sat >= shell.sats_per_plane {
        return Err(Error::Geometry(format!(
            "satellite index ({plane},{sat}) outside shell {}x{}",
            shell.planes, shell.sats_per_plane
        )));
    }
    let n = mean_motion(shell.altitude)?;
    let a = R_EARTH + shell.altitude;
    let two_pi = 2.0 * std::f64::consts::PI;
    let total = (shell.planes * shell.sats_per_plane) as f64;
    let phase = two_pi * sat as f64 / shell.sats_per_plane as f64
        + two_pi * shell.phase_stagger * plane as f64 / total
        + n * elapsed;
    let in_plane = [a * phase.cos(), a * phase.sin(), 0.0];
    let tilted = vec3::rotate_x(in_plane, shell.inclination);
    Ok(vec3::rotate_z(tilted, shell.raan_offsets[plane as usize]))
}

/// ECI -> ECEF for the rotation angle accumulated `elapsed` seconds after
/// the reference epoch (where the frames coincide).
pub fn eci_to_ecef(pos_eci: Vec3, elapsed: f64) -> Vec3 {
    vec3::rotate_z(pos_eci, -OMEGA_EARTH * elapsed)
}

/// All satellite states at one epoch. Satellite ids enumerate shells,
/// then planes, then in-plane slots, and are stable across epochs.
pub fn propagate_constellation(spec: &ConstellationSpec, elapsed: f64) -> Result<Vec<SatState>> {
    spec.validate()?;
    let mut states = Vec::with_capacity(spec.sat_count() as usize);
    let mut sat_id = 0u32;
    for shell in &spec.shells {
        for plane in 0..shell.planes {
            for sat in 0..shell.sats_per_plane {
                let pos_eci = propagate_eci(shell, plane, sat, elapsed)?;
                let pos_ecef = eci_to_ecef(pos_eci, elapsed);
                states.push(SatState { sat_id, pos_eci, pos_ecef });
                sat_id += 1;
            }
        }
    }
    Ok(states)
}

/// ECEF position of a point on the spherical Earth surface.
pub fn latlon_to_ecef(lat: f64, lon: f64) -> Vec3 {
    [R_EARTH * lat.cos() * lon.cos(), R_EARTH * lat.cos() * lon.sin(), R_EARTH * lat.sin()]
}

/// Geodetic (spherical) latitude and longitude of an ECEF position, rad.
pub fn ecef_to_latlon(pos: Vec3) -> (f64, f64) {
    let r = vec3::norm(pos);
    ((pos[2] / r).asin(), pos[1].atan2(pos[0]))
}

/// Topocentric geometry of `sat_ecef` as seen from the ground point
/// `(lat, lon)`. Errors when the two points (nearly) coincide.
pub fn topocentric(lat: f64, lon: f64, sat_ecef: Vec3) -> Result<Topocentric> {
    let gs = latlon_to_ecef(lat, lon);
    let rel = vec3::sub(sat_ecef, gs);
    let slant_range = vec3::norm(rel);
    if slant_range < 1.0 {
        return Err(Error::Geometry("satellite coincides with ground station".into()));
    }
    let (sin_lat, cos_lat) = lat.sin_cos();
    let (sin_lon, cos_lon) = lon.sin_cos();
    let east = [-sin_lon, cos_lon, 0.0];
    let north = [-sin_lat * cos_lon, -sin_lat * sin_lon, cos_lat];
    let up = [cos_lat * cos_lon, cos_lat * sin_lon, sin_lat];
    let elevation = (vec3::dot(up, rel) / slant_range).asin();
    let mut azimuth = vec3::dot(east, rel).atan2(vec3::dot(north, rel));
    if azimuth < 0.0 {
        azimuth += 2.0 * std::f64::consts::PI;
    }
    Ok(Topocentric {
        elevation,
        azimuth,
        zenith: std::f64::consts::FRAC_PI_2 - elevation,
        slant_range,
    })
}

/// Coverage footprint diameter (surface arc length) at `altitude` for a
/// minimum elevation `theta_min`:
/// `D = 2 R psi`, `psi = acos(R/(R+h) cos theta_min) - theta_min`.
pub fn footprint_diameter(altitude: f64, theta_min: f64) -> Result<f64> {
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&theta_min) {
        return Err(Error::Domain(format!(
            "minimum elevation {theta_min} rad must lie in [0, pi/2)"
        )));
    }
    if !(altitude >= 0.0) || !altitude.is_finite() {
        return Err(Error::Domain(format!("altitude {altitude} must be non-negative")));
    }
    let ratio = R_EARTH / (R_EARTH + altitude);
    let psi = (ratio * theta_min.cos()).acos() - theta_min;
    Ok(2.0 * R_EARTH * psi)
}
