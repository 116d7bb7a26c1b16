//! Anisotropic ground-station lattice on a spherical Earth, land-mask
//! snapping, and the city-to-station traffic matrix.
//!
//! Rows sit at multiples of a fixed north-south step. Within a row the
//! east-west physical spacing follows `d(lat) = d_eq / cos^alpha(lat)`,
//! so `alpha = -1` reproduces an equal-angular grid, `alpha = 0` keeps
//! physical spacing constant, and `alpha > 0` thins high latitudes.

use std::collections::HashSet;
use std::io::{BufRead, Write};
use std::sync::OnceLock;

use crate::constants::R_EARTH;
use crate::error::{Error, Result};
use crate::orbital::latlon_to_ecef;
use crate::vec3::Vec3;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
const DEG: f64 = std::f64::consts::PI / 180.0;

/// Lattice construction parameters. Angles in radians, lengths in meters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LatticeSpec {
    /// Equatorial east-west spacing d_eq, m.
    pub d_eq: f64,
    /// Anisotropy exponent alpha.
    pub alpha: f64,
    /// North-south row step, rad.
    pub ns_step: f64,
    /// Maximum distance a water candidate may move to reach land, m.
    pub snap_radius: f64,
    /// Minimum physical spacing, m; also the pole regularization value.
    pub spacing_floor: f64,
}

impl Default for LatticeSpec {
    fn default() -> Self {
        LatticeSpec {
            d_eq: 4.0e5,
            alpha: 1.0,
            ns_step: 3.6 * DEG,
            snap_radius: 1.0e5,
            spacing_floor: 5.0e4,
        }
    }
}

impl LatticeSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.d_eq > 0.0) || !self.d_eq.is_finite() {
            return Err(Error::config("lattice.d_eq", "must be finite and > 0"));
        }
        if !(self.ns_step > 0.0 && self.ns_step <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::config("lattice.ns_step", "must lie in (0, pi/2] rad"));
        }
        if !(self.snap_radius >= 0.0) || !self.snap_radius.is_finite() {
            return Err(Error::config("lattice.snap_radius", "must be finite and >= 0"));
        }
        if !(self.spacing_floor > 0.0) || !self.spacing_floor.is_finite() {
            return Err(Error::config("lattice.spacing_floor", "must be finite and > 0"));
        }
        if !self.alpha.is_finite() {
            return Err(Error::config("lattice.alpha", "must be finite"));
        }
        Ok(())
    }
}

/// A fixed ground station. Ids are dense, assigned south-to-north and
/// west-to-east in generation order.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundStation {
    pub gs_id: u32,
    /// Latitude, rad.
    pub lat: f64,
    /// Longitude, rad, in [-pi, pi).
    pub lon: f64,
    pub pos_ecef: Vec3,
}

impl GroundStation {
    fn at(gs_id: u32, lat: f64, lon: f64) -> Self {
        GroundStation { gs_id, lat, lon, pos_ecef: latlon_to_ecef(lat, lon) }
    }
}

/// Equirectangular boolean raster. Row 0 is the northernmost band; cell
/// `(i, j)` covers `lat in (90 - (i+1) res, 90 - i res]`,
/// `lon in [-180 + j res, -180 + (j+1) res)` degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct LandMask {
    res_deg: f64,
    rows: usize,
    cols: usize,
    cells: Vec<bool>,
}

impl LandMask {
    pub fn new(res_deg: f64, cells: Vec<bool>) -> Result<Self> {
        if !(res_deg > 0.0) || 180.0 % res_deg != 0.0 {
            return Err(Error::Parse {
                what: "land mask".into(),
                reason: format!("resolution {res_deg} must evenly divide 180"),
            });
        }
        let rows = (180.0 / res_deg).round() as usize;
        let cols = (360.0 / res_deg).round() as usize;
        if cells.len() != rows * cols {
            return Err(Error::Parse {
                what: "land mask".into(),
                reason: format!("expected {} cells, got {}", rows * cols, cells.len()),
            });
        }
        Ok(LandMask { res_deg, rows, cols, cells })
    }

    /// Uniform mask (handy for tests and synthetic scenarios).
    pub fn uniform(res_deg: f64, land: bool) -> Self {
        let rows = (180.0 / res_deg).round() as usize;
        let cols = (360.0 / res_deg).round() as usize;
        LandMask { res_deg, rows, cols, cells: vec![land; rows * cols] }
    }

    /// Builds a mask by evaluating `f(lat_deg, lon_deg)` at cell centers.
    pub fn from_fn_deg(res_deg: f64, f: impl Fn(f64, f64) -> bool) -> Self {
        let rows = (180.0 / res_deg).round() as usize;
        let cols = (360.0 / res_deg).round() as usize;
        let mut cells = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            let lat = 90.0 - (i as f64 + 0.5) * res_deg;
            for j in 0..cols {
                let lon = -180.0 + (j as f64 + 0.5) * res_deg;
                cells.push(f(lat, lon));
            }
        }
        LandMask { res_deg, rows, cols, cells }
    }

    /// The bundled 0.5 degree mask (see `tools/gen_landmask.py`).
    pub fn builtin() -> &'static LandMask {
        static MASK: OnceLock<LandMask> = OnceLock::new();
        MASK.get_or_init(|| {
            LandMask::parse(include_str!("../data/landmask_0p5deg.txt").as_bytes())
                .expect("bundled land mask is valid")
        })
    }

    pub fn parse(reader: impl std::io::Read) -> Result<Self> {
        let mut lines = std::io::BufReader::new(reader).lines();
        let mut next = |what: &str| -> Result<String> {
            lines.next().transpose()?.ok_or_else(|| Error::Parse {
                what: "land mask".into(),
                reason: format!("missing {what}"),
            })
        };
        let magic = next("header")?;
        if magic.trim() != "landmask v1" {
            return Err(Error::Parse {
                what: "land mask".into(),
                reason: format!("bad magic line {magic:?}"),
            });
        }
        let mut field = |name: &str| -> Result<f64> {
            let line = next(name)?;
            let mut parts = line.split_whitespace();
            match (parts.next(), parts.next()) {
                (Some(k), Some(v)) if k == name => v.parse().map_err(|_| Error::Parse {
                    what: "land mask".into(),
                    reason: format!("bad value for {name}: {v:?}"),
                }),
                _ => Err(Error::Parse {
                    what: "land mask".into(),
                    reason: format!("expected `{name} <value>`, got {line:?}"),
                }),
            }
        };
        let res_deg = field("resolution_deg")?;
        let rows = field("rows")? as usize;
        let cols = field("cols")? as usize;
        let mut cells = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            let line = next(&format!("row {i}"))?;
            let line = line.trim();
            if line.len() != cols {
                return Err(Error::Parse {
                    what: "land mask".into(),
                    reason: format!("row {i} has {} cells, expected {cols}", line.len()),
                });
            }
            for ch in line.chars() {
                match ch {
                    '0' => cells.push(false),
                    '1' => cells.push(true),
                    _ => {
                        return Err(Error::Parse {
                            what: "land mask".into(),
                            reason: format!("row {i} contains {ch:?}"),
                        })
                    }
                }
            }
        }
        let mask = LandMask::new(res_deg, cells)?;
        if mask.rows != rows || mask.cols != cols {
            return Err(Error::Parse {
                what: "land mask".into(),
                reason: "rows/cols inconsistent with resolution".into(),
            });
        }
        Ok(mask)
    }

    pub fn write(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "landmask v1")?;
        writeln!(w, "resolution_deg {}", self.res_deg)?;
        writeln!(w, "rows {}", self.rows)?;
        writeln!(w, "cols {}", self.cols)?;
        for i in 0..self.rows {
            let row: String = (0..self.cols)
                .map(|j| if self.cells[i * self.cols + j] { '1' } else { '0' })
                .collect();
            writeln!(w, "{row}")?;
        }
        Ok(())
    }

    pub fn resolution_deg(&self) -> f64 {
        self.res_deg
    }

    pub fn land_fraction(&self) -> f64 {
        self.cells.iter().filter(|&&c| c).count() as f64 / self.cells.len() as f64
    }

    fn cell_of(&self, lat: f64, lon: f64) -> (usize, usize) {
        let lat_deg = lat / DEG;
        let lon_deg = wrap_lon(lon) / DEG;
        let i = ((90.0 - lat_deg) / self.res_deg) as isize;
        let j = ((lon_deg + 180.0) / self.res_deg) as isize;
        (i.clamp(0, self.rows as isize - 1) as usize, j.clamp(0, self.cols as isize - 1) as usize)
    }

    fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        let lat = (90.0 - (i as f64 + 0.5) * self.res_deg) * DEG;
        let lon = (-180.0 + (j as f64 + 0.5) * self.res_deg) * DEG;
        (lat, lon)
    }

    /// Whether the cell containing `(lat, lon)` (radians) is land.
    pub fn is_land(&self, lat: f64, lon: f64) -> bool {
        let (i, j) = self.cell_of(lat, lon);
        self.cells[i * self.cols + j]
    }

    /// Center of the nearest land cell within `radius` meters of
    /// `(lat, lon)` by great-circle distance, if any. Ties break on
    /// (distance, row, column).
    pub fn nearest_land_within(&self, lat: f64, lon: f64, radius: f64) -> Option<(f64, f64)> {
        let dlat_deg = radius / R_EARTH / DEG + self.res_deg;
        let lat_deg = lat / DEG;
        let i_lo = (((90.0 - (lat_deg + dlat_deg)) / self.res_deg).floor() as isize)
            .clamp(0, self.rows as isize - 1) as usize;
        let i_hi = (((90.0 - (lat_deg - dlat_deg)) / self.res_deg).ceil() as isize)
            .clamp(0, self.rows as isize - 1) as usize;
        let mut best: Option<(f64, usize, usize)> = None;
        for i in i_lo..=i_hi {
            let (clat, _) = self.cell_center(i, 0);
            let cos_row = clat.cos();
            let full_row =
                cos_row <= 1e-9 || radius / (R_EARTH * cos_row) / DEG + self.res_deg >= 180.0;
            let (j_lo, j_hi) = if full_row {
                (0isize, self.cols as isize - 1)
            } else {
                let dlon_deg = radius / (R_EARTH * cos_row) / DEG + self.res_deg;
                let lon_deg = wrap_lon(lon) / DEG;
                let lo = ((lon_deg - dlon_deg + 180.0) / self.res_deg).floor() as isize;
                let hi = ((lon_deg + dlon_deg + 180.0) / self.res_deg).ceil() as isize;
                (lo, hi)
            };
            for jj in j_lo..=j_hi {
                let j = jj.rem_euclid(self.cols as isize) as usize;
                if !self.cells[i * self.cols + j] {
                    continue;
                }
                let (clat, clon) = self.cell_center(i, j);
                let d = haversine(lat, lon, clat, clon);
                if d > radius {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bd, bi, bj)) => (d, i, j) < (bd, bi, bj),
                };
                if better {
                    best = Some((d, i, j));
                }
            }
        }
        best.map(|(_, i, j)| self.cell_center(i, j))
    }
}

/// Longitude wrapped to [-pi, pi).
fn wrap_lon(lon: f64) -> f64 {
    (lon + std::f64::consts::PI).rem_euclid(TWO_PI) - std::f64::consts::PI
}

/// Great-circle distance between two surface points, m.
pub fn haversine(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let sdlat = ((lat2 - lat1) / 2.0).sin();
    let sdlon = ((lon2 - lon1) / 2.0).sin();
    let h = sdlat * sdlat + lat1.cos() * lat2.cos() * sdlon * sdlon;
    2.0 * R_EARTH * h.sqrt().min(1.0).asin()
}

/// Initial great-circle bearing from point 1 toward point 2, rad clockwise
/// from north in [0, 2 pi). Coincident points map to 0.
pub fn bearing(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let dlon = lon2 - lon1;
    let y = dlon.sin() * lat2.cos();
    let x = lat1.cos() * lat2.sin() - lat1.sin() * lat2.cos() * dlon.cos();
    let b = y.atan2(x);
    if b < 0.0 {
        b + TWO_PI
    } else {
        b
    }
}

/// Target east-west spacing at `lat`:
/// `max(spacing_floor, d_eq / cos^alpha(lat))`, with the floor standing
/// in at the poles where the law degenerates.
pub fn ew_spacing(spec: &LatticeSpec, lat: f64) -> f64 {
    let c = lat.cos();
    if c <= 1e-12 {
        return spec.spacing_floor;
    }
    let d = spec.d_eq / c.powf(spec.alpha);
    if d.is_finite() {
        d.max(spec.spacing_floor)
    } else {
        spec.spacing_floor
    }
}

/// Builds the station lattice. Candidates on land keep their exact
/// coordinates; water candidates move to the nearest land cell center
/// within `snap_radius` or are dropped. Each land cell hosts at most one
/// snapped station (exact-duplicate snaps collapse deterministically).
pub fn generate_lattice(spec: &LatticeSpec, mask: &LandMask) -> Result<Vec<GroundStation>> {
    spec.validate()?;
    let k_max = ((std::f64::consts::FRAC_PI_2 / spec.ns_step) - 1e-9).ceil() as i64 - 1;
    let mut stations = Vec::new();
    let mut claimed: HashSet<(usize, usize)> = HashSet::new();
    for k in -k_max..=k_max {
        let lat = k as f64 * spec.ns_step;
        let d = ew_spacing(spec, lat);
        let dlon = d / (R_EARTH * lat.cos());
        let n = if dlon >= TWO_PI { 1 } else { (TWO_PI / dlon).floor() as usize };
        let offset = if k.rem_euclid(2) == 1 { dlon / 2.0 } else { 0.0 };
        for j in 0..n {
            let lon = wrap_lon(offset + j as f64 * dlon);
            if mask.is_land(lat, lon) {
                claimed.insert(mask.cell_of(lat, lon));
                let id = stations.len() as u32;
                stations.push(GroundStation::at(id, lat, lon));
            } else if let Some((slat, slon)) = mask.nearest_land_within(lat, lon, spec.snap_radius)
            {
                if claimed.insert(mask.cell_of(slat, slon)) {
                    let id = stations.len() as u32;
                    stations.push(GroundStation::at(id, slat, slon));
                }
            }
        }
    }
    Ok(stations)
}

/// Writes `gs_id,lat_deg,lon_deg` rows.
pub fn write_stations(mut w: impl Write, stations: &[GroundStation]) -> Result<()> {
    writeln!(w, "gs_id,lat_deg,lon_deg")?;
    for s in stations {
        writeln!(w, "{},{},{}", s.gs_id, s.lat / DEG, s.lon / DEG)?;
    }
    Ok(())
}

/// A traffic endpoint. Coordinates in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct City {
    pub name: String,
    pub lat: f64,
    pub lon: f64,
}

/// Reads a `name,lat_deg,lon_deg` city table.
pub fn read_cities(reader: impl std::io::Read) -> Result<Vec<City>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut cities = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            what: "city list".into(),
            reason: format!("row {}: {e}", row + 2),
        })?;
        let bad = |what: &str| Error::Parse {
            what: "city list".into(),
            reason: format!("row {}: {}", row + 2, what),
        };
        if record.len() != 3 {
            return Err(bad("expected name,lat_deg,lon_deg"));
        }
        let lat: f64 = record[1].parse().map_err(|_| bad("latitude is not a number"))?;
        let lon: f64 = record[2].parse().map_err(|_| bad("longitude is not a number"))?;
        if !(-90.0..=90.0).contains(&lat) {
            return Err(bad("latitude outside [-90, 90]"));
        }
        cities.push(City { name: record[0].to_string(), lat: lat * DEG, lon: wrap_lon(lon * DEG) });
    }
    Ok(cities)
}

/// The bundled representative 120-city list.
pub fn builtin_cities() -> &'static [City] {
    static CITIES: OnceLock<Vec<City>> = OnceLock::new();
    CITIES.get_or_init(|| {
        read_cities(include_str!("../data/cities.csv").as_bytes())
            .expect("bundled city list is valid")
    })
}

/// City-to-station assignment; all unordered city pairs are evaluated for
/// connectivity. Two cities mapping to the same station always count as
/// connected.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficMatrix {
    /// Station id serving each city, indexed by city.
    pub station_of_city: Vec<u32>,
}

impl TrafficMatrix {
    pub fn n_cities(&self) -> usize {
        self.station_of_city.len()
    }

    /// Number of unordered city pairs.
    pub fn pair_count(&self) -> usize {
        let n = self.n_cities();
        n * (n - 1) / 2
    }
}

/// Maps each city to its nearest station by great-circle distance; ties
/// break toward the lower station id.
pub fn map_cities(cities: &[City], stations: &[GroundStation]) -> Result<TrafficMatrix> {
    if stations.is_empty() {
        return Err(Error::Geometry("cannot map cities onto an empty station set".into()));
    }
    let station_of_city = cities
        .iter()
        .map(|c| {
            let mut best = (f64::INFINITY, 0u32);
            for s in stations {
                let d = haversine(c.lat, c.lon, s.lat, s.lon);
                if d < best.0 {
                    best = (d, s.gs_id);
                }
            }
            best.1
        })
        .collect();
    Ok(TrafficMatrix { station_of_city })
}
