//! Physical constants shared across the simulator.

/// Geocentric gravitational constant, m^3/s^2.
pub const MU_EARTH: f64 = 3.986_004_418e14;

/// Mean Earth radius, m (spherical Earth model).
pub const R_EARTH: f64 = 6.371e6;

/// Earth rotation rate, rad/s.
pub const OMEGA_EARTH: f64 = 7.292_115_9e-5;
