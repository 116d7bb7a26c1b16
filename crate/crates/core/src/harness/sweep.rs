//! Sweep enumeration: the Cartesian product of the configured sweep axes,
//! each point a fully concrete scenario with a stable id.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::groundgrid::LatticeSpec;
use crate::linkmodel::OpticalParams;
use crate::orbital::{ConstellationSpec, EpochClock};
use crate::service::ServicePolicy;

use super::config::{parse_policy, ScenarioConfig};

/// One concrete sweep point. Angles in radians, lengths in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: String,
    pub clock: EpochClock,
    pub lattice: LatticeSpec,
    pub constellation: ConstellationSpec,
    pub optical: OpticalParams,
    pub policy: ServicePolicy,
    /// Visibility cone half-angle, rad.
    pub max_zenith: f64,
    pub thresholds: Vec<f64>,
    /// Waiting windows W, s.
    pub windows: Vec<f64>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.clock.validate()?;
        self.lattice.validate()?;
        self.constellation.validate()?;
        self.optical.validate()?;
        if !(self.max_zenith > 0.0 && self.max_zenith < FRAC_PI_2) {
            return Err(Error::config("visibility.max_zenith", "must lie in (0, pi/2) rad"));
        }
        if self.thresholds.is_empty() {
            return Err(Error::config("metrics.thresholds", "must not be empty"));
        }
        if self.windows.is_empty() {
            return Err(Error::config("metrics.windows", "must not be empty"));
        }
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

/// The enumerated sweep plus normalization notes (duplicate axis values
/// are dropped, first occurrence wins).
#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub scenarios: Vec<Scenario>,
    pub warnings: Vec<String>,
}

/// Expands the config into concrete scenarios. Axis order (outer to
/// inner): altitude, planes, sats/plane, alpha, polar fraction, policy.
pub fn enumerate_sweep(config: &ScenarioConfig) -> Result<SweepPlan> {
    config.validate()?;
    let mut warnings = Vec::new();
    let c = &config.constellation;
    let altitudes = dedup("constellation.altitudes", &c.altitudes, &mut warnings);
    let plane_counts = dedup("constellation.plane_counts", &c.plane_counts, &mut warnings);
    let sats_per_plane = dedup("constellation.sats_per_plane", &c.sats_per_plane, &mut warnings);
    let polar_fractions = dedup("constellation.polar_fractions", &c.polar_fractions, &mut warnings);
    let alphas = dedup("lattice.alphas", &config.lattice.alphas, &mut warnings);
    let parsed: Vec<ServicePolicy> =
        c.policies.iter().map(|s| parse_policy(s)).collect::<Result<_>>()?;
    let policies = dedup("constellation.policies", &parsed, &mut warnings);

    let clock = config.clock.to_clock();
    let mut scenarios = Vec::new();
    for &altitude in &altitudes {
        for &planes in &plane_counts {
            for &spp in &sats_per_plane {
                for &alpha in &alphas {
                    for &f_polar in &polar_fractions {
                        for &policy in &policies {
                            scenarios.push(build_scenario(
                                config, &clock, altitude, planes, spp, alpha, f_polar, policy,
                            )?);
                        }
                    }
                }
            }
        }
    }
    Ok(SweepPlan { scenarios, warnings })
}

#[allow(clippy::too_many_arguments)]
fn build_scenario(
    config: &ScenarioConfig,
    clock: &EpochClock,
    altitude: f64,
    planes: u32,
    spp: u32,
    alpha: f64,
    f_polar: f64,
    policy: ServicePolicy,
) -> Result<Scenario> {
    let c = &config.constellation;
    let mut constellation = ConstellationSpec::dual_shell(
        altitude,
        c.inclination_deg.to_radians(),
        c.polar_inclination_deg.to_radians(),
        planes,
        spp,
        f_polar,
        policy.terminals(),
    )?;
    for shell in &mut constellation.shells {
        shell.phase_stagger = c.phase_stagger;
    }
    Ok(Scenario {
        id: scenario_id(altitude, planes, spp, alpha, f_polar, policy),
        clock: clock.clone(),
        lattice: config.lattice.to_spec(alpha),
        constellation,
        optical: config.optical.to_params(),
        policy,
        max_zenith: config.visibility.max_zenith_deg.to_radians(),
        thresholds: config.metrics.thresholds.clone(),
        windows: config.metrics.windows.clone(),
    })
}

fn scenario_id(
    altitude: f64,
    planes: u32,
    spp: u32,
    alpha: f64,
    f_polar: f64,
    policy: ServicePolicy,
) -> String {
    let km = (altitude / 1e3).round() as u64;
    let sign = if alpha < 0.0 { '-' } else { '+' };
    format!("h{km:04}_p{planes:03}_s{spp:02}_a{sign}{:.2}_f{:.2}_{policy}", alpha.abs(), f_polar)
}

fn dedup<T: PartialEq + Copy + std::fmt::Display>(
    key: &str,
    values: &[T],
    warnings: &mut Vec<String>,
) -> Vec<T> {
    let mut out = Vec::with_capacity(values.len());
    for &v in values {
        if out.contains(&v) {
            warnings.push(format!("{key}: duplicate value {v} dropped"));
        } else {
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_counts_multiply() {
        let mut config = ScenarioConfig::default();
        config.constellation.altitudes = vec![550e3, 1_100e3];
        config.lattice.alphas = vec![-1.0, 0.0, 1.0];
        let plan = enumerate_sweep(&config).unwrap();
        assert_eq!(plan.scenarios.len(), 6);
        assert!(plan.warnings.is_empty());
        let ids: Vec<&str> = plan.scenarios.iter().map(|s| s.id.as_str()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 6, "ids must be unique: {ids:?}");
    }

    #[test]
    fn singleton_lists_make_one_scenario() {
        let plan = enumerate_sweep(&ScenarioConfig::default()).unwrap();
        assert_eq!(plan.scenarios.len(), 1);
        assert_eq!(plan.scenarios[0].id, "h0700_p036_s20_a+1.00_f0.10_mpc7");
    }

    #[test]
    fn duplicates_collapse_with_warning() {
        let mut config = ScenarioConfig::default();
        config.constellation.altitudes = vec![700e3, 700e3];
        config.constellation.policies = vec!["mpc7".into(), "mpc7".into(), "bpc".into()];
        let plan = enumerate_sweep(&config).unwrap();
        assert_eq!(plan.scenarios.len(), 2);
        assert_eq!(plan.warnings.len(), 2);
        assert!(plan.warnings[0].contains("constellation.altitudes"), "{:?}", plan.warnings);
        assert!(plan.warnings[1].contains("constellation.policies"), "{:?}", plan.warnings);
    }

    #[test]
    fn axis_order_is_stable() {
        let mut config = ScenarioConfig::default();
        config.lattice.alphas = vec![1.0, -1.0];
        config.constellation.policies = vec!["mpc7".into(), "bpc".into()];
        let ids: Vec<String> =
            enumerate_sweep(&config).unwrap().scenarios.into_iter().map(|s| s.id).collect();
        assert_eq!(
            ids,
            vec![
                "h0700_p036_s20_a+1.00_f0.10_mpc7",
                "h0700_p036_s20_a+1.00_f0.10_bpc",
                "h0700_p036_s20_a-1.00_f0.10_mpc7",
                "h0700_p036_s20_a-1.00_f0.10_bpc",
            ]
        );
    }

    #[test]
    fn scenarios_carry_concrete_specs() {
        let mut config = ScenarioConfig::default();
        config.constellation.polar_fractions = vec![0.1];
        config.constellation.phase_stagger = 1.0;
        let plan = enumerate_sweep(&config).unwrap();
        let sc = &plan.scenarios[0];
        assert_eq!(sc.constellation.shells.len(), 2);
        // round(0.1 * 36) = 4 planes move to the polar shell.
        assert_eq!(sc.constellation.shells[0].planes, 32);
        assert_eq!(sc.constellation.shells[1].planes, 4);
        assert_eq!(sc.constellation.terminals, 7);
        assert!(sc.constellation.shells.iter().all(|s| s.phase_stagger == 1.0));
        assert_eq!(sc.lattice.alpha, 1.0);
        assert_eq!(sc.max_zenith, 57.0_f64.to_radians());
        assert!(sc.validate().is_ok());
    }

    #[test]
    fn bpc_scenario_uses_two_terminals() {
        let mut config = ScenarioConfig::default();
        config.constellation.policies = vec!["bpc".into()];
        let plan = enumerate_sweep(&config).unwrap();
        assert_eq!(plan.scenarios[0].constellation.terminals, 2);
        assert!(plan.scenarios[0].id.ends_with("_bpc"));
    }
}
