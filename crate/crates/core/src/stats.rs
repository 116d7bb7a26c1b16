//! Waiting-time statistics on boolean connectivity traces and
//! autocorrelation-corrected uncertainty estimation.
//!
//! Down runs are maximal below-threshold episodes; a run truncated by the
//! end of the trace is right-censored and excluded. Forward waits measure
//! the residual time to the next up epoch (0 on up epochs, infinite when
//! the criterion never holds again). Uncertainty uses the integrated
//! autocorrelation time with initial-positive-sequence truncation.

use crate::error::{Error, Result};

/// Completed down runs of one boolean trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DownRunSet {
    /// (start epoch, length in epochs) of each completed run, in order.
    pub runs: Vec<(usize, usize)>,
    /// Length in epochs of a right-censored terminal run, if any.
    pub censored_tail: Option<usize>,
    /// Epoch step, s.
    pub dt: f64,
    /// Trace length in epochs.
    pub n_epochs: usize,
}

impl DownRunSet {
    /// Number of completed down runs M.
    pub fn count(&self) -> usize {
        self.runs.len()
    }

    /// Completed run durations, s.
    pub fn durations(&self) -> Vec<f64> {
        self.runs.iter().map(|&(_, len)| len as f64 * self.dt).collect()
    }
}

/// Extracts maximal zero-blocks; a block touching the final epoch is
/// censored and reported separately.
pub fn extract_down_runs(trace: &[bool], dt: f64) -> DownRunSet {
    let mut runs = Vec::new();
    let mut censored_tail = None;
    let mut start = None;
    for (k, &up) in trace.iter().enumerate() {
        match (up, start) {
            (false, None) => start = Some(k),
            (true, Some(s)) => {
                runs.push((s, k - s));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        censored_tail = Some(trace.len() - s);
    }
    DownRunSet { runs, censored_tail, dt, n_epochs: trace.len() }
}

/// Per-epoch forward waits `(J_k - k) dt` to the next up epoch: 0 on up
/// epochs, infinite where the criterion never holds again.
pub fn forward_waits(trace: &[bool], dt: f64) -> Vec<f64> {
    let mut waits = vec![f64::INFINITY; trace.len()];
    let mut next_up: Option<usize> = None;
    for k in (0..trace.len()).rev() {
        if trace[k] {
            next_up = Some(k);
            waits[k] = 0.0;
        } else if let Some(j) = next_up {
            waits[k] = (j - k) as f64 * dt;
        }
    }
    waits
}

/// Mean over finite entries; infinite when every entry is censored.
pub fn finite_mean(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for &v in values {
        if v.is_finite() {
            sum += v;
            n += 1;
        }
    }
    if n == 0 {
        f64::INFINITY
    } else {
        sum / n as f64
    }
}

/// Mean residual wait conditioned on down epochs (finite positive waits);
/// infinite when no down epoch recovers within the trace.
pub fn down_mean_residual(waits: &[f64]) -> f64 {
    let down: Vec<f64> = waits.iter().copied().filter(|&w| w > 0.0 && w.is_finite()).collect();
    finite_mean(&down)
}

fn sample_mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation with the n-1 denominator; NaN below two
/// samples.
fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = sample_mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Nearest-rank quantile of sorted data: index `ceil(p m)`, 1-based.
fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let idx = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[idx - 1]
}

/// Summary of one threshold's waiting behavior.
#[derive(Debug, Clone, PartialEq)]
pub struct WaitStats {
    /// Completed down-run count M.
    pub m: usize,
    /// Mean down-run duration, s; NaN when M = 0.
    pub mean: f64,
    /// Sample std (n-1) of down-run durations, s; NaN below M = 2.
    pub std: f64,
    pub p10: f64,
    pub p50: f64,
    pub p90: f64,
    /// Mean forward wait over finite samples, s.
    pub fwd_mean: f64,
    /// Number of right-censored forward-wait samples (epochs).
    pub censored: usize,
    /// Inspection-corrected mean residual wait, s; NaN below M = 2.
    pub inspection_wait: f64,
}

impl WaitStats {
    /// No completed down events: the threshold held essentially
    /// continuously over the finite trace.
    pub fn essentially_continuous(&self) -> bool {
        self.m == 0
    }
}

/// Combines down-run and forward-wait views of one indicator trace.
pub fn wait_summary(runs: &DownRunSet, waits: &[f64]) -> WaitStats {
    let mut durations = runs.durations();
    durations.sort_by(f64::total_cmp);
    let m = durations.len();
    WaitStats {
        m,
        mean: if m > 0 { sample_mean(&durations) } else { f64::NAN },
        std: sample_std(&durations),
        p10: nearest_rank(&durations, 0.1),
        p50: nearest_rank(&durations, 0.5),
        p90: nearest_rank(&durations, 0.9),
        fwd_mean: finite_mean(waits),
        censored: waits.iter().filter(|w| w.is_infinite()).count(),
        inspection_wait: inspection_corrected_wait(runs).unwrap_or(f64::NAN),
    }
}

/// Stationary mean residual wait via the inspection paradox:
/// `mu/2 + sigma^2 / (2 mu)` over completed down-run durations.
pub fn inspection_corrected_wait(runs: &DownRunSet) -> Result<f64> {
    let durations = runs.durations();
    if durations.len() < 2 {
        return Err(Error::InsufficientEvents { need: 2, got: durations.len() });
    }
    let mu = sample_mean(&durations);
    let sigma = sample_std(&durations);
    Ok(mu / 2.0 + sigma * sigma / (2.0 * mu))
}

/// Biased autocovariance at `lag`: `(1/N) sum (x_i - m)(x_{i+lag} - m)`.
fn autocovariance(xs: &[f64], mean: f64, lag: usize) -> f64 {
    let n = xs.len();
    xs[..n - lag].iter().zip(&xs[lag..]).map(|(a, b)| (a - mean) * (b - mean)).sum::<f64>()
        / n as f64
}

/// Integrated autocorrelation time with initial-positive-sequence
/// truncation: `1/2 + sum of rho(lag)` over leading positive lags, capped
/// at `min(N - 1, N/10)`. Lags are evaluated lazily so well-behaved
/// series stop after a handful of autocovariance passes.
pub fn ips_tau_int(series: &[f64]) -> Result<f64> {
    let n = series.len();
    if n < 10 {
        return Err(Error::InsufficientEvents { need: 10, got: n });
    }
    let mean = sample_mean(series);
    let gamma0 = autocovariance(series, mean, 0);
    if gamma0 <= 0.0 || !gamma0.is_finite() {
        return Err(Error::Domain("zero-variance series has no autocorrelation time".into()));
    }
    let ell_max = (n - 1).min(n / 10);
    let mut tau = 0.5;
    for lag in 1..=ell_max {
        let rho = autocovariance(series, mean, lag) / gamma0;
        if rho <= 0.0 {
            break;
        }
        tau += rho;
    }
    Ok(tau)
}

/// Correlation-adjusted sample size and standard error of the mean.
#[derive(Debug, Clone, PartialEq)]
pub struct AutocorrEstimate {
    /// Integrated autocorrelation time, sample-index units.
    pub tau_int: f64,
    /// Effective sample count `N / (2 tau)`.
    pub n_eff: f64,
    /// Standard error of the mean, series units.
    pub sem: f64,
}

/// `N_eff = N / (2 tau)` and `SEM = sigma / sqrt(N_eff)`.
pub fn n_eff_sem(series: &[f64], tau_int: f64) -> (f64, f64) {
    let n_eff = series.len() as f64 / (2.0 * tau_int);
    (n_eff, sample_std(series) / n_eff.sqrt())
}

/// One-call autocorrelation summary of a series.
pub fn autocorr_summary(series: &[f64]) -> Result<AutocorrEstimate> {
    let tau_int = ips_tau_int(series)?;
    let (n_eff, sem) = n_eff_sem(series, tau_int);
    Ok(AutocorrEstimate { tau_int, n_eff, sem })
}

/// Down-run occupancy binned by start phase within a reference period.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseBin {
    pub count: usize,
    /// Mean duration of the runs starting in this bin, s; NaN when empty.
    pub mean_duration: f64,
}

/// Bins completed down runs by their start time modulo `period`.
pub fn phase_bins(runs: &DownRunSet, period: f64, n_bins: usize) -> Result<Vec<PhaseBin>> {
    if !(period > 0.0) || !period.is_finite() {
        return Err(Error::Domain(format!("phase period {period} s must be positive")));
    }
    if n_bins == 0 {
        return Err(Error::Domain("phase binning needs at least one bin".into()));
    }
    let mut counts = vec![0usize; n_bins];
    let mut sums = vec![0.0f64; n_bins];
    for &(start, len) in &runs.runs {
        let phase = (start as f64 * runs.dt).rem_euclid(period) / period;
        let bin = ((phase * n_bins as f64) as usize).min(n_bins - 1);
        counts[bin] += 1;
        sums[bin] += len as f64 * runs.dt;
    }
    Ok(counts
        .into_iter()
        .zip(sums)
        .map(|(count, sum)| PhaseBin {
            count,
            mean_duration: if count > 0 { sum / count as f64 } else { f64::NAN },
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn down_runs_basic() {
        let runs = extract_down_runs(&[true, false, false, false, true], 1.0);
        assert_eq!(runs.runs, vec![(1, 3)]);
        assert_eq!(runs.durations(), vec![3.0]);
        assert_eq!(runs.censored_tail, None);
    }

    #[test]
    fn terminal_run_is_censored() {
        let runs = extract_down_runs(&[true, false, false], 1.0);
        assert!(runs.runs.is_empty());
        assert_eq!(runs.censored_tail, Some(2));
        // leading runs are complete once an up epoch follows
        let runs = extract_down_runs(&[false, false, true], 0.5);
        assert_eq!(runs.runs, vec![(0, 2)]);
        assert_eq!(runs.durations(), vec![1.0]);
        assert_eq!(runs.censored_tail, None);
    }

    #[test]
    fn never_down_and_always_down() {
        let runs = extract_down_runs(&[true, true, true], 1.0);
        assert!(runs.runs.is_empty());
        assert_eq!(runs.censored_tail, None);
        let runs = extract_down_runs(&[false, false], 1.0);
        assert!(runs.runs.is_empty());
        assert_eq!(runs.censored_tail, Some(2));
    }

    #[test]
    fn forward_wait_enumeration() {
        assert_eq!(forward_waits(&[true, false, false, true], 1.0), vec![0.0, 2.0, 1.0, 0.0]);
        assert_eq!(forward_waits(&[true, true], 2.0), vec![0.0, 0.0]);
        let all_down = forward_waits(&[false, false, false], 1.0);
        assert!(all_down.iter().all(|w| w.is_infinite()));
        // censored tail only affects trailing epochs
        assert_eq!(forward_waits(&[false, true, false], 2.0), vec![2.0, 0.0, f64::INFINITY]);
    }

    #[test]
    fn summary_of_constant_runs() {
        let trace = [true, false, false, true, false, false, true, false, false, true];
        let runs = extract_down_runs(&trace, 1.0);
        let stats = wait_summary(&runs, &forward_waits(&trace, 1.0));
        assert_eq!(stats.m, 3);
        assert_eq!(stats.mean, 2.0);
        assert_eq!(stats.std, 0.0);
        assert_eq!((stats.p10, stats.p50, stats.p90), (2.0, 2.0, 2.0));
        assert_eq!(stats.censored, 0);
        assert!(!stats.essentially_continuous());
        // inspection wait of constant runs: L/2 + 0
        assert_eq!(stats.inspection_wait, 1.0);
    }

    #[test]
    fn summary_of_two_runs() {
        let trace = [false, true, false, false, false, true];
        let runs = extract_down_runs(&trace, 1.0);
        assert_eq!(runs.durations(), vec![1.0, 3.0]);
        let stats = wait_summary(&runs, &forward_waits(&trace, 1.0));
        assert_eq!(stats.m, 2);
        assert_eq!(stats.mean, 2.0);
        assert_relative_eq!(stats.std, 2.0f64.sqrt(), max_relative = 1e-12);
        assert_eq!((stats.p10, stats.p50, stats.p90), (1.0, 1.0, 3.0));
        // inspection: mu/2 + sigma^2/(2 mu) = 1 + 2/4
        assert_relative_eq!(stats.inspection_wait, 1.5, max_relative = 1e-12);
        // waits: [1, 0, 3, 2, 1, 0] -> mean 7/6
        assert_relative_eq!(stats.fwd_mean, 7.0 / 6.0, max_relative = 1e-12);
    }

    #[test]
    fn empty_summary_flags_continuity() {
        let trace = [true, true, true];
        let runs = extract_down_runs(&trace, 1.0);
        let stats = wait_summary(&runs, &forward_waits(&trace, 1.0));
        assert_eq!(stats.m, 0);
        assert!(stats.mean.is_nan() && stats.p50.is_nan() && stats.inspection_wait.is_nan());
        assert_eq!(stats.fwd_mean, 0.0);
        assert!(stats.essentially_continuous());
        assert!(matches!(
            inspection_corrected_wait(&runs),
            Err(Error::InsufficientEvents { need: 2, got: 0 })
        ));
    }

    #[test]
    fn censored_wait_counting() {
        let trace = [true, false, false];
        let runs = extract_down_runs(&trace, 1.0);
        let waits = forward_waits(&trace, 1.0);
        let stats = wait_summary(&runs, &waits);
        assert_eq!(stats.censored, 2);
        assert_eq!(stats.fwd_mean, 0.0); // only the up epoch is finite
        let all_down = [false; 4];
        let stats =
            wait_summary(&extract_down_runs(&all_down, 1.0), &forward_waits(&all_down, 1.0));
        assert!(stats.fwd_mean.is_infinite());
        assert_eq!(stats.censored, 4);
    }

    #[test]
    fn down_conditioned_residual() {
        let waits = [0.0, 3.0, 2.0, 1.0, 0.0, f64::INFINITY];
        assert_eq!(down_mean_residual(&waits), 2.0);
        assert!(down_mean_residual(&[0.0, 0.0]).is_infinite());
    }

    #[test]
    fn ips_on_alternating_series() {
        // perfectly anticorrelated series truncates immediately
        let xs: Vec<f64> = (0..1000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert_eq!(ips_tau_int(&xs).unwrap(), 0.5);
    }

    #[test]
    fn ips_rejects_degenerate_input() {
        assert!(matches!(
            ips_tau_int(&[1.0; 5]),
            Err(Error::InsufficientEvents { need: 10, got: 5 })
        ));
        assert!(matches!(ips_tau_int(&[2.5; 100]), Err(Error::Domain(_))));
    }

    #[test]
    fn ips_iid_and_ar1() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let n = 20_000;
        let iid: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        let tau = ips_tau_int(&iid).unwrap();
        assert!((0.4..0.65).contains(&tau), "iid tau {tau}");

        let phi = 0.5;
        let mut x = 0.0;
        let ar: Vec<f64> = (0..n)
            .map(|_| {
                x = phi * x + (rng.random::<f64>() - 0.5);
                x
            })
            .collect();
        let tau = ips_tau_int(&ar).unwrap();
        // analytic: 1/2 + phi/(1 - phi) = 1.5
        assert!((1.2..1.8).contains(&tau), "ar1 tau {tau}");
    }

    #[test]
    fn effective_sample_size_arithmetic() {
        let series = vec![0.0; 100];
        let (n_eff, _) = n_eff_sem(&series, 0.5);
        assert_eq!(n_eff, 100.0);
        let series: Vec<f64> = (0..14_400).map(|i| (i as f64).sin()).collect();
        let (n_eff, sem) = n_eff_sem(&series, 18.5);
        assert_abs_diff_eq!(n_eff, 389.189, epsilon = 0.001);
        assert_relative_eq!(sem, sample_std(&series) / n_eff.sqrt(), max_relative = 1e-12);
        // doubling tau halves n_eff and scales sem by sqrt(2)
        let (half, sem2) = n_eff_sem(&series, 37.0);
        assert_abs_diff_eq!(half * 2.0, n_eff, epsilon = 1e-9);
        assert_relative_eq!(sem2, sem * 2.0f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn autocorr_summary_combines() {
        let xs: Vec<f64> = (0..2000).map(|i| ((i % 7) as f64) - 3.0).collect();
        let est = autocorr_summary(&xs).unwrap();
        assert!(est.tau_int >= 0.5);
        assert!(est.n_eff <= xs.len() as f64);
        assert!(est.sem >= sample_std(&xs) / (xs.len() as f64).sqrt() - 1e-12);
    }

    #[test]
    fn phase_binning() {
        let runs = DownRunSet {
            runs: vec![(0, 2), (10, 4), (20, 2), (25, 6)],
            censored_tail: None,
            dt: 1.0,
            n_epochs: 40,
        };
        let bins = phase_bins(&runs, 20.0, 2).unwrap();
        // starts 0, 10, 20, 25 -> phases 0.0, 0.5, 0.0, 0.25
        assert_eq!(bins[0].count, 3);
        assert_relative_eq!(bins[0].mean_duration, (2.0 + 2.0 + 6.0) / 3.0);
        assert_eq!(bins[1].count, 1);
        assert_eq!(bins[1].mean_duration, 4.0);
        assert!(phase_bins(&runs, 0.0, 4).is_err());
        assert!(phase_bins(&runs, 20.0, 0).is_err());
    }

    #[test]
    fn renewal_identity_synthetic() {
        // alternating renewal with down lengths cycling 30..=90 epochs
        let mut trace = Vec::new();
        let mut len = 30usize;
        while trace.len() < 100_000 {
            trace.extend(std::iter::repeat_n(true, 10));
            trace.extend(std::iter::repeat_n(false, len));
            len = if len == 90 { 30 } else { len + 1 };
        }
        trace.extend(std::iter::repeat_n(true, 5));
        let waits = forward_waits(&trace, 1.0);
        let runs = extract_down_runs(&trace, 1.0);
        // uniform {30..90}: E[L^2] / (2 E[L]) = 3910 / 120
        let theory = 3910.0 / 120.0;
        let resid = down_mean_residual(&waits);
        // discrete sampling adds exactly +1/2 epoch
        assert_relative_eq!(resid, theory + 0.5, max_relative = 0.01);
        let inspect = inspection_corrected_wait(&runs).unwrap();
        assert_relative_eq!(inspect, theory, max_relative = 0.01);
    }

    proptest! {
        #[test]
        fn prop_runs_and_waits_consistent(bits in proptest::collection::vec(any::<bool>(), 1..200)) {
            let dt = 1.0;
            let runs = extract_down_runs(&bits, dt);
            let waits = forward_waits(&bits, dt);
            // no completed run touches the final epoch
            for &(start, len) in &runs.runs {
                prop_assert!(start + len < bits.len());
                // the wait at the run's first epoch equals the full run length
                prop_assert_eq!(waits[start], len as f64);
                // every epoch inside is down with a positive wait
                for k in start..start + len {
                    prop_assert!(!bits[k]);
                    prop_assert!(waits[k] > 0.0);
                    prop_assert_eq!(waits[k], (start + len - k) as f64);
                }
            }
            // censored tail wait samples are infinite
            let censored = runs.censored_tail.unwrap_or(0);
            prop_assert_eq!(waits.iter().filter(|w| w.is_infinite()).count(), censored);
            // quantile order
            let stats = wait_summary(&runs, &waits);
            if stats.m > 0 {
                prop_assert!(stats.p10 <= stats.p50 && stats.p50 <= stats.p90);
                prop_assert!(stats.p10 >= 0.0);
            }
        }

        #[test]
        fn prop_ips_affine_invariant(shift in -5.0..5.0f64, scale in 0.1..10.0f64) {
            let xs: Vec<f64> = (0..500).map(|i| ((i as f64) * 0.7).sin()).collect();
            let base = ips_tau_int(&xs).unwrap();
            let mapped: Vec<f64> = xs.iter().map(|x| shift + scale * x).collect();
            let tau = ips_tau_int(&mapped).unwrap();
            prop_assert!((tau - base).abs() < 1e-6, "{tau} vs {base}");
        }
    }
}
