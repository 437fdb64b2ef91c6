//! Damage onset detection: per-story acceleration emulators over lagged
//! features, residual accumulation against the measured record, and a
//! slope-threshold rule that names the onset time and the stories involved.
//!
//! Each story gets its own network that predicts the current acceleration
//! from every story's recent past plus the neighbors' present. Trained on a
//! span known to be healthy, the nets keep tracking the structure until a
//! stiffness change breaks the learned map; the prediction error then grows
//! and its accumulated trace bends where the damage began.

use crate::error::{Error, Result};
use crate::rbf::{train, RbfNet, TrainConfig};
use crate::signal::{child_seed, gaussian_noise, std_dev_slice, NoiseSpec, TimeSeries};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Feature layout for one emulator: `m` lags of all `n` stories plus the
/// current value of every story except the predicted one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagSpec {
    /// Number of previous moments fed to the net.
    pub m: usize,
    /// Story count.
    pub n: usize,
    /// Zero-based story whose current acceleration is the target.
    pub target_story: usize,
}

impl LagSpec {
    pub fn new(m: usize, n: usize, target_story: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Config(format!(
                "lag spec needs m >= 1 and n >= 1, got m={m}, n={n}"
            )));
        }
        if target_story >= n {
            return Err(Error::Config(format!(
                "target story {target_story} out of range for {n} stories"
            )));
        }
        Ok(Self { m, n, target_story })
    }

    /// m·n lag entries plus n−1 current-moment neighbors.
    pub fn feature_len(&self) -> usize {
        self.m * self.n + self.n - 1
    }
}

/// Per-story residual histories on the record grid shifted by the warmup.
#[derive(Debug, Clone)]
pub struct ResidualTraces {
    /// |measured − predicted| per step.
    pub absolute: TimeSeries,
    /// Running sum of `absolute`.
    pub cumulative: TimeSeries,
    /// `cumulative` minus the straight line fitted to its baseline span.
    pub detrended: TimeSeries,
}

/// Detection verdict. Story numbers are one-based, matching the
/// simulator's excursion log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnsetReport {
    /// First time any story's residual slope turns anomalous, if ever.
    pub onset_time: Option<f64>,
    /// Stories whose trigger reaches half of the strongest one, one-based.
    /// Empty when no onset was found.
    pub damaged_stories: Vec<usize>,
    /// Peak post-baseline slope z-score per story, zero-based order.
    pub trigger_values: Vec<f64>,
    /// Slope threshold per story in trace units, zero-based order.
    pub thresholds: Vec<f64>,
}

/// Onset rule parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectConfig {
    /// Threshold in baseline standard deviations.
    pub k_sigma: f64,
    /// Forward span over which residual growth is measured, seconds.
    pub slope_horizon: f64,
    /// Span providing the healthy slope statistics; the scan for an onset
    /// starts after its end.
    pub baseline: (f64, f64),
}

impl DetectConfig {
    pub fn new(baseline: (f64, f64)) -> Self {
        Self { k_sigma: 6.0, slope_horizon: 0.5, baseline }
    }
}

/// One trained net per story plus the bookkeeping shared by all of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Emulator {
    pub nets: Vec<RbfNet>,
    pub m: usize,
    /// Span the nets were fitted on, seconds.
    pub train_window: (f64, f64),
    /// In-window prediction RMS divided by the target signal's std, per
    /// story. A healthy fit sits well below 1.
    pub fit_quality: Vec<f64>,
}

fn check_grids(accels: &[TimeSeries]) -> Result<(f64, f64, usize)> {
    let first = accels
        .first()
        .ok_or_else(|| Error::DegenerateInput("no story records".into()))?;
    for (s, x) in accels.iter().enumerate() {
        if x.len() != first.len() || x.dt() != first.dt() || x.t0() != first.t0() {
            return Err(Error::DimensionMismatch(format!(
                "story {s} grid ({} samples, dt {}, t0 {}) differs from story 0 \
                 ({} samples, dt {}, t0 {})",
                x.len(),
                x.dt(),
                x.t0(),
                first.len(),
                first.dt(),
                first.t0()
            )));
        }
    }
    Ok((first.dt(), first.t0(), first.len()))
}

/// Lagged feature matrix and target vector for one story's emulator.
///
/// Row `r` describes time index `i = m + r`: first `m` lags of every story
/// (story-major, most recent lag first), then the current value of each
/// non-target story, and the target is the target story's current value.
pub fn build_lag_features(
    accels: &[TimeSeries],
    spec: &LagSpec,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let (_, _, len) = check_grids(accels)?;
    if accels.len() != spec.n {
        return Err(Error::DimensionMismatch(format!(
            "{} story records but lag spec expects {}",
            accels.len(),
            spec.n
        )));
    }
    if len <= spec.m {
        return Err(Error::DegenerateInput(format!(
            "{len} samples cannot support {} lags",
            spec.m
        )));
    }
    let mut inputs = Vec::with_capacity(len - spec.m);
    let mut targets = Vec::with_capacity(len - spec.m);
    for i in spec.m..len {
        let mut row = Vec::with_capacity(spec.feature_len());
        for x in accels {
            let s = x.samples();
            for lag in 1..=spec.m {
                row.push(s[i - lag]);
            }
        }
        for (s, x) in accels.iter().enumerate() {
            if s != spec.target_story {
                row.push(x.samples()[i]);
            }
        }
        inputs.push(row);
        targets.push(accels[spec.target_story].samples()[i]);
    }
    Ok((inputs, targets))
}

/// Row indices (into the feature matrix) whose target time falls in the
/// window. Row r targets sample m + r.
fn rows_in_window(dt: f64, t0: f64, len: usize, m: usize, window: (f64, f64)) -> Vec<usize> {
    (m..len)
        .filter(|&i| {
            let t = t0 + i as f64 * dt;
            t >= window.0 - 1e-9 && t <= window.1 + 1e-9
        })
        .map(|i| i - m)
        .collect()
}

fn column_std(rows: &[Vec<f64>], col: usize) -> f64 {
    let vals: Vec<f64> = rows.iter().map(|r| r[col]).collect();
    std_dev_slice(&vals)
}

/// Fits one prediction net per story on the training window.
///
/// Gaussian jitter scaled by each column's in-window std is added to both
/// features and targets; the nets then tolerate measurement noise instead
/// of memorizing the exact record.
pub fn train_emulator(
    accels: &[TimeSeries],
    m: usize,
    train_window: (f64, f64),
    cfg: &TrainConfig,
    jitter: &NoiseSpec,
) -> Result<Emulator> {
    let (dt, t0, len) = check_grids(accels)?;
    let n = accels.len();
    let rows = rows_in_window(dt, t0, len, m, train_window);
    if rows.len() < 10 * m {
        return Err(Error::WindowTooShort(format!(
            "training window holds {} usable samples, need at least {}",
            rows.len(),
            10 * m
        )));
    }

    let fits: Result<Vec<(RbfNet, f64)>> = (0..n)
        .into_par_iter()
        .map(|story| {
            let spec = LagSpec::new(m, n, story)?;
            let (all_inputs, all_targets) = build_lag_features(accels, &spec)?;
            let mut inputs: Vec<Vec<f64>> = rows.iter().map(|&r| all_inputs[r].clone()).collect();
            let mut targets: Vec<f64> = rows.iter().map(|&r| all_targets[r]).collect();

            let net_seed = child_seed(jitter.seed, story as u64);
            let width = spec.feature_len();
            for col in 0..width {
                let sigma = column_std(&inputs, col);
                let noise = gaussian_noise(
                    inputs.len(),
                    &NoiseSpec::new(jitter.level, child_seed(net_seed, col as u64)),
                    sigma,
                );
                for (row, eps) in inputs.iter_mut().zip(&noise) {
                    row[col] += eps;
                }
            }
            let sigma_t = std_dev_slice(&targets);
            let noise = gaussian_noise(
                targets.len(),
                &NoiseSpec::new(jitter.level, child_seed(net_seed, width as u64)),
                sigma_t,
            );
            for (t, eps) in targets.iter_mut().zip(&noise) {
                *t += eps;
            }

            let target_rows: Vec<Vec<f64>> = targets.iter().map(|&t| vec![t]).collect();
            let mut cfg = *cfg;
            cfg.seed = child_seed(cfg.seed, story as u64);
            let net = train(&inputs, &target_rows, &cfg)?;

            // Fit quality on the clean window, not the jittered copy.
            let clean_inputs: Vec<Vec<f64>> =
                rows.iter().map(|&r| all_inputs[r].clone()).collect();
            let clean_targets: Vec<f64> = rows.iter().map(|&r| all_targets[r]).collect();
            let pred = net.predict_batch(&clean_inputs)?;
            let mse = clean_targets
                .iter()
                .zip(&pred)
                .map(|(t, p)| (t - p[0]) * (t - p[0]))
                .sum::<f64>()
                / clean_targets.len() as f64;
            let sigma = std_dev_slice(&clean_targets).max(f64::MIN_POSITIVE);
            Ok((net, mse.sqrt() / sigma))
        })
        .collect();
    let fits = fits?;

    Ok(Emulator {
        nets: fits.iter().map(|(net, _)| net.clone()).collect(),
        m,
        train_window,
        fit_quality: fits.iter().map(|(_, q)| *q).collect(),
    })
}

/// Least-squares line through the points of `y` whose times fall in the
/// window; returns (intercept, slope) about t = 0.
fn fit_line(y: &TimeSeries, window: (f64, f64)) -> Result<(f64, f64)> {
    let s = y.samples();
    let pts: Vec<(f64, f64)> = (0..y.len())
        .map(|i| (y.time_at(i), s[i]))
        .filter(|(t, _)| *t >= window.0 - 1e-9 && *t <= window.1 + 1e-9)
        .collect();
    if pts.len() < 2 {
        return Err(Error::WindowTooShort(format!(
            "baseline window [{}, {}] holds {} residual samples, need at least 2",
            window.0,
            window.1,
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let tm = pts.iter().map(|(t, _)| t).sum::<f64>() / n;
    let ym = pts.iter().map(|(_, v)| v).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, v) in &pts {
        num += (t - tm) * (v - ym);
        den += (t - tm) * (t - tm);
    }
    // A degenerate time spread is impossible past the length check; grids
    // are strictly increasing.
    let slope = num / den;
    Ok((ym - slope * tm, slope))
}

/// Prediction residuals of every story over the full record.
///
/// The traces start `m` samples into the record, where the first full lag
/// vector exists. The detrending line comes from the baseline span of the
/// cumulative trace and is subtracted over the whole record, so a healthy
/// record stays flat and a damaged one bends upward at the onset.
pub fn residual_traces(
    accels: &[TimeSeries],
    emulator: &Emulator,
    baseline: (f64, f64),
) -> Result<Vec<ResidualTraces>> {
    let (dt, t0, _) = check_grids(accels)?;
    let n = accels.len();
    if emulator.nets.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} nets for {} story records",
            emulator.nets.len(),
            n
        )));
    }
    (0..n)
        .into_par_iter()
        .map(|story| {
            let spec = LagSpec::new(emulator.m, n, story)?;
            let (inputs, targets) = build_lag_features(accels, &spec)?;
            let pred = emulator.nets[story].predict_batch(&inputs)?;
            let abs: Vec<f64> = targets
                .iter()
                .zip(&pred)
                .map(|(t, p)| (t - p[0]).abs())
                .collect();
            let mut run = 0.0;
            let cum: Vec<f64> = abs
                .iter()
                .map(|a| {
                    run += a;
                    run
                })
                .collect();
            let start = t0 + emulator.m as f64 * dt;
            let absolute = TimeSeries::new(abs, dt, start)?;
            let cumulative = TimeSeries::new(cum, dt, start)?;
            let (a, b) = fit_line(&cumulative, baseline)?;
            let detrended = cumulative.map(|i, v| v - (a + b * cumulative.time_at(i)));
            Ok(ResidualTraces { absolute, cumulative, detrended })
        })
        .collect()
}

/// Forward slope of `y` over `horizon` seconds at each admissible index.
fn forward_slope(y: &TimeSeries, horizon: f64) -> Result<TimeSeries> {
    let h = ((horizon / y.dt()).round() as usize).max(1);
    if y.len() <= h {
        return Err(Error::WindowTooShort(format!(
            "{} samples cannot support a {horizon} s slope horizon",
            y.len()
        )));
    }
    let s = y.samples();
    let span = h as f64 * y.dt();
    let vals: Vec<f64> = (0..y.len() - h).map(|i| (s[i + h] - s[i]) / span).collect();
    TimeSeries::new(vals, y.dt(), y.t0())
}

/// Applies the slope-threshold rule to the detrended traces.
///
/// A story's slope is anomalous when it exceeds its baseline mean by
/// `k_sigma` baseline standard deviations. The onset is the first
/// anomalous time after the baseline span; the damaged set is every story
/// whose peak z-score reaches half of the strongest story's, since the
/// neighbors of a failed story co-react through the shared load path.
pub fn detect_onset(traces: &[ResidualTraces], cfg: &DetectConfig) -> Result<OnsetReport> {
    if traces.is_empty() {
        return Err(Error::DegenerateInput("no residual traces".into()));
    }
    let n = traces.len();
    let mut slopes = Vec::with_capacity(n);
    let mut stats = Vec::with_capacity(n);
    for tr in traces {
        let sl = forward_slope(&tr.detrended, cfg.slope_horizon)?;
        let s = sl.samples();
        let base: Vec<f64> = (0..sl.len())
            .filter(|&i| {
                let t = sl.time_at(i);
                t >= cfg.baseline.0 - 1e-9 && t <= cfg.baseline.1 + 1e-9
            })
            .map(|i| s[i])
            .collect();
        if base.len() < 2 {
            return Err(Error::WindowTooShort(format!(
                "baseline window [{}, {}] holds {} slope samples, need at least 2",
                cfg.baseline.0,
                cfg.baseline.1,
                base.len()
            )));
        }
        let mean = base.iter().sum::<f64>() / base.len() as f64;
        let std = std_dev_slice(&base).max(f64::MIN_POSITIVE);
        stats.push((mean, std));
        slopes.push(sl);
    }

    let len = slopes.iter().map(|s| s.len()).min().unwrap();
    let scan_from = (0..len)
        .find(|&i| slopes[0].time_at(i) > cfg.baseline.1 + 1e-9)
        .unwrap_or(len);

    let mut onset = None;
    'scan: for i in scan_from..len {
        for (s, sl) in slopes.iter().enumerate() {
            let (mean, std) = stats[s];
            if (sl.samples()[i] - mean) / std > cfg.k_sigma {
                onset = Some(sl.time_at(i));
                break 'scan;
            }
        }
    }

    let trigger_values: Vec<f64> = slopes
        .iter()
        .enumerate()
        .map(|(s, sl)| {
            let (mean, std) = stats[s];
            sl.samples()[scan_from..len]
                .iter()
                .map(|v| (v - mean) / std)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let thresholds: Vec<f64> = stats.iter().map(|(m, s)| m + cfg.k_sigma * s).collect();

    let damaged_stories = match onset {
        None => Vec::new(),
        Some(_) => {
            let top = trigger_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            trigger_values
                .iter()
                .enumerate()
                .filter(|(_, &z)| z >= 0.5 * top)
                .map(|(s, _)| s + 1)
                .collect()
        }
    };

    Ok(OnsetReport { onset_time: onset, damaged_stories, trigger_values, thresholds })
}
