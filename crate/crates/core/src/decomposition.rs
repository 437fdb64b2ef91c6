//! Empirical mode decomposition and its noise-assisted ensemble variant.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{child_seed, gaussian_noise, std_dev, NoiseSpec, TimeSeries};
use crate::spline::CubicSpline;

/// Sifting controls for one decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiftSettings {
    /// Hard cap on extracted components.
    pub max_imfs: usize,
    /// Stop sifting once `sum((h_prev - h)^2) / sum(h_prev^2)` drops below this.
    pub sd_threshold: f64,
    /// Hard cap on sifting passes per component.
    pub max_sift_iters: usize,
}

impl Default for SiftSettings {
    fn default() -> Self {
        Self {
            max_imfs: 12,
            sd_threshold: 0.2,
            max_sift_iters: 10,
        }
    }
}

impl SiftSettings {
    fn validate(&self) -> Result<()> {
        if self.max_imfs == 0 || self.max_sift_iters == 0 {
            return Err(Error::Config(
                "max_imfs and max_sift_iters must be at least 1".into(),
            ));
        }
        if !(self.sd_threshold > 0.0) {
            return Err(Error::Config(format!(
                "sd_threshold must be positive, got {}",
                self.sd_threshold
            )));
        }
        Ok(())
    }
}

/// Ensemble controls: per-trial white noise level (relative to the signal's
/// standard deviation), trial count, and the master seed for trial noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EemdSettings {
    pub sift: SiftSettings,
    pub noise_level: f64,
    pub ensemble: usize,
    pub seed: u64,
}

impl Default for EemdSettings {
    fn default() -> Self {
        Self {
            sift: SiftSettings::default(),
            noise_level: 1.0,
            ensemble: 500,
            seed: 0,
        }
    }
}

/// Which procedure produced an [`ImfSet`], with the settings it ran under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DecompMeta {
    Emd(SiftSettings),
    Eemd(EemdSettings),
}

/// Ordered intrinsic mode functions (fast to slow) plus the final residue.
#[derive(Debug, Clone)]
pub struct ImfSet {
    pub imfs: Vec<TimeSeries>,
    pub residue: TimeSeries,
    pub meta: DecompMeta,
}

impl ImfSet {
    /// Largest absolute deviation of `sum(imfs) + residue` from `x`, divided
    /// by the largest absolute sample of `x`.
    pub fn reconstruction_error(&self, x: &TimeSeries) -> f64 {
        let mut sum = self.residue.samples().to_vec();
        for imf in &self.imfs {
            for (s, v) in sum.iter_mut().zip(imf.samples()) {
                *s += v;
            }
        }
        let scale = x
            .samples()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        x.samples()
            .iter()
            .zip(&sum)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            / scale
    }
}

/// Intrinsic-mode condition on the interior 90%: extrema and zero crossings
/// differ by at most one. The outer 5% per side is excluded because the
/// mirrored envelopes distort counts near the record ends.
fn is_mode_like(s: &[f64]) -> bool {
    let lo = s.len() / 20;
    let s = &s[lo..s.len() - lo];
    let (maxima, minima) = local_extrema(s);
    let extrema = maxima.len() + minima.len();
    let mut crossings = 0usize;
    for w in s.windows(2) {
        if w[0] * w[1] < 0.0 || (w[0] == 0.0 && w[1] != 0.0) {
            crossings += 1;
        }
    }
    extrema.abs_diff(crossings) <= 1
}

/// Interior local maxima and minima with single-point plateau coalescing.
fn local_extrema(s: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let n = s.len();
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if s[i] == s[i + 1] {
            let start = i;
            let mut j = i;
            while j + 1 < n && s[j + 1] == s[i] {
                j += 1;
            }
            if j + 1 < n {
                let mid = (start + j) / 2;
                if s[start - 1] < s[start] && s[j + 1] < s[start] {
                    maxima.push(mid);
                } else if s[start - 1] > s[start] && s[j + 1] > s[start] {
                    minima.push(mid);
                }
            }
            i = j + 1;
        } else {
            if s[i] > s[i - 1] && s[i] > s[i + 1] {
                maxima.push(i);
            } else if s[i] < s[i - 1] && s[i] < s[i + 1] {
                minima.push(i);
            }
            i += 1;
        }
    }
    (maxima, minima)
}

/// Spline through the extrema at `idx`, mirror-extending the two extrema
/// nearest each end across the record boundary, evaluated on the whole grid.
fn extremum_envelope(s: &[f64], idx: &[usize]) -> Vec<f64> {
    debug_assert!(idx.len() >= 2);
    let n = s.len();
    let last = (n - 1) as f64;
    let m = idx.len();

    let mut xs = Vec::with_capacity(m + 4);
    let mut ys = Vec::with_capacity(m + 4);
    // Ghost knots left of 0: reflections of the two leading extrema.
    xs.push(-(idx[1] as f64));
    ys.push(s[idx[1]]);
    xs.push(-(idx[0] as f64));
    ys.push(s[idx[0]]);
    for &i in idx {
        xs.push(i as f64);
        ys.push(s[i]);
    }
    // Ghost knots right of n-1.
    xs.push(2.0 * last - idx[m - 1] as f64);
    ys.push(s[idx[m - 1]]);
    xs.push(2.0 * last - idx[m - 2] as f64);
    ys.push(s[idx[m - 2]]);

    CubicSpline::fit(xs, ys).eval_sorted((0..n).map(|i| i as f64))
}

/// Upper and lower extremum envelopes of `x`.
///
/// Needs at least two interior maxima and two interior minima; the envelopes
/// come from natural cubic splines over mirror-extended extrema.
pub fn envelopes(x: &TimeSeries) -> Result<(TimeSeries, TimeSeries)> {
    let s = x.samples();
    let (maxima, minima) = local_extrema(s);
    if maxima.len() < 2 || minima.len() < 2 {
        return Err(Error::TooFewExtrema {
            maxima: maxima.len(),
            minima: minima.len(),
        });
    }
    let upper = extremum_envelope(s, &maxima);
    let lower = extremum_envelope(s, &minima);
    Ok((
        TimeSeries::raw(upper, x.dt(), x.t0()),
        TimeSeries::raw(lower, x.dt(), x.t0()),
    ))
}

/// One full decomposition by sifting.
///
/// Components stop when `max_imfs` is reached or the residue no longer has
/// two maxima and two minima. Constant or monotone inputs yield no IMFs and
/// return the input as the residue.
pub fn emd(x: &TimeSeries, settings: &SiftSettings) -> Result<ImfSet> {
    settings.validate()?;
    let (imfs, residue) = emd_components(x.samples(), settings);
    Ok(ImfSet {
        imfs: imfs
            .into_iter()
            .map(|v| TimeSeries::raw(v, x.dt(), x.t0()))
            .collect(),
        residue: TimeSeries::raw(residue, x.dt(), x.t0()),
        meta: DecompMeta::Emd(*settings),
    })
}

fn emd_components(samples: &[f64], settings: &SiftSettings) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = samples.len();
    let mut residue = samples.to_vec();
    let mut imfs: Vec<Vec<f64>> = Vec::new();

    while imfs.len() < settings.max_imfs {
        let (maxima, minima) = local_extrema(&residue);
        if maxima.len() < 2 || minima.len() < 2 {
            break;
        }

        // The standard-deviation stop applies for the first max_sift_iters
        // passes; after that, sifting continues only while the extrema and
        // zero-crossing counts still disagree, bounded at five extra rounds
        // of the cap. Mode-like components break out of the top-up at once,
        // so well-separated tones never get over-sifted.
        let mut h = residue.clone();
        for iter in 0..settings.max_sift_iters * 6 {
            let (maxima, minima) = local_extrema(&h);
            if maxima.len() < 2 || minima.len() < 2 {
                break;
            }
            let upper = extremum_envelope(&h, &maxima);
            let lower = extremum_envelope(&h, &minima);

            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..n {
                let mean = 0.5 * (upper[i] + lower[i]);
                num += mean * mean;
                den += h[i] * h[i];
                h[i] -= mean;
            }
            if den == 0.0 {
                break;
            }
            // num is sum((h_prev - h)^2) because h_prev - h equals the mean.
            let sd_ok = num / den < settings.sd_threshold;
            if is_mode_like(&h) && (sd_ok || iter + 1 >= settings.max_sift_iters) {
                break;
            }
        }

        for i in 0..n {
            residue[i] -= h[i];
        }
        imfs.push(h);
    }
    (imfs, residue)
}

/// Ensemble decomposition: average of EMDs over noise-perturbed copies.
///
/// Trial `k` adds white noise seeded by `child_seed(settings.seed, k)` with
/// standard deviation `noise_level * std_dev(x)`. Trials run in parallel but
/// are averaged in ascending trial order, so the result is bit-identical for
/// any thread count. With `noise_level = 0` and `ensemble = 1` the output
/// equals plain [`emd`] bit for bit.
pub fn eemd(x: &TimeSeries, settings: &EemdSettings) -> Result<ImfSet> {
    settings.sift.validate()?;
    if settings.ensemble == 0 {
        return Err(Error::Config("ensemble must be at least 1".into()));
    }
    if !(settings.noise_level >= 0.0) {
        return Err(Error::Config(format!(
            "noise_level must be non-negative, got {}",
            settings.noise_level
        )));
    }

    let n = x.len();
    let sigma = std_dev(x);
    let trials: Vec<Vec<Vec<f64>>> = (0..settings.ensemble)
        .into_par_iter()
        .map(|k| {
            let spec = NoiseSpec::new(settings.noise_level, child_seed(settings.seed, k as u64));
            let noise = gaussian_noise(n, &spec, sigma);
            let noisy: Vec<f64> = x
                .samples()
                .iter()
                .zip(&noise)
                .map(|(a, b)| a + b)
                .collect();
            emd_components(&noisy, &settings.sift).0
        })
        .collect();

    let count = trials.iter().map(Vec::len).max().unwrap_or(0);
    let mut sums = vec![vec![0.0; n]; count];
    for trial in &trials {
        // Missing trailing components count as zeros.
        for (j, imf) in trial.iter().enumerate() {
            for (s, v) in sums[j].iter_mut().zip(imf) {
                *s += v;
            }
        }
    }
    let scale = settings.ensemble as f64;
    let imfs: Vec<Vec<f64>> = sums
        .into_iter()
        .map(|mut v| {
            for s in &mut v {
                *s /= scale;
            }
            v
        })
        .collect();

    // Residue as the sequential complement, mirroring the EMD bookkeeping.
    let mut residue = x.samples().to_vec();
    for imf in &imfs {
        for (r, v) in residue.iter_mut().zip(imf) {
            *r -= v;
        }
    }

    Ok(ImfSet {
        imfs: imfs
            .into_iter()
            .map(|v| TimeSeries::raw(v, x.dt(), x.t0()))
            .collect(),
        residue: TimeSeries::raw(residue, x.dt(), x.t0()),
        meta: DecompMeta::Eemd(*settings),
    })
}
