//! Time-series container, seeded noise, and the synthetic benchmark tone.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniformly sampled record: `len >= 2`, `dt > 0`, every sample finite.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    samples: Vec<f64>,
    dt: f64,
    t0: f64,
}

impl TimeSeries {
    pub fn new(samples: Vec<f64>, dt: f64, t0: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::DegenerateInput(format!(
                "time series needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::DegenerateInput(format!("dt must be positive, got {dt}")));
        }
        if !t0.is_finite() {
            return Err(Error::DegenerateInput(format!("t0 must be finite, got {t0}")));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::DegenerateInput(format!(
                "sample {i} is not finite: {}",
                samples[i]
            )));
        }
        Ok(Self { samples, dt, t0 })
    }

    /// Internal constructor for series derived from an already-validated one.
    pub(crate) fn raw(samples: Vec<f64>, dt: f64, t0: f64) -> Self {
        debug_assert!(samples.len() >= 2 && dt > 0.0);
        Self { samples, dt, t0 }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn time_at(&self, i: usize) -> f64 {
        self.t0 + self.dt * i as f64
    }

    pub fn duration(&self) -> f64 {
        self.dt * (self.samples.len() - 1) as f64
    }

    /// Index of the first sample at or after `t`, clamped to the grid.
    pub fn index_at(&self, t: f64) -> usize {
        let i = ((t - self.t0) / self.dt).ceil();
        (i.max(0.0) as usize).min(self.samples.len() - 1)
    }

    /// Sub-series covering `[t_start, t_end]` (grid-aligned, both ends clamped).
    pub fn window(&self, t_start: f64, t_end: f64) -> Result<TimeSeries> {
        if !(t_end > t_start) {
            return Err(Error::DegenerateInput(format!(
                "window [{t_start}, {t_end}] is empty"
            )));
        }
        let a = self.index_at(t_start);
        let b = self.index_at(t_end);
        if b <= a + 1 {
            return Err(Error::DegenerateInput(format!(
                "window [{t_start}, {t_end}] covers fewer than 2 samples"
            )));
        }
        Ok(TimeSeries::raw(
            self.samples[a..=b].to_vec(),
            self.dt,
            self.time_at(a),
        ))
    }

    /// Same grid, samples produced by `f(index, sample)`.
    pub fn map(&self, mut f: impl FnMut(usize, f64) -> f64) -> TimeSeries {
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(i, &v)| f(i, v))
            .collect();
        TimeSeries::raw(samples, self.dt, self.t0)
    }
}

/// Noise amplitude as a fraction of a reference standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Noise standard deviation divided by the reference standard deviation.
    pub level: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(level: f64, seed: u64) -> Self {
        Self { level, seed }
    }
}

/// Population standard deviation (two-pass).
pub fn std_dev(x: &TimeSeries) -> f64 {
    std_dev_slice(x.samples())
}

pub(crate) fn std_dev_slice(s: &[f64]) -> f64 {
    let n = s.len() as f64;
    let mean = s.iter().sum::<f64>() / n;
    let var = s.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    var.sqrt()
}

/// `n` zero-mean Gaussian samples with standard deviation `spec.level * sigma_ref`.
///
/// Level 0 short-circuits to an exact zero vector. The stream is fully
/// determined by `spec.seed`.
pub fn gaussian_noise(n: usize, spec: &NoiseSpec, sigma_ref: f64) -> Vec<f64> {
    assert!(spec.level >= 0.0, "noise level must be non-negative");
    assert!(sigma_ref >= 0.0, "reference sigma must be non-negative");
    let std = spec.level * sigma_ref;
    if std == 0.0 {
        return vec![0.0; n];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = Normal::new(0.0, std).expect("std checked above");
    (0..n).map(|_| normal.sample(&mut rng)).collect()
}

/// Derive an independent child seed for stream `stream` of a master seed.
///
/// SplitMix64 finalizer over the keyed master; distinct streams give
/// decorrelated generators while staying reproducible from one seed.
pub fn child_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Three-tone benchmark: `(5cos(2pi 2t) + 5cos(2pi 4t) + 2sin(2pi 8t)) e^(-t/10)`.
///
/// Sampled on `[0, duration]` inclusive at step `dt`.
pub fn synth_three_tone(duration: f64, dt: f64) -> Result<TimeSeries> {
    if !(duration > 0.0 && dt > 0.0) {
        return Err(Error::DegenerateInput(format!(
            "duration and dt must be positive, got {duration} and {dt}"
        )));
    }
    let n = (duration / dt).round() as usize + 1;
    if n < 2 {
        return Err(Error::DegenerateInput(
            "duration shorter than one sample step".into(),
        ));
    }
    let tau = std::f64::consts::TAU;
    let samples = (0..n)
        .map(|i| {
            let t = dt * i as f64;
            (5.0 * (tau * 2.0 * t).cos() + 5.0 * (tau * 4.0 * t).cos() + 2.0 * (tau * 8.0 * t).sin())
                * (-t / 10.0).exp()
        })
        .collect();
    Ok(TimeSeries::raw(samples, dt, 0.0))
}
