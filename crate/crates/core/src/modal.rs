//! First-mode estimation from per-story decompositions: a frequency
//! histogram over instantaneous-frequency traces picks the dominant bin,
//! the lowest meaningful dominant across the reference story's components
//! fixes the target band, and amplitude ratios over a minimum-variance
//! window give the mode shape normalized to the top story.

use serde::{Deserialize, Serialize};

use crate::decomposition::ImfSet;
use crate::error::{Error, Result};
use crate::hilbert::{hilbert_transform, instantaneous_with, InstantOptions, InstantTrace};
use crate::signal::TimeSeries;

/// Counted instantaneous-frequency bins. Bins are centered on integer
/// multiples of the width, so a 0.01 Hz histogram has a bin [1.065, 1.075]
/// centered at 1.07.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyHistogram {
    pub bin_width: f64,
    /// Ordered (center, count) pairs for every occupied bin.
    pub bins: Vec<(f64, usize)>,
    /// The max-count bin's interval; ties break toward lower frequency.
    pub dominant: (f64, f64),
}

impl FrequencyHistogram {
    pub fn dominant_center(&self) -> f64 {
        0.5 * (self.dominant.0 + self.dominant.1)
    }

    fn dominant_count(&self) -> usize {
        let c = self.dominant_center();
        self.bins
            .iter()
            .find(|(center, _)| (center - c).abs() < 0.25 * self.bin_width)
            .map(|&(_, n)| n)
            .unwrap_or(0)
    }
}

/// Result of the target-band search: the lowest meaningful dominant
/// interval on the reference story and the per-story component indices
/// whose dominant frequency falls inside the band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub target: (f64, f64),
    pub per_story: Vec<Vec<usize>>,
}

/// First-mode frequency and shape with the evidence that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalEstimate {
    /// Center of the dominant frequency interval, Hz.
    pub f1: f64,
    pub f1_interval: (f64, f64),
    /// Per-story amplitude ratios, top story = 1.
    pub shape: Vec<f64>,
    /// Seconds spanned by the minimum-variance window.
    pub window: (f64, f64),
    pub selected_imfs: Vec<Vec<usize>>,
}

/// Estimation knobs. The reference story defaults to the top one, where
/// the first mode is most visible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModalConfig {
    pub bin_width: f64,
    /// Mode-shape window length, seconds.
    pub window_seconds: f64,
    /// Window search stride, seconds.
    pub stride_seconds: f64,
    /// A dominant bin is meaningful when its count exceeds this fraction
    /// of the trace's valid samples.
    pub significance: f64,
    /// Components whose RMS falls below this fraction of the story's
    /// strongest component are ignored in the target search; count
    /// concentration alone cannot separate a tiny sift artifact from a
    /// real mode.
    pub energy_floor: f64,
    /// Half-width of the selection band around the target center,
    /// fractional.
    pub band_tolerance: f64,
    /// Components must complete at least this many cycles over the record
    /// for their dominant frequency to count as resolvable.
    pub min_cycles: f64,
    pub reference_story: Option<usize>,
    /// Fraction of samples distrusted at each end of a frequency trace.
    pub edge_trim: f64,
    /// Moving-average span for instantaneous frequency, seconds. Averaging
    /// mixes neighboring content into the trace, so leave this off unless a
    /// ragged histogram calls for it.
    pub smooth_seconds: Option<f64>,
}

impl Default for ModalConfig {
    fn default() -> Self {
        Self {
            bin_width: 0.01,
            window_seconds: 6.0,
            stride_seconds: 1.0,
            significance: 0.05,
            energy_floor: 0.05,
            band_tolerance: 0.20,
            min_cycles: 10.0,
            reference_story: None,
            edge_trim: 0.05,
            smooth_seconds: None,
        }
    }
}

impl ModalConfig {
    fn instant(&self, dt: f64) -> InstantOptions {
        InstantOptions {
            edge_trim: self.edge_trim,
            // Bitwise-or with 1 keeps the window odd so the average stays
            // centered.
            smooth_window: self
                .smooth_seconds
                .map(|s| ((s / dt).round() as usize).max(1) | 1),
        }
    }
}

/// Histogram of the trace's valid instantaneous frequencies.
pub fn frequency_histogram(trace: &InstantTrace, bin_width: f64) -> Result<FrequencyHistogram> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::Config(format!(
            "bin_width must be positive, got {bin_width}"
        )));
    }
    let freqs = trace.valid_frequency();
    let mut counts = std::collections::BTreeMap::<i64, usize>::new();
    for &f in freqs {
        if f.is_finite() {
            *counts.entry((f / bin_width).round() as i64).or_insert(0) += 1;
        }
    }
    if counts.is_empty() {
        return Err(Error::DegenerateInput(
            "no valid frequency samples to bin".into(),
        ));
    }
    // Max count; on ties the lower-frequency bin wins.
    let (&best, _) = counts
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .unwrap();
    let center = best as f64 * bin_width;
    Ok(FrequencyHistogram {
        bin_width,
        bins: counts
            .into_iter()
            .map(|(j, n)| (j as f64 * bin_width, n))
            .collect(),
        dominant: (center - 0.5 * bin_width, center + 0.5 * bin_width),
    })
}

fn component_histogram(
    imf: &TimeSeries,
    cfg: &ModalConfig,
) -> Result<(FrequencyHistogram, usize)> {
    let z = hilbert_transform(imf)?;
    let trace = instantaneous_with(&z, &cfg.instant(imf.dt()))?;
    let valid_n = trace.valid_frequency().len();
    Ok((frequency_histogram(&trace, cfg.bin_width)?, valid_n))
}

fn check_aligned(sets: &[ImfSet]) -> Result<(f64, f64, usize)> {
    if sets.is_empty() {
        return Err(Error::DegenerateInput("no story decompositions".into()));
    }
    let r = &sets[0].residue;
    for (s, set) in sets.iter().enumerate() {
        if set.residue.len() != r.len() || set.residue.dt() != r.dt() {
            return Err(Error::DimensionMismatch(format!(
                "story {s} was decomposed on a different grid"
            )));
        }
    }
    Ok((r.dt(), r.t0(), r.len()))
}

/// Finds the first-mode band: the lowest dominant frequency among the
/// reference story's components that is resolvable over the record and
/// concentrates more than the significance fraction of its samples in one
/// bin, then selects every component (all stories) whose dominant lies
/// within the band tolerance of that center.
pub fn select_first_mode_imfs(
    sets: &[ImfSet],
    reference_story: usize,
    cfg: &ModalConfig,
) -> Result<Selection> {
    let (dt, _, len) = check_aligned(sets)?;
    if reference_story >= sets.len() {
        return Err(Error::Config(format!(
            "reference story {reference_story} out of range for {} stories",
            sets.len()
        )));
    }
    let duration = dt * (len - 1) as f64;
    let floor_hz = cfg.min_cycles / duration;

    let rms = |x: &TimeSeries| {
        (x.samples().iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
    };
    let rms_max = sets[reference_story]
        .imfs
        .iter()
        .map(rms)
        .fold(0.0f64, f64::max);

    let mut target: Option<f64> = None;
    for imf in &sets[reference_story].imfs {
        if rms(imf) < cfg.energy_floor * rms_max {
            continue;
        }
        let (hist, valid_n) = match component_histogram(imf, cfg) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let center = hist.dominant_center();
        let significant = hist.dominant_count() as f64 > cfg.significance * valid_n as f64;
        if significant && center >= floor_hz && center > 0.0 && target.map_or(true, |b| center < b)
        {
            target = Some(center);
        }
    }
    let center = target.ok_or(Error::NoModeFound)?;
    let interval = (center - 0.5 * cfg.bin_width, center + 0.5 * cfg.bin_width);

    let lo = center * (1.0 - cfg.band_tolerance);
    let hi = center * (1.0 + cfg.band_tolerance);
    let per_story = sets
        .iter()
        .map(|set| {
            set.imfs
                .iter()
                .enumerate()
                .filter_map(|(i, imf)| {
                    let (hist, _) = component_histogram(imf, cfg).ok()?;
                    let c = hist.dominant_center();
                    (c >= lo && c <= hi).then_some(i)
                })
                .collect()
        })
        .collect();
    Ok(Selection { target: interval, per_story })
}

/// Shape from amplitude ratios: per story the selected components are
/// summed and Hilbert-enveloped, each story's envelope is divided by the
/// top story's, and the fixed-length window minimizing the summed ratio
/// variance supplies the mean ratios. The top story is 1 by construction.
pub fn mode_shape(
    sets: &[ImfSet],
    selection: &Selection,
    cfg: &ModalConfig,
) -> Result<ModalEstimate> {
    let (dt, t0, len) = check_aligned(sets)?;
    let n = sets.len();
    if selection.per_story.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "selection covers {} stories, decompositions {n}",
            selection.per_story.len()
        )));
    }

    let mut amps = Vec::with_capacity(n);
    let mut valid = (0usize, usize::MAX);
    for (s, picks) in selection.per_story.iter().enumerate() {
        if picks.is_empty() {
            return Err(Error::NoModeFound);
        }
        let mut sum = vec![0.0; len];
        for &i in picks {
            let imf = sets[s].imfs.get(i).ok_or_else(|| {
                Error::Config(format!("selected component {i} does not exist in story {s}"))
            })?;
            for (acc, v) in sum.iter_mut().zip(imf.samples()) {
                *acc += v;
            }
        }
        let z = hilbert_transform(&TimeSeries::new(sum, dt, t0)?)?;
        let trace = instantaneous_with(&z, &cfg.instant(dt))?;
        valid = (valid.0.max(trace.valid.0), valid.1.min(trace.valid.1));
        amps.push(trace.amplitude);
    }

    let window_n = (cfg.window_seconds / dt).round() as usize;
    let stride_n = ((cfg.stride_seconds / dt).round() as usize).max(1);
    if window_n < 2 {
        return Err(Error::WindowTooShort(format!(
            "{} s window holds fewer than 2 samples at dt = {dt}",
            cfg.window_seconds
        )));
    }
    if valid.0 + window_n > valid.1 {
        return Err(Error::NoAdmissibleWindow(format!(
            "{} s window does not fit in the {:.2} s valid span",
            cfg.window_seconds,
            (valid.1 - valid.0) as f64 * dt
        )));
    }

    let top = &amps[n - 1];
    let top_peak = top.samples()[valid.0..valid.1]
        .iter()
        .fold(0.0f64, |m, &x| m.max(x));
    let amp_floor = 1e-9 * top_peak;

    // Ratio traces on the shared valid span.
    let ratios: Vec<Vec<f64>> = (0..n)
        .map(|s| {
            (valid.0..valid.1)
                .map(|i| amps[s].samples()[i] / top.samples()[i])
                .collect()
        })
        .collect();

    let mut best: Option<(f64, usize)> = None;
    let mut start = valid.0;
    while start + window_n <= valid.1 {
        let off = start - valid.0;
        let admissible = top.samples()[start..start + window_n]
            .iter()
            .all(|&a| a > amp_floor);
        if admissible {
            let mut total_var = 0.0;
            for r in &ratios {
                let w = &r[off..off + window_n];
                let mean = w.iter().sum::<f64>() / window_n as f64;
                total_var +=
                    w.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / window_n as f64;
            }
            if best.map_or(true, |(v, _)| total_var < v) {
                best = Some((total_var, start));
            }
        }
        start += stride_n;
    }
    let (_, start) = best.ok_or_else(|| {
        Error::NoAdmissibleWindow(
            "top-story amplitude drops to the numeric floor in every window".into(),
        )
    })?;

    let off = start - valid.0;
    let mut shape: Vec<f64> = ratios
        .iter()
        .map(|r| r[off..off + window_n].iter().sum::<f64>() / window_n as f64)
        .collect();
    shape[n - 1] = 1.0;

    Ok(ModalEstimate {
        f1: 0.5 * (selection.target.0 + selection.target.1),
        f1_interval: selection.target,
        shape,
        window: (
            t0 + start as f64 * dt,
            t0 + (start + window_n) as f64 * dt,
        ),
        selected_imfs: selection.per_story.clone(),
    })
}

/// Band selection and shape extraction in one call, with the reference
/// story defaulting to the top.
pub fn estimate_modal(sets: &[ImfSet], cfg: &ModalConfig) -> Result<ModalEstimate> {
    let reference = cfg.reference_story.unwrap_or(sets.len().saturating_sub(1));
    let selection = select_first_mode_imfs(sets, reference, cfg)?;
    mode_shape(sets, &selection, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{emd, SiftSettings};
    use crate::hilbert::hilbert_transform;
    use std::f64::consts::TAU;

    fn tone(freqs_amps: &[(f64, f64)], n: usize, dt: f64) -> TimeSeries {
        let s: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 * dt;
                freqs_amps
                    .iter()
                    .map(|(f, a)| a * (TAU * f * t).sin())
                    .sum()
            })
            .collect();
        TimeSeries::new(s, dt, 0.0).unwrap()
    }

    fn trace_of(x: &TimeSeries) -> InstantTrace {
        instantaneous_with(&hilbert_transform(x).unwrap(), &InstantOptions::default()).unwrap()
    }

    #[test]
    fn constant_frequency_fills_one_bin() {
        let x = tone(&[(2.0, 1.0)], 2001, 0.01);
        let h = frequency_histogram(&trace_of(&x), 0.01).unwrap();
        assert!((h.dominant.0 - 1.995).abs() < 1e-12);
        assert!((h.dominant.1 - 2.005).abs() < 1e-12);
        assert!((h.dominant_center() - 2.0).abs() < 1e-12);
        // Nearly every valid sample lands in the dominant bin.
        let total: usize = h.bins.iter().map(|b| b.1).sum();
        assert!(h.dominant_count() as f64 > 0.98 * total as f64);
    }

    #[test]
    fn majority_bin_wins_and_ties_break_low() {
        // Hand-built trace: 70% of samples at 1 Hz, 30% at 3 Hz.
        let mut f = vec![1.0; 700];
        f.extend(vec![3.0; 300]);
        let trace = InstantTrace {
            amplitude: TimeSeries::new(vec![1.0; 1000], 0.01, 0.0).unwrap(),
            frequency: TimeSeries::new(f, 0.01, 0.0).unwrap(),
            valid: (0, 1000),
        };
        let h = frequency_histogram(&trace, 0.01).unwrap();
        assert!((h.dominant_center() - 1.0).abs() < 1e-12);

        // An exact 50/50 split keeps the lower bin.
        let mut f = vec![1.0; 500];
        f.extend(vec![3.0; 500]);
        let trace = InstantTrace {
            amplitude: TimeSeries::new(vec![1.0; 1000], 0.01, 0.0).unwrap(),
            frequency: TimeSeries::new(f, 0.01, 0.0).unwrap(),
            valid: (0, 1000),
        };
        let h = frequency_histogram(&trace, 0.01).unwrap();
        assert!((h.dominant_center() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn refined_bins_agree_with_coarse_dominant() {
        let x = tone(&[(1.07, 1.0), (3.2, 0.6)], 4001, 0.005);
        let t = trace_of(&x);
        let coarse = frequency_histogram(&t, 0.05).unwrap();
        let fine = frequency_histogram(&t, 0.005).unwrap();
        assert!((coarse.dominant_center() - fine.dominant_center()).abs() <= 0.05);
    }

    #[test]
    fn histogram_rejects_bad_input() {
        let x = tone(&[(2.0, 1.0)], 200, 0.01);
        assert!(frequency_histogram(&trace_of(&x), 0.0).is_err());
        let empty = InstantTrace {
            amplitude: TimeSeries::new(vec![1.0; 10], 0.01, 0.0).unwrap(),
            frequency: TimeSeries::new(vec![2.0; 10], 0.01, 0.0).unwrap(),
            valid: (5, 5),
        };
        assert!(matches!(
            frequency_histogram(&empty, 0.01),
            Err(Error::DegenerateInput(_))
        ));
    }

    fn decompose_stories(stories: &[TimeSeries]) -> Vec<ImfSet> {
        stories
            .iter()
            .map(|x| emd(x, &SiftSettings::default()).unwrap())
            .collect()
    }

    #[test]
    fn identical_tone_stories_select_the_tone() {
        let x = tone(&[(2.0, 1.0)], 2001, 0.01);
        let sets = decompose_stories(&[x.clone(), x.clone(), x]);
        let cfg = ModalConfig::default();
        let sel = select_first_mode_imfs(&sets, 2, &cfg).unwrap();
        let center = 0.5 * (sel.target.0 + sel.target.1);
        println!("target interval {:?}", sel.target);
        assert!((center - 2.0).abs() <= 0.01);
        for picks in &sel.per_story {
            assert!(picks.contains(&0));
        }
    }

    #[test]
    fn lower_of_two_modes_becomes_the_target() {
        // 1.07 and 3.2 Hz, the frame's first two apparent frequencies.
        let x = tone(&[(3.2, 0.8), (1.07, 1.0)], 6001, 0.005);
        let sets = decompose_stories(&[x.clone(), x.clone(), x]);
        let cfg = ModalConfig::default();
        let sel = select_first_mode_imfs(&sets, 2, &cfg).unwrap();
        let center = 0.5 * (sel.target.0 + sel.target.1);
        println!("target interval {:?}", sel.target);
        assert!((center - 1.07).abs() <= 0.02);
        // The fast component sits outside the band everywhere.
        for (s, picks) in sel.per_story.iter().enumerate() {
            assert!(!picks.is_empty());
            for &i in picks {
                let (h, _) = component_histogram(&sets[s].imfs[i], &cfg).unwrap();
                assert!((h.dominant_center() - 1.07).abs() < 0.25);
            }
        }
    }

    #[test]
    fn featureless_record_reports_no_mode() {
        // A pure ramp has no oscillatory component at all.
        let ramp: Vec<f64> = (0..500).map(|i| i as f64 * 0.01).collect();
        let x = TimeSeries::new(ramp, 0.01, 0.0).unwrap();
        let sets = vec![emd(&x, &SiftSettings::default()).unwrap()];
        assert!(sets[0].imfs.len() <= 1);
        match select_first_mode_imfs(&sets, 0, &ModalConfig::default()) {
            Err(Error::NoModeFound) => {}
            other => panic!("expected NoModeFound, got {other:?}"),
        }
    }

    #[test]
    fn identical_stories_give_a_unit_shape() {
        let x = tone(&[(1.5, 1.0)], 3001, 0.01);
        let sets = decompose_stories(&[x.clone(), x.clone(), x]);
        let est = estimate_modal(&sets, &ModalConfig::default()).unwrap();
        println!("shape = {:?}, window = {:?}", est.shape, est.window);
        for s in &est.shape {
            assert!((s - 1.0).abs() < 1e-9);
        }
        assert_eq!(est.shape[2], 1.0);
    }

    #[test]
    fn scaled_stories_recover_the_scale_factors() {
        let x = tone(&[(1.5, 1.0)], 3001, 0.01);
        let alphas = [0.3, 0.7, 1.0];
        let stories: Vec<TimeSeries> = alphas
            .iter()
            .map(|a| {
                TimeSeries::new(x.samples().iter().map(|v| a * v).collect(), 0.01, 0.0).unwrap()
            })
            .collect();
        let sets = decompose_stories(&stories);
        let est = estimate_modal(&sets, &ModalConfig::default()).unwrap();
        println!("shape = {:?}", est.shape);
        for (got, want) in est.shape.iter().zip(alphas) {
            assert!((got - want).abs() < 1e-6, "{got} vs {want}");
        }
    }

    #[test]
    fn common_scaling_changes_nothing() {
        let x = tone(&[(1.5, 1.0)], 3001, 0.01);
        let scaled = TimeSeries::new(
            x.samples().iter().map(|v| 37.5 * v).collect(),
            0.01,
            0.0,
        )
        .unwrap();
        // Binned frequencies are identical, not merely close.
        let h1 = frequency_histogram(&trace_of(&x), 0.01).unwrap();
        let h2 = frequency_histogram(&trace_of(&scaled), 0.01).unwrap();
        assert_eq!(h1, h2);

        let alphas = [0.4, 0.8, 1.0];
        let build = |gain: f64| -> Vec<ImfSet> {
            let stories: Vec<TimeSeries> = alphas
                .iter()
                .map(|a| {
                    TimeSeries::new(
                        x.samples().iter().map(|v| gain * a * v).collect(),
                        0.01,
                        0.0,
                    )
                    .unwrap()
                })
                .collect();
            decompose_stories(&stories)
        };
        let one = estimate_modal(&build(1.0), &ModalConfig::default()).unwrap();
        let big = estimate_modal(&build(37.5), &ModalConfig::default()).unwrap();
        assert_eq!(one.f1_interval, big.f1_interval);
        for (a, b) in one.shape.iter().zip(&big.shape) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn reference_story_choice_leaves_the_shape_alone() {
        let x = tone(&[(1.5, 1.0)], 3001, 0.01);
        let alphas = [0.4, 0.8, 1.0];
        let stories: Vec<TimeSeries> = alphas
            .iter()
            .map(|a| {
                TimeSeries::new(x.samples().iter().map(|v| a * v).collect(), 0.01, 0.0).unwrap()
            })
            .collect();
        let sets = decompose_stories(&stories);
        let cfg = ModalConfig::default();
        let sel0 = select_first_mode_imfs(&sets, 0, &cfg).unwrap();
        let sel2 = select_first_mode_imfs(&sets, 2, &cfg).unwrap();
        let a = mode_shape(&sets, &sel0, &cfg).unwrap();
        let b = mode_shape(&sets, &sel2, &cfg).unwrap();
        for (u, v) in a.shape.iter().zip(&b.shape) {
            assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn stability_window_avoids_the_disturbed_span() {
        // Story 1's ratio wobbles hard for the first 12 s, then settles at
        // 0.3; the window search must land in the settled span.
        let n = 3001;
        let dt = 0.01;
        let carrier: Vec<f64> = (0..n).map(|i| (TAU * 1.5 * i as f64 * dt).sin()).collect();
        let wobble: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 * dt;
                if t < 12.0 {
                    0.3 + 0.25 * (TAU * 0.11 * t).sin()
                } else {
                    0.3
                }
            })
            .collect();
        let s1 = TimeSeries::new(
            carrier.iter().zip(&wobble).map(|(c, w)| c * w).collect(),
            dt,
            0.0,
        )
        .unwrap();
        let s2 = TimeSeries::new(carrier.iter().map(|c| 0.7 * c).collect(), dt, 0.0).unwrap();
        let s3 = TimeSeries::new(carrier.clone(), dt, 0.0).unwrap();
        let sets = decompose_stories(&[s1, s2, s3]);
        let est = estimate_modal(&sets, &ModalConfig::default()).unwrap();
        println!("window = {:?}, shape = {:?}", est.window, est.shape);
        assert!(est.window.0 >= 12.0);
        assert!((est.shape[0] - 0.3).abs() < 0.02);
        assert!((est.shape[1] - 0.7).abs() < 0.01);
    }

    #[test]
    fn oversized_windows_are_rejected() {
        let x = tone(&[(1.5, 1.0)], 801, 0.01);
        let sets = decompose_stories(&[x.clone(), x]);
        let cfg = ModalConfig { window_seconds: 30.0, ..Default::default() };
        match estimate_modal(&sets, &cfg) {
            Err(Error::NoAdmissibleWindow(_)) => {}
            other => panic!("expected NoAdmissibleWindow, got {other:?}"),
        }
    }

    #[test]
    fn misaligned_stories_are_rejected() {
        let a = tone(&[(1.5, 1.0)], 1001, 0.01);
        let b = tone(&[(1.5, 1.0)], 901, 0.01);
        let sets = decompose_stories(&[a, b]);
        assert!(matches!(
            select_first_mode_imfs(&sets, 0, &ModalConfig::default()),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
