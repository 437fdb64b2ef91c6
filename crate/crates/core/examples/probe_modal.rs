//! Scratch probe: frame response -> decomposition -> modal estimate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shm_core::decomposition::{eemd, emd, EemdSettings, SiftSettings};
use shm_core::modal::{estimate_modal, ModalConfig};
use shm_core::signal::TimeSeries;
use shm_core::simulator::{calibrate, simulate, MaterialLaw, ShearFrameModel};
use std::f64::consts::TAU;

fn broadband(seed: u64, dt: f64, dur: f64, burst: f64, amp: f64) -> TimeSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let comps: Vec<(f64, f64)> = (0..131)
        .map(|j| (0.4 + 0.02 * j as f64, rng.random::<f64>() * TAU))
        .collect();
    let n = (dur / dt).round() as usize + 1;
    let s: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 * dt;
            let env = if t >= burst {
                0.0
            } else if t < 2.0 {
                t / 2.0
            } else if t < burst - 2.0 {
                1.0
            } else {
                (burst - t) / 2.0
            };
            env * comps
                .iter()
                .map(|&(f, p)| amp * (TAU * f * t + p).cos())
                .sum::<f64>()
        })
        .collect();
    TimeSeries::new(s, dt, 0.0).unwrap()
}

fn decimate(x: &TimeSeries, every: usize) -> TimeSeries {
    let s: Vec<f64> = x.samples().iter().step_by(every).copied().collect();
    TimeSeries::new(s, x.dt() * every as f64, x.t0()).unwrap()
}

fn main() {
    let masses = vec![8000.0; 3];
    let k = calibrate(1.0696, &[0.2964, 0.7037, 1.0], &masses).unwrap();
    let material = MaterialLaw {
        yield_drift: 1e6,
        post_yield_ratio: 0.0,
        degradation_factor: 0.91,
    };
    let model = ShearFrameModel::new(masses, k, material, 0.05).unwrap();

    let ground = broadband(42, 0.01, 60.0, 15.0, 0.07);
    let t = std::time::Instant::now();
    let res = simulate(&model, &ground).unwrap();
    println!("simulate: {:?}", t.elapsed());
    let peak_drift = res.drift[0]
        .samples()
        .iter()
        .fold(0.0f64, |m, &x| m.max(x.abs()));
    println!("peak story-1 drift {peak_drift:.5} m (yield 1e6)");

    let mode = &std::env::args().nth(1).unwrap_or_else(|| "emd".into());
    let records: Vec<TimeSeries> = res.accel.iter().map(|x| decimate(x, std::env::args().nth(3).and_then(|v| v.parse().ok()).unwrap_or(5))).collect();
    println!(
        "decimated to dt {} ({} samples)",
        records[0].dt(),
        records[0].len()
    );
    let t = std::time::Instant::now();
    let sets: Vec<_> = records
        .iter()
        .map(|x| {
            if mode == "emd" {
                emd(x, &SiftSettings::default()).unwrap()
            } else {
                let set = EemdSettings {
                    sift: SiftSettings::default(),
                    noise_level: 1.0,
                    ensemble: mode.parse().unwrap_or(50),
                    seed: std::env::args().nth(2).and_then(|v| v.parse().ok()).unwrap_or(7),
                };
                eemd(x, &set).unwrap()
            }
        })
        .collect();
    println!("decompose ({mode}): {:?}", t.elapsed());

    for (s, set) in sets.iter().enumerate() {
        let rms_all: Vec<f64> = set
            .imfs
            .iter()
            .map(|x| (x.samples().iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt())
            .collect();
        let rms_max = rms_all.iter().cloned().fold(0.0f64, f64::max);
        for (i, imf) in set.imfs.iter().enumerate() {
            use shm_core::hilbert::{hilbert_transform, instantaneous_with, InstantOptions};
            use shm_core::modal::frequency_histogram;
            let z = hilbert_transform(imf).unwrap();
            let tr = instantaneous_with(&z, &InstantOptions::default()).unwrap();
            let vn = tr.valid_frequency().len();
            match frequency_histogram(&tr, 0.01) {
                Ok(h) => {
                    let c = 0.5 * (h.dominant.0 + h.dominant.1);
                    let cnt = h
                        .bins
                        .iter()
                        .find(|(b, _)| (b - c).abs() < 0.0025)
                        .map(|&(_, n)| n)
                        .unwrap_or(0);
                    println!(
                        "story {s} imf {i}: dom {c:.3} Hz count {cnt}/{vn} ({:.1}%), rms/max {:.4}, rms {:.5}",
                        100.0 * cnt as f64 / vn as f64,
                        rms_all[i] / rms_max,
                        rms_all[i]
                    );
                }
                Err(e) => println!("story {s} imf {i}: hist err {e:?}"),
            }
        }
    }

    {
        use shm_core::hilbert::{hilbert_transform, instantaneous_with, InstantOptions};
        use shm_core::modal::frequency_histogram;
        let imf = &sets[2].imfs[2];
        let z = hilbert_transform(imf).unwrap();
        let tr = instantaneous_with(&z, &InstantOptions::default()).unwrap();
        let f = tr.frequency.samples();
        let a = tr.amplitude.samples();
        let dt = tr.frequency.dt();
        let block = (5.0 / dt).round() as usize;
        for (b, chunk) in f[tr.valid.0..tr.valid.1].chunks(block).enumerate() {
            let mean = chunk.iter().sum::<f64>() / chunk.len() as f64;
            let amp = a[tr.valid.0 + b * block..tr.valid.0 + b * block + chunk.len()]
                .iter()
                .sum::<f64>()
                / chunk.len() as f64;
            println!(
                "block {:>5.1}-{:>5.1} s: mean IF {mean:.4} Hz, mean amp {amp:.4}",
                (tr.valid.0 + b * block) as f64 * dt,
                (tr.valid.0 + b * block + chunk.len()) as f64 * dt
            );
        }
        let h = frequency_histogram(&tr, 0.01).unwrap();
        let mut bins = h.bins.clone();
        bins.sort_by(|x, y| y.1.cmp(&x.1));
        println!("top bins: {:?}", &bins[..10.min(bins.len())]);
    }

    let t = std::time::Instant::now();
    match estimate_modal(&sets, &ModalConfig::default()) {
        Ok(est) => {
            println!("modal: {:?}", t.elapsed());
            println!("f1 = {} interval {:?}", est.f1, est.f1_interval);
            println!("shape = {:?}", est.shape);
            println!("window = {:?}", est.window);
            println!("selected = {:?}", est.selected_imfs);
            let fem = [0.2964, 0.7037, 1.0];
            for (g, w) in est.shape.iter().zip(fem) {
                println!("  entry {g:.4} vs {w:.4}: {:.2}%", 100.0 * (g - w).abs() / w);
            }
        }
        Err(e) => println!("modal failed: {e:?}"),
    }
}
