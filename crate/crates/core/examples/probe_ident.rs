use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shm_core::decomposition::{eemd, EemdSettings};
use shm_core::modal::{estimate_modal, ModalConfig};
use shm_core::signal::TimeSeries;
use shm_core::simulator::{calibrate, eigen_modes, simulate, MaterialLaw, ShearFrameModel};
use std::f64::consts::TAU;

fn yielding_record(duration: f64, dt: f64) -> TimeSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(169);
    let comps: Vec<(f64, f64)> = (0..131)
        .map(|j| (0.4 + 0.02 * j as f64, rng.random::<f64>() * TAU))
        .collect();
    let n = (duration / dt).round() as usize + 1;
    let samples: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 * dt;
            let g = if t < 0.4 {
                t / 0.4
            } else if t < 20.5 {
                1.0
            } else if t < 21.0 {
                (21.0 - t) / 0.5
            } else {
                0.0
            };
            let bb: f64 = comps.iter().map(|(f, p)| (TAU * f * t + p).sin()).sum();
            g * (0.010944 * bb + 13.446 * (TAU * 8.0 * t).sin())
        })
        .collect();
    TimeSeries::new(samples, dt, 0.0).unwrap()
}

fn main() {
    let t_start: f64 = std::env::args().nth(1).and_then(|v| v.parse().ok()).unwrap_or(13.5);
    let t_end: f64 = std::env::args().nth(4).and_then(|v| v.parse().ok()).unwrap_or(60.0);
    let smooth: f64 = std::env::args().nth(5).and_then(|v| v.parse().ok()).unwrap_or(0.0);
    let eseed: u64 = std::env::args().nth(6).and_then(|v| v.parse().ok()).unwrap_or(7);
    let dec: usize = std::env::args().nth(2).and_then(|v| v.parse().ok()).unwrap_or(10);
    let ensemble: usize = std::env::args().nth(3).and_then(|v| v.parse().ok()).unwrap_or(500);
    let masses = vec![8000.0; 3];
    let k = calibrate(1.0696, &[0.2964, 0.7037, 1.0], &masses).unwrap();
    let frac = 0.91f64.powi(3);
    let kd = vec![k[0] * frac, k[1], k[2]];
    let modes = eigen_modes(&masses, &kd).unwrap();
    println!("degraded f = {:?}", modes.frequencies_hz);
    println!("degraded shape1 = {:?}", modes.shapes[0]);

    let ground = yielding_record(60.0, 0.005);
    let dmg = ShearFrameModel::new(masses, k, MaterialLaw::default(), 0.05).unwrap();
    let rd = simulate(&dmg, &ground).unwrap();
    for e in &rd.excursion_log {
        println!("excursion story {} at {:.3}", e.story, e.time);
    }
    let slices: Vec<TimeSeries> = rd
        .accel
        .iter()
        .map(|x| {
            let w = x.window(t_start, t_end).unwrap();
            let v: Vec<f64> = w.samples().iter().copied().step_by(dec).collect();
            TimeSeries::new(v, w.dt() * dec as f64, w.t0()).unwrap()
        })
        .collect();
    let settings = EemdSettings { noise_level: 1.0, ensemble, seed: eseed, ..EemdSettings::default() };
    let t0 = std::time::Instant::now();
    let decs: Vec<_> = slices.iter().map(|s| eemd(s, &settings).unwrap()).collect();
    println!("eemd took {:.1} s", t0.elapsed().as_secs_f64());
    for (si, d) in decs.iter().enumerate() {
        for (ii, imf) in d.imfs.iter().enumerate() {
            let rms = (imf.samples().iter().map(|v| v * v).sum::<f64>() / imf.len() as f64).sqrt();
            let z = shm_core::hilbert::hilbert_transform(imf).unwrap();
            let inst = shm_core::hilbert::instantaneous(&z);
            let mut hist = std::collections::HashMap::new();
            let mut valid = 0usize;
            for f in inst.frequency.samples() {
                if f.is_finite() && *f > 0.0 {
                    *hist.entry((f / 0.01).round() as i64).or_insert(0usize) += 1;
                    valid += 1;
                }
            }
            if let Some((bin, cnt)) = hist.into_iter().max_by_key(|(_, c)| *c) {
                println!(
                    "story {si} imf {ii}: rms {rms:.4} dom {:.2} Hz frac {:.3}",
                    bin as f64 * 0.01,
                    cnt as f64 / valid.max(1) as f64
                );
            }
        }
    }
    let mcfg = ModalConfig { smooth_seconds: (smooth > 0.0).then_some(smooth), ..ModalConfig::default() };
    let est = estimate_modal(&decs, &mcfg).unwrap();
    println!("f1 interval [{:.4}, {:.4}]", est.f1_interval.0, est.f1_interval.1);
    println!("shape = {:?}", est.shape);
    println!("selected = {:?}", est.selected_imfs);
    let reference = &modes.shapes[0];
    for i in 0..3 {
        let err = (est.shape[i] - reference[i]).abs() / reference[i].abs();
        println!("story {} shape err {:.3}%", i + 1, 100.0 * err);
    }
}
