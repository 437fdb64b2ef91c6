use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shm_core::detection::{detect_onset, residual_traces, train_emulator, DetectConfig};
use shm_core::rbf::TrainConfig;
use shm_core::signal::{NoiseSpec, TimeSeries};
use shm_core::simulator::{calibrate, simulate, MaterialLaw, ShearFrameModel};
use std::f64::consts::TAU;

/// Stationary multi-sine 0.4..3.0 Hz plus an 8 Hz carrier, all under one
/// intensity profile: fade in, hold, gentle ramp, stronger plateau, off.
fn hybrid(b: f64, a: f64, seed: u64, dt: f64) -> TimeSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let comps: Vec<(f64, f64)> = (0..131)
        .map(|j| (0.4 + 0.02 * j as f64, rng.random::<f64>() * TAU))
        .collect();
    let n = (60.0 / dt as f64).round() as usize + 1;
    let s: Vec<f64> = (0..n)
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
            g * (b * bb + a * (TAU * 8.0 * t).sin())
        })
        .collect();
    TimeSeries::new(s, dt, 0.0).unwrap()
}

fn main() {
    let b: f64 = std::env::args().nth(1).and_then(|v| v.parse().ok()).unwrap_or(0.0116);
    let a: f64 = std::env::args().nth(2).and_then(|v| v.parse().ok()).unwrap_or(14.3);
    let seed: u64 = std::env::args().nth(3).and_then(|v| v.parse().ok()).unwrap_or(27);
    let jitter: f64 = std::env::args().nth(4).and_then(|v| v.parse().ok()).unwrap_or(0.01);
    let width: f64 = std::env::args().nth(5).and_then(|v| v.parse().ok()).unwrap_or(1.0);
    let dec: usize = std::env::args().nth(6).and_then(|v| v.parse().ok()).unwrap_or(1);
    let horizon: f64 = std::env::args().nth(7).and_then(|v| v.parse().ok()).unwrap_or(0.5);
    let jseed: u64 = std::env::args().nth(8).and_then(|v| v.parse().ok()).unwrap_or(11);
    let kseed: u64 = std::env::args().nth(9).and_then(|v| v.parse().ok()).unwrap_or(0);
    let ground = hybrid(b, a, seed, 0.005);
    let masses = vec![8000.0; 3];
    let k = calibrate(1.0696, &[0.2964, 0.7037, 1.0], &masses).unwrap();
    let dmg = ShearFrameModel::new(masses.clone(), k.clone(), MaterialLaw::default(), 0.05).unwrap();
    let lin = ShearFrameModel::new(
        masses,
        k,
        MaterialLaw { yield_drift: 1e6, ..MaterialLaw::default() },
        0.05,
    )
    .unwrap();
    let rd = simulate(&dmg, &ground).unwrap();
    let rl = simulate(&lin, &ground).unwrap();
    for e in &rd.excursion_log {
        println!("excursion story {} at {:.3}", e.story, e.time);
    }
    let peak_of = |x: &TimeSeries| x.samples().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let d0 = &rl.drift[0];
    let x = d0.samples();
    for i in 1..x.len() - 1 {
        let v = x[i].abs();
        if v > 0.0088 && v >= x[i - 1].abs() && v >= x[i + 1].abs() && d0.time_at(i) < 15.0 {
            println!("peak {:.5} at {:.3}", v, d0.time_at(i));
        }
    }
    println!(
        "damaged drifts: {:.5} {:.5} {:.5}",
        peak_of(&rd.drift[0]),
        peak_of(&rd.drift[1]),
        peak_of(&rd.drift[2])
    );
    println!(
        "healthy drifts: {:.5} {:.5} {:.5}",
        peak_of(&rl.drift[0]),
        peak_of(&rl.drift[1]),
        peak_of(&rl.drift[2])
    );
    let window = (0.0, 9.5);
    let baseline = (9.5, 12.3);
    let cfg = TrainConfig { n_centers: Some(200), width_rule: width, seed: kseed, ..TrainConfig::default() };
    for (name, res) in [("damaged", &rd), ("healthy", &rl)] {
        let slice: Vec<TimeSeries> = res
            .accel
            .iter()
            .map(|x| {
                let w = x.window(0.0, 20.5).unwrap();
                let v: Vec<f64> = w.samples().iter().copied().step_by(dec).collect();
                TimeSeries::new(v, w.dt() * dec as f64, w.t0()).unwrap()
            })
            .collect();
        let emu = train_emulator(&slice, 4, window, &cfg, &NoiseSpec::new(jitter, jseed)).unwrap();
        let traces = residual_traces(&slice, &emu, baseline).unwrap();
        let rep = detect_onset(&traces, &DetectConfig { slope_horizon: horizon, ..DetectConfig::new(baseline) }).unwrap();
        for st in 0..3 {
            let m = |lo: f64, hi: f64| {
                let w = traces[st].absolute.window(lo, hi).unwrap();
                w.samples().iter().map(|v| v.abs()).sum::<f64>() / w.len() as f64
            };
            println!(
                "{name} story {} resid: [4,9] {:.4}  [10,12] {:.4}  [14,20] {:.4}",
                st + 1,
                m(4.0, 9.0),
                m(10.0, 12.0),
                m(14.0, 20.0)
            );
        }
        println!(
            "{name}: fit {:?} onset {:?} stories {:?} z {:?}",
            emu.fit_quality.iter().map(|q| (q * 1e4).round() / 1e4).collect::<Vec<_>>(),
            rep.onset_time,
            rep.damaged_stories,
            rep.trigger_values.iter().map(|z| (z * 10.0).round() / 10.0).collect::<Vec<_>>()
        );
    }
}
