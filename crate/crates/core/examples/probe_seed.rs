use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shm_core::signal::TimeSeries;
use shm_core::simulator::{calibrate, simulate, MaterialLaw, ShearFrameModel};
use std::f64::consts::TAU;

fn record(seed: u64, b: f64, a: f64, dt: f64) -> TimeSeries {
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
    let scale: f64 = std::env::args().nth(1).and_then(|v| v.parse().ok()).unwrap_or(1.0423);
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
    for seed in 1..=200u64 {
        let g = record(seed, 0.0105 * scale, 12.9 * scale, 0.005);
        let rd = simulate(&dmg, &g).unwrap();
        let ex = &rd.excursion_log;
        if ex.len() < 2 || ex.len() > 5 || ex.iter().any(|e| e.story != 1) {
            continue;
        }
        let t1 = ex[0].time;
        let tlast = ex.last().unwrap().time;
        if !(11.5..=16.0).contains(&t1) || tlast > 19.5 || ex[1].time - t1 < 0.3 {
            continue;
        }
        let rl = simulate(&lin, &g).unwrap();
        let d = &rl.drift[0];
        let x = d.samples();
        let (mut m1, mut p1, mut post) = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..x.len() {
            let t = d.time_at(i);
            let v = x[i].abs();
            if t < 9.5 && v > m1 {
                m1 = v;
            }
            if t < t1 - 0.05 && v > p1 {
                p1 = v;
            }
            if t > t1 && t < 20.5 && v > post {
                post = v;
            }
        }
        let times: Vec<f64> = ex.iter().map(|e| (e.time * 100.0).round() / 100.0).collect();
        println!(
            "seed {seed:3}  d {}  t {:?}  train/pre {:.3}  post/pre {:.3}  pre {p1:.5}",
            ex.len(),
            times,
            m1 / p1,
            post / p1
        );
    }
}
