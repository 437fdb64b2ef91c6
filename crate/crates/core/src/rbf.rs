//! Gaussian radial-basis-function regression: seeded k-means centers, a
//! single shared kernel width, and closed-form ridge least squares for the
//! output weights. Inputs and outputs are min-max scaled to [-1, 1].

use std::path::Path;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-dimension affine map `y = (x - offset) * scale`, fitted so training
/// data lands in [-1, 1]. A constant dimension keeps scale 1 so the map
/// stays invertible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    offset: Vec<f64>,
    scale: Vec<f64>,
}

impl Scaler {
    fn fit(rows: &[Vec<f64>]) -> Self {
        let dim = rows[0].len();
        let mut offset = Vec::with_capacity(dim);
        let mut scale = Vec::with_capacity(dim);
        for d in 0..dim {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for r in rows {
                lo = lo.min(r[d]);
                hi = hi.max(r[d]);
            }
            offset.push(0.5 * (lo + hi));
            scale.push(if hi > lo { 2.0 / (hi - lo) } else { 1.0 });
        }
        Self { offset, scale }
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.offset)
            .zip(&self.scale)
            .map(|((v, o), s)| (v - o) * s)
            .collect()
    }

    fn invert(&self, y: &[f64]) -> Vec<f64> {
        y.iter()
            .zip(&self.offset)
            .zip(&self.scale)
            .map(|((v, o), s)| v / s + o)
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }
}

/// Training hyperparameters. `n_centers: None` keeps every training sample
/// as a center; a count below the sample total selects centers by seeded
/// k-means on the scaled inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub n_centers: Option<usize>,
    pub ridge: f64,
    /// Kernel width as a multiple of the median pairwise center distance.
    pub width_rule: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            n_centers: None,
            ridge: 1e-8,
            width_rule: 1.0,
            seed: 0,
        }
    }
}

/// Trained network. Centers live in the scaled input space; `out_weights`
/// has one row per center plus a final bias row, one column per output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbfNet {
    pub input_dim: usize,
    pub output_dim: usize,
    centers: Vec<Vec<f64>>,
    width: f64,
    out_weights: Vec<Vec<f64>>,
    input_scaler: Scaler,
    output_scaler: Scaler,
    /// Root-mean-square training residual in the scaled output space.
    pub train_rmse: f64,
}

const NET_FORMAT: &str = "rbf-net";
const NET_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct NetFile {
    format: String,
    version: u32,
    #[serde(flatten)]
    net: RbfNet,
}

fn check_matrix(name: &str, rows: &[Vec<f64>]) -> Result<usize> {
    if rows.is_empty() {
        return Err(Error::DegenerateInput(format!("{name} has no rows")));
    }
    let dim = rows[0].len();
    if dim == 0 {
        return Err(Error::DegenerateInput(format!("{name} rows are empty")));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{name} row {i} has {} entries, expected {dim}",
                r.len()
            )));
        }
        if let Some(bad) = r.iter().find(|v| !v.is_finite()) {
            return Err(Error::DegenerateInput(format!(
                "{name} row {i} contains a non-finite value {bad}"
            )));
        }
    }
    Ok(dim)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd iterations from a seeded draw of distinct sample rows. An emptied
/// cluster is re-seeded at the point farthest from its assigned center, so
/// every requested center survives.
fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = rand::seq::index::sample(&mut rng, points.len(), k);
    let mut centers: Vec<Vec<f64>> = picks.iter().map(|i| points[i].clone()).collect();
    let mut assign = vec![usize::MAX; points.len()];

    for _ in 0..100 {
        let mut changed = false;
        for (p, slot) in points.iter().zip(assign.iter_mut()) {
            let best = (0..k)
                .min_by(|&a, &b| {
                    sq_dist(p, &centers[a])
                        .partial_cmp(&sq_dist(p, &centers[b]))
                        .unwrap()
                })
                .unwrap();
            if best != *slot {
                *slot = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let dim = points[0].len();
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &c) in points.iter().zip(&assign) {
            counts[c] += 1;
            for d in 0..dim {
                sums[c][d] += p[d];
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                let far = points
                    .iter()
                    .enumerate()
                    .max_by(|(_, a), (_, b)| {
                        sq_dist(a, &centers[assign[0]])
                            .partial_cmp(&sq_dist(b, &centers[assign[0]]))
                            .unwrap()
                    })
                    .map(|(i, _)| i)
                    .unwrap();
                centers[c] = points[far].clone();
                continue;
            }
            for d in 0..points[0].len() {
                centers[c][d] = sums[c][d] / counts[c] as f64;
            }
        }
    }
    centers
}

/// Median pairwise distance among the centers, over a seeded subsample when
/// the center count would make the full set of pairs unwieldy.
fn median_pairwise(centers: &[Vec<f64>], seed: u64) -> f64 {
    const CAP: usize = 2048;
    let subset: Vec<&Vec<f64>> = if centers.len() <= CAP {
        centers.iter().collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        rand::seq::index::sample(&mut rng, centers.len(), CAP)
            .iter()
            .map(|i| &centers[i])
            .collect()
    };
    let mut d = Vec::with_capacity(subset.len() * (subset.len() - 1) / 2);
    for i in 0..subset.len() {
        for j in i + 1..subset.len() {
            d.push(sq_dist(subset[i], subset[j]).sqrt());
        }
    }
    if d.is_empty() {
        return 0.0;
    }
    let mid = d.len() / 2;
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if d.len() % 2 == 1 {
        d[mid]
    } else {
        0.5 * (d[mid - 1] + d[mid])
    }
}

fn features(x_scaled: &[f64], centers: &[Vec<f64>], width: f64) -> Vec<f64> {
    let inv = 1.0 / (2.0 * width * width);
    let mut phi: Vec<f64> = centers
        .iter()
        .map(|c| (-sq_dist(x_scaled, c) * inv).exp())
        .collect();
    phi.push(1.0);
    phi
}

/// Fits an RBF network to the sample matrix. Centers are all scaled samples
/// (or a seeded k-means selection), the shared width follows the median
/// pairwise center distance, and output weights come from a closed-form
/// ridge solve; ridge 0 demands a full-rank feature matrix.
pub fn train(inputs: &[Vec<f64>], targets: &[Vec<f64>], cfg: &TrainConfig) -> Result<RbfNet> {
    let input_dim = check_matrix("inputs", inputs)?;
    let output_dim = check_matrix("targets", targets)?;
    if inputs.len() != targets.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} input rows but {} target rows",
            inputs.len(),
            targets.len()
        )));
    }
    if inputs.len() < 2 {
        return Err(Error::DegenerateInput(
            "training needs at least 2 samples".into(),
        ));
    }
    if !(cfg.ridge >= 0.0 && cfg.ridge.is_finite()) {
        return Err(Error::Config(format!("ridge must be >= 0, got {}", cfg.ridge)));
    }
    if !(cfg.width_rule > 0.0 && cfg.width_rule.is_finite()) {
        return Err(Error::Config(format!(
            "width_rule must be positive, got {}",
            cfg.width_rule
        )));
    }
    if cfg.n_centers == Some(0) {
        return Err(Error::Config("n_centers must be at least 1".into()));
    }

    let input_scaler = Scaler::fit(inputs);
    let output_scaler = Scaler::fit(targets);
    let xs: Vec<Vec<f64>> = inputs.iter().map(|r| input_scaler.apply(r)).collect();
    let ys: Vec<Vec<f64>> = targets.iter().map(|r| output_scaler.apply(r)).collect();

    let centers = match cfg.n_centers {
        Some(k) if k < xs.len() => kmeans(&xs, k, cfg.seed),
        _ => xs.clone(),
    };
    let med = median_pairwise(&centers, cfg.seed);
    // Coincident or single centers leave no distance scale; the scaled
    // input space has unit half-width, so fall back to that.
    let width = if med > 0.0 { cfg.width_rule * med } else { cfg.width_rule };

    let n = xs.len();
    let m = centers.len();
    let mut phi = DMatrix::zeros(n, m + 1);
    for (i, x) in xs.iter().enumerate() {
        for (j, f) in features(x, &centers, width).into_iter().enumerate() {
            phi[(i, j)] = f;
        }
    }
    let y = DMatrix::from_fn(n, output_dim, |i, j| ys[i][j]);

    let w = if cfg.ridge > 0.0 {
        let mut gram = phi.transpose() * &phi;
        for j in 0..m + 1 {
            gram[(j, j)] += cfg.ridge;
        }
        let rhs = phi.transpose() * &y;
        gram.cholesky()
            .ok_or(Error::RankDeficient)?
            .solve(&rhs)
    } else {
        let svd = phi.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smin > smax * 1e-12) {
            return Err(Error::RankDeficient);
        }
        svd.solve(&y, 0.0).expect("svd computed both factors")
    };

    let residual = &phi * &w - &y;
    let train_rmse = (residual.iter().map(|r| r * r).sum::<f64>()
        / (n * output_dim) as f64)
        .sqrt();

    Ok(RbfNet {
        input_dim,
        output_dim,
        centers,
        width,
        out_weights: (0..m + 1)
            .map(|j| (0..output_dim).map(|o| w[(j, o)]).collect())
            .collect(),
        input_scaler,
        output_scaler,
        train_rmse,
    })
}

impl RbfNet {
    /// Network output for one input vector.
    pub fn predict(&self, input: &[f64]) -> Result<Vec<f64>> {
        if input.len() != self.input_dim {
            return Err(Error::DimensionMismatch(format!(
                "input has {} entries, network expects {}",
                input.len(),
                self.input_dim
            )));
        }
        let x = self.input_scaler.apply(input);
        let phi = features(&x, &self.centers, self.width);
        let mut y = vec![0.0; self.output_dim];
        for (f, row) in phi.iter().zip(&self.out_weights) {
            for (acc, w) in y.iter_mut().zip(row) {
                *acc += f * w;
            }
        }
        Ok(self.output_scaler.invert(&y))
    }

    /// Predictions for every row of a matrix.
    pub fn predict_batch(&self, inputs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        inputs.iter().map(|r| self.predict(r)).collect()
    }

    pub fn n_centers(&self) -> usize {
        self.centers.len()
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Writes the network as a versioned JSON file.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = NetFile {
            format: NET_FORMAT.into(),
            version: NET_VERSION,
            net: self.clone(),
        };
        let body = serde_json::to_string_pretty(&file)
            .map_err(|e| Error::format(path, e.to_string()))?;
        std::fs::write(path, body)?;
        Ok(())
    }

    /// Reads a network written by [`RbfNet::save`].
    pub fn load(path: &Path) -> Result<Self> {
        let body = std::fs::read_to_string(path)?;
        let file: NetFile =
            serde_json::from_str(&body).map_err(|e| Error::format(path, e.to_string()))?;
        if file.format != NET_FORMAT {
            return Err(Error::format(
                path,
                format!("not an rbf-net file (format {:?})", file.format),
            ));
        }
        if file.version != NET_VERSION {
            return Err(Error::format(
                path,
                format!("unsupported version {} (expected {NET_VERSION})", file.version),
            ));
        }
        if file.net.width <= 0.0
            || file.net.out_weights.len() != file.net.centers.len() + 1
        {
            return Err(Error::format(path, "inconsistent network geometry"));
        }
        Ok(file.net)
    }
}
