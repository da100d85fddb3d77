use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::preprocess::NormalizedTrajectory;
use crate::{Error, Result};

/// How initial unit weights are drawn from the training set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SomInit {
    /// Each unit copies a uniformly drawn training vector.
    Samples,
    /// Like `Samples`, but after the first unit each draw is weighted by the
    /// squared distance to the nearest unit already placed.
    SpreadSamples,
    /// Independent uniform draws in `[0, 1)` per component.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SomConfig {
    pub grid_rows: usize,
    pub grid_cols: usize,
    pub sigma: f64,
    pub learning_rate: f64,
    pub iterations: usize,
    pub seed: u64,
    pub init: SomInit,
}

impl Default for SomConfig {
    fn default() -> Self {
        Self {
            grid_rows: 1,
            grid_cols: 3,
            sigma: 0.3,
            learning_rate: 0.1,
            iterations: 50_000,
            seed: crate::rng::DEFAULT_SEED,
            init: SomInit::Samples,
        }
    }
}

impl SomConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_rows * self.grid_cols == 0 {
            return Err(Error::InvalidConfig("SOM grid must hold at least one unit".into()));
        }
        if !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(Error::InvalidConfig(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be at least 1".into()));
        }
        Ok(())
    }

    pub fn units(&self) -> usize {
        self.grid_rows * self.grid_cols
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SomModel {
    pub config: SomConfig,
    pub dim: usize,
    /// Row-major unit weights, `units * dim` values.
    pub weights: Vec<f64>,
    /// Quantization error on the training set, sampled every `iterations / 100` steps
    /// (first entry before training, last entry after).
    pub training_quantization_error: Vec<f64>,
}

impl SomModel {
    pub fn unit(&self, row: usize, col: usize) -> &[f64] {
        let idx = row * self.config.grid_cols + col;
        &self.weights[idx * self.dim..(idx + 1) * self.dim]
    }

    fn unit_at(&self, idx: usize) -> &[f64] {
        &self.weights[idx * self.dim..(idx + 1) * self.dim]
    }

    fn bmu_index(&self, x: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for idx in 0..self.config.units() {
            let d = squared_distance(self.unit_at(idx), x);
            if d < best.1 {
                best = (idx, d);
            }
        }
        best
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: v.len() });
        }
        Ok(())
    }

    fn mean_error(&self, vectors: &[&[f64]]) -> f64 {
        vectors.iter().map(|v| self.bmu_index(v).1.sqrt()).sum::<f64>() / vectors.len() as f64
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

fn initial_weights(data: &[&[f64]], config: &SomConfig, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let dim = data[0].len();
    let mut weights = Vec::with_capacity(config.units() * dim);
    match config.init {
        SomInit::Uniform => {
            for _ in 0..config.units() * dim {
                weights.push(rng.random::<f64>());
            }
        }
        SomInit::Samples => {
            for _ in 0..config.units() {
                weights.extend_from_slice(data[rng.random_range(0..data.len())]);
            }
        }
        SomInit::SpreadSamples => {
            weights.extend_from_slice(data[rng.random_range(0..data.len())]);
            let mut nearest: Vec<f64> = data.iter().map(|v| squared_distance(v, &weights[..dim])).collect();
            for _ in 1..config.units() {
                let total: f64 = nearest.iter().sum();
                let pick = if total > 0.0 {
                    let mut target = rng.random::<f64>() * total;
                    let mut chosen = data.len() - 1;
                    for (i, d) in nearest.iter().enumerate() {
                        if target < *d {
                            chosen = i;
                            break;
                        }
                        target -= d;
                    }
                    chosen
                } else {
                    rng.random_range(0..data.len())
                };
                let start = weights.len();
                weights.extend_from_slice(data[pick]);
                for (d, v) in nearest.iter_mut().zip(data) {
                    *d = d.min(squared_distance(v, &weights[start..]));
                }
            }
        }
    }
    weights
}

/// Online SOM training.
///
/// Each iteration draws a training vector uniformly with replacement, finds
/// its best-matching unit and pulls every unit towards it with a Gaussian
/// neighbourhood over grid distance. Learning rate and neighbourhood width
/// decay as `p0 / (1 + t / (T / 2))`.
pub fn train_som(vectors: &[NormalizedTrajectory], config: &SomConfig) -> Result<SomModel> {
    config.validate()?;
    let first = vectors.first().ok_or(Error::EmptyInput("SOM training vectors"))?;
    let dim = first.vector.len();
    if dim == 0 {
        return Err(Error::EmptyInput("SOM training vector dimension"));
    }
    for v in vectors {
        if v.vector.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: v.vector.len() });
        }
    }
    let data: Vec<&[f64]> = vectors.iter().map(|v| v.vector.as_slice()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = SomModel {
        config: *config,
        dim,
        weights: initial_weights(&data, config, &mut rng),
        training_quantization_error: Vec::new(),
    };
    model.training_quantization_error.push(model.mean_error(&data));

    let total = config.iterations as f64;
    let sample_every = (config.iterations / 100).max(1);
    let cols = config.grid_cols;
    for t in 0..config.iterations {
        let x = data[rng.random_range(0..data.len())];
        let (bmu, _) = model.bmu_index(x);
        let decay = 1.0 + t as f64 / (total / 2.0);
        let eta = config.learning_rate / decay;
        let sigma = config.sigma / decay;
        let denom = 2.0 * sigma * sigma;
        let (br, bc) = ((bmu / cols) as f64, (bmu % cols) as f64);
        for unit in 0..config.units() {
            let (r, c) = ((unit / cols) as f64, (unit % cols) as f64);
            let h = (-((r - br).powi(2) + (c - bc).powi(2)) / denom).exp();
            let step = eta * h;
            if step == 0.0 {
                continue;
            }
            let w = &mut model.weights[unit * dim..(unit + 1) * dim];
            for (wi, xi) in w.iter_mut().zip(x) {
                *wi += step * (xi - *wi);
            }
        }
        if (t + 1) % sample_every == 0 {
            model.training_quantization_error.push(model.mean_error(&data));
        }
    }
    if !config.iterations.is_multiple_of(sample_every) {
        model.training_quantization_error.push(model.mean_error(&data));
    }
    Ok(model)
}

/// Best-matching unit as `(row, col)`; ties go to the lexicographically smallest unit.
pub fn assign_cluster(model: &SomModel, vector: &NormalizedTrajectory) -> Result<(usize, usize)> {
    model.check_dim(&vector.vector)?;
    let (idx, _) = model.bmu_index(&vector.vector);
    Ok((idx / model.config.grid_cols, idx % model.config.grid_cols))
}

/// Mean Euclidean distance from each vector to its best-matching unit.
pub fn quantization_error(model: &SomModel, vectors: &[NormalizedTrajectory]) -> Result<f64> {
    if vectors.is_empty() {
        return Err(Error::EmptyInput("quantization error vectors"));
    }
    let mut data = Vec::with_capacity(vectors.len());
    for v in vectors {
        model.check_dim(&v.vector)?;
        data.push(v.vector.as_slice());
    }
    Ok(model.mean_error(&data))
}

/// Fraction of items whose cluster's majority label matches their own label.
pub fn partition_purity<C: Ord, L: Ord>(clusters: &[C], labels: &[L]) -> f64 {
    assert_eq!(clusters.len(), labels.len(), "one label per assignment");
    if clusters.is_empty() {
        return 1.0;
    }
    let mut counts: BTreeMap<&C, BTreeMap<&L, usize>> = BTreeMap::new();
    for (c, l) in clusters.iter().zip(labels) {
        *counts.entry(c).or_default().entry(l).or_default() += 1;
    }
    let majority: usize = counts.values().map(|m| m.values().copied().max().unwrap_or(0)).sum();
    majority as f64 / clusters.len() as f64
}

/// Weight dump: a `grid_rows,grid_cols,dim` header line, then one line per unit in row-major order.
pub fn write_model<W: Write>(model: &SomModel, mut writer: W) -> Result<()> {
    writeln!(writer, "{},{},{}", model.config.grid_rows, model.config.grid_cols, model.dim)?;
    for unit in model.weights.chunks(model.dim) {
        let line: Vec<String> = unit.iter().map(|w| w.to_string()).collect();
        writeln!(writer, "{}", line.join(","))?;
    }
    Ok(())
}

/// Reads a weight dump. Training parameters other than the grid shape are
/// taken from `config`.
pub fn read_model<R: BufRead>(reader: R, config: &SomConfig) -> Result<SomModel> {
    let mut lines = reader.lines();
    let header = lines.next().ok_or(Error::EmptyInput("SOM weight dump"))??;
    let parse_usize = |s: &str, line: usize| {
        s.trim().parse::<usize>().map_err(|e| Error::Parse { line, message: format!("{s:?}: {e}") })
    };
    let fields: Vec<&str> = header.split(',').collect();
    if fields.len() != 3 {
        return Err(Error::Parse { line: 1, message: "expected grid_rows,grid_cols,dim".into() });
    }
    let (rows, cols, dim) = (parse_usize(fields[0], 1)?, parse_usize(fields[1], 1)?, parse_usize(fields[2], 1)?);
    let mut weights = Vec::with_capacity(rows * cols * dim);
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let before = weights.len();
        for value in line.split(',') {
            weights.push(value.trim().parse::<f64>().map_err(|e| Error::Parse {
                line: idx + 2,
                message: format!("{value:?}: {e}"),
            })?);
        }
        if weights.len() - before != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: weights.len() - before });
        }
    }
    if weights.len() != rows * cols * dim {
        return Err(Error::DimensionMismatch { expected: rows * cols * dim, actual: weights.len() });
    }
    Ok(SomModel {
        config: SomConfig { grid_rows: rows, grid_cols: cols, ..*config },
        dim,
        weights,
        training_quantization_error: Vec::new(),
    })
}
