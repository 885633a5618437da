//! Linear SVM training over explicit feature maps with Pegasos-style
//! stochastic subgradient descent, computing features on the fly.
//!
//! The primal objective is p(w) = λ/2·‖w‖² + (1/m)·Σ max(0, 1−y_i⟨w,φ(x_i)⟩)
//! with no bias term (the degree-0 monomial feature plays that role). Step t
//! uses η_t = 1/(λt): w ← (1−1/t)·w, plus η_t·y·φ(x) when the margin is
//! strictly below 1, then optionally projects onto the ball of radius 1/√λ.
//! The decay touches only a scalar: the model keeps w = scale·v and updates
//! v on φ(x)'s nonzero ranks alone, with ‖v‖² maintained incrementally.
//!
//! Training is sequential by contract (deterministic given the seed);
//! evaluation helpers are pure.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::features::{FeatureMap, FeatureMapSpec, SparseFeatures};
use crate::rng::PortableRng;

/// Weight vectors up to this many features use a dense array; larger rank
/// spaces (e.g. Taylor over high-dimensional data) fall back to a hash map.
pub const DENSE_WEIGHT_LIMIT: u64 = 1 << 26;

#[derive(Debug, Clone)]
enum WeightStore {
    Dense(Vec<f64>),
    Sparse(HashMap<u64, f64>),
}

impl WeightStore {
    fn new(num_features: u64) -> Self {
        if num_features <= DENSE_WEIGHT_LIMIT {
            WeightStore::Dense(vec![0.0; num_features as usize])
        } else {
            WeightStore::Sparse(HashMap::new())
        }
    }

    fn get(&self, rank: u64) -> f64 {
        match self {
            WeightStore::Dense(v) => v[rank as usize],
            WeightStore::Sparse(m) => m.get(&rank).copied().unwrap_or(0.0),
        }
    }

    /// Adds `delta` at `rank`, returning the previous value.
    fn bump(&mut self, rank: u64, delta: f64) -> f64 {
        match self {
            WeightStore::Dense(v) => {
                let slot = &mut v[rank as usize];
                let old = *slot;
                *slot = old + delta;
                old
            }
            WeightStore::Sparse(m) => {
                let slot = m.entry(rank).or_insert(0.0);
                let old = *slot;
                *slot = old + delta;
                old
            }
        }
    }

    fn dot(&self, feats: &SparseFeatures) -> f64 {
        let mut acc = 0.0;
        match self {
            WeightStore::Dense(v) => {
                for &(rank, value) in feats.entries() {
                    acc += v[rank as usize] * value;
                }
            }
            WeightStore::Sparse(m) => {
                for &(rank, value) in feats.entries() {
                    if let Some(w) = m.get(&rank) {
                        acc += w * value;
                    }
                }
            }
        }
        acc
    }

    fn norm_squared(&self) -> f64 {
        match self {
            WeightStore::Dense(v) => v.iter().map(|w| w * w).sum(),
            WeightStore::Sparse(m) => m.values().map(|w| w * w).sum(),
        }
    }

    fn clear(&mut self) {
        match self {
            WeightStore::Dense(v) => v.iter_mut().for_each(|w| *w = 0.0),
            WeightStore::Sparse(m) => m.clear(),
        }
    }

    fn scale_all(&mut self, factor: f64) {
        match self {
            WeightStore::Dense(v) => v.iter_mut().for_each(|w| *w *= factor),
            WeightStore::Sparse(m) => m.values_mut().for_each(|w| *w *= factor),
        }
    }

    /// Nonzero entries sorted by rank.
    fn entries_sorted(&self) -> Vec<(u64, f64)> {
        let mut out: Vec<(u64, f64)> = match self {
            WeightStore::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|&(_, &w)| w != 0.0)
                .map(|(r, &w)| (r as u64, w))
                .collect(),
            WeightStore::Sparse(m) => m.iter().filter(|&(_, &w)| w != 0.0).map(|(&r, &w)| (r, w)).collect(),
        };
        out.sort_unstable_by_key(|&(r, _)| r);
        out
    }
}

/// Training parameters. The regularizer is λ; callers working in terms of
/// the C convention should set λ = 1/(C·m).
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub lambda: f64,
    pub epochs: u32,
    /// Seed for the per-epoch shuffles.
    pub seed: u64,
    /// Project onto the ball of radius 1/√λ after each step (default true).
    pub project: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lambda: 0.1,
            epochs: 100,
            seed: 0,
            project: true,
        }
    }
}

/// Trained linear model: effective weights are `scale · v` over the map's
/// rank space.
#[derive(Debug, Clone)]
pub struct LinearModel {
    weights: WeightStore,
    scale: f64,
    pub lambda: f64,
    spec: FeatureMapSpec,
    /// Multiplicative factor applied to the training data before mapping
    /// (1.0 when no normalization was requested); stored so evaluation can
    /// apply the same scaling.
    pub norm_scale: f64,
    /// Training provenance, recorded for serialization.
    pub seed: u64,
    pub epochs: u32,
}

impl LinearModel {
    /// All-zero model over the map's rank space.
    pub fn zeros(map: &FeatureMap, lambda: f64) -> LinearModel {
        LinearModel {
            weights: WeightStore::new(map.num_features()),
            scale: 1.0,
            lambda,
            spec: map.spec().clone(),
            norm_scale: 1.0,
            seed: 0,
            epochs: 0,
        }
    }

    /// Model with explicit weight entries (ranks must be sorted, unique,
    /// and within the map's rank space).
    pub fn with_weights(
        map: &FeatureMap,
        lambda: f64,
        entries: &[(u64, f64)],
    ) -> Result<LinearModel> {
        let mut model = LinearModel::zeros(map, lambda);
        let total = map.num_features();
        let mut prev: Option<u64> = None;
        for &(rank, value) in entries {
            if rank >= total {
                return Err(Error::Config(format!(
                    "weight rank {rank} outside feature space of size {total}"
                )));
            }
            if prev.is_some_and(|p| p >= rank) {
                return Err(Error::Config("weight ranks must be sorted and unique".to_string()));
            }
            prev = Some(rank);
            model.weights.bump(rank, value);
        }
        Ok(model)
    }

    /// ⟨w, features⟩.
    pub fn score(&self, feats: &SparseFeatures) -> f64 {
        self.scale * self.weights.dot(feats)
    }

    /// Predicted label; sign(0) counts as +1.
    pub fn predict(&self, feats: &SparseFeatures) -> f64 {
        if self.score(feats) >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    /// ‖w‖² of the effective weight vector.
    pub fn norm_squared(&self) -> f64 {
        self.scale * self.scale * self.weights.norm_squared()
    }

    /// Effective weight at a rank.
    pub fn weight(&self, rank: u64) -> f64 {
        self.scale * self.weights.get(rank)
    }

    /// Number of stored nonzero weights.
    pub fn nnz_weights(&self) -> usize {
        self.weights.entries_sorted().len()
    }

    /// Folds the scalar into the stored weights, leaving scale = 1. After
    /// this, ‖w‖ ≤ 1/√λ (+ float slack) when training projected.
    pub fn finalize(&mut self) {
        if self.scale != 1.0 {
            self.weights.scale_all(self.scale);
            self.scale = 1.0;
        }
    }

    pub fn spec(&self) -> &FeatureMapSpec {
        &self.spec
    }

    /// Nonzero effective weights sorted by rank.
    pub fn weight_entries(&self) -> Vec<(u64, f64)> {
        self.weights
            .entries_sorted()
            .into_iter()
            .map(|(r, w)| (r, self.scale * w))
            .collect()
    }
}

/// Trains with Pegasos over `cfg.epochs` seeded-shuffle passes, computing
/// features on the fly. Returns the model and the total feature-map flops
/// spent (the dominant cost of training).
pub fn train_pegasos(
    ds: &LabeledDataset,
    map: &FeatureMap,
    cfg: &TrainConfig,
) -> Result<(LinearModel, u64)> {
    if ds.is_empty() {
        return Err(Error::Config("cannot train on an empty dataset".to_string()));
    }
    if !(cfg.lambda.is_finite() && cfg.lambda > 0.0) {
        return Err(Error::Config(format!(
            "lambda must be positive, got {}",
            cfg.lambda
        )));
    }
    if cfg.epochs == 0 {
        return Err(Error::Config("epochs must be at least 1".to_string()));
    }

    let mut model = LinearModel::zeros(map, cfg.lambda);
    model.seed = cfg.seed;
    model.epochs = cfg.epochs;
    let mut vnorm2 = 0.0f64; // ‖v‖² maintained incrementally
    let mut scale = 1.0f64;
    let mut rng = PortableRng::new(cfg.seed);
    let mut order: Vec<usize> = (0..ds.len()).collect();
    let mut total_flops: u64 = 0;
    let limit2 = 1.0 / cfg.lambda;
    let mut t: u64 = 0;

    for _ in 0..cfg.epochs {
        rng.shuffle(&mut order);
        for &i in &order {
            t += 1;
            let feats = map.map(&ds.examples[i]);
            total_flops += feats.flops();
            let y = ds.labels[i];
            let margin = y * scale * model.weights.dot(&feats);
            let eta = 1.0 / (cfg.lambda * t as f64);

            // Decay w ← (1-1/t)·w. At t = 1 the factor is exactly 0, which
            // a multiplicative scale cannot represent: reset the store.
            if t == 1 {
                model.weights.clear();
                scale = 1.0;
                vnorm2 = 0.0;
            } else {
                scale *= 1.0 - 1.0 / t as f64;
            }

            // Margin exactly 1 has zero subgradient: strict comparison.
            if margin < 1.0 {
                let coeff = eta * y / scale;
                for &(rank, value) in feats.entries() {
                    let delta = coeff * value;
                    let old = model.weights.bump(rank, delta);
                    vnorm2 += delta * (2.0 * old + delta);
                }
            }

            if cfg.project {
                let wnorm2 = scale * scale * vnorm2;
                if wnorm2 > limit2 {
                    scale *= (limit2 / wnorm2).sqrt();
                }
            }

            // The decay drives scale toward 1/t; fold it in before it can
            // denormalize (rare: only extremely long runs).
            if scale != 0.0 && scale.abs() < 1e-100 {
                model.weights.scale_all(scale);
                vnorm2 *= scale * scale;
                scale = 1.0;
            }
        }
    }

    model.scale = scale;
    Ok((model, total_flops))
}

/// p(w) = λ/2·‖w‖² + (1/m)·Σ max(0, 1 − y_i·⟨w, φ(x_i)⟩).
pub fn primal_objective(ds: &LabeledDataset, map: &FeatureMap, model: &LinearModel) -> f64 {
    let mut hinge_sum = 0.0;
    for (x, &y) in ds.examples.iter().zip(&ds.labels) {
        let margin = y * model.score(&map.map(x));
        hinge_sum += (1.0 - margin).max(0.0);
    }
    model.lambda / 2.0 * model.norm_squared() + hinge_sum / ds.len() as f64
}

/// Fraction of examples with sign(⟨w,φ(x)⟩) ≠ y, where sign(0) = +1.
pub fn test_error(ds: &LabeledDataset, map: &FeatureMap, model: &LinearModel) -> f64 {
    let wrong = ds
        .examples
        .iter()
        .zip(&ds.labels)
        .filter(|(x, &y)| model.predict(&map.map(x)) != y)
        .count();
    wrong as f64 / ds.len() as f64
}

/// Writes the model as text: a key=value header (map spec, λ, train_seed,
/// epochs, norm_scale), a weight count, then `rank value` lines with the
/// scale folded in. Values use shortest round-trip formatting, so save →
/// load → save is byte-identical. The training seed key is `train_seed`,
/// distinct from the map spec's own `seed` (the Fourier sampling seed).
pub fn save_model(model: &LinearModel, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(b"# linear svm model\n")?;
    w.write_all(model.spec().to_config_string().as_bytes())?;
    writeln!(w, "lambda={}", model.lambda)?;
    writeln!(w, "train_seed={}", model.seed)?;
    writeln!(w, "epochs={}", model.epochs)?;
    writeln!(w, "norm_scale={}", model.norm_scale)?;
    let entries = model.weight_entries();
    writeln!(w, "weights={}", entries.len())?;
    for (rank, value) in entries {
        writeln!(w, "{rank} {value}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a model written by [`save_model`], rebuilding the weight store
/// sized for the spec's feature space.
pub fn load_model(path: &Path) -> Result<LinearModel> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines().enumerate();

    let mut spec_lines = String::new();
    let mut lambda = None;
    let mut seed = 0u64;
    let mut epochs = 0u32;
    let mut norm_scale = 1.0f64;
    let mut weight_count: Option<usize> = None;
    let mut header_end = 0usize;

    for (idx, line) in &mut lines {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("expected key=value in model header, found `{trimmed}`"),
        })?;
        let bad = |k: &str| Error::Parse {
            line: line_no,
            msg: format!("invalid value for `{k}`"),
        };
        match key {
            "lambda" => lambda = Some(value.parse().map_err(|_| bad(key))?),
            // A bare `seed` belongs to the map spec (Fourier sampling),
            // not the model: let it flow through to the spec parser.
            "train_seed" => seed = value.parse().map_err(|_| bad(key))?,
            "epochs" => epochs = value.parse().map_err(|_| bad(key))?,
            "norm_scale" => norm_scale = value.parse().map_err(|_| bad(key))?,
            "weights" => {
                weight_count = Some(value.parse().map_err(|_| bad(key))?);
                header_end = line_no;
                break;
            }
            _ => {
                spec_lines.push_str(trimmed);
                spec_lines.push('\n');
            }
        }
    }

    let weight_count = weight_count.ok_or_else(|| Error::Parse {
        line: header_end + 1,
        msg: "missing `weights=` line".to_string(),
    })?;
    let lambda = lambda.ok_or_else(|| Error::Parse {
        line: header_end,
        msg: "missing `lambda=` line".to_string(),
    })?;
    let spec = FeatureMapSpec::from_config_str(&spec_lines)?;
    let map = FeatureMap::from_spec(&spec)?;

    let mut entries = Vec::with_capacity(weight_count);
    let mut read = 0usize;
    for (idx, line) in &mut lines {
        if read == weight_count {
            break;
        }
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let (rank_str, value_str) = trimmed.split_once(' ').ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("expected `rank value`, found `{trimmed}`"),
        })?;
        let rank: u64 = rank_str.parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("invalid rank `{rank_str}`"),
        })?;
        let value: f64 = value_str.parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("invalid weight `{value_str}`"),
        })?;
        entries.push((rank, value));
        read += 1;
    }
    if read != weight_count {
        return Err(Error::Parse {
            line: header_end,
            msg: format!("expected {weight_count} weight lines, found {read}"),
        });
    }

    let mut model = LinearModel::with_weights(&map, lambda, &entries)?;
    model.seed = seed;
    model.epochs = epochs;
    model.norm_scale = norm_scale;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::SparseVector;
    use crate::features::approx_kernel;

    fn identity_map(dim: usize) -> FeatureMap {
        FeatureMap::from_spec(&FeatureMapSpec::polynomial(dim, 1, 0.0)).unwrap()
    }

    fn dataset(points: &[(&[f64], f64)]) -> LabeledDataset {
        let dim = points.iter().map(|(x, _)| x.len()).max().unwrap_or(0);
        LabeledDataset {
            examples: points
                .iter()
                .map(|(x, _)| {
                    let mut dense = x.to_vec();
                    dense.resize(dim, 0.0);
                    SparseVector::from_dense(&dense)
                })
                .collect(),
            labels: points.iter().map(|&(_, y)| y).collect(),
            dim,
        }
    }

    /// Naive Pegasos with a literal dense weight vector; must visit examples
    /// in the same order as `train_pegasos` (same seed, same shuffles).
    fn naive_dense_train(
        ds: &LabeledDataset,
        map: &FeatureMap,
        cfg: &TrainConfig,
    ) -> Vec<f64> {
        let mut w = vec![0.0f64; map.num_features() as usize];
        let mut rng = PortableRng::new(cfg.seed);
        let mut order: Vec<usize> = (0..ds.len()).collect();
        let mut t = 0u64;
        for _ in 0..cfg.epochs {
            rng.shuffle(&mut order);
            for &i in &order {
                t += 1;
                let feats = map.map(&ds.examples[i]);
                let y = ds.labels[i];
                let margin: f64 =
                    y * feats.entries().iter().map(|&(r, v)| w[r as usize] * v).sum::<f64>();
                let eta = 1.0 / (cfg.lambda * t as f64);
                let decay = 1.0 - 1.0 / t as f64;
                w.iter_mut().for_each(|wi| *wi *= decay);
                if margin < 1.0 {
                    for &(r, v) in feats.entries() {
                        w[r as usize] += eta * y * v;
                    }
                }
                if cfg.project {
                    let norm2: f64 = w.iter().map(|wi| wi * wi).sum();
                    if norm2 > 1.0 / cfg.lambda {
                        let shrink = (1.0 / (cfg.lambda * norm2)).sqrt();
                        w.iter_mut().for_each(|wi| *wi *= shrink);
                    }
                }
            }
        }
        w
    }

    #[test]
    fn one_step_from_zero() {
        // Single example, one epoch: margin 0 < 1 forces w = (1/λ)·y·φ(x).
        let map = identity_map(3);
        let ds = dataset(&[(&[0.5, 0.0, -0.25], -1.0)]);
        let cfg = TrainConfig {
            lambda: 1.0,
            epochs: 1,
            seed: 4,
            project: true,
        };
        let (model, flops) = train_pegasos(&ds, &map, &cfg).unwrap();
        let feats = map.map(&ds.examples[0]);
        for &(rank, value) in feats.entries() {
            assert_eq!(model.weight(rank), -value);
        }
        assert_eq!(flops, feats.flops());
    }

    #[test]
    fn margin_exactly_one_gets_no_update() {
        // One example with ‖φ(x)‖ = 1, λ = 1, two steps. After step 1,
        // w = φ(x), so step 2 sees margin exactly 1: no hinge update, only
        // the decay by (1 - 1/2). A non-strict comparison would instead
        // produce w = φ(x).
        let map = identity_map(2);
        let ds = dataset(&[(&[0.6, 0.8], 1.0)]);
        let cfg = TrainConfig {
            lambda: 1.0,
            epochs: 2,
            seed: 0,
            project: true,
        };
        let (model, _) = train_pegasos(&ds, &map, &cfg).unwrap();
        let feats = map.map(&ds.examples[0]);
        for &(rank, value) in feats.entries() {
            let w = model.weight(rank);
            assert!(
                (w - 0.5 * value).abs() < 1e-15,
                "rank {rank}: {w} vs {}",
                0.5 * value
            );
        }
    }

    #[test]
    fn huge_lambda_squashes_weights() {
        let map = identity_map(2);
        let ds = dataset(&[(&[1.0, 0.0], 1.0), (&[0.0, 1.0], -1.0)]);
        let cfg = TrainConfig {
            lambda: 1e6,
            epochs: 5,
            seed: 1,
            project: true,
        };
        let (model, _) = train_pegasos(&ds, &map, &cfg).unwrap();
        assert!(model.norm_squared() <= 1.0 / 1e6 * (1.0 + 1e-9));
        for x in &ds.examples {
            assert!(model.score(&map.map(x)).abs() < 1e-3);
        }
        let obj = primal_objective(&ds, &map, &model);
        assert!((obj - 1.0).abs() < 1e-3, "objective {obj}");
    }

    #[test]
    fn separable_pair_reaches_zero_error() {
        // d=1, x=±1, y=±1, identity-like map, λ=0.1, 50 epochs.
        let map = identity_map(1);
        let ds = dataset(&[(&[1.0], 1.0), (&[-1.0], -1.0)]);
        let cfg = TrainConfig {
            lambda: 0.1,
            epochs: 50,
            seed: 3,
            project: true,
        };
        let (model, _) = train_pegasos(&ds, &map, &cfg).unwrap();
        assert_eq!(test_error(&ds, &map, &model), 0.0);
        // Oracle optimum for min λ/2 w² + mean hinge over {(±1, ±1)}: both
        // margins are w, so p(w) = 0.05 w² + max(0, 1-w); for w < 1 the
        // slope is 0.1w - 1 < 0 and for w > 1 it is 0.1w > 0, so p* = 0.05
        // at the kink w = 1. Pegasos suboptimality decays like 1/(λT);
        // a longer run must land within 5% of the optimum.
        let long = TrainConfig { epochs: 1000, ..cfg };
        let (model, _) = train_pegasos(&ds, &map, &long).unwrap();
        let obj = primal_objective(&ds, &map, &model);
        assert!((obj - 0.05).abs() <= 0.05 * 0.05, "objective {obj}");
    }

    #[test]
    fn deterministic_given_seed() {
        let map = identity_map(4);
        let ds = dataset(&[
            (&[1.0, 0.2, 0.0, 0.0], 1.0),
            (&[0.0, -0.4, 0.3, 0.0], -1.0),
            (&[0.5, 0.0, 0.0, -0.7], 1.0),
        ]);
        let cfg = TrainConfig {
            lambda: 0.05,
            epochs: 7,
            seed: 11,
            project: true,
        };
        let (a, fa) = train_pegasos(&ds, &map, &cfg).unwrap();
        let (b, fb) = train_pegasos(&ds, &map, &cfg).unwrap();
        assert_eq!(fa, fb);
        assert_eq!(a.weight_entries(), b.weight_entries());
    }

    #[test]
    fn scale_trick_matches_naive_dense() {
        // The (scale, v) representation must reproduce a literal dense
        // implementation to 1e-9 relative, including the projection step.
        let spec = FeatureMapSpec::taylor(6, 1.0, 2);
        let map = FeatureMap::from_spec(&spec).unwrap();
        let mut rng = PortableRng::new(77);
        let mut points = Vec::new();
        for _ in 0..30 {
            let dense: Vec<f64> = (0..6).map(|_| rng.uniform() - 0.5).collect();
            let label = if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
            points.push((dense, label));
        }
        let ds = LabeledDataset {
            examples: points.iter().map(|(x, _)| SparseVector::from_dense(x)).collect(),
            labels: points.iter().map(|&(_, y)| y).collect(),
            dim: 6,
        };
        for project in [true, false] {
            let cfg = TrainConfig {
                lambda: 0.02,
                epochs: 5,
                seed: 123,
                project,
            };
            let (model, _) = train_pegasos(&ds, &map, &cfg).unwrap();
            let naive = naive_dense_train(&ds, &map, &cfg);
            for (rank, wn) in naive.iter().enumerate() {
                let wm = model.weight(rank as u64);
                assert!(
                    (wm - wn).abs() <= 1e-9 * wn.abs().max(1e-6),
                    "project={project} rank {rank}: {wm} vs {wn}"
                );
            }
        }
    }

    #[test]
    fn dense_and_sparse_stores_agree() {
        // The same data embedded in a huge dimension forces the hash-map
        // store; per-monomial weights must match the dense-store run
        // bit-for-bit (identical float operations in identical order).
        let small_spec = FeatureMapSpec::taylor(10, 1.0, 3);
        let big_dim = 3000; // C(3003, 3) ≈ 4.5e9 > dense limit
        let big_spec = FeatureMapSpec::taylor(big_dim, 1.0, 3);
        let small_map = FeatureMap::from_spec(&small_spec).unwrap();
        let big_map = FeatureMap::from_spec(&big_spec).unwrap();
        assert!(big_map.num_features() > DENSE_WEIGHT_LIMIT);

        let mut rng = PortableRng::new(55);
        let mut examples = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..20 {
            let entries: Vec<(usize, f64)> = (0..4).map(|i| (i * 2, rng.uniform() - 0.5)).collect();
            examples.push(SparseVector::new(entries, 10).unwrap());
            labels.push(if rng.uniform() < 0.5 { -1.0 } else { 1.0 });
        }
        let ds_small = LabeledDataset {
            examples: examples.clone(),
            labels: labels.clone(),
            dim: 10,
        };
        let ds_big = LabeledDataset {
            examples: examples
                .iter()
                .map(|x| SparseVector::new(x.entries().to_vec(), big_dim).unwrap())
                .collect(),
            labels,
            dim: big_dim,
        };
        let cfg = TrainConfig {
            lambda: 0.05,
            epochs: 3,
            seed: 9,
            project: true,
        };
        let (small_model, _) = train_pegasos(&ds_small, &small_map, &cfg).unwrap();
        let (big_model, _) = train_pegasos(&ds_big, &big_map, &cfg).unwrap();

        let small_entries = small_model.weight_entries();
        let big_entries = big_model.weight_entries();
        assert_eq!(small_entries.len(), big_entries.len());
        for (&(rs, ws), &(rb, wb)) in small_entries.iter().zip(&big_entries) {
            // Ranks differ between dimensions, but the underlying monomial
            // keys and the float arithmetic are identical.
            let key_small = crate::taylor::monomial_unrank(rs, 10, 3).unwrap();
            let key_big = crate::taylor::monomial_unrank(rb, big_dim, 3).unwrap();
            assert_eq!(key_small, key_big);
            assert_eq!(ws, wb, "weight mismatch on {key_small:?}");
        }
    }

    #[test]
    fn objective_examples() {
        let map = identity_map(2);
        let ds = dataset(&[(&[2.0, 0.0], 1.0), (&[-3.0, 0.0], -1.0)]);
        // w = 0: mean hinge at zero score = 1.
        let zero = LinearModel::zeros(&map, 0.25);
        assert_eq!(primal_objective(&ds, &map, &zero), 1.0);
        // test_error at w=0: everything predicted +1 → fraction of negatives.
        assert_eq!(test_error(&ds, &map, &zero), 0.5);

        // w = (1,1): ‖w‖² = 2, margins 2 and 3 → objective = λ.
        let ranks: Vec<u64> = map
            .map(&SparseVector::from_dense(&[1.0, 1.0]))
            .entries()
            .iter()
            .map(|&(r, _)| r)
            .collect();
        let model =
            LinearModel::with_weights(&map, 0.25, &[(ranks[0], 1.0), (ranks[1], 1.0)]).unwrap();
        assert_eq!(primal_objective(&ds, &map, &model), 0.25);
    }

    #[test]
    fn objective_improves_with_epochs() {
        let map = identity_map(3);
        let mut rng = PortableRng::new(31);
        let mut points = Vec::new();
        for _ in 0..40 {
            let x: Vec<f64> = (0..3).map(|_| rng.uniform() - 0.5).collect();
            let y = if x[0] + 0.5 * x[1] > 0.0 { 1.0 } else { -1.0 };
            points.push((x, y));
        }
        let ds = LabeledDataset {
            examples: points.iter().map(|(x, _)| SparseVector::from_dense(x)).collect(),
            labels: points.iter().map(|&(_, y)| y).collect(),
            dim: 3,
        };
        let short = TrainConfig {
            lambda: 0.01,
            epochs: 1,
            seed: 5,
            project: true,
        };
        let long = TrainConfig {
            epochs: 30,
            ..short.clone()
        };
        let (m1, _) = train_pegasos(&ds, &map, &short).unwrap();
        let (m30, _) = train_pegasos(&ds, &map, &long).unwrap();
        let o1 = primal_objective(&ds, &map, &m1);
        let o30 = primal_objective(&ds, &map, &m30);
        assert!(o30 <= o1 + 0.02, "objective after 30 epochs {o30} vs 1 epoch {o1}");
    }

    #[test]
    fn flops_accumulate_per_visit() {
        let spec = FeatureMapSpec::taylor(5, 1.0, 2);
        let map = FeatureMap::from_spec(&spec).unwrap();
        let ds = dataset(&[(&[1.0, 0.0, 0.5], 1.0), (&[0.0, 2.0, 0.0, 0.0, 1.0], -1.0)]);
        let per_pass: u64 = ds.examples.iter().map(|x| map.map(x).flops()).sum();
        let cfg = TrainConfig {
            lambda: 0.1,
            epochs: 4,
            seed: 2,
            project: true,
        };
        let (_, flops) = train_pegasos(&ds, &map, &cfg).unwrap();
        assert_eq!(flops, per_pass * 4);
    }

    #[test]
    fn touched_ranks_match_map_kind() {
        let ds = dataset(&[(&[0.3, 0.0, -0.4], 1.0), (&[0.0, 0.2, 0.1], -1.0)]);
        let cfg = TrainConfig {
            lambda: 0.1,
            epochs: 1,
            seed: 6,
            project: false,
        };
        // Fourier: every step touches all D ranks.
        let fmap = FeatureMap::from_spec(&FeatureMapSpec::fourier(3, 1.0, 16, 3)).unwrap();
        let (fmodel, _) = train_pegasos(&ds, &fmap, &cfg).unwrap();
        assert_eq!(fmodel.nnz_weights(), 16);
        // Taylor: only monomials over coordinates that appear in the data.
        let tmap = FeatureMap::from_spec(&FeatureMapSpec::taylor(3, 1.0, 2)).unwrap();
        let (tmodel, _) = train_pegasos(&ds, &tmap, &cfg).unwrap();
        let distinct: std::collections::HashSet<u64> = ds
            .examples
            .iter()
            .flat_map(|x| tmap.map(x).entries().iter().map(|&(r, _)| r).collect::<Vec<_>>())
            .collect();
        assert_eq!(tmodel.nnz_weights(), distinct.len());
    }

    #[test]
    fn finalize_folds_scale() {
        let map = identity_map(2);
        let ds = dataset(&[(&[1.0, -1.0], 1.0), (&[-0.5, 0.25], -1.0)]);
        let cfg = TrainConfig {
            lambda: 0.5,
            epochs: 9,
            seed: 14,
            project: true,
        };
        let (mut model, _) = train_pegasos(&ds, &map, &cfg).unwrap();
        let before: Vec<(u64, f64)> = model.weight_entries();
        let norm_before = model.norm_squared();
        model.finalize();
        assert_eq!(model.weight_entries(), before);
        assert!((model.norm_squared() - norm_before).abs() <= 1e-12 * norm_before.max(1e-300));
        assert!(model.norm_squared() <= (1.0 / 0.5) * (1.0 + 1e-9));
    }

    #[test]
    fn invalid_configs_rejected() {
        let map = identity_map(2);
        let ds = dataset(&[(&[1.0], 1.0)]);
        let empty = LabeledDataset {
            examples: vec![],
            labels: vec![],
            dim: 2,
        };
        let ok = TrainConfig {
            lambda: 0.1,
            epochs: 1,
            seed: 0,
            project: true,
        };
        assert!(train_pegasos(&empty, &map, &ok).is_err());
        assert!(train_pegasos(&ds, &map, &TrainConfig { lambda: 0.0, ..ok.clone() }).is_err());
        assert!(train_pegasos(&ds, &map, &TrainConfig { epochs: 0, ..ok.clone() }).is_err());
        assert!(train_pegasos(&ds, &map, &ok).is_ok());
    }

    #[test]
    fn save_load_roundtrip() {
        let spec = FeatureMapSpec::taylor(4, 2.0, 2);
        let map = FeatureMap::from_spec(&spec).unwrap();
        let ds = dataset(&[
            (&[0.5, 0.0, -0.3, 0.0], 1.0),
            (&[0.0, 0.8, 0.0, 0.1], -1.0),
            (&[0.2, -0.2, 0.2, -0.2], 1.0),
        ]);
        let cfg = TrainConfig {
            lambda: 0.04,
            epochs: 12,
            seed: 21,
            project: true,
        };
        let (mut model, _) = train_pegasos(&ds, &map, &cfg).unwrap();
        model.norm_scale = 0.75;

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.txt");
        save_model(&model, &path).unwrap();
        let loaded = load_model(&path).unwrap();

        assert_eq!(loaded.spec(), model.spec());
        assert_eq!(loaded.lambda, model.lambda);
        assert_eq!(loaded.seed, model.seed);
        assert_eq!(loaded.epochs, model.epochs);
        assert_eq!(loaded.norm_scale, model.norm_scale);
        for x in &ds.examples {
            let feats = map.map(x);
            let (a, b) = (model.score(&feats), loaded.score(&feats));
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300), "{a} vs {b}");
        }

        // Round-tripped files are byte-identical (scale folded at save).
        let path2 = dir.path().join("model2.txt");
        save_model(&loaded, &path2).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }

    #[test]
    fn save_load_keeps_the_fourier_sampling_seed() {
        // The spec's `seed` (frequency sampling) and the model's
        // `train_seed` share the file's key=value namespace; a loaded
        // Fourier model must rebuild the exact same frequencies even
        // when the two seeds differ.
        let spec = FeatureMapSpec::fourier(4, 0.7, 16, 99);
        let map = FeatureMap::from_spec(&spec).unwrap();
        let ds = dataset(&[
            (&[0.5, 0.0, -0.3, 0.2], 1.0),
            (&[0.0, 0.8, 0.0, 0.1], -1.0),
            (&[0.2, -0.2, 0.2, -0.2], 1.0),
            (&[-0.4, 0.1, 0.0, 0.3], -1.0),
        ]);
        let cfg = TrainConfig {
            lambda: 0.05,
            epochs: 15,
            seed: 3,
            project: true,
        };
        let (model, _) = train_pegasos(&ds, &map, &cfg).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.txt");
        save_model(&model, &path).unwrap();
        let loaded = load_model(&path).unwrap();

        assert_eq!(loaded.spec(), &spec, "sampling seed must survive the file");
        assert_eq!(loaded.seed, cfg.seed);
        let loaded_map = FeatureMap::from_spec(loaded.spec()).unwrap();
        for x in &ds.examples {
            let (a, b) = (model.score(&map.map(x)), loaded.score(&loaded_map.map(x)));
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300), "{a} vs {b}");
        }
    }

    #[test]
    fn load_rejects_malformed_models() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        std::fs::write(&path, "kind=taylor\ninput_dim=2\nsigma2=1\ndegree=1\nlambda=0.1\nweights=2\n0 1.0\n").unwrap();
        assert!(matches!(load_model(&path), Err(Error::Parse { .. })));
        std::fs::write(&path, "kind=taylor\ninput_dim=2\nsigma2=1\ndegree=1\nweights=0\n").unwrap();
        assert!(load_model(&path).is_err()); // missing lambda
        assert!(load_model(Path::new("/nonexistent/model.txt")).is_err());
    }

    #[test]
    fn pegasos_on_kernel_features_separates_xor() {
        // Sanity: a degree-2 Taylor map makes XOR-labeled data separable.
        let spec = FeatureMapSpec::taylor(2, 1.0, 2);
        let map = FeatureMap::from_spec(&spec).unwrap();
        let ds = dataset(&[
            (&[1.0, 1.0], 1.0),
            (&[-1.0, -1.0], 1.0),
            (&[1.0, -1.0], -1.0),
            (&[-1.0, 1.0], -1.0),
        ]);
        let cfg = TrainConfig {
            lambda: 0.01,
            epochs: 200,
            seed: 8,
            project: true,
        };
        let (model, _) = train_pegasos(&ds, &map, &cfg).unwrap();
        assert_eq!(test_error(&ds, &map, &model), 0.0);
        // And the approximate kernel agrees with the feature inner products
        // the trainer used.
        let k = approx_kernel(&map, &ds.examples[0], &ds.examples[1]);
        assert!(k.is_finite());
    }
}
