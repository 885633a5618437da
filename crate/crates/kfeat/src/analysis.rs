//! Approximation-error measurement, objective-sandwich verification
//! against an exact-kernel solver, and operation-budget curves.
//!
//! The sandwich statement being verified: for a feature map that acts as an
//! orthogonal projection of the Gaussian kernel's feature space (the
//! truncated-series map), the optimum p̃* of the approximate primal
//! satisfies p* ≤ p̃* ≤ p* + (1/(m√λ))·Σ_i √(K(x_i,x_i) − K̃(x_i,x_i)),
//! where p* is the exact-kernel optimum. Both optima are computed by the
//! same dual coordinate-ascent oracle, so the assertion carries only
//! solver tolerance, not SGD noise.

use rayon::prelude::*;

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::features::{exact_gaussian_kernel, FeatureMap, FeatureMapSpec, MapKind, SparseFeatures};
use crate::rng::PortableRng;
use crate::svm::{test_error, train_pegasos, TrainConfig};
use crate::taylor::{count_monomials, MAX_DEGREE};

/// Index pairs drawn uniformly with replacement from a dataset.
#[derive(Debug, Clone)]
pub struct PairSample {
    pub pairs: Vec<(usize, usize)>,
    pub seed: u64,
}

impl PairSample {
    /// Draws `count` pairs over `0..m`, deterministically from `seed`.
    pub fn draw(m: usize, count: usize, seed: u64) -> Result<PairSample> {
        if m == 0 {
            return Err(Error::Config("cannot sample pairs from an empty dataset".to_string()));
        }
        let mut rng = PortableRng::new(seed);
        let pairs = (0..count)
            .map(|_| {
                let i = rng.below(m);
                let j = rng.below(m);
                (i, j)
            })
            .collect();
        Ok(PairSample { pairs, seed })
    }
}

/// Mean |K_target − K̃| over the sampled pairs, where K_target is the
/// kernel the map approximates: the Gaussian kernel at the spec's σ² for
/// Taylor and Fourier maps, the polynomial kernel for polynomial maps
/// (for which the map is exact and the error is float noise).
///
/// Pairs are evaluated in parallel; the mean is summed in sample order.
pub fn avg_kernel_error(ds: &LabeledDataset, map: &FeatureMap, sample: &PairSample) -> Result<f64> {
    if sample.pairs.is_empty() {
        return Err(Error::Config("pair sample is empty".to_string()));
    }
    let m = ds.len();
    if sample.pairs.iter().any(|&(i, j)| i >= m || j >= m) {
        return Err(Error::Config("pair sample indexes outside the dataset".to_string()));
    }
    let spec = map.spec();
    let errors: Vec<f64> = sample
        .pairs
        .par_iter()
        .map(|&(i, j)| {
            let (x, y) = (&ds.examples[i], &ds.examples[j]);
            let target = match spec.kind {
                MapKind::Taylor | MapKind::Fourier => exact_gaussian_kernel(spec.sigma2, x, y),
                MapKind::Polynomial => (x.dot(y) + spec.constant).powi(spec.degree as i32),
            };
            let approx = map.map(x).dot(&map.map(y));
            (target - approx).abs()
        })
        .collect();
    Ok(errors.iter().sum::<f64>() / errors.len() as f64)
}

/// Right-hand side of the objective sandwich:
/// (1/(m√λ))·Σ_i √max(0, K(x_i,x_i) − K̃(x_i,x_i)).
///
/// Diagonal gaps below −1e−8 mean the map is not a projection of the
/// Gaussian feature space (random Fourier features, for instance) and the
/// bound does not apply: [`Error::NotProjection`]. Gaps within −1e−8 of
/// zero are clamped to 0 as float noise.
pub fn theorem1_bound(ds: &LabeledDataset, map: &FeatureMap, lambda: f64) -> Result<f64> {
    if ds.is_empty() {
        return Err(Error::Config("dataset is empty".to_string()));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Config(format!("lambda must be positive, got {lambda}")));
    }
    let spec = map.spec();
    if !(spec.sigma2.is_finite() && spec.sigma2 > 0.0) {
        return Err(Error::Config(
            "the objective sandwich needs a Gaussian-kernel map (positive sigma2)".to_string(),
        ));
    }
    const GAP_NOISE: f64 = 1e-8;
    let mut sum = 0.0;
    for (index, x) in ds.examples.iter().enumerate() {
        let exact = exact_gaussian_kernel(spec.sigma2, x, x);
        let feats = map.map(x);
        let gap = exact - feats.dot(&feats);
        if gap < -GAP_NOISE {
            return Err(Error::NotProjection { index, gap });
        }
        sum += gap.max(0.0).sqrt();
    }
    Ok(sum / (ds.len() as f64 * lambda.sqrt()))
}

/// Result of a sandwich verification.
#[derive(Debug, Clone, Copy)]
pub struct SandwichReport {
    /// Exact-kernel optimum p*.
    pub p_star: f64,
    /// Approximate-map optimum p̃*.
    pub p_tilde_star: f64,
    /// Theorem right-hand side added to p*.
    pub bound: f64,
    /// Whether p* ≤ p̃* ≤ p* + bound within [`SANDWICH_TOL`].
    pub holds: bool,
}

/// Absolute slack allowed in the sandwich comparison (covers both solver
/// tolerances).
pub const SANDWICH_TOL: f64 = 1e-3;

/// Duality-gap target for the oracle, in primal-objective units.
pub const DUAL_GAP_TOL: f64 = 1e-6;

const DUAL_MAX_SWEEPS: usize = 200_000;

/// Dual coordinate-ascent solution over a Gram matrix.
#[derive(Debug, Clone)]
pub struct DualSolution {
    pub alphas: Vec<f64>,
    /// Primal objective λ/2‖w‖² + mean hinge of the weight vector built
    /// from the alphas — an upper bound on the optimum.
    pub primal: f64,
    /// Matching dual objective — a lower bound on the optimum.
    pub dual: f64,
    pub sweeps: usize,
}

/// Solves min_w λ/2‖w‖² + (1/m)Σ hinge over the RKHS of the given Gram
/// matrix, via its box-constrained dual (C = 1/(λm)) by cyclic coordinate
/// ascent: α_i ← clip(α_i + (1 − y_i f_i)/K_ii, 0, C) with f = K(α∘y)
/// maintained incrementally. Stops when the duality gap (in primal units)
/// is at most `gap_tol`.
pub fn solve_dual(
    gram: &[f64],
    labels: &[f64],
    lambda: f64,
    gap_tol: f64,
) -> Result<DualSolution> {
    let m = labels.len();
    assert_eq!(gram.len(), m * m, "gram matrix shape mismatch");
    if m == 0 {
        return Err(Error::Config("empty problem".to_string()));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Config(format!("lambda must be positive, got {lambda}")));
    }
    let c = 1.0 / (lambda * m as f64);
    let mut alphas = vec![0.0f64; m];
    let mut scores = vec![0.0f64; m]; // f_i = Σ_j α_j y_j K_ij

    for sweep in 1..=DUAL_MAX_SWEEPS {
        for i in 0..m {
            let kii = gram[i * m + i];
            if kii <= 0.0 {
                continue;
            }
            let grad = 1.0 - labels[i] * scores[i];
            let next = (alphas[i] + grad / kii).clamp(0.0, c);
            let delta = next - alphas[i];
            if delta != 0.0 {
                alphas[i] = next;
                let dy = delta * labels[i];
                let row = &gram[i * m..(i + 1) * m];
                for (score, &k) in scores.iter_mut().zip(row) {
                    *score += dy * k;
                }
            }
        }

        // Duality gap in primal units: p(w) = λ·P_C(w), D = λ·D_C(α).
        let wnorm2: f64 = alphas
            .iter()
            .zip(labels)
            .zip(&scores)
            .map(|((&a, &y), &f)| a * y * f)
            .sum();
        let hinge: f64 = labels
            .iter()
            .zip(&scores)
            .map(|(&y, &f)| (1.0 - y * f).max(0.0))
            .sum();
        let alpha_sum: f64 = alphas.iter().sum();
        let primal = lambda * (0.5 * wnorm2 + c * hinge);
        let dual = lambda * (alpha_sum - 0.5 * wnorm2);
        if primal - dual <= gap_tol {
            return Ok(DualSolution {
                alphas,
                primal,
                dual,
                sweeps: sweep,
            });
        }
    }

    // Report the residual for diagnostics.
    let wnorm2: f64 = alphas
        .iter()
        .zip(labels)
        .zip(&scores)
        .map(|((&a, &y), &f)| a * y * f)
        .sum();
    let hinge: f64 = labels
        .iter()
        .zip(&scores)
        .map(|(&y, &f)| (1.0 - y * f).max(0.0))
        .sum();
    let alpha_sum: f64 = alphas.iter().sum();
    let gap = lambda * (0.5 * wnorm2 + c * hinge) - lambda * (alpha_sum - 0.5 * wnorm2);
    Err(Error::Solver(format!(
        "dual coordinate ascent did not reach gap {gap_tol:e} in {DUAL_MAX_SWEEPS} sweeps \
         (residual gap {gap:e}, m={m}, lambda={lambda})"
    )))
}

/// Oracle feasibility cap for the exact-kernel solver.
pub const ORACLE_MAX_EXAMPLES: usize = 200;

/// Solves the SVM with the exact Gaussian kernel on a small dataset,
/// returning the dual variables and the primal optimum p* (to within
/// [`DUAL_GAP_TOL`]).
pub fn exact_kernel_svm(
    ds: &LabeledDataset,
    sigma2: f64,
    lambda: f64,
) -> Result<(Vec<f64>, f64)> {
    let m = ds.len();
    if m == 0 {
        return Err(Error::Config("dataset is empty".to_string()));
    }
    if m > ORACLE_MAX_EXAMPLES {
        return Err(Error::Config(format!(
            "exact-kernel oracle is limited to {ORACLE_MAX_EXAMPLES} examples, got {m}"
        )));
    }
    let gram: Vec<f64> = (0..m * m)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / m, idx % m);
            exact_gaussian_kernel(sigma2, &ds.examples[i], &ds.examples[j])
        })
        .collect();
    let solution = solve_dual(&gram, &ds.labels, lambda, DUAL_GAP_TOL)?;
    Ok((solution.alphas, solution.primal))
}

/// Verifies the objective sandwich on a small dataset: solves the exact
/// and approximate problems with the dual oracle (the approximate Gram is
/// computed from explicit features) and compares against the bound.
pub fn verify_sandwich(
    ds: &LabeledDataset,
    spec: &FeatureMapSpec,
    lambda: f64,
) -> Result<SandwichReport> {
    let m = ds.len();
    if m == 0 {
        return Err(Error::Config("dataset is empty".to_string()));
    }
    if m > ORACLE_MAX_EXAMPLES {
        return Err(Error::Config(format!(
            "sandwich verification is limited to {ORACLE_MAX_EXAMPLES} examples, got {m}"
        )));
    }
    let map = FeatureMap::from_spec(spec)?;
    let bound = theorem1_bound(ds, &map, lambda)?;

    let (_, p_star) = exact_kernel_svm(ds, spec.sigma2, lambda)?;

    let feats: Vec<SparseFeatures> = ds.examples.par_iter().map(|x| map.map(x)).collect();
    let gram_tilde: Vec<f64> = (0..m * m)
        .into_par_iter()
        .map(|idx| feats[idx / m].dot(&feats[idx % m]))
        .collect();
    let tilde = solve_dual(&gram_tilde, &ds.labels, lambda, DUAL_GAP_TOL)?;
    let p_tilde_star = tilde.primal;

    let holds = p_star <= p_tilde_star + SANDWICH_TOL
        && p_tilde_star <= p_star + bound + SANDWICH_TOL;
    Ok(SandwichReport {
        p_star,
        p_tilde_star,
        bound,
        holds,
    })
}

/// Largest truncation degree whose feature count over `avg_nnz` active
/// coordinates fits the flop budget: max r with C(avg_nnz+r, r) ≤ budget,
/// capped at the map's supported maximum.
pub fn taylor_degree_for_budget(avg_nnz: usize, budget: u64) -> u32 {
    let mut r = 0u32;
    while r < MAX_DEGREE {
        match count_monomials(avg_nnz, r + 1) {
            Some(count) if count <= budget => r += 1,
            _ => break,
        }
    }
    r
}

/// Fourier feature count for a flop budget: floor(budget / avg_nnz).
pub fn fourier_features_for_budget(avg_nnz: f64, budget: u64) -> u64 {
    assert!(avg_nnz > 0.0);
    (budget as f64 / avg_nnz).floor() as u64
}

/// One point of a budget curve.
#[derive(Debug, Clone)]
pub struct BudgetPoint {
    pub kind: MapKind,
    pub budget: u64,
    /// Taylor degree r or Fourier feature count D chosen for the budget.
    pub param: u64,
    /// Mean |K − K̃| over the pair sample.
    pub avg_err: f64,
    /// Primal objective of the trained model on the training set.
    pub objective: f64,
    /// Test error on the held-out set (training set when none is given).
    pub test_err: f64,
    /// Mean feature-map flops per example, measured during training.
    pub mean_flops: f64,
}

/// Experiment parameters for [`budget_curve`].
#[derive(Debug, Clone)]
pub struct BudgetCurveConfig {
    /// Gaussian bandwidth σ² shared by both map kinds.
    pub sigma2: f64,
    pub train: TrainConfig,
    /// Number of kernel pairs for the error estimate.
    pub pair_count: usize,
    pub pair_seed: u64,
    /// Seed for Fourier frequency sampling.
    pub map_seed: u64,
}

/// Sweeps operation budgets for Gaussian-kernel approximations: for each
/// budget B, the Taylor map gets degree r = max{r : C(d̃+r, r) ≤ B} (d̃ =
/// mean nonzeros, rounded) and the Fourier map gets D = floor(B/d̃)
/// features (a budget too small for a single feature skips the point).
/// Each point trains a model and reports approximation error, objective,
/// test error, and measured mean flops per example.
pub fn budget_curve(
    train_ds: &LabeledDataset,
    test_ds: Option<&LabeledDataset>,
    kinds: &[MapKind],
    budgets: &[u64],
    cfg: &BudgetCurveConfig,
) -> Result<Vec<BudgetPoint>> {
    if train_ds.is_empty() {
        return Err(Error::Config("dataset is empty".to_string()));
    }
    if budgets.iter().any(|&b| b == 0) {
        return Err(Error::Config("budgets must be positive".to_string()));
    }
    if !budgets.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Config("budgets must be strictly ascending".to_string()));
    }
    let stats = crate::data::dataset_stats(train_ds)?;
    if stats.avg_nnz <= 0.0 {
        return Err(Error::Config("dataset has no nonzero entries".to_string()));
    }
    let d_tilde_rounded = stats.avg_nnz.round().max(1.0) as usize;
    let sample = PairSample::draw(train_ds.len(), cfg.pair_count, cfg.pair_seed)?;

    let mut out = Vec::new();
    for &budget in budgets {
        for &kind in kinds {
            let spec = match kind {
                MapKind::Taylor => {
                    let degree = taylor_degree_for_budget(d_tilde_rounded, budget);
                    FeatureMapSpec::taylor(train_ds.dim, cfg.sigma2, degree)
                }
                MapKind::Fourier => {
                    let count = fourier_features_for_budget(stats.avg_nnz, budget);
                    if count == 0 {
                        continue;
                    }
                    FeatureMapSpec::fourier(train_ds.dim, cfg.sigma2, count, cfg.map_seed)
                }
                MapKind::Polynomial => {
                    return Err(Error::Config(
                        "budget curves compare Gaussian-kernel approximations (taylor, fourier)"
                            .to_string(),
                    ));
                }
            };
            let map = FeatureMap::from_spec(&spec)?;
            let avg_err = avg_kernel_error(train_ds, &map, &sample)?;
            let (model, flops) = train_pegasos(train_ds, &map, &cfg.train)?;
            let objective = crate::svm::primal_objective(train_ds, &map, &model);
            let eval_ds = test_ds.unwrap_or(train_ds);
            let test_err = test_error(eval_ds, &map, &model);
            let visits = train_ds.len() as u64 * cfg.train.epochs as u64;
            out.push(BudgetPoint {
                kind,
                budget,
                param: match kind {
                    MapKind::Taylor => spec.degree as u64,
                    _ => spec.num_features,
                },
                avg_err,
                objective,
                test_err,
                mean_flops: flops as f64 / visits as f64,
            });
        }
    }
    Ok(out)
}
