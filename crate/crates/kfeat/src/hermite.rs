//! Numerical verification of the Hermite-function eigen-expansion of the
//! 1-D Gaussian kernel e^{−(x−y)²/2}.
//!
//! The chain being verified: the symmetrically weighted kernel
//! f(x,y) = e^{−x²/(2√3)}·e^{−(x−y)²/(2√3)}·e^{−y²/(2√3)} has the
//! orthonormal Hermite functions ψ_k as eigenfunctions with positive,
//! geometrically decaying eigenvalues c_k; unwinding the weights gives the
//! explicit expansion e^{−(x−y)²/2} = Σ_k c_k·φ̂_k(x)·φ̂_k(y) with
//! φ̂_k(x) = e^{x²/2}·ψ_k(∜3·x), whose features are orthogonal in
//! expectation under x ~ N(0, ½) — the kernel-PCA view — and whose
//! truncation to an index set S leaves expected diagonal error
//! 1 − (π√3)^{−d/2}·Σ_{k∈S}Π_i c_{k_i}.
//!
//! σ is fixed at 1 throughout; a general bandwidth is handled by rescaling
//! inputs x → x/σ before calling in.
//!
//! All integrals use Gauss–Hermite quadrature with the e^{−x²} weight
//! folded into the node weights, so routines integrate plain functions
//! over ℝ. Every quantity here is also known in closed form (the weighted
//! kernel is a Mehler kernel), which the tests use as an independent
//! oracle.

use gauss_quad::hermite::GaussHermite;

use crate::error::{Error, Result};
use crate::rng::PortableRng;

/// Hardest index the stabilized recurrence is rated for.
pub const PSI_MAX_K: usize = 60;

/// Default quadrature order.
pub const DEFAULT_ORDER: usize = 120;

/// Default highest eigenvalue index.
pub const DEFAULT_MAX_K: usize = 40;

/// Orthonormal Hermite function ψ_k(x) = (2^k·k!·√π)^{−1/2}e^{−x²/2}H_k(x),
/// evaluated through the normalized three-term recurrence
/// ψ_{k+1} = √(2/(k+1))·x·ψ_k − √(k/(k+1))·ψ_{k−1}
/// (never through raw H_k, whose values overflow long before k = 60).
pub fn hermite_psi(k: usize, x: f64) -> Result<f64> {
    if k > PSI_MAX_K {
        return Err(Error::Config(format!(
            "hermite function index {k} exceeds the supported maximum {PSI_MAX_K}"
        )));
    }
    Ok(psi_table(k, x)[k])
}

/// ψ_0..ψ_max_k at one point, by the normalized recurrence. Internal
/// callers may exceed the public cap (the recurrence itself is stable at
/// any index; the cap is a documented service level, not a hard limit).
fn psi_table(max_k: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_k + 1);
    let psi0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(psi0);
    if max_k == 0 {
        return out;
    }
    out.push(2.0f64.sqrt() * x * psi0);
    for k in 1..max_k {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// (ψ_{n−1}(x), ψ_n(x)) without materializing the whole table.
fn psi_top_pair(n: usize, x: f64) -> (f64, f64) {
    debug_assert!(n >= 1);
    let mut prev = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    let mut cur = 2.0f64.sqrt() * x * prev;
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (prev, cur)
}

/// φ̂_0..φ̂_max_k at one point, where φ̂_k(x) = e^{x²/2}·ψ_k(∜3·x).
///
/// Computed fused: the k = 0 seed is π^{−1/4}·e^{(1−√3)x²/2} — a decaying
/// Gaussian, since √3 > 1 — and the scaling propagates through the linear
/// recurrence, so neither factor of the product is ever formed alone.
pub fn scaled_psi_table(max_k: usize, x: f64) -> Vec<f64> {
    assert!(max_k <= PSI_MAX_K, "index beyond the recurrence cap");
    let t = 3.0f64.powf(0.25) * x;
    let mut out = Vec::with_capacity(max_k + 1);
    let seed = std::f64::consts::PI.powf(-0.25) * (0.5 * (1.0 - 3.0f64.sqrt()) * x * x).exp();
    out.push(seed);
    if max_k == 0 {
        return out;
    }
    out.push(2.0f64.sqrt() * t * seed);
    for k in 1..max_k {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * t * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// The symmetrically weighted kernel whose eigenfunctions are the ψ_k:
/// f(x,y) = e^{−x²/(2√3)}·e^{−(x−y)²/(2√3)}·e^{−y²/(2√3)}.
pub fn weighted_kernel(x: f64, y: f64) -> f64 {
    let s = 2.0 * 3.0f64.sqrt();
    (-(x * x) / s - (x - y) * (x - y) / s - (y * y) / s).exp()
}

/// Gauss–Hermite quadrature table with the e^{−x²} weight folded into the
/// node weights, so [`HermiteBasis::integrate`] handles plain integrals
/// over ℝ.
#[derive(Debug, Clone)]
pub struct HermiteBasis {
    max_k: usize,
    order: usize,
    nodes: Vec<f64>,
    folded_weights: Vec<f64>,
}

impl HermiteBasis {
    /// Builds an order-`order` rule rated for indices up to `max_k`.
    /// The order must be at least 2·max_k + 20 so products ψ_j·ψ_k stay
    /// deep inside the rule's polynomial-exactness range.
    pub fn new(order: usize, max_k: usize) -> Result<HermiteBasis> {
        if max_k > PSI_MAX_K {
            return Err(Error::Config(format!(
                "max_k {max_k} exceeds the supported maximum {PSI_MAX_K}"
            )));
        }
        if order < 2 * max_k + 20 {
            return Err(Error::Config(format!(
                "quadrature order {order} is too low for max_k {max_k}; need at least {}",
                2 * max_k + 20
            )));
        }
        let rule = GaussHermite::new(order)
            .map_err(|e| Error::Config(format!("quadrature construction failed: {e}")))?;
        // The eigenvalue nodes are well conditioned, but the matching
        // eigenvector-derived weights underflow to noise at extreme nodes
        // (the true values fall below eps² of the eigenvector norm), and
        // folding by e^{x²} amplifies that noise astronomically. So keep
        // only the nodes, polish each with Newton on ψ_order — using
        // ψ'_n(x) = √(2n)·ψ_{n−1}(x) − x·ψ_n(x) — and take the folded
        // weights from the closed form w·e^{x²} = 1/(n·ψ_{n−1}(x_i)²),
        // which divides quantities of comfortable magnitude throughout.
        let mut nodes: Vec<f64> = rule.as_node_weight_pairs().iter().map(|&(x, _)| x).collect();
        nodes.sort_by(f64::total_cmp);
        let n = order as f64;
        for x in &mut nodes {
            for _ in 0..4 {
                let (below, top) = psi_top_pair(order, *x);
                let deriv = (2.0 * n).sqrt() * below - *x * top;
                let step = top / deriv;
                *x -= step;
                if step.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
        }
        let folded_weights: Vec<f64> = nodes
            .iter()
            .map(|&x| (n * psi_top_pair(order, x).0.powi(2)).recip())
            .collect();
        Ok(HermiteBasis {
            max_k,
            order,
            nodes,
            folded_weights,
        })
    }

    /// The order-120, max_k-40 table used everywhere by default.
    pub fn with_defaults() -> Result<HermiteBasis> {
        HermiteBasis::new(DEFAULT_ORDER, DEFAULT_MAX_K)
    }

    pub fn max_k(&self) -> usize {
        self.max_k
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// ∫g(x)dx over ℝ.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.folded_weights)
            .map(|(&x, &w)| w * g(x))
            .sum()
    }

    /// ψ_j·ψ_k inner product under the quadrature.
    pub fn psi_inner(&self, j: usize, k: usize) -> f64 {
        assert!(j <= self.max_k && k <= self.max_k, "index beyond max_k");
        let hi = j.max(k);
        self.nodes
            .iter()
            .zip(&self.folded_weights)
            .map(|(&x, &w)| {
                let psi = psi_table(hi, x);
                w * psi[j] * psi[k]
            })
            .sum()
    }

    /// max_{j,k ≤ upto} |∫ψ_jψ_k − δ_jk|.
    pub fn orthonormality_defect(&self, upto: usize) -> f64 {
        assert!(upto <= self.max_k, "index beyond max_k");
        let tables: Vec<Vec<f64>> = self.nodes.iter().map(|&x| psi_table(upto, x)).collect();
        let mut worst = 0.0f64;
        for j in 0..=upto {
            for k in j..=upto {
                let inner: f64 = tables
                    .iter()
                    .zip(&self.folded_weights)
                    .map(|(psi, &w)| w * psi[j] * psi[k])
                    .sum();
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((inner - target).abs());
            }
        }
        worst
    }
}

/// Eigenvalues of the weighted kernel, indices 0..=max_k.
#[derive(Debug, Clone)]
pub struct EigenCoefficients {
    pub c: Vec<f64>,
}

impl EigenCoefficients {
    pub fn max_k(&self) -> usize {
        self.c.len() - 1
    }
}

/// Computes every c_k = ∫∫f(x,y)ψ_k(x)ψ_k(y)dxdy, k ≤ max_k, by
/// tensor-product quadrature.
///
/// The double sum has an absolute double-precision floor around 1e−15;
/// since c_k decays like 0.268^k, values past k ≈ 25 are below it and
/// carry no significant digits (they may even come out negative). Checks
/// that depend on the sign or relative accuracy of c_k are therefore
/// scoped to the indices above the floor.
pub fn compute_c(basis: &HermiteBasis) -> EigenCoefficients {
    let n = basis.nodes.len();
    let tables: Vec<Vec<f64>> = basis
        .nodes
        .iter()
        .map(|&x| psi_table(basis.max_k, x))
        .collect();
    let kernel: Vec<f64> = (0..n * n)
        .map(|idx| weighted_kernel(basis.nodes[idx / n], basis.nodes[idx % n]))
        .collect();
    let c = (0..=basis.max_k)
        .map(|k| {
            let mut total = 0.0;
            for a in 0..n {
                let mut row = 0.0;
                for b in 0..n {
                    row += basis.folded_weights[b] * kernel[a * n + b] * tables[b][k];
                }
                total += basis.folded_weights[a] * tables[a][k] * row;
            }
            total
        })
        .collect();
    EigenCoefficients { c }
}

/// Σ_{k≤trunc} c_k·φ̂_k(x)·φ̂_k(y) — the truncated expansion of
/// e^{−(x−y)²/2}.
///
/// Rated for |x|, |y| ≤ 2 and trunc ≤ max_k.
pub fn reconstruct_kernel(coeffs: &EigenCoefficients, x: f64, y: f64, trunc: usize) -> f64 {
    assert!(trunc <= coeffs.max_k(), "truncation beyond max_k");
    debug_assert!(x.abs() <= 2.0 && y.abs() <= 2.0, "outside the rated domain");
    let fx = scaled_psi_table(trunc, x);
    let fy = scaled_psi_table(trunc, y);
    (0..=trunc).map(|k| coeffs.c[k] * fx[k] * fy[k]).sum()
}

/// E_x[φ_j(x)·φ_k(x)] under x ~ N(0, ½), with φ_k = √c_k·φ̂_k, computed by
/// quadrature against the Gaussian density. Equals δ_jk·(π√3)^{−1/2}·c_k.
///
/// Requires c_j, c_k > 0 (√c is taken); see [`compute_c`] on the noise
/// floor past k ≈ 25.
pub fn kpca_orthogonality(
    basis: &HermiteBasis,
    coeffs: &EigenCoefficients,
    j: usize,
    k: usize,
) -> f64 {
    assert!(j <= coeffs.max_k() && k <= coeffs.max_k(), "index beyond max_k");
    let (cj, ck) = (coeffs.c[j], coeffs.c[k]);
    assert!(
        cj > 0.0 && ck > 0.0,
        "feature scaling needs positive eigenvalues; c_{j} = {cj:e}, c_{k} = {ck:e}"
    );
    let scale = (cj * ck).sqrt();
    let density_norm = std::f64::consts::PI.sqrt().recip();
    let hi = j.max(k);
    basis.integrate(|x| {
        let f = scaled_psi_table(hi, x);
        density_norm * (-x * x).exp() * scale * f[j] * f[k]
    })
}

/// Expected diagonal truncation error of a d-dimensional tensor feature
/// set: 1 − (π√3)^{−d/2}·Σ_{k∈selected}Π_i c_{k_i}, for inputs with
/// N(0, ½) coordinates.
pub fn expected_truncation_error(
    coeffs: &EigenCoefficients,
    selected: &[Vec<usize>],
    d: usize,
) -> f64 {
    assert!(d > 0, "dimension must be positive");
    let norm = (std::f64::consts::PI * 3.0f64.sqrt()).powf(-(d as f64) / 2.0);
    let sum: f64 = selected
        .iter()
        .map(|tuple| {
            assert_eq!(tuple.len(), d, "index tuple of wrong dimension");
            tuple
                .iter()
                .map(|&k| {
                    assert!(k <= coeffs.max_k(), "index beyond max_k");
                    coeffs.c[k]
                })
                .product::<f64>()
        })
        .sum();
    1.0 - norm * sum
}

/// Monte-Carlo estimate of E_x[K(x,x) − K̃_trunc(x,x)] over x ~ N(0, ½),
/// where K̃ keeps 1-D features 0..=trunc — the quantity
/// [`expected_truncation_error`] computes in closed form for d = 1.
pub fn monte_carlo_diagonal_gap(
    coeffs: &EigenCoefficients,
    trunc: usize,
    samples: usize,
    seed: u64,
) -> f64 {
    assert!(trunc <= coeffs.max_k(), "truncation beyond max_k");
    assert!(samples > 0);
    let std = 0.5f64.sqrt();
    let mut rng = PortableRng::new(seed);
    let mut total = 0.0;
    for _ in 0..samples {
        let x = std * rng.gaussian();
        let f = scaled_psi_table(trunc, x);
        let diag: f64 = (0..=trunc).map(|k| coeffs.c[k] * f[k] * f[k]).sum();
        total += 1.0 - diag;
    }
    total / samples as f64
}

/// Relative eigen-residual ‖F·Ψ_k − c_k·Ψ_k‖₂ / (c_k·‖Ψ_k‖₂) of the
/// symmetrically discretized kernel operator, where
/// F_ab = √(w_a·w_b)·f(x_a, x_b) and Ψ_k(a) = √(w_a)·ψ_k(x_a) over the
/// folded quadrature weights. The symmetric √w split makes the discrete
/// matrix inherit the integral operator's eigen-relation through the
/// quadrature.
pub fn eigen_residual(basis: &HermiteBasis, coeffs: &EigenCoefficients, k: usize) -> f64 {
    assert!(k <= coeffs.max_k(), "index beyond max_k");
    let n = basis.nodes.len();
    let sqrt_w: Vec<f64> = basis.folded_weights.iter().map(|w| w.sqrt()).collect();
    let psi_k: Vec<f64> = basis
        .nodes
        .iter()
        .zip(&sqrt_w)
        .map(|(&x, &sw)| sw * psi_table(k, x)[k])
        .collect();
    let mut resid2 = 0.0;
    let mut norm2 = 0.0;
    for a in 0..n {
        let mut row = 0.0;
        for b in 0..n {
            row += sqrt_w[a]
                * sqrt_w[b]
                * weighted_kernel(basis.nodes[a], basis.nodes[b])
                * psi_k[b];
        }
        let r = row - coeffs.c[k] * psi_k[a];
        resid2 += r * r;
        norm2 += psi_k[a] * psi_k[a];
    }
    (resid2 / norm2).sqrt() / coeffs.c[k]
}

/// One row of the verification table printed by the CLI.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Flagged observations (the decay-shape checks) are reported but do
    /// not fail the run.
    pub blocking: bool,
    pub detail: String,
}

/// Runs the whole verification chain and returns one row per property.
pub fn run_verification(basis: &HermiteBasis) -> Vec<CheckResult> {
    let coeffs = compute_c(basis);
    let mut rows = Vec::new();

    let defect = basis.orthonormality_defect(30.min(basis.max_k()));
    rows.push(CheckResult {
        name: "orthonormality of psi_k under quadrature (k <= 30)",
        passed: defect <= 1e-8,
        blocking: true,
        detail: format!("max |<psi_j, psi_k> - delta_jk| = {defect:.3e} (tol 1e-8)"),
    });

    let psi3 = (basis.psi_inner(3, 3) - 1.0).abs();
    rows.push(CheckResult {
        name: "psi_3 unit norm under quadrature",
        passed: psi3 <= 1e-10,
        blocking: true,
        detail: format!("|<psi_3, psi_3> - 1| = {psi3:.3e} (tol 1e-10)"),
    });

    const POSITIVE_RANGE: usize = 25;
    let upto = POSITIVE_RANGE.min(coeffs.max_k());
    let min_c = coeffs.c[..=upto].iter().cloned().fold(f64::INFINITY, f64::min);
    rows.push(CheckResult {
        name: "eigenvalues positive above the double-precision floor (k <= 25)",
        passed: min_c > 0.0,
        blocking: true,
        detail: format!("min c_k = {min_c:.3e}; beyond k = 25 the values sit below the 1e-15 quadrature noise floor and are excluded"),
    });

    let ratios: Vec<f64> = (10..=20.min(coeffs.max_k()))
        .map(|k| coeffs.c[k] / coeffs.c[k - 1])
        .collect();
    let rmin = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let rmax = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ratio_ok = rmin > 0.0 && rmax < 1.0 && (rmax - rmin) <= 0.1 * rmax;
    rows.push(CheckResult {
        name: "geometric eigenvalue decay (flagged observation)",
        passed: ratio_ok,
        blocking: false,
        detail: format!("c_k/c_(k-1) in [{rmin:.6}, {rmax:.6}] for k in 10..=20 (constant within 10%)"),
    });

    let decreasing = coeffs.c[..=22.min(coeffs.max_k())]
        .windows(2)
        .all(|w| w[1] < w[0]);
    rows.push(CheckResult {
        name: "strict eigenvalue decrease (flagged observation, k <= 22)",
        passed: decreasing,
        blocking: false,
        detail: "checked above the noise floor only".to_string(),
    });

    let trunc = coeffs.max_k();
    let at_origin = (reconstruct_kernel(&coeffs, 0.0, 0.0, trunc) - 1.0).abs();
    let at_pair = (reconstruct_kernel(&coeffs, 1.0, -1.0, trunc) - (-2.0f64).exp()).abs();
    rows.push(CheckResult {
        name: "kernel reconstruction from the expansion",
        passed: at_origin <= 1e-8 && at_pair <= 1e-6,
        blocking: true,
        detail: format!(
            "|K~(0,0) - 1| = {at_origin:.3e} (tol 1e-8); |K~(1,-1) - e^-2| = {at_pair:.3e} (tol 1e-6)"
        ),
    });

    let exact_half = (-0.5f64).exp();
    let errs: Vec<f64> = (0..=16)
        .map(|k| (reconstruct_kernel(&coeffs, 0.5, -0.5, k) - exact_half).abs())
        .collect();
    // Terms alternate in sign at mirrored arguments, so the pointwise
    // error oscillates; its two-term envelope is the monotone quantity.
    let envelope: Vec<f64> = errs.windows(2).map(|w| w[0].max(w[1])).collect();
    let monotone = envelope.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9))
        && errs[15] < errs[0] * 1e-6;
    rows.push(CheckResult {
        name: "reconstruction error envelope shrinks with the truncation index",
        passed: monotone,
        blocking: true,
        detail: format!("error at (0.5,-0.5): {:.3e} (K=0) -> {:.3e} (K=15)", errs[0], errs[15]),
    });

    const KPCA_RANGE: usize = 16;
    let target_norm = (std::f64::consts::PI * 3.0f64.sqrt()).sqrt().recip();
    let mut off_worst = 0.0f64;
    let mut diag_worst = 0.0f64;
    for j in 0..=KPCA_RANGE.min(coeffs.max_k()) {
        for k in j..=KPCA_RANGE.min(coeffs.max_k()) {
            let value = kpca_orthogonality(basis, &coeffs, j, k);
            if j == k {
                let target = target_norm * coeffs.c[k];
                diag_worst = diag_worst.max(((value - target) / target).abs());
            } else {
                off_worst = off_worst.max(value.abs());
            }
        }
    }
    rows.push(CheckResult {
        name: "kernel-PCA feature orthogonality in expectation (j,k <= 16)",
        passed: off_worst <= 1e-8 && diag_worst <= 1e-6,
        blocking: true,
        detail: format!(
            "max off-diagonal |E[phi_j phi_k]| = {off_worst:.3e} (tol 1e-8); max diagonal relative error = {diag_worst:.3e} (tol 1e-6)"
        ),
    });

    let resid_worst = (0..=10.min(coeffs.max_k()))
        .map(|k| eigen_residual(basis, &coeffs, k))
        .fold(0.0f64, f64::max);
    rows.push(CheckResult {
        name: "discretized operator has psi_k as eigenvectors (k <= 10)",
        passed: resid_worst <= 1e-6,
        blocking: true,
        detail: format!("max relative residual = {resid_worst:.3e} (tol 1e-6)"),
    });

    let mut rng = PortableRng::new(2024);
    let mut tensor_worst = 0.0f64;
    for _ in 0..20 {
        let p: Vec<f64> = (0..4).map(|_| 4.0 * rng.uniform() - 2.0).collect();
        let exact =
            (-((p[0] - p[2]).powi(2) + (p[1] - p[3]).powi(2)) / 2.0).exp();
        let recon = reconstruct_kernel(&coeffs, p[0], p[2], trunc)
            * reconstruct_kernel(&coeffs, p[1], p[3], trunc);
        tensor_worst = tensor_worst.max((recon - exact).abs());
    }
    rows.push(CheckResult {
        name: "2-D kernel matches tensor-product reconstruction",
        passed: tensor_worst <= 1e-5,
        blocking: true,
        detail: format!("max |K - K~| over 20 points = {tensor_worst:.3e} (tol 1e-5)"),
    });

    let empty = expected_truncation_error(&coeffs, &[], 1);
    let full: Vec<Vec<usize>> = (0..=trunc).map(|k| vec![k]).collect();
    let sweep_decreasing = (0..=trunc)
        .map(|upper| expected_truncation_error(&coeffs, &full[..=upper], 1))
        .collect::<Vec<f64>>()
        .windows(2)
        .all(|w| w[1] <= w[0]);
    let formula = expected_truncation_error(&coeffs, &full, 1);
    let mc = monte_carlo_diagonal_gap(&coeffs, trunc, 1_000_000, 9001);
    let mc_gap = (formula - mc).abs();
    rows.push(CheckResult {
        name: "expected diagonal truncation error",
        passed: (empty - 1.0).abs() < 1e-15 && sweep_decreasing && mc_gap <= 1e-5,
        blocking: true,
        detail: format!(
            "empty set -> {empty}; full-set value {formula:.3e} vs Monte Carlo {mc:.3e} over 1e6 samples (tol 1e-5)"
        ),
    });

    rows
}
