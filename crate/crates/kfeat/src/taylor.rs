//! Truncated-series explicit feature map of the Gaussian kernel.
//!
//! The degree-≤r feature space collects monomials over input coordinates:
//! the feature for the multiset with multiplicities (m_i), Σm_i = k, has
//! value e^{−‖x‖²/(2σ²)} · σ^{−k} · (Π x_i^{m_i}) / √(Π m_i!), so the inner
//! product of two mapped vectors reproduces the degree-≤r truncation of the
//! kernel's series expansion. Only monomials over x's nonzero coordinates
//! are emitted — C(nnz+r, r) of them — and each costs O(1) via a parent →
//! child recurrence.
//!
//! Ranking is graded: all degree-k monomials precede degree-(k+1); within a
//! degree, monomials sort colexicographically on the strictly increasing
//! transform i_t = j_t + (t−1), giving the rank formula
//! rank = C(d+k−1, k−1) + Σ_t C(j_t + t − 1, t).

use crate::data::SparseVector;
use crate::error::{Error, Result};
use crate::features::{FeatureMapSpec, MapKind, SparseFeatures};

/// Largest supported truncation degree; keeps per-degree scale factors
/// comfortably inside double range.
pub const MAX_DEGREE: u32 = 32;

/// Exact binomial coefficient, or `None` if it does not fit in a `u64`.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // Each prefix is the exact integer C(n-k+i, i), so the division
        // is exact and the running value fits in u128 while acc ≤ u64::MAX.
        acc = acc * (n - k + i) as u128 / i as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Number of monomials over `dim` coordinates with degree ≤ `degree`:
/// C(dim+degree, degree). `None` on u64 overflow.
pub fn count_monomials(dim: usize, degree: u32) -> Option<u64> {
    let n = (dim as u64).checked_add(degree as u64)?;
    binomial(n, degree as u64)
}

/// Number of monomials with degree strictly below `degree`: C(dim+degree−1,
/// degree−1). This is the rank offset of the first degree-`degree` monomial.
fn degree_offset(dim: usize, degree: u32) -> Option<u64> {
    if degree == 0 {
        return Some(0);
    }
    let n = (dim as u64).checked_add(degree as u64 - 1)?;
    binomial(n, degree as u64 - 1)
}

/// A monomial as a sorted multiset of 0-based coordinate indices; the empty
/// multiset is the degree-0 (constant) monomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialKey {
    indices: Vec<usize>,
}

impl MonomialKey {
    /// Canonicalizes by sorting.
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        MonomialKey { indices }
    }

    pub fn degree(&self) -> u32 {
        self.indices.len() as u32
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }
}

/// Graded-colex rank of a monomial over `dim` coordinates.
pub fn monomial_rank(key: &MonomialKey, dim: usize) -> Result<u64> {
    let k = key.indices.len();
    if let Some(&max) = key.indices.last() {
        if max >= dim {
            return Err(Error::Config(format!(
                "monomial index {max} out of range for dimension {dim}"
            )));
        }
    }
    let overflow = || Error::Config("monomial rank overflows u64".to_string());
    let mut rank = degree_offset(dim, k as u32).ok_or_else(overflow)?;
    for (t, &j) in key.indices.iter().enumerate() {
        // t is 0-based here; the transform is i = j + t, choose t+1.
        let term = binomial((j + t) as u64, (t + 1) as u64).ok_or_else(overflow)?;
        rank = rank.checked_add(term).ok_or_else(overflow)?;
    }
    Ok(rank)
}

/// Inverse of [`monomial_rank`] over the degree-≤`max_degree` space.
pub fn monomial_unrank(rank: u64, dim: usize, max_degree: u32) -> Result<MonomialKey> {
    let overflow = || Error::Config("monomial space overflows u64".to_string());
    // Locate the degree layer.
    let mut cumulative = 0u64;
    let mut degree = None;
    for k in 0..=max_degree {
        let layer = binomial((dim as u64 + k as u64).saturating_sub(1), k as u64)
            .ok_or_else(overflow)?;
        if rank < cumulative + layer {
            degree = Some(k);
            break;
        }
        cumulative += layer;
    }
    let k = degree.ok_or_else(|| {
        Error::Config(format!(
            "rank {rank} out of range for dim {dim}, max degree {max_degree}"
        ))
    })? as usize;

    // Combinadic decode of the within-layer colex rank.
    let mut rem = rank - cumulative;
    let mut indices = vec![0usize; k];
    for t in (1..=k).rev() {
        // Largest i with C(i, t) ≤ rem; i ranges over [t-1, dim+t-2].
        let (mut lo, mut hi) = ((t - 1) as u64, (dim + t - 2) as u64);
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            if binomial(mid, t as u64).ok_or_else(overflow)? <= rem {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        rem -= binomial(lo, t as u64).ok_or_else(overflow)?;
        indices[t - 1] = (lo - (t as u64 - 1)) as usize;
    }
    debug_assert_eq!(rem, 0);
    Ok(MonomialKey { indices })
}

/// Enumerates all monomials of degree ≤ `degree` over x's nonzero
/// coordinates in rank order, emitting
/// entry value = base · degree_scale[k] · (Π x_i^{m_i}) / √(Π m_i!).
///
/// Layers are built breadth-first by degree: each degree-k monomial is the
/// unique child of the degree-(k−1) monomial obtained by removing one copy
/// of its largest coordinate, and appending coordinates in ascending order
/// visits children in colex order, so output needs no sort. A layer with a
/// zero scale (the polynomial map with c = 0 below top degree) is still
/// enumerated — the cost model charges every monomial — but not emitted.
///
/// flops = C(nnz+r, r) exactly; callers must have validated that the full
/// feature-space size C(input_dim+r, r) fits in u64.
pub(crate) fn monomial_features(
    x: &SparseVector,
    input_dim: usize,
    degree: u32,
    base: f64,
    degree_scale: &[f64],
) -> SparseFeatures {
    let xs = x.entries();
    let n = xs.len();
    debug_assert_eq!(degree_scale.len(), degree as usize + 1);
    let flops =
        count_monomials(n, degree).expect("feature-space size was validated at construction");

    let mut out: Vec<(u64, f64)> = Vec::new();
    let s0 = base * degree_scale[0];
    if s0 != 0.0 {
        out.push((0, s0));
    }

    struct Node {
        colex: u64,
        /// (Π x_i^{m_i}) / √(Π m_i!) for this monomial.
        value: f64,
        /// Position (into xs) of the largest coordinate, and its multiplicity;
        /// multiplicity 0 marks the degree-0 root.
        last_pos: usize,
        last_mult: u32,
    }

    let mut prev = vec![Node {
        colex: 0,
        value: 1.0,
        last_pos: 0,
        last_mult: 0,
    }];
    // prev_ends[p]: how many nodes of the previous layer have their largest
    // coordinate at position ≤ p (a prefix, since layers are colex-sorted).
    let mut prev_ends = vec![1usize; n];

    for k in 1..=degree {
        if prev.is_empty() {
            break;
        }
        let offset = degree_offset(input_dim, k).expect("validated at construction");
        let scale = base * degree_scale[k as usize];
        let mut cur: Vec<Node> = Vec::new();
        for (p, &(q, xv)) in xs.iter().enumerate() {
            // Appending coordinate q as the new largest element adds
            // C(q + k - 1, k) to the within-layer colex rank.
            let step = binomial((q as u64) + (k as u64) - 1, k as u64)
                .expect("validated at construction");
            for parent in &prev[..prev_ends[p]] {
                let mult = if parent.last_mult > 0 && parent.last_pos == p {
                    parent.last_mult + 1
                } else {
                    1
                };
                cur.push(Node {
                    colex: parent.colex + step,
                    value: parent.value * xv / (mult as f64).sqrt(),
                    last_pos: p,
                    last_mult: mult,
                });
            }
        }
        if scale != 0.0 {
            out.extend(cur.iter().map(|node| (offset + node.colex, scale * node.value)));
        }
        let mut ends = vec![0usize; n];
        let mut covered = 0;
        for (p, end) in ends.iter_mut().enumerate() {
            while covered < cur.len() && cur[covered].last_pos <= p {
                covered += 1;
            }
            *end = covered;
        }
        prev = cur;
        prev_ends = ends;
    }

    SparseFeatures::new(out, flops)
}

/// Truncated-series feature map of the Gaussian kernel.
#[derive(Debug, Clone)]
pub struct TaylorMap {
    spec: FeatureMapSpec,
    num_features: u64,
    /// σ^{−k} for k = 0..=degree.
    degree_scales: Vec<f64>,
}

impl TaylorMap {
    pub fn new(spec: FeatureMapSpec) -> Result<Self> {
        if spec.kind != MapKind::Taylor {
            return Err(Error::Config(format!(
                "expected a taylor spec, got kind {}",
                spec.kind
            )));
        }
        if !(spec.sigma2.is_finite() && spec.sigma2 > 0.0) {
            return Err(Error::Config(format!(
                "sigma2 must be positive, got {}",
                spec.sigma2
            )));
        }
        if spec.degree > MAX_DEGREE {
            return Err(Error::Config(format!(
                "degree {} exceeds the supported maximum {MAX_DEGREE}",
                spec.degree
            )));
        }
        let num_features = count_monomials(spec.input_dim, spec.degree).ok_or_else(|| {
            Error::Config(format!(
                "feature space C({}+{}, {}) does not fit in u64",
                spec.input_dim, spec.degree, spec.degree
            ))
        })?;
        let inv_sigma = 1.0 / spec.sigma2.sqrt();
        let mut degree_scales = Vec::with_capacity(spec.degree as usize + 1);
        let mut s = 1.0;
        for _ in 0..=spec.degree {
            degree_scales.push(s);
            s *= inv_sigma;
        }
        Ok(TaylorMap {
            spec,
            num_features,
            degree_scales,
        })
    }

    pub fn map(&self, x: &SparseVector) -> SparseFeatures {
        let base = (-x.norm_squared() / (2.0 * self.spec.sigma2)).exp();
        monomial_features(
            x,
            self.spec.input_dim,
            self.spec.degree,
            base,
            &self.degree_scales,
        )
    }

    /// Total feature-space size C(d+r, r).
    pub fn num_features(&self) -> u64 {
        self.num_features
    }

    pub fn spec(&self) -> &FeatureMapSpec {
        &self.spec
    }

    /// Closed-form truncated kernel; see [`truncated_kernel`].
    pub fn truncated_kernel(&self, x: &SparseVector, x2: &SparseVector) -> f64 {
        truncated_kernel(self.spec.sigma2, self.spec.degree, x, x2)
    }

    /// Series-remainder bound; see [`taylor_error_bound`].
    pub fn error_bound(&self, norm_x: f64, norm_x2: f64) -> f64 {
        taylor_error_bound(self.spec.sigma2, self.spec.degree, norm_x, norm_x2)
    }
}

/// Degree-≤`degree` truncation of the Gaussian kernel's series expansion,
/// evaluated in closed form:
/// e^{−(‖x‖²+‖x2‖²)/(2σ²)} · Σ_{k=0}^{r} (⟨x,x2⟩/σ²)^k / k!.
///
/// This is the oracle the feature map's inner product is tested against; it
/// works for any degree (no cap), since the sum is numerically stable.
pub fn truncated_kernel(sigma2: f64, degree: u32, x: &SparseVector, x2: &SparseVector) -> f64 {
    assert!(sigma2 > 0.0, "sigma2 must be positive");
    let prefactor = (-(x.norm_squared() + x2.norm_squared()) / (2.0 * sigma2)).exp();
    let z = x.dot(x2) / sigma2;
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 1..=degree as u64 {
        term *= z / k as f64;
        sum += term;
    }
    prefactor * sum
}

/// Series-remainder bound on |exact − truncated| for inputs with the given
/// norms: (‖x‖·‖x2‖/σ²)^{r+1} / (r+1)!.
pub fn taylor_error_bound(sigma2: f64, degree: u32, norm_x: f64, norm_x2: f64) -> f64 {
    assert!(sigma2 > 0.0, "sigma2 must be positive");
    assert!(norm_x >= 0.0 && norm_x2 >= 0.0, "norms must be nonnegative");
    let a = norm_x * norm_x2 / sigma2;
    let mut term = 1.0;
    for k in 1..=(degree as u64 + 1) {
        term *= a / k as f64;
    }
    term
}

/// Per-degree scalar factor 1/(σ^k √k!) of the degree-k block, used for
/// coefficient-decay comparisons against the polynomial map.
pub fn degree_factor(sigma2: f64, k: u32) -> f64 {
    assert!(sigma2 > 0.0);
    let inv_sigma = 1.0 / sigma2.sqrt();
    let mut f = 1.0;
    for i in 1..=k as u64 {
        f *= inv_sigma / (i as f64).sqrt();
    }
    f
}
