//! Explicit feature map of the inhomogeneous polynomial kernel
//! (⟨x,x′⟩ + c)^r, sharing the monomial enumeration and ranking of the
//! Taylor map.
//!
//! The collected feature for multiplicity vector (m_i), Σm_i = k, is
//! √(C(r,k) · c^{r−k} · k! / Π m_i!) · Π x_i^{m_i}; squaring and summing
//! reproduces the multinomial expansion of the kernel exactly. With c = 0
//! every block below the top degree carries a zero factor and is omitted
//! (the homogeneous kernel has no constant feature), though the cost model
//! still charges the full C(nnz+r, r) enumeration.

use crate::data::SparseVector;
use crate::error::{Error, Result};
use crate::features::{FeatureMapSpec, MapKind, SparseFeatures};
use crate::taylor::{binomial, count_monomials, monomial_features, MAX_DEGREE};

/// Explicit polynomial-kernel map; immutable and thread-safe.
#[derive(Debug, Clone)]
pub struct PolynomialMap {
    spec: FeatureMapSpec,
    num_features: u64,
    /// √(C(r,k)·c^{r−k}·k!) for k = 0..=r.
    degree_scales: Vec<f64>,
}

impl PolynomialMap {
    pub fn new(spec: FeatureMapSpec) -> Result<Self> {
        if spec.kind != MapKind::Polynomial {
            return Err(Error::Config(format!(
                "expected a poly spec, got kind {}",
                spec.kind
            )));
        }
        if !(spec.constant.is_finite() && spec.constant >= 0.0) {
            return Err(Error::Config(format!(
                "polynomial constant must be nonnegative, got {}",
                spec.constant
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
        let r = spec.degree;
        let c = spec.constant;
        let mut degree_scales = Vec::with_capacity(r as usize + 1);
        let mut factorial = 1.0;
        for k in 0..=r {
            if k > 0 {
                factorial *= k as f64;
            }
            let choose = binomial(r as u64, k as u64).expect("r ≤ 32") as f64;
            degree_scales.push((choose * c.powi((r - k) as i32) * factorial).sqrt());
        }
        Ok(PolynomialMap {
            spec,
            num_features,
            degree_scales,
        })
    }

    pub fn map(&self, x: &SparseVector) -> SparseFeatures {
        monomial_features(
            x,
            self.spec.input_dim,
            self.spec.degree,
            1.0,
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

    /// The kernel this map factorizes: (⟨x,x2⟩ + c)^r.
    pub fn kernel(&self, x: &SparseVector, x2: &SparseVector) -> f64 {
        (x.dot(x2) + self.spec.constant).powi(self.spec.degree as i32)
    }
}

/// Per-degree scalar factor √(C(r,k)·c^{r−k}) of the degree-k block, used
/// for coefficient-decay comparisons against the Taylor map.
pub fn degree_factor(degree: u32, constant: f64, k: u32) -> f64 {
    assert!(constant >= 0.0);
    let choose = binomial(degree as u64, k as u64).expect("degree ≤ 32") as f64;
    (choose * constant.powi((degree - k) as i32)).sqrt()
}
