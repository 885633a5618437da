//! Random Fourier feature map for the Gaussian kernel.
//!
//! Frequencies ω_j are drawn i.i.d. with coordinates Normal(0, 1/σ²) and
//! phases θ_j uniform on [0, 2π); feature j of x is √(2/D)·cos(ω_j·x + θ_j).
//! The normalization makes ⟨φ(x), φ(x′)⟩ an unbiased Monte-Carlo estimate
//! of the kernel (E_θ[cos(a+θ)cos(b+θ)] = ½cos(a−b), and averaging
//! cos(ω·(x−x′)) over ω recovers the Gaussian by Bochner's theorem).
//!
//! Sampling is fully determined by the spec's seed: all D·d frequency
//! coordinates are drawn first (feature-major, coordinate-minor), then the
//! D phases. Unlike the monomial maps, this map is not an orthogonal
//! projection: K̃(x,x) can exceed K(x,x) = 1.

use crate::data::SparseVector;
use crate::error::{Error, Result};
use crate::features::{FeatureMapSpec, MapKind, SparseFeatures};
use crate::rng::PortableRng;

/// Sampled random Fourier map; immutable after construction.
#[derive(Debug, Clone)]
pub struct FourierMap {
    spec: FeatureMapSpec,
    /// D×d frequency matrix, row-major: omegas[j*d + i] is coordinate i of ω_j.
    omegas: Vec<f64>,
    thetas: Vec<f64>,
}

impl FourierMap {
    /// Draws frequencies and phases from the spec's seed. Errors:
    /// `num_features` = 0, non-positive σ², or D·d too large to store.
    pub fn new(spec: FeatureMapSpec) -> Result<Self> {
        if spec.kind != MapKind::Fourier {
            return Err(Error::Config(format!(
                "expected a fourier spec, got kind {}",
                spec.kind
            )));
        }
        if !(spec.sigma2.is_finite() && spec.sigma2 > 0.0) {
            return Err(Error::Config(format!(
                "sigma2 must be positive, got {}",
                spec.sigma2
            )));
        }
        if spec.num_features == 0 {
            return Err(Error::Config(
                "a fourier map needs at least one feature (num_features ≥ 1)".to_string(),
            ));
        }
        let total = spec
            .num_features
            .checked_mul(spec.input_dim as u64)
            .filter(|&t| t <= (1 << 32))
            .ok_or_else(|| {
                Error::Config(format!(
                    "dense frequency matrix {}×{} is too large",
                    spec.num_features, spec.input_dim
                ))
            })?;
        let mut rng = PortableRng::new(spec.seed);
        let inv_sigma = 1.0 / spec.sigma2.sqrt();
        let mut omegas = Vec::with_capacity(total as usize);
        for _ in 0..total {
            omegas.push(rng.gaussian() * inv_sigma);
        }
        let mut thetas = Vec::with_capacity(spec.num_features as usize);
        for _ in 0..spec.num_features {
            thetas.push(std::f64::consts::TAU * rng.uniform());
        }
        Ok(FourierMap {
            spec,
            omegas,
            thetas,
        })
    }

    /// D dense entries: √(2/D)·cos(ω_j·x + θ_j). The projection iterates
    /// only x's nonzeros, so flops = D·nnz(x).
    pub fn map(&self, x: &SparseVector) -> SparseFeatures {
        let d = self.spec.input_dim;
        let count = self.spec.num_features as usize;
        let scale = (2.0 / count as f64).sqrt();
        let mut entries = Vec::with_capacity(count);
        for j in 0..count {
            let row = &self.omegas[j * d..(j + 1) * d];
            let mut proj = 0.0;
            for &(i, v) in x.entries() {
                proj += row[i] * v;
            }
            entries.push((j as u64, scale * (proj + self.thetas[j]).cos()));
        }
        SparseFeatures::new(entries, self.spec.num_features * x.nnz() as u64)
    }

    pub fn num_features(&self) -> u64 {
        self.spec.num_features
    }

    pub fn spec(&self) -> &FeatureMapSpec {
        &self.spec
    }

    /// Frequency vector ω_j as a dense slice of length input_dim.
    pub fn omega(&self, j: usize) -> &[f64] {
        let d = self.spec.input_dim;
        &self.omegas[j * d..(j + 1) * d]
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }
}

/// Convenience constructor mirroring the sampling contract: a map over
/// dimension `d` with `count` features at bandwidth σ², drawn from `seed`.
pub fn sample_frequencies(d: usize, count: u64, sigma2: f64, seed: u64) -> Result<FourierMap> {
    FourierMap::new(FeatureMapSpec::fourier(d, sigma2, count, seed))
}
