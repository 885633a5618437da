//! The uniform feature-map contract shared by the Taylor, Fourier, and
//! polynomial maps: sparse feature vectors with flop accounting, a common
//! spec type with a key=value config encoding, and kernel evaluation via
//! inner products.
//!
//! Cost model (asserted by tests): a monomial map (Taylor/polynomial)
//! spends one flop per feature over the nonzero coordinates, C(nnz+r, r)
//! in total; the Fourier map spends nnz flops per feature, D·nnz in total.
//! Constant factors (the exp prefactor, trig calls) are excluded so costs
//! are implementation-independent.

use std::fmt;
use std::str::FromStr;

use crate::data::SparseVector;
use crate::error::{Error, Result};
use crate::fourier::FourierMap;
use crate::polynomial::PolynomialMap;
use crate::taylor::TaylorMap;

/// Which explicit feature map to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    Taylor,
    Fourier,
    Polynomial,
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            MapKind::Taylor => "taylor",
            MapKind::Fourier => "fourier",
            MapKind::Polynomial => "poly",
        };
        f.write_str(name)
    }
}

impl FromStr for MapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "taylor" => Ok(MapKind::Taylor),
            "fourier" => Ok(MapKind::Fourier),
            "poly" | "polynomial" => Ok(MapKind::Polynomial),
            other => Err(Error::Config(format!(
                "unknown map kind `{other}` (expected taylor, fourier, or poly)"
            ))),
        }
    }
}

/// Parameters of a feature map. Only the fields relevant to `kind` matter:
/// Taylor uses (input_dim, sigma2, degree); Fourier uses (input_dim, sigma2,
/// num_features, seed); Polynomial uses (input_dim, degree, constant).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMapSpec {
    pub kind: MapKind,
    pub input_dim: usize,
    /// Gaussian kernel bandwidth σ² (Taylor, Fourier).
    pub sigma2: f64,
    /// Truncation/polynomial degree r (Taylor, Polynomial).
    pub degree: u32,
    /// Number of random features D (Fourier).
    pub num_features: u64,
    /// Additive constant c of the polynomial kernel (Polynomial).
    pub constant: f64,
    /// Seed for frequency/phase sampling (Fourier).
    pub seed: u64,
}

impl FeatureMapSpec {
    pub fn taylor(input_dim: usize, sigma2: f64, degree: u32) -> Self {
        FeatureMapSpec {
            kind: MapKind::Taylor,
            input_dim,
            sigma2,
            degree,
            num_features: 0,
            constant: 0.0,
            seed: 0,
        }
    }

    pub fn fourier(input_dim: usize, sigma2: f64, num_features: u64, seed: u64) -> Self {
        FeatureMapSpec {
            kind: MapKind::Fourier,
            input_dim,
            sigma2,
            degree: 0,
            num_features,
            constant: 0.0,
            seed,
        }
    }

    pub fn polynomial(input_dim: usize, degree: u32, constant: f64) -> Self {
        FeatureMapSpec {
            kind: MapKind::Polynomial,
            input_dim,
            sigma2: 0.0,
            degree,
            num_features: 0,
            constant,
            seed: 0,
        }
    }

    /// Serializes the relevant fields as `key=value` lines. Floats use
    /// shortest round-trip formatting, so decode(encode(spec)) == spec.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("kind={}\n", self.kind));
        out.push_str(&format!("input_dim={}\n", self.input_dim));
        match self.kind {
            MapKind::Taylor => {
                out.push_str(&format!("sigma2={}\n", self.sigma2));
                out.push_str(&format!("degree={}\n", self.degree));
            }
            MapKind::Fourier => {
                out.push_str(&format!("sigma2={}\n", self.sigma2));
                out.push_str(&format!("num_features={}\n", self.num_features));
                out.push_str(&format!("seed={}\n", self.seed));
            }
            MapKind::Polynomial => {
                out.push_str(&format!("degree={}\n", self.degree));
                out.push_str(&format!("constant={}\n", self.constant));
            }
        }
        out
    }

    /// Parses the `key=value` encoding produced by [`to_config_string`].
    /// Keys irrelevant to the kind are ignored; unknown keys are errors.
    ///
    /// [`to_config_string`]: FeatureMapSpec::to_config_string
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut kind: Option<MapKind> = None;
        let mut input_dim: Option<usize> = None;
        let mut sigma2: Option<f64> = None;
        let mut degree: Option<u32> = None;
        let mut num_features: Option<u64> = None;
        let mut constant: Option<f64> = None;
        let mut seed: Option<u64> = None;

        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, found `{line}`")))?;
            let bad = |k: &str| Error::Config(format!("invalid value for `{k}`"));
            match key {
                "kind" => kind = Some(MapKind::from_str(value)?),
                "input_dim" => input_dim = Some(value.parse().map_err(|_| bad(key))?),
                "sigma2" => sigma2 = Some(value.parse().map_err(|_| bad(key))?),
                "degree" => degree = Some(value.parse().map_err(|_| bad(key))?),
                "num_features" => num_features = Some(value.parse().map_err(|_| bad(key))?),
                "constant" => constant = Some(value.parse().map_err(|_| bad(key))?),
                "seed" => seed = Some(value.parse().map_err(|_| bad(key))?),
                other => {
                    return Err(Error::Config(format!("unknown config key `{other}`")));
                }
            }
        }

        let kind = kind.ok_or_else(|| Error::Config("missing `kind`".to_string()))?;
        let input_dim =
            input_dim.ok_or_else(|| Error::Config("missing `input_dim`".to_string()))?;
        fn need<T>(field: Option<T>, name: &str) -> Result<T> {
            field.ok_or_else(|| Error::Config(format!("missing `{name}`")))
        }
        let spec = match kind {
            MapKind::Taylor => {
                FeatureMapSpec::taylor(input_dim, need(sigma2, "sigma2")?, need(degree, "degree")?)
            }
            MapKind::Fourier => FeatureMapSpec::fourier(
                input_dim,
                need(sigma2, "sigma2")?,
                need(num_features, "num_features")?,
                seed.unwrap_or(0),
            ),
            MapKind::Polynomial => FeatureMapSpec::polynomial(
                input_dim,
                need(degree, "degree")?,
                need(constant, "constant")?,
            ),
        };
        Ok(spec)
    }
}

/// Sparse feature vector: sorted unique ranks with the flops spent
/// computing them.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseFeatures {
    entries: Vec<(u64, f64)>,
    flops: u64,
}

impl SparseFeatures {
    /// `entries` must be sorted by strictly increasing rank.
    pub fn new(entries: Vec<(u64, f64)>, flops: u64) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        SparseFeatures { entries, flops }
    }

    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    /// Operation count charged for computing these features.
    pub fn flops(&self) -> u64 {
        self.flops
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Inner product by merge join over sorted ranks.
    pub fn dot(&self, other: &SparseFeatures) -> f64 {
        let (mut i, mut j) = (0, 0);
        let mut acc = 0.0;
        while i < self.entries.len() && j < other.entries.len() {
            let (ra, va) = self.entries[i];
            let (rb, vb) = other.entries[j];
            if ra == rb {
                acc += va * vb;
                i += 1;
                j += 1;
            } else if ra < rb {
                i += 1;
            } else {
                j += 1;
            }
        }
        acc
    }

    pub fn norm_squared(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum()
    }
}

/// A constructed feature map, ready to apply to inputs.
#[derive(Debug, Clone)]
pub enum FeatureMap {
    Taylor(TaylorMap),
    Fourier(FourierMap),
    Polynomial(PolynomialMap),
}

impl FeatureMap {
    /// Validates the spec and builds the map (sampling frequencies for
    /// Fourier). Errors are per-kind: non-positive σ², degree above the
    /// supported cap, D = 0, c < 0, or a feature space too large to index.
    pub fn from_spec(spec: &FeatureMapSpec) -> Result<FeatureMap> {
        match spec.kind {
            MapKind::Taylor => Ok(FeatureMap::Taylor(TaylorMap::new(spec.clone())?)),
            MapKind::Fourier => Ok(FeatureMap::Fourier(FourierMap::new(spec.clone())?)),
            MapKind::Polynomial => Ok(FeatureMap::Polynomial(PolynomialMap::new(spec.clone())?)),
        }
    }

    /// Applies the map. Pure and thread-safe; deterministic given the spec
    /// (including its seed). Panics if `x.dim() > input_dim`.
    pub fn map(&self, x: &SparseVector) -> SparseFeatures {
        assert!(
            x.dim() <= self.spec().input_dim,
            "input dimension {} exceeds map dimension {}",
            x.dim(),
            self.spec().input_dim
        );
        match self {
            FeatureMap::Taylor(m) => m.map(x),
            FeatureMap::Fourier(m) => m.map(x),
            FeatureMap::Polynomial(m) => m.map(x),
        }
    }

    /// Dimension D of the feature space (C(d+r, r) for monomial maps).
    pub fn num_features(&self) -> u64 {
        match self {
            FeatureMap::Taylor(m) => m.num_features(),
            FeatureMap::Fourier(m) => m.num_features(),
            FeatureMap::Polynomial(m) => m.num_features(),
        }
    }

    pub fn spec(&self) -> &FeatureMapSpec {
        match self {
            FeatureMap::Taylor(m) => m.spec(),
            FeatureMap::Fourier(m) => m.spec(),
            FeatureMap::Polynomial(m) => m.spec(),
        }
    }
}

/// K̃(x, x2) = ⟨map(x), map(x2)⟩.
pub fn approx_kernel(map: &FeatureMap, x: &SparseVector, x2: &SparseVector) -> f64 {
    map.map(x).dot(&map.map(x2))
}

/// Gaussian kernel exp(−‖x−x2‖²/(2σ²)), with the squared distance computed
/// as ‖x‖² + ‖x2‖² − 2⟨x,x2⟩ over sparse entries (clamped at zero).
pub fn exact_gaussian_kernel(sigma2: f64, x: &SparseVector, x2: &SparseVector) -> f64 {
    assert!(sigma2 > 0.0, "sigma2 must be positive");
    let dist2 = (x.norm_squared() + x2.norm_squared() - 2.0 * x.dot(x2)).max(0.0);
    (-dist2 / (2.0 * sigma2)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::PortableRng;

    fn random_sparse(rng: &mut PortableRng, dim: usize, nnz: usize) -> SparseVector {
        let mut idx: Vec<usize> = (0..dim).collect();
        rng.shuffle(&mut idx);
        let mut chosen: Vec<usize> = idx.into_iter().take(nnz).collect();
        chosen.sort_unstable();
        let entries = chosen
            .into_iter()
            .map(|i| (i, 2.0 * rng.uniform() - 1.0))
            .collect();
        SparseVector::new(entries, dim).unwrap()
    }

    #[test]
    fn map_kind_parse_and_display() {
        assert_eq!("taylor".parse::<MapKind>().unwrap(), MapKind::Taylor);
        assert_eq!("fourier".parse::<MapKind>().unwrap(), MapKind::Fourier);
        assert_eq!("poly".parse::<MapKind>().unwrap(), MapKind::Polynomial);
        assert_eq!("polynomial".parse::<MapKind>().unwrap(), MapKind::Polynomial);
        assert!("rbf".parse::<MapKind>().is_err());
        assert_eq!(MapKind::Polynomial.to_string(), "poly");
    }

    #[test]
    fn config_roundtrip_all_kinds() {
        let specs = [
            FeatureMapSpec::taylor(17, 0.5, 4),
            FeatureMapSpec::fourier(123, 200.0, 4096, 99),
            FeatureMapSpec::polynomial(8, 3, 1.25),
        ];
        for spec in specs {
            let text = spec.to_config_string();
            let parsed = FeatureMapSpec::from_config_str(&text).unwrap();
            assert_eq!(parsed, spec, "round trip failed for:\n{text}");
        }
    }

    #[test]
    fn config_rejects_unknown_and_missing_keys() {
        assert!(FeatureMapSpec::from_config_str("kind=taylor\ninput_dim=3\nsigma2=1\ndegree=2\nbogus=1\n").is_err());
        assert!(FeatureMapSpec::from_config_str("kind=taylor\ninput_dim=3\ndegree=2\n").is_err());
        assert!(FeatureMapSpec::from_config_str("input_dim=3\nsigma2=1\ndegree=2\n").is_err());
        assert!(FeatureMapSpec::from_config_str("kind=fourier\ninput_dim=3\nsigma2=1\n").is_err());
    }

    #[test]
    fn config_ignores_irrelevant_known_keys() {
        // A polynomial spec does not use sigma2/seed; they parse but are ignored.
        let text = "kind=poly\ninput_dim=5\ndegree=2\nconstant=1\nsigma2=3\nseed=7\n";
        let spec = FeatureMapSpec::from_config_str(text).unwrap();
        assert_eq!(spec, FeatureMapSpec::polynomial(5, 2, 1.0));
    }

    #[test]
    fn sparse_features_dot_merge_join() {
        let a = SparseFeatures::new(vec![(0, 1.0), (3, 2.0), (7, -1.0)], 3);
        let b = SparseFeatures::new(vec![(1, 5.0), (3, 4.0), (7, 2.0), (9, 1.0)], 4);
        assert_eq!(a.dot(&b), 8.0 - 2.0);
        assert_eq!(b.dot(&a), a.dot(&b));
        assert_eq!(a.norm_squared(), 1.0 + 4.0 + 1.0);
    }

    #[test]
    fn exact_kernel_examples() {
        let x = SparseVector::from_dense(&[1.0, 0.0]);
        let y = SparseVector::from_dense(&[0.0, 1.0]);
        // identical inputs
        assert_eq!(exact_gaussian_kernel(1.0, &x, &x), 1.0);
        // squared distance 2 = 2σ² at σ²=1
        let k = exact_gaussian_kernel(1.0, &x, &y);
        assert!((k - (-1.0f64).exp()).abs() < 1e-15);
        // brute-force check on a denser pair
        let a = SparseVector::from_dense(&[0.3, -0.2, 0.9]);
        let b = SparseVector::from_dense(&[-0.1, 0.4, 0.5]);
        let d2 = (0.3f64 - (-0.1)).powi(2) + (-0.2f64 - 0.4).powi(2) + (0.9f64 - 0.5).powi(2);
        let expect = (-d2 / (2.0 * 0.7)).exp();
        assert!((exact_gaussian_kernel(0.7, &a, &b) - expect).abs() < 1e-15);
    }

    #[test]
    fn approx_kernel_zero_vector_taylor() {
        let zero = SparseVector::new(vec![], 3).unwrap();
        for r in 0..4 {
            let map = FeatureMap::from_spec(&FeatureMapSpec::taylor(3, 1.0, r)).unwrap();
            let k = approx_kernel(&map, &zero, &zero);
            assert_eq!(k, 1.0, "r={r}");
        }
    }

    #[test]
    fn approx_kernel_taylor_hand_value() {
        // d=1, x = x2 = (1), σ²=1, r=1: e^{-1}·(1+1)
        let x = SparseVector::from_dense(&[1.0]);
        let map = FeatureMap::from_spec(&FeatureMapSpec::taylor(1, 1.0, 1)).unwrap();
        let k = approx_kernel(&map, &x, &x);
        assert!((k - 0.735759).abs() < 1e-6, "got {k}");
        assert!((k - 2.0 * (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn self_kernel_is_squared_norm() {
        let mut rng = PortableRng::new(21);
        for kind in 0..3 {
            let spec = match kind {
                0 => FeatureMapSpec::taylor(10, 2.0, 3),
                1 => FeatureMapSpec::fourier(10, 2.0, 64, 5),
                _ => FeatureMapSpec::polynomial(10, 3, 1.0),
            };
            let map = FeatureMap::from_spec(&spec).unwrap();
            for _ in 0..10 {
                let x = random_sparse(&mut rng, 10, 4);
                let feats = map.map(&x);
                let k = approx_kernel(&map, &x, &x);
                assert!((k - feats.norm_squared()).abs() <= 1e-12 * feats.norm_squared().max(1.0));
                assert!(k >= 0.0);
            }
        }
    }

    #[test]
    fn cauchy_schwarz_for_projection_maps() {
        let mut rng = PortableRng::new(33);
        let specs = [
            FeatureMapSpec::taylor(12, 1.5, 4),
            FeatureMapSpec::polynomial(12, 3, 0.5),
        ];
        for spec in &specs {
            let map = FeatureMap::from_spec(spec).unwrap();
            for _ in 0..25 {
                let x = random_sparse(&mut rng, 12, 5);
                let y = random_sparse(&mut rng, 12, 5);
                let kxy = approx_kernel(&map, &x, &y);
                let kxx = approx_kernel(&map, &x, &x);
                let kyy = approx_kernel(&map, &y, &y);
                assert!(kxy * kxy <= kxx * kyy * (1.0 + 1e-12) + 1e-300);
            }
        }
    }

    #[test]
    fn cost_model_is_exact() {
        let mut rng = PortableRng::new(44);
        let x = random_sparse(&mut rng, 15, 6);
        let taylor = FeatureMap::from_spec(&FeatureMapSpec::taylor(15, 1.0, 3)).unwrap();
        // C(6+3, 3) = 84
        assert_eq!(taylor.map(&x).flops(), 84);
        let fourier = FeatureMap::from_spec(&FeatureMapSpec::fourier(15, 1.0, 32, 1)).unwrap();
        assert_eq!(fourier.map(&x).flops(), 32 * 6);
        let poly = FeatureMap::from_spec(&FeatureMapSpec::polynomial(15, 3, 1.0)).unwrap();
        assert_eq!(poly.map(&x).flops(), 84);
        // flops positive even for the empty vector
        let zero = SparseVector::new(vec![], 15).unwrap();
        assert_eq!(taylor.map(&zero).flops(), 1);
    }
}
