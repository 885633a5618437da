//! Sparse labeled datasets in LIBSVM text format.
//!
//! Indices are 1-based on disk (LIBSVM convention) and 0-based internally.
//! Parsing is order-preserving and deterministic; datasets are immutable
//! once built and safe to share across threads.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Sparse vector with strictly increasing 0-based indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
    dim: usize,
}

impl SparseVector {
    /// Builds a vector, validating that indices are strictly increasing and
    /// below `dim`, and that all values are finite.
    pub fn new(entries: Vec<(usize, f64)>, dim: usize) -> Result<Self> {
        for (pos, &(idx, val)) in entries.iter().enumerate() {
            if idx >= dim {
                return Err(Error::Config(format!(
                    "index {idx} out of range for dimension {dim}"
                )));
            }
            if !val.is_finite() {
                return Err(Error::Config(format!("non-finite value at index {idx}")));
            }
            if pos > 0 && entries[pos - 1].0 >= idx {
                return Err(Error::Config(format!(
                    "indices not strictly increasing at index {idx}"
                )));
            }
        }
        Ok(SparseVector { entries, dim })
    }

    /// Builds a vector from a dense slice, dropping exact zeros.
    pub fn from_dense(values: &[f64]) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, v))
            .collect();
        SparseVector {
            entries,
            dim: values.len(),
        }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored (nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Sparse inner product by merge join over sorted indices.
    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j) = (0, 0);
        let mut acc = 0.0;
        while i < self.entries.len() && j < other.entries.len() {
            let (ia, va) = self.entries[i];
            let (ib, vb) = other.entries[j];
            if ia == ib {
                acc += va * vb;
                i += 1;
                j += 1;
            } else if ia < ib {
                i += 1;
            } else {
                j += 1;
            }
        }
        acc
    }

    /// Squared Euclidean norm, summed left-to-right over stored entries.
    pub fn norm_squared(&self) -> f64 {
        let mut acc = 0.0;
        for &(_, v) in &self.entries {
            acc += v * v;
        }
        acc
    }

    /// Scales every value in place.
    pub fn scale(&mut self, factor: f64) {
        for entry in &mut self.entries {
            entry.1 *= factor;
        }
    }

    fn set_dim(&mut self, dim: usize) {
        debug_assert!(self.entries.last().map_or(0, |e| e.0 + 1) <= dim);
        self.dim = dim;
    }
}

/// Labeled dataset; `labels[i]` is the ±1 label of `examples[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub examples: Vec<SparseVector>,
    pub labels: Vec<f64>,
    pub dim: usize,
}

impl LabeledDataset {
    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }
}

/// Summary statistics of a dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetStats {
    /// Number of examples m.
    pub count: usize,
    /// Dimensionality d.
    pub dim: usize,
    /// Mean number of nonzeros per example.
    pub avg_nnz: f64,
    /// Radius: max Euclidean norm over examples.
    pub radius: f64,
}

/// Computes (m, d, mean nonzeros, radius). Errors on an empty dataset.
pub fn dataset_stats(ds: &LabeledDataset) -> Result<DatasetStats> {
    if ds.is_empty() {
        return Err(Error::Config("dataset is empty".to_string()));
    }
    let m = ds.len();
    let total_nnz: usize = ds.examples.iter().map(|x| x.nnz()).sum();
    let radius = ds
        .examples
        .iter()
        .map(|x| x.norm_squared().sqrt())
        .fold(0.0_f64, f64::max);
    Ok(DatasetStats {
        count: m,
        dim: ds.dim,
        avg_nnz: total_nnz as f64 / m as f64,
        radius,
    })
}

fn parse_label(tok: &str, line_no: usize) -> Result<f64> {
    match tok {
        "+1" | "1" => Ok(1.0),
        "-1" => Ok(-1.0),
        "0" => Ok(-1.0),
        other => Err(Error::Parse {
            line: line_no,
            msg: format!("unrecognized label `{other}` (expected +1, 1, -1, or 0)"),
        }),
    }
}

/// Parses LIBSVM text: one `<label> <idx>:<val> ...` example per line.
///
/// Accepted labels: `+1`, `1`, `-1`, and `0` (mapped to −1). Indices must be
/// positive and strictly increasing within a line. Blank lines are skipped.
/// The dataset dimension is the maximum index seen, unless `dim_override`
/// supplies a larger value; an index above the override is a parse error.
pub fn parse_libsvm<R: BufRead>(reader: R, dim_override: Option<usize>) -> Result<LabeledDataset> {
    let mut examples = Vec::new();
    let mut labels = Vec::new();
    let mut max_index = 0usize; // 1-based, 0 = none seen

    for (line_idx, line) in reader.lines().enumerate() {
        let line_no = line_idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut tokens = trimmed.split_ascii_whitespace();
        let label_tok = tokens.next().expect("nonempty line has a first token");
        labels.push(parse_label(label_tok, line_no)?);

        let mut entries: Vec<(usize, f64)> = Vec::new();
        let mut prev_index = 0usize; // 1-based
        for tok in tokens {
            let (idx_str, val_str) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("expected `index:value`, found `{tok}`"),
            })?;
            let idx: usize = idx_str.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid index `{idx_str}`"),
            })?;
            if idx == 0 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "indices are 1-based; 0 is not a valid index".to_string(),
                });
            }
            if idx <= prev_index {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("indices not strictly increasing at `{tok}`"),
                });
            }
            let val: f64 = val_str.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid value `{val_str}`"),
            })?;
            if !val.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("non-finite value `{val_str}`"),
                });
            }
            if let Some(limit) = dim_override {
                if idx > limit {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("index {idx} exceeds declared dimension {limit}"),
                    });
                }
            }
            prev_index = idx;
            entries.push((idx - 1, val));
        }
        max_index = max_index.max(prev_index);
        // Per-vector dim is fixed up to the dataset dim below.
        examples.push(SparseVector {
            entries,
            dim: prev_index,
        });
    }

    let dim = dim_override.unwrap_or(max_index).max(max_index);
    for x in &mut examples {
        x.set_dim(dim);
    }
    Ok(LabeledDataset {
        examples,
        labels,
        dim,
    })
}

/// Reads a LIBSVM file; names ending in `.gz` are gunzipped on the fly.
pub fn read_libsvm(path: &Path, dim_override: Option<usize>) -> Result<LabeledDataset> {
    let file = File::open(path)?;
    if path.extension().is_some_and(|e| e == "gz") {
        let gz = flate2::read::MultiGzDecoder::new(file);
        parse_libsvm(BufReader::new(gz), dim_override)
    } else {
        parse_libsvm(BufReader::new(file), dim_override)
    }
}

/// Writes a dataset back to LIBSVM text (1-based indices, `+1`/`-1` labels).
///
/// Values print in shortest round-trip decimal form, so a parse/serialize
/// cycle reproduces them bit-exactly.
pub fn write_libsvm<W: Write>(mut w: W, ds: &LabeledDataset) -> Result<()> {
    for (x, &y) in ds.examples.iter().zip(&ds.labels) {
        let label = if y > 0.0 { "+1" } else { "-1" };
        w.write_all(label.as_bytes())?;
        for &(idx, val) in x.entries() {
            write!(w, " {}:{}", idx + 1, val)?;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Rescales the dataset so the mean squared norm is exactly 1, returning the
/// multiplicative factor applied to every value.
pub fn scale_to_unit_mean_norm(ds: &mut LabeledDataset) -> Result<f64> {
    if ds.is_empty() {
        return Err(Error::Config("dataset is empty".to_string()));
    }
    let mean_sq: f64 =
        ds.examples.iter().map(|x| x.norm_squared()).sum::<f64>() / ds.len() as f64;
    if mean_sq <= 0.0 {
        return Err(Error::Config(
            "cannot normalize: all examples are zero".to_string(),
        ));
    }
    let factor = (1.0 / mean_sq).sqrt();
    for x in &mut ds.examples {
        x.scale(factor);
    }
    Ok(factor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse_str(text: &str) -> Result<LabeledDataset> {
        parse_libsvm(Cursor::new(text.as_bytes()), None)
    }

    #[test]
    fn parses_basic_line() {
        let ds = parse_str("+1 3:0.5 7:1.2\n").unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.labels[0], 1.0);
        // 1-based on disk, 0-based internally.
        assert_eq!(ds.examples[0].entries(), &[(2, 0.5), (6, 1.2)]);
        assert_eq!(ds.dim, 7);
    }

    #[test]
    fn parses_empty_example() {
        let ds = parse_str("-1\n").unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.labels[0], -1.0);
        assert!(ds.examples[0].entries().is_empty());
        assert_eq!(ds.dim, 0);
    }

    #[test]
    fn rejects_non_increasing_indices() {
        let err = parse_str("1 2:1 1:1\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn label_zero_maps_to_negative() {
        let ds = parse_str("0 1:1\n").unwrap();
        assert_eq!(ds.labels[0], -1.0);
    }

    #[test]
    fn rejects_bad_label() {
        assert!(matches!(
            parse_str("2 1:1\n").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
    }

    #[test]
    fn rejects_malformed_entry() {
        assert!(matches!(
            parse_str("+1 3-0.5\n").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
        assert!(matches!(
            parse_str("+1 a:0.5\n").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
        assert!(matches!(
            parse_str("+1 3:zzz\n").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
    }

    #[test]
    fn error_carries_later_line_number() {
        let err = parse_str("+1 1:1\n-1 2:1\n1 2:1 2:2\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn zero_index_rejected() {
        assert!(parse_str("+1 0:1\n").is_err());
    }

    #[test]
    fn dim_override_grows_but_never_shrinks() {
        let ds = parse_libsvm(Cursor::new(b"+1 3:1\n" as &[u8]), Some(10)).unwrap();
        assert_eq!(ds.dim, 10);
        assert_eq!(ds.examples[0].dim(), 10);
        let err = parse_libsvm(Cursor::new(b"+1 3:1\n" as &[u8]), Some(2)).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn parse_is_order_preserving() {
        let ds = parse_str("+1 1:1\n-1 2:2\n+1 3:3\n").unwrap();
        assert_eq!(ds.labels, vec![1.0, -1.0, 1.0]);
        assert_eq!(ds.examples[0].entries(), &[(0, 1.0)]);
        assert_eq!(ds.examples[1].entries(), &[(1, 2.0)]);
        assert_eq!(ds.examples[2].entries(), &[(2, 3.0)]);
    }

    #[test]
    fn serialize_roundtrip_is_identical() {
        let text = "+1 3:0.5 7:1.2\n-1\n0 1:0.1 2:-3.25\n+1 2:1e-3\n";
        let ds = parse_str(text).unwrap();
        let mut out = Vec::new();
        write_libsvm(&mut out, &ds).unwrap();
        let ds2 = parse_libsvm(Cursor::new(&out[..]), None).unwrap();
        assert_eq!(ds, ds2);
    }

    #[test]
    fn stats_basic() {
        // Two examples with 2 and 4 nonzeros: mean nonzeros 3.
        let ds = parse_str("+1 1:1 2:1\n-1 1:1 2:1 3:1 4:1\n").unwrap();
        let st = dataset_stats(&ds).unwrap();
        assert_eq!(st.count, 2);
        assert_eq!(st.dim, 4);
        assert_eq!(st.avg_nnz, 3.0);

        // Single example (3,4): radius 5.
        let ds = parse_str("+1 1:3 2:4\n").unwrap();
        let st = dataset_stats(&ds).unwrap();
        assert_eq!(st.radius, 5.0);
    }

    #[test]
    fn stats_empty_errors() {
        let ds = parse_str("").unwrap();
        assert!(dataset_stats(&ds).is_err());
    }

    #[test]
    fn sparse_vector_validation() {
        assert!(SparseVector::new(vec![(0, 1.0), (2, 2.0)], 3).is_ok());
        assert!(SparseVector::new(vec![(0, 1.0), (0, 2.0)], 3).is_err());
        assert!(SparseVector::new(vec![(2, 1.0), (1, 2.0)], 3).is_err());
        assert!(SparseVector::new(vec![(3, 1.0)], 3).is_err());
        assert!(SparseVector::new(vec![(0, f64::NAN)], 3).is_err());
    }

    #[test]
    fn dot_and_norm() {
        let a = SparseVector::from_dense(&[1.0, 0.0, 2.0, 3.0]);
        let b = SparseVector::from_dense(&[0.0, 5.0, 4.0, 1.0]);
        assert_eq!(a.dot(&b), 2.0 * 4.0 + 3.0 * 1.0);
        assert_eq!(a.norm_squared(), 1.0 + 4.0 + 9.0);
        assert_eq!(a.nnz(), 3);
        assert_eq!(b.dot(&a), a.dot(&b));
    }

    #[test]
    fn norm_squared_sums_left_to_right() {
        // Chosen so that summation order matters at the last bit.
        let x = SparseVector::new(vec![(0, 1e8), (1, 1.0), (2, 1e-8)], 3).unwrap();
        let expect = ((1e8f64 * 1e8) + 1.0) + 1e-8 * 1e-8;
        assert_eq!(x.norm_squared(), expect);
    }

    #[test]
    fn unit_mean_norm_scaling() {
        let mut ds = parse_str("+1 1:3 2:4\n-1 1:1\n").unwrap();
        let factor = scale_to_unit_mean_norm(&mut ds).unwrap();
        let mean_sq: f64 =
            ds.examples.iter().map(|x| x.norm_squared()).sum::<f64>() / ds.len() as f64;
        assert!((mean_sq - 1.0).abs() < 1e-12, "mean square {mean_sq}");
        // (25 + 1)/2 = 13, so the factor is 1/sqrt(13).
        assert!((factor - (1.0f64 / 13.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn gzip_read() {
        use flate2::write::GzEncoder;
        use flate2::Compression;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("toy.libsvm.gz");
        let f = File::create(&path).unwrap();
        let mut enc = GzEncoder::new(f, Compression::default());
        enc.write_all(b"+1 1:0.5 3:1.5\n-1 2:2\n").unwrap();
        enc.finish().unwrap();

        let ds = read_libsvm(&path, None).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.dim, 3);
        assert_eq!(ds.examples[0].entries(), &[(0, 0.5), (2, 1.5)]);
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = read_libsvm(Path::new("/nonexistent/file.libsvm"), None).unwrap_err();
        assert!(matches!(err, Error::Io(_)));
    }
}
