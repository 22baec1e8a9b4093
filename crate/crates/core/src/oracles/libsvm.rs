//! LibSVM / svmlight text format.
//!
//! Per line: `<label> <index>:<value> ...` with 1-based, strictly increasing
//! integer indices. Leading whitespace is allowed, `#` starts a comment that
//! runs to the end of the line, and blank lines are skipped. Rows are
//! densified on load.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LibsvmOptions {
    /// Append a constant `1.0` column.
    pub append_bias: bool,
    /// Column count before the bias. Inferred from the largest index when
    /// `None`; indices beyond it are a parse error when `Some`.
    pub n_features: Option<usize>,
    /// Require every label to be exactly `+1` or `-1`. When false, positive
    /// labels map to `+1` and all others to `-1`.
    pub binary: bool,
}

impl Default for LibsvmOptions {
    fn default() -> Self {
        Self {
            append_bias: true,
            n_features: None,
            binary: true,
        }
    }
}

pub fn load_libsvm(path: impl AsRef<Path>, opts: LibsvmOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_libsvm(&text, path, opts)
}

struct SparseRow {
    label: f64,
    entries: Vec<(usize, f64)>,
}

/// Parses LibSVM text. `origin` only labels error messages.
pub fn parse_libsvm(text: &str, origin: impl AsRef<Path>, opts: LibsvmOptions) -> Result<Dataset> {
    let origin: PathBuf = origin.as_ref().to_path_buf();
    let err = |line: usize, message: String| Error::Parse {
        path: origin.clone(),
        line,
        message,
    };

    let mut rows = Vec::new();
    let mut max_index = 0usize;
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        let Some(label_tok) = tokens.next() else {
            continue;
        };
        let label: f64 = label_tok
            .parse()
            .map_err(|_| err(lineno, format!("invalid label `{label_tok}`")))?;
        if !label.is_finite() {
            return Err(err(lineno, format!("invalid label `{label_tok}`")));
        }
        if opts.binary && label != 1.0 && label != -1.0 {
            return Err(err(lineno, format!("label `{label_tok}` is not ±1")));
        }

        let mut entries = Vec::new();
        let mut last = 0usize;
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| err(lineno, format!("expected index:value, got `{tok}`")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| err(lineno, format!("invalid feature index in `{tok}`")))?;
            let val: f64 = val
                .parse()
                .map_err(|_| err(lineno, format!("invalid feature value in `{tok}`")))?;
            if idx == 0 {
                return Err(err(lineno, "feature indices are 1-based".into()));
            }
            if idx <= last {
                return Err(err(
                    lineno,
                    format!("feature index {idx} is not strictly increasing"),
                ));
            }
            if !val.is_finite() {
                return Err(err(lineno, format!("non-finite feature value in `{tok}`")));
            }
            if let Some(n) = opts.n_features {
                if idx > n {
                    return Err(err(
                        lineno,
                        format!("feature index {idx} exceeds n_features = {n}"),
                    ));
                }
            }
            last = idx;
            entries.push((idx, val));
        }
        max_index = max_index.max(last);
        rows.push(SparseRow { label, entries });
    }

    let base = opts.n_features.unwrap_or(max_index);
    let width = base + usize::from(opts.append_bias);
    if width == 0 {
        return Err(err(0, "no features and no bias column".into()));
    }
    let mut features = vec![0.0; rows.len() * width];
    let mut labels = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        let dense = &mut features[r * width..(r + 1) * width];
        for &(idx, val) in &row.entries {
            dense[idx - 1] = val;
        }
        if opts.append_bias {
            dense[width - 1] = 1.0;
        }
        labels.push(if row.label > 0.0 { 1.0 } else { -1.0 });
    }
    Dataset::new(features, labels, width, opts.append_bias)
}

/// Writes a dataset back as LibSVM text, omitting zeros and the bias column.
pub fn write_libsvm<W: Write>(data: &Dataset, mut out: W) -> std::io::Result<()> {
    let width = data.n_features() - usize::from(data.has_bias());
    let mut line = String::new();
    let mut buf = ryu::Buffer::new();
    for row in data.rows() {
        line.clear();
        line.push_str(if row.label > 0.0 { "+1" } else { "-1" });
        for (i, v) in row.features[..width].iter().enumerate() {
            if *v != 0.0 {
                let _ = write!(line, " {}:{}", i + 1, buf.format(*v));
            }
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}
