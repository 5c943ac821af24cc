//! Reader and writer for the line-oriented sparse classification format
//! `<label> <index>:<value> ...` with 1-based indices.
//!
//! Blank lines are skipped and `#` starts a comment that runs to the end of
//! the line. Labels `+1` and `1` map to +1; `-1` maps to −1; `0` is accepted
//! as the negative class of 0/1-labelled files and maps to −1. Feature
//! indices need not arrive sorted; rows are stored sorted. Every rejection
//! carries the 1-based line and column of the offending token.
//!
//! The format has no header, so the dimension is inferred as the largest
//! index seen; use [`parse_libsvm_with_dim`] to pin it (required for a
//! faithful round-trip when the last coordinate is never touched).

use super::{Dataset, SparseRow};
use crate::error::{Error, Result};

pub fn parse_libsvm(text: &str) -> Result<Dataset> {
    parse_inner(text, None)
}

/// Like [`parse_libsvm`], but with a fixed dimension; any index beyond it is
/// a parse error.
pub fn parse_libsvm_with_dim(text: &str, d: usize) -> Result<Dataset> {
    parse_inner(text, Some(d))
}

fn parse_inner(text: &str, fixed_dim: Option<usize>) -> Result<Dataset> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut max_index = 0usize; // largest 1-based index seen
    for (line_no, raw) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let mut tokens = tokens_with_columns(line);
        let Some((label_col, label_tok)) = tokens.next() else {
            continue; // blank or comment-only line
        };
        let label = parse_label(label_tok, line_no, label_col)?;
        // (1-based index, value, column) until duplicates are ruled out.
        let mut entries: Vec<(usize, f64, usize)> = Vec::new();
        for (col, tok) in tokens {
            let (idx, value) = parse_feature(tok, line_no, col)?;
            if let Some(d) = fixed_dim {
                if idx > d {
                    return Err(Error::Parse {
                        line: line_no,
                        col,
                        msg: format!("index {idx} exceeds the fixed dimension {d}"),
                    });
                }
            }
            entries.push((idx, value, col));
        }
        entries.sort_by_key(|&(idx, _, col)| (idx, col));
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Parse {
                line: line_no,
                col: w[1].2,
                msg: format!("duplicate feature index {}", w[1].0),
            });
        }
        if let Some(&(idx, _, _)) = entries.last() {
            max_index = max_index.max(idx);
        }
        rows.push(
            SparseRow::new(entries.iter().map(|&(idx, v, _)| (idx - 1, v)).collect())
                .expect("entries validated during parsing"),
        );
        labels.push(label);
    }
    let d = fixed_dim.unwrap_or(max_index);
    Dataset::new(rows, labels, d)
}

fn parse_label(tok: &str, line: usize, col: usize) -> Result<f64> {
    match tok {
        "+1" | "1" => Ok(1.0),
        "-1" | "0" => Ok(-1.0),
        other => Err(Error::Parse {
            line,
            col,
            msg: format!("unknown label {other:?} (expected +1, 1, -1, or 0)"),
        }),
    }
}

/// One `index:value` token; returns the 1-based index.
fn parse_feature(tok: &str, line: usize, col: usize) -> Result<(usize, f64)> {
    let Some(colon) = tok.find(':') else {
        return Err(Error::Parse {
            line,
            col,
            msg: format!("expected index:value, got {tok:?}"),
        });
    };
    let idx: usize = tok[..colon].parse().map_err(|_| Error::Parse {
        line,
        col,
        msg: format!("malformed feature index {:?}", &tok[..colon]),
    })?;
    if idx == 0 {
        return Err(Error::Parse {
            line,
            col,
            msg: "feature indices are 1-based; got 0".into(),
        });
    }
    let value_col = col + colon + 1;
    let value: f64 = tok[colon + 1..].parse().map_err(|_| Error::Parse {
        line,
        col: value_col,
        msg: format!("malformed feature value {:?}", &tok[colon + 1..]),
    })?;
    if !value.is_finite() {
        return Err(Error::Parse {
            line,
            col: value_col,
            msg: format!("non-finite feature value {value}"),
        });
    }
    Ok((idx, value))
}

/// Whitespace-separated tokens with their 1-based starting columns.
fn tokens_with_columns(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let bytes = line.as_bytes();
    let mut pos = 0;
    std::iter::from_fn(move || {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos >= bytes.len() {
            return None;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        Some((start + 1, &line[start..pos]))
    })
}

/// Render a dataset in the same format: `±1 idx:val ...`, indices 1-based and
/// sorted. Values use the shortest decimal that parses back exactly, so
/// `parse(serialize(data))` reproduces rows, labels, and (provided the last
/// coordinate is touched or the dimension is re-pinned) the dataset itself.
/// Metadata extras (margin, noise level, optimal value) are not carried.
pub fn serialize_libsvm(data: &Dataset) -> String {
    let mut out = String::new();
    for (row, &y) in data.rows().iter().zip(data.labels()) {
        out.push_str(if y > 0.0 { "+1" } else { "-1" });
        for &(j, v) in row.entries() {
            out.push_str(&format!(" {}:{}", j + 1, v));
        }
        out.push('\n');
    }
    out
}
