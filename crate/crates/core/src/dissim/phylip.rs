//! Square PHYLIP distance matrices: a taxon count, then one row per taxon
//! holding a name followed by `n` whitespace-separated reals.

use std::fmt::Write;

use super::DissimilarityMap;
use crate::error::{PhylipError, Result};

const SYMMETRY_TOLERANCE: f64 = 1e-6;

impl DissimilarityMap {
    /// Parses a square PHYLIP matrix. Rows may wrap across lines. Pairs that
    /// disagree by at most `1e-6` are averaged, with a warning.
    pub fn from_phylip(text: &str) -> Result<Self, PhylipError> {
        let mut tokens = text.split_whitespace();
        let n: usize = tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or(PhylipError::BadHeader)?;
        let mut names = Vec::with_capacity(n);
        let mut values = vec![0.0; n * n];
        for row in 0..n {
            let name = tokens.next().ok_or(PhylipError::RowCount {
                expected: n,
                found: row,
            })?;
            names.push(name.to_string());
            for column in 0..n {
                let token = tokens.next().ok_or(PhylipError::RowCount {
                    expected: n,
                    found: row,
                })?;
                let v: f64 = token
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite())
                    .ok_or_else(|| PhylipError::BadNumber {
                        row: row + 1,
                        column: column + 1,
                        token: token.to_string(),
                    })?;
                values[row * n + column] = v;
            }
        }
        if tokens.next().is_some() {
            return Err(PhylipError::TrailingData(n));
        }
        let mut warned = false;
        for i in 0..n {
            let diag = values[i * n + i];
            if diag.abs() > SYMMETRY_TOLERANCE {
                return Err(PhylipError::NonZeroDiagonal(names[i].clone(), diag));
            }
            values[i * n + i] = 0.0;
            for j in (i + 1)..n {
                let (a, b) = (values[i * n + j], values[j * n + i]);
                if a != b {
                    let gap = (a - b).abs();
                    if gap > SYMMETRY_TOLERANCE {
                        return Err(PhylipError::Asymmetric(
                            names[i].clone(),
                            names[j].clone(),
                            gap,
                        ));
                    }
                    if !warned {
                        log::warn!("PHYLIP matrix is slightly asymmetric; averaging mirrored entries");
                        warned = true;
                    }
                    let m = 0.5 * (a + b);
                    values[i * n + j] = m;
                    values[j * n + i] = m;
                }
            }
        }
        DissimilarityMap::new(names, values).map_err(|e| PhylipError::Map(Box::new(e)))
    }

    /// Writes the square PHYLIP form. Values use the shortest decimal that
    /// reads back to the same `f64`.
    pub fn to_phylip(&self) -> String {
        let n = self.len();
        let width = self.names.iter().map(|s| s.len()).max().unwrap_or(0).max(10);
        let mut out = format!("{n}\n");
        for i in 0..n {
            let _ = write!(out, "{:<width$}", self.names[i]);
            for j in 0..n {
                let _ = write!(out, " {}", self.get(i, j));
            }
            out.push('\n');
        }
        out
    }
}
