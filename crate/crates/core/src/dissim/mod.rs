//! Dissimilarity maps: symmetric real matrices with a zero diagonal, indexed
//! by an ordered list of taxon names.
//!
//! Entries may be negative. Shifting a tree metric around a leaf is the same
//! as changing that leaf's edge length, which can go below zero without
//! changing the outcome of neighbor-joining.

mod phylip;

use std::fmt;

use crate::error::{check_name, Error, Result};
use crate::tree::permutation_to;

#[derive(Clone, PartialEq)]
pub struct DissimilarityMap {
    names: Vec<String>,
    values: Vec<f64>,
}

impl fmt::Debug for DissimilarityMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.len();
        writeln!(f, "DissimilarityMap({n})")?;
        for i in 0..n {
            write!(f, "  {:>8}", self.names[i])?;
            for j in 0..n {
                write!(f, " {:>8.4}", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl DissimilarityMap {
    /// Builds a map from names and a row-major `n × n` matrix.
    pub fn new(names: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let n = names.len();
        if values.len() != n * n {
            return Err(Error::InvalidMap(format!(
                "{} values for {n} taxa",
                values.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for name in &names {
            check_name(name)?;
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateTaxon(name.clone()));
            }
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::InvalidMap(format!("diagonal entry {i} is not zero")));
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !v.is_finite() {
                    return Err(Error::InvalidMap(format!("entry ({i}, {j}) is not finite")));
                }
                if v != values[j * n + i] {
                    return Err(Error::InvalidMap(format!("entry ({i}, {j}) is not symmetric")));
                }
            }
        }
        Ok(DissimilarityMap { names, values })
    }

    /// Builds a map from `f(i, j)` evaluated for `i < j`.
    pub fn from_fn(names: Vec<String>, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let n = names.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Self::new(names, values)
    }

    /// Builds a map from rows given as nested slices, e.g. a printed matrix.
    pub fn from_rows<S: AsRef<str>>(names: &[S], rows: &[&[f64]]) -> Result<Self> {
        let values = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(names.iter().map(|s| s.as_ref().to_string()).collect(), values)
    }

    pub(crate) fn from_parts_unchecked(names: Vec<String>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), names.len() * names.len());
        DissimilarityMap { names, values }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownTaxon(name.to_string()))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.names.len() + j]
    }

    pub fn get_by_name(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.get(self.index_of(a)?, self.index_of(b)?))
    }

    /// Row-major matrix values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Sets `(i, j)` and `(j, i)`. Panics on a diagonal index or a non-finite value.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i != j, "diagonal stays zero");
        assert!(v.is_finite(), "entries must be finite");
        let n = self.len();
        self.values[i * n + j] = v;
        self.values[j * n + i] = v;
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::TaxonOutOfRange(i))
        }
    }

    /// Adds `eps` to every off-diagonal entry in row and column `a`.
    pub fn shift(&self, a: usize, eps: f64) -> Result<Self> {
        self.check_index(a)?;
        let mut out = self.clone();
        for x in 0..self.len() {
            if x != a {
                out.set(a, x, self.get(a, x) + eps);
            }
        }
        Ok(out)
    }

    /// Replaces `a` and `b` by a new taxon `j_<a>_<b>` appended last, at
    /// distance `(δ(i,a) + δ(i,b)) / 2` from every other taxon `i`.
    pub fn reduce_average(&self, a: usize, b: usize) -> Result<Self> {
        self.reduce_with(a, b, 0.0)
    }

    /// As [`reduce_average`](Self::reduce_average) but at distance
    /// `(δ(i,a) + δ(i,b) − δ(a,b)) / 2`, placing the new taxon at the point
    /// where the path between `a` and `b` meets the rest of the tree.
    pub fn reduce_rooted(&self, a: usize, b: usize) -> Result<Self> {
        let dab = {
            self.check_index(a)?;
            self.check_index(b)?;
            self.get(a, b)
        };
        self.reduce_with(a, b, dab)
    }

    fn reduce_with(&self, a: usize, b: usize, dab: f64) -> Result<Self> {
        self.check_index(a)?;
        self.check_index(b)?;
        if a == b {
            return Err(Error::RepeatedTaxa);
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let keep: Vec<usize> = (0..self.len()).filter(|&i| i != a && i != b).collect();
        let mut names: Vec<String> = keep.iter().map(|&i| self.names[i].clone()).collect();
        names.push(joined_name(&self.names[lo], &self.names[hi]));
        let m = names.len();
        let mut values = vec![0.0; m * m];
        for (p, &i) in keep.iter().enumerate() {
            for (q, &j) in keep.iter().enumerate() {
                values[p * m + q] = self.get(i, j);
            }
            let v = 0.5 * (self.get(i, a) + self.get(i, b) - dab);
            values[p * m + m - 1] = v;
            values[(m - 1) * m + p] = v;
        }
        Ok(DissimilarityMap { names, values })
    }

    /// Map restricted to `indices`, in that order.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        for &i in indices {
            self.check_index(i)?;
        }
        let names: Vec<String> = indices.iter().map(|&i| self.names[i].clone()).collect();
        if names.len() != indices.iter().collect::<std::collections::HashSet<_>>().len() {
            return Err(Error::RepeatedTaxa);
        }
        let m = indices.len();
        let mut values = vec![0.0; m * m];
        for (p, &i) in indices.iter().enumerate() {
            for (q, &j) in indices.iter().enumerate() {
                values[p * m + q] = self.get(i, j);
            }
        }
        Ok(DissimilarityMap { names, values })
    }

    /// Same map with taxa reordered to follow `names`.
    pub fn reorder<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        let perm = permutation_to(&self.names, names)?;
        let mut inverse = vec![0; perm.len()];
        for (old, &new) in perm.iter().enumerate() {
            inverse[new] = old;
        }
        self.restrict(&inverse)
    }

    /// Largest absolute entrywise difference, matching taxa by name.
    pub fn linf_distance(&self, other: &DissimilarityMap) -> Result<f64> {
        let other = other.reorder(&self.names)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Name given to the taxon created by joining `a` and `b`.
pub fn joined_name(a: &str, b: &str) -> String {
    format!("j_{a}_{b}")
}
