//! Pair-selection criteria over a dissimilarity map.

use crate::dissim::DissimilarityMap;
use crate::error::{Error, Result};
use crate::tree::{distinct4, QuartetTopology};

/// Dense symmetric matrix over taxon pairs. The diagonal is `NaN`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMatrix {
    n: usize,
    values: Vec<f64>,
}

impl PairMatrix {
    fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = vec![f64::NAN; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        PairMatrix { n, values }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// Pairs `(i, j)` with `i < j` in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n;
        (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)))
    }

    /// Lexicographically first pair attaining the minimum.
    pub fn argmin(&self) -> Option<(usize, usize)> {
        self.pairs().fold(None, |best, p| match best {
            Some(b) if self.get(b.0, b.1) <= self.get(p.0, p.1) => Some(b),
            _ => Some(p),
        })
    }

    /// Lexicographically first pair attaining the maximum.
    pub fn argmax(&self) -> Option<(usize, usize)> {
        self.pairs().fold(None, |best, p| match best {
            Some(b) if self.get(b.0, b.1) >= self.get(p.0, p.1) => Some(b),
            _ => Some(p),
        })
    }
}

pub(crate) fn row_sums(d: &DissimilarityMap) -> Vec<f64> {
    let n = d.len();
    (0..n).map(|i| (0..n).map(|k| d.get(i, k)).sum()).collect()
}

/// `Q(i,j) = δ(i,j) − (Σ_k δ(i,k) + Σ_k δ(j,k)) / (n − 2)`.
pub fn q_matrix(d: &DissimilarityMap) -> Result<PairMatrix> {
    let n = d.len();
    if n < 3 {
        return Err(Error::TooFewTaxa { needed: 3, got: n });
    }
    let r = row_sums(d);
    let denom = (n - 2) as f64;
    Ok(PairMatrix::from_fn(n, |i, j| d.get(i, j) - (r[i] + r[j]) / denom))
}

#[inline]
pub(crate) fn w_unchecked(d: &DissimilarityMap, i: usize, j: usize, k: usize, l: usize) -> f64 {
    0.5 * (d.get(i, k) + d.get(i, l) + d.get(j, k) + d.get(j, l)) - d.get(i, j) - d.get(k, l)
}

/// Neighborliness of the resolution `(ij:kl)`:
/// `½(δ(i,k) + δ(i,l) + δ(j,k) + δ(j,l)) − δ(i,j) − δ(k,l)`.
///
/// On a tree metric this is twice the internal path length when `(ij:kl)` is
/// the tree's quartet.
pub fn w_value(d: &DissimilarityMap, i: usize, j: usize, k: usize, l: usize) -> Result<f64> {
    for t in [i, j, k, l] {
        d.check_index(t)?;
    }
    if !distinct4(i, j, k, l) {
        return Err(Error::RepeatedTaxa);
    }
    Ok(w_unchecked(d, i, j, k, l))
}

/// Sum of `w(ij:kl)` over unordered pairs `{k, l}` disjoint from `{i, j}`.
///
/// This is the Z-criterion multiplied by `C(n−1, 2)`.
pub fn scaled_z(d: &DissimilarityMap, i: usize, j: usize) -> f64 {
    let n = d.len();
    let mut sum = 0.0;
    for k in 0..n {
        if k == i || k == j {
            continue;
        }
        for l in (k + 1)..n {
            if l == i || l == j {
                continue;
            }
            sum += w_unchecked(d, i, j, k, l);
        }
    }
    sum
}

pub(crate) fn choose2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Z-criterion: the average of `w(ij:kl)` normalised by `1 / C(n−1, 2)`.
/// Evaluated directly from its definition, in `O(n⁴)`.
pub fn z_matrix(d: &DissimilarityMap) -> Result<PairMatrix> {
    let n = d.len();
    if n < 4 {
        return Err(Error::TooFewTaxa { needed: 4, got: n });
    }
    let norm = choose2(n - 1) as f64;
    Ok(PairMatrix::from_fn(n, |i, j| scaled_z(d, i, j) / norm))
}

/// [`z_matrix`] multiplied by `C(n−1, 2)`.
pub fn scaled_z_matrix(d: &DissimilarityMap) -> Result<PairMatrix> {
    let n = d.len();
    if n < 4 {
        return Err(Error::TooFewTaxa { needed: 4, got: n });
    }
    Ok(PairMatrix::from_fn(n, |i, j| scaled_z(d, i, j)))
}

/// Result of the four-point method on a 4-taxon map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourPoint {
    pub topology: QuartetTopology,
    /// Two of the three pair sums tied for the minimum; `topology` is then
    /// the canonically smallest of the tied resolutions.
    pub tie: bool,
}

fn nearly_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Four-point method: the resolution whose cherry pairs have the smallest
/// distance sum.
pub fn four_point_topology(d: &DissimilarityMap) -> Result<FourPoint> {
    if d.len() != 4 {
        return Err(Error::InvalidParameter(format!(
            "four-point method needs exactly 4 taxa, got {}",
            d.len()
        )));
    }
    Ok(four_point_on(d, 0, 1, 2, 3))
}

pub(crate) fn four_point_on(d: &DissimilarityMap, a: usize, b: usize, c: usize, e: usize) -> FourPoint {
    let mut t = [a, b, c, e];
    t.sort_unstable();
    let [a, b, c, e] = t;
    let sums = [
        d.get(a, b) + d.get(c, e),
        d.get(a, c) + d.get(b, e),
        d.get(a, e) + d.get(b, c),
    ];
    let res = QuartetTopology::resolutions(t);
    let min = sums.iter().copied().fold(f64::INFINITY, f64::min);
    let tied: Vec<usize> = (0..3).filter(|&s| nearly_equal(sums[s], min)).collect();
    match tied.len() {
        1 => FourPoint {
            topology: res[tied[0]],
            tie: false,
        },
        2 => FourPoint {
            topology: res[tied[0]],
            tie: true,
        },
        _ => FourPoint {
            topology: QuartetTopology::star(t),
            tie: true,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexamples::{example_eight_leaf, example_five_leaf};

    fn constant(n: usize, c: f64) -> DissimilarityMap {
        DissimilarityMap::from_fn((0..n).map(|i| format!("t{i}")).collect(), |_, _| c).unwrap()
    }

    #[test]
    fn q_example13() {
        let ex = example_eight_leaf();
        let q = q_matrix(&ex.distorted).unwrap();
        let i = |s| ex.distorted.index_of(s).unwrap();
        // row sums: x and y 23.7, a and b 15.6, m and n 15.6; n − 2 = 6
        assert!((q.get(i("x"), i("y")) - (2.7 - 47.4 / 6.0)).abs() < 1e-9);
        assert!((q.get(i("a"), i("b")) - (0.1 - 31.2 / 6.0)).abs() < 1e-9);
        assert!((q.get(i("m"), i("n")) - (0.1 - 31.2 / 6.0)).abs() < 1e-9);
        assert_eq!(q.argmin(), Some((i("x"), i("y"))));
    }

    #[test]
    fn q_constant_map() {
        let q = q_matrix(&constant(4, 2.5)).unwrap();
        for (i, j) in q.pairs() {
            assert_eq!(q.get(i, j), -5.0);
        }
        assert!(q_matrix(&constant(2, 1.0)).is_err());
    }

    #[test]
    fn q_picks_cherry_on_tree_metric() {
        let ex = example_five_leaf();
        let (i, j) = q_matrix(&ex.tree_metric).unwrap().argmin().unwrap();
        assert!(ex.tree.is_cherry(i, j).unwrap());
    }

    #[test]
    fn w_examples() {
        let ex = example_five_leaf();
        let [a, b, c, d, e] = [0, 1, 2, 3, 4];
        assert_eq!(w_value(&ex.tree_metric, a, b, d, e).unwrap(), 6.0);
        assert_eq!(
            w_value(&ex.tree_metric, a, b, d, e).unwrap(),
            w_value(&ex.tree_metric, d, e, b, a).unwrap()
        );
        // δ(a,e)+δ(b,c) < δ(a,b)+δ(c,e) makes (ae:bc) beat (ab:ce)
        let w_true = w_value(&ex.distorted, a, b, c, e).unwrap();
        let w_alt = w_value(&ex.distorted, a, e, b, c).unwrap();
        assert!(w_alt > w_true);
        assert!(w_value(&ex.distorted, a, a, c, e).is_err());
        for (i, j, k, l) in [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)] {
            assert_eq!(w_value(&constant(4, 3.0), i, j, k, l).unwrap(), 0.0);
        }
    }

    #[test]
    fn z_four_taxa_is_third_of_w() {
        let ex = example_five_leaf();
        let d = ex.distorted.restrict(&[0, 1, 2, 4]).unwrap();
        let z = z_matrix(&d).unwrap();
        assert!((z.get(0, 1) - w_value(&d, 0, 1, 2, 3).unwrap() / 3.0).abs() < 1e-12);
        assert!((z.get(1, 3) - w_value(&d, 1, 3, 0, 2).unwrap() / 3.0).abs() < 1e-12);
        assert!(z_matrix(&constant(3, 1.0)).is_err());
    }

    #[test]
    fn z_example13_argmax_matches_q() {
        let ex = example_eight_leaf();
        let z = z_matrix(&ex.distorted).unwrap();
        let q = q_matrix(&ex.distorted).unwrap();
        assert_eq!(z.argmax(), q.argmin());
    }

    #[test]
    fn four_point_examples() {
        let ex = example_five_leaf();
        let sub = ex.tree_metric.restrict(&[0, 1, 3, 4]).unwrap();
        let fp = four_point_topology(&sub).unwrap();
        assert_eq!(fp.topology, QuartetTopology::resolved(0, 1, 2, 3));
        assert!(!fp.tie);

        let sub = ex.distorted.restrict(&[0, 1, 2, 4]).unwrap();
        // (ae:bc) in the restricted indices a=0, b=1, c=2, e=3
        assert_eq!(
            four_point_topology(&sub).unwrap().topology,
            QuartetTopology::resolved(0, 3, 1, 2)
        );

        let fp = four_point_topology(&constant(4, 1.0)).unwrap();
        assert!(matches!(fp.topology, QuartetTopology::Star(_)));
        assert!(fp.tie);

        // two-way tie resolves to the canonically smallest resolution
        let d = DissimilarityMap::from_rows(
            &["a", "b", "c", "d"],
            &[
                &[0., 1., 1., 5.],
                &[1., 0., 5., 1.],
                &[1., 5., 0., 1.],
                &[5., 1., 1., 0.],
            ],
        )
        .unwrap();
        let fp = four_point_topology(&d).unwrap();
        assert!(fp.tie);
        assert_eq!(fp.topology, QuartetTopology::resolved(0, 1, 2, 3));
        assert!(four_point_topology(&constant(5, 1.0)).is_err());
    }
}
