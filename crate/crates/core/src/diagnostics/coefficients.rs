use num_rational::Ratio;
use serde::Serialize;

use crate::dissim::DissimilarityMap;
use crate::error::{Error, Result};
use crate::nj::{choose2, scaled_z};
use crate::tree::PhyloTree;

fn c2(n: usize) -> i64 {
    choose2(n) as i64
}

/// Lower bound `(s1 − s2)/4` on the l∞ distance from a 4-taxon map to any
/// tree metric, where `s1 ≥ s2` are the two largest of the three pair sums.
pub fn four_point_defect_lb(d: &DissimilarityMap) -> Result<f64> {
    if d.len() != 4 {
        return Err(Error::InvalidParameter(format!(
            "four-point defect needs exactly 4 taxa, got {}",
            d.len()
        )));
    }
    let mut sums = [
        d.get(0, 1) + d.get(2, 3),
        d.get(0, 2) + d.get(1, 3),
        d.get(0, 3) + d.get(1, 2),
    ];
    sums.sort_by(|a, b| b.total_cmp(a));
    Ok((sums[0] - sums[1]) / 4.0)
}

/// Coefficient of `l(e)` in the scaled `Z(a, b)` of the tree metric of `t`.
///
/// With `N⁺` and `N⁻` the leaf counts on `a`'s side of `e` and on the far
/// side: `−(N⁺ − 1)(N⁻ − 1)` when `e` separates `a` from `b`, and
/// `N⁻(N⁻ − 1)` otherwise.
pub fn beta_coefficient(t: &PhyloTree, a: usize, b: usize, e: usize) -> Result<i64> {
    t.check_taxon(a)?;
    t.check_taxon(b)?;
    t.edge(e)?;
    if a == b {
        return Err(Error::RepeatedTaxa);
    }
    let split = t.edge_split(e)?;
    let n = t.n_taxa() as i64;
    let near = if split.side_a().contains(a) {
        split.side_a().len() as i64
    } else {
        n - split.side_a().len() as i64
    };
    let far = n - near;
    Ok(if split.same_side(a, b) {
        far * (far - 1)
    } else {
        -(near - 1) * (far - 1)
    })
}

/// Coefficient of `δ(x, y)` in the scaled `Z(a, b)` on `n` taxa, by the
/// size of `{a, b} ∩ {x, y}`.
///
/// ```
/// use njcert::diagnostics::alpha_coefficient;
/// use num_rational::Ratio;
/// assert_eq!(alpha_coefficient(8, (0, 1), (0, 1)).unwrap(), Ratio::from_integer(-15));
/// assert_eq!(alpha_coefficient(5, (0, 1), (1, 4)).unwrap(), Ratio::from_integer(1));
/// assert_eq!(alpha_coefficient(9, (0, 1), (2, 3)).unwrap(), Ratio::from_integer(-1));
/// ```
pub fn alpha_coefficient(n: usize, pair1: (usize, usize), pair2: (usize, usize)) -> Result<Ratio<i64>> {
    if n < 4 {
        return Err(Error::TooFewTaxa { needed: 4, got: n });
    }
    for t in [pair1.0, pair1.1, pair2.0, pair2.1] {
        if t >= n {
            return Err(Error::TaxonOutOfRange(t));
        }
    }
    if pair1.0 == pair1.1 || pair2.0 == pair2.1 {
        return Err(Error::RepeatedTaxa);
    }
    let overlap = [pair2.0, pair2.1]
        .iter()
        .filter(|&&x| x == pair1.0 || x == pair1.1)
        .count();
    Ok(match overlap {
        2 => Ratio::from_integer(-c2(n - 2)),
        1 => Ratio::new(n as i64 - 3, 2),
        _ => Ratio::from_integer(-1),
    })
}

/// One entry class of the S-statistic coefficients: the coefficient shared
/// by every pair in the class and the number of such pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Lemma31Term {
    #[serde(serialize_with = "ser_ratio")]
    pub alpha: Ratio<i64>,
    pub multiplicity: i64,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Closed-form coefficient of `δ(x, y)` in `S(δ : A, i, j)` for `i ∈ A`,
/// `j ∈ B`, grouped into eight classes. With `a, a₁, a₂ ∈ A − {i}` and
/// `b, b₁, b₂ ∈ B − {j}` the classes are, in order:
/// `(i,j)`, `(i,a)`, `(j,a)`, `(i,b)`, `(j,b)`, `(a,b)`, `(a₁,a₂)`, `(b₁,b₂)`.
pub fn lemma31_alpha(case: u8, size_a: usize, size_b: usize) -> Result<Lemma31Term> {
    if size_a < 1 || size_b < 1 || size_a + size_b < 4 {
        return Err(Error::InvalidParameter(format!(
            "split sizes {size_a}|{size_b} are too small"
        )));
    }
    let (a, b) = (size_a as i64, size_b as i64);
    let n = a + b;
    let half = |x: i64| Ratio::new(x, 2);
    let int = Ratio::from_integer;
    let ca = c2(size_a);
    let cb = c2(size_b);
    let cross = half((a - 1) * (b - 1));
    let (alpha, multiplicity) = match case {
        1 => (cross + int(ca * c2(n as usize - 2)), 1),
        2 => (int(-cb) - half((n - 3) * ca), a - 1),
        3 => (cross - half((n - 3) * ca), a - 1),
        4 => (cross - half((n - 3) * ca), b - 1),
        5 => (int(-ca) - half((n - 3) * ca), b - 1),
        6 => (cross + int(ca), (a - 1) * (b - 1)),
        7 => (int(-cb + ca), c2(size_a - 1)),
        8 => (int(0), c2(size_b - 1)),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "case must be in 1..=8, got {case}"
            )))
        }
    };
    Ok(Lemma31Term { alpha, multiplicity })
}

/// `C(|A|, 2)(|B| − 1)(n − 1) · l`, the tree-metric lower bound on S.
pub fn lemma29_bound(size_a: usize, size_b: usize, l: f64) -> f64 {
    let n = size_a + size_b;
    choose2(size_a) as f64 * (size_b as f64 - 1.0) * (n as f64 - 1.0) * l
}

/// `(l/8)(|A| − 1)(n − 1)(3|A|n − 2n − 2|A|² − 4|A| + 4)`, the largest
/// amount by which an edge-consistent perturbation can lower S.
pub fn lemma32_bound(size_a: usize, size_b: usize, l: f64) -> f64 {
    let a = size_a as f64;
    let n = (size_a + size_b) as f64;
    l / 8.0 * (a - 1.0) * (n - 1.0) * (3.0 * a * n - 2.0 * n - 2.0 * a * a - 4.0 * a + 4.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SStatistic {
    pub value: f64,
    pub a: Vec<usize>,
    pub i: usize,
    pub j: usize,
}

/// `S(δ : A, i, j) = Σ_{{a₁,a₂} ⊆ A} [Z(a₁, a₂) − Z(i, j)]` with Z scaled
/// by `C(n−1, 2)`. A positive value shows that some pair inside `A` beats
/// `(i, j)` under Z.
pub fn s_statistic(d: &DissimilarityMap, a: &[usize], i: usize, j: usize) -> Result<SStatistic> {
    let n = d.len();
    if n < 4 {
        return Err(Error::TooFewTaxa { needed: 4, got: n });
    }
    if a.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "A needs at least 2 taxa, got {}",
            a.len()
        )));
    }
    for &t in a.iter().chain([&i, &j]) {
        d.check_index(t)?;
    }
    if i == j || a.contains(&j) {
        return Err(Error::RepeatedTaxa);
    }
    let mut sorted = a.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != a.len() {
        return Err(Error::RepeatedTaxa);
    }
    let zij = scaled_z(d, i, j);
    let mut value = 0.0;
    for (p, &x) in a.iter().enumerate() {
        for &y in &a[p + 1..] {
            value += scaled_z(d, x, y) - zij;
        }
    }
    Ok(SStatistic {
        value,
        a: a.to_vec(),
        i,
        j,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexamples::example_five_leaf;

    #[test]
    fn defect_lb_examples() {
        let ex = example_five_leaf();
        let q = ex.tree_metric.restrict(&[0, 1, 3, 4]).unwrap();
        assert_eq!(four_point_defect_lb(&q).unwrap(), 0.0);
        // sums (10, 10, 6)
        let d = DissimilarityMap::from_rows(
            &["a", "b", "c", "d"],
            &[&[0., 3., 5., 5.], &[3., 0., 5., 5.], &[5., 5., 0., 3.], &[5., 5., 3., 0.]],
        )
        .unwrap();
        assert_eq!(four_point_defect_lb(&d).unwrap(), 0.0);
        let d = DissimilarityMap::from_rows(
            &["a", "b", "c", "d"],
            &[&[0., 1., 4., 2.], &[1., 0., 2., 2.], &[4., 2., 0., 1.], &[2., 2., 1., 0.]],
        )
        .unwrap();
        // sums 2, 6, 4
        assert_eq!(four_point_defect_lb(&d).unwrap(), 0.5);
        assert!(four_point_defect_lb(&ex.tree_metric).is_err());
    }

    #[test]
    fn beta_examples() {
        // caterpillar with a central edge separating 4 | 4
        let t = PhyloTree::from_newick(
            "(((a:1,b:1):1,(c:1,d:1):1):1,((e:1,f:1):1,(g:1,h:1):1):1);",
        )
        .unwrap();
        let mid = t
            .internal_edge_splits()
            .into_iter()
            .find(|(_, s)| s.minor_size() == 4)
            .unwrap()
            .0;
        let (a, e) = (t.taxon_index("a").unwrap(), t.taxon_index("e").unwrap());
        assert_eq!(beta_coefficient(&t, a, e, mid).unwrap(), -9);
        let leaf_a = t.neighbors(t.leaf(a))[0].1;
        assert_eq!(beta_coefficient(&t, a, e, leaf_a).unwrap(), 0);
        assert!(beta_coefficient(&t, a, a, mid).is_err());
        assert!(beta_coefficient(&t, a, e, 999).is_err());
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_coefficient(8, (2, 5), (5, 2)).unwrap(), Ratio::from_integer(-15));
        assert_eq!(alpha_coefficient(6, (0, 1), (1, 2)).unwrap(), Ratio::new(3, 2));
        assert!(alpha_coefficient(3, (0, 1), (1, 2)).is_err());
        assert!(alpha_coefficient(5, (0, 0), (1, 2)).is_err());
    }

    #[test]
    fn lemma31_examples() {
        let t = lemma31_alpha(1, 3, 5).unwrap();
        assert_eq!(t.alpha, Ratio::from_integer(49));
        assert_eq!(t.multiplicity, 1);
        let t = lemma31_alpha(8, 3, 5).unwrap();
        assert_eq!(t.alpha, Ratio::from_integer(0));
        assert_eq!(t.multiplicity, 6);
        assert!(lemma31_alpha(0, 3, 5).is_err());
        assert!(lemma31_alpha(9, 3, 5).is_err());
        let total: i64 = (1..=8).map(|c| lemma31_alpha(c, 3, 5).unwrap().multiplicity).sum();
        assert_eq!(total, 28);
    }

    #[test]
    fn lemma31_simplified_forms() {
        for a in 1..8usize {
            for b in a..10usize {
                if a + b < 4 {
                    continue;
                }
                let n = (a + b) as i64;
                let closed = Ratio::new(-(n - 1) * (a as i64 - 1) * (a as i64 - 2), 4);
                assert_eq!(lemma31_alpha(3, a, b).unwrap().alpha, closed);
                assert_eq!(lemma31_alpha(4, a, b).unwrap().alpha, closed);
            }
        }
    }

    #[test]
    fn lemma32_equals_weighted_alpha_sum() {
        for a in 2..7usize {
            for b in a..9usize {
                let sum: Ratio<i64> = (1..=8)
                    .map(|c| {
                        let t = lemma31_alpha(c, a, b).unwrap();
                        let mag = if t.alpha < Ratio::from_integer(0) { -t.alpha } else { t.alpha };
                        mag * t.multiplicity
                    })
                    .sum();
                let expected = *sum.numer() as f64 / *sum.denom() as f64 / 4.0;
                assert!((lemma32_bound(a, b, 1.0) - expected).abs() < 1e-9, "{a} {b}");
            }
        }
    }

    #[test]
    fn s_statistic_constant_map_is_zero() {
        let d = DissimilarityMap::from_fn((0..6).map(|i| format!("t{i}")).collect(), |_, _| 2.0)
            .unwrap();
        let s = s_statistic(&d, &[0, 1, 2], 0, 3).unwrap();
        assert!(s.value.abs() < 1e-12);
        assert!(s_statistic(&d, &[0], 0, 3).is_err());
        assert!(s_statistic(&d, &[0, 3], 0, 3).is_err());
        assert!(s_statistic(&d, &[0, 0], 1, 3).is_err());
    }
}
