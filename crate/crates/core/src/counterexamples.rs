//! Fixed example inputs and a generator for the non-inductive radius family.

use rand::Rng;
use serde::Serialize;

use crate::diagnostics::four_point_defect_lb;
use crate::dissim::{joined_name, DissimilarityMap};
use crate::error::{Error, Result};
use crate::nj::q_matrix;
use crate::tree::{agglomerate_rooted, PhyloTree, TreeBuilder};

/// A reference tree with its exact tree metric and a distorted map.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub tree: PhyloTree,
    pub tree_metric: DissimilarityMap,
    pub distorted: DissimilarityMap,
}

/// Five taxa `a..e` with cherries `(a,b)` and `(d,e)`. The distorted map
/// changes only `δ(a,e)` from 6 to 3: it is not quartet consistent with the
/// tree, yet neighbor-joining still recovers the tree.
pub fn example_five_leaf() -> Fixture {
    let names = ["a", "b", "c", "d", "e"];
    let tree = PhyloTree::from_newick("((a:1,b:1):1,c:1,(d:2,e:2):2);")
        .expect("valid fixture")
        .reorder_taxa(&names)
        .expect("same taxa");
    #[rustfmt::skip]
    let tree_metric = DissimilarityMap::from_rows(&names, &[
        &[0., 2., 3., 6., 6.],
        &[2., 0., 3., 6., 6.],
        &[3., 3., 0., 5., 5.],
        &[6., 6., 5., 0., 4.],
        &[6., 6., 5., 4., 0.],
    ]).expect("valid fixture");
    #[rustfmt::skip]
    let distorted = DissimilarityMap::from_rows(&names, &[
        &[0., 2., 3., 6., 3.],
        &[2., 0., 3., 6., 6.],
        &[3., 3., 0., 5., 5.],
        &[6., 6., 5., 0., 4.],
        &[3., 6., 5., 4., 0.],
    ]).expect("valid fixture");
    Fixture {
        tree,
        tree_metric,
        distorted,
    }
}

/// Eight taxa `x, y, a, b, c, m, n, p`. The distorted map is quartet
/// consistent with the tree but not quartet additive, and neighbor-joining
/// joins `(x, y)` first.
pub fn example_eight_leaf() -> Fixture {
    let names = ["x", "y", "a", "b", "c", "m", "n", "p"];
    let tree = PhyloTree::from_newick(
        "(((a:0.05,b:0.05):0.15,c:0.2):0.8,x:1,(((m:0.05,n:0.05):0.15,p:0.2):0.8,y:1):1);",
    )
    .expect("valid fixture")
    .reorder_taxa(&names)
    .expect("same taxa");
    #[rustfmt::skip]
    let tree_metric = DissimilarityMap::from_rows(&names, &[
        &[0., 3., 2., 2., 2., 3., 3., 3.],
        &[3., 0., 3., 3., 3., 2., 2., 2.],
        &[2., 3., 0., 0.1, 0.4, 3., 3., 3.],
        &[2., 3., 0.1, 0., 0.4, 3., 3., 3.],
        &[2., 3., 0.4, 0.4, 0., 3., 3., 3.],
        &[3., 2., 3., 3., 3., 0., 0.1, 0.4],
        &[3., 2., 3., 3., 3., 0.1, 0., 0.4],
        &[3., 2., 3., 3., 3., 0.4, 0.4, 0.],
    ]).expect("valid fixture");
    #[rustfmt::skip]
    let distorted = DissimilarityMap::from_rows(&names, &[
        &[0., 2.7, 2.6, 2.6, 2.6, 4.4, 4.4, 4.4],
        &[2.7, 0., 4.4, 4.4, 4.4, 2.6, 2.6, 2.6],
        &[2.6, 4.4, 0., 0.1, 0.4, 2.7, 2.7, 2.7],
        &[2.6, 4.4, 0.1, 0., 0.4, 2.7, 2.7, 2.7],
        &[2.6, 4.4, 0.4, 0.4, 0., 2.7, 2.7, 2.7],
        &[4.4, 2.6, 2.7, 2.7, 2.7, 0., 0.1, 0.4],
        &[4.4, 2.6, 2.7, 2.7, 2.7, 0.1, 0., 0.4],
        &[4.4, 2.6, 2.7, 2.7, 2.7, 0.4, 0.4, 0.],
    ]).expect("valid fixture");
    Fixture {
        tree,
        tree_metric,
        distorted,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thm34Params {
    /// Size of the inner taxon set.
    pub n: usize,
    /// Leaf edge length of `i`, `j`, `a`, `b`.
    pub alpha: f64,
    /// Length of the long edge leading to the inner subtree.
    pub beta: f64,
    /// Total edge length of the inner subtree.
    pub epsilon: f64,
}

impl Default for Thm34Params {
    fn default() -> Self {
        Thm34Params {
            n: 40,
            alpha: 1.0,
            beta: 4.2,
            epsilon: 1e-4,
        }
    }
}

/// A tree in which one agglomeration step takes a map within `β/4` of the
/// tree metric to one farther than `β/4` from every tree metric.
///
/// Shape: `i` and `a` hang (edge `α`) from one vertex, `j` and `b` from
/// another; these two vertices are `3.5` apart, and from the midpoint of that
/// path an edge of length `β` leads to the root `v` of a random rooted binary
/// subtree on the inner taxa `x0..x{n-1}` whose edges sum to `ε`.
#[derive(Debug, Clone)]
pub struct Thm34Instance {
    pub tree: PhyloTree,
    pub tree_metric: DissimilarityMap,
    pub distorted: DissimilarityMap,
    pub i: usize,
    pub j: usize,
    pub a: usize,
    pub b: usize,
    pub inner: Vec<usize>,
    pub params: Thm34Params,
}

/// Error added to `δ_T` on the pair `(p, q)` of a [`Thm34Instance`], with
/// `i, j, a, b` at indices `0..4` and inner taxa after them.
fn thm34_error(p: usize, q: usize) -> f64 {
    const I: usize = 0;
    const J: usize = 1;
    const A: usize = 2;
    const B: usize = 3;
    let (p, q) = (p.min(q), p.max(q));
    match (p, q) {
        (I, J) => -1.0,
        (I, A) | (J, B) | (A, B) => 1.0,
        (I, B) | (J, A) => 0.0,
        (I, _) | (J, _) => 1.0,
        (A, _) | (B, _) => -1.0,
        _ => 0.0,
    }
}

pub fn theorem34_instance<R: Rng + ?Sized>(params: Thm34Params, rng: &mut R) -> Result<Thm34Instance> {
    let Thm34Params {
        n,
        alpha,
        beta,
        epsilon,
    } = params;
    if n < 2 {
        return Err(Error::InvalidParameter(format!("inner set needs at least 2 taxa, got {n}")));
    }
    if !(beta > 4.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must exceed 4, got {beta}")));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha must be finite, got {alpha}")));
    }

    let mut b = TreeBuilder::new();
    let leaf_i = b.add_leaf("i");
    let leaf_j = b.add_leaf("j");
    let leaf_a = b.add_leaf("a");
    let leaf_b = b.add_leaf("b");
    let inner: Vec<usize> = (0..n).map(|k| b.add_leaf(format!("x{k}"))).collect();
    let p_ia = b.add_internal();
    let p_jb = b.add_internal();
    let mid = b.add_internal();
    b.connect(p_ia, leaf_i, alpha);
    b.connect(p_ia, leaf_a, alpha);
    b.connect(p_jb, leaf_j, alpha);
    b.connect(p_jb, leaf_b, alpha);
    b.connect(p_ia, mid, 1.75);
    b.connect(p_jb, mid, 1.75);
    let inner_edge = epsilon / (2 * n - 2) as f64;
    let v = agglomerate_rooted(&mut b, inner, inner_edge, rng);
    b.connect(mid, v, beta);
    let tree = b.build()?;

    let tree_metric = tree.tree_metric();
    let distorted = DissimilarityMap::from_fn(tree_metric.names().to_vec(), |p, q| {
        tree_metric.get(p, q) + thm34_error(p, q)
    })?;
    Ok(Thm34Instance {
        tree,
        tree_metric,
        distorted,
        i: 0,
        j: 1,
        a: 2,
        b: 3,
        inner: (4..4 + n).collect(),
        params,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thm34Verification {
    pub first_join: (String, String),
    /// Four-point lower bound on the distance from the reduced map,
    /// restricted to `{a, b, u, x}`, to any tree metric.
    pub reduced_defect_lb: f64,
    pub linf_input: f64,
}

/// Runs one neighbor-joining round on the distorted map, reduces the chosen
/// pair by averaging, and bounds the result's distance to tree metrics using
/// the quartet `{a, b, u, x0}` where `u` is the joined taxon.
pub fn verify_theorem34(inst: &Thm34Instance) -> Result<Thm34Verification> {
    let d = &inst.distorted;
    let (p, q) = q_matrix(d)?.argmin().expect("at least three taxa");
    let reduced = d.reduce_average(p, q)?;
    let u = reduced.index_of(&joined_name(d.name(p), d.name(q)))?;
    let idx = |t: usize| reduced.index_of(d.name(t));
    let quartet = [idx(inst.a)?, idx(inst.b)?, u, idx(inst.inner[0])?];
    let lb = four_point_defect_lb(&reduced.restrict(&quartet)?)?;
    Ok(Thm34Verification {
        first_join: (d.name(p).to_string(), d.name(q).to_string()),
        reduced_defect_lb: lb,
        linf_input: d.linf_distance(&inst.tree_metric)?,
    })
}
