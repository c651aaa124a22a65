use rand::Rng;

use super::{PhyloTree, TreeBuilder};
use crate::error::{Error, Result};

/// Random unrooted binary tree on taxa `t0..t{n-1}`, built by repeatedly
/// joining a uniformly chosen pair of active vertices under a new vertex until
/// three remain, which are then joined to a single degree-3 vertex. Every edge
/// gets `edge_length`.
pub fn random_tree<R: Rng + ?Sized>(n: usize, edge_length: f64, rng: &mut R) -> Result<PhyloTree> {
    random_tree_with_lengths(n, rng, |_| edge_length)
}

/// As [`random_tree`], with each edge length drawn from `length`.
pub fn random_tree_with_lengths<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    mut length: impl FnMut(&mut R) -> f64,
) -> Result<PhyloTree> {
    if n < 3 {
        return Err(Error::TooFewTaxa { needed: 3, got: n });
    }
    let mut b = TreeBuilder::new();
    let mut active: Vec<usize> = (0..n).map(|i| b.add_leaf(format!("t{i}"))).collect();
    agglomerate(&mut b, &mut active, 3, rng, &mut length);
    let center = b.add_internal();
    for v in active {
        let len = length(rng);
        b.connect(center, v, len);
    }
    b.build()
}

fn agglomerate<R: Rng + ?Sized>(
    b: &mut TreeBuilder,
    active: &mut Vec<usize>,
    stop_at: usize,
    rng: &mut R,
    length: &mut impl FnMut(&mut R) -> f64,
) {
    while active.len() > stop_at {
        let i = rng.gen_range(0..active.len());
        let mut j = rng.gen_range(0..active.len() - 1);
        if j >= i {
            j += 1;
        }
        let parent = b.add_internal();
        let (li, lj) = (length(rng), length(rng));
        b.connect(parent, active[i], li);
        b.connect(parent, active[j], lj);
        let (hi, lo) = (i.max(j), i.min(j));
        active.swap_remove(hi);
        active[lo] = parent;
    }
}

/// Joins `active` vertices of `b` pairwise at random down to a single root
/// vertex, which is returned.
pub(crate) fn agglomerate_rooted<R: Rng + ?Sized>(
    b: &mut TreeBuilder,
    mut active: Vec<usize>,
    edge_length: f64,
    rng: &mut R,
) -> usize {
    agglomerate(b, &mut active, 1, rng, &mut |_| edge_length);
    active[0]
}
