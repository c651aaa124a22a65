#![allow(dead_code)]

use njcert::tree::{random_tree_with_lengths, Split};
use njcert::{DissimilarityMap, PhyloTree};
use rand::Rng;

pub fn tree_uniform<R: Rng>(n: usize, lo: f64, hi: f64, rng: &mut R) -> PhyloTree {
    random_tree_with_lengths(n, rng, |r| r.gen_range(lo..hi)).unwrap()
}

pub fn random_map<R: Rng>(n: usize, rng: &mut R) -> DissimilarityMap {
    let names: Vec<String> = (0..n).map(|i| format!("t{i}")).collect();
    let mut vals = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rng.gen_range(0.5..10.0);
            vals[i * n + j] = v;
            vals[j * n + i] = v;
        }
    }
    DissimilarityMap::new(names, vals).unwrap()
}

/// `d` plus independent uniform noise in `(-r, r)` on every pair.
pub fn perturb<R: Rng>(d: &DissimilarityMap, r: f64, rng: &mut R) -> DissimilarityMap {
    let mut out = d.clone();
    for i in 0..d.len() {
        for j in (i + 1)..d.len() {
            let noise = if r > 0.0 { rng.gen_range(-r..r) } else { 0.0 };
            out.set(i, j, d.get(i, j) + noise);
        }
    }
    out
}

/// Perturbation satisfying the per-edge condition for `split` with edge
/// length `l`: cross pairs move by less than `factor · l/4` either way,
/// same-side pairs by anything in `[-down, factor · l/4)`.
pub fn edge_consistent_perturbation<R: Rng>(
    dt: &DissimilarityMap,
    split: &Split,
    l: f64,
    factor: f64,
    down: f64,
    rng: &mut R,
) -> DissimilarityMap {
    let bound = factor * l / 4.0;
    let mut out = dt.clone();
    for i in 0..dt.len() {
        for j in (i + 1)..dt.len() {
            let noise = if split.same_side(i, j) {
                rng.gen_range(-down..bound)
            } else {
                rng.gen_range(-bound..bound)
            };
            out.set(i, j, dt.get(i, j) + noise);
        }
    }
    out
}

/// Indicator map on `n` taxa: 1 on the pair `(x, y)`, 0 elsewhere.
pub fn indicator(n: usize, x: usize, y: usize) -> DissimilarityMap {
    let names: Vec<String> = (0..n).map(|i| format!("t{i}")).collect();
    DissimilarityMap::from_fn(names, |i, j| {
        if (i, j) == (x, y) || (i, j) == (y, x) {
            1.0
        } else {
            0.0
        }
    })
    .unwrap()
}

/// Whether the trees agree on every split, matching taxa by name.
pub fn same_topology(a: &PhyloTree, b: &PhyloTree) -> bool {
    njcert::tree::rf_distance(a, b).unwrap() == 0
}

/// Whether `t` displays `split`, given as a side over the taxon names of `names`.
pub fn has_split(t: &PhyloTree, names: &[String], split: &Split) -> bool {
    let side: Vec<usize> = split
        .side_a()
        .iter()
        .map(|i| t.taxon_index(&names[i]).unwrap())
        .collect();
    let s = Split::from_side(t.n_taxa(), side).unwrap();
    t.splits().contains(&s)
}
