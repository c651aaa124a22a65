use serde::Serialize;

use crate::dissim::{joined_name, DissimilarityMap};
use crate::error::{Error, Result};
use crate::tree::{PhyloTree, TreeBuilder};

/// How the joined pair's distances to the remaining taxa are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Reduction {
    /// `(δ(i,a) + δ(i,b)) / 2`
    #[default]
    Average,
    /// `(δ(i,a) + δ(i,b) − δ(a,b)) / 2`
    Rooted,
}

/// Which pair wins when several attain the optimal criterion value.
///
/// Pairs are compared by the position of their members in the current map,
/// where joined taxa are appended after all surviving ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum TieRule {
    #[default]
    Lexicographic,
    ReverseLexicographic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JoinStep {
    pub pair: (String, String),
    pub q_value: f64,
    pub map_size: usize,
}

/// The agglomeration steps of one run, excluding the final three-way join.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct JoinTrace {
    pub steps: Vec<JoinStep>,
}

impl JoinTrace {
    pub fn pairs(&self) -> Vec<(String, String)> {
        self.steps.iter().map(|s| s.pair.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

const TIE_TOLERANCE: f64 = 1e-12;

/// In-place agglomeration state. Slots are reused: the joined taxon takes
/// over the slot of one of its parents.
pub(crate) struct Engine {
    n: usize,
    mat: Vec<f64>,
    pub(crate) active: Vec<usize>,
    key: Vec<usize>,
    next_key: usize,
    name: Vec<String>,
    node: Vec<usize>,
    is_leaf: Vec<bool>,
    /// Amount by which a slot's row exceeds the root-referenced distances.
    offset: Vec<f64>,
    pub(crate) rowsum: Vec<f64>,
    builder: TreeBuilder,
    reduction: Reduction,
    tie: TieRule,
    pub(crate) trace: JoinTrace,
}

impl Engine {
    pub(crate) fn new(d: &DissimilarityMap, reduction: Reduction, tie: TieRule) -> Result<Self> {
        let n = d.len();
        if n < 3 {
            return Err(Error::TooFewTaxa { needed: 3, got: n });
        }
        let mut builder = TreeBuilder::new();
        let node = d.names().iter().map(|s| builder.add_leaf(s.clone())).collect();
        let mut e = Engine {
            n,
            mat: d.values().to_vec(),
            active: (0..n).collect(),
            key: (0..n).collect(),
            next_key: n,
            name: d.names().to_vec(),
            node,
            is_leaf: vec![true; n],
            offset: vec![0.0; n],
            rowsum: vec![0.0; n],
            builder,
            reduction,
            tie,
            trace: JoinTrace::default(),
        };
        e.recompute_rowsums();
        Ok(e)
    }

    #[inline]
    pub(crate) fn d(&self, a: usize, b: usize) -> f64 {
        self.mat[a * self.n + b]
    }

    pub(crate) fn remaining(&self) -> usize {
        self.active.len()
    }

    pub(crate) fn recompute_rowsums(&mut self) {
        for &a in &self.active {
            self.rowsum[a] = self.active.iter().map(|&b| self.mat[a * self.n + b]).sum();
        }
    }

    #[inline]
    pub(crate) fn q(&self, a: usize, b: usize) -> f64 {
        let m = self.active.len() as f64;
        self.d(a, b) - (self.rowsum[a] + self.rowsum[b]) / (m - 2.0)
    }

    fn key_pair(&self, a: usize, b: usize) -> (usize, usize) {
        let (ka, kb) = (self.key[a], self.key[b]);
        (ka.min(kb), ka.max(kb))
    }

    /// Whether candidate `(a, b)` with value `q` beats the incumbent.
    pub(crate) fn better(&self, q: f64, a: usize, b: usize, best: Option<(f64, usize, usize)>) -> bool {
        let Some((bq, ba, bb)) = best else {
            return true;
        };
        let tol = TIE_TOLERANCE * q.abs().max(bq.abs()).max(1.0);
        if q < bq - tol {
            return true;
        }
        if q > bq + tol {
            return false;
        }
        let (cand, inc) = (self.key_pair(a, b), self.key_pair(ba, bb));
        match self.tie {
            TieRule::Lexicographic => cand < inc,
            TieRule::ReverseLexicographic => cand > inc,
        }
    }

    /// Best partner for `a` among active slots.
    pub(crate) fn best_partner(&self, a: usize) -> Option<usize> {
        let mut best = None;
        for &x in &self.active {
            if x != a {
                let q = self.q(a, x);
                if self.better(q, a, x, best) {
                    best = Some((q, a, x));
                }
            }
        }
        best.map(|(_, _, x)| x)
    }

    fn branch(&mut self, u: usize, slot: usize, raw: f64) {
        let mut len = raw - self.offset[slot];
        if !self.is_leaf[slot] && len < 0.0 {
            len = 0.0;
        }
        self.builder.connect(u, self.node[slot], len);
    }

    /// Joins slots `a` and `b`; the new taxon occupies slot `a`.
    pub(crate) fn join(&mut self, a: usize, b: usize) {
        let m = self.active.len();
        let q_value = self.q(a, b);
        let dab = self.d(a, b);
        let la = 0.5 * dab + (self.rowsum[a] - self.rowsum[b]) / (2.0 * (m as f64 - 2.0));
        let lb = dab - la;
        let u = self.builder.add_internal();
        self.branch(u, a, la);
        self.branch(u, b, lb);

        let (first, second) = if self.key[a] < self.key[b] { (a, b) } else { (b, a) };
        let pair = (self.name[first].clone(), self.name[second].clone());
        let new_name = joined_name(&pair.0, &pair.1);
        self.trace.steps.push(JoinStep {
            pair,
            q_value,
            map_size: m,
        });

        let correction = match self.reduction {
            Reduction::Average => 0.0,
            Reduction::Rooted => dab,
        };
        let n = self.n;
        let mut new_sum = 0.0;
        for idx in 0..self.active.len() {
            let k = self.active[idx];
            if k == a || k == b {
                continue;
            }
            let (dak, dbk) = (self.mat[a * n + k], self.mat[b * n + k]);
            let v = 0.5 * (dak + dbk - correction);
            self.rowsum[k] += v - dak - dbk;
            self.mat[a * n + k] = v;
            self.mat[k * n + a] = v;
            new_sum += v;
        }
        self.rowsum[a] = new_sum;
        self.offset[a] = match self.reduction {
            Reduction::Average => 0.5 * dab,
            Reduction::Rooted => 0.0,
        };
        self.name[a] = new_name;
        self.key[a] = self.next_key;
        self.next_key += 1;
        self.node[a] = u;
        self.is_leaf[a] = false;
        let pos = self.active.iter().position(|&x| x == b).expect("b is active");
        self.active.remove(pos);
    }

    /// Joins the last three taxa at a single vertex and returns the tree.
    pub(crate) fn finish(mut self) -> Result<(PhyloTree, JoinTrace)> {
        debug_assert_eq!(self.active.len(), 3);
        let [x, y, z] = [self.active[0], self.active[1], self.active[2]];
        let c = self.builder.add_internal();
        let lx = 0.5 * (self.d(x, y) + self.d(x, z) - self.d(y, z));
        let ly = 0.5 * (self.d(x, y) + self.d(y, z) - self.d(x, z));
        let lz = 0.5 * (self.d(x, z) + self.d(y, z) - self.d(x, y));
        self.branch(c, x, lx);
        self.branch(c, y, ly);
        self.branch(c, z, lz);
        let tree = self.builder.build()?;
        Ok((tree, self.trace))
    }
}
