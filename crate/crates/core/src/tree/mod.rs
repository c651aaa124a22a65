//! Unrooted phylogenetic trees, their splits and induced quartets.

mod newick;
mod quartet;
mod random;
mod split;

pub use quartet::QuartetTopology;
pub use random::{random_tree, random_tree_with_lengths};
pub use split::{Split, TaxonSet};

pub(crate) use quartet::distinct4;
pub(crate) use random::agglomerate_rooted;

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::dissim::DissimilarityMap;
use crate::error::{check_name, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub length: f64,
}

/// Incremental construction of a [`PhyloTree`]. Unlabelled vertices of degree
/// two are suppressed on [`build`](TreeBuilder::build), their two edges merged.
#[derive(Debug, Default, Clone)]
pub struct TreeBuilder {
    labels: Vec<Option<String>>,
    edges: Vec<(usize, usize, f64)>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_leaf(&mut self, name: impl Into<String>) -> usize {
        self.labels.push(Some(name.into()));
        self.labels.len() - 1
    }

    pub fn add_internal(&mut self) -> usize {
        self.labels.push(None);
        self.labels.len() - 1
    }

    pub fn connect(&mut self, u: usize, v: usize, length: f64) {
        self.edges.push((u, v, length));
    }

    pub fn n_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn build(self) -> Result<PhyloTree> {
        let n_nodes = self.labels.len();
        let mut seen = HashMap::new();
        for name in self.labels.iter().flatten() {
            check_name(name)?;
            if seen.insert(name.clone(), ()).is_some() {
                return Err(Error::DuplicateTaxon(name.clone()));
            }
        }
        if seen.len() < 2 {
            return Err(Error::TooFewTaxa {
                needed: 2,
                got: seen.len(),
            });
        }
        if self.edges.len() + 1 != n_nodes {
            return Err(Error::InvalidTree(format!(
                "{} vertices need {} edges, found {}",
                n_nodes,
                n_nodes - 1,
                self.edges.len()
            )));
        }
        for &(u, v, len) in &self.edges {
            if u >= n_nodes || v >= n_nodes || u == v {
                return Err(Error::InvalidTree(format!("bad edge ({u}, {v})")));
            }
            if !len.is_finite() {
                return Err(Error::InvalidTree(format!(
                    "edge ({u}, {v}) has non-finite length"
                )));
            }
        }

        // edge slots; None once merged away
        let mut edges: Vec<Option<(usize, usize, f64)>> =
            self.edges.iter().copied().map(Some).collect();
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
        for (e, &(u, v, _)) in self.edges.iter().enumerate() {
            incident[u].push(e);
            incident[v].push(e);
        }

        // connectivity
        let mut visited = vec![false; n_nodes];
        let mut queue = VecDeque::from([0usize]);
        visited[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &e in &incident[v] {
                let (a, b, _) = self.edges[e];
                let w = if a == v { b } else { a };
                if !visited[w] {
                    visited[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        if count != n_nodes {
            return Err(Error::InvalidTree("graph is not connected".into()));
        }

        let mut alive = vec![true; n_nodes];
        for v in 0..n_nodes {
            let deg = incident[v].len();
            match (&self.labels[v], deg) {
                (Some(name), d) if d != 1 => {
                    return Err(Error::InvalidTree(format!(
                        "labelled vertex {name} has degree {d}; labels are only allowed on leaves"
                    )))
                }
                (None, 1) => {
                    return Err(Error::InvalidTree(
                        "unlabelled leaf vertex".to_string(),
                    ))
                }
                _ => {}
            }
        }
        for v in 0..n_nodes {
            if self.labels[v].is_some() || incident[v].len() != 2 {
                continue;
            }
            let e1 = incident[v][0];
            let e2 = incident[v][1];
            let (a1, b1, l1) = edges[e1].take().expect("live edge");
            let (a2, b2, l2) = edges[e2].take().expect("live edge");
            let u = if a1 == v { b1 } else { a1 };
            let w = if a2 == v { b2 } else { a2 };
            edges[e1] = Some((u, w, l1 + l2));
            incident[w].retain(|&e| e != e2);
            incident[w].push(e1);
            alive[v] = false;
        }

        let mut remap = vec![usize::MAX; n_nodes];
        let mut next = 0;
        for v in 0..n_nodes {
            if alive[v] {
                remap[v] = next;
                next += 1;
            }
        }
        let mut taxa = Vec::new();
        let mut taxon_of = vec![None; next];
        let mut leaf_of = Vec::new();
        for v in 0..n_nodes {
            if let Some(name) = &self.labels[v] {
                taxon_of[remap[v]] = Some(taxa.len());
                leaf_of.push(remap[v]);
                taxa.push(name.clone());
            }
        }
        let mut out_edges = Vec::new();
        let mut adj = vec![Vec::new(); next];
        for (a, b, length) in edges.into_iter().flatten() {
            let (a, b) = (remap[a], remap[b]);
            let id = out_edges.len();
            adj[a].push((b, id));
            adj[b].push((a, id));
            out_edges.push(Edge { a, b, length });
        }
        let tree = PhyloTree {
            taxa,
            leaf_of,
            taxon_of,
            adj,
            edges: out_edges,
        };
        for (id, e) in tree.edges.iter().enumerate() {
            if !tree.is_leaf_edge(id) && e.length < 0.0 {
                return Err(Error::InvalidTree(format!(
                    "internal edge {id} has negative length {}",
                    e.length
                )));
            }
        }
        Ok(tree)
    }
}

/// An unrooted phylogenetic tree with labelled leaves and real edge lengths.
///
/// Internal vertices have degree at least three and internal edges are
/// non-negative. Leaf edges may be negative, which corresponds to shifting the
/// tree metric around that leaf.
#[derive(Debug, Clone)]
pub struct PhyloTree {
    taxa: Vec<String>,
    leaf_of: Vec<usize>,
    taxon_of: Vec<Option<usize>>,
    adj: Vec<Vec<(usize, usize)>>,
    edges: Vec<Edge>,
}

impl PhyloTree {
    pub fn n_taxa(&self) -> usize {
        self.taxa.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn taxa(&self) -> &[String] {
        &self.taxa
    }

    pub fn taxon_name(&self, t: usize) -> &str {
        &self.taxa[t]
    }

    pub fn taxon_index(&self, name: &str) -> Result<usize> {
        self.taxa
            .iter()
            .position(|t| t == name)
            .ok_or_else(|| Error::UnknownTaxon(name.to_string()))
    }

    /// Vertex carrying taxon `t`.
    pub fn leaf(&self, t: usize) -> usize {
        self.leaf_of[t]
    }

    pub fn taxon_at(&self, node: usize) -> Option<usize> {
        self.taxon_of[node]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> Result<&Edge> {
        self.edges.get(e).ok_or(Error::EdgeOutOfRange(e))
    }

    /// `(neighbor, edge id)` pairs around `node`.
    pub fn neighbors(&self, node: usize) -> &[(usize, usize)] {
        &self.adj[node]
    }

    pub fn is_leaf_edge(&self, e: usize) -> bool {
        let Edge { a, b, .. } = self.edges[e];
        self.taxon_of[a].is_some() || self.taxon_of[b].is_some()
    }

    pub fn internal_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(move |&e| !self.is_leaf_edge(e))
    }

    pub fn min_edge_length(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| e.length)
            .fold(f64::INFINITY, f64::min)
    }

    /// Returns a copy with every edge length replaced by `f(edge id, edge, is_leaf_edge)`.
    pub fn map_edge_lengths(
        &self,
        mut f: impl FnMut(usize, &Edge, bool) -> f64,
    ) -> Result<PhyloTree> {
        let mut out = self.clone();
        for id in 0..out.edges.len() {
            let leaf = self.is_leaf_edge(id);
            let len = f(id, &self.edges[id], leaf);
            if !len.is_finite() || (!leaf && len < 0.0) {
                return Err(Error::InvalidTree(format!(
                    "edge {id} cannot take length {len}"
                )));
            }
            out.edges[id].length = len;
        }
        Ok(out)
    }

    pub(crate) fn check_taxon(&self, t: usize) -> Result<()> {
        if t < self.n_taxa() {
            Ok(())
        } else {
            Err(Error::TaxonOutOfRange(t))
        }
    }

    /// Path-length distances between all leaves.
    pub fn tree_metric(&self) -> DissimilarityMap {
        let n = self.n_taxa();
        let mut values = vec![0.0; n * n];
        let mut dist = vec![0.0f64; self.n_nodes()];
        let mut stack = Vec::new();
        for s in 0..n {
            let start = self.leaf_of[s];
            dist[start] = 0.0;
            stack.push((start, usize::MAX));
            while let Some((v, parent)) = stack.pop() {
                if let Some(t) = self.taxon_of[v] {
                    values[s * n + t] = dist[v];
                }
                for &(w, e) in &self.adj[v] {
                    if w != parent {
                        dist[w] = dist[v] + self.edges[e].length;
                        stack.push((w, v));
                    }
                }
            }
        }
        for i in 0..n {
            values[i * n + i] = 0.0;
            for j in 0..i {
                // path sums in opposite directions may differ in the last ulp
                let v = values[i * n + j];
                values[j * n + i] = v;
            }
        }
        DissimilarityMap::from_parts_unchecked(self.taxa.clone(), values)
    }

    /// Number of edges on the path between every pair of leaves.
    pub fn edge_count_matrix(&self) -> Vec<u32> {
        let n = self.n_taxa();
        let mut out = vec![0u32; n * n];
        let mut depth = vec![0u32; self.n_nodes()];
        let mut stack = Vec::new();
        for s in 0..n {
            let start = self.leaf_of[s];
            depth[start] = 0;
            stack.push((start, usize::MAX));
            while let Some((v, parent)) = stack.pop() {
                if let Some(t) = self.taxon_of[v] {
                    out[s * n + t] = depth[v];
                }
                for &(w, _) in &self.adj[v] {
                    if w != parent {
                        depth[w] = depth[v] + 1;
                        stack.push((w, v));
                    }
                }
            }
        }
        out
    }

    /// For every edge, the taxa on the side of its `b` endpoint.
    pub fn edge_clusters(&self) -> Vec<TaxonSet> {
        let n = self.n_taxa();
        let nodes = self.n_nodes();
        let root = 0;
        let mut parent = vec![usize::MAX; nodes];
        let mut order = Vec::with_capacity(nodes);
        let mut stack = vec![root];
        let mut seen = vec![false; nodes];
        seen[root] = true;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &(w, _) in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = v;
                    stack.push(w);
                }
            }
        }
        let mut below: Vec<TaxonSet> = vec![TaxonSet::empty(n); nodes];
        for &v in order.iter().rev() {
            if let Some(t) = self.taxon_of[v] {
                below[v].insert(t);
            }
            if parent[v] != usize::MAX {
                let sub = below[v].clone();
                below[parent[v]].union_with(&sub);
            }
        }
        self.edges
            .iter()
            .map(|e| {
                if parent[e.b] == e.a {
                    below[e.b].clone()
                } else {
                    below[e.a].complement()
                }
            })
            .collect()
    }

    /// Split induced by removing edge `e` (trivial for leaf edges).
    pub fn edge_split(&self, e: usize) -> Result<Split> {
        self.edge(e)?;
        let clusters = self.edge_clusters();
        Ok(Split::new(clusters[e].clone()).expect("edge sides are non-empty"))
    }

    /// One split per internal edge.
    pub fn splits(&self) -> BTreeSet<Split> {
        let clusters = self.edge_clusters();
        self.internal_edges()
            .map(|e| Split::new(clusters[e].clone()).expect("edge sides are non-empty"))
            .collect()
    }

    /// Internal edges paired with their splits.
    pub fn internal_edge_splits(&self) -> Vec<(usize, Split)> {
        let clusters = self.edge_clusters();
        self.internal_edges()
            .map(|e| {
                (
                    e,
                    Split::new(clusters[e].clone()).expect("edge sides are non-empty"),
                )
            })
            .collect()
    }

    /// Edge inducing `split`, if any.
    pub fn find_edge(&self, split: &Split) -> Option<usize> {
        let clusters = self.edge_clusters();
        (0..self.edges.len()).find(|&e| Split::new(clusters[e].clone()).as_ref() == Some(split))
    }

    pub fn quartet_oracle(&self) -> QuartetOracle {
        QuartetOracle {
            n: self.n_taxa(),
            dist: self.edge_count_matrix(),
        }
    }

    /// Topology that the tree induces on four distinct taxa.
    pub fn induced_quartet(&self, i: usize, j: usize, k: usize, l: usize) -> Result<QuartetTopology> {
        for t in [i, j, k, l] {
            self.check_taxon(t)?;
        }
        if !distinct4(i, j, k, l) {
            return Err(Error::RepeatedTaxa);
        }
        Ok(self.quartet_oracle().topology(i, j, k, l))
    }

    /// True iff the path between leaves `i` and `j` has exactly two edges.
    pub fn is_cherry(&self, i: usize, j: usize) -> Result<bool> {
        self.check_taxon(i)?;
        self.check_taxon(j)?;
        if i == j {
            return Err(Error::RepeatedTaxa);
        }
        let pi = self.adj[self.leaf_of[i]][0].0;
        let pj = self.adj[self.leaf_of[j]][0].0;
        Ok(pi == pj && self.taxon_of[pi].is_none())
    }

    /// Whether `x` is interior to the quartet `q = (ij:kl)` of this tree:
    /// none of `(ik:xl)`, `(ik:xj)`, `(ix:jl)`, `(kx:jl)` is induced by the tree.
    pub fn interior_to_quartet(&self, x: usize, q: &QuartetTopology) -> Result<bool> {
        let QuartetTopology::Resolved { cherry1, cherry2 } = *q else {
            return Err(Error::InvalidParameter(
                "interior_to_quartet needs a resolved quartet".into(),
            ));
        };
        let ((i, j), (k, l)) = (cherry1, cherry2);
        self.check_taxon(x)?;
        if [i, j, k, l].contains(&x) {
            return Err(Error::RepeatedTaxa);
        }
        let oracle = self.quartet_oracle();
        if oracle.topology(i, j, k, l) != *q {
            return Err(Error::InvalidParameter(format!(
                "{q:?} is not a quartet of the tree"
            )));
        }
        Ok(oracle.is_interior(x, i, j, k, l))
    }

    /// Same tree with taxon indices reordered to follow `names`.
    pub fn reorder_taxa<S: AsRef<str>>(&self, names: &[S]) -> Result<PhyloTree> {
        let perm = permutation_to(&self.taxa, names)?;
        let mut out = self.clone();
        out.taxa = names.iter().map(|s| s.as_ref().to_string()).collect();
        for (old, &new) in perm.iter().enumerate() {
            out.leaf_of[new] = self.leaf_of[old];
            out.taxon_of[self.leaf_of[old]] = Some(new);
        }
        Ok(out)
    }

    /// Contracts internal edges of zero length, producing vertices of higher degree.
    pub fn collapse_zero_internal(&self) -> PhyloTree {
        let nodes = self.n_nodes();
        let mut rep: Vec<usize> = (0..nodes).collect();
        fn find(rep: &mut [usize], mut v: usize) -> usize {
            while rep[v] != v {
                rep[v] = rep[rep[v]];
                v = rep[v];
            }
            v
        }
        let mut contracted = vec![false; self.edges.len()];
        for e in self.internal_edges().collect::<Vec<_>>() {
            if self.edges[e].length == 0.0 {
                let ra = find(&mut rep, self.edges[e].a);
                let rb = find(&mut rep, self.edges[e].b);
                rep[ra] = rb;
                contracted[e] = true;
            }
        }
        if !contracted.iter().any(|&c| c) {
            return self.clone();
        }
        let mut b = TreeBuilder::new();
        let mut id_of = HashMap::new();
        for t in 0..self.n_taxa() {
            id_of.insert(self.leaf_of[t], b.add_leaf(self.taxa[t].clone()));
        }
        for v in 0..nodes {
            let r = find(&mut rep, v);
            if self.taxon_of[v].is_none() && !id_of.contains_key(&r) {
                id_of.insert(r, b.add_internal());
            }
        }
        for (e, edge) in self.edges.iter().enumerate() {
            if contracted[e] {
                continue;
            }
            let a = id_of[&find(&mut rep, edge.a)];
            let c = id_of[&find(&mut rep, edge.b)];
            b.connect(a, c, edge.length);
        }
        b.build().expect("contracting zero edges keeps a valid tree")
    }

    /// Re-serializes this tree through [`TreeBuilder`], used when taxa are
    /// added or removed by callers.
    pub fn to_builder(&self) -> TreeBuilder {
        let mut b = TreeBuilder::new();
        let mut ids = vec![0; self.n_nodes()];
        for v in 0..self.n_nodes() {
            ids[v] = match self.taxon_of[v] {
                Some(t) => b.add_leaf(self.taxa[t].clone()),
                None => b.add_internal(),
            };
        }
        for e in &self.edges {
            b.connect(ids[e.a], ids[e.b], e.length);
        }
        b
    }
}

/// Answers induced-quartet queries in constant time from the topological
/// (edge-count) distances between leaves.
#[derive(Debug, Clone)]
pub struct QuartetOracle {
    n: usize,
    dist: Vec<u32>,
}

impl QuartetOracle {
    fn d(&self, i: usize, j: usize) -> u32 {
        self.dist[i * self.n + j]
    }

    pub fn n_taxa(&self) -> usize {
        self.n
    }

    /// Taxa must be distinct and in range.
    pub fn topology(&self, i: usize, j: usize, k: usize, l: usize) -> QuartetTopology {
        let s1 = self.d(i, j) + self.d(k, l);
        let s2 = self.d(i, k) + self.d(j, l);
        let s3 = self.d(i, l) + self.d(j, k);
        if s1 < s2 && s1 < s3 {
            QuartetTopology::resolved(i, j, k, l)
        } else if s2 < s1 && s2 < s3 {
            QuartetTopology::resolved(i, k, j, l)
        } else if s3 < s1 && s3 < s2 {
            QuartetTopology::resolved(i, l, j, k)
        } else {
            QuartetTopology::star([i, j, k, l])
        }
    }

    /// True iff `(ij:kl)` is the topology induced on these four taxa.
    pub fn is_quartet(&self, i: usize, j: usize, k: usize, l: usize) -> bool {
        let s1 = self.d(i, j) + self.d(k, l);
        s1 < self.d(i, k) + self.d(j, l) && s1 < self.d(i, l) + self.d(j, k)
    }

    /// Interior predicate for `x` relative to a quartet `(ij:kl)` of the tree.
    pub fn is_interior(&self, x: usize, i: usize, j: usize, k: usize, l: usize) -> bool {
        !(self.is_quartet(i, k, x, l)
            || self.is_quartet(i, k, x, j)
            || self.is_quartet(i, x, j, l)
            || self.is_quartet(k, x, j, l))
    }
}

/// `perm[old] = new` mapping from `from` ordering to `to` ordering.
pub(crate) fn permutation_to<S: AsRef<str>>(from: &[String], to: &[S]) -> Result<Vec<usize>> {
    if from.len() != to.len() {
        return Err(Error::TaxaMismatch(format!(
            "{} taxa versus {}",
            from.len(),
            to.len()
        )));
    }
    let index: HashMap<&str, usize> = to
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_ref(), i))
        .collect();
    if index.len() != to.len() {
        return Err(Error::TaxaMismatch("target ordering repeats a taxon".into()));
    }
    from.iter()
        .map(|name| {
            index
                .get(name.as_str())
                .copied()
                .ok_or_else(|| Error::TaxaMismatch(format!("{name} missing from other side")))
        })
        .collect()
}

/// Robinson-Foulds distance: size of the symmetric difference of the split sets.
pub fn rf_distance(t1: &PhyloTree, t2: &PhyloTree) -> Result<usize> {
    let perm = permutation_to(&t2.taxa, &t1.taxa)?;
    let s1 = t1.splits();
    let s2: BTreeSet<Split> = t2.splits().iter().map(|s| s.relabel(&perm)).collect();
    Ok(split::symmetric_difference(&s1, &s2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> PhyloTree {
        PhyloTree::from_newick("((a:1,b:1):1,c:1,(d:2,e:2):2);").unwrap()
    }

    fn fig2() -> PhyloTree {
        PhyloTree::from_newick(
            "(((a:0.05,b:0.05):0.15,c:0.2):0.8,x:1,(((m:0.05,n:0.05):0.15,p:0.2):0.8,y:1):1);",
        )
        .unwrap()
    }

    fn idx(t: &PhyloTree, names: &str) -> Vec<usize> {
        names
            .split(',')
            .map(|s| t.taxon_index(s).unwrap())
            .collect()
    }

    #[test]
    fn figure1_metric_and_splits() {
        let t = fig1();
        let d = t.tree_metric();
        assert_eq!(d.get_by_name("a", "d").unwrap(), 6.0);
        assert_eq!(d.get_by_name("d", "e").unwrap(), 4.0);
        let splits = t.splits();
        assert_eq!(splits.len(), 2);
        let ab = Split::from_side(5, idx(&t, "a,b")).unwrap();
        let de = Split::from_side(5, idx(&t, "d,e")).unwrap();
        assert!(splits.contains(&ab) && splits.contains(&de));
    }

    #[test]
    fn two_leaf_tree() {
        let t = PhyloTree::from_newick("(a:1,b:2);").unwrap();
        assert_eq!(t.tree_metric().get(0, 1), 3.0);
        assert!(t.splits().is_empty());
        assert!(!t.is_cherry(0, 1).unwrap());
    }

    #[test]
    fn star_has_no_splits() {
        let t = PhyloTree::from_newick("(a:1,b:1,c:1,d:1);").unwrap();
        assert!(t.splits().is_empty());
        assert!(matches!(
            t.induced_quartet(0, 1, 2, 3).unwrap(),
            QuartetTopology::Star(_)
        ));
    }

    #[test]
    fn quartets_and_cherries() {
        let t = fig1();
        let [a, b, c, d, e] = idx(&t, "a,b,c,d,e")[..] else {
            unreachable!()
        };
        assert_eq!(
            t.induced_quartet(a, d, b, e).unwrap(),
            QuartetTopology::resolved(a, b, d, e)
        );
        assert!(t.is_cherry(a, b).unwrap());
        assert!(!t.is_cherry(a, c).unwrap());
        assert!(t.induced_quartet(a, a, b, c).is_err());
        assert!(t.induced_quartet(a, b, c, 9).is_err());

        let t2 = fig2();
        let v = idx(&t2, "a,b,m,n");
        assert_eq!(
            t2.induced_quartet(v[0], v[2], v[1], v[3]).unwrap(),
            QuartetTopology::resolved(v[0], v[1], v[2], v[3])
        );
    }

    #[test]
    fn star_of_three_all_cherries() {
        let t = PhyloTree::from_newick("(a:1,b:2,c:3);").unwrap();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert!(t.is_cherry(i, j).unwrap());
        }
    }

    #[test]
    fn interior_leaves() {
        let t2 = fig2();
        let v = idx(&t2, "a,b,m,n,x,c");
        let q = QuartetTopology::resolved(v[0], v[1], v[2], v[3]);
        assert!(t2.interior_to_quartet(v[4], &q).unwrap());
        // c hangs off the path joining the two cherries, so it is interior too
        assert!(t2.interior_to_quartet(v[5], &q).unwrap());

        let t1 = fig1();
        let w = idx(&t1, "a,b,d,e,c");
        let q1 = QuartetTopology::resolved(w[0], w[1], w[2], w[3]);
        assert!(t1.interior_to_quartet(w[4], &q1).unwrap());

        // a leaf on a cherry branch is not interior
        let t3 = PhyloTree::from_newick("(((a:1,z:1):1,b:1):1,c:1,d:1);").unwrap();
        let u = idx(&t3, "a,b,c,d,z");
        let q3 = QuartetTopology::resolved(u[0], u[1], u[2], u[3]);
        assert!(!t3.interior_to_quartet(u[4], &q3).unwrap());
        let wrong = QuartetTopology::resolved(u[0], u[2], u[1], u[3]);
        assert!(t3.interior_to_quartet(u[4], &wrong).is_err());
    }

    #[test]
    fn rf_examples() {
        let t = fig1();
        assert_eq!(rf_distance(&t, &t).unwrap(), 0);
        let swapped = PhyloTree::from_newick("((a:1,b:1):1,d:1,(c:2,e:2):2);").unwrap();
        assert_eq!(rf_distance(&t, &swapped).unwrap(), 2);
        let other = PhyloTree::from_newick("((a:1,b:1):1,c:1,(d:2,f:2):2);").unwrap();
        assert!(rf_distance(&t, &other).is_err());
    }

    #[test]
    fn reorder_keeps_topology() {
        let t = fig1();
        let r = t.reorder_taxa(&["e", "d", "c", "b", "a"]).unwrap();
        assert_eq!(r.taxon_index("e").unwrap(), 0);
        assert_eq!(rf_distance(&t, &r).unwrap(), 0);
        assert_eq!(r.tree_metric().get(0, 1), 4.0);
    }

    #[test]
    fn collapse_zero_edges() {
        let t = PhyloTree::from_newick("((a:1,b:1):1,c:2,(d:2,e:2):0);").unwrap();
        assert_eq!(t.splits().len(), 2);
        let c = t.collapse_zero_internal();
        assert_eq!(c.splits().len(), 1);
        assert_eq!(c.tree_metric(), t.tree_metric());
    }

    #[test]
    fn builder_rejects_bad_trees() {
        let mut b = TreeBuilder::new();
        let x = b.add_leaf("a");
        let y = b.add_leaf("a");
        b.connect(x, y, 1.0);
        assert!(matches!(b.build(), Err(Error::DuplicateTaxon(_))));

        let mut b = TreeBuilder::new();
        let x = b.add_leaf("a");
        let y = b.add_leaf("b");
        let z = b.add_leaf("c");
        b.connect(x, y, 1.0);
        b.connect(y, z, 1.0);
        assert!(matches!(b.build(), Err(Error::InvalidTree(_))));

        assert!(PhyloTree::from_newick("((a:1,b:1):-1,c:1,d:1);").is_err());
    }
}
