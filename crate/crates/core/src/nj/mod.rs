//! Neighbor-joining and its selection criteria.
//!
//! [`nj`] is the classic cubic-time agglomeration: every round it evaluates
//! the Q-criterion on all pairs, joins the minimiser and reduces the map.
//! [`fnj`] only evaluates a linear-size set of *visible* pairs per round,
//! where `b` is visible from `a` if it optimises the criterion in `a`'s row,
//! giving quadratic total time.

mod criteria;
mod engine;

pub use criteria::{
    four_point_topology, q_matrix, scaled_z, scaled_z_matrix, w_value, z_matrix, FourPoint,
    PairMatrix,
};
pub use engine::{JoinStep, JoinTrace, Reduction, TieRule};

pub(crate) use criteria::{choose2, w_unchecked};

use crate::dissim::DissimilarityMap;
use crate::error::Result;
use crate::tree::PhyloTree;
use engine::Engine;

/// Classic neighbor-joining.
///
/// Output branch lengths follow the usual assignment for the joined pair and
/// the final three taxa, with negative internal lengths clamped to zero.
pub fn nj(d: &DissimilarityMap, reduction: Reduction, tie: TieRule) -> Result<(PhyloTree, JoinTrace)> {
    let mut e = Engine::new(d, reduction, tie)?;
    while e.remaining() > 3 {
        e.recompute_rowsums();
        let mut best = None;
        for (p, &a) in e.active.iter().enumerate() {
            for &b in &e.active[p + 1..] {
                let q = e.q(a, b);
                if e.better(q, a, b, best) {
                    best = Some((q, a, b));
                }
            }
        }
        let (_, a, b) = best.expect("at least one pair");
        e.join(a, b);
    }
    e.finish()
}

/// [`nj`] with the averaging reduction and lexicographic tie-breaking.
pub fn neighbor_joining(d: &DissimilarityMap) -> Result<(PhyloTree, JoinTrace)> {
    nj(d, Reduction::Average, TieRule::Lexicographic)
}

/// Fast neighbor-joining in `O(n²)`.
///
/// Each taxon remembers its visible partner. A round evaluates the
/// remembered pairs under the current row sums, joins the best one, drops
/// every remembered pair that touched the joined taxa, and computes the
/// visible partner of the new taxon. Row sums are updated incrementally.
pub fn fnj_with(d: &DissimilarityMap, reduction: Reduction, tie: TieRule) -> Result<(PhyloTree, JoinTrace)> {
    let mut e = Engine::new(d, reduction, tie)?;
    // Partner and the distance to it; the distance stays exact because the
    // entry is dropped as soon as either side is joined.
    let mut visible: Vec<Option<(usize, f64)>> = vec![None; d.len()];
    let partner = |e: &Engine, a: usize| e.best_partner(a).map(|b| (b, e.d(a, b)));
    for &a in &e.active {
        visible[a] = partner(&e, a);
    }
    while e.remaining() > 3 {
        let scale = 1.0 / (e.remaining() as f64 - 2.0);
        let mut best = None;
        for &a in &e.active {
            if let Some((b, dab)) = visible[a] {
                let q = dab - (e.rowsum[a] + e.rowsum[b]) * scale;
                if e.better(q, a, b, best) {
                    best = Some((q, a, b));
                }
            }
        }
        let (_, a, b) = best.expect("the newest taxon always has a visible partner");
        e.join(a, b);
        visible[b] = None;
        for &x in &e.active {
            if matches!(visible[x], Some((v, _)) if v == a || v == b) {
                visible[x] = None;
            }
        }
        visible[a] = partner(&e, a);
    }
    e.finish()
}

/// [`fnj_with`] with the averaging reduction and lexicographic tie-breaking.
pub fn fnj(d: &DissimilarityMap) -> Result<(PhyloTree, JoinTrace)> {
    fnj_with(d, Reduction::Average, TieRule::Lexicographic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexamples::{example_eight_leaf, example_five_leaf};
    use crate::tree::rf_distance;

    #[test]
    fn example12_recovers_topology() {
        let ex = example_five_leaf();
        let (t, trace) = neighbor_joining(&ex.distorted).unwrap();
        assert_eq!(rf_distance(&t, &ex.tree).unwrap(), 0);
        assert_eq!(trace.len(), 2);
    }

    #[test]
    fn example13_joins_x_and_y() {
        let ex = example_eight_leaf();
        let (t, trace) = neighbor_joining(&ex.distorted).unwrap();
        assert_eq!(trace.steps[0].pair, ("x".to_string(), "y".to_string()));
        assert!((trace.steps[0].q_value + 5.2).abs() < 1e-9);
        let (x, y) = (t.taxon_index("x").unwrap(), t.taxon_index("y").unwrap());
        assert!(t.is_cherry(x, y).unwrap());
        assert!(rf_distance(&t, &ex.tree).unwrap() > 0);
    }

    #[test]
    fn three_taxa_star_with_lengths() {
        let d = DissimilarityMap::from_rows(
            &["a", "b", "c"],
            &[&[0., 3., 4.], &[3., 0., 5.], &[4., 5., 0.]],
        )
        .unwrap();
        let (t, trace) = nj(&d, Reduction::Rooted, TieRule::Lexicographic).unwrap();
        assert!(trace.is_empty());
        assert_eq!(t.tree_metric(), d);
        let (f, _) = fnj(&d).unwrap();
        assert_eq!(f.tree_metric(), d);
    }

    #[test]
    fn too_few_taxa() {
        let d = DissimilarityMap::from_rows(&["a", "b"], &[&[0., 1.], &[1., 0.]]).unwrap();
        assert!(neighbor_joining(&d).is_err());
        assert!(fnj(&d).is_err());
    }

    #[test]
    fn lengths_recovered_on_tree_metric_both_reductions() {
        let ex = example_five_leaf();
        for r in [Reduction::Average, Reduction::Rooted] {
            let (t, _) = nj(&ex.tree_metric, r, TieRule::Lexicographic).unwrap();
            let got = t.tree_metric().reorder(ex.tree_metric.names()).unwrap();
            assert!(got.linf_distance(&ex.tree_metric).unwrap() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn tie_rules_differ_on_symmetric_input() {
        let sym = PhyloTree::from_newick("((a:1,b:1):1,c:1,(d:1,e:1):1);").unwrap().tree_metric();
        let (_, lex) = nj(&sym, Reduction::Average, TieRule::Lexicographic).unwrap();
        let (_, rev) = nj(&sym, Reduction::Average, TieRule::ReverseLexicographic).unwrap();
        assert_eq!(lex.steps[0].pair, ("a".to_string(), "b".to_string()));
        assert_eq!(rev.steps[0].pair, ("d".to_string(), "e".to_string()));
    }
}
