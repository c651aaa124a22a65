//! Certificates for the success conditions of neighbor-joining, each checked
//! against a reference tree, plus closed-form coefficient oracles for the
//! scaled Z-criterion.
//!
//! Every check produces a [`DiagnosticReport`]. Inequalities are strict: a
//! tuple passes only when its slack is positive, and `margin` is the smallest
//! slack seen.

mod coefficients;
mod record;

pub use coefficients::{
    alpha_coefficient, beta_coefficient, four_point_defect_lb, lemma29_bound, lemma31_alpha,
    lemma32_bound, s_statistic, Lemma31Term, SStatistic,
};
pub use record::{write_csv, FlatRecord};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dissim::DissimilarityMap;
use crate::error::{Error, Result};
use crate::nj::w_unchecked;
use crate::tree::{PhyloTree, QuartetOracle, QuartetTopology, Split};

/// Reports keep at most this many witnesses; `violations` counts all of them.
pub const MAX_WITNESSES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    QuartetConsistency,
    QuartetAdditivity,
    AttesonRadius,
    ABConsistency,
    EdgeGuarantee,
}

impl Condition {
    pub fn as_str(&self) -> &'static str {
        match self {
            Condition::QuartetConsistency => "quartet_consistency",
            Condition::QuartetAdditivity => "quartet_additivity",
            Condition::AttesonRadius => "atteson_radius",
            Condition::ABConsistency => "ab_consistency",
            Condition::EdgeGuarantee => "edge_guarantee",
        }
    }
}

impl Serialize for Condition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// A failing instance. The condition requires `lhs > rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub taxa: Vec<String>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticReport {
    pub condition: Condition,
    pub holds: bool,
    /// Smallest `lhs − rhs` over the checked instances, `+∞` when nothing
    /// was checked.
    pub margin: f64,
    pub witnesses: Vec<Witness>,
    pub violations: usize,
    pub checked: usize,
    /// Fraction of checked instances that pass; 1 when nothing was checked.
    pub coverage: f64,
    /// Set when `checked` is a uniform sample rather than every instance.
    pub sampled: bool,
}

impl DiagnosticReport {
    fn from_tally(condition: Condition, t: Tally, sampled: bool) -> Self {
        let coverage = if t.checked == 0 {
            1.0
        } else {
            (t.checked - t.violations) as f64 / t.checked as f64
        };
        DiagnosticReport {
            condition,
            holds: t.violations == 0,
            margin: t.margin,
            witnesses: t.witnesses,
            violations: t.violations,
            checked: t.checked,
            coverage,
            sampled,
        }
    }

    /// Percentage of checked instances that pass.
    pub fn percent(&self) -> f64 {
        100.0 * self.coverage
    }
}

/// Running minimum, counters and capped witness list.
#[derive(Debug, Clone)]
struct Tally {
    checked: usize,
    violations: usize,
    margin: f64,
    witnesses: Vec<Witness>,
}

impl Default for Tally {
    fn default() -> Self {
        Tally {
            checked: 0,
            violations: 0,
            margin: f64::INFINITY,
            witnesses: Vec::new(),
        }
    }
}

impl Tally {
    fn record(&mut self, lhs: f64, rhs: f64, taxa: impl FnOnce() -> Vec<String>) {
        let slack = lhs - rhs;
        self.checked += 1;
        self.margin = self.margin.min(slack);
        if !(slack > 0.0) {
            self.violations += 1;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(Witness {
                    taxa: taxa(),
                    lhs,
                    rhs,
                });
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.violations += other.violations;
        self.margin = self.margin.min(other.margin);
        let room = MAX_WITNESSES - self.witnesses.len();
        self.witnesses.extend(other.witnesses.into_iter().take(room));
        self
    }
}

/// `d` with its taxa put in the order of `t`.
pub(crate) fn align(d: &DissimilarityMap, t: &PhyloTree) -> Result<DissimilarityMap> {
    if d.names() == t.taxa() {
        return Ok(d.clone());
    }
    d.reorder(t.taxa()).map_err(|_| {
        Error::TaxaMismatch("dissimilarity map and tree have different taxa".into())
    })
}

fn names(d: &DissimilarityMap, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| d.name(i).to_string()).collect()
}

/// Runs `f(i, tally)` for each first index in parallel and merges the
/// partial tallies in index order.
fn par_tally(n: usize, f: impl Fn(usize, &mut Tally) + Sync) -> Tally {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut t = Tally::default();
            f(i, &mut t);
            t
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Tally::default(), Tally::merge)
}

/// Checks that every resolved quartet `(ij:kl)` of `t` wins its comparison:
/// `w(ij:kl) > max(w(ik:jl), w(il:jk))`.
///
/// Internal edges of length zero are contracted first, so quartets that
/// hinge on them are unresolved and skipped.
pub fn quartet_consistent(d: &DissimilarityMap, t: &PhyloTree) -> Result<DiagnosticReport> {
    let d = align(d, t)?;
    let t = t.collapse_zero_internal();
    let oracle = t.quartet_oracle();
    let n = d.len();
    let tally = par_tally(n, |i, tally| {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                for l in (k + 1)..n {
                    let QuartetTopology::Resolved {
                        cherry1: (p, q),
                        cherry2: (r, s),
                    } = oracle.topology(i, j, k, l)
                    else {
                        continue;
                    };
                    let w_true = w_unchecked(&d, p, q, r, s);
                    let alt = w_unchecked(&d, p, r, q, s).max(w_unchecked(&d, p, s, q, r));
                    tally.record(w_true, alt, || names(&d, &[p, q, r, s]));
                }
            }
        }
    });
    Ok(DiagnosticReport::from_tally(
        Condition::QuartetConsistency,
        tally,
        false,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdditivityOptions {
    /// Largest taxon count enumerated exhaustively.
    pub max_exact_taxa: usize,
    /// Tuples drawn uniformly when the taxon count exceeds the cap.
    pub samples: usize,
    pub seed: u64,
}

impl Default for AdditivityOptions {
    fn default() -> Self {
        AdditivityOptions {
            max_exact_taxa: 25,
            samples: 100_000,
            seed: 0,
        }
    }
}

/// [`quartet_additive_with`] under default options.
pub fn quartet_additive(d: &DissimilarityMap, t: &PhyloTree) -> Result<DiagnosticReport> {
    quartet_additive_with(d, t, AdditivityOptions::default())
}

/// Checks the additivity inequality for every applicable tuple: for each
/// quartet `(ij:kl)` of `t` (in both orientations), each `x` interior to it
/// and each non-interior `y` with `(ij:xy)` not a quartet of `t`, require
/// `w(kl:xy) > w(ij:xy)`. Witness taxa are listed as `[i, j, k, l, x, y]`.
///
/// Above `opts.max_exact_taxa` taxa the tuples are sampled uniformly with
/// replacement and the report is flagged as sampled.
pub fn quartet_additive_with(
    d: &DissimilarityMap,
    t: &PhyloTree,
    opts: AdditivityOptions,
) -> Result<DiagnosticReport> {
    let d = align(d, t)?;
    let t = t.collapse_zero_internal();
    let oracle = t.quartet_oracle();
    let n = d.len();
    if n > opts.max_exact_taxa {
        let tally = sample_additivity(&d, &oracle, opts);
        return Ok(DiagnosticReport::from_tally(
            Condition::QuartetAdditivity,
            tally,
            true,
        ));
    }
    let tally = par_tally(n, |i, tally| {
        let mut interior = vec![false; n];
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                for l in (k + 1)..n {
                    let QuartetTopology::Resolved {
                        cherry1: (p, q),
                        cherry2: (r, s),
                    } = oracle.topology(i, j, k, l)
                    else {
                        continue;
                    };
                    for (x, slot) in interior.iter_mut().enumerate() {
                        *slot = ![p, q, r, s].contains(&x) && oracle.is_interior(x, p, q, r, s);
                    }
                    for x in (0..n).filter(|&x| interior[x]) {
                        for y in 0..n {
                            if interior[y] || [p, q, r, s].contains(&y) {
                                continue;
                            }
                            for ((a, b), (c, e)) in [((p, q), (r, s)), ((r, s), (p, q))] {
                                check_tuple(&d, &oracle, tally, [a, b, c, e], x, y);
                            }
                        }
                    }
                }
            }
        }
    });
    Ok(DiagnosticReport::from_tally(
        Condition::QuartetAdditivity,
        tally,
        false,
    ))
}

#[inline]
fn check_tuple(
    d: &DissimilarityMap,
    oracle: &QuartetOracle,
    tally: &mut Tally,
    [i, j, k, l]: [usize; 4],
    x: usize,
    y: usize,
) {
    if oracle.is_quartet(i, j, x, y) {
        return;
    }
    let lhs = w_unchecked(d, k, l, x, y);
    let rhs = w_unchecked(d, i, j, x, y);
    tally.record(lhs, rhs, || names(d, &[i, j, k, l, x, y]));
}

fn sample_additivity(d: &DissimilarityMap, oracle: &QuartetOracle, opts: AdditivityOptions) -> Tally {
    let n = d.len();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut tally = Tally::default();
    let max_draws = opts.samples.saturating_mul(1000).max(1000);
    let mut draws = 0;
    while tally.checked < opts.samples && draws < max_draws {
        draws += 1;
        let picks = rand::seq::index::sample(&mut rng, n, 6).into_vec();
        let (quad, x, y) = ([picks[0], picks[1], picks[2], picks[3]], picks[4], picks[5]);
        let QuartetTopology::Resolved {
            cherry1: (p, q),
            cherry2: (r, s),
        } = oracle.topology(quad[0], quad[1], quad[2], quad[3])
        else {
            continue;
        };
        if !oracle.is_interior(x, p, q, r, s) || oracle.is_interior(y, p, q, r, s) {
            continue;
        }
        let oriented = if rng.gen::<bool>() {
            [p, q, r, s]
        } else {
            [r, s, p, q]
        };
        check_tuple(d, oracle, &mut tally, oriented, x, y);
    }
    tally
}

/// Checks `‖d − δ_T‖∞ < ½ · min_e l(e)` over all edges of `t`.
pub fn atteson_radius_check(d: &DissimilarityMap, t: &PhyloTree) -> Result<DiagnosticReport> {
    let d = align(d, t)?;
    let dt = t.tree_metric();
    let n = d.len();
    let (mut worst, mut pair) = (0.0f64, (0, 1.min(n.saturating_sub(1))));
    for i in 0..n {
        for j in (i + 1)..n {
            let dev = (d.get(i, j) - dt.get(i, j)).abs();
            if dev > worst {
                worst = dev;
                pair = (i, j);
            }
        }
    }
    let mut tally = Tally::default();
    tally.record(0.5 * t.min_edge_length(), worst, || names(&d, &[pair.0, pair.1]));
    Ok(DiagnosticReport::from_tally(Condition::AttesonRadius, tally, false))
}

/// Checks per-edge consistency for the split `A|B` of internal edge `e`:
/// same-side pairs need `δ − δ_T < l(e)/4` (no lower bound), cross pairs
/// need `|δ − δ_T| < l(e)/4`.
pub fn ab_consistent(d: &DissimilarityMap, t: &PhyloTree, e: usize) -> Result<DiagnosticReport> {
    let d = align(d, t)?;
    let len = t.edge(e)?.length;
    if t.is_leaf_edge(e) {
        return Err(Error::LeafEdge(e));
    }
    if !(len > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "edge {e} has length {len}; a positive length is required"
        )));
    }
    let split = t.edge_split(e)?;
    Ok(ab_report(&d, &t.tree_metric(), &split, len))
}

fn ab_report(d: &DissimilarityMap, dt: &DissimilarityMap, split: &Split, len: f64) -> DiagnosticReport {
    let bound = len / 4.0;
    let n = d.len();
    let mut tally = Tally::default();
    for i in 0..n {
        for j in (i + 1)..n {
            let dev = d.get(i, j) - dt.get(i, j);
            let dev = if split.same_side(i, j) { dev } else { dev.abs() };
            tally.record(bound, dev, || names(d, &[i, j]));
        }
    }
    DiagnosticReport::from_tally(Condition::ABConsistency, tally, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GuaranteeKind {
    /// `4 · ‖d − δ_T‖∞ < l(e)`.
    SufficientLinf,
    /// The per-edge condition of [`ab_consistent`] holds.
    FullDef24,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GuaranteedEdge {
    pub edge: usize,
    #[serde(skip)]
    pub split: Split,
    pub kind: GuaranteeKind,
    pub margin: f64,
}

/// Internal edges of `t` whose splits are certain to appear in the output
/// of neighbor-joining (and of fast neighbor-joining) on `d`.
pub fn guaranteed_edges(d: &DissimilarityMap, t: &PhyloTree) -> Result<Vec<GuaranteedEdge>> {
    let d = align(d, t)?;
    let dt = t.tree_metric();
    let linf = d.linf_distance(&dt)?;
    let mut out = Vec::new();
    for (e, split) in t.internal_edge_splits() {
        let len = t.edges()[e].length;
        if !(len > 0.0) {
            continue;
        }
        if 4.0 * linf < len {
            out.push(GuaranteedEdge {
                edge: e,
                split,
                kind: GuaranteeKind::SufficientLinf,
                margin: len / 4.0 - linf,
            });
            continue;
        }
        let report = ab_report(&d, &dt, &split, len);
        if report.holds {
            out.push(GuaranteedEdge {
                edge: e,
                split,
                kind: GuaranteeKind::FullDef24,
                margin: report.margin,
            });
        }
    }
    Ok(out)
}

/// Summary over internal edges: holds when every internal edge is
/// guaranteed; `coverage` is the guaranteed fraction and `margin` the
/// smallest per-edge margin. Zero-length internal edges count as failures.
pub fn edge_guarantee_report(d: &DissimilarityMap, t: &PhyloTree) -> Result<DiagnosticReport> {
    let d = align(d, t)?;
    let dt = t.tree_metric();
    let mut tally = Tally::default();
    for (e, split) in t.internal_edge_splits() {
        let len = t.edges()[e].length;
        let side = |s: &Split| -> Vec<String> {
            s.side_a().iter().map(|i| d.name(i).to_string()).collect()
        };
        if !(len > 0.0) {
            tally.record(0.0, 0.0, || side(&split));
            continue;
        }
        let r = ab_report(&d, &dt, &split, len);
        tally.record(r.margin, 0.0, || side(&split));
    }
    Ok(DiagnosticReport::from_tally(Condition::EdgeGuarantee, tally, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexamples::{example_eight_leaf, example_five_leaf};

    #[test]
    fn consistency_example12_fails_on_abce() {
        let ex = example_five_leaf();
        let r = quartet_consistent(&ex.distorted, &ex.tree).unwrap();
        assert!(!r.holds);
        assert!(r.margin <= 0.0);
        let mut taxa = r.witnesses[0].taxa.clone();
        taxa.sort();
        assert_eq!(taxa, ["a", "b", "c", "e"]);
        assert!(r.witnesses.iter().all(|w| w.taxa.contains(&"a".to_string())));
        assert!(r.coverage < 1.0 && r.coverage > 0.0);
    }

    #[test]
    fn consistency_example13_holds() {
        let ex = example_eight_leaf();
        let r = quartet_consistent(&ex.distorted, &ex.tree).unwrap();
        assert!(r.holds, "{:?}", r.witnesses);
        assert_eq!(r.checked, 70);
        assert_eq!(r.coverage, 1.0);
    }

    #[test]
    fn consistency_margin_on_tree_metric() {
        // w(true) = 2P and each alternative is −P, so the slack is 3P with
        // P the smallest quartet middle path; here the shortest internal edge.
        let ex = example_five_leaf();
        let r = quartet_consistent(&ex.tree_metric, &ex.tree).unwrap();
        assert!(r.holds);
        assert!((r.margin - 3.0).abs() < 1e-12);
    }

    #[test]
    fn additivity_example13_fails() {
        let ex = example_eight_leaf();
        let r = quartet_additive(&ex.distorted, &ex.tree).unwrap();
        assert!(!r.holds);
        assert!(!r.sampled);
        assert!(r.checked > 0);
        let r = quartet_additive(&ex.tree_metric, &ex.tree).unwrap();
        assert!(r.holds);
    }

    #[test]
    fn additivity_sampling_mode() {
        let ex = example_eight_leaf();
        let opts = AdditivityOptions {
            max_exact_taxa: 4,
            samples: 500,
            seed: 9,
        };
        let r = quartet_additive_with(&ex.tree_metric, &ex.tree, opts).unwrap();
        assert!(r.sampled && r.holds);
        assert_eq!(r.checked, 500);
        let again = quartet_additive_with(&ex.tree_metric, &ex.tree, opts).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn atteson_examples() {
        let ex = example_five_leaf();
        let r = atteson_radius_check(&ex.tree_metric, &ex.tree).unwrap();
        assert!(r.holds);
        assert_eq!(r.margin, 0.5);
        let r = atteson_radius_check(&ex.distorted, &ex.tree).unwrap();
        assert!(!r.holds);
        assert_eq!(r.margin, 0.5 - 3.0);
        assert_eq!(r.witnesses[0].taxa, ["a", "e"]);

        let mut d = ex.tree_metric.clone();
        d.set(1, 2, d.get(1, 2) + 0.5);
        assert!(!atteson_radius_check(&d, &ex.tree).unwrap().holds);
    }

    #[test]
    fn ab_consistency_is_one_sided_within_sides() {
        let ex = example_five_leaf();
        let t = &ex.tree;
        for e in t.internal_edges() {
            let l = t.edges()[e].length;
            let r = ab_consistent(&ex.tree_metric, t, e).unwrap();
            assert!(r.holds);
            assert_eq!(r.margin, l / 4.0);
            let split = t.edge_split(e).unwrap();
            let (same, cross) = {
                let mut same = None;
                let mut cross = None;
                for i in 0..5 {
                    for j in (i + 1)..5 {
                        if split.same_side(i, j) {
                            same.get_or_insert((i, j));
                        } else {
                            cross.get_or_insert((i, j));
                        }
                    }
                }
                (same.unwrap(), cross.unwrap())
            };
            let mut d = ex.tree_metric.clone();
            d.set(same.0, same.1, d.get(same.0, same.1) - 10.0 * l);
            assert!(ab_consistent(&d, t, e).unwrap().holds);
            let mut d = ex.tree_metric.clone();
            d.set(cross.0, cross.1, d.get(cross.0, cross.1) + l / 3.0);
            assert!(!ab_consistent(&d, t, e).unwrap().holds);
        }
        let leaf = (0..t.edges().len()).find(|&e| t.is_leaf_edge(e)).unwrap();
        assert_eq!(ab_consistent(&ex.tree_metric, t, leaf), Err(Error::LeafEdge(leaf)));
    }

    #[test]
    fn guaranteed_edges_on_tree_metric() {
        let ex = example_eight_leaf();
        let g = guaranteed_edges(&ex.tree_metric, &ex.tree).unwrap();
        assert_eq!(g.len(), ex.tree.splits().len());
        assert!(g.iter().all(|e| e.kind == GuaranteeKind::SufficientLinf));
        let r = edge_guarantee_report(&ex.tree_metric, &ex.tree).unwrap();
        assert!(r.holds && r.coverage == 1.0);
    }

    #[test]
    fn mismatched_taxa_rejected() {
        let ex = example_five_leaf();
        let other = example_eight_leaf();
        assert!(matches!(
            quartet_consistent(&ex.distorted, &other.tree),
            Err(Error::TaxaMismatch(_))
        ));
    }

    #[test]
    fn reordered_map_is_aligned() {
        let ex = example_five_leaf();
        let d = ex.distorted.reorder(&["e", "d", "c", "b", "a"]).unwrap();
        let r = quartet_consistent(&d, &ex.tree).unwrap();
        assert_eq!(r, quartet_consistent(&ex.distorted, &ex.tree).unwrap());
    }
}
