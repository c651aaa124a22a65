//! Simulation sweep: random trees, Jukes-Cantor sequences, distance
//! estimation, neighbor-joining and the condition checks, one record per
//! replicate.

use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::{
    atteson_radius_check, quartet_additive_with, quartet_consistent, AdditivityOptions,
};
use crate::dissim::DissimilarityMap;
use crate::error::{Error, Result};
use crate::nj::neighbor_joining;
use crate::tree::{random_tree, rf_distance, PhyloTree};

const BASES: [char; 4] = ['A', 'C', 'G', 'T'];

/// Sequences over `{A, C, G, T}` stored as codes `0..4`, one per taxon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub names: Vec<String>,
    pub seqs: Vec<Vec<u8>>,
}

impl Alignment {
    pub fn len(&self) -> usize {
        self.seqs.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sequence_string(&self, t: usize) -> String {
        self.seqs[t].iter().map(|&c| BASES[c as usize]).collect()
    }
}

/// Evolves `seq_len` independent sites down `t` from a uniform random root
/// sequence. On a branch of length `l` each site is redrawn uniformly from
/// the four bases with probability `1 − e^{−4l/3}`, which changes it with
/// probability `¾(1 − e^{−4l/3})`.
pub fn jc_evolve<R: Rng + ?Sized>(t: &PhyloTree, seq_len: usize, rng: &mut R) -> Result<Alignment> {
    if seq_len == 0 {
        return Err(Error::InvalidParameter("sequence length must be positive".into()));
    }
    if let Some(e) = t.edges().iter().find(|e| e.length < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "negative edge length {} cannot be simulated",
            e.length
        )));
    }
    let root = t.leaf(0);
    let mut seqs: Vec<Option<Vec<u8>>> = vec![None; t.n_nodes()];
    seqs[root] = Some((0..seq_len).map(|_| rng.gen_range(0..4u8)).collect());
    let mut stack = vec![(root, usize::MAX)];
    while let Some((v, parent)) = stack.pop() {
        for &(w, e) in t.neighbors(v) {
            if w == parent {
                continue;
            }
            let p = 1.0 - (-4.0 * t.edges()[e].length / 3.0).exp();
            let child = seqs[v]
                .as_ref()
                .expect("parent sequence is set first")
                .iter()
                .map(|&c| if rng.gen::<f64>() < p { rng.gen_range(0..4u8) } else { c })
                .collect();
            seqs[w] = Some(child);
            stack.push((w, v));
        }
    }
    let seqs = (0..t.n_taxa())
        .map(|i| seqs[t.leaf(i)].take().expect("every leaf is reached"))
        .collect();
    Ok(Alignment {
        names: t.taxa().to_vec(),
        seqs,
    })
}

/// Jukes-Cantor distances with the taxon pairs whose mismatch fraction
/// reached `¾`. Those entries hold the largest finite estimate plus one.
#[derive(Debug, Clone)]
pub struct JcDistances {
    pub map: DissimilarityMap,
    pub saturated: Vec<(usize, usize)>,
}

impl JcDistances {
    pub fn is_saturated(&self) -> bool {
        !self.saturated.is_empty()
    }
}

/// `−¾ ln(1 − 4p/3)`, or `None` once `p ≥ ¾`.
pub fn jc_formula(p: f64) -> Option<f64> {
    if p >= 0.75 {
        None
    } else {
        Some(-0.75 * (1.0 - 4.0 * p / 3.0).ln())
    }
}

pub fn jc_distance(aln: &Alignment) -> Result<JcDistances> {
    let n = aln.seqs.len();
    let len = aln.len();
    if len == 0 {
        return Err(Error::InvalidParameter("empty alignment".into()));
    }
    if aln.seqs.iter().any(|s| s.len() != len) || aln.names.len() != n {
        return Err(Error::InvalidParameter("sequences differ in length".into()));
    }
    let mut est = vec![Some(0.0); n * n];
    let mut saturated = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let diff = aln.seqs[i]
                .iter()
                .zip(&aln.seqs[j])
                .filter(|(a, b)| a != b)
                .count();
            let v = jc_formula(diff as f64 / len as f64);
            if v.is_none() {
                saturated.push((i, j));
            }
            est[i * n + j] = v;
            est[j * n + i] = v;
        }
    }
    let fill = est.iter().flatten().copied().fold(0.0, f64::max) + 1.0;
    let values = est.into_iter().map(|v| v.unwrap_or(fill)).collect();
    Ok(JcDistances {
        map: DissimilarityMap::new(aln.names.clone(), values)?,
        saturated,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub tree_count: usize,
    pub taxa_count: usize,
    pub edge_length: f64,
    pub replicates: usize,
    pub lengths: Vec<usize>,
    pub seed: u64,
    pub additivity: AdditivityOptions,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            tree_count: 35,
            taxa_count: 20,
            edge_length: 0.1,
            replicates: 100,
            lengths: default_lengths(),
            seed: 0,
            additivity: AdditivityOptions::default(),
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.tree_count == 0 || self.replicates == 0 {
            return bad("tree and replicate counts must be positive".into());
        }
        if self.taxa_count < 4 {
            return bad(format!("need at least 4 taxa, got {}", self.taxa_count));
        }
        if !(self.edge_length > 0.0) || !self.edge_length.is_finite() {
            return bad(format!("edge length must be positive, got {}", self.edge_length));
        }
        if self.lengths.is_empty() {
            return bad("no sequence lengths given".into());
        }
        if self.lengths[0] == 0 || self.lengths.windows(2).any(|w| w[0] >= w[1]) {
            return bad("sequence lengths must be positive and strictly increasing".into());
        }
        Ok(())
    }

    pub fn record_count(&self) -> usize {
        self.tree_count * self.lengths.len() * self.replicates
    }
}

/// `count` lengths spaced evenly on a log scale from `lo` to `hi`, rounded.
pub fn log_spaced_lengths(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    if count <= 1 {
        return vec![lo];
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<usize> = (0..count)
        .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp().round() as usize)
        .collect();
    out.dedup();
    out
}

/// 28 lengths from 100 to 10,000.
pub fn default_lengths() -> Vec<usize> {
    log_spaced_lengths(100, 10_000, 28)
}

/// One replicate. Condition fields are `None` for saturated replicates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub tree_id: usize,
    pub replicate: usize,
    pub seq_len: usize,
    pub nj_correct: u8,
    pub atteson: Option<u8>,
    pub consistent: Option<u8>,
    pub additive: Option<u8>,
    pub pct_consistent_quartets: Option<f64>,
    pub pct_additive_tuples: Option<f64>,
    pub rf_distance: usize,
    pub saturated: u8,
}

impl SweepRecord {
    pub fn is_saturated(&self) -> bool {
        self.saturated == 1
    }

    fn flag(v: Option<u8>) -> bool {
        v == Some(1)
    }

    pub fn atteson_holds(&self) -> bool {
        Self::flag(self.atteson)
    }

    pub fn consistent_holds(&self) -> bool {
        Self::flag(self.consistent)
    }

    pub fn additive_holds(&self) -> bool {
        Self::flag(self.additive)
    }
}

/// The trees of a sweep. Tree `k` uses its own stream of the seed's
/// generator, distinct from every replicate stream.
pub fn sweep_trees(cfg: &SweepConfig) -> Result<Vec<PhyloTree>> {
    (0..cfg.tree_count)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(u64::MAX - k as u64);
            random_tree(cfg.taxa_count, cfg.edge_length, &mut rng)
        })
        .collect()
}

fn cell_rng(cfg: &SweepConfig, tree_id: usize, len_idx: usize, replicate: usize) -> ChaCha8Rng {
    let cell = (tree_id * cfg.lengths.len() + len_idx) * cfg.replicates + replicate;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(cell as u64);
    rng
}

/// Runs one replicate against `tree`.
pub fn evaluate_replicate<R: Rng + ?Sized>(
    tree: &PhyloTree,
    seq_len: usize,
    additivity: AdditivityOptions,
    rng: &mut R,
) -> Result<(SweepRecord, JcDistances)> {
    let aln = jc_evolve(tree, seq_len, rng)?;
    let est = jc_distance(&aln)?;
    let (built, _) = neighbor_joining(&est.map)?;
    let rf = rf_distance(&built, tree)?;
    let mut rec = SweepRecord {
        tree_id: 0,
        replicate: 0,
        seq_len,
        nj_correct: (rf == 0) as u8,
        atteson: None,
        consistent: None,
        additive: None,
        pct_consistent_quartets: None,
        pct_additive_tuples: None,
        rf_distance: rf,
        saturated: est.is_saturated() as u8,
    };
    if !est.is_saturated() {
        let opts = AdditivityOptions {
            seed: rng.gen(),
            ..additivity
        };
        let att = atteson_radius_check(&est.map, tree)?;
        let con = quartet_consistent(&est.map, tree)?;
        let add = quartet_additive_with(&est.map, tree, opts)?;
        rec.atteson = Some(att.holds as u8);
        rec.consistent = Some(con.holds as u8);
        rec.additive = Some(add.holds as u8);
        rec.pct_consistent_quartets = Some(con.percent());
        rec.pct_additive_tuples = Some(add.percent());
    }
    Ok((rec, est))
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    run_sweep_with_progress(cfg, |_, _| {})
}

/// [`run_sweep`] calling `progress(done, total)` after each replicate.
/// Replicates run in parallel; records come back in
/// `(tree, length, replicate)` order and do not depend on thread count.
pub fn run_sweep_with_progress(
    cfg: &SweepConfig,
    progress: impl Fn(usize, usize) + Sync,
) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    let trees = sweep_trees(cfg)?;
    let total = cfg.record_count();
    let done = AtomicUsize::new(0);
    let cells: Vec<(usize, usize, usize)> = (0..cfg.tree_count)
        .flat_map(|t| {
            (0..cfg.lengths.len()).flat_map(move |l| (0..cfg.replicates).map(move |r| (t, l, r)))
        })
        .collect();
    cells
        .into_par_iter()
        .map(|(t, l, r)| {
            let mut rng = cell_rng(cfg, t, l, r);
            let (mut rec, _) = evaluate_replicate(&trees[t], cfg.lengths[l], cfg.additivity, &mut rng)?;
            rec.tree_id = t;
            rec.replicate = r;
            progress(done.fetch_add(1, Ordering::Relaxed) + 1, total);
            Ok(rec)
        })
        .collect()
}

/// Aggregates for one sequence length. Condition fractions and quartet
/// percentages are over unsaturated replicates only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthSummary {
    pub seq_len: usize,
    pub records: usize,
    pub saturated: usize,
    pub frac_nj_correct: f64,
    pub frac_atteson: f64,
    pub frac_consistent: f64,
    pub frac_additive: f64,
    pub frac_consistent_and_additive: f64,
    pub mean_pct_consistent_quartets: f64,
    pub mean_pct_additive_tuples: f64,
}

pub fn summarize(records: &[SweepRecord]) -> Result<Vec<LengthSummary>> {
    if records.is_empty() {
        return Err(Error::InvalidParameter("no records to summarize".into()));
    }
    let mut lens: Vec<usize> = records.iter().map(|r| r.seq_len).collect();
    lens.sort_unstable();
    lens.dedup();
    Ok(lens
        .into_iter()
        .map(|len| {
            let group: Vec<&SweepRecord> = records.iter().filter(|r| r.seq_len == len).collect();
            let clean: Vec<&SweepRecord> = group.iter().copied().filter(|r| !r.is_saturated()).collect();
            let frac = |f: &dyn Fn(&SweepRecord) -> bool| {
                if clean.is_empty() {
                    f64::NAN
                } else {
                    clean.iter().filter(|r| f(r)).count() as f64 / clean.len() as f64
                }
            };
            let mean = |f: &dyn Fn(&SweepRecord) -> Option<f64>| {
                if clean.is_empty() {
                    f64::NAN
                } else {
                    clean.iter().filter_map(|r| f(r)).sum::<f64>() / clean.len() as f64
                }
            };
            LengthSummary {
                seq_len: len,
                records: group.len(),
                saturated: group.len() - clean.len(),
                frac_nj_correct: group.iter().filter(|r| r.nj_correct == 1).count() as f64
                    / group.len() as f64,
                frac_atteson: frac(&|r| r.atteson_holds()),
                frac_consistent: frac(&|r| r.consistent_holds()),
                frac_additive: frac(&|r| r.additive_holds()),
                frac_consistent_and_additive: frac(&|r| r.consistent_holds() && r.additive_holds()),
                mean_pct_consistent_quartets: mean(&|r| r.pct_consistent_quartets),
                mean_pct_additive_tuples: mean(&|r| r.pct_additive_tuples),
            }
        })
        .collect())
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::InvalidParameter(format!("csv output failed: {e}"))
}

fn write_rows<W: Write, T: Serialize>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)
}

/// Writes records with the header
/// `tree_id,replicate,seq_len,nj_correct,atteson,consistent,additive,pct_consistent_quartets,pct_additive_tuples,rf_distance,saturated`.
/// Condition fields of saturated replicates are left empty.
pub fn write_records_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    write_rows(records, out)
}

pub fn write_summary_csv<W: Write>(summary: &[LengthSummary], out: W) -> Result<()> {
    write_rows(summary, out)
}
