use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use njcert::counterexamples::{
    example_eight_leaf, example_five_leaf, theorem34_instance, verify_theorem34, Thm34Params,
};
use njcert::diagnostics::{
    ab_consistent, atteson_radius_check, edge_guarantee_report, guaranteed_edges,
    quartet_additive_with, quartet_consistent, write_csv, AdditivityOptions, DiagnosticReport,
};
use njcert::nj::{fnj_with, nj, Reduction, TieRule};
use njcert::simlab::{run_sweep_with_progress, summarize, write_records_csv, write_summary_csv, SweepConfig};
use njcert::tree::Split;
use njcert::{DissimilarityMap, PhyloTree};
use rand::rngs::StdRng;
use rand::SeedableRng;
use thiserror::Error;

use crate::{resolve_seed, Check, Method, ReductionArg, Which};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error("{path}: {source}")]
    Input { path: PathBuf, source: njcert::Error },

    #[error(transparent)]
    Lib(#[from] njcert::Error),

    #[error("{0}")]
    Usage(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(io_err(path))
}

fn read_map(path: &Path) -> Result<DissimilarityMap, CliError> {
    DissimilarityMap::from_phylip(&read(path)?).map_err(|e| CliError::Input {
        path: path.to_path_buf(),
        source: e.into(),
    })
}

fn read_tree(path: &Path) -> Result<PhyloTree, CliError> {
    PhyloTree::from_newick(read(path)?.trim()).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(io_err(path))
}

fn create(path: &Path) -> Result<fs::File, CliError> {
    fs::File::create(path).map_err(io_err(path))
}

pub fn build(dist: &Path, method: Method, reduction: ReductionArg, out: Option<&Path>) -> Result<(), CliError> {
    let d = read_map(dist)?;
    let reduction = match reduction {
        ReductionArg::Average => Reduction::Average,
        ReductionArg::Rooted => Reduction::Rooted,
    };
    let (tree, trace) = match method {
        Method::Nj => nj(&d, reduction, TieRule::Lexicographic)?,
        Method::Fnj => fnj_with(&d, reduction, TieRule::Lexicographic)?,
    };
    for step in &trace.steps {
        eprintln!(
            "join {} {} q={} taxa={}",
            step.pair.0, step.pair.1, step.q_value, step.map_size
        );
    }
    let newick = tree.to_newick();
    match out {
        Some(path) => write(path, &format!("{newick}\n")),
        None => {
            println!("{newick}");
            Ok(())
        }
    }
}

pub struct DiagnoseArgs<'a> {
    pub dist: &'a Path,
    pub tree: &'a Path,
    pub checks: &'a [Check],
    pub split: Option<&'a [String]>,
    pub max_exact_taxa: usize,
    pub samples: usize,
    pub seed: Option<u64>,
    pub json: bool,
    pub csv: Option<&'a Path>,
}

fn split_edge(t: &PhyloTree, names: &[String]) -> Result<usize, CliError> {
    let side = names
        .iter()
        .map(|s| t.taxon_index(s))
        .collect::<njcert::Result<Vec<_>>>()?;
    Split::from_side(t.n_taxa(), side)
        .and_then(|s| t.find_edge(&s))
        .ok_or_else(|| CliError::Usage(format!("no edge of the tree separates {{{}}}", names.join(","))))
}

/// Returns whether every requested check holds.
pub fn diagnose(args: DiagnoseArgs<'_>) -> Result<bool, CliError> {
    let d = read_map(args.dist)?;
    let t = read_tree(args.tree)?;
    let mut reports: Vec<(String, DiagnosticReport)> = Vec::new();
    let mut guaranteed = None;
    for check in args.checks {
        match check {
            Check::Consistency => reports.push((String::new(), quartet_consistent(&d, &t)?)),
            Check::Additivity => {
                let seed = if d.len() > args.max_exact_taxa {
                    resolve_seed(args.seed)
                } else {
                    args.seed.unwrap_or(0)
                };
                let opts = AdditivityOptions {
                    max_exact_taxa: args.max_exact_taxa,
                    samples: args.samples,
                    seed,
                };
                reports.push((String::new(), quartet_additive_with(&d, &t, opts)?));
            }
            Check::Atteson => reports.push((String::new(), atteson_radius_check(&d, &t)?)),
            Check::Ab => {
                let edges = match args.split {
                    Some(names) => vec![split_edge(&t, names)?],
                    None => t.internal_edges().collect(),
                };
                for e in edges {
                    reports.push((format!("edge {e}"), ab_consistent(&d, &t, e)?));
                }
            }
            Check::Edges => {
                reports.push((String::new(), edge_guarantee_report(&d, &t)?));
                guaranteed = Some(guaranteed_edges(&d, &t)?);
            }
        }
    }
    let all_hold = reports.iter().all(|(_, r)| r.holds);

    let mut out = io::stdout().lock();
    if args.json {
        let value = serde_json::json!({
            "holds": all_hold,
            "reports": reports.iter().map(|(label, r)| {
                let mut v = serde_json::to_value(r).expect("reports serialize");
                v["coverage_percent"] = serde_json::json!(r.percent());
                if !label.is_empty() {
                    v["label"] = serde_json::json!(label);
                }
                v
            }).collect::<Vec<_>>(),
            "guaranteed_edges": guaranteed.as_ref().map(|g| g.iter().map(|e| serde_json::json!({
                "edge": e.edge,
                "split": side_names(&t, &e.split),
                "kind": e.kind,
                "margin": e.margin,
            })).collect::<Vec<_>>()),
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&value).expect("json output"))
            .map_err(io_err(Path::new("<stdout>")))?;
    } else {
        for (label, r) in &reports {
            print_report(&mut out, label, r).map_err(io_err(Path::new("<stdout>")))?;
        }
        if let Some(g) = &guaranteed {
            for e in g {
                writeln!(
                    out,
                    "  guaranteed edge {} {{{}}} by {:?}, margin {}",
                    e.edge,
                    side_names(&t, &e.split).join(","),
                    e.kind,
                    e.margin
                )
                .map_err(io_err(Path::new("<stdout>")))?;
            }
        }
    }
    if let Some(path) = args.csv {
        let plain: Vec<DiagnosticReport> = reports.into_iter().map(|(_, r)| r).collect();
        write_csv(&plain, create(path)?)?;
    }
    Ok(all_hold)
}

fn side_names(t: &PhyloTree, s: &Split) -> Vec<String> {
    s.side_a().iter().map(|i| t.taxon_name(i).to_string()).collect()
}

fn print_report(out: &mut impl Write, label: &str, r: &DiagnosticReport) -> io::Result<()> {
    let name = if label.is_empty() {
        r.condition.as_str().to_string()
    } else {
        format!("{} ({label})", r.condition.as_str())
    };
    writeln!(
        out,
        "{name}: {} margin={} checked={} violations={} coverage={:.2}%{}",
        if r.holds { "holds" } else { "fails" },
        r.margin,
        r.checked,
        r.violations,
        r.percent(),
        if r.sampled { " (sampled)" } else { "" }
    )?;
    for w in r.witnesses.iter().take(5) {
        writeln!(out, "  witness {{{}}}: {} <= {}", w.taxa.join(","), w.lhs, w.rhs)?;
    }
    if r.witnesses.len() > 5 {
        writeln!(out, "  ... {} more witnesses kept", r.witnesses.len() - 5)?;
    }
    Ok(())
}

pub fn simulate(cfg: &SweepConfig, out: &Path, summary: Option<&Path>) -> Result<(), CliError> {
    cfg.validate()?;
    let last = AtomicUsize::new(0);
    let records = run_sweep_with_progress(cfg, |done, total| {
        let pct = done * 100 / total;
        if last.fetch_max(pct, Ordering::Relaxed) < pct {
            eprint!("\rsimulating: {pct:>3}% ({done}/{total})");
        }
    })?;
    eprintln!();
    write_records_csv(&records, create(out)?)?;
    log::info!("wrote {} records to {}", records.len(), out.display());
    if let Some(path) = summary {
        write_summary_csv(&summarize(&records)?, create(path)?)?;
    }
    Ok(())
}

fn export(dir: &Path, stem: &str, tree: &PhyloTree, metric: &DissimilarityMap, distorted: &DissimilarityMap) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    write(&dir.join(format!("{stem}.nwk")), &format!("{}\n", tree.to_newick()))?;
    write(&dir.join(format!("{stem}_tree_metric.phy")), &metric.to_phylip())?;
    write(&dir.join(format!("{stem}.phy")), &distorted.to_phylip())
}

pub fn counterexample(
    which: Which,
    outdir: &Path,
    params: Thm34Params,
    seed: Option<u64>,
    json: bool,
) -> Result<(), CliError> {
    match which {
        Which::Five => {
            let f = example_five_leaf();
            export(outdir, "five", &f.tree, &f.tree_metric, &f.distorted)
        }
        Which::Eight => {
            let f = example_eight_leaf();
            export(outdir, "eight", &f.tree, &f.tree_metric, &f.distorted)
        }
        Which::Thm34 => {
            let mut rng = StdRng::seed_from_u64(resolve_seed(seed));
            let inst = theorem34_instance(params, &mut rng)?;
            export(outdir, "thm34", &inst.tree, &inst.tree_metric, &inst.distorted)?;
            let v = verify_theorem34(&inst)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&v).expect("json output"));
            } else {
                println!("first_join=({},{})", v.first_join.0, v.first_join.1);
                println!("reduced_defect_lb={}", v.reduced_defect_lb);
                println!("linf_input={}", v.linf_input);
                println!("beta_quarter={}", params.beta / 4.0);
            }
            Ok(())
        }
    }
}
