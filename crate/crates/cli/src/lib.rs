//! Command implementations behind the `scafnav` binary.
//!
//! Results go to the supplied writer (stdout in the binary) as JSON or
//! TSV; diagnostics are the caller's business.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use scafnav_core::algebra::{
    fbdd_intersection, fbdd_search, lower_cone_indexed, union_scaffolds, upper_cone, ConeCaps, FbddError,
};
use scafnav_core::export::{export_pairs, verify_pairs, write_pairs, ExportOptions, PairKind};
use scafnav_core::index::{load_index, save_index, BuildParams, HypergraphIndex, IndexError, ScaffoldSummary};
use scafnav_core::ingest::{ingest_paths, IngestError, IngestOptions, DEFAULT_BATCH_SIZE};
use scafnav_core::mcs::{intersection, McsSummary, DEFAULT_MCS_BUDGET};
use scafnav_core::molgraph::SmilesError;
use scafnav_core::scaffold::{scaffold_key, Scaffold};
use scafnav_core::stats::{CorpusStats, StatsOptions, DEFAULT_TAIL_CUTOFF};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input from the user: exit code 1.
    #[error("{0}")]
    User(String),
    /// Anything else: exit code 2.
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

impl From<SmilesError> for CliError {
    fn from(e: SmilesError) -> Self {
        CliError::User(e.to_string())
    }
}

impl From<IndexError> for CliError {
    fn from(e: IndexError) -> Self {
        CliError::User(e.to_string())
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Io { .. } => CliError::User(e.to_string()),
            IngestError::Pool(_) => CliError::Internal(e.to_string()),
        }
    }
}

impl From<FbddError> for CliError {
    fn from(e: FbddError) -> Self {
        match &e {
            FbddError::Hits(errors) => {
                let lines: Vec<String> = errors
                    .iter()
                    .map(|h| format!("hit {} ({}): {}", h.index, h.hit, h.problem))
                    .collect();
                CliError::User(format!("{e}\n{}", lines.join("\n")))
            }
            _ => CliError::User(e.to_string()),
        }
    }
}

fn write_err(e: std::io::Error) -> CliError {
    CliError::Internal(format!("write failed: {e}"))
}

#[derive(Debug, Parser)]
#[command(name = "scafnav", version, about = "Scaffold-class navigation over molecule corpora")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an index from .smi files.
    Ingest(IngestArgs),
    /// Corpus statistics for an index.
    Stats(StatsArgs),
    /// Query an index.
    Query(QueryArgs),
    /// Write training pairs.
    ExportPairs(ExportArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Keep only the largest component of multi-component records.
    #[arg(long, default_value_t = true, num_args = 0..=1, default_missing_value = "true", action = clap::ArgAction::Set)]
    pub keep_largest_fragment: bool,
    #[arg(long, default_value_t = scafnav_core::index::DEFAULT_MAX_FRAGMENT_RINGS)]
    pub max_fragment_rings: u32,
    #[arg(long, default_value_t = DEFAULT_BATCH_SIZE)]
    pub batch_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, default_value_t = DEFAULT_TAIL_CUTOFF)]
    pub tail_cutoff: usize,
    #[arg(long, default_value_t = 10)]
    pub top_k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[command(subcommand)]
    pub query: Query,
    /// Index directory; `scaffold` and `mcs` work without one.
    #[arg(long, global = true)]
    pub index: Option<PathBuf>,
    #[arg(long, global = true)]
    pub limit: Option<usize>,
    #[arg(long, global = true, default_value_t = ConeCaps::default().max_depth)]
    pub max_depth: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Query {
    /// Project a molecule onto its scaffold.
    Scaffold { smiles: String },
    /// Members of a scaffold class.
    Expand { scaffold: String },
    Successors { scaffold: String },
    Predecessors { scaffold: String },
    Uppercone { scaffold: String },
    Lowercone { scaffold: String },
    /// Maximum common substructure of two scaffolds.
    Mcs {
        s1: String,
        s2: String,
        #[arg(long, default_value_t = DEFAULT_MCS_BUDGET)]
        budget: u64,
    },
    /// Common immediate successors of two scaffolds.
    Union { s1: String, s2: String },
    /// Scaffolds in the upper cone of every hit.
    Fbdd {
        #[arg(required = true)]
        hits: Vec<String>,
        /// Comma-separated hit positions to intersect.
        #[arg(long, value_delimiter = ',')]
        subset: Option<Vec<usize>>,
        /// Report maximal hit subsets instead of one intersection.
        #[arg(long)]
        search: bool,
        #[arg(long, default_value_t = 1)]
        min_subset_size: usize,
    },
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long)]
    pub kind: String,
    #[arg(long, default_value_t = 1)]
    pub augment: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Fraction of scaffold classes held out of the training file.
    #[arg(long, default_value_t = 0.0)]
    pub holdout_fraction: f64,
    /// Where held-out pairs go; defaults to `<out>.holdout`.
    #[arg(long)]
    pub holdout_out: Option<PathBuf>,
    /// Reparse and check every written pair against the index.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub bind: IpAddr,
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Ingest(a) => ingest(a, out),
        Command::Stats(a) => stats(a, out),
        Command::Query(a) => query(a, out),
        Command::ExportPairs(a) => export(a, out),
        Command::Serve(a) => serve(a),
    }
}

fn print_json<T: Serialize + ?Sized>(out: &mut dyn Write, v: &T) -> Result<(), CliError> {
    let s = serde_json::to_string_pretty(v).map_err(|e| CliError::Internal(e.to_string()))?;
    writeln!(out, "{s}").map_err(write_err)
}

fn ingest(a: IngestArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.workers == Some(0) {
        return Err(CliError::User("--workers must be at least 1".into()));
    }
    let opts = IngestOptions {
        params: BuildParams {
            keep_largest_fragment: a.keep_largest_fragment,
            max_fragment_rings: a.max_fragment_rings,
        },
        workers: a.workers,
        batch_size: a.batch_size,
    };
    let (idx, report) = ingest_paths(&a.input, opts)?;
    let manifest = save_index(&idx, &a.out).map_err(|e| CliError::Internal(e.to_string()))?;
    print_json(out, &json!({ "report": report, "counts": manifest.counts, "out": a.out }))
}

fn open_index(path: &Path) -> Result<HypergraphIndex, CliError> {
    Ok(load_index(path)?)
}

fn stats(a: StatsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let idx = open_index(&a.index)?;
    let s = CorpusStats::compute(
        &idx,
        &StatsOptions {
            tail_cutoff: a.tail_cutoff,
            top_k: a.top_k,
            seed: a.seed,
        },
    );
    let text = match a.format {
        Format::Json => s.to_json(),
        Format::Tsv => s.to_tsv(),
    };
    out.write_all(text.as_bytes()).map_err(write_err)
}

fn need_index(a: &QueryArgs) -> Result<HypergraphIndex, CliError> {
    match &a.index {
        Some(p) => open_index(p),
        None => Err(CliError::User("this query needs --index <dir>".into())),
    }
}

fn indexed(idx: &HypergraphIndex, smiles: &str) -> Result<(Scaffold, u32), CliError> {
    let s = scaffold_key(smiles)?;
    let id = idx
        .lookup(&s.key)
        .ok_or_else(|| CliError::User(format!("scaffold {:?} is not in the index", s.key.as_str())))?;
    Ok((s, id))
}

fn summaries(idx: &HypergraphIndex, ids: &[u32], limit: Option<usize>) -> Result<Vec<ScaffoldSummary>, CliError> {
    ids.iter()
        .take(limit.unwrap_or(usize::MAX))
        .map(|&id| idx.summary(id).map_err(CliError::from))
        .collect()
}

fn print_list(out: &mut dyn Write, format: Format, wrapper: Value, list: &[ScaffoldSummary]) -> Result<(), CliError> {
    match format {
        Format::Json => print_json(out, &wrapper),
        Format::Tsv => {
            for s in list {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    s.scaffold,
                    s.ring_count,
                    s.class_size,
                    u8::from(s.is_virtual)
                )
                .map_err(write_err)?;
            }
            Ok(())
        }
    }
}

fn query(a: QueryArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let caps = ConeCaps {
        max_depth: a.max_depth,
        ..ConeCaps::default()
    };
    match &a.query {
        Query::Scaffold { smiles } => {
            let s = scaffold_key(smiles)?;
            let mut v = json!({ "scaffold": s.key, "ring_count": s.ring_count });
            if a.index.is_some() {
                let idx = need_index(&a)?;
                match idx.lookup(&s.key) {
                    Some(id) => {
                        let sum = idx.summary(id)?;
                        v["indexed"] = json!(true);
                        v["class_size"] = json!(sum.class_size);
                        v["virtual"] = json!(sum.is_virtual);
                    }
                    None => v["indexed"] = json!(false),
                }
            }
            match a.format {
                Format::Json => print_json(out, &v),
                Format::Tsv => writeln!(out, "{}\t{}", s.key, s.ring_count).map_err(write_err),
            }
        }
        Query::Expand { scaffold } => {
            let idx = need_index(&a)?;
            let (s, _) = indexed(&idx, scaffold)?;
            let members = idx.expand_class(&s, a.limit)?;
            match a.format {
                Format::Json => {
                    let list: Vec<Value> = members
                        .iter()
                        .map(|m| json!({ "id": m.id, "smiles": m.canonical, "source_tag": m.source_tag }))
                        .collect();
                    print_json(out, &json!({ "scaffold": s.key, "members": list }))
                }
                Format::Tsv => {
                    for m in members {
                        writeln!(out, "{}\t{}", m.canonical, m.source_tag.as_deref().unwrap_or("")).map_err(write_err)?;
                    }
                    Ok(())
                }
            }
        }
        Query::Successors { scaffold } | Query::Predecessors { scaffold } => {
            let idx = need_index(&a)?;
            let (s, id) = indexed(&idx, scaffold)?;
            let (name, ids) = match a.query {
                Query::Successors { .. } => ("successors", idx.successor_ids(id)),
                _ => ("predecessors", idx.predecessor_ids(id)),
            };
            let list = summaries(&idx, ids, a.limit)?;
            print_list(out, a.format, json!({ "scaffold": s.key, name: list }), &list)
        }
        Query::Uppercone { scaffold } | Query::Lowercone { scaffold } => {
            let idx = need_index(&a)?;
            let (s, _) = indexed(&idx, scaffold)?;
            let r = match a.query {
                Query::Uppercone { .. } => upper_cone(&idx, &s, caps)?,
                _ => lower_cone_indexed(&idx, &s, caps)?,
            };
            let list = summaries(&idx, &r.member_ids, a.limit)?;
            print_list(
                out,
                a.format,
                json!({ "root": s.key, "members": list, "truncated": r.truncated, "max_depth": caps.max_depth }),
                &list,
            )
        }
        Query::Mcs { s1, s2, budget } => {
            let r = intersection(&scaffold_key(s1)?, &scaffold_key(s2)?, *budget)?;
            let sum = McsSummary::from(&r);
            match a.format {
                Format::Json => print_json(out, &sum),
                Format::Tsv => writeln!(out, "{}\t{}\t{}\t{}", sum.common, sum.atoms, sum.bonds, u8::from(sum.exhausted))
                    .map_err(write_err),
            }
        }
        Query::Union { s1, s2 } => {
            let idx = need_index(&a)?;
            let (a1, _) = indexed(&idx, s1)?;
            let (a2, _) = indexed(&idx, s2)?;
            let ids: Vec<u32> = union_scaffolds(&idx, &a1, &a2)?
                .iter()
                .map(|s| idx.id_of(s))
                .collect::<Result<_, _>>()?;
            let list = summaries(&idx, &ids, a.limit)?;
            print_list(out, a.format, json!({ "s1": a1.key, "s2": a2.key, "scaffolds": list }), &list)
        }
        Query::Fbdd {
            hits,
            subset,
            search,
            min_subset_size,
        } => {
            let idx = need_index(&a)?;
            if *search {
                let found = fbdd_search(&idx, hits, *min_subset_size, caps)?;
                match a.format {
                    Format::Json => print_json(out, &json!({ "results": found })),
                    Format::Tsv => {
                        for r in &found {
                            let subset: Vec<String> = r.subset.iter().map(usize::to_string).collect();
                            for s in &r.scaffolds {
                                writeln!(out, "{}\t{}", subset.join(","), s.key).map_err(write_err)?;
                            }
                        }
                        Ok(())
                    }
                }
            } else {
                let r = fbdd_intersection(&idx, hits, subset.as_deref(), caps)?;
                match a.format {
                    Format::Json => print_json(out, &r),
                    Format::Tsv => {
                        for s in &r.scaffolds {
                            writeln!(out, "{}\t{}", s.key, s.ring_count).map_err(write_err)?;
                        }
                        Ok(())
                    }
                }
            }
        }
    }
}

fn write_pair_file(path: &Path, pairs: &[scafnav_core::export::TrainingPair]) -> Result<(), CliError> {
    let f = File::create(path).map_err(|e| CliError::User(format!("{}: {e}", path.display())))?;
    write_pairs(pairs, BufWriter::new(f)).map_err(write_err)
}

fn export(a: ExportArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let kind: PairKind = a.kind.parse().map_err(|e: scafnav_core::export::UnknownKind| CliError::User(e.to_string()))?;
    if a.augment == 0 {
        return Err(CliError::User("--augment must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&a.holdout_fraction) {
        return Err(CliError::User("--holdout-fraction must be in [0, 1]".into()));
    }
    let idx = open_index(&a.index)?;
    let mut opts = ExportOptions::new(kind, a.augment, a.seed);
    opts.holdout_fraction = a.holdout_fraction;
    let set = export_pairs(&idx, &opts);
    write_pair_file(&a.out, &set.train)?;
    let holdout_path = if a.holdout_fraction > 0.0 {
        let p = a.holdout_out.clone().unwrap_or_else(|| {
            let mut s = a.out.clone().into_os_string();
            s.push(".holdout");
            PathBuf::from(s)
        });
        write_pair_file(&p, &set.holdout)?;
        Some(p)
    } else {
        None
    };
    let mut report = json!({
        "kind": kind,
        "augment": a.augment,
        "seed": a.seed,
        "pairs": set.train.len(),
        "holdout_pairs": set.holdout.len(),
        "out": a.out,
        "holdout_out": holdout_path,
    });
    if a.verify {
        let mut all = set.train;
        all.extend(set.holdout);
        let v = verify_pairs(&idx, &all);
        report["verified"] = json!(v.checked - v.failures.len());
        report["failures"] = json!(v.failures);
        if !v.all_verified() {
            print_json(out, &report)?;
            return Err(CliError::Internal(format!("{} exported pairs failed verification", v.failures.len())));
        }
    }
    print_json(out, &report)
}

fn serve(a: ServeArgs) -> Result<(), CliError> {
    let idx = open_index(&a.index)?;
    let addr = SocketAddr::new(a.bind, a.port);
    let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Internal(e.to_string()))?;
    eprintln!("serving {} on http://{addr}/v1", a.index.display());
    rt.block_on(scafnav_server::serve(idx, addr)).map_err(|e| match e {
        scafnav_server::ServeError::Bind { .. } => CliError::User(e.to_string()),
        other => CliError::Internal(other.to_string()),
    })
}
