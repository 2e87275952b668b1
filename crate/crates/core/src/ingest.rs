//! Streaming `.smi` ingestion.
//!
//! Records are read line by line and handed to a rayon pool in fixed-size
//! batches for parsing and scaffold extraction. Results are inserted in
//! input order, so the sealed index does not depend on the worker count.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::index::{prepare, BuildParams, HypergraphIndex, IndexBuilder, InsertOutcome};

pub const DEFAULT_BATCH_SIZE: usize = 4096;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestOptions {
    pub params: BuildParams,
    /// Worker threads; `None` uses rayon's default.
    pub workers: Option<usize>,
    pub batch_size: usize,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            params: BuildParams::default(),
            workers: None,
            batch_size: DEFAULT_BATCH_SIZE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IngestReport {
    /// Records seen; comments and blank lines are not records.
    pub lines_read: u64,
    pub added: u64,
    pub duplicates: u64,
    pub rejects: BTreeMap<String, u64>,
    pub elapsed_secs: f64,
    /// Records per second.
    pub throughput: f64,
}

impl IngestReport {
    pub fn reject_total(&self) -> u64 {
        self.rejects.values().sum()
    }

    pub fn is_balanced(&self) -> bool {
        self.lines_read == self.added + self.duplicates + self.reject_total()
    }
}

/// Split one `.smi` line into SMILES and optional id. Blank lines and `#`
/// comments give `None`. The id follows a tab, or failing that the first
/// run of whitespace.
pub fn parse_record(line: &str) -> Option<(&str, Option<&str>)> {
    let line = line.trim_end_matches(['\n', '\r']);
    let trimmed = line.trim_start();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return None;
    }
    let (smiles, id) = match trimmed.split_once('\t') {
        Some((s, id)) => (s.trim(), id.trim()),
        None => match trimmed.split_once(char::is_whitespace) {
            Some((s, id)) => (s, id.trim()),
            None => (trimmed.trim_end(), ""),
        },
    };
    if smiles.is_empty() {
        return None;
    }
    Some((smiles, (!id.is_empty()).then_some(id)))
}

/// Incremental ingestion state. Feed any number of readers, then seal.
pub struct Ingester {
    builder: IndexBuilder,
    pool: rayon::ThreadPool,
    batch_size: usize,
    report: IngestReport,
    started: Instant,
}

impl Ingester {
    pub fn new(opts: IngestOptions) -> Result<Self, IngestError> {
        let mut pool = rayon::ThreadPoolBuilder::new();
        if let Some(n) = opts.workers {
            pool = pool.num_threads(n.max(1));
        }
        Ok(Ingester {
            builder: IndexBuilder::new(opts.params),
            pool: pool.build().map_err(|e| IngestError::Pool(e.to_string()))?,
            batch_size: opts.batch_size.max(1),
            report: IngestReport {
                lines_read: 0,
                added: 0,
                duplicates: 0,
                rejects: BTreeMap::new(),
                elapsed_secs: 0.0,
                throughput: 0.0,
            },
            started: Instant::now(),
        })
    }

    pub fn feed_path(&mut self, path: &Path) -> Result<(), IngestError> {
        let file = File::open(path).map_err(|source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.feed_reader(BufReader::new(file)).map_err(|source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn feed_reader<R: BufRead>(&mut self, reader: R) -> io::Result<()> {
        let mut batch: Vec<String> = Vec::with_capacity(self.batch_size);
        for line in reader.lines() {
            let line = line?;
            if parse_record(&line).is_some() {
                batch.push(line);
            }
            if batch.len() == self.batch_size {
                self.flush(&mut batch);
            }
        }
        self.flush(&mut batch);
        Ok(())
    }

    fn flush(&mut self, batch: &mut Vec<String>) {
        if batch.is_empty() {
            return;
        }
        let keep = self.builder.params().keep_largest_fragment;
        let prepared: Vec<_> = self.pool.install(|| {
            batch
                .par_iter()
                .map(|line| {
                    let (smiles, _) = parse_record(line).expect("filtered above");
                    prepare(smiles, keep)
                })
                .collect()
        });
        for (line, p) in batch.iter().zip(prepared) {
            let (smiles, id) = parse_record(line).expect("filtered above");
            self.report.lines_read += 1;
            match self.builder.insert_prepared(p, smiles, id) {
                InsertOutcome::Added(_) => self.report.added += 1,
                InsertOutcome::Duplicate(_) => self.report.duplicates += 1,
                InsertOutcome::Rejected(reason) => *self.report.rejects.entry(reason).or_insert(0) += 1,
            }
        }
        batch.clear();
    }

    pub fn report(&self) -> &IngestReport {
        &self.report
    }

    /// Seal the index. Elapsed time covers reading and sealing.
    pub fn finish(self) -> (HypergraphIndex, IngestReport) {
        let Ingester {
            builder,
            pool,
            mut report,
            started,
            ..
        } = self;
        let idx = pool.install(|| builder.build());
        let elapsed = started.elapsed().max(Duration::from_nanos(1));
        report.elapsed_secs = elapsed.as_secs_f64();
        report.throughput = report.lines_read as f64 / report.elapsed_secs;
        (idx, report)
    }
}

/// Ingest every file in order and seal.
pub fn ingest_paths<P: AsRef<Path>>(
    paths: &[P],
    opts: IngestOptions,
) -> Result<(HypergraphIndex, IngestReport), IngestError> {
    let mut ing = Ingester::new(opts)?;
    for p in paths {
        ing.feed_path(p.as_ref())?;
    }
    Ok(ing.finish())
}
