//! Training-pair export.
//!
//! Three kinds of pair come out of a sealed index: molecule to scaffold,
//! predecessor to successor along each scaffold edge, and the reverse of
//! the latter. With augmentation `k`, every pair is written `k` times; the
//! first copy uses canonical SMILES on both sides and the others use
//! seeded random renderings.

use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::index::{HypergraphIndex, ScaffoldId};
use crate::molgraph::{parse_smiles, randomize_smiles, write_canonical, CanonicalSmiles};
use crate::scaffold::scaffold_key;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairKind {
    /// Molecule to its scaffold.
    Scaffold,
    Successor,
    Predecessor,
}

impl PairKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PairKind::Scaffold => "scaffold",
            PairKind::Successor => "successor",
            PairKind::Predecessor => "predecessor",
        }
    }
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown pair kind {0:?}, expected scaffold, successor or predecessor")]
pub struct UnknownKind(pub String);

impl FromStr for PairKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, UnknownKind> {
        match s {
            "scaffold" | "mol->scaffold" | "mol→scaffold" => Ok(PairKind::Scaffold),
            "successor" => Ok(PairKind::Successor),
            "predecessor" => Ok(PairKind::Predecessor),
            _ => Err(UnknownKind(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrainingPair {
    pub source: String,
    pub target: String,
    pub kind: PairKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExportOptions {
    pub kind: PairKind,
    pub augment: usize,
    pub seed: u64,
    /// Fraction of scaffold classes whose pairs go to the holdout set. A
    /// successor pair follows the class of its successor side.
    pub holdout_fraction: f64,
}

impl ExportOptions {
    pub fn new(kind: PairKind, augment: usize, seed: u64) -> Self {
        ExportOptions {
            kind,
            augment,
            seed,
            holdout_fraction: 0.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairSet {
    pub train: Vec<TrainingPair>,
    pub holdout: Vec<TrainingPair>,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn mix(parts: &[u64]) -> u64 {
    parts.iter().fold(0u64, |h, &p| splitmix(h ^ splitmix(p)))
}

// Roles keep the seed for a scaffold identical whichever column it lands
// in, so predecessor pairs are exactly column-swapped successor pairs.
const ROLE_MOLECULE: u64 = 1;
const ROLE_SCAFFOLD: u64 = 2;
const ROLE_PRED: u64 = 3;
const ROLE_SUCC: u64 = 4;

fn render(canonical: &str, copy: usize, seed: u64) -> String {
    if copy == 0 {
        return canonical.to_string();
    }
    let g = parse_smiles(canonical).expect("stored SMILES reparse");
    randomize_smiles(&g, seed).expect("non-empty graph")
}

fn held_out(idx: &HypergraphIndex, id: ScaffoldId, opts: &ExportOptions) -> bool {
    if opts.holdout_fraction <= 0.0 {
        return false;
    }
    let key = &idx.classes()[id as usize].scaffold.key;
    let h = key
        .as_str()
        .bytes()
        .fold(mix(&[opts.seed, 0x686f_6c64]), |h, b| splitmix(h ^ u64::from(b)));
    ((h >> 11) as f64 / (1u64 << 53) as f64) < opts.holdout_fraction
}

/// Build the pairs for `opts.kind`. Pairs touching the empty scaffold are
/// left out of every kind.
pub fn export_pairs(idx: &HypergraphIndex, opts: &ExportOptions) -> PairSet {
    let mut out = PairSet::default();
    let k = opts.augment;
    match opts.kind {
        PairKind::Scaffold => {
            for m in idx.molecules() {
                let class = &idx.classes()[m.scaffold_id as usize];
                if class.scaffold.is_empty() {
                    continue;
                }
                let dest = if held_out(idx, m.scaffold_id, opts) {
                    &mut out.holdout
                } else {
                    &mut out.train
                };
                for copy in 0..k {
                    let c = copy as u64;
                    dest.push(TrainingPair {
                        source: render(m.canonical.as_str(), copy, mix(&[opts.seed, ROLE_MOLECULE, u64::from(m.id), c])),
                        target: render(
                            class.scaffold.key.as_str(),
                            copy,
                            mix(&[opts.seed, ROLE_SCAFFOLD, u64::from(m.id), c]),
                        ),
                        kind: PairKind::Scaffold,
                    });
                }
            }
        }
        PairKind::Successor | PairKind::Predecessor => {
            for (e, &(p, s)) in idx.edges().iter().enumerate() {
                let pk = &idx.classes()[p as usize].scaffold.key;
                let sk = &idx.classes()[s as usize].scaffold.key;
                if pk.is_empty() || sk.is_empty() {
                    continue;
                }
                let dest = if held_out(idx, s, opts) {
                    &mut out.holdout
                } else {
                    &mut out.train
                };
                for copy in 0..k {
                    let c = copy as u64;
                    let pred = render(pk.as_str(), copy, mix(&[opts.seed, ROLE_PRED, e as u64, c]));
                    let succ = render(sk.as_str(), copy, mix(&[opts.seed, ROLE_SUCC, e as u64, c]));
                    let (source, target) = if opts.kind == PairKind::Successor {
                        (pred, succ)
                    } else {
                        (succ, pred)
                    };
                    dest.push(TrainingPair {
                        source,
                        target,
                        kind: opts.kind,
                    });
                }
            }
        }
    }
    out
}

pub fn write_pairs<W: Write>(pairs: &[TrainingPair], mut w: W) -> io::Result<()> {
    for p in pairs {
        writeln!(w, "{}\t{}\t{}", p.source, p.target, p.kind)?;
    }
    w.flush()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PairError {
    #[error("line {0}: expected source<TAB>target<TAB>kind")]
    Malformed(usize),
    #[error("line {line}: {source}")]
    Kind {
        line: usize,
        #[source]
        source: UnknownKind,
    },
}

/// Read a pair file written by [`write_pairs`].
pub fn read_pairs<R: BufRead>(r: R) -> Result<Vec<TrainingPair>, Box<dyn std::error::Error + Send + Sync>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let cols: Vec<&str> = line.split('\t').collect();
        let [source, target, kind] = cols[..] else {
            return Err(PairError::Malformed(i + 1).into());
        };
        out.push(TrainingPair {
            source: source.to_string(),
            target: target.to_string(),
            kind: kind.parse().map_err(|source| PairError::Kind { line: i + 1, source })?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub checked: usize,
    /// `(line number, reason)` for every pair that does not hold.
    pub failures: Vec<(usize, String)>,
}

impl VerifyReport {
    pub fn all_verified(&self) -> bool {
        self.failures.is_empty()
    }
}

fn canonical_of(smiles: &str) -> Result<CanonicalSmiles, String> {
    parse_smiles(smiles)
        .map(|g| write_canonical(&g))
        .map_err(|e| e.to_string())
}

fn check(idx: &HypergraphIndex, p: &TrainingPair) -> Result<(), String> {
    match p.kind {
        PairKind::Scaffold => {
            let s = scaffold_key(&p.source).map_err(|e| format!("source: {e}"))?;
            let t = canonical_of(&p.target).map_err(|e| format!("target: {e}"))?;
            if s.key == t {
                Ok(())
            } else {
                Err(format!("scaffold of source is {}, target is {t}", s.key))
            }
        }
        PairKind::Successor | PairKind::Predecessor => {
            let a = canonical_of(&p.source).map_err(|e| format!("source: {e}"))?;
            let b = canonical_of(&p.target).map_err(|e| format!("target: {e}"))?;
            let (pred, succ) = if p.kind == PairKind::Successor { (a, b) } else { (b, a) };
            let pid = idx.lookup(&pred).ok_or_else(|| format!("{pred} not indexed"))?;
            let sid = idx.lookup(&succ).ok_or_else(|| format!("{succ} not indexed"))?;
            if idx.successor_ids(pid).contains(&sid) {
                Ok(())
            } else {
                Err(format!("no edge {pred} -> {succ}"))
            }
        }
    }
}

/// Reparse both sides of every pair and test the kind's relation against
/// `idx`.
pub fn verify_pairs(idx: &HypergraphIndex, pairs: &[TrainingPair]) -> VerifyReport {
    let mut report = VerifyReport::default();
    for (i, p) in pairs.iter().enumerate() {
        report.checked += 1;
        if let Err(reason) = check(idx, p) {
            report.failures.push((i + 1, reason));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::{BuildParams, IndexBuilder};

    fn build(smiles: &[&str]) -> HypergraphIndex {
        let mut b = IndexBuilder::new(BuildParams::default());
        for s in smiles {
            b.insert_molecule(s, None);
        }
        b.build()
    }

    fn sample() -> HypergraphIndex {
        build(&[
            "c1ccc(COc2ccccc2)cc1",
            "O=S(=O)(c1ccccc1)N1CCCCCC1",
            "Cc1ccc2ccccc2c1",
            "CCO",
            "Clc1ccncc1",
        ])
    }

    #[test]
    fn kind_names() {
        assert_eq!("mol→scaffold".parse(), Ok(PairKind::Scaffold));
        assert_eq!("successor".parse(), Ok(PairKind::Successor));
        assert!("sideways".parse::<PairKind>().is_err());
    }

    #[test]
    fn benzene_corpus() {
        let idx = build(&["Cc1ccccc1", "CCc1ccccc1"]);
        let pairs = export_pairs(&idx, &ExportOptions::new(PairKind::Scaffold, 1, 0)).train;
        assert_eq!(pairs.len(), 2);
        for p in &pairs {
            assert_eq!(canonical_of(&p.target).unwrap().as_str(), "c1ccccc1");
        }
    }

    #[test]
    fn augmentation_multiplies_and_verifies() {
        let idx = sample();
        for kind in [PairKind::Scaffold, PairKind::Successor, PairKind::Predecessor] {
            let one = export_pairs(&idx, &ExportOptions::new(kind, 1, 3)).train;
            let five = export_pairs(&idx, &ExportOptions::new(kind, 5, 3)).train;
            assert!(!one.is_empty());
            assert_eq!(five.len(), 5 * one.len());
            let r = verify_pairs(&idx, &five);
            assert!(r.all_verified(), "{kind}: {:?}", r.failures);
        }
    }

    #[test]
    fn predecessor_is_column_swap() {
        let idx = sample();
        let succ = export_pairs(&idx, &ExportOptions::new(PairKind::Successor, 3, 9)).train;
        let pred = export_pairs(&idx, &ExportOptions::new(PairKind::Predecessor, 3, 9)).train;
        assert_eq!(succ.len(), pred.len());
        for (s, p) in succ.iter().zip(&pred) {
            assert_eq!((&s.source, &s.target), (&p.target, &p.source));
        }
    }

    #[test]
    fn empty_scaffold_excluded() {
        let idx = sample();
        let pairs = export_pairs(&idx, &ExportOptions::new(PairKind::Scaffold, 1, 0)).train;
        assert_eq!(pairs.len(), 4);
        assert!(pairs.iter().all(|p| !p.target.is_empty()));
        let succ = export_pairs(&idx, &ExportOptions::new(PairKind::Successor, 1, 0)).train;
        assert!(succ.iter().all(|p| !p.source.is_empty()));
    }

    #[test]
    fn seeded_and_round_trips() {
        let idx = sample();
        let a = export_pairs(&idx, &ExportOptions::new(PairKind::Scaffold, 4, 11));
        let b = export_pairs(&idx, &ExportOptions::new(PairKind::Scaffold, 4, 11));
        assert_eq!(a, b);
        let mut buf = Vec::new();
        write_pairs(&a.train, &mut buf).unwrap();
        assert_eq!(read_pairs(&buf[..]).unwrap(), a.train);
        assert!(read_pairs(&b"a\tb\n"[..]).is_err());
    }

    #[test]
    fn holdout_partitions_pairs() {
        let idx = sample();
        let all = export_pairs(&idx, &ExportOptions::new(PairKind::Scaffold, 2, 5)).train;
        let mut opts = ExportOptions::new(PairKind::Scaffold, 2, 5);
        opts.holdout_fraction = 0.5;
        let split = export_pairs(&idx, &opts);
        assert_eq!(split.train.len() + split.holdout.len(), all.len());
        opts.holdout_fraction = 1.0;
        assert!(export_pairs(&idx, &opts).train.is_empty());
    }

    #[test]
    fn corrupted_pair_fails_verification() {
        let idx = sample();
        let pair = TrainingPair {
            source: "c1ccncc1".into(),
            target: "c1ccc2ccccc2c1".into(),
            kind: PairKind::Successor,
        };
        assert!(!verify_pairs(&idx, &[pair]).all_verified());
    }
}
