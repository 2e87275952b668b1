//! The molecule/scaffold hypergraph and the scaffold graph over it.
//!
//! Molecules are inserted into an [`IndexBuilder`]; sealing it computes the
//! fragmentation closure of every observed scaffold, adds the fragments
//! nobody observed as virtual scaffolds, and freezes everything into a
//! [`HypergraphIndex`].

mod persist;

pub use persist::{load_index, save_index, FORMAT_VERSION};

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fragment::fragment_graph;
use crate::molgraph::{parse_smiles, write_canonical, CanonicalSmiles, SmilesError};
use crate::scaffold::{scaffold_of, Scaffold};

pub type MoleculeId = u32;
pub type ScaffoldId = u32;

/// Scaffolds with more rings than this are not fragmented by default.
pub const DEFAULT_MAX_FRAGMENT_RINGS: u32 = 10;

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("scaffold {0:?} is not in the index")]
    UnknownScaffold(String),
    #[error("scaffold id {0} is not in the index")]
    UnknownScaffoldId(ScaffoldId),
    #[error(transparent)]
    Parse(#[from] SmilesError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("index format version {found}, expected {expected}")]
    FormatVersionMismatch { found: u32, expected: u32 },
    #[error("checksum mismatch in {0}")]
    ChecksumMismatch(String),
    #[error("corrupt index: {0}")]
    Corrupt(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoleculeRecord {
    pub id: MoleculeId,
    pub canonical: CanonicalSmiles,
    pub scaffold_id: ScaffoldId,
    pub source_tag: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaffoldClass {
    pub scaffold: Scaffold,
    pub scaffold_id: ScaffoldId,
    /// Member molecule ids, ascending.
    pub members: Vec<MoleculeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reject {
    /// 1-based record number across all inputs.
    pub line_no: u64,
    pub reason: String,
    pub raw: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildParams {
    pub keep_largest_fragment: bool,
    pub max_fragment_rings: u32,
}

impl Default for BuildParams {
    fn default() -> Self {
        BuildParams {
            keep_largest_fragment: true,
            max_fragment_rings: DEFAULT_MAX_FRAGMENT_RINGS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub molecules: u64,
    pub scaffolds: u64,
    pub virtual_scaffolds: u64,
    pub edges: u64,
    pub rejects: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub counts: Counts,
    pub build: BuildParams,
    /// Scaffolds left unfragmented because they exceed
    /// `max_fragment_rings`; their predecessor sets are incomplete.
    pub budget_flagged: Vec<ScaffoldId>,
    /// sha256 of each data file, filled in on save.
    #[serde(default)]
    pub checksums: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InsertOutcome {
    Added(MoleculeId),
    Duplicate(MoleculeId),
    Rejected(String),
}

/// A molecule reduced to its identity and scaffold, ready to insert.
/// Computing this is the expensive, order-independent part of ingestion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prepared {
    pub canonical: CanonicalSmiles,
    pub scaffold: Scaffold,
}

/// Parse, pick the main component and compute the scaffold. Errors carry
/// the stable reject reason code.
pub fn prepare(smiles: &str, keep_largest_fragment: bool) -> Result<Prepared, String> {
    let g = parse_smiles(smiles).map_err(|e| e.kind.code().to_string())?;
    if g.component_count() > 1 && !keep_largest_fragment {
        return Err("MultiComponentInput".to_string());
    }
    let main = g.largest_component();
    Ok(Prepared {
        canonical: write_canonical(&main),
        scaffold: scaffold_of(&main),
    })
}

#[derive(Debug, Default)]
pub struct IndexBuilder {
    params: BuildParams,
    molecules: Vec<(CanonicalSmiles, CanonicalSmiles, Option<String>)>,
    by_canonical: HashMap<CanonicalSmiles, MoleculeId>,
    observed: HashMap<CanonicalSmiles, Scaffold>,
    rejects: Vec<Reject>,
    records: u64,
}

impl IndexBuilder {
    pub fn new(params: BuildParams) -> Self {
        IndexBuilder {
            params,
            ..Default::default()
        }
    }

    pub fn params(&self) -> &BuildParams {
        &self.params
    }

    pub fn molecule_count(&self) -> usize {
        self.molecules.len()
    }

    pub fn rejects(&self) -> &[Reject] {
        &self.rejects
    }

    /// Parse and insert one molecule. Failures are recorded as rejects.
    pub fn insert_molecule(&mut self, smiles: &str, tag: Option<&str>) -> InsertOutcome {
        let prepared = prepare(smiles, self.params.keep_largest_fragment);
        self.insert_prepared(prepared, smiles, tag)
    }

    /// Insert the result of [`prepare`]; `raw` is kept for the reject log.
    pub fn insert_prepared(&mut self, prepared: Result<Prepared, String>, raw: &str, tag: Option<&str>) -> InsertOutcome {
        self.records += 1;
        let p = match prepared {
            Ok(p) => p,
            Err(reason) => {
                self.rejects.push(Reject {
                    line_no: self.records,
                    reason: reason.clone(),
                    raw: raw.to_string(),
                });
                return InsertOutcome::Rejected(reason);
            }
        };
        if let Some(&id) = self.by_canonical.get(&p.canonical) {
            return InsertOutcome::Duplicate(id);
        }
        let id = self.molecules.len() as MoleculeId;
        self.by_canonical.insert(p.canonical.clone(), id);
        self.observed.entry(p.scaffold.key.clone()).or_insert_with(|| p.scaffold.clone());
        self.molecules.push((p.canonical, p.scaffold.key, tag.map(str::to_string)));
        InsertOutcome::Added(id)
    }

    /// Compute the fragmentation closure and seal.
    pub fn build(self) -> HypergraphIndex {
        let IndexBuilder {
            params,
            molecules,
            observed,
            rejects,
            ..
        } = self;

        let mut all: HashMap<CanonicalSmiles, Scaffold> = observed;
        all.entry(CanonicalSmiles::default()).or_insert_with(Scaffold::empty);
        let mut edge_keys: Vec<(CanonicalSmiles, CanonicalSmiles)> = Vec::new();
        let mut flagged_keys = Vec::new();
        let top = all.values().map(|s| s.ring_count).max().unwrap_or(0);
        for level in (2..=top).rev() {
            let mut at_level: Vec<CanonicalSmiles> =
                all.values().filter(|s| s.ring_count == level).map(|s| s.key.clone()).collect();
            at_level.sort();
            if level > params.max_fragment_rings {
                flagged_keys.extend(at_level);
                continue;
            }
            let frags: Vec<(CanonicalSmiles, Vec<Scaffold>)> = at_level
                .into_par_iter()
                .map(|key| {
                    let g = parse_smiles(key.as_str()).expect("scaffold keys parse");
                    let f = fragment_graph(&g);
                    (key, f)
                })
                .collect();
            for (succ, preds) in frags {
                for p in preds {
                    edge_keys.push((p.key.clone(), succ.clone()));
                    all.entry(p.key.clone()).or_insert_with(|| p.with_virtual(true));
                }
            }
        }

        let mut scaffolds: Vec<Scaffold> = all.into_values().collect();
        scaffolds.sort_by(|a, b| a.ring_count.cmp(&b.ring_count).then_with(|| a.key.cmp(&b.key)));
        let id_of: HashMap<CanonicalSmiles, ScaffoldId> = scaffolds
            .iter()
            .enumerate()
            .map(|(i, s)| (s.key.clone(), i as ScaffoldId))
            .collect();

        let mut classes: Vec<ScaffoldClass> = scaffolds
            .into_iter()
            .enumerate()
            .map(|(i, scaffold)| ScaffoldClass {
                scaffold,
                scaffold_id: i as ScaffoldId,
                members: Vec::new(),
            })
            .collect();
        let records: Vec<MoleculeRecord> = molecules
            .into_iter()
            .enumerate()
            .map(|(i, (canonical, skey, tag))| {
                let scaffold_id = id_of[&skey];
                classes[scaffold_id as usize].members.push(i as MoleculeId);
                MoleculeRecord {
                    id: i as MoleculeId,
                    canonical,
                    scaffold_id,
                    source_tag: tag,
                }
            })
            .collect();
        for class in &mut classes {
            class.scaffold.is_virtual = class.members.is_empty();
        }

        let mut edges: Vec<(ScaffoldId, ScaffoldId)> =
            edge_keys.iter().map(|(p, s)| (id_of[p], id_of[s])).collect();
        edges.sort_unstable();
        edges.dedup();
        let mut budget_flagged: Vec<ScaffoldId> = flagged_keys.iter().map(|k| id_of[k]).collect();
        budget_flagged.sort_unstable();

        HypergraphIndex::assemble(records, classes, edges, rejects, params, budget_flagged)
    }
}

/// Sealed, immutable index.
#[derive(Debug, Clone, PartialEq)]
pub struct HypergraphIndex {
    molecules: Vec<MoleculeRecord>,
    classes: Vec<ScaffoldClass>,
    edges: Vec<(ScaffoldId, ScaffoldId)>,
    succ: Vec<Vec<ScaffoldId>>,
    pred: Vec<Vec<ScaffoldId>>,
    hierarchy: BTreeMap<u32, Vec<ScaffoldId>>,
    by_key: HashMap<CanonicalSmiles, ScaffoldId>,
    rejects: Vec<Reject>,
    manifest: Manifest,
}

/// One-line view of a scaffold class for query output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScaffoldSummary {
    pub scaffold_id: ScaffoldId,
    pub scaffold: CanonicalSmiles,
    pub ring_count: u32,
    #[serde(rename = "virtual")]
    pub is_virtual: bool,
    pub class_size: usize,
    pub out_degree: usize,
    pub in_degree: usize,
}

impl HypergraphIndex {
    pub(crate) fn assemble(
        molecules: Vec<MoleculeRecord>,
        classes: Vec<ScaffoldClass>,
        edges: Vec<(ScaffoldId, ScaffoldId)>,
        rejects: Vec<Reject>,
        build: BuildParams,
        budget_flagged: Vec<ScaffoldId>,
    ) -> Self {
        let n = classes.len();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for &(p, s) in &edges {
            succ[p as usize].push(s);
            pred[s as usize].push(p);
        }
        let mut hierarchy: BTreeMap<u32, Vec<ScaffoldId>> = BTreeMap::new();
        for c in &classes {
            hierarchy.entry(c.scaffold.ring_count).or_default().push(c.scaffold_id);
        }
        let by_key = classes.iter().map(|c| (c.scaffold.key.clone(), c.scaffold_id)).collect();
        let manifest = Manifest {
            format_version: FORMAT_VERSION,
            counts: Counts {
                molecules: molecules.len() as u64,
                scaffolds: n as u64,
                virtual_scaffolds: classes.iter().filter(|c| c.scaffold.is_virtual).count() as u64,
                edges: edges.len() as u64,
                rejects: rejects.len() as u64,
            },
            build,
            budget_flagged,
            checksums: BTreeMap::new(),
        };
        HypergraphIndex {
            molecules,
            classes,
            edges,
            succ,
            pred,
            hierarchy,
            by_key,
            rejects,
            manifest,
        }
    }

    pub fn molecules(&self) -> &[MoleculeRecord] {
        &self.molecules
    }

    pub fn molecule(&self, id: MoleculeId) -> Option<&MoleculeRecord> {
        self.molecules.get(id as usize)
    }

    /// All classes, indexed by scaffold id.
    pub fn classes(&self) -> &[ScaffoldClass] {
        &self.classes
    }

    pub fn class(&self, id: ScaffoldId) -> Result<&ScaffoldClass, IndexError> {
        self.classes.get(id as usize).ok_or(IndexError::UnknownScaffoldId(id))
    }

    pub fn scaffold(&self, id: ScaffoldId) -> Result<&Scaffold, IndexError> {
        Ok(&self.class(id)?.scaffold)
    }

    /// `(predecessor, successor)` pairs, sorted.
    pub fn edges(&self) -> &[(ScaffoldId, ScaffoldId)] {
        &self.edges
    }

    pub fn rejects(&self) -> &[Reject] {
        &self.rejects
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub(crate) fn manifest_mut(&mut self) -> &mut Manifest {
        &mut self.manifest
    }

    /// Scaffold ids of hierarchy level `n`, ascending.
    pub fn hierarchy(&self, n: u32) -> &[ScaffoldId] {
        self.hierarchy.get(&n).map_or(&[], Vec::as_slice)
    }

    pub fn levels(&self) -> impl Iterator<Item = (u32, &[ScaffoldId])> {
        self.hierarchy.iter().map(|(&n, ids)| (n, ids.as_slice()))
    }

    /// Exact key lookup.
    pub fn lookup(&self, key: &CanonicalSmiles) -> Option<ScaffoldId> {
        self.by_key.get(key).copied()
    }

    /// Id of a scaffold given in any SMILES rendering. The empty string
    /// names `S_0`.
    pub fn resolve(&self, smiles: &str) -> Result<ScaffoldId, IndexError> {
        let key = if smiles.trim().is_empty() {
            CanonicalSmiles::default()
        } else {
            write_canonical(&parse_smiles(smiles)?)
        };
        self.lookup(&key)
            .ok_or_else(|| IndexError::UnknownScaffold(smiles.to_string()))
    }

    pub fn id_of(&self, s: &Scaffold) -> Result<ScaffoldId, IndexError> {
        self.lookup(&s.key)
            .ok_or_else(|| IndexError::UnknownScaffold(s.key.to_string()))
    }

    pub fn successor_ids(&self, id: ScaffoldId) -> &[ScaffoldId] {
        self.succ.get(id as usize).map_or(&[], Vec::as_slice)
    }

    pub fn predecessor_ids(&self, id: ScaffoldId) -> &[ScaffoldId] {
        self.pred.get(id as usize).map_or(&[], Vec::as_slice)
    }

    /// Member molecules of a class in id order, at most `limit` of them.
    pub fn expand_class(&self, s: &Scaffold, limit: Option<usize>) -> Result<Vec<&MoleculeRecord>, IndexError> {
        let class = self.class(self.id_of(s)?)?;
        Ok(class
            .members
            .iter()
            .take(limit.unwrap_or(usize::MAX))
            .map(|&m| &self.molecules[m as usize])
            .collect())
    }

    /// Scaffolds that have `s` as an immediate fragment.
    pub fn successors(&self, s: &Scaffold) -> Result<Vec<&Scaffold>, IndexError> {
        let id = self.id_of(s)?;
        Ok(self.successor_ids(id).iter().map(|&t| &self.classes[t as usize].scaffold).collect())
    }

    /// Immediate fragments of `s`.
    pub fn predecessors(&self, s: &Scaffold) -> Result<Vec<&Scaffold>, IndexError> {
        let id = self.id_of(s)?;
        Ok(self.predecessor_ids(id).iter().map(|&t| &self.classes[t as usize].scaffold).collect())
    }

    pub fn summary(&self, id: ScaffoldId) -> Result<ScaffoldSummary, IndexError> {
        let c = self.class(id)?;
        Ok(ScaffoldSummary {
            scaffold_id: id,
            scaffold: c.scaffold.key.clone(),
            ring_count: c.scaffold.ring_count,
            is_virtual: c.scaffold.is_virtual,
            class_size: c.members.len(),
            out_degree: self.successor_ids(id).len(),
            in_degree: self.predecessor_ids(id).len(),
        })
    }

    /// Check the structural invariants: the classes partition the
    /// molecules, only memberless classes are virtual, every edge climbs
    /// exactly one level and `S_0` has no edges.
    pub fn validate(&self) -> Result<(), IndexError> {
        let bad = |m: String| Err(IndexError::Corrupt(m));
        let mut seen = vec![false; self.molecules.len()];
        for c in &self.classes {
            if c.members.is_empty() != c.scaffold.is_virtual {
                return bad(format!("class {} virtual flag disagrees with members", c.scaffold_id));
            }
            for &m in &c.members {
                let Some(rec) = self.molecules.get(m as usize) else {
                    return bad(format!("class {} lists unknown molecule {m}", c.scaffold_id));
                };
                if seen[m as usize] || rec.scaffold_id != c.scaffold_id {
                    return bad(format!("molecule {m} is not in exactly one class"));
                }
                seen[m as usize] = true;
            }
        }
        if seen.iter().any(|&s| !s) {
            return bad("a molecule belongs to no class".into());
        }
        if self.classes.first().is_none_or(|c| !c.scaffold.key.is_empty()) {
            return bad("scaffold 0 is not the ringless scaffold".into());
        }
        for &(p, s) in &self.edges {
            let (Some(pc), Some(sc)) = (self.classes.get(p as usize), self.classes.get(s as usize)) else {
                return bad(format!("edge {p}->{s} names an unknown scaffold"));
            };
            if p == 0 || pc.scaffold.ring_count + 1 != sc.scaffold.ring_count {
                return bad(format!("edge {p}->{s} does not climb exactly one level"));
            }
        }
        Ok(())
    }

    /// Sum of class sizes over all classes.
    pub fn total_members(&self) -> usize {
        self.classes.iter().map(|c| c.members.len()).sum()
    }

    /// Scaffold ids in the order `ids` gives, as scaffolds.
    pub fn scaffolds_of<'a>(&'a self, ids: &'a [ScaffoldId]) -> impl Iterator<Item = &'a Scaffold> + 'a {
        ids.iter().map(move |&i| &self.classes[i as usize].scaffold)
    }

    /// Distinct reject reasons with counts.
    pub fn reject_counts(&self) -> BTreeMap<String, u64> {
        let mut out = BTreeMap::new();
        for r in &self.rejects {
            *out.entry(r.reason.clone()).or_insert(0) += 1;
        }
        out
    }

    /// Set of scaffold keys with their level, for order-independent
    /// comparisons between builds.
    pub fn scaffold_key_set(&self) -> BTreeSet<(u32, CanonicalSmiles, bool)> {
        self.classes
            .iter()
            .map(|c| (c.scaffold.ring_count, c.scaffold.key.clone(), c.scaffold.is_virtual))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaffold_key;

    fn build(smiles: &[&str]) -> HypergraphIndex {
        let mut b = IndexBuilder::new(BuildParams::default());
        for s in smiles {
            b.insert_molecule(s, None);
        }
        let idx = b.build();
        idx.validate().unwrap();
        idx
    }

    #[test]
    fn insert_outcomes() {
        let mut b = IndexBuilder::new(BuildParams::default());
        assert_eq!(b.insert_molecule("CCO", None), InsertOutcome::Added(0));
        assert_eq!(b.insert_molecule("OCC", None), InsertOutcome::Duplicate(0));
        assert_eq!(
            b.insert_molecule("C1CC", None),
            InsertOutcome::Rejected("UnclosedRingBond".into())
        );
        assert_eq!(b.insert_molecule("Cc1ccccc1", Some("t")), InsertOutcome::Added(1));
        assert_eq!(b.insert_molecule("CCc1ccccc1", None), InsertOutcome::Added(2));
        let idx = b.build();
        idx.validate().unwrap();
        assert_eq!(idx.molecule(1).unwrap().scaffold_id, idx.molecule(2).unwrap().scaffold_id);
        assert_eq!(idx.rejects()[0].line_no, 3);
        assert_eq!(idx.molecule(1).unwrap().source_tag.as_deref(), Some("t"));
    }

    #[test]
    fn benzene_only_corpus_has_no_edges() {
        let idx = build(&["Cc1ccccc1", "CCc1ccccc1"]);
        assert!(idx.edges().is_empty());
        let benzene = scaffold_key("c1ccccc1").unwrap();
        assert_eq!(idx.expand_class(&benzene, None).unwrap().len(), 2);
        // S_0 is always present, here without members.
        assert!(idx.class(0).unwrap().scaffold.is_virtual);
        assert_eq!(idx.classes().len(), 2);
    }

    #[test]
    fn biphenyl_ether_corpus() {
        let idx = build(&["c1ccc(COc2ccccc2)cc1"]);
        let benzene = idx.resolve("c1ccccc1").unwrap();
        let top = idx.resolve("c1ccc(COc2ccccc2)cc1").unwrap();
        assert!(idx.scaffold(benzene).unwrap().is_virtual);
        assert!(!idx.scaffold(top).unwrap().is_virtual);
        assert_eq!(idx.edges(), &[(benzene, top)]);
        let s = idx.scaffold(benzene).unwrap().clone();
        assert!(idx.expand_class(&s, None).unwrap().is_empty());
        assert_eq!(idx.successors(&s).unwrap()[0].key, idx.scaffold(top).unwrap().key);
        assert!(idx.predecessors(&s).unwrap().is_empty());
        let summary = idx.summary(benzene).unwrap();
        assert_eq!((summary.out_degree, summary.in_degree), (1, 0));
    }

    #[test]
    fn unknown_scaffolds() {
        let idx = build(&["Cc1ccccc1"]);
        assert!(matches!(idx.resolve("c1ccncc1"), Err(IndexError::UnknownScaffold(_))));
        assert!(matches!(idx.resolve("c1cc"), Err(IndexError::Parse(_))));
        assert_eq!(idx.resolve("").unwrap(), 0);
    }

    #[test]
    fn budget_flags_large_scaffolds() {
        let mut b = IndexBuilder::new(BuildParams {
            max_fragment_rings: 1,
            ..BuildParams::default()
        });
        b.insert_molecule("c1ccc(COc2ccccc2)cc1", None);
        let idx = b.build();
        assert!(idx.edges().is_empty());
        assert_eq!(idx.manifest().budget_flagged.len(), 1);
    }

    #[test]
    fn multi_component_policy() {
        let mut strict = IndexBuilder::new(BuildParams {
            keep_largest_fragment: false,
            ..BuildParams::default()
        });
        assert_eq!(
            strict.insert_molecule("c1ccccc1CC.Cl", None),
            InsertOutcome::Rejected("MultiComponentInput".into())
        );
        let mut lenient = IndexBuilder::new(BuildParams::default());
        assert_eq!(lenient.insert_molecule("c1ccccc1CC.Cl", None), InsertOutcome::Added(0));
        assert_eq!(lenient.insert_molecule("CCc1ccccc1", None), InsertOutcome::Duplicate(0));
    }
}
