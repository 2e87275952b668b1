//! Cones, union and fragment-growing queries over a sealed index.

use std::collections::{BTreeSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::index::{HypergraphIndex, IndexError, ScaffoldId};
use crate::molgraph::CanonicalSmiles;
use crate::scaffold::{scaffold_key, Scaffold};

/// Largest hit list [`fbdd_search`] enumerates subsets of.
pub const MAX_SEARCH_HITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConeCaps {
    pub max_depth: usize,
    pub max_size: usize,
}

impl Default for ConeCaps {
    fn default() -> Self {
        ConeCaps {
            max_depth: 6,
            max_size: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConeResult {
    pub root: Scaffold,
    /// Members in breadth-first order; the root is never included.
    pub members: Vec<Scaffold>,
    #[serde(skip)]
    pub member_ids: Vec<ScaffoldId>,
    /// A depth or size cap stopped the walk.
    pub truncated: bool,
}

#[derive(Debug, Clone, Copy)]
enum Direction {
    Up,
    Down,
}

fn cone_ids(idx: &HypergraphIndex, root: ScaffoldId, dir: Direction, caps: ConeCaps) -> (Vec<ScaffoldId>, bool) {
    let mut seen = vec![false; idx.classes().len()];
    seen[root as usize] = true;
    let mut out = Vec::new();
    let mut queue = VecDeque::from([(root, 0usize)]);
    let mut truncated = false;
    while let Some((v, depth)) = queue.pop_front() {
        let next = match dir {
            Direction::Up => idx.successor_ids(v),
            Direction::Down => idx.predecessor_ids(v),
        };
        if depth == caps.max_depth {
            truncated |= next.iter().any(|&w| !seen[w as usize]);
            continue;
        }
        for &w in next {
            if seen[w as usize] {
                continue;
            }
            if out.len() == caps.max_size {
                return (out, true);
            }
            seen[w as usize] = true;
            out.push(w);
            queue.push_back((w, depth + 1));
        }
    }
    (out, truncated)
}

fn cone(idx: &HypergraphIndex, s: &Scaffold, dir: Direction, caps: ConeCaps) -> Result<ConeResult, IndexError> {
    let id = idx.id_of(s)?;
    let (ids, truncated) = cone_ids(idx, id, dir, caps);
    Ok(ConeResult {
        root: idx.scaffold(id)?.clone(),
        members: idx.scaffolds_of(&ids).cloned().collect(),
        member_ids: ids,
        truncated,
    })
}

/// Every indexed scaffold reachable from `s` along successor edges.
pub fn upper_cone(idx: &HypergraphIndex, s: &Scaffold, caps: ConeCaps) -> Result<ConeResult, IndexError> {
    cone(idx, s, Direction::Up, caps)
}

/// Every indexed scaffold reachable from `s` along predecessor edges.
pub fn lower_cone_indexed(idx: &HypergraphIndex, s: &Scaffold, caps: ConeCaps) -> Result<ConeResult, IndexError> {
    cone(idx, s, Direction::Down, caps)
}

/// Scaffolds having both `s1` and `s2` as immediate predecessors, sorted
/// by key.
pub fn union_scaffolds(idx: &HypergraphIndex, s1: &Scaffold, s2: &Scaffold) -> Result<Vec<Scaffold>, IndexError> {
    let a: BTreeSet<ScaffoldId> = idx.successor_ids(idx.id_of(s1)?).iter().copied().collect();
    let b = idx.successor_ids(idx.id_of(s2)?);
    let mut out: Vec<Scaffold> = b
        .iter()
        .filter(|t| a.contains(t))
        .map(|&t| idx.classes()[t as usize].scaffold.clone())
        .collect();
    out.sort_by(|x, y| x.key.cmp(&y.key));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum HitProblem {
    #[error("unparseable: {0}")]
    Parse(String),
    #[error("ringless scaffold has no edges")]
    Ringless,
    #[error("scaffold {0:?} is not in the index")]
    UnknownScaffold(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HitError {
    pub index: usize,
    pub hit: String,
    pub problem: HitProblem,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FbddError {
    #[error("{} hit(s) could not be resolved", .0.len())]
    Hits(Vec<HitError>),
    #[error("empty hit subset")]
    EmptySubset,
    #[error("subset index {0} out of range")]
    SubsetOutOfRange(usize),
    #[error("{0} hits exceed the search limit of {MAX_SEARCH_HITS}")]
    TooManyHits(usize),
}

/// Map each hit (molecule or scaffold SMILES) to its indexed scaffold.
pub fn resolve_hits(idx: &HypergraphIndex, hits: &[String]) -> Result<Vec<ScaffoldId>, FbddError> {
    let mut ids = Vec::with_capacity(hits.len());
    let mut errors = Vec::new();
    for (i, hit) in hits.iter().enumerate() {
        let problem = match scaffold_key(hit) {
            Err(e) => HitProblem::Parse(e.to_string()),
            Ok(s) if s.is_empty() => HitProblem::Ringless,
            Ok(s) => match idx.lookup(&s.key) {
                Some(id) => {
                    ids.push(id);
                    continue;
                }
                None => HitProblem::UnknownScaffold(s.key.into_string()),
            },
        };
        errors.push(HitError {
            index: i,
            hit: hit.clone(),
            problem,
        });
    }
    if errors.is_empty() {
        Ok(ids)
    } else {
        Err(FbddError::Hits(errors))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FbddResult {
    pub scaffolds: Vec<Scaffold>,
    /// Some cone hit its cap, so the intersection may be incomplete.
    pub truncated: bool,
}

fn intersect_cones(idx: &HypergraphIndex, ids: &[ScaffoldId], caps: ConeCaps) -> (BTreeSet<ScaffoldId>, bool) {
    let mut truncated = false;
    let mut acc: Option<BTreeSet<ScaffoldId>> = None;
    for &id in ids {
        let (cone, t) = cone_ids(idx, id, Direction::Up, caps);
        truncated |= t;
        let cone: BTreeSet<ScaffoldId> = cone.into_iter().collect();
        acc = Some(match acc {
            None => cone,
            Some(a) => a.intersection(&cone).copied().collect(),
        });
    }
    (acc.unwrap_or_default(), truncated)
}

fn sorted_scaffolds(idx: &HypergraphIndex, ids: impl IntoIterator<Item = ScaffoldId>) -> Vec<Scaffold> {
    let mut out: Vec<Scaffold> = ids.into_iter().map(|t| idx.classes()[t as usize].scaffold.clone()).collect();
    out.sort_by(|x, y| x.key.cmp(&y.key));
    out
}

/// Intersection of the upper cones of the chosen hits (all hits when
/// `subset` is `None`), sorted by key.
pub fn fbdd_intersection(
    idx: &HypergraphIndex,
    hits: &[String],
    subset: Option<&[usize]>,
    caps: ConeCaps,
) -> Result<FbddResult, FbddError> {
    let chosen: Vec<usize> = match subset {
        Some(s) => s.to_vec(),
        None => (0..hits.len()).collect(),
    };
    if chosen.is_empty() {
        return Err(FbddError::EmptySubset);
    }
    if let Some(&bad) = chosen.iter().find(|&&i| i >= hits.len()) {
        return Err(FbddError::SubsetOutOfRange(bad));
    }
    let picked: Vec<String> = chosen.iter().map(|&i| hits[i].clone()).collect();
    let ids = resolve_hits(idx, &picked).map_err(|e| match e {
        FbddError::Hits(errs) => FbddError::Hits(
            errs.into_iter()
                .map(|h| HitError {
                    index: chosen[h.index],
                    ..h
                })
                .collect(),
        ),
        other => other,
    })?;
    let (set, truncated) = intersect_cones(idx, &ids, caps);
    Ok(FbddResult {
        scaffolds: sorted_scaffolds(idx, set),
        truncated,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubsetResult {
    /// Positions in the original hit list (first occurrence of each
    /// distinct scaffold).
    pub subset: Vec<usize>,
    pub hit_scaffolds: Vec<CanonicalSmiles>,
    pub scaffolds: Vec<Scaffold>,
    pub truncated: bool,
}

/// All inclusion-maximal hit subsets of at least `min_subset_size`
/// distinct scaffolds whose upper cones share a scaffold. Ordered by
/// subset size descending, then by the hit keys.
pub fn fbdd_search(
    idx: &HypergraphIndex,
    hits: &[String],
    min_subset_size: usize,
    caps: ConeCaps,
) -> Result<Vec<SubsetResult>, FbddError> {
    if hits.len() > MAX_SEARCH_HITS {
        return Err(FbddError::TooManyHits(hits.len()));
    }
    let ids = resolve_hits(idx, hits)?;
    let mut unique: Vec<(ScaffoldId, usize)> = Vec::new();
    for (pos, &id) in ids.iter().enumerate() {
        if !unique.iter().any(|&(u, _)| u == id) {
            unique.push((id, pos));
        }
    }
    let cones: Vec<(BTreeSet<ScaffoldId>, bool)> = unique
        .iter()
        .map(|&(id, _)| {
            let (c, t) = cone_ids(idx, id, Direction::Up, caps);
            (c.into_iter().collect(), t)
        })
        .collect();
    let n = unique.len();
    let min = min_subset_size.max(1);
    let found: Vec<(u32, BTreeSet<ScaffoldId>, bool)> = (1u32..(1 << n))
        .into_par_iter()
        .filter(|m| m.count_ones() as usize >= min)
        .filter_map(|m| {
            let mut acc: Option<BTreeSet<ScaffoldId>> = None;
            let mut truncated = false;
            for (k, (cone, t)) in cones.iter().enumerate() {
                if m & (1 << k) == 0 {
                    continue;
                }
                truncated |= t;
                acc = Some(match acc {
                    None => cone.clone(),
                    Some(a) => a.intersection(cone).copied().collect(),
                });
            }
            acc.filter(|s| !s.is_empty()).map(|s| (m, s, truncated))
        })
        .collect();
    let masks: Vec<u32> = found.iter().map(|f| f.0).collect();
    let mut out: Vec<SubsetResult> = found
        .into_iter()
        .filter(|(m, _, _)| !masks.iter().any(|&o| o != *m && o & m == *m))
        .map(|(m, set, truncated)| {
            let members: Vec<usize> = (0..n).filter(|&k| m & (1 << k) != 0).collect();
            SubsetResult {
                subset: members.iter().map(|&k| unique[k].1).collect(),
                hit_scaffolds: members
                    .iter()
                    .map(|&k| idx.classes()[unique[k].0 as usize].scaffold.key.clone())
                    .collect(),
                scaffolds: sorted_scaffolds(idx, set),
                truncated,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        b.subset
            .len()
            .cmp(&a.subset.len())
            .then_with(|| a.hit_scaffolds.cmp(&b.hit_scaffolds))
    });
    Ok(out)
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

    fn sc(s: &str) -> Scaffold {
        scaffold_key(s).unwrap()
    }

    #[test]
    fn cones_in_small_corpus() {
        let idx = build(&["c1ccc(COc2ccccc2)cc1"]);
        let up = upper_cone(&idx, &sc("c1ccccc1"), ConeCaps::default()).unwrap();
        assert_eq!(up.members.len(), 1);
        assert_eq!(up.members[0].key, sc("c1ccc(COc2ccccc2)cc1").key);
        assert!(!up.truncated);
        let top = &up.members[0];
        assert!(upper_cone(&idx, top, ConeCaps::default()).unwrap().members.is_empty());
        let down = lower_cone_indexed(&idx, top, ConeCaps::default()).unwrap();
        assert_eq!(down.members.len(), 1);
    }

    #[test]
    fn caps_truncate() {
        let idx = build(&["c1ccc(Cc2ccc(Cc3ccccc3)cc2)cc1"]);
        let benzene = sc("c1ccccc1");
        let full = upper_cone(&idx, &benzene, ConeCaps::default()).unwrap();
        assert_eq!(full.members.len(), 2);
        let shallow = upper_cone(&idx, &benzene, ConeCaps { max_depth: 1, max_size: 10 }).unwrap();
        assert_eq!(shallow.members.len(), 1);
        assert!(shallow.truncated);
        let small = upper_cone(&idx, &benzene, ConeCaps { max_depth: 6, max_size: 1 }).unwrap();
        assert!(small.truncated);
    }

    #[test]
    fn union_of_sulfonamide_parts() {
        let idx = build(&["O=S(=O)(c1ccccc1)N1CCCCCC1", "c1ccc(COc2ccccc2)cc1"]);
        let u = union_scaffolds(&idx, &sc("c1ccccc1"), &sc("C1CCCNCC1")).unwrap();
        assert_eq!(u, vec![sc("O=S(=O)(c1ccccc1)N1CCCCCC1")]);
        assert_eq!(u, union_scaffolds(&idx, &sc("C1CCCNCC1"), &sc("c1ccccc1")).unwrap());
        let own = union_scaffolds(&idx, &sc("c1ccccc1"), &sc("c1ccccc1")).unwrap();
        assert_eq!(own.len(), 2);
    }

    #[test]
    fn fbdd_queries() {
        let idx = build(&["O=S(=O)(c1ccccc1)N1CCCCCC1", "c1ccc(COc2ccccc2)cc1", "CCO"]);
        let hits: Vec<String> = ["Cc1ccccc1", "C1CCCNCC1"].iter().map(|s| s.to_string()).collect();
        let r = fbdd_intersection(&idx, &hits, None, ConeCaps::default()).unwrap();
        assert_eq!(r.scaffolds, vec![sc("O=S(=O)(c1ccccc1)N1CCCCCC1")]);
        let one = fbdd_intersection(&idx, &hits, Some(&[0]), ConeCaps::default()).unwrap();
        assert_eq!(one.scaffolds.len(), 2);
        assert_eq!(
            fbdd_intersection(&idx, &hits, Some(&[]), ConeCaps::default()),
            Err(FbddError::EmptySubset)
        );
        let bad: Vec<String> = ["CCO".into(), "c1ccncc1".into(), "c1c".into()].to_vec();
        match fbdd_intersection(&idx, &bad, None, ConeCaps::default()) {
            Err(FbddError::Hits(errs)) => {
                assert_eq!(errs.len(), 3);
                assert_eq!(errs[0].problem, HitProblem::Ringless);
                assert!(matches!(errs[1].problem, HitProblem::UnknownScaffold(_)));
                assert!(matches!(errs[2].problem, HitProblem::Parse(_)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn search_collapses_duplicates_and_limits_hits() {
        let idx = build(&["c1ccc(COc2ccccc2)cc1"]);
        let hits: Vec<String> = vec!["c1ccccc1".into(), "Cc1ccccc1".into()];
        let r = fbdd_search(&idx, &hits, 1, ConeCaps::default()).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].subset, vec![0]);
        let many: Vec<String> = vec!["c1ccccc1".into(); 13];
        assert_eq!(
            fbdd_search(&idx, &many, 1, ConeCaps::default()),
            Err(FbddError::TooManyHits(13))
        );
    }
}
