//! Ring-removal fragmentation and the predecessor order it induces.

pub mod substructure;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::molgraph::aromatic::{dearomatize_orphans, is_kekulizable, normalize_kekule_rings};
use crate::molgraph::{ring_count, sssr, write_canonical, BondOrder, MolGraph};
use crate::scaffold::{framework, Scaffold};

pub use substructure::{
    find_embedding, is_substructure, is_substructure_with_budget, MatchOptions, Timeout, DEFAULT_MATCH_BUDGET,
};

/// One SSSR ring and the fused system it belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingSystem {
    pub atoms: Vec<usize>,
    /// Rings sharing at least one bond, directly or transitively, share this.
    pub fused_group: usize,
}

pub fn ring_systems(g: &MolGraph) -> Vec<RingSystem> {
    let rings = sssr(g);
    let mut group: Vec<usize> = (0..rings.len()).collect();
    fn find(group: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while group[r] != r {
            r = group[r];
        }
        group[i] = r;
        r
    }
    for i in 0..rings.len() {
        for j in i + 1..rings.len() {
            if rings[i].bonds.iter().any(|b| rings[j].bonds.binary_search(b).is_ok()) {
                let (ri, rj) = (find(&mut group, i), find(&mut group, j));
                group[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut ids = BTreeMap::new();
    (0..rings.len())
        .map(|i| {
            let root = find(&mut group, i);
            let next = ids.len();
            let fused_group = *ids.entry(root).or_insert(next);
            RingSystem {
                atoms: rings[i].atoms.clone(),
                fused_group,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FragmentError {
    #[error("not a scaffold key: {0:?}")]
    InvalidScaffold(String),
}

/// Scaffolds one ring smaller than `s`.
///
/// For each SSSR ring, its atoms that belong to no other ring are deleted,
/// except those double-bonded to an atom outside the ring, and its bonds
/// that belong to no other ring are cut. What remains is reduced to its
/// framework and kept if it is a single piece with exactly one ring fewer
/// whose aromatic part still has a Kekulé structure. Orphaned aromatic
/// atoms are re-kekulized. Results are deduplicated and sorted by key.
pub fn fragment_once(s: &Scaffold) -> Result<Vec<Scaffold>, FragmentError> {
    let invalid = || FragmentError::InvalidScaffold(s.key.to_string());
    if s.ring_count == 0 {
        return Ok(Vec::new());
    }
    let g = s.graph().map_err(|_| invalid())?;
    if write_canonical(&g) != s.key || write_canonical(&framework(&g)) != s.key || ring_count(&g) != s.ring_count {
        return Err(invalid());
    }
    Ok(fragment_graph(&g))
}

pub(crate) fn fragment_graph(g: &MolGraph) -> Vec<Scaffold> {
    let rc = ring_count(g);
    if rc <= 1 {
        return Vec::new();
    }
    let rings = sssr(g);
    let mut atom_rings = vec![0usize; g.atom_count()];
    let mut bond_rings = vec![0usize; g.bond_count()];
    for ring in &rings {
        for &a in &ring.atoms {
            atom_rings[a] += 1;
        }
        for &b in &ring.bonds {
            bond_rings[b] += 1;
        }
    }
    let mut out = BTreeSet::new();
    for ring in &rings {
        let mut keep_atoms = vec![true; g.atom_count()];
        for &a in &ring.atoms {
            keep_atoms[a] = atom_rings[a] > 1;
        }
        for &a in &ring.atoms {
            if atom_rings[a] == 1 {
                keep_atoms[a] = g.neighbors(a).iter().any(|&(w, bi)| {
                    !ring.contains(w)
                        && keep_atoms[w]
                        && matches!(g.bonds()[bi].order, BondOrder::Double | BondOrder::Triple)
                });
            }
        }
        let mut keep_bonds = vec![true; g.bond_count()];
        for &b in &ring.bonds {
            if bond_rings[b] == 1 {
                keep_bonds[b] = false;
            }
        }
        let mut rest = g.edge_subgraph(&keep_atoms, &keep_bonds);
        if !is_kekulizable(&rest) {
            continue;
        }
        dearomatize_orphans(&mut rest);
        let mut frame = framework(&rest);
        normalize_kekule_rings(&mut frame);
        if frame.is_empty() || !frame.is_connected() || ring_count(&frame) != rc - 1 {
            continue;
        }
        out.insert(Scaffold::from_framework(&frame));
    }
    out.into_iter().collect()
}

/// Whether `p` embeds into `s` as a fragment: strict matching, or, for
/// fragments whose aromatic atoms were re-kekulized, Kekulé bonds of `p`
/// standing in for aromatic bonds of `s`.
pub fn is_fragment_of(p: &MolGraph, s: &MolGraph) -> Result<bool, Timeout> {
    if is_substructure(p, s)? {
        return Ok(true);
    }
    let opts = MatchOptions {
        kekule_aware: true,
        ..MatchOptions::default()
    };
    Ok(find_embedding(p, s, &opts)?.is_some())
}

/// Transitive closure of [`fragment_once`], excluding `S_0`. Sorted by
/// ring count descending, then key.
pub fn lower_cone(s: &Scaffold) -> Result<Vec<Scaffold>, FragmentError> {
    let mut seen: BTreeSet<Scaffold> = BTreeSet::new();
    let mut frontier = fragment_once(s)?;
    while !frontier.is_empty() {
        let mut next = BTreeSet::new();
        for f in frontier {
            if seen.insert(f.clone()) {
                let g = f.graph().expect("fragment keys parse");
                next.extend(fragment_graph(&g));
            }
        }
        frontier = next.into_iter().filter(|f| !seen.contains(f)).collect();
    }
    let mut out: Vec<Scaffold> = seen.into_iter().collect();
    out.sort_by(|x, y| y.ring_count.cmp(&x.ring_count).then_with(|| x.key.cmp(&y.key)));
    Ok(out)
}
