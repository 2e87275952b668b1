//! Connected maximum common edge subgraph.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::Serialize;

use crate::fragment::substructure::{atoms_compatible, find_embedding, MatchOptions};
use crate::molgraph::{write_canonical, Atom, CanonicalSmiles, MolGraph, SmilesError};
use crate::scaffold::Scaffold;

pub const DEFAULT_MCS_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McsResult {
    /// The shared subgraph. Hydrogen counts are left to the default
    /// valence rule; only element, charge, aromaticity and bond orders are
    /// common to both inputs.
    pub common: MolGraph,
    /// `atom_maps.0[i]` and `atom_maps.1[i]` are the images of common atom
    /// `i` in the first and second input.
    pub atom_maps: (Vec<usize>, Vec<usize>),
    /// False when the expansion budget stopped the search early.
    pub exhausted: bool,
}

impl McsResult {
    pub fn smiles(&self) -> CanonicalSmiles {
        write_canonical(&self.common)
    }

    pub fn bond_count(&self) -> usize {
        self.common.bond_count()
    }

    pub fn atom_count(&self) -> usize {
        self.common.atom_count()
    }
}

/// Serializable summary of an [`McsResult`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct McsSummary {
    pub common: CanonicalSmiles,
    pub atoms: usize,
    pub bonds: usize,
    pub atom_maps: (Vec<usize>, Vec<usize>),
    pub exhausted: bool,
}

impl From<&McsResult> for McsSummary {
    fn from(r: &McsResult) -> Self {
        McsSummary {
            common: r.smiles(),
            atoms: r.atom_count(),
            bonds: r.bond_count(),
            atom_maps: r.atom_maps.clone(),
            exhausted: r.exhausted,
        }
    }
}

/// MCS of two scaffolds.
pub fn intersection(s1: &Scaffold, s2: &Scaffold, budget: u64) -> Result<McsResult, SmilesError> {
    Ok(mcs(&s1.graph()?, &s2.graph()?, budget))
}

/// Largest connected subgraph, by bond count, that embeds in both graphs
/// under the strict substructure rules. When no bond is shared a single
/// compatible atom is returned if one exists.
///
/// Among equally large candidates the one with the smallest canonical
/// string wins, then the smallest atom map in search order.
pub fn mcs(g1: &MolGraph, g2: &MolGraph, budget: u64) -> McsResult {
    let swap = match (g1.bond_count(), g1.atom_count()).cmp(&(g2.bond_count(), g2.atom_count())) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => write_canonical(g1) > write_canonical(g2),
    };
    let (a, b) = if swap { (g2, g1) } else { (g1, g2) };
    let mut best = search(a, b, budget);
    if swap {
        best.atom_maps = (best.atom_maps.1, best.atom_maps.0);
    }
    best
}

struct Candidate {
    key: CanonicalSmiles,
    a_atoms: Vec<usize>,
    b_atoms: Vec<usize>,
    bonds: Vec<usize>,
}

fn search(a: &MolGraph, b: &MolGraph, budget: u64) -> McsResult {
    if a.is_empty() || b.is_empty() {
        return McsResult {
            common: MolGraph::new(),
            atom_maps: (Vec::new(), Vec::new()),
            exhausted: true,
        };
    }
    if a.is_connected() {
        let opts = MatchOptions {
            budget,
            kekule_aware: false,
        };
        if let Ok(Some(map)) = find_embedding(a, b, &opts) {
            return McsResult {
                common: strip(a, &vec![true; a.atom_count()], &vec![true; a.bond_count()]),
                atom_maps: ((0..a.atom_count()).collect(), map),
                exhausted: true,
            };
        }
    }
    let mut s = Search {
        a,
        b,
        map: vec![usize::MAX; a.atom_count()],
        used: vec![false; b.atom_count()],
        chosen: vec![false; a.bond_count()],
        excluded: vec![false; a.bond_count()],
        size: 0,
        undecided: 0,
        best_size: 0,
        best: None,
        keys: HashMap::new(),
        expansions: 0,
        budget,
        truncated: false,
    };
    for r in 0..a.bond_count() {
        if s.truncated {
            break;
        }
        let ra = &a.bonds()[r];
        for bb in b.bonds() {
            if bb.order != ra.order {
                continue;
            }
            for (x, y) in [(bb.a, bb.b), (bb.b, bb.a)] {
                if !atoms_compatible(a.atom(ra.a), b.atom(x)) || !atoms_compatible(a.atom(ra.b), b.atom(y)) {
                    continue;
                }
                s.map[ra.a] = x;
                s.map[ra.b] = y;
                s.used[x] = true;
                s.used[y] = true;
                s.chosen[r] = true;
                s.size = 1;
                for e in 0..r {
                    s.excluded[e] = true;
                }
                s.undecided = a.bond_count() - r - 1;
                s.extend();
                for e in 0..r {
                    s.excluded[e] = false;
                }
                s.chosen[r] = false;
                s.used[x] = false;
                s.used[y] = false;
                s.map[ra.a] = usize::MAX;
                s.map[ra.b] = usize::MAX;
            }
        }
    }
    let exhausted = !s.truncated;
    if let Some(c) = s.best {
        let mut keep_atoms = vec![false; a.atom_count()];
        for &i in &c.a_atoms {
            keep_atoms[i] = true;
        }
        let mut keep_bonds = vec![false; a.bond_count()];
        for &bi in &c.bonds {
            keep_bonds[bi] = true;
        }
        return McsResult {
            common: strip(a, &keep_atoms, &keep_bonds),
            atom_maps: (c.a_atoms, c.b_atoms),
            exhausted,
        };
    }
    single_atom(a, b, exhausted)
}

fn single_atom(a: &MolGraph, b: &MolGraph, exhausted: bool) -> McsResult {
    let mut best: Option<(CanonicalSmiles, usize, usize)> = None;
    for i in 0..a.atom_count() {
        let Some(j) = (0..b.atom_count()).find(|&j| atoms_compatible(a.atom(i), b.atom(j))) else {
            continue;
        };
        let mut keep = vec![false; a.atom_count()];
        keep[i] = true;
        let key = write_canonical(&strip(a, &keep, &vec![false; a.bond_count()]));
        if best.as_ref().is_none_or(|(k, _, _)| key < *k) {
            best = Some((key, i, j));
        }
    }
    match best {
        Some((_, i, j)) => {
            let mut keep = vec![false; a.atom_count()];
            keep[i] = true;
            McsResult {
                common: strip(a, &keep, &vec![false; a.bond_count()]),
                atom_maps: (vec![i], vec![j]),
                exhausted,
            }
        }
        None => McsResult {
            common: MolGraph::new(),
            atom_maps: (Vec::new(), Vec::new()),
            exhausted,
        },
    }
}

/// Subgraph of `g` with hydrogens and stereo dropped.
fn strip(g: &MolGraph, keep_atoms: &[bool], keep_bonds: &[bool]) -> MolGraph {
    let mut out = MolGraph::new();
    let mut idx = vec![usize::MAX; g.atom_count()];
    for (i, atom) in g.atoms().iter().enumerate() {
        if keep_atoms[i] {
            idx[i] = out.add_atom(Atom {
                element: atom.element,
                charge: atom.charge,
                aromatic: atom.aromatic,
                ..Atom::new(atom.element)
            });
        }
    }
    for (bi, bond) in g.bonds().iter().enumerate() {
        if keep_bonds[bi] {
            out.add_bond(idx[bond.a], idx[bond.b], bond.order)
                .expect("bond copied from a valid graph");
        }
    }
    out
}

struct Search<'g> {
    a: &'g MolGraph,
    b: &'g MolGraph,
    map: Vec<usize>,
    used: Vec<bool>,
    chosen: Vec<bool>,
    excluded: Vec<bool>,
    size: usize,
    /// Bonds of `a` not yet chosen or excluded.
    undecided: usize,
    best_size: usize,
    best: Option<Candidate>,
    /// Canonical key per chosen bond set.
    keys: HashMap<Vec<bool>, CanonicalSmiles>,
    expansions: u64,
    budget: u64,
    truncated: bool,
}

impl Search<'_> {
    fn extend(&mut self) {
        if self.truncated {
            return;
        }
        self.expansions += 1;
        if self.expansions > self.budget {
            self.truncated = true;
            return;
        }
        if self.size + self.undecided < self.best_size {
            return;
        }
        let frontier = (0..self.a.bond_count()).find(|&e| {
            let bond = &self.a.bonds()[e];
            !self.chosen[e]
                && !self.excluded[e]
                && (self.map[bond.a] != usize::MAX || self.map[bond.b] != usize::MAX)
        });
        let Some(f) = frontier else {
            self.record();
            return;
        };
        let bond = self.a.bonds()[f].clone();
        let (u, v) = if self.map[bond.a] != usize::MAX {
            (bond.a, bond.b)
        } else {
            (bond.b, bond.a)
        };
        self.undecided -= 1;

        // Include f.
        self.chosen[f] = true;
        self.size += 1;
        if self.map[v] != usize::MAX {
            if self
                .b
                .bond_between(self.map[u], self.map[v])
                .is_some_and(|bb| bb.order == bond.order)
            {
                self.extend();
            }
        } else {
            let mut images: Vec<usize> = self
                .b
                .neighbors(self.map[u])
                .iter()
                .filter(|&&(w, bi)| {
                    !self.used[w]
                        && self.b.bonds()[bi].order == bond.order
                        && atoms_compatible(self.a.atom(v), self.b.atom(w))
                })
                .map(|&(w, _)| w)
                .collect();
            images.sort_unstable();
            for w in images {
                self.map[v] = w;
                self.used[w] = true;
                self.extend();
                self.used[w] = false;
                self.map[v] = usize::MAX;
            }
        }
        self.size -= 1;
        self.chosen[f] = false;

        // Exclude f.
        self.excluded[f] = true;
        self.extend();
        self.excluded[f] = false;
        self.undecided += 1;
    }

    fn record(&mut self) {
        if self.size < self.best_size {
            return;
        }
        let key = match self.keys.get(&self.chosen) {
            Some(k) => k.clone(),
            None => {
                let mut keep_atoms = vec![false; self.a.atom_count()];
                for (e, bond) in self.a.bonds().iter().enumerate() {
                    if self.chosen[e] {
                        keep_atoms[bond.a] = true;
                        keep_atoms[bond.b] = true;
                    }
                }
                let k = write_canonical(&strip(self.a, &keep_atoms, &self.chosen));
                self.keys.insert(self.chosen.clone(), k.clone());
                k
            }
        };
        let a_atoms: Vec<usize> = (0..self.a.atom_count()).filter(|&i| self.map[i] != usize::MAX).collect();
        let b_atoms: Vec<usize> = a_atoms.iter().map(|&i| self.map[i]).collect();
        let better = match &self.best {
            Some(c) if self.size == self.best_size => {
                (&key, &a_atoms, &b_atoms) < (&c.key, &c.a_atoms, &c.b_atoms)
            }
            _ => true,
        };
        if better {
            self.best_size = self.size;
            self.best = Some(Candidate {
                key,
                a_atoms,
                b_atoms,
                bonds: (0..self.a.bond_count()).filter(|&e| self.chosen[e]).collect(),
            });
        }
    }
}
