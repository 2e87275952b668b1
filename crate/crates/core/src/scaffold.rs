//! Murcko frameworks and scaffold identity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::molgraph::{
    parse_smiles, ring_count, write_canonical, BondOrder, CanonicalSmiles, MolGraph, SmilesError,
};

/// A scaffold class identity: canonical key plus hierarchy level.
///
/// The empty key is the ringless scaffold `S_0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Scaffold {
    pub key: CanonicalSmiles,
    pub ring_count: u32,
    /// Produced only by fragmentation; no ingested molecule has it as its
    /// own scaffold.
    #[serde(rename = "virtual")]
    pub is_virtual: bool,
}

impl Scaffold {
    /// The ringless scaffold `S_0`.
    pub fn empty() -> Self {
        Scaffold {
            key: CanonicalSmiles::default(),
            ring_count: 0,
            is_virtual: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.key.is_empty()
    }

    /// Build from an already-extracted framework graph.
    pub fn from_framework(g: &MolGraph) -> Self {
        Scaffold {
            key: write_canonical(g),
            ring_count: ring_count(g),
            is_virtual: false,
        }
    }

    /// Parse the key back into a graph. `S_0` gives the empty graph.
    pub fn graph(&self) -> Result<MolGraph, SmilesError> {
        if self.key.is_empty() {
            return Ok(MolGraph::new());
        }
        parse_smiles(self.key.as_str())
    }

    pub(crate) fn with_virtual(mut self, is_virtual: bool) -> Self {
        self.is_virtual = is_virtual;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScaffoldError {
    #[error("input has {0} disconnected components")]
    MultiComponentInput(usize),
    #[error(transparent)]
    Parse(#[from] SmilesError),
}

/// Rings and linkers of `g`, plus atoms double- or triple-bonded to them.
///
/// Atoms of degree at most one are stripped until none remain; every
/// original atom bonded to the surviving core by order two or more is then
/// put back. Bonds cut by either step become hydrogens on the kept side.
pub fn murcko_scaffold(g: &MolGraph) -> Result<MolGraph, ScaffoldError> {
    let comps = g.component_count();
    if comps > 1 {
        return Err(ScaffoldError::MultiComponentInput(comps));
    }
    Ok(framework(g))
}

pub(crate) fn framework(g: &MolGraph) -> MolGraph {
    let n = g.atom_count();
    let mut keep = vec![true; n];
    let mut degree: Vec<usize> = (0..n).map(|i| g.degree(i)).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&i| degree[i] <= 1).collect();
    while let Some(v) = stack.pop() {
        if !keep[v] {
            continue;
        }
        keep[v] = false;
        for &(w, _) in g.neighbors(v) {
            if keep[w] {
                degree[w] -= 1;
                if degree[w] == 1 {
                    stack.push(w);
                }
            }
        }
    }
    if !keep.iter().any(|&k| k) {
        return MolGraph::new();
    }
    let core = keep.clone();
    for bond in g.bonds() {
        if !matches!(bond.order, BondOrder::Double | BondOrder::Triple) {
            continue;
        }
        if core[bond.a] && !core[bond.b] {
            keep[bond.b] = true;
        } else if core[bond.b] && !core[bond.a] {
            keep[bond.a] = true;
        }
    }
    let mut out = g.induced(&keep);
    out.erase_stereo();
    out
}

/// Scaffold of an already-parsed molecule: largest component, framework,
/// canonical key.
pub fn scaffold_of(g: &MolGraph) -> Scaffold {
    let main = g.largest_component();
    Scaffold::from_framework(&framework(&main))
}

/// Scaffold of a SMILES string.
pub fn scaffold_key(smiles: &str) -> Result<Scaffold, SmilesError> {
    Ok(scaffold_of(&parse_smiles(smiles)?))
}

pub fn hierarchy_level(s: &Scaffold) -> u32 {
    s.ring_count
}
