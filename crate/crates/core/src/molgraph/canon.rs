//! Canonical and randomized SMILES writers.
//!
//! Canonical ranking is iterative partition refinement over atom invariants,
//! followed by individualization of tied atoms. Every branch of the
//! individualization tree is written out and the lexicographically smallest
//! string wins, so the result does not depend on input atom order even when
//! refinement alone cannot separate non-equivalent atoms.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::rings::ring_atoms;
use super::{BondOrder, MolGraph};

/// Upper bound on explored individualization leaves per component. Only
/// reached by highly symmetric graphs whose tied atoms are true symmetry
/// partners, where any leaf gives the same string.
const LEAF_CAP: usize = 1024;

/// A SMILES string in canonical form. The empty string is the key of the
/// ringless scaffold.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalSmiles(String);

impl CanonicalSmiles {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Wrap a string already known to be canonical (e.g. read back from a
    /// persisted index).
    pub(crate) fn from_trusted(s: String) -> Self {
        CanonicalSmiles(s)
    }
}

impl fmt::Display for CanonicalSmiles {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for CanonicalSmiles {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("cannot write SMILES for an empty graph")]
pub struct EmptyGraph;

/// Canonical SMILES. Components are written separately and joined with
/// `.` in sorted order; the empty graph gives the empty string.
pub fn write_canonical(g: &MolGraph) -> CanonicalSmiles {
    let comps = g.components();
    let mut parts: Vec<String> = if comps.len() == 1 {
        vec![canonical_component(g)]
    } else {
        comps
            .iter()
            .map(|comp| {
                let mut keep = vec![false; g.atom_count()];
                for &i in comp {
                    keep[i] = true;
                }
                canonical_component(&g.induced(&keep))
            })
            .collect()
    };
    parts.sort();
    CanonicalSmiles(parts.join("."))
}

/// A valid SMILES for `g` from a seeded random atom ordering.
pub fn randomize_smiles(g: &MolGraph, seed: u64) -> Result<String, EmptyGraph> {
    if g.is_empty() {
        return Err(EmptyGraph);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ranks: Vec<u32> = (0..g.atom_count() as u32).collect();
    ranks.shuffle(&mut rng);
    Ok(write_ranked(g, &ranks))
}

fn canonical_component(g: &MolGraph) -> String {
    if g.is_empty() {
        return String::new();
    }
    let mut ranks = initial_ranks(g);
    refine(g, &mut ranks);
    let mut search = Search {
        g,
        best: None,
        leaves: 0,
    };
    search.descend(ranks);
    search.best.expect("at least one leaf is always reached")
}

struct Search<'g> {
    g: &'g MolGraph,
    best: Option<String>,
    leaves: usize,
}

impl Search<'_> {
    fn descend(&mut self, ranks: Vec<u32>) {
        let Some(cell) = first_tied_cell(&ranks) else {
            let s = write_ranked(self.g, &ranks);
            if self.best.as_ref().is_none_or(|b| s < *b) {
                self.best = Some(s);
            }
            self.leaves += 1;
            return;
        };
        let members = prune_twins(self.g, cell.1);
        for (k, v) in members.into_iter().enumerate() {
            if k > 0 && self.leaves >= LEAF_CAP {
                break;
            }
            let mut next = individualize(&ranks, cell.0, v);
            refine(self.g, &mut next);
            self.descend(next);
        }
    }
}

fn initial_ranks(g: &MolGraph) -> Vec<u32> {
    let in_ring = ring_atoms(g);
    let keys: Vec<(u8, usize, i8, bool, bool, u8)> = (0..g.atom_count())
        .map(|i| {
            let a = g.atom(i);
            (
                a.element.atomic_number(),
                g.degree(i),
                a.charge,
                a.aromatic,
                in_ring[i],
                g.total_h(i),
            )
        })
        .collect();
    dense_ranks(&keys)
}

fn dense_ranks<K: Ord>(keys: &[K]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut ranks = vec![0u32; keys.len()];
    let mut r = 0u32;
    for w in 0..order.len() {
        if w > 0 && keys[order[w]] != keys[order[w - 1]] {
            r += 1;
        }
        ranks[order[w]] = r;
    }
    ranks
}

fn distinct(ranks: &[u32]) -> usize {
    ranks.iter().copied().max().map_or(0, |m| m as usize + 1)
}

/// Morgan-style refinement: split classes by the sorted multiset of
/// `(neighbor rank, bond order)` until the partition stops changing.
fn refine(g: &MolGraph, ranks: &mut Vec<u32>) {
    let n = g.atom_count();
    let mut classes = distinct(ranks);
    while classes < n {
        let keys: Vec<(u32, Vec<(u32, u8)>)> = (0..n)
            .map(|i| {
                let mut nb: Vec<(u32, u8)> = g
                    .neighbors(i)
                    .iter()
                    .map(|&(w, bi)| (ranks[w], g.bonds()[bi].order.code()))
                    .collect();
                nb.sort_unstable();
                (ranks[i], nb)
            })
            .collect();
        let next = dense_ranks(&keys);
        let c = distinct(&next);
        *ranks = next;
        if c == classes {
            break;
        }
        classes = c;
    }
}

/// Lowest rank shared by more than one atom, with its members.
fn first_tied_cell(ranks: &[u32]) -> Option<(u32, Vec<usize>)> {
    let mut counts = vec![0usize; distinct(ranks)];
    for &r in ranks {
        counts[r as usize] += 1;
    }
    let r = counts.iter().position(|&c| c > 1)? as u32;
    let members = (0..ranks.len()).filter(|&i| ranks[i] == r).collect();
    Some((r, members))
}

/// Terminal atoms hanging off the same neighbor by the same bond order are
/// interchangeable; branching on one of them is enough.
fn prune_twins(g: &MolGraph, members: Vec<usize>) -> Vec<usize> {
    let mut seen: Vec<(usize, BondOrder)> = Vec::new();
    let mut out = Vec::with_capacity(members.len());
    for v in members {
        if g.degree(v) == 1 {
            let (p, bi) = g.neighbors(v)[0];
            let key = (p, g.bonds()[bi].order);
            if seen.contains(&key) {
                continue;
            }
            seen.push(key);
        }
        out.push(v);
    }
    out
}

fn individualize(ranks: &[u32], cell: u32, chosen: usize) -> Vec<u32> {
    let keys: Vec<(u32, bool)> = ranks
        .iter()
        .enumerate()
        .map(|(i, &r)| (r, r == cell && i != chosen))
        .collect();
    dense_ranks(&keys)
}

/// Write every component by DFS from its lowest-ranked atom, visiting
/// neighbors in rank order. Components are ordered by their lowest rank.
pub(crate) fn write_ranked(g: &MolGraph, ranks: &[u32]) -> String {
    let n = g.atom_count();
    let mut writer = Writer {
        g,
        ranks,
        visited: vec![false; n],
        children: vec![Vec::new(); n],
        closure_seen: vec![false; g.bond_count()],
        opens: vec![Vec::new(); n],
        closes: vec![Vec::new(); n],
        digit_of: vec![0; g.bond_count()],
        in_use: Vec::new(),
        out: String::with_capacity(n * 2),
    };
    let mut starts: Vec<usize> = g
        .components()
        .into_iter()
        .map(|c| *c.iter().min_by_key(|&&i| ranks[i]).expect("component is non-empty"))
        .collect();
    starts.sort_by_key(|&s| ranks[s]);
    for (k, s) in starts.into_iter().enumerate() {
        if k > 0 {
            writer.out.push('.');
        }
        writer.plan(s, usize::MAX);
        writer.emit(s);
    }
    writer.out
}

struct Writer<'g> {
    g: &'g MolGraph,
    ranks: &'g [u32],
    visited: Vec<bool>,
    children: Vec<Vec<(usize, usize)>>,
    closure_seen: Vec<bool>,
    /// Ring bonds opened at an atom: `(partner, bond)`.
    opens: Vec<Vec<(usize, usize)>>,
    /// Ring bonds closed at an atom.
    closes: Vec<Vec<usize>>,
    digit_of: Vec<u32>,
    in_use: Vec<bool>,
    out: String,
}

impl Writer<'_> {
    fn sorted_neighbors(&self, v: usize) -> Vec<(usize, usize)> {
        let mut nb = self.g.neighbors(v).to_vec();
        nb.sort_by_key(|&(w, _)| self.ranks[w]);
        nb
    }

    fn plan(&mut self, v: usize, parent_bond: usize) {
        self.visited[v] = true;
        for (w, bi) in self.sorted_neighbors(v) {
            if bi == parent_bond {
                continue;
            }
            if !self.visited[w] {
                self.children[v].push((w, bi));
                self.plan(w, bi);
            } else if !self.closure_seen[bi] {
                self.closure_seen[bi] = true;
                self.opens[w].push((v, bi));
                self.closes[v].push(bi);
            }
        }
    }

    fn emit(&mut self, v: usize) {
        self.out.push_str(&atom_text(self.g, v));

        let mut closing: Vec<usize> = std::mem::take(&mut self.closes[v]);
        closing.sort_by_key(|&bi| self.digit_of[bi]);
        for &bi in &closing {
            let d = self.digit_of[bi];
            push_digit(&mut self.out, d);
        }

        let mut opening = std::mem::take(&mut self.opens[v]);
        opening.sort_by_key(|&(w, _)| self.ranks[w]);
        for (_, bi) in opening {
            let d = self.allocate_digit();
            self.digit_of[bi] = d;
            self.out.push_str(bond_symbol(self.g, bi));
            push_digit(&mut self.out, d);
        }
        for bi in closing {
            self.in_use[self.digit_of[bi] as usize] = false;
        }

        let children = std::mem::take(&mut self.children[v]);
        let last = children.len().saturating_sub(1);
        for (k, (w, bi)) in children.into_iter().enumerate() {
            if k < last {
                self.out.push('(');
                self.out.push_str(bond_symbol(self.g, bi));
                self.emit(w);
                self.out.push(')');
            } else {
                self.out.push_str(bond_symbol(self.g, bi));
                self.emit(w);
            }
        }
    }

    fn allocate_digit(&mut self) -> u32 {
        let d = (1..)
            .find(|&d| !self.in_use.get(d).copied().unwrap_or(false))
            .expect("digits are unbounded");
        if self.in_use.len() <= d {
            self.in_use.resize(d + 1, false);
        }
        self.in_use[d] = true;
        d as u32
    }
}

fn push_digit(out: &mut String, d: u32) {
    if d < 10 {
        out.push(char::from(b'0' + d as u8));
    } else {
        out.push('%');
        out.push_str(&d.to_string());
    }
}

fn bond_symbol(g: &MolGraph, bi: usize) -> &'static str {
    let bond = &g.bonds()[bi];
    match bond.order {
        BondOrder::Double => "=",
        BondOrder::Triple => "#",
        BondOrder::Aromatic => "",
        BondOrder::Single => {
            if g.atom(bond.a).aromatic && g.atom(bond.b).aromatic {
                "-"
            } else {
                ""
            }
        }
    }
}

fn atom_text(g: &MolGraph, i: usize) -> String {
    let atom = g.atom(i);
    let symbol = if atom.aromatic {
        atom.element.symbol().to_ascii_lowercase()
    } else {
        atom.element.symbol().to_string()
    };
    let h = g.total_h(i);
    if atom.element.is_organic_subset() && atom.charge == 0 && g.default_h(i) == h {
        return symbol;
    }
    let mut s = String::with_capacity(8);
    s.push('[');
    s.push_str(&symbol);
    match h {
        0 => {}
        1 => s.push('H'),
        n => {
            s.push('H');
            s.push_str(&n.to_string());
        }
    }
    match atom.charge {
        0 => {}
        1 => s.push('+'),
        -1 => s.push('-'),
        c if c > 0 => {
            s.push('+');
            s.push_str(&c.to_string());
        }
        c => {
            s.push('-');
            s.push_str(&(-c).to_string());
        }
    }
    s.push(']');
    s
}
