//! Budgeted subgraph monomorphism.

use thiserror::Error;

use crate::molgraph::{Atom, BondOrder, MolGraph};

/// Node expansions allowed by [`is_substructure`].
pub const DEFAULT_MATCH_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("substructure search exceeded {budget} node expansions")]
pub struct Timeout {
    pub budget: u64,
}

/// Matching knobs for [`find_embedding`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchOptions {
    pub budget: u64,
    /// Let a non-aromatic atom or a single/double bond of the pattern map
    /// onto an aromatic atom or bond of the target. Needed when the pattern
    /// is a re-kekulized piece of an aromatic system.
    pub kekule_aware: bool,
}

impl Default for MatchOptions {
    fn default() -> Self {
        MatchOptions {
            budget: DEFAULT_MATCH_BUDGET,
            kekule_aware: false,
        }
    }
}

/// Whether `a` embeds into `b`: an injective atom map preserving element,
/// aromatic flag and charge under which every bond of `a` has a bond of the
/// same order in `b`. Extra bonds in `b` are allowed.
pub fn is_substructure(a: &MolGraph, b: &MolGraph) -> Result<bool, Timeout> {
    is_substructure_with_budget(a, b, DEFAULT_MATCH_BUDGET)
}

pub fn is_substructure_with_budget(a: &MolGraph, b: &MolGraph, budget: u64) -> Result<bool, Timeout> {
    let opts = MatchOptions {
        budget,
        ..MatchOptions::default()
    };
    Ok(find_embedding(a, b, &opts)?.is_some())
}

/// First embedding found, as `map[a_atom] = b_atom`.
pub fn find_embedding(a: &MolGraph, b: &MolGraph, opts: &MatchOptions) -> Result<Option<Vec<usize>>, Timeout> {
    if a.atom_count() > b.atom_count() || a.bond_count() > b.bond_count() {
        return Ok(None);
    }
    if a.is_empty() {
        return Ok(Some(Vec::new()));
    }
    if !element_counts_fit(a, b, opts.kekule_aware) {
        return Ok(None);
    }
    let order = match_order(a);
    let mut m = Matcher {
        a,
        b,
        order,
        map: vec![usize::MAX; a.atom_count()],
        used: vec![false; b.atom_count()],
        expansions: 0,
        opts: *opts,
    };
    if m.extend(0)? {
        Ok(Some(m.map))
    } else {
        Ok(None)
    }
}

pub(crate) fn atoms_compatible(x: &Atom, y: &Atom) -> bool {
    x.element == y.element && x.aromatic == y.aromatic && x.charge == y.charge
}

fn element_counts_fit(a: &MolGraph, b: &MolGraph, kekule_aware: bool) -> bool {
    let class = |atom: &Atom| (atom.element, atom.aromatic && !kekule_aware, atom.charge);
    let mut counts = std::collections::HashMap::new();
    for atom in b.atoms() {
        *counts.entry(class(atom)).or_insert(0i64) += 1;
    }
    for atom in a.atoms() {
        let c = counts.entry(class(atom)).or_insert(0);
        *c -= 1;
        if *c < 0 {
            return false;
        }
    }
    true
}

/// Visit order: each component of `a` breadth-first from its highest-degree
/// atom, so every later atom has an already-placed neighbor.
/// Entries are `(atom, anchor neighbor or usize::MAX)`.
fn match_order(a: &MolGraph) -> Vec<(usize, usize)> {
    let n = a.atom_count();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut comps = a.components();
    comps.sort_by_key(|c| std::cmp::Reverse(c.len()));
    for comp in comps {
        let root = *comp
            .iter()
            .max_by_key(|&&i| (a.degree(i), std::cmp::Reverse(i)))
            .expect("component is non-empty");
        placed[root] = true;
        order.push((root, usize::MAX));
        let mut head = order.len() - 1;
        while head < order.len() {
            let v = order[head].0;
            head += 1;
            let mut nb: Vec<usize> = a.neighbors(v).iter().map(|&(w, _)| w).collect();
            nb.sort_by_key(|&w| (std::cmp::Reverse(a.degree(w)), w));
            for w in nb {
                if !placed[w] {
                    placed[w] = true;
                    order.push((w, v));
                }
            }
        }
    }
    order
}

struct Matcher<'g> {
    a: &'g MolGraph,
    b: &'g MolGraph,
    order: Vec<(usize, usize)>,
    map: Vec<usize>,
    used: Vec<bool>,
    expansions: u64,
    opts: MatchOptions,
}

impl Matcher<'_> {
    fn extend(&mut self, depth: usize) -> Result<bool, Timeout> {
        if depth == self.order.len() {
            return Ok(true);
        }
        let (v, anchor) = self.order[depth];
        let candidates: Vec<usize> = if anchor == usize::MAX {
            (0..self.b.atom_count()).collect()
        } else {
            self.b.neighbors(self.map[anchor]).iter().map(|&(w, _)| w).collect()
        };
        for w in candidates {
            if self.used[w] || !self.feasible(v, w) {
                continue;
            }
            self.expansions += 1;
            if self.expansions > self.opts.budget {
                return Err(Timeout {
                    budget: self.opts.budget,
                });
            }
            self.map[v] = w;
            self.used[w] = true;
            if self.extend(depth + 1)? {
                return Ok(true);
            }
            self.used[w] = false;
            self.map[v] = usize::MAX;
        }
        Ok(false)
    }

    fn feasible(&self, v: usize, w: usize) -> bool {
        let (x, y) = (self.a.atom(v), self.b.atom(w));
        let atom_ok = if self.opts.kekule_aware {
            x.element == y.element && x.charge == y.charge && (x.aromatic == y.aromatic || y.aromatic)
        } else {
            atoms_compatible(x, y)
        };
        if !atom_ok || self.a.degree(v) > self.b.degree(w) {
            return false;
        }
        self.a.neighbors(v).iter().all(|&(u, bi)| {
            let mu = self.map[u];
            mu == usize::MAX
                || self.b.bond_between(w, mu).is_some_and(|bond| {
                    let order = self.a.bonds()[bi].order;
                    bond.order == order
                        || (self.opts.kekule_aware
                            && bond.order == BondOrder::Aromatic
                            && matches!(order, BondOrder::Single | BondOrder::Double))
                })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;

    fn sub(a: &str, b: &str) -> bool {
        is_substructure(&parse_smiles(a).unwrap(), &parse_smiles(b).unwrap()).unwrap()
    }

    #[test]
    fn basic_embeddings() {
        assert!(sub("c1ccccc1", "c1ccc(COc2ccccc2)cc1"));
        assert!(sub("c1ccc(COc2ccccc2)cc1", "c1ccc(COc2ccccc2)cc1"));
        assert!(!sub("c1ccncc1", "c1ccccc1"));
        assert!(!sub("C1CCCCC1", "c1ccccc1"));
        assert!(sub("CCCCCC", "C1CCCCC1"));
    }

    #[test]
    fn kekule_aware_mode() {
        let a = parse_smiles("C1=COCCC1").unwrap();
        let b = parse_smiles("c1ccc2c(c1)CCCO2").unwrap();
        assert!(!is_substructure(&a, &b).unwrap());
        let opts = MatchOptions {
            kekule_aware: true,
            ..MatchOptions::default()
        };
        assert!(find_embedding(&a, &b, &opts).unwrap().is_some());
        let benzene = parse_smiles("c1ccccc1").unwrap();
        let cyclohexane = parse_smiles("C1CCCCC1").unwrap();
        assert!(find_embedding(&benzene, &cyclohexane, &opts).unwrap().is_none());
    }

    #[test]
    fn budget_exhaustion_is_distinct() {
        let a = parse_smiles("C1CCCCCCCCCCCCCCC1").unwrap();
        let b = parse_smiles("C12CCCCC1CCCC2CCCCCCCCCCCCCC").unwrap();
        assert_eq!(is_substructure_with_budget(&a, &b, 3), Err(Timeout { budget: 3 }));
    }
}
