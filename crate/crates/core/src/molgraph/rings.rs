//! Ring perception: cyclomatic number, ring-bond detection and a smallest
//! set of smallest rings computed as a minimum cycle basis.

use std::collections::{BTreeSet, VecDeque};

use super::MolGraph;

/// Number of independent rings: `|bonds| - |atoms| + |components|`.
pub fn ring_count(g: &MolGraph) -> u32 {
    let comps = g.component_count();
    (g.bond_count() + comps - g.atom_count()) as u32
}

/// `true` for every bond that lies on a cycle (i.e. is not a bridge).
pub fn ring_bonds(g: &MolGraph) -> Vec<bool> {
    let n = g.atom_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_ring = vec![true; g.bond_count()];
    let mut time = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // Iterative DFS: (atom, parent bond, next neighbor slot).
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        disc[root] = time;
        low[root] = time;
        time += 1;
        while let Some(top) = stack.last_mut() {
            let (v, parent_bond, slot) = *top;
            if let Some(&(w, bi)) = g.neighbors(v).get(slot) {
                top.2 += 1;
                if bi == parent_bond {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, bi, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if low[v] > disc[p] {
                        on_ring[parent_bond] = false;
                    }
                }
            }
        }
    }
    on_ring
}

/// `true` for every atom with at least one ring bond.
pub fn ring_atoms(g: &MolGraph) -> Vec<bool> {
    let rb = ring_bonds(g);
    let mut out = vec![false; g.atom_count()];
    for (bi, bond) in g.bonds().iter().enumerate() {
        if rb[bi] {
            out[bond.a] = true;
            out[bond.b] = true;
        }
    }
    out
}

/// A ring as an ordered atom cycle plus its bond set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ring {
    /// Atoms in cycle order, starting from the smallest index.
    pub atoms: Vec<usize>,
    /// Bond indices, ascending.
    pub bonds: Vec<usize>,
}

impl Ring {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.atoms.contains(&atom)
    }
}

/// Smallest set of smallest rings.
///
/// Candidate cycles come from shortest paths (one per ring bond and one per
/// root/bond pair); they are sorted by size, then by sorted atom list, and
/// taken greedily while GF(2)-independent until the basis has
/// `ring_count(g)` members.
pub fn sssr(g: &MolGraph) -> Vec<Ring> {
    let target = ring_count(g) as usize;
    if target == 0 {
        return Vec::new();
    }
    let on_ring = ring_bonds(g);
    let mut candidates: BTreeSet<(usize, Vec<usize>, Vec<usize>)> = BTreeSet::new();

    // Shortest cycle through each ring bond.
    for (bi, bond) in g.bonds().iter().enumerate() {
        if !on_ring[bi] {
            continue;
        }
        if let Some(path) = shortest_path(g, bond.a, bond.b, Some(bi), &on_ring) {
            if let Some(ring) = ring_from_atoms(g, &path) {
                candidates.insert(candidate_key(ring));
            }
        }
    }

    // Horton-style candidates: root r plus ring bond (u, v).
    let mut mark = vec![0usize; g.atom_count()];
    let mut stamp = 0usize;
    for root in 0..g.atom_count() {
        if !g.neighbors(root).iter().any(|&(_, bi)| on_ring[bi]) {
            continue;
        }
        let (dist, parent) = bfs_tree(g, root, &on_ring);
        for (bi, bond) in g.bonds().iter().enumerate() {
            if !on_ring[bi] || dist[bond.a] == usize::MAX || dist[bond.b] == usize::MAX {
                continue;
            }
            let pu = tree_path(&parent, root, bond.a);
            let pv = tree_path(&parent, root, bond.b);
            stamp += 1;
            for &a in &pu {
                mark[a] = stamp;
            }
            if pv.iter().skip(1).any(|&a| mark[a] == stamp) {
                continue;
            }
            let mut cycle = pu;
            cycle.extend(pv.iter().skip(1).rev());
            if cycle.len() < 3 {
                continue;
            }
            if let Some(ring) = ring_from_atoms(g, &cycle) {
                candidates.insert(candidate_key(ring));
            }
        }
    }

    let words = g.bond_count().div_ceil(64);
    let mut basis: Vec<Vec<u64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rings = Vec::new();
    for (_, _, cycle) in candidates {
        let ring = ring_from_atoms(g, &cycle).expect("candidate was validated");
        let mut v = vec![0u64; words];
        for &bi in &ring.bonds {
            v[bi / 64] |= 1 << (bi % 64);
        }
        if reduce(&mut v, &basis, &pivots) {
            let pivot = first_bit(&v).expect("non-zero after reduction");
            basis.push(v);
            pivots.push(pivot);
            rings.push(ring);
            if rings.len() == target {
                break;
            }
        }
    }
    rings
}

fn candidate_key(ring: Ring) -> (usize, Vec<usize>, Vec<usize>) {
    let mut sorted = ring.atoms.clone();
    sorted.sort_unstable();
    (ring.len(), sorted, ring.atoms)
}

fn first_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
}

/// Reduce `v` against the basis; returns true if it stays non-zero.
fn reduce(v: &mut [u64], basis: &[Vec<u64>], pivots: &[usize]) -> bool {
    loop {
        let Some(bit) = first_bit(v) else {
            return false;
        };
        match pivots.iter().position(|&p| p == bit) {
            Some(k) => {
                for (x, y) in v.iter_mut().zip(&basis[k]) {
                    *x ^= *y;
                }
            }
            None => return true,
        }
    }
}

fn bfs_tree(g: &MolGraph, root: usize, on_ring: &[bool]) -> (Vec<usize>, Vec<usize>) {
    let n = g.atom_count();
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::from([root]);
    dist[root] = 0;
    while let Some(v) = queue.pop_front() {
        let mut nbrs: Vec<usize> = g
            .neighbors(v)
            .iter()
            .filter(|&&(_, bi)| on_ring[bi])
            .map(|&(w, _)| w)
            .collect();
        nbrs.sort_unstable();
        for w in nbrs {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    (dist, parent)
}

fn tree_path(parent: &[usize], root: usize, to: usize) -> Vec<usize> {
    let mut path = vec![to];
    let mut v = to;
    while v != root {
        v = parent[v];
        path.push(v);
    }
    path.reverse();
    path
}

/// Shortest path from `from` to `to` over ring bonds, skipping bond `skip`.
fn shortest_path(
    g: &MolGraph,
    from: usize,
    to: usize,
    skip: Option<usize>,
    on_ring: &[bool],
) -> Option<Vec<usize>> {
    let n = g.atom_count();
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        let mut nbrs: Vec<(usize, usize)> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&(_, bi)| on_ring[bi] && Some(bi) != skip)
            .collect();
        nbrs.sort_unstable();
        for (w, _) in nbrs {
            if !seen[w] {
                seen[w] = true;
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    if !seen[to] {
        return None;
    }
    Some(tree_path(&parent, from, to))
}

/// Build a ring from a closed atom walk, rotated to start at the smallest
/// atom and oriented towards its smaller neighbor.
fn ring_from_atoms(g: &MolGraph, cycle: &[usize]) -> Option<Ring> {
    let n = cycle.len();
    if n < 3 {
        return None;
    }
    let mut bonds = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (cycle[i], cycle[(i + 1) % n]);
        let bi = g.neighbors(a).iter().find(|&&(w, _)| w == b)?.1;
        bonds.push(bi);
    }
    let start = (0..n).min_by_key(|&i| cycle[i])?;
    let mut atoms: Vec<usize> = (0..n).map(|k| cycle[(start + k) % n]).collect();
    if atoms[n - 1] < atoms[1] {
        atoms[1..].reverse();
    }
    bonds.sort_unstable();
    bonds.dedup();
    if bonds.len() != n {
        return None;
    }
    Some(Ring { atoms, bonds })
}
