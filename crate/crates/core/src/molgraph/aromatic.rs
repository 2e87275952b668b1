//! The bounded aromaticity model: lowercase input is trusted, alternating
//! Kekulé six-rings of C/N are promoted, and fragments that lose their
//! aromatic ring are re-kekulized.

use super::rings::sssr;
use super::{BondOrder, Element, MolGraph};

/// Promote six-membered C/N rings drawn with alternating single/double
/// bonds to aromatic form. Repeats until no ring changes so fused systems
/// (naphthalene drawn in Kekulé form) convert completely.
pub(crate) fn normalize_kekule_rings(g: &mut MolGraph) {
    if g.atoms().iter().all(|a| a.aromatic) || !g.bonds().iter().any(|b| b.order == BondOrder::Double) {
        return;
    }
    let rings: Vec<_> = sssr(g).into_iter().filter(|r| r.len() == 6).collect();
    if rings.is_empty() {
        return;
    }
    let mut done = vec![false; rings.len()];
    loop {
        let mut changed = false;
        for (ri, ring) in rings.iter().enumerate() {
            if done[ri] || !kekule_six_ring(g, &ring.atoms, &ring.bonds) {
                continue;
            }
            let hydrogens: Vec<(usize, u8)> = ring.atoms.iter().map(|&a| (a, g.total_h(a))).collect();
            for &a in &ring.atoms {
                g.atom_mut(a).aromatic = true;
            }
            for &b in &ring.bonds {
                g.set_bond_order(b, BondOrder::Aromatic);
            }
            for (a, h) in hydrogens {
                g.set_total_h(a, h);
            }
            done[ri] = true;
            changed = true;
        }
        if !changed {
            break;
        }
    }
}

fn kekule_six_ring(g: &MolGraph, atoms: &[usize], bonds: &[usize]) -> bool {
    if atoms.iter().all(|&a| g.atom(a).aromatic) {
        return false;
    }
    for &a in atoms {
        let atom = g.atom(a);
        if !matches!(atom.element, Element::C | Element::N) || atom.charge != 0 {
            return false;
        }
    }
    for &b in bonds {
        if g.bonds()[b].order == BondOrder::Triple {
            return false;
        }
    }
    // Each atom is either aromatic already or carries exactly one double
    // bond, and that bond lies in this ring.
    for &a in atoms {
        if g.atom(a).aromatic {
            continue;
        }
        let mut doubles = 0;
        let mut in_ring = false;
        for &(_, bi) in g.neighbors(a) {
            match g.bonds()[bi].order {
                BondOrder::Double => {
                    doubles += 1;
                    in_ring |= bonds.contains(&bi);
                }
                BondOrder::Triple => return false,
                BondOrder::Aromatic if !bonds.contains(&bi) => return false,
                _ => {}
            }
        }
        if doubles != 1 || !in_ring {
            return false;
        }
    }
    true
}

/// Clear the aromatic flag on atoms that no longer sit in a ring made only
/// of aromatic atoms and bonds, then assign double bonds by maximum
/// matching over the bonds that were aromatic. Atoms left without a double
/// bond gain a hydrogen.
pub(crate) fn dearomatize_orphans(g: &mut MolGraph) {
    if !g.atoms().iter().any(|a| a.aromatic) {
        return;
    }
    let mut keep = vec![false; g.atom_count()];
    for ring in sssr(g) {
        let all_aromatic = ring.atoms.iter().all(|&a| g.atom(a).aromatic)
            && ring
                .bonds
                .iter()
                .all(|&b| g.bonds()[b].order == BondOrder::Aromatic);
        if all_aromatic {
            for &a in &ring.atoms {
                keep[a] = true;
            }
        }
    }
    let orphans: Vec<usize> = (0..g.atom_count())
        .filter(|&a| g.atom(a).aromatic && !keep[a])
        .collect();
    if orphans.is_empty() {
        return;
    }
    let hydrogens: Vec<(usize, u8)> = orphans.iter().map(|&a| (a, g.total_h(a))).collect();
    let mut is_orphan = vec![false; g.atom_count()];
    for &a in &orphans {
        is_orphan[a] = true;
    }
    // Bonds that lose aromaticity, and which atoms need a double bond.
    let mut touched = Vec::new();
    for (bi, bond) in g.bonds().iter().enumerate() {
        if bond.order == BondOrder::Aromatic && (is_orphan[bond.a] || is_orphan[bond.b]) {
            touched.push(bi);
        }
    }
    let needs_pi: Vec<bool> = (0..g.atom_count())
        .map(|a| {
            is_orphan[a]
                && g.neighbors(a)
                    .iter()
                    .any(|&(_, bi)| g.bonds()[bi].order == BondOrder::Aromatic)
                && wants_double(g, a)
        })
        .collect();
    for &a in &orphans {
        g.atom_mut(a).aromatic = false;
    }
    for &bi in &touched {
        g.set_bond_order(bi, BondOrder::Single);
    }
    let edges: Vec<(usize, usize, usize)> = touched
        .iter()
        .map(|&bi| (g.bonds()[bi].a, g.bonds()[bi].b, bi))
        .filter(|&(a, b, _)| needs_pi[a] && needs_pi[b])
        .collect();
    let mate = max_matching(g.atom_count(), &edges);
    for &(a, b, bi) in &edges {
        if mate[a] == Some(b) {
            g.set_bond_order(bi, BondOrder::Double);
        }
    }
    for (a, h) in hydrogens {
        let extra = u8::from(needs_pi[a] && mate[a].is_none());
        g.set_total_h(a, h + extra);
    }
}

fn wants_double(g: &MolGraph, a: usize) -> bool {
    let atom = g.atom(a);
    match atom.element {
        Element::C | Element::B => true,
        Element::N | Element::P => atom.charge == 0 && g.total_h(a) == 0 && g.degree(a) <= 2,
        _ => false,
    }
}

/// An aromatic atom with exactly one unit of valence left over once its
/// sigma bonds and hydrogens are counted; it needs one double bond in any
/// Kekulé form.
fn needs_pi(g: &MolGraph, a: usize) -> bool {
    let atom = g.atom(a);
    if !atom.aromatic {
        return false;
    }
    let base = i16::from(atom.element.valences()[0]);
    let charge = i16::from(atom.charge);
    let target = match atom.element {
        Element::C | Element::B | Element::Si => base - charge.abs(),
        _ => base + charge,
    };
    let used = i16::from(g.bond_valence(a)) + i16::from(g.total_h(a));
    target - used == 1
}

/// Whether every aromatic atom that needs a double bond can get one from
/// an aromatic bond, i.e. the aromatic part has a Kekulé structure.
pub(crate) fn is_kekulizable(g: &MolGraph) -> bool {
    let n = g.atom_count();
    let need: Vec<bool> = (0..n).map(|a| needs_pi(g, a)).collect();
    if !need.iter().any(|&x| x) {
        return true;
    }
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|a| {
            g.neighbors(a)
                .iter()
                .filter(|&&(w, bi)| need[w] && g.bonds()[bi].order == BondOrder::Aromatic)
                .map(|&(w, _)| w)
                .collect()
        })
        .collect();
    let mut mate = vec![None; n];
    let mut steps = 0u32;
    perfect_matching(&need, &adj, &mut mate, &mut steps) != Some(false)
}

/// Backtracking search for a matching covering every atom with `need`.
/// Returns `None` when the step budget runs out.
fn perfect_matching(
    need: &[bool],
    adj: &[Vec<usize>],
    mate: &mut [Option<usize>],
    steps: &mut u32,
) -> Option<bool> {
    *steps += 1;
    if *steps > 100_000 {
        return None;
    }
    let Some(v) = (0..need.len()).find(|&v| need[v] && mate[v].is_none()) else {
        return Some(true);
    };
    for &w in &adj[v] {
        if mate[w].is_some() {
            continue;
        }
        mate[v] = Some(w);
        mate[w] = Some(v);
        match perfect_matching(need, adj, mate, steps) {
            Some(false) => {}
            other => return other,
        }
        mate[v] = None;
        mate[w] = None;
    }
    Some(false)
}

/// Maximum matching on a small general graph: an exact perfect matching
/// when one exists, otherwise alternating-path augmentation. Edges are
/// tried in index order so the result is deterministic.
fn max_matching(n: usize, edges: &[(usize, usize, usize)]) -> Vec<Option<usize>> {
    let mut adj = vec![Vec::new(); n];
    let mut need = vec![false; n];
    for &(a, b, _) in edges {
        adj[a].push(b);
        adj[b].push(a);
        need[a] = true;
        need[b] = true;
    }
    let mut mate: Vec<Option<usize>> = vec![None; n];
    let mut steps = 0;
    if perfect_matching(&need, &adj, &mut mate, &mut steps) == Some(true) {
        return mate;
    }
    mate.fill(None);
    for v in 0..n {
        if mate[v].is_some() {
            continue;
        }
        let mut seen = vec![false; n];
        augment(v, &adj, &mut mate, &mut seen);
    }
    mate
}

fn augment(v: usize, adj: &[Vec<usize>], mate: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    seen[v] = true;
    for &w in &adj[v] {
        if seen[w] {
            continue;
        }
        seen[w] = true;
        let free = match mate[w] {
            None => true,
            Some(u) => augment(u, adj, mate, seen),
        };
        if free {
            mate[v] = Some(w);
            mate[w] = Some(v);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::{parse_smiles, write_canonical};

    #[test]
    fn orphaned_fused_pair_becomes_double_bond() {
        // Anthraquinone minus one benzo ring: the two former fusion atoms
        // are no longer in an aromatic ring.
        let g = parse_smiles("O=C1c2ccccc2C(=O)c2ccccc21").unwrap();
        let keep: Vec<bool> = (0..g.atom_count()).map(|i| !(11..=14).contains(&i)).collect();
        let mut sub = g.induced(&keep);
        dearomatize_orphans(&mut sub);
        let expected = parse_smiles("O=C1C=CC(=O)c2ccccc21").unwrap();
        assert_eq!(write_canonical(&sub), write_canonical(&expected));
    }

    #[test]
    fn kekule_check() {
        for ok in ["c1ccccc1", "c1ccc2[nH]ccc2c1", "c1ccsc1", "O=c1cc[nH]cc1", "[O-][n+]1ccccc1", "c1cc[nH+]cc1"] {
            assert!(is_kekulizable(&parse_smiles(ok).unwrap()), "{ok}");
        }
        assert!(!is_kekulizable(&parse_smiles("c1ccc[nH]c1").unwrap()));
    }

    #[test]
    fn intact_aromatic_rings_are_untouched() {
        let mut g = parse_smiles("c1ccc2ccccc2c1").unwrap();
        let before = g.clone();
        dearomatize_orphans(&mut g);
        assert_eq!(g, before);
    }
}
