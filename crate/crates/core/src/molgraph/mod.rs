//! Attributed molecular graphs and the SMILES text form behind them.
//!
//! A [`MolGraph`] holds heavy atoms and bonds. Hydrogens are never nodes:
//! each atom carries either an explicit hydrogen count (bracket atoms, or
//! atoms whose count was fixed by an edit) or derives one from the default
//! valence table.

pub(crate) mod aromatic;
pub mod canon;
pub mod parse;
pub mod rings;

pub use canon::{randomize_smiles, write_canonical, CanonicalSmiles};
pub use parse::{parse_smiles, SmilesError, SmilesErrorKind};
pub use rings::{ring_count, sssr};

use std::fmt;

use thiserror::Error;

/// Elements accepted by the parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    H,
    B,
    C,
    N,
    O,
    F,
    Si,
    P,
    S,
    Cl,
    As,
    Se,
    Br,
    I,
}

impl Element {
    pub fn atomic_number(self) -> u8 {
        match self {
            Element::H => 1,
            Element::B => 5,
            Element::C => 6,
            Element::N => 7,
            Element::O => 8,
            Element::F => 9,
            Element::Si => 14,
            Element::P => 15,
            Element::S => 16,
            Element::Cl => 17,
            Element::As => 33,
            Element::Se => 34,
            Element::Br => 35,
            Element::I => 53,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Element::H => "H",
            Element::B => "B",
            Element::C => "C",
            Element::N => "N",
            Element::O => "O",
            Element::F => "F",
            Element::Si => "Si",
            Element::P => "P",
            Element::S => "S",
            Element::Cl => "Cl",
            Element::As => "As",
            Element::Se => "Se",
            Element::Br => "Br",
            Element::I => "I",
        }
    }

    pub fn from_symbol(symbol: &str) -> Option<Element> {
        Some(match symbol {
            "H" => Element::H,
            "B" => Element::B,
            "C" => Element::C,
            "N" => Element::N,
            "O" => Element::O,
            "F" => Element::F,
            "Si" => Element::Si,
            "P" => Element::P,
            "S" => Element::S,
            "Cl" => Element::Cl,
            "As" => Element::As,
            "Se" => Element::Se,
            "Br" => Element::Br,
            "I" => Element::I,
            _ => return None,
        })
    }

    /// Elements that may appear outside brackets.
    pub fn is_organic_subset(self) -> bool {
        matches!(
            self,
            Element::B
                | Element::C
                | Element::N
                | Element::O
                | Element::P
                | Element::S
                | Element::F
                | Element::Cl
                | Element::Br
                | Element::I
        )
    }

    /// Elements with a lowercase aromatic spelling.
    pub fn can_be_aromatic(self) -> bool {
        matches!(
            self,
            Element::B
                | Element::C
                | Element::N
                | Element::O
                | Element::P
                | Element::S
                | Element::Se
                | Element::As
        )
    }

    /// Allowed neutral valences, ascending.
    pub fn valences(self) -> &'static [u8] {
        match self {
            Element::H | Element::F | Element::Cl | Element::Br | Element::I => &[1],
            Element::B => &[3],
            Element::C | Element::Si => &[4],
            Element::N => &[3],
            Element::O => &[2],
            Element::P | Element::As => &[3, 5],
            Element::S | Element::Se => &[2, 4, 6],
        }
    }

    pub fn max_valence(self) -> u8 {
        *self.valences().last().expect("valence table is never empty")
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chirality {
    Anticlockwise,
    Clockwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Contribution to the bond-order sum of an endpoint; aromatic counts as 1.
    pub fn valence(self) -> u8 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        }
    }
}

/// `/` and `\` markers. Recorded, never used for identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BondDirection {
    Up,
    Down,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub element: Element,
    pub charge: i8,
    /// Hydrogen count fixed by a bracket atom or by an edit; `None` means
    /// "derive from the default valence table".
    pub explicit_h: Option<u8>,
    pub aromatic: bool,
    pub isotope: Option<u16>,
    pub chirality: Option<Chirality>,
}

impl Atom {
    pub fn new(element: Element) -> Self {
        Atom {
            element,
            charge: 0,
            explicit_h: None,
            aromatic: false,
            isotope: None,
            chirality: None,
        }
    }

    pub fn aromatic(element: Element) -> Self {
        Atom {
            aromatic: true,
            ..Atom::new(element)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
    pub direction: Option<BondDirection>,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if self.a == atom {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("atom index {0} out of range")]
    NoSuchAtom(usize),
    #[error("bond from atom {0} to itself")]
    SelfBond(usize),
    #[error("atoms {0} and {1} are already bonded")]
    DuplicateBond(usize, usize),
    #[error("aromatic bond between {0} and {1} joins a non-aromatic atom")]
    AromaticMismatch(usize, usize),
}

/// Undirected molecular graph. May be empty (the ringless-scaffold carrier).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MolGraph {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    /// Per atom: `(neighbor, bond index)`.
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl MolGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn atom_mut(&mut self, i: usize) -> &mut Atom {
        &mut self.atoms[i]
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn add_atom(&mut self, atom: Atom) -> usize {
        self.atoms.push(atom);
        self.adjacency.push(Vec::new());
        self.atoms.len() - 1
    }

    pub fn add_bond(&mut self, a: usize, b: usize, order: BondOrder) -> Result<usize, GraphError> {
        self.add_directed_bond(a, b, order, None)
    }

    pub(crate) fn add_directed_bond(
        &mut self,
        a: usize,
        b: usize,
        order: BondOrder,
        direction: Option<BondDirection>,
    ) -> Result<usize, GraphError> {
        let n = self.atoms.len();
        if a >= n {
            return Err(GraphError::NoSuchAtom(a));
        }
        if b >= n {
            return Err(GraphError::NoSuchAtom(b));
        }
        if a == b {
            return Err(GraphError::SelfBond(a));
        }
        if self.bond_between(a, b).is_some() {
            return Err(GraphError::DuplicateBond(a, b));
        }
        if order == BondOrder::Aromatic && !(self.atoms[a].aromatic && self.atoms[b].aromatic) {
            return Err(GraphError::AromaticMismatch(a, b));
        }
        let idx = self.bonds.len();
        self.bonds.push(Bond {
            a,
            b,
            order,
            direction,
        });
        self.adjacency[a].push((b, idx));
        self.adjacency[b].push((a, idx));
        Ok(idx)
    }

    /// `(neighbor, bond index)` pairs of atom `i`.
    pub fn neighbors(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<&Bond> {
        self.adjacency
            .get(a)?
            .iter()
            .find(|&&(n, _)| n == b)
            .map(|&(_, bi)| &self.bonds[bi])
    }

    /// Sum of bond orders at atom `i` (aromatic bonds count 1).
    pub fn bond_valence(&self, i: usize) -> u8 {
        self.adjacency[i]
            .iter()
            .map(|&(_, bi)| self.bonds[bi].order.valence())
            .sum()
    }

    /// Hydrogen count implied by the default valence table, ignoring any
    /// explicit count on the atom.
    pub fn default_h(&self, i: usize) -> u8 {
        let atom = &self.atoms[i];
        if !atom.element.is_organic_subset() || atom.charge != 0 {
            return 0;
        }
        let mut used = self.bond_valence(i);
        if atom.aromatic {
            let has_aromatic_bond = self.adjacency[i]
                .iter()
                .any(|&(_, bi)| self.bonds[bi].order == BondOrder::Aromatic);
            if has_aromatic_bond {
                used += 1;
            }
            return atom.element.valences()[0].saturating_sub(used);
        }
        atom.element
            .valences()
            .iter()
            .find(|&&v| v >= used)
            .map_or(0, |&v| v - used)
    }

    pub fn total_h(&self, i: usize) -> u8 {
        self.atoms[i].explicit_h.unwrap_or_else(|| self.default_h(i))
    }

    /// Pin atom `i` to `h` hydrogens, dropping the explicit count again when
    /// the default valence rule already yields it.
    pub(crate) fn set_total_h(&mut self, i: usize, h: u8) {
        let atom = &self.atoms[i];
        let plain = atom.element.is_organic_subset() && atom.charge == 0 && atom.isotope.is_none();
        self.atoms[i].explicit_h = if plain && self.default_h(i) == h {
            None
        } else {
            Some(h)
        };
    }

    /// Connected components, each sorted ascending, ordered by first atom.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.atoms.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &(w, _) in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn component_count(&self) -> usize {
        self.components().len()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// The subgraph on atoms with `keep[i]`, renumbered in ascending order.
    ///
    /// Every bond to a dropped atom is replaced by hydrogens on the kept
    /// endpoint, so kept atoms keep their valence.
    pub fn induced(&self, keep: &[bool]) -> MolGraph {
        let all_bonds = vec![true; self.bonds.len()];
        self.edge_subgraph(keep, &all_bonds)
    }

    /// Subgraph on the kept atoms using only the kept bonds between them.
    /// Hydrogens replace every dropped bond at a kept atom.
    pub fn edge_subgraph(&self, keep_atoms: &[bool], keep_bonds: &[bool]) -> MolGraph {
        let mut map = vec![usize::MAX; self.atoms.len()];
        let mut out = MolGraph::new();
        let mut lost = Vec::new();
        for (i, atom) in self.atoms.iter().enumerate() {
            if keep_atoms[i] {
                map[i] = out.add_atom(atom.clone());
                lost.push(0u8);
            }
        }
        for (bi, bond) in self.bonds.iter().enumerate() {
            let (a, b) = (map[bond.a], map[bond.b]);
            let both = a != usize::MAX && b != usize::MAX;
            if both && keep_bonds[bi] {
                out.add_directed_bond(a, b, bond.order, bond.direction)
                    .expect("bond copied from a valid graph");
            } else {
                if a != usize::MAX {
                    lost[a] += bond.order.valence();
                }
                if b != usize::MAX {
                    lost[b] += bond.order.valence();
                }
            }
        }
        for (i, &old) in map.iter().enumerate() {
            if old != usize::MAX {
                let h = self.total_h(i) + lost[old];
                out.set_total_h(old, h);
            }
        }
        out
    }

    /// Graph restricted to the largest component (ties: smallest canonical
    /// string). Returns a clone when already connected.
    pub fn largest_component(&self) -> MolGraph {
        let comps = self.components();
        if comps.len() <= 1 {
            return self.clone();
        }
        let mut best: Option<(usize, String, MolGraph)> = None;
        for comp in comps {
            let mut keep = vec![false; self.atoms.len()];
            for &i in &comp {
                keep[i] = true;
            }
            let sub = self.induced(&keep);
            let key = write_canonical(&sub).into_string();
            let better = match &best {
                None => true,
                Some((n, k, _)) => comp.len() > *n || (comp.len() == *n && key < *k),
            };
            if better {
                best = Some((comp.len(), key, sub));
            }
        }
        best.map(|(_, _, g)| g).unwrap_or_default()
    }

    /// Drop chirality, bond directions and isotopes.
    pub fn erase_stereo(&mut self) {
        for atom in &mut self.atoms {
            atom.chirality = None;
            atom.isotope = None;
        }
        for bond in &mut self.bonds {
            bond.direction = None;
        }
    }

    /// Same graph with atom `i` moved to position `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> MolGraph {
        assert_eq!(perm.len(), self.atoms.len());
        let mut slots: Vec<Option<Atom>> = vec![None; self.atoms.len()];
        for (i, atom) in self.atoms.iter().enumerate() {
            slots[perm[i]] = Some(atom.clone());
        }
        let mut out = MolGraph::new();
        for atom in slots {
            out.add_atom(atom.expect("perm is a permutation"));
        }
        for bond in &self.bonds {
            out.add_directed_bond(perm[bond.a], perm[bond.b], bond.order, bond.direction)
                .expect("bond copied from a valid graph");
        }
        out
    }

    pub(crate) fn set_bond_order(&mut self, bond: usize, order: BondOrder) {
        self.bonds[bond].order = order;
    }
}
