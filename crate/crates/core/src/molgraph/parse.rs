//! SMILES reader for the organic subset plus a handful of bracket elements.

use std::collections::HashMap;

use thiserror::Error;

use super::aromatic::normalize_kekule_rings;
use super::{Atom, BondDirection, BondOrder, Chirality, Element, GraphError, MolGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmilesErrorKind {
    #[error("empty SMILES")]
    Empty,
    #[error("{0}")]
    Syntax(String),
    #[error("ring bond {0} was never closed")]
    UnclosedRingBond(u32),
    #[error("unsupported element {0}")]
    UnsupportedElement(String),
    #[error("atom {atom} ({element}) exceeds its maximum valence")]
    Valence { atom: usize, element: Element },
}

impl SmilesErrorKind {
    /// Stable short name, used in reject reports.
    pub fn code(&self) -> &'static str {
        match self {
            SmilesErrorKind::Empty => "Empty",
            SmilesErrorKind::Syntax(_) => "SyntaxError",
            SmilesErrorKind::UnclosedRingBond(_) => "UnclosedRingBond",
            SmilesErrorKind::UnsupportedElement(_) => "UnsupportedElement",
            SmilesErrorKind::Valence { .. } => "ValenceError",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} (at byte {position})")]
pub struct SmilesError {
    pub kind: SmilesErrorKind,
    pub position: usize,
}

/// Parse a SMILES string into a graph.
///
/// Stereo markers and isotopes are kept on the graph but play no part in
/// identity. Kekulé six-rings of C/N are rewritten in aromatic form.
pub fn parse_smiles(text: &str) -> Result<MolGraph, SmilesError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(SmilesError {
            kind: SmilesErrorKind::Empty,
            position: 0,
        });
    }
    let mut parser = Parser::new(text.as_bytes());
    parser.run()?;
    let mut graph = parser.graph;
    check_valences(&graph)?;
    normalize_kekule_rings(&mut graph);
    Ok(graph)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BondSymbol {
    Single,
    Double,
    Triple,
    Aromatic,
    Up,
    Down,
}

impl BondSymbol {
    fn order(self) -> BondOrder {
        match self {
            BondSymbol::Single | BondSymbol::Up | BondSymbol::Down => BondOrder::Single,
            BondSymbol::Double => BondOrder::Double,
            BondSymbol::Triple => BondOrder::Triple,
            BondSymbol::Aromatic => BondOrder::Aromatic,
        }
    }

    fn direction(self) -> Option<BondDirection> {
        match self {
            BondSymbol::Up => Some(BondDirection::Up),
            BondSymbol::Down => Some(BondDirection::Down),
            _ => None,
        }
    }
}

struct OpenRing {
    atom: usize,
    bond: Option<BondSymbol>,
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
    graph: MolGraph,
    prev: Option<usize>,
    pending: Option<(BondSymbol, usize)>,
    branches: Vec<(usize, usize)>,
    rings: HashMap<u32, OpenRing>,
}

impl<'a> Parser<'a> {
    fn new(input: &'a [u8]) -> Self {
        Parser {
            input,
            pos: 0,
            graph: MolGraph::new(),
            prev: None,
            pending: None,
            branches: Vec::new(),
            rings: HashMap::new(),
        }
    }

    fn err(&self, kind: SmilesErrorKind) -> SmilesError {
        SmilesError {
            kind,
            position: self.pos,
        }
    }

    fn syntax(&self, msg: impl Into<String>) -> SmilesError {
        self.err(SmilesErrorKind::Syntax(msg.into()))
    }

    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<u8> {
        self.input.get(self.pos + offset).copied()
    }

    fn run(&mut self) -> Result<(), SmilesError> {
        while let Some(c) = self.peek() {
            match c {
                b'(' => {
                    let Some(prev) = self.prev else {
                        return Err(self.syntax("branch opened without a preceding atom"));
                    };
                    if self.pending.is_some() {
                        return Err(self.syntax("bond symbol before '('"));
                    }
                    self.branches.push((prev, self.pos));
                    self.pos += 1;
                }
                b')' => {
                    if self.pending.is_some() {
                        return Err(self.syntax("bond symbol before ')'"));
                    }
                    let Some((atom, _)) = self.branches.pop() else {
                        return Err(self.syntax("unbalanced ')'"));
                    };
                    if self.input.get(self.pos.wrapping_sub(1)) == Some(&b'(') {
                        return Err(self.syntax("empty branch"));
                    }
                    self.prev = Some(atom);
                    self.pos += 1;
                }
                b'-' | b'=' | b'#' | b':' | b'/' | b'\\' => {
                    if self.prev.is_none() {
                        return Err(self.syntax("bond symbol without a preceding atom"));
                    }
                    if self.pending.is_some() {
                        return Err(self.syntax("two consecutive bond symbols"));
                    }
                    let sym = match c {
                        b'-' => BondSymbol::Single,
                        b'=' => BondSymbol::Double,
                        b'#' => BondSymbol::Triple,
                        b':' => BondSymbol::Aromatic,
                        b'/' => BondSymbol::Up,
                        _ => BondSymbol::Down,
                    };
                    self.pending = Some((sym, self.pos));
                    self.pos += 1;
                }
                b'$' => return Err(self.syntax("quadruple bonds are not supported")),
                b'0'..=b'9' | b'%' => self.ring_closure()?,
                b'.' => {
                    if self.pending.is_some() {
                        return Err(self.syntax("bond symbol before '.'"));
                    }
                    if self.prev.is_none() {
                        return Err(self.syntax("'.' without a preceding atom"));
                    }
                    self.prev = None;
                    self.pos += 1;
                }
                b'[' => {
                    let atom = self.bracket_atom()?;
                    self.push_atom(atom)?;
                }
                b'*' => {
                    return Err(self.err(SmilesErrorKind::UnsupportedElement("*".into())));
                }
                c if c.is_ascii_alphabetic() => {
                    let atom = self.organic_atom()?;
                    self.push_atom(atom)?;
                }
                _ => return Err(self.syntax(format!("unexpected character '{}'", c as char))),
            }
        }
        if self.pending.is_some() {
            return Err(self.syntax("dangling bond symbol at end of input"));
        }
        if let Some(&ring) = self.rings.keys().min() {
            return Err(self.err(SmilesErrorKind::UnclosedRingBond(ring)));
        }
        if let Some(&(_, at)) = self.branches.last() {
            return Err(SmilesError {
                kind: SmilesErrorKind::Syntax("unclosed branch".into()),
                position: at,
            });
        }
        if self.graph.is_empty() {
            return Err(self.err(SmilesErrorKind::Empty));
        }
        Ok(())
    }

    fn push_atom(&mut self, atom: Atom) -> Result<(), SmilesError> {
        let idx = self.graph.add_atom(atom);
        if let Some(prev) = self.prev {
            let sym = self.pending.take().map(|(s, _)| s);
            self.connect(prev, idx, sym)?;
        } else if self.pending.is_some() {
            return Err(self.syntax("bond symbol without a preceding atom"));
        }
        self.prev = Some(idx);
        Ok(())
    }

    fn connect(&mut self, a: usize, b: usize, sym: Option<BondSymbol>) -> Result<(), SmilesError> {
        let both_aromatic = self.graph.atom(a).aromatic && self.graph.atom(b).aromatic;
        let (order, direction) = match sym {
            None if both_aromatic => (BondOrder::Aromatic, None),
            None => (BondOrder::Single, None),
            Some(s) => (s.order(), s.direction()),
        };
        self.graph
            .add_directed_bond(a, b, order, direction)
            .map(|_| ())
            .map_err(|e| match e {
                GraphError::AromaticMismatch(..) => {
                    self.syntax("aromatic bond between non-aromatic atoms")
                }
                GraphError::DuplicateBond(..) => self.syntax("atoms bonded twice"),
                GraphError::SelfBond(..) => self.syntax("ring bond closes on the same atom"),
                GraphError::NoSuchAtom(..) => self.syntax("internal atom index error"),
            })
    }

    fn ring_closure(&mut self) -> Result<(), SmilesError> {
        let start = self.pos;
        let number = if self.peek() == Some(b'%') {
            let (Some(d1), Some(d2)) = (self.peek_at(1), self.peek_at(2)) else {
                return Err(self.syntax("'%' needs two digits"));
            };
            if !d1.is_ascii_digit() || !d2.is_ascii_digit() {
                return Err(self.syntax("'%' needs two digits"));
            }
            self.pos += 3;
            u32::from(d1 - b'0') * 10 + u32::from(d2 - b'0')
        } else {
            let d = self.peek().expect("caller checked");
            self.pos += 1;
            u32::from(d - b'0')
        };
        let Some(atom) = self.prev else {
            return Err(SmilesError {
                kind: SmilesErrorKind::Syntax("ring bond without a preceding atom".into()),
                position: start,
            });
        };
        let sym = self.pending.take().map(|(s, _)| s);
        match self.rings.remove(&number) {
            Some(open) => {
                let resolved = match (open.bond, sym) {
                    (Some(x), Some(y)) if x.order() != y.order() => {
                        return Err(self.syntax(format!("ring bond {number} has conflicting bond symbols")));
                    }
                    (Some(x), _) => Some(x),
                    (None, y) => y,
                };
                self.connect(open.atom, atom, resolved)
            }
            None => {
                self.rings.insert(number, OpenRing { atom, bond: sym });
                Ok(())
            }
        }
    }

    fn organic_atom(&mut self) -> Result<Atom, SmilesError> {
        let c = self.peek().expect("caller checked");
        let next = self.peek_at(1);
        let (element, aromatic, len) = match (c, next) {
            (b'C', Some(b'l')) => (Element::Cl, false, 2),
            (b'B', Some(b'r')) => (Element::Br, false, 2),
            (b'B', _) => (Element::B, false, 1),
            (b'C', _) => (Element::C, false, 1),
            (b'N', _) => (Element::N, false, 1),
            (b'O', _) => (Element::O, false, 1),
            (b'P', _) => (Element::P, false, 1),
            (b'S', _) => (Element::S, false, 1),
            (b'F', _) => (Element::F, false, 1),
            (b'I', _) => (Element::I, false, 1),
            (b'b', _) => (Element::B, true, 1),
            (b'c', _) => (Element::C, true, 1),
            (b'n', _) => (Element::N, true, 1),
            (b'o', _) => (Element::O, true, 1),
            (b'p', _) => (Element::P, true, 1),
            (b's', _) => (Element::S, true, 1),
            _ => {
                let mut sym = (c as char).to_string();
                if let Some(n) = next.filter(u8::is_ascii_lowercase) {
                    sym.push(n as char);
                }
                return Err(self.err(SmilesErrorKind::UnsupportedElement(sym)));
            }
        };
        self.pos += len;
        let mut atom = Atom::new(element);
        atom.aromatic = aromatic;
        Ok(atom)
    }

    fn read_number(&mut self) -> Option<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return None;
        }
        std::str::from_utf8(&self.input[start..self.pos])
            .ok()?
            .parse()
            .ok()
    }

    fn bracket_atom(&mut self) -> Result<Atom, SmilesError> {
        let open = self.pos;
        self.pos += 1;
        let isotope = self.read_number();
        let isotope = match isotope {
            Some(0) => return Err(self.syntax("isotope must be positive")),
            Some(n) => Some(u16::try_from(n).map_err(|_| self.syntax("isotope out of range"))?),
            None => None,
        };

        let (element, aromatic) = self.bracket_symbol()?;

        let mut chirality = None;
        if self.peek() == Some(b'@') {
            self.pos += 1;
            chirality = Some(Chirality::Anticlockwise);
            if self.peek() == Some(b'@') {
                self.pos += 1;
                chirality = Some(Chirality::Clockwise);
            } else if self.peek().is_some_and(|c| c.is_ascii_uppercase() && c != b'H') {
                return Err(self.syntax("extended chirality classes are not supported"));
            }
        }

        let mut hydrogens = 0u8;
        if self.peek() == Some(b'H') {
            self.pos += 1;
            hydrogens = match self.read_number() {
                Some(n) => u8::try_from(n).map_err(|_| self.syntax("hydrogen count out of range"))?,
                None => 1,
            };
        }

        let mut charge: i32 = 0;
        if let Some(sign @ (b'+' | b'-')) = self.peek() {
            let unit = if sign == b'+' { 1 } else { -1 };
            self.pos += 1;
            if let Some(n) = self.read_number() {
                charge = unit * n as i32;
            } else {
                charge = unit;
                while self.peek() == Some(sign) {
                    self.pos += 1;
                    charge += unit;
                }
            }
        }
        if !(-8..=8).contains(&charge) {
            return Err(self.syntax("charge out of range"));
        }

        if self.peek() == Some(b':') {
            self.pos += 1;
            if self.read_number().is_none() {
                return Err(self.syntax("atom class needs a number"));
            }
        }

        if self.peek() != Some(b']') {
            return Err(SmilesError {
                kind: SmilesErrorKind::Syntax("unterminated bracket atom".into()),
                position: open,
            });
        }
        self.pos += 1;

        Ok(Atom {
            element,
            charge: charge as i8,
            explicit_h: Some(hydrogens),
            aromatic,
            isotope,
            chirality,
        })
    }

    fn bracket_symbol(&mut self) -> Result<(Element, bool), SmilesError> {
        let Some(c) = self.peek() else {
            return Err(self.syntax("unterminated bracket atom"));
        };
        let next = self.peek_at(1);
        if c.is_ascii_lowercase() {
            let two = next.map(|n| [c, n]);
            let (element, len) = match two.as_ref().map(|t| &t[..]) {
                Some(b"se") => (Element::Se, 2),
                Some(b"as") => (Element::As, 2),
                _ => match c {
                    b'b' => (Element::B, 1),
                    b'c' => (Element::C, 1),
                    b'n' => (Element::N, 1),
                    b'o' => (Element::O, 1),
                    b'p' => (Element::P, 1),
                    b's' => (Element::S, 1),
                    _ => {
                        return Err(self.err(SmilesErrorKind::UnsupportedElement(
                            (c as char).to_string(),
                        )))
                    }
                },
            };
            self.pos += len;
            return Ok((element, true));
        }
        if !c.is_ascii_uppercase() {
            return Err(self.syntax("expected an element symbol"));
        }
        let mut symbol = (c as char).to_string();
        if let Some(n) = next.filter(u8::is_ascii_lowercase) {
            symbol.push(n as char);
        }
        self.pos += symbol.len();
        match Element::from_symbol(&symbol) {
            Some(e) => Ok((e, false)),
            None => Err(self.err(SmilesErrorKind::UnsupportedElement(symbol))),
        }
    }
}

fn check_valences(graph: &MolGraph) -> Result<(), SmilesError> {
    for (i, atom) in graph.atoms().iter().enumerate() {
        let used = u32::from(graph.bond_valence(i)) + u32::from(graph.total_h(i));
        let allowed = u32::from(atom.element.max_valence()) + atom.charge.unsigned_abs() as u32;
        if used > allowed {
            return Err(SmilesError {
                kind: SmilesErrorKind::Valence {
                    atom: i,
                    element: atom.element,
                },
                position: 0,
            });
        }
    }
    Ok(())
}
