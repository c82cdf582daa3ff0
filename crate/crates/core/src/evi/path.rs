use std::cmp::Ordering;
use std::fmt;

use super::sym::{Binding, SymId, Symbols};
use crate::ipl::Lit;

/// One case-split decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    BoolIs(SymId, bool),
    NatIsZero(SymId),
    NatIsSucc(SymId),
}

impl Atom {
    pub fn symbol(self) -> SymId {
        match self {
            Atom::BoolIs(id, _) | Atom::NatIsZero(id) | Atom::NatIsSucc(id) => id,
        }
    }

    fn key(self) -> (SymId, u8) {
        let rank = match self {
            Atom::NatIsZero(_) => 0,
            Atom::NatIsSucc(_) => 1,
            Atom::BoolIs(_, true) => 2,
            Atom::BoolIs(_, false) => 3,
        };
        (self.symbol(), rank)
    }

    pub fn satisfied_by(self, value: Lit) -> bool {
        match (self, value) {
            (Atom::BoolIs(_, b), Lit::Bool(v)) => b == v,
            (Atom::NatIsZero(_), Lit::Nat(n)) => n == 0,
            (Atom::NatIsSucc(_), Lit::Nat(n)) => n > 0,
            _ => false,
        }
    }

    /// Smallest value satisfying the atom.
    pub fn minimal(self) -> Lit {
        match self {
            Atom::BoolIs(_, b) => Lit::Bool(b),
            Atom::NatIsZero(_) => Lit::Nat(0),
            Atom::NatIsSucc(_) => Lit::Nat(1),
        }
    }

    pub fn display<'a>(&'a self, symbols: &'a Symbols) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Atom, &'a Symbols);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let name = self.1.name(self.0.symbol());
                match self.0 {
                    Atom::BoolIs(_, true) => write!(f, "{name}"),
                    Atom::BoolIs(_, false) => write!(f, "!{name}"),
                    Atom::NatIsZero(_) => write!(f, "{name} == 0"),
                    Atom::NatIsSucc(_) => write!(f, "{name} != 0"),
                }
            }
        }
        D(self, symbols)
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

/// Conjunction of atoms, at most one per symbol, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathCondition(Vec<Atom>);

impl PathCondition {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }

    pub fn get(&self, id: SymId) -> Option<Atom> {
        self.0.iter().copied().find(|a| a.symbol() == id)
    }

    /// Adds `atom`; `None` if the symbol is already pinned differently.
    pub fn with(&self, atom: Atom) -> Option<Self> {
        match self.get(atom.symbol()) {
            Some(existing) if existing == atom => Some(self.clone()),
            Some(_) => None,
            None => {
                let mut atoms = self.0.clone();
                let at = atoms.binary_search(&atom).unwrap_or_else(|i| i);
                atoms.insert(at, atom);
                Some(Self(atoms))
            }
        }
    }

    /// Every atom agrees with `binding`; unbound symbols fail.
    pub fn satisfied_by(&self, binding: &Binding) -> bool {
        self.0
            .iter()
            .all(|a| binding.get(a.symbol()).is_some_and(|v| a.satisfied_by(v)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn display<'a>(&'a self, symbols: &'a Symbols) -> impl fmt::Display + 'a {
        struct D<'a>(&'a PathCondition, &'a Symbols);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                if self.0.is_empty() {
                    return write!(f, "true");
                }
                for (i, a) in self.0 .0.iter().enumerate() {
                    if i > 0 {
                        write!(f, " && ")?;
                    }
                    write!(f, "{}", a.display(self.1))?;
                }
                Ok(())
            }
        }
        D(self, symbols)
    }
}
