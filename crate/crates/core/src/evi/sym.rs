//! Symbolic slot values and symbol bookkeeping.

use std::collections::BTreeMap;
use std::fmt;

use crate::ipl::{Lit, Ty};
use crate::mem::{fmt_env_blc, Blc, Data, Env, Memory, MemoryState, SlotValue, Value};

/// Identifier of a symbolic input, unique within one verification run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymKind {
    Nat,
    Bool,
}

impl SymKind {
    pub fn ty(self) -> Ty {
        match self {
            SymKind::Nat => Ty::Nat,
            SymKind::Bool => Ty::Bool,
        }
    }
}

/// Payload of a symbolic slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SymData {
    Conc(Data),
    SymBool(SymId),
    SymNat(SymId),
    /// The same symbol after it has been split on and found nonzero.
    SymNatSucc(SymId),
}

impl SymData {
    pub fn symbol(&self) -> Option<SymId> {
        match self {
            SymData::Conc(_) => None,
            SymData::SymBool(id) | SymData::SymNat(id) | SymData::SymNatSucc(id) => Some(*id),
        }
    }

    /// Concrete payload under `binding`; `None` if a needed symbol is
    /// unbound or bound to a value of the wrong kind.
    pub fn concretize(&self, binding: &Binding) -> Option<Data> {
        Some(match self {
            SymData::Conc(d) => d.clone(),
            SymData::SymBool(id) => match binding.get(*id)? {
                Lit::Bool(b) => Data::Bool(Some(b)),
                Lit::Nat(_) => return None,
            },
            SymData::SymNat(id) | SymData::SymNatSucc(id) => match binding.get(*id)? {
                Lit::Nat(n) => Data::Nat(Some(n)),
                Lit::Bool(_) => return None,
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymValue {
    pub data: SymData,
    pub env: Env,
    pub blc: Blc,
}

impl SymValue {
    pub fn new(data: SymData, env: Env, blc: Blc) -> Self {
        Self { data, env, blc }
    }

    /// The concrete value, if this slot holds no symbol.
    pub fn as_concrete(&self) -> Option<Value> {
        match &self.data {
            SymData::Conc(d) => Some(Value::new(d.clone(), self.env, self.blc)),
            _ => None,
        }
    }

    pub fn concretize(&self, binding: &Binding) -> Option<Value> {
        Some(Value::new(self.data.concretize(binding)?, self.env, self.blc))
    }
}

impl From<Value> for SymValue {
    fn from(v: Value) -> Self {
        Self::new(SymData::Conc(v.data), v.env, v.blc)
    }
}

impl SlotValue for SymValue {
    fn v_init() -> Self {
        Value::init().into()
    }

    fn reserved_default() -> Self {
        Value::reserved_default().into()
    }
}

/// A memory whose slots may hold symbols.
pub type SymMemory = Memory<SymValue>;

/// `Some` iff every slot is concrete.
pub fn embed_concrete(sm: &SymMemory) -> Option<MemoryState> {
    let slots = sm.slots().iter().map(SymValue::as_concrete).collect::<Option<Vec<_>>>()?;
    MemoryState::from_slots(sm.layout().clone(), slots)
}

/// Lossless lift of a concrete memory.
pub fn lift(m: &MemoryState) -> SymMemory {
    m.map(|v| v.clone().into())
}

/// Concrete memory under a total binding of the symbols it mentions.
pub fn concretize(sm: &SymMemory, binding: &Binding) -> Option<MemoryState> {
    let slots = sm
        .slots()
        .iter()
        .map(|v| v.concretize(binding))
        .collect::<Option<Vec<_>>>()?;
    MemoryState::from_slots(sm.layout().clone(), slots)
}

/// Symbols mentioned anywhere in a memory, ascending.
pub fn symbols_in(sm: &SymMemory) -> Vec<SymId> {
    let mut ids: Vec<SymId> = sm.slots().iter().filter_map(|v| v.data.symbol()).collect();
    ids.sort();
    ids.dedup();
    ids
}

/// Concrete values for symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Binding(BTreeMap<SymId, Lit>);

impl Binding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, id: SymId) -> Option<Lit> {
        self.0.get(&id).copied()
    }

    pub fn insert(&mut self, id: SymId, value: Lit) {
        self.0.insert(id, value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (SymId, Lit)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }
}

impl FromIterator<(SymId, Lit)> for Binding {
    fn from_iter<T: IntoIterator<Item = (SymId, Lit)>>(iter: T) -> Self {
        Self(iter.into_iter().collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolInfo {
    pub name: String,
    pub kind: SymKind,
}

/// Registry of the symbols of one verification run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Symbols {
    entries: Vec<SymbolInfo>,
}

impl Symbols {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh(&mut self, name: impl Into<String>, kind: SymKind) -> SymId {
        self.entries.push(SymbolInfo {
            name: name.into(),
            kind,
        });
        SymId(self.entries.len() as u32 - 1)
    }

    pub fn info(&self, id: SymId) -> &SymbolInfo {
        &self.entries[id.0 as usize]
    }

    pub fn name(&self, id: SymId) -> &str {
        &self.info(id).name
    }

    pub fn lookup(&self, name: &str) -> Option<SymId> {
        self.entries.iter().position(|s| s.name == name).map(|i| SymId(i as u32))
    }

    pub fn iter(&self) -> impl Iterator<Item = (SymId, &SymbolInfo)> {
        self.entries.iter().enumerate().map(|(i, s)| (SymId(i as u32), s))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Renders a symbolic value with symbol names resolved.
pub struct Named<'a> {
    pub value: &'a SymValue,
    pub symbols: &'a Symbols,
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value.data {
            SymData::Conc(_) => write!(f, "{}", self.value.as_concrete().unwrap()),
            SymData::SymBool(id) => {
                write!(f, "Bool (Some {}) ", self.symbols.name(*id))?;
                fmt_env_blc(f, &self.value.env, &self.value.blc)
            }
            SymData::SymNat(id) => {
                write!(f, "Nat (Some {}) ", self.symbols.name(*id))?;
                fmt_env_blc(f, &self.value.env, &self.value.blc)
            }
            SymData::SymNatSucc(id) => {
                write!(f, "Nat (Some {} [S _]) ", self.symbols.name(*id))?;
                fmt_env_blc(f, &self.value.env, &self.value.blc)
            }
        }
    }
}
