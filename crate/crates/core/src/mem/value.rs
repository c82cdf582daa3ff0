use std::fmt;
use std::hash::Hash;

use num_rational::Ratio;

use super::layout::LabelAddress;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LexScope {
    #[default]
    Load,
    Local,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LexDomain {
    #[default]
    Global,
    Block,
}

/// Data environment attached to every stored value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Env {
    pub scope: LexScope,
    pub domain: LexDomain,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Access {
    #[default]
    Public,
    Private,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Occupation {
    Occupied,
    #[default]
    Vacant,
}

/// Block information: access authority and occupation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Blc {
    pub access: Access,
    pub occupation: Occupation,
}

impl Blc {
    pub const PUBLIC_VACANT: Blc = Blc {
        access: Access::Public,
        occupation: Occupation::Vacant,
    };
    pub const PUBLIC_OCCUPIED: Blc = Blc {
        access: Access::Public,
        occupation: Occupation::Occupied,
    };
}

/// Opaque handle to a statement stored as data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StmtHandle(pub u64);

/// Constructor tag of a [`Data`] payload, used as an element/member type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DataKind {
    Undef,
    Nat,
    Bool,
    Float,
    Str,
    Arr,
    VarPtr,
    ParPtr,
    FunPtr,
    Stmt,
    CompositeType,
    CompositeVal,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MemberDesc {
    pub name: String,
    pub kind: DataKind,
}

/// Payload of a memory block. `None` inside an optional payload means
/// "initialized, no data"; `Undef` carries nothing at all.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Data {
    Undef,
    Nat(Option<u64>),
    Bool(Option<bool>),
    /// Stored and compared only; never evaluated.
    Float(Option<Ratio<i64>>),
    Str(Option<String>),
    Arr {
        base: LabelAddress,
        elem: DataKind,
        init: Box<Value>,
        len: u64,
    },
    VarPtr(Option<LabelAddress>),
    ParPtr(Option<LabelAddress>),
    FunPtr(Option<LabelAddress>, Option<Vec<Value>>),
    Stmt(StmtHandle),
    CompositeType {
        name: LabelAddress,
        members: Vec<MemberDesc>,
    },
    CompositeVal {
        ty: LabelAddress,
        members: Option<Vec<Value>>,
    },
}

impl Data {
    pub fn kind(&self) -> DataKind {
        match self {
            Data::Undef => DataKind::Undef,
            Data::Nat(_) => DataKind::Nat,
            Data::Bool(_) => DataKind::Bool,
            Data::Float(_) => DataKind::Float,
            Data::Str(_) => DataKind::Str,
            Data::Arr { .. } => DataKind::Arr,
            Data::VarPtr(_) => DataKind::VarPtr,
            Data::ParPtr(_) => DataKind::ParPtr,
            Data::FunPtr(..) => DataKind::FunPtr,
            Data::Stmt(_) => DataKind::Stmt,
            Data::CompositeType { .. } => DataKind::CompositeType,
            Data::CompositeVal { .. } => DataKind::CompositeVal,
        }
    }
}

fn opt<T: fmt::Display>(f: &mut fmt::Formatter<'_>, v: &Option<T>) -> fmt::Result {
    match v {
        Some(x) => write!(f, "(Some {x})"),
        None => write!(f, "None"),
    }
}

impl fmt::Display for Data {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Data::Undef => write!(f, "Undef tt"),
            Data::Nat(n) => {
                write!(f, "Nat ")?;
                opt(f, n)
            }
            Data::Bool(b) => {
                write!(f, "Bool ")?;
                opt(f, b)
            }
            Data::Float(x) => {
                write!(f, "Float ")?;
                opt(f, x)
            }
            Data::Str(s) => match s {
                Some(s) => write!(f, "Str (Some {s:?})"),
                None => write!(f, "Str None"),
            },
            Data::Arr { base, elem, len, .. } => write!(f, "Arr {base} {elem:?} [{len}]"),
            Data::VarPtr(a) => {
                write!(f, "VarPtr ")?;
                opt(f, a)
            }
            Data::ParPtr(a) => {
                write!(f, "ParPtr ")?;
                opt(f, a)
            }
            Data::FunPtr(a, args) => {
                write!(f, "FunPtr ")?;
                opt(f, a)?;
                match args {
                    Some(args) => write!(f, " ({} args)", args.len()),
                    None => write!(f, " None"),
                }
            }
            Data::Stmt(h) => write!(f, "Stmt #{}", h.0),
            Data::CompositeType { name, members } => write!(f, "Struct {name} ({} members)", members.len()),
            Data::CompositeVal { ty, members } => match members {
                Some(m) => write!(f, "StructVal {ty} ({} members)", m.len()),
                None => write!(f, "StructVal {ty} None"),
            },
        }
    }
}

/// A memory value: the `⟨data, env, blc⟩` triple.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Value {
    pub data: Data,
    pub env: Env,
    pub blc: Blc,
}

impl Value {
    pub fn new(data: Data, env: Env, blc: Blc) -> Self {
        Self { data, env, blc }
    }

    /// `v_init`: `Undef` with the default environment, public and vacant.
    pub fn init() -> Self {
        Self::new(Data::Undef, Env::default(), Blc::PUBLIC_VACANT)
    }

    pub fn nat(n: u64, env: Env, blc: Blc) -> Self {
        Self::new(Data::Nat(Some(n)), env, blc)
    }

    pub fn boolean(b: bool, env: Env, blc: Blc) -> Self {
        Self::new(Data::Bool(Some(b)), env, blc)
    }
}

pub(crate) fn fmt_env_blc(f: &mut fmt::Formatter<'_>, env: &Env, blc: &Blc) -> fmt::Result {
    let scope = match env.scope {
        LexScope::Load => "load",
        LexScope::Local => "local",
    };
    let domain = match env.domain {
        LexDomain::Global => "global",
        LexDomain::Block => "block",
    };
    let access = match blc.access {
        Access::Public => "public",
        Access::Private => "private",
    };
    let occ = match blc.occupation {
        Occupation::Occupied => "occupy",
        Occupation::Vacant => "vacant",
    };
    write!(f, "{scope} {domain} {access} {occ}")
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Value::init() {
            return write!(f, "initData");
        }
        write!(f, "{} ", self.data)?;
        fmt_env_blc(f, &self.env, &self.blc)
    }
}

/// What a memory slot can hold. Concrete memories store [`Value`]; the
/// symbolic engine stores its own slot type over the same operations.
pub trait SlotValue: Clone + Eq + Hash + fmt::Debug {
    /// Initial content of every block.
    fn v_init() -> Self;
    /// Content restored into engine-reserved blocks by `init_mem`.
    fn reserved_default() -> Self;
}

impl SlotValue for Value {
    fn v_init() -> Self {
        Value::init()
    }

    fn reserved_default() -> Self {
        Value::new(Data::Bool(Some(false)), Env::default(), Blc::PUBLIC_VACANT)
    }
}

/// `value_dec`: decidable equality over the full triple.
pub fn value_dec<V: PartialEq>(v0: &V, v1: &V) -> bool {
    v0 == v1
}
