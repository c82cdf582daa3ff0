//! Formal memory space: layouts, values, states, and the memory-management
//! operations (map, read, write, search, allocate, free, initialize).

mod layout;
mod policy;
mod state;
mod value;

pub use layout::{
    Label, LabelAddress, LayoutError, MemoryLayout, ReservedLabel, SlotIndex, INIT_SPECIAL, THROW_LABEL,
    THROW_SPECIAL,
};
pub use policy::{AllocCheck, AllowAll, InforCheck, InitOnly, PublicOnly};
pub use state::{Memory, MemoryState};
pub use value::{
    value_dec, Access, Blc, Data, DataKind, Env, LexDomain, LexScope, MemberDesc, Occupation, SlotValue,
    StmtHandle, Value,
};

pub(crate) use layout::is_identifier;
pub(crate) use value::fmt_env_blc;
