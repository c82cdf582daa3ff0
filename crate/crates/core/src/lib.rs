//! A symbolic process virtual machine.
//!
//! * [`mem`]: a fixed-size formal memory space with typed value slots and
//!   its memory-management operations.
//! * [`layout_gen`]: deterministic generation and (de)serialization of
//!   memory layouts.
//! * [`ipl`]: parser, typed syntax tree, and typechecker for a small
//!   imperative language.
//! * [`interp`]: a fuel-bounded concrete interpreter over memory states.
//! * [`evi`]: symbolic execution with demand-driven case splitting and
//!   Hoare-style specification checking.

pub mod evi;
pub mod interp;
pub mod ipl;
pub mod layout_gen;
pub mod mem;

pub use evi::{SymMemory, SymValue};
pub use mem::{Memory, MemoryLayout, MemoryState, Value};
