//! Symbolic execution and specification checking.
//!
//! Inputs declared `sym` in a spec become symbols; execution forks only
//! when a symbol's value decides control flow, pinning it with an atom
//! (`b`/`!b`, `n == 0`/`n != 0`). Each resulting path is then checked
//! against the spec's guarded assertions.

mod check;
mod exec;
mod path;
mod spec;
mod sym;

pub use check::{
    build_precondition, load_spec, AssertionOutcome, InvariantError, LoadError, Matched, Obligation, Outcome,
    PathVerdict, Precondition, PreconditionError, Status, Verdict, Verifier,
};
pub use exec::{apply_atom, apply_condition, sym_exec, sym_exec_from, PathResult};
pub use path::{Atom, PathCondition};
pub use spec::{
    render_assertions, Assertion, Case, Guard, GuardAtom, Init, InvariantClause, Spec, SpecParseError, VarDecl,
    SPEC_HEADER,
};
pub use sym::{
    concretize, embed_concrete, lift, symbols_in, Binding, Named, SymData, SymId, SymKind, SymMemory, SymValue,
    SymbolInfo, Symbols,
};
