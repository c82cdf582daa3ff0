//! The toy intermediate language: surface parser, typed trees, typechecker,
//! and pretty-printer.

mod check;
mod pretty;
mod syntax;
mod typed;

pub use check::typecheck;
pub use pretty::{pretty, pretty_expr};
pub use syntax::{
    parse_program, parse_program_with, BinOp, Expr, ExprKind, ParseOptions, Pos, Program, Stmt, StmtKind,
    SyntaxError,
};
pub use typed::{
    Bop, ExprNode, Lit, StmtId, SymbolError, SymbolTable, Ty, TypeError, TypeErrorKind, TypedExpr, TypedStmt,
};
