//! Renders typed trees back to surface syntax.
//!
//! Exact inverse of parse + typecheck on every tree the parser can
//! produce; `Seq` chains are printed as statement lists.

use std::fmt::Write as _;

use super::typed::{Bop, ExprNode, TypedExpr, TypedStmt};

const INDENT: &str = "    ";

pub fn pretty(stmt: &TypedStmt) -> String {
    let mut out = String::new();
    write_list(&mut out, stmt, 0);
    out
}

pub fn pretty_expr(e: &TypedExpr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, 0);
    out
}

fn items(stmt: &TypedStmt) -> Vec<&TypedStmt> {
    match stmt {
        TypedStmt::Snil => Vec::new(),
        TypedStmt::Seq(a, rest) => {
            let mut v = vec![a.as_ref()];
            v.extend(items(rest));
            v
        }
        other => vec![other],
    }
}

fn write_list(out: &mut String, stmt: &TypedStmt, depth: usize) {
    let list = items(stmt);
    if list.is_empty() {
        let _ = writeln!(out, "{}skip;", INDENT.repeat(depth));
    }
    for s in list {
        write_stmt(out, s, depth);
    }
}

fn write_block(out: &mut String, stmt: &TypedStmt, depth: usize) {
    if matches!(stmt, TypedStmt::Snil) {
        out.push_str("{}");
        return;
    }
    out.push_str("{\n");
    write_list(out, stmt, depth + 1);
    out.push_str(&INDENT.repeat(depth));
    out.push('}');
}

fn write_stmt(out: &mut String, stmt: &TypedStmt, depth: usize) {
    let pad = INDENT.repeat(depth);
    match stmt {
        TypedStmt::If {
            cond,
            then_branch,
            else_branch,
        } => {
            let _ = write!(out, "{pad}if ({}) ", pretty_expr(cond));
            write_block(out, then_branch, depth);
            if !matches!(**else_branch, TypedStmt::Snil) {
                out.push_str(" else ");
                write_block(out, else_branch, depth);
            }
            out.push('\n');
        }
        TypedStmt::While { cond, body } => {
            let _ = write!(out, "{pad}while ({}) ", pretty_expr(cond));
            write_block(out, body, depth);
            out.push('\n');
        }
        TypedStmt::Assign { lhs, rhs } => {
            let _ = writeln!(out, "{pad}{} = {};", pretty_expr(lhs), pretty_expr(rhs));
        }
        TypedStmt::Throw => {
            let _ = writeln!(out, "{pad}throw;");
        }
        TypedStmt::Snil => {
            let _ = writeln!(out, "{pad}skip;");
        }
        TypedStmt::Seq(..) => write_list(out, stmt, depth),
    }
}

fn level(op: Bop) -> u8 {
    match op {
        Bop::OrBool => 1,
        Bop::AndBool => 2,
        Bop::EqNat => 3,
        Bop::PlusNat | Bop::SubNat => 4,
    }
}

/// Writes `e`, parenthesized when its precedence is below `min`.
fn write_expr(out: &mut String, e: &TypedExpr, min: u8) {
    match e.node() {
        ExprNode::Const(lit) => {
            let _ = write!(out, "{lit}");
        }
        ExprNode::Var { name, .. } => out.push_str(name),
        ExprNode::Binop(op, l, r) => {
            let lv = level(*op);
            let paren = lv < min;
            if paren {
                out.push('(');
            }
            // Left-associative levels; `==` does not chain at all.
            let (lmin, rmin) = if *op == Bop::EqNat { (lv + 1, lv + 1) } else { (lv, lv + 1) };
            write_expr(out, l, lmin);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, r, rmin);
            if paren {
                out.push(')');
            }
        }
    }
}
