use super::syntax::{BinOp, Expr, ExprKind, Program, Stmt, StmtKind};
use super::typed::{check_assign, check_cond, Bop, Lit, SymbolTable, TypeError, TypedExpr, TypedStmt};

/// Resolves names against `table` and builds the typed tree, rejecting
/// every ill-typed construct.
pub fn typecheck(program: &Program, table: &SymbolTable) -> Result<TypedStmt, TypeError> {
    block(&program.stmts, table)
}

fn block(stmts: &[Stmt], table: &SymbolTable) -> Result<TypedStmt, TypeError> {
    let typed = stmts.iter().map(|s| stmt(s, table)).collect::<Result<Vec<_>, _>>()?;
    Ok(TypedStmt::from_list(typed))
}

fn stmt(s: &Stmt, table: &SymbolTable) -> Result<TypedStmt, TypeError> {
    Ok(match &s.kind {
        StmtKind::If {
            cond,
            then_block,
            else_block,
        } => {
            let cond = expr(cond, table)?;
            check_cond(s.pos, &cond)?;
            TypedStmt::If {
                cond,
                then_branch: Box::new(block(then_block, table)?),
                else_branch: Box::new(match else_block {
                    Some(b) => block(b, table)?,
                    None => TypedStmt::Snil,
                }),
            }
        }
        StmtKind::While { cond, body } => {
            let cond = expr(cond, table)?;
            check_cond(s.pos, &cond)?;
            TypedStmt::While {
                cond,
                body: Box::new(block(body, table)?),
            }
        }
        StmtKind::Assign { target, value } => {
            let lhs = expr(target, table)?;
            let rhs = expr(value, table)?;
            check_assign(target.pos, &lhs, &rhs)?;
            TypedStmt::Assign { lhs, rhs }
        }
        StmtKind::Throw => TypedStmt::Throw,
        StmtKind::Skip => TypedStmt::Snil,
    })
}

fn expr(e: &Expr, table: &SymbolTable) -> Result<TypedExpr, TypeError> {
    match &e.kind {
        ExprKind::Nat(n) => Ok(TypedExpr::constant(Lit::Nat(*n))),
        ExprKind::Bool(b) => Ok(TypedExpr::constant(Lit::Bool(*b))),
        ExprKind::Ident(name) => {
            let (label, ty) = table.lookup(name).ok_or_else(|| TypeError::UnknownIdent {
                pos: e.pos,
                name: name.clone(),
            })?;
            TypedExpr::var(name.clone(), label, ty)
        }
        ExprKind::Binary(op, l, r) => {
            let bop = match op {
                BinOp::Eq => Bop::EqNat,
                BinOp::Plus => Bop::PlusNat,
                BinOp::Minus => Bop::SubNat,
                BinOp::Or => Bop::OrBool,
                BinOp::And => Bop::AndBool,
            };
            TypedExpr::binop_at(e.pos, bop, expr(l, table)?, expr(r, table)?)
        }
    }
}
