//! Well-typed syntax trees.
//!
//! Every expression carries its current type and its result type; the
//! constructors enforce the typing rules so downstream stages can trust
//! them.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::syntax::Pos;
use crate::mem::LabelAddress;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ty {
    Nat,
    Bool,
    /// Type of a variable expression, indexed by its address.
    Vid(Option<LabelAddress>),
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Nat => write!(f, "nat"),
            Ty::Bool => write!(f, "bool"),
            Ty::Vid(Some(a)) => write!(f, "vid({a})"),
            Ty::Vid(None) => write!(f, "vid(none)"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lit {
    Nat(u64),
    Bool(bool),
}

impl Lit {
    pub fn ty(self) -> Ty {
        match self {
            Lit::Nat(_) => Ty::Nat,
            Lit::Bool(_) => Ty::Bool,
        }
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lit::Nat(n) => write!(f, "{n}"),
            Lit::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bop {
    EqNat,
    PlusNat,
    SubNat,
    OrBool,
    AndBool,
}

impl Bop {
    pub fn operand_ty(self) -> Ty {
        match self {
            Bop::EqNat | Bop::PlusNat | Bop::SubNat => Ty::Nat,
            Bop::OrBool | Bop::AndBool => Ty::Bool,
        }
    }

    pub fn result_ty(self) -> Ty {
        match self {
            Bop::EqNat | Bop::OrBool | Bop::AndBool => Ty::Bool,
            Bop::PlusNat | Bop::SubNat => Ty::Nat,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Bop::EqNat => "==",
            Bop::PlusNat => "+",
            Bop::SubNat => "-",
            Bop::OrBool => "||",
            Bop::AndBool => "&&",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExprNode {
    Const(Lit),
    Var {
        name: String,
        label: LabelAddress,
        declared: Ty,
    },
    Binop(Bop, Box<TypedExpr>, Box<TypedExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TypedExpr {
    node: ExprNode,
    cur_ty: Ty,
    res_ty: Ty,
}

/// A typing rule violated while building a typed tree.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("{pos}: condition must be bool, found {found}")]
    ConditionNotBool { pos: Pos, found: Ty },
    #[error("{pos}: operator `{op}` expects {expected} operands, found {found}")]
    OperandMismatch {
        pos: Pos,
        op: &'static str,
        expected: Ty,
        found: Ty,
    },
    #[error("{pos}: cannot assign {found} to `{target}` of type {expected}")]
    AssignMismatch {
        pos: Pos,
        target: String,
        expected: Ty,
        found: Ty,
    },
    #[error("{pos}: assignment target is not a variable")]
    NotAssignable { pos: Pos },
    #[error("{pos}: unknown identifier `{name}`")]
    UnknownIdent { pos: Pos, name: String },
    #[error("variable `{name}` must have type nat or bool, found {found}")]
    BadVariableType { name: String, found: Ty },
}

/// Coarse classification of [`TypeError`]s.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TypeErrorKind {
    ConditionNotBool,
    OperandMismatch,
    AssignMismatch,
    NotAssignable,
    UnknownIdent,
    BadVariableType,
}

impl TypeError {
    pub fn kind(&self) -> TypeErrorKind {
        match self {
            TypeError::ConditionNotBool { .. } => TypeErrorKind::ConditionNotBool,
            TypeError::OperandMismatch { .. } => TypeErrorKind::OperandMismatch,
            TypeError::AssignMismatch { .. } => TypeErrorKind::AssignMismatch,
            TypeError::NotAssignable { .. } => TypeErrorKind::NotAssignable,
            TypeError::UnknownIdent { .. } => TypeErrorKind::UnknownIdent,
            TypeError::BadVariableType { .. } => TypeErrorKind::BadVariableType,
        }
    }
}

impl TypedExpr {
    pub fn constant(lit: Lit) -> Self {
        Self {
            node: ExprNode::Const(lit),
            cur_ty: lit.ty(),
            res_ty: lit.ty(),
        }
    }

    pub fn var(name: impl Into<String>, label: LabelAddress, declared: Ty) -> Result<Self, TypeError> {
        let name = name.into();
        if !matches!(declared, Ty::Nat | Ty::Bool) {
            return Err(TypeError::BadVariableType { name, found: declared });
        }
        Ok(Self {
            node: ExprNode::Var { name, label, declared },
            cur_ty: Ty::Vid(Some(label)),
            res_ty: declared,
        })
    }

    pub fn binop(op: Bop, lhs: TypedExpr, rhs: TypedExpr) -> Result<Self, TypeError> {
        Self::binop_at(Pos::default(), op, lhs, rhs)
    }

    pub(crate) fn binop_at(pos: Pos, op: Bop, lhs: TypedExpr, rhs: TypedExpr) -> Result<Self, TypeError> {
        for side in [&lhs, &rhs] {
            if side.res_ty != op.operand_ty() {
                return Err(TypeError::OperandMismatch {
                    pos,
                    op: op.symbol(),
                    expected: op.operand_ty(),
                    found: side.res_ty,
                });
            }
        }
        Ok(Self {
            node: ExprNode::Binop(op, Box::new(lhs), Box::new(rhs)),
            cur_ty: op.result_ty(),
            res_ty: op.result_ty(),
        })
    }

    pub fn node(&self) -> &ExprNode {
        &self.node
    }

    pub fn cur_ty(&self) -> Ty {
        self.cur_ty
    }

    pub fn res_ty(&self) -> Ty {
        self.res_ty
    }

    /// Re-checks the typing rules over the whole tree.
    pub fn invariants_hold(&self) -> bool {
        match &self.node {
            ExprNode::Const(l) => self.cur_ty == l.ty() && self.res_ty == l.ty(),
            ExprNode::Var { label, declared, .. } => {
                self.cur_ty == Ty::Vid(Some(*label)) && self.res_ty == *declared && matches!(declared, Ty::Nat | Ty::Bool)
            }
            ExprNode::Binop(op, l, r) => {
                l.res_ty == op.operand_ty()
                    && r.res_ty == op.operand_ty()
                    && self.cur_ty == op.result_ty()
                    && self.res_ty == op.result_ty()
                    && l.invariants_hold()
                    && r.invariants_hold()
            }
        }
    }

    /// Labels of every variable read by this expression.
    pub fn reads(&self, out: &mut Vec<LabelAddress>) {
        match &self.node {
            ExprNode::Const(_) => {}
            ExprNode::Var { label, .. } => out.push(*label),
            ExprNode::Binop(_, l, r) => {
                l.reads(out);
                r.reads(out);
            }
        }
    }
}

/// Position of a statement in a pre-order walk of the program tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StmtId(pub usize);

impl fmt::Display for StmtId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TypedStmt {
    If {
        cond: TypedExpr,
        then_branch: Box<TypedStmt>,
        else_branch: Box<TypedStmt>,
    },
    Assign {
        lhs: TypedExpr,
        rhs: TypedExpr,
    },
    Seq(Box<TypedStmt>, Box<TypedStmt>),
    Snil,
    Throw,
    /// Loop extension: one step behaves as
    /// `If(cond, Seq(body, While(cond, body)), Snil)`.
    While {
        cond: TypedExpr,
        body: Box<TypedStmt>,
    },
}

impl TypedStmt {
    pub fn if_(cond: TypedExpr, then_branch: TypedStmt, else_branch: TypedStmt) -> Result<Self, TypeError> {
        check_cond(Pos::default(), &cond)?;
        Ok(TypedStmt::If {
            cond,
            then_branch: Box::new(then_branch),
            else_branch: Box::new(else_branch),
        })
    }

    pub fn while_(cond: TypedExpr, body: TypedStmt) -> Result<Self, TypeError> {
        check_cond(Pos::default(), &cond)?;
        Ok(TypedStmt::While {
            cond,
            body: Box::new(body),
        })
    }

    pub fn assign(lhs: TypedExpr, rhs: TypedExpr) -> Result<Self, TypeError> {
        check_assign(Pos::default(), &lhs, &rhs)?;
        Ok(TypedStmt::Assign { lhs, rhs })
    }

    pub fn seq(first: TypedStmt, second: TypedStmt) -> Self {
        TypedStmt::Seq(Box::new(first), Box::new(second))
    }

    /// Canonical form of a statement list: `Snil` when empty, the statement
    /// itself when single, otherwise a right-nested `Seq` chain closed by
    /// `Snil`.
    pub fn from_list(mut stmts: Vec<TypedStmt>) -> Self {
        match stmts.len() {
            0 => TypedStmt::Snil,
            1 => stmts.pop().unwrap(),
            _ => stmts
                .into_iter()
                .rev()
                .fold(TypedStmt::Snil, |rest, s| TypedStmt::seq(s, rest)),
        }
    }

    /// Top-level statements: the inverse of [`TypedStmt::from_list`].
    pub fn spine(&self) -> Vec<&TypedStmt> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                TypedStmt::Snil => break,
                TypedStmt::Seq(a, rest) => {
                    out.push(a.as_ref());
                    cur = rest;
                }
                other => {
                    out.push(other);
                    break;
                }
            }
        }
        out
    }

    /// Number of nodes in a pre-order walk.
    pub fn size(&self) -> usize {
        1 + match self {
            TypedStmt::If {
                then_branch,
                else_branch,
                ..
            } => then_branch.size() + else_branch.size(),
            TypedStmt::Seq(a, b) => a.size() + b.size(),
            TypedStmt::While { body, .. } => body.size(),
            TypedStmt::Assign { .. } | TypedStmt::Snil | TypedStmt::Throw => 0,
        }
    }

    /// `While` nodes in source (pre-order) order, labelled `loop0`, `loop1`, ...
    pub fn loops(&self) -> Vec<(String, &TypedStmt)> {
        fn walk<'a>(s: &'a TypedStmt, out: &mut Vec<(String, &'a TypedStmt)>) {
            match s {
                TypedStmt::If {
                    then_branch,
                    else_branch,
                    ..
                } => {
                    walk(then_branch, out);
                    walk(else_branch, out);
                }
                TypedStmt::Seq(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                TypedStmt::While { body, .. } => {
                    out.push((format!("loop{}", out.len()), s));
                    walk(body, out);
                }
                TypedStmt::Assign { .. } | TypedStmt::Snil | TypedStmt::Throw => {}
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Labels assigned anywhere in this statement.
    pub fn assigned_labels(&self) -> Vec<LabelAddress> {
        fn walk(s: &TypedStmt, out: &mut Vec<LabelAddress>) {
            match s {
                TypedStmt::If {
                    then_branch,
                    else_branch,
                    ..
                } => {
                    walk(then_branch, out);
                    walk(else_branch, out);
                }
                TypedStmt::Seq(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                TypedStmt::While { body, .. } => walk(body, out),
                TypedStmt::Assign { lhs, .. } => {
                    if let ExprNode::Var { label, .. } = lhs.node() {
                        if !out.contains(label) {
                            out.push(*label);
                        }
                    }
                }
                TypedStmt::Snil | TypedStmt::Throw => {}
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    pub fn contains_throw(&self) -> bool {
        match self {
            TypedStmt::Throw => true,
            TypedStmt::If {
                then_branch,
                else_branch,
                ..
            } => then_branch.contains_throw() || else_branch.contains_throw(),
            TypedStmt::Seq(a, b) => a.contains_throw() || b.contains_throw(),
            TypedStmt::While { body, .. } => body.contains_throw(),
            TypedStmt::Assign { .. } | TypedStmt::Snil => false,
        }
    }

    /// Re-checks every statement and expression typing rule.
    pub fn invariants_hold(&self) -> bool {
        match self {
            TypedStmt::If {
                cond,
                then_branch,
                else_branch,
            } => {
                cond.res_ty() == Ty::Bool
                    && cond.invariants_hold()
                    && then_branch.invariants_hold()
                    && else_branch.invariants_hold()
            }
            TypedStmt::While { cond, body } => {
                cond.res_ty() == Ty::Bool && cond.invariants_hold() && body.invariants_hold()
            }
            TypedStmt::Assign { lhs, rhs } => {
                matches!(lhs.node(), ExprNode::Var { .. })
                    && lhs.res_ty() == rhs.res_ty()
                    && lhs.invariants_hold()
                    && rhs.invariants_hold()
            }
            TypedStmt::Seq(a, b) => a.invariants_hold() && b.invariants_hold(),
            TypedStmt::Snil | TypedStmt::Throw => true,
        }
    }
}

pub(crate) fn check_cond(pos: Pos, cond: &TypedExpr) -> Result<(), TypeError> {
    if cond.res_ty() != Ty::Bool {
        return Err(TypeError::ConditionNotBool {
            pos,
            found: cond.res_ty(),
        });
    }
    Ok(())
}

pub(crate) fn check_assign(pos: Pos, lhs: &TypedExpr, rhs: &TypedExpr) -> Result<(), TypeError> {
    let ExprNode::Var { name, .. } = lhs.node() else {
        return Err(TypeError::NotAssignable { pos });
    };
    if lhs.res_ty() != rhs.res_ty() {
        return Err(TypeError::AssignMismatch {
            pos,
            target: name.clone(),
            expected: lhs.res_ty(),
            found: rhs.res_ty(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolError {
    #[error("variable `{0}` is declared twice")]
    Redeclared(String),
    #[error("variable `{name}` reuses the block of `{other}`")]
    LabelInUse { name: String, other: String },
    #[error("variable `{0}` must have type nat or bool")]
    BadType(String),
}

/// Resolves variable names to their blocks and declared types.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolTable {
    entries: BTreeMap<String, (LabelAddress, Ty)>,
    order: Vec<String>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: impl Into<String>, label: LabelAddress, ty: Ty) -> Result<(), SymbolError> {
        let name = name.into();
        if !matches!(ty, Ty::Nat | Ty::Bool) {
            return Err(SymbolError::BadType(name));
        }
        if self.entries.contains_key(&name) {
            return Err(SymbolError::Redeclared(name));
        }
        if let Some((other, _)) = self.entries.iter().find(|(_, (l, _))| *l == label) {
            return Err(SymbolError::LabelInUse {
                name,
                other: other.clone(),
            });
        }
        self.entries.insert(name.clone(), (label, ty));
        self.order.push(name);
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Option<(LabelAddress, Ty)> {
        self.entries.get(name).copied()
    }

    /// Name bound to a block, if any.
    pub fn name_of(&self, label: LabelAddress) -> Option<&str> {
        self.entries
            .iter()
            .find(|(_, (l, _))| *l == label)
            .map(|(n, _)| n.as_str())
    }

    /// Declarations in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, LabelAddress, Ty)> {
        self.order.iter().map(|n| {
            let (l, t) = self.entries[n];
            (n.as_str(), l, t)
        })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}
