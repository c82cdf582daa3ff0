//! Symbolic mirror of the concrete interpreter.
//!
//! Evaluation is demand-driven: when an operation cannot be decided
//! without knowing a symbol, the current statement is abandoned, the path
//! forks on that symbol, the pinned value is substituted into memory, and
//! the statement is retried at the same fuel on each fork.

use crate::interp::{expr_l, helpers, val_to_value, Event, ExecConfig, InterpError, ThrowFlag};
use crate::ipl::{Bop, ExprNode, StmtId, TypedExpr, TypedStmt};
use crate::mem::{Blc, Data, Env};

use super::path::{Atom, PathCondition};
use super::sym::{SymData, SymId, SymMemory, SymValue};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathResult {
    pub condition: PathCondition,
    pub memory: SymMemory,
    /// The throw flag was raised; `memory` has been reset to `m_init`.
    pub reverted: bool,
    pub diagnostics: Vec<Event>,
    /// Set when the path hit an operation outside the decidable fragment;
    /// `memory` is then the state at the point it stopped.
    pub undecided: Option<String>,
}

/// Which way a symbol can be split.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum SplitOn {
    Bool(SymId),
    Nat(SymId),
}

impl SplitOn {
    fn atoms(self) -> [Atom; 2] {
        match self {
            SplitOn::Bool(id) => [Atom::BoolIs(id, true), Atom::BoolIs(id, false)],
            SplitOn::Nat(id) => [Atom::NatIsZero(id), Atom::NatIsSucc(id)],
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Eval {
    Val(SymValue),
    /// The concrete evaluator would yield `None`, whatever the symbols.
    Fail,
    Split(SplitOn),
    Undecided(String),
}

/// Replaces every occurrence of the atom's symbol with its pinned form.
pub fn apply_atom(sm: &SymMemory, atom: Atom) -> SymMemory {
    let id = atom.symbol();
    sm.map(|v| {
        let data = match (&v.data, atom) {
            (SymData::SymBool(s), Atom::BoolIs(_, b)) if *s == id => SymData::Conc(Data::Bool(Some(b))),
            (SymData::SymNat(s) | SymData::SymNatSucc(s), Atom::NatIsZero(_)) if *s == id => {
                SymData::Conc(Data::Nat(Some(0)))
            }
            (SymData::SymNat(s), Atom::NatIsSucc(_)) if *s == id => SymData::SymNatSucc(id),
            (d, _) => d.clone(),
        };
        SymValue::new(data, v.env, v.blc)
    })
}

/// Applies every atom of a condition.
pub fn apply_condition(sm: &SymMemory, pc: &PathCondition) -> SymMemory {
    pc.atoms().iter().fold(sm.clone(), |m, a| apply_atom(&m, *a))
}

enum NatView {
    K(u64),
    Sym(SymId),
    Succ(SymId),
}

fn nat_view(v: &SymValue) -> Option<NatView> {
    match &v.data {
        SymData::Conc(Data::Nat(Some(k))) => Some(NatView::K(*k)),
        SymData::SymNat(id) => Some(NatView::Sym(*id)),
        SymData::SymNatSucc(id) => Some(NatView::Succ(*id)),
        _ => None,
    }
}

enum BoolView {
    K(bool),
    Sym(SymId),
}

fn bool_view(v: &SymValue) -> Option<BoolView> {
    match &v.data {
        SymData::Conc(Data::Bool(Some(b))) => Some(BoolView::K(*b)),
        SymData::SymBool(id) => Some(BoolView::Sym(*id)),
        _ => None,
    }
}

/// Symbolic counterpart of [`helpers::apply`].
pub(crate) fn sym_apply(op: Bop, a: &SymValue, b: &SymValue, env: Env, blc: Blc) -> Eval {
    if let (Some(x), Some(y)) = (a.as_concrete(), b.as_concrete()) {
        return match helpers::apply(op, Some(x), Some(y), env, blc) {
            Some(v) => Eval::Val(v.into()),
            None => Eval::Fail,
        };
    }
    let out = |d: SymData| Eval::Val(SymValue::new(d, env, blc));
    let boolean = |b: bool| out(SymData::Conc(Data::Bool(Some(b))));
    let nat = |n: u64| out(SymData::Conc(Data::Nat(Some(n))));
    let undecided = || Eval::Undecided(format!("`{}` on a symbolic nat outside the zero/nonzero fragment", op.symbol()));
    match op {
        Bop::EqNat | Bop::PlusNat | Bop::SubNat => {
            let (Some(x), Some(y)) = (nat_view(a), nat_view(b)) else {
                return Eval::Fail;
            };
            use NatView::*;
            match op {
                Bop::EqNat => match (x, y) {
                    (Sym(i) | Succ(i), Sym(j) | Succ(j)) if i == j => boolean(true),
                    (Succ(_), K(0)) | (K(0), Succ(_)) => boolean(false),
                    (Sym(i), K(0)) | (K(0), Sym(i)) => Eval::Split(SplitOn::Nat(i)),
                    (Sym(i), Sym(_) | Succ(_)) | (Succ(_), Sym(i)) => Eval::Split(SplitOn::Nat(i)),
                    _ => undecided(),
                },
                Bop::PlusNat => match (x, y) {
                    (_, K(0)) => out(a.data.clone()),
                    (K(0), _) => out(b.data.clone()),
                    _ => undecided(),
                },
                _ => match (x, y) {
                    (_, K(0)) => out(a.data.clone()),
                    (K(0), _) => nat(0),
                    (Sym(i) | Succ(i), Sym(j) | Succ(j)) if i == j => nat(0),
                    _ => undecided(),
                },
            }
        }
        Bop::OrBool | Bop::AndBool => {
            let (Some(x), Some(y)) = (bool_view(a), bool_view(b)) else {
                return Eval::Fail;
            };
            // `absorb` decides the result outright; the other constant is neutral.
            let absorb = op == Bop::OrBool;
            match (x, y) {
                (BoolView::K(k), _) | (_, BoolView::K(k)) if k == absorb => boolean(absorb),
                (BoolView::K(_), _) => out(b.data.clone()),
                (_, BoolView::K(_)) => out(a.data.clone()),
                (BoolView::Sym(i), BoolView::Sym(j)) if i == j => out(a.data.clone()),
                (BoolView::Sym(i), BoolView::Sym(_)) => Eval::Split(SplitOn::Bool(i)),
            }
        }
    }
}

/// Symbolic right-value evaluation.
pub(crate) fn sym_expr_r(m: &SymMemory, cfg: &ExecConfig, e: &TypedExpr) -> Eval {
    match e.node() {
        ExprNode::Const(lit) => match val_to_value(cfg.env, cfg.blc, *lit) {
            Some(v) => Eval::Val(v.into()),
            None => Eval::Fail,
        },
        ExprNode::Var { .. } => {
            let Some(addr) = expr_l(e) else { return Eval::Fail };
            match m.read_chck(cfg.policy.as_ref(), &cfg.env, &cfg.blc, addr) {
                Some(v) => Eval::Val(v.clone()),
                None => Eval::Fail,
            }
        }
        ExprNode::Binop(op, l, r) => {
            let (a, b) = (sym_expr_r(m, cfg, l), sym_expr_r(m, cfg, r));
            match (a, b) {
                (Eval::Fail, _) | (_, Eval::Fail) => Eval::Fail,
                (Eval::Split(s), _) | (_, Eval::Split(s)) => Eval::Split(s),
                (Eval::Undecided(r), _) | (_, Eval::Undecided(r)) => Eval::Undecided(r),
                (Eval::Val(x), Eval::Val(y)) => sym_apply(*op, &x, &y, cfg.env, cfg.blc),
            }
        }
    }
}

/// Outcome of a loop or branch condition on one path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Decision {
    True,
    False,
    /// Unreadable or uninitialized; the statement leaves memory unchanged.
    Silent,
    Undecided(String),
}

fn decide(m: &SymMemory, cfg: &ExecConfig, cond: &TypedExpr) -> Result<Decision, SplitOn> {
    Ok(match sym_expr_r(m, cfg, cond) {
        Eval::Val(v) => match v.data {
            SymData::Conc(Data::Bool(Some(true))) => Decision::True,
            SymData::Conc(Data::Bool(Some(false))) => Decision::False,
            SymData::SymBool(id) => return Err(SplitOn::Bool(id)),
            _ => Decision::Silent,
        },
        Eval::Fail => Decision::Silent,
        Eval::Split(s) => return Err(s),
        Eval::Undecided(r) => Decision::Undecided(r),
    })
}

#[derive(Clone, Debug)]
pub(crate) struct PathState {
    pub cond: PathCondition,
    pub mem: SymMemory,
    pub events: Vec<Event>,
    pub undecided: Option<String>,
}

impl PathState {
    pub fn new(cond: PathCondition, mem: SymMemory) -> Self {
        Self {
            cond,
            mem,
            events: Vec::new(),
            undecided: None,
        }
    }

    /// Both refinements of this path on `split`, each with the pinned
    /// value substituted.
    pub fn fork(&self, split: SplitOn) -> Vec<PathState> {
        split
            .atoms()
            .into_iter()
            .filter_map(|atom| {
                let cond = self.cond.with(atom)?;
                Some(PathState {
                    cond,
                    mem: apply_atom(&self.mem, atom),
                    events: self.events.clone(),
                    undecided: None,
                })
            })
            .collect()
    }
}

/// Splits `p` until `cond` is decided on every resulting path.
pub(crate) fn split_on_condition(cfg: &ExecConfig, p: PathState, cond: &TypedExpr) -> Vec<(PathState, Decision)> {
    match decide(&p.mem, cfg, cond) {
        Ok(d) => vec![(p, d)],
        Err(split) => p
            .fork(split)
            .into_iter()
            .flat_map(|q| split_on_condition(cfg, q, cond))
            .collect(),
    }
}

fn is_raised(v: &SymValue) -> bool {
    v.data == SymData::Conc(Data::Bool(Some(true)))
}

struct SymMachine<'a> {
    cfg: &'a ExecConfig,
    flag: ThrowFlag,
}

impl SymMachine<'_> {
    fn throw_set(&self, m: &SymMemory) -> bool {
        is_raised(m.read_low(self.flag.slot))
    }

    fn step(&self, fuel: u64, mut p: PathState, s: &TypedStmt, id: usize) -> Vec<PathState> {
        if p.undecided.is_some() {
            return vec![p];
        }
        if fuel == 0 {
            p.events.push(Event::FuelExhausted { stmt: StmtId(id) });
            return vec![p];
        }
        if self.throw_set(&p.mem) {
            let flag = p.mem.read_low(self.flag.slot).clone();
            p.mem = p.mem.init_mem().write_low(self.flag.slot, flag);
            return vec![p];
        }
        let k = fuel - 1;
        match s {
            TypedStmt::Snil => vec![p],
            TypedStmt::Throw => {
                p.events.push(Event::ThrowRaised { stmt: StmtId(id) });
                let raised = val_to_value(self.cfg.env, self.cfg.blc, crate::ipl::Lit::Bool(true)).unwrap();
                p.mem = p.mem.write_dir(self.flag.label, raised.into());
                vec![p]
            }
            TypedStmt::Seq(a, b) => self
                .step(k, p, a, id + 1)
                .into_iter()
                .flat_map(|q| self.step(k, q, b, id + 1 + a.size()))
                .collect(),
            TypedStmt::If {
                cond,
                then_branch,
                else_branch,
            } => match decide(&p.mem, self.cfg, cond) {
                Ok(Decision::True) => self.step(k, p, then_branch, id + 1),
                Ok(Decision::False) => self.step(k, p, else_branch, id + 1 + then_branch.size()),
                Ok(d) => self.halt(p, d, id),
                Err(split) => self.retry(fuel, p, split, s, id),
            },
            TypedStmt::While { cond, body } => match decide(&p.mem, self.cfg, cond) {
                Ok(Decision::True) => {
                    if k == 0 {
                        p.events.push(Event::FuelExhausted { stmt: StmtId(id) });
                        return vec![p];
                    }
                    self.step(k - 1, p, body, id + 1)
                        .into_iter()
                        .flat_map(|q| self.step(k - 1, q, s, id))
                        .collect()
                }
                Ok(Decision::False) => self.step(k, p, &TypedStmt::Snil, id),
                Ok(d) => self.halt(p, d, id),
                Err(split) => self.retry(fuel, p, split, s, id),
            },
            TypedStmt::Assign { lhs, rhs } => match sym_expr_r(&p.mem, self.cfg, rhs) {
                Eval::Fail => {
                    p.events.push(Event::SilentReadFailure { stmt: StmtId(id) });
                    vec![p]
                }
                Eval::Split(split) => self.retry(fuel, p, split, s, id),
                Eval::Undecided(reason) => {
                    p.undecided = Some(reason);
                    vec![p]
                }
                Eval::Val(v) => {
                    let Some(addr) = expr_l(lhs) else { return vec![p] };
                    let (ok, m1) = p.mem.write_chck(self.cfg.policy.as_ref(), &self.cfg.env, &self.cfg.blc, addr, v);
                    if !ok {
                        p.events.push(Event::WriteDenied { stmt: StmtId(id) });
                    }
                    p.mem = m1;
                    vec![p]
                }
            },
        }
    }

    fn halt(&self, mut p: PathState, d: Decision, id: usize) -> Vec<PathState> {
        match d {
            Decision::Undecided(reason) => p.undecided = Some(reason),
            _ => p.events.push(Event::SilentReadFailure { stmt: StmtId(id) }),
        }
        vec![p]
    }

    fn retry(&self, fuel: u64, p: PathState, split: SplitOn, s: &TypedStmt, id: usize) -> Vec<PathState> {
        p.fork(split)
            .into_iter()
            .flat_map(|q| self.step(fuel, q, s, id))
            .collect()
    }
}

/// Runs `s` from `sm` under the assumption `cond`; results are normalized
/// (raised flag ⇒ `m_init`) and sorted by condition.
pub fn sym_exec_from(cfg: &ExecConfig, cond: PathCondition, sm: &SymMemory, s: &TypedStmt) -> Result<Vec<PathResult>, InterpError> {
    let flag = ThrowFlag::of(sm.layout())?;
    let machine = SymMachine { cfg, flag };
    let start = PathState::new(cond, sm.clone());
    let mut out: Vec<PathResult> = machine
        .step(cfg.fuel, start, s, 0)
        .into_iter()
        .map(|p| {
            let reverted = machine.throw_set(&p.mem);
            PathResult {
                condition: p.cond,
                memory: if reverted { p.mem.init_mem() } else { p.mem },
                reverted,
                diagnostics: p.events,
                undecided: p.undecided,
            }
        })
        .collect();
    out.sort_by(|a, b| a.condition.cmp(&b.condition));
    Ok(out)
}

/// All paths of `s` from the symbolic memory `sm`.
pub fn sym_exec(cfg: &ExecConfig, sm: &SymMemory, s: &TypedStmt) -> Result<Vec<PathResult>, InterpError> {
    sym_exec_from(cfg, PathCondition::new(), sm, s)
}
