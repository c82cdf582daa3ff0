//! Fuel-bounded concrete interpreter.
//!
//! Failures never abort: an unreadable condition, a denied write, or an
//! exhausted budget returns the memory unchanged and records an [`Event`].

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ipl::{Bop, ExprNode, Lit, StmtId, TypedExpr, TypedStmt};
use crate::mem::{Blc, Data, Env, InforCheck, LabelAddress, MemoryState, PublicOnly, ReservedLabel, SlotIndex, Value};

/// Execution parameters: fuel budget, caller environment, block info, and
/// the access policy consulted by checked reads and writes.
#[derive(Clone)]
pub struct ExecConfig {
    pub fuel: u64,
    pub env: Env,
    pub blc: Blc,
    pub policy: Arc<dyn InforCheck + Send + Sync>,
}

impl ExecConfig {
    pub fn new(fuel: u64) -> Self {
        Self {
            fuel,
            env: Env::default(),
            blc: Blc::PUBLIC_OCCUPIED,
            policy: Arc::new(PublicOnly),
        }
    }

    pub fn with_fuel(&self, fuel: u64) -> Self {
        Self { fuel, ..self.clone() }
    }
}

impl fmt::Debug for ExecConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExecConfig")
            .field("fuel", &self.fuel)
            .field("env", &self.env)
            .field("blc", &self.blc)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    FuelExhausted { stmt: StmtId },
    /// A condition or right-hand side evaluated to nothing.
    SilentReadFailure { stmt: StmtId },
    /// `write_chck` refused an assignment.
    WriteDenied { stmt: StmtId },
    ThrowRaised { stmt: StmtId },
    BreakpointDump { index: usize, memory: MemoryState },
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::FuelExhausted { stmt } => write!(f, "fuel exhausted at {stmt}"),
            Event::SilentReadFailure { stmt } => write!(f, "silent read failure at {stmt}"),
            Event::WriteDenied { stmt } => write!(f, "write denied at {stmt}"),
            Event::ThrowRaised { stmt } => write!(f, "throw raised at {stmt}"),
            Event::BreakpointDump { index, .. } => write!(f, "breakpoint after statement {index}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecOutcome {
    pub memory: MemoryState,
    /// The throw flag was set at the end and the memory was reset.
    pub reverted: bool,
    pub diagnostics: Vec<Event>,
}

impl ExecOutcome {
    pub fn fuel_exhausted(&self) -> bool {
        self.diagnostics.iter().any(|e| matches!(e, Event::FuelExhausted { .. }))
    }

    pub fn throw_raised(&self) -> bool {
        self.diagnostics.iter().any(|e| matches!(e, Event::ThrowRaised { .. }))
    }

    pub fn breakpoint(&self) -> Option<&MemoryState> {
        self.diagnostics.iter().find_map(|e| match e {
            Event::BreakpointDump { memory, .. } => Some(memory),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpError {
    #[error("memory layout has no `{}` reserved label for the throw flag", crate::mem::THROW_LABEL)]
    NoThrowFlag,
}

/// Converts a language literal into a memory value.
pub fn val_to_value(env: Env, blc: Blc, lit: Lit) -> Option<Value> {
    Some(match lit {
        Lit::Nat(n) => Value::nat(n, env, blc),
        Lit::Bool(b) => Value::boolean(b, env, blc),
    })
}

/// Address denoted by an expression in assignment-target position.
pub fn expr_l(e: &TypedExpr) -> Option<LabelAddress> {
    match e.node() {
        ExprNode::Var { label, .. } => Some(*label),
        _ => None,
    }
}

/// Operator helpers. Each is defined on `Some` payloads of its operand
/// kind only; every other combination yields `None`. Results carry the
/// evaluator's environment and block info.
pub mod helpers {
    use super::*;

    fn nats(a: &Option<Value>, b: &Option<Value>) -> Option<(u64, u64)> {
        match (&a.as_ref()?.data, &b.as_ref()?.data) {
            (Data::Nat(Some(x)), Data::Nat(Some(y))) => Some((*x, *y)),
            _ => None,
        }
    }

    fn bools(a: &Option<Value>, b: &Option<Value>) -> Option<(bool, bool)> {
        match (&a.as_ref()?.data, &b.as_ref()?.data) {
            (Data::Bool(Some(x)), Data::Bool(Some(y))) => Some((*x, *y)),
            _ => None,
        }
    }

    pub fn eqb_val(a: Option<Value>, b: Option<Value>, env: Env, blc: Blc) -> Option<Value> {
        nats(&a, &b).map(|(x, y)| Value::boolean(x == y, env, blc))
    }

    /// `None` on overflow.
    pub fn plus_val(a: Option<Value>, b: Option<Value>, env: Env, blc: Blc) -> Option<Value> {
        let (x, y) = nats(&a, &b)?;
        x.checked_add(y).map(|s| Value::nat(s, env, blc))
    }

    /// Truncated at zero.
    pub fn sub_val(a: Option<Value>, b: Option<Value>, env: Env, blc: Blc) -> Option<Value> {
        nats(&a, &b).map(|(x, y)| Value::nat(x.saturating_sub(y), env, blc))
    }

    pub fn orb_val(a: Option<Value>, b: Option<Value>, env: Env, blc: Blc) -> Option<Value> {
        bools(&a, &b).map(|(x, y)| Value::boolean(x || y, env, blc))
    }

    pub fn andb_val(a: Option<Value>, b: Option<Value>, env: Env, blc: Blc) -> Option<Value> {
        bools(&a, &b).map(|(x, y)| Value::boolean(x && y, env, blc))
    }

    pub fn apply(op: Bop, a: Option<Value>, b: Option<Value>, env: Env, blc: Blc) -> Option<Value> {
        match op {
            Bop::EqNat => eqb_val(a, b, env, blc),
            Bop::PlusNat => plus_val(a, b, env, blc),
            Bop::SubNat => sub_val(a, b, env, blc),
            Bop::OrBool => orb_val(a, b, env, blc),
            Bop::AndBool => andb_val(a, b, env, blc),
        }
    }
}

/// Right-value evaluation. Variables are read through `read_chck`.
pub fn expr_r(m: &MemoryState, cfg: &ExecConfig, e: &TypedExpr) -> Option<Value> {
    match e.node() {
        ExprNode::Const(lit) => val_to_value(cfg.env, cfg.blc, *lit),
        ExprNode::Var { .. } => {
            let addr = expr_l(e)?;
            m.read_chck(cfg.policy.as_ref(), &cfg.env, &cfg.blc, addr).cloned()
        }
        ExprNode::Binop(op, l, r) => {
            let (a, b) = (expr_r(m, cfg, l), expr_r(m, cfg, r));
            helpers::apply(*op, a, b, cfg.env, cfg.blc)
        }
    }
}

/// Throw-flag plumbing shared with the symbolic engine.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ThrowFlag {
    pub label: ReservedLabel,
    pub slot: SlotIndex,
}

impl ThrowFlag {
    pub fn of(layout: &crate::mem::MemoryLayout) -> Result<Self, InterpError> {
        let label = layout.throw_label().ok_or(InterpError::NoThrowFlag)?;
        Ok(Self {
            label,
            slot: layout.slot_of(label),
        })
    }
}

fn is_raised(v: &Value) -> bool {
    v.data == Data::Bool(Some(true))
}

struct Machine<'a> {
    cfg: &'a ExecConfig,
    flag: ThrowFlag,
    events: Vec<Event>,
}

impl Machine<'_> {
    fn throw_set(&self, m: &MemoryState) -> bool {
        is_raised(m.read_low(self.flag.slot))
    }

    /// Memory reset with the throw flag still raised, so enclosing
    /// statements keep short-circuiting.
    fn aborted(&self, m: &MemoryState) -> MemoryState {
        m.init_mem().write_low(self.flag.slot, m.read_low(self.flag.slot).clone())
    }

    fn step(&mut self, fuel: u64, m: MemoryState, s: &TypedStmt, id: usize) -> MemoryState {
        if fuel == 0 {
            self.events.push(Event::FuelExhausted { stmt: StmtId(id) });
            return m;
        }
        if self.throw_set(&m) {
            return self.aborted(&m);
        }
        let k = fuel - 1;
        match s {
            TypedStmt::Snil => m,
            TypedStmt::Throw => {
                self.events.push(Event::ThrowRaised { stmt: StmtId(id) });
                m.write_dir(self.flag.label, Value::boolean(true, self.cfg.env, self.cfg.blc))
            }
            TypedStmt::Seq(a, b) => {
                let m1 = self.step(k, m, a, id + 1);
                self.step(k, m1, b, id + 1 + a.size())
            }
            TypedStmt::If {
                cond,
                then_branch,
                else_branch,
            } => match self.condition(&m, cond, id) {
                Some(true) => self.step(k, m, then_branch, id + 1),
                Some(false) => self.step(k, m, else_branch, id + 1 + then_branch.size()),
                None => m,
            },
            TypedStmt::While { cond, body } => match self.condition(&m, cond, id) {
                // Unrolled as If(cond, Seq(body, While), Snil); the
                // synthetic nodes share the loop's id.
                Some(true) => {
                    if k == 0 {
                        self.events.push(Event::FuelExhausted { stmt: StmtId(id) });
                        return m;
                    }
                    let m1 = self.step(k - 1, m, body, id + 1);
                    self.step(k - 1, m1, s, id)
                }
                Some(false) => self.step(k, m, &TypedStmt::Snil, id),
                None => m,
            },
            TypedStmt::Assign { lhs, rhs } => {
                let Some(v) = expr_r(&m, self.cfg, rhs) else {
                    self.events.push(Event::SilentReadFailure { stmt: StmtId(id) });
                    return m;
                };
                let Some(addr) = expr_l(lhs) else {
                    return m;
                };
                let (ok, m1) = m.write_chck(self.cfg.policy.as_ref(), &self.cfg.env, &self.cfg.blc, addr, v);
                if !ok {
                    self.events.push(Event::WriteDenied { stmt: StmtId(id) });
                }
                m1
            }
        }
    }

    fn condition(&mut self, m: &MemoryState, cond: &TypedExpr, id: usize) -> Option<bool> {
        match expr_r(m, self.cfg, cond).map(|v| v.data) {
            Some(Data::Bool(Some(b))) => Some(b),
            Some(Data::Bool(None)) | None => {
                self.events.push(Event::SilentReadFailure { stmt: StmtId(id) });
                None
            }
            Some(other) => {
                debug_assert!(false, "typechecked condition produced {other:?}");
                None
            }
        }
    }

    /// Same semantics as `step`, walking the top-level `Seq` chain so a
    /// breakpoint can observe the state after each top-level statement.
    fn spine(&mut self, fuel: u64, m: MemoryState, s: &TypedStmt, id: usize, index: &mut usize, bp: Option<usize>) -> MemoryState {
        match s {
            TypedStmt::Seq(a, rest) => {
                if fuel == 0 {
                    self.events.push(Event::FuelExhausted { stmt: StmtId(id) });
                    return m;
                }
                if self.throw_set(&m) {
                    return self.aborted(&m);
                }
                let m1 = self.step(fuel - 1, m, a, id + 1);
                *index += 1;
                self.maybe_dump(*index, bp, &m1);
                self.spine(fuel - 1, m1, rest, id + 1 + a.size(), index, bp)
            }
            TypedStmt::Snil => self.step(fuel, m, s, id),
            other => {
                let m1 = self.step(fuel, m, other, id);
                *index += 1;
                self.maybe_dump(*index, bp, &m1);
                m1
            }
        }
    }

    fn maybe_dump(&mut self, index: usize, bp: Option<usize>, m: &MemoryState) {
        if bp == Some(index) {
            self.events.push(Event::BreakpointDump {
                index,
                memory: m.clone(),
            });
        }
    }
}

/// Runs `s` for at most `cfg.fuel` nested steps and returns the final
/// state as is (a raised throw flag is left raised).
pub fn exec(cfg: &ExecConfig, m: &MemoryState, s: &TypedStmt) -> Result<MemoryState, InterpError> {
    let flag = ThrowFlag::of(m.layout())?;
    let mut machine = Machine {
        cfg,
        flag,
        events: Vec::new(),
    };
    Ok(machine.step(cfg.fuel, m.clone(), s, 0))
}

/// Top-level run: executes `s`, resets memory to `m_init` when the throw
/// flag ends up raised, and collects diagnostics. `breakpoint = Some(n)`
/// snapshots the state after the n-th top-level statement (0 = before
/// the first).
pub fn run_program(cfg: &ExecConfig, m: &MemoryState, s: &TypedStmt, breakpoint: Option<usize>) -> Result<ExecOutcome, InterpError> {
    let flag = ThrowFlag::of(m.layout())?;
    let mut machine = Machine {
        cfg,
        flag,
        events: Vec::new(),
    };
    let mut index = 0;
    machine.maybe_dump(0, breakpoint, m);
    let last = machine.spine(cfg.fuel, m.clone(), s, 0, &mut index, breakpoint);
    let reverted = machine.throw_set(&last);
    let memory = if reverted { last.init_mem() } else { last };
    Ok(ExecOutcome {
        memory,
        reverted,
        diagnostics: machine.events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ipl::{parse_program, typecheck, SymbolTable, Ty};
    use crate::layout_gen::{generate_layout, Requirements};
    use crate::mem::{Access, Occupation};

    struct Fixture {
        mem: MemoryState,
        table: SymbolTable,
    }

    fn fixture(vars: &[(&str, Ty, Option<Lit>)]) -> Fixture {
        let layout = Arc::new(generate_layout(&Requirements::new(16)).unwrap());
        let mut mem = MemoryState::initial(layout);
        let mut table = SymbolTable::new();
        let cfg = ExecConfig::new(0);
        for (name, ty, init) in vars {
            let a = mem.allocate(mem.layout().nat_to_label(0).unwrap()).unwrap();
            table.declare(*name, a, *ty).unwrap();
            let v = match (init, ty) {
                (Some(lit), _) => val_to_value(cfg.env, cfg.blc, *lit).unwrap(),
                (None, Ty::Bool) => Value::new(Data::Bool(None), cfg.env, cfg.blc),
                (None, _) => Value::new(Data::Nat(None), cfg.env, cfg.blc),
            };
            mem = mem.write_dir(a, v);
        }
        Fixture { mem, table }
    }

    fn compile(f: &Fixture, src: &str) -> TypedStmt {
        typecheck(&parse_program(src).unwrap(), &f.table).unwrap()
    }

    fn label(f: &Fixture, name: &str) -> LabelAddress {
        f.table.lookup(name).unwrap().0
    }

    fn pledge(n: u64, complete: bool, refunded: bool) -> Fixture {
        fixture(&[
            ("complete", Ty::Bool, Some(Lit::Bool(complete))),
            ("refunded", Ty::Bool, Some(Lit::Bool(refunded))),
            ("Pledge", Ty::Nat, Some(Lit::Nat(n))),
            ("refnd", Ty::Bool, Some(Lit::Bool(false))),
        ])
    }

    const PLEDGE: &str = "if (Pledge == 0 || complete || refunded) { throw; }\nrefnd = true;\n";

    #[test]
    fn literals_become_values() {
        let env = Env::default();
        let blc = Blc::PUBLIC_OCCUPIED;
        assert_eq!(val_to_value(env, blc, Lit::Nat(5)), Some(Value::nat(5, env, blc)));
        assert_eq!(val_to_value(env, blc, Lit::Bool(true)), Some(Value::boolean(true, env, blc)));
        let odd = Blc {
            access: Access::Private,
            occupation: Occupation::Vacant,
        };
        assert_eq!(val_to_value(env, odd, Lit::Nat(1)).unwrap().blc, odd);
    }

    #[test]
    fn left_values() {
        let f = fixture(&[("x", Ty::Nat, None)]);
        let x = TypedExpr::var("x", label(&f, "x"), Ty::Nat).unwrap();
        assert_eq!(expr_l(&x), Some(label(&f, "x")));
        assert_eq!(expr_l(&TypedExpr::constant(Lit::Nat(1))), None);
        let sum = TypedExpr::binop(Bop::PlusNat, x.clone(), x).unwrap();
        assert_eq!(expr_l(&sum), None);
    }

    #[test]
    fn right_values() {
        let f = fixture(&[("x", Ty::Nat, None)]);
        let cfg = ExecConfig::new(10);
        let c = |n| TypedExpr::constant(Lit::Nat(n));
        let eval = |e: &TypedExpr| expr_r(&f.mem, &cfg, e).map(|v| v.data);
        let fresh = MemoryState::initial(Arc::clone(f.mem.layout()));
        assert_eq!(eval(&TypedExpr::binop(Bop::PlusNat, c(2), c(3)).unwrap()), Some(Data::Nat(Some(5))));
        assert_eq!(eval(&TypedExpr::binop(Bop::SubNat, c(2), c(5)).unwrap()), Some(Data::Nat(Some(0))));
        assert_eq!(eval(&TypedExpr::binop(Bop::EqNat, c(0), c(0)).unwrap()), Some(Data::Bool(Some(true))));
        let x = TypedExpr::var("x", label(&f, "x"), Ty::Nat).unwrap();
        assert_eq!(eval(&x), Some(Data::Nat(None)));
        assert_eq!(eval(&TypedExpr::binop(Bop::PlusNat, x.clone(), c(1)).unwrap()), None);
        // Block still holding v_init: the read succeeds, the helper does not.
        assert_eq!(expr_r(&fresh, &cfg, &x), Some(Value::init()));
        let sum = TypedExpr::binop(Bop::PlusNat, x, c(1)).unwrap();
        assert_eq!(expr_r(&fresh, &cfg, &sum), None);
        assert_eq!(eval(&TypedExpr::binop(Bop::PlusNat, c(u64::MAX), c(1)).unwrap()), None);
    }

    #[test]
    fn zero_fuel_returns_input() {
        let f = pledge(0, false, false);
        let s = compile(&f, PLEDGE);
        assert_eq!(exec(&ExecConfig::new(0), &f.mem, &s).unwrap(), f.mem);
        let out = run_program(&ExecConfig::new(0), &f.mem, &s, None).unwrap();
        assert!(out.fuel_exhausted());
        assert_eq!(out.memory, f.mem);
    }

    #[test]
    fn assignment_arithmetic() {
        let f = fixture(&[("x", Ty::Nat, None)]);
        let s = compile(&f, "x = 2 + 3;");
        let m = exec(&ExecConfig::new(4), &f.mem, &s).unwrap();
        assert_eq!(m.read_dir(label(&f, "x")).data, Data::Nat(Some(5)));
    }

    #[test]
    fn pledge_throw_case_reverts() {
        let f = pledge(0, false, false);
        let s = compile(&f, PLEDGE);
        let cfg = ExecConfig::new(16);
        let raw = exec(&cfg, &f.mem, &s).unwrap();
        let t = raw.layout().throw_label().unwrap();
        assert_eq!(raw.read_dir(t).data, Data::Bool(Some(true)));
        let out = run_program(&cfg, &f.mem, &s, None).unwrap();
        assert!(out.reverted);
        assert!(out.throw_raised());
        assert_eq!(out.memory, MemoryState::initial(Arc::clone(f.mem.layout())));
    }

    #[test]
    fn pledge_refund_case() {
        let f = pledge(1, false, false);
        let s = compile(&f, PLEDGE);
        let out = run_program(&ExecConfig::new(16), &f.mem, &s, None).unwrap();
        assert!(!out.reverted);
        assert_eq!(out.memory.read_dir(label(&f, "refnd")).data, Data::Bool(Some(true)));
        assert!(out.diagnostics.is_empty(), "{:?}", out.diagnostics);
    }

    #[test]
    fn breakpoint_after_first_statement() {
        let f = pledge(1, false, false);
        let s = compile(&f, PLEDGE);
        let out = run_program(&ExecConfig::new(16), &f.mem, &s, Some(1)).unwrap();
        let snap = out.breakpoint().unwrap();
        assert_eq!(snap.read_dir(label(&f, "refnd")).data, Data::Bool(Some(false)));
        assert_eq!(snap.read_dir(label(&f, "Pledge")).data, Data::Nat(Some(1)));
    }

    #[test]
    fn throw_alone() {
        let f = fixture(&[]);
        let s = compile(&f, "throw;");
        let out = run_program(&ExecConfig::new(4), &f.mem, &s, None).unwrap();
        assert_eq!(out.memory, MemoryState::initial(Arc::clone(f.mem.layout())));
        assert!(out.throw_raised());
    }

    #[test]
    fn throw_in_nested_block_halts_the_program() {
        let f = fixture(&[("x", Ty::Nat, Some(Lit::Nat(0))), ("b", Ty::Bool, Some(Lit::Bool(true)))]);
        let s = compile(&f, "if (b) { throw; x = 1; } x = 2;");
        let out = run_program(&ExecConfig::new(32), &f.mem, &s, None).unwrap();
        assert!(out.reverted);
        assert_eq!(out.memory, MemoryState::initial(Arc::clone(f.mem.layout())));
    }

    #[test]
    fn infinite_loop_exhausts_fuel_without_writes() {
        let f = fixture(&[("x", Ty::Nat, Some(Lit::Nat(0)))]);
        let s = compile(&f, "while (true) { skip; }");
        let out = run_program(&ExecConfig::new(8), &f.mem, &s, None).unwrap();
        assert!(out.fuel_exhausted());
        assert_eq!(out.memory, f.mem);
    }

    #[test]
    fn loop_counts_down() {
        let f = fixture(&[
            ("x", Ty::Nat, Some(Lit::Nat(3))),
            ("y", Ty::Nat, Some(Lit::Nat(0))),
            ("going", Ty::Bool, Some(Lit::Bool(true))),
        ]);
        let s = compile(&f, "while (going) { x = x - 1; y = y + 2; if (x == 0) { going = false; } }");
        let out = run_program(&ExecConfig::new(64), &f.mem, &s, None).unwrap();
        assert!(!out.fuel_exhausted());
        assert_eq!(out.memory.read_dir(label(&f, "x")).data, Data::Nat(Some(0)));
        assert_eq!(out.memory.read_dir(label(&f, "y")).data, Data::Nat(Some(6)));
    }

    #[test]
    fn undefined_condition_is_silent() {
        let f = fixture(&[("b", Ty::Bool, None), ("x", Ty::Nat, Some(Lit::Nat(0)))]);
        let s = compile(&f, "if (b) { x = 1; } else { x = 2; }");
        let out = run_program(&ExecConfig::new(8), &f.mem, &s, None).unwrap();
        assert_eq!(out.memory, f.mem);
        assert_eq!(out.diagnostics, vec![Event::SilentReadFailure { stmt: StmtId(0) }]);
    }

    #[test]
    fn denied_policy_blocks_reads_and_writes() {
        let f = fixture(&[("x", Ty::Nat, Some(Lit::Nat(0)))]);
        let s = compile(&f, "x = 5;");
        let mut cfg = ExecConfig::new(8);
        cfg.policy = Arc::new(|_: &Env, _: &Blc| false);
        let out = run_program(&cfg, &f.mem, &s, None).unwrap();
        assert_eq!(out.memory, f.mem);
        assert_eq!(out.diagnostics, vec![Event::WriteDenied { stmt: StmtId(0) }]);
    }

    #[test]
    fn layout_without_throw_flag_is_rejected() {
        let none: [(&str, &str); 0] = [];
        let layout = Arc::new(crate::mem::MemoryLayout::new(4, ["m_throw"], none).unwrap());
        let m = MemoryState::initial(layout);
        assert_eq!(exec(&ExecConfig::new(1), &m, &TypedStmt::Snil), Err(InterpError::NoThrowFlag));
    }
}
