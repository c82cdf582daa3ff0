//! Shared law checkers, corpus loaders, and oracles for the integration
//! suites. Every checker returns `Err(description)` on the first violation
//! so callers can either assert or report.

#![allow(dead_code)]

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::PathBuf;
use std::sync::Arc;

use germ_core::evi::{concretize, load_spec, Binding, SymKind, Verifier};
use germ_core::interp::{run_program, ExecConfig};
use germ_core::ipl::Lit;
use germ_core::layout_gen::{generate_layout, Requirements};
use germ_core::mem::{
    value_dec, Access, AllowAll, Blc, Data, Env, InforCheck, Label, LabelAddress, LexDomain, LexScope, MemoryLayout,
    MemoryState, Occupation, PublicOnly, Value,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn layout(normal_count: u32) -> Arc<MemoryLayout> {
    Arc::new(generate_layout(&Requirements::new(normal_count)).expect("default layout"))
}

pub fn state_hash(m: &MemoryState) -> u64 {
    let mut h = DefaultHasher::new();
    m.hash(&mut h);
    h.finish()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------------------
// Value generation

pub fn env_strategy() -> impl Strategy<Value = Env> {
    (any::<bool>(), any::<bool>()).prop_map(|(s, d)| Env {
        scope: if s { LexScope::Local } else { LexScope::Load },
        domain: if d { LexDomain::Block } else { LexDomain::Global },
    })
}

pub fn blc_strategy() -> impl Strategy<Value = Blc> {
    (any::<bool>(), any::<bool>()).prop_map(|(a, o)| Blc {
        access: if a { Access::Private } else { Access::Public },
        occupation: if o { Occupation::Occupied } else { Occupation::Vacant },
    })
}

pub fn data_strategy() -> impl Strategy<Value = Data> {
    prop_oneof![
        Just(Data::Undef),
        proptest::option::of(0u64..8).prop_map(Data::Nat),
        proptest::option::of(any::<bool>()).prop_map(Data::Bool),
        proptest::option::of(proptest::sample::select(vec!["", "a", "bc"])).prop_map(|s| Data::Str(s.map(str::to_owned))),
    ]
}

/// Small value space so that collisions (and hence equalities) are common.
pub fn value_strategy() -> impl Strategy<Value = Value> {
    prop_oneof![
        1 => Just(Value::init()),
        4 => (data_strategy(), env_strategy(), blc_strategy()).prop_map(|(d, e, b)| Value::new(d, e, b)),
    ]
}

pub fn memory_strategy(layout: Arc<MemoryLayout>) -> impl Strategy<Value = MemoryState> {
    proptest::collection::vec(value_strategy(), layout.slot_count())
        .prop_map(move |slots| MemoryState::from_slots(Arc::clone(&layout), slots).unwrap())
}

/// A few hand-picked values covering every field difference.
pub fn sample_values() -> Vec<Value> {
    let env = Env::default();
    let local = Env {
        scope: LexScope::Local,
        domain: LexDomain::Block,
    };
    let private = Blc {
        access: Access::Private,
        occupation: Occupation::Occupied,
    };
    vec![
        Value::init(),
        Value::nat(0, env, Blc::PUBLIC_OCCUPIED),
        Value::nat(7, env, Blc::PUBLIC_VACANT),
        Value::boolean(true, local, private),
        Value::new(Data::Str(Some("s".into())), env, Blc::PUBLIC_OCCUPIED),
    ]
}

/// Memory whose every slot holds a distinct value, so frame violations
/// cannot hide behind equal neighbours.
pub fn distinct_memory(layout: &Arc<MemoryLayout>) -> MemoryState {
    let slots = (0..layout.slot_count())
        .map(|i| Value::nat(1000 + i as u64, Env::default(), Blc::PUBLIC_OCCUPIED))
        .collect();
    MemoryState::from_slots(Arc::clone(layout), slots).unwrap()
}

// ---------------------------------------------------------------------------
// Memory laws

/// Label/slot and label/nat round trips, plus the shape of the bijection.
pub fn inversion(layout: &MemoryLayout) -> Result<(), String> {
    let labels: Vec<_> = layout.labels().collect();
    ensure(labels.len() == layout.normal_count() as usize, || "label count".into())?;
    for a in labels {
        let s = layout.label_to_slot(a);
        ensure(layout.slot_to_label(s) == Some(a), || format!("slot round trip for {a}"))?;
        let n = layout.label_to_nat(a);
        ensure(layout.nat_to_label(n) == Some(a), || format!("nat round trip for {a}"))?;
        ensure(n == u64::from(a.index()), || format!("index of {a}"))?;
    }
    for s in layout.slots() {
        if let Some(a) = layout.slot_to_label(s) {
            ensure(layout.label_to_slot(a) == s, || format!("slot {} round trip", s.position()))?;
        } else {
            ensure(s.position() < layout.special_names().len(), || {
                format!("normal slot {} has no label", s.position())
            })?;
        }
    }
    ensure(layout.nat_to_label(u64::from(layout.normal_count())).is_none(), || {
        "nat past the end maps to a label".into()
    })
}

/// Read, update and frame laws for one `(target, observer)` pair and value.
pub fn read_write(m: &MemoryState, a: LabelAddress, other: LabelAddress, v: &Value) -> Result<(), String> {
    let layout = m.layout();
    let before = state_hash(m);
    ensure(m.read_dir(a) == m.read_low(layout.label_to_slot(a)), || format!("read law at {a}"))?;

    let w = m.write_dir(a, v.clone());
    ensure(value_dec(w.read_dir(a), v), || format!("update law at {a}"))?;
    if other != a {
        ensure(value_dec(w.read_dir(other), m.read_dir(other)), || {
            format!("frame law: write {a} disturbed {other}")
        })?;
    }
    for s in layout.slots() {
        if s != layout.label_to_slot(a) {
            ensure(w.read_low(s) == m.read_low(s), || format!("write {a} disturbed slot {}", s.position()))?;
        }
    }
    let s = layout.label_to_slot(a);
    ensure(m.write_low(s, v.clone()) == w, || format!("write_dir/write_low disagree at {a}"))?;
    ensure(m.write_low(s, m.read_low(s).clone()) == *m, || format!("rewrite identity at {a}"))?;

    let freed = m.free_mem(a);
    ensure(freed == m.write_dir(a, Value::init()), || format!("free_mem law at {a}"))?;
    ensure(freed.free_mem(a) == freed, || format!("free_mem idempotence at {a}"))?;

    ensure(state_hash(m) == before, || "input state mutated".into())
}

/// Check-gating: denied access leaves memory alone and reports it.
pub fn gating(m: &MemoryState, a: LabelAddress, v: &Value) -> Result<(), String> {
    let before = state_hash(m);
    let deny = |_: &Env, _: &Blc| false;
    let policies: [(&dyn InforCheck, &str); 3] = [(&PublicOnly, "public-only"), (&AllowAll, "allow-all"), (&deny, "deny")];
    for (policy, name) in policies {
        for blc in [Blc::PUBLIC_VACANT, Blc::PUBLIC_OCCUPIED, Blc { access: Access::Private, occupation: Occupation::Occupied }] {
            let env = Env::default();
            let permitted = policy.permits(&env, &blc);
            let read = m.read_chck(policy, &env, &blc, a);
            ensure(read.is_none() == !permitted, || format!("{name}: read_chck gating at {a}"))?;
            if let Some(r) = read {
                ensure(r == m.read_dir(a), || format!("{name}: read_chck value at {a}"))?;
            }
            let (ok, w) = m.write_chck(policy, &env, &blc, a, v.clone());
            ensure(ok == permitted, || format!("{name}: write_chck flag at {a}"))?;
            let expected = if permitted { m.write_dir(a, v.clone()) } else { m.clone() };
            ensure(w == expected, || format!("{name}: write_chck result at {a}"))?;
        }
    }
    ensure(state_hash(m) == before, || "gating mutated input".into())
}

pub fn offset(layout: &MemoryLayout, a: LabelAddress, off: u64) -> Result<(), String> {
    let plus = |x: u64, y: u64| x + y;
    let minus = |x: u64, y: u64| x.saturating_sub(y);
    let composed = |f: &dyn Fn(u64, u64) -> u64| layout.nat_to_label(f(layout.label_to_nat(a), off));
    ensure(layout.address_offset(a, plus, off) == composed(&plus), || format!("offset {a} + {off}"))?;
    ensure(layout.address_offset(a, minus, off) == composed(&minus), || format!("offset {a} - {off}"))
}

/// Search against a linear-scan oracle, with the probe bound.
pub fn search(m: &MemoryState, start: LabelAddress, accept: &dyn Fn(&Value) -> bool) -> Result<(), String> {
    let layout = m.layout();
    let oracle = layout
        .labels()
        .skip(start.index() as usize)
        .find(|a| accept(m.read_dir(*a)));
    let (found, probes) = m.address_srch_probes(start, |v| accept(v));
    ensure(found == oracle, || format!("search from {start}: got {found:?}, oracle {oracle:?}"))?;
    ensure(probes <= layout.normal_count() as usize + 1, || format!("search from {start} took {probes} probes"))?;
    ensure(m.address_srch(start, |_| true) == Some(start), || "constant-true search".into())?;
    ensure(m.address_srch(start, |_| false).is_none(), || "constant-false search".into())?;
    let empty_oracle = layout.labels().skip(start.index() as usize).find(|a| *m.read_dir(*a) == Value::init());
    ensure(m.empty_srch(start) == empty_oracle, || format!("empty_srch from {start}"))?;
    ensure(m.allocate(start) == empty_oracle, || format!("allocate from {start}"))
}

pub fn initialization(m: &MemoryState, v: &Value) -> Result<(), String> {
    let layout = m.layout();
    let all = m.set_all(v.clone());
    ensure(all.slots().iter().all(|x| x == v), || "set_all".into())?;
    let init = m.init_mem();
    let reserved: Vec<_> = layout.reserved_slots().collect();
    for s in layout.slots() {
        if reserved.contains(&s) {
            ensure(*init.read_low(s) == Value::new(Data::Bool(Some(false)), Env::default(), Blc::PUBLIC_VACANT), || {
                "reserved default".into()
            })?;
        } else {
            ensure(*init.read_low(s) == Value::init(), || format!("init_mem slot {}", s.position()))?;
        }
    }
    ensure(init.init_mem() == init, || "init_mem idempotence".into())?;
    ensure(init == MemoryState::initial(Arc::clone(layout)), || "init_mem vs m_init".into())
}

pub fn value_equivalence(a: &Value, b: &Value, c: &Value) -> Result<(), String> {
    ensure(value_dec(a, a), || "reflexivity".into())?;
    ensure(value_dec(a, b) == value_dec(b, a), || "symmetry".into())?;
    ensure(!(value_dec(a, b) && value_dec(b, c)) || value_dec(a, c), || "transitivity".into())?;
    ensure(value_dec(a, b) == (a == b), || "agreement with structural equality".into())
}

/// Every law, exhaustively over all labels and label pairs of `layout`.
/// Returns the number of individual checks performed.
pub fn exhaustive_laws(layout: &Arc<MemoryLayout>) -> Result<usize, String> {
    inversion(layout)?;
    let mut checks = 1;
    let states = [MemoryState::initial(Arc::clone(layout)), distinct_memory(layout)];
    let values = sample_values();
    let labels: Vec<_> = layout.labels().collect();
    for m in &states {
        for &a in &labels {
            for &b in &labels {
                read_write(m, a, b, &values[(a.index() + b.index()) as usize % values.len()])?;
                checks += 1;
            }
            for v in &values {
                gating(m, a, v)?;
                initialization(m, v)?;
                checks += 2;
            }
            for off in 0..=u64::from(layout.normal_count()) + 1 {
                offset(layout, a, off)?;
                checks += 1;
            }
        }
    }
    // Search over every single-match and prefix-filled memory.
    for &target in &labels {
        let m = MemoryState::initial(Arc::clone(layout))
            .write_dir(target, Value::nat(7, Env::default(), Blc::PUBLIC_OCCUPIED));
        let is_seven = |v: &Value| v.data == Data::Nat(Some(7));
        for &start in &labels {
            search(&m, start, &is_seven)?;
            checks += 1;
        }
    }
    for a in &values {
        for b in &values {
            for c in &values {
                value_equivalence(a, b, c)?;
                checks += 1;
            }
        }
    }
    Ok(checks)
}

fn deterministic_runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn lift_err(r: Result<(), String>) -> Result<(), TestCaseError> {
    r.map_err(TestCaseError::fail)
}

/// `cases` randomized law instances over `layout`, with a fixed seed.
pub fn randomized_laws(layout: &Arc<MemoryLayout>, cases: u32) -> Result<(), String> {
    let n = layout.normal_count();
    let strategy = (
        memory_strategy(Arc::clone(layout)),
        0..n,
        0..n,
        value_strategy(),
        value_strategy(),
        0..u64::from(n) + 2,
    );
    let l = Arc::clone(layout);
    deterministic_runner(cases)
        .run(&strategy, move |(m, i, j, v, w, off)| {
            let a = l.nat_to_label(u64::from(i)).unwrap();
            let b = l.nat_to_label(u64::from(j)).unwrap();
            lift_err(read_write(&m, a, b, &v))?;
            lift_err(gating(&m, a, &v))?;
            lift_err(offset(&l, a, off))?;
            let probe = w.clone();
            lift_err(search(&m, b, &move |x: &Value| *x == probe))?;
            lift_err(value_equivalence(&v, &w, m.read_dir(a)))?;
            lift_err(initialization(&m, &w))
        })
        .map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// Isolation

#[derive(Clone, Debug)]
pub enum Op {
    Read(u32),
    Write(u32, Value),
    WriteChecked(u32, Value, bool),
    Free(u32),
    /// Allocate from a start label and, if found, fill the block.
    Allocate(u32, Value),
    EmptySearch(u32),
    /// Label-addressed write through the reserved throw label.
    WriteThrow(Value),
}

pub fn op_strategy(normal_count: u32) -> impl Strategy<Value = Op> {
    let a = 0..normal_count;
    prop_oneof![
        a.clone().prop_map(Op::Read),
        (a.clone(), value_strategy()).prop_map(|(a, v)| Op::Write(a, v)),
        (a.clone(), value_strategy(), any::<bool>()).prop_map(|(a, v, p)| Op::WriteChecked(a, v, p)),
        a.clone().prop_map(Op::Free),
        (a.clone(), value_strategy()).prop_map(|(a, v)| Op::Allocate(a, v)),
        a.prop_map(Op::EmptySearch),
        value_strategy().prop_map(Op::WriteThrow),
    ]
}

pub fn apply_op(m: MemoryState, op: &Op) -> MemoryState {
    let layout = Arc::clone(m.layout());
    let label = |i: u32| layout.nat_to_label(u64::from(i)).unwrap();
    match op {
        Op::Read(i) => {
            let _ = m.read_dir(label(*i));
            m
        }
        Op::Write(i, v) => m.write_dir(label(*i), v.clone()),
        Op::WriteChecked(i, v, private) => {
            let blc = if *private {
                Blc {
                    access: Access::Private,
                    occupation: Occupation::Occupied,
                }
            } else {
                Blc::PUBLIC_OCCUPIED
            };
            m.write_chck(&PublicOnly, &Env::default(), &blc, label(*i), v.clone()).1
        }
        Op::Free(i) => m.free_mem(label(*i)),
        Op::Allocate(i, v) => match m.allocate(label(*i)) {
            Some(a) => m.write_dir(a, v.clone()),
            None => m,
        },
        Op::EmptySearch(i) => {
            let _ = m.empty_srch(label(*i));
            m
        }
        Op::WriteThrow(v) => match layout.throw_label() {
            Some(t) => m.write_dir(Label::Reserved(t), v.clone()),
            None => m,
        },
    }
}

/// Runs `runs` random sequences of `len` operations and checks that no
/// pure special slot ever changes.
pub fn isolation(layout: &Arc<MemoryLayout>, runs: u32, len: usize) -> Result<(), String> {
    let strategy = (
        memory_strategy(Arc::clone(layout)),
        proptest::collection::vec(op_strategy(layout.normal_count()), len),
    );
    let l = Arc::clone(layout);
    deterministic_runner(runs)
        .run(&strategy, move |(m0, ops)| {
            let pure: Vec<_> = l.slots().filter(|s| l.is_pure_special(*s)).collect();
            prop_assert!(!pure.is_empty());
            let mut m = m0.clone();
            for (step, op) in ops.iter().enumerate() {
                m = apply_op(m, op);
                for s in &pure {
                    prop_assert!(
                        value_dec(m.read_low(*s), m0.read_low(*s)),
                        "step {step} ({op:?}) changed special slot {}",
                        s.position()
                    );
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// Capacity

/// For every occupancy pattern of the normal blocks (all `2^n`) and every
/// start label, `allocate` is `None` exactly when every block at or after
/// the start is occupied. Returns the number of patterns checked.
pub fn capacity_exhaustive(layout: &Arc<MemoryLayout>) -> Result<usize, String> {
    let n = layout.normal_count();
    assert!(n <= 20, "exhaustive capacity check needs a small layout");
    let labels: Vec<_> = layout.labels().collect();
    let filled = Value::nat(1, Env::default(), Blc::PUBLIC_OCCUPIED);
    let base = MemoryState::initial(Arc::clone(layout));
    for mask in 0u32..(1 << n) {
        let mut m = base.clone();
        for (i, a) in labels.iter().enumerate() {
            if mask & (1 << i) != 0 {
                m = m.write_dir(*a, filled.clone());
            }
        }
        for (i, start) in labels.iter().enumerate() {
            let free_after = (i..n as usize).find(|j| mask & (1 << j) == 0);
            let got = m.allocate(*start);
            ensure(got.map(|a| a.index() as usize) == free_after, || {
                format!("mask {mask:#x} start {start}: allocate {got:?}, expected {free_after:?}")
            })?;
        }
        let full = mask == (1u32 << n) - 1;
        ensure(m.allocate(labels[0]).is_none() == full, || format!("mask {mask:#x}: full = {full}"))?;
    }
    Ok(1 << n)
}

// ---------------------------------------------------------------------------
// Corpus

pub fn well_typed_programs() -> Vec<(String, String)> {
    read_dir_sorted(corpus_dir().join("programs"))
}

/// `(file, expected error class, source)`, class from the `// expect:` line.
pub fn ill_typed_programs() -> Vec<(String, String, String)> {
    read_dir_sorted(corpus_dir().join("ill_typed"))
        .into_iter()
        .map(|(name, src)| {
            let expect = src
                .lines()
                .next()
                .and_then(|l| l.strip_prefix("// expect:"))
                .map(|s| s.trim().to_owned())
                .unwrap_or_else(|| panic!("{name}: missing expect line"));
            (name, expect, src)
        })
        .collect()
}

fn read_dir_sorted(dir: PathBuf) -> Vec<(String, String)> {
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "ipl"))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

/// The shared corpus spec with its program replaced by `src`.
pub fn corpus_verifier(src: &str) -> Verifier {
    let base = load_spec(&corpus_dir().join("programs/common.spec")).expect("common spec");
    Verifier::new(base.spec, base.layout, src).expect("corpus program compiles")
}

pub fn pledge_verifier(spec: &str) -> Verifier {
    load_spec(&corpus_dir().join("pledge").join(spec)).expect("pledge spec")
}

/// Every binding of the verifier's symbols over `{0, 1}` / `{false, true}`.
pub fn small_bindings(v: &Verifier) -> Vec<Binding> {
    let mut out = vec![Binding::new()];
    for (id, info) in v.symbols.iter() {
        let choices = match info.kind {
            SymKind::Nat => vec![Lit::Nat(0), Lit::Nat(1)],
            SymKind::Bool => vec![Lit::Bool(false), Lit::Bool(true)],
        };
        out = out
            .into_iter()
            .flat_map(|b| {
                choices.iter().map(move |c| {
                    let mut b = b.clone();
                    b.insert(id, *c);
                    b
                })
            })
            .collect();
    }
    out
}

pub fn concrete_start(v: &Verifier, b: &Binding) -> MemoryState {
    concretize(&v.pre, b).expect("precondition concretizes under a full binding")
}

/// Differential law: every binding satisfies exactly one decided path, and
/// that path's memory and revert flag match the concrete run. Returns the
/// number of bindings checked.
pub fn differential(v: &Verifier, cfg: &ExecConfig) -> Result<usize, String> {
    let paths = germ_core::evi::sym_exec(cfg, &v.pre, &v.program).map_err(|e| e.to_string())?;
    let bindings = small_bindings(v);
    for b in &bindings {
        let hits: Vec<_> = paths.iter().filter(|p| p.condition.satisfied_by(b)).collect();
        ensure(hits.len() == 1, || format!("binding {b:?} matches {} paths", hits.len()))?;
        let path = hits[0];
        ensure(path.undecided.is_none(), || format!("binding {b:?} hits an undecided path"))?;
        let concrete = run_program(cfg, &concrete_start(v, b), &v.program, None).map_err(|e| e.to_string())?;
        let symbolic = concretize(&path.memory, b).ok_or_else(|| format!("path memory under {b:?} not concrete"))?;
        ensure(symbolic == concrete.memory, || format!("memory mismatch under {b:?}"))?;
        ensure(path.reverted == concrete.reverted, || format!("revert mismatch under {b:?}"))?;
        ensure(path.diagnostics == concrete.diagnostics, || format!("diagnostics mismatch under {b:?}"))?;
    }
    Ok(bindings.len())
}

/// Fuel 0 is the identity, and once a run terminates more fuel changes
/// nothing.
pub fn fuel_semantics(v: &Verifier) -> Result<(), String> {
    use germ_core::interp::exec;
    for b in small_bindings(v) {
        let m = concrete_start(v, &b);
        let zero = exec(&v.cfg.with_fuel(0), &m, &v.program).map_err(|e| e.to_string())?;
        ensure(zero == m, || format!("fuel 0 changed memory under {b:?}"))?;
        let terminating = (1..=64).find_map(|k| {
            let out = run_program(&v.cfg.with_fuel(k), &m, &v.program, None).ok()?;
            (!out.fuel_exhausted()).then_some((k, out))
        });
        if let Some((k, out)) = terminating {
            for extra in [k + 1, k + 2, k + 7, k + 64] {
                let more = run_program(&v.cfg.with_fuel(extra), &m, &v.program, None).map_err(|e| e.to_string())?;
                ensure(more == out, || format!("fuel {extra} differs from {k} under {b:?}"))?;
            }
        }
    }
    Ok(())
}

/// Any run that raises ends in exactly `m_init`. Returns how many raised.
pub fn revert_law(v: &Verifier) -> Result<usize, String> {
    let mut raised = 0;
    let fresh = MemoryState::initial(Arc::clone(&v.layout));
    for b in small_bindings(v) {
        let out = run_program(&v.cfg, &concrete_start(v, &b), &v.program, None).map_err(|e| e.to_string())?;
        if out.throw_raised() {
            raised += 1;
            ensure(out.reverted, || format!("throw without revert under {b:?}"))?;
            let same = out.memory.slots().iter().zip(fresh.slots()).all(|(x, y)| value_dec(x, y));
            ensure(same, || format!("reverted memory is not m_init under {b:?}"))?;
        }
    }
    Ok(raised)
}
