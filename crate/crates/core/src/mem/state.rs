//! Memory states and the memory-management operations over them.
//!
//! A [`Memory`] is an immutable value: every write returns a new state and
//! leaves the input usable. Slot count is fixed by the layout.

use std::sync::Arc;

use super::layout::{Label, LabelAddress, MemoryLayout, SlotIndex};
use super::policy::{AllocCheck, InforCheck, InitOnly};
use super::value::{Blc, Env, SlotValue, Value};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Memory<V> {
    layout: Arc<MemoryLayout>,
    slots: Vec<V>,
}

/// A concrete memory state.
pub type MemoryState = Memory<Value>;

impl<V: SlotValue> Memory<V> {
    /// A state with every slot (specials included) holding `fill`.
    pub fn uniform(layout: Arc<MemoryLayout>, fill: V) -> Self {
        let slots = vec![fill; layout.slot_count()];
        Self { layout, slots }
    }

    /// `m_init`: every block holds `v_init`, reserved blocks hold their
    /// reserved default.
    pub fn initial(layout: Arc<MemoryLayout>) -> Self {
        Self::uniform(layout, V::v_init()).init_mem()
    }

    pub fn layout(&self) -> &Arc<MemoryLayout> {
        &self.layout
    }

    pub fn slots(&self) -> &[V] {
        &self.slots
    }

    /// Rebuilds a state from raw slots; `None` if the count does not match.
    pub fn from_slots(layout: Arc<MemoryLayout>, slots: Vec<V>) -> Option<Self> {
        (slots.len() == layout.slot_count()).then_some(Self { layout, slots })
    }

    /// Applies `f` to every slot, keeping the layout.
    pub fn map<W>(&self, f: impl FnMut(&V) -> W) -> Memory<W> {
        Memory {
            layout: Arc::clone(&self.layout),
            slots: self.slots.iter().map(f).collect(),
        }
    }

    pub fn read_low(&self, s: SlotIndex) -> &V {
        &self.slots[s.position()]
    }

    pub fn read_dir(&self, label: impl Into<Label>) -> &V {
        self.read_low(self.layout.slot_of(label))
    }

    /// `None` when the policy denies access.
    pub fn read_chck(&self, policy: &dyn InforCheck, env: &Env, blc: &Blc, label: impl Into<Label>) -> Option<&V> {
        policy.permits(env, blc).then(|| self.read_dir(label))
    }

    pub fn write_low(&self, s: SlotIndex, v: V) -> Self {
        let mut slots = self.slots.clone();
        slots[s.position()] = v;
        Self {
            layout: Arc::clone(&self.layout),
            slots,
        }
    }

    pub fn write_dir(&self, label: impl Into<Label>, v: V) -> Self {
        self.write_low(self.layout.slot_of(label), v)
    }

    /// Returns `(false, unchanged)` when the policy denies the write.
    pub fn write_chck(&self, policy: &dyn InforCheck, env: &Env, blc: &Blc, label: impl Into<Label>, v: V) -> (bool, Self) {
        if policy.permits(env, blc) {
            (true, self.write_dir(label, v))
        } else {
            (false, self.clone())
        }
    }

    /// `address_srch`: first label at or after `start` whose stored value
    /// satisfies `filter`.
    pub fn address_srch(&self, start: LabelAddress, filter: impl FnMut(&V) -> bool) -> Option<LabelAddress> {
        self.address_srch_probes(start, filter).0
    }

    /// Like [`Memory::address_srch`], also reporting the number of blocks
    /// probed.
    pub fn address_srch_probes(&self, start: LabelAddress, mut filter: impl FnMut(&V) -> bool) -> (Option<LabelAddress>, usize) {
        let mut current = start;
        let mut probes = 0;
        loop {
            probes += 1;
            if filter(self.read_dir(current)) {
                return (Some(current), probes);
            }
            match self.layout.address_offset(current, |a, b| a + b, 1) {
                Some(next) => current = next,
                None => return (None, probes),
            }
        }
    }

    /// First block at or after `start` still holding `v_init`.
    pub fn empty_srch(&self, start: LabelAddress) -> Option<LabelAddress> {
        let init = V::v_init();
        self.address_srch(start, |v| *v == init)
    }

    /// Finds a block for allocation under the default check. Memory is not
    /// modified; the caller writes the block afterwards.
    pub fn allocate(&self, start: LabelAddress) -> Option<LabelAddress> {
        self.allocate_with(&InitOnly, start)
    }

    pub fn allocate_with(&self, check: &dyn AllocCheck<V>, start: LabelAddress) -> Option<LabelAddress> {
        self.address_srch(start, |v| check.allocatable(v))
    }

    pub fn free_mem(&self, label: impl Into<Label>) -> Self {
        self.write_dir(label, V::v_init())
    }

    pub fn set_all(&self, v: V) -> Self {
        Self::uniform(Arc::clone(&self.layout), v)
    }

    pub fn init_mem(&self) -> Self {
        let mut m = self.set_all(V::v_init());
        for s in self.layout.reserved_slots() {
            m.slots[s.position()] = V::reserved_default();
        }
        m
    }
}
