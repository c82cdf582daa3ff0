//! Static shape of a memory space: slot count, special blocks, and the
//! label ↔ slot bijection.

use std::fmt;

use thiserror::Error;

/// Label bound to the throw-flag block by default.
pub const THROW_LABEL: &str = "_0xthrow";
/// Special block holding the throw flag.
pub const THROW_SPECIAL: &str = "m_throw";
/// Special block named after the memory initializer.
pub const INIT_SPECIAL: &str = "m_0xinit";

/// A user-visible memory index, bijective with the normal slots of a layout.
///
/// Obtained from [`MemoryLayout::nat_to_label`] or [`MemoryLayout::labels`];
/// the index is always below the layout's `normal_count`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelAddress(u32);

impl LabelAddress {
    pub fn index(self) -> u32 {
        self.0
    }

    /// Parses the `_0x` + 8 uppercase hex digit form.
    pub fn parse_rendered(text: &str) -> Option<u32> {
        let hex = text.strip_prefix("_0x")?;
        if hex.len() != 8 || !hex.bytes().all(|b| b.is_ascii_digit() || (b'A'..=b'F').contains(&b)) {
            return None;
        }
        u32::from_str_radix(hex, 16).ok()
    }
}

impl fmt::Display for LabelAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_0x{:08X}", self.0)
    }
}

/// Position of a slot in a memory state: specials first, then normals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SlotIndex(usize);

impl SlotIndex {
    pub fn position(self) -> usize {
        self.0
    }
}

/// Handle to a reserved label declared by a layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReservedLabel(u16);

/// Anything a label-addressed operation can target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Normal(LabelAddress),
    Reserved(ReservedLabel),
}

impl From<LabelAddress> for Label {
    fn from(a: LabelAddress) -> Self {
        Label::Normal(a)
    }
}

impl From<ReservedLabel> for Label {
    fn from(r: ReservedLabel) -> Self {
        Label::Reserved(r)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Reserved {
    label: String,
    special: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("normal block count must be at least 1")]
    NoNormalBlocks,
    #[error("`{0}` is not a well-formed identifier")]
    BadIdentifier(String),
    #[error("duplicate special block `{0}`")]
    DuplicateSpecial(String),
    #[error("special block `{0}` collides with a normal slot name")]
    SpecialShadowsNormal(String),
    #[error("duplicate reserved label `{0}`")]
    DuplicateReserved(String),
    #[error("reserved label `{0}` collides with a normal label")]
    ReservedShadowsNormal(String),
    #[error("reserved label `{label}` refers to unknown special block `{special}`")]
    UnknownSpecial { label: String, special: String },
    #[error("special block `{0}` is bound to more than one reserved label")]
    SpecialBoundTwice(String),
    #[error("too many reserved labels")]
    TooManyReserved,
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut bytes = name.bytes();
    match bytes.next() {
        Some(b) if b.is_ascii_alphabetic() || b == b'_' => {}
        _ => return false,
    }
    bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

fn normal_slot_name(index: u32) -> String {
    format!("m_0x{index:08X}")
}

/// The static description of a memory space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MemoryLayout {
    normal_count: u32,
    special_names: Vec<String>,
    reserved: Vec<Reserved>,
}

impl MemoryLayout {
    /// Builds a layout, checking distinctness of names and that every
    /// reserved label binds a declared special block.
    pub fn new<S, R, L>(normal_count: u32, special_names: S, reserved: R) -> Result<Self, LayoutError>
    where
        S: IntoIterator,
        S::Item: Into<String>,
        R: IntoIterator<Item = (L, L)>,
        L: Into<String>,
    {
        if normal_count == 0 {
            return Err(LayoutError::NoNormalBlocks);
        }
        let special_names: Vec<String> = special_names.into_iter().map(Into::into).collect();
        for (i, name) in special_names.iter().enumerate() {
            if !is_identifier(name) {
                return Err(LayoutError::BadIdentifier(name.clone()));
            }
            if special_names[..i].contains(name) {
                return Err(LayoutError::DuplicateSpecial(name.clone()));
            }
            if name
                .strip_prefix('m')
                .and_then(LabelAddress::parse_rendered)
                .is_some()
            {
                return Err(LayoutError::SpecialShadowsNormal(name.clone()));
            }
        }
        let mut bound: Vec<Reserved> = Vec::new();
        for (label, special) in reserved {
            let (label, special): (String, String) = (label.into(), special.into());
            if !is_identifier(&label) {
                return Err(LayoutError::BadIdentifier(label));
            }
            if LabelAddress::parse_rendered(&label).is_some() {
                return Err(LayoutError::ReservedShadowsNormal(label));
            }
            if bound.iter().any(|r| r.label == label) {
                return Err(LayoutError::DuplicateReserved(label));
            }
            let Some(pos) = special_names.iter().position(|s| *s == special) else {
                return Err(LayoutError::UnknownSpecial { label, special });
            };
            if bound.iter().any(|r| r.special == pos) {
                return Err(LayoutError::SpecialBoundTwice(special));
            }
            bound.push(Reserved { label, special: pos });
        }
        if bound.len() > u16::MAX as usize {
            return Err(LayoutError::TooManyReserved);
        }
        Ok(Self {
            normal_count,
            special_names,
            reserved: bound,
        })
    }

    pub fn normal_count(&self) -> u32 {
        self.normal_count
    }

    pub fn special_names(&self) -> &[String] {
        &self.special_names
    }

    /// Total number of slots (specials + normals).
    pub fn slot_count(&self) -> usize {
        self.special_names.len() + self.normal_count as usize
    }

    /// All labels in index order.
    pub fn labels(&self) -> impl DoubleEndedIterator<Item = LabelAddress> + ExactSizeIterator {
        (0..self.normal_count).map(LabelAddress)
    }

    /// All slots in layout order.
    pub fn slots(&self) -> impl DoubleEndedIterator<Item = SlotIndex> + ExactSizeIterator {
        (0..self.slot_count()).map(SlotIndex)
    }

    pub fn slot(&self, position: usize) -> Option<SlotIndex> {
        (position < self.slot_count()).then_some(SlotIndex(position))
    }

    pub fn special_slot(&self, name: &str) -> Option<SlotIndex> {
        self.special_names.iter().position(|s| s == name).map(SlotIndex)
    }

    /// `Map_L2m`: the normal slot bound to a label.
    pub fn label_to_slot(&self, a: LabelAddress) -> SlotIndex {
        debug_assert!(a.0 < self.normal_count);
        SlotIndex(self.special_names.len() + a.0 as usize)
    }

    /// `Map_m2L`: `None` for every special slot, reserved or not.
    pub fn slot_to_label(&self, s: SlotIndex) -> Option<LabelAddress> {
        let specials = self.special_names.len();
        (s.0 >= specials && s.0 < self.slot_count()).then(|| LabelAddress((s.0 - specials) as u32))
    }

    /// `Map_L2nat`.
    pub fn label_to_nat(&self, a: LabelAddress) -> u64 {
        u64::from(a.0)
    }

    /// `Map_nat2L`.
    pub fn nat_to_label(&self, n: u64) -> Option<LabelAddress> {
        (n < u64::from(self.normal_count)).then_some(LabelAddress(n as u32))
    }

    /// Slot targeted by a label-addressed operation.
    pub fn slot_of(&self, label: impl Into<Label>) -> SlotIndex {
        match label.into() {
            Label::Normal(a) => self.label_to_slot(a),
            Label::Reserved(r) => SlotIndex(self.reserved[r.0 as usize].special),
        }
    }

    pub fn reserved_label(&self, name: &str) -> Option<ReservedLabel> {
        self.reserved
            .iter()
            .position(|r| r.label == name)
            .map(|i| ReservedLabel(i as u16))
    }

    /// `(label name, special name)` pairs in declaration order.
    pub fn reserved_bindings(&self) -> impl Iterator<Item = (&str, &str)> {
        self.reserved
            .iter()
            .map(|r| (r.label.as_str(), self.special_names[r.special].as_str()))
    }

    /// Special slots reachable through a reserved label.
    pub fn reserved_slots(&self) -> impl Iterator<Item = SlotIndex> + '_ {
        self.reserved.iter().map(|r| SlotIndex(r.special))
    }

    pub fn throw_label(&self) -> Option<ReservedLabel> {
        self.reserved_label(THROW_LABEL)
    }

    /// Special slot with no reserved label bound to it.
    pub fn is_pure_special(&self, s: SlotIndex) -> bool {
        s.0 < self.special_names.len() && !self.reserved.iter().any(|r| r.special == s.0)
    }

    /// Resolves a normal label rendering or a reserved label name.
    pub fn parse_label(&self, text: &str) -> Option<Label> {
        if let Some(i) = LabelAddress::parse_rendered(text) {
            return self.nat_to_label(u64::from(i)).map(Label::Normal);
        }
        self.reserved_label(text).map(Label::Reserved)
    }

    pub fn label_name(&self, label: impl Into<Label>) -> String {
        match label.into() {
            Label::Normal(a) => a.to_string(),
            Label::Reserved(r) => self.reserved[r.0 as usize].label.clone(),
        }
    }

    /// Name of a slot as it appears in memory dumps: specials by name,
    /// normals as `m_0x` + 8 hex digits.
    pub fn slot_name(&self, s: SlotIndex) -> String {
        match self.slot_to_label(s) {
            Some(a) => normal_slot_name(a.0),
            None => self.special_names[s.0].clone(),
        }
    }

    /// `address_offset`: `Map_nat2L(f_off(Map_L2nat(a), offset))`.
    pub fn address_offset(&self, a: LabelAddress, f_off: impl Fn(u64, u64) -> u64, offset: u64) -> Option<LabelAddress> {
        self.nat_to_label(f_off(self.label_to_nat(a), offset))
    }
}
