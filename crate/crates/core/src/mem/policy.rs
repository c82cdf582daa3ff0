//! Injected access and allocation checks.

use super::value::{Access, Blc, Env, SlotValue};

/// `infor_check`: decides whether a block may be read or modified under the
/// caller's environment and block information.
pub trait InforCheck {
    fn permits(&self, env: &Env, blc: &Blc) -> bool;
}

/// Default policy: public blocks only.
#[derive(Clone, Copy, Debug, Default)]
pub struct PublicOnly;

impl InforCheck for PublicOnly {
    fn permits(&self, _env: &Env, blc: &Blc) -> bool {
        blc.access == Access::Public
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct AllowAll;

impl InforCheck for AllowAll {
    fn permits(&self, _env: &Env, _blc: &Blc) -> bool {
        true
    }
}

impl<F: Fn(&Env, &Blc) -> bool> InforCheck for F {
    fn permits(&self, env: &Env, blc: &Blc) -> bool {
        self(env, blc)
    }
}

/// `alloc_chck`: decides whether a block holding `v` can be handed out.
pub trait AllocCheck<V> {
    fn allocatable(&self, v: &V) -> bool;
}

/// Default allocation check: the block still holds `v_init`.
#[derive(Clone, Copy, Debug, Default)]
pub struct InitOnly;

impl<V: SlotValue> AllocCheck<V> for InitOnly {
    fn allocatable(&self, v: &V) -> bool {
        *v == V::v_init()
    }
}

impl<V, F: Fn(&V) -> bool> AllocCheck<V> for F {
    fn allocatable(&self, v: &V) -> bool {
        self(v)
    }
}
