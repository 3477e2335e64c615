//! The weight-truncated Weyl-bundle algebra of a chart.
//!
//! An element is a finite sum of terms `ℏ^r · c(x) · w^a w̄^b ⊗ dz^P ∧ dz̄^Q`
//! with `c` a chart rational function, `a, b` fiber multi-degrees and `P, Q`
//! strictly increasing form index sets (stored as bitmasks, the sign of any
//! reordering being tracked explicitly). The Fedosov weight of a term is
//! `2r + |a| + |b|`; every operation discards weight above the element's cap.
//!
//! Real and holomorphic chart modes use only the unbarred slots; the Kähler
//! mode uses both groups. Elements are immutable values.

mod ops;
mod product;

pub use ops::{ConnectionView, Part};
pub use product::{commutator, commutator_div_hbar, fiber_product, HbarUse, KernelKind, ProductKernel};

use crate::gauss::Gauss;
use crate::ratfun::Rat;
use crate::{VarKind, VarSpec};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Key of a single Weyl term: ℏ-power, fiber multi-degrees, form index sets.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TermKey {
    pub h: u16,
    pub fw: Vec<u16>,
    pub fwb: Vec<u16>,
    pub dz: u16,
    pub dzb: u16,
}

impl TermKey {
    pub fn scalar(vars: &VarSpec) -> Self {
        let (nw, nb) = fiber_slots(vars);
        TermKey {
            h: 0,
            fw: vec![0; nw],
            fwb: vec![0; nb],
            dz: 0,
            dzb: 0,
        }
    }

    pub fn fiber_degree(&self) -> u32 {
        self.fw.iter().map(|&e| e as u32).sum::<u32>()
            + self.fwb.iter().map(|&e| e as u32).sum::<u32>()
    }

    pub fn weight(&self) -> u32 {
        2 * self.h as u32 + self.fiber_degree()
    }

    pub fn form_degree(&self) -> u32 {
        (self.dz.count_ones() + self.dzb.count_ones()) as u32
    }

    fn order_tuple(&self) -> (u32, u16, u32, &Vec<u16>, u32, &Vec<u16>, u16, u16) {
        (
            self.weight(),
            self.h,
            self.fw.iter().map(|&e| e as u32).sum::<u32>(),
            &self.fw,
            self.fwb.iter().map(|&e| e as u32).sum::<u32>(),
            &self.fwb,
            self.dz,
            self.dzb,
        )
    }
}

impl PartialOrd for TermKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TermKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_tuple().cmp(&other.order_tuple())
    }
}

/// Number of (unbarred, barred) fiber slots for a variable layout.
pub fn fiber_slots(vars: &VarSpec) -> (usize, usize) {
    match vars.kind {
        VarKind::Kahler => (vars.n, vars.n),
        _ => (vars.n, 0),
    }
}

/// A fiber slot: unbarred (`w`) or barred (`w̄`).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Slot {
    W(usize),
    Wb(usize),
}

/// Sign of inserting index `idx` in front of the sorted set `mask` and
/// re-sorting; `None` if the index is already present.
pub(crate) fn insert_index(mask: u16, idx: usize) -> Option<(u16, bool)> {
    let bit = 1u16 << idx;
    if mask & bit != 0 {
        return None;
    }
    let below = (mask & (bit - 1)).count_ones();
    Some((mask | bit, below % 2 == 1))
}

/// Interior product: removes `idx` from the sorted set `mask`, with sign
/// `(-1)^position`; `None` if absent.
pub(crate) fn remove_index(mask: u16, idx: usize) -> Option<(u16, bool)> {
    let bit = 1u16 << idx;
    if mask & bit == 0 {
        return None;
    }
    let pos = (mask & (bit - 1)).count_ones();
    Some((mask & !bit, pos % 2 == 1))
}

/// Parity of the number of pairs `(x, y)` with `x ∈ a`, `y ∈ b`, `x > y`.
fn merge_parity(a: u16, b: u16) -> bool {
    let mut parity = false;
    let mut rest = b;
    while rest != 0 {
        let y = rest.trailing_zeros();
        let above = a & !(((1u32 << (y + 1)) - 1) as u16);
        if above.count_ones() % 2 == 1 {
            parity = !parity;
        }
        rest &= rest - 1;
    }
    parity
}

/// Wedge two stored forms `(dz1, dzb1) ∧ (dz2, dzb2)`; `None` on overlap.
pub fn wedge_forms(
    dz1: u16,
    dzb1: u16,
    dz2: u16,
    dzb2: u16,
) -> Option<(u16, u16, bool)> {
    if dz1 & dz2 != 0 || dzb1 & dzb2 != 0 {
        return None;
    }
    let mut parity = (dzb1.count_ones() * dz2.count_ones()) % 2 == 1;
    if merge_parity(dz1, dz2) {
        parity = !parity;
    }
    if merge_parity(dzb1, dzb2) {
        parity = !parity;
    }
    Some((dz1 | dz2, dzb1 | dzb2, parity))
}

/// A weight-truncated element of the Weyl algebra of a chart.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeylElement {
    pub vars: VarSpec,
    pub cap: u32,
    pub terms: BTreeMap<TermKey, Rat>,
}

impl WeylElement {
    pub fn zero(vars: VarSpec, cap: u32) -> Self {
        WeylElement {
            vars,
            cap,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(vars: VarSpec, cap: u32, c: Rat) -> Self {
        let mut el = WeylElement::zero(vars, cap);
        el.add_term(TermKey::scalar(&vars), c);
        el
    }

    pub fn one(vars: VarSpec, cap: u32) -> Self {
        WeylElement::scalar(vars, cap, Rat::one(vars.nvars()))
    }

    /// The fiber generator `w^idx` (unbarred group).
    pub fn fiber_w(vars: VarSpec, cap: u32, idx: usize) -> Self {
        let mut key = TermKey::scalar(&vars);
        key.fw[idx] = 1;
        let mut el = WeylElement::zero(vars, cap);
        el.add_term(key, Rat::one(vars.nvars()));
        el
    }

    /// The fiber generator `w̄^idx` (Kähler mode only).
    pub fn fiber_wb(vars: VarSpec, cap: u32, idx: usize) -> Self {
        assert_eq!(vars.kind, VarKind::Kahler);
        let mut key = TermKey::scalar(&vars);
        key.fwb[idx] = 1;
        let mut el = WeylElement::zero(vars, cap);
        el.add_term(key, Rat::one(vars.nvars()));
        el
    }

    /// The 1-form generator `dz^idx` (or `dx`, `du` in the other modes).
    pub fn form_dz(vars: VarSpec, cap: u32, idx: usize) -> Self {
        let mut key = TermKey::scalar(&vars);
        key.dz = 1 << idx;
        let mut el = WeylElement::zero(vars, cap);
        el.add_term(key, Rat::one(vars.nvars()));
        el
    }

    pub fn form_dzb(vars: VarSpec, cap: u32, idx: usize) -> Self {
        assert_eq!(vars.kind, VarKind::Kahler);
        let mut key = TermKey::scalar(&vars);
        key.dzb = 1 << idx;
        let mut el = WeylElement::zero(vars, cap);
        el.add_term(key, Rat::one(vars.nvars()));
        el
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: TermKey, c: Rat) {
        if c.is_zero() || key.weight() > self.cap {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = &*e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &WeylElement) -> WeylElement {
        assert_eq!(self.vars, other.vars, "chart mode mismatch");
        let mut out = self.clone();
        out.cap = self.cap.min(other.cap);
        out.retain_cap();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &WeylElement) -> WeylElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> WeylElement {
        WeylElement {
            vars: self.vars,
            cap: self.cap,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> WeylElement {
        if c.is_zero() {
            return WeylElement::zero(self.vars, self.cap);
        }
        WeylElement {
            vars: self.vars,
            cap: self.cap,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn scale_gauss(&self, c: &Gauss) -> WeylElement {
        self.scale(&Rat::constant(self.vars.nvars(), c.clone()))
    }

    /// Multiply by `ℏ^r`.
    pub fn mul_hbar(&self, r: u16) -> WeylElement {
        let mut out = WeylElement::zero(self.vars, self.cap);
        for (k, c) in &self.terms {
            let mut k2 = k.clone();
            k2.h += r;
            out.add_term(k2, c.clone());
        }
        out
    }

    /// Divide by ℏ. Panics if some term has no ℏ factor.
    pub fn div_hbar(&self) -> WeylElement {
        let mut out = WeylElement::zero(self.vars, self.cap);
        for (k, c) in &self.terms {
            assert!(k.h >= 1, "division by hbar of an hbar-free term");
            let mut k2 = k.clone();
            k2.h -= 1;
            out.add_term(k2, c.clone());
        }
        out
    }

    /// Substitute `ℏ = value`, collapsing the formal grading.
    pub fn eval_hbar(&self, value: &Gauss) -> WeylElement {
        let mut out = WeylElement::zero(self.vars, self.cap);
        for (k, c) in &self.terms {
            let mut k2 = k.clone();
            k2.h = 0;
            out.add_term(k2, c.scale(&value.pow(k.h as u32)));
        }
        out
    }

    /// Drop every term whose weight exceeds `cap`, adopting the new cap.
    pub fn truncate(&self, cap: u32) -> WeylElement {
        let mut out = WeylElement::zero(self.vars, cap);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    fn retain_cap(&mut self) {
        let cap = self.cap;
        self.terms.retain(|k, _| k.weight() <= cap);
    }

    pub fn max_weight(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.weight()).max()
    }

    pub fn min_weight(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.weight()).min()
    }

    pub fn min_fiber_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.fiber_degree()).min()
    }

    /// The graded piece of a fixed weight.
    pub fn weight_component(&self, w: u32) -> WeylElement {
        let mut out = WeylElement::zero(self.vars, self.cap);
        for (k, c) in &self.terms {
            if k.weight() == w {
                out.add_term(k.clone(), c.clone());
            }
        }
        out
    }

    /// The component of fixed total form degree.
    pub fn form_component(&self, p: u32) -> WeylElement {
        let mut out = WeylElement::zero(self.vars, self.cap);
        for (k, c) in &self.terms {
            if k.form_degree() == p {
                out.add_term(k.clone(), c.clone());
            }
        }
        out
    }

    /// Coefficient of the ℏ^r scalar part (fiber-free, form-free).
    pub fn scalar_coefficient(&self, r: u16) -> Rat {
        let mut key = TermKey::scalar(&self.vars);
        key.h = r;
        self.terms
            .get(&key)
            .cloned()
            .unwrap_or_else(|| Rat::zero(self.vars.nvars()))
    }

    pub fn is_form_free(&self) -> bool {
        self.terms.keys().all(|k| k.form_degree() == 0)
    }

    pub fn is_fiber_free(&self) -> bool {
        self.terms.keys().all(|k| k.fiber_degree() == 0)
    }

    /// True if no term uses barred fiber slots (`W^{1,0}` constraint).
    pub fn has_no_wbar(&self) -> bool {
        self.terms.keys().all(|k| k.fwb.iter().all(|&e| e == 0))
    }

    pub fn has_no_hbar(&self) -> bool {
        self.terms.keys().all(|k| k.h == 0)
    }

    /// Wedge/symmetric product with a bare term (no contraction).
    pub(crate) fn push_product_term(
        &mut self,
        key_a: &TermKey,
        key_b: &TermKey,
        extra_h: u16,
        coeff: Rat,
    ) {
        let Some((dz, dzb, flip)) = wedge_forms(key_a.dz, key_a.dzb, key_b.dz, key_b.dzb)
        else {
            return;
        };
        let fw = key_a
            .fw
            .iter()
            .zip(&key_b.fw)
            .map(|(x, y)| x + y)
            .collect();
        let fwb = key_a
            .fwb
            .iter()
            .zip(&key_b.fwb)
            .map(|(x, y)| x + y)
            .collect();
        let key = TermKey {
            h: key_a.h + key_b.h + extra_h,
            fw,
            fwb,
            dz,
            dzb,
        };
        let c = if flip { -&coeff } else { coeff };
        self.add_term(key, c);
    }

    /// Plain graded product (no fiber contraction): the r = 0 part of any
    /// fibrewise product.
    pub fn wedge(&self, other: &WeylElement) -> WeylElement {
        assert_eq!(self.vars, other.vars, "chart mode mismatch");
        let mut out = WeylElement::zero(self.vars, self.cap.min(other.cap));
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                if ka.weight() + kb.weight() > out.cap {
                    continue;
                }
                out.push_product_term(ka, kb, 0, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, "  +  ")?;
            }
            first = false;
            write!(f, "({})", c)?;
            if k.h > 0 {
                write!(f, "*h^{}", k.h)?;
            }
            for (j, &e) in k.fw.iter().enumerate() {
                if e > 0 {
                    let name = match self.vars.kind {
                        VarKind::Kahler => format!("w{}", j + 1),
                        VarKind::Real => format!("y{}", j + 1),
                        VarKind::Holo => format!("w{}", j + 1),
                    };
                    if e == 1 {
                        write!(f, "*{}", name)?;
                    } else {
                        write!(f, "*{}^{}", name, e)?;
                    }
                }
            }
            for (j, &e) in k.fwb.iter().enumerate() {
                if e > 0 {
                    if e == 1 {
                        write!(f, "*wb{}", j + 1)?;
                    } else {
                        write!(f, "*wb{}^{}", j + 1, e)?;
                    }
                }
            }
            for j in 0..16 {
                if k.dz & (1 << j) != 0 {
                    let name = match self.vars.kind {
                        VarKind::Kahler => format!("dz{}", j + 1),
                        VarKind::Real => format!("dx{}", j + 1),
                        VarKind::Holo => format!("du{}", j + 1),
                    };
                    write!(f, "*{}", name)?;
                }
            }
            for j in 0..16 {
                if k.dzb & (1 << j) != 0 {
                    write!(f, "*dzb{}", j + 1)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::product::{HbarUse, ProductKernel};
    use crate::gauss::Gauss;
    use crate::ratfun::Rat;
    use crate::VarSpec;

    /// Anti-Wick and Kähler-Moyal kernels for the flat chart with
    /// `ω_{11̄} = c`, formal ℏ.
    pub fn flat_kernels(c: Gauss) -> (ProductKernel, ProductKernel) {
        let vars = VarSpec::kahler(1);
        let inv = vec![vec![Rat::constant(2, c).inv()]];
        (
            ProductKernel::anti_wick(vars, &inv, HbarUse::Formal),
            ProductKernel::moyal_kahler(vars, &inv, HbarUse::Formal),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn form_sign_bookkeeping() {
        // dz2 ∧ dz1 = -dz1 ∧ dz2, checked through insert_index
        let (mask, flip) = insert_index(0b10, 0).unwrap();
        assert_eq!(mask, 0b11);
        assert!(!flip);
        let (mask, flip) = insert_index(0b01, 1).unwrap();
        assert_eq!(mask, 0b11);
        assert!(flip);
        assert!(insert_index(0b01, 0).is_none());
    }

    #[test]
    fn wedge_antisymmetry() {
        let vars = VarSpec::kahler(2);
        let a = WeylElement::form_dz(vars, 6, 0);
        let b = WeylElement::form_dz(vars, 6, 1);
        let ab = a.wedge(&b);
        let ba = b.wedge(&a);
        assert_eq!(ab, ba.neg());
        assert!(a.wedge(&a).is_zero());
    }

    #[test]
    fn wedge_mixed_block_sign() {
        // (dzb1) ∧ (dz1) = -(dz1) ∧ (dzb1) after sorting into blocks
        let vars = VarSpec::kahler(1);
        let zb = WeylElement::form_dzb(vars, 6, 0);
        let z = WeylElement::form_dz(vars, 6, 0);
        let prod = zb.wedge(&z);
        let expect = z.wedge(&zb).neg();
        assert_eq!(prod, expect);
    }

    #[test]
    fn eager_truncation() {
        let vars = VarSpec::kahler(1);
        let w = WeylElement::fiber_w(vars, 2, 0);
        let w2 = w.wedge(&w);
        let w3 = w2.wedge(&w);
        assert!(!w2.is_zero());
        assert!(w3.is_zero());
    }

    #[test]
    fn brute_force_form_signs() {
        // wedge of single-index forms matches sign-of-permutation on ≤ 3 slots
        let vars = VarSpec::kahler(3);
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        for p in perms {
            let mut el = WeylElement::one(vars, 6);
            for &j in &p {
                el = el.wedge(&WeylElement::form_dz(vars, 6, j));
            }
            let mut inversions = 0;
            for i in 0..3 {
                for j in (i + 1)..3 {
                    if p[i] > p[j] {
                        inversions += 1;
                    }
                }
            }
            let sorted = WeylElement::form_dz(vars, 6, 0)
                .wedge(&WeylElement::form_dz(vars, 6, 1))
                .wedge(&WeylElement::form_dz(vars, 6, 2));
            let expect = if inversions % 2 == 0 {
                sorted.clone()
            } else {
                sorted.neg()
            };
            assert_eq!(el, expect, "permutation {:?}", p);
        }
    }
}
