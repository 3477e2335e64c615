//! Restriction from the holomorphic chart mode back to the Kähler chart.
//!
//! The holomorphic chart doubles the Kähler chart's variables: `u^α = z^α`
//! and `u^{n+α}` extends `z̄^α` as an independent coordinate. Restriction
//! substitutes the second group by the conjugates of the first. At chart
//! level this is a pure relabeling: variable slots, fiber slots and form
//! slots all map in place, and the ascending `u`-ordering already agrees
//! with the `[dz-block][dz̄-block]` storage order, so no signs appear.

use crate::weyl::{TermKey, WeylElement};
use crate::{VarKind, VarSpec};

/// Map a holomorphic-mode element over `2n` variables onto the Kähler
/// chart: `u^α ↦ z^α`, `u^{n+α} ↦ z̄^α`, and likewise for fiber and form
/// symbols.
pub fn restrict_to_chart(el: &WeylElement, n: usize) -> WeylElement {
    assert_eq!(el.vars.kind, VarKind::Holo, "restriction expects holomorphic mode");
    assert_eq!(el.vars.n, 2 * n, "dimension mismatch");
    relabel_split(el, n)
}

/// Reinterpret a real-mode element over the coordinates
/// `(x^α, x^{n+α}) = (z^α, z̄^α)` as a Kähler-mode element.
pub fn kahler_element_from_real(el: &WeylElement, n: usize) -> WeylElement {
    assert_eq!(el.vars.kind, VarKind::Real, "expected real mode");
    assert_eq!(el.vars.n, 2 * n, "dimension mismatch");
    relabel_split(el, n)
}

fn relabel_split(el: &WeylElement, n: usize) -> WeylElement {
    let vars = VarSpec::kahler(n);
    let mut out = WeylElement::zero(vars, el.cap);
    let low = (1u16 << n) - 1;
    for (key, c) in &el.terms {
        let k2 = TermKey {
            h: key.h,
            fw: key.fw[..n].to_vec(),
            fwb: key.fw[n..].to_vec(),
            dz: key.dz & low,
            dzb: key.dz >> n,
        };
        out.add_term(k2, c.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::WeylElement;

    #[test]
    fn relabel_preserves_order_without_signs() {
        // du1 ∧ du3 on a 2n = 4 chart becomes dz1 ∧ dzb1 with sign +1
        let holo = VarSpec::holo(4);
        let el = WeylElement::form_dz(holo, 6, 0)
            .wedge(&WeylElement::form_dz(holo, 6, 2))
            .wedge(&WeylElement::fiber_w(holo, 6, 3));
        let r = restrict_to_chart(&el, 2);
        let vars = VarSpec::kahler(2);
        let expect = WeylElement::form_dz(vars, 6, 0)
            .wedge(&WeylElement::form_dzb(vars, 6, 0))
            .wedge(&WeylElement::fiber_wb(vars, 6, 1));
        assert_eq!(r, expect);
    }
}
