//! The operator family on Weyl-valued forms: `δ`, `δ⁻¹`, `π₀` with their
//! polarized refinements, the fibrewise Laplacian `Δ̃` and its exponential,
//! the exterior covariant derivative, and the conjugation functor.

use super::{insert_index, remove_index, Slot, TermKey, WeylElement};
use crate::gauss::Gauss;
use crate::ratfun::Rat;
use crate::{VarKind, VarSpec};

/// Which polarization an operator acts through.
///
/// `Full` is the real-mode operator (all slots); `Holo` pairs `w`-slots with
/// unbarred form indices, `Anti` the conjugate group. On real and
/// holomorphic charts only `Full`/`Holo` coincide and `Anti` is empty.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Part {
    Full,
    Holo,
    Anti,
}

fn holo_slots(vars: &VarSpec) -> usize {
    vars.n
}

fn anti_slots(vars: &VarSpec) -> usize {
    match vars.kind {
        VarKind::Kahler => vars.n,
        _ => 0,
    }
}

fn fiber_derive_coeff(key: &TermKey, slot: Slot) -> Option<(TermKey, i64)> {
    let mut k = key.clone();
    match slot {
        Slot::W(i) => {
            if k.fw[i] == 0 {
                return None;
            }
            k.fw[i] -= 1;
            Some((k, key.fw[i] as i64))
        }
        Slot::Wb(i) => {
            if k.fwb[i] == 0 {
                return None;
            }
            k.fwb[i] -= 1;
            Some((k, key.fwb[i] as i64))
        }
    }
}

impl WeylElement {
    /// `δ a = dz^μ ∧ ∂a/∂w^μ (+ dz̄^ν ∧ ∂a/∂w̄^ν)`, restricted per `part`.
    pub fn delta(&self, part: Part) -> WeylElement {
        let mut out = WeylElement::zero(self.vars, self.cap);
        for (key, c) in &self.terms {
            if matches!(part, Part::Full | Part::Holo) {
                for mu in 0..holo_slots(&self.vars) {
                    let Some((k1, e)) = fiber_derive_coeff(key, Slot::W(mu)) else {
                        continue;
                    };
                    let Some((dz, flip)) = insert_index(k1.dz, mu) else {
                        continue;
                    };
                    let mut k2 = k1;
                    k2.dz = dz;
                    let coeff = c.scale(&Gauss::from_int(if flip { -e } else { e }));
                    out.add_term(k2, coeff);
                }
            }
            if matches!(part, Part::Full | Part::Anti) {
                for nu in 0..anti_slots(&self.vars) {
                    let Some((k1, e)) = fiber_derive_coeff(key, Slot::Wb(nu)) else {
                        continue;
                    };
                    let Some((dzb, mut flip)) = insert_index(k1.dzb, nu) else {
                        continue;
                    };
                    // pass the dz̄ generator over the whole dz block
                    if k1.dz.count_ones() % 2 == 1 {
                        flip = !flip;
                    }
                    let mut k2 = k1;
                    k2.dzb = dzb;
                    let coeff = c.scale(&Gauss::from_int(if flip { -e } else { e }));
                    out.add_term(k2, coeff);
                }
            }
        }
        out
    }

    /// `δ⁻¹` with the `1/(fiber + form)` normalization counted per `part`.
    pub fn delta_inv(&self, part: Part) -> WeylElement {
        let mut out = WeylElement::zero(self.vars, self.cap);
        for (key, c) in &self.terms {
            let (fib, form) = match part {
                Part::Full => (key.fiber_degree(), key.form_degree()),
                Part::Holo => (
                    key.fw.iter().map(|&e| e as u32).sum::<u32>(),
                    key.dz.count_ones(),
                ),
                Part::Anti => (
                    key.fwb.iter().map(|&e| e as u32).sum::<u32>(),
                    key.dzb.count_ones(),
                ),
            };
            let denom = fib + form;
            if denom == 0 {
                continue;
            }
            let norm = Gauss::from_ratio(1, denom as i64);
            if matches!(part, Part::Full | Part::Holo) {
                for mu in 0..holo_slots(&self.vars) {
                    let Some((dz, flip)) = remove_index(key.dz, mu) else {
                        continue;
                    };
                    let mut k2 = key.clone();
                    k2.dz = dz;
                    k2.fw[mu] += 1;
                    let sign = if flip { -&norm } else { norm.clone() };
                    out.add_term(k2, c.scale(&sign));
                }
            }
            if matches!(part, Part::Full | Part::Anti) {
                for nu in 0..anti_slots(&self.vars) {
                    let Some((dzb, mut flip)) = remove_index(key.dzb, nu) else {
                        continue;
                    };
                    if key.dz.count_ones() % 2 == 1 {
                        flip = !flip;
                    }
                    let mut k2 = key.clone();
                    k2.dzb = dzb;
                    k2.fwb[nu] += 1;
                    let sign = if flip { -&norm } else { norm.clone() };
                    out.add_term(k2, c.scale(&sign));
                }
            }
        }
        out
    }

    /// Projection onto terms with no fiber or form content of the given
    /// polarization (`Full`: plain scalars).
    pub fn pi0(&self, part: Part) -> WeylElement {
        let mut out = WeylElement::zero(self.vars, self.cap);
        for (key, c) in &self.terms {
            let keep = match part {
                Part::Full => key.fiber_degree() == 0 && key.form_degree() == 0,
                Part::Holo => key.fw.iter().all(|&e| e == 0) && key.dz == 0,
                Part::Anti => key.fwb.iter().all(|&e| e == 0) && key.dzb == 0,
            };
            if keep {
                out.add_term(key.clone(), c.clone());
            }
        }
        out
    }

    /// The fibrewise Laplacian `Δ̃ = ω^{ν̄μ} ∂²/∂w^μ ∂w̄^ν` (Kähler mode).
    pub fn tilde_delta(&self, omega_inv: &[Vec<Rat>]) -> WeylElement {
        assert_eq!(self.vars.kind, VarKind::Kahler);
        let n = self.vars.n;
        let mut out = WeylElement::zero(self.vars, self.cap);
        for (key, c) in &self.terms {
            for nu in 0..n {
                for mu in 0..n {
                    if omega_inv[nu][mu].is_zero() {
                        continue;
                    }
                    let Some((k1, e1)) = fiber_derive_coeff(key, Slot::W(mu)) else {
                        continue;
                    };
                    let Some((k2, e2)) = fiber_derive_coeff(&k1, Slot::Wb(nu)) else {
                        continue;
                    };
                    let coeff = &(c * &omega_inv[nu][mu]) * &Rat::constant(
                        self.vars.nvars(),
                        Gauss::from_int(e1 * e2),
                    );
                    out.add_term(k2, coeff);
                }
            }
        }
        out
    }

    /// `exp(c·ℏ·Δ̃)` applied to `self`; the series terminates because each
    /// application removes two fiber symbols.
    pub fn exp_scaled_tilde_delta(&self, c: &Gauss, omega_inv: &[Vec<Rat>]) -> WeylElement {
        let mut out = self.clone();
        let mut power = self.clone();
        let mut m: u32 = 0;
        let mut mfact = Gauss::one();
        loop {
            power = power.tilde_delta(omega_inv).mul_hbar(1);
            if power.is_zero() {
                return out;
            }
            m += 1;
            mfact = &mfact * &Gauss::from_int(m as i64);
            let scale = &c.pow(m) * &mfact.inv();
            out = out.add(&power.scale_gauss(&scale));
        }
    }

    /// Exterior derivative on coefficients only (the plain `d` for elements
    /// without fiber content; used for closedness checks).
    pub fn exterior_d(&self) -> WeylElement {
        let mut out = WeylElement::zero(self.vars, self.cap);
        let nv = self.vars.nvars();
        let n = holo_slots(&self.vars);
        for (key, c) in &self.terms {
            for alpha in 0..n {
                let dc = c.derive(alpha);
                if dc.is_zero() {
                    continue;
                }
                if let Some((dz, flip)) = insert_index(key.dz, alpha) {
                    let mut k2 = key.clone();
                    k2.dz = dz;
                    out.add_term(k2, if flip { -&dc } else { dc });
                }
            }
            for beta in 0..anti_slots(&self.vars) {
                let dc = c.derive(n + beta);
                if dc.is_zero() {
                    continue;
                }
                if let Some((dzb, mut flip)) = insert_index(key.dzb, beta) {
                    if key.dz.count_ones() % 2 == 1 {
                        flip = !flip;
                    }
                    let mut k2 = key.clone();
                    k2.dzb = dzb;
                    out.add_term(k2, if flip { -&dc } else { dc });
                }
            }
        }
        let _ = nv;
        out
    }

    /// The `(0,1)` coefficient derivative `dz̄^β ∧ ∂̄_β` (Kähler mode); the
    /// antiholomorphic part of the covariant derivative on `W^{1,0}`-valued
    /// sections, where mixed Christoffels vanish.
    pub fn dbar_coeff(&self) -> WeylElement {
        assert_eq!(self.vars.kind, VarKind::Kahler);
        let n = self.vars.n;
        let mut out = WeylElement::zero(self.vars, self.cap);
        for (key, c) in &self.terms {
            for beta in 0..n {
                let dc = c.derive(n + beta);
                if dc.is_zero() {
                    continue;
                }
                if let Some((dzb, mut flip)) = insert_index(key.dzb, beta) {
                    if key.dz.count_ones() % 2 == 1 {
                        flip = !flip;
                    }
                    let mut k2 = key.clone();
                    k2.dzb = dzb;
                    out.add_term(k2, if flip { -&dc } else { dc });
                }
            }
        }
        out
    }

    /// The conjugate-manifold counterpart: swaps `w ↔ w̄` and `dz ↔ dz̄`
    /// (with the reordering sign), and conjugates coefficients. An
    /// involution; Kähler mode only. This is the antilinear conjugation
    /// functor, carrying the chart's connection data to the conjugate
    /// chart's.
    pub fn bar_counterpart(&self) -> WeylElement {
        self.conjugate_relabel(true)
    }

    /// Re-expression of the same geometric object in the conjugate chart's
    /// labels: the ℂ-linear relabeling that swaps the fiber and form groups
    /// (with the reordering sign) and the variable groups of every
    /// coefficient, without conjugating scalars. An involution; this is the
    /// transport used when conjugate-chart operators act on shared
    /// sections.
    pub fn relabel_conjugate(&self) -> WeylElement {
        self.conjugate_relabel(false)
    }

    fn conjugate_relabel(&self, conj_scalars: bool) -> WeylElement {
        assert_eq!(self.vars.kind, VarKind::Kahler);
        let n = self.vars.n;
        let swap: Vec<usize> = (0..2 * n).map(|j| (j + n) % (2 * n)).collect();
        let mut out = WeylElement::zero(self.vars, self.cap);
        for (key, c) in &self.terms {
            let k2 = TermKey {
                h: key.h,
                fw: key.fwb.clone(),
                fwb: key.fw.clone(),
                dz: key.dzb,
                dzb: key.dz,
            };
            let flip = (key.dz.count_ones() * key.dzb.count_ones()) % 2 == 1;
            let mut cc = c.rename_vars(&swap, 2 * n);
            if conj_scalars {
                cc = cc.conj_coeffs();
            }
            out.add_term(k2, if flip { -&cc } else { cc });
        }
        out
    }
}

/// Chart connection data consumed by the covariant derivative.
///
/// Kähler mode: `gamma[α][μ][ν] = Γ^ν_{αμ}` acts on `w`-slots along `dz^α`,
/// `gamma_bar[β][μ][ν] = Γ̄^ν̄_{β̄μ̄}` on `w̄`-slots along `dz̄^β`. Real and
/// holomorphic modes: `gamma[i][j][k] = Γ^k_{ij}` on all slots.
pub struct ConnectionView<'a> {
    pub vars: VarSpec,
    pub gamma: &'a [Vec<Vec<Rat>>],
    pub gamma_bar: Option<&'a [Vec<Vec<Rat>>]>,
}

impl WeylElement {
    /// Exterior covariant derivative: coefficient differentials plus the
    /// Christoffel action on fiber slots. Form slots see only `d` (which
    /// vanishes on coordinate forms).
    pub fn nabla(&self, conn: &ConnectionView) -> WeylElement {
        assert_eq!(self.vars, conn.vars, "chart tensors mismatch");
        let n = holo_slots(&self.vars);
        let nanti = anti_slots(&self.vars);
        let mut out = WeylElement::zero(self.vars, self.cap);
        for (key, c) in &self.terms {
            // unbarred directions dz^α
            for alpha in 0..n {
                // coefficient derivative
                push_dz(&mut out, key, alpha, c.derive(alpha));
                // Christoffel action on w-slots: ∇_α w^μ = −Γ^μ_{αλ} w^λ
                for mu in 0..n {
                    let e = key.fw[mu];
                    if e == 0 {
                        continue;
                    }
                    for lam in 0..n {
                        let g = &conn.gamma[alpha][lam][mu];
                        if g.is_zero() {
                            continue;
                        }
                        let mut k2 = key.clone();
                        k2.fw[mu] -= 1;
                        k2.fw[lam] += 1;
                        let coeff = (c * g).scale(&Gauss::from_int(-(e as i64)));
                        push_dz_key(&mut out, k2, alpha, coeff);
                    }
                }
            }
            // barred directions dz̄^β (Kähler only)
            if let Some(gbar) = conn.gamma_bar {
                for beta in 0..nanti {
                    push_dzb(&mut out, key, beta, c.derive(n + beta));
                    for nu in 0..nanti {
                        let e = key.fwb[nu];
                        if e == 0 {
                            continue;
                        }
                        for lam in 0..nanti {
                            let g = &gbar[beta][lam][nu];
                            if g.is_zero() {
                                continue;
                            }
                            let mut k2 = key.clone();
                            k2.fwb[nu] -= 1;
                            k2.fwb[lam] += 1;
                            let coeff = (c * g).scale(&Gauss::from_int(-(e as i64)));
                            push_dzb_key(&mut out, k2, beta, coeff);
                        }
                    }
                }
            }
        }
        out
    }

    /// The `(1,0)` part of the covariant derivative (unbarred directions).
    pub fn nabla_holo(&self, conn: &ConnectionView) -> WeylElement {
        assert_eq!(self.vars, conn.vars, "chart tensors mismatch");
        let n = holo_slots(&self.vars);
        let mut out = WeylElement::zero(self.vars, self.cap);
        for (key, c) in &self.terms {
            for alpha in 0..n {
                push_dz(&mut out, key, alpha, c.derive(alpha));
                for mu in 0..n {
                    let e = key.fw[mu];
                    if e == 0 {
                        continue;
                    }
                    for lam in 0..n {
                        let g = &conn.gamma[alpha][lam][mu];
                        if g.is_zero() {
                            continue;
                        }
                        let mut k2 = key.clone();
                        k2.fw[mu] -= 1;
                        k2.fw[lam] += 1;
                        let coeff = (c * g).scale(&Gauss::from_int(-(e as i64)));
                        push_dz_key(&mut out, k2, alpha, coeff);
                    }
                }
            }
        }
        out
    }
}

fn push_dz(out: &mut WeylElement, key: &TermKey, alpha: usize, coeff: Rat) {
    if coeff.is_zero() {
        return;
    }
    push_dz_key(out, key.clone(), alpha, coeff);
}

fn push_dz_key(out: &mut WeylElement, key: TermKey, alpha: usize, coeff: Rat) {
    if coeff.is_zero() {
        return;
    }
    let Some((dz, flip)) = insert_index(key.dz, alpha) else {
        return;
    };
    let mut k2 = key;
    k2.dz = dz;
    out.add_term(k2, if flip { -&coeff } else { coeff });
}

fn push_dzb(out: &mut WeylElement, key: &TermKey, beta: usize, coeff: Rat) {
    if coeff.is_zero() {
        return;
    }
    push_dzb_key(out, key.clone(), beta, coeff);
}

fn push_dzb_key(out: &mut WeylElement, key: TermKey, beta: usize, coeff: Rat) {
    if coeff.is_zero() {
        return;
    }
    let Some((dzb, mut flip)) = insert_index(key.dzb, beta) else {
        return;
    };
    if key.dz.count_ones() % 2 == 1 {
        flip = !flip;
    }
    let mut k2 = key;
    k2.dzb = dzb;
    out.add_term(k2, if flip { -&coeff } else { coeff });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_and_inverse_on_generators() {
        let vars = VarSpec::kahler(1);
        let w = WeylElement::fiber_w(vars, 6, 0);
        let dz = WeylElement::form_dz(vars, 6, 0);
        assert_eq!(w.delta(Part::Full), dz);
        assert_eq!(dz.delta_inv(Part::Full), w);
        assert_eq!(w.delta(Part::Holo), dz);
        assert!(w.delta(Part::Anti).is_zero());
    }

    #[test]
    fn delta_squares_to_zero() {
        let vars = VarSpec::kahler(2);
        let el = WeylElement::fiber_w(vars, 8, 0)
            .wedge(&WeylElement::fiber_w(vars, 8, 1))
            .wedge(&WeylElement::fiber_wb(vars, 8, 0))
            .add(&WeylElement::fiber_w(vars, 8, 1).wedge(&WeylElement::form_dzb(vars, 8, 1)));
        for part in [Part::Full, Part::Holo, Part::Anti] {
            assert!(el.delta(part).delta(part).is_zero());
            assert!(el.delta_inv(part).delta_inv(part).is_zero());
        }
    }

    #[test]
    fn homotopy_identity_single_monomial() {
        // Id − π₀ = δδ⁻¹ + δ⁻¹δ on w1²·wb1·dz1∧dzb2
        let vars = VarSpec::kahler(2);
        let el = WeylElement::fiber_w(vars, 9, 0)
            .wedge(&WeylElement::fiber_w(vars, 9, 0))
            .wedge(&WeylElement::fiber_wb(vars, 9, 0))
            .wedge(&WeylElement::form_dz(vars, 9, 0))
            .wedge(&WeylElement::form_dzb(vars, 9, 1));
        let lhs = el.sub(&el.pi0(Part::Full));
        let rhs = el
            .delta(Part::Full)
            .delta_inv(Part::Full)
            .add(&el.delta_inv(Part::Full).delta(Part::Full));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn polarized_inverse_on_mixed_form() {
        // (δ^{1,0})⁻¹ of dz1∧dzb1 ⊗ w̄1, and the polarized homotopy on it
        let vars = VarSpec::kahler(1);
        let el = WeylElement::fiber_wb(vars, 6, 0)
            .wedge(&WeylElement::form_dz(vars, 6, 0))
            .wedge(&WeylElement::form_dzb(vars, 6, 0));
        let inv = el.delta_inv(Part::Holo);
        // w1 ι_{∂z1}(dz1∧dzb1) ⊗ w̄1 = w1 w̄1 dzb1, normalization 1/(0+1)
        let expect = WeylElement::fiber_w(vars, 6, 0)
            .wedge(&WeylElement::fiber_wb(vars, 6, 0))
            .wedge(&WeylElement::form_dzb(vars, 6, 0));
        assert_eq!(inv, expect);
        let lhs = el.sub(&el.pi0(Part::Holo));
        let rhs = el
            .delta(Part::Holo)
            .delta_inv(Part::Holo)
            .add(&el.delta_inv(Part::Holo).delta(Part::Holo));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn bar_is_involution() {
        let vars = VarSpec::kahler(2);
        let el = WeylElement::fiber_w(vars, 8, 0)
            .wedge(&WeylElement::form_dzb(vars, 8, 1))
            .wedge(&WeylElement::form_dz(vars, 8, 0))
            .scale(&crate::parse::parse_expr("i*z1/(1+z2*zb2)", &vars).unwrap());
        assert_eq!(el.bar_counterpart().bar_counterpart(), el);
        let w = WeylElement::fiber_w(vars, 8, 0);
        assert_eq!(w.bar_counterpart(), WeylElement::fiber_wb(vars, 8, 0));
    }

    #[test]
    fn laplacian_on_quadratic() {
        let vars = VarSpec::kahler(1);
        let inv = vec![vec![Rat::one(2)]];
        let wwb = WeylElement::fiber_w(vars, 6, 0).wedge(&WeylElement::fiber_wb(vars, 6, 0));
        assert_eq!(wwb.tilde_delta(&inv), WeylElement::one(vars, 6));
        let f = WeylElement::scalar(vars, 6, Rat::var(2, 0));
        assert!(f.tilde_delta(&inv).is_zero());
        // exp(0·Δ̃) is the identity
        assert_eq!(wwb.exp_scaled_tilde_delta(&Gauss::zero(), &inv), wwb);
    }
}
