//! The fibrewise left/right actions of the Weyl algebra on polarized
//! sections.

use crate::gauss::Gauss;
use crate::ratfun::Rat;
use crate::weyl::{wedge_forms, HbarUse, TermKey, WeylElement};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_gauss(&self) -> Gauss {
        match self {
            Sign::Plus => Gauss::one(),
            Sign::Minus => Gauss::from_int(-1),
        }
    }
}

/// `a ⊛± s`: on a monomial `a = α ⊗ w^M w̄^N` with `q = |N|`,
///
/// * plus:  `α ∧ σ ⊗ ℏ^q ω^{ν̄₁λ₁}…ω^{ν̄_qλ_q} w^M ∂^q s/∂w^{λ₁}…∂w^{λ_q}`,
/// * minus: `α ∧ σ ⊗ (−ℏ)^q ω^{ν̄₁λ₁}…ω^{ν̄_qλ_q} ∂^q (w^M s)/∂w^{λ₁}…`,
///
/// extended bilinearly. The ℏ-factors follow `hbar` (formal power or a
/// numeric level value).
pub fn circledast(
    sign: Sign,
    a: &WeylElement,
    s: &WeylElement,
    omega_inv: &[Vec<Rat>],
    hbar: &HbarUse,
) -> WeylElement {
    assert_eq!(a.vars, s.vars, "chart mode mismatch");
    let n = a.vars.n;
    let cap = a.cap.min(s.cap);
    let nv = a.vars.nvars();
    let mut out = WeylElement::zero(a.vars, cap);
    for (ka, ca) in &a.terms {
        // expand the barred multi-degree into a list of contraction slots
        let mut nus: Vec<usize> = Vec::new();
        for (nu, &e) in ka.fwb.iter().enumerate() {
            for _ in 0..e {
                nus.push(nu);
            }
        }
        let q = nus.len() as u32;
        let scale = match (hbar, sign) {
            (HbarUse::Formal, Sign::Plus) => Gauss::one(),
            (HbarUse::Formal, Sign::Minus) => Gauss::from_int(-1).pow(q),
            (HbarUse::Value(v), Sign::Plus) => v.pow(q),
            (HbarUse::Value(v), Sign::Minus) => (-v).pow(q),
        };
        let h_shift = match hbar {
            HbarUse::Formal => q as u16,
            HbarUse::Value(_) => 0,
        };
        for (ks, cs) in &s.terms {
            // working fiber: for the minus action multiply w^M in first
            let mut fiber = ks.fw.clone();
            if sign == Sign::Minus {
                for (mu, &e) in ka.fw.iter().enumerate() {
                    fiber[mu] += e;
                }
            }
            // contraction states: (fiber, coefficient)
            let mut states: Vec<(Vec<u16>, Rat)> =
                vec![(fiber, (ca * cs).scale(&scale))];
            for &nu in &nus {
                let mut next: Vec<(Vec<u16>, Rat)> = Vec::new();
                for (fib, c) in &states {
                    for lam in 0..n {
                        if omega_inv[nu][lam].is_zero() || fib[lam] == 0 {
                            continue;
                        }
                        let mut f2 = fib.clone();
                        let e = f2[lam];
                        f2[lam] -= 1;
                        let c2 = (c * &omega_inv[nu][lam])
                            .scale(&Gauss::from_int(e as i64));
                        merge(&mut next, f2, c2);
                    }
                }
                states = next;
                if states.is_empty() {
                    break;
                }
            }
            for (mut fib, c) in states {
                if sign == Sign::Plus {
                    for (mu, &e) in ka.fw.iter().enumerate() {
                        fib[mu] += e;
                    }
                }
                let Some((dz, dzb, flip)) =
                    wedge_forms(ka.dz, ka.dzb, ks.dz, ks.dzb)
                else {
                    continue;
                };
                let key = TermKey {
                    h: ka.h + ks.h + h_shift,
                    fw: fib,
                    fwb: ks.fwb.clone(),
                    dz,
                    dzb,
                };
                out.add_term(key, if flip { -&c } else { c });
            }
        }
    }
    let _ = nv;
    out
}

fn merge(states: &mut Vec<(Vec<u16>, Rat)>, fib: Vec<u16>, c: Rat) {
    if c.is_zero() {
        return;
    }
    for (f, v) in states.iter_mut() {
        if *f == fib {
            *v = &*v + &c;
            return;
        }
    }
    states.push((fib, c));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::VarSpec;

    #[test]
    fn scalar_acts_by_multiplication() {
        let vars = VarSpec::kahler(1);
        let inv = vec![vec![Rat::one(2)]];
        let a = WeylElement::scalar(vars, 6, Rat::var(2, 0));
        let s = WeylElement::fiber_w(vars, 6, 0);
        for sign in [Sign::Plus, Sign::Minus] {
            let r = circledast(sign, &a, &s, &inv, &HbarUse::Formal);
            assert_eq!(r, s.scale(&Rat::var(2, 0)));
        }
    }

    #[test]
    fn single_contraction() {
        // a = w̄: plus action maps w^2 to 2ℏ·ω^{1̄1}·w
        let vars = VarSpec::kahler(1);
        let inv = vec![vec![Rat::one(2)]];
        let wb = WeylElement::fiber_wb(vars, 6, 0);
        let w = WeylElement::fiber_w(vars, 6, 0);
        let w2 = w.wedge(&w);
        let plus = circledast(Sign::Plus, &wb, &w2, &inv, &HbarUse::Formal);
        assert_eq!(
            plus,
            w.mul_hbar(1).scale(&Rat::constant(2, Gauss::from_int(2)))
        );
        let minus = circledast(Sign::Minus, &wb, &w2, &inv, &HbarUse::Formal);
        assert_eq!(minus, plus.neg());
    }

    #[test]
    fn minus_differentiates_the_product() {
        // a = w w̄ acting on 1: plus gives 0 (∂1 = 0), minus gives −ℏ ω^{1̄1}
        let vars = VarSpec::kahler(1);
        let inv = vec![vec![Rat::one(2)]];
        let a = WeylElement::fiber_w(vars, 6, 0).wedge(&WeylElement::fiber_wb(vars, 6, 0));
        let one = WeylElement::one(vars, 6);
        let plus = circledast(Sign::Plus, &a, &one, &inv, &HbarUse::Formal);
        assert!(plus.is_zero());
        let minus = circledast(Sign::Minus, &a, &one, &inv, &HbarUse::Formal);
        assert_eq!(minus, one.mul_hbar(1).neg());
    }
}
