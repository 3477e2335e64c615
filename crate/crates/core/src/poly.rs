//! Sparse multivariate polynomials over Gaussian rationals.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vectors under graded
//! lexicographic order, so the representation is canonical and rendering is
//! deterministic. The GCD is a primitive pseudo-remainder sequence on the
//! last active variable, with contents handled recursively; inputs here stay
//! small (chart metrics and their derived tensors), so robustness beats
//! asymptotics.

use crate::gauss::Gauss;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Exponent vector under graded lexicographic order (total degree first,
/// then lexicographic).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono(pub Vec<u16>);

impl Mono {
    pub fn unit(nvars: usize) -> Self {
        Mono(vec![0; nvars])
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut e = vec![0; nvars];
        e[idx] = 1;
        Mono(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        Mono(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Componentwise division; `None` if some exponent would go negative.
    pub fn div(&self, other: &Mono) -> Option<Mono> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Mono(out))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// A multivariate polynomial; zero has an empty term map.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    pub nvars: usize,
    pub terms: BTreeMap<Mono, Gauss>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Gauss) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Mono::unit(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Gauss::one())
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut p = Poly::zero(nvars);
        p.terms.insert(Mono::var(nvars, idx), Gauss::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(|m| m.degree() == 0)
    }

    /// The constant value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Gauss> {
        if self.is_zero() {
            return Some(Gauss::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Leading term under graded lex (the maximal key).
    pub fn leading(&self) -> Option<(&Mono, &Gauss)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Mono, c: Gauss) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Gauss) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact partial derivative with respect to variable `idx`.
    pub fn derive(&self, idx: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[idx] = e - 1;
            out.add_term(m2, c * &Gauss::from_int(e as i64));
        }
        out
    }

    /// Relabel variables: exponent of old slot `j` moves to slot `map[j]`.
    /// The mapping must be injective on the variables actually present.
    pub fn rename_vars(&self, map: &[usize], new_nvars: usize) -> Poly {
        let mut out = Poly::zero(new_nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0u16; new_nvars];
            for (j, &exp) in m.0.iter().enumerate() {
                if exp > 0 {
                    e[map[j]] += exp;
                }
            }
            out.add_term(Mono(e), c.clone());
        }
        out
    }

    /// Conjugate coefficients only (`i ↦ -i`), leaving variables alone.
    pub fn conj_coeffs(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.conj()))
                .collect(),
        }
    }

    /// Exact division; `None` if `self` is not a polynomial multiple of `d`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero(self.nvars));
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.inv()));
        }
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        let (dm, dc) = {
            let (m, c) = d.leading().unwrap();
            (m.clone(), c.clone())
        };
        let dcinv = dc.inv();
        while !rem.is_zero() {
            let (rm, rc) = {
                let (m, c) = rem.leading().unwrap();
                (m.clone(), c.clone())
            };
            let qm = rm.div(&dm)?;
            let qc = &rc * &dcinv;
            quot.add_term(qm.clone(), qc.clone());
            let mut piece = Poly::zero(self.nvars);
            piece.add_term(qm, qc);
            rem = rem.sub(&piece.mul(d));
        }
        Some(quot)
    }

    /// Highest variable index with a nonzero exponent anywhere, if any.
    fn main_var(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for m in self.terms.keys() {
            for (j, &e) in m.0.iter().enumerate() {
                if e > 0 && best.map_or(true, |b| j > b) {
                    best = Some(j);
                }
            }
        }
        best
    }

    fn degree_in(&self, v: usize) -> u16 {
        self.terms.keys().map(|m| m.0[v]).max().unwrap_or(0)
    }

    /// Coefficient of `v^k`, as a polynomial with `v` zeroed out.
    fn coeff_of(&self, v: usize, k: u16) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.0[v] == k {
                let mut m2 = m.clone();
                m2.0[v] = 0;
                out.add_term(m2, c.clone());
            }
        }
        out
    }

    fn mul_var_pow(&self, v: usize, k: u16) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut m2 = m.clone();
                    m2.0[v] += k;
                    (m2, c.clone())
                })
                .collect(),
        }
    }

    /// Content with respect to `v`: the GCD of the `v`-coefficients.
    fn content_in(&self, v: usize) -> Poly {
        let mut g = Poly::zero(self.nvars);
        for k in 0..=self.degree_in(v) {
            let c = self.coeff_of(v, k);
            if !c.is_zero() {
                g = gcd(&g, &c);
                if c_is_unit(&g) {
                    break;
                }
            }
        }
        g
    }

    /// Scale so the graded-lex leading coefficient is 1.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.inv()),
        }
    }

    /// Substitute every variable except `keep` by the given constants.
    fn eval_except(&self, keep: usize, values: &[Gauss]) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut e = vec![0u16; self.nvars];
            for (j, &exp) in m.0.iter().enumerate() {
                if j == keep {
                    e[j] = exp;
                } else if exp > 0 {
                    coeff = &coeff * &values[j].pow(exp as u32);
                }
            }
            out.add_term(Mono(e), coeff);
        }
        out
    }
}

fn c_is_unit(p: &Poly) -> bool {
    p.as_constant().map_or(false, |c| !c.is_zero())
}

/// Pseudo-remainder of `a` by `b` in variable `v`.
fn pseudo_rem(a: &Poly, b: &Poly, v: usize) -> Poly {
    let db = b.degree_in(v);
    let lb = b.coeff_of(v, db);
    let mut r = a.clone();
    loop {
        let dr = r.degree_in(v);
        if r.is_zero() || dr < db {
            return r;
        }
        let lr = r.coeff_of(v, dr);
        // r ← lb·r − lr·v^(dr−db)·b
        r = r.mul(&lb).sub(&b.mul(&lr).mul_var_pow(v, dr - db));
    }
}

/// GCD of two polynomials, normalized monic under graded lex.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(a.nvars);
    }
    // direct divisibility covers the bulk of reductions against powers of a
    // fixed chart denominator
    if a.total_degree() >= b.total_degree() && a.div_exact(b).is_some() {
        return b.monic();
    }
    if b.total_degree() > a.total_degree() && b.div_exact(a).is_some() {
        return a.monic();
    }
    let v = a.main_var().max(b.main_var()).unwrap();
    if a.degree_in(v) == 0 || b.degree_in(v) == 0 {
        // v is absent from one side: gcd divides that side's content in v
        let ca = a.content_in(v);
        let cb = b.content_in(v);
        return gcd(&ca, &cb);
    }
    // univariate image test: when the specialized gcd is constant in v, the
    // true gcd has no v-dependence and only contents remain
    let multivar = (0..a.nvars).any(|j| {
        j != v && (a.terms.keys().any(|m| m.0[j] > 0) || b.terms.keys().any(|m| m.0[j] > 0))
    });
    if multivar && gcd_free_of(a, b, v) {
        let ca = a.content_in(v);
        let cb = b.content_in(v);
        return gcd(&ca, &cb);
    }
    let ca = a.content_in(v);
    let cb = b.content_in(v);
    let cg = gcd(&ca, &cb);
    let mut p = a.div_exact(&ca).unwrap();
    let mut q = b.div_exact(&cb).unwrap();
    if p.degree_in(v) < q.degree_in(v) {
        std::mem::swap(&mut p, &mut q);
    }
    loop {
        let r = pseudo_rem(&p, &q, v);
        if r.is_zero() {
            break;
        }
        let rc = r.content_in(v);
        let r = r.div_exact(&rc).unwrap();
        p = q;
        q = r;
        if q.degree_in(v) == 0 {
            // coprime in v
            return cg.monic();
        }
    }
    cg.mul(&q).monic()
}

/// Sound specialization test: substitute the other variables by constants
/// that keep both leading coefficients in `v` alive; if the univariate
/// image gcd is constant, the true gcd is free of `v`.
fn gcd_free_of(a: &Poly, b: &Poly, v: usize) -> bool {
    const POINTS: [i64; 6] = [1, 2, 3, -1, 5, 7];
    let la = a.coeff_of(v, a.degree_in(v));
    let lb = b.coeff_of(v, b.degree_in(v));
    for t in 0..3usize {
        let values: Vec<Gauss> = (0..a.nvars)
            .map(|j| Gauss::from_int(POINTS[(j + t) % POINTS.len()]))
            .collect();
        let la_val = la.eval_except(v, &values);
        let lb_val = lb.eval_except(v, &values);
        // leading coefficients live in the other variables only
        let (Some(ca), Some(cb)) = (la_val.as_constant(), lb_val.as_constant()) else {
            continue;
        };
        if ca.is_zero() || cb.is_zero() {
            continue;
        }
        let ia = a.eval_except(v, &values);
        let ib = b.eval_except(v, &values);
        let g = gcd(&ia, &ib);
        return g.degree_in(v) == 0;
    }
    false
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // render from the leading term down
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let s = format_term(m, c, self.nvars);
            if first {
                write!(f, "{}", s)?;
                first = false;
            } else if let Some(rest) = s.strip_prefix('-') {
                write!(f, " - {}", rest)?;
            } else {
                write!(f, " + {}", s)?;
            }
        }
        Ok(())
    }
}

/// Variable names used for rendering; indices are engine slots.
pub fn var_name(mode: crate::VarKind, idx: usize, n: usize) -> String {
    match mode {
        crate::VarKind::Kahler => {
            if idx < n {
                format!("z{}", idx + 1)
            } else {
                format!("zb{}", idx - n + 1)
            }
        }
        crate::VarKind::Real => format!("x{}", idx + 1),
        crate::VarKind::Holo => format!("u{}", idx + 1),
    }
}

thread_local! {
    static RENDER_CTX: std::cell::Cell<(crate::VarKind, usize)> =
        const { std::cell::Cell::new((crate::VarKind::Real, 0)) };
}

/// Set the thread-local variable naming used by `Display` for polynomials.
pub fn set_render_vars(kind: crate::VarKind, n: usize) {
    RENDER_CTX.with(|c| c.set((kind, n)));
}

fn format_term(m: &Mono, c: &Gauss, nvars: usize) -> String {
    let (kind, n) = RENDER_CTX.with(|c| c.get());
    let n = if n == 0 { nvars } else { n };
    let mut parts: Vec<String> = Vec::new();
    for (j, &e) in m.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let v = var_name(kind, j, n);
        if e == 1 {
            parts.push(v);
        } else {
            parts.push(format!("{}^{}", v, e));
        }
    }
    let coeff = c.to_string();
    if parts.is_empty() {
        return coeff;
    }
    let vars = parts.join("*");
    if c.is_one() {
        vars
    } else if (-c).is_one() {
        format!("-{}", vars)
    } else if coeff.contains('+') || (coeff.contains('-') && !coeff.starts_with('-')) {
        format!("({})*{}", coeff, vars)
    } else {
        format!("{}*{}", coeff, vars)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p_of(nvars: usize, terms: &[(&[u16], i64)]) -> Poly {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            p.add_term(Mono(e.to_vec()), Gauss::from_int(*c));
        }
        p
    }

    #[test]
    fn mul_and_divide() {
        // (1 + z*zb)^2 divided back out
        let one_zzb = p_of(2, &[(&[0, 0], 1), (&[1, 1], 1)]);
        let sq = one_zzb.pow(2);
        assert_eq!(sq.div_exact(&one_zzb).unwrap(), one_zzb);
        assert!(sq.div_exact(&p_of(2, &[(&[1, 0], 1)])).is_none());
    }

    #[test]
    fn gcd_with_common_factor() {
        let a = p_of(2, &[(&[0, 0], 1), (&[1, 1], 1)]); // 1 + z*zb
        let b = p_of(2, &[(&[1, 0], 1)]); // z
        let prod_a = a.pow(2).mul(&b);
        let prod_b = a.mul(&p_of(2, &[(&[0, 1], 2)]));
        let g = gcd(&prod_a, &prod_b);
        assert_eq!(g, a.monic());
    }

    #[test]
    fn gcd_coprime() {
        let a = p_of(2, &[(&[1, 0], 1), (&[0, 0], 1)]);
        let b = p_of(2, &[(&[0, 1], 1), (&[0, 0], -1)]);
        assert!(c_is_unit(&gcd(&a, &b)));
    }

    #[test]
    fn derivative() {
        let a = p_of(2, &[(&[2, 1], 3)]); // 3 z^2 zb
        let dz = a.derive(0);
        assert_eq!(dz, p_of(2, &[(&[1, 1], 6)]));
        assert_eq!(a.derive(0).derive(1), a.derive(1).derive(0));
    }
}
