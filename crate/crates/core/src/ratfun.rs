//! The coefficient field: rational functions in the chart variables over
//! Gaussian rationals.
//!
//! Canonical form: numerator and denominator coprime, denominator monic
//! under graded lex. Equality is therefore structural, and `a - b == 0` is
//! the universal zero test used throughout the verification suites.

use crate::gauss::Gauss;
use crate::poly::{gcd, Poly};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Rat {
    num: Poly,
    den: Poly,
}

impl Rat {
    /// Build from a numerator/denominator pair, reducing to canonical form.
    /// Panics if `den` is the zero polynomial.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut r = Rat { num, den };
        r.reduce();
        r
    }

    pub fn from_poly(num: Poly) -> Self {
        let nvars = num.nvars;
        Rat {
            num,
            den: Poly::one(nvars),
        }
    }

    pub fn zero(nvars: usize) -> Self {
        Rat::from_poly(Poly::zero(nvars))
    }

    pub fn one(nvars: usize) -> Self {
        Rat::from_poly(Poly::one(nvars))
    }

    pub fn constant(nvars: usize, c: Gauss) -> Self {
        Rat::from_poly(Poly::constant(nvars, c))
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        Rat::from_poly(Poly::var(nvars, idx))
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn as_constant(&self) -> Option<Gauss> {
        if self.den.is_constant() {
            let d = self.den.as_constant().unwrap();
            self.num.as_constant().map(|n| &n * &d.inv())
        } else {
            None
        }
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = Poly::one(self.num.nvars);
            return;
        }
        let g = gcd(&self.num, &self.den);
        if !g.is_constant() {
            self.num = self.num.div_exact(&g).unwrap();
            self.den = self.den.div_exact(&g).unwrap();
        }
        // monic denominator pins the representative
        let lc = self.den.leading().unwrap().1.clone();
        if !lc.is_one() {
            let inv = lc.inv();
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    pub fn inv(&self) -> Rat {
        assert!(!self.is_zero(), "division by the zero function");
        Rat::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i32) -> Rat {
        if e < 0 {
            return self.inv().pow(-e);
        }
        let mut acc = Rat::one(self.nvars());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Quotient-rule derivative with respect to variable `idx`, with the
    /// common factor `gcd(den, den')` stripped before the final reduction.
    pub fn derive(&self, idx: usize) -> Rat {
        let dn = self.num.derive(idx);
        let dd = self.den.derive(idx);
        if dd.is_zero() {
            return Rat::new(dn, self.den.clone());
        }
        let g = gcd(&self.den, &dd);
        let d1 = self.den.div_exact(&g).unwrap();
        let d2 = dd.div_exact(&g).unwrap();
        let num = dn.mul(&d1).sub(&self.num.mul(&d2));
        let den = self.den.mul(&d1);
        Rat::new(num, den)
    }

    pub fn scale(&self, c: &Gauss) -> Rat {
        if c.is_zero() {
            return Rat::zero(self.nvars());
        }
        Rat {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Variable relabeling (injective on present variables).
    pub fn rename_vars(&self, map: &[usize], new_nvars: usize) -> Rat {
        Rat::new(
            self.num.rename_vars(map, new_nvars),
            self.den.rename_vars(map, new_nvars),
        )
    }

    /// Conjugate coefficients only (`i ↦ -i`); variables untouched.
    pub fn conj_coeffs(&self) -> Rat {
        Rat::new(self.num.conj_coeffs(), self.den.conj_coeffs())
    }
}

impl Add for &Rat {
    type Output = Rat;
    fn add(self, rhs: &Rat) -> Rat {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return Rat::new(self.num.add(&rhs.num), self.den.clone());
        }
        // combine over gcd(d1, d2) to keep the reduction small
        let g = gcd(&self.den, &rhs.den);
        if g.is_constant() {
            return Rat::new(
                self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
                self.den.mul(&rhs.den),
            );
        }
        let e1 = self.den.div_exact(&g).unwrap();
        let e2 = rhs.den.div_exact(&g).unwrap();
        Rat::new(
            self.num.mul(&e2).add(&rhs.num.mul(&e1)),
            self.den.mul(&e2),
        )
    }
}

impl Sub for &Rat {
    type Output = Rat;
    fn sub(self, rhs: &Rat) -> Rat {
        self + &(-rhs)
    }
}

impl Mul for &Rat {
    type Output = Rat;
    fn mul(self, rhs: &Rat) -> Rat {
        if self.is_zero() || rhs.is_zero() {
            return Rat::zero(self.nvars());
        }
        // cross-reduce before multiplying to keep intermediates small
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let n1 = self.num.div_exact(&g1).unwrap();
        let d2 = rhs.den.div_exact(&g1).unwrap();
        let n2 = rhs.num.div_exact(&g2).unwrap();
        let d1 = self.den.div_exact(&g2).unwrap();
        Rat::new(n1.mul(&n2), d1.mul(&d2))
    }
}

impl Div for &Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        self * &rhs.inv()
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            debug_assert!(self.den.as_constant().map_or(false, |c| c.is_one()));
            return write!(f, "{}", self.num);
        }
        if self.num.terms.len() > 1 {
            write!(f, "({})/({})", self.num, self.den)
        } else {
            write!(f, "{}/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Mono;

    fn zzb1(nvars: usize) -> Poly {
        // 1 + z*zb
        let mut p = Poly::one(nvars);
        p.add_term(Mono(vec![1, 1]), Gauss::one());
        p
    }

    #[test]
    fn canonical_reduction() {
        let z = Rat::var(2, 0);
        let d = Rat::from_poly(zzb1(2));
        let f = &(&z * &d) / &d.pow(2);
        assert_eq!(f, &z / &d);
    }

    #[test]
    fn quotient_rule() {
        // d/dz 1/(1+z*zb) = -zb/(1+z*zb)^2, checked by clearing denominators
        let d = Rat::from_poly(zzb1(2));
        let f = d.inv();
        let df = f.derive(0);
        let zb = Rat::var(2, 1);
        let lhs = &df * &d.pow(2);
        assert_eq!(lhs, -&zb);
    }

    #[test]
    fn field_inverse() {
        let d = Rat::from_poly(zzb1(2));
        let f = &Rat::var(2, 0) / &d;
        assert!((&f * &f.inv()).is_one());
    }
}
