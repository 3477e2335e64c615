//! Chart models and their geometric tensors.
//!
//! A Kähler chart stores the metric matrix `ω_{αβ̄}` and the potential
//! derivative vector `∂ρ₀/∂z^α` as exact rational functions; everything else
//! (inverse metric, Christoffels, curvature, Ricci form, `∂ρ₁`) is derived.
//! A symplectic chart stores an antisymmetric `ω_{ij}` and the Christoffels
//! of a symplectic connection; the latter can be produced from any
//! torsion-free connection by the cubic averaging construction.
//!
//! Index conventions (cited by everything downstream):
//! `ω^{ν̄μ} ω_{μλ̄} = δ^ν̄_λ̄`, `Γ^ν_{αμ} = ω^{β̄ν} ∂_α ω_{μβ̄}`,
//! `R^ν_{αβ̄μ} = −∂̄_β Γ^ν_{αμ}`, and in real mode `Σ_j ω^{ij} ω_{jk} = δ^i_k`.

pub mod models;

use crate::gauss::Gauss;
use crate::ratfun::Rat;
use crate::weyl::{ConnectionView, HbarUse, Part, ProductKernel, WeylElement};
use crate::{VarKind, VarSpec};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChartError {
    #[error("metric matrix is not invertible (det ≡ 0)")]
    SingularMetric,
    #[error("matrix has wrong shape")]
    Shape,
    #[error("potential derivative is inconsistent: expected ω_{{αβ̄}} = -i·∂̄_β(∂ρ₀/∂z^α) at entry ({0},{1})")]
    PotentialMismatch(usize, usize),
    #[error("potential derivative vector is not a gradient: ∂_μ(∂ρ₀/∂z^α) ≠ ∂_α(∂ρ₀/∂z^μ) at ({0},{1})")]
    NotGradient(usize, usize),
    #[error("metric violates the reality convention at entry ({0},{1})")]
    NotReal(usize, usize),
    #[error("symplectic form is not antisymmetric at entry ({0},{1})")]
    NotAntisymmetric(usize, usize),
    #[error("symplectic form is not closed at index triple ({0},{1},{2})")]
    NotClosed(usize, usize, usize),
    #[error("connection has torsion at ({0},{1})")]
    Torsion(usize, usize),
    #[error("connection does not preserve the symplectic form at ({0},{1},{2})")]
    NotSymplectic(usize, usize, usize),
}

/// Invert a square matrix of rational functions by Gauss-Jordan
/// elimination; `None` when the determinant vanishes identically.
pub fn invert_matrix(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let nv = if n > 0 { m[0][0].nvars() } else { 0 };
    let mut a: Vec<Vec<Rat>> = m.to_vec();
    let mut inv: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rat::one(nv)
                    } else {
                        Rat::zero(nv)
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        let pinv = p.inv();
        for j in 0..n {
            a[col][j] = &a[col][j] * &pinv;
            inv[col][j] = &inv[col][j] * &pinv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for j in 0..n {
                a[r][j] = &a[r][j] - &(&factor * &a[col][j]);
                inv[r][j] = &inv[r][j] - &(&factor * &inv[col][j]);
            }
        }
    }
    Some(inv)
}

/// A Kähler chart with all derived tensors built.
#[derive(Clone, Debug)]
pub struct KahlerChart {
    pub name: String,
    pub n: usize,
    /// `ω_{αβ̄}`, row = unbarred index.
    pub omega: Vec<Vec<Rat>>,
    /// `∂ρ₀/∂z^α`.
    pub drho0: Vec<Rat>,
    /// `ω^{ν̄μ}`: `omega_inv[ν][μ]`, so that `ω^{ν̄μ} ω_{μλ̄} = δ^ν̄_λ̄`.
    pub omega_inv: Vec<Vec<Rat>>,
    /// `gamma[α][μ][ν] = Γ^ν_{αμ}`.
    pub gamma: Vec<Vec<Vec<Rat>>>,
    /// `gamma_bar[β][μ][ν] = Γ̄^ν̄_{β̄μ̄}` (full conjugate of `gamma`).
    pub gamma_bar: Vec<Vec<Vec<Rat>>>,
    /// `curv[α][β][μ][ν] = R^ν_{αβ̄μ}`.
    pub curv: Vec<Vec<Vec<Vec<Rat>>>>,
    /// `curv_bar[α][β][μ][ν] = R^ν̄_{αβ̄μ̄} = ∂_α Γ̄^ν̄_{β̄μ̄}`.
    pub curv_bar: Vec<Vec<Vec<Vec<Rat>>>>,
    /// `(ω₁)_{αβ̄} = -(i/2)·R^η_{αβ̄η}` (half the negative Ricci trace).
    pub omega1: Vec<Vec<Rat>>,
    /// `∂ρ₁/∂z^α = -(1/2)·ω^{ν̄μ} ∂_α ω_{μν̄}`.
    pub drho1: Vec<Rat>,
}

impl KahlerChart {
    pub fn vars(&self) -> VarSpec {
        VarSpec::kahler(self.n)
    }

    /// Full conjugation of a chart function: swaps `z^α ↔ z̄^α` and
    /// conjugates Gaussian coefficients. A ring involution.
    pub fn conjugate_fn(&self, f: &Rat) -> Rat {
        conjugate_fn(f, self.n)
    }

    /// Build a chart from the metric and the potential derivative,
    /// validating all invariants and deriving the tensor caches.
    pub fn new(
        name: &str,
        n: usize,
        omega: Vec<Vec<Rat>>,
        drho0: Vec<Rat>,
    ) -> Result<Self, ChartError> {
        let nv = 2 * n;
        if omega.len() != n || omega.iter().any(|r| r.len() != n) || drho0.len() != n {
            return Err(ChartError::Shape);
        }
        // ∂_μ drho0_α symmetric: the stored vector is a gradient
        for a in 0..n {
            for m in (a + 1)..n {
                if drho0[a].derive(m) != drho0[m].derive(a) {
                    return Err(ChartError::NotGradient(a, m));
                }
            }
        }
        // ω_{αβ̄} = -i ∂̄_β drho0_α
        let minus_i = Gauss::i_times(-1, 1);
        for a in 0..n {
            for b in 0..n {
                if drho0[a].derive(n + b).scale(&minus_i) != omega[a][b] {
                    return Err(ChartError::PotentialMismatch(a, b));
                }
            }
        }
        // reality: conj(ω_{αβ̄}) = -ω_{βᾱ}
        for a in 0..n {
            for b in 0..n {
                if conjugate_fn(&omega[a][b], n) != -&omega[b][a] {
                    return Err(ChartError::NotReal(a, b));
                }
            }
        }
        let omega_inv = invert_matrix(&omega).ok_or(ChartError::SingularMetric)?;

        // Γ^ν_{αμ} = ω^{β̄ν} ∂_α ω_{μβ̄}
        let mut gamma = vec![vec![vec![Rat::zero(nv); n]; n]; n];
        for alpha in 0..n {
            for mu in 0..n {
                for nu in 0..n {
                    let mut acc = Rat::zero(nv);
                    for beta in 0..n {
                        acc = &acc + &(&omega_inv[beta][nu] * &omega[mu][beta].derive(alpha));
                    }
                    gamma[alpha][mu][nu] = acc;
                }
            }
        }
        let mut gamma_bar = vec![vec![vec![Rat::zero(nv); n]; n]; n];
        for beta in 0..n {
            for mu in 0..n {
                for nu in 0..n {
                    gamma_bar[beta][mu][nu] = conjugate_fn(&gamma[beta][mu][nu], n);
                }
            }
        }
        // R^ν_{αβ̄μ} = -∂̄_β Γ^ν_{αμ}; conjugate block R^ν̄_{αβ̄μ̄} = ∂_α Γ̄^ν̄_{β̄μ̄}
        let mut curv = vec![vec![vec![vec![Rat::zero(nv); n]; n]; n]; n];
        let mut curv_bar = vec![vec![vec![vec![Rat::zero(nv); n]; n]; n]; n];
        for alpha in 0..n {
            for beta in 0..n {
                for mu in 0..n {
                    for nu in 0..n {
                        curv[alpha][beta][mu][nu] = -&gamma[alpha][mu][nu].derive(n + beta);
                        curv_bar[alpha][beta][mu][nu] = gamma_bar[beta][mu][nu].derive(alpha);
                    }
                }
            }
        }
        let minus_half_i = Gauss::i_times(-1, 2);
        let mut omega1 = vec![vec![Rat::zero(nv); n]; n];
        for alpha in 0..n {
            for beta in 0..n {
                let mut tr = Rat::zero(nv);
                for eta in 0..n {
                    tr = &tr + &curv[alpha][beta][eta][eta];
                }
                omega1[alpha][beta] = tr.scale(&minus_half_i);
            }
        }
        let mut drho1 = vec![Rat::zero(nv); n];
        for alpha in 0..n {
            let mut acc = Rat::zero(nv);
            for mu in 0..n {
                for nu in 0..n {
                    acc = &acc + &(&omega_inv[nu][mu] * &omega[mu][nu].derive(alpha));
                }
            }
            drho1[alpha] = acc.scale(&Gauss::from_ratio(-1, 2));
        }

        Ok(KahlerChart {
            name: name.to_string(),
            n,
            omega,
            drho0,
            omega_inv,
            gamma,
            gamma_bar,
            curv,
            curv_bar,
            omega1,
            drho1,
        })
    }

    /// The conjugate chart: same smooth chart with the opposite complex
    /// structure and the negated form. In stored terms
    /// `ω̌_{αβ̄} = -conj_coeffs(ω_{αβ̄})` and `∂ρ̌₀ = conj_coeffs(∂ρ₀)`.
    pub fn conjugate_chart(&self) -> Result<KahlerChart, ChartError> {
        let omega = self
            .omega
            .iter()
            .map(|row| row.iter().map(|e| -&e.conj_coeffs()).collect())
            .collect();
        let drho0 = self.drho0.iter().map(|e| e.conj_coeffs()).collect();
        KahlerChart::new(&format!("{}-conj", self.name), self.n, omega, drho0)
    }

    pub fn conn_view(&self) -> ConnectionView<'_> {
        ConnectionView {
            vars: self.vars(),
            gamma: &self.gamma,
            gamma_bar: Some(&self.gamma_bar),
        }
    }

    pub fn anti_wick_kernel(&self, hbar: HbarUse) -> ProductKernel {
        ProductKernel::anti_wick(self.vars(), &self.omega_inv, hbar)
    }

    pub fn moyal_kernel(&self, hbar: HbarUse) -> ProductKernel {
        ProductKernel::moyal_kahler(self.vars(), &self.omega_inv, hbar)
    }

    /// The Kähler form as a Weyl-valued 2-form.
    pub fn weyl_omega(&self, cap: u32) -> WeylElement {
        let vars = self.vars();
        let mut el = WeylElement::zero(vars, cap);
        for a in 0..self.n {
            for b in 0..self.n {
                let t = WeylElement::form_dz(vars, cap, a)
                    .wedge(&WeylElement::form_dzb(vars, cap, b))
                    .scale(&self.omega[a][b]);
                el = el.add(&t);
            }
        }
        el
    }

    /// The Ricci-type form `ω₁` as a Weyl-valued 2-form.
    pub fn weyl_omega1(&self, cap: u32) -> WeylElement {
        let vars = self.vars();
        let mut el = WeylElement::zero(vars, cap);
        for a in 0..self.n {
            for b in 0..self.n {
                let t = WeylElement::form_dz(vars, cap, a)
                    .wedge(&WeylElement::form_dzb(vars, cap, b))
                    .scale(&self.omega1[a][b]);
                el = el.add(&t);
            }
        }
        el
    }

    /// `ω̃ = -(δ^{0,1})⁻¹ω - (δ^{1,0})⁻¹ω`, the element with
    /// `δ = (1/ℏ)[ω̃, ·]` in both fibrewise products.
    pub fn weyl_omega_tilde(&self, cap: u32) -> WeylElement {
        let om = self.weyl_omega(cap);
        om.delta_inv(Part::Anti).add(&om.delta_inv(Part::Holo)).neg()
    }

    /// The Weyl-valued curvature
    /// `R = -ω_{ην̄} R^η_{αβ̄μ} dz^α∧dz̄^β ⊗ w^μ w̄^ν`,
    /// satisfying `∇² = (1/ℏ)[R, ·]` in both fibrewise products.
    pub fn weyl_curvature(&self, cap: u32) -> WeylElement {
        let vars = self.vars();
        let mut el = WeylElement::zero(vars, cap);
        for alpha in 0..self.n {
            for beta in 0..self.n {
                for mu in 0..self.n {
                    for nu in 0..self.n {
                        let mut coeff = Rat::zero(2 * self.n);
                        for eta in 0..self.n {
                            coeff =
                                &coeff + &(&self.omega[eta][nu] * &self.curv[alpha][beta][mu][eta]);
                        }
                        if coeff.is_zero() {
                            continue;
                        }
                        let t = WeylElement::fiber_w(vars, cap, mu)
                            .wedge(&WeylElement::fiber_wb(vars, cap, nu))
                            .wedge(&WeylElement::form_dz(vars, cap, alpha))
                            .wedge(&WeylElement::form_dzb(vars, cap, beta))
                            .scale(&(-&coeff));
                        el = el.add(&t);
                    }
                }
            }
        }
        el
    }

    /// Poisson bracket of two chart functions:
    /// `{f, g} = ω^{ν̄μ}(∂̄_ν f ∂_μ g − ∂̄_ν g ∂_μ f)`. The orientation is
    /// pinned by the first-order commutator of the anti-Wick star product.
    pub fn poisson(&self, f: &Rat, g: &Rat) -> Rat {
        let n = self.n;
        let mut acc = Rat::zero(2 * n);
        for nu in 0..n {
            for mu in 0..n {
                if self.omega_inv[nu][mu].is_zero() {
                    continue;
                }
                let term = &(&f.derive(n + nu) * &g.derive(mu))
                    - &(&g.derive(n + nu) * &f.derive(mu));
                acc = &acc + &(&self.omega_inv[nu][mu] * &term);
            }
        }
        acc
    }
}

/// Full conjugation of a chart function on an `n`-dimensional Kähler chart.
pub fn conjugate_fn(f: &Rat, n: usize) -> Rat {
    let swap: Vec<usize> = (0..2 * n).map(|j| (j + n) % (2 * n)).collect();
    f.rename_vars(&swap, 2 * n).conj_coeffs()
}

/// A real or holomorphic symplectic chart with a symplectic connection.
#[derive(Clone, Debug)]
pub struct SymplecticChart {
    pub name: String,
    pub kind: VarKind,
    pub dim: usize,
    /// Antisymmetric `ω_{ij}` with `ω = (1/2) ω_{ij} dx^i ∧ dx^j`.
    pub omega: Vec<Vec<Rat>>,
    /// `Σ_j ω^{ij} ω_{jk} = δ^i_k`.
    pub omega_inv: Vec<Vec<Rat>>,
    /// `gamma[i][j][k] = Γ^k_{ij}`, torsion-free, `∇ω = 0`.
    pub gamma: Vec<Vec<Vec<Rat>>>,
}

impl SymplecticChart {
    pub fn vars(&self) -> VarSpec {
        VarSpec {
            kind: self.kind,
            n: self.dim,
        }
    }

    pub fn new(
        name: &str,
        kind: VarKind,
        dim: usize,
        omega: Vec<Vec<Rat>>,
        gamma: Vec<Vec<Vec<Rat>>>,
    ) -> Result<Self, ChartError> {
        if omega.len() != dim || omega.iter().any(|r| r.len() != dim) {
            return Err(ChartError::Shape);
        }
        for i in 0..dim {
            for j in 0..dim {
                if omega[i][j] != -&omega[j][i] {
                    return Err(ChartError::NotAntisymmetric(i, j));
                }
            }
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                for k in (j + 1)..dim {
                    let cyc = &(&omega[j][k].derive(i) + &omega[k][i].derive(j))
                        + &omega[i][j].derive(k);
                    if !cyc.is_zero() {
                        return Err(ChartError::NotClosed(i, j, k));
                    }
                }
            }
        }
        let omega_inv = invert_matrix(&omega).ok_or(ChartError::SingularMetric)?;
        for i in 0..dim {
            for j in 0..dim {
                if gamma[i][j] != gamma[j][i] {
                    return Err(ChartError::Torsion(i, j));
                }
            }
        }
        // ∇ω = 0: ∂_i ω_{jk} − Γ^l_{ij} ω_{lk} − Γ^l_{ik} ω_{jl} = 0
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let mut v = omega[j][k].derive(i);
                    for l in 0..dim {
                        v = &v - &(&gamma[i][j][l] * &omega[l][k]);
                        v = &v - &(&gamma[i][k][l] * &omega[j][l]);
                    }
                    if !v.is_zero() {
                        return Err(ChartError::NotSymplectic(i, j, k));
                    }
                }
            }
        }
        Ok(SymplecticChart {
            name: name.to_string(),
            kind,
            dim,
            omega,
            omega_inv,
            gamma,
        })
    }

    pub fn conn_view(&self) -> ConnectionView<'_> {
        ConnectionView {
            vars: self.vars(),
            gamma: &self.gamma,
            gamma_bar: None,
        }
    }

    pub fn moyal_kernel(&self, hbar: HbarUse) -> ProductKernel {
        ProductKernel::moyal_full(self.vars(), &self.omega_inv, hbar)
    }

    pub fn weyl_omega(&self, cap: u32) -> WeylElement {
        let vars = self.vars();
        let mut el = WeylElement::zero(vars, cap);
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                let t = WeylElement::form_dz(vars, cap, i)
                    .wedge(&WeylElement::form_dz(vars, cap, j))
                    .scale(&self.omega[i][j]);
                el = el.add(&t);
            }
        }
        el
    }

    /// `ω̃ = -2 δ⁻¹ ω`, with `δ = (1/ℏ)[ω̃, ·]` in the Moyal product.
    pub fn weyl_omega_tilde(&self, cap: u32) -> WeylElement {
        self.weyl_omega(cap).delta_inv(Part::Full).scale(&Rat::constant(
            self.dim,
            Gauss::from_int(-2),
        ))
    }

    /// Weyl-valued curvature `R = (1/2) ω_{am} F^m_j y^a y^j` built from the
    /// curvature 2-form `F` of the connection; `∇² = (1/ℏ)[R, ·]`.
    pub fn weyl_curvature(&self, cap: u32) -> WeylElement {
        let vars = self.vars();
        let d = self.dim;
        let mut el = WeylElement::zero(vars, cap);
        for j in 0..d {
            for m in 0..d {
                // F^m_{j,kl} for k<l
                for k in 0..d {
                    for l in (k + 1)..d {
                        let mut f = &self.gamma[l][j][m].derive(k) - &self.gamma[k][j][m].derive(l);
                        for p in 0..d {
                            f = &f + &(&self.gamma[k][p][m] * &self.gamma[l][j][p]);
                            f = &f - &(&self.gamma[l][p][m] * &self.gamma[k][j][p]);
                        }
                        if f.is_zero() {
                            continue;
                        }
                        for a in 0..d {
                            let coeff =
                                (&self.omega[a][m] * &f).scale(&Gauss::from_ratio(1, 2));
                            if coeff.is_zero() {
                                continue;
                            }
                            let t = WeylElement::fiber_w(vars, cap, a)
                                .wedge(&WeylElement::fiber_w(vars, cap, j))
                                .wedge(&WeylElement::form_dz(vars, cap, k))
                                .wedge(&WeylElement::form_dz(vars, cap, l))
                                .scale(&coeff);
                            el = el.add(&t);
                        }
                    }
                }
            }
        }
        el
    }

    /// Poisson bracket `{f, g} = ω^{ij} ∂_i f ∂_j g`, oriented to match the
    /// first-order Moyal commutator.
    pub fn poisson(&self, f: &Rat, g: &Rat) -> Rat {
        let mut acc = Rat::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                if self.omega_inv[i][j].is_zero() {
                    continue;
                }
                acc = &acc + &(&self.omega_inv[i][j] * &(&f.derive(i) * &g.derive(j)));
            }
        }
        acc
    }
}

/// The symplectic connection obtained from a torsion-free connection by
/// `∇_X Y = ∇⁰_X Y + (1/3)(N(X,Y) + N(Y,X))`, where
/// `(∇⁰_X ω)(Y,Z) = ω(N(X,Y), Z)`.
pub fn symplectic_connection(
    omega: &[Vec<Rat>],
    omega_inv: &[Vec<Rat>],
    gamma0: &[Vec<Vec<Rat>>],
) -> Vec<Vec<Vec<Rat>>> {
    let d = omega.len();
    let nv = omega[0][0].nvars();
    // T_{ijk} = (∇⁰_i ω)(∂_j, ∂_k)
    let mut t = vec![vec![vec![Rat::zero(nv); d]; d]; d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let mut v = omega[j][k].derive(i);
                for l in 0..d {
                    v = &v - &(&gamma0[i][j][l] * &omega[l][k]);
                    v = &v - &(&gamma0[i][k][l] * &omega[j][l]);
                }
                t[i][j][k] = v;
            }
        }
    }
    // N^m_{ij} from N^l_{ij} ω_{lk} = T_{ijk}
    let mut nn = vec![vec![vec![Rat::zero(nv); d]; d]; d];
    for i in 0..d {
        for j in 0..d {
            for m in 0..d {
                let mut v = Rat::zero(nv);
                for k in 0..d {
                    v = &v + &(&t[i][j][k] * &omega_inv[k][m]);
                }
                nn[i][j][m] = v;
            }
        }
    }
    let third = Gauss::from_ratio(1, 3);
    let mut gamma = vec![vec![vec![Rat::zero(nv); d]; d]; d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                gamma[i][j][k] =
                    &gamma0[i][j][k] + &(&nn[i][j][k] + &nn[j][i][k]).scale(&third);
            }
        }
    }
    gamma
}

/// Reinterpret a Kähler chart as the underlying real symplectic chart in
/// the coordinates `(x^α, x^{n+α}) = (z^α, z̄^α)`; the variable slots are
/// unchanged, so coefficients carry over verbatim.
pub fn realify(kc: &KahlerChart) -> Result<SymplecticChart, ChartError> {
    symplectic_from_kahler(kc, VarKind::Real, &format!("{}-real", kc.name))
}

/// The holomorphic-chart extension of a Kähler chart: the same rational
/// data read over `2n` independent variables `u^1..u^{2n}`.
pub fn complexify(kc: &KahlerChart) -> Result<SymplecticChart, ChartError> {
    symplectic_from_kahler(kc, VarKind::Holo, &format!("{}-cx", kc.name))
}

fn symplectic_from_kahler(
    kc: &KahlerChart,
    kind: VarKind,
    name: &str,
) -> Result<SymplecticChart, ChartError> {
    let n = kc.n;
    let d = 2 * n;
    let nv = d;
    let mut omega = vec![vec![Rat::zero(nv); d]; d];
    for a in 0..n {
        for b in 0..n {
            omega[a][n + b] = kc.omega[a][b].clone();
            omega[n + b][a] = -&kc.omega[a][b];
        }
    }
    let mut gamma = vec![vec![vec![Rat::zero(nv); d]; d]; d];
    for alpha in 0..n {
        for mu in 0..n {
            for nu in 0..n {
                gamma[alpha][mu][nu] = kc.gamma[alpha][mu][nu].clone();
                gamma[n + alpha][n + mu][n + nu] = kc.gamma_bar[alpha][mu][nu].clone();
            }
        }
    }
    SymplecticChart::new(name, kind, d, omega, gamma)
}
