//! Module and bimodule actions on line-bundle sections.
//!
//! Sections of the polarized line bundles are carried in a fixed local
//! frame `σ` with `∇σ = ∂(±kρ₀ + ρ₁)σ` (plus/minus variants) or
//! `∇σ = ∂(2kρ₀)σ` (the bimodule); only the frame coefficient — a Weyl
//! element constrained to the matching fiber subalgebra, with no ℏ — is
//! stored. The square-root canonical twists never appear as data: they
//! enter solely through the `∂ρ₁` contribution to the connection form.
//!
//! The fibrewise actions `⊛±` contract every barred symbol of the acting
//! element against unbarred derivatives of the section through `ω^{ν̄μ}`,
//! with a factor `ℏ^q` (plus) or `(−ℏ)^q` (minus); the minus action
//! differentiates the product with the acting element's unbarred part.
//! Conjugate-side objects live on the conjugate chart and act on shared
//! sections through the conjugation functor.

mod action;
mod line;

pub use action::{circledast, Sign};
pub use line::{Bimodule, LineModule, Variant};
