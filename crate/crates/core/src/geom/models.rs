//! Built-in chart models and ingestion of user model files.
//!
//! The four built-in Kähler charts:
//!
//! * `flat-c1`, `flat-c2` — flat ℂⁿ with `ω_{αβ̄} = -i·δ_{αβ}`; the real
//!   potential is `ρ₀ = Σ z^α z̄^α`, stored through `∂ρ₀/∂z^α = z̄^α`.
//! * `cp1` — the projective-line chart, `ρ₀ = log(1 + z z̄)`, so
//!   `∂ρ₀/∂z = z̄/(1+z z̄)` and `ω_{11̄} = -i/(1+z z̄)²`.
//! * `disk` — the hyperbolic disk, `ρ₀ = -log(1 - z z̄)`, so
//!   `∂ρ₀/∂z = z̄/(1-z z̄)` and `ω_{11̄} = -i/(1-z z̄)²`.
//!
//! A model file is JSON: `{ "name", "mode": "kahler", "n", "omega": [[expr]],
//! "drho0": [expr] }`, expressions in the grammar of [`crate::parse`].

use super::{ChartError, KahlerChart};
use crate::parse::{parse_expr, ParseError};
use crate::ratfun::Rat;
use crate::VarSpec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const BUILTIN_MODELS: [&str; 4] = ["flat-c1", "flat-c2", "cp1", "disk"];

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown model `{0}` (built-ins: flat-c1, flat-c2, cp1, disk)")]
    Unknown(String),
    #[error("model file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("model file field `{field}`: {err}")]
    Expr { field: String, err: ParseError },
    #[error("unsupported mode `{0}` (expected \"kahler\")")]
    Mode(String),
    #[error("invalid chart: {0}")]
    Chart(#[from] ChartError),
}

#[derive(Serialize, Deserialize)]
pub struct ModelFile {
    pub name: String,
    pub mode: String,
    pub n: usize,
    pub omega: Vec<Vec<String>>,
    pub drho0: Vec<String>,
}

/// Look up a built-in Kähler model by name.
pub fn builtin(name: &str) -> Result<KahlerChart, ModelError> {
    match name {
        "flat-c1" => Ok(flat_cn(1)),
        "flat-c2" => Ok(flat_cn(2)),
        "cp1" => Ok(fubini_study_chart()),
        "disk" => Ok(hyperbolic_disk_chart()),
        other => Err(ModelError::Unknown(other.to_string())),
    }
}

pub fn flat_cn(n: usize) -> KahlerChart {
    let vars = VarSpec::kahler(n);
    let nv = vars.nvars();
    let mut omega = vec![vec![Rat::zero(nv); n]; n];
    let mut drho0 = Vec::with_capacity(n);
    for a in 0..n {
        omega[a][a] = Rat::constant(nv, crate::gauss::Gauss::i_times(-1, 1));
        drho0.push(Rat::var(nv, n + a));
    }
    KahlerChart::new(&format!("flat-c{}", n), n, omega, drho0)
        .expect("flat chart data is consistent")
}

pub fn fubini_study_chart() -> KahlerChart {
    let vars = VarSpec::kahler(1);
    let omega = vec![vec![parse_expr("-i/(1+z1*zb1)^2", &vars).unwrap()]];
    let drho0 = vec![parse_expr("zb1/(1+z1*zb1)", &vars).unwrap()];
    KahlerChart::new("cp1", 1, omega, drho0).expect("projective chart data is consistent")
}

pub fn hyperbolic_disk_chart() -> KahlerChart {
    let vars = VarSpec::kahler(1);
    let omega = vec![vec![parse_expr("-i/(1-z1*zb1)^2", &vars).unwrap()]];
    let drho0 = vec![parse_expr("zb1/(1-z1*zb1)", &vars).unwrap()];
    KahlerChart::new("disk", 1, omega, drho0).expect("disk chart data is consistent")
}

/// Load and validate a user model from JSON text.
pub fn from_json(text: &str) -> Result<KahlerChart, ModelError> {
    let mf: ModelFile = serde_json::from_str(text)?;
    if mf.mode != "kahler" {
        return Err(ModelError::Mode(mf.mode));
    }
    let vars = VarSpec::kahler(mf.n);
    let field_err = |field: String| move |err: ParseError| ModelError::Expr { field, err };
    let mut omega = Vec::with_capacity(mf.n);
    for (a, row) in mf.omega.iter().enumerate() {
        let mut out = Vec::with_capacity(row.len());
        for (b, src) in row.iter().enumerate() {
            out.push(
                parse_expr(src, &vars).map_err(field_err(format!("omega[{}][{}]", a, b)))?,
            );
        }
        omega.push(out);
    }
    let mut drho0 = Vec::with_capacity(mf.n);
    for (a, src) in mf.drho0.iter().enumerate() {
        drho0.push(parse_expr(src, &vars).map_err(field_err(format!("drho0[{}]", a)))?);
    }
    Ok(KahlerChart::new(&mf.name, mf.n, omega, drho0)?)
}

/// Resolve a model by built-in name or `@path/to/file.json`.
pub fn resolve(name: &str) -> Result<KahlerChart, ModelError> {
    builtin(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::Gauss;

    #[test]
    fn builtins_validate() {
        for name in BUILTIN_MODELS {
            let chart = builtin(name).unwrap();
            assert_eq!(chart.name, name);
        }
    }

    #[test]
    fn flat_tensors_vanish() {
        let c = flat_cn(1);
        assert!(c.gamma[0][0][0].is_zero());
        assert!(c.curv[0][0][0][0].is_zero());
        assert!(c.omega1[0][0].is_zero());
        assert!(c.drho1[0].is_zero());
    }

    #[test]
    fn cp1_drho1_closed_form() {
        // ∂ρ₁/∂z = zb/(1+z zb), same as ∂ρ₀ for this normalization
        let c = fubini_study_chart();
        let vars = VarSpec::kahler(1);
        let expect = parse_expr("zb1/(1+z1*zb1)", &vars).unwrap();
        assert_eq!(c.drho1[0], expect);
        // and equals -(∂_z ω_{11̄})/(2 ω_{11̄})
        let alt = &(-&c.omega[0][0].derive(0)) / &c.omega[0][0].scale(&Gauss::from_int(2));
        assert_eq!(c.drho1[0], alt);
    }

    #[test]
    fn disk_ricci_sign_opposite_to_cp1() {
        // ω₁ is a constant multiple of ω on both charts, with opposite signs
        let cp1 = fubini_study_chart();
        let disk = hyperbolic_disk_chart();
        let r_cp1 = &cp1.omega1[0][0] / &cp1.omega[0][0];
        let r_disk = &disk.omega1[0][0] / &disk.omega[0][0];
        let c1 = r_cp1.as_constant().expect("constant ratio on cp1");
        let c2 = r_disk.as_constant().expect("constant ratio on disk");
        assert_eq!(c1, -&c2);
        assert!(!c1.is_zero());
    }

    #[test]
    fn json_roundtrip_duplicates_cp1() {
        let text = r#"{
            "name": "cp1-copy",
            "mode": "kahler",
            "n": 1,
            "omega": [["-i/(1+z1*zb1)^2"]],
            "drho0": ["zb1/(1+z1*zb1)"]
        }"#;
        let chart = from_json(text).unwrap();
        let cp1 = fubini_study_chart();
        assert_eq!(chart.omega, cp1.omega);
        assert_eq!(chart.curv, cp1.curv);
    }

    #[test]
    fn json_rejects_singular_metric() {
        let text = r#"{
            "name": "bad",
            "mode": "kahler",
            "n": 1,
            "omega": [["0"]],
            "drho0": ["0"]
        }"#;
        assert!(matches!(
            from_json(text),
            Err(ModelError::Chart(ChartError::SingularMetric))
        ));
    }

    #[test]
    fn conjugate_chart_of_cp1() {
        let cp1 = fubini_study_chart();
        let conj = cp1.conjugate_chart().unwrap();
        // ω̌ = -conj_coeffs(ω): the cp1 entry is purely imaginary, so the
        // stored matrices coincide (the geometric forms differ by the
        // antiholomorphic coordinate flip)
        assert_eq!(conj.omega, cp1.omega);
        assert_eq!(conj.drho0, cp1.drho0);
        assert_eq!(conj.omega1, cp1.omega1);
        // conjugating twice returns the original chart data
        let back = conj.conjugate_chart().unwrap();
        assert_eq!(back.omega, cp1.omega);
    }
}
