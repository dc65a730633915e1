//! TOML run configuration.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::expr::{parse, AnalyticExpr};
use crate::hypotheses::{Problem, EXP_MAP};
use crate::picard::{LensOptions, SolverOptions};

/// A number or a constant expression such as `"0.1 + 0.2*i"`.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Expr(String),
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::Number(0.0)
    }
}

impl Scalar {
    pub fn value(&self) -> Result<Complex64, String> {
        match self {
            Scalar::Number(v) => Ok(Complex64::new(*v, 0.0)),
            Scalar::Expr(s) => {
                let e = parse(s).map_err(|e| format!("lambda: {e}"))?;
                if !e.is_constant() {
                    return Err(format!("lambda must not depend on x: {s}"));
                }
                e.eval(Complex64::new(0.0, 0.0))
                    .map_err(|e| format!("lambda: {e}"))
            }
        }
    }
}

fn one() -> f64 {
    1.0
}

fn default_psi() -> String {
    EXP_MAP.into()
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub alpha: f64,
    #[serde(default)]
    pub lambda: Scalar,
    pub a: String,
    pub b: String,
    #[serde(default = "default_psi")]
    pub psi: String,
    pub phi: String,
    #[serde(default = "one")]
    pub alpha0: f64,
    #[serde(default = "one")]
    pub beta0: f64,
    #[serde(default = "one")]
    pub k: f64,
    #[serde(default = "one")]
    pub sigma: f64,
}

fn expr(field: &str, s: &str) -> Result<AnalyticExpr, String> {
    parse(s).map_err(|e| format!("problem.{field}: {e}"))
}

impl ProblemConfig {
    pub fn build(&self) -> Result<Problem, String> {
        Problem::new(
            self.alpha,
            self.lambda.value()?,
            expr("a", &self.a)?,
            expr("b", &self.b)?,
            expr("psi", &self.psi)?,
            expr("phi", &self.phi)?,
            self.alpha0,
            self.beta0,
            self.k,
            self.sigma,
        )
        .map_err(|e| e.to_string())
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub grid_size: usize,
    pub quad_order: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = SolverOptions::default();
        Self {
            tol: d.tol,
            max_iter: d.max_iter,
            grid_size: d.grid_size,
            quad_order: d.quad_order,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct LensConfig {
    pub d: f64,
    pub n_max: u32,
    pub boundary_samples: usize,
    pub radial: usize,
    pub angular: usize,
}

impl Default for LensConfig {
    fn default() -> Self {
        let d = LensOptions::default();
        Self {
            d: 0.0,
            n_max: d.n_max,
            boundary_samples: d.samples_per_arc,
            radial: d.radial,
            angular: d.angular,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub solution_csv_path: Option<PathBuf>,
    pub certificate_path: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: Option<ProblemConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub lens: LensConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_toml(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Range checks that need no computation.
    pub fn validate(&self) -> Result<(), String> {
        if let Some(p) = &self.problem {
            if !(p.alpha > 0.0 && p.alpha < 1.0) {
                return Err(format!("problem.alpha must lie in (0, 1), got {}", p.alpha));
            }
            for (name, v) in [
                ("alpha0", p.alpha0),
                ("beta0", p.beta0),
                ("k", p.k),
                ("sigma", p.sigma),
            ] {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(format!("problem.{name} must be positive, got {v}"));
                }
            }
        }
        let s = &self.solver;
        if !(s.tol > 0.0) {
            return Err(format!("solver.tol must be positive, got {}", s.tol));
        }
        if s.max_iter == 0 || s.grid_size < 2 || s.quad_order == 0 {
            return Err("solver needs max_iter >= 1, grid_size >= 2, quad_order >= 1".into());
        }
        let l = &self.lens;
        if !(l.d > -1.0 && l.d < 1.0) {
            return Err(format!("lens.d must lie in (-1, 1), got {}", l.d));
        }
        if l.n_max < 2 || l.boundary_samples < 2 || l.radial < 2 || l.angular < 2 {
            return Err("lens needs n_max >= 2 and at least 2 samples/nodes".into());
        }
        Ok(())
    }

    pub fn solver_options(&self, seed: u64) -> SolverOptions {
        let s = &self.solver;
        SolverOptions {
            tol: s.tol,
            max_iter: s.max_iter,
            grid_size: s.grid_size,
            quad_order: s.quad_order,
            seed,
        }
    }

    pub fn lens_options(&self, quad_order: usize) -> LensOptions {
        let l = &self.lens;
        LensOptions {
            n_max: l.n_max,
            quad_order,
            radial: l.radial,
            angular: l.angular,
            samples_per_arc: l.boundary_samples,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let cfg = RunConfig::from_toml(
            r#"
            [problem]
            alpha = 0.5
            lambda = "0.1 + 0.2*i"
            a = "0.05*(x+1)"
            b = "0.1*sin(x+1)"
            phi = "sin(x)"
            [solver]
            tol = 1e-10
            [lens]
            d = 0.25
            [outputs]
            certificate_path = "c.json"
            "#,
        )
        .unwrap();
        let p = cfg.problem.as_ref().unwrap().build().unwrap();
        assert_eq!(p.lambda, Complex64::new(0.1, 0.2));
        assert_eq!(
            p.psi.to_string(),
            crate::expr::parse(EXP_MAP).unwrap().to_string()
        );
        assert_eq!(cfg.solver.tol, 1e-10);
        assert_eq!(cfg.solver.grid_size, 129);
        assert_eq!(cfg.lens.d, 0.25);
        assert_eq!(cfg.outputs.certificate_path, Some(PathBuf::from("c.json")));
    }

    #[test]
    fn rejects_bad_ranges_and_keys() {
        let base = "[problem]\na = \"0\"\nb = \"0\"\nphi = \"x\"\n";
        assert!(RunConfig::from_toml(&format!("{base}alpha = 1.5\n")).is_err());
        assert!(RunConfig::from_toml(&format!("{base}alpha = 0.5\nsigma = 0\n")).is_err());
        assert!(RunConfig::from_toml(&format!("{base}alpha = 0.5\n[solver]\ntol = -1\n")).is_err());
        assert!(RunConfig::from_toml(&format!("{base}alpha = 0.5\nbogus = 1\n")).is_err());
        assert!(
            RunConfig::from_toml(&format!("{base}alpha = 0.5\nlambda = \"x\"\n"))
                .unwrap()
                .problem
                .unwrap()
                .build()
                .is_err()
        );
    }
}
