//! Run configuration: one TOML file with one level of sections.
//!
//! ```toml
//! command = "entropy-scan"
//!
//! [cavity]
//! gap_um = 1.0
//! T_K = 300.0
//!
//! [model]
//! kind = "drude"
//! omega_p = 1.37e16
//! nu = 5.3e13
//!
//! [plan]
//! engine = "matsubara"
//! ```
//!
//! Unknown keys are rejected. [`RunConfig::resolve`] fills every default in,
//! and the resolved form is what artifacts embed in their header.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::dispersion::{LawKind, ModelKind, PermittivityModel, TemperatureLaw};
use crate::error::{Error, Result};
use crate::matsubara::{CavityConfig, MatsubaraPlan, TailStrategy};
use crate::realaxis::RealAxisPlan;
use crate::thermo::{default_t_min, Engine, Plans};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    FreeEnergy,
    EntropyScan,
    IntegrandDump,
    CrossCheck,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    /// (x, t, H, I) grid.
    Fig1,
    /// (x, s, Re r²_TM, Im r²_TM) grid.
    Fig2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct CavitySection {
    pub gap_um: f64,
    #[serde(default = "default_temperature")]
    pub T_K: f64,
}

fn default_temperature() -> f64 {
    300.0
}

/// Model and temperature law in one flat table. Frequencies in rad/s,
/// conductivities in S/m, temperatures in K.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct ModelSection {
    pub kind: ModelKind,
    #[serde(default)]
    pub omega_p: f64,
    #[serde(default)]
    pub nu: f64,
    #[serde(default = "one")]
    pub eps_inf: f64,
    #[serde(default)]
    pub omega_0: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default = "constant_law")]
    pub law: LawKind,
    #[serde(default)]
    pub nu_ref: f64,
    #[serde(default = "one")]
    pub T_ref: f64,
    #[serde(default = "five")]
    pub p: f64,
    #[serde(default)]
    pub sigma_0: f64,
    #[serde(default)]
    pub T_0: f64,
}

fn one() -> f64 {
    1.0
}

fn five() -> f64 {
    5.0
}

fn constant_law() -> LawKind {
    LawKind::ConstantParam
}

impl ModelSection {
    pub fn model(&self) -> PermittivityModel {
        PermittivityModel {
            kind: self.kind,
            omega_p: self.omega_p,
            nu: self.nu,
            eps_inf: self.eps_inf,
            omega_0: self.omega_0,
            gamma: self.gamma,
            sigma: self.sigma,
        }
    }

    pub fn law(&self) -> TemperatureLaw {
        TemperatureLaw {
            kind: self.law,
            nu_ref: self.nu_ref,
            t_ref: self.T_ref,
            p: self.p,
            sigma_0: self.sigma_0,
            t_0: self.T_0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct PlanSection {
    #[serde(default = "default_engine")]
    pub engine: Engine,
    /// Relative tolerance of the Matsubara sum.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rel_tol: Option<f64>,
    /// Relative tolerance of the real-axis frequency integral.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub real_rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_terms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tail: Option<TailStrategy>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub T_min_K: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub T_max_K: Option<f64>,
    #[serde(default = "default_n_t")]
    pub n_T: usize,
    /// Also evaluate S by the real-axis integrals in an entropy scan.
    #[serde(default)]
    pub with_integral: bool,
}

fn default_engine() -> Engine {
    Engine::Matsubara
}

fn default_n_t() -> usize {
    15
}

impl Default for PlanSection {
    fn default() -> Self {
        Self {
            engine: default_engine(),
            rel_tol: None,
            real_rel_tol: None,
            max_terms: None,
            tail: None,
            T_min_K: None,
            T_max_K: None,
            n_T: default_n_t(),
            with_integral: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpSection {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub figure: Option<Figure>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_x: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x_scale: Option<Scale>,
    /// Reduced temperatures for fig1.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<Vec<f64>>,
    /// Reduced conductivities for fig2.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub s: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eps_inf: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub path: Option<PathBuf>,
    #[serde(default = "default_format")]
    pub format: Format,
}

fn default_format() -> Format {
    Format::Csv
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            path: None,
            format: default_format(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub cavity: CavitySection,
    pub model: ModelSection,
    #[serde(default)]
    pub plan: PlanSection,
    #[serde(default)]
    pub dump: DumpSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Overrides taken from command-line flags.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub engine: Option<Engine>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {}", e.message())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Apply flags, fill every default in and check the physical inputs.
    pub fn resolve(mut self, ov: &Overrides) -> Result<Self> {
        if let Some(p) = &ov.out {
            self.output.path = Some(p.clone());
        }
        if let Some(f) = ov.format {
            self.output.format = f;
        }
        if let Some(e) = ov.engine {
            self.plan.engine = e;
        }
        let m = MatsubaraPlan::default();
        let r = RealAxisPlan::default();
        let plan = &mut self.plan;
        plan.rel_tol.get_or_insert(m.rel_tol);
        plan.real_rel_tol.get_or_insert(r.rel_tol);
        plan.max_terms.get_or_insert(m.max_terms);
        plan.tail.get_or_insert(m.tail_strategy);
        if self.command == Command::EntropyScan {
            let t_min = *plan.T_min_K.get_or_insert(default_t_min(self.cavity.gap_um * 1e-6));
            plan.T_max_K.get_or_insert(100.0 * t_min);
        }
        if self.command == Command::IntegrandDump {
            let d = &mut self.dump;
            let fig = *d
                .figure
                .get_or_insert(Figure::Fig1);
            match fig {
                Figure::Fig1 => {
                    d.x_min.get_or_insert(-3.0);
                    d.x_max.get_or_insert(3.0);
                    d.n_x.get_or_insert(121);
                    d.x_scale.get_or_insert(Scale::Linear);
                    d.t.get_or_insert_with(|| vec![0.01, 0.1, 0.25, 0.5, 1.0]);
                }
                Figure::Fig2 => {
                    d.x_min.get_or_insert(1e-3);
                    d.x_max.get_or_insert(1e3);
                    d.n_x.get_or_insert(121);
                    d.x_scale.get_or_insert(Scale::Log);
                    d.s.get_or_insert_with(|| vec![1.0]);
                    let eps = if self.model.eps_inf > 1.0 { self.model.eps_inf } else { 11.66 };
                    d.eps_inf.get_or_insert(eps);
                }
            }
        }
        self.check()?;
        Ok(self)
    }

    fn check(&self) -> Result<()> {
        self.cavity_config().check()?;
        self.plans().matsubara.check()?;
        self.plans().real_axis.check()?;
        if self.command == Command::EntropyScan && self.plan.n_T < 2 {
            return Err(Error::InvalidInput("plan.n_T must be >= 2".into()));
        }
        if self.command == Command::IntegrandDump {
            let d = &self.dump;
            let (lo, hi, n) = (d.x_min.unwrap(), d.x_max.unwrap(), d.n_x.unwrap());
            if !(lo < hi) || n < 2 || (d.x_scale == Some(Scale::Log) && lo <= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "dump grid needs x_min < x_max, n_x >= 2 and x_min > 0 on a log scale (got {lo}, {hi}, {n})"
                )));
            }
        }
        Ok(())
    }

    pub fn cavity_config(&self) -> CavityConfig {
        CavityConfig::new(self.cavity.gap_um * 1e-6, self.cavity.T_K, self.model.model()).with_law(self.model.law())
    }

    pub fn plans(&self) -> Plans {
        let mut m = MatsubaraPlan::default();
        let mut r = RealAxisPlan::default();
        if let Some(v) = self.plan.rel_tol {
            m.rel_tol = v;
        }
        if let Some(v) = self.plan.max_terms {
            m.max_terms = v;
        }
        if let Some(v) = self.plan.tail {
            m.tail_strategy = v;
        }
        if let Some(v) = self.plan.real_rel_tol {
            r.rel_tol = v;
        }
        r.energy = m;
        Plans {
            matsubara: m,
            real_axis: r,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
command = "free-energy"
[cavity]
gap_um = 1.0
[model]
kind = "drude"
omega_p = 1.37e16
nu = 5.3e13
"#;

    #[test]
    fn minimal_config_resolves_and_round_trips() {
        let cfg = RunConfig::parse(MINIMAL).unwrap().resolve(&Overrides::default()).unwrap();
        assert_eq!(cfg.cavity.T_K, 300.0);
        assert_eq!(cfg.plan.rel_tol, Some(1e-12));
        assert_eq!(cfg.model.law, LawKind::ConstantParam);
        let back = RunConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace("nu = 5.3e13", "nu = 5.3e13\ncolour = 1");
        assert!(RunConfig::parse(&text).is_err());
        let text = format!("{MINIMAL}\n[extra]\nx = 1\n");
        assert!(RunConfig::parse(&text).is_err());
    }

    #[test]
    fn overrides_win() {
        let ov = Overrides {
            engine: Some(Engine::RealAxis),
            format: Some(Format::Json),
            out: Some("x.json".into()),
        };
        let cfg = RunConfig::parse(MINIMAL).unwrap().resolve(&ov).unwrap();
        assert_eq!(cfg.plan.engine, Engine::RealAxis);
        assert_eq!(cfg.output.format, Format::Json);
        assert_eq!(cfg.output.path, Some("x.json".into()));
    }

    #[test]
    fn scan_range_defaults_to_geometric_scale() {
        let text = MINIMAL.replace("free-energy", "entropy-scan");
        let cfg = RunConfig::parse(&text).unwrap().resolve(&Overrides::default()).unwrap();
        let t_min = cfg.plan.T_min_K.unwrap();
        assert!((t_min - 1.1449).abs() < 1e-3);
        assert!((cfg.plan.T_max_K.unwrap() / t_min - 100.0).abs() < 1e-12);
    }

    #[test]
    fn bad_physics_is_a_config_error() {
        let text = MINIMAL.replace("gap_um = 1.0", "gap_um = -1.0");
        assert!(RunConfig::parse(&text).unwrap().resolve(&Overrides::default()).is_err());
    }
}
