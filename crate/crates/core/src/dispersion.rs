//! Local permittivity models ε(ω) on the real and imaginary frequency axes.
//!
//! Four dielectric functions are supported, plus an ideal-metal limit used as
//! a reference (|ε| → ∞, r² ≡ 1):
//!
//! | kind              | ε(ω)                                                        |
//! |-------------------|-------------------------------------------------------------|
//! | `Drude`           | 1 − ω_p² / (ω(ω + iν))                                      |
//! | `SemiconductorDc` | 1 + (ε_∞ − 1)/(1 − ω²/ω₀² − iγω/ω₀²) + iσ/(ε₀ω)              |
//! | `Plasma`          | 1 − ω_p² / ω²                                               |
//! | `LorentzNoLoss`   | 1 + (ε_∞ − 1)/(1 − ω²/ω₀²)                                  |
//!
//! Temperature enters only through ν(T) or σ(T) (see [`TemperatureLaw`]).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::EPS_0;
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Drude,
    #[serde(rename = "semiconductor_dc")]
    SemiconductorDc,
    Plasma,
    LorentzNoLoss,
    IdealMetal,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Drude => "drude",
            ModelKind::SemiconductorDc => "semiconductor_dc",
            ModelKind::Plasma => "plasma",
            ModelKind::LorentzNoLoss => "lorentz_no_loss",
            ModelKind::IdealMetal => "ideal_metal",
        }
    }
}

/// Parameter record for one permittivity model. Only the fields relevant
/// to `kind` are read; the rest are carried along untouched.
///
/// All frequencies in rad/s, `sigma` in S/m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PermittivityModel {
    pub kind: ModelKind,
    pub omega_p: f64,
    pub nu: f64,
    pub eps_inf: f64,
    pub omega_0: f64,
    pub gamma: f64,
    pub sigma: f64,
}

/// How ε(iξ) behaves as ξ → 0⁺; decides the n = 0 Matsubara reflection
/// coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StaticLimit {
    /// ε(0) finite.
    Finite(f64),
    /// ε ~ B/ξ: ξ²ε → 0 but ε → ∞ (dissipative conductor).
    FirstOrderPole,
    /// ε ~ ω_p²/ξ²: ξ²ε → ω_p² (dissipationless conductor).
    SecondOrderPole { omega_p: f64 },
    /// r_TE² = r_TM² = 1 at every frequency.
    PerfectMirror,
}

impl PermittivityModel {
    const BLANK: PermittivityModel = PermittivityModel {
        kind: ModelKind::Drude,
        omega_p: 0.0,
        nu: 0.0,
        eps_inf: 1.0,
        omega_0: 0.0,
        gamma: 0.0,
        sigma: 0.0,
    };

    pub fn drude(omega_p: f64, nu: f64) -> Self {
        Self {
            kind: ModelKind::Drude,
            omega_p,
            nu,
            ..Self::BLANK
        }
    }

    pub fn semiconductor(eps_inf: f64, omega_0: f64, gamma: f64, sigma: f64) -> Self {
        Self {
            kind: ModelKind::SemiconductorDc,
            eps_inf,
            omega_0,
            gamma,
            sigma,
            ..Self::BLANK
        }
    }

    pub fn plasma(omega_p: f64) -> Self {
        Self {
            kind: ModelKind::Plasma,
            omega_p,
            ..Self::BLANK
        }
    }

    pub fn lorentz_no_loss(eps_inf: f64, omega_0: f64) -> Self {
        Self {
            kind: ModelKind::LorentzNoLoss,
            eps_inf,
            omega_0,
            ..Self::BLANK
        }
    }

    pub fn ideal_metal() -> Self {
        Self {
            kind: ModelKind::IdealMetal,
            ..Self::BLANK
        }
    }

    /// Empty gap on both sides: ε ≡ 1.
    pub fn vacuum() -> Self {
        Self::lorentz_no_loss(1.0, 1.0)
    }

    pub fn check(&self) -> Result<()> {
        let fields = [
            ("omega_p", self.omega_p),
            ("nu", self.nu),
            ("omega_0", self.omega_0),
            ("gamma", self.gamma),
            ("sigma", self.sigma),
        ];
        for (name, v) in fields {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidModel(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !(self.eps_inf >= 1.0 && self.eps_inf.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "eps_inf must be >= 1, got {}",
                self.eps_inf
            )));
        }
        if matches!(self.kind, ModelKind::SemiconductorDc | ModelKind::LorentzNoLoss)
            && self.omega_0 <= 0.0
            && self.eps_inf != 1.0
        {
            return Err(Error::InvalidModel("omega_0 must be > 0".into()));
        }
        Ok(())
    }

    /// ε ≡ 1 identically.
    pub fn is_vacuum(&self) -> bool {
        match self.kind {
            ModelKind::Drude | ModelKind::Plasma => self.omega_p == 0.0,
            ModelKind::SemiconductorDc => self.eps_inf == 1.0 && self.sigma == 0.0,
            ModelKind::LorentzNoLoss => self.eps_inf == 1.0,
            ModelKind::IdealMetal => false,
        }
    }

    /// Whether ε has a pole at ω = 0.
    pub fn singular_at_origin(&self) -> bool {
        matches!(
            self.static_limit(),
            StaticLimit::FirstOrderPole | StaticLimit::SecondOrderPole { .. } | StaticLimit::PerfectMirror
        )
    }

    pub fn static_limit(&self) -> StaticLimit {
        match self.kind {
            ModelKind::Drude if self.omega_p == 0.0 => StaticLimit::Finite(1.0),
            ModelKind::Drude if self.nu > 0.0 => StaticLimit::FirstOrderPole,
            ModelKind::Drude | ModelKind::Plasma if self.omega_p > 0.0 => StaticLimit::SecondOrderPole {
                omega_p: self.omega_p,
            },
            ModelKind::Drude | ModelKind::Plasma => StaticLimit::Finite(1.0),
            ModelKind::SemiconductorDc if self.sigma > 0.0 => StaticLimit::FirstOrderPole,
            ModelKind::SemiconductorDc | ModelKind::LorentzNoLoss => StaticLimit::Finite(self.eps_inf),
            ModelKind::IdealMetal => StaticLimit::PerfectMirror,
        }
    }

    /// Exponent of the leading low-frequency term of ε − 1 (ω^k), or `None`
    /// for the ideal metal.
    pub fn low_frequency_exponent(&self) -> Option<i32> {
        match self.static_limit() {
            StaticLimit::Finite(_) => Some(0),
            StaticLimit::FirstOrderPole => Some(-1),
            StaticLimit::SecondOrderPole { .. } => Some(-2),
            StaticLimit::PerfectMirror => None,
        }
    }

    /// Frequency used to scale validation grids.
    pub fn characteristic_frequency(&self) -> f64 {
        let candidates = match self.kind {
            ModelKind::Drude | ModelKind::Plasma => [self.omega_p, self.nu, 0.0],
            ModelKind::SemiconductorDc => [self.omega_0, self.sigma / EPS_0, self.gamma],
            ModelKind::LorentzNoLoss => [self.omega_0, 0.0, 0.0],
            ModelKind::IdealMetal => [0.0; 3],
        };
        candidates
            .into_iter()
            .find(|&w| w > 0.0)
            .unwrap_or(1.0)
    }
}

/// ε(ω) at a complex frequency. ω = iξ gives the imaginary-axis value.
pub fn eval_real(model: &PermittivityModel, omega: Complex64) -> Result<Complex64> {
    if omega == Complex64::new(0.0, 0.0) {
        return match model.static_limit() {
            StaticLimit::Finite(e) => Ok(Complex64::new(e, 0.0)),
            _ => Err(Error::OriginSingular {
                model: model.kind.name(),
            }),
        };
    }
    let one = Complex64::new(1.0, 0.0);
    let eps = match model.kind {
        ModelKind::Drude => one - model.omega_p * model.omega_p / (omega * (omega + I * model.nu)),
        ModelKind::Plasma => one - model.omega_p * model.omega_p / (omega * omega),
        ModelKind::SemiconductorDc => {
            let w0sq = model.omega_0 * model.omega_0;
            let osc = if model.eps_inf == 1.0 {
                Complex64::new(0.0, 0.0)
            } else {
                (model.eps_inf - 1.0) / (one - omega * omega / w0sq - I * model.gamma * omega / w0sq)
            };
            one + osc + I * model.sigma / (EPS_0 * omega)
        }
        ModelKind::LorentzNoLoss => {
            if model.eps_inf == 1.0 {
                one
            } else {
                let w0sq = model.omega_0 * model.omega_0;
                one + (model.eps_inf - 1.0) / (one - omega * omega / w0sq)
            }
        }
        ModelKind::IdealMetal => {
            return Err(Error::InvalidModel(
                "ideal metal has no finite permittivity".into(),
            ))
        }
    };
    Ok(eps)
}

/// ε(iξ) for ξ > 0; real and ≥ 1. The ideal metal returns +∞.
pub fn eval_imag(model: &PermittivityModel, xi: f64) -> f64 {
    debug_assert!(xi > 0.0);
    match model.kind {
        ModelKind::Drude => 1.0 + model.omega_p * model.omega_p / (xi * (xi + model.nu)),
        ModelKind::Plasma => 1.0 + model.omega_p * model.omega_p / (xi * xi),
        ModelKind::SemiconductorDc => {
            let osc = if model.eps_inf == 1.0 {
                0.0
            } else {
                let w0sq = model.omega_0 * model.omega_0;
                (model.eps_inf - 1.0) / (1.0 + xi * xi / w0sq + model.gamma * xi / w0sq)
            };
            1.0 + osc + model.sigma / (EPS_0 * xi)
        }
        ModelKind::LorentzNoLoss => {
            if model.eps_inf == 1.0 {
                1.0
            } else {
                let w0sq = model.omega_0 * model.omega_0;
                1.0 + (model.eps_inf - 1.0) / (1.0 + xi * xi / w0sq)
            }
        }
        ModelKind::IdealMetal => f64::INFINITY,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawKind {
    #[serde(rename = "constant")]
    ConstantParam,
    #[serde(rename = "power_law")]
    PowerLawRelaxation,
    #[serde(rename = "activated")]
    ActivatedConductivity,
}

/// Temperature dependence of one model parameter.
///
/// * `PowerLawRelaxation`: ν(T) = ν_ref (T/T_ref)^p, a stand-in for the
///   Bloch-Grüneisen T⁵ regime.
/// * `ActivatedConductivity`: σ(T) = σ₀ exp(−T₀/T), σ(0) = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperatureLaw {
    pub kind: LawKind,
    pub nu_ref: f64,
    #[serde(rename = "T_ref")]
    pub t_ref: f64,
    pub p: f64,
    pub sigma_0: f64,
    #[serde(rename = "T_0")]
    pub t_0: f64,
}

impl Default for TemperatureLaw {
    fn default() -> Self {
        Self::constant()
    }
}

impl TemperatureLaw {
    pub fn constant() -> Self {
        Self {
            kind: LawKind::ConstantParam,
            nu_ref: 0.0,
            t_ref: 1.0,
            p: 5.0,
            sigma_0: 0.0,
            t_0: 0.0,
        }
    }

    pub fn power_law(nu_ref: f64, t_ref: f64, p: f64) -> Self {
        Self {
            kind: LawKind::PowerLawRelaxation,
            nu_ref,
            t_ref,
            p,
            ..Self::constant()
        }
    }

    pub fn activated(sigma_0: f64, t_0: f64) -> Self {
        Self {
            kind: LawKind::ActivatedConductivity,
            sigma_0,
            t_0,
            ..Self::constant()
        }
    }

    pub fn is_constant(&self) -> bool {
        self.kind == LawKind::ConstantParam
    }

    pub fn check(&self) -> Result<()> {
        match self.kind {
            LawKind::ConstantParam => Ok(()),
            LawKind::PowerLawRelaxation => {
                if self.nu_ref >= 0.0 && self.t_ref > 0.0 && self.p > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidModel(
                        "power law needs nu_ref >= 0, T_ref > 0, p > 0".into(),
                    ))
                }
            }
            LawKind::ActivatedConductivity => {
                if self.sigma_0 >= 0.0 && self.t_0 >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidModel(
                        "activated law needs sigma_0 >= 0, T_0 >= 0".into(),
                    ))
                }
            }
        }
    }

    /// Parameter value at T (ν for the power law, σ for the activated law).
    pub fn value(&self, temperature: f64) -> Option<f64> {
        match self.kind {
            LawKind::ConstantParam => None,
            LawKind::PowerLawRelaxation => {
                Some(self.nu_ref * (temperature / self.t_ref).powf(self.p))
            }
            LawKind::ActivatedConductivity => Some(if temperature <= 0.0 {
                0.0
            } else {
                self.sigma_0 * (-self.t_0 / temperature).exp()
            }),
        }
    }

    /// d(parameter)/dT.
    pub fn derivative(&self, temperature: f64) -> f64 {
        match self.kind {
            LawKind::ConstantParam => 0.0,
            LawKind::PowerLawRelaxation => {
                if temperature <= 0.0 {
                    return 0.0;
                }
                self.p * self.nu_ref * (temperature / self.t_ref).powf(self.p) / temperature
            }
            LawKind::ActivatedConductivity => {
                if temperature <= 0.0 {
                    return 0.0;
                }
                let sigma = self.sigma_0 * (-self.t_0 / temperature).exp();
                sigma * self.t_0 / (temperature * temperature)
            }
        }
    }

    /// (1/param) d(param)/dT.
    pub fn log_derivative(&self, temperature: f64) -> f64 {
        match self.kind {
            LawKind::ConstantParam => 0.0,
            LawKind::PowerLawRelaxation => self.p / temperature,
            LawKind::ActivatedConductivity => self.t_0 / (temperature * temperature),
        }
    }
}

/// Copy of `model` with the law's parameter evaluated at `temperature`.
pub fn apply_temperature(
    model: &PermittivityModel,
    law: &TemperatureLaw,
    temperature: f64,
) -> PermittivityModel {
    let mut out = *model;
    match (law.kind, law.value(temperature.max(0.0))) {
        (LawKind::PowerLawRelaxation, Some(nu)) => out.nu = nu,
        (LawKind::ActivatedConductivity, Some(sigma)) => out.sigma = sigma,
        _ => {}
    }
    out
}

/// ∂ε/∂T at complex frequency ω through the law's parameter.
pub fn d_eps_d_temperature(
    model: &PermittivityModel,
    law: &TemperatureLaw,
    temperature: f64,
    omega: Complex64,
) -> Complex64 {
    let dparam = law.derivative(temperature);
    if dparam == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let m = apply_temperature(model, law, temperature);
    match (law.kind, m.kind) {
        (LawKind::PowerLawRelaxation, ModelKind::Drude) => {
            let d = omega + I * m.nu;
            I * m.omega_p * m.omega_p / (omega * d * d) * dparam
        }
        (LawKind::ActivatedConductivity, ModelKind::SemiconductorDc) => {
            I / (EPS_0 * omega) * dparam
        }
        _ => Complex64::new(0.0, 0.0),
    }
}

/// ∂ε(iξ)/∂T, real.
pub fn d_eps_imag_d_temperature(
    model: &PermittivityModel,
    law: &TemperatureLaw,
    temperature: f64,
    xi: f64,
) -> f64 {
    let dparam = law.derivative(temperature);
    if dparam == 0.0 {
        return 0.0;
    }
    let m = apply_temperature(model, law, temperature);
    match (law.kind, m.kind) {
        (LawKind::PowerLawRelaxation, ModelKind::Drude) => {
            -m.omega_p * m.omega_p / (xi * (xi + m.nu) * (xi + m.nu)) * dparam
        }
        (LawKind::ActivatedConductivity, ModelKind::SemiconductorDc) => dparam / (EPS_0 * xi),
        _ => 0.0,
    }
}

/// Outcome of sampling a model against the causality criteria:
/// (1) ε(−ω*) = ε*(ω); (2) Im ε > 0 for real ω > 0; (3) ε finite and
/// continuous for real ω ≠ 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub model: ModelKind,
    pub grid_points: usize,
    pub symmetry_residual: f64,
    pub min_im_eps: f64,
    pub max_relative_jump: f64,
    pub all_finite: bool,
    pub criterion_symmetry: bool,
    pub criterion_dissipation: bool,
    pub criterion_continuity: bool,
}

impl ValidationReport {
    /// Criteria 1-3 all hold: with temperature-independent parameters this
    /// model cannot produce nonzero entropy at T = 0.
    pub fn nernst_safe(&self) -> bool {
        self.criterion_symmetry && self.criterion_dissipation && self.criterion_continuity
    }
}

pub const VALIDATION_POINTS: usize = 400;
pub const CONTINUITY_THRESHOLD: f64 = 1e-3;
const SYMMETRY_TOL: f64 = 1e-12;
const MAX_REFINE_DEPTH: u32 = 30;

/// Midpoint-interpolation defect on [ln ω_a, ln ω_b], refined by bisection
/// until it drops below the threshold. Returns the defect at the deepest
/// level reached; smooth segments converge, jumps and poles do not.
fn continuity_defect(model: &PermittivityModel, la: f64, lb: f64, depth: u32) -> f64 {
    let at = |l: f64| eval_real(model, Complex64::new(l.exp(), 0.0)).unwrap_or(Complex64::new(f64::NAN, 0.0));
    let lm = 0.5 * (la + lb);
    let (ea, em, eb) = (at(la), at(lm), at(lb));
    let scale = em.norm().max(ea.norm()).max(eb.norm()).max(1.0);
    let defect = (em - 0.5 * (ea + eb)).norm() / scale;
    if !defect.is_finite() {
        return f64::INFINITY;
    }
    if defect < CONTINUITY_THRESHOLD || depth >= MAX_REFINE_DEPTH {
        return defect;
    }
    continuity_defect(model, la, lm, depth + 1).max(continuity_defect(model, lm, lb, depth + 1))
}

/// Sample `model` on a log grid (10⁻⁶ … 10⁶ × characteristic frequency).
pub fn validate_model(model: &PermittivityModel) -> ValidationReport {
    let n = VALIDATION_POINTS;
    if model.kind == ModelKind::IdealMetal {
        return ValidationReport {
            model: model.kind,
            grid_points: 0,
            symmetry_residual: 0.0,
            min_im_eps: f64::NAN,
            max_relative_jump: f64::INFINITY,
            all_finite: false,
            criterion_symmetry: true,
            criterion_dissipation: false,
            criterion_continuity: false,
        };
    }
    let w_c = model.characteristic_frequency();
    let (l0, l1) = ((1e-6 * w_c).ln(), (1e6 * w_c).ln());
    let grid: Vec<f64> = (0..n)
        .map(|i| l0 + (l1 - l0) * i as f64 / (n - 1) as f64)
        .collect();

    let mut sym = 0.0f64;
    let mut min_im = f64::INFINITY;
    let mut all_finite = true;
    for &l in &grid {
        let w = l.exp();
        // Off-axis points exercise symmetry for complex ω too.
        for omega in [Complex64::new(w, 0.0), Complex64::new(w, 0.3 * w)] {
            let e = eval_real(model, omega).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            let mirrored = eval_real(model, -omega.conj()).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            if !(e.re.is_finite() && e.im.is_finite()) {
                all_finite = false;
                continue;
            }
            sym = sym.max((mirrored - e.conj()).norm() / e.norm().max(1.0));
            if omega.im == 0.0 {
                min_im = min_im.min(e.im);
            }
        }
    }
    let jump = grid
        .windows(2)
        .map(|w| continuity_defect(model, w[0], w[1], 0))
        .fold(0.0f64, f64::max);

    ValidationReport {
        model: model.kind,
        grid_points: n,
        symmetry_residual: sym,
        min_im_eps: min_im,
        max_relative_jump: jump,
        all_finite,
        criterion_symmetry: sym < SYMMETRY_TOL,
        criterion_dissipation: min_im > 0.0,
        criterion_continuity: all_finite && jump < CONTINUITY_THRESHOLD,
    }
}
