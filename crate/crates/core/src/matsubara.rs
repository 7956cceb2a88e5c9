//! Imaginary-axis free energy: the Matsubara sum, the T = 0 energy and the
//! sum-minus-integral thermal correction.
//!
//! With y = 2aκ₀ the transverse-momentum integral at Matsubara frequency ξ
//! becomes
//!
//! ```text
//! ∫₀^∞ k dk Σ_q ln(1 − r_q² e^{−2κ₀a}) = g(y₀) / (4a²),
//! g(y₀) = ∫_{y₀}^∞ y Σ_q ln(1 − r_q² e^{−y}) dy,   y₀ = 2aξ/c,
//! ```
//!
//! so that with τ = 4πa k_B T/(ħc)
//!
//! ```text
//! F(a, T) = k_B T/(8πa²) Σ′_{n≥0} g(nτ),     E(a) = ħc/(32π²a³) ∫₀^∞ g(y₀) dy₀.
//! ```
//!
//! g is evaluated with a fixed graded Gauss-Legendre rule, never an adaptive
//! one, so its discretisation error varies smoothly with y₀ and T.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{C, HBAR, K_B};
use crate::dispersion::{
    apply_temperature, d_eps_imag_d_temperature, eval_imag, PermittivityModel, StaticLimit,
    TemperatureLaw,
};
use crate::error::{Error, Result};
use crate::kernel::{d_reflection_squares_d_eps_imag, reflection_squares_imag};
use crate::quad::{gauss_legendre, pairwise_sum, Estimate, GradedRule};

use std::f64::consts::PI;

/// Parallel plates of one material separated by a vacuum gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityConfig {
    /// Gap width a, m.
    pub gap: f64,
    /// Temperature, K.
    pub temperature: f64,
    pub model: PermittivityModel,
    pub law: TemperatureLaw,
}

impl CavityConfig {
    pub fn new(gap: f64, temperature: f64, model: PermittivityModel) -> Self {
        Self {
            gap,
            temperature,
            model,
            law: TemperatureLaw::constant(),
        }
    }

    pub fn with_law(mut self, law: TemperatureLaw) -> Self {
        self.law = law;
        self
    }

    pub fn at_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }

    pub fn with_gap(mut self, gap: f64) -> Self {
        self.gap = gap;
        self
    }

    /// ω_T = k_B T/ħ.
    pub fn thermal_frequency(&self) -> f64 {
        K_B * self.temperature / HBAR
    }

    /// Model with its temperature-dependent parameter evaluated at T.
    pub fn model_at_temperature(&self) -> PermittivityModel {
        apply_temperature(&self.model, &self.law, self.temperature)
    }

    /// Temperature scale ħc/(2a k_B).
    pub fn geometric_temperature(&self) -> f64 {
        HBAR * C / (2.0 * self.gap * K_B)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.gap > 0.0 && self.gap.is_finite()) {
            return Err(Error::InvalidInput(format!("gap must be > 0, got {}", self.gap)));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "temperature must be >= 0, got {}",
                self.temperature
            )));
        }
        self.model.check()?;
        self.law.check()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailStrategy {
    /// Stop once a geometric bound on the remaining terms is below tolerance.
    CutoffBound,
    /// Add the integral of the remaining terms (leading Euler-Maclaurin term).
    IntegralTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatsubaraPlan {
    pub rel_tol: f64,
    pub max_terms: usize,
    /// Gauss-Legendre order per panel of the k-integral (10 or 16).
    pub k_order: usize,
    pub tail_strategy: TailStrategy,
}

impl Default for MatsubaraPlan {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_terms: 1_000_000,
            k_order: 10,
            tail_strategy: TailStrategy::CutoffBound,
        }
    }
}

impl MatsubaraPlan {
    pub fn check(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-3) {
            return Err(Error::InvalidInput(format!(
                "rel_tol must lie in (0, 1e-3], got {}",
                self.rel_tol
            )));
        }
        if self.max_terms < 10 {
            return Err(Error::InvalidInput("max_terms must be >= 10".into()));
        }
        if !matches!(self.k_order, 10 | 16) {
            return Err(Error::InvalidInput("k_order must be 10 or 16".into()));
        }
        Ok(())
    }

    fn rule(&self) -> GradedRule {
        GradedRule {
            order: self.k_order,
            ..GradedRule::default()
        }
    }
}

/// Value with error estimate and the number of Matsubara terms used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreeEnergy {
    pub value: f64,
    pub error: f64,
    pub terms: usize,
}

/// Integration length in y beyond y₀: e^{−60} is far below double precision.
const Y_SPAN: f64 = 60.0;

/// Reflection squares on the imaginary axis as functions of y = 2aκ₀.
#[derive(Debug, Clone, Copy)]
enum ImagReflection {
    Vacuum,
    /// r² ≡ 1 from y₀ on.
    Mirror { y0: f64 },
    /// ξ > 0: ε(iξ) and y₀ = 2aξ/c.
    Dielectric { eps: f64, y0: f64 },
    /// ξ = 0 limits. `plasma` is 2aω_p/c for a dissipationless conductor.
    Static { plasma: Option<f64>, tm2: f64 },
}

impl ImagReflection {
    fn new(model: &PermittivityModel, gap: f64, xi: f64) -> Self {
        if model.is_vacuum() {
            return ImagReflection::Vacuum;
        }
        if xi > 0.0 {
            let eps = eval_imag(model, xi);
            if eps == f64::INFINITY {
                return ImagReflection::Mirror { y0: 2.0 * gap * xi / C };
            }
            return ImagReflection::Dielectric {
                eps,
                y0: 2.0 * gap * xi / C,
            };
        }
        match model.static_limit() {
            StaticLimit::PerfectMirror => ImagReflection::Mirror { y0: 0.0 },
            StaticLimit::Finite(e0) => ImagReflection::Static {
                plasma: None,
                tm2: ((e0 - 1.0) / (e0 + 1.0)).powi(2),
            },
            StaticLimit::FirstOrderPole => ImagReflection::Static {
                plasma: None,
                tm2: 1.0,
            },
            StaticLimit::SecondOrderPole { omega_p } => ImagReflection::Static {
                plasma: Some(2.0 * gap * omega_p / C),
                tm2: 1.0,
            },
        }
    }

    #[inline]
    fn squares(&self, y: f64) -> (f64, f64) {
        match *self {
            ImagReflection::Vacuum => (0.0, 0.0),
            ImagReflection::Mirror { .. } => (1.0, 1.0),
            ImagReflection::Dielectric { eps, y0 } => reflection_squares_imag(eps, y, y0),
            ImagReflection::Static { plasma, tm2 } => {
                let te = match plasma {
                    Some(p) => {
                        let den = y + y.hypot(p);
                        (p * p / (den * den)).powi(2)
                    }
                    None => 0.0,
                };
                (te, tm2)
            }
        }
    }

    fn start(&self) -> f64 {
        match *self {
            ImagReflection::Dielectric { y0, .. } | ImagReflection::Mirror { y0 } => y0,
            _ => 0.0,
        }
    }
}

/// ln(1 − r² e^{−y}), cancellation-free near y = 0 and for small r²e^{−y}.
#[inline]
fn ln_one_minus_r2_decay(r2: f64, y: f64) -> f64 {
    if r2 == 0.0 {
        return 0.0;
    }
    if y < 1.0 {
        ((1.0 - r2) - r2 * (-y).exp_m1()).ln()
    } else {
        (-r2 * (-y).exp()).ln_1p()
    }
}

/// Per-polarisation g(y₀) = ∫_{y₀}^∞ y ln(1 − r_q² e^{−y}) dy, (TE, TM).
fn g_split(refl: &ImagReflection, rule: &GradedRule) -> (f64, f64) {
    if matches!(refl, ImagReflection::Vacuum) {
        return (0.0, 0.0);
    }
    let lo = refl.start();
    let te = rule.integrate(|y| y * ln_one_minus_r2_decay(refl.squares(y).0, y), lo, lo + Y_SPAN);
    let tm = rule.integrate(|y| y * ln_one_minus_r2_decay(refl.squares(y).1, y), lo, lo + Y_SPAN);
    (te, tm)
}

fn g_total(refl: &ImagReflection, rule: &GradedRule) -> f64 {
    if matches!(refl, ImagReflection::Vacuum) {
        return 0.0;
    }
    let lo = refl.start();
    rule.integrate(
        |y| {
            let (te, tm) = refl.squares(y);
            y * (ln_one_minus_r2_decay(te, y) + ln_one_minus_r2_decay(tm, y))
        },
        lo,
        lo + Y_SPAN,
    )
}

/// g(y₀) for `model` at imaginary frequency ξ = c·y₀/(2a).
fn g_at(model: &PermittivityModel, gap: f64, y0: f64, rule: &GradedRule) -> f64 {
    let xi = y0 * C / (2.0 * gap);
    g_total(&ImagReflection::new(model, gap, xi), rule)
}

/// ∫₀^∞ k⊥ dk⊥ Σ_q ln(1 − r_q² e^{−2κ₀a}) at imaginary frequency ξ (m⁻²).
/// ξ = 0 uses the analytic static limits of the reflection coefficients.
pub fn k_integral(model: &PermittivityModel, gap: f64, xi: f64) -> f64 {
    let rule = GradedRule::default();
    g_total(&ImagReflection::new(model, gap, xi), &rule) / (4.0 * gap * gap)
}

/// Same as [`k_integral`], split into (TE, TM).
pub fn k_integral_split(model: &PermittivityModel, gap: f64, xi: f64) -> (f64, f64) {
    let rule = GradedRule::default();
    let (te, tm) = g_split(&ImagReflection::new(model, gap, xi), &rule);
    let s = 4.0 * gap * gap;
    (te / s, tm / s)
}

/// τ = 4πa k_B T/(ħc): spacing of y₀ between Matsubara terms.
pub fn matsubara_step(gap: f64, temperature: f64) -> f64 {
    4.0 * PI * gap * K_B * temperature / (HBAR * C)
}

const BLOCK: usize = 64;

/// Σ′ g(nτ) with truncation control. Returns (sum, tail error, terms).
fn matsubara_sum(
    model: &PermittivityModel,
    gap: f64,
    tau: f64,
    plan: &MatsubaraPlan,
) -> Result<(f64, f64, usize)> {
    let rule = plan.rule();
    let mut terms: Vec<f64> = Vec::new();
    loop {
        let start = terms.len();
        let block: Vec<f64> = (start..start + BLOCK)
            .into_par_iter()
            .map(|n| {
                let g = g_at(model, gap, n as f64 * tau, &rule);
                if n == 0 {
                    0.5 * g
                } else {
                    g
                }
            })
            .collect();
        terms.extend(block);
        let n = terms.len();
        let sum = pairwise_sum(&terms);
        let last = terms[n - 1];
        if last == 0.0 && terms[n - 2] == 0.0 {
            return Ok((sum, 0.0, n));
        }
        let ratio = (last / terms[n - 2]).abs();
        if ratio < 1.0 {
            let geometric = last.abs() * ratio / (1.0 - ratio);
            if geometric <= plan.rel_tol * sum.abs() {
                return Ok(match plan.tail_strategy {
                    TailStrategy::CutoffBound => (sum, geometric, n),
                    TailStrategy::IntegralTail => {
                        let lo = (n as f64 - 0.5) * tau;
                        let tail = rule.integrate(|y0| g_at(model, gap, y0, &rule), lo, lo + Y_SPAN) / tau;
                        (sum + tail, (tail - geometric.copysign(tail)).abs(), n)
                    }
                });
            }
        }
        if n >= plan.max_terms {
            return Err(Error::NoConverge {
                module: "matsubara",
                terms: n,
                last_rel: (last / sum).abs(),
            });
        }
    }
}

/// Relative discretisation error of the k-rule, estimated by comparing the
/// plan's rule against the other Gauss-Legendre order at a few frequencies.
fn k_rule_error(model: &PermittivityModel, gap: f64, y0s: &[f64], plan: &MatsubaraPlan) -> f64 {
    let rule = plan.rule();
    let other = GradedRule {
        order: if plan.k_order == 10 { 16 } else { 10 },
        ..rule
    };
    y0s.iter()
        .map(|&y0| {
            let a = g_at(model, gap, y0, &rule);
            let b = g_at(model, gap, y0, &other);
            if a == 0.0 {
                0.0
            } else {
                ((a - b) / a).abs()
            }
        })
        .fold(1e-15f64, f64::max)
}

/// Free energy per unit area F(a, T) in J/m² from the Matsubara sum.
/// The n = 0 term carries weight ½ and uses the static reflection limits.
pub fn free_energy_matsubara(cfg: &CavityConfig, plan: &MatsubaraPlan) -> Result<FreeEnergy> {
    cfg.check()?;
    plan.check()?;
    if cfg.temperature <= 0.0 {
        return Err(Error::InvalidInput("Matsubara sum needs T > 0".into()));
    }
    let model = cfg.model_at_temperature();
    let tau = matsubara_step(cfg.gap, cfg.temperature);
    let (sum, tail_err, terms) = matsubara_sum(&model, cfg.gap, tau, plan)?;
    let prefactor = K_B * cfg.temperature / (8.0 * PI * cfg.gap * cfg.gap);
    let quad = k_rule_error(&model, cfg.gap, &[0.0, tau], plan);
    Ok(FreeEnergy {
        value: prefactor * sum,
        error: prefactor * (tail_err + quad * sum.abs()),
        terms,
    })
}

/// Per-term k-integrals ∫k dk Σ_q ln(…) (m⁻²) for n = 0 … count−1, unweighted.
pub fn matsubara_terms(cfg: &CavityConfig, count: usize) -> Vec<f64> {
    let model = cfg.model_at_temperature();
    let xi1 = 2.0 * PI * K_B * cfg.temperature / HBAR;
    (0..count)
        .into_par_iter()
        .map(|n| k_integral(&model, cfg.gap, n as f64 * xi1))
        .collect()
}

/// Zero-temperature energy with the given (frozen) model, J/m².
pub fn energy_for_model(model: &PermittivityModel, gap: f64, plan: &MatsubaraPlan) -> Result<Estimate> {
    model.check()?;
    plan.check()?;
    if model.is_vacuum() {
        return Ok(Estimate::new(0.0, 0.0));
    }
    let rule = plan.rule();
    let integrate = |outer: &GradedRule| -> f64 {
        let edges = outer.edges(0.0, Y_SPAN);
        let (nodes, weights) = gauss_legendre(outer.order);
        let panels: Vec<f64> = edges
            .par_windows(2)
            .map(|w| {
                let c = 0.5 * (w[0] + w[1]);
                let h = 0.5 * (w[1] - w[0]);
                let s: f64 = nodes
                    .iter()
                    .zip(&weights)
                    .map(|(&x, &wt)| wt * g_at(model, gap, c + h * x, &rule))
                    .sum();
                s * h
            })
            .collect();
        pairwise_sum(&panels)
    };
    let primary = integrate(&rule);
    let check = integrate(&GradedRule {
        order: if rule.order == 10 { 16 } else { 10 },
        ..rule
    });
    let prefactor = HBAR * C / (32.0 * PI * PI * gap.powi(3));
    Ok(Estimate::new(
        prefactor * primary,
        prefactor * ((primary - check).abs() + 1e-15 * primary.abs()),
    ))
}

/// E(a) at T = 0: the law's parameter is frozen at its T = 0 value.
pub fn energy_zero_t(cfg: &CavityConfig, plan: &MatsubaraPlan) -> Result<Estimate> {
    cfg.check()?;
    let model = apply_temperature(&cfg.model, &cfg.law, 0.0);
    energy_for_model(&model, cfg.gap, plan)
}

/// Thermal correction F(T) − E computed cell by cell as the defect of the
/// trapezoidal rule (which is what the half-weighted Matsubara sum is):
///
/// ```text
/// F − E = ħc/(32π²a³) Σ_n [ τ(g(nτ) + g((n+1)τ))/2 − ∫_{nτ}^{(n+1)τ} g ].
/// ```
///
/// No large quantities are subtracted, so this is an independent route to
/// the difference of [`free_energy_matsubara`] and [`energy_for_model`].
/// The model is evaluated with its parameters at T.
pub fn abel_plana_correction(cfg: &CavityConfig, plan: &MatsubaraPlan) -> Result<Estimate> {
    cfg.check()?;
    plan.check()?;
    if cfg.temperature <= 0.0 {
        return Ok(Estimate::new(0.0, 0.0));
    }
    let model = cfg.model_at_temperature();
    if model.is_vacuum() {
        return Ok(Estimate::new(0.0, 0.0));
    }
    let gap = cfg.gap;
    let tau = matsubara_step(gap, cfg.temperature);
    let rule = plan.rule();
    let (nodes, weights) = gauss_legendre(plan.k_order);
    let cells = ((Y_SPAN / tau).ceil() as usize).max(1);
    if cells > plan.max_terms {
        return Err(Error::NoConverge {
            module: "matsubara",
            terms: plan.max_terms,
            last_rel: f64::NAN,
        });
    }
    let g_nodes: Vec<f64> = (0..=cells)
        .into_par_iter()
        .map(|n| g_at(&model, gap, n as f64 * tau, &rule))
        .collect();
    let defects: Vec<f64> = (0..cells)
        .into_par_iter()
        .map(|n| {
            let (a, b) = (n as f64 * tau, (n + 1) as f64 * tau);
            let integral = if n == 0 {
                rule.integrate(|y0| g_at(&model, gap, y0, &rule), a, b)
            } else {
                let c = 0.5 * (a + b);
                let h = 0.5 * (b - a);
                h * nodes
                    .iter()
                    .zip(&weights)
                    .map(|(&x, &w)| w * g_at(&model, gap, c + h * x, &rule))
                    .sum::<f64>()
            };
            0.5 * tau * (g_nodes[n] + g_nodes[n + 1]) - integral
        })
        .collect();
    let total = pairwise_sum(&defects);
    let scale: f64 = g_nodes.iter().map(|g| g.abs()).sum::<f64>() * tau;
    let prefactor = HBAR * C / (32.0 * PI * PI * gap.powi(3));
    Ok(Estimate::new(
        prefactor * total,
        prefactor * (1e-14 * scale + 1e-12 * total.abs()),
    ))
}

/// Explicit temperature derivative of the free energy through the law's
/// parameter, at fixed Bose/Matsubara weights, evaluated on the imaginary
/// axis at T = 0 weighting: ∂E(ε_T)/∂T (J/(K·m²)).
pub fn energy_parameter_derivative(cfg: &CavityConfig, plan: &MatsubaraPlan) -> Result<Estimate> {
    cfg.check()?;
    if cfg.law.is_constant() || cfg.temperature <= 0.0 {
        return Ok(Estimate::new(0.0, 0.0));
    }
    let model = cfg.model_at_temperature();
    let gap = cfg.gap;
    let rule = plan.rule();
    let t = cfg.temperature;
    // d/dT of g(y₀): ∫ y Σ_q −e^{−y} ∂(r_q²)/∂T / (1 − r_q² e^{−y}) dy
    let dg = |y0: f64| -> f64 {
        if y0 <= 0.0 {
            return 0.0;
        }
        let xi = y0 * C / (2.0 * gap);
        let eps = eval_imag(&model, xi);
        let deps = d_eps_imag_d_temperature(&cfg.model, &cfg.law, t, xi);
        if deps == 0.0 || eps == f64::INFINITY {
            return 0.0;
        }
        rule.integrate(
            |y| {
                let (te, tm) = reflection_squares_imag(eps, y, y0);
                let (dte, dtm) = d_reflection_squares_d_eps_imag(eps, y, y0);
                let e = (-y).exp();
                -y * e * deps * (dte / (1.0 - te * e) + dtm / (1.0 - tm * e))
            },
            y0,
            y0 + Y_SPAN,
        )
    };
    let value = rule.integrate(dg, 0.0, Y_SPAN);
    let prefactor = HBAR * C / (32.0 * PI * PI * gap.powi(3));
    Ok(Estimate::new(prefactor * value, prefactor * 1e-10 * value.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{polylog, zeta};

    const A: f64 = 1e-6;

    fn ideal(t: f64) -> CavityConfig {
        CavityConfig::new(A, t, PermittivityModel::ideal_metal())
    }

    fn casimir(a: f64) -> f64 {
        -PI * PI * HBAR * C / (720.0 * a.powi(3))
    }

    #[test]
    fn constant_reflection_gives_polylog() {
        // g(0) with r² ≡ const is −Li₃(r²) per polarisation.
        let r2 = (10.66f64 / 12.66).powi(2);
        let model = PermittivityModel::semiconductor(11.66, 6.6e15, 0.0, 0.0);
        let (te, tm) = k_integral_split(&model, A, 0.0);
        assert_eq!(te, 0.0);
        assert!((tm * 4.0 * A * A + polylog(3.0, r2)).abs() < 1e-13);
        let (te, tm) = k_integral_split(&PermittivityModel::ideal_metal(), A, 0.0);
        assert!((te * 4.0 * A * A + zeta(3.0)).abs() < 1e-13);
        assert!((tm * 4.0 * A * A + zeta(3.0)).abs() < 1e-13);
    }

    #[test]
    fn vacuum_is_zero() {
        let cfg = CavityConfig::new(A, 300.0, PermittivityModel::vacuum());
        let plan = MatsubaraPlan::default();
        assert_eq!(free_energy_matsubara(&cfg, &plan).unwrap().value, 0.0);
        assert_eq!(energy_zero_t(&cfg, &plan).unwrap().value, 0.0);
        assert_eq!(abel_plana_correction(&cfg, &plan).unwrap().value, 0.0);
    }

    #[test]
    fn ideal_metal_energy() {
        let e = energy_zero_t(&ideal(0.0), &MatsubaraPlan::default()).unwrap();
        assert!((e.value / casimir(A) - 1.0).abs() < 1e-10, "{e:?}");
    }

    #[test]
    fn ideal_metal_low_temperature_matches_known_expansion() {
        // F − E = −ζ(3)(k_B T)³/(2πħ²c²) + (π²ħc/720a³)(T/T_eff)⁴
        let plan = MatsubaraPlan::default();
        for t in [50.0, 200.0] {
            let cfg = ideal(t);
            let t_eff = cfg.geometric_temperature();
            let expected = -zeta(3.0) * (K_B * t).powi(3) / (2.0 * PI * HBAR * HBAR * C * C)
                - casimir(A) * (t / t_eff).powi(4);
            let d = abel_plana_correction(&cfg, &plan).unwrap();
            assert!((d.value / expected - 1.0).abs() < 1e-6, "T={t}: {} vs {expected}", d.value);
            let f = free_energy_matsubara(&cfg, &plan).unwrap();
            let direct = f.value - casimir(A);
            assert!((direct / expected - 1.0).abs() < 1e-4, "T={t}: {direct} vs {expected}");
        }
    }

    #[test]
    fn half_weight_of_static_term() {
        let cfg = CavityConfig::new(A, 300.0, PermittivityModel::drude(1.37e16, 5.3e13));
        let terms = matsubara_terms(&cfg, 1);
        let f = free_energy_matsubara(&cfg, &MatsubaraPlan::default()).unwrap();
        // Σ′ with the n = 0 weight set to 1 instead of ½
        let full = f.value + K_B * cfg.temperature / (4.0 * PI) * terms[0];
        let tau = matsubara_step(A, 300.0);
        let rule = GradedRule::default();
        let model = cfg.model_at_temperature();
        let mut sum = 0.0;
        for n in 0..200 {
            sum += g_at(&model, A, n as f64 * tau, &rule);
        }
        let expected = K_B * 300.0 / (8.0 * PI * A * A) * sum;
        assert!((full / expected - 1.0).abs() < 1e-11);
    }

    #[test]
    fn summands_are_negative() {
        let cfg = CavityConfig::new(A, 30.0, PermittivityModel::semiconductor(11.66, 6.6e15, 1e13, 1e3));
        for t in matsubara_terms(&cfg, 40) {
            assert!(t <= 0.0);
        }
    }

    #[test]
    fn doubling_max_terms_within_error() {
        let cfg = CavityConfig::new(A, 30.0, PermittivityModel::drude(1.37e16, 5.3e13));
        let plan = MatsubaraPlan::default();
        let a = free_energy_matsubara(&cfg, &plan).unwrap();
        let b = free_energy_matsubara(
            &cfg,
            &MatsubaraPlan {
                max_terms: 2 * plan.max_terms,
                ..plan
            },
        )
        .unwrap();
        assert!((a.value - b.value).abs() <= a.error);
        let c = free_energy_matsubara(
            &cfg,
            &MatsubaraPlan {
                tail_strategy: TailStrategy::IntegralTail,
                ..plan
            },
        )
        .unwrap();
        assert!((a.value - c.value).abs() <= a.error + c.error, "{a:?} {c:?}");
    }

    #[test]
    fn too_few_terms_is_reported() {
        let cfg = CavityConfig::new(A, 3.0, PermittivityModel::drude(1.37e16, 5.3e13));
        let plan = MatsubaraPlan {
            max_terms: 10,
            ..MatsubaraPlan::default()
        };
        assert!(matches!(
            free_energy_matsubara(&cfg, &plan),
            Err(Error::NoConverge { .. })
        ));
    }

    #[test]
    fn sum_minus_integral_agrees_with_direct_difference() {
        let plan = MatsubaraPlan::default();
        let cfg = CavityConfig::new(A, 300.0, PermittivityModel::drude(1.37e16, 5.3e13));
        let f = free_energy_matsubara(&cfg, &plan).unwrap();
        let e = energy_zero_t(&cfg, &plan).unwrap();
        let d = abel_plana_correction(&cfg, &plan).unwrap();
        let direct = f.value - e.value;
        assert!(
            (direct - d.value).abs() <= 2.0 * (f.error + e.error + d.error) + 1e-9 * d.value.abs(),
            "{direct} vs {d:?} (errors {} {})",
            f.error,
            e.error
        );
    }

    #[test]
    fn correction_vanishes_as_t_goes_to_zero() {
        let plan = MatsubaraPlan::default();
        let cfg = ideal(0.0);
        assert_eq!(abel_plana_correction(&cfg, &plan).unwrap().value, 0.0);
        let small = abel_plana_correction(&ideal(5.0), &plan).unwrap().value;
        assert!(small < 0.0 && small.abs() < 1e-6 * casimir(A).abs());
    }

    #[test]
    fn ideal_metal_correction_slope() {
        let plan = MatsubaraPlan::default();
        let ts = [20.0, 40.0, 80.0];
        let d: Vec<f64> = ts
            .iter()
            .map(|&t| abel_plana_correction(&ideal(t), &plan).unwrap().value)
            .collect();
        assert!(d.iter().all(|&x| x < 0.0));
        let slope = (d[2].abs().ln() - d[0].abs().ln()) / (ts[2] / ts[0]).ln();
        assert!(slope >= 2.9, "slope {slope}");
    }

    #[test]
    fn drude_and_plasma_close_at_micron_gap() {
        let plan = MatsubaraPlan::default();
        let d = free_energy_matsubara(&CavityConfig::new(A, 300.0, PermittivityModel::drude(1.37e16, 5.3e13)), &plan)
            .unwrap();
        let p = free_energy_matsubara(&CavityConfig::new(A, 300.0, PermittivityModel::plasma(1.37e16)), &plan).unwrap();
        assert!(d.value < 0.0 && p.value < 0.0);
        // the static TE term of the plasma model accounts for nearly all of the gap
        let (te0, _) = k_integral_split(&PermittivityModel::plasma(1.37e16), A, 0.0);
        let static_te = K_B * 300.0 / (4.0 * PI) * te0;
        assert!(((p.value - d.value) / static_te - 1.0).abs() < 0.05);
        let e_d = energy_zero_t(&CavityConfig::new(A, 0.0, PermittivityModel::drude(1.37e16, 5.3e13)), &plan).unwrap();
        let e_p = energy_zero_t(&CavityConfig::new(A, 0.0, PermittivityModel::plasma(1.37e16)), &plan).unwrap();
        assert!((e_d.value / e_p.value - 1.0).abs() < 0.02, "{} {}", e_d.value, e_p.value);
    }

    #[test]
    fn magnitude_decreases_with_gap() {
        let plan = MatsubaraPlan::default();
        let model = PermittivityModel::drude(1.37e16, 5.3e13);
        let mut last = f64::NEG_INFINITY;
        for a in [0.2e-6, 0.5e-6, 1e-6, 2e-6] {
            let f = free_energy_matsubara(&CavityConfig::new(a, 300.0, model), &plan).unwrap().value;
            assert!(f < 0.0 && f > last);
            last = f;
        }
    }
}
