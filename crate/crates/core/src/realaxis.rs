//! Real-frequency formalism: φ(ω), the free energy as an integral over real
//! ω, the entropy integral and the extra term from temperature-dependent
//! parameters, plus the H and I model integrands.
//!
//! ```text
//! φ(ω) = ħ/(4π²) ∫₀^∞ k⊥ dk⊥ Σ_q Ln D_q,   D_q = 1 − r_q² e^{−2κ₀a},
//! F    = ∫₀^∞ dω coth(ω/2ω_T) Im φ(ω).
//! ```
//!
//! The k⊥ integral is split at the light cone. With y = 2aκ₀ (evanescent)
//! and p = 2aq, q = √(ω²/c² − k⊥²) (propagating), both pieces become
//! (1/4a²)∫ y Ln(1 − r² e^{−y}) dy and (1/4a²)∫₀^{2a|ω|/c} p Ln(1 − r² e^{±ip}) dp.
//!
//! coth = 1 + 2/(e^{ω/ω_T} − 1): the "1" part is the T = 0 energy with ε at
//! T, taken from the imaginary axis, and only the Bose part is integrated
//! here, up to a cutoff in units of ω_T.

use std::cell::Cell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{C, EPS_0, HBAR, K_B};
use crate::dispersion::{
    d_eps_d_temperature, eval_real, validate_model, ModelKind, PermittivityModel,
};
use crate::error::{Error, Result};
use crate::kernel::{
    d_reflection_squares_d_eps, fresnel, ln_dispersion, tm_low_freq, KernelPoint,
};
use crate::matsubara::{energy_for_model, energy_parameter_derivative, CavityConfig, MatsubaraPlan};
use crate::quad::{pairwise_sum, Estimate, GaussKronrod, NotConverged};

/// y beyond which e^{−y} terms are dropped.
const Y_SPAN: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealAxisPlan {
    /// Relative tolerance of the frequency integral.
    pub rel_tol: f64,
    /// Relative tolerance of the k⊥ integrals at each frequency.
    pub inner_rel_tol: f64,
    /// Upper limit of the thermal integral, in units of ω_T.
    pub cutoff: f64,
    /// Number of decades below the cutoff resolved by panel breaks.
    pub decades: usize,
    /// Plan for the zero-temperature part on the imaginary axis.
    pub energy: MatsubaraPlan,
}

impl Default for RealAxisPlan {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            inner_rel_tol: 1e-11,
            cutoff: 50.0,
            decades: 16,
            energy: MatsubaraPlan::default(),
        }
    }
}

impl RealAxisPlan {
    pub fn check(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-3) || !(self.inner_rel_tol > 0.0 && self.inner_rel_tol <= 1e-3) {
            return Err(Error::InvalidInput("real-axis tolerances must lie in (0, 1e-3]".into()));
        }
        if !(self.cutoff >= 10.0) {
            return Err(Error::InvalidInput("cutoff must be >= 10 ω_T".into()));
        }
        if self.decades == 0 {
            return Err(Error::InvalidInput("decades must be >= 1".into()));
        }
        self.energy.check()
    }
}

/// φ at one real frequency, split by sector (J·s/m²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiPoint {
    pub omega: f64,
    #[serde(skip)]
    pub propagating: Complex64,
    #[serde(skip)]
    pub evanescent: Complex64,
    pub error: f64,
}

impl PhiPoint {
    pub fn value(&self) -> Complex64 {
        self.propagating + self.evanescent
    }
}

/// Dimensionless low-frequency variables: x = ħω/(k_B·1 K), t = T/1 K,
/// s = ħσ/(ε₀k_B·1 K), so that v = x/s = ωε₀/σ and ω/ω_T = x/t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowFreqVars {
    pub x: f64,
    pub t: f64,
    pub s: f64,
    pub v: f64,
}

impl LowFreqVars {
    pub fn new(omega: f64, temperature: f64, sigma: f64) -> Self {
        let unit = K_B / HBAR;
        let x = omega / unit;
        let s = sigma / (EPS_0 * unit);
        Self {
            x,
            t: temperature,
            s,
            v: x / s,
        }
    }

    pub fn omega(&self) -> f64 {
        self.x * K_B / HBAR
    }

    pub fn omega_over_omega_t(&self) -> f64 {
        self.x / self.t
    }
}

#[derive(Clone, Copy)]
enum Part {
    Re,
    Im,
}

impl Part {
    fn of(self, z: Complex64) -> f64 {
        match self {
            Part::Re => z.re,
            Part::Im => z.im,
        }
    }
}

/// Lossless, ideal and otherwise non-dissipative models make the real-axis
/// integrand singular (criterion 2); vacuum is allowed and gives zero.
pub fn require_dissipative(model: &PermittivityModel) -> Result<()> {
    if model.is_vacuum() {
        return Ok(());
    }
    if model.kind == ModelKind::IdealMetal {
        return Err(Error::InvalidModel(
            "ideal_metal has no real-axis permittivity; use the Matsubara engine".into(),
        ));
    }
    let report = validate_model(model);
    if !report.criterion_dissipation {
        return Err(Error::InvalidModel(format!(
            "{} violates criterion 2 (Im ε > 0 for ω > 0; min Im ε = {:e}); the real-axis integrand is not continuous, use the Matsubara engine",
            model.kind.name(),
            report.min_im_eps
        )));
    }
    Ok(())
}

/// Tolerances of the k⊥ integrals (dimensionless, in y or p).
#[derive(Clone, Copy)]
struct InnerTol {
    rel: f64,
    abs: f64,
}

impl InnerTol {
    fn relative(rel: f64) -> Self {
        Self { rel, abs: 0.0 }
    }

    /// Inside a Bose- or sinh-weighted frequency integral the weight grows
    /// like ω_T/ω, so absolute accuracy is only needed in proportion to ω/ω_T.
    fn weighted(rel: f64, x: f64) -> Self {
        Self {
            rel,
            abs: 1e-3 * rel * x.abs().min(1.0),
        }
    }
}

fn inner_integral<F: FnMut(f64) -> f64>(f: F, lo: f64, hi: f64, breaks: &[f64], tol: InnerTol, what: &str) -> Result<Estimate> {
    let gk = GaussKronrod {
        abs_tol: tol.abs,
        rel_tol: tol.rel,
        max_segments: 600,
    };
    match gk.integrate_with_breaks(f, lo, hi, breaks) {
        Ok(e) => Ok(e),
        Err(NotConverged(e)) if e.error <= 10.0 * tol.abs => Ok(e),
        // relative targets near round-off: accept anything within 1e-7
        Err(NotConverged(e)) if e.error <= 1e-7 * e.value.abs() || e.error < 1e-300 => Ok(e),
        Err(NotConverged(e)) => Err(Error::QuadFail {
            module: "realaxis",
            what: what.to_string(),
            value: e.value,
            error: e.error,
        }),
    }
}

/// ∫ (sector) of `weight(point, refl, decay, D) · y` for one part of a
/// complex integrand, returned in units of the dimensionless variable.
fn sector_pair<G>(
    eps: Complex64,
    omega: f64,
    gap: f64,
    part: Part,
    tol: InnerTol,
    integrand: G,
) -> Result<(Estimate, Estimate)>
where
    G: Fn(&KernelPoint, f64) -> Result<Complex64>,
{
    let failure: Cell<Option<Error>> = Cell::new(None);
    let guard = |r: Result<Complex64>| -> f64 {
        match r {
            Ok(z) => part.of(z),
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        }
    };
    let evan = inner_integral(
        |y| {
            let p = KernelPoint::evanescent(eps, omega, y / (2.0 * gap));
            y * guard(integrand(&p, y))
        },
        0.0,
        Y_SPAN,
        &[0.25, 1.0, 4.0, 12.0, 30.0],
        tol,
        "evanescent sector",
    )?;
    let p_max = 2.0 * gap * omega.abs() / C;
    let breaks: Vec<f64> = (1..)
        .map(|k| k as f64 * PI)
        .take_while(|&b| b < p_max)
        .take(4000)
        .collect();
    let prop = inner_integral(
        |p| {
            let pt = KernelPoint::propagating(eps, omega, p / (2.0 * gap));
            p * guard(integrand(&pt, p))
        },
        0.0,
        p_max,
        &breaks,
        tol,
        "propagating sector",
    )?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok((prop, evan))
}

fn ln_sum(point: &KernelPoint, gap: f64) -> Result<Complex64> {
    let refl = fresnel(point)?;
    let ln = ln_dispersion(&refl, point.kappa0, gap)?;
    Ok(ln.ln_te + ln.ln_tm)
}

fn eps_at(model: &PermittivityModel, omega: f64) -> Result<Complex64> {
    eval_real(model, Complex64::new(omega, 0.0))
}

/// φ(ω) for `model` (parameters already at the wanted temperature).
pub fn phi_model(model: &PermittivityModel, gap: f64, omega: f64, inner_rel_tol: f64) -> Result<PhiPoint> {
    if omega == 0.0 {
        return Err(Error::InvalidInput("φ is evaluated at ω ≠ 0 only".into()));
    }
    if model.kind == ModelKind::IdealMetal {
        return Err(Error::InvalidModel("ideal_metal has no real-axis permittivity".into()));
    }
    let zero = Complex64::new(0.0, 0.0);
    if model.is_vacuum() {
        return Ok(PhiPoint {
            omega,
            propagating: zero,
            evanescent: zero,
            error: 0.0,
        });
    }
    let eps = eps_at(model, omega)?;
    let f = |p: &KernelPoint, _: f64| ln_sum(p, gap);
    let tol = InnerTol::relative(inner_rel_tol);
    let (pr, er) = sector_pair(eps, omega, gap, Part::Re, tol, f)?;
    let (pi, ei) = sector_pair(eps, omega, gap, Part::Im, tol, f)?;
    let scale = HBAR / (4.0 * PI * PI) / (4.0 * gap * gap);
    Ok(PhiPoint {
        omega,
        propagating: Complex64::new(pr.value, pi.value) * scale,
        evanescent: Complex64::new(er.value, ei.value) * scale,
        error: scale * (pr.error + er.error + pi.error + ei.error),
    })
}

/// φ(ω, T) for the cavity (law applied at the cavity temperature).
pub fn phi(cfg: &CavityConfig, omega: f64, plan: &RealAxisPlan) -> Result<PhiPoint> {
    cfg.check()?;
    phi_model(&cfg.model_at_temperature(), cfg.gap, omega, plan.inner_rel_tol)
}

/// Im φ(ω) only (half the work of [`phi_model`]).
fn im_phi(eps: Complex64, gap: f64, omega: f64, tol: InnerTol) -> Result<Estimate> {
    let (p, e) = sector_pair(eps, omega, gap, Part::Im, tol, |pt, _| ln_sum(pt, gap))?;
    let scale = HBAR / (4.0 * PI * PI) / (4.0 * gap * gap);
    Ok(Estimate::new(scale * (p.value + e.value), scale * (p.error + e.error)))
}

/// Panel edges on (0, hi]: decades below `hi`, with 0 as the first edge.
fn log_edges(hi: f64, decades: usize) -> Vec<f64> {
    let mut edges = vec![0.0];
    for k in (1..=decades).rev() {
        edges.push(hi * 10f64.powi(-(k as i32)));
        edges.push(hi * 10f64.powi(-(k as i32)) * 10f64.sqrt());
    }
    edges.push(hi);
    edges
}

/// ∫ f over (0, hi) panel by panel in parallel, summed pairwise in order.
/// `scale` is the expected magnitude of the result; each panel is also
/// accepted once its error is below rel_tol·scale/10³.
fn frequency_integral<F>(f: F, hi: f64, scale: f64, plan: &RealAxisPlan, what: &str) -> Result<Estimate>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let edges = log_edges(hi, plan.decades);
    let panels: Vec<Result<Estimate>> = edges
        .par_windows(2)
        .map(|w| {
            let failure: Cell<Option<Error>> = Cell::new(None);
            let gk = GaussKronrod {
                abs_tol: 1e-3 * plan.rel_tol * scale,
                rel_tol: plan.rel_tol,
                max_segments: 200,
            };
            let est = match gk.integrate(
                |x| match f(x) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.set(Some(e));
                        0.0
                    }
                },
                w[0],
                w[1],
            ) {
                Ok(e) => e,
                Err(NotConverged(e)) if e.error <= 1e-6 * e.value.abs() || e.error < 1e-300 => e,
                Err(NotConverged(e)) => {
                    return Err(Error::QuadFail {
                        module: "realaxis",
                        what: what.to_string(),
                        value: e.value,
                        error: e.error,
                    })
                }
            };
            match failure.take() {
                Some(e) => Err(e),
                None => Ok(est),
            }
        })
        .collect();
    let mut values = Vec::with_capacity(panels.len());
    let mut error = 0.0;
    for p in panels {
        let p = p?;
        values.push(p.value);
        error += p.error;
    }
    Ok(Estimate::new(pairwise_sum(&values), error))
}

/// 2/(e^{x} − 1).
fn bose2(x: f64) -> f64 {
    2.0 / x.exp_m1()
}

/// x/(4 sinh²(x/2)) = x e^{x}/(e^{x} − 1)², odd in x.
fn sinh_weight(x: f64) -> f64 {
    let s = (0.5 * x).sinh();
    x / (4.0 * s * s)
}

/// Thermal part ∫_lo^hi 2/(e^{ω/ω_T} − 1)·Im φ(ω) dω with lo, hi in units of ω_T.
fn thermal_integral(cfg: &CavityConfig, plan: &RealAxisPlan, lo: f64, hi: f64) -> Result<Estimate> {
    let model = cfg.model_at_temperature();
    if model.is_vacuum() {
        return Ok(Estimate::new(0.0, 0.0));
    }
    let wt = cfg.thermal_frequency();
    let f = |w: f64| -> Result<f64> {
        let omega = wt * (lo + w);
        let eps = eps_at(&model, omega)?;
        let tol = InnerTol::weighted(plan.inner_rel_tol, omega / wt);
        Ok(bose2(omega / wt) * im_phi(eps, cfg.gap, omega, tol)?.value * wt)
    };
    let scale = K_B * cfg.temperature / (16.0 * PI * cfg.gap * cfg.gap);
    frequency_integral(f, hi - lo, scale, plan, "thermal frequency integral")
}

/// Components of the real-axis free energy (J/m²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RealAxisFreeEnergy {
    pub value: f64,
    pub error: f64,
    /// T = 0 energy with the parameters at T (imaginary axis).
    pub zero_point: f64,
    /// Bose part integrated on the real axis up to the cutoff.
    pub thermal: f64,
}

/// F(a, T) = E(ε_T) + ∫₀^{cutoff·ω_T} 2/(e^{ω/ω_T} − 1) Im φ(ω) dω.
pub fn free_energy_real(cfg: &CavityConfig, plan: &RealAxisPlan) -> Result<RealAxisFreeEnergy> {
    cfg.check()?;
    plan.check()?;
    if cfg.temperature <= 0.0 {
        return Err(Error::InvalidInput("real-axis free energy needs T > 0".into()));
    }
    let model = cfg.model_at_temperature();
    require_dissipative(&model)?;
    let e = energy_for_model(&model, cfg.gap, &plan.energy)?;
    let th = thermal_integral(cfg, plan, 0.0, plan.cutoff).map_err(|e| e.at_temperature(cfg.temperature))?;
    Ok(RealAxisFreeEnergy {
        value: e.value + th.value,
        error: e.error + th.error,
        zero_point: e.value,
        thermal: th.value,
    })
}

/// Share of the Bose part beyond the cutoff: |∫_{cutoff}^{2·cutoff}| / |∫₀^{cutoff}|.
pub fn thermal_tail_fraction(cfg: &CavityConfig, plan: &RealAxisPlan) -> Result<f64> {
    cfg.check()?;
    require_dissipative(&cfg.model_at_temperature())?;
    let body = thermal_integral(cfg, plan, 0.0, plan.cutoff)?;
    let tail = thermal_integral(
        cfg,
        &RealAxisPlan { decades: 1, ..*plan },
        plan.cutoff,
        2.0 * plan.cutoff,
    )?;
    if body.value == 0.0 {
        return Ok(0.0);
    }
    Ok((tail.value / body.value).abs())
}

/// −(ħ/k_BT²)·Im φ(ω)·ω e^{ω/ω_T}/(e^{ω/ω_T} − 1)², the entropy integrand
/// over the full real line (even in ω), in J/(K·m²) per rad/s.
pub fn entropy_integrand(cfg: &CavityConfig, omega: f64, plan: &RealAxisPlan) -> Result<f64> {
    if cfg.temperature <= 0.0 {
        return Err(Error::InvalidInput("entropy integrand needs T > 0".into()));
    }
    let model = cfg.model_at_temperature();
    if model.is_vacuum() {
        return Ok(0.0);
    }
    let wt = cfg.thermal_frequency();
    let x = omega / wt;
    let w = sinh_weight(x);
    if w == 0.0 {
        return Ok(0.0);
    }
    let eps = eps_at(&model, omega)?;
    let im = im_phi(eps, cfg.gap, omega, InnerTol::weighted(plan.inner_rel_tol, x))?.value;
    Ok(-HBAR / (K_B * cfg.temperature * cfg.temperature) * im * wt * w)
}

/// Entropy from the integral over the real line, without the extra term
/// from temperature-dependent parameters (J/(K·m²)).
pub fn entropy(cfg: &CavityConfig, plan: &RealAxisPlan) -> Result<Estimate> {
    cfg.check()?;
    plan.check()?;
    let model = cfg.model_at_temperature();
    require_dissipative(&model)?;
    if model.is_vacuum() {
        return Ok(Estimate::new(0.0, 0.0));
    }
    let wt = cfg.thermal_frequency();
    let f = |x: f64| -> Result<f64> { Ok(2.0 * entropy_integrand(cfg, x * wt, plan)? * wt) };
    let scale = K_B / (16.0 * PI * cfg.gap * cfg.gap);
    frequency_integral(f, plan.cutoff, scale, plan, "entropy integral").map_err(|e| e.at_temperature(cfg.temperature))
}

/// Ψ(ω) = ∫k⊥dk⊥ Σ_q e^{−2κ₀a} ∂(r_q²)/∂T / D_q, imaginary part (m⁻²/K).
fn im_psi(cfg: &CavityConfig, model: &PermittivityModel, omega: f64, tol: InnerTol) -> Result<f64> {
    let w = Complex64::new(omega, 0.0);
    let deps = d_eps_d_temperature(&cfg.model, &cfg.law, cfg.temperature, w);
    if deps == Complex64::new(0.0, 0.0) {
        return Ok(0.0);
    }
    let eps = eps_at(model, omega)?;
    let gap = cfg.gap;
    let (p, e) = sector_pair(eps, omega, gap, Part::Im, tol, |pt, _| {
        let refl = fresnel(pt)?;
        let ln = ln_dispersion(&refl, pt.kappa0, gap)?;
        let decay = (-2.0 * pt.kappa0 * gap).exp();
        let (dte, dtm) = d_reflection_squares_d_eps(pt);
        Ok(decay * deps * (dte / ln.d_te + dtm / ln.d_tm))
    })?;
    Ok((p.value + e.value) / (4.0 * gap * gap))
}

/// Extra entropy from temperature-dependent parameters,
///
/// ```text
/// (ħ/4π²) ∫₀^∞ dω coth(ω/2ω_T) Im Ψ(ω),
/// ```
///
/// with the coth split as elsewhere: the "1" part is −∂E/∂T through ε on
/// the imaginary axis, the Bose part is integrated here. ∂ε/∂T is analytic.
pub fn entropy_t_term(cfg: &CavityConfig, plan: &RealAxisPlan) -> Result<Estimate> {
    cfg.check()?;
    plan.check()?;
    if cfg.law.is_constant() {
        return Ok(Estimate::new(0.0, 0.0));
    }
    if cfg.temperature <= 0.0 {
        return Err(Error::InvalidInput("entropy term needs T > 0".into()));
    }
    let model = cfg.model_at_temperature();
    require_dissipative(&model)?;
    let zero = energy_parameter_derivative(cfg, &plan.energy)?;
    let wt = cfg.thermal_frequency();
    let f = |x: f64| -> Result<f64> {
        let omega = x * wt;
        let tol = InnerTol::weighted(plan.inner_rel_tol, x);
        Ok(bose2(x) * im_psi(cfg, &model, omega, tol)? * wt)
    };
    // Ψ carries the 1/(4π²) in front of it separately
    let scale = 4.0 * PI * PI / HBAR * K_B / (16.0 * PI * cfg.gap * cfg.gap);
    let thermal = frequency_integral(f, plan.cutoff, scale, plan, "entropy T-term")
        .map_err(|e| e.at_temperature(cfg.temperature))?;
    let pref = HBAR / (4.0 * PI * PI);
    Ok(Estimate::new(
        pref * thermal.value - zero.value,
        pref * thermal.error + zero.error,
    ))
}

/// H(x, t) = x coth(x/2t), with H(x, 0) = |x| and H(0, 0) = 0.
pub fn h_func(x: f64, t: f64) -> f64 {
    x.abs() + h_excess(x, t)
}

/// H(x, t) − |x| = 2|x|/(e^{|x|/t} − 1), free of cancellation where H ≈ |x|.
/// It carries all the t-dependence of H.
pub fn h_excess(x: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let u = x / (2.0 * t);
    if u == 0.0 {
        return 2.0 * t;
    }
    if u.abs() < 0.5 {
        return 2.0 * t * u / u.tanh() - x.abs();
    }
    2.0 * x.abs() / (2.0 * u.abs()).exp_m1()
}

/// I(x, t) = (u/sinh u)² with u = x/2t. I(0, t) = 1 and I(x ≠ 0, 0) = 0;
/// at the origin the limit along x = 0 is taken, I(0, 0) = 1.
pub fn i_func(x: f64, t: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    if t <= 0.0 {
        return 0.0;
    }
    let u = (x / (2.0 * t)).abs();
    if u < 1.0 {
        let r = u / u.sinh();
        return r * r;
    }
    let e = (-2.0 * u).exp();
    4.0 * u * u * e / ((1.0 - e) * (1.0 - e))
}

/// One row of [`interchange_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterchangePoint {
    pub t: f64,
    /// d/dt ∫ H dx by Richardson-extrapolated central differences.
    pub derivative_of_integral: f64,
    /// ∫ 2I dx.
    pub integral_of_derivative: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterchangeReport {
    pub x_max: f64,
    pub points: Vec<InterchangePoint>,
    pub max_deviation: f64,
}

/// Compare d/dt ∫_{−x_max}^{x_max} H dx with ∫ 2I dx at each t. The
/// t-independent |x| is left out of H ([`h_excess`]); both integrands
/// are even, so only [0, x_max] is integrated.
pub fn interchange_check(x_max: f64, ts: &[f64]) -> InterchangeReport {
    let gk = GaussKronrod::new(0.0, 1e-14);
    let integral = |f: &dyn Fn(f64) -> f64| -> f64 {
        let e = gk.integrate(f, 0.0, x_max).unwrap_or_else(|NotConverged(e)| e);
        2.0 * e.value
    };
    let points: Vec<InterchangePoint> = ts
        .iter()
        .map(|&t| {
            let excess = |t: f64| integral(&|x: f64| h_excess(x, t));
            let lhs = crate::quad::richardson_derivative(excess, t, 0.1 * t).value;
            let rhs = integral(&|x: f64| 2.0 * i_func(x, t));
            InterchangePoint {
                t,
                derivative_of_integral: lhs,
                integral_of_derivative: rhs,
                deviation: ((lhs - rhs) / rhs).abs(),
            }
        })
        .collect();
    let max_deviation = points.iter().map(|p| p.deviation).fold(0.0, f64::max);
    InterchangeReport {
        x_max,
        points,
        max_deviation,
    }
}

/// Row of the (x, t, H, I) table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HiRow {
    pub x: f64,
    pub t: f64,
    pub h: f64,
    pub i: f64,
}

pub fn dump_hi(xs: &[f64], ts: &[f64]) -> Vec<HiRow> {
    ts.iter()
        .flat_map(|&t| {
            xs.iter().map(move |&x| HiRow {
                x,
                t,
                h: h_func(x, t),
                i: i_func(x, t),
            })
        })
        .collect()
}

/// Row of the (x, s, Re r²_TM, Im r²_TM) table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TmRow {
    pub x: f64,
    pub s: f64,
    pub re_r2_tm: f64,
    pub im_r2_tm: f64,
}

/// Low-frequency r²_TM on a grid, v = x/s (s = 0 gives the static value).
pub fn dump_tm(xs: &[f64], ss: &[f64], eps_inf: f64) -> Vec<TmRow> {
    ss.iter()
        .flat_map(|&s| {
            xs.iter().map(move |&x| {
                let v = if s == 0.0 { f64::INFINITY } else { x / s };
                let (_, r2) = tm_low_freq(v, eps_inf);
                TmRow {
                    x,
                    s,
                    re_r2_tm: r2.re,
                    im_r2_tm: r2.im,
                }
            })
        })
        .collect()
}

/// `n` points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
