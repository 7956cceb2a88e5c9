//! Entropy scans, the zero-temperature extrapolation of S(T) and the
//! structural classification of entropy anomalies.

use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, C, K_B};
use crate::dispersion::{apply_temperature, LawKind, PermittivityModel, TemperatureLaw};
use crate::error::{Error, Result};
use crate::matsubara::{free_energy_matsubara, CavityConfig, MatsubaraPlan};
use crate::quad::{richardson_derivative, Estimate};
use crate::realaxis::{entropy, entropy_t_term, free_energy_real, RealAxisPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Matsubara,
    #[serde(alias = "real_axis")]
    RealAxis,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Matsubara => "matsubara",
            Engine::RealAxis => "realaxis",
        }
    }
}

/// Numerical controls for both engines.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Plans {
    pub matsubara: MatsubaraPlan,
    pub real_axis: RealAxisPlan,
}

/// Free energy with error by the chosen engine.
pub fn free_energy(cfg: &CavityConfig, engine: Engine, plans: &Plans) -> Result<Estimate> {
    match engine {
        Engine::Matsubara => {
            let f = free_energy_matsubara(cfg, &plans.matsubara)?;
            Ok(Estimate::new(f.value, f.error))
        }
        Engine::RealAxis => {
            let f = free_energy_real(cfg, &plans.real_axis)?;
            Ok(Estimate::new(f.value, f.error))
        }
    }
}

/// Relative step in ln T for the entropy finite difference.
pub const LOG_STEP: f64 = 0.05;

/// S = −∂F/∂T by central differences in ln T with two Richardson levels.
/// The error combines the Richardson estimate with the F errors divided by
/// the smallest step.
pub fn entropy_fd(cfg: &CavityConfig, engine: Engine, plans: &Plans) -> Result<Estimate> {
    let t0 = cfg.temperature;
    if t0 <= 0.0 {
        return Err(Error::InvalidInput("entropy needs T > 0".into()));
    }
    let mut failure = None;
    let mut f_err: f64 = 0.0;
    let d = richardson_derivative(
        |u| match free_energy(&cfg.at_temperature(u.exp()), engine, plans) {
            Ok(f) => {
                f_err = f_err.max(f.error);
                f.value
            }
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        t0.ln(),
        LOG_STEP,
    );
    if let Some(e) = failure {
        return Err(e.at_temperature(t0));
    }
    if !d.value.is_finite() {
        return Err(Error::DerivativeNoise {
            module: "thermo",
            spread: f64::INFINITY,
        });
    }
    let noise = f_err / (0.25 * LOG_STEP);
    Ok(Estimate::new(-d.value / t0, (d.error + noise) / t0))
}

/// Entropy from the real-axis integrals, including the extra term when the
/// law is temperature dependent.
pub fn entropy_integral(cfg: &CavityConfig, plans: &Plans) -> Result<Estimate> {
    let main = entropy(cfg, &plans.real_axis)?;
    let extra = entropy_t_term(cfg, &plans.real_axis)?;
    Ok(main + extra)
}

/// One temperature of an [`EntropyScan`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    #[serde(rename = "T_K")]
    pub temperature: f64,
    #[serde(rename = "F_J_per_m2")]
    pub free_energy: f64,
    #[serde(rename = "S_fd")]
    pub s_fd: f64,
    #[serde(rename = "S_int")]
    pub s_int: Option<f64>,
    #[serde(rename = "err_F")]
    pub err_f: f64,
    #[serde(rename = "err_S")]
    pub err_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyScan {
    pub engine: Engine,
    pub gap: f64,
    /// Ordered by decreasing temperature.
    pub points: Vec<ScanPoint>,
}

impl EntropyScan {
    pub fn temperatures(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.temperature).collect()
    }

    pub fn entropies(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.s_fd).collect()
    }
}

/// `n` log-spaced temperatures from `t_max` down to `t_min`.
pub fn log_grid(t_min: f64, t_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max > t_min) || n < 2 {
        return Err(Error::InvalidInput(format!(
            "temperature grid needs 0 < T_min < T_max and n >= 2 (got {t_min}, {t_max}, {n})"
        )));
    }
    let ratio = (t_min / t_max).ln() / (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                t_min
            } else {
                t_max * (ratio * i as f64).exp()
            }
        })
        .collect())
}

/// Default lower end of a scan, 10⁻³·ħc/(2a k_B).
pub fn default_t_min(gap: f64) -> f64 {
    1e-3 * HBAR * C / (2.0 * gap * K_B)
}

/// F and S at every temperature of `grid` (sorted into decreasing order).
/// S_int is filled in with the real-axis integrals when the engine is the
/// real axis; `with_integral` forces it for the Matsubara engine too.
pub fn scan(
    template: &CavityConfig,
    grid: &[f64],
    engine: Engine,
    plans: &Plans,
    with_integral: bool,
) -> Result<EntropyScan> {
    let mut temps = grid.to_vec();
    if temps.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidInput("scan temperatures must be > 0".into()));
    }
    temps.sort_by(|a, b| b.total_cmp(a));
    temps.dedup();
    let mut points = Vec::with_capacity(temps.len());
    for t in temps {
        let cfg = template.at_temperature(t);
        let f = free_energy(&cfg, engine, plans).map_err(|e| e.at_temperature(t))?;
        let s = entropy_fd(&cfg, engine, plans)?;
        let s_int = if engine == Engine::RealAxis || with_integral {
            Some(entropy_integral(&cfg, plans).map_err(|e| e.at_temperature(t))?.value)
        } else {
            None
        };
        points.push(ScanPoint {
            temperature: t,
            free_energy: f.value,
            s_fd: s.value,
            s_int,
            err_f: f.error,
            err_s: s.error,
        });
    }
    Ok(EntropyScan {
        engine,
        gap: template.gap,
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Compliant,
    Anomalous,
    Inconclusive,
}

/// Least-squares fit y = c₀ + c₁ xᵅ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerFit {
    pub c0: f64,
    pub c1: f64,
    pub alpha: f64,
    /// Root-mean-square residual.
    pub rms: f64,
    /// Standard error of c₀ from the residuals.
    pub c0_std: f64,
}

fn linear_fit(xs: &[f64], ys: &[f64], alpha: f64) -> PowerFit {
    let n = xs.len() as f64;
    let us: Vec<f64> = xs.iter().map(|x| x.powf(alpha)).collect();
    let mu = us.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let suu: f64 = us.iter().map(|u| (u - mu).powi(2)).sum();
    let suy: f64 = us.iter().zip(ys).map(|(u, y)| (u - mu) * (y - my)).sum();
    let c1 = if suu > 0.0 { suy / suu } else { 0.0 };
    let c0 = my - c1 * mu;
    let rss: f64 = us.iter().zip(ys).map(|(u, y)| (y - c0 - c1 * u).powi(2)).sum();
    let dof = (n - 3.0).max(1.0);
    let s2 = rss / dof;
    let c0_var = s2 * (1.0 / n + mu * mu / suu.max(f64::MIN_POSITIVE));
    PowerFit {
        c0,
        c1,
        alpha,
        rms: (rss / n).sqrt(),
        c0_std: c0_var.sqrt(),
    }
}

/// Fit y = c₀ + c₁ xᵅ with α ∈ [0.2, 4]: grid search on α, then golden
/// section refinement; c₀ and c₁ are linear least squares at each α.
/// `x` is rescaled by its maximum internally.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<PowerFit> {
    if xs.len() != ys.len() || xs.len() < 4 {
        return Err(Error::InvalidInput("power-law fit needs at least 4 points".into()));
    }
    let scale = xs.iter().cloned().fold(0.0, f64::max);
    let xn: Vec<f64> = xs.iter().map(|x| x / scale).collect();
    let rms = |a: f64| linear_fit(&xn, ys, a).rms;
    let (lo, hi) = (0.2, 4.0);
    let steps = 380;
    let mut best = lo;
    let mut best_rms = f64::INFINITY;
    for i in 0..=steps {
        let a = lo + (hi - lo) * i as f64 / steps as f64;
        let r = rms(a);
        if r < best_rms {
            best_rms = r;
            best = a;
        }
    }
    let h = (hi - lo) / steps as f64;
    let (mut a, mut b) = ((best - h).max(lo), (best + h).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if rms(c) < rms(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let alpha = 0.5 * (a + b);
    let mut fit = linear_fit(&xn, ys, alpha);
    fit.c1 /= scale.powf(alpha);
    Ok(fit)
}

/// Intercept of the least-squares parabola c₀ + c₁x + c₂x².
fn quadratic_intercept(xs: &[f64], ys: &[f64]) -> f64 {
    let scale = xs.iter().cloned().fold(0.0, f64::max);
    // normal equations in the scaled variable, solved by Cramer's rule
    let mut m = [[0.0f64; 3]; 3];
    let mut r = [0.0f64; 3];
    for (x, y) in xs.iter().zip(ys) {
        let u = x / scale;
        let p = [1.0, u, u * u];
        for i in 0..3 {
            r[i] += p[i] * y;
            for j in 0..3 {
                m[i][j] += p[i] * p[j];
            }
        }
    }
    let det = |a: &[[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let mut m0 = m;
    for i in 0..3 {
        m0[i][0] = r[i];
    }
    det(&m0) / det(&m)
}

/// Slope of ln|y| against ln x by least squares.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.abs().ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NernstVerdict {
    /// Extrapolated S(0), J/(K·m²).
    pub s0: f64,
    /// One-sigma uncertainty of `s0`.
    pub s0_uncertainty: f64,
    /// 3σ interval around `s0`.
    pub interval: (f64, f64),
    /// Exponent α of S − S0 ∝ Tᵅ.
    pub alpha: f64,
    /// S0·16πa²/k_B.
    pub s0_reduced: f64,
    pub classification: Classification,
}

/// Extrapolate S(T) → 0 from the lowest decade of a scan with
/// S = S0 + c₁Tᵅ, and classify: Compliant iff |S0| < 3σ and α > 0.5,
/// Inconclusive if the fit residuals exceed 10% of the range of S.
///
/// σ combines the fit's standard error, the largest error bar of the data
/// and a model-form term: the largest shift of S0 when the fit is repeated
/// on the lower or upper two thirds of the window, or replaced by the
/// parabola S0 + c₁T + c₂T².
pub fn nernst_probe(scan: &EntropyScan) -> Result<NernstVerdict> {
    let pts = &scan.points;
    if pts.len() < 8 {
        return Err(Error::InvalidInput("Nernst probe needs at least 8 temperatures".into()));
    }
    let t_lo = pts.iter().map(|p| p.temperature).fold(f64::INFINITY, f64::min);
    let t_hi = pts.iter().map(|p| p.temperature).fold(0.0, f64::max);
    if t_hi / t_lo < 100.0 * (1.0 - 1e-9) {
        return Err(Error::InvalidInput("Nernst probe needs a grid spanning at least two decades".into()));
    }
    let mut window: Vec<&ScanPoint> = pts.iter().filter(|p| p.temperature <= 10.0 * t_lo * (1.0 + 1e-9)).collect();
    if window.len() < 6 {
        // too few points in the lowest decade: use the lowest six
        let mut all: Vec<&ScanPoint> = pts.iter().collect();
        all.sort_by(|a, b| a.temperature.total_cmp(&b.temperature));
        window = all.into_iter().take(6).collect();
    }
    window.sort_by(|a, b| a.temperature.total_cmp(&b.temperature));
    let ts: Vec<f64> = window.iter().map(|p| p.temperature).collect();
    let ss: Vec<f64> = window.iter().map(|p| p.s_fd).collect();
    let fit = fit_power_law(&ts, &ss)?;
    let m = ts.len();
    let k = (2 * m).div_ceil(3).max(4).min(m);
    let lower = fit_power_law(&ts[..k], &ss[..k])?;
    let upper = fit_power_law(&ts[m - k..], &ss[m - k..])?;
    let taylor = quadratic_intercept(&ts, &ss);
    let systematic = (lower.c0 - fit.c0)
        .abs()
        .max((upper.c0 - fit.c0).abs())
        .max((taylor - fit.c0).abs());
    let data = window.iter().map(|p| p.err_s).fold(0.0, f64::max);
    let sigma = (fit.c0_std.powi(2) + systematic.powi(2) + data.powi(2)).sqrt();
    let range = ss.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - ss.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = range.max(ss.iter().map(|s| s.abs()).fold(0.0, f64::max));
    let classification = if fit.rms > 0.1 * scale {
        Classification::Inconclusive
    } else if fit.c0.abs() < 3.0 * sigma && fit.alpha > 0.5 {
        Classification::Compliant
    } else {
        Classification::Anomalous
    };
    let unit = K_B / (16.0 * std::f64::consts::PI * scan.gap * scan.gap);
    Ok(NernstVerdict {
        s0: fit.c0,
        s0_uncertainty: sigma,
        interval: (fit.c0 - 3.0 * sigma, fit.c0 + 3.0 * sigma),
        alpha: fit.alpha,
        s0_reduced: fit.c0 / unit,
        classification,
    })
}

/// Exponent α of F(T) − E ∝ Tᵅ on the lowest decade of a scan.
pub fn free_energy_exponent(scan: &EntropyScan, energy: f64) -> f64 {
    let t_lo = scan.points.iter().map(|p| p.temperature).fold(f64::INFINITY, f64::min);
    let (ts, ds): (Vec<f64>, Vec<f64>) = scan
        .points
        .iter()
        .filter(|p| p.temperature <= 10.0 * t_lo * (1.0 + 1e-9))
        .map(|p| (p.temperature, p.free_energy - energy))
        .unzip();
    loglog_slope(&ts, &ds)
}

/// Structural prediction from how the leading low-frequency power of ε
/// changes between T > 0 and T = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnomalyPrediction {
    Compliant,
    TeAnomaly,
    TmAnomaly,
    /// A change of leading power not covered by the two known patterns.
    Unclassified,
}

pub fn classify_anomaly(model: &PermittivityModel, law: &TemperatureLaw) -> AnomalyPrediction {
    if law.is_constant() {
        return AnomalyPrediction::Compliant;
    }
    // at the law's own reference temperature the parameter is O(its scale)
    let reference = match law.kind {
        LawKind::PowerLawRelaxation => law.t_ref,
        LawKind::ActivatedConductivity => law.t_0,
        LawKind::ConstantParam => 1.0,
    };
    let warm = apply_temperature(model, law, reference);
    let cold = apply_temperature(model, law, 0.0);
    match (warm.low_frequency_exponent(), cold.low_frequency_exponent()) {
        (a, b) if a == b => AnomalyPrediction::Compliant,
        (Some(-1), Some(-2)) => AnomalyPrediction::TeAnomaly,
        (Some(-1), Some(0)) => AnomalyPrediction::TmAnomaly,
        _ => AnomalyPrediction::Unclassified,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::ModelKind;

    const A: f64 = 1e-6;

    #[test]
    fn grid_is_decreasing_and_hits_endpoints() {
        let g = log_grid(1.0, 100.0, 9).unwrap();
        assert_eq!(g[0], 100.0);
        assert_eq!(g[8], 1.0);
        assert!(g.windows(2).all(|w| w[0] > w[1]));
        assert!((g[4] - 10.0).abs() < 1e-12);
        assert!(log_grid(0.0, 1.0, 5).is_err());
    }

    #[test]
    fn default_t_min_at_one_micron() {
        assert!((default_t_min(A) - 1.1449).abs() < 1e-3);
    }

    #[test]
    fn power_law_fit_recovers_parameters() {
        let ts: Vec<f64> = (0..10).map(|i| 1.0 + i as f64).collect();
        let ys: Vec<f64> = ts.iter().map(|t| 0.3 + 2.0 * t.powf(1.5)).collect();
        let f = fit_power_law(&ts, &ys).unwrap();
        assert!((f.alpha - 1.5).abs() < 1e-6);
        assert!((f.c0 - 0.3).abs() < 1e-6);
        assert!((f.c1 - 2.0).abs() < 1e-6);
        let q: Vec<f64> = ts.iter().map(|t| -1.0 + 0.5 * t - 0.25 * t * t).collect();
        assert!((quadratic_intercept(&ts, &q) + 1.0).abs() < 1e-10);
    }

    #[test]
    fn loglog_slope_of_power() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| -3.0 * x.powi(3)).collect();
        assert!((loglog_slope(&xs, &ys) - 3.0).abs() < 1e-12);
    }

    fn synthetic(s0: f64, n: usize) -> EntropyScan {
        let grid = log_grid(1.0, 100.0, n).unwrap();
        EntropyScan {
            engine: Engine::Matsubara,
            gap: A,
            points: grid
                .iter()
                .map(|&t| ScanPoint {
                    temperature: t,
                    free_energy: 0.0,
                    s_fd: s0 + 1e-15 * t,
                    s_int: None,
                    err_f: 0.0,
                    err_s: 1e-22,
                })
                .collect(),
        }
    }

    #[test]
    fn probe_classifies_synthetic_scans() {
        let v = nernst_probe(&synthetic(0.0, 15)).unwrap();
        assert_eq!(v.classification, Classification::Compliant);
        assert!((v.alpha - 1.0).abs() < 1e-3);
        let v = nernst_probe(&synthetic(-3e-13, 15)).unwrap();
        assert_eq!(v.classification, Classification::Anomalous);
        assert!((v.s0 + 3e-13).abs() < 1e-18);
        assert!(nernst_probe(&synthetic(0.0, 7)).is_err());
    }

    #[test]
    fn probe_flags_bad_fits() {
        let mut sc = synthetic(0.0, 15);
        for (i, p) in sc.points.iter_mut().enumerate() {
            p.s_fd = if i % 2 == 0 { 1e-15 } else { -1e-15 };
        }
        assert_eq!(nernst_probe(&sc).unwrap().classification, Classification::Inconclusive);
    }

    #[test]
    fn probe_needs_two_decades() {
        let grid = log_grid(1.0, 50.0, 12).unwrap();
        let sc = EntropyScan {
            engine: Engine::Matsubara,
            gap: A,
            points: grid
                .iter()
                .map(|&t| ScanPoint {
                    temperature: t,
                    free_energy: 0.0,
                    s_fd: t,
                    s_int: None,
                    err_f: 0.0,
                    err_s: 0.0,
                })
                .collect(),
        };
        assert!(nernst_probe(&sc).is_err());
    }

    #[test]
    fn vacuum_entropy_vanishes() {
        let cfg = CavityConfig::new(A, 10.0, PermittivityModel::vacuum());
        let sc = scan(&cfg, &[10.0, 100.0], Engine::RealAxis, &Plans::default(), true).unwrap();
        for p in sc.points {
            assert_eq!(p.s_fd, 0.0);
            assert_eq!(p.s_int, Some(0.0));
            assert_eq!(p.free_energy, 0.0);
        }
    }

    #[test]
    fn anomaly_predictions() {
        let drude = PermittivityModel::drude(1.37e16, 5.3e13);
        let si = PermittivityModel::semiconductor(11.66, 6.6e15, 0.0, 0.0);
        assert_eq!(
            classify_anomaly(&drude, &TemperatureLaw::power_law(5.3e13, 300.0, 5.0)),
            AnomalyPrediction::TeAnomaly
        );
        assert_eq!(
            classify_anomaly(&si, &TemperatureLaw::activated(1e4, 500.0)),
            AnomalyPrediction::TmAnomaly
        );
        for m in [drude, si, PermittivityModel::plasma(1e16)] {
            assert_eq!(classify_anomaly(&m, &TemperatureLaw::constant()), AnomalyPrediction::Compliant);
        }
        // a law acting on a parameter the model does not have changes nothing
        assert_eq!(
            classify_anomaly(&si, &TemperatureLaw::power_law(1e13, 300.0, 1.0)),
            AnomalyPrediction::Compliant
        );
        assert_eq!(si.kind, ModelKind::SemiconductorDc);
    }

    #[test]
    fn engines_agree_on_entropy() {
        let plans = Plans::default();
        for model in [
            PermittivityModel::drude(1.37e16, 5.3e13),
            PermittivityModel::semiconductor(11.66, 6.6e15, 0.0, 1e3),
        ] {
            for t in [300.0, 30.0] {
                let cfg = CavityConfig::new(A, t, model);
                let m = entropy_fd(&cfg, Engine::Matsubara, &plans).unwrap();
                let r = entropy_fd(&cfg, Engine::RealAxis, &plans).unwrap();
                assert!((m.value - r.value).abs() <= 3.0 * (m.error + r.error), "{m:?} {r:?}");
                let s_int = entropy_integral(&cfg, &plans).unwrap();
                assert!(((s_int.value - m.value) / m.value).abs() < 1e-3);
            }
        }
    }
}
