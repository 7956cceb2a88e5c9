//! Wave numbers, Fresnel coefficients and the dispersion function
//! D_q = 1 − r_q² e^{−2κ₀a} for two identical half-spaces.
//!
//! Branch conventions:
//! * imaginary axis: κ₀ = √(k⊥² + ξ²/c²) ≥ 0 and κ real ≥ 0;
//! * real axis, evanescent (|β| > 1): κ₀ = √(k⊥² − ω²/c²) > 0;
//! * real axis, propagating (|β| < 1): κ₀ = −i·sgn(ω)·√(ω²/c² − k⊥²), the
//!   retarded branch of √(k⊥² − (ω + i0⁺)²/c²);
//! * κ is always the principal root (Re κ ≥ 0).
//!
//! The light cone |β| = 1 is never evaluated.

use num_complex::Complex64;

use crate::constants::{C, EPS_0};
use crate::dispersion::{eval_imag, eval_real, PermittivityModel};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Real,
    Imaginary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    Propagating,
    Evanescent,
    ImaginaryAxis,
}

/// One (frequency, k⊥) evaluation point with its wave numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    /// ω (real axis) or ξ (imaginary axis), rad/s.
    pub frequency: f64,
    pub k_perp: f64,
    pub axis: Axis,
    pub sector: Sector,
    /// k⊥c/ω on the real axis, `None` on the imaginary axis.
    pub beta: Option<f64>,
    pub kappa0: Complex64,
    pub kappa: Complex64,
    /// Permittivity at this frequency; `re = +∞` marks the ideal metal.
    pub eps: Complex64,
    /// ω²/c² on the real axis, −ξ²/c² on the imaginary axis, so that
    /// κ² = κ₀² − (ε − 1)·freq_term.
    pub freq_term: f64,
}

fn is_ideal(eps: Complex64) -> bool {
    eps.re == f64::INFINITY
}

fn principal_sqrt(z: Complex64) -> Complex64 {
    let r = z.sqrt();
    if r.re < 0.0 {
        -r
    } else {
        r
    }
}

fn kappa_from(kappa0: Complex64, eps: Complex64, freq_term: f64) -> Complex64 {
    if is_ideal(eps) {
        return Complex64::new(f64::INFINITY, 0.0);
    }
    principal_sqrt(kappa0 * kappa0 - (eps - 1.0) * freq_term)
}

impl KernelPoint {
    /// Imaginary-axis point parameterised by κ₀ ≥ ξ/c.
    pub fn imaginary(eps: f64, xi: f64, kappa0: f64) -> Self {
        let xc = xi / C;
        let k_perp = ((kappa0 - xc) * (kappa0 + xc)).max(0.0).sqrt();
        let freq_term = -xc * xc;
        let eps = Complex64::new(eps, 0.0);
        let kappa0 = Complex64::new(kappa0, 0.0);
        let mut kappa = kappa_from(kappa0, eps, freq_term);
        kappa.im = 0.0;
        Self {
            frequency: xi,
            k_perp,
            axis: Axis::Imaginary,
            sector: Sector::ImaginaryAxis,
            beta: None,
            kappa0,
            kappa,
            eps,
            freq_term,
        }
    }

    /// Real-axis evanescent point parameterised by κ₀ > 0.
    pub fn evanescent(eps: Complex64, omega: f64, kappa0: f64) -> Self {
        let wc = omega / C;
        let k_perp = (kappa0 * kappa0 + wc * wc).sqrt();
        let kappa0 = Complex64::new(kappa0, 0.0);
        let freq_term = wc * wc;
        Self {
            frequency: omega,
            k_perp,
            axis: Axis::Real,
            sector: Sector::Evanescent,
            beta: Some(k_perp / wc),
            kappa0,
            kappa: kappa_from(kappa0, eps, freq_term),
            eps,
            freq_term,
        }
    }

    /// Real-axis propagating point parameterised by q = √(ω²/c² − k⊥²) > 0.
    pub fn propagating(eps: Complex64, omega: f64, q: f64) -> Self {
        let wc = omega / C;
        let k_perp = ((wc.abs() - q) * (wc.abs() + q)).max(0.0).sqrt();
        let kappa0 = Complex64::new(0.0, -omega.signum() * q);
        let freq_term = wc * wc;
        Self {
            frequency: omega,
            k_perp,
            axis: Axis::Real,
            sector: Sector::Propagating,
            beta: Some(k_perp / wc),
            kappa0,
            kappa: kappa_from(kappa0, eps, freq_term),
            eps,
            freq_term,
        }
    }
}

/// Build the evaluation point for `model` at (frequency, k⊥) on `axis`.
pub fn wave_numbers(
    model: &PermittivityModel,
    frequency: f64,
    k_perp: f64,
    axis: Axis,
) -> Result<KernelPoint> {
    match axis {
        Axis::Imaginary => {
            if frequency <= 0.0 {
                return Err(Error::InvalidInput(
                    "imaginary-axis frequency must be > 0; use the static limit for ξ = 0".into(),
                ));
            }
            let kappa0 = k_perp.hypot(frequency / C);
            Ok(KernelPoint::imaginary(eval_imag(model, frequency), frequency, kappa0))
        }
        Axis::Real => {
            let eps = if model.kind == crate::dispersion::ModelKind::IdealMetal {
                Complex64::new(f64::INFINITY, 0.0)
            } else {
                eval_real(model, Complex64::new(frequency, 0.0))?
            };
            let wc = frequency.abs() / C;
            if k_perp == wc {
                return Err(Error::OnLightCone);
            }
            if k_perp > wc {
                let kappa0 = ((k_perp - wc) * (k_perp + wc)).sqrt();
                let mut p = KernelPoint::evanescent(eps, frequency, kappa0);
                p.k_perp = k_perp;
                p.beta = Some(k_perp / (frequency / C));
                Ok(p)
            } else {
                let q = ((wc - k_perp) * (wc + k_perp)).sqrt();
                let mut p = KernelPoint::propagating(eps, frequency, q);
                p.k_perp = k_perp;
                p.beta = Some(k_perp / (frequency / C));
                Ok(p)
            }
        }
    }
}

/// Fresnel coefficients of a single interface and their squares.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflection {
    pub r_te: Complex64,
    pub r_tm: Complex64,
    pub r2_te: Complex64,
    pub r2_tm: Complex64,
}

/// r_TE = (κ₀ − κ)/(κ₀ + κ), r_TM = (εκ₀ − κ)/(εκ₀ + κ), written in the
/// cancellation-free forms (ε − 1)·F/(…)².
pub fn fresnel(point: &KernelPoint) -> Result<Reflection> {
    let eps = point.eps;
    if is_ideal(eps) {
        return Ok(Reflection {
            r_te: -ONE,
            r_tm: ONE,
            r2_te: ONE,
            r2_tm: ONE,
        });
    }
    let (k0, k) = (point.kappa0, point.kappa);
    let em1 = eps - 1.0;
    if em1 == ZERO {
        return Ok(Reflection {
            r_te: ZERO,
            r_tm: ZERO,
            r2_te: ZERO,
            r2_tm: ZERO,
        });
    }
    let den_te = k0 + k;
    let den_tm = eps * k0 + k;
    if den_te == ZERO || den_tm == ZERO {
        return Err(Error::ModePole);
    }
    // κ₀² − κ² = (ε − 1)·F and ε²κ₀² − κ² = (ε − 1)((ε + 1)κ₀² + F)
    let r_te = em1 * point.freq_term / (den_te * den_te);
    let r_tm = em1 * ((eps + 1.0) * k0 * k0 + point.freq_term) / (den_tm * den_tm);
    Ok(Reflection {
        r_te,
        r_tm,
        r2_te: r_te * r_te,
        r2_tm: r_tm * r_tm,
    })
}

/// D_q and its principal logarithm for both polarisations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDispersion {
    pub d_te: Complex64,
    pub d_tm: Complex64,
    pub ln_te: Complex64,
    pub ln_tm: Complex64,
}

/// Principal value of ln(1 − z), accurate for small |z|; Arg in (−π, π].
pub fn ln_one_minus(z: Complex64) -> Result<Complex64> {
    let re1 = 1.0 - z.re;
    if re1 == 0.0 && z.im == 0.0 {
        return Err(Error::ZeroDispersion);
    }
    let modulus = 0.5 * (-2.0 * z.re + z.norm_sqr()).ln_1p();
    let modulus = if modulus.is_finite() {
        modulus
    } else {
        Complex64::new(re1, -z.im).norm().ln()
    };
    let mut arg = (-z.im).atan2(re1);
    if arg == -std::f64::consts::PI {
        arg = std::f64::consts::PI;
    }
    Ok(Complex64::new(modulus, arg))
}

pub fn ln_dispersion(refl: &Reflection, kappa0: Complex64, gap: f64) -> Result<LogDispersion> {
    let decay = (-2.0 * kappa0 * gap).exp();
    let (z_te, z_tm) = (refl.r2_te * decay, refl.r2_tm * decay);
    Ok(LogDispersion {
        d_te: ONE - z_te,
        d_tm: ONE - z_tm,
        ln_te: ln_one_minus(z_te)?,
        ln_tm: ln_one_minus(z_tm)?,
    })
}

/// (r_TE², r_TM²) on the imaginary axis at given ε(iξ), κ₀ and ξ/c.
/// Everything is real here, and ε = +∞ gives the ideal mirror.
#[inline]
pub fn reflection_squares_imag(eps: f64, kappa0: f64, xi_over_c: f64) -> (f64, f64) {
    if eps == f64::INFINITY {
        return (1.0, 1.0);
    }
    let em1 = eps - 1.0;
    let x2 = xi_over_c * xi_over_c;
    let kappa = (kappa0 * kappa0 + em1 * x2).sqrt();
    let te_den = kappa0 + kappa;
    let r_te = em1 * x2 / (te_den * te_den);
    let tm_den = eps * kappa0 + kappa;
    let r_tm = em1 * ((eps + 1.0) * kappa0 * kappa0 - x2) / (tm_den * tm_den);
    // |r| ≤ 1 holds exactly here; rounding can exceed it by an ulp when ε ≫ 1
    ((r_te * r_te).min(1.0), (r_tm * r_tm).min(1.0))
}

/// ∂(r_TE², r_TM²)/∂ε on the imaginary axis (for the explicit
/// temperature derivative through ε).
#[inline]
pub fn d_reflection_squares_d_eps_imag(eps: f64, kappa0: f64, xi_over_c: f64) -> (f64, f64) {
    if eps == f64::INFINITY {
        return (0.0, 0.0);
    }
    let x2 = xi_over_c * xi_over_c;
    let kappa = (kappa0 * kappa0 + (eps - 1.0) * x2).sqrt();
    let dkappa = x2 / (2.0 * kappa);
    let te_den = kappa0 + kappa;
    let r_te = (kappa0 - kappa) / te_den;
    let dr_te = -2.0 * kappa0 / (te_den * te_den) * dkappa;
    let tm_den = eps * kappa0 + kappa;
    let r_tm = (eps * kappa0 - kappa) / tm_den;
    let dr_tm = (2.0 * kappa0 * kappa - 2.0 * eps * kappa0 * dkappa) / (tm_den * tm_den);
    (2.0 * r_te * dr_te, 2.0 * r_tm * dr_tm)
}

/// ∂(r_q²)/∂ε at a real-axis point.
pub fn d_reflection_squares_d_eps(point: &KernelPoint) -> (Complex64, Complex64) {
    let eps = point.eps;
    if is_ideal(eps) {
        return (ZERO, ZERO);
    }
    let (k0, k) = (point.kappa0, point.kappa);
    // κ² = κ₀² − (ε − 1) F  ⇒  ∂κ/∂ε = −F/(2κ)
    let dk = -point.freq_term / (2.0 * k);
    let te_den = k0 + k;
    let r_te = (k0 - k) / te_den;
    let dr_te = -2.0 * k0 / (te_den * te_den) * dk;
    let tm_den = eps * k0 + k;
    let r_tm = (eps * k0 - k) / tm_den;
    let dr_tm = (2.0 * k0 * k - 2.0 * eps * k0 * dk) / (tm_den * tm_den);
    (2.0 * r_te * dr_te, 2.0 * r_tm * dr_tm)
}

/// Low-frequency TM coefficient of the conducting dielectric,
/// r_TM ≈ (iv(ε_∞−1) − 1)/(iv(ε_∞+1) − 1) with v = ωε₀/σ.
/// Returns (r_TM, r_TM²). `v = ±∞` gives the static value (ε_∞−1)/(ε_∞+1).
pub fn tm_low_freq(v: f64, eps_inf: f64) -> (Complex64, Complex64) {
    let r = if v.is_infinite() {
        Complex64::new((eps_inf - 1.0) / (eps_inf + 1.0), 0.0)
    } else {
        (I * v * (eps_inf - 1.0) - 1.0) / (I * v * (eps_inf + 1.0) - 1.0)
    };
    (r, r * r)
}

/// v = ωε₀/σ.
pub fn conduction_ratio(omega: f64, sigma: f64) -> f64 {
    omega * EPS_0 / sigma
}

/// ∂(r_TM²)/∂T in the low-frequency regime, through σ(T):
/// −4iv·(iv(ε_∞−1) − 1)/[iv(ε_∞+1) − 1]³ · (1/σ)(∂σ/∂T).
pub fn dr2_dt_tm(v: f64, eps_inf: f64, sigma: f64, dsigma_dt: f64) -> Complex64 {
    if v == 0.0 || v.is_infinite() {
        return ZERO;
    }
    let num = I * v * (eps_inf - 1.0) - 1.0;
    let den = I * v * (eps_inf + 1.0) - 1.0;
    -4.0 * I * v * num / (den * den * den) * (dsigma_dt / sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::PermittivityModel;

    fn gold() -> PermittivityModel {
        PermittivityModel::drude(1.37e16, 5.3e13)
    }

    #[test]
    fn imaginary_kappa0() {
        let k = 1e6;
        let p = wave_numbers(&gold(), C * k, k, Axis::Imaginary).unwrap();
        assert!((p.kappa0.re / (2f64.sqrt() * k) - 1.0).abs() < 1e-14);
        assert_eq!(p.kappa0.im, 0.0);
        assert!(p.kappa.re >= 0.0 && p.kappa.im == 0.0);
    }

    #[test]
    fn propagating_branch_is_retarded() {
        let k = 1e6;
        let w = 2.0 * C * k;
        let p = wave_numbers(&gold(), w, k, Axis::Real).unwrap();
        assert_eq!(p.sector, Sector::Propagating);
        let expected = Complex64::new(0.0, -(3f64.sqrt() / 2.0) * w / C);
        assert!((p.kappa0 - expected).norm() / expected.norm() < 1e-14);
        let m = wave_numbers(&gold(), -w, k, Axis::Real).unwrap();
        assert!((m.kappa0 - expected.conj()).norm() / expected.norm() < 1e-14);
    }

    #[test]
    fn light_cone_rejected() {
        let k = 1e6;
        assert_eq!(
            wave_numbers(&gold(), C * k, k, Axis::Real).unwrap_err(),
            Error::OnLightCone
        );
    }

    #[test]
    fn vacuum_gives_zero_reflection() {
        let vac = PermittivityModel::vacuum();
        for (w, k, axis) in [(1e14, 1e5, Axis::Real), (1e14, 1e7, Axis::Real), (1e14, 1e6, Axis::Imaginary)] {
            let r = fresnel(&wave_numbers(&vac, w, k, axis).unwrap()).unwrap();
            assert_eq!(r.r2_te, ZERO);
            assert_eq!(r.r2_tm, ZERO);
        }
    }

    #[test]
    fn stable_forms_match_textbook() {
        let p = wave_numbers(&gold(), 3e14, 2e6, Axis::Real).unwrap();
        let r = fresnel(&p).unwrap();
        let te = (p.kappa0 - p.kappa) / (p.kappa0 + p.kappa);
        let tm = (p.eps * p.kappa0 - p.kappa) / (p.eps * p.kappa0 + p.kappa);
        assert!((r.r_te - te).norm() < 1e-13);
        assert!((r.r_tm - tm).norm() < 1e-13);
        let (te2, tm2) = reflection_squares_imag(2.5, 3.0, 1.0);
        let kappa = (9.0f64 + 1.5).sqrt();
        assert!((te2 - ((3.0 - kappa) / (3.0 + kappa)).powi(2)).abs() < 1e-15);
        assert!((tm2 - ((7.5 - kappa) / (7.5 + kappa)).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn drude_te_vanishes_at_low_imaginary_frequency() {
        let m = gold();
        let p = wave_numbers(&m, 1e3, 1e6, Axis::Imaginary).unwrap();
        let r = fresnel(&p).unwrap();
        assert!(r.r2_te.norm() < 1e-10, "{:?}", r.r2_te);
    }

    #[test]
    fn large_eps_is_ideal_mirror() {
        let p = KernelPoint::imaginary(1e16, 1e14, 1e7);
        let r = fresnel(&p).unwrap();
        assert!((r.r2_te.re - 1.0).abs() < 1e-5 && (r.r2_tm.re - 1.0).abs() < 1e-5);
    }

    #[test]
    fn ln_dispersion_values() {
        let zero = Reflection {
            r_te: ZERO,
            r_tm: ZERO,
            r2_te: ZERO,
            r2_tm: ZERO,
        };
        let l = ln_dispersion(&zero, Complex64::new(1e6, 0.0), 1e-6).unwrap();
        assert_eq!(l.ln_te, ZERO);
        let unit = Reflection {
            r_te: -ONE,
            r_tm: ONE,
            r2_te: ONE,
            r2_tm: ONE,
        };
        let a = 1e-6;
        let kappa0 = Complex64::new(2f64.ln() / (2.0 * a), 0.0);
        let l = ln_dispersion(&unit, kappa0, a).unwrap();
        assert!((l.ln_te.re - 0.5f64.ln()).abs() < 1e-15 && l.ln_te.im == 0.0);
        assert_eq!(
            ln_dispersion(&unit, ZERO, a).unwrap_err(),
            Error::ZeroDispersion
        );
    }

    #[test]
    fn principal_arg_tie() {
        // 1 − z on the negative real axis with −0 imaginary part
        let l = ln_one_minus(Complex64::new(2.0, 0.0)).unwrap();
        assert_eq!(l.im, std::f64::consts::PI);
    }

    #[test]
    fn mirrored_points_give_conjugate_logs() {
        let m = gold();
        let a = 1e-6;
        for (w, k) in [(3e14, 5e5), (3e14, 4e6), (1e13, 2e5)] {
            let lp = {
                let p = wave_numbers(&m, w, k, Axis::Real).unwrap();
                ln_dispersion(&fresnel(&p).unwrap(), p.kappa0, a).unwrap()
            };
            let lm = {
                let p = wave_numbers(&m, -w, k, Axis::Real).unwrap();
                ln_dispersion(&fresnel(&p).unwrap(), p.kappa0, a).unwrap()
            };
            assert!((lm.ln_te - lp.ln_te.conj()).norm() <= 1e-12 * lp.ln_te.norm().max(1e-300));
            assert!((lm.ln_tm - lp.ln_tm.conj()).norm() <= 1e-12 * lp.ln_tm.norm().max(1e-300));
        }
    }

    #[test]
    fn tm_low_freq_landmarks() {
        let (r, r2) = tm_low_freq(0.0, 11.66);
        assert_eq!(r, ONE);
        assert_eq!(r2, ONE);
        let (_, r2) = tm_low_freq(f64::INFINITY, 11.66);
        assert!((r2.re - (10.66f64 / 12.66).powi(2)).abs() < 1e-15);
        let (_, r2) = tm_low_freq(1e9, 11.66);
        assert!((r2.re - 0.709).abs() < 1e-3);
    }

    #[test]
    fn dr2dt_limits_and_fd() {
        assert_eq!(dr2_dt_tm(0.0, 11.66, 1.0, 1.0), ZERO);
        // O(1/v) decay
        let a = dr2_dt_tm(1e4, 11.66, 1.0, 1.0).norm();
        let b = dr2_dt_tm(1e5, 11.66, 1.0, 1.0).norm();
        assert!((a / b - 10.0).abs() < 0.01);
    }

    #[test]
    fn d_r2_d_eps_matches_fd() {
        let h = 1e-6;
        let (eps, k0, x) = (3.0, 2.0, 1.5);
        let (a, b) = reflection_squares_imag(eps + h, k0, x);
        let (c, d) = reflection_squares_imag(eps - h, k0, x);
        let (dte, dtm) = d_reflection_squares_d_eps_imag(eps, k0, x);
        assert!(((a - c) / (2.0 * h) / dte - 1.0).abs() < 1e-7);
        assert!(((b - d) / (2.0 * h) / dtm - 1.0).abs() < 1e-7);

        let m = gold();
        let p = wave_numbers(&m, 2e14, 3e6, Axis::Real).unwrap();
        let (dte, dtm) = d_reflection_squares_d_eps(&p);
        let bump = |de: Complex64| {
            let mut q = p;
            q.eps += de;
            q.kappa = kappa_from(q.kappa0, q.eps, q.freq_term);
            fresnel(&q).unwrap()
        };
        let h = Complex64::new(1e-4 * p.eps.norm(), 0.0);
        let (rp, rm) = (bump(h), bump(-h));
        let fd_te = (rp.r2_te - rm.r2_te) / (2.0 * h);
        let fd_tm = (rp.r2_tm - rm.r2_tm) / (2.0 * h);
        assert!((fd_te - dte).norm() / dte.norm() < 1e-6);
        assert!((fd_tm - dtm).norm() / dtm.norm() < 1e-6);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(2000))]
            #[test]
            fn reflection_bounded_for_dissipative(lw in 8.0f64..18.0, lk in 3.0f64..9.0, semi in proptest::bool::ANY) {
                let m = if semi {
                    PermittivityModel::semiconductor(11.66, 6.6e15, 1e13, 1e3)
                } else {
                    gold()
                };
                let (w, k) = (10f64.powf(lw), 10f64.powf(lk));
                prop_assume!((k * C / w - 1.0).abs() > 1e-9);
                let p = wave_numbers(&m, w, k, Axis::Real).unwrap();
                let r = fresnel(&p).unwrap();
                // TE is bounded everywhere; TM only for propagating waves.
                // Evanescent TM reflection of a lossy medium may exceed 1.
                prop_assert!(r.r2_te.norm() < 1.0);
                if p.sector == Sector::Propagating {
                    prop_assert!(r.r2_tm.norm() < 1.0);
                }
                let l = ln_dispersion(&r, p.kappa0, 1e-6).unwrap();
                prop_assert!(l.d_te.norm() > 0.0 && l.d_tm.norm() > 0.0);
            }

            #[test]
            fn imaginary_axis_continuous_in_k(lx in 10.0f64..16.0, lk in 3.0f64..8.0) {
                let m = gold();
                let (xi, k) = (10f64.powf(lx), 10f64.powf(lk));
                let a = fresnel(&wave_numbers(&m, xi, k, Axis::Imaginary).unwrap()).unwrap();
                let b = fresnel(&wave_numbers(&m, xi, k * (1.0 + 1e-13), Axis::Imaginary).unwrap()).unwrap();
                prop_assert!((a.r2_tm - b.r2_tm).norm() <= 1e-12 * a.r2_tm.norm().max(1e-300));
                prop_assert!(a.r2_te.im == 0.0 && a.r2_te.re >= 0.0);
            }
        }
    }
}
