//! Physical constants (CODATA 2018, SI).

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;
/// Vacuum permittivity, F/m.
pub const EPS_0: f64 = 8.854_187_812_8e-12;

/// Constants bundled for callers that want to carry them around as a value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub hbar: f64,
    pub k_b: f64,
    pub c: f64,
    pub eps_0: f64,
}

impl Constants {
    pub const CODATA: Constants = Constants {
        hbar: HBAR,
        k_b: K_B,
        c: C,
        eps_0: EPS_0,
    };
}

impl Default for Constants {
    fn default() -> Self {
        Self::CODATA
    }
}

/// Thermal frequency ω_T = k_B T / ħ in rad/s.
#[inline]
pub fn thermal_frequency(temperature: f64) -> f64 {
    K_B * temperature / HBAR
}

/// Natural entropy unit k_B / (16 π a²) for a gap `a` in metres.
#[inline]
pub fn entropy_unit(gap: f64) -> f64 {
    K_B / (16.0 * std::f64::consts::PI * gap * gap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_positive() {
        let c = Constants::default();
        assert!(c.hbar > 0.0 && c.k_b > 0.0 && c.c > 0.0 && c.eps_0 > 0.0);
    }

    #[test]
    fn eps0_consistent_with_mu0() {
        // μ0 ≈ 4π×10⁻⁷ to ~1e-9 relative after the 2019 redefinition.
        let mu0 = 1.0 / (EPS_0 * C * C);
        assert!((mu0 / (4e-7 * std::f64::consts::PI) - 1.0).abs() < 1e-8);
    }
}
