//! Riemann zeta and polylogarithm for the zero-temperature entropy plateaus.
//!
//! A constant reflection coefficient r² gives
//! ∫₀^∞ y ln(1 − r² e^{−y}) dy = −Li₃(r²), so the size of every entropy jump
//! the crate predicts reduces to these two functions.

/// Bernoulli numbers B_2 .. B_16.
const BERNOULLI_EVEN: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Riemann zeta function for real `s > 1` (Euler-Maclaurin with N = 12).
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta(s) requires s > 1");
    const N: usize = 12;
    let n = N as f64;
    let head: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    let mut sum = head + n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // Σ B_2k/(2k)! · s(s+1)…(s+2k−2) · N^{−s−2k+1}
    let mut rising = s; // s(s+1)…(s+2k−2)
    let mut fact = 2.0; // (2k)!
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let k = k + 1;
        sum += b / fact * rising * n.powf(-s - 2.0 * k as f64 + 1.0);
        let kk = 2.0 * k as f64;
        rising *= (s + kk - 1.0) * (s + kk);
        fact *= (kk + 1.0) * (kk + 2.0);
    }
    sum
}

/// ζ(3), Apéry's constant.
pub fn zeta3() -> f64 {
    zeta(3.0)
}

/// Polylogarithm Li_s(z) for real `-1 <= z <= 1`, by direct series.
///
/// `z = 1` returns ζ(s) (requires `s > 1`).
pub fn polylog(s: f64, z: f64) -> f64 {
    assert!((-1.0..=1.0).contains(&z), "polylog series needs |z| <= 1");
    if z == 1.0 {
        return zeta(s);
    }
    if z == -1.0 {
        return -(1.0 - 2f64.powf(1.0 - s)) * zeta(s);
    }
    let mut sum = 0.0;
    let mut power = 1.0;
    for k in 1..2_000_000usize {
        power *= z;
        let term = power / (k as f64).powf(s);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_known_values() {
        let pi = std::f64::consts::PI;
        assert!((zeta(2.0) - pi * pi / 6.0).abs() < 1e-14);
        assert!((zeta(4.0) - pi.powi(4) / 90.0).abs() < 1e-14);
        assert!((zeta3() - 1.202_056_903_159_594_3).abs() < 1e-14);
    }

    #[test]
    fn polylog_small_argument() {
        // Li_s(z) ≈ z + z²/2^s for small z
        let z = 1e-4;
        assert!((polylog(3.0, z) - (z + z * z / 8.0 + z * z * z / 27.0)).abs() < 1e-17);
        assert_eq!(polylog(3.0, 0.0), 0.0);
    }

    #[test]
    fn polylog_half() {
        // Li_2(1/2) = π²/12 − ln²2 / 2
        let pi = std::f64::consts::PI;
        let exact = pi * pi / 12.0 - 0.5 * 2f64.ln().powi(2);
        assert!((polylog(2.0, 0.5) - exact).abs() < 1e-14);
    }

    #[test]
    fn polylog_at_one_is_zeta() {
        assert_eq!(polylog(3.0, 1.0), zeta(3.0));
    }
}
