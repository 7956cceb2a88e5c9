//! Quadrature and differentiation primitives.
//!
//! Two families live here:
//!
//! * [`GaussKronrod`]: globally adaptive 10/21-point Gauss-Kronrod bisection,
//!   used where the integrand shape is not known in advance (real-axis
//!   sectors, the H/I window integrals).
//! * [`GradedRule`]: a *fixed* composite Gauss-Legendre rule on panels that
//!   are geometrically graded toward a point. Its error is a smooth function
//!   of any parameter the integrand depends on smoothly, which is what lets
//!   Matsubara sums, their integrals and finite differences in temperature
//!   cancel cleanly against each other.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_643_474,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Result of a quadrature: value and an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Self {
        Self { value, error }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, rhs: Estimate) -> Estimate {
        Estimate::new(self.value + rhs.value, self.error + rhs.error)
    }
}

/// Adaptive quadrature failed to meet its tolerance within the interval budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotConverged(pub Estimate);

fn kronrod21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[10];
    let mut gauss = 0.0;
    for (j, (&x, &w)) in XGK[..10].iter().zip(&WGK[..10]).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kron += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kron * half, ((kron - gauss) * half).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss-Kronrod (G10/K21) integrator.
#[derive(Debug, Clone, Copy)]
pub struct GaussKronrod {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_segments: usize,
}

impl Default for GaussKronrod {
    fn default() -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: 1e-10,
            max_segments: 2000,
        }
    }
}

impl GaussKronrod {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    /// Integrate `f` over `[a, b]`, starting from the given breakpoints
    /// (which must lie inside `(a, b)` in increasing order).
    pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        breaks: &[f64],
    ) -> Result<Estimate, NotConverged> {
        if a == b {
            return Ok(Estimate::new(0.0, 0.0));
        }
        let mut heap = BinaryHeap::new();
        let mut edges = Vec::with_capacity(breaks.len() + 2);
        edges.push(a);
        edges.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
        edges.push(b);
        for w in edges.windows(2) {
            let (value, error) = kronrod21(&mut f, w[0], w[1]);
            heap.push(Segment {
                a: w[0],
                b: w[1],
                value,
                error,
            });
        }
        loop {
            let (total, err) = heap
                .iter()
                .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
            let tol = self.abs_tol.max(self.rel_tol * total.abs());
            if err <= tol {
                return Ok(Estimate::new(total, err));
            }
            if heap.len() >= self.max_segments {
                return Err(NotConverged(Estimate::new(total, err)));
            }
            let worst = heap.pop().expect("non-empty heap");
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // Interval exhausted at machine resolution.
                return Err(NotConverged(Estimate::new(total, err)));
            }
            for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
                let (value, error) = kronrod21(&mut f, lo, hi);
                heap.push(Segment {
                    a: lo,
                    b: hi,
                    value,
                    error,
                });
            }
        }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(
        &self,
        f: F,
        a: f64,
        b: f64,
    ) -> Result<Estimate, NotConverged> {
        self.integrate_with_breaks(f, a, b, &[])
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn gl_cached(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static GL10: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static GL16: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    match n {
        10 => GL10.get_or_init(|| gauss_legendre(10)),
        16 => GL16.get_or_init(|| gauss_legendre(16)),
        _ => panic!("no cached Gauss-Legendre rule of order {n}"),
    }
}

/// Fixed composite Gauss-Legendre rule on `[lo, hi]` whose panels are
/// geometrically graded (ratio 2) away from `x = 0` and capped in width.
///
/// Suitable for integrands that are smooth on a logarithmic scale near the
/// origin (log or power singularities at `x = 0` or just left of `lo`) and
/// smooth on a linear scale further out.
#[derive(Debug, Clone, Copy)]
pub struct GradedRule {
    /// Smallest panel edge used when `lo == 0`.
    pub floor: f64,
    /// Maximum panel width.
    pub max_width: f64,
    /// Gauss-Legendre order per panel (10 or 16).
    pub order: usize,
}

impl Default for GradedRule {
    fn default() -> Self {
        Self {
            floor: 1e-14,
            max_width: 2.0,
            order: 10,
        }
    }
}

impl GradedRule {
    /// Panel edges covering `[lo, hi]`, `0 <= lo < hi`.
    pub fn edges(&self, lo: f64, hi: f64) -> Vec<f64> {
        debug_assert!(lo >= 0.0 && hi > lo);
        let mut edges = vec![lo];
        let mut x = if lo > 0.0 { lo } else { self.floor };
        if lo == 0.0 {
            edges.push(x.min(hi));
        }
        while x < hi {
            let step = x.min(self.max_width);
            x += step;
            edges.push(x.min(hi));
        }
        edges.dedup();
        edges
    }

    /// Apply the rule. The integrand is never evaluated at the end points.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let (nodes, weights) = gl_cached(self.order);
        let mut panel_sums = Vec::new();
        for w in self.edges(lo, hi).windows(2) {
            let c = 0.5 * (w[0] + w[1]);
            let h = 0.5 * (w[1] - w[0]);
            let s: f64 = nodes
                .iter()
                .zip(weights)
                .map(|(&x, &wt)| wt * f(c + h * x))
                .sum();
            panel_sums.push(s * h);
        }
        pairwise_sum(&panel_sums)
    }
}

/// Pairwise (cascade) summation; order of reduction is fixed by the slice.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Central-difference derivative with two Richardson steps.
///
/// Returns the extrapolated derivative and an error estimate taken from the
/// difference between the last two tableau levels.
pub fn richardson_derivative<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> Estimate {
    let mut d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let d1 = d(h);
    let d2 = d(h / 2.0);
    let d4 = d(h / 4.0);
    let r1 = (4.0 * d2 - d1) / 3.0;
    let r2 = (4.0 * d4 - d2) / 3.0;
    let best = (16.0 * r2 - r1) / 15.0;
    Estimate::new(best, (best - r2).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(10);
        // ∫ x^18 on [-1,1] = 2/19
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn kronrod_smooth() {
        let gk = GaussKronrod::new(0.0, 1e-13);
        let r = gk.integrate(|x: f64| x.sin(), 0.0, std::f64::consts::PI).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
    }

    #[test]
    fn kronrod_log_endpoint() {
        // ∫0^1 x ln x dx = -1/4
        let gk = GaussKronrod::new(1e-15, 1e-12);
        let r = gk
            .integrate(|x: f64| if x > 0.0 { x * x.ln() } else { 0.0 }, 0.0, 1.0)
            .unwrap();
        assert!((r.value + 0.25).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn kronrod_reports_failure() {
        let gk = GaussKronrod {
            abs_tol: 0.0,
            rel_tol: 1e-15,
            max_segments: 4,
        };
        assert!(gk.integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0).is_err());
    }

    #[test]
    fn graded_rule_log_singularity() {
        // ∫0^∞ y² ln(1 - e^{-y}) dy = -2ζ(4) = -π⁴/45
        let rule = GradedRule::default();
        let v = rule.integrate(|y| y * y * (-(-y).exp()).ln_1p(), 0.0, 60.0);
        let exact = -std::f64::consts::PI.powi(4) / 45.0;
        assert!((v / exact - 1.0).abs() < 1e-13, "{v} vs {exact}");
        // y ln(1 - e^{-y}) has a y ln y endpoint
        let v = rule.integrate(|y| y * (-(-y).exp()).ln_1p(), 0.0, 60.0);
        let zeta3 = 1.202_056_903_159_594_3;
        assert!((v + zeta3).abs() < 1e-13, "{v}");
    }

    #[test]
    fn graded_edges_cover_interval() {
        let rule = GradedRule::default();
        let e = rule.edges(0.3, 10.0);
        assert_eq!(e[0], 0.3);
        assert_eq!(*e.last().unwrap(), 10.0);
        assert!(e.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] <= 2.0 + 1e-15));
    }

    #[test]
    fn richardson_exp() {
        let d = richardson_derivative(|x: f64| x.exp(), 1.0, 0.1);
        assert!((d.value - 1f64.exp()).abs() < 1e-10);
        assert!(d.error < 1e-7, "{d:?}");
    }

    #[test]
    fn pairwise_matches_naive_for_small() {
        let xs: Vec<f64> = (1..100).map(|i| 1.0 / i as f64).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-13);
    }
}
