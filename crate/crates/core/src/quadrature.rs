//! Quadrature primitives shared by every module: fixed Gauss–Legendre rules,
//! an adaptive Gauss–Kronrod (7/15) integrator with breakpoints, and a
//! deterministic pairwise reduction.
//!
//! The adaptive integrator bisects the panel with the largest error estimate
//! until the summed estimate drops below `max(abs_tol, rel_tol·|I|)`. Panels
//! are always summed in left-to-right order, so results do not depend on the
//! order in which refinement happened to visit them.

use std::ops::Add;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and budgets for every adaptive integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
    /// Truncation radius for integrals over unbounded ranges.
    pub domain_cut: f64,
}

impl QuadratureSpec {
    pub const MIN_PANELS: usize = 16;

    pub fn new(rel_tol: f64, abs_tol: f64, max_panels: usize, domain_cut: f64) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol.is_finite()) {
            return Err(Error::input(format!(
                "rel_tol must be positive, got {rel_tol}"
            )));
        }
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(Error::input(format!(
                "abs_tol must be positive, got {abs_tol}"
            )));
        }
        if max_panels < Self::MIN_PANELS {
            return Err(Error::input(format!(
                "max_panels must be at least {}, got {max_panels}",
                Self::MIN_PANELS
            )));
        }
        if !(domain_cut > 0.0 && domain_cut.is_finite()) {
            return Err(Error::input(format!(
                "domain_cut must be positive, got {domain_cut}"
            )));
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_panels,
            domain_cut,
        })
    }

    /// Same spec with both tolerances scaled by `factor` (used to give nested
    /// integrals a tighter budget than the enclosing one).
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            rel_tol: (self.rel_tol * factor).max(f64::EPSILON),
            abs_tol: (self.abs_tol * factor).max(f64::MIN_POSITIVE),
            ..*self
        }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            max_panels: 4000,
            domain_cut: 1e3,
        }
    }
}

/// A value together with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub abs_err: f64,
}

impl Estimate {
    pub fn new(value: f64, abs_err: f64) -> Self {
        Self { value, abs_err }
    }

    pub fn exact(value: f64) -> Self {
        Self {
            value,
            abs_err: 0.0,
        }
    }

    pub fn scale(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            abs_err: self.abs_err * factor.abs(),
        }
    }
}

impl Add for Estimate {
    type Output = Estimate;

    fn add(self, rhs: Estimate) -> Estimate {
        Estimate {
            value: self.value + rhs.value,
            abs_err: self.abs_err + rhs.abs_err,
        }
    }
}

/// Pairwise (tree) summation. The association order depends only on the
/// length of the slice, which makes parallel producers reproducible.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (lo, hi) = xs.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

/// Pairwise sum of estimates, component-wise.
pub fn pairwise_sum_estimates(xs: &[Estimate]) -> Estimate {
    let values: Vec<f64> = xs.iter().map(|e| e.value).collect();
    let errs: Vec<f64> = xs.iter().map(|e| e.abs_err).collect();
    Estimate::new(pairwise_sum(&values), pairwise_sum(&errs))
}

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    fn compute(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
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
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Integral of `f` over [a, b].
    #[inline]
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
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

const MAX_CACHED_RULE: usize = 32;

/// Cached Gauss–Legendre rule with `n` points (1 ≤ n ≤ 32).
pub fn gauss_legendre(n: usize) -> &'static GaussRule {
    static RULES: [OnceLock<GaussRule>; MAX_CACHED_RULE + 1] =
        [const { OnceLock::new() }; MAX_CACHED_RULE + 1];
    assert!(
        (1..=MAX_CACHED_RULE).contains(&n),
        "unsupported Gauss rule size {n}"
    );
    RULES[n].get_or_init(|| GaussRule::compute(n))
}

// Kronrod extension of the 7-point Gauss rule (QUADPACK qk15 abscissae).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    abs_mass: f64,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let value = res_k * scale;
    let res_abs = res_abs * scale;
    let res_asc = res_asc * scale;
    let mut err = ((res_k - res_g) * scale).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Panel {
        a,
        b,
        value,
        err,
        abs_mass: res_abs,
    }
}

fn splittable(a: f64, b: f64) -> bool {
    let mid = 0.5 * (a + b);
    mid > a && mid < b && (b - a) > 8.0 * f64::EPSILON * a.abs().max(b.abs())
}

/// Absolute and relative targets for a single adaptive integral.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl From<&QuadratureSpec> for Tolerance {
    fn from(spec: &QuadratureSpec) -> Self {
        Self {
            abs: spec.abs_tol,
            rel: spec.rel_tol,
            max_panels: spec.max_panels,
        }
    }
}

/// Adaptive Gauss–Kronrod integral of `f` over the consecutive intervals of
/// `breakpoints` (which must be non-decreasing; zero-width pieces are
/// skipped). Integrable endpoint singularities are handled by repeated
/// bisection toward the offending endpoint; the rule never evaluates `f` at
/// an interval endpoint.
pub fn integrate<F>(
    mut f: F,
    breakpoints: &[f64],
    tol: Tolerance,
    context: &str,
) -> Result<Estimate>
where
    F: FnMut(f64) -> f64,
{
    if breakpoints.len() < 2 {
        return Ok(Estimate::exact(0.0));
    }
    let mut panels: Vec<Panel> = Vec::with_capacity(64);
    for w in breakpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(a.is_finite() && b.is_finite()) || b < a {
            return Err(Error::input(format!(
                "{context}: breakpoints must be finite and non-decreasing ({a}, {b})"
            )));
        }
        if b > a {
            panels.push(gk15(&mut f, a, b));
        }
    }
    if panels.is_empty() {
        return Ok(Estimate::exact(0.0));
    }
    let mut frozen = vec![false; panels.len()];
    loop {
        let values: Vec<f64> = panels.iter().map(|p| p.value).collect();
        let total = pairwise_sum(&values);
        let err: f64 = panels.iter().map(|p| p.err).sum();
        let mass: f64 = panels.iter().map(|p| p.abs_mass).sum();
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::Accuracy {
                context: format!("{context}: non-finite integrand"),
                best: total,
                abs_err: f64::INFINITY,
            });
        }
        let target = tol
            .abs
            .max(tol.rel * total.abs())
            .max(64.0 * f64::EPSILON * mass);
        if err <= target {
            return Ok(Estimate::new(total, err));
        }
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(i, _)| !frozen[*i])
            .max_by(|(_, x), (_, y)| x.err.total_cmp(&y.err))
            .map(|(i, _)| i);
        let Some(i) = worst else {
            return Err(Error::Accuracy {
                context: format!("{context}: panels reached roundoff width"),
                best: total,
                abs_err: err,
            });
        };
        if panels.len() >= tol.max_panels {
            return Err(Error::Accuracy {
                context: format!("{context}: exhausted {} panels", tol.max_panels),
                best: total,
                abs_err: err,
            });
        }
        let p = panels[i];
        if !splittable(p.a, p.b) {
            frozen[i] = true;
            continue;
        }
        let mid = 0.5 * (p.a + p.b);
        let left = gk15(&mut f, p.a, mid);
        let right = gk15(&mut f, mid, p.b);
        panels[i] = left;
        panels.insert(i + 1, right);
        frozen.insert(i + 1, false);
    }
}

/// Breakpoints `a = t_0 < t_1 < … < t_n = b` with each piece at most a factor
/// `ratio` wider than the previous one, graded toward `a`. Requires `0 < a`.
pub fn geometric_breakpoints(a: f64, b: f64, ratio: f64) -> Vec<f64> {
    debug_assert!(a > 0.0 && b > a && ratio > 1.0);
    let mut out = vec![a];
    let mut x = a;
    while x * ratio < b {
        x *= ratio;
        out.push(x);
    }
    out.push(b);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rules_integrate_polynomials_exactly() {
        for n in [1usize, 2, 5, 8, 10, 16] {
            let rule = gauss_legendre(n);
            let wsum: f64 = rule.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-14, "n={n}");
            // Degree 2n-1 is integrated exactly.
            let deg = 2 * n - 1;
            let got = rule.integrate(0.0, 1.0, |x| x.powi(deg as i32));
            assert!(
                (got - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14,
                "n={n} got {got}"
            );
        }
    }

    #[test]
    fn kronrod_weights_are_consistent() {
        let k: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        let g: f64 = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
        let mut f = |x: f64| x.powi(22);
        let p = gk15(&mut f, 0.0, 1.0);
        assert!((p.value - 1.0 / 23.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let est = integrate(
            |x: f64| x.powf(-0.5),
            &[0.0, 1.0],
            Tolerance {
                abs: 1e-12,
                rel: 1e-12,
                max_panels: 500,
            },
            "t",
        )
        .unwrap();
        assert!((est.value - 2.0).abs() < 1e-10, "{est:?}");
        // ∫_0^1 log x dx = -1
        let est = integrate(
            |x: f64| x.ln(),
            &[0.0, 1.0],
            Tolerance {
                abs: 1e-13,
                rel: 1e-13,
                max_panels: 500,
            },
            "t",
        )
        .unwrap();
        assert!((est.value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_reports_budget_exhaustion() {
        let err = integrate(
            |x: f64| (1.0 / x).sin() / x,
            &[1e-6, 1.0],
            Tolerance {
                abs: 1e-14,
                rel: 1e-14,
                max_panels: 20,
            },
            "osc",
        )
        .unwrap_err();
        assert_eq!(err.kind(), "accuracy");
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_input() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 4950.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(1e-8, 1e-12, 8, 1e3).is_err());
        assert!(QuadratureSpec::new(0.0, 1e-12, 100, 1e3).is_err());
        assert!(QuadratureSpec::new(1e-8, 1e-12, 16, 1e3).is_ok());
    }
}
