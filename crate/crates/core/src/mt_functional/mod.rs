//! Exponential functionals `∫ f(|u|)·G(α|u|^{1/(1−s)}) dx` with
//! `G = exp` on bounded intervals or `G = Φ` (the exponential with its
//! first Taylor terms removed) on the whole line.

mod extremal;
mod ruf;
mod sharpness;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constants::Params;
use crate::error::{Error, Result};
use crate::function_models::{FunctionModel, GridFunction};
use crate::quadrature::{integrate, pairwise_sum, Estimate, QuadratureSpec, Tolerance};

pub use extremal::{extremal_search, ExtremalOptions, ExtremalResult, TraceRow};
pub use ruf::{concentration_fn_check, ruf_split, ruf_threshold, ConcentrationReport, RufSplit};
pub use sharpness::{classify, sharpness_scan, CORE_FLOOR, GROWTH_THRESHOLD};

/// Highest Taylor degree removed by [`truncated_exp`]: `⌈p−2⌉`, at least 0.
pub fn truncation_degree(p: f64) -> usize {
    (p - 2.0).ceil().max(0.0) as usize
}

/// `Σ_{k ≥ first} t^k/k!`.
pub fn exp_tail(t: f64, first: usize) -> f64 {
    if first == 0 {
        return t.exp();
    }
    if t.abs() <= first as f64 + 2.0 {
        let mut term = 1.0;
        for k in 1..=first {
            term *= t / k as f64;
        }
        let mut sum = term;
        let mut k = first;
        while term.abs() > 1e-17 * sum.abs() && k < first + 200 {
            k += 1;
            term *= t / k as f64;
            sum += term;
        }
        sum
    } else {
        let mut head = 0.0;
        let mut term = 1.0;
        for k in 0..first {
            if k > 0 {
                term *= t / k as f64;
            }
            head += term;
        }
        t.exp() - head
    }
}

/// `Φ(t) = e^t − Σ_{k=0}^{⌈p−2⌉} t^k/k!`.
pub fn truncated_exp(t: f64, p: f64) -> f64 {
    exp_tail(t, truncation_degree(p) + 1)
}

/// `Φ′(t)`.
pub fn truncated_exp_derivative(t: f64, p: f64) -> f64 {
    exp_tail(t, truncation_degree(p))
}

/// Smallest integer `M ≥ 0` with `Φ(M) ≥ ½e^M`.
pub fn half_exp_threshold(p: f64) -> u32 {
    (0u32..)
        .find(|&m| {
            let t = m as f64;
            truncated_exp(t, p) >= 0.5 * t.exp()
        })
        .expect("Φ(t)e^{−t} → 1")
}

/// Non-negative weight `f` applied to `|u|`.
pub trait Weight: Send + Sync + fmt::Debug {
    fn eval(&self, t: f64) -> f64;
    fn derivative(&self, t: f64) -> f64;
}

/// Shipped monotone weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuiltinWeight {
    /// `log(1+t)`.
    Log1p,
    /// `t^{1/4}`.
    Pow4,
    /// `min(t, 100)`.
    Cap,
}

impl Weight for BuiltinWeight {
    fn eval(&self, t: f64) -> f64 {
        match self {
            BuiltinWeight::Log1p => t.ln_1p(),
            BuiltinWeight::Pow4 => t.powf(0.25),
            BuiltinWeight::Cap => t.min(100.0),
        }
    }

    fn derivative(&self, t: f64) -> f64 {
        match self {
            BuiltinWeight::Log1p => 1.0 / (1.0 + t),
            BuiltinWeight::Pow4 if t > 0.0 => 0.25 * t.powf(-0.75),
            BuiltinWeight::Pow4 => 0.0,
            BuiltinWeight::Cap if t < 100.0 => 1.0,
            BuiltinWeight::Cap => 0.0,
        }
    }
}

impl FromStr for BuiltinWeight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log1p" => Ok(BuiltinWeight::Log1p),
            "pow4" => Ok(BuiltinWeight::Pow4),
            "cap" => Ok(BuiltinWeight::Cap),
            other => Err(Error::input(format!(
                "unknown weight `{other}` (expected log1p|pow4|cap)"
            ))),
        }
    }
}

impl fmt::Display for BuiltinWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BuiltinWeight::Log1p => "log1p",
            BuiltinWeight::Pow4 => "pow4",
            BuiltinWeight::Cap => "cap",
        })
    }
}

/// What `u` is divided by before exponentiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `[u]`.
    Seminorm,
    /// `(‖u‖_p^p + [u]^p)^{1/p}`.
    FullNorm,
    None,
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "seminorm" => Ok(Normalization::Seminorm),
            "full" | "full_norm" | "full-norm" => Ok(Normalization::FullNorm),
            "none" => Ok(Normalization::None),
            other => Err(Error::input(format!(
                "unknown normalization `{other}` (expected seminorm|full|none)"
            ))),
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::Seminorm => "seminorm",
            Normalization::FullNorm => "full_norm",
            Normalization::None => "none",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `G = exp` on a bounded interval.
    ExpInterval,
    /// `G = Φ` on the whole line.
    PhiLine,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp" | "exp_interval" => Ok(Variant::ExpInterval),
            "phi" | "phi_line" => Ok(Variant::PhiLine),
            other => Err(Error::input(format!(
                "unknown variant `{other}` (expected exp|phi)"
            ))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::ExpInterval => "exp",
            Variant::PhiLine => "phi",
        })
    }
}

/// Integration domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    Interval(f64, f64),
    Line,
}

#[derive(Debug, Clone)]
pub struct MTConfig {
    pub alpha: f64,
    pub params: Params,
    pub normalization: Normalization,
    pub weight: Option<Arc<dyn Weight>>,
    pub variant: Variant,
}

impl MTConfig {
    pub fn new(
        alpha: f64,
        params: Params,
        normalization: Normalization,
        variant: Variant,
    ) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::input(format!(
                "α must be finite and non-negative, got {alpha}"
            )));
        }
        Ok(Self {
            alpha,
            params,
            normalization,
            weight: None,
            variant,
        })
    }

    pub fn with_weight(mut self, weight: Arc<dyn Weight>) -> Self {
        self.weight = Some(weight);
        self
    }

    /// `G(t)`.
    #[inline]
    fn outer(&self, t: f64) -> f64 {
        match self.variant {
            Variant::ExpInterval => t.exp(),
            Variant::PhiLine => truncated_exp(t, self.params.p()),
        }
    }

    #[inline]
    fn outer_derivative(&self, t: f64) -> f64 {
        match self.variant {
            Variant::ExpInterval => t.exp(),
            Variant::PhiLine => truncated_exp_derivative(t, self.params.p()),
        }
    }

    /// Integrand `f(v)·G(α v^{1/(1−s)})` at `v = |u| ≥ 0`.
    #[inline]
    pub fn density(&self, v: f64) -> f64 {
        let g = self.outer(self.alpha * v.powf(self.params.mt_exponent()));
        match &self.weight {
            Some(w) => w.eval(v) * g,
            None => g,
        }
    }

    /// `d/dv` of [`density`](Self::density) for `v ≥ 0`; zero at `v = 0`.
    pub fn density_derivative(&self, v: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        let q = self.params.mt_exponent();
        let t = self.alpha * v.powf(q);
        let dg = self.outer_derivative(t) * self.alpha * q * v.powf(q - 1.0);
        match &self.weight {
            Some(w) => w.derivative(v) * self.outer(t) + w.eval(v) * dg,
            None => dg,
        }
    }

    /// The quantity `u` is divided by before evaluation.
    pub fn norm_factor<F: FunctionModel + ?Sized>(
        &self,
        u: &F,
        spec: &QuadratureSpec,
    ) -> Result<f64> {
        let p = self.params.p();
        let value = match self.normalization {
            Normalization::None => return Ok(1.0),
            Normalization::Seminorm => u.seminorm_p(self.params, spec)?.value,
            Normalization::FullNorm => {
                u.seminorm_p(self.params, spec)?.value + u.lp_norm_p(p, spec)?.value
            }
        };
        if !(value > 0.0) {
            return Err(Error::input(format!(
                "cannot normalise: {} of u is zero",
                self.normalization
            )));
        }
        Ok(value.powf(1.0 / p))
    }
}

/// `∫_domain f(|u|/N)·G(α(|u|/N)^{1/(1−s)}) dx`, with `N` from the
/// configured normalization.
pub fn mt_integral<F: FunctionModel + ?Sized>(
    u: &F,
    config: &MTConfig,
    domain: Domain,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let (lo, hi) = match domain {
        Domain::Interval(a, b) => {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::input(format!(
                    "interval must be finite with a < b, got ({a}, {b})"
                )));
            }
            (a, b)
        }
        Domain::Line => {
            if config.variant == Variant::ExpInterval {
                return Err(Error::input(
                    "the exponential variant needs a bounded interval",
                ));
            }
            (f64::NEG_INFINITY, f64::INFINITY)
        }
    };
    let norm = config.norm_factor(u, spec)?;
    let (sa, sb) = u.support();
    let (a, b) = (lo.max(sa), hi.min(sb));
    let outside_density = config.density(0.0);
    let outside_len = if a < b { (hi - lo) - (b - a) } else { hi - lo };
    let outside = if outside_density == 0.0 {
        0.0
    } else {
        outside_density * outside_len
    };
    if a >= b {
        return Ok(Estimate::new(outside, 4.0 * f64::EPSILON * outside.abs()));
    }
    let mut breaks: Vec<f64> = u
        .breakpoints()
        .into_iter()
        .filter(|&x| x > a && x < b)
        .collect();
    breaks.insert(0, a);
    breaks.push(b);
    let inside = integrate(
        |x: f64| config.density(u.eval(x).abs() / norm),
        &breaks,
        Tolerance::from(spec),
        "functional integral",
    )?;
    Ok(inside + Estimate::new(outside, 4.0 * f64::EPSILON * outside.abs()))
}

/// Cell-value model of [`mt_integral`] on a uniform grid:
/// `Σ h·f(|u_i|/N)·G(α(|u_i|/N)^{1/(1−s)})`, with `N` computed from the
/// piecewise-linear interpolant.
pub fn mt_integral_cells(
    u: &GridFunction,
    config: &MTConfig,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let h = u
        .uniform_spacing(1e-9)
        .ok_or_else(|| Error::input("the cell model needs uniformly spaced nodes"))?;
    let norm = config.norm_factor(u, spec)?;
    let parts: Vec<f64> = u
        .values()
        .iter()
        .map(|v| h * config.density(v.abs() / norm))
        .collect();
    Ok(pairwise_sum(&parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_models::MoserFunction;
    use std::f64::consts::E;

    fn half() -> Params {
        Params::new(0.5).unwrap()
    }

    #[test]
    fn truncated_exp_examples() {
        assert_eq!(truncated_exp(0.0, 2.0), 0.0);
        assert!((truncated_exp(1.0, 2.0) - (E - 1.0)).abs() < 1e-15);
        assert!((truncated_exp(1.0, 3.0) - (E - 2.0)).abs() < 1e-15);
        assert!((truncated_exp(1e-9, 2.0) - 1.0000000005e-9).abs() < 1e-24);
        assert!((truncated_exp(30.0, 4.0) - (30f64.exp() - 1.0 - 30.0 - 450.0)).abs() < 1e-3);
    }

    #[test]
    fn truncated_exp_continuous_across_branch() {
        for p in [2.0, 3.0, 4.5] {
            let first = truncation_degree(p) + 1;
            let edge = first as f64 + 2.0;
            let a = truncated_exp(edge * (1.0 - 1e-12), p);
            let b = truncated_exp(edge * (1.0 + 1e-12), p);
            assert!(((a - b) / a).abs() < 1e-10, "p={p}");
        }
    }

    #[test]
    fn half_exp_threshold_holds() {
        for p in [2.0, 3.0, 4.0, 1.5] {
            let m = half_exp_threshold(p) as f64;
            for t in [m, 2.0 * m, 2.0 * m + 3.0] {
                assert!(truncated_exp(t, p) >= 0.5 * t.exp());
            }
        }
        assert_eq!(half_exp_threshold(2.0), 1);
    }

    #[test]
    fn zero_function_values() {
        let spec = QuadratureSpec::default();
        let zero = GridFunction::uniform(-0.5, 0.5, 4, |_| 0.0).unwrap();
        let exp = MTConfig::new(3.0, half(), Normalization::None, Variant::ExpInterval).unwrap();
        let v = mt_integral(&zero, &exp, Domain::Interval(-0.5, 0.5), &spec).unwrap();
        assert!((v.value - 1.0).abs() < 1e-14);
        let phi = MTConfig::new(3.0, half(), Normalization::None, Variant::PhiLine).unwrap();
        assert_eq!(
            mt_integral(&zero, &phi, Domain::Line, &spec).unwrap().value,
            0.0
        );
        assert_eq!(
            mt_integral(&zero, &exp, Domain::Line, &spec)
                .unwrap_err()
                .kind(),
            "input"
        );
        let normed = MTConfig::new(3.0, half(), Normalization::Seminorm, Variant::PhiLine).unwrap();
        assert_eq!(
            mt_integral(&zero, &normed, Domain::Line, &spec)
                .unwrap_err()
                .kind(),
            "input"
        );
    }

    #[test]
    fn moser_core_matches_closed_form() {
        let spec = QuadratureSpec::default();
        let params = half();
        let eps = 1e-3;
        let u = MoserFunction::new(eps, params).unwrap();
        let a_star = crate::constants::alpha_star(params, &spec).unwrap();
        let cfg = MTConfig::new(
            a_star,
            params,
            Normalization::Seminorm,
            Variant::ExpInterval,
        )
        .unwrap();
        let got = mt_integral(&u, &cfg, Domain::Interval(-eps, eps), &spec)
            .unwrap()
            .value;
        let semi = u.seminorm_p(params, &spec).unwrap().value.sqrt();
        let want = 2.0 * eps * (a_star * (u.peak() / semi).powf(2.0)).exp();
        assert!(((got - want) / want).abs() < 1e-8);
    }

    #[test]
    fn normalised_value_is_scale_invariant() {
        let spec = QuadratureSpec::default();
        let u = GridFunction::uniform(-1.0, 1.0, 16, |x| (1.0 - x * x) * (2.0 + x)).unwrap();
        for norm in [Normalization::Seminorm, Normalization::FullNorm] {
            let cfg = MTConfig::new(4.0, half(), norm, Variant::ExpInterval).unwrap();
            let a = mt_integral(&u, &cfg, Domain::Interval(-1.0, 1.0), &spec)
                .unwrap()
                .value;
            if norm == Normalization::Seminorm {
                let b = mt_integral(&u.scaled(7.5), &cfg, Domain::Interval(-1.0, 1.0), &spec)
                    .unwrap()
                    .value;
                assert!(((a - b) / a).abs() < 1e-10);
            }
            assert!(a.is_finite() && a > 2.0);
        }
    }

    #[test]
    fn density_derivative_matches_difference_quotient() {
        let w: Arc<dyn Weight> = Arc::new(BuiltinWeight::Log1p);
        for variant in [Variant::ExpInterval, Variant::PhiLine] {
            for s in [0.5, 0.3] {
                let cfg = MTConfig::new(1.7, Params::new(s).unwrap(), Normalization::None, variant)
                    .unwrap()
                    .with_weight(w.clone());
                for v in [0.2, 0.9, 1.4] {
                    let h = 1e-6;
                    let fd = (cfg.density(v + h) - cfg.density(v - h)) / (2.0 * h);
                    let an = cfg.density_derivative(v);
                    assert!(
                        ((fd - an) / an).abs() < 1e-7,
                        "{variant} s={s} v={v}: {fd} vs {an}"
                    );
                }
            }
        }
    }

    #[test]
    fn parses_enums() {
        assert_eq!(
            "log1p".parse::<BuiltinWeight>().unwrap(),
            BuiltinWeight::Log1p
        );
        assert_eq!(
            "full".parse::<Normalization>().unwrap(),
            Normalization::FullNorm
        );
        assert_eq!("phi".parse::<Variant>().unwrap(), Variant::PhiLine);
        assert!("nope".parse::<Variant>().is_err());
    }
}
