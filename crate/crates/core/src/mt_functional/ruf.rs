//! Truncation and rescaling of an even non-increasing function: the core
//! part `v = (u − u(r₀))⁺` on `(−r₀, r₀)` and its rescaled copy `w`.

use serde::{Deserialize, Serialize};

use crate::constants::Params;
use crate::error::{Error, Result};
use crate::function_models::{FunctionModel, GridFunction};
use crate::seminorm::validate_even_nonincreasing;

/// `2^{(2s−1)/(1−s)}`; admissible radii exceed it.
pub fn ruf_threshold(params: Params) -> f64 {
    let s = params.s();
    2f64.powf((2.0 * s - 1.0) / (1.0 - s))
}

/// `(τ, σ)` with `τ = 2^{(2s−1)/(1−s)}/(p r₀(1−s))`, `σ = (1−s)/s`.
fn tau_sigma(params: Params, r0: f64) -> (f64, f64) {
    let s = params.s();
    (
        ruf_threshold(params) / (params.p() * r0 * (1.0 - s)),
        (1.0 - s) / s,
    )
}

fn check_radius(params: Params, r0: f64) -> Result<()> {
    let threshold = ruf_threshold(params);
    if !(r0 > threshold && r0.is_finite()) {
        return Err(Error::input(format!(
            "r0 must exceed {threshold}, got {r0}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RufSplit {
    pub r0: f64,
    pub v: GridFunction,
    pub w: GridFunction,
    pub tau: f64,
    pub sigma: f64,
    /// `w = scale_factor·v`, `scale_factor = (1 + τ‖u‖_p^p)^{1−s}`.
    pub scale_factor: f64,
    /// `‖u‖_p^p`.
    pub lp_norm_p: f64,
}

pub fn ruf_split(u: &GridFunction, r0: f64, params: Params) -> Result<RufSplit> {
    check_radius(params, r0)?;
    validate_even_nonincreasing(u)?;
    let (tau, sigma) = tau_sigma(params, r0);
    let (_, right) = u.support();
    let v = if r0 >= right {
        u.clone()
    } else {
        let level = u.eval(r0);
        let mut nodes = vec![-r0];
        let mut values = vec![0.0];
        for (&x, &val) in u.nodes().iter().zip(u.values()) {
            if x.abs() < r0 {
                nodes.push(x);
                values.push(val - level);
            }
        }
        nodes.push(r0);
        values.push(0.0);
        GridFunction::new(nodes, values)?
    };
    let lp = u.lp_norm_p_exact(params.p());
    let scale_factor = (1.0 + tau * lp).powf(1.0 - params.s());
    let w = v.scaled(scale_factor);
    Ok(RufSplit {
        r0,
        v,
        w,
        tau,
        sigma,
        scale_factor,
        lp_norm_p: lp,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub passed: bool,
    pub tau: f64,
    pub sigma: f64,
    /// Critical point `(τσ−1)/(τ(σ+1))` of `f(t) = (1−t)(1+τt)^σ`.
    pub t2: f64,
    /// Largest sampled `f(t)`.
    pub max_f: f64,
    pub samples: usize,
}

/// Checks `t₂ < 0` and `f(t) < 1` at every sample in `(0, 1)`.
pub fn concentration_fn_check(s: f64, r0: f64, t_samples: &[f64]) -> Result<ConcentrationReport> {
    let params = Params::new(s)?;
    check_radius(params, r0)?;
    if let Some(bad) = t_samples.iter().find(|&&t| !(t > 0.0 && t < 1.0)) {
        return Err(Error::input(format!(
            "samples must lie in (0, 1), got {bad}"
        )));
    }
    let (tau, sigma) = tau_sigma(params, r0);
    let t2 = (tau * sigma - 1.0) / (tau * (sigma + 1.0));
    let f = |t: f64| (1.0 - t) * (1.0 + tau * t).powf(sigma);
    let max_f = t_samples
        .iter()
        .map(|&t| f(t))
        .fold(f64::NEG_INFINITY, f64::max);
    let passed = t2 < 0.0 && t_samples.iter().all(|&t| f(t) < 1.0);
    Ok(ConcentrationReport {
        passed,
        tau,
        sigma,
        t2,
        max_f,
        samples: t_samples.len(),
    })
}
