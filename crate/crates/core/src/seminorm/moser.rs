//! Four-part split of `[u_ε]^p` following the changes of variables that
//! reduce each part to a single integral. With `L = |log ε|`:
//!
//! * `I₁ = (8/L)∫_0^L r^p/(2 sinh r) dr` (plateau against the slope, `y = εe^r`);
//! * `I₂ = (4/L)∫_0^L (L−d) d^p cosh d/sinh² d dd` (slope against itself);
//! * `I₃ = 8L^{p−1}∫_0^ε dx/(1−x²)` (plateau against the exterior);
//! * `I₄ = (8/L)∫_ε^1 |log x|^p/(1−x²) dx` (slope against the exterior).

use serde::{Deserialize, Serialize};

use crate::constants::{gamma_s, GammaMethod, Params};
use crate::error::{Error, Result};
use crate::quadrature::{geometric_breakpoints, integrate, Estimate, QuadratureSpec, Tolerance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub eps: f64,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
    pub total: f64,
    /// `total − γ_s`.
    pub gamma_gap: f64,
    /// `|log ε|·gamma_gap`.
    pub log_rate: f64,
    /// Combined absolute error estimate of `total`.
    pub abs_err: f64,
}

fn dyadic_breaks(upper: f64) -> Vec<f64> {
    let mut out = vec![0.0, 0.5];
    let mut r = 1.0;
    while r < upper {
        out.push(r);
        r *= 2.0;
    }
    out.retain(|&x| x < upper);
    out.push(upper);
    out
}

pub(crate) fn part_i1(l: f64, p: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let est = integrate(
        |r: f64| r.powf(p) * (-r).exp() / -(-2.0 * r).exp_m1(),
        &dyadic_breaks(l),
        Tolerance::from(spec),
        "I1",
    )?;
    Ok(est.scale(8.0 / l))
}

pub(crate) fn part_i2(l: f64, p: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    // cosh d / sinh² d = 2e^{−d}(1+e^{−2d})/(1−e^{−2d})²
    let est = integrate(
        |d: f64| {
            let q = -(-2.0 * d).exp_m1();
            (l - d) * d.powf(p) * 2.0 * (-d).exp() * (1.0 + (-2.0 * d).exp()) / (q * q)
        },
        &dyadic_breaks(l),
        Tolerance::from(spec),
        "I2",
    )?;
    Ok(est.scale(4.0 / l))
}

pub(crate) fn part_i3(eps: f64, l: f64, p: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let est = integrate(
        |x: f64| 1.0 / ((1.0 - x) * (1.0 + x)),
        &[0.0, eps],
        Tolerance::from(spec),
        "I3",
    )?;
    Ok(est.scale(8.0 * l.powf(p - 1.0)))
}

pub(crate) fn part_i4(eps: f64, l: f64, p: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let est = integrate(
        |x: f64| (-x.ln()).powf(p) / ((1.0 - x) * (1.0 + x)),
        &geometric_breakpoints(eps, 1.0, 2.0),
        Tolerance::from(spec),
        "I4",
    )?;
    Ok(est.scale(8.0 / l))
}

/// `[u_ε]^p` split into `I₁ … I₄`, with the gap to `γ_s`.
pub fn moser_decomposition(
    eps: f64,
    params: Params,
    spec: &QuadratureSpec,
) -> Result<DecompositionReport> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::input(format!("ε must lie in (0, 0.5), got {eps}")));
    }
    let l = -eps.ln();
    let p = params.p();
    let i1 = part_i1(l, p, spec)?;
    let i2 = part_i2(l, p, spec)?;
    let i3 = part_i3(eps, l, p, spec)?;
    let i4 = part_i4(eps, l, p, spec)?;
    let gamma = gamma_s(params, GammaMethod::Series, spec)?;
    let total = i1 + i2 + i3 + i4;
    let gap = total.value - gamma.gamma_s;
    Ok(DecompositionReport {
        eps,
        i1: i1.value,
        i2: i2.value,
        i3: i3.value,
        i4: i4.value,
        total: total.value,
        gamma_gap: gap,
        log_rate: l * gap,
        abs_err: total.abs_err,
    })
}
