//! Symmetric decreasing rearrangement of grid values on uniform grids.
//!
//! Node values are treated as the values of equal-width cells. Their
//! absolute values are sorted in decreasing order and dealt out from the
//! centre: for an odd count the centre first, then right, left, right, …;
//! for an even count the right-of-centre cell first, then left-of-centre,
//! and alternating outward.

use serde::{Deserialize, Serialize};

use crate::constants::Params;
use crate::error::{Error, Result};
use crate::function_models::GridFunction;
use crate::mt_functional::truncated_exp;
use crate::quadrature::{pairwise_sum, Estimate};
use crate::seminorm::gagliardo_p_pl;

const UNIFORM_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RearrangedPair {
    pub original: GridFunction,
    pub rearranged: GridFunction,
    /// `|Σ h|u_i|^p − Σ h|u*_i|^p|`.
    pub lp_drift: f64,
    /// `[u]^p − [u*]^p`, once computed by [`RearrangedPair::with_seminorm_gap`].
    pub seminorm_gap: Option<f64>,
}

impl RearrangedPair {
    pub fn with_seminorm_gap(mut self, params: Params) -> Result<Self> {
        self.seminorm_gap = Some(polya_szego_gap(&self, params)?.value);
        Ok(self)
    }
}

/// Position receiving the `k`-th largest value, for `k = 0..n`.
pub fn placement_order(n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    if n % 2 == 1 {
        let c = n / 2;
        out.push(c);
        for d in 1..=c {
            out.push(c + d);
            out.push(c - d);
        }
    } else {
        let r = n / 2;
        for d in 0..r {
            out.push(r + d);
            out.push(r - 1 - d);
        }
    }
    out
}

fn cell_sum(h: f64, values: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let parts: Vec<f64> = values.iter().map(|&v| h * f(v.abs())).collect();
    pairwise_sum(&parts)
}

fn is_mirror_symmetric(nodes: &[f64]) -> bool {
    let n = nodes.len();
    (0..n).all(|i| nodes[i] == -nodes[n - 1 - i])
}

/// Rearrange `|u|`. `p` is the exponent used for [`RearrangedPair::lp_drift`].
pub fn rearrange(u: &GridFunction, p: f64) -> Result<RearrangedPair> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::input(format!("exponent must be positive, got {p}")));
    }
    let h = u
        .uniform_spacing(UNIFORM_REL_TOL)
        .ok_or_else(|| Error::input("rearrangement needs uniformly spaced nodes"))?;
    let n = u.len();
    let mut sorted: Vec<f64> = u.values().iter().map(|v| v.abs()).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut values = vec![0.0; n];
    for (v, pos) in sorted.into_iter().zip(placement_order(n)) {
        values[pos] = v;
    }
    let nodes = if is_mirror_symmetric(u.nodes()) {
        u.nodes().to_vec()
    } else {
        let c = (n - 1) as f64 / 2.0;
        (0..n).map(|i| (i as f64 - c) * h).collect()
    };
    let rearranged = GridFunction::new(nodes, values)?;
    let before = cell_sum(h, u.values(), |t| t.powf(p));
    let after = cell_sum(h, rearranged.values(), |t| t.powf(p));
    Ok(RearrangedPair {
        original: u.clone(),
        rearranged,
        lp_drift: (before - after).abs(),
        seminorm_gap: None,
    })
}

/// Monotone test integrands for [`equimeasurability_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TestIntegrand {
    /// `t^q`.
    Power(f64),
    /// `Φ(α t^{1/(1−s)})`.
    Phi { alpha: f64 },
}

impl TestIntegrand {
    pub fn eval(&self, t: f64, params: Params) -> f64 {
        match *self {
            TestIntegrand::Power(q) => t.powf(q),
            TestIntegrand::Phi { alpha } => {
                truncated_exp(alpha * t.powf(params.mt_exponent()), params.p())
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            TestIntegrand::Power(q) => format!("t^{q}"),
            TestIntegrand::Phi { alpha } => format!("phi(alpha={alpha})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquimeasurabilityRow {
    pub integrand: String,
    pub original: f64,
    pub rearranged: f64,
    pub rel_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquimeasurabilityReport {
    pub passed: bool,
    pub rows: Vec<EquimeasurabilityRow>,
}

/// Relative tolerance for `∫F(|u|) = ∫F(u*)` at the cell level.
pub const EQUIMEASURABILITY_TOL: f64 = 1e-10;

/// Compares `Σ h F(|u_i|)` with `Σ h F(u*_i)` for each integrand.
pub fn equimeasurability_check(
    pair: &RearrangedPair,
    integrands: &[TestIntegrand],
    params: Params,
) -> Result<EquimeasurabilityReport> {
    let h = pair
        .original
        .uniform_spacing(UNIFORM_REL_TOL)
        .ok_or_else(|| Error::input("rearrangement needs uniformly spaced nodes"))?;
    let rows: Vec<EquimeasurabilityRow> = integrands
        .iter()
        .map(|f| {
            let a = cell_sum(h, pair.original.values(), |t| f.eval(t, params));
            let b = cell_sum(h, pair.rearranged.values(), |t| f.eval(t, params));
            let rel_diff = if a == b {
                0.0
            } else {
                (a - b).abs() / a.abs().max(b.abs())
            };
            EquimeasurabilityRow {
                integrand: f.label(),
                original: a,
                rearranged: b,
                rel_diff,
            }
        })
        .collect();
    let passed = rows.iter().all(|r| r.rel_diff <= EQUIMEASURABILITY_TOL);
    Ok(EquimeasurabilityReport { passed, rows })
}

/// `[u]^p − [u*]^p` with the summed error estimates of both evaluations.
pub fn polya_szego_gap(pair: &RearrangedPair, params: Params) -> Result<Estimate> {
    let a = gagliardo_p_pl(&pair.original, params)?;
    let b = gagliardo_p_pl(&pair.rearranged, params)?;
    Ok(Estimate::new(a.value - b.value, a.abs_err + b.abs_err))
}
