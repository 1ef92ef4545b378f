//! Scans and inequality probes built on the seminorm evaluators.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{gamma_s, GammaMethod, Params};
use crate::error::{Error, Result};
use crate::function_models::{FunctionModel, GridFunction, MoserFunction};
use crate::quadrature::QuadratureSpec;
use crate::report::{Cell, ScanReport};

use super::moser::moser_decomposition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateMode {
    /// `[u_ε]^p`.
    Seminorm,
    /// `‖u_ε‖_p^p + [u_ε]^p`.
    FullNorm,
}

impl FromStr for RateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "seminorm" => Ok(RateMode::Seminorm),
            "full" | "full_norm" | "full-norm" => Ok(RateMode::FullNorm),
            other => Err(Error::input(format!(
                "unknown mode `{other}` (expected seminorm|full)"
            ))),
        }
    }
}

impl fmt::Display for RateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RateMode::Seminorm => "seminorm",
            RateMode::FullNorm => "full_norm",
        })
    }
}

pub(crate) fn validate_eps_grid(eps_grid: &[f64]) -> Result<()> {
    if let Some(bad) = eps_grid.iter().find(|&&e| !(e > 0.0 && e < 0.5)) {
        return Err(Error::input(format!(
            "ε values must lie in (0, 0.5), got {bad}"
        )));
    }
    if eps_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::input("ε grid must be strictly decreasing"));
    }
    Ok(())
}

/// Table `eps, value, gap, log_rate` of `[u_ε]^p` (or the full norm) against
/// `γ_s`.
///
/// `meta.trend` summarises the scan: in seminorm mode whether `|log_rate|`
/// is non-increasing over the last three rows, in full-norm mode whether
/// `gap·|log ε|` stays inside `(0, 10)`. Scans shorter than the rule needs
/// report `n/a`.
pub fn rate_check(
    eps_grid: &[f64],
    params: Params,
    mode: RateMode,
    spec: &QuadratureSpec,
) -> Result<ScanReport> {
    validate_eps_grid(eps_grid)?;
    let gamma = gamma_s(params, GammaMethod::Series, spec)?.gamma_s;
    let rows: Vec<(f64, f64)> = eps_grid
        .par_iter()
        .map(|&eps| -> Result<(f64, f64)> {
            let d = moser_decomposition(eps, params, spec)?;
            let value = match mode {
                RateMode::Seminorm => d.total,
                RateMode::FullNorm => {
                    d.total
                        + MoserFunction::new(eps, params)?
                            .lp_norm_p(params.p(), spec)?
                            .value
                }
            };
            Ok((eps, value))
        })
        .collect::<Result<_>>()?;
    let mut report = ScanReport::new(&["eps", "value", "gap", "log_rate"]);
    let mut rates = Vec::with_capacity(rows.len());
    for (eps, value) in rows {
        let gap = value - gamma;
        let rate = -eps.ln() * gap;
        rates.push(rate);
        report.push_row(vec![
            Cell::Num(eps),
            Cell::Num(value),
            Cell::Num(gap),
            Cell::Num(rate),
        ]);
    }
    let trend = match mode {
        RateMode::Seminorm if rates.len() >= 3 => {
            let tail = &rates[rates.len() - 3..];
            Some(tail.windows(2).all(|w| w[1].abs() <= w[0].abs()))
        }
        RateMode::FullNorm if rates.len() >= 2 => Some(rates.iter().all(|&r| r > 0.0 && r < 10.0)),
        _ => None,
    };
    report.set_meta("gamma_s", gamma);
    report.set_meta("mode", mode.to_string());
    report.set_meta(
        "trend",
        match trend {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "n/a",
        },
    );
    Ok(report)
}

/// Outcome of [`tail_bound_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailBoundReport {
    pub passed: bool,
    /// `‖u‖_p^p`.
    pub lp_norm_p: f64,
    /// `(x, |u(x)|^p, ‖u‖_p^p/(2|x|))` per probe.
    pub checks: Vec<(f64, f64, f64)>,
}

/// `u` even and non-increasing in `|x|`, checked on the node values.
pub(crate) fn validate_even_nonincreasing(u: &GridFunction) -> Result<()> {
    let (x, v) = (u.nodes(), u.values());
    let n = u.len();
    let scale = v
        .iter()
        .fold(0.0f64, |m, a| m.max(a.abs()))
        .max(f64::MIN_POSITIVE);
    for i in 0..n {
        let j = n - 1 - i;
        if (x[i] + x[j]).abs() > 1e-12 * x[j].abs().max(x[i].abs()).max(f64::MIN_POSITIVE)
            || (v[i] - v[j]).abs() > 1e-12 * scale
        {
            return Err(Error::input(
                "function must be even (symmetric nodes and values)",
            ));
        }
    }
    let start = x.partition_point(|&t| t < 0.0);
    let right = &v[start..];
    if right.windows(2).any(|w| w[1] > w[0] + 1e-12 * scale) {
        return Err(Error::input("function must be non-increasing on [0, ∞)"));
    }
    if right.iter().any(|&a| a < -1e-12 * scale) {
        return Err(Error::input("function must be non-negative"));
    }
    Ok(())
}

/// Checks `|u(x)|^p ≤ ‖u‖_p^p/(2|x|)` at each probe.
pub fn tail_bound_check(
    u: &GridFunction,
    params: Params,
    probes: &[f64],
) -> Result<TailBoundReport> {
    validate_even_nonincreasing(u)?;
    if let Some(bad) = probes.iter().find(|x| !(x.is_finite() && **x != 0.0)) {
        return Err(Error::input(format!(
            "probes must be finite and nonzero, got {bad}"
        )));
    }
    let p = params.p();
    let norm = u.lp_norm_p_exact(p);
    let checks: Vec<(f64, f64, f64)> = probes
        .iter()
        .map(|&x| (x, u.eval(x).abs().powf(p), norm / (2.0 * x.abs())))
        .collect();
    let passed = checks.iter().all(|&(_, lhs, rhs)| lhs <= rhs + 1e-12);
    Ok(TailBoundReport {
        passed,
        lp_norm_p: norm,
        checks,
    })
}

/// Table `q, ratio` of `‖u‖_q/(q^{1−s}[u])`; `meta.sup` is the largest ratio.
pub fn embedding_ratio<F: FunctionModel + ?Sized>(
    u: &F,
    q_grid: &[f64],
    params: Params,
    spec: &QuadratureSpec,
) -> Result<ScanReport> {
    if let Some(bad) = q_grid.iter().find(|&&q| !(q > 1.0 && q.is_finite())) {
        return Err(Error::input(format!("q values must exceed 1, got {bad}")));
    }
    let semi = u.seminorm_p(params, spec)?.value;
    if !(semi > 0.0) {
        return Err(Error::input("seminorm vanishes; the ratio is undefined"));
    }
    let semi_root = semi.powf(1.0 / params.p());
    let mut report = ScanReport::new(&["q", "ratio"]);
    let mut sup = f64::NEG_INFINITY;
    for &q in q_grid {
        let lq = u.lp_norm_p(q, spec)?.value.powf(1.0 / q);
        let ratio = lq / (q.powf(1.0 - params.s()) * semi_root);
        sup = sup.max(ratio);
        report.push_row(vec![Cell::Num(q), Cell::Num(ratio)]);
    }
    if !q_grid.is_empty() {
        report.set_meta("sup", sup);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Params {
        Params::new(0.5).unwrap()
    }

    #[test]
    fn tent_probe_example() {
        let u = GridFunction::uniform(-1.0, 1.0, 2, |x| 1.0 - x.abs()).unwrap();
        let r = tail_bound_check(&u, half(), &[0.5, 3.0, -0.25]).unwrap();
        assert!(r.passed);
        let (_, lhs, rhs) = r.checks[0];
        assert!((lhs - 0.25).abs() < 1e-15);
        assert!((rhs - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.checks[1].1, 0.0);
    }

    #[test]
    fn tail_check_rejects_bad_shape() {
        let bump = GridFunction::new(
            vec![-1.0, -0.5, 0.0, 0.5, 1.0],
            vec![0.0, 1.0, 0.5, 1.0, 0.0],
        )
        .unwrap();
        assert_eq!(
            tail_bound_check(&bump, half(), &[0.5]).unwrap_err().kind(),
            "input"
        );
        let lopsided =
            GridFunction::uniform(-1.0, 1.0, 4, |x| (1.0 - x.abs()) * (1.0 + 0.1 * x)).unwrap();
        assert_eq!(
            tail_bound_check(&lopsided, half(), &[0.5])
                .unwrap_err()
                .kind(),
            "input"
        );
        let tent = GridFunction::uniform(-1.0, 1.0, 2, |x| 1.0 - x.abs()).unwrap();
        assert_eq!(
            tail_bound_check(&tent, half(), &[0.0]).unwrap_err().kind(),
            "input"
        );
    }

    #[test]
    fn single_point_rate_scan() {
        let spec = QuadratureSpec::default();
        let r = rate_check(&[0.1], half(), RateMode::Seminorm, &spec).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.meta["trend"], Cell::Text("n/a".into()));
    }

    #[test]
    fn rate_scan_rejects_unsorted_grid() {
        let spec = QuadratureSpec::default();
        assert!(rate_check(&[1e-3, 1e-2], half(), RateMode::Seminorm, &spec).is_err());
        assert!(rate_check(&[0.6], half(), RateMode::Seminorm, &spec).is_err());
    }

    #[test]
    fn embedding_ratio_guards_zero() {
        let spec = QuadratureSpec::default();
        let zero = GridFunction::uniform(-1.0, 1.0, 4, |_| 0.0).unwrap();
        assert_eq!(
            embedding_ratio(&zero, &[2.0], half(), &spec)
                .unwrap_err()
                .kind(),
            "input"
        );
    }

    #[test]
    fn embedding_ratio_is_scale_free() {
        let spec = QuadratureSpec::default();
        let u = GridFunction::uniform(-1.0, 1.0, 8, |x| 1.0 - x.abs()).unwrap();
        let a = embedding_ratio(&u, &[2.0, 4.0, 8.0, 16.0, 32.0], half(), &spec).unwrap();
        let b =
            embedding_ratio(&u.scaled(-3.5), &[2.0, 4.0, 8.0, 16.0, 32.0], half(), &spec).unwrap();
        let ra = a.column_f64("ratio").unwrap();
        let rb = b.column_f64("ratio").unwrap();
        for (x, y) in ra.iter().zip(&rb) {
            assert!(x.is_finite());
            assert!((x - y).abs() < 1e-10 * x);
        }
    }
}
