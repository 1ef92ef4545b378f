use rayon::prelude::*;

use crate::error::Result;
use crate::function_models::MoserFunction;
use crate::quadrature::QuadratureSpec;
use crate::report::{Cell, ScanReport};
use crate::seminorm::validate_eps_grid;

use super::{mt_integral, Domain, MTConfig, Variant};

/// Final full-domain value above which a strictly increasing scan counts as
/// divergent.
pub const GROWTH_THRESHOLD: f64 = 1e3;

/// Positive floor for the `(−ε, ε)` core values.
pub const CORE_FLOOR: f64 = 0.05;

/// Scan classification from full-domain and core values along a decreasing
/// ε grid: `divergent`, `increasing`, `floored`, `bounded`, or
/// `inconclusive` for fewer than two points.
pub fn classify(full: &[f64], core: &[f64]) -> &'static str {
    if full.len() < 2 {
        return "inconclusive";
    }
    let increasing = full.windows(2).all(|w| w[1] > w[0]);
    if increasing && full[full.len() - 1] >= GROWTH_THRESHOLD {
        "divergent"
    } else if increasing {
        "increasing"
    } else if core.iter().all(|&c| c >= CORE_FLOOR) {
        "floored"
    } else {
        "bounded"
    }
}

/// Evaluates the functional on `u_ε` for each ε, over the whole domain and
/// over the plateau `(−ε, ε)`. The `classification` column classifies the
/// scan up to and including each row; `meta.classification` covers the
/// whole grid.
pub fn sharpness_scan(
    config: &MTConfig,
    eps_grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<ScanReport> {
    validate_eps_grid(eps_grid)?;
    let full_domain = match config.variant {
        Variant::ExpInterval => Domain::Interval(-1.0, 1.0),
        Variant::PhiLine => Domain::Line,
    };
    let rows: Vec<(f64, f64, f64)> = eps_grid
        .par_iter()
        .map(|&eps| -> Result<(f64, f64, f64)> {
            let u = MoserFunction::new(eps, config.params)?;
            let full = mt_integral(&u, config, full_domain, spec)?.value;
            let core = mt_integral(&u, config, Domain::Interval(-eps, eps), spec)?.value;
            Ok((eps, full, core))
        })
        .collect::<Result<_>>()?;
    let full: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let core: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let mut report =
        ScanReport::new(&["eps", "alpha", "value_full", "value_core", "classification"]);
    for (i, &(eps, f, c)) in rows.iter().enumerate() {
        report.push_row(vec![
            Cell::Num(eps),
            Cell::Num(config.alpha),
            Cell::Num(f),
            Cell::Num(c),
            Cell::from(classify(&full[..=i], &core[..=i])),
        ]);
    }
    report.set_meta("classification", classify(&full, &core));
    report.set_meta("growth_threshold", GROWTH_THRESHOLD);
    report.set_meta("core_floor", CORE_FLOOR);
    report.set_meta("normalization", config.normalization.to_string());
    report.set_meta("variant", config.variant.to_string());
    report.set_meta("weighted", config.weight.is_some());
    Ok(report)
}
